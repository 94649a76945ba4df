//! Person and place recognition over capitalized token runs.
//!
//! A run is a sequence of capitalized words separated only by spaces, with
//! lowercase name particles ("von", "da") allowed between capitalized words.
//! Public-figure and place phrases are matched against the gazetteer
//! (longest first). Otherwise a run becomes a Person when its first word is a
//! known first name, or when it directly follows an honorific.

use std::collections::HashSet;
use std::sync::LazyLock;

use regex::Regex;

use super::patterns::LocalePatterns;
use crate::gazetteer::Gazetteer;
use crate::model::{EntityMention, EntityType, TextSpan, UNSPECIFIED_LOCALE};

const MAX_NAME_TOKENS: usize = 4;

static WORD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"[\p{L}\p{M}\p{Nd}_][\p{L}\p{M}\p{Nd}_'’-]*").expect("static regex"));

static HANDLE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"@[A-Za-z][A-Za-z0-9_-]{1,38}").expect("static regex"));

/// Capitalized words that open sentences but never start or extend a name.
const STOPWORDS: &[&str] = &[
    "the", "a", "an", "and", "or", "but", "in", "on", "at", "for", "to", "of", "is", "was", "by",
    "with", "from", "this", "that", "please", "contact", "dear", "hi", "hello", "thanks", "der",
    "die", "das", "und", "le", "la", "les", "el", "los", "las", "o", "os", "as", "i", "we", "you",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Case {
    Upper,
    Lower,
    Uncased,
    Other,
}

#[derive(Debug, Clone)]
struct Token<'a> {
    start: usize,
    end: usize,
    text: &'a str,
    case: Case,
}

impl Token<'_> {
    fn capitalized(&self) -> bool {
        matches!(self.case, Case::Upper | Case::Uncased)
    }

    fn lower(&self) -> String {
        self.text.to_lowercase()
    }
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    WORD.find_iter(text)
        .map(|m| {
            let mut s = m.as_str();
            for suffix in ["'s", "’s", "'", "’", "-"] {
                if let Some(stripped) = s.strip_suffix(suffix) {
                    if !stripped.is_empty() {
                        s = stripped;
                    }
                }
            }
            let first = s.chars().next().unwrap_or(' ');
            let case = if first.is_uppercase() {
                Case::Upper
            } else if first.is_lowercase() {
                Case::Lower
            } else if first.is_alphabetic() {
                Case::Uncased
            } else {
                Case::Other
            };
            Token {
                start: m.start(),
                end: m.start() + s.len(),
                text: s,
                case,
            }
        })
        .collect()
}

/// Locale-specific name cues.
#[derive(Debug, Clone)]
pub(crate) struct NameCues {
    pub locale: String,
    honorifics: HashSet<String>,
    particles: HashSet<String>,
}

impl NameCues {
    pub fn from_locale(lp: &LocalePatterns) -> Self {
        Self {
            locale: lp.locale.clone(),
            honorifics: lp
                .honorifics
                .iter()
                .map(|h| h.trim_end_matches('.').to_lowercase())
                .collect(),
            particles: lp.name_particles.iter().map(|p| p.to_lowercase()).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct NameRecognizer {
    cues: Vec<NameCues>,
    /// Month spellings from every known locale; these stop a name run.
    month_words: HashSet<String>,
    stopwords: HashSet<&'static str>,
}

impl NameRecognizer {
    pub fn new<'a>(
        enabled: impl IntoIterator<Item = &'a LocalePatterns>,
        all_known: impl IntoIterator<Item = &'a LocalePatterns>,
    ) -> Self {
        let month_words = all_known
            .into_iter()
            .flat_map(|lp| lp.months.iter().flatten())
            .map(|m| m.trim_end_matches('.').to_lowercase())
            .collect();
        Self {
            cues: enabled.into_iter().map(NameCues::from_locale).collect(),
            month_words,
            stopwords: STOPWORDS.iter().copied().collect(),
        }
    }

    /// Public figures (as Person) and gazetteer places (as Location).
    pub fn detect_phrases(&self, text: &str, gazetteer: &Gazetteer, out: &mut Vec<EntityMention>) {
        let tokens = tokenize(text);
        let max = gazetteer.max_phrase_tokens().max(1);
        let mut i = 0;
        while i < tokens.len() {
            if !tokens[i].capitalized() {
                i += 1;
                continue;
            }
            let mut hit = None;
            let mut k = i;
            let mut chain_end = i;
            while k < tokens.len() && k - i < max {
                if k > i && !adjacent(text, &tokens[k - 1], &tokens[k]) {
                    break;
                }
                chain_end = k;
                k += 1;
            }
            for end in (i..=chain_end).rev() {
                if !tokens[end].capitalized() {
                    continue;
                }
                let phrase = &text[tokens[i].start..tokens[end].end];
                if gazetteer.lookup_public_figure(phrase) {
                    hit = Some((end, EntityType::Person, "public_figure", 0.95));
                } else if gazetteer.is_location(phrase) {
                    hit = Some((end, EntityType::Location, "location_gazetteer", 0.8));
                }
                if hit.is_some() {
                    break;
                }
            }
            match hit {
                Some((end, ty, id, conf)) => {
                    out.push(EntityMention::new(
                        text,
                        TextSpan::new(tokens[i].start, tokens[end].end),
                        ty,
                        UNSPECIFIED_LOCALE,
                        id,
                        conf,
                    ));
                    i = end + 1;
                }
                None => i += 1,
            }
        }
    }

    /// First-name and honorific cues, run once per enabled locale.
    pub fn detect_persons(&self, text: &str, gazetteer: &Gazetteer, out: &mut Vec<EntityMention>) {
        let tokens = tokenize(text);
        for cues in &self.cues {
            let mut i = 0;
            while i < tokens.len() {
                let t = &tokens[i];
                if !t.capitalized() || self.is_stop(t, cues) {
                    i += 1;
                    continue;
                }
                let after_honorific = i > 0
                    && cues.honorifics.contains(&tokens[i - 1].lower())
                    && honorific_gap(&text[tokens[i - 1].end..t.start]);
                let first_name = gazetteer.is_first_name(t.text, [cues.locale.as_str()])
                    || t.text
                        .split_once('-')
                        .is_some_and(|(head, _)| gazetteer.is_first_name(head, [cues.locale.as_str()]));
                if !after_honorific && !first_name {
                    i += 1;
                    continue;
                }
                let end = self.extend_run(text, &tokens, i, cues, gazetteer);
                let extra = (end - i) as f64;
                let (id, conf) = if first_name {
                    ("person_first_name", 0.7 + 0.1 * extra.min(2.0))
                } else {
                    ("person_honorific", 0.8)
                };
                out.push(EntityMention::new(
                    text,
                    TextSpan::new(t.start, tokens[end].end),
                    EntityType::Person,
                    &cues.locale,
                    id,
                    conf,
                ));
                i = end + 1;
            }
        }
    }

    /// Handle-style pseudonyms such as `@jdoe`.
    pub fn detect_handles(&self, text: &str, out: &mut Vec<EntityMention>) {
        for m in HANDLE.find_iter(text) {
            let prev = text[..m.start()].chars().next_back();
            let next = text[m.end()..].chars().next();
            if prev.is_some_and(|c| c.is_alphanumeric() || "._%+-".contains(c))
                || next.is_some_and(|c| c.is_alphanumeric() || c == '@')
            {
                continue;
            }
            out.push(EntityMention::new(
                text,
                TextSpan::new(m.start(), m.end()),
                EntityType::Person,
                UNSPECIFIED_LOCALE,
                "pseudonym_handle",
                0.6,
            ));
        }
    }

    fn is_stop(&self, t: &Token<'_>, cues: &NameCues) -> bool {
        let l = t.lower();
        self.stopwords.contains(l.as_str())
            || self.month_words.contains(&l)
            || cues.honorifics.contains(&l)
    }

    /// Index of the last token of the name starting at `start`.
    fn extend_run(
        &self,
        text: &str,
        tokens: &[Token<'_>],
        start: usize,
        cues: &NameCues,
        gazetteer: &Gazetteer,
    ) -> usize {
        if tokens[start].case == Case::Uncased {
            return start;
        }
        let mut last = start;
        let mut count = 1;
        let mut j = start + 1;
        while j < tokens.len() && count < MAX_NAME_TOKENS && adjacent(text, &tokens[j - 1], &tokens[j]) {
            let t = &tokens[j];
            if t.case == Case::Upper && !self.is_stop(t, cues) && !gazetteer.is_location(t.text) {
                last = j;
                count += 1;
                j += 1;
            } else if t.case == Case::Lower
                && cues.particles.contains(&t.lower())
                && tokens.get(j + 1).is_some_and(|n| {
                    n.case == Case::Upper && adjacent(text, t, n) && !self.is_stop(n, cues)
                })
            {
                last = j + 1;
                count += 1;
                j += 2;
            } else {
                break;
            }
        }
        last
    }
}

fn adjacent(text: &str, a: &Token<'_>, b: &Token<'_>) -> bool {
    let gap = &text[a.end..b.start];
    !gap.is_empty() && gap.len() <= 2 && gap.chars().all(|c| c == ' ' || c == '\u{a0}')
}

fn honorific_gap(gap: &str) -> bool {
    let g = gap.strip_prefix('.').unwrap_or(gap);
    !g.is_empty() && g.len() <= 2 && g.chars().all(|c| c == ' ' || c == '\u{a0}')
}
