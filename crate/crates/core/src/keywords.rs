//! Context keyword tables and the per-document context (chunks plus keyword
//! occurrences) shared by the resolver and the scorer.

use std::collections::BTreeSet;
use std::path::Path;

use aho_corasick::{AhoCorasick, MatchKind};
use serde::{Deserialize, Serialize};

use crate::chunker::{self, Chunk};
use crate::error::{Error, Result};
use crate::model::{EntityType, TextSpan};
use crate::resources::BUNDLED_KEYWORDS;

/// Radius, in chunks, of the context window around a mention.
pub const WINDOW_RADIUS: usize = 1;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KeywordEntry {
    pub keyword: String,
    pub entity_type: EntityType,
    pub locale: String,
}

/// Parse one keyword table: `keyword<TAB>entity_type` per line, `#` comments.
pub fn parse_table(locale: &str, source: &str, content: &str) -> Result<Vec<KeywordEntry>> {
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let load_err = |message: String| Error::Load {
            path: source.into(),
            line: i + 1,
            message,
        };
        let (kw, ty) = line
            .split_once('\t')
            .ok_or_else(|| load_err("expected `keyword<TAB>entity_type`".into()))?;
        let kw = kw.trim();
        if kw.is_empty() {
            return Err(load_err("empty keyword".into()));
        }
        let entity_type: EntityType = ty
            .trim()
            .parse()
            .map_err(|_| load_err(format!("unknown entity type `{}`", ty.trim())))?;
        out.push(KeywordEntry {
            keyword: kw.to_lowercase(),
            entity_type,
            locale: locale.to_owned(),
        });
    }
    Ok(out)
}

/// One keyword occurrence in a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordHit {
    pub keyword: String,
    pub entity_type: EntityType,
    pub span: TextSpan,
}

/// Case-insensitive multi-pattern matcher over keyword tables.
#[derive(Debug, Clone)]
pub struct KeywordIndex {
    entries: Vec<(String, EntityType)>,
    // pattern id -> index into `entries`
    pattern_entry: Vec<usize>,
    matcher: AhoCorasick,
}

impl KeywordIndex {
    pub fn new(entries: impl IntoIterator<Item = KeywordEntry>) -> Self {
        let unique: BTreeSet<(String, EntityType)> = entries
            .into_iter()
            .map(|e| (e.keyword, e.entity_type))
            .collect();
        let entries: Vec<(String, EntityType)> = unique.into_iter().collect();
        let mut patterns = Vec::new();
        let mut pattern_entry = Vec::new();
        for (i, (kw, _)) in entries.iter().enumerate() {
            // ASCII case is folded by the matcher; non-ASCII keywords also get
            // their capitalised and upper-case spellings.
            let mut variants = BTreeSet::from([kw.clone()]);
            if !kw.is_ascii() {
                variants.insert(capitalize(kw));
                variants.insert(kw.to_uppercase());
            }
            for v in variants {
                patterns.push(v);
                pattern_entry.push(i);
            }
        }
        let matcher = AhoCorasick::builder()
            .ascii_case_insensitive(true)
            .match_kind(MatchKind::Standard)
            .build(&patterns)
            .expect("keyword automaton");
        Self {
            entries,
            pattern_entry,
            matcher,
        }
    }

    /// Index over the bundled tables of `locales`; unknown locales are ignored.
    pub fn bundled<'a>(locales: impl IntoIterator<Item = &'a str>) -> Self {
        let wanted: BTreeSet<&str> = locales.into_iter().collect();
        let mut entries = Vec::new();
        for (locale, content) in BUNDLED_KEYWORDS {
            if wanted.contains(locale) {
                entries.extend(
                    parse_table(locale, &format!("<bundled>/{locale}.tsv"), content)
                        .expect("bundled keyword table"),
                );
            }
        }
        Self::new(entries)
    }

    /// Load every `<locale>.tsv` file in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Vec<KeywordEntry>> {
        let mut entries = Vec::new();
        let rd = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths: Vec<_> = rd.filter_map(|e| e.ok().map(|e| e.path())).collect();
        paths.sort();
        for p in paths.into_iter().filter(|p| p.extension().is_some_and(|x| x == "tsv")) {
            let locale = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_owned();
            let content = std::fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            entries.extend(parse_table(&locale, &p.display().to_string(), &content)?);
        }
        Ok(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// All keyword occurrences in `text`, sorted by position. Keywords that
    /// begin or end with a letter or digit must sit on word boundaries.
    pub fn find(&self, text: &str) -> Vec<KeywordHit> {
        let mut hits: Vec<KeywordHit> = self
            .matcher
            .find_overlapping_iter(text)
            .filter(|m| word_bounded(text, m.start(), m.end()))
            .map(|m| {
                let (kw, ty) = &self.entries[self.pattern_entry[m.pattern().as_usize()]];
                KeywordHit {
                    keyword: kw.clone(),
                    entity_type: *ty,
                    span: TextSpan::new(m.start(), m.end()),
                }
            })
            .collect();
        hits.sort_by(|a, b| (a.span, &a.keyword).cmp(&(b.span, &b.keyword)));
        hits.dedup_by(|b, a| a.span == b.span && a.keyword == b.keyword);
        hits
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn word_bounded(text: &str, start: usize, end: usize) -> bool {
    let inner_first = text[start..end].chars().next();
    let inner_last = text[start..end].chars().next_back();
    let before = text[..start].chars().next_back();
    let after = text[end..].chars().next();
    let clash = |edge: Option<char>, outside: Option<char>| {
        edge.is_some_and(char::is_alphanumeric) && outside.is_some_and(char::is_alphanumeric)
    };
    !clash(inner_first, before) && !clash(inner_last, after)
}

/// Chunks and keyword occurrences for one document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentContext {
    pub chunks: Vec<Chunk>,
    pub keyword_hits: Vec<KeywordHit>,
}

impl DocumentContext {
    pub fn build(text: &str, chunks: Vec<Chunk>, keywords: &KeywordIndex) -> Self {
        Self {
            chunks,
            keyword_hits: keywords.find(text),
        }
    }

    /// Byte range covered by the chunk window around `span`.
    pub fn window(&self, span: TextSpan) -> TextSpan {
        chunker::window_span(&self.chunks, chunker::window(&self.chunks, span, WINDOW_RADIUS))
    }

    /// Keyword hits lying entirely inside the window around `span`.
    pub fn hits_near(&self, span: TextSpan) -> impl Iterator<Item = &KeywordHit> {
        let w = self.window(span);
        self.keyword_hits.iter().filter(move |h| w.contains(&h.span))
    }

    /// Number of hits near `span` that support `ty`.
    pub fn support(&self, span: TextSpan, ty: EntityType) -> usize {
        self.hits_near(span).filter(|h| h.entity_type == ty).count()
    }

    /// Whether a financial keyword (bank or card vocabulary) is near `span`.
    pub fn financial_context(&self, span: TextSpan) -> bool {
        self.hits_near(span)
            .any(|h| matches!(h.entity_type, EntityType::BankAccount | EntityType::CreditCard))
    }
}
