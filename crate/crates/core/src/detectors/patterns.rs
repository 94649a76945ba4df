//! Declarative per-locale pattern files.
//!
//! Each file is TOML:
//!
//! ```toml
//! locale = "de"
//! numeric_date_order = "dmy"          # mdy | dmy | ymd, optional
//! months = [["Januar", "Jan."], ...]  # 12 entries, spellings per month
//! months_case_insensitive = false
//! date_formats = ['(?P<day>\d{1,2})\. ?(?P<month>{months})(?: (?P<year>\d{4}))?']
//! honorifics = ["Herr", "Frau"]
//! name_particles = ["von"]
//!
//! [[patterns]]
//! id = "de_steuer_id"
//! entity_type = "NationalId"
//! regex = '\b\d{2} ?\d{3} ?\d{3} ?\d{3}\b'
//! validator = "steuer_id"             # none | luhn | verhoeff | ssn | steuer_id | iban
//! min_digits = 11                     # optional digit-count bounds
//! max_digits = 11
//! confidence = 0.85
//! strict_boundaries = true            # default
//! ```
//!
//! A named capture group `value` narrows the reported span to that group.
//! `{months}` in a date format expands to the alternation of all month
//! spellings.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{toml_load_error, Error, Result};
use crate::model::{EntityMention, EntityType, TextSpan, UNSPECIFIED_LOCALE};
use crate::validators;

/// Locale key of the always-active pattern file.
pub const COMMON_LOCALE: &str = "common";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DateOrder {
    Mdy,
    Dmy,
    Ymd,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Validator {
    #[default]
    None,
    Luhn,
    Verhoeff,
    Ssn,
    SteuerId,
    Iban,
    Nir,
    Dni,
    Cpf,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternDef {
    pub id: String,
    pub entity_type: EntityType,
    pub regex: String,
    #[serde(default)]
    pub validator: Validator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_digits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_digits: Option<usize>,
    pub confidence: f64,
    #[serde(default = "default_true")]
    pub strict_boundaries: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalePatterns {
    pub locale: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric_date_order: Option<DateOrder>,
    #[serde(default)]
    pub months: Vec<Vec<String>>,
    #[serde(default)]
    pub months_case_insensitive: bool,
    #[serde(default)]
    pub date_formats: Vec<String>,
    #[serde(default)]
    pub honorifics: Vec<String>,
    #[serde(default)]
    pub name_particles: Vec<String>,
    #[serde(default)]
    pub patterns: Vec<PatternDef>,
}

impl LocalePatterns {
    pub fn parse(source: &str, content: &str) -> Result<Self> {
        let lp: LocalePatterns =
            toml::from_str(content).map_err(|e| toml_load_error(source, content, &e))?;
        if !lp.months.is_empty() && lp.months.len() != 12 {
            return Err(Error::Config(format!(
                "{source}: expected 12 month entries, found {}",
                lp.months.len()
            )));
        }
        for p in &lp.patterns {
            if !(0.0..=1.0).contains(&p.confidence) {
                return Err(Error::Config(format!(
                    "{source}: pattern `{}` confidence outside [0,1]",
                    p.id
                )));
            }
        }
        Ok(lp)
    }
}

/// All known locale pattern files, keyed by locale tag.
#[derive(Debug, Clone, Default)]
pub struct PatternRegistry {
    locales: BTreeMap<String, LocalePatterns>,
}

impl PatternRegistry {
    pub fn bundled() -> &'static PatternRegistry {
        static BUNDLED: LazyLock<PatternRegistry> = LazyLock::new(|| {
            let mut r = PatternRegistry::default();
            for (name, content) in crate::resources::BUNDLED_PATTERNS {
                r.insert(LocalePatterns::parse(name, content).expect("bundled pattern file parses"));
            }
            r
        });
        &BUNDLED
    }

    /// Loads every `*.toml` file in `dir`, replacing bundled entries with the
    /// same locale tag.
    pub fn load_dir(&mut self, dir: &Path) -> Result<usize> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .collect();
        paths.sort();
        for p in &paths {
            let content = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            self.insert(LocalePatterns::parse(&p.display().to_string(), &content)?);
        }
        Ok(paths.len())
    }

    pub fn insert(&mut self, patterns: LocalePatterns) {
        self.locales.insert(patterns.locale.clone(), patterns);
    }

    pub fn get(&self, locale: &str) -> Option<&LocalePatterns> {
        self.locales.get(locale)
    }

    pub fn common(&self) -> Option<&LocalePatterns> {
        self.locales.get(COMMON_LOCALE)
    }

    pub fn contains_locale(&self, locale: &str) -> bool {
        locale != COMMON_LOCALE && self.locales.contains_key(locale)
    }

    /// User-selectable locale tags (excludes the common file).
    pub fn locales(&self) -> impl Iterator<Item = &str> {
        self.locales
            .keys()
            .map(String::as_str)
            .filter(|l| *l != COMMON_LOCALE)
    }

    pub fn all(&self) -> impl Iterator<Item = &LocalePatterns> {
        self.locales.values()
    }
}

/// A pattern from a locale file, compiled.
#[derive(Debug, Clone)]
pub(crate) struct CompiledPattern {
    pub def: PatternDef,
    pub locale: String,
    regex: Regex,
    value_group: Option<usize>,
}

impl CompiledPattern {
    pub fn compile(def: &PatternDef, locale: &str) -> Result<Self> {
        let regex = Regex::new(&def.regex)
            .map_err(|e| Error::Config(format!("pattern `{}`: {e}", def.id)))?;
        let value_group = regex.capture_names().position(|n| n == Some("value"));
        Ok(Self {
            def: def.clone(),
            locale: if locale == COMMON_LOCALE {
                UNSPECIFIED_LOCALE.to_owned()
            } else {
                locale.to_owned()
            },
            regex,
            value_group,
        })
    }

    pub fn find(&self, text: &str, out: &mut Vec<EntityMention>) {
        let mut push = |start: usize, end: usize| {
            if let Some(span) = self.accept(text, start, end) {
                out.push(EntityMention::new(
                    text,
                    span,
                    self.def.entity_type,
                    &self.locale,
                    &self.def.id,
                    self.def.confidence,
                ));
            }
        };
        match self.value_group {
            Some(g) => {
                for caps in self.regex.captures_iter(text) {
                    if let Some(m) = caps.get(g) {
                        push(m.start(), m.end());
                    }
                }
            }
            None => {
                for m in self.regex.find_iter(text) {
                    push(m.start(), m.end());
                }
            }
        }
    }

    fn accept(&self, text: &str, start: usize, mut end: usize) -> Option<TextSpan> {
        if !isolated(text, start, end, self.def.strict_boundaries) {
            return None;
        }
        loop {
            let surface = &text[start..end];
            if self.digits_ok(surface) && self.validate(surface) {
                return Some(TextSpan::new(start, end));
            }
            // IBANs may have swallowed a trailing all-caps word.
            if self.def.validator != Validator::Iban {
                return None;
            }
            end = start + surface.rfind(' ')?;
        }
    }

    fn digits_ok(&self, surface: &str) -> bool {
        let n = surface.bytes().filter(u8::is_ascii_digit).count();
        self.def.min_digits.is_none_or(|m| n >= m) && self.def.max_digits.is_none_or(|m| n <= m)
    }

    fn validate(&self, surface: &str) -> bool {
        let digits = validators::strip_to_digits(surface);
        let check = |r: Result<bool>| r.unwrap_or(false);
        match self.def.validator {
            Validator::None => true,
            Validator::Luhn => check(validators::luhn_check(&digits)),
            Validator::Verhoeff => check(validators::verhoeff_check(&digits)),
            Validator::Ssn => digits.len() == 9 && check(validators::ssn_structure_check(&digits)),
            Validator::SteuerId => {
                digits.len() == 11 && check(validators::steuer_id_check(&digits))
            }
            Validator::Nir => check(validators::nir_check(&digits)),
            Validator::Dni => validators::dni_check(surface),
            Validator::Cpf => check(validators::cpf_check(&digits)),
            Validator::Iban => {
                let compact: String = surface.chars().filter(|c| !c.is_whitespace()).collect();
                validators::iban_check(&compact)
            }
        }
    }
}

const GROUP_SEPARATORS: [char; 6] = [' ', '-', '.', '/', ',', ':'];

/// Rejects a match glued to surrounding alphanumerics. With `strict`, also
/// rejects a match that continues a digit group (`12 <match>` or
/// `<match>-34`).
pub(crate) fn isolated(text: &str, start: usize, end: usize, strict: bool) -> bool {
    let mut before = text[..start].chars().rev();
    let mut after = text[end..].chars();
    let prev = before.next();
    let next = after.next();
    if prev.is_some_and(char::is_alphanumeric) || next.is_some_and(char::is_alphanumeric) {
        return false;
    }
    if strict {
        if prev.is_some_and(|c| GROUP_SEPARATORS.contains(&c))
            && before.next().is_some_and(|c| c.is_ascii_digit())
        {
            return false;
        }
        if next.is_some_and(|c| GROUP_SEPARATORS.contains(&c))
            && after.next().is_some_and(|c| c.is_ascii_digit())
        {
            return false;
        }
    }
    true
}
