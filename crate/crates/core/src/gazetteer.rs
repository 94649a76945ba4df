//! Read-only name lexicons: public figures, per-locale first names, and
//! place names.
//!
//! Snapshot files are UTF-8, one name per line. Blank lines and lines
//! starting with `#` are skipped. Header comments of the form
//! `# source: ...` and `# retrieved: ...` populate the snapshot metadata.
//! A line containing a tab or another control character is rejected.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::{Arc, LazyLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Honorifics removed from the front of a name before lookup.
const HONORIFICS: &[&str] = &[
    "mr", "mrs", "ms", "miss", "dr", "prof", "sir", "herr", "frau", "m", "mme", "mlle", "sr",
    "sra", "srta", "don", "doña", "dom", "shri", "sri", "smt", "श्री", "श्रीमती",
];

/// Case-folds, collapses internal whitespace, and strips leading honorifics
/// (as long as something remains after them).
pub fn normalize_name(name: &str) -> String {
    let lowered = name.to_lowercase();
    let mut tokens: Vec<&str> = lowered.split_whitespace().collect();
    while tokens.len() > 1 && HONORIFICS.contains(&tokens[0].trim_end_matches('.')) {
        tokens.remove(0);
    }
    tokens.join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotKind {
    PublicFigures,
    FirstNames,
    Locations,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub source: String,
    pub retrieved_at: Option<String>,
    pub kind: SnapshotKind,
    pub locale: Option<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadStats {
    pub names_loaded: usize,
    pub duplicates_dropped: usize,
}

#[derive(Debug, Default)]
pub struct Gazetteer {
    public_figures: HashSet<String>,
    first_names: BTreeMap<String, HashSet<String>>,
    locations: HashSet<String>,
    max_phrase_tokens: usize,
    snapshot_meta: Vec<SnapshotMeta>,
}

/// Locale key for first names that apply regardless of enabled locales.
pub const ANY_LOCALE: &str = "*";

impl Gazetteer {
    pub fn builder() -> GazetteerBuilder {
        GazetteerBuilder::default()
    }

    /// The lexicons shipped with the crate.
    pub fn bundled() -> Arc<Gazetteer> {
        static BUNDLED: LazyLock<Arc<Gazetteer>> =
            LazyLock::new(|| Arc::new(GazetteerBuilder::with_bundled().build()));
        Arc::clone(&BUNDLED)
    }

    pub fn lookup_public_figure(&self, name: &str) -> bool {
        let n = normalize_name(name);
        !n.is_empty() && self.public_figures.contains(&n)
    }

    /// True if `token` is a known first name for any of `locales` or for the
    /// locale-independent list.
    pub fn is_first_name<'a>(&self, token: &str, locales: impl IntoIterator<Item = &'a str>) -> bool {
        let t = token.to_lowercase();
        if self.first_names.get(ANY_LOCALE).is_some_and(|s| s.contains(&t)) {
            return true;
        }
        locales
            .into_iter()
            .any(|l| self.first_names.get(l).is_some_and(|s| s.contains(&t)))
    }

    pub fn is_location(&self, phrase: &str) -> bool {
        self.locations.contains(&normalize_name(phrase))
    }

    /// Longest public-figure or location phrase, in whitespace tokens.
    pub fn max_phrase_tokens(&self) -> usize {
        self.max_phrase_tokens
    }

    pub fn snapshot_meta(&self) -> &[SnapshotMeta] {
        &self.snapshot_meta
    }

    pub fn public_figure_count(&self) -> usize {
        self.public_figures.len()
    }

    pub fn first_names(&self, locale: &str) -> Vec<&str> {
        let mut v: Vec<&str> = self
            .first_names
            .get(locale)
            .map(|s| s.iter().map(String::as_str).collect())
            .unwrap_or_default();
        v.sort_unstable();
        v
    }
}

#[derive(Debug, Default)]
pub struct GazetteerBuilder {
    inner: Gazetteer,
}

impl GazetteerBuilder {
    /// A builder pre-loaded with the bundled lexicons, for extending them
    /// with extra snapshots.
    pub fn with_bundled() -> Self {
        let mut b = Self::default();
        for (name, kind, locale, content) in crate::resources::BUNDLED_LEXICONS {
            b.import_str(name, content, *kind, *locale)
                .expect("bundled lexicon is well-formed");
        }
        b
    }

    /// Loads a snapshot file into the builder.
    pub fn import_snapshot(
        &mut self,
        path: &Path,
        kind: SnapshotKind,
        locale: Option<&str>,
    ) -> Result<LoadStats> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.import_source(path.to_path_buf(), &content, kind, locale)
    }

    /// Loads snapshot content that did not come from a file.
    pub fn import_str(
        &mut self,
        source: &str,
        content: &str,
        kind: SnapshotKind,
        locale: Option<&str>,
    ) -> Result<LoadStats> {
        self.import_source(PathBuf::from(source), content, kind, locale)
    }

    fn import_source(
        &mut self,
        source: PathBuf,
        content: &str,
        kind: SnapshotKind,
        locale: Option<&str>,
    ) -> Result<LoadStats> {
        let mut names = Vec::new();
        let mut meta = SnapshotMeta {
            source: source.display().to_string(),
            retrieved_at: None,
            kind,
            locale: locale.map(str::to_owned),
        };
        for (i, raw) in content.lines().enumerate() {
            let line = raw.trim();
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("source:") {
                    meta.source = v.trim().to_owned();
                } else if let Some(v) = comment.strip_prefix("retrieved:") {
                    meta.retrieved_at = Some(v.trim().to_owned());
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            if let Some(c) = raw.chars().find(|c| c.is_control()) {
                return Err(Error::Load {
                    path: source,
                    line: i + 1,
                    message: format!("unexpected control character {c:?}; expected one name per line"),
                });
            }
            let n = normalize_name(line);
            if !n.is_empty() {
                names.push(n);
            }
        }

        let target = match kind {
            SnapshotKind::PublicFigures => &mut self.inner.public_figures,
            SnapshotKind::Locations => &mut self.inner.locations,
            SnapshotKind::FirstNames => self
                .inner
                .first_names
                .entry(locale.unwrap_or(ANY_LOCALE).to_owned())
                .or_default(),
        };
        let mut stats = LoadStats::default();
        for n in names {
            let tokens = n.split(' ').count();
            if target.insert(n) {
                stats.names_loaded += 1;
                if kind != SnapshotKind::FirstNames {
                    self.inner.max_phrase_tokens = self.inner.max_phrase_tokens.max(tokens);
                }
            } else {
                stats.duplicates_dropped += 1;
            }
        }
        self.inner.snapshot_meta.push(meta);
        Ok(stats)
    }

    pub fn build(self) -> Gazetteer {
        self.inner
    }
}
