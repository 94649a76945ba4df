//! Reviewer feedback: mention fingerprints and the append-only suppression
//! store.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{EntityMention, EntityType};

/// Characters of normalized context taken on each side of a mention.
pub const CONTEXT_CHARS: usize = 16;

/// Lower-case and collapse whitespace runs to a single space.
fn normalize(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut space = false;
    for c in s.chars() {
        if c.is_whitespace() {
            space = true;
            continue;
        }
        if space && !out.is_empty() {
            out.push(' ');
        }
        space = false;
        out.extend(c.to_lowercase());
    }
    if space {
        out.push(' ');
    }
    out
}

fn context_before(text: &str, start: usize) -> String {
    let raw: String = {
        let mut v: Vec<char> = text[..start].chars().rev().take(CONTEXT_CHARS * 4).collect();
        v.reverse();
        v.into_iter().collect()
    };
    let n = normalize(&raw);
    let chars: Vec<char> = n.chars().collect();
    chars[chars.len().saturating_sub(CONTEXT_CHARS)..].iter().collect()
}

fn context_after(text: &str, end: usize) -> String {
    let raw: String = text[end..].chars().take(CONTEXT_CHARS * 4).collect();
    // A leading space must survive normalization, so pad before trimming.
    let n = normalize(&format!("x{raw}"));
    n.chars().skip(1).take(CONTEXT_CHARS).collect()
}

/// Stable fingerprint of a mention in its surrounding text: SHA-256 over the
/// normalized surface, the entity type and 16 normalized context characters
/// on either side.
pub fn fingerprint(text: &str, surface_start: usize, surface_end: usize, ty: EntityType) -> String {
    let surface = normalize(&text[surface_start..surface_end]);
    let before = context_before(text, surface_start);
    let after = context_after(text, surface_end);
    let mut h = Sha256::new();
    for (i, part) in [surface.trim(), ty.name(), &before, &after].iter().enumerate() {
        if i > 0 {
            h.update([0x1f]);
        }
        h.update(part.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn mention_fingerprint(text: &str, m: &EntityMention) -> String {
    fingerprint(text, m.span.start, m.span.end, m.entity_type)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackVerdict {
    FalsePositive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuppressionEntry {
    pub fingerprint: String,
    pub verdict: FeedbackVerdict,
    pub reviewer: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl SuppressionEntry {
    pub fn false_positive(fingerprint: impl Into<String>, reviewer: impl Into<String>) -> Self {
        Self {
            fingerprint: fingerprint.into(),
            verdict: FeedbackVerdict::FalsePositive,
            reviewer: reviewer.into(),
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    fn check(&self) -> Result<()> {
        let ok = self.fingerprint.len() == 64
            && self.fingerprint.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase());
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!(
                "malformed fingerprint `{}`: expected 64 lower-case hex digits",
                self.fingerprint
            )))
        }
    }
}

/// Whether a fingerprint is known to the store.
pub trait Suppressions {
    fn is_suppressed(&self, fingerprint: &str) -> bool;
}

impl Suppressions for std::collections::BTreeSet<String> {
    fn is_suppressed(&self, fingerprint: &str) -> bool {
        self.contains(fingerprint)
    }
}

/// JSON-lines file of suppression entries, first entry per fingerprint wins.
#[derive(Debug, Clone, Default)]
pub struct SuppressionStore {
    path: Option<PathBuf>,
    entries: BTreeMap<String, SuppressionEntry>,
}

impl SuppressionStore {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Open (or lazily create) the store at `path`.
    pub fn open(path: &Path) -> Result<Self> {
        let mut store = Self {
            path: Some(path.to_path_buf()),
            entries: BTreeMap::new(),
        };
        let content = match std::fs::read_to_string(path) {
            Ok(c) => c,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(store),
            Err(e) => return Err(Error::io(path, e)),
        };
        for (i, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: SuppressionEntry = serde_json::from_str(line).map_err(|e| Error::Load {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?;
            store.entries.entry(entry.fingerprint.clone()).or_insert(entry);
        }
        Ok(store)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, fingerprint: &str) -> Option<&SuppressionEntry> {
        self.entries.get(fingerprint)
    }

    pub fn entries(&self) -> impl Iterator<Item = &SuppressionEntry> {
        self.entries.values()
    }

    /// Persist `entry`. Returns `false` when its fingerprint was already
    /// recorded. On a write failure the store is left unchanged.
    pub fn record(&mut self, entry: SuppressionEntry) -> Result<bool> {
        entry.check()?;
        if self.entries.contains_key(&entry.fingerprint) {
            return Ok(false);
        }
        if let Some(path) = &self.path {
            let mut line = serde_json::to_string(&entry)?;
            line.push('\n');
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Error::io(path, e))?;
            // One write call per line keeps concurrent appenders from interleaving.
            f.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
            f.flush().map_err(|e| Error::io(path, e))?;
        }
        self.entries.insert(entry.fingerprint.clone(), entry);
        Ok(true)
    }

    /// Fingerprints known at this moment.
    pub fn snapshot(&self) -> std::collections::BTreeSet<String> {
        self.entries.keys().cloned().collect()
    }
}

impl Suppressions for SuppressionStore {
    fn is_suppressed(&self, fingerprint: &str) -> bool {
        self.entries.contains_key(fingerprint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "See Sherlock Holmes, 221B Baker Street for the   example.";

    fn fp_of(text: &str, needle: &str, ty: EntityType) -> String {
        let s = text.find(needle).unwrap();
        fingerprint(text, s, s + needle.len(), ty)
    }

    #[test]
    fn fingerprint_is_deterministic_and_context_sensitive() {
        let a = fp_of(TEXT, "Sherlock Holmes", EntityType::Person);
        assert_eq!(a, fp_of(TEXT, "Sherlock Holmes", EntityType::Person));
        assert_eq!(a.len(), 64);
        assert_ne!(a, fp_of(TEXT, "Sherlock Holmes", EntityType::Location));
        let other = "Real tenant Sherlock Holmes, 221B Baker Street, owes rent.";
        assert_ne!(a, fp_of(other, "Sherlock Holmes", EntityType::Person));
    }

    #[test]
    fn fingerprint_ignores_case_and_whitespace_runs() {
        let t2 = "See  SHERLOCK Holmes,  221b baker street for the example.";
        assert_eq!(
            fp_of(TEXT, "Sherlock Holmes", EntityType::Person),
            fp_of(t2, "SHERLOCK Holmes", EntityType::Person)
        );
    }

    #[test]
    fn context_is_limited_to_sixteen_chars() {
        let a = "zzzz a long common prefix! Alice was here and then left for good";
        let b = "yyyy a long common prefix! Alice was here and then left for ever";
        assert_eq!(context_before(a, a.find("Alice").unwrap()), " common prefix! ");
        assert_eq!(context_after(a, a.find("Alice").unwrap() + 5), " was here and th");
        assert_eq!(fp_of(a, "Alice", EntityType::Person), fp_of(b, "Alice", EntityType::Person));
    }

    #[test]
    fn store_is_idempotent_and_persistent() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let fp = fp_of(TEXT, "Sherlock Holmes", EntityType::Person);
        let mut s = SuppressionStore::open(&path).unwrap();
        assert!(s.record(SuppressionEntry::false_positive(&fp, "rev")).unwrap());
        assert!(!s.record(SuppressionEntry::false_positive(&fp, "rev2")).unwrap());
        assert_eq!(s.len(), 1);
        let reopened = SuppressionStore::open(&path).unwrap();
        assert!(reopened.is_suppressed(&fp));
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1);
    }

    #[test]
    fn failed_write_leaves_store_unchanged() {
        let dir = tempfile::tempdir().unwrap();
        // A directory cannot be opened for appending.
        let mut s = SuppressionStore::open(dir.path()).unwrap_or_else(|_| SuppressionStore {
            path: Some(dir.path().to_path_buf()),
            entries: BTreeMap::new(),
        });
        let fp = "a".repeat(64);
        assert!(matches!(s.record(SuppressionEntry::false_positive(&fp, "r")), Err(Error::Io { .. })));
        assert!(s.is_empty());
    }

    #[test]
    fn malformed_fingerprint_rejected() {
        let mut s = SuppressionStore::in_memory();
        assert!(s.record(SuppressionEntry::false_positive("xyz", "r")).is_err());
    }

    #[test]
    fn corrupt_line_reports_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        std::fs::write(&path, "{not json}\n").unwrap();
        assert!(matches!(SuppressionStore::open(&path), Err(Error::Load { line: 1, .. })));
    }
}
