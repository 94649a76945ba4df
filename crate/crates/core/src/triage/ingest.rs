//! Materialises pull-request content from a directory or an export file.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrFile {
    pub path: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedFile {
    pub path: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceMeta {
    /// `directory`, `export` or `memory`.
    pub kind: String,
    pub origin: String,
    #[serde(default)]
    pub skipped: Vec<SkippedFile>,
}

/// Text content of one pull request, files sorted by path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrDocument {
    pub pr_id: String,
    pub files: Vec<PrFile>,
    #[serde(default)]
    pub source_meta: SourceMeta,
}

impl PrDocument {
    /// Build from in-memory files. Paths must be unique.
    pub fn new(pr_id: impl Into<String>, files: Vec<PrFile>) -> Result<Self> {
        let mut doc = Self {
            pr_id: pr_id.into(),
            files,
            source_meta: SourceMeta {
                kind: "memory".into(),
                origin: String::new(),
                skipped: Vec::new(),
            },
        };
        doc.normalize()?;
        Ok(doc)
    }

    /// Single-file convenience constructor.
    pub fn single(pr_id: impl Into<String>, path: &str, content: &str) -> Self {
        Self::new(
            pr_id,
            vec![PrFile {
                path: path.into(),
                content: content.into(),
            }],
        )
        .expect("one path is unique")
    }

    fn normalize(&mut self) -> Result<()> {
        self.files.sort_by(|a, b| a.path.cmp(&b.path));
        let mut seen = BTreeSet::new();
        for f in &self.files {
            if !seen.insert(f.path.as_str()) {
                return Err(Error::Argument(format!(
                    "duplicate file path `{}` in PR {}",
                    f.path, self.pr_id
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("PR document serializes")
    }
}

/// Why `bytes` is not ingestible as text, if it is not.
fn binary_reason(bytes: &[u8]) -> Option<&'static str> {
    if bytes.contains(&0) {
        Some("binary (NUL byte)")
    } else if std::str::from_utf8(bytes).is_err() {
        Some("binary (not UTF-8)")
    } else {
        None
    }
}

/// Ingest a directory tree (PR id = directory name) or a JSON export file.
pub fn ingest(source: &Path) -> Result<PrDocument> {
    let meta = std::fs::metadata(source).map_err(|e| Error::io(source, e))?;
    if meta.is_dir() {
        ingest_dir(source)
    } else {
        ingest_export(source)
    }
}

fn ingest_dir(root: &Path) -> Result<PrDocument> {
    let mut files = Vec::new();
    let mut skipped = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let path = e.path().unwrap_or(root).to_path_buf();
            Error::io(path, e.into())
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .unwrap_or(entry.path())
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let bytes = std::fs::read(entry.path()).map_err(|e| Error::io(entry.path(), e))?;
        match binary_reason(&bytes) {
            Some(reason) => skipped.push(SkippedFile {
                path: rel,
                reason: reason.into(),
            }),
            None => files.push(PrFile {
                path: rel,
                content: String::from_utf8(bytes).expect("checked UTF-8"),
            }),
        }
    }
    let pr_id = root
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| root.display().to_string());
    let mut doc = PrDocument {
        pr_id,
        files,
        source_meta: SourceMeta {
            kind: "directory".into(),
            origin: root.display().to_string(),
            skipped,
        },
    };
    doc.normalize()?;
    Ok(doc)
}

fn ingest_export(path: &Path) -> Result<PrDocument> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut doc: PrDocument = serde_json::from_str(&content)?;
    doc.source_meta.kind = "export".into();
    doc.source_meta.origin = path.display().to_string();
    doc.normalize()?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directory_with_binary() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("b.txt"), "second").unwrap();
        std::fs::create_dir(dir.path().join("src")).unwrap();
        std::fs::write(dir.path().join("src/a.rs"), "first").unwrap();
        std::fs::write(dir.path().join("logo.png"), [0x89, b'P', 0, 1]).unwrap();
        let doc = ingest(dir.path()).unwrap();
        let paths: Vec<&str> = doc.files.iter().map(|f| f.path.as_str()).collect();
        assert_eq!(paths, vec!["b.txt", "src/a.rs"]);
        assert_eq!(doc.source_meta.skipped.len(), 1);
        assert_eq!(doc.source_meta.skipped[0].path, "logo.png");
    }

    #[test]
    fn empty_directory() {
        let dir = tempfile::tempdir().unwrap();
        assert!(ingest(dir.path()).unwrap().files.is_empty());
    }

    #[test]
    fn export_round_trip_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let doc = PrDocument::single("pr-1", "README.md", "hello");
        let p = dir.path().join("pr.json");
        std::fs::write(&p, doc.to_json()).unwrap();
        let back = ingest(&p).unwrap();
        assert_eq!(back.files, doc.files);
        assert_eq!(back.source_meta.kind, "export");

        let dup = PrFile {
            path: "a".into(),
            content: String::new(),
        };
        assert!(PrDocument::new("x", vec![dup.clone(), dup]).is_err());
    }

    #[test]
    fn missing_source_is_io_error() {
        assert!(matches!(ingest(Path::new("/nonexistent/pr")), Err(Error::Io { .. })));
    }
}
