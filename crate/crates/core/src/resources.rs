//! Data files compiled into the crate.

use crate::gazetteer::SnapshotKind;

pub(crate) const BUNDLED_LEXICONS: &[(&str, SnapshotKind, Option<&str>, &str)] = &[
    (
        "bundled:public_figures.txt",
        SnapshotKind::PublicFigures,
        None,
        include_str!("../data/lexicons/public_figures.txt"),
    ),
    (
        "bundled:locations.txt",
        SnapshotKind::Locations,
        None,
        include_str!("../data/lexicons/locations.txt"),
    ),
    (
        "bundled:first_names_en.txt",
        SnapshotKind::FirstNames,
        Some("en"),
        include_str!("../data/lexicons/first_names_en.txt"),
    ),
    (
        "bundled:first_names_de.txt",
        SnapshotKind::FirstNames,
        Some("de"),
        include_str!("../data/lexicons/first_names_de.txt"),
    ),
    (
        "bundled:first_names_fr.txt",
        SnapshotKind::FirstNames,
        Some("fr"),
        include_str!("../data/lexicons/first_names_fr.txt"),
    ),
    (
        "bundled:first_names_es.txt",
        SnapshotKind::FirstNames,
        Some("es"),
        include_str!("../data/lexicons/first_names_es.txt"),
    ),
    (
        "bundled:first_names_pt.txt",
        SnapshotKind::FirstNames,
        Some("pt"),
        include_str!("../data/lexicons/first_names_pt.txt"),
    ),
    (
        "bundled:first_names_hi-IN.txt",
        SnapshotKind::FirstNames,
        Some("hi-IN"),
        include_str!("../data/lexicons/first_names_hi-IN.txt"),
    ),
];

/// Surname lists used only by the synthetic corpus generator.
pub(crate) const BUNDLED_SURNAMES: &[(&str, &str)] = &[
    ("en", include_str!("../data/lexicons/surnames_en.txt")),
    ("de", include_str!("../data/lexicons/surnames_de.txt")),
    ("fr", include_str!("../data/lexicons/surnames_fr.txt")),
    ("es", include_str!("../data/lexicons/surnames_es.txt")),
    ("pt", include_str!("../data/lexicons/surnames_pt.txt")),
    ("hi-IN", include_str!("../data/lexicons/surnames_hi-IN.txt")),
];

pub(crate) const BUNDLED_PATTERNS: &[(&str, &str)] = &[
    ("common", include_str!("../data/patterns/common.toml")),
    ("en", include_str!("../data/patterns/en.toml")),
    ("de", include_str!("../data/patterns/de.toml")),
    ("fr", include_str!("../data/patterns/fr.toml")),
    ("es", include_str!("../data/patterns/es.toml")),
    ("pt", include_str!("../data/patterns/pt.toml")),
    ("hi-IN", include_str!("../data/patterns/hi-IN.toml")),
];

pub(crate) const BUNDLED_KEYWORDS: &[(&str, &str)] = &[
    ("en", include_str!("../data/keywords/en.tsv")),
    ("de", include_str!("../data/keywords/de.tsv")),
    ("fr", include_str!("../data/keywords/fr.tsv")),
    ("es", include_str!("../data/keywords/es.tsv")),
    ("pt", include_str!("../data/keywords/pt.tsv")),
    ("hi-IN", include_str!("../data/keywords/hi-IN.tsv")),
];

pub(crate) const BUNDLED_TEMPLATES: &[(&str, &str)] = &[
    ("gdpr-default", include_str!("../data/templates/gdpr-default.toml")),
    ("ccpa-default", include_str!("../data/templates/ccpa-default.toml")),
    ("pipeda-default", include_str!("../data/templates/pipeda-default.toml")),
];

/// Locale tags with bundled pattern and keyword files.
pub const BUNDLED_LOCALES: [&str; 6] = ["en", "de", "fr", "es", "pt", "hi-IN"];
