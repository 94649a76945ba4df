//! Rule-based, locale-aware entity recognizers.
//!
//! Detection is greedy: every recognizer reports every candidate it finds,
//! including candidates that overlap each other. Overlaps are settled later
//! by the resolver. Checksum-bearing patterns drop candidates that fail their
//! check digit.

mod credential;
mod date;
pub mod patterns;
mod person;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use credential::shannon_entropy;
pub use patterns::{LocalePatterns, PatternRegistry};

use crate::error::{Error, Result};
use crate::gazetteer::Gazetteer;
use crate::model::{EntityMention, EntityType};
use crate::resources::BUNDLED_LOCALES;
use date::DateRecognizer;
use patterns::CompiledPattern;
use person::NameRecognizer;

pub const DEFAULT_ENTROPY_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    pub enabled_locales: BTreeSet<String>,
    pub enabled_types: BTreeSet<EntityType>,
    /// Bits per character a candidate must exceed to count as a credential.
    pub credential_entropy_threshold: f64,
    /// Report `@handle` pseudonyms as Person mentions.
    #[serde(default)]
    pub detect_pseudonyms: bool,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            enabled_locales: BUNDLED_LOCALES.iter().map(|l| (*l).to_owned()).collect(),
            enabled_types: EntityType::ALL.into_iter().collect(),
            credential_entropy_threshold: DEFAULT_ENTROPY_THRESHOLD,
            detect_pseudonyms: false,
        }
    }
}

impl DetectorConfig {
    pub fn with_locales<I, S>(mut self, locales: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.enabled_locales = locales.into_iter().map(Into::into).collect();
        self
    }

    pub fn without_type(mut self, ty: EntityType) -> Self {
        self.enabled_types.remove(&ty);
        self
    }

    pub fn validate(&self, registry: &PatternRegistry) -> Result<()> {
        if self.enabled_locales.is_empty() {
            return Err(Error::Config("at least one locale must be enabled".into()));
        }
        if let Some(bad) = self
            .enabled_locales
            .iter()
            .find(|l| !registry.contains_locale(l))
        {
            return Err(Error::UnknownLocale(bad.clone()));
        }
        if !(self.credential_entropy_threshold > 0.0) {
            return Err(Error::Config(format!(
                "credential entropy threshold must be > 0, got {}",
                self.credential_entropy_threshold
            )));
        }
        Ok(())
    }
}

/// Compiled recognizers for one configuration. Immutable and `Sync`.
#[derive(Debug, Clone)]
pub struct Detector {
    config: DetectorConfig,
    gazetteer: Arc<Gazetteer>,
    patterns: Vec<CompiledPattern>,
    dates: DateRecognizer,
    names: NameRecognizer,
}

impl Detector {
    pub fn new(
        config: DetectorConfig,
        registry: &PatternRegistry,
        gazetteer: Arc<Gazetteer>,
    ) -> Result<Self> {
        config.validate(registry)?;
        let enabled: Vec<&LocalePatterns> = config
            .enabled_locales
            .iter()
            .filter_map(|l| registry.get(l))
            .collect();
        let mut patterns = Vec::new();
        for lp in registry.common().into_iter().chain(enabled.iter().copied()) {
            for def in &lp.patterns {
                patterns.push(CompiledPattern::compile(def, &lp.locale)?);
            }
        }
        let dates = DateRecognizer::new(enabled.iter().copied())?;
        let names = NameRecognizer::new(enabled.iter().copied(), registry.all());
        Ok(Self {
            config,
            gazetteer,
            patterns,
            dates,
            names,
        })
    }

    /// Detector over the bundled patterns and lexicons.
    pub fn bundled(config: DetectorConfig) -> Result<Self> {
        Self::new(config, PatternRegistry::bundled(), Gazetteer::bundled())
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn gazetteer(&self) -> &Arc<Gazetteer> {
        &self.gazetteer
    }

    /// All candidate mentions in `text`, sorted by span, possibly overlapping.
    pub fn detect(&self, text: &str) -> Vec<EntityMention> {
        let mut out = Vec::new();
        for p in &self.patterns {
            p.find(text, &mut out);
        }
        self.dates.detect(text, &mut out);
        self.names.detect_phrases(text, &self.gazetteer, &mut out);
        self.names.detect_persons(text, &self.gazetteer, &mut out);
        if self.config.detect_pseudonyms {
            self.names.detect_handles(text, &mut out);
        }
        credential::detect(text, self.config.credential_entropy_threshold, &mut out);

        out.retain(|m| self.config.enabled_types.contains(&m.entity_type));
        out.sort_by(|a, b| {
            (a.span, a.entity_type, &a.locale, &a.detector_id)
                .cmp(&(b.span, b.entity_type, &b.locale, &b.detector_id))
                .then(b.confidence.total_cmp(&a.confidence))
        });
        out.dedup_by(|b, a| {
            a.span == b.span
                && a.entity_type == b.entity_type
                && a.locale == b.locale
                && a.detector_id == b.detector_id
        });
        out
    }

    pub fn detect_person(&self, text: &str) -> Vec<EntityMention> {
        let mut out = Vec::new();
        self.names.detect_persons(text, &self.gazetteer, &mut out);
        self.names.detect_phrases(text, &self.gazetteer, &mut out);
        out.retain(|m| m.entity_type == EntityType::Person);
        out
    }

    pub fn detect_date(&self, text: &str) -> Vec<EntityMention> {
        let mut out = Vec::new();
        self.dates.detect(text, &mut out);
        out
    }

    pub fn detect_phone(&self, text: &str) -> Vec<EntityMention> {
        let mut out = Vec::new();
        for p in self
            .patterns
            .iter()
            .filter(|p| p.def.entity_type == EntityType::PhoneNumber)
        {
            p.find(text, &mut out);
        }
        out
    }

    pub fn detect_credential(&self, text: &str) -> Vec<EntityMention> {
        let mut out = Vec::new();
        credential::detect(text, self.config.credential_entropy_threshold, &mut out);
        out
    }
}
