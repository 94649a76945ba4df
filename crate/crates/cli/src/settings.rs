//! Effective configuration: flags > environment > config file > built-ins.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use piiguard::detectors::{DetectorConfig, DEFAULT_ENTROPY_THRESHOLD};
use piiguard::gazetteer::{GazetteerBuilder, SnapshotKind};
use piiguard::keywords::KeywordIndex;
use piiguard::policy::load_template;
use piiguard::{EntityType, Error, Guard, PatternRegistry, Result};
use serde::Deserialize;

pub const ENV_CONFIG: &str = "PIIGUARD_CONFIG";
pub const ENV_TEMPLATE: &str = "PIIGUARD_TEMPLATE";
pub const ENV_LOCALES: &str = "PIIGUARD_LOCALES";
pub const ENV_DISABLED_TYPES: &str = "PIIGUARD_DISABLED_TYPES";
pub const ENV_ENTROPY: &str = "PIIGUARD_ENTROPY_THRESHOLD";
pub const ENV_SUPPRESSIONS: &str = "PIIGUARD_SUPPRESSIONS";

pub const DEFAULT_TEMPLATE: &str = "gdpr-default";

/// Values given on the command line; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct FlagValues {
    pub config: Option<PathBuf>,
    pub template: Option<String>,
    pub locales: Option<String>,
    pub disabled_types: Option<String>,
    pub entropy_threshold: Option<f64>,
    pub suppressions: Option<PathBuf>,
}

/// Config file contents. Relative paths resolve against the file's directory.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub template: Option<String>,
    pub locales: Option<Vec<String>>,
    pub disabled_types: Option<Vec<EntityType>>,
    pub entropy_threshold: Option<f64>,
    pub separators: Option<Vec<char>>,
    pub suppressions: Option<PathBuf>,
    /// Extra public-figure snapshot files added to the bundled list.
    #[serde(default)]
    pub public_figures: Vec<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: FileConfig = toml::from_str(&content).map_err(|e| Error::Load {
            path: path.to_path_buf(),
            line: e.span().map_or(1, |s| content[..s.start].matches('\n').count() + 1),
            message: e.message().to_owned(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: PathBuf| if p.is_relative() { base.join(p) } else { p };
        cfg.suppressions = cfg.suppressions.map(rebase);
        cfg.public_figures = cfg.public_figures.into_iter().map(rebase).collect();
        if let Some(t) = &cfg.template {
            if t.ends_with(".toml") && Path::new(t).is_relative() {
                cfg.template = Some(base.join(t).display().to_string());
            }
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub template: String,
    pub locales: BTreeSet<String>,
    pub disabled_types: BTreeSet<EntityType>,
    pub entropy_threshold: f64,
    pub separators: Vec<char>,
    pub suppressions: Option<PathBuf>,
    pub public_figures: Vec<PathBuf>,
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

fn parse_types(s: &str) -> Result<BTreeSet<EntityType>> {
    split_list(s).map(str::parse).collect()
}

fn parse_threshold(s: &str, origin: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{origin}: `{s}` is not a number")))
}

impl Settings {
    /// Resolve the effective settings. `env` looks up environment variables.
    pub fn resolve(flags: &FlagValues, env: impl Fn(&str) -> Option<String>) -> Result<Self> {
        let config_path = flags.config.clone().or_else(|| env(ENV_CONFIG).map(PathBuf::from));
        let file = match &config_path {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };

        let template = flags
            .template
            .clone()
            .or_else(|| env(ENV_TEMPLATE))
            .or(file.template)
            .unwrap_or_else(|| DEFAULT_TEMPLATE.to_owned());

        let locales = match flags.locales.clone().or_else(|| env(ENV_LOCALES)) {
            Some(s) => split_list(&s).map(str::to_owned).collect(),
            None => match file.locales {
                Some(v) => v.into_iter().collect(),
                None => DetectorConfig::default().enabled_locales,
            },
        };

        let disabled_types = match flags.disabled_types.clone().or_else(|| env(ENV_DISABLED_TYPES)) {
            Some(s) => parse_types(&s)?,
            None => file.disabled_types.unwrap_or_default().into_iter().collect(),
        };

        let entropy_threshold = match flags.entropy_threshold {
            Some(v) => v,
            None => match env(ENV_ENTROPY) {
                Some(s) => parse_threshold(&s, ENV_ENTROPY)?,
                None => file.entropy_threshold.unwrap_or(DEFAULT_ENTROPY_THRESHOLD),
            },
        };

        let suppressions = flags
            .suppressions
            .clone()
            .or_else(|| env(ENV_SUPPRESSIONS).map(PathBuf::from))
            .or(file.suppressions);

        Ok(Self {
            template,
            locales,
            disabled_types,
            entropy_threshold,
            separators: file
                .separators
                .unwrap_or_else(|| piiguard::chunker::DEFAULT_SEPARATORS.to_vec()),
            suppressions,
            public_figures: file.public_figures,
        })
    }

    pub fn detector_config(&self) -> DetectorConfig {
        let mut cfg = DetectorConfig::default().with_locales(self.locales.iter().cloned());
        for t in &self.disabled_types {
            cfg = cfg.without_type(*t);
        }
        cfg.credential_entropy_threshold = self.entropy_threshold;
        cfg
    }

    pub fn guard(&self) -> Result<Guard> {
        let template = load_template(&self.template)?;
        let config = self.detector_config();
        if self.separators.is_empty() {
            return Err(Error::Config("separator set is empty".into()));
        }
        let guard = if self.public_figures.is_empty() {
            Guard::new(config, template)?
        } else {
            let mut b = GazetteerBuilder::with_bundled();
            for p in &self.public_figures {
                b.import_snapshot(p, SnapshotKind::PublicFigures, None)?;
            }
            let keywords = KeywordIndex::bundled(config.enabled_locales.iter().map(String::as_str));
            Guard::with_resources(
                config,
                template,
                PatternRegistry::bundled(),
                Arc::new(b.build()),
                Arc::new(keywords),
            )?
        };
        Ok(guard.with_separators(&self.separators))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn env_of(pairs: &[(&str, &str)]) -> impl Fn(&str) -> Option<String> {
        let m: HashMap<String, String> = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        move |k| m.get(k).cloned()
    }

    #[test]
    fn built_in_defaults() {
        let s = Settings::resolve(&FlagValues::default(), env_of(&[])).unwrap();
        assert_eq!(s.template, DEFAULT_TEMPLATE);
        assert_eq!(s.locales.len(), 6);
        assert_eq!(s.entropy_threshold, DEFAULT_ENTROPY_THRESHOLD);
        assert!(s.suppressions.is_none());
    }

    #[test]
    fn precedence_flag_env_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("piiguard.toml");
        std::fs::write(
            &cfg,
            "template = \"pipeda-default\"\nlocales = [\"fr\"]\nentropy_threshold = 4.5\nsuppressions = \"s.jsonl\"\n",
        )
        .unwrap();
        let cfg_s = cfg.display().to_string();

        let file_only = Settings::resolve(&FlagValues::default(), env_of(&[(ENV_CONFIG, &cfg_s)])).unwrap();
        assert_eq!(file_only.template, "pipeda-default");
        assert_eq!(file_only.locales, BTreeSet::from(["fr".to_owned()]));
        assert_eq!(file_only.entropy_threshold, 4.5);
        assert_eq!(file_only.suppressions, Some(dir.path().join("s.jsonl")));

        let env = env_of(&[(ENV_CONFIG, &cfg_s), (ENV_TEMPLATE, "ccpa-default"), (ENV_ENTROPY, "3.5")]);
        let with_env = Settings::resolve(&FlagValues::default(), &env).unwrap();
        assert_eq!(with_env.template, "ccpa-default");
        assert_eq!(with_env.entropy_threshold, 3.5);

        let flags = FlagValues {
            template: Some("gdpr-default".into()),
            entropy_threshold: Some(5.0),
            ..FlagValues::default()
        };
        let with_flags = Settings::resolve(&flags, &env).unwrap();
        assert_eq!(with_flags.template, "gdpr-default");
        assert_eq!(with_flags.entropy_threshold, 5.0);
        assert_eq!(with_flags.locales, BTreeSet::from(["fr".to_owned()]));
    }

    #[test]
    fn bad_values_are_config_errors() {
        let env = env_of(&[(ENV_ENTROPY, "high")]);
        assert!(matches!(Settings::resolve(&FlagValues::default(), env), Err(Error::Config(_))));
        let env = env_of(&[(ENV_DISABLED_TYPES, "Person,Nope")]);
        assert!(Settings::resolve(&FlagValues::default(), env).is_err());
        let env = env_of(&[(ENV_LOCALES, "en,xx")]);
        let s = Settings::resolve(&FlagValues::default(), env).unwrap();
        assert!(matches!(s.guard(), Err(Error::UnknownLocale(_))));
    }

    #[test]
    fn config_syntax_error_has_line() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(&cfg, "template = \"x\"\nlocales = [\n").unwrap();
        let flags = FlagValues {
            config: Some(cfg),
            ..FlagValues::default()
        };
        assert!(matches!(Settings::resolve(&flags, env_of(&[])), Err(Error::Load { .. })));
    }
}
