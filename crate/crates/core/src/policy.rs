//! Jurisdiction policy templates and rule evaluation.
//!
//! A template is an ordered rule list; for each mention the first matching
//! rule decides its action and `default_action` applies when none matches.
//! Combination rules fire when every listed type has a mention at or above
//! `min_level` in the document; they emit one extra decision covering all
//! those mentions and also act as ordinary first-match rules for them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use crate::model::{DecisionTarget, PolicyAction, PolicyDecision};

use crate::error::{toml_load_error, Error, Result};
use crate::model::{EntityMention, EntityType, SensitivityAssessment, SensitivityLevel};
use crate::resources::BUNDLED_TEMPLATES;

pub const DEFAULT_RULE_ID: &str = "default";
pub const BUILTIN_TEMPLATES: [&str; 3] = ["gdpr-default", "ccpa-default", "pipeda-default"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeMatch {
    Any,
    Types(BTreeSet<EntityType>),
}

impl TypeMatch {
    pub fn matches(&self, ty: EntityType) -> bool {
        match self {
            TypeMatch::Any => true,
            TypeMatch::Types(set) => set.contains(&ty),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyRule {
    pub rule_id: String,
    pub match_types: TypeMatch,
    /// Least sensitive level the rule applies to; `Level3` matches all.
    pub min_level: SensitivityLevel,
    pub combination: Option<BTreeSet<EntityType>>,
    pub action: PolicyAction,
}

impl PolicyRule {
    fn matches(&self, ty: EntityType, level: SensitivityLevel) -> bool {
        self.match_types.matches(ty) && level.at_least(self.min_level)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolicyTemplate {
    pub jurisdiction: String,
    pub rules: Vec<PolicyRule>,
    /// Treat `@handle` pseudonyms as personal data.
    pub pseudonyms_protected: bool,
    pub default_action: PolicyAction,
}

// On-disk shape. Every field is optional so validation can report all
// problems at once instead of stopping at the first.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemplate {
    jurisdiction: Option<String>,
    pseudonyms_protected: Option<bool>,
    default_action: Option<String>,
    #[serde(default)]
    rules: Vec<RawRule>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    id: Option<String>,
    #[serde(rename = "match")]
    match_types: Option<RawMatch>,
    #[serde(skip_serializing_if = "Option::is_none")]
    combination: Option<Vec<String>>,
    min_level: Option<i64>,
    action: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawMatch {
    One(String),
    Many(Vec<String>),
}

impl PolicyTemplate {
    /// One of the bundled templates by id.
    pub fn builtin(id: &str) -> Result<Self> {
        let (_, content) = BUNDLED_TEMPLATES
            .iter()
            .find(|(name, _)| *name == id)
            .ok_or_else(|| Error::Argument(format!("unknown built-in template `{id}`")))?;
        Self::parse(&format!("<bundled>/{id}.toml"), content)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&path.display().to_string(), &content)
    }

    pub fn parse(source: &str, content: &str) -> Result<Self> {
        let raw: RawTemplate =
            toml::from_str(content).map_err(|e| toml_load_error(source, content, &e))?;
        Self::validate(raw)
    }

    fn validate(raw: RawTemplate) -> Result<Self> {
        let mut problems = Vec::new();
        let jurisdiction = raw.jurisdiction.unwrap_or_else(|| {
            problems.push("missing `jurisdiction`".to_owned());
            String::new()
        });
        let default_action = match raw.default_action.as_deref().map(str::parse::<PolicyAction>) {
            None => PolicyAction::Pass,
            Some(Ok(a)) => a,
            Some(Err(_)) => {
                problems.push(format!(
                    "unknown default_action `{}`",
                    raw.default_action.as_deref().unwrap_or_default()
                ));
                PolicyAction::Pass
            }
        };

        let mut seen = BTreeMap::<String, usize>::new();
        let mut rules = Vec::new();
        for (n, r) in raw.rules.into_iter().enumerate() {
            let label = match &r.id {
                Some(id) => format!("rule `{id}`"),
                None => format!("rule #{}", n + 1),
            };
            let rule_id = match r.id {
                Some(id) if !id.trim().is_empty() => {
                    *seen.entry(id.clone()).or_default() += 1;
                    id
                }
                _ => {
                    problems.push(format!("{label}: missing id"));
                    String::new()
                }
            };
            let mut types = |names: &[String], field: &str| -> BTreeSet<EntityType> {
                names
                    .iter()
                    .filter_map(|t| match t.parse::<EntityType>() {
                        Ok(ty) => Some(ty),
                        Err(_) => {
                            problems.push(format!("{label}: unknown entity type `{t}` in {field}"));
                            None
                        }
                    })
                    .collect()
            };
            let match_types = match &r.match_types {
                None => TypeMatch::Any,
                Some(RawMatch::One(s)) if s.eq_ignore_ascii_case("any") => TypeMatch::Any,
                Some(RawMatch::One(s)) => TypeMatch::Types(types(std::slice::from_ref(s), "match")),
                Some(RawMatch::Many(v)) => TypeMatch::Types(types(v, "match")),
            };
            let combination = r.combination.as_deref().map(|c| types(c, "combination"));
            let min_level = match r.min_level {
                None => SensitivityLevel::Level3,
                Some(n) => match u8::try_from(n).ok().and_then(|n| SensitivityLevel::try_from(n).ok()) {
                    Some(l) => l,
                    None => {
                        problems.push(format!("{label}: min_level must be 1, 2 or 3, got {n}"));
                        SensitivityLevel::Level3
                    }
                },
            };
            let action = match r.action.as_deref().map(str::parse::<PolicyAction>) {
                Some(Ok(a)) => a,
                Some(Err(_)) => {
                    problems.push(format!(
                        "{label}: unknown action `{}`",
                        r.action.as_deref().unwrap_or_default()
                    ));
                    PolicyAction::Pass
                }
                None => {
                    problems.push(format!("{label}: missing action"));
                    PolicyAction::Pass
                }
            };
            if combination.as_ref().is_some_and(BTreeSet::is_empty) {
                problems.push(format!("{label}: combination must list at least one type"));
            }
            rules.push(PolicyRule {
                rule_id,
                match_types,
                min_level,
                combination,
                action,
            });
        }
        for (id, count) in seen {
            if count > 1 {
                problems.push(format!("duplicate rule id `{id}` ({count} rules)"));
            }
        }
        if !problems.is_empty() {
            return Err(Error::TemplateValidation(problems));
        }
        Ok(Self {
            jurisdiction,
            rules,
            pseudonyms_protected: raw.pseudonyms_protected.unwrap_or(false),
            default_action,
        })
    }

    /// Serialize in the same grammar `parse` accepts.
    pub fn to_toml(&self) -> String {
        let names = |set: &BTreeSet<EntityType>| set.iter().map(|t| t.name().to_owned()).collect();
        let raw = RawTemplate {
            jurisdiction: Some(self.jurisdiction.clone()),
            pseudonyms_protected: Some(self.pseudonyms_protected),
            default_action: Some(self.default_action.to_string()),
            rules: self
                .rules
                .iter()
                .map(|r| RawRule {
                    id: Some(r.rule_id.clone()),
                    match_types: Some(match &r.match_types {
                        TypeMatch::Any => RawMatch::One("any".into()),
                        TypeMatch::Types(set) => RawMatch::Many(names(set)),
                    }),
                    combination: r.combination.as_ref().map(names),
                    min_level: Some(i64::from(r.min_level.number())),
                    action: Some(r.action.to_string()),
                })
                .collect(),
        };
        toml::to_string(&raw).expect("template serializes")
    }

    /// Decide an action for every assessed mention, plus one decision per
    /// combination rule that fires. Decisions for single mentions come in
    /// assessment order, followed by combination decisions in rule order.
    pub fn decide(
        &self,
        mentions: &[EntityMention],
        assessments: &[SensitivityAssessment],
    ) -> Vec<PolicyDecision> {
        let level_of: BTreeMap<usize, SensitivityLevel> =
            assessments.iter().map(|a| (a.mention, a.level)).collect();

        // Rule index -> mentions covered by a fired combination rule.
        let mut fired: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (ri, rule) in self.rules.iter().enumerate() {
            let Some(combo) = &rule.combination else { continue };
            let members: Vec<usize> = level_of
                .iter()
                .filter(|(&i, &lvl)| {
                    mentions.get(i).is_some_and(|m| combo.contains(&m.entity_type))
                        && lvl.at_least(rule.min_level)
                })
                .map(|(&i, _)| i)
                .collect();
            let covered: BTreeSet<EntityType> =
                members.iter().map(|&i| mentions[i].entity_type).collect();
            if covered == *combo {
                fired.insert(ri, members);
            }
        }

        let mut out = Vec::with_capacity(assessments.len() + fired.len());
        for a in assessments {
            let Some(m) = mentions.get(a.mention) else { continue };
            let hit = self.rules.iter().enumerate().find(|(ri, rule)| match &rule.combination {
                Some(_) => fired.get(ri).is_some_and(|v| v.contains(&a.mention)),
                None => rule.matches(m.entity_type, a.level),
            });
            let (rule_id, action) = match hit {
                Some((_, r)) => (r.rule_id.as_str(), r.action),
                None => (DEFAULT_RULE_ID, self.default_action),
            };
            out.push(PolicyDecision {
                target: DecisionTarget::Mention { index: a.mention },
                action,
                rule_id: rule_id.to_owned(),
                jurisdiction: self.jurisdiction.clone(),
                rationale: format!(
                    "{} at {} matched `{rule_id}` under {}: {action}",
                    m.entity_type, a.level, self.jurisdiction
                ),
            });
        }
        for (ri, members) in fired {
            let rule = &self.rules[ri];
            let types: Vec<&str> = rule
                .combination
                .iter()
                .flatten()
                .map(|t| t.name())
                .collect();
            out.push(PolicyDecision {
                target: DecisionTarget::Combination { indices: members },
                action: rule.action,
                rule_id: rule.rule_id.clone(),
                jurisdiction: self.jurisdiction.clone(),
                rationale: format!(
                    "combination {} present under {}: {}",
                    types.join(" + "),
                    self.jurisdiction,
                    rule.action
                ),
            });
        }
        out
    }
}

impl fmt::Display for PolicyTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} rules)", self.jurisdiction, self.rules.len())
    }
}

/// Load a built-in template by id, or a template file by path.
pub fn load_template(source: &str) -> Result<PolicyTemplate> {
    if BUILTIN_TEMPLATES.contains(&source) {
        PolicyTemplate::builtin(source)
    } else if Path::new(source).exists() {
        PolicyTemplate::load(Path::new(source))
    } else {
        Err(Error::Config(format!(
            "`{source}` is neither a built-in template ({}) nor an existing file",
            BUILTIN_TEMPLATES.join(", ")
        )))
    }
}
