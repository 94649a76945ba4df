//! Domain types shared by every pipeline stage.
//!
//! All offsets are byte offsets into the source document and always fall on
//! UTF-8 character boundaries, so slicing `&text[span.start..span.end]` is
//! safe for any span that passed [`TextSpan::check`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-open byte range `[start, end)` into a source document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TextSpan {
    pub start: usize,
    pub end: usize,
}

impl TextSpan {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &TextSpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, other: &TextSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Verifies `0 <= start < end <= text.len()` and that both ends sit on
    /// character boundaries.
    pub fn check(&self, text: &str) -> Result<()> {
        if self.start >= self.end || self.end > text.len() {
            return Err(Error::Contract(format!(
                "span {}..{} out of bounds for document of {} bytes",
                self.start,
                self.end,
                text.len()
            )));
        }
        if !text.is_char_boundary(self.start) || !text.is_char_boundary(self.end) {
            return Err(Error::Contract(format!(
                "span {}..{} does not fall on character boundaries",
                self.start, self.end
            )));
        }
        Ok(())
    }

    pub fn slice<'a>(&self, text: &'a str) -> &'a str {
        &text[self.start..self.end]
    }
}

impl fmt::Display for TextSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EntityType {
    Person,
    Date,
    Location,
    EmailAddress,
    PhoneNumber,
    NationalId,
    CreditCard,
    BankAccount,
    CredentialToken,
}

impl EntityType {
    pub const ALL: [EntityType; 9] = [
        EntityType::Person,
        EntityType::Date,
        EntityType::Location,
        EntityType::EmailAddress,
        EntityType::PhoneNumber,
        EntityType::NationalId,
        EntityType::CreditCard,
        EntityType::BankAccount,
        EntityType::CredentialToken,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EntityType::Person => "Person",
            EntityType::Date => "Date",
            EntityType::Location => "Location",
            EntityType::EmailAddress => "EmailAddress",
            EntityType::PhoneNumber => "PhoneNumber",
            EntityType::NationalId => "NationalId",
            EntityType::CreditCard => "CreditCard",
            EntityType::BankAccount => "BankAccount",
            EntityType::CredentialToken => "CredentialToken",
        }
    }

    /// Upper snake case name used in redaction placeholders.
    pub fn placeholder_name(self) -> &'static str {
        match self {
            EntityType::Person => "PERSON",
            EntityType::Date => "DATE",
            EntityType::Location => "LOCATION",
            EntityType::EmailAddress => "EMAIL_ADDRESS",
            EntityType::PhoneNumber => "PHONE_NUMBER",
            EntityType::NationalId => "NATIONAL_ID",
            EntityType::CreditCard => "CREDIT_CARD",
            EntityType::BankAccount => "BANK_ACCOUNT",
            EntityType::CredentialToken => "CREDENTIAL_TOKEN",
        }
    }

    /// Identifiers that single out a person or an account on their own.
    pub fn is_direct_identifier(self) -> bool {
        matches!(
            self,
            EntityType::EmailAddress
                | EntityType::PhoneNumber
                | EntityType::NationalId
                | EntityType::CreditCard
                | EntityType::BankAccount
                | EntityType::CredentialToken
        )
    }

    /// Types whose detectors gate candidates on a check digit.
    pub fn is_checksum_bearing(self) -> bool {
        matches!(
            self,
            EntityType::NationalId | EntityType::CreditCard | EntityType::BankAccount
        )
    }

    /// Fixed tie-break rank used by the resolver; higher wins.
    pub fn resolution_priority(self) -> u8 {
        match self {
            EntityType::NationalId => 9,
            EntityType::CreditCard => 8,
            EntityType::BankAccount => 7,
            EntityType::PhoneNumber => 6,
            EntityType::EmailAddress => 5,
            EntityType::Date => 4,
            EntityType::Location => 3,
            EntityType::Person => 2,
            EntityType::CredentialToken => 1,
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntityType {
    type Err = Error;

    /// Accepts the canonical name (`EmailAddress`) and the placeholder form
    /// (`EMAIL_ADDRESS`, `email_address`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        EntityType::ALL
            .into_iter()
            .find(|t| t.name() == s || t.placeholder_name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Argument(format!("unknown entity type `{s}`")))
    }
}

/// A detected PII span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityMention {
    pub span: TextSpan,
    pub entity_type: EntityType,
    pub surface: String,
    /// Locale tag of the pattern that fired, or `"unspecified"`.
    pub locale: String,
    pub detector_id: String,
    pub confidence: f64,
}

pub const UNSPECIFIED_LOCALE: &str = "unspecified";

impl EntityMention {
    pub fn new(
        text: &str,
        span: TextSpan,
        entity_type: EntityType,
        locale: &str,
        detector_id: &str,
        confidence: f64,
    ) -> Self {
        Self {
            span,
            entity_type,
            surface: span.slice(text).to_owned(),
            locale: locale.to_owned(),
            detector_id: detector_id.to_owned(),
            confidence: confidence.clamp(0.0, 1.0),
        }
    }
}

/// Three-tier sensitivity.
///
/// Variants are declared least to most sensitive so the derived `Ord` gives
/// `Level1 > Level2 > Level3`. Serialized as the bare tier number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum SensitivityLevel {
    Level3,
    Level2,
    Level1,
}

impl SensitivityLevel {
    pub const ALL: [SensitivityLevel; 3] = [
        SensitivityLevel::Level1,
        SensitivityLevel::Level2,
        SensitivityLevel::Level3,
    ];

    pub fn number(self) -> u8 {
        match self {
            SensitivityLevel::Level1 => 1,
            SensitivityLevel::Level2 => 2,
            SensitivityLevel::Level3 => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SensitivityLevel::Level1 => "Highly Sensitive",
            SensitivityLevel::Level2 => "Sensitive",
            SensitivityLevel::Level3 => "Non-Sensitive",
        }
    }

    /// True when `self` is at least as sensitive as `threshold`.
    pub fn at_least(self, threshold: SensitivityLevel) -> bool {
        self >= threshold
    }
}

impl From<SensitivityLevel> for u8 {
    fn from(level: SensitivityLevel) -> u8 {
        level.number()
    }
}

impl TryFrom<u8> for SensitivityLevel {
    type Error = String;

    fn try_from(n: u8) -> std::result::Result<Self, String> {
        match n {
            1 => Ok(SensitivityLevel::Level1),
            2 => Ok(SensitivityLevel::Level2),
            3 => Ok(SensitivityLevel::Level3),
            other => Err(format!("sensitivity level must be 1, 2 or 3, got {other}")),
        }
    }
}

impl fmt::Display for SensitivityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Level {} ({})", self.number(), self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitivityAssessment {
    /// Index into the report's `mentions`.
    pub mention: usize,
    pub level: SensitivityLevel,
    pub factors: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyAction {
    Pass,
    Mask,
    Block,
}

impl FromStr for PolicyAction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pass" => Ok(PolicyAction::Pass),
            "mask" => Ok(PolicyAction::Mask),
            "block" => Ok(PolicyAction::Block),
            other => Err(Error::Argument(format!("unknown policy action `{other}`"))),
        }
    }
}

impl fmt::Display for PolicyAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyAction::Pass => "pass",
            PolicyAction::Mask => "mask",
            PolicyAction::Block => "block",
        })
    }
}

/// What a decision applies to: one mention, or the set of mentions that
/// satisfied a combination rule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecisionTarget {
    Mention { index: usize },
    Combination { indices: Vec<usize> },
}

impl DecisionTarget {
    pub fn mention_indices(&self) -> &[usize] {
        match self {
            DecisionTarget::Mention { index } => std::slice::from_ref(index),
            DecisionTarget::Combination { indices } => indices,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDecision {
    pub target: DecisionTarget,
    pub action: PolicyAction,
    pub rule_id: String,
    pub jurisdiction: String,
    pub rationale: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Masked,
    Blocked,
}

impl Verdict {
    pub fn from_decisions(decisions: &[PolicyDecision]) -> Verdict {
        match decisions.iter().map(|d| d.action).max() {
            Some(PolicyAction::Block) => Verdict::Blocked,
            Some(PolicyAction::Mask) => Verdict::Masked,
            _ => Verdict::Pass,
        }
    }
}

/// Per-stage wall-clock durations in microseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageTimings {
    pub chunk_us: u64,
    pub detect_us: u64,
    pub resolve_us: u64,
    pub assess_us: u64,
    pub decide_us: u64,
    pub redact_us: u64,
    pub total_us: u64,
}

/// End-to-end result of scanning one document.
///
/// Equality ignores `timing`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GuardReport {
    pub doc_id: String,
    pub mentions: Vec<EntityMention>,
    pub assessments: Vec<SensitivityAssessment>,
    pub decisions: Vec<PolicyDecision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masked_text: Option<String>,
    pub verdict: Verdict,
    #[serde(default)]
    pub timing: StageTimings,
}

impl PartialEq for GuardReport {
    fn eq(&self, other: &Self) -> bool {
        self.doc_id == other.doc_id
            && self.mentions == other.mentions
            && self.assessments == other.assessments
            && self.decisions == other.decisions
            && self.masked_text == other.masked_text
            && self.verdict == other.verdict
    }
}

impl GuardReport {
    pub fn assessment_for(&self, mention: usize) -> Option<&SensitivityAssessment> {
        self.assessments.iter().find(|a| a.mention == mention)
    }

    /// The strongest action applied to a mention across all decisions.
    pub fn action_for(&self, mention: usize) -> PolicyAction {
        self.decisions
            .iter()
            .filter(|d| d.target.mention_indices().contains(&mention))
            .map(|d| d.action)
            .max()
            .unwrap_or(PolicyAction::Pass)
    }
}

/// Checks every `GuardReport` invariant against the source text and returns
/// one description per violation.
pub fn validate_report(report: &GuardReport, source: &str) -> Vec<String> {
    let mut violations = Vec::new();

    for (i, m) in report.mentions.iter().enumerate() {
        if let Err(e) = m.span.check(source) {
            violations.push(format!("mention {i} ({}): {e}", m.entity_type));
            continue;
        }
        if m.span.slice(source) != m.surface {
            violations.push(format!(
                "mention {i} ({}): surface {:?} does not match document at {}",
                m.entity_type, m.surface, m.span
            ));
        }
        if !(0.0..=1.0).contains(&m.confidence) {
            violations.push(format!(
                "mention {i} ({}): confidence {} outside [0,1]",
                m.entity_type, m.confidence
            ));
        }
    }

    let mut seen = vec![0usize; report.mentions.len()];
    for a in &report.assessments {
        match seen.get_mut(a.mention) {
            Some(count) => *count += 1,
            None => violations.push(format!(
                "assessment references missing mention {}",
                a.mention
            )),
        }
    }
    for (i, count) in seen.iter().enumerate() {
        if *count != 1 {
            violations.push(format!("mention {i} has {count} assessments, expected 1"));
        }
    }

    for (i, d) in report.decisions.iter().enumerate() {
        for &idx in d.target.mention_indices() {
            if idx >= report.mentions.len() {
                violations.push(format!("decision {i} references missing mention {idx}"));
            }
        }
    }

    let expected = Verdict::from_decisions(&report.decisions);
    if report.verdict != expected {
        violations.push(format!(
            "verdict {:?} inconsistent with decisions (expected {:?})",
            report.verdict, expected
        ));
    }
    if report.verdict == Verdict::Blocked && report.masked_text.is_some() {
        violations.push("blocked report carries masked_text".to_owned());
    }

    violations
}
