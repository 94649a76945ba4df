//! Pull-request triage: scan every file, honour reviewer suppressions and
//! decide whether the PR needs review before merge.

pub mod ingest;
pub mod suppression;

use serde::{Deserialize, Serialize};

pub use ingest::{ingest, PrDocument, PrFile, SkippedFile, SourceMeta};
pub use suppression::{
    fingerprint, mention_fingerprint, FeedbackVerdict, SuppressionEntry, SuppressionStore,
    Suppressions,
};

use crate::error::Result;
use crate::model::{
    DecisionTarget, EntityType, GuardReport, PolicyAction, SensitivityLevel,
};
use crate::pipeline::Guard;

pub const SUPPRESSED_RULE_ID: &str = "suppressed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileReport {
    pub path: String,
    pub report: GuardReport,
    /// Fingerprint of each mention, parallel to `report.mentions`.
    pub fingerprints: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagReason {
    pub file: String,
    pub mention: usize,
    pub entity_type: EntityType,
    pub surface: String,
    pub level: SensitivityLevel,
    pub action: PolicyAction,
    pub rule_id: String,
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriageReport {
    pub pr_id: String,
    pub files: Vec<FileReport>,
    pub flagged: bool,
    pub flag_reasons: Vec<FlagReason>,
    /// Fingerprints of mentions whose decisions were downgraded.
    pub suppressed: Vec<String>,
    pub skipped: Vec<SkippedFile>,
}

impl TriageReport {
    pub fn blocked(&self) -> bool {
        self.flag_reasons.iter().any(|r| r.action == PolicyAction::Block)
    }
}

/// Scan a PR. `suppressions` is read once per mention; pass a snapshot to
/// isolate the run from concurrent feedback.
pub fn triage(pr: &PrDocument, guard: &Guard, suppressions: &impl Suppressions) -> Result<TriageReport> {
    let mut files = Vec::with_capacity(pr.files.len());
    let mut flag_reasons = Vec::new();
    let mut suppressed = Vec::new();

    for file in &pr.files {
        let text = file.content.as_str();
        let mut analysis = guard.analyze(text)?;
        let fingerprints: Vec<String> = analysis
            .mentions
            .iter()
            .map(|m| mention_fingerprint(text, m))
            .collect();
        let is_supp: Vec<bool> = fingerprints.iter().map(|f| suppressions.is_suppressed(f)).collect();

        for d in &mut analysis.decisions {
            if d.action == PolicyAction::Pass {
                continue;
            }
            match &mut d.target {
                DecisionTarget::Mention { index } => {
                    if is_supp[*index] {
                        d.action = PolicyAction::Pass;
                        d.rationale = format!("suppressed by reviewer feedback ({})", d.rule_id);
                        d.rule_id = SUPPRESSED_RULE_ID.to_owned();
                    }
                }
                DecisionTarget::Combination { indices } => {
                    // Only suppressed members leave the combination; if none
                    // remain the decision itself is downgraded.
                    let kept: Vec<usize> = indices.iter().copied().filter(|&i| !is_supp[i]).collect();
                    if kept.is_empty() {
                        d.action = PolicyAction::Pass;
                        d.rationale = format!("suppressed by reviewer feedback ({})", d.rule_id);
                        d.rule_id = SUPPRESSED_RULE_ID.to_owned();
                    } else {
                        *indices = kept;
                    }
                }
            }
        }
        for (i, s) in is_supp.iter().enumerate() {
            if *s && !suppressed.contains(&fingerprints[i]) {
                suppressed.push(fingerprints[i].clone());
            }
        }

        let doc_id = format!("{}:{}", pr.pr_id, file.path);
        let report = guard.finish(&doc_id, text, analysis)?;
        for (i, m) in report.mentions.iter().enumerate() {
            let action = report.action_for(i);
            if action == PolicyAction::Pass {
                continue;
            }
            let rule_id = report
                .decisions
                .iter()
                .filter(|d| d.action == action && d.target.mention_indices().contains(&i))
                .map(|d| d.rule_id.clone())
                .next()
                .unwrap_or_default();
            flag_reasons.push(FlagReason {
                file: file.path.clone(),
                mention: i,
                entity_type: m.entity_type,
                surface: m.surface.clone(),
                level: report.assessment_for(i).map_or(SensitivityLevel::Level2, |a| a.level),
                action,
                rule_id,
                fingerprint: fingerprints[i].clone(),
            });
        }
        files.push(FileReport {
            path: file.path.clone(),
            report,
            fingerprints,
        });
    }

    Ok(TriageReport {
        pr_id: pr.pr_id.clone(),
        files,
        flagged: !flag_reasons.is_empty(),
        flag_reasons,
        suppressed,
        skipped: pr.source_meta.skipped.clone(),
    })
}

/// Record a false-positive verdict for every flagged mention of `report`.
pub fn suppress_all(report: &TriageReport, store: &mut SuppressionStore, reviewer: &str) -> Result<usize> {
    let mut added = 0;
    for r in &report.flag_reasons {
        if store.record(SuppressionEntry::false_positive(&r.fingerprint, reviewer))? {
            added += 1;
        }
    }
    Ok(added)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn guard() -> Guard {
        Guard::with_template("gdpr-default").unwrap()
    }

    #[test]
    fn john_doe_is_flagged() {
        let pr = PrDocument::single("1", "test.py", "John Doe, john.doe@example.com, 123-456-7890");
        let r = triage(&pr, &guard(), &BTreeSet::new()).unwrap();
        assert!(r.flagged);
        let types: BTreeSet<EntityType> = r.flag_reasons.iter().map(|f| f.entity_type).collect();
        assert_eq!(
            types,
            BTreeSet::from([EntityType::Person, EntityType::EmailAddress, EntityType::PhoneNumber])
        );
    }

    #[test]
    fn compliant_text_is_not_flagged() {
        let pr = PrDocument::single(
            "2",
            "notes.md",
            "Historical events from 1776 included the Declaration of Independence.",
        );
        assert!(!triage(&pr, &guard(), &BTreeSet::new()).unwrap().flagged);
    }

    #[test]
    fn feedback_unflags_sole_mention() {
        let pr = PrDocument::single("3", "a.txt", "Contact me at john.doe@example.com for details.");
        let g = guard();
        let first = triage(&pr, &g, &BTreeSet::new()).unwrap();
        assert_eq!(first.flag_reasons.len(), 1);
        let mut store = SuppressionStore::in_memory();
        assert_eq!(suppress_all(&first, &mut store, "rev").unwrap(), 1);
        let again = triage(&pr, &g, &store).unwrap();
        assert!(!again.flagged);
        assert_eq!(again.suppressed.len(), 1);
        assert_eq!(again.files[0].report.masked_text.as_deref(), Some(pr.files[0].content.as_str()));
    }
}
