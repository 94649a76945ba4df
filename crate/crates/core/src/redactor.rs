//! Applies policy decisions: replaces masked spans with `<TYPE_NAME>`
//! placeholders and assembles the final report.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{
    EntityMention, GuardReport, PolicyAction, PolicyDecision, SensitivityAssessment,
    StageTimings, Verdict,
};

/// Placeholder substituted for a masked mention, e.g. `<EMAIL_ADDRESS>`.
pub fn placeholder(m: &EntityMention) -> String {
    format!("<{}>", m.entity_type.placeholder_name())
}

/// Indices of mentions targeted by at least one Mask decision.
pub fn mask_targets(decisions: &[PolicyDecision]) -> BTreeSet<usize> {
    decisions
        .iter()
        .filter(|d| d.action == PolicyAction::Mask)
        .flat_map(|d| d.target.mention_indices().iter().copied())
        .collect()
}

/// Replace every targeted mention in `text` with its placeholder.
pub fn mask_text(text: &str, mentions: &[EntityMention], targets: &BTreeSet<usize>) -> Result<String> {
    let mut spans: Vec<&EntityMention> = Vec::with_capacity(targets.len());
    for &i in targets {
        let m = mentions
            .get(i)
            .ok_or_else(|| Error::Contract(format!("decision references missing mention {i}")))?;
        m.span.check(text)?;
        spans.push(m);
    }
    spans.sort_by_key(|m| m.span);
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for m in spans {
        out.push_str(&text[cursor..m.span.start]);
        out.push_str(&placeholder(m));
        cursor = m.span.end;
    }
    out.push_str(&text[cursor..]);
    Ok(out)
}

pub fn apply(
    doc_id: &str,
    text: &str,
    mentions: Vec<EntityMention>,
    assessments: Vec<SensitivityAssessment>,
    decisions: Vec<PolicyDecision>,
) -> Result<GuardReport> {
    let mut sorted: Vec<&EntityMention> = mentions.iter().collect();
    sorted.sort_by_key(|m| m.span);
    if let Some(w) = sorted.windows(2).find(|w| w[0].span.overlaps(&w[1].span)) {
        return Err(Error::Contract(format!(
            "overlapping mentions {} and {}",
            w[0].span, w[1].span
        )));
    }
    for d in &decisions {
        if let Some(&i) = d.target.mention_indices().iter().find(|&&i| i >= mentions.len()) {
            return Err(Error::Contract(format!(
                "decision `{}` references missing mention {i}",
                d.rule_id
            )));
        }
    }
    let verdict = Verdict::from_decisions(&decisions);
    let masked_text = match verdict {
        Verdict::Blocked => None,
        _ => Some(mask_text(text, &mentions, &mask_targets(&decisions))?),
    };
    Ok(GuardReport {
        doc_id: doc_id.to_owned(),
        mentions,
        assessments,
        decisions,
        masked_text,
        verdict,
        timing: StageTimings::default(),
    })
}

/// Rebuild the original text from a masked text by splicing the surfaces of
/// `targets` back in place of their placeholders.
pub fn unmask(masked: &str, mentions: &[EntityMention], targets: &BTreeSet<usize>) -> Option<String> {
    let mut spans: Vec<&EntityMention> = targets.iter().filter_map(|&i| mentions.get(i)).collect();
    spans.sort_by_key(|m| m.span);
    let mut out = String::with_capacity(masked.len());
    let mut src = 0; // offset in original
    let mut pos = 0; // offset in masked
    for m in spans {
        let gap = m.span.start.checked_sub(src)?;
        out.push_str(masked.get(pos..pos + gap)?);
        pos += gap;
        let ph = placeholder(m);
        if !masked.get(pos..)?.starts_with(&ph) {
            return None;
        }
        out.push_str(&m.surface);
        pos += ph.len();
        src = m.span.end;
    }
    out.push_str(masked.get(pos..)?);
    Some(out)
}
