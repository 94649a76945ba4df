//! Overlap resolution: reduces greedy candidates to a disjoint set.
//!
//! Candidates are grouped into maximal runs of transitively overlapping
//! spans. Each group keeps exactly one survivor, chosen by, in order:
//! keyword support in the context window, checksum validation, span length,
//! earlier start, and a fixed type priority. Remaining ties fall back to
//! detector id, locale and confidence so the result never depends on input
//! order.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keywords::{DocumentContext, KeywordHit};
use crate::model::{EntityMention, EntityType};

/// Context gathered for one candidate during resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextEvidence {
    pub mention: usize,
    pub keyword_hits: Vec<KeywordHit>,
    pub checksum_valid: bool,
}

/// Candidates whose type carries a check digit only reach this stage after
/// passing it, so type alone decides checksum validity.
fn checksum_valid(m: &EntityMention) -> bool {
    m.entity_type.is_checksum_bearing()
}

pub fn evidence(candidates: &[EntityMention], ctx: &DocumentContext) -> Vec<ContextEvidence> {
    candidates
        .iter()
        .enumerate()
        .map(|(i, m)| ContextEvidence {
            mention: i,
            keyword_hits: ctx
                .hits_near(m.span)
                .filter(|h| h.entity_type == m.entity_type)
                .cloned()
                .collect(),
            checksum_valid: checksum_valid(m),
        })
        .collect()
}

/// Total order on candidates; `Greater` means "preferred".
fn precedence(
    a: &EntityMention,
    sa: usize,
    b: &EntityMention,
    sb: usize,
) -> Ordering {
    sa.cmp(&sb)
        .then(checksum_valid(a).cmp(&checksum_valid(b)))
        .then(a.span.len().cmp(&b.span.len()))
        .then(b.span.start.cmp(&a.span.start))
        .then(
            a.entity_type
                .resolution_priority()
                .cmp(&b.entity_type.resolution_priority()),
        )
        .then_with(|| b.detector_id.cmp(&a.detector_id))
        .then_with(|| b.locale.cmp(&a.locale))
        .then_with(|| a.confidence.total_cmp(&b.confidence))
}

/// Resolve `candidates` detected over `text` into pairwise-disjoint mentions,
/// sorted by position.
pub fn resolve(
    candidates: &[EntityMention],
    ctx: &DocumentContext,
    text: &str,
) -> Result<Vec<EntityMention>> {
    for m in candidates {
        m.span.check(text)?;
        if m.span.slice(text) != m.surface {
            return Err(Error::Contract(format!(
                "candidate surface {:?} does not match text at {}..{}",
                m.surface, m.span.start, m.span.end
            )));
        }
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&candidates[i], &candidates[j]);
        a.span.start.cmp(&b.span.start).then(b.span.end.cmp(&a.span.end))
    });
    let support: Vec<usize> = candidates
        .iter()
        .map(|m| ctx.support(m.span, m.entity_type))
        .collect();

    let mut out = Vec::new();
    let mut idx = 0;
    while idx < order.len() {
        let mut best = order[idx];
        let mut group_end = candidates[best].span.end;
        idx += 1;
        while idx < order.len() && candidates[order[idx]].span.start < group_end {
            let c = order[idx];
            group_end = group_end.max(candidates[c].span.end);
            if precedence(&candidates[c], support[c], &candidates[best], support[best])
                == Ordering::Greater
            {
                best = c;
            }
            idx += 1;
        }
        out.push(candidates[best].clone());
    }
    Ok(out)
}

/// Type priority used as the last semantic tie-break, highest first.
pub const TYPE_PRIORITY: [EntityType; 9] = [
    EntityType::NationalId,
    EntityType::CreditCard,
    EntityType::BankAccount,
    EntityType::PhoneNumber,
    EntityType::EmailAddress,
    EntityType::Date,
    EntityType::Location,
    EntityType::Person,
    EntityType::CredentialToken,
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chunker::segment;
    use crate::keywords::KeywordIndex;
    use crate::model::TextSpan;

    fn ctx(text: &str) -> DocumentContext {
        DocumentContext::build(text, segment(text), &KeywordIndex::bundled(["en", "de", "hi-IN"]))
    }

    fn cand(text: &str, needle: &str, ty: EntityType, det: &str) -> EntityMention {
        let s = text.find(needle).unwrap();
        EntityMention::new(text, TextSpan::new(s, s + needle.len()), ty, "xx", det, 0.5)
    }

    #[test]
    fn aadhaar_context_picks_national_id() {
        let text = "Aadhaar: 2345 6789 0124";
        let c = vec![
            cand(text, "2345 6789 0124", EntityType::PhoneNumber, "de_phone_grouped"),
            cand(text, "2345 6789 0124", EntityType::NationalId, "in_aadhaar"),
        ];
        let out = resolve(&c, &ctx(text), text).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].entity_type, EntityType::NationalId);
    }

    #[test]
    fn telefon_context_picks_phone() {
        let text = "Telefon: 030 1234 5678";
        let c = vec![
            cand(text, "030 1234 5678", EntityType::NationalId, "x"),
            cand(text, "030 1234 5678", EntityType::PhoneNumber, "de_phone_city"),
        ];
        let out = resolve(&c, &ctx(text), text).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].entity_type, EntityType::PhoneNumber);
    }

    #[test]
    fn disjoint_pass_through() {
        let text = "a@b.co and 2020";
        let c = vec![
            cand(text, "2020", EntityType::Date, "y"),
            cand(text, "a@b.co", EntityType::EmailAddress, "e"),
        ];
        let out = resolve(&c, &ctx(text), text).unwrap();
        assert_eq!(out, vec![c[1].clone(), c[0].clone()]);
    }

    #[test]
    fn longer_span_wins_without_context() {
        let text = "on August 4, 1961 we";
        let c = vec![
            cand(text, "1961", EntityType::Date, "bare"),
            cand(text, "August 4, 1961", EntityType::Date, "full"),
        ];
        let out = resolve(&c, &ctx(text), text).unwrap();
        assert_eq!(out[0].surface, "August 4, 1961");
    }

    #[test]
    fn out_of_bounds_is_contract_error() {
        let text = "short";
        let mut m = cand(text, "short", EntityType::Person, "p");
        m.span = TextSpan::new(0, 50);
        assert!(matches!(resolve(&[m], &ctx(text), text), Err(Error::Contract(_))));
    }

    #[test]
    fn priority_table_matches_type_ranks() {
        for w in TYPE_PRIORITY.windows(2) {
            assert!(w[0].resolution_priority() > w[1].resolution_priority());
        }
    }
}
