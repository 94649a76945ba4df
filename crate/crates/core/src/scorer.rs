//! Contextual sensitivity scoring.
//!
//! Rule ladder, first match wins:
//!
//! 1. Direct identifiers are Level 1.
//! 2. A Person in a document that also holds a direct identifier is Level 1.
//! 3. A public-figure Person whose window partners are only Dates, Locations
//!    or other public figures is Level 3.
//! 4. A Person, Date or Location with a partner that is not a public figure
//!    in its window, or a Date near financial vocabulary, is Level 2.
//! 5. A Date or Location with no such partner is Level 3.
//! 6. Everything else is Level 2.
//!
//! The window is the mention's chunk plus one chunk on each side. Public
//! figures never escalate their partners, so adding a mention can only raise
//! the level of the mentions already present.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gazetteer::Gazetteer;
use crate::keywords::DocumentContext;
use crate::model::{EntityMention, EntityType, SensitivityAssessment, SensitivityLevel};

pub const FACTOR_DIRECT_IDENTIFIER: &str = "direct_identifier";
pub const FACTOR_PUBLIC_FIGURE: &str = "public_figure";
pub const FACTOR_FINANCIAL_CONTEXT: &str = "financial_context";
pub const FACTOR_STANDALONE: &str = "standalone";
pub const FACTOR_DEFAULT: &str = "default";

pub fn co_occurs_factor(ty: EntityType) -> String {
    format!("co_occurs_with:{}", ty.name())
}

fn is_public_figure(m: &EntityMention, gazetteer: &Gazetteer) -> bool {
    m.entity_type == EntityType::Person && gazetteer.lookup_public_figure(&m.surface)
}

pub fn assess(
    mentions: &[EntityMention],
    ctx: &DocumentContext,
    gazetteer: &Gazetteer,
) -> Result<Vec<SensitivityAssessment>> {
    let mut by_start: Vec<&EntityMention> = mentions.iter().collect();
    by_start.sort_by_key(|m| m.span);
    if let Some(w) = by_start.windows(2).find(|w| w[0].span.overlaps(&w[1].span)) {
        return Err(Error::Contract(format!(
            "overlapping mentions at {}..{} and {}..{}",
            w[0].span.start, w[0].span.end, w[1].span.start, w[1].span.end
        )));
    }

    let public: Vec<bool> = mentions.iter().map(|m| is_public_figure(m, gazetteer)).collect();
    let direct_types: BTreeSet<EntityType> = mentions
        .iter()
        .map(|m| m.entity_type)
        .filter(|t| t.is_direct_identifier())
        .collect();

    let assessments = mentions
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let (level, factors) = rule_ladder(i, m, mentions, &public, &direct_types, ctx);
            SensitivityAssessment {
                mention: i,
                level,
                factors,
            }
        })
        .collect();
    Ok(assessments)
}

fn rule_ladder(
    i: usize,
    m: &EntityMention,
    mentions: &[EntityMention],
    public: &[bool],
    direct_types: &BTreeSet<EntityType>,
    ctx: &DocumentContext,
) -> (SensitivityLevel, Vec<String>) {
    use SensitivityLevel::*;
    let ty = m.entity_type;
    if ty.is_direct_identifier() {
        return (Level1, vec![FACTOR_DIRECT_IDENTIFIER.to_owned()]);
    }
    if ty == EntityType::Person && !direct_types.is_empty() {
        return (Level1, direct_types.iter().map(|t| co_occurs_factor(*t)).collect());
    }

    let window = ctx.window(m.span);
    let partners: Vec<usize> = (0..mentions.len())
        .filter(|&j| j != i && mentions[j].span.overlaps(&window))
        .collect();
    let partner_factors = |pred: &dyn Fn(usize) -> bool| -> Vec<String> {
        let types: BTreeSet<EntityType> = partners
            .iter()
            .filter(|&&j| pred(j))
            .map(|&j| mentions[j].entity_type)
            .collect();
        types.into_iter().map(co_occurs_factor).collect()
    };

    if public[i]
        && partners.iter().all(|&j| {
            matches!(mentions[j].entity_type, EntityType::Date | EntityType::Location) || public[j]
        })
    {
        let mut f = vec![FACTOR_PUBLIC_FIGURE.to_owned()];
        f.extend(partner_factors(&|_| true));
        return (Level3, f);
    }

    let contextual = matches!(ty, EntityType::Person | EntityType::Date | EntityType::Location);
    if contextual {
        let escalating = partner_factors(&|j| !public[j]);
        let financial = ty == EntityType::Date && ctx.financial_context(m.span);
        if !escalating.is_empty() || financial {
            let mut f = escalating;
            if financial {
                f.push(FACTOR_FINANCIAL_CONTEXT.to_owned());
            }
            return (Level2, f);
        }
    }
    if matches!(ty, EntityType::Date | EntityType::Location) {
        return (Level3, vec![FACTOR_STANDALONE.to_owned()]);
    }
    (Level2, vec![FACTOR_DEFAULT.to_owned()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chunker::segment;
    use crate::keywords::KeywordIndex;
    use crate::model::TextSpan;

    fn m(text: &str, needle: &str, ty: EntityType) -> EntityMention {
        let s = text.find(needle).unwrap();
        EntityMention::new(text, TextSpan::new(s, s + needle.len()), ty, "en", "t", 1.0)
    }

    fn levels(text: &str, ms: &[EntityMention]) -> Vec<(SensitivityLevel, Vec<String>)> {
        let ctx = DocumentContext::build(text, segment(text), &KeywordIndex::bundled(["en"]));
        assess(ms, &ctx, &Gazetteer::bundled())
            .unwrap()
            .into_iter()
            .map(|a| (a.level, a.factors))
            .collect()
    }

    #[test]
    fn email_is_level_one() {
        let t = "Contact me at john.doe@example.com for details.";
        let out = levels(t, &[m(t, "john.doe@example.com", EntityType::EmailAddress)]);
        assert_eq!(out[0].0, SensitivityLevel::Level1);
    }

    #[test]
    fn public_figure_with_date() {
        let t = "Barack Obama was born on August 4, 1961.";
        let out = levels(
            t,
            &[m(t, "Barack Obama", EntityType::Person), m(t, "August 4, 1961", EntityType::Date)],
        );
        assert_eq!(out[0].0, SensitivityLevel::Level3);
        assert!(out[0].1.contains(&"public_figure".to_owned()));
        assert_eq!(out[1].0, SensitivityLevel::Level3);
    }

    #[test]
    fn private_person_with_context() {
        let t = "Alice visited Paris on January 12, 2023.";
        let out = levels(
            t,
            &[
                m(t, "Alice", EntityType::Person),
                m(t, "Paris", EntityType::Location),
                m(t, "January 12, 2023", EntityType::Date),
            ],
        );
        assert!(out.iter().all(|(l, _)| *l == SensitivityLevel::Level2), "{out:?}");
    }

    #[test]
    fn financial_date_and_bare_year() {
        let t = "The account balance as of March 5 was $12,000.";
        let out = levels(t, &[m(t, "March 5", EntityType::Date)]);
        assert_eq!(out[0], (SensitivityLevel::Level2, vec!["financial_context".to_owned()]));
        let t = "Historical events from 1776 included the Declaration of Independence.";
        let out = levels(t, &[m(t, "1776", EntityType::Date)]);
        assert_eq!(out[0], (SensitivityLevel::Level3, vec!["standalone".to_owned()]));
    }

    #[test]
    fn person_escalated_by_identifier_anywhere() {
        let t = "John Doe wrote this. Much later. Even later. Contact: jd@x.org";
        let out = levels(
            t,
            &[m(t, "John Doe", EntityType::Person), m(t, "jd@x.org", EntityType::EmailAddress)],
        );
        assert_eq!(out[0].0, SensitivityLevel::Level1);
        assert_eq!(out[0].1, vec!["co_occurs_with:EmailAddress".to_owned()]);
    }

    #[test]
    fn public_figure_with_private_person_is_sensitive() {
        let t = "Alice met Barack Obama.";
        let out = levels(
            t,
            &[m(t, "Alice", EntityType::Person), m(t, "Barack Obama", EntityType::Person)],
        );
        assert_eq!(out[1].0, SensitivityLevel::Level2);
        // A public figure alone does not escalate a private person past the default.
        assert_eq!(out[0].0, SensitivityLevel::Level2);
    }

    #[test]
    fn overlap_is_rejected() {
        let t = "abcdef";
        let a = EntityMention::new(t, TextSpan::new(0, 4), EntityType::Person, "en", "t", 1.0);
        let b = EntityMention::new(t, TextSpan::new(2, 6), EntityType::Date, "en", "t", 1.0);
        let ctx = DocumentContext::build(t, segment(t), &KeywordIndex::bundled(["en"]));
        assert!(matches!(assess(&[a, b], &ctx, &Gazetteer::bundled()), Err(Error::Contract(_))));
    }
}
