//! Date recognition: month-name formats per locale, locale-ordered numeric
//! dates, and bare years 1000-2999.

use std::collections::HashMap;

use regex::Regex;

use super::patterns::{isolated, DateOrder, LocalePatterns};
use crate::error::{Error, Result};
use crate::model::{EntityMention, EntityType, TextSpan, UNSPECIFIED_LOCALE};

const MONTH_NAME_CONFIDENCE: f64 = 0.9;
const NUMERIC_CONFIDENCE: f64 = 0.8;
const BARE_YEAR_CONFIDENCE: f64 = 0.5;

#[derive(Debug, Clone)]
struct LocaleDates {
    locale: String,
    formats: Vec<Regex>,
    month_index: HashMap<String, u32>,
    order: Option<DateOrder>,
}

#[derive(Debug, Clone)]
pub(crate) struct DateRecognizer {
    locales: Vec<LocaleDates>,
    numeric: Vec<Regex>,
    bare_year: Regex,
}

impl DateRecognizer {
    pub fn new<'a>(locales: impl IntoIterator<Item = &'a LocalePatterns>) -> Result<Self> {
        let mut out = Vec::new();
        for lp in locales {
            out.push(compile_locale(lp)?);
        }
        let numeric = ['/', '-', '.']
            .iter()
            .map(|sep| {
                let s = regex::escape(&sep.to_string());
                Regex::new(&format!(r"(\d{{1,4}}){s}(\d{{1,2}}){s}(\d{{2,4}})")).expect("static regex")
            })
            .collect();
        Ok(Self {
            locales: out,
            numeric,
            bare_year: Regex::new(r"\d{4}").expect("static regex"),
        })
    }

    pub fn detect(&self, text: &str, out: &mut Vec<EntityMention>) {
        for ld in &self.locales {
            for (i, re) in ld.formats.iter().enumerate() {
                for caps in re.captures_iter(text) {
                    let m = caps.get(0).expect("group 0");
                    if !isolated(text, m.start(), m.end(), false) {
                        continue;
                    }
                    let day = caps.name("day").map(|d| {
                        if d.as_str() == "1er" {
                            1
                        } else {
                            d.as_str().parse::<u32>().unwrap_or(0)
                        }
                    });
                    let month = caps
                        .name("month")
                        .and_then(|mo| ld.month_index.get(&mo.as_str().to_lowercase()).copied());
                    let year = caps.name("year").map(|y| y.as_str().parse::<u32>().unwrap_or(0));
                    let Some(month) = month else { continue };
                    if year.is_some_and(|y| !(1000..=2999).contains(&y)) {
                        continue;
                    }
                    if day.is_some_and(|d| !valid_day(d, month, year)) {
                        continue;
                    }
                    out.push(EntityMention::new(
                        text,
                        TextSpan::new(m.start(), m.end()),
                        EntityType::Date,
                        &ld.locale,
                        &format!("date_{}_{i}", ld.locale),
                        MONTH_NAME_CONFIDENCE,
                    ));
                }
            }
        }

        for re in &self.numeric {
            for caps in re.captures_iter(text) {
                let m = caps.get(0).expect("group 0");
                if !isolated(text, m.start(), m.end(), true) {
                    continue;
                }
                let parts = [&caps[1], &caps[2], &caps[3]];
                for ld in &self.locales {
                    let orders = ld.order.into_iter().chain(std::iter::once(DateOrder::Ymd));
                    if orders.into_iter().any(|o| numeric_valid(parts, o)) {
                        out.push(EntityMention::new(
                            text,
                            TextSpan::new(m.start(), m.end()),
                            EntityType::Date,
                            &ld.locale,
                            "date_numeric",
                            NUMERIC_CONFIDENCE,
                        ));
                    }
                }
            }
        }

        for m in self.bare_year.find_iter(text) {
            let year: u32 = m.as_str().parse().unwrap_or(0);
            if !(1000..=2999).contains(&year) || !bare_year_isolated(text, m.start(), m.end()) {
                continue;
            }
            out.push(EntityMention::new(
                text,
                TextSpan::new(m.start(), m.end()),
                EntityType::Date,
                UNSPECIFIED_LOCALE,
                "date_bare_year",
                BARE_YEAR_CONFIDENCE,
            ));
        }
    }
}

fn compile_locale(lp: &LocalePatterns) -> Result<LocaleDates> {
    let mut month_index = HashMap::new();
    let mut spellings = Vec::new();
    for (i, names) in lp.months.iter().enumerate() {
        for n in names {
            month_index.insert(n.to_lowercase(), i as u32 + 1);
            spellings.push(n.as_str());
        }
    }
    spellings.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let alternation = spellings
        .iter()
        .map(|s| regex::escape(s))
        .collect::<Vec<_>>()
        .join("|");
    let months = if lp.months_case_insensitive {
        format!("(?i:{alternation})")
    } else {
        format!("(?:{alternation})")
    };
    let mut formats = Vec::new();
    if !spellings.is_empty() {
        for f in &lp.date_formats {
            let src = f.replace("{months}", &months);
            formats.push(Regex::new(&src).map_err(|e| {
                Error::Config(format!("{}: date format `{f}`: {e}", lp.locale))
            })?);
        }
    }
    Ok(LocaleDates {
        locale: lp.locale.clone(),
        formats,
        month_index,
        order: lp.numeric_date_order,
    })
}

fn is_leap(y: u32) -> bool {
    (y % 4 == 0 && y % 100 != 0) || y % 400 == 0
}

fn valid_day(day: u32, month: u32, year: Option<u32>) -> bool {
    let max = match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => match year {
            Some(y) if !is_leap(y) => 28,
            _ => 29,
        },
        _ => return false,
    };
    (1..=max).contains(&day)
}

fn parse_year(s: &str) -> Option<u32> {
    let y: u32 = s.parse().ok()?;
    match s.len() {
        2 => Some(y),
        4 if (1000..=2999).contains(&y) => Some(y),
        _ => None,
    }
}

fn numeric_valid(parts: [&str; 3], order: DateOrder) -> bool {
    let num = |s: &str| s.parse::<u32>().ok();
    let (d, m, y) = match order {
        DateOrder::Mdy | DateOrder::Dmy => {
            if parts[0].len() > 2 {
                return false;
            }
            let (d, m) = if order == DateOrder::Mdy {
                (parts[1], parts[0])
            } else {
                (parts[0], parts[1])
            };
            (num(d), num(m), parse_year(parts[2]))
        }
        DateOrder::Ymd => {
            if parts[0].len() != 4 || parts[2].len() > 2 {
                return false;
            }
            (num(parts[2]), num(parts[1]), parse_year(parts[0]))
        }
    };
    match (d, m, y) {
        (Some(d), Some(m), Some(y)) => {
            (1..=12).contains(&m) && valid_day(d, m, if y >= 1000 { Some(y) } else { None })
        }
        _ => false,
    }
}

fn bare_year_isolated(text: &str, start: usize, end: usize) -> bool {
    if !isolated(text, start, end, true) {
        return false;
    }
    let prev = text[..start].chars().next_back();
    let next = text[end..].chars().next();
    !prev.is_some_and(|c| matches!(c, '#' | '$' | '€' | '£' | '₹' | '_' | '@'))
        && !next.is_some_and(|c| matches!(c, '%' | '_'))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::patterns::PatternRegistry;

    fn recognizer(locales: &[&str]) -> DateRecognizer {
        let r = PatternRegistry::bundled();
        DateRecognizer::new(locales.iter().map(|l| r.get(l).unwrap())).unwrap()
    }

    fn dates(locales: &[&str], text: &str) -> Vec<String> {
        let mut out = Vec::new();
        recognizer(locales).detect(text, &mut out);
        let mut v: Vec<String> = out.into_iter().map(|m| m.surface).collect();
        v.sort();
        v.dedup();
        v
    }

    #[test]
    fn table_rows() {
        assert_eq!(dates(&["en"], "Historical events from 1776 included the Declaration of Independence."), vec!["1776"]);
        assert_eq!(dates(&["en"], "The account balance as of March 5 was $12,000."), vec!["March 5"]);
        assert_eq!(
            dates(&["en"], "Barack Obama was born on August 4, 1961."),
            vec!["1961", "August 4, 1961"]
        );
    }

    #[test]
    fn version_strings_are_not_dates() {
        assert!(dates(&["en", "de"], "version 1.2.3").is_empty());
        assert!(dates(&["en"], "host 192.168.1.10 port 8080").is_empty());
        assert!(dates(&["en"], "Fixes #1234 and costs $1500").is_empty());
    }

    #[test]
    fn locale_formats() {
        for (locale, text, full) in [
            ("de", "am 12. März 2021 geboren", "12. März 2021"),
            ("fr", "le 14 juillet 2022", "14 juillet 2022"),
            ("es", "el 5 de mayo de 2020", "5 de mayo de 2020"),
            ("pt", "em 7 de setembro de 2019", "7 de setembro de 2019"),
            ("hi-IN", "15 अगस्त 2022 को", "15 अगस्त 2022"),
        ] {
            let found = dates(&[locale], text);
            assert!(found.iter().any(|d| d == full), "{locale}: {found:?}");
            assert!(found.iter().all(|d| full.contains(d.as_str())), "{locale}: {found:?}");
        }
    }

    #[test]
    fn numeric_dates_follow_locale_order() {
        assert_eq!(dates(&["en"], "due 12/25/2021."), vec!["12/25/2021"]);
        assert!(dates(&["de"], "due 12/25/2021.").is_empty());
        assert_eq!(dates(&["de"], "am 24.12.2023"), vec!["24.12.2023"]);
        assert_eq!(dates(&["fr"], "released 2023-01-15"), vec!["2023-01-15"]);
    }

    #[test]
    fn impossible_days_rejected() {
        assert!(dates(&["en"], "February 30, 2023").iter().all(|d| d == "2023"));
        assert_eq!(dates(&["en"], "February 29, 2024"), vec!["2024", "February 29, 2024"]);
    }
}
