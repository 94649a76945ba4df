//! Evaluation harness: per-type precision/recall/F1, latency benchmarking
//! and deterministic synthetic corpora.

pub mod corpus;
pub mod latency;
pub mod prs;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use corpus::{generate_corpus, CorpusSpec};
pub use latency::{bench_latency, LatencyReport, TokenBucket};
pub use prs::{generate_prs, SyntheticPr};

use crate::error::{Error, Result};
use crate::model::{EntityMention, EntityType, TextSpan};
use crate::pipeline::Guard;

/// One annotated (or predicted) entity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpanLabel {
    pub entity_type: EntityType,
    pub span: TextSpan,
    pub surface: String,
}

impl From<&EntityMention> for SpanLabel {
    fn from(m: &EntityMention) -> Self {
        Self {
            entity_type: m.entity_type,
            span: m.span,
            surface: m.surface.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedRecord {
    pub record_id: String,
    pub text: String,
    pub gold: Vec<SpanLabel>,
}

impl AnnotatedRecord {
    /// Violations of the record invariants: spans inside the text on
    /// character boundaries and surfaces equal to the covered text.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        for g in &self.gold {
            if let Err(e) = g.span.check(&self.text) {
                out.push(format!("{}: {e}", self.record_id));
            } else if g.span.slice(&self.text) != g.surface {
                out.push(format!(
                    "{}: surface {:?} does not match text at {}",
                    self.record_id, g.surface, g.span
                ));
            }
        }
        out
    }
}

/// Mentions a tool predicted for one record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub record_id: String,
    pub mentions: Vec<SpanLabel>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    #[default]
    ExactSpan,
    Overlap,
}

impl FromStr for MatchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_span" => Ok(MatchMode::ExactSpan),
            "overlap" => Ok(MatchMode::Overlap),
            other => Err(Error::Argument(format!("unknown match mode `{other}`"))),
        }
    }
}

impl fmt::Display for MatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchMode::ExactSpan => "exact_span",
            MatchMode::Overlap => "overlap",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TypeMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of gold mentions.
    pub support: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean with `0/0 = 0`.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

impl TypeMetrics {
    fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Self {
            precision,
            recall,
            f1: f1(precision, recall),
            support: tp + fn_,
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MacroAverage {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub match_mode: MatchMode,
    pub records: usize,
    pub per_type: BTreeMap<EntityType, TypeMetrics>,
    pub micro: TypeMetrics,
    #[serde(rename = "macro")]
    pub macro_avg: MacroAverage,
}

impl MetricsReport {
    pub fn f1(&self, ty: EntityType) -> f64 {
        self.per_type.get(&ty).map_or(0.0, |m| m.f1)
    }
}

/// Number of predicted/gold pairs matched one-to-one.
fn matches(pred: &mut [TextSpan], gold: &mut [TextSpan], mode: MatchMode) -> usize {
    pred.sort();
    gold.sort();
    match mode {
        MatchMode::ExactSpan => {
            let (mut i, mut j, mut n) = (0, 0, 0);
            while i < pred.len() && j < gold.len() {
                match pred[i].cmp(&gold[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        n += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
            n
        }
        MatchMode::Overlap => {
            let mut used = vec![false; gold.len()];
            let mut n = 0;
            for p in pred.iter() {
                if let Some(k) = (0..gold.len()).find(|&k| !used[k] && gold[k].overlaps(p)) {
                    used[k] = true;
                    n += 1;
                }
            }
            n
        }
    }
}

fn index_by_id<'a, T>(items: &'a [T], id: impl Fn(&T) -> &str, what: &str) -> Result<BTreeMap<&'a str, &'a T>> {
    let mut map = BTreeMap::new();
    for it in items {
        if map.insert(id(it), it).is_some() {
            return Err(Error::Argument(format!("duplicate {what} record id `{}`", id(it))));
        }
    }
    Ok(map)
}

/// Score predictions against gold annotations. Every record id must appear
/// exactly once on both sides.
pub fn score(predictions: &[PredictionRecord], gold: &[AnnotatedRecord], mode: MatchMode) -> Result<MetricsReport> {
    let preds = index_by_id(predictions, |p| &p.record_id, "prediction")?;
    let golds = index_by_id(gold, |g| &g.record_id, "gold")?;
    if let Some(id) = preds.keys().find(|k| !golds.contains_key(*k)) {
        return Err(Error::Argument(format!("prediction for unknown record `{id}`")));
    }
    if let Some(id) = golds.keys().find(|k| !preds.contains_key(*k)) {
        return Err(Error::Argument(format!("no prediction for record `{id}`")));
    }

    let mut counts: BTreeMap<EntityType, (usize, usize, usize)> = BTreeMap::new();
    for (id, g) in &golds {
        let p = preds[id];
        let types: BTreeSet<EntityType> = g
            .gold
            .iter()
            .chain(&p.mentions)
            .map(|l| l.entity_type)
            .collect();
        for ty in types {
            let mut ps: Vec<TextSpan> = p.mentions.iter().filter(|l| l.entity_type == ty).map(|l| l.span).collect();
            let mut gs: Vec<TextSpan> = g.gold.iter().filter(|l| l.entity_type == ty).map(|l| l.span).collect();
            let tp = matches(&mut ps, &mut gs, mode);
            let c = counts.entry(ty).or_default();
            c.0 += tp;
            c.1 += ps.len() - tp;
            c.2 += gs.len() - tp;
        }
    }

    let per_type: BTreeMap<EntityType, TypeMetrics> = counts
        .iter()
        .map(|(&ty, &(tp, fp, fn_))| (ty, TypeMetrics::from_counts(tp, fp, fn_)))
        .collect();
    let (tp, fp, fn_) = counts
        .values()
        .fold((0, 0, 0), |a, c| (a.0 + c.0, a.1 + c.1, a.2 + c.2));
    let n = per_type.len().max(1) as f64;
    let macro_avg = MacroAverage {
        precision: per_type.values().map(|m| m.precision).sum::<f64>() / n,
        recall: per_type.values().map(|m| m.recall).sum::<f64>() / n,
        f1: per_type.values().map(|m| m.f1).sum::<f64>() / n,
    };
    Ok(MetricsReport {
        match_mode: mode,
        records: golds.len(),
        per_type,
        micro: TypeMetrics::from_counts(tp, fp, fn_),
        macro_avg,
    })
}

/// Run the pipeline over every record and collect its resolved mentions.
pub fn predict(guard: &Guard, records: &[AnnotatedRecord]) -> Result<Vec<PredictionRecord>> {
    records
        .iter()
        .map(|r| {
            let a = guard.analyze(&r.text)?;
            Ok(PredictionRecord {
                record_id: r.record_id.clone(),
                mentions: a.mentions.iter().map(SpanLabel::from).collect(),
            })
        })
        .collect()
}

/// Read a JSON-lines file, one value per non-blank line.
pub fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in std::io::BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Load {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(mut w: impl Write, items: &[T]) -> std::io::Result<()> {
    for it in items {
        serde_json::to_writer(&mut w, it)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}
