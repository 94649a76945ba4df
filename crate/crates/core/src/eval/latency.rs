//! Scan latency by document length.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::Guard;

pub const MIN_ITERATIONS: usize = 30;
pub const WARMUP_ITERATIONS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TokenBucket {
    /// At most 150 whitespace-separated tokens.
    Le150,
    Le250,
    Gt250,
}

impl TokenBucket {
    pub fn of(text: &str) -> Self {
        match whitespace_tokens(text) {
            0..=150 => TokenBucket::Le150,
            151..=250 => TokenBucket::Le250,
            _ => TokenBucket::Gt250,
        }
    }
}

pub fn whitespace_tokens(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Median microseconds per pipeline stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageBreakdown {
    pub chunk_us: f64,
    pub detect_us: f64,
    pub resolve_us: f64,
    pub assess_us: f64,
    pub decide_us: f64,
    pub redact_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketStats {
    pub bucket: TokenBucket,
    pub documents: usize,
    /// Statistics over per-document median latencies, in microseconds.
    pub median_us: f64,
    pub p95_us: f64,
    pub max_us: f64,
    pub stages: StageBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub documents: usize,
    pub iterations: usize,
    /// Non-empty buckets only, shortest first.
    pub buckets: Vec<BucketStats>,
}

impl LatencyReport {
    pub fn bucket(&self, b: TokenBucket) -> Option<&BucketStats> {
        self.buckets.iter().find(|s| s.bucket == b)
    }
}

/// Median of a non-empty sample (mean of the middle pair for even sizes).
pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Nearest-rank percentile of a non-empty sample.
pub fn percentile(xs: &mut [f64], p: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let rank = ((p / 100.0) * xs.len() as f64).ceil() as usize;
    xs[rank.clamp(1, xs.len()) - 1]
}

struct DocTiming {
    bucket: TokenBucket,
    total: f64,
    stages: [f64; 6],
}

/// Scan each document `iterations` times after a short warm-up and report
/// per-bucket latency. Documents run one at a time on the calling thread.
pub fn bench_latency(corpus: &[String], guard: &Guard, iterations: usize) -> Result<LatencyReport> {
    if corpus.is_empty() {
        return Err(Error::Argument("latency corpus is empty".into()));
    }
    if iterations < MIN_ITERATIONS {
        return Err(Error::Argument(format!(
            "at least {MIN_ITERATIONS} iterations per document are required, got {iterations}"
        )));
    }
    let mut docs = Vec::with_capacity(corpus.len());
    for (i, text) in corpus.iter().enumerate() {
        let id = format!("bench-{i}");
        for _ in 0..WARMUP_ITERATIONS {
            guard.scan(&id, text)?;
        }
        let mut totals = Vec::with_capacity(iterations);
        let mut stages: [Vec<f64>; 6] = Default::default();
        for _ in 0..iterations {
            let t = Instant::now();
            let r = guard.scan(&id, text)?;
            totals.push(t.elapsed().as_secs_f64() * 1e6);
            let tm = r.timing;
            for (v, x) in stages.iter_mut().zip([
                tm.chunk_us,
                tm.detect_us,
                tm.resolve_us,
                tm.assess_us,
                tm.decide_us,
                tm.redact_us,
            ]) {
                v.push(x as f64);
            }
        }
        docs.push(DocTiming {
            bucket: TokenBucket::of(text),
            total: median(&mut totals),
            stages: stages.map(|mut v| median(&mut v)),
        });
    }

    let mut buckets = Vec::new();
    for b in [TokenBucket::Le150, TokenBucket::Le250, TokenBucket::Gt250] {
        let members: Vec<&DocTiming> = docs.iter().filter(|d| d.bucket == b).collect();
        if members.is_empty() {
            continue;
        }
        let mut totals: Vec<f64> = members.iter().map(|d| d.total).collect();
        let stage = |k: usize| median(&mut members.iter().map(|d| d.stages[k]).collect::<Vec<_>>());
        buckets.push(BucketStats {
            bucket: b,
            documents: members.len(),
            median_us: median(&mut totals),
            p95_us: percentile(&mut totals, 95.0),
            max_us: totals.iter().copied().fold(f64::MIN, f64::max),
            stages: StageBreakdown {
                chunk_us: stage(0),
                detect_us: stage(1),
                resolve_us: stage(2),
                assess_us: stage(3),
                decide_us: stage(4),
                redact_us: stage(5),
            },
        });
    }
    Ok(LatencyReport {
        documents: corpus.len(),
        iterations,
        buckets,
    })
}
