//! Seeded, parallel Ptolemy scans and their reports.
//!
//! Work is cut into chunks of [`CHUNK`] samples; chunk `c` draws from
//! substream `c` of the master seed. Partial results are merged with
//! min/sum reductions in chunk order, so the report depends only on the
//! inputs and never on the worker count.

use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sampling::{sample_quadruple, substream_rng, Diamond, DiamondSampler};
use crate::space::{is_violation, slack_margin_unchecked, Event, LorentzianSpace, Separations6};

/// Samples per substream.
pub const CHUNK: u64 = 4096;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "LORPTO_THREADS";

pub const HIST_BINS: usize = 64;
/// Half-width of the linear core of the histogram.
pub const HIST_CORE: f64 = 1e-6;
const CORE_BINS: usize = 8;
const LOG_BINS: usize = (HIST_BINS - CORE_BINS) / 2;
/// Outermost finite edge; values beyond it land in the end bins.
const HIST_OUTER: f64 = 1e8;

/// The 65 bin edges: log-spaced (half a decade per bin) from `-1e8` to
/// `-1e-6`, linear across the core, log-spaced again up to `1e8`.
pub fn histogram_edges() -> &'static [f64] {
    static EDGES: OnceLock<Vec<f64>> = OnceLock::new();
    EDGES.get_or_init(|| {
        let top = HIST_OUTER.log10();
        let bottom = HIST_CORE.log10();
        let step = (top - bottom) / LOG_BINS as f64;
        let mut e = Vec::with_capacity(HIST_BINS + 1);
        for i in 0..=LOG_BINS {
            e.push(-(10f64.powf(top - step * i as f64)));
        }
        let w = 2.0 * HIST_CORE / CORE_BINS as f64;
        for i in 1..CORE_BINS {
            e.push(-HIST_CORE + w * i as f64);
        }
        for i in 0..=LOG_BINS {
            e.push(10f64.powf(bottom + step * i as f64));
        }
        e
    })
}

/// Bin of a slack value; out-of-range values are clamped to the end bins.
pub fn histogram_bin(x: f64) -> usize {
    let e = histogram_edges();
    e.partition_point(|&edge| edge <= x).clamp(1, HIST_BINS) - 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackHistogram {
    pub counts: Vec<u64>,
}

impl Default for SlackHistogram {
    fn default() -> Self {
        SlackHistogram {
            counts: vec![0; HIST_BINS],
        }
    }
}

impl SlackHistogram {
    pub fn add(&mut self, x: f64) {
        self.counts[histogram_bin(x)] += 1;
    }

    pub fn merge(&mut self, other: &SlackHistogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Count in bins whose lower edge is negative; bounds the violations.
    pub fn below_zero(&self) -> u64 {
        let e = histogram_edges();
        self.counts.iter().zip(e).filter(|(_, &lo)| lo < 0.0).map(|(c, _)| c).sum()
    }
}

/// One CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub sample_index: u64,
    pub l12: f64,
    pub l13: f64,
    pub l14: f64,
    pub l23: f64,
    pub l24: f64,
    pub l34: f64,
    pub slack: f64,
    pub robust_slack: f64,
}

impl SampleRow {
    pub fn new(sample_index: u64, s: &Separations6, slack: f64, robust_slack: f64) -> Self {
        SampleRow {
            sample_index,
            l12: s.l12,
            l13: s.l13,
            l14: s.l14,
            l23: s.l23,
            l24: s.l24,
            l34: s.l34,
            slack,
            robust_slack,
        }
    }
}

/// Outcome of a sampled or exhaustive Ptolemy scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub space: String,
    pub region: Option<Diamond>,
    /// Quadruples evaluated.
    pub samples: u64,
    pub seed: Option<u64>,
    pub delta: f64,
    pub min_slack: Option<f64>,
    pub min_robust_slack: Option<f64>,
    /// Sample index (or quadruple rank for exhaustive scans) of the minimum.
    pub min_index: Option<u64>,
    pub witness: Option<[Event; 4]>,
    pub witness_indices: Option<[usize; 4]>,
    pub witness_separations: Option<Separations6>,
    pub histogram: SlackHistogram,
    /// Slacks below `-(1e-9 + 1e-9 l13 l24)`.
    pub violations: u64,
    /// Robust slacks below zero.
    pub certified_violations: u64,
    /// Separations came from an unchecked user table.
    pub raw_table: bool,
    pub partial: bool,
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
    #[serde(skip)]
    pub rows: Vec<SampleRow>,
}

impl ScanReport {
    /// The report with the timing field cleared, for byte comparisons.
    pub fn without_timing(mut self) -> Self {
        self.wall_time_secs = None;
        self
    }
}

#[derive(Debug, Clone)]
pub(crate) struct MinRecord<W> {
    pub slack: f64,
    pub key: u64,
    pub separations: Separations6,
    pub witness: W,
}

/// Per-chunk partial results.
#[derive(Debug, Clone)]
pub(crate) struct Accumulator<W> {
    pub count: u64,
    pub min: Option<MinRecord<W>>,
    pub min_robust: Option<f64>,
    pub violations: u64,
    pub certified: u64,
    pub histogram: SlackHistogram,
    pub rows: Vec<SampleRow>,
    pub error: Option<(u64, String)>,
    keep_rows: bool,
    delta: f64,
}

impl<W: Clone> Accumulator<W> {
    pub fn new(delta: f64, keep_rows: bool) -> Self {
        Accumulator {
            count: 0,
            min: None,
            min_robust: None,
            violations: 0,
            certified: 0,
            histogram: SlackHistogram::default(),
            rows: Vec::new(),
            error: None,
            keep_rows,
            delta,
        }
    }

    #[inline]
    pub fn push(&mut self, key: u64, s: Separations6, witness: impl FnOnce() -> W) {
        let slack = s.slack();
        let robust = slack_margin_unchecked(&s, self.delta);
        self.count += 1;
        self.histogram.add(slack);
        self.violations += u64::from(is_violation(slack, &s));
        self.certified += u64::from(robust < 0.0);
        self.min_robust = Some(self.min_robust.map_or(robust, |m| m.min(robust)));
        if self.keep_rows {
            self.rows.push(SampleRow::new(key, &s, slack, robust));
        }
        if self.min.as_ref().is_none_or(|m| better(slack, key, m.slack, m.key)) {
            self.min = Some(MinRecord {
                slack,
                key,
                separations: s,
                witness: witness(),
            });
        }
    }

    /// Merges `other`, which covers later keys when rows are kept.
    pub fn merge(&mut self, other: Accumulator<W>) {
        self.count += other.count;
        self.violations += other.violations;
        self.certified += other.certified;
        self.histogram.merge(&other.histogram);
        self.min_robust = match (self.min_robust, other.min_robust) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self.rows.extend(other.rows);
        if let Some(m) = other.min {
            if self.min.as_ref().is_none_or(|s| better(m.slack, m.key, s.slack, s.key)) {
                self.min = Some(m);
            }
        }
        if let Some((k, e)) = other.error {
            if self.error.as_ref().is_none_or(|(s, _)| k < *s) {
                self.error = Some((k, e));
            }
        }
    }
}

#[inline]
fn better(slack: f64, key: u64, best: f64, best_key: u64) -> bool {
    match slack.total_cmp(&best) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Equal => key < best_key,
        std::cmp::Ordering::Greater => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub delta: f64,
    /// Worker count; `None` defers to the environment, then to rayon.
    pub threads: Option<usize>,
    /// Keep per-sample rows for CSV output.
    pub keep_rows: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            delta: 0.0,
            threads: None,
            keep_rows: false,
        }
    }
}

/// Worker cap from `LORPTO_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `f` on a pool with the requested number of workers.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let n = threads.or_else(threads_from_env).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(domain("margin delta must be finite and non-negative"));
    }
    Ok(())
}

/// Evaluates `n` seeded quadruples `x <= y << z <= w` from `region`.
///
/// A sampling failure stops its chunk; the report then covers the samples
/// drawn so far and carries `partial = true` with the first error.
pub fn scan<S>(space: &S, descriptor: &str, region: &Diamond, n: u64, seed: u64, opts: &ScanOptions) -> Result<ScanReport>
where
    S: LorentzianSpace<Point = Event> + DiamondSampler,
{
    if n == 0 {
        return Err(Error::Input("scan needs at least one sample".into()));
    }
    check_delta(opts.delta)?;
    region.check(space)?;
    let start = Instant::now();
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Accumulator<[Event; 4]>> = with_threads(opts.threads, || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = Accumulator::new(opts.delta, opts.keep_rows);
                let mut rng = substream_rng(seed, c);
                for i in c * CHUNK..n.min((c + 1) * CHUNK) {
                    match sample_quadruple(space, &region.past, &region.future, &mut rng) {
                        Ok(q) => {
                            let s = space.separations(&q);
                            acc.push(i, s, || q);
                        }
                        Err(e) => {
                            acc.error = Some((i, e.to_string()));
                            break;
                        }
                    }
                }
                acc
            })
            .collect()
    })?;
    let mut total = Accumulator::new(opts.delta, opts.keep_rows);
    for p in parts {
        total.merge(p);
    }
    let (mut report, witness) = finish(total, descriptor, opts.delta);
    report.witness = witness;
    report.region = Some(region.clone());
    report.seed = Some(seed);
    report.wall_time_secs = Some(start.elapsed().as_secs_f64());
    Ok(report)
}

/// The report without a witness, plus the witness of the minimum.
pub(crate) fn finish<W>(acc: Accumulator<W>, descriptor: &str, delta: f64) -> (ScanReport, Option<W>) {
    let (min_slack, min_index, witness, witness_separations) = match acc.min {
        Some(m) => (Some(m.slack), Some(m.key), Some(m.witness), Some(m.separations)),
        None => (None, None, None, None),
    };
    let report = ScanReport {
        space: descriptor.to_string(),
        region: None,
        samples: acc.count,
        seed: None,
        delta,
        min_slack,
        min_robust_slack: acc.min_robust,
        min_index,
        witness: None,
        witness_indices: None,
        witness_separations,
        histogram: acc.histogram,
        violations: acc.violations,
        certified_violations: acc.certified,
        raw_table: false,
        partial: acc.error.is_some(),
        error: acc.error.map(|(_, e)| e),
        wall_time_secs: None,
        rows: acc.rows,
    };
    (report, witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{Backend, SpaceSpec};

    #[test]
    fn histogram_layout() {
        let e = histogram_edges();
        assert_eq!(e.len(), HIST_BINS + 1);
        assert!(e.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(e[LOG_BINS], -HIST_CORE);
        assert_eq!(e[LOG_BINS + CORE_BINS], HIST_CORE);
        assert_eq!(e[LOG_BINS + CORE_BINS / 2], 0.0);
        assert_eq!(histogram_bin(-1e300), 0);
        assert_eq!(histogram_bin(1e300), HIST_BINS - 1);
        assert_eq!(histogram_bin(0.0), LOG_BINS + CORE_BINS / 2);
        assert_eq!(histogram_bin(-1e-12), LOG_BINS + CORE_BINS / 2 - 1);
        for x in [-3.0, -1e-7, 2e-6, 0.5, 1e7] {
            let b = histogram_bin(x);
            assert!(e[b] <= x && x < e[b + 1]);
        }
    }

    fn flat() -> (Backend, Diamond) {
        let b = Backend::new(SpaceSpec::Minkowski(1)).unwrap();
        let d = b.centered_region(1.0).unwrap();
        (b, d)
    }

    #[test]
    fn scan_is_independent_of_thread_count() {
        let (b, d) = flat();
        let opts = |t| ScanOptions {
            threads: Some(t),
            keep_rows: true,
            delta: 1e-3,
        };
        let a = scan(&b, "minkowski:1", &d, 10_000, 5, &opts(1)).unwrap().without_timing();
        let c = scan(&b, "minkowski:1", &d, 10_000, 5, &opts(4)).unwrap().without_timing();
        assert_eq!(a, c);
        assert_eq!(a.rows.len(), 10_000);
        assert!(a.rows.windows(2).all(|w| w[0].sample_index + 1 == w[1].sample_index));
        assert_eq!(a.histogram.total(), 10_000);
    }

    #[test]
    fn minimum_matches_witness() {
        let (b, d) = flat();
        let r = scan(&b, "minkowski:1", &d, 5_000, 1, &ScanOptions::default()).unwrap();
        let w = r.witness.clone().unwrap();
        assert_eq!(b.separations(&w).slack(), r.min_slack.unwrap());
        assert_eq!(r.violations, 0);
        assert!(r.violations <= r.histogram.below_zero());
        assert!(!r.partial);
    }

    #[test]
    fn seeds_matter() {
        let (b, d) = flat();
        let o = ScanOptions::default();
        let a = scan(&b, "m", &d, 100, 1, &o).unwrap();
        let c = scan(&b, "m", &d, 100, 2, &o).unwrap();
        assert_ne!(a.min_slack, c.min_slack);
    }

    #[test]
    fn rejects_bad_requests() {
        let (b, d) = flat();
        let o = ScanOptions::default();
        assert!(scan(&b, "m", &d, 0, 1, &o).is_err());
        let bad = Diamond::new(d.past.clone(), d.past.clone());
        assert!(scan(&b, "m", &bad, 10, 1, &o).is_err());
        let neg = ScanOptions { delta: -1.0, ..o };
        assert!(scan(&b, "m", &d, 10, 1, &neg).is_err());
    }
}
