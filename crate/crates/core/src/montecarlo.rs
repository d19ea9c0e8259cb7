//! Seeded Monte Carlo oracle for outage probability, densities and moments.
//!
//! Samples are produced in fixed chunks of [`CHUNK`] realizations; chunk `k`
//! always uses stream `k` of the configured seed. Workers only decide which
//! chunks they process, so every result is independent of the worker count.

use crate::analytic::{ErrorBound, EstimateFlag, OutageEstimate, OutageMethod, PdfGrid, PdfMethod};
use crate::error::{Error, Result};
use crate::model::{x_and_y, ChannelDraw, SystemParams};
use crate::rng;
use crate::specfun::normal_quantile;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Realizations per random stream.
pub const CHUNK: u64 = 1 << 16;
/// Bootstrap resamples behind [`moment_oracle`] intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 200;
/// Fewer hits than this widen the interval beyond its nominal meaning.
const MIN_HITS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    /// Two-sided confidence level of reported intervals.
    pub confidence: f64,
    /// Thread count; `None` uses the global pool. Never changes results.
    pub workers: Option<usize>,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_samples: 10_000,
            seed: 0,
            confidence: 0.99,
            workers: None,
        }
    }
}

impl McConfig {
    pub fn new(n_samples: u64, seed: u64) -> Result<Self> {
        let cfg = McConfig {
            n_samples,
            seed,
            ..McConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_confidence(mut self, confidence: f64) -> Result<Self> {
        self.confidence = confidence;
        self.validate()?;
        Ok(self)
    }

    pub fn with_workers(mut self, workers: usize) -> Result<Self> {
        self.workers = Some(workers);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 100 {
            return Err(Error::InvalidParams(format!(
                "n_samples must be at least 100, got {}",
                self.n_samples
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidParams(format!(
                "confidence must lie in (0, 1), got {}",
                self.confidence
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParams("workers must be positive".into()));
        }
        Ok(())
    }

    fn z(&self) -> f64 {
        // Validated confidence keeps the argument inside (0.5, 1).
        normal_quantile(0.5 + 0.5 * self.confidence).expect("validated confidence")
    }
}

/// Run `f(chunk_rng, chunk_len)` over every chunk and return results in chunk order.
fn map_chunks<T, F>(cfg: &McConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut rand_chacha::ChaCha8Rng, usize) -> T + Sync,
{
    cfg.validate()?;
    let n_chunks = cfg.n_samples.div_ceil(CHUNK);
    let job = || {
        (0..n_chunks)
            .into_par_iter()
            .map(|k| {
                let len = CHUNK.min(cfg.n_samples - k * CHUNK) as usize;
                let mut r = rng::stream(cfg.seed, k);
                f(&mut r, len)
            })
            .collect()
    };
    match cfg.workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidParams(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn for_each_xy(params: &SystemParams, r: &mut impl Rng, len: usize, mut f: impl FnMut(f64, f64)) {
    let mut draw = ChannelDraw::zeros(params.n_elements() as usize);
    for _ in 0..len {
        draw.resample(params, r);
        let (x, y) = x_and_y(&draw);
        f(x, y);
    }
}

/// Wilson score interval `(centre, half_width)` for `hits` out of `n`.
pub fn wilson_interval(hits: u64, n: u64, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    (centre, half)
}

/// Fraction of sampled SIRs below the threshold, with a Wilson interval.
pub fn estimate_op_mc(params: &SystemParams, cfg: &McConfig) -> Result<OutageEstimate> {
    let (gb, th) = (params.gamma_bar(), params.gamma_th());
    let hits: u64 = map_chunks(cfg, |r, len| {
        let mut h = 0u64;
        // γ̄X² < γ_th Y² avoids dividing by a vanishing envelope.
        for_each_xy(params, r, len, |x, y| h += u64::from(gb * x * x < th * y * y));
        h
    })?
    .into_iter()
    .sum();
    let n = cfg.n_samples;
    let (centre, half) = wilson_interval(hits, n, cfg.z());
    let mut est = OutageEstimate::new(
        hits as f64 / n as f64,
        OutageMethod::MonteCarlo,
        ErrorBound::Confidence {
            half_width: half,
            lower: (centre - half).max(0.0),
            upper: (centre + half).min(1.0),
            level: cfg.confidence,
        },
    );
    if hits < MIN_HITS {
        est.flag(EstimateFlag::WideInterval);
    }
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum McVariable {
    X,
    Y,
}

fn sample_variable(var: McVariable, params: &SystemParams, cfg: &McConfig) -> Result<Vec<f64>> {
    let parts = map_chunks(cfg, |r, len| {
        let mut v = Vec::with_capacity(len);
        for_each_xy(params, r, len, |x, y| {
            v.push(match var {
                McVariable::X => x,
                McVariable::Y => y,
            })
        });
        v
    })?;
    Ok(parts.concat())
}

/// Mass left outside the histogram support, split evenly between the tails.
const HISTOGRAM_TAIL: f64 = 1e-4;

/// Normalized histogram of `X` or `Y` on the central interval holding
/// 99.99% of the samples.
pub fn empirical_pdf(
    var: McVariable,
    params: &SystemParams,
    cfg: &McConfig,
    bins: usize,
) -> Result<PdfGrid> {
    if bins < 20 {
        return Err(Error::InvalidParams(format!("bins must be at least 20, got {bins}")));
    }
    let mut v = sample_variable(var, params, cfg)?;
    let n = v.len();
    let mut quantile = |q: f64| {
        let k = ((q * n as f64) as usize).min(n - 1);
        *v.select_nth_unstable_by(k, f64::total_cmp).1
    };
    let lo = quantile(0.5 * HISTOGRAM_TAIL);
    let hi = quantile(1.0 - 0.5 * HISTOGRAM_TAIL);
    if !(hi > lo) {
        return Err(Error::precision("empirical_pdf", "degenerate sample range"));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &s in &v {
        if (lo..=hi).contains(&s) {
            counts[(((s - lo) / width) as usize).min(bins - 1)] += 1;
        }
    }
    let inside: u64 = counts.iter().sum();
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let support = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let density = counts
        .iter()
        .map(|&c| c as f64 / (inside as f64 * width))
        .collect();
    let mut grid = PdfGrid::new(support, density, PdfMethod::Histogram);
    grid.bin_edges = Some(edges);
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MomentExpr {
    /// `E[X]`.
    EX,
    /// `Var[X]`.
    VarX,
    /// `E[Y²]`, the mean of the interference power.
    EY2,
    /// `E[Y⁴]`, the second moment of the interference power.
    EY4,
}

impl MomentExpr {
    pub const ALL: [MomentExpr; 4] = [MomentExpr::EX, MomentExpr::VarX, MomentExpr::EY2, MomentExpr::EY4];

    pub fn tag(&self) -> &'static str {
        match self {
            MomentExpr::EX => "EX",
            MomentExpr::VarX => "VarX",
            MomentExpr::EY2 => "EY2",
            MomentExpr::EY4 => "EY4",
        }
    }
}

/// Sample moment with a percentile bootstrap interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl MomentEstimate {
    pub fn relative_error(&self, reference: f64) -> f64 {
        (self.value - reference).abs() / reference.abs()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Block {
    count: f64,
    s1: f64,
    s2: f64,
}

impl Block {
    fn add(&mut self, o: &Block) {
        self.count += o.count;
        self.s1 += o.s1;
        self.s2 += o.s2;
    }

    fn statistic(&self, expr: MomentExpr) -> f64 {
        let m = self.s1 / self.count;
        match expr {
            MomentExpr::VarX => (self.s2 / self.count - m * m) * self.count / (self.count - 1.0),
            _ => m,
        }
    }
}

/// Block size: a power of two dividing [`CHUNK`] leaving at least 256 blocks.
fn block_len(n: u64) -> usize {
    let target = (n / 256).clamp(1, 1024);
    1 << (63 - target.leading_zeros())
}

/// Monte Carlo estimate of one moment with a bootstrap interval over
/// sample blocks and [`BOOTSTRAP_RESAMPLES`] resamples.
pub fn moment_oracle(expr: MomentExpr, params: &SystemParams, cfg: &McConfig) -> Result<MomentEstimate> {
    let bl = block_len(cfg.n_samples);
    let blocks: Vec<Block> = map_chunks(cfg, |r, len| {
        let mut out = Vec::with_capacity(len.div_ceil(bl));
        let mut cur = Block::default();
        for_each_xy(params, r, len, |x, y| {
            let v = match expr {
                MomentExpr::EX | MomentExpr::VarX => x,
                MomentExpr::EY2 => y * y,
                MomentExpr::EY4 => (y * y) * (y * y),
            };
            cur.count += 1.0;
            cur.s1 += v;
            cur.s2 += v * v;
            if cur.count as usize == bl {
                out.push(std::mem::take(&mut cur));
            }
        });
        if cur.count > 0.0 {
            out.push(cur);
        }
        out
    })?
    .concat();

    let mut total = Block::default();
    blocks.iter().for_each(|b| total.add(b));
    let value = total.statistic(expr);

    let mut r = rng::aux_stream(cfg.seed, 0);
    let mut stats: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let mut acc = Block::default();
            for _ in 0..blocks.len() {
                acc.add(&blocks[r.random_range(0..blocks.len())]);
            }
            acc.statistic(expr)
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let tail = 0.5 * (1.0 - cfg.confidence);
    let pick = |q: f64| stats[((q * (stats.len() - 1) as f64).round() as usize).min(stats.len() - 1)];
    Ok(MomentEstimate {
        value,
        lower: pick(tail),
        upper: pick(1.0 - tail),
        level: cfg.confidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: u32, snr: f64, th: f64) -> SystemParams {
        SystemParams::unit(n, snr, 0.0, th).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(99, 0).is_err());
        assert!(McConfig::new(100, 0).unwrap().with_confidence(1.0).is_err());
        assert!(McConfig::new(100, 0).unwrap().with_workers(0).is_err());
    }

    #[test]
    fn wilson_known_values() {
        // 0 of 100 at z = 1.96: centre 0.0184, half 0.0184.
        let (c, h) = wilson_interval(0, 100, 1.96);
        assert!((c - h).abs() < 1e-15);
        assert!((c + h - 0.036_995_7).abs() < 1e-6);
        let (c, h) = wilson_interval(50, 100, 1.96);
        assert!((c - 0.5).abs() < 1e-15);
        assert!((h - 0.096_170_6).abs() < 1e-6);
    }

    #[test]
    fn deep_threshold_gives_zero_with_tight_upper_bound() {
        let p = unit(4, 10.0, -100.0);
        let est = estimate_op_mc(&p, &McConfig::new(10_000, 3).unwrap()).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(est.has_flag(EstimateFlag::WideInterval));
        match est.err {
            ErrorBound::Confidence { upper, .. } => assert!(upper < 1e-3),
            e => panic!("unexpected error descriptor {e:?}"),
        }
    }

    #[test]
    fn chunk_boundaries_and_workers_do_not_matter() {
        let p = unit(3, 0.0, 0.0);
        let n = 2 * CHUNK + 17;
        let a = estimate_op_mc(&p, &McConfig::new(n, 5).unwrap().with_workers(1).unwrap()).unwrap();
        let b = estimate_op_mc(&p, &McConfig::new(n, 5).unwrap().with_workers(3).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn histogram_is_normalized() {
        let p = unit(4, 0.0, 0.0);
        let g = empirical_pdf(McVariable::Y, &p, &McConfig::new(20_000, 1).unwrap(), 40).unwrap();
        assert!((g.integral() - 1.0).abs() < 1e-9);
        assert_eq!(g.bin_edges.as_ref().unwrap().len(), 41);
        assert!(empirical_pdf(McVariable::X, &p, &McConfig::new(1000, 1).unwrap(), 19).is_err());
    }

    #[test]
    fn block_lengths() {
        assert_eq!(block_len(100), 1);
        assert_eq!(block_len(1_000_000), 1024);
        assert_eq!(block_len(100_000), 256);
        assert_eq!(CHUNK as usize % block_len(12_345), 0);
    }

    #[test]
    fn moment_interval_brackets_estimate() {
        let p = unit(4, 0.0, 0.0);
        let m = moment_oracle(MomentExpr::EY2, &p, &McConfig::new(50_000, 2).unwrap()).unwrap();
        assert!(m.lower <= m.value && m.value <= m.upper);
        // E[Y²] = σ_ID² + N σ_IR² σ_RD² = 5.
        assert!(m.relative_error(5.0) < 0.03);
    }
}
