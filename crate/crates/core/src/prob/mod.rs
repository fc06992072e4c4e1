//! Probabilities over a student's aggregated preference.
//!
//! Every function picks the most exact path its inputs allow: exact rationals
//! for two-feature uniform and for any finite-support distribution, the
//! regularized incomplete beta for `BetaTwoFeature`, and a seeded Monte Carlo
//! estimate otherwise. The returned [`Value`] records which path ran.

mod interval;
mod pros;
mod value;

pub use interval::{cdf_w1, measure, BlockInterval, WeightSampler};
pub use pros::{
    pros_auto, pros_exact, pros_exact_2f, pros_monte_carlo, stability_breakdown, ExactProsTable,
    ProsResult, StudentBreakdown,
};
pub use value::{format_sig, Value};

use crate::model::{College, Instance, ModelError, Report, Student, WeightDistribution};
use crate::rational::{self, Rational};
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbError {
    #[error("operation requires exactly two features, instance has {0}")]
    FeatureCount(usize),
    #[error("matching is infeasible: college {college} holds {assigned} > capacity {capacity}")]
    Infeasible {
        college: String,
        assigned: usize,
        capacity: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("sample count must be positive")]
    ZeroSamples,
    #[error("no exact evaluator for this instance (continuous distribution with more than two features)")]
    NoExactEvaluator,
    #[error("college {0} is not in the pool")]
    NotInPool(College),
}

/// Monte Carlo settings used whenever no exact path exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 100_000,
            seed: 42,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a key path into one 64-bit stream id.
pub fn stream_key(parts: &[u64]) -> u64 {
    parts.iter().fold(0x5eed, |acc, &p| splitmix(acc ^ splitmix(p)))
}

/// Independent generator for `(seed, stream)`; identical regardless of call order.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// The four cases of the two-feature pairwise comparison of `c_i` over `c_j`.
#[derive(Clone, Debug, PartialEq)]
pub enum PairwiseCase {
    AlwaysPreferred,
    NeverPreferred,
    /// `c_i` strictly preferred iff `w1 > eta`.
    ThresholdAbove(Rational),
    /// `c_i` strictly preferred iff `w1 < eta`.
    ThresholdBelow(Rational),
}

/// Pairwise comparison for a report with two features.
pub fn pairwise_case_report(report: &Report, ci: College, cj: College) -> PairwiseCase {
    let d1 = report.utility(0, ci) - report.utility(0, cj);
    let d2 = report.utility(1, ci) - report.utility(1, cj);
    let zero = rational::zero();
    let eta = || {
        if d2.is_zero() {
            rational::zero()
        } else {
            d2.abs() / (d1.abs() + d2.abs())
        }
    };
    match (d1 > zero, d2 > zero) {
        (true, true) => PairwiseCase::AlwaysPreferred,
        (false, false) => PairwiseCase::NeverPreferred,
        (true, false) => PairwiseCase::ThresholdAbove(eta()),
        (false, true) => PairwiseCase::ThresholdBelow(eta()),
    }
}

pub fn pairwise_case_2f(
    inst: &Instance,
    s: Student,
    ci: College,
    cj: College,
) -> Result<PairwiseCase, ProbError> {
    require_two_features(inst.num_features())?;
    Ok(pairwise_case_report(inst.report(s), ci, cj))
}

fn require_two_features(f: usize) -> Result<(), ProbError> {
    if f == 2 {
        Ok(())
    } else {
        Err(ProbError::FeatureCount(f))
    }
}

/// `c_i ≻ c_j` as the half-space `normal · (w1..w_{F-1}) < offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
    pub strict: bool,
}

impl HalfSpace {
    pub fn new(report: &Report, ci: College, cj: College, strict: bool) -> HalfSpace {
        let nf = report.num_features();
        let delta: Vec<Rational> = (0..nf)
            .map(|f| report.utility(f, ci) - report.utility(f, cj))
            .collect();
        let last = delta[nf - 1].clone();
        HalfSpace {
            normal: delta[..nf - 1].iter().map(|d| &last - d).collect(),
            offset: last,
            strict,
        }
    }

    /// Evaluates on a full weight vector (the last coordinate is implied).
    pub fn contains(&self, w: &[Rational]) -> bool {
        let lhs: Rational = self.normal.iter().zip(w).map(|(a, b)| a * b).sum();
        if self.strict {
            lhs < self.offset
        } else {
            lhs <= self.offset
        }
    }
}

/// Closed interval of `w1` on which `hi ⪰ lo` (two features).
pub fn weak_interval(report: &Report, hi: College, lo: College) -> BlockInterval {
    let d1 = report.utility(0, hi) - report.utility(0, lo);
    let d2 = report.utility(1, hi) - report.utility(1, lo);
    let zero = rational::zero();
    match (d1 >= zero, d2 >= zero) {
        (true, true) => BlockInterval::full(),
        (false, false) => BlockInterval::empty(),
        (true, false) => BlockInterval::closed(-&d2 / (&d1 - &d2), rational::one()),
        (false, true) => BlockInterval::closed(rational::zero(), &d2 / (&d2 - &d1)),
    }
}

fn aggregate_f64(report: &Report, w: &[f64], c: College) -> f64 {
    // utilities as f64 are cached by callers on hot paths; this is the simple form
    w.iter()
        .enumerate()
        .map(|(f, wf)| wf * rational::to_f64(report.utility(f, c)))
        .sum()
}

/// Per-report utility table in floating point for sampling loops.
pub(crate) fn utilities_f64(report: &Report) -> Vec<Vec<f64>> {
    report
        .utilities()
        .iter()
        .map(|col| col.iter().map(rational::to_f64).collect())
        .collect()
}

fn aggregate_table(u: &[Vec<f64>], w: &[f64], c: College) -> f64 {
    w.iter().zip(u).map(|(wf, col)| wf * col[c]).sum()
}

/// Fraction of draws satisfying `event`, as an estimate with binomial error.
fn estimate<F>(report: &Report, mc: &McConfig, stream: u64, mut event: F) -> Result<Value, ProbError>
where
    F: FnMut(&[f64]) -> bool,
{
    if mc.samples == 0 {
        return Err(ProbError::ZeroSamples);
    }
    let nf = report.num_features();
    let sampler = WeightSampler::new(report.dist(), nf);
    let mut rng = substream(mc.seed, stream);
    let mut w = vec![0.0; nf];
    let mut hits = 0usize;
    for _ in 0..mc.samples {
        sampler.sample(&mut rng, &mut w);
        if event(&w) {
            hits += 1;
        }
    }
    let n = mc.samples as f64;
    let p = hits as f64 / n;
    Ok(Value::Estimate {
        value: p,
        std_err: (p * (1.0 - p) / n).sqrt(),
    })
}

/// `Pr[c_i ≻ c_j]` (strict) or `Pr[c_i ⪰ c_j]` (weak) for a single report.
/// `stream` selects the Monte Carlo substream when estimation is needed.
pub fn pr_prefers_report(
    report: &Report,
    ci: College,
    cj: College,
    strict: bool,
    mc: &McConfig,
    stream: u64,
) -> Result<Value, ProbError> {
    match report.dist() {
        WeightDistribution::Discrete(points) => {
            let hs = HalfSpace::new(report, ci, cj, strict);
            Ok(Value::Exact(
                points
                    .iter()
                    .filter(|p| hs.contains(&p.weights))
                    .map(|p| &p.prob)
                    .sum(),
            ))
        }
        _ if !strict => Ok(pr_prefers_report(report, cj, ci, true, mc, stream)?.complement()),
        dist if report.num_features() == 2 => {
            Ok(match pairwise_case_report(report, ci, cj) {
                PairwiseCase::AlwaysPreferred => Value::one(),
                PairwiseCase::NeverPreferred => Value::zero(),
                PairwiseCase::ThresholdAbove(eta) => cdf_w1(dist, &eta).complement(),
                // continuous: Pr[w1 < eta] = Pr[w1 <= eta]
                PairwiseCase::ThresholdBelow(eta) => cdf_w1(dist, &eta),
            })
        }
        _ => {
            if ci == cj {
                return Ok(if strict { Value::zero() } else { Value::one() });
            }
            let u = utilities_f64(report);
            // ties have measure zero for continuous distributions
            estimate(report, mc, stream, |w| {
                aggregate_table(&u, w, ci) > aggregate_table(&u, w, cj)
            })
        }
    }
}

pub fn pr_prefers(
    inst: &Instance,
    s: Student,
    ci: College,
    cj: College,
    strict: bool,
    mc: &McConfig,
) -> Result<Value, ProbError> {
    pr_prefers_report(inst.report(s), ci, cj, strict, mc, pair_stream(s, ci, cj))
}

/// Both orientations of a pair share one substream, so `strict(i, j)` and
/// `weak(j, i)` are exact complements even when estimated.
pub fn pair_stream(s: Student, ci: College, cj: College) -> u64 {
    stream_key(&[1, s as u64, ci.min(cj) as u64, ci.max(cj) as u64])
}

/// Probability that `c` weakly beats every other member of `pool` at once.
pub fn pr_top_report(
    report: &Report,
    c: College,
    pool: &[College],
    mc: &McConfig,
    stream: u64,
) -> Result<Value, ProbError> {
    if !pool.contains(&c) {
        return Err(ProbError::NotInPool(c));
    }
    let rivals: Vec<College> = pool.iter().copied().filter(|&x| x != c).collect();
    if rivals.is_empty() {
        return Ok(Value::one());
    }
    match report.dist() {
        WeightDistribution::Discrete(points) => Ok(Value::Exact(
            points
                .iter()
                .filter(|p| {
                    let mine = report.aggregate(&p.weights, c);
                    rivals
                        .iter()
                        .all(|&r| mine >= report.aggregate(&p.weights, r))
                })
                .map(|p| &p.prob)
                .sum(),
        )),
        dist if report.num_features() == 2 => {
            let iv = rivals
                .iter()
                .fold(BlockInterval::full(), |acc, &r| acc.intersect(&weak_interval(report, c, r)));
            Ok(measure(dist, &iv))
        }
        _ => {
            let u = utilities_f64(report);
            estimate(report, mc, stream, |w| {
                let mine = aggregate_table(&u, w, c);
                rivals.iter().all(|&r| mine >= aggregate_table(&u, w, r))
            })
        }
    }
}

pub fn pr_top(
    inst: &Instance,
    s: Student,
    c: College,
    pool: &[College],
    mc: &McConfig,
) -> Result<Value, ProbError> {
    let mut key = vec![2, s as u64, c as u64];
    key.extend(pool.iter().map(|&x| x as u64));
    pr_top_report(inst.report(s), c, pool, mc, stream_key(&key))
}

/// Mean weight vector of a distribution over `features` coordinates.
pub fn mean_vector(dist: &WeightDistribution, features: usize) -> Vec<Value> {
    match dist {
        WeightDistribution::UniformSimplex => {
            vec![Value::Exact(rational::frac(1, features as i64)); features]
        }
        WeightDistribution::Discrete(points) => (0..features)
            .map(|f| Value::Exact(points.iter().map(|p| &p.prob * &p.weights[f]).sum()))
            .collect(),
        WeightDistribution::BetaTwoFeature { alpha, beta } => {
            let m = alpha / (alpha + beta);
            vec![Value::Real(m), Value::Real(1.0 - m)]
        }
    }
}

/// `E[sum_f w^f u^f(c)]` for one report.
pub fn expected_utility_report(report: &Report, c: College) -> Value {
    let mean = mean_vector(report.dist(), report.num_features());
    let exact: Option<Vec<&Rational>> = mean.iter().map(Value::exact).collect();
    match exact {
        Some(ws) => Value::Exact(
            ws.iter()
                .enumerate()
                .map(|(f, w)| *w * report.utility(f, c))
                .sum(),
        ),
        None => {
            let w: Vec<f64> = mean.iter().map(Value::to_f64).collect();
            Value::Real(aggregate_f64(report, &w, c))
        }
    }
}

pub fn expected_utility(inst: &Instance, s: Student, c: College) -> Value {
    expected_utility_report(inst.report(s), c)
}

/// Mean weights and, for two features, the tail masses on either side of the mean.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanWeight {
    pub mean: Vec<Value>,
    /// `Pr[w1 <= E[w1]]`
    pub le_mean: Option<Value>,
    /// `Pr[w1 >= E[w1]]`
    pub ge_mean: Option<Value>,
}

impl MeanWeight {
    /// Mean equals median in the sense `Pr[w1 <= E] = Pr[w1 >= E]`, within `tol` on float paths.
    pub fn mean_is_median(&self, tol: f64) -> Option<bool> {
        let (le, ge) = (self.le_mean.as_ref()?, self.ge_mean.as_ref()?);
        Some(match (le, ge) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => (le.to_f64() - ge.to_f64()).abs() <= tol,
        })
    }
}

pub fn mean_weight_dist(dist: &WeightDistribution, features: usize) -> MeanWeight {
    let mean = mean_vector(dist, features);
    if features != 2 {
        return MeanWeight {
            mean,
            le_mean: None,
            ge_mean: None,
        };
    }
    let (le, ge) = match dist {
        WeightDistribution::Discrete(points) => {
            let m = mean[0].exact().expect("discrete mean is exact").clone();
            let le: Rational = points.iter().filter(|p| p.weights[0] <= m).map(|p| &p.prob).sum();
            let ge: Rational = points.iter().filter(|p| p.weights[0] >= m).map(|p| &p.prob).sum();
            (Value::Exact(le), Value::Exact(ge))
        }
        WeightDistribution::UniformSimplex => (
            Value::Exact(rational::half()),
            Value::Exact(rational::half()),
        ),
        WeightDistribution::BetaTwoFeature { alpha, beta } => {
            use statrs::distribution::{Beta, ContinuousCDF};
            let d = Beta::new(*alpha, *beta).expect("validated beta shape");
            let p = d.cdf(mean[0].to_f64());
            (Value::Real(p), Value::Real(1.0 - p))
        }
    };
    MeanWeight {
        mean,
        le_mean: Some(le),
        ge_mean: Some(ge),
    }
}

pub fn mean_weight(inst: &Instance, s: Student) -> MeanWeight {
    mean_weight_dist(inst.weight_dist(s), inst.num_features())
}

/// Full table of weak pairwise probabilities `weak[ci][cj] = Pr[ci ⪰ cj]`,
/// diagonal set to one.
pub fn weak_table(
    report: &Report,
    mc: &McConfig,
    student: Student,
) -> Result<Vec<Vec<Value>>, ProbError> {
    let m = report.num_colleges();
    (0..m)
        .map(|ci| {
            (0..m)
                .map(|cj| {
                    if ci == cj {
                        Ok(Value::one())
                    } else {
                        pr_prefers_report(report, ci, cj, false, mc, pair_stream(student, ci, cj))
                    }
                })
                .collect()
        })
        .collect()
}

/// `true` when every student's probabilities have an exact rational path.
pub fn has_exact_path(inst: &Instance) -> bool {
    inst.reports().iter().all(|r| match r.dist() {
        WeightDistribution::Discrete(_) => true,
        WeightDistribution::UniformSimplex => r.num_features() == 2,
        WeightDistribution::BetaTwoFeature { .. } => false,
    })
}

/// Like [`has_exact_path`] but also admitting the closed-form beta path.
pub fn has_closed_form(inst: &Instance) -> bool {
    inst.reports()
        .iter()
        .all(|r| r.dist().is_discrete() || r.num_features() == 2)
}
