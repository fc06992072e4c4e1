//! Probability of stability of a fixed matching.
//!
//! Students' weight vectors are independent, so ProS factors into one term per
//! student: the probability that no college open to that student is strictly
//! preferred to the one she holds.

use super::{
    measure, pr_prefers_report, pair_stream, stream_key, substream, utilities_f64,
    weak_interval, BlockInterval, McConfig, PairwiseCase, ProbError, Value, WeightSampler,
};
use crate::model::{
    validate_matching, College, Feasibility, Instance, Matching, Report, Student,
    WeightDistribution,
};
use crate::rational::{self, Rational};
use std::fmt;

/// A ProS value and the path that produced it.
#[derive(Clone, Debug, PartialEq)]
pub enum ProsResult {
    Exact(Rational),
    /// Evaluated in floating point from a closed form (beta CDF).
    ClosedForm(f64),
    Estimate {
        value: f64,
        std_err: f64,
        samples: usize,
        seed: u64,
    },
}

impl ProsResult {
    pub fn value(&self) -> f64 {
        match self {
            ProsResult::Exact(r) => rational::to_f64(r),
            ProsResult::ClosedForm(x) => *x,
            ProsResult::Estimate { value, .. } => *value,
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            ProsResult::Exact(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ProsResult::Exact(_))
    }

    pub fn std_err(&self) -> f64 {
        match self {
            ProsResult::Estimate { std_err, .. } => *std_err,
            _ => 0.0,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ProsResult::Exact(_) => "exact",
            ProsResult::ClosedForm(_) => "closed_form",
            ProsResult::Estimate { .. } => "estimate",
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            ProsResult::Exact(r) => Value::Exact(r.clone()),
            ProsResult::ClosedForm(x) => Value::Real(*x),
            ProsResult::Estimate { value, std_err, .. } => Value::Estimate {
                value: *value,
                std_err: *std_err,
            },
        }
    }

    fn from_value(v: Value) -> ProsResult {
        match v {
            Value::Exact(r) => ProsResult::Exact(r),
            other => ProsResult::ClosedForm(other.to_f64()),
        }
    }
}

impl fmt::Display for ProsResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProsResult::Exact(r) => f.write_str(&rational::format(r)),
            ProsResult::ClosedForm(x) => f.write_str(&super::format_sig(*x, 12)),
            ProsResult::Estimate {
                value,
                std_err,
                samples,
                seed,
            } => write!(
                f,
                "{} ± {} ({samples} samples, seed {seed})",
                super::format_sig(*value, 6),
                super::format_sig(*std_err, 2)
            ),
        }
    }
}

fn check_feasible(inst: &Instance, m: &Matching) -> Result<(), ProbError> {
    match validate_matching(inst, m)? {
        Feasibility::Feasible => Ok(()),
        Feasibility::OverCapacity {
            college,
            assigned,
            capacity,
        } => Err(ProbError::Infeasible {
            college: inst.college_id(college).to_string(),
            assigned,
            capacity,
        }),
    }
}

/// Colleges other than `s`'s own with a free seat or an enrollee ranked below `s`.
pub(crate) fn open_colleges(
    inst: &Instance,
    m: &Matching,
    enrolled: &[Vec<Student>],
    s: Student,
) -> Vec<College> {
    inst.colleges()
        .filter(|&c| m.college_of(s) != Some(c))
        .filter(|&c| {
            enrolled[c].len() < inst.capacity(c)
                || enrolled[c].iter().any(|&t| inst.college_prefers(c, s, t))
        })
        .collect()
}

/// How college `c` can block a student holding `c0`.
#[derive(Clone, Debug)]
enum Threat {
    /// `Pr[c ≻ c0] = 0`: not in the potential set.
    None,
    Always,
    /// Two-feature continuous: no block iff `w1` lies in this closed interval.
    Interval(BlockInterval),
    /// Finite support: `beats[k]` iff `c ≻ c0` at support point `k`.
    Points(Vec<bool>),
}

/// Per-student, per-held-college threat table; makes repeated ProS queries
/// on one instance cheap.
#[derive(Clone, Debug)]
pub struct ExactProsTable {
    /// `threats[s][c0][c]`
    threats: Vec<Vec<Vec<Threat>>>,
    dists: Vec<WeightDistribution>,
}

impl ExactProsTable {
    pub fn new(inst: &Instance) -> Result<Self, ProbError> {
        let mut threats = Vec::with_capacity(inst.num_students());
        for s in inst.students() {
            threats.push(student_threats(inst.report(s))?);
        }
        Ok(ExactProsTable {
            threats,
            dists: inst.reports().iter().map(|r| r.dist().clone()).collect(),
        })
    }

    /// Replaces student `s`'s row, e.g. after a misreport.
    pub fn set_report(&mut self, s: Student, report: &Report) -> Result<(), ProbError> {
        self.threats[s] = student_threats(report)?;
        self.dists[s] = report.dist().clone();
        Ok(())
    }

    /// Probability that `s` has no strict block given the open colleges.
    pub fn student_factor(&self, s: Student, held: Option<College>, open: &[College]) -> Value {
        let Some(c0) = held else {
            return if open.is_empty() {
                Value::one()
            } else {
                Value::zero()
            };
        };
        let row = &self.threats[s][c0];
        match &self.dists[s] {
            WeightDistribution::Discrete(points) => {
                let mut safe = rational::zero();
                for (k, p) in points.iter().enumerate() {
                    let blocked = open.iter().any(|&c| match &row[c] {
                        Threat::Points(beats) => beats[k],
                        Threat::Always => true,
                        _ => false,
                    });
                    if !blocked {
                        safe += &p.prob;
                    }
                }
                Value::Exact(safe)
            }
            dist => {
                let mut iv = BlockInterval::full();
                for &c in open {
                    match &row[c] {
                        Threat::None => {}
                        Threat::Always => return Value::zero(),
                        Threat::Interval(x) => iv = iv.intersect(x),
                        Threat::Points(_) => unreachable!("point threats only for discrete"),
                    }
                }
                measure(dist, &iv)
            }
        }
    }

    pub fn pros(&self, inst: &Instance, m: &Matching) -> Result<ProsResult, ProbError> {
        check_feasible(inst, m)?;
        Ok(self.pros_unchecked(inst, m))
    }

    /// ProS for a matching already known to be feasible.
    pub fn pros_unchecked(&self, inst: &Instance, m: &Matching) -> ProsResult {
        let enrolled = m.enrollees(inst.num_colleges());
        let mut total = Value::one();
        for s in inst.students() {
            let open = open_colleges(inst, m, &enrolled, s);
            let f = self.student_factor(s, m.college_of(s), &open);
            if f.is_zero() {
                return ProsResult::Exact(rational::zero());
            }
            total = total.mul(&f);
        }
        ProsResult::from_value(total)
    }
}

fn student_threats(report: &Report) -> Result<Vec<Vec<Threat>>, ProbError> {
    let m = report.num_colleges();
    let mut rows = Vec::with_capacity(m);
    match report.dist() {
        WeightDistribution::Discrete(points) => {
            for c0 in 0..m {
                let row = (0..m)
                    .map(|c| {
                        if c == c0 {
                            return Threat::None;
                        }
                        let beats: Vec<bool> = points
                            .iter()
                            .map(|p| report.aggregate(&p.weights, c) > report.aggregate(&p.weights, c0))
                            .collect();
                        if beats.iter().any(|&b| b) {
                            Threat::Points(beats)
                        } else {
                            Threat::None
                        }
                    })
                    .collect();
                rows.push(row);
            }
        }
        _ if report.num_features() == 2 => {
            let mc = McConfig::default();
            for c0 in 0..m {
                let mut row = Vec::with_capacity(m);
                for c in 0..m {
                    if c == c0 {
                        row.push(Threat::None);
                        continue;
                    }
                    // exact or closed-form path; no sampling happens here
                    let p = pr_prefers_report(report, c, c0, true, &mc, 0)?;
                    row.push(if !p.is_positive() {
                        Threat::None
                    } else if super::pairwise_case_report(report, c, c0)
                        == PairwiseCase::AlwaysPreferred
                    {
                        Threat::Always
                    } else {
                        Threat::Interval(weak_interval(report, c0, c))
                    });
                }
                rows.push(row);
            }
        }
        _ => return Err(ProbError::NoExactEvaluator),
    }
    Ok(rows)
}

/// Exact ProS for two features: rational for uniform or finite-support
/// students, closed form when a beta student is present.
pub fn pros_exact_2f(inst: &Instance, m: &Matching) -> Result<ProsResult, ProbError> {
    if inst.num_features() != 2 {
        return Err(ProbError::FeatureCount(inst.num_features()));
    }
    ExactProsTable::new(inst)?.pros(inst, m)
}

/// Exact ProS whenever a non-sampling path exists (two features, or every
/// student finite-support).
pub fn pros_exact(inst: &Instance, m: &Matching) -> Result<ProsResult, ProbError> {
    ExactProsTable::new(inst)?.pros(inst, m)
}

/// Exact ProS when available, otherwise a seeded estimate. The result's kind
/// records which path ran.
pub fn pros_auto(inst: &Instance, m: &Matching, mc: &McConfig) -> Result<ProsResult, ProbError> {
    match pros_exact(inst, m) {
        Err(ProbError::NoExactEvaluator) => pros_monte_carlo(inst, m, mc.samples, mc.seed),
        other => other,
    }
}

/// Seeded estimate of ProS. Each student draws `samples` weights from her own
/// substream; the per-student no-block frequencies are multiplied and the
/// standard error follows from the delta method.
pub fn pros_monte_carlo(
    inst: &Instance,
    m: &Matching,
    samples: usize,
    seed: u64,
) -> Result<ProsResult, ProbError> {
    if samples == 0 {
        return Err(ProbError::ZeroSamples);
    }
    check_feasible(inst, m)?;
    let enrolled = m.enrollees(inst.num_colleges());
    let n = samples as f64;
    let mut freqs = Vec::with_capacity(inst.num_students());
    for s in inst.students() {
        let open = open_colleges(inst, m, &enrolled, s);
        let p = match m.college_of(s) {
            None => {
                if open.is_empty() {
                    1.0
                } else {
                    0.0
                }
            }
            Some(_) if open.is_empty() => 1.0,
            Some(c0) => student_frequency(inst.report(s), c0, &open, samples, seed, s),
        };
        freqs.push(p);
    }
    let value: f64 = freqs.iter().product();
    // gradient of the product times the binomial variance of each factor
    let mut var = 0.0;
    for (s, &p) in freqs.iter().enumerate() {
        let others: f64 = freqs
            .iter()
            .enumerate()
            .filter(|&(t, _)| t != s)
            .map(|(_, &q)| q)
            .product();
        var += others * others * p * (1.0 - p) / n;
    }
    Ok(ProsResult::Estimate {
        value,
        std_err: var.sqrt(),
        samples,
        seed,
    })
}

fn student_frequency(
    report: &Report,
    c0: College,
    open: &[College],
    samples: usize,
    seed: u64,
    s: Student,
) -> f64 {
    let nf = report.num_features();
    let sampler = WeightSampler::new(report.dist(), nf);
    let mut rng = substream(seed, stream_key(&[3, s as u64]));
    let mut w = vec![0.0; nf];
    let mut safe = 0usize;
    match report.dist() {
        WeightDistribution::Discrete(points) => {
            let blocked: Vec<bool> = points
                .iter()
                .map(|p| {
                    let held = report.aggregate(&p.weights, c0);
                    open.iter().any(|&c| report.aggregate(&p.weights, c) > held)
                })
                .collect();
            for _ in 0..samples {
                let k = sampler.sample(&mut rng, &mut w).expect("discrete sampler yields an index");
                if !blocked[k] {
                    safe += 1;
                }
            }
        }
        _ => {
            let u = utilities_f64(report);
            let agg = |w: &[f64], c: College| -> f64 { w.iter().zip(&u).map(|(a, col)| a * col[c]).sum() };
            for _ in 0..samples {
                sampler.sample(&mut rng, &mut w);
                let held = agg(&w, c0);
                if !open.iter().any(|&c| agg(&w, c) > held) {
                    safe += 1;
                }
            }
        }
    }
    safe as f64 / samples as f64
}

/// Potential blocks of one student under a matching.
#[derive(Clone, Debug)]
pub struct StudentBreakdown {
    pub student: Student,
    pub held: Option<College>,
    /// Colleges open to the student with `Pr[c ≻ held] > 0`, with that probability.
    pub potential: Vec<(College, Value)>,
    /// Probability the student has no block; `None` when no exact path exists.
    pub no_block: Option<Value>,
}

pub fn stability_breakdown(
    inst: &Instance,
    m: &Matching,
    mc: &McConfig,
) -> Result<Vec<StudentBreakdown>, ProbError> {
    check_feasible(inst, m)?;
    let table = ExactProsTable::new(inst).ok();
    let enrolled = m.enrollees(inst.num_colleges());
    let mut out = Vec::with_capacity(inst.num_students());
    for s in inst.students() {
        let open = open_colleges(inst, m, &enrolled, s);
        let held = m.college_of(s);
        let mut potential = Vec::new();
        for &c in &open {
            let p = match held {
                None => Value::one(),
                Some(c0) => pr_prefers_report(inst.report(s), c, c0, true, mc, pair_stream(s, c, c0))?,
            };
            if p.is_positive() {
                potential.push((c, p));
            }
        }
        out.push(StudentBreakdown {
            student: s,
            held,
            potential,
            no_block: table.as_ref().map(|t| t.student_factor(s, held, &open)),
        });
    }
    Ok(out)
}
