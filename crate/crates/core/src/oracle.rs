//! Brute-force ground truth for desk-scale instances: exhaustive optimal
//! ProS, approximation ratios, incentive audits and transitivity checks.

use crate::gda::{GdaEngine, GdaError, Proposer, Strategy};
use crate::model::{College, Instance, Matching, Report, Student};
use crate::prob::{self, ExactProsTable, McConfig, ProbError, ProsResult, Value};
use crate::rational;
use std::cmp::Ordering;
use thiserror::Error;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("search space of {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("no exact ProS evaluator for this instance")]
    NoExactEvaluator,
    #[error(transparent)]
    Prob(ProbError),
    #[error(transparent)]
    Gda(#[from] GdaError),
}

impl From<ProbError> for OracleError {
    fn from(e: ProbError) -> Self {
        match e {
            ProbError::NoExactEvaluator => OracleError::NoExactEvaluator,
            other => OracleError::Prob(other),
        }
    }
}

fn check_budget(needed: u128, budget: u64) -> Result<(), OracleError> {
    if needed > budget as u128 {
        Err(OracleError::BudgetExceeded { needed, budget })
    } else {
        Ok(())
    }
}

/// Every capacity-feasible assignment, each exactly once. Students choose in
/// index order from (unmatched, c1, ..., cm); the last student varies fastest.
pub struct MatchingEnumerator<'a> {
    inst: &'a Instance,
    /// 0 = unmatched, k = college k-1
    choice: Vec<usize>,
    load: Vec<usize>,
    started: bool,
    done: bool,
}

impl<'a> MatchingEnumerator<'a> {
    pub fn new(inst: &'a Instance, budget: u64) -> Result<Self, OracleError> {
        let base = inst.num_colleges() as u128 + 1;
        let needed = (0..inst.num_students()).try_fold(1u128, |acc, _| acc.checked_mul(base));
        check_budget(needed.unwrap_or(u128::MAX), budget)?;
        Ok(MatchingEnumerator {
            inst,
            choice: vec![0; inst.num_students()],
            load: vec![0; inst.num_colleges()],
            started: false,
            done: false,
        })
    }

    fn advance(&mut self) -> bool {
        let m = self.inst.num_colleges();
        let mut i = self.choice.len();
        while i > 0 {
            i -= 1;
            if self.choice[i] > 0 {
                self.load[self.choice[i] - 1] -= 1;
            }
            let next = (self.choice[i] + 1..=m).find(|&k| self.load[k - 1] < self.inst.capacity(k - 1));
            match next {
                Some(k) => {
                    self.choice[i] = k;
                    self.load[k - 1] += 1;
                    // later students restart at unmatched, which always fits
                    return true;
                }
                None => self.choice[i] = 0,
            }
        }
        false
    }

    fn current(&self) -> Matching {
        Matching::new(self.choice.iter().map(|&k| k.checked_sub(1)).collect())
    }
}

impl Iterator for MatchingEnumerator<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.current());
        }
        if self.advance() {
            Some(self.current())
        } else {
            self.done = true;
            None
        }
    }
}

pub fn enumerate_matchings(inst: &Instance, budget: u64) -> Result<MatchingEnumerator<'_>, OracleError> {
    MatchingEnumerator::new(inst, budget)
}

fn cmp_pros(a: &ProsResult, b: &ProsResult) -> Ordering {
    match (a, b) {
        (ProsResult::Exact(x), ProsResult::Exact(y)) => x.cmp(y),
        _ => a.value().total_cmp(&b.value()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    pub best_matching: Matching,
    pub best_pros: ProsResult,
    pub matchings_examined: u64,
}

/// Exhaustive maximization of exact ProS; the first enumerated matching wins ties.
pub fn optimal_pros(inst: &Instance, budget: u64) -> Result<OptResult, OracleError> {
    let table = ExactProsTable::new(inst)?;
    optimal_with_table(inst, &table, budget)
}

pub fn optimal_with_table(
    inst: &Instance,
    table: &ExactProsTable,
    budget: u64,
) -> Result<OptResult, OracleError> {
    let mut best: Option<(Matching, ProsResult)> = None;
    let mut examined = 0u64;
    for m in enumerate_matchings(inst, budget)? {
        examined += 1;
        let p = table.pros_unchecked(inst, &m);
        let better = match &best {
            None => true,
            Some((_, b)) => cmp_pros(&p, b) == Ordering::Greater,
        };
        if better {
            best = Some((m, p));
        }
    }
    let (best_matching, best_pros) = best.expect("the empty matching is always enumerated");
    Ok(OptResult {
        best_matching,
        best_pros,
        matchings_examined: examined,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub strategy: Strategy,
    pub matching: Matching,
    pub algorithm_pros: ProsResult,
    pub optimal: OptResult,
    pub ratio: Value,
}

/// `ProS(GDA output) / max ProS`, with the conventions `0/x = 0` and `x/0 = 1`.
pub fn ratio_of(algorithm: &ProsResult, optimal: &ProsResult) -> Value {
    let (a, b) = (algorithm.to_value(), optimal.to_value());
    if b.is_zero() {
        return Value::one();
    }
    if a.is_zero() {
        return Value::zero();
    }
    a.div(&b).expect("denominator checked nonzero")
}

pub fn approx_ratio(
    inst: &Instance,
    strategy: Strategy,
    mc: &McConfig,
    budget: u64,
) -> Result<RatioReport, OracleError> {
    let table = ExactProsTable::new(inst)?;
    let optimal = optimal_with_table(inst, &table, budget)?;
    let (matching, _) = GdaEngine::new(inst, strategy, mc)?.run(inst);
    let algorithm_pros = table.pros_unchecked(inst, &matching);
    Ok(RatioReport {
        strategy,
        ratio: ratio_of(&algorithm_pros, &optimal.best_pros),
        matching,
        algorithm_pros,
        optimal,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IcLevel {
    /// A misreport must not yield a certainly better college.
    Certainty,
    /// A misreport must not yield a college better with probability above 1/2.
    Rationality,
}

impl IcLevel {
    pub fn name(self) -> &'static str {
        match self {
            IcLevel::Certainty => "IC-C",
            IcLevel::Rationality => "IC-R",
        }
    }

    fn violated_by(self, improvement: &Value) -> bool {
        match self {
            IcLevel::Certainty => improvement.is_one(),
            IcLevel::Rationality => improvement.gt_half(),
        }
    }
}

#[derive(Clone, Debug)]
pub enum MisreportSpace {
    /// Every strict order over colleges, as identical utility columns, plus the truthful report.
    DeterministicOrders,
    /// Caller-supplied `(student, report, label)` triples.
    Explicit(Vec<(Student, Report, String)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IcViolation {
    pub student: Student,
    pub misreport: String,
    pub truthful: Option<College>,
    pub obtained: Option<College>,
    pub probability: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IcAuditReport {
    pub level: IcLevel,
    pub strategy: Strategy,
    pub violations: Vec<IcViolation>,
    pub misreports_tried: u64,
}

impl IcAuditReport {
    pub fn summary(&self) -> String {
        if self.violations.is_empty() {
            format!(
                "{} audit of {}: no violation among {} misreports (evidence over a finite misreport space, not a proof)",
                self.level.name(),
                self.strategy,
                self.misreports_tried
            )
        } else {
            format!(
                "{} audit of {}: {} violation(s) among {} misreports",
                self.level.name(),
                self.strategy,
                self.violations.len(),
                self.misreports_tried
            )
        }
    }
}

fn permutations(m: usize) -> Vec<Vec<College>> {
    fn rec(prefix: &mut Vec<College>, used: &mut [bool], out: &mut Vec<Vec<College>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                prefix.push(c);
                rec(prefix, used, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

fn describe_order(inst: &Instance, order: &[College]) -> String {
    let names: Vec<&str> = order.iter().map(|&c| inst.college_id(c)).collect();
    format!("order {}", names.join(">"))
}

/// `Pr[obtained ≻ truthful]` under the student's true report.
pub fn improvement_probability(
    inst: &Instance,
    s: Student,
    truthful: Option<College>,
    obtained: Option<College>,
    mc: &McConfig,
) -> Result<Value, ProbError> {
    Ok(match (truthful, obtained) {
        (_, None) => Value::zero(),
        (None, Some(_)) => Value::one(),
        (Some(a), Some(b)) if a == b => Value::zero(),
        (Some(a), Some(b)) => prob::pr_prefers(inst, s, b, a, true, mc)?,
    })
}

pub fn audit_ic(
    inst: &Instance,
    strategy: Strategy,
    level: IcLevel,
    space: &MisreportSpace,
    mc: &McConfig,
    budget: u64,
) -> Result<IcAuditReport, OracleError> {
    let m = inst.num_colleges();
    let misreports: Vec<(Student, Report, String)> = match space {
        MisreportSpace::Explicit(list) => list.clone(),
        MisreportSpace::DeterministicOrders => {
            let per_student = (1..=m as u128).product::<u128>() + 1;
            check_budget(per_student * inst.num_students() as u128, budget)?;
            let orders = permutations(m);
            let mut list = Vec::new();
            for s in inst.students() {
                list.push((s, inst.report(s).clone(), "truthful".to_string()));
                for order in &orders {
                    let r = Report::deterministic_order(
                        order,
                        inst.num_features(),
                        inst.weight_dist(s).clone(),
                    );
                    list.push((s, r, describe_order(inst, order)));
                }
            }
            list
        }
    };
    let mut engine = GdaEngine::new(inst, strategy, mc)?;
    let (truthful, _) = engine.run(inst);
    let mut violations = Vec::new();
    for (s, report, label) in &misreports {
        let s = *s;
        let proposer = Proposer::new(report, s, strategy, mc)?;
        let original = engine.replace(s, proposer);
        let (outcome, _) = engine.run(inst);
        engine.replace(s, original);
        let (before, after) = (truthful.college_of(s), outcome.college_of(s));
        let p = improvement_probability(inst, s, before, after, mc)?;
        if level.violated_by(&p) {
            violations.push(IcViolation {
                student: s,
                misreport: label.clone(),
                truthful: before,
                obtained: after,
                probability: p,
            });
        }
    }
    Ok(IcAuditReport {
        level,
        strategy,
        violations,
        misreports_tried: misreports.len() as u64,
    })
}

/// First triple with `Pr[ci ⪰ cj] >= 1/2`, `Pr[cj ⪰ ck] >= 1/2` and `Pr[ci ⪰ ck] < 1/2`.
pub fn check_transitivity(
    inst: &Instance,
    s: Student,
    mc: &McConfig,
) -> Result<Option<(College, College, College)>, ProbError> {
    let m = inst.num_colleges();
    if m < 3 {
        return Ok(None);
    }
    let weak = prob::weak_table(inst.report(s), mc, s)?;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                if i == j || j == k || i == k {
                    continue;
                }
                if weak[i][j].ge_half() && weak[j][k].ge_half() && !weak[i][k].ge_half() {
                    return Ok(Some((i, j, k)));
                }
            }
        }
    }
    Ok(None)
}

/// Exact `(1/n)^n`.
pub fn herf_bound(n: usize) -> rational::Rational {
    rational::pow(&rational::frac(1, n as i64), n as u32)
}
