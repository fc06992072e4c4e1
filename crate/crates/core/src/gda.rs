//! Generalized student-proposing deferred acceptance.
//!
//! Each round every unmatched student who still has a college left proposes
//! to the one picked by her strategy; each college keeps its best `x_c` among
//! held students and new proposers and rejects the rest. Rejections are
//! permanent: a student never proposes to the same college twice.

use crate::model::{College, Instance, Matching, Report, Student};
use crate::prob::{
    self, expected_utility_report, pr_top_report, stream_key, McConfig, ProbError, Value,
};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GdaError {
    #[error("student {0} has been rejected by every college")]
    AllRejected(Student),
    #[error("college {0} is not in the pool")]
    NotInPool(College),
    #[error(transparent)]
    Prob(#[from] ProbError),
}

/// Proposing strategy plugged into `Next()`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Highest expected utility first.
    Heuf,
    /// Lexicographic order of comparison vectors, computed once over all colleges.
    Locv,
    /// Comparison vectors recomputed over the colleges that have not rejected.
    Loicv,
    /// Highest probability of ranking first among the remaining colleges.
    Herf,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Heuf, Strategy::Locv, Strategy::Loicv, Strategy::Herf];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Heuf => "heuf",
            Strategy::Locv => "locv",
            Strategy::Loicv => "loicv",
            Strategy::Herf => "herf",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "heuf" => Ok(Strategy::Heuf),
            "locv" => Ok(Strategy::Locv),
            "loicv" => Ok(Strategy::Loicv),
            "herf" => Ok(Strategy::Herf),
            other => Err(format!("unknown strategy {other:?} (expected heuf, locv, loicv or herf)")),
        }
    }
}

/// Weak pairwise win probabilities of one college against a pool, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonVector {
    probs: Vec<Value>,
}

impl ComparisonVector {
    pub fn new(mut probs: Vec<Value>) -> Self {
        probs.sort_by(|a, b| a.cmp_value(b));
        ComparisonVector { probs }
    }

    pub fn probs(&self) -> &[Value] {
        &self.probs
    }

    /// Lexicographic comparison, exact on rational entries.
    pub fn lex_cmp(&self, other: &ComparisonVector) -> Ordering {
        for (a, b) in self.probs.iter().zip(&other.probs) {
            match a.cmp_value(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.probs.len().cmp(&other.probs.len())
    }
}

fn vector_from_table(weak: &[Vec<Value>], c: College, pool: &[College]) -> ComparisonVector {
    ComparisonVector::new(
        pool.iter()
            .filter(|&&x| x != c)
            .map(|&x| weak[c][x].clone())
            .collect(),
    )
}

pub fn comparison_vector(
    inst: &Instance,
    s: Student,
    c: College,
    pool: &[College],
    mc: &McConfig,
) -> Result<ComparisonVector, GdaError> {
    if !pool.contains(&c) {
        return Err(GdaError::NotInPool(c));
    }
    let probs = pool
        .iter()
        .filter(|&&x| x != c)
        .map(|&x| prob::pr_prefers(inst, s, c, x, false, mc))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ComparisonVector::new(probs))
}

/// First maximum by `cmp`, so ties go to the lowest college index.
fn argmax_by<T>(items: Vec<(College, T)>, cmp: impl Fn(&T, &T) -> Ordering) -> Option<College> {
    let mut best: Option<(College, T)> = None;
    for (c, v) in items {
        match &best {
            Some((_, b)) if cmp(&v, b) != Ordering::Greater => {}
            _ => best = Some((c, v)),
        }
    }
    best.map(|(c, _)| c)
}

/// A student's `Next()` with whatever can be precomputed already in place.
#[derive(Clone, Debug)]
pub struct Proposer {
    kind: ProposerKind,
}

#[derive(Clone, Debug)]
enum ProposerKind {
    /// HEUF and LOCV: a fixed order; the next proposal is the first college not yet rejected.
    Fixed(Vec<College>),
    /// LOICV: weak pairwise table, vectors rebuilt over the remaining pool.
    Iterated(Vec<Vec<Value>>),
    /// HERF: top-rank probabilities per remaining pool, memoized.
    TopRank {
        report: Box<Report>,
        student: Student,
        mc: McConfig,
        cache: HashMap<Vec<bool>, College>,
    },
}

impl Proposer {
    pub fn new(
        report: &Report,
        student: Student,
        strategy: Strategy,
        mc: &McConfig,
    ) -> Result<Proposer, ProbError> {
        let m = report.num_colleges();
        let all: Vec<College> = (0..m).collect();
        let kind = match strategy {
            Strategy::Heuf => {
                let eu: Vec<Value> = all.iter().map(|&c| expected_utility_report(report, c)).collect();
                let mut order = all;
                order.sort_by(|&a, &b| eu[b].cmp_value(&eu[a]).then(a.cmp(&b)));
                ProposerKind::Fixed(order)
            }
            Strategy::Locv => {
                let weak = prob::weak_table(report, mc, student)?;
                let vectors: Vec<ComparisonVector> =
                    all.iter().map(|&c| vector_from_table(&weak, c, &all)).collect();
                let mut order = all;
                order.sort_by(|&a, &b| vectors[b].lex_cmp(&vectors[a]).then(a.cmp(&b)));
                ProposerKind::Fixed(order)
            }
            Strategy::Loicv => ProposerKind::Iterated(prob::weak_table(report, mc, student)?),
            Strategy::Herf => {
                if mc.samples == 0 && !report.dist().is_discrete() && report.num_features() != 2 {
                    return Err(ProbError::ZeroSamples);
                }
                ProposerKind::TopRank {
                    report: Box::new(report.clone()),
                    student,
                    mc: *mc,
                    cache: HashMap::new(),
                }
            }
        };
        Ok(Proposer { kind })
    }

    /// The college to propose to given the rejection flags, or `None` when
    /// every college has rejected.
    pub fn next(&mut self, rejected: &[bool]) -> Option<College> {
        let pool: Vec<College> = (0..rejected.len()).filter(|&c| !rejected[c]).collect();
        if pool.is_empty() {
            return None;
        }
        match &mut self.kind {
            ProposerKind::Fixed(order) => order.iter().copied().find(|&c| !rejected[c]),
            ProposerKind::Iterated(weak) => argmax_by(
                pool.iter().map(|&c| (c, vector_from_table(weak, c, &pool))).collect(),
                |a, b| a.lex_cmp(b),
            ),
            ProposerKind::TopRank {
                report,
                student,
                mc,
                cache,
            } => {
                if let Some(&c) = cache.get(rejected) {
                    return Some(c);
                }
                let scores: Vec<(College, Value)> = pool
                    .iter()
                    .map(|&c| {
                        let mut key = vec![2, *student as u64, c as u64];
                        key.extend(pool.iter().map(|&x| x as u64));
                        let v = pr_top_report(report, c, &pool, mc, stream_key(&key))
                            .expect("pool is nonempty and samples checked at construction");
                        (c, v)
                    })
                    .collect();
                let c = argmax_by(scores, |a, b| a.cmp_value(b))?;
                cache.insert(rejected.to_vec(), c);
                Some(c)
            }
        }
    }
}

/// `Next()` for student `s` given the set of colleges that rejected her.
pub fn next(
    inst: &Instance,
    strategy: Strategy,
    s: Student,
    rejected: &[College],
    mc: &McConfig,
) -> Result<College, GdaError> {
    let mut flags = vec![false; inst.num_colleges()];
    for &c in rejected {
        flags[c] = true;
    }
    let mut p = Proposer::new(inst.report(s), s, strategy, mc)?;
    p.next(&flags).ok_or(GdaError::AllRejected(s))
}

/// One round of proposals and the rejections they caused.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Round {
    /// `(student, college)` in student order.
    pub proposals: Vec<(Student, College)>,
    /// `(college, student)` in college order, then by the college's ranking.
    pub rejections: Vec<(College, Student)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GdaTrace {
    pub rounds: Vec<Round>,
    pub final_matching: Matching,
}

impl GdaTrace {
    pub fn render(&self, inst: &Instance) -> String {
        let mut out = String::new();
        for (t, round) in self.rounds.iter().enumerate() {
            let props: Vec<String> = round
                .proposals
                .iter()
                .map(|&(s, c)| format!("{}->{}", inst.student_id(s), inst.college_id(c)))
                .collect();
            let rejs: Vec<String> = round
                .rejections
                .iter()
                .map(|&(c, s)| format!("{} rejects {}", inst.college_id(c), inst.student_id(s)))
                .collect();
            out.push_str(&format!("round {}: {}", t + 1, props.join(", ")));
            if !rejs.is_empty() {
                out.push_str(&format!("; {}", rejs.join(", ")));
            }
            out.push('\n');
        }
        out
    }
}

/// GDA with prebuilt proposers; one student's proposer can be swapped for
/// audits without recomputing the others.
#[derive(Clone, Debug)]
pub struct GdaEngine {
    proposers: Vec<Proposer>,
}

impl GdaEngine {
    pub fn new(inst: &Instance, strategy: Strategy, mc: &McConfig) -> Result<Self, GdaError> {
        let proposers = inst
            .students()
            .map(|s| Proposer::new(inst.report(s), s, strategy, mc))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GdaEngine { proposers })
    }

    /// Installs `p` for student `s`, returning the previous proposer.
    pub fn replace(&mut self, s: Student, p: Proposer) -> Proposer {
        std::mem::replace(&mut self.proposers[s], p)
    }

    pub fn run(&mut self, inst: &Instance) -> (Matching, GdaTrace) {
        let (n, m) = (inst.num_students(), inst.num_colleges());
        let mut rejected = vec![vec![false; m]; n];
        let mut assigned: Vec<Option<College>> = vec![None; n];
        let mut held: Vec<Vec<Student>> = vec![Vec::new(); m];
        let mut rounds = Vec::new();
        loop {
            let mut proposals = Vec::new();
            for s in 0..n {
                if assigned[s].is_none() {
                    if let Some(c) = self.proposers[s].next(&rejected[s]) {
                        proposals.push((s, c));
                    }
                }
            }
            if proposals.is_empty() {
                break;
            }
            let mut rejections = Vec::new();
            let mut incoming: Vec<Vec<Student>> = vec![Vec::new(); m];
            for &(s, c) in &proposals {
                incoming[c].push(s);
            }
            for c in 0..m {
                if incoming[c].is_empty() {
                    continue;
                }
                let mut pool = std::mem::take(&mut held[c]);
                pool.extend(&incoming[c]);
                pool.sort_by_key(|&s| inst.rank(c, s));
                let keep = inst.capacity(c).min(pool.len());
                for &s in &pool[keep..] {
                    rejected[s][c] = true;
                    assigned[s] = None;
                    rejections.push((c, s));
                }
                pool.truncate(keep);
                for &s in &pool {
                    assigned[s] = Some(c);
                }
                held[c] = pool;
            }
            rounds.push(Round {
                proposals,
                rejections,
            });
        }
        let matching = Matching::new(assigned);
        (
            matching.clone(),
            GdaTrace {
                rounds,
                final_matching: matching,
            },
        )
    }
}

pub fn run_gda(
    inst: &Instance,
    strategy: Strategy,
    mc: &McConfig,
) -> Result<(Matching, GdaTrace), GdaError> {
    Ok(GdaEngine::new(inst, strategy, mc)?.run(inst))
}
