//! Instances, weight distributions, matchings and their JSON encoding.
//!
//! Students and colleges are dense indices (`0..n`, `0..m`); the external
//! string ids are kept only for I/O. Everything exposed from here has been
//! validated, so downstream modules never re-check the invariants.

use crate::rational::{self, Rational};
use indexmap::IndexMap;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

pub type Student = usize;
pub type College = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("bad rational {value:?}: {reason}")]
    BadRational { value: String, reason: String },
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("unknown student {0:?}")]
    UnknownStudent(String),
    #[error("unknown college {0:?}")]
    UnknownCollege(String),
    #[error("unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("instance needs at least one student, one college and one feature")]
    Empty,
    #[error("capacity must be positive (college {college})")]
    CapacityNotPositive { college: String },
    #[error("missing capacity for college {0}")]
    MissingCapacity(String),
    #[error("incomplete college preference for {college}: must rank every student exactly once")]
    IncompletePreference { college: String },
    #[error("missing utility for student {student}, feature {feature}, college {college}")]
    MissingUtility {
        student: String,
        feature: String,
        college: String,
    },
    #[error("utility out of [0,1] for student {student}, feature {feature}, college {college}: {value}")]
    UtilityOutOfRange {
        student: String,
        feature: String,
        college: String,
        value: String,
    },
    #[error("missing weight distribution for student {0}")]
    MissingDistribution(String),
    #[error("distribution dimension mismatch for student {student}: expected {expected}, found {found}")]
    DimensionMismatch {
        student: String,
        expected: usize,
        found: usize,
    },
    #[error("probabilities must sum to 1 (student {student}, sum {sum})")]
    ProbabilitiesNotOne { student: String, sum: String },
    #[error("support probabilities must be positive (student {student})")]
    NonPositiveProbability { student: String },
    #[error("support weight vector not on the simplex (student {student})")]
    WeightOffSimplex { student: String },
    #[error("beta2 distribution requires exactly two features (student {student})")]
    BetaNeedsTwoFeatures { student: String },
    #[error("beta2 shape parameters must be finite and positive (student {student})")]
    BadBetaShape { student: String },
    #[error("matching has {found} entries for {expected} students")]
    MatchingLength { expected: usize, found: usize },
    #[error("college index {0} out of range")]
    CollegeOutOfRange(usize),
}

/// One point of a finite-support weight distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct SupportPoint {
    pub weights: Vec<Rational>,
    pub prob: Rational,
}

/// A student's randomness over the feature-weight simplex.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightDistribution {
    /// Flat density on `{w >= 0, sum w = 1}`.
    UniformSimplex,
    Discrete(Vec<SupportPoint>),
    /// `w1 ~ Beta(alpha, beta)`, `w2 = 1 - w1`. Two features only.
    BetaTwoFeature { alpha: f64, beta: f64 },
}

impl WeightDistribution {
    pub fn point_mass(weights: Vec<Rational>) -> Self {
        WeightDistribution::Discrete(vec![SupportPoint {
            weights,
            prob: rational::one(),
        }])
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self, WeightDistribution::Discrete(_))
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, WeightDistribution::Discrete(_))
    }

    fn validate(&self, student: &str, features: usize) -> Result<(), ModelError> {
        match self {
            WeightDistribution::UniformSimplex => Ok(()),
            WeightDistribution::BetaTwoFeature { alpha, beta } => {
                if features != 2 {
                    return Err(ModelError::BetaNeedsTwoFeatures {
                        student: student.into(),
                    });
                }
                if !(alpha.is_finite() && beta.is_finite() && *alpha > 0.0 && *beta > 0.0) {
                    return Err(ModelError::BadBetaShape {
                        student: student.into(),
                    });
                }
                Ok(())
            }
            WeightDistribution::Discrete(points) => {
                if points.is_empty() {
                    return Err(ModelError::ProbabilitiesNotOne {
                        student: student.into(),
                        sum: "0".into(),
                    });
                }
                let mut total = rational::zero();
                for p in points {
                    if p.weights.len() != features {
                        return Err(ModelError::DimensionMismatch {
                            student: student.into(),
                            expected: features,
                            found: p.weights.len(),
                        });
                    }
                    if !p.prob.is_positive() {
                        return Err(ModelError::NonPositiveProbability {
                            student: student.into(),
                        });
                    }
                    let sum: Rational = p.weights.iter().sum();
                    if p.weights.iter().any(|w| w.is_negative()) || !sum.is_one() {
                        return Err(ModelError::WeightOffSimplex {
                            student: student.into(),
                        });
                    }
                    total += &p.prob;
                }
                if !total.is_one() {
                    return Err(ModelError::ProbabilitiesNotOne {
                        student: student.into(),
                        sum: rational::format(&total),
                    });
                }
                Ok(())
            }
        }
    }
}

/// What a student submits: per-feature utilities over colleges plus a weight distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    /// `utilities[f][c]`
    utilities: Vec<Vec<Rational>>,
    dist: WeightDistribution,
}

impl Report {
    /// Unvalidated constructor; `Instance` validates on construction.
    pub fn new(utilities: Vec<Vec<Rational>>, dist: WeightDistribution) -> Self {
        Report { utilities, dist }
    }

    /// A report that encodes the strict order `order` (best first) with identical
    /// columns across features, valued `(m - rank + 1) / m`.
    pub fn deterministic_order(order: &[College], features: usize, dist: WeightDistribution) -> Self {
        let m = order.len() as i64;
        let mut column = vec![rational::zero(); order.len()];
        for (rank, &c) in order.iter().enumerate() {
            column[c] = rational::frac(m - rank as i64, m);
        }
        Report {
            utilities: vec![column; features],
            dist,
        }
    }

    pub fn utility(&self, feature: usize, college: College) -> &Rational {
        &self.utilities[feature][college]
    }

    pub fn utilities(&self) -> &[Vec<Rational>] {
        &self.utilities
    }

    pub fn dist(&self) -> &WeightDistribution {
        &self.dist
    }

    pub fn num_features(&self) -> usize {
        self.utilities.len()
    }

    pub fn num_colleges(&self) -> usize {
        self.utilities.first().map_or(0, Vec::len)
    }

    /// Aggregated utility of `college` under the weight vector `w`.
    pub fn aggregate(&self, w: &[Rational], college: College) -> Rational {
        w.iter()
            .zip(&self.utilities)
            .map(|(wf, col)| wf * &col[college])
            .sum()
    }

    pub fn with_dist(&self, dist: WeightDistribution) -> Report {
        Report {
            utilities: self.utilities.clone(),
            dist,
        }
    }
}

/// A validated school-choice instance with feature-based uncertain preferences.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    students: Vec<String>,
    colleges: Vec<String>,
    features: Vec<String>,
    capacities: Vec<usize>,
    /// Best first.
    college_prefs: Vec<Vec<Student>>,
    /// `college_rank[c][s]`, 0 = most preferred.
    college_rank: Vec<Vec<usize>>,
    reports: Vec<Report>,
}

/// Raw parts of an instance, validated by [`Instance::new`].
#[derive(Clone, Debug)]
pub struct InstanceParts {
    pub students: Vec<String>,
    pub colleges: Vec<String>,
    pub features: Vec<String>,
    pub capacities: Vec<usize>,
    pub college_prefs: Vec<Vec<Student>>,
    pub reports: Vec<Report>,
}

impl InstanceParts {
    /// Parts with default ids `s1..`, `c1..`, `f1..`.
    pub fn with_default_ids(
        capacities: Vec<usize>,
        college_prefs: Vec<Vec<Student>>,
        reports: Vec<Report>,
    ) -> Self {
        let n = reports.len();
        let m = capacities.len();
        let f = reports.first().map_or(0, Report::num_features);
        InstanceParts {
            students: (1..=n).map(|i| format!("s{i}")).collect(),
            colleges: (1..=m).map(|i| format!("c{i}")).collect(),
            features: (1..=f).map(|i| format!("f{i}")).collect(),
            capacities,
            college_prefs,
            reports,
        }
    }
}

fn check_unique(ids: &[String]) -> Result<(), ModelError> {
    let mut seen = std::collections::HashSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(ModelError::DuplicateId(id.clone()));
        }
    }
    Ok(())
}

impl Instance {
    pub fn new(parts: InstanceParts) -> Result<Instance, ModelError> {
        let InstanceParts {
            students,
            colleges,
            features,
            capacities,
            college_prefs,
            reports,
        } = parts;
        let (n, m, nf) = (students.len(), colleges.len(), features.len());
        if n == 0 || m == 0 || nf == 0 {
            return Err(ModelError::Empty);
        }
        check_unique(&students)?;
        check_unique(&colleges)?;
        check_unique(&features)?;
        if capacities.len() != m {
            return Err(ModelError::MissingCapacity(
                colleges.get(capacities.len()).cloned().unwrap_or_default(),
            ));
        }
        for (c, &cap) in capacities.iter().enumerate() {
            if cap == 0 {
                return Err(ModelError::CapacityNotPositive {
                    college: colleges[c].clone(),
                });
            }
        }
        if college_prefs.len() != m {
            return Err(ModelError::IncompletePreference {
                college: colleges.get(college_prefs.len()).cloned().unwrap_or_default(),
            });
        }
        let mut college_rank = vec![vec![usize::MAX; n]; m];
        for (c, prefs) in college_prefs.iter().enumerate() {
            let incomplete = || ModelError::IncompletePreference {
                college: colleges[c].clone(),
            };
            if prefs.len() != n {
                return Err(incomplete());
            }
            for (rank, &s) in prefs.iter().enumerate() {
                if s >= n || college_rank[c][s] != usize::MAX {
                    return Err(incomplete());
                }
                college_rank[c][s] = rank;
            }
        }
        if reports.len() != n {
            return Err(ModelError::MissingDistribution(
                students.get(reports.len()).cloned().unwrap_or_default(),
            ));
        }
        for (s, report) in reports.iter().enumerate() {
            Self::validate_report(&students[s], &features, &colleges, report)?;
        }
        Ok(Instance {
            students,
            colleges,
            features,
            capacities,
            college_prefs,
            college_rank,
            reports,
        })
    }

    fn validate_report(
        student: &str,
        features: &[String],
        colleges: &[String],
        report: &Report,
    ) -> Result<(), ModelError> {
        if report.utilities.len() != features.len() {
            return Err(ModelError::DimensionMismatch {
                student: student.into(),
                expected: features.len(),
                found: report.utilities.len(),
            });
        }
        for (f, column) in report.utilities.iter().enumerate() {
            if column.len() != colleges.len() {
                return Err(ModelError::MissingUtility {
                    student: student.into(),
                    feature: features[f].clone(),
                    college: colleges.get(column.len()).cloned().unwrap_or_default(),
                });
            }
            for (c, u) in column.iter().enumerate() {
                if !rational::in_unit_interval(u) {
                    return Err(ModelError::UtilityOutOfRange {
                        student: student.into(),
                        feature: features[f].clone(),
                        college: colleges[c].clone(),
                        value: rational::format(u),
                    });
                }
            }
        }
        report.dist.validate(student, features.len())
    }

    /// Copy of this instance with student `s` submitting `report` instead.
    pub fn with_report(&self, s: Student, report: Report) -> Result<Instance, ModelError> {
        Self::validate_report(&self.students[s], &self.features, &self.colleges, &report)?;
        let mut out = self.clone();
        out.reports[s] = report;
        Ok(out)
    }

    pub fn num_students(&self) -> usize {
        self.students.len()
    }

    pub fn num_colleges(&self) -> usize {
        self.colleges.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn student_id(&self, s: Student) -> &str {
        &self.students[s]
    }

    pub fn college_id(&self, c: College) -> &str {
        &self.colleges[c]
    }

    pub fn student_ids(&self) -> &[String] {
        &self.students
    }

    pub fn college_ids(&self) -> &[String] {
        &self.colleges
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.features
    }

    pub fn student_index(&self, id: &str) -> Option<Student> {
        self.students.iter().position(|x| x == id)
    }

    pub fn college_index(&self, id: &str) -> Option<College> {
        self.colleges.iter().position(|x| x == id)
    }

    pub fn capacity(&self, c: College) -> usize {
        self.capacities[c]
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn college_prefs(&self, c: College) -> &[Student] {
        &self.college_prefs[c]
    }

    /// Position of `s` in `c`'s order, 0 = best.
    pub fn rank(&self, c: College, s: Student) -> usize {
        self.college_rank[c][s]
    }

    /// `true` when college `c` strictly prefers `a` over `b`.
    pub fn college_prefers(&self, c: College, a: Student, b: Student) -> bool {
        self.college_rank[c][a] < self.college_rank[c][b]
    }

    pub fn report(&self, s: Student) -> &Report {
        &self.reports[s]
    }

    pub fn reports(&self) -> &[Report] {
        &self.reports
    }

    pub fn utility(&self, s: Student, f: usize, c: College) -> &Rational {
        &self.reports[s].utilities[f][c]
    }

    pub fn weight_dist(&self, s: Student) -> &WeightDistribution {
        &self.reports[s].dist
    }

    pub fn colleges(&self) -> std::ops::Range<College> {
        0..self.colleges.len()
    }

    pub fn students(&self) -> std::ops::Range<Student> {
        0..self.students.len()
    }
}

/// Assignment of students to colleges; `None` is unmatched.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    assignment: Vec<Option<College>>,
}

impl Matching {
    pub fn new(assignment: Vec<Option<College>>) -> Self {
        Matching { assignment }
    }

    pub fn empty(n: usize) -> Self {
        Matching {
            assignment: vec![None; n],
        }
    }

    /// Builds a one-to-one matching from `(college, student)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(College, Student)]) -> Self {
        let mut assignment = vec![None; n];
        for &(c, s) in pairs {
            assignment[s] = Some(c);
        }
        Matching { assignment }
    }

    pub fn college_of(&self, s: Student) -> Option<College> {
        self.assignment[s]
    }

    pub fn assignment(&self) -> &[Option<College>] {
        &self.assignment
    }

    pub fn num_students(&self) -> usize {
        self.assignment.len()
    }

    /// Reverse map, students in index order.
    pub fn enrollees(&self, m: usize) -> Vec<Vec<Student>> {
        let mut out = vec![Vec::new(); m];
        for (s, c) in self.assignment.iter().enumerate() {
            if let Some(c) = *c {
                if c < m {
                    out[c].push(s);
                }
            }
        }
        out
    }

    /// Renders `{c1:s2, c2:s3, c3:s1}` with unmatched students listed after.
    pub fn display<'a>(&'a self, inst: &'a Instance) -> MatchingDisplay<'a> {
        MatchingDisplay {
            matching: self,
            inst,
        }
    }

    pub fn to_json(&self, inst: &Instance) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (s, c) in self.assignment.iter().enumerate() {
            let v = match c {
                Some(c) => serde_json::Value::String(inst.college_id(*c).to_string()),
                None => serde_json::Value::Null,
            };
            map.insert(inst.student_id(s).to_string(), v);
        }
        serde_json::Value::Object(map)
    }
}

pub struct MatchingDisplay<'a> {
    matching: &'a Matching,
    inst: &'a Instance,
}

impl fmt::Display for MatchingDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let enrolled = self.matching.enrollees(self.inst.num_colleges());
        let mut parts = Vec::new();
        for (c, students) in enrolled.iter().enumerate() {
            if students.is_empty() {
                continue;
            }
            let names: Vec<&str> = students.iter().map(|&s| self.inst.student_id(s)).collect();
            parts.push(format!("{}:{}", self.inst.college_id(c), names.join("+")));
        }
        for (s, c) in self.matching.assignment.iter().enumerate() {
            if c.is_none() {
                parts.push(format!("{}:-", self.inst.student_id(s)));
            }
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Outcome of [`validate_matching`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    OverCapacity {
        college: College,
        assigned: usize,
        capacity: usize,
    },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Checks capacities; errors only when the matching references ids outside `inst`.
pub fn validate_matching(inst: &Instance, m: &Matching) -> Result<Feasibility, ModelError> {
    if m.num_students() != inst.num_students() {
        return Err(ModelError::MatchingLength {
            expected: inst.num_students(),
            found: m.num_students(),
        });
    }
    let mut load = vec![0usize; inst.num_colleges()];
    for c in m.assignment.iter().flatten() {
        if *c >= inst.num_colleges() {
            return Err(ModelError::CollegeOutOfRange(*c));
        }
        load[*c] += 1;
    }
    for (c, &assigned) in load.iter().enumerate() {
        if assigned > inst.capacity(c) {
            return Ok(Feasibility::OverCapacity {
                college: c,
                assigned,
                capacity: inst.capacity(c),
            });
        }
    }
    Ok(Feasibility::Feasible)
}

// ---------------------------------------------------------------------------
// JSON encoding

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
enum RationalText {
    Text(String),
    Number(serde_json::Number),
}

impl RationalText {
    fn parse(&self) -> Result<Rational, ModelError> {
        let text = match self {
            RationalText::Text(t) => t.clone(),
            RationalText::Number(n) => n.to_string(),
        };
        rational::parse(&text).map_err(|reason| ModelError::BadRational {
            value: text.clone(),
            reason,
        })
    }

    fn from(r: &Rational) -> Self {
        RationalText::Text(rational::format(r))
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
struct PointDoc {
    w: Vec<RationalText>,
    p: RationalText,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum DistDoc {
    UniformSimplex,
    Discrete { support: Vec<PointDoc> },
    Beta2 { alpha: f64, beta: f64 },
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    students: Vec<String>,
    colleges: Vec<String>,
    capacities: IndexMap<String, i64>,
    college_prefs: IndexMap<String, Vec<String>>,
    features: Vec<String>,
    utilities: IndexMap<String, IndexMap<String, IndexMap<String, RationalText>>>,
    weight_dists: IndexMap<String, DistDoc>,
}

fn index_of(ids: &[String]) -> HashMap<&str, usize> {
    ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect()
}

/// Parses and validates the JSON instance format.
pub fn parse_instance(text: &str) -> Result<Instance, ModelError> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
    check_unique(&doc.students)?;
    check_unique(&doc.colleges)?;
    check_unique(&doc.features)?;
    let s_idx = index_of(&doc.students);
    let c_idx = index_of(&doc.colleges);
    let f_idx = index_of(&doc.features);
    let (n, m, nf) = (doc.students.len(), doc.colleges.len(), doc.features.len());

    for key in doc.capacities.keys() {
        if !c_idx.contains_key(key.as_str()) {
            return Err(ModelError::UnknownCollege(key.clone()));
        }
    }
    let mut capacities = Vec::with_capacity(m);
    for c in &doc.colleges {
        let cap = *doc
            .capacities
            .get(c)
            .ok_or_else(|| ModelError::MissingCapacity(c.clone()))?;
        if cap <= 0 {
            return Err(ModelError::CapacityNotPositive { college: c.clone() });
        }
        capacities.push(cap as usize);
    }

    for key in doc.college_prefs.keys() {
        if !c_idx.contains_key(key.as_str()) {
            return Err(ModelError::UnknownCollege(key.clone()));
        }
    }
    let mut college_prefs = Vec::with_capacity(m);
    for c in &doc.colleges {
        let list = doc
            .college_prefs
            .get(c)
            .ok_or_else(|| ModelError::IncompletePreference { college: c.clone() })?;
        let mut order = Vec::with_capacity(n);
        for s in list {
            let si = *s_idx
                .get(s.as_str())
                .ok_or_else(|| ModelError::UnknownStudent(s.clone()))?;
            order.push(si);
        }
        college_prefs.push(order);
    }

    for key in doc.utilities.keys() {
        if !s_idx.contains_key(key.as_str()) {
            return Err(ModelError::UnknownStudent(key.clone()));
        }
    }
    for key in doc.weight_dists.keys() {
        if !s_idx.contains_key(key.as_str()) {
            return Err(ModelError::UnknownStudent(key.clone()));
        }
    }
    let mut reports = Vec::with_capacity(n);
    for s in &doc.students {
        let missing = |f: &str, c: &str| ModelError::MissingUtility {
            student: s.clone(),
            feature: f.to_string(),
            college: c.to_string(),
        };
        let per_feature = doc
            .utilities
            .get(s)
            .ok_or_else(|| missing(&doc.features[0], &doc.colleges[0]))?;
        for fkey in per_feature.keys() {
            if !f_idx.contains_key(fkey.as_str()) {
                return Err(ModelError::UnknownFeature(fkey.clone()));
            }
        }
        let mut utilities = Vec::with_capacity(nf);
        for f in &doc.features {
            let per_college = per_feature.get(f).ok_or_else(|| missing(f, &doc.colleges[0]))?;
            for ckey in per_college.keys() {
                if !c_idx.contains_key(ckey.as_str()) {
                    return Err(ModelError::UnknownCollege(ckey.clone()));
                }
            }
            let mut column = Vec::with_capacity(m);
            for c in &doc.colleges {
                let raw = per_college.get(c).ok_or_else(|| missing(f, c))?;
                column.push(raw.parse()?);
            }
            utilities.push(column);
        }
        let dist_doc = doc
            .weight_dists
            .get(s)
            .ok_or_else(|| ModelError::MissingDistribution(s.clone()))?;
        let dist = match dist_doc {
            DistDoc::UniformSimplex => WeightDistribution::UniformSimplex,
            DistDoc::Beta2 { alpha, beta } => WeightDistribution::BetaTwoFeature {
                alpha: *alpha,
                beta: *beta,
            },
            DistDoc::Discrete { support } => {
                let mut points = Vec::with_capacity(support.len());
                for p in support {
                    let weights = p.w.iter().map(RationalText::parse).collect::<Result<_, _>>()?;
                    points.push(SupportPoint {
                        weights,
                        prob: p.p.parse()?,
                    });
                }
                WeightDistribution::Discrete(points)
            }
        };
        reports.push(Report { utilities, dist });
    }

    Instance::new(InstanceParts {
        students: doc.students,
        colleges: doc.colleges,
        features: doc.features,
        capacities,
        college_prefs,
        reports,
    })
}

impl Instance {
    pub fn to_json(&self) -> serde_json::Value {
        let doc = InstanceDoc {
            students: self.students.clone(),
            colleges: self.colleges.clone(),
            capacities: self
                .colleges
                .iter()
                .zip(&self.capacities)
                .map(|(c, &x)| (c.clone(), x as i64))
                .collect(),
            college_prefs: self
                .colleges
                .iter()
                .zip(&self.college_prefs)
                .map(|(c, order)| {
                    (c.clone(), order.iter().map(|&s| self.students[s].clone()).collect())
                })
                .collect(),
            features: self.features.clone(),
            utilities: self
                .students
                .iter()
                .zip(&self.reports)
                .map(|(s, r)| {
                    let per_feature = self
                        .features
                        .iter()
                        .zip(&r.utilities)
                        .map(|(f, column)| {
                            let per_college = self
                                .colleges
                                .iter()
                                .zip(column)
                                .map(|(c, u)| (c.clone(), RationalText::from(u)))
                                .collect();
                            (f.clone(), per_college)
                        })
                        .collect();
                    (s.clone(), per_feature)
                })
                .collect(),
            weight_dists: self
                .students
                .iter()
                .zip(&self.reports)
                .map(|(s, r)| {
                    let d = match &r.dist {
                        WeightDistribution::UniformSimplex => DistDoc::UniformSimplex,
                        WeightDistribution::BetaTwoFeature { alpha, beta } => DistDoc::Beta2 {
                            alpha: *alpha,
                            beta: *beta,
                        },
                        WeightDistribution::Discrete(points) => DistDoc::Discrete {
                            support: points
                                .iter()
                                .map(|p| PointDoc {
                                    w: p.weights.iter().map(RationalText::from).collect(),
                                    p: RationalText::from(&p.prob),
                                })
                                .collect(),
                        },
                    };
                    (s.clone(), d)
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("instance document serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("instance document serializes")
    }
}

/// Parses either the JSON form `{"s1": "c2", "s2": null}` or the compact
/// display form `{c1:s2+s3, s4:-}`; students not mentioned are unmatched.
pub fn parse_matching(inst: &Instance, text: &str) -> Result<Matching, ModelError> {
    let doc: IndexMap<String, Option<String>> = match serde_json::from_str(text) {
        Ok(doc) => doc,
        Err(e) => parse_compact_matching(inst, text)
            .ok_or_else(|| ModelError::Malformed(e.to_string()))?,
    };
    let mut assignment = vec![None; inst.num_students()];
    for (s, c) in doc {
        let si = inst
            .student_index(&s)
            .ok_or_else(|| ModelError::UnknownStudent(s.clone()))?;
        assignment[si] = match c {
            Some(c) => Some(
                inst.college_index(&c)
                    .ok_or_else(|| ModelError::UnknownCollege(c.clone()))?,
            ),
            None => None,
        };
    }
    Ok(Matching::new(assignment))
}

fn parse_compact_matching(inst: &Instance, text: &str) -> Option<IndexMap<String, Option<String>>> {
    let body = text.trim().strip_prefix('{')?.strip_suffix('}')?;
    let mut doc = IndexMap::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (head, tail) = part.split_once(':')?;
        let (head, tail) = (head.trim(), tail.trim());
        if inst.college_index(head).is_some() {
            for s in tail.split('+').map(str::trim) {
                doc.insert(s.to_string(), Some(head.to_string()));
            }
        } else if tail == "-" {
            doc.insert(head.to_string(), None);
        } else {
            return None;
        }
    }
    Some(doc)
}
