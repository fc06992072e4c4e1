//! Random experiment instances, the worked examples and worst-case families,
//! and the uniform-equivalence transform for two-feature students.

use crate::model::{
    College, Instance, InstanceParts, ModelError, Report, Student, SupportPoint,
    WeightDistribution,
};
use crate::prob::{self, Value};
use crate::rational::{self, frac, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("transform precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, InstanceError> {
    Err(InstanceError::InvalidParams(msg.into()))
}

/// Utility grid of random instances.
const GRID: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum CapacityRule {
    AllOnes,
    /// Seats sum to `n`, spread as evenly as possible with earlier colleges
    /// taking the remainder. Needs `n >= m`.
    TotalSeatsEqualsN,
    Explicit(Vec<usize>),
}

impl CapacityRule {
    pub fn name(&self) -> String {
        match self {
            CapacityRule::AllOnes => "all_ones".into(),
            CapacityRule::TotalSeatsEqualsN => "total_seats_n".into(),
            CapacityRule::Explicit(c) => {
                let parts: Vec<String> = c.iter().map(usize::to_string).collect();
                format!("explicit({})", parts.join(","))
            }
        }
    }

    pub fn capacities(&self, n: usize, m: usize) -> Result<Vec<usize>, InstanceError> {
        match self {
            CapacityRule::AllOnes => Ok(vec![1; m]),
            CapacityRule::TotalSeatsEqualsN => {
                if n < m {
                    return invalid(format!("total seats = n needs n >= m (n={n}, m={m})"));
                }
                Ok((0..m).map(|c| n / m + usize::from(c < n % m)).collect())
            }
            CapacityRule::Explicit(caps) => {
                if caps.len() != m {
                    return invalid(format!("{} capacities for {m} colleges", caps.len()));
                }
                Ok(caps.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DistKind {
    UniformSimplex,
    /// Random finite support with `points` points and random positive masses.
    Discrete { points: usize },
    /// A random point of the simplex with mass one.
    PointMass,
    Beta { alpha: f64, beta: f64 },
    /// `Beta(a, a)` with `a` drawn per student from {0.5, 0.6, ..., 5.0}.
    SymmetricBetaRandom,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomParams {
    pub n: usize,
    pub m: usize,
    pub capacities: CapacityRule,
    pub features: usize,
    pub dist: DistKind,
    pub seed: u64,
}

impl RandomParams {
    pub fn square(n: usize, dist: DistKind, seed: u64) -> Self {
        RandomParams {
            n,
            m: n,
            capacities: CapacityRule::AllOnes,
            features: 2,
            dist,
            seed,
        }
    }
}

/// A random point on the simplex with coordinates on the `1/GRID` lattice.
fn random_simplex_point<R: Rng>(rng: &mut R, features: usize) -> Vec<Rational> {
    let mut cuts: Vec<i64> = (0..features - 1).map(|_| rng.random_range(0..=GRID)).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(features);
    for c in cuts.into_iter().chain(std::iter::once(GRID)) {
        out.push(frac(c - prev, GRID));
        prev = c;
    }
    out
}

fn random_dist<R: Rng>(rng: &mut R, kind: &DistKind, features: usize) -> Result<WeightDistribution, InstanceError> {
    Ok(match kind {
        DistKind::UniformSimplex => WeightDistribution::UniformSimplex,
        DistKind::PointMass => WeightDistribution::point_mass(random_simplex_point(rng, features)),
        DistKind::Discrete { points } => {
            if *points == 0 {
                return invalid("discrete distribution needs at least one point");
            }
            let masses: Vec<i64> = (0..*points).map(|_| rng.random_range(1..=10)).collect();
            let total: i64 = masses.iter().sum();
            WeightDistribution::Discrete(
                masses
                    .iter()
                    .map(|&k| SupportPoint {
                        weights: random_simplex_point(rng, features),
                        prob: frac(k, total),
                    })
                    .collect(),
            )
        }
        DistKind::Beta { alpha, beta } => {
            if features != 2 {
                return invalid("beta weights need exactly two features");
            }
            WeightDistribution::BetaTwoFeature {
                alpha: *alpha,
                beta: *beta,
            }
        }
        DistKind::SymmetricBetaRandom => {
            if features != 2 {
                return invalid("beta weights need exactly two features");
            }
            let a = rng.random_range(5..=50) as f64 / 10.0;
            WeightDistribution::BetaTwoFeature { alpha: a, beta: a }
        }
    })
}

/// Utilities uniform on `(0,1)` at a `10^-6` grid, college orders uniform
/// permutations; deterministic in the seed.
pub fn gen_random(p: &RandomParams) -> Result<Instance, InstanceError> {
    if p.n == 0 || p.m == 0 || p.features == 0 {
        return invalid("n, m and the feature count must be positive");
    }
    let capacities = p.capacities.capacities(p.n, p.m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut reports = Vec::with_capacity(p.n);
    for _ in 0..p.n {
        let utilities: Vec<Vec<Rational>> = (0..p.features)
            .map(|_| (0..p.m).map(|_| frac(rng.random_range(1..GRID), GRID)).collect())
            .collect();
        let dist = random_dist(&mut rng, &p.dist, p.features)?;
        reports.push(Report::new(utilities, dist));
    }
    let college_prefs = (0..p.m)
        .map(|_| {
            let mut order: Vec<Student> = (0..p.n).collect();
            order.shuffle(&mut rng);
            order
        })
        .collect();
    Ok(Instance::new(InstanceParts::with_default_ids(
        capacities,
        college_prefs,
        reports,
    ))?)
}

/// Named instances and parametrized worst-case families.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilyParams {
    Example1_1,
    Example1_2,
    Example1_3,
    /// Three students; the first one's uncertain preference defeats IC-R
    /// together with any positive approximation ratio.
    Theorem5 { delta: Rational, epsilon: Rational },
    /// Three students where HEUF, LOCV and LOICV reach a vanishing ratio.
    Theorem8 { delta: Rational, epsilon: Rational },
    /// `n` students where HERF's ratio approaches `(1/n)^n`.
    HerfTight { n: usize, delta: Rational, epsilon: Rational },
    /// `k` independent three-student blocks bounding IC-C mechanisms.
    GoldenRatio { k: usize, y: Rational, z: Rational },
    /// One student, three features, non-transitive majority preference.
    NonTransitive,
}

impl FamilyParams {
    pub fn theorem5_default() -> Self {
        FamilyParams::Theorem5 {
            delta: frac(1, 10),
            epsilon: frac(1, 1000),
        }
    }

    pub fn theorem8_default() -> Self {
        FamilyParams::Theorem8 {
            delta: frac(1, 10),
            epsilon: frac(1, 1000),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilyParams::Example1_1 => "example1_1",
            FamilyParams::Example1_2 => "example1_2",
            FamilyParams::Example1_3 => "example1_3",
            FamilyParams::Theorem5 { .. } => "theorem5",
            FamilyParams::Theorem8 { .. } => "theorem8",
            FamilyParams::HerfTight { .. } => "herf_tight",
            FamilyParams::GoldenRatio { .. } => "golden_ratio",
            FamilyParams::NonTransitive => "non_transitive",
        }
    }
}

fn dec(x: &str) -> Rational {
    rational::parse(x).expect("literal decimal")
}

fn dec_row(xs: &[&str]) -> Vec<Rational> {
    xs.iter().map(|x| dec(x)).collect()
}

fn uniform(f1: Vec<Rational>, f2: Vec<Rational>) -> Report {
    Report::new(vec![f1, f2], WeightDistribution::UniformSimplex)
}

/// Same utilities in both features: a certain preference.
fn certain(u: Vec<Rational>) -> Report {
    uniform(u.clone(), u)
}

/// 1-based student lists to 0-based indices.
fn prefs(lists: &[&[usize]]) -> Vec<Vec<Student>> {
    lists.iter().map(|l| l.iter().map(|s| s - 1).collect()).collect()
}

fn build(capacities: Vec<usize>, college_prefs: Vec<Vec<Student>>, reports: Vec<Report>) -> Result<Instance, InstanceError> {
    Ok(Instance::new(InstanceParts::with_default_ids(
        capacities,
        college_prefs,
        reports,
    ))?)
}

fn require_positive(name: &str, x: &Rational) -> Result<(), InstanceError> {
    if *x > rational::zero() {
        Ok(())
    } else {
        invalid(format!("{name} must be positive"))
    }
}

pub fn canonical(params: &FamilyParams) -> Result<Instance, InstanceError> {
    match params {
        FamilyParams::Example1_1 => build(
            vec![1; 3],
            prefs(&[&[1, 2, 3], &[1, 3, 2], &[2, 3, 1]]),
            vec![
                uniform(dec_row(&["0.3", "0.2", "1.0"]), dec_row(&["0.7", "0.4", "0.3"])),
                uniform(dec_row(&["0.5", "0.1", "0.7"]), dec_row(&["0.6", "0.3", "0.1"])),
                uniform(dec_row(&["0.9", "0.3", "0.6"]), dec_row(&["0.2", "0.3", "0.1"])),
            ],
        ),
        FamilyParams::Example1_2 => build(
            vec![1; 3],
            prefs(&[&[3, 1, 2], &[2, 3, 1], &[2, 3, 1]]),
            vec![
                uniform(dec_row(&["0.9", "0.7", "0.75"]), dec_row(&["0.1", "0.7", "0.8"])),
                certain(dec_row(&["0.9", "0.5", "0.1"])),
                certain(dec_row(&["0.5", "0.1", "0.9"])),
            ],
        ),
        FamilyParams::Example1_3 => {
            let twin = uniform(dec_row(&["0.25", "0.3", "0.8"]), dec_row(&["0.4", "0.3", "0.7"]));
            build(
                vec![1; 3],
                prefs(&[&[1, 3, 2], &[3, 2, 1], &[1, 3, 2]]),
                vec![
                    twin.clone(),
                    twin,
                    uniform(dec_row(&["0.1", "1.0", "0.8"]), dec_row(&["1.0", "0.2", "0.5"])),
                ],
            )
        }
        FamilyParams::Theorem5 { delta: d, epsilon: e } => {
            require_positive("delta", d)?;
            require_positive("epsilon", e)?;
            let s1 = uniform(
                vec![frac(3, 2) * d + frac(3, 1) * e, d + frac(2, 1) * e, rational::zero()],
                vec![rational::zero(), frac(1, 2) * d + frac(2, 1) * e, frac(3, 2) * d + frac(2, 1) * e],
            );
            build(
                vec![1; 3],
                prefs(&[&[1, 2, 3], &[1, 2, 3], &[1, 3, 2]]),
                vec![
                    s1,
                    certain(dec_row(&["0.3", "0.6", "0.1"])),
                    certain(dec_row(&["0.3", "0.1", "0.6"])),
                ],
            )
        }
        FamilyParams::Theorem8 { delta: d, epsilon: e } => {
            require_positive("delta", d)?;
            require_positive("epsilon", e)?;
            let base = frac(1, 10);
            let s2 = uniform(
                vec![
                    &base + frac(3, 2) * d + frac(3, 1) * e,
                    &base + d + frac(2, 1) * e,
                    base.clone(),
                ],
                vec![
                    base.clone(),
                    &base + frac(1, 2) * d + frac(2, 1) * e,
                    &base + frac(3, 2) * d + frac(2, 1) * e,
                ],
            );
            build(
                vec![1; 3],
                prefs(&[&[2, 3, 1], &[2, 3, 1], &[3, 2, 1]]),
                vec![
                    uniform(dec_row(&["0.75", "0.5", "0.55"]), dec_row(&["0.55", "0.25", "0.1"])),
                    s2,
                    certain(dec_row(&["0.3", "0.2", "0.1"])),
                ],
            )
        }
        FamilyParams::HerfTight { n, delta, epsilon } => herf_tight(*n, delta, epsilon),
        FamilyParams::GoldenRatio { k, y, z } => golden_ratio(*k, y, z),
        FamilyParams::NonTransitive => non_transitive(),
    }
}

/// `nu_1 = 0`, `nu_k = nu_{k-1} + (n-k+1) delta`.
pub fn herf_tight_nu(n: usize, delta: &Rational) -> Vec<Rational> {
    let mut nu = vec![rational::zero()];
    for k in 2..=n {
        let next = &nu[k - 2] + rational::int((n - k + 1) as i64) * delta;
        nu.push(next);
    }
    nu
}

fn herf_tight(n: usize, delta: &Rational, epsilon: &Rational) -> Result<Instance, InstanceError> {
    if n < 2 {
        return invalid("herf_tight needs n >= 2");
    }
    require_positive("delta", delta)?;
    require_positive("epsilon", epsilon)?;
    if *delta > frac(2, (n * (n - 1)) as i64) {
        return invalid("herf_tight needs delta <= 2/(n(n-1))");
    }
    let nu = herf_tight_nu(n, delta);
    let mut reports = Vec::with_capacity(n);
    for i in 0..n {
        let f1: Vec<Rational> = (0..n)
            .map(|j| if j == i { &nu[j] + epsilon } else { nu[j].clone() })
            .collect();
        let f2: Vec<Rational> = (0..n)
            .map(|j| {
                let v = nu[n - 1 - j].clone();
                if j == i {
                    v + epsilon
                } else {
                    v
                }
            })
            .collect();
        if f1.iter().chain(&f2).any(|u| !rational::in_unit_interval(u)) {
            return invalid("herf_tight utilities leave [0,1]; shrink delta or epsilon");
        }
        reports.push(uniform(f1, f2));
    }
    // college j: s_{j+1} first, s_j last, everyone else ascending
    let college_prefs = (0..n)
        .map(|j| {
            let top = (j + 1) % n;
            let mut order = vec![top];
            order.extend((0..n).filter(|&s| s != top && s != j));
            order.push(j);
            order
        })
        .collect();
    build(vec![1; n], college_prefs, reports)
}

/// `count` strictly decreasing values strictly between 0 and `below`.
fn tail_values(below: &Rational, count: usize) -> Vec<Rational> {
    (0..count)
        .map(|r| below * frac((count - r) as i64, count as i64 + 1))
        .collect()
}

/// Fills unspecified entries (`None`) of one student's utility columns with
/// equally spaced values below the smallest specified value, identical across
/// features, in ascending college order.
fn fill_tails(f1: Vec<Option<Rational>>, f2: Vec<Option<Rational>>) -> Report {
    let min = f1
        .iter()
        .chain(&f2)
        .flatten()
        .min()
        .cloned()
        .expect("at least one specified utility");
    let free: Vec<College> = (0..f1.len()).filter(|&c| f1[c].is_none()).collect();
    let tails = tail_values(&min, free.len());
    let fill = |col: Vec<Option<Rational>>| -> Vec<Rational> {
        let mut col = col;
        for (&c, t) in free.iter().zip(&tails) {
            col[c] = Some(t.clone());
        }
        col.into_iter().map(|u| u.expect("filled")).collect()
    };
    uniform(fill(f1), fill(f2))
}

fn golden_ratio(k: usize, y: &Rational, z: &Rational) -> Result<Instance, InstanceError> {
    if k == 0 {
        return invalid("golden_ratio needs k >= 1");
    }
    if !(*y > frac(1, 5) && *y < frac(4, 5)) {
        return invalid("golden_ratio needs 1/5 < y < 4/5 so every utility stays in [0,1] above the tails");
    }
    if !(*z > rational::zero() && *z < rational::one()) {
        return invalid("golden_ratio needs 0 < z < 1");
    }
    let n = 3 * k;
    let one = rational::one();
    let eight = frac(4, 5);
    let mut reports = Vec::with_capacity(n);
    let mut college_prefs = vec![Vec::new(); n];
    for b in 0..k {
        let i = 3 * b;
        let (a, a1, a2) = (i, i + 1, i + 2);

        let mut f1 = vec![None; n];
        let mut f2 = vec![None; n];
        f1[a] = Some(one.clone());
        f1[a1] = Some(eight.clone());
        f1[a2] = Some(&eight - y);
        f2[a] = Some(one.clone());
        f2[a2] = Some(eight.clone());
        f2[a1] = Some(y - frac(1, 5));
        reports.push(fill_tails(f1, f2));

        let mut f1 = vec![None; n];
        let mut f2 = vec![None; n];
        f1[a1] = Some(one.clone());
        f1[a] = Some(&one - z);
        f2[a] = Some(one.clone());
        f2[a1] = Some(z.clone());
        reports.push(fill_tails(f1, f2));

        let mut f1 = vec![None; n];
        f1[a2] = Some(one.clone());
        reports.push(fill_tails(f1.clone(), f1));

        let rest = |head: &[Student]| -> Vec<Student> {
            let mut order = head.to_vec();
            order.extend((0..n).filter(|s| !head.contains(s)));
            order
        };
        college_prefs[a] = rest(&[a1, a, a2]);
        college_prefs[a1] = rest(&[a, a1, a2]);
        college_prefs[a2] = rest(&[a, a2]);
    }
    build(vec![1; n], college_prefs, reports)
}

/// Per-feature utilities of the three-feature example student.
pub fn non_transitive_utilities() -> Vec<Vec<Rational>> {
    vec![
        dec_row(&["0.65", "0.91", "0.10"]),
        dec_row(&["0.90", "0.05", "1.00"]),
        dec_row(&["0.21", "0.31", "0.70"]),
    ]
}

/// Mass `eps` used by the example's weight distribution.
pub const NON_TRANSITIVE_EPS: (i64, i64) = (1, 20);

/// Four-point weight distribution, one point per labeled region of the
/// example's figure: masses `4 eps`, `1/2 - 3 eps`, `1/2 - 3 eps`, `2 eps`
/// on the orders `c1>c2>c3`, `c2>c3>c1`, `c3>c1>c2`, `c3>c2>c1`.
pub fn non_transitive_distribution() -> WeightDistribution {
    let (p, q) = NON_TRANSITIVE_EPS;
    let eps = frac(p, q);
    let w = |a: &str, b: &str, c: &str| vec![dec(a), dec(b), dec(c)];
    WeightDistribution::Discrete(vec![
        SupportPoint {
            weights: w("0.57", "0.29", "0.14"),
            prob: frac(4, 1) * &eps,
        },
        SupportPoint {
            weights: w("0.40", "0.06", "0.54"),
            prob: frac(1, 2) - frac(3, 1) * &eps,
        },
        SupportPoint {
            weights: w("0.14", "0.46", "0.40"),
            prob: frac(1, 2) - frac(3, 1) * &eps,
        },
        SupportPoint {
            weights: w("0.20", "0.07", "0.73"),
            prob: frac(2, 1) * &eps,
        },
    ])
}

fn non_transitive() -> Result<Instance, InstanceError> {
    build(
        vec![1; 3],
        vec![vec![0]; 3],
        vec![Report::new(non_transitive_utilities(), non_transitive_distribution())],
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformResult {
    pub instance: Instance,
    /// `A = 1 - E[w1]`.
    pub a: Value,
}

/// Replaces student `s`'s distribution with the uniform one and rescales her
/// utilities by `2(1-A)` and `2A` so expected utilities and pairwise
/// majority sides are preserved.
pub fn reduce_to_uniform(inst: &Instance, s: Student) -> Result<TransformResult, InstanceError> {
    let pre = |msg: &str| Err(InstanceError::Precondition(msg.to_string()));
    if inst.num_features() != 2 {
        return pre("requires exactly two features");
    }
    let dist = inst.weight_dist(s);
    if !dist.is_continuous() {
        return pre("distribution not continuous");
    }
    let mw = prob::mean_weight(inst, s);
    if mw.mean_is_median(1e-9) != Some(true) {
        return pre("mean of w1 differs from its median");
    }
    let a_value = mw.mean[0].complement();
    let a = match &a_value {
        Value::Exact(r) => r.clone(),
        other => rational::from_f64(other.to_f64())
            .ok_or_else(|| InstanceError::Precondition("non-finite mean".into()))?,
    };
    let two = rational::int(2);
    let scale = [&two * (rational::one() - &a), &two * &a];
    let report = inst.report(s);
    let utilities: Vec<Vec<Rational>> = (0..2)
        .map(|f| {
            report.utilities()[f]
                .iter()
                .map(|u| &scale[f] * u)
                .collect()
        })
        .collect();
    if utilities.iter().flatten().any(|u| !rational::in_unit_interval(u)) {
        return pre("rescaled utility leaves [0,1]");
    }
    let instance = inst.with_report(s, Report::new(utilities, WeightDistribution::UniformSimplex))?;
    Ok(TransformResult {
        instance,
        a: match a_value {
            Value::Exact(r) => Value::Exact(r),
            other => Value::Real(other.to_f64()),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_is_deterministic() {
        let p = RandomParams::square(3, DistKind::UniformSimplex, 7);
        let a = gen_random(&p).unwrap();
        assert_eq!(a, gen_random(&p).unwrap());
        assert_ne!(a, gen_random(&RandomParams { seed: 8, ..p }).unwrap());
    }

    #[test]
    fn total_seats_rule() {
        let caps = CapacityRule::TotalSeatsEqualsN.capacities(5, 2).unwrap();
        assert_eq!(caps, vec![3, 2]);
        assert!(CapacityRule::TotalSeatsEqualsN.capacities(2, 3).is_err());
    }

    #[test]
    fn random_point_mass_on_simplex() {
        let p = RandomParams {
            features: 3,
            ..RandomParams::square(3, DistKind::PointMass, 3)
        };
        let inst = gen_random(&p).unwrap();
        assert!(inst.weight_dist(0).is_discrete());
    }

    #[test]
    fn herf_tight_nu_values() {
        let nu = herf_tight_nu(3, &frac(1, 10));
        assert_eq!(nu, vec![frac(0, 1), frac(2, 10), frac(3, 10)]);
        let inst = canonical(&FamilyParams::HerfTight {
            n: 3,
            delta: frac(1, 10),
            epsilon: frac(1, 1000),
        })
        .unwrap();
        // college 1 ranks s2 first and s1 last
        assert_eq!(inst.college_prefs(0), &[1, 2, 0]);
        assert_eq!(inst.college_prefs(2), &[0, 1, 2]);
        assert_eq!(*inst.utility(0, 1, 0), frac(3, 10) + frac(1, 1000));
    }

    #[test]
    fn family_parameters_validated() {
        assert!(canonical(&FamilyParams::GoldenRatio {
            k: 1,
            y: frac(1, 10),
            z: frac(1, 2)
        })
        .is_err());
        assert!(canonical(&FamilyParams::Theorem8 {
            delta: frac(0, 1),
            epsilon: frac(1, 10)
        })
        .is_err());
        assert!(canonical(&FamilyParams::HerfTight {
            n: 3,
            delta: frac(1, 2),
            epsilon: frac(1, 10)
        })
        .is_err());
    }

    #[test]
    fn tails_sit_below_specified_values() {
        let inst = canonical(&FamilyParams::GoldenRatio {
            k: 2,
            y: frac(1, 2),
            z: frac(1, 2),
        })
        .unwrap();
        // s1 specified minimum is min(0.8 - y, y - 0.2) = 3/10
        let r = inst.report(0);
        for c in 3..6 {
            assert!(*r.utility(0, c) < frac(3, 10));
            assert_eq!(r.utility(0, c), r.utility(1, c));
        }
        assert!(r.utility(0, 3) > r.utility(0, 4));
    }

    #[test]
    fn uniform_student_is_a_fixed_point() {
        let inst = canonical(&FamilyParams::Example1_1).unwrap();
        let t = reduce_to_uniform(&inst, 0).unwrap();
        assert_eq!(t.a, Value::Exact(frac(1, 2)));
        assert_eq!(t.instance, inst);
    }

    #[test]
    fn discrete_student_rejected() {
        let inst = canonical(&FamilyParams::Example1_1).unwrap();
        let point = WeightDistribution::Discrete(vec![
            SupportPoint {
                weights: vec![frac(1, 4), frac(3, 4)],
                prob: frac(1, 2),
            },
            SupportPoint {
                weights: vec![frac(3, 4), frac(1, 4)],
                prob: frac(1, 2),
            },
        ]);
        let inst = inst.with_report(0, inst.report(0).with_dist(point)).unwrap();
        let err = reduce_to_uniform(&inst, 0).unwrap_err();
        assert!(err.to_string().contains("distribution not continuous"), "{err}");
    }
}
