//! Independent reference implementations used as test oracles. Nothing here
//! calls the crate's probability or matching engines.
#![allow(dead_code)]

use fbmatch::model::{College, Student, WeightDistribution};
use fbmatch::rational::{self, Rational};
use fbmatch::{Instance, Matching};

/// Colleges other than `s`'s own with a free seat or an enrollee ranked below `s`.
pub fn open_colleges(inst: &Instance, m: &Matching, s: Student) -> Vec<College> {
    let held = m.college_of(s);
    inst.colleges()
        .filter(|&c| Some(c) != held)
        .filter(|&c| {
            let enrolled: Vec<Student> = inst.students().filter(|&t| m.college_of(t) == Some(c)).collect();
            let rank = |t: Student| inst.college_prefs(c).iter().position(|&x| x == t).unwrap();
            enrolled.len() < inst.capacity(c) || enrolled.iter().any(|&t| rank(t) > rank(s))
        })
        .collect()
}

/// True when `s` has no strict improvement among `open` given aggregated utilities `u`.
fn no_block<T: PartialOrd>(held: Option<College>, open: &[College], u: &[T]) -> bool {
    match held {
        None => open.is_empty(),
        Some(h) => open.iter().all(|&c| u[c] <= u[h]),
    }
}

fn aggregate(inst: &Instance, s: Student, w: &[Rational]) -> Vec<Rational> {
    inst.colleges()
        .map(|c| (0..w.len()).map(|f| &w[f] * inst.utility(s, f, c)).sum())
        .collect()
}

/// ProS with each two-feature uniform student's `w1` replaced by the
/// midpoints of an `n_points` grid on `[0, 1]`.
pub fn grid_pros_uniform_2f(inst: &Instance, m: &Matching, n_points: usize) -> f64 {
    let mut total = 1.0;
    for s in inst.students() {
        assert!(matches!(inst.weight_dist(s), WeightDistribution::UniformSimplex));
        let open = open_colleges(inst, m, s);
        let u1: Vec<f64> = inst.colleges().map(|c| rational::to_f64(inst.utility(s, 0, c))).collect();
        let u2: Vec<f64> = inst.colleges().map(|c| rational::to_f64(inst.utility(s, 1, c))).collect();
        let mut ok = 0usize;
        for k in 0..n_points {
            let w = (k as f64 + 0.5) / n_points as f64;
            let u: Vec<f64> = (0..u1.len()).map(|c| w * u1[c] + (1.0 - w) * u2[c]).collect();
            if no_block(m.college_of(s), &open, &u) {
                ok += 1;
            }
        }
        total *= ok as f64 / n_points as f64;
    }
    total
}

/// Exact ProS by enumerating the joint support of finite-support students.
pub fn enumerate_pros(inst: &Instance, m: &Matching) -> Rational {
    let supports: Vec<Vec<(Vec<Rational>, Rational)>> = inst
        .students()
        .map(|s| match inst.weight_dist(s) {
            WeightDistribution::Discrete(points) => {
                points.iter().map(|p| (p.weights.clone(), p.prob.clone())).collect()
            }
            other => panic!("finite support expected, got {other:?}"),
        })
        .collect();
    let open: Vec<Vec<College>> = inst.students().map(|s| open_colleges(inst, m, s)).collect();
    let mut idx = vec![0usize; supports.len()];
    let mut total = rational::zero();
    loop {
        let mut mass = rational::one();
        let mut stable = true;
        for s in inst.students() {
            let (w, p) = &supports[s][idx[s]];
            mass *= p;
            if !no_block(m.college_of(s), &open[s], &aggregate(inst, s, w)) {
                stable = false;
            }
        }
        if stable {
            total += mass;
        }
        // odometer over the joint support
        let mut k = 0;
        loop {
            if k == idx.len() {
                return total;
            }
            idx[k] += 1;
            if idx[k] < supports[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// `Pr[w1*d1 + (1-w1)*d2 >= 0]` for `w1 ~ U[0,1]`.
pub fn weak_uniform_2f(inst: &Instance, s: Student, ci: College, cj: College) -> Rational {
    let d1 = inst.utility(s, 0, ci) - inst.utility(s, 0, cj);
    let d2 = inst.utility(s, 1, ci) - inst.utility(s, 1, cj);
    let zero = rational::zero();
    let slope = &d1 - &d2;
    if slope == zero {
        return if d2 >= zero { rational::one() } else { zero };
    }
    let root = (-&d2 / &slope).clamp(rational::zero(), rational::one());
    if slope > zero {
        rational::one() - root
    } else {
        root
    }
}

/// Deterministic preference of a point-mass student, best first, ties to the lower index.
pub fn point_mass_order(inst: &Instance, s: Student) -> Vec<College> {
    let w = match inst.weight_dist(s) {
        WeightDistribution::Discrete(points) if points.len() == 1 => points[0].weights.clone(),
        other => panic!("point mass expected, got {other:?}"),
    };
    let u = aggregate(inst, s, &w);
    let mut order: Vec<College> = inst.colleges().collect();
    order.sort_by(|&a, &b| u[b].cmp(&u[a]).then(a.cmp(&b)));
    order
}

/// Sequential student-proposing deferred acceptance, one proposal at a time.
pub fn reference_da(inst: &Instance, prefs: &[Vec<College>]) -> Vec<Option<College>> {
    let n = inst.num_students();
    let mut next = vec![0usize; n];
    let mut held: Vec<Vec<Student>> = vec![Vec::new(); inst.num_colleges()];
    let mut assignment = vec![None; n];
    let mut free: Vec<Student> = (0..n).rev().collect();
    while let Some(s) = free.pop() {
        let Some(&c) = prefs[s].get(next[s]) else { continue };
        next[s] += 1;
        held[c].push(s);
        assignment[s] = Some(c);
        if held[c].len() > inst.capacity(c) {
            let rank = |t: &Student| inst.college_prefs(c).iter().position(|x| x == t).unwrap();
            let worst = *held[c].iter().max_by_key(|t| rank(t)).unwrap();
            held[c].retain(|&t| t != worst);
            assignment[worst] = None;
            free.push(worst);
        }
    }
    assignment
}
