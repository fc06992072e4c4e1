//! Intervals of the first feature's weight and their measure under each
//! two-feature distribution, plus weight samplers for the estimators.

use super::Value;
use crate::model::WeightDistribution;
use crate::rational::{self, Rational};
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use statrs::distribution::{Beta, ContinuousCDF};

/// An interval of `w1` with explicit endpoint closedness.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockInterval {
    pub lower: Rational,
    pub upper: Rational,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl BlockInterval {
    pub fn closed(lower: Rational, upper: Rational) -> Self {
        BlockInterval {
            lower,
            upper,
            lower_closed: true,
            upper_closed: true,
        }
    }

    pub fn full() -> Self {
        Self::closed(rational::zero(), rational::one())
    }

    pub fn empty() -> Self {
        BlockInterval {
            lower: rational::one(),
            upper: rational::zero(),
            lower_closed: false,
            upper_closed: false,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lower > self.upper
            || (self.lower == self.upper && !(self.lower_closed && self.upper_closed))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let above = if self.lower_closed {
            *x >= self.lower
        } else {
            *x > self.lower
        };
        let below = if self.upper_closed {
            *x <= self.upper
        } else {
            *x < self.upper
        };
        above && below
    }

    pub fn intersect(&self, other: &BlockInterval) -> BlockInterval {
        let (lower, lower_closed) = match self.lower.cmp(&other.lower) {
            std::cmp::Ordering::Greater => (self.lower.clone(), self.lower_closed),
            std::cmp::Ordering::Less => (other.lower.clone(), other.lower_closed),
            std::cmp::Ordering::Equal => {
                (self.lower.clone(), self.lower_closed && other.lower_closed)
            }
        };
        let (upper, upper_closed) = match self.upper.cmp(&other.upper) {
            std::cmp::Ordering::Less => (self.upper.clone(), self.upper_closed),
            std::cmp::Ordering::Greater => (other.upper.clone(), other.upper_closed),
            std::cmp::Ordering::Equal => {
                (self.upper.clone(), self.upper_closed && other.upper_closed)
            }
        };
        BlockInterval {
            lower,
            upper,
            lower_closed,
            upper_closed,
        }
    }

    fn covers_unit(&self) -> bool {
        let zero = rational::zero();
        let one = rational::one();
        (self.lower < zero || (self.lower == zero && self.lower_closed))
            && (self.upper > one || (self.upper == one && self.upper_closed))
    }
}

/// `Pr[w1 in interval]` under `dist` (two features).
pub fn measure(dist: &WeightDistribution, iv: &BlockInterval) -> Value {
    if iv.is_empty() {
        return Value::zero();
    }
    if iv.covers_unit() {
        return Value::one();
    }
    match dist {
        WeightDistribution::UniformSimplex => {
            let lo = rational::max(iv.lower.clone(), rational::zero());
            let hi = rational::min(iv.upper.clone(), rational::one());
            Value::Exact(rational::max(hi - lo, rational::zero()))
        }
        WeightDistribution::Discrete(points) => Value::Exact(
            points
                .iter()
                .filter(|p| iv.contains(&p.weights[0]))
                .map(|p| &p.prob)
                .sum(),
        ),
        WeightDistribution::BetaTwoFeature { alpha, beta } => {
            let d = Beta::new(*alpha, *beta).expect("validated beta shape");
            let hi = rational::to_f64(&iv.upper).clamp(0.0, 1.0);
            let lo = rational::to_f64(&iv.lower).clamp(0.0, 1.0);
            Value::Real((d.cdf(hi) - d.cdf(lo)).max(0.0))
        }
    }
}

/// CDF of `w1` at `x` for a two-feature continuous distribution, `Pr[w1 <= x]`.
pub fn cdf_w1(dist: &WeightDistribution, x: &Rational) -> Value {
    measure(
        dist,
        &BlockInterval {
            lower: rational::zero(),
            upper: x.clone(),
            lower_closed: true,
            upper_closed: true,
        },
    )
}

/// Draws one weight vector (floating point) from a continuous distribution or a
/// discrete one by support index.
pub struct WeightSampler {
    kind: SamplerKind,
    dim: usize,
}

enum SamplerKind {
    Simplex,
    Beta(rand_distr::Beta<f64>),
    Discrete { cumulative: Vec<f64> },
}

impl WeightSampler {
    pub fn new(dist: &WeightDistribution, dim: usize) -> Self {
        let kind = match dist {
            WeightDistribution::UniformSimplex => SamplerKind::Simplex,
            WeightDistribution::BetaTwoFeature { alpha, beta } => {
                SamplerKind::Beta(rand_distr::Beta::new(*alpha, *beta).expect("validated beta shape"))
            }
            WeightDistribution::Discrete(points) => {
                let mut acc = 0.0;
                let cumulative = points
                    .iter()
                    .map(|p| {
                        acc += rational::to_f64(&p.prob);
                        acc
                    })
                    .collect();
                SamplerKind::Discrete { cumulative }
            }
        };
        WeightSampler { kind, dim }
    }

    /// Fills `out` with a weight vector. Discrete distributions return the
    /// support index instead and leave `out` untouched.
    pub fn sample<R: Rng>(&self, rng: &mut R, out: &mut [f64]) -> Option<usize> {
        match &self.kind {
            SamplerKind::Simplex => {
                let mut total = 0.0;
                for w in out.iter_mut().take(self.dim) {
                    let e: f64 = Exp1.sample(rng);
                    *w = e;
                    total += e;
                }
                for w in out.iter_mut().take(self.dim) {
                    *w /= total;
                }
                None
            }
            SamplerKind::Beta(b) => {
                let x = b.sample(rng);
                out[0] = x;
                out[1] = 1.0 - x;
                None
            }
            SamplerKind::Discrete { cumulative } => {
                let u: f64 = rng.random::<f64>() * cumulative.last().copied().unwrap_or(1.0);
                let idx = cumulative.partition_point(|&c| c <= u);
                Some(idx.min(cumulative.len() - 1))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SupportPoint;
    use crate::rational::frac;

    #[test]
    fn uniform_measure_clamps() {
        let iv = BlockInterval::closed(frac(-1, 2), frac(1, 4));
        assert_eq!(
            measure(&WeightDistribution::UniformSimplex, &iv),
            Value::Exact(frac(1, 4))
        );
        assert_eq!(
            measure(&WeightDistribution::UniformSimplex, &BlockInterval::empty()),
            Value::zero()
        );
    }

    #[test]
    fn discrete_measure_respects_closedness() {
        let dist = WeightDistribution::Discrete(vec![
            SupportPoint {
                weights: vec![frac(1, 2), frac(1, 2)],
                prob: frac(1, 3),
            },
            SupportPoint {
                weights: vec![frac(1, 1), frac(0, 1)],
                prob: frac(2, 3),
            },
        ]);
        let mut iv = BlockInterval::closed(frac(1, 2), frac(1, 1));
        assert_eq!(measure(&dist, &iv), Value::one());
        iv.lower_closed = false;
        assert_eq!(measure(&dist, &iv), Value::Exact(frac(2, 3)));
        let point = BlockInterval::closed(frac(1, 2), frac(1, 2));
        assert_eq!(measure(&dist, &point), Value::Exact(frac(1, 3)));
    }

    #[test]
    fn intersection_keeps_tightest_endpoint() {
        let a = BlockInterval::closed(frac(1, 5), frac(3, 5));
        let mut b = BlockInterval::closed(frac(1, 5), frac(1, 2));
        b.lower_closed = false;
        let c = a.intersect(&b);
        assert_eq!(c.lower, frac(1, 5));
        assert!(!c.lower_closed);
        assert_eq!(c.upper, frac(1, 2));
        assert!(BlockInterval::closed(frac(1, 2), frac(1, 3)).is_empty());
    }

    #[test]
    fn beta_measure_is_cdf_difference() {
        let dist = WeightDistribution::BetaTwoFeature {
            alpha: 2.0,
            beta: 2.0,
        };
        let v = measure(&dist, &BlockInterval::closed(frac(0, 1), frac(1, 2)));
        assert!((v.to_f64() - 0.5).abs() < 1e-12);
    }
}
