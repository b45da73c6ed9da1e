//! Empirical distribution functions and the Kolmogorov–Smirnov distance.

use crate::time::TimeValue;
use serde::Serialize;

/// Empirical CDF of a sample of possibly infinite times.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ecdf {
    finite: Vec<f64>,
    infinite: usize,
}

impl Ecdf {
    pub fn new(samples: &[TimeValue]) -> Self {
        let mut finite: Vec<f64> = samples.iter().filter_map(|t| t.finite()).collect();
        finite.sort_by(f64::total_cmp);
        let infinite = samples.len() - finite.len();
        Ecdf { finite, infinite }
    }

    pub fn from_values(values: &[f64]) -> Self {
        let mut finite = values.to_vec();
        finite.sort_by(f64::total_cmp);
        Ecdf { finite, infinite: 0 }
    }

    pub fn len(&self) -> usize {
        self.finite.len() + self.infinite
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn finite_values(&self) -> &[f64] {
        &self.finite
    }

    pub fn infinite_count(&self) -> usize {
        self.infinite
    }

    /// `#{x ≤ t} / N`.
    pub fn eval(&self, t: f64) -> f64 {
        self.finite.partition_point(|&x| x <= t) as f64 / self.len() as f64
    }

    /// `#{x < t} / N`.
    pub fn eval_left(&self, t: f64) -> f64 {
        self.finite.partition_point(|&x| x < t) as f64 / self.len() as f64
    }
}

/// `sup_x max(|F̂(x−) − F(x−)|, |F̂(x) − F(x)|)` over the finite sample
/// points, with `F(x−)` read at the float just below `x`. For continuous
/// `F` this is the usual two-sided statistic; a step `F` with the sample's
/// own jumps gives 0. Empty samples give 0.
pub fn ks_statistic(ecdf: &Ecdf, cdf: impl Fn(f64) -> f64) -> f64 {
    let n = ecdf.len() as f64;
    let xs = ecdf.finite_values();
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let below = cdf(x.next_down());
        d = d.max((i as f64 / n - below).abs()).max((j as f64 / n - cdf(x)).abs());
        i = j;
    }
    d
}

/// Three-sigma half-width of a binomial proportion estimate.
pub fn binomial_3sigma(p: f64, trials: usize) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

/// DKW half-width `sqrt(ln(2/α) / 2N)` at level `α = 0.0027` (three sigma).
pub fn dkw_3sigma(samples: usize) -> f64 {
    ((2.0f64 / 0.0027).ln() / (2.0 * samples as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ecdf_counts() {
        let e = Ecdf::new(&[TimeValue::Finite(0.5), TimeValue::Infinite, TimeValue::Finite(0.25), TimeValue::Finite(0.5)]);
        assert_eq!(e.len(), 4);
        assert_eq!(e.infinite_count(), 1);
        assert_eq!(e.eval(0.5), 0.75);
        assert_eq!(e.eval_left(0.5), 0.25);
        assert_eq!(e.eval(100.0), 0.75);
    }

    #[test]
    fn ks_examples() {
        assert_eq!(ks_statistic(&Ecdf::from_values(&[0.5]), |x| x), 0.5);
        let e = Ecdf::from_values(&[0.1, 0.2, 0.2, 0.7]);
        assert_eq!(ks_statistic(&e, |x| e.eval(x)), 0.0);
        assert_eq!(ks_statistic(&e, |x| e.eval(x + 0.05)), 0.5);
    }

    #[test]
    fn ks_uniform_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
        let d = ks_statistic(&Ecdf::from_values(&xs), |x| x.clamp(0.0, 1.0));
        assert!(d <= 0.03, "ks {d}");
        assert!(d <= dkw_3sigma(10_000));
    }
}
