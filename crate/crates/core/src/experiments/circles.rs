//! Concentric circles converging to the unit disk in Hausdorff distance
//! while a circular path never meets them.

use crate::error::{domain, Result};
use crate::time::TimeValue;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

/// `K_n = ⋃_{k=0..n} {|z| = k/n}` together with the path radius
/// `r = (p/q)·√s`, `s` square-free.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CircleFamily {
    pub n: u64,
    pub p: u64,
    pub q: u64,
    pub s: u64,
}

impl CircleFamily {
    pub fn new(n: u64, p: u64, q: u64, s: u64) -> Result<Self> {
        if n == 0 || p == 0 || q == 0 || s == 0 {
            return domain("circle family needs n, p, q, s >= 1");
        }
        if !square_free(s) {
            return domain(format!("{s} is not square-free"));
        }
        // r < 1  <=>  p² s < q²
        let lhs = (p as u128) * (p as u128) * (s as u128);
        if lhs >= (q as u128) * (q as u128) {
            return domain("path radius must lie in (0, 1)");
        }
        Ok(CircleFamily { n, p, q, s })
    }

    /// The radius as a float, for display.
    pub fn radius(&self) -> f64 {
        self.p as f64 / self.q as f64 * (self.s as f64).sqrt()
    }

    pub fn is_irrational(&self) -> bool {
        self.s > 1
    }
}

fn square_free(s: u64) -> bool {
    let mut k = 2u64;
    while k.saturating_mul(k) <= s {
        if s.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CirclesRecord {
    pub n: u64,
    pub radius: f64,
    /// `1/n`, the nearest-circle bound.
    pub dh_bound: f64,
    /// `1/(2n)`: the largest distance from a disk point to the circles.
    pub dh_exact: f64,
    pub dh_exact_num: u64,
    pub dh_exact_den: u64,
    pub hit_circles: TimeValue,
    pub hit_disk: TimeValue,
    /// The path starts on one of the circles.
    pub degenerate: bool,
}

/// Exact record for the circle family; no sampling or floating comparison.
pub fn circles_counterexample(fam: &CircleFamily) -> CirclesRecord {
    let n = fam.n;
    let dh_bound = Ratio::new(1u64, n);
    // radii k/n are 1/n apart; the midpoint of each gap is farthest from K_n,
    // and K_n ⊂ B contributes nothing
    let dh_exact = Ratio::new(1u64, 2 * n);
    debug_assert!(dh_exact <= dh_bound);
    // r = k/n needs r rational (s = 1) and p/q·n integral
    let r = Ratio::new(fam.p, fam.q);
    let degenerate = !fam.is_irrational() && (r * Ratio::from_integer(n)).is_integer();
    CirclesRecord {
        n,
        radius: fam.radius(),
        dh_bound: ratio_f64(dh_bound),
        dh_exact: ratio_f64(dh_exact),
        dh_exact_num: *dh_exact.numer(),
        dh_exact_den: *dh_exact.denom(),
        hit_circles: if degenerate { TimeValue::Finite(0.0) } else { TimeValue::Infinite },
        // |γ(0)| = r < 1
        hit_disk: TimeValue::Finite(0.0),
        degenerate,
    }
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `max{sup_a dist(a, B), sup_b dist(b, A)}` for finite point clouds.
pub fn hausdorff_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return domain("Hausdorff distance needs nonempty point sets");
    }
    let dim = a[0].len();
    if a.iter().chain(b).any(|p| p.len() != dim) {
        return domain("points must share a dimension");
    }
    let directed = |from: &[Vec<f64>], to: &[Vec<f64>]| -> f64 {
        from.par_iter()
            .map(|p| {
                to.iter()
                    .map(|q| p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum::<f64>())
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| 0.0, f64::max)
            .sqrt()
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// `per_circle` equally spaced points on each circle of `K_n` (the origin
/// once).
pub fn sample_circles(n: u64, per_circle: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0, 0.0]];
    for k in 1..=n {
        out.extend(ring(k as f64 / n as f64, per_circle));
    }
    out
}

/// Points of the closed unit disk on `rings` concentric rings.
pub fn sample_disk(rings: usize, per_ring: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0, 0.0]];
    for j in 1..=rings {
        out.extend(ring(j as f64 / rings as f64, per_ring));
    }
    out
}

fn ring(radius: f64, points: usize) -> impl Iterator<Item = Vec<f64>> {
    (0..points).map(move |i| {
        let angle = std::f64::consts::TAU * i as f64 / points as f64;
        vec![radius * angle.cos(), radius * angle.sin()]
    })
}
