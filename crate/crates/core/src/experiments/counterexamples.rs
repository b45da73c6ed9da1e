//! Deterministic paths where small perturbations move exit times a lot,
//! and the profile family separating M1 from J1.

use super::stats::binomial_3sigma;
use super::substream;
use crate::error::{domain, Result};
use crate::first_passage::{exit_profile, first_passage, is_regular_level, ExitProfile};
use crate::path::{CadlagPath, Segment};
use crate::skorokhod::{j1_lower_bound_step, m1_upper_bound, MonotonePath, BISECTION_TOL};
use crate::time::TimeValue;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// `y(t) = min(t − 1, 0)` on `[0, 3]`: reaches 0 at `t = 1` and stays there.
pub fn sticking_path() -> CadlagPath {
    CadlagPath::new(0.0, 3.0, vec![Segment::linear(0.0, -1.0, 1.0), Segment::constant(1.0, 0.0)], 0.0)
        .expect("valid path")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StickingRecord {
    pub n: u64,
    pub tau: TimeValue,
    pub tau_down: TimeValue,
    pub tau_up: TimeValue,
    pub level_zero_regular: bool,
}

/// Exit times of the sticking path and of its shifts by `∓1/n`.
pub fn sticking_example(n: u64) -> Result<StickingRecord> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let y = sticking_path();
    let h = 1.0 / n as f64;
    Ok(StickingRecord {
        n,
        tau: first_passage(&y, 0.0),
        tau_down: first_passage(&y.shift(-h), 0.0),
        tau_up: first_passage(&y.shift(h), 0.0),
        level_zero_regular: is_regular_level(&y, 0.0)?.regular,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernoulliRow {
    pub n: u64,
    pub trials: usize,
    pub infinite_count: usize,
    pub empirical_p_inf: f64,
    pub expected_p_inf: f64,
    pub three_sigma: f64,
    pub within_bars: bool,
    /// The exit time every finite trial should produce, `1 − 1/n`.
    pub finite_exit: f64,
    pub finite_exits_exact: bool,
}

/// Shifts the sticking path up by `1/n` with probability `1 − 1/n` and
/// down otherwise, and records how often the exit disappears.
pub fn bernoulli_perturbation_sim(n_values: &[u64], trials: usize, seed: u64) -> Result<Vec<BernoulliRow>> {
    if trials < 100 {
        return domain("need at least 100 trials");
    }
    if n_values.contains(&0) {
        return domain("n must be at least 1");
    }
    let y = sticking_path();
    let rows = n_values
        .iter()
        .map(|&n| {
            let h = 1.0 / n as f64;
            let p_up = 1.0 - h;
            let taus: Vec<TimeValue> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let up = substream(seed, n, i as u64).random::<f64>() < p_up;
                    first_passage(&y.shift(if up { h } else { -h }), 0.0)
                })
                .collect();
            let finite_exit = 1.0 - h;
            let infinite_count = taus.iter().filter(|t| t.is_infinite()).count();
            let empirical = infinite_count as f64 / trials as f64;
            let three_sigma = binomial_3sigma(h, trials);
            BernoulliRow {
                n,
                trials,
                infinite_count,
                empirical_p_inf: empirical,
                expected_p_inf: h,
                three_sigma,
                within_bars: (empirical - h).abs() <= three_sigma,
                finite_exit,
                finite_exits_exact: taus.iter().filter_map(|t| t.finite()).all(|t| t == finite_exit),
            }
        })
        .collect();
    Ok(rows)
}

/// Number of chords used for the quadratic arc of [`sharpness_path`].
pub const SHARPNESS_CHORDS: usize = 256;

/// `u⋆ − (1 − t)²` on `[0, 1)`, `u⋆` on `[1, 2)`, `u⋆ + 1` on `[2, 3]`.
/// The arc is drawn with [`SHARPNESS_CHORDS`] chords. `extra_node = (t, gap)`
/// adds a node at `t` with value `u⋆ − gap`, so a caller who knows
/// `(1 − t)²` exactly can place a level crossing exactly on it.
pub fn sharpness_path(u_star: f64, extra_node: Option<(f64, f64)>) -> Result<CadlagPath> {
    if !u_star.is_finite() {
        return domain("u_star must be finite");
    }
    let mut nodes: Vec<(f64, f64)> = (0..=SHARPNESS_CHORDS)
        .map(|i| {
            let t = i as f64 / SHARPNESS_CHORDS as f64;
            (t, u_star - (1.0 - t) * (1.0 - t))
        })
        .collect();
    if let Some((t, gap)) = extra_node {
        if !(0.0..=1.0).contains(&t) {
            return domain("extra node must lie in [0, 1]");
        }
        match nodes.binary_search_by(|p| p.0.total_cmp(&t)) {
            Ok(i) => nodes[i].1 = u_star - gap,
            Err(i) => nodes.insert(i, (t, u_star - gap)),
        }
    }
    let mut segments: Vec<Segment> = nodes
        .windows(2)
        .map(|w| {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            let dt = t1 - t0;
            // never overshoot the next node through rounding
            let mut slope = (v1 - v0) / dt;
            while v0 + slope * dt > v1 {
                slope = slope.next_down();
            }
            Segment::linear(t0, v0, slope)
        })
        .collect();
    segments.push(Segment::constant(1.0, u_star));
    segments.push(Segment::constant(2.0, u_star + 1.0));
    CadlagPath::new(0.0, 3.0, segments, u_star + 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpnessRecord {
    pub n: u64,
    pub u_star: f64,
    pub t_base: TimeValue,
    pub t_plus: TimeValue,
    pub t_minus: TimeValue,
    /// `1 − n^{-1/2}`.
    pub expected_plus: f64,
    pub base_level_regular: bool,
}

/// First passages of `u⋆` by the sharpness path and its shifts by `±1/n`.
pub fn sharpness_example(n: u64, u_star: f64) -> Result<SharpnessRecord> {
    if n == 0 {
        return domain("n must be at least 1");
    }
    let h = 1.0 / n as f64;
    let root = 1.0 - (n as f64).sqrt().recip();
    let y = sharpness_path(u_star, Some((root, h)))?;
    Ok(SharpnessRecord {
        n,
        u_star,
        t_base: first_passage(&y, u_star),
        t_plus: first_passage(&y.shift(h), u_star),
        t_minus: first_passage(&y.shift(-h), u_star),
        expected_plus: root,
        base_level_regular: is_regular_level(&y, u_star)?.regular,
    })
}

/// Level interval of the M1-vs-J1 profiles.
pub const M1_J1_LEVELS: (f64, f64) = (0.25, 0.75);

/// The limit path (0, then 1/2 from t = 1, then 1 from t = 2) and its
/// approximation replacing the middle plateau by `n` small steps
/// `1/2 + k/n²` on `[1 + k/n, 1 + (k+1)/n)`.
pub fn m1_vs_j1_paths(n: u64) -> Result<(CadlagPath, CadlagPath)> {
    if n < 2 {
        return domain("n must be at least 2");
    }
    let y = CadlagPath::step(0.0, 3.0, &[(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)])?;
    let nf = n as f64;
    let mut steps = vec![(0.0, 0.0)];
    steps.extend((0..n).map(|k| (1.0 + k as f64 / nf, 0.5 + k as f64 / (nf * nf))));
    steps.push((2.0, 1.0));
    let yn = CadlagPath::step(0.0, 3.0, &steps)?;
    Ok((y, yn))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct M1VsJ1Record {
    pub n: u64,
    pub m1_upper: f64,
    pub j1_lower: f64,
    pub path_distance: f64,
    pub profile_n: ExitProfile,
    pub profile_limit: ExitProfile,
}

/// Profiles of [`m1_vs_j1_paths`] on `[1/4, 3/4]` with the M1 upper bound
/// and the certified J1 lower bound between them.
pub fn m1_vs_j1_example(n: u64) -> Result<M1VsJ1Record> {
    let (y, yn) = m1_vs_j1_paths(n)?;
    let (u0, u1) = M1_J1_LEVELS;
    let profile_limit = exit_profile(&y, u0, u1)?;
    let profile_n = exit_profile(&yn, u0, u1)?;
    let (f, g) = (profile_n.to_cadlag()?, profile_limit.to_cadlag()?);
    let m1_upper = m1_upper_bound(&MonotonePath::new(f.clone())?, &MonotonePath::new(g.clone())?)?;
    let j1_lower = j1_lower_bound_step(&f, &g, BISECTION_TOL)?;
    Ok(M1VsJ1Record { n, m1_upper, j1_lower, path_distance: yn.uniform_distance(&y)?, profile_n, profile_limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: TimeValue = TimeValue::Infinite;

    fn fin(t: f64) -> TimeValue {
        TimeValue::Finite(t)
    }

    #[test]
    fn sticking_values() {
        for (n, up) in [(1, 0.0), (10, 0.9), (1000, 0.999)] {
            let rec = sticking_example(n).unwrap();
            assert_eq!((rec.tau, rec.tau_down, rec.tau_up), (fin(1.0), INF, fin(up)));
            assert!(!rec.level_zero_regular);
        }
    }

    #[test]
    fn bernoulli_rows() {
        let rows = bernoulli_perturbation_sim(&[2, 10, 10_000], 10_000, 0).unwrap();
        for row in &rows {
            assert!(row.within_bars, "{row:?}");
            assert!(row.finite_exits_exact);
        }
        assert!((rows[0].empirical_p_inf - 0.5).abs() <= 0.015);
        let again = bernoulli_perturbation_sim(&[2], 10_000, 0).unwrap();
        assert_eq!(again[0], rows[0]);
        assert!(bernoulli_perturbation_sim(&[2], 50, 0).is_err());
    }

    #[test]
    fn sharpness_values() {
        for (n, plus) in [(1, 0.0), (4, 0.5), (100, 0.9)] {
            let rec = sharpness_example(n, 0.5).unwrap();
            assert_eq!(rec.t_base, fin(1.0));
            assert_eq!(rec.t_minus, fin(2.0));
            assert!((rec.t_plus.finite().unwrap() - plus).abs() <= 1e-12, "{rec:?}");
            assert!(!rec.base_level_regular);
        }
    }

    #[test]
    fn sharpness_arc_is_close_to_quadratic() {
        let y = sharpness_path(0.5, None).unwrap();
        for i in 0..100 {
            let t = i as f64 / 100.0;
            let exact = 0.5 - (1.0 - t) * (1.0 - t);
            assert!((y.eval(t).unwrap() - exact).abs() <= 1.0 / (256.0 * 256.0 * 4.0) + 1e-15);
        }
    }

    #[test]
    fn cluster_path_is_uniformly_close() {
        for n in [2, 3, 10, 100] {
            let (y, yn) = m1_vs_j1_paths(n).unwrap();
            assert!(yn.uniform_distance(&y).unwrap() <= 1.0 / n as f64);
        }
        assert!(m1_vs_j1_paths(1).is_err());
    }

    #[test]
    fn m1_vs_j1_separation() {
        let mut last = f64::INFINITY;
        for n in [10, 100, 1000] {
            let rec = m1_vs_j1_example(n).unwrap();
            assert!(rec.m1_upper < last);
            last = rec.m1_upper;
        }
        assert!(last <= 0.01);
        for n in [4, 10, 100] {
            assert!(m1_vs_j1_example(n).unwrap().j1_lower >= 0.2);
        }
        let rec = m1_vs_j1_example(10).unwrap();
        assert_eq!(rec.profile_n.value_at(0.545).unwrap(), fin(1.5));
    }
}
