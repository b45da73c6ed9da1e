//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//! Criteria run sequentially so the timings are not skewed by each other.

use exitflow::experiments::donsker::ProfileOptions;
use exitflow::experiments::{
    bernoulli_perturbation_sim, circles_counterexample, donsker_exit_experiment, donsker_profile_experiment,
    m1_vs_j1_example, sharpness_example, sticking_example, CircleFamily, RandomWalkSpec, StepLaw,
};
use exitflow::nt_verification::{route_b_noncharacteristic, DiffusionSpec, Drift, Matrix, NeighborhoodSpec, Verdict, Volatility};
use exitflow::{canonical_rep, m1_upper_bound, BarrierField, BoundaryFn, CadlagPath, MonotonePath, Segment, TimeValue};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

const INF: TimeValue = TimeValue::Infinite;

fn fin(t: f64) -> TimeValue {
    TimeValue::Finite(t)
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn circles() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for n in [1, 10, 100] {
        // radius √2/2 is irrational, so it never lies on a circle of radius k/n
        let rec = circles_counterexample(&CircleFamily::new(n, 1, 2, 2).unwrap());
        let exact = Ratio::new(rec.dh_exact_num, rec.dh_exact_den);
        let row = rec.hit_circles == INF
            && rec.hit_disk == fin(0.0)
            && exact == Ratio::new(1, 2 * n)
            && exact <= Ratio::new(1, n);
        ok &= row;
        notes.push(format!("n={n} dH={}", exact));
    }
    outcome(ok, notes.join(" "))
}

fn sticking() -> Outcome {
    let mut ok = true;
    for n in [1u64, 10, 1000] {
        let rec = sticking_example(n).unwrap();
        ok &= (rec.tau, rec.tau_down, rec.tau_up) == (fin(1.0), INF, fin(1.0 - 1.0 / n as f64));
    }
    outcome(ok, "(tau, tau_down, tau_up) = (1, INF, 1 - 1/n)")
}

fn sharpness() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for n in [4u64, 100] {
        let rec = sharpness_example(n, 0.5).unwrap();
        let expected = 1.0 - 1.0 / (n as f64).sqrt();
        let err = rec.t_plus.finite().map_or(f64::INFINITY, |t| (t - expected).abs());
        ok &= err <= 1e-12 && rec.t_minus == fin(2.0);
        notes.push(format!("n={n} |T_plus - (1 - n^-1/2)|={err:.1e}"));
    }
    outcome(ok, notes.join(" "))
}

/// Band formula for the step-cluster profile: 1 up to 1/2, then `1 + k/n`
/// on `(1/2 + (k-1)/n², 1/2 + k/n²]`, then 2.
fn band_profile(u: Ratio<i64>, n: i64) -> Ratio<i64> {
    let half = Ratio::new(1, 2);
    if u <= half {
        return Ratio::from_integer(1);
    }
    if u > half + Ratio::new(1, n) {
        return Ratio::from_integer(2);
    }
    // smallest k with u <= 1/2 + k/n²
    let k = ((u - half) * Ratio::from_integer(n * n)).ceil().to_integer();
    Ratio::from_integer(1) + Ratio::new(k, n)
}

fn profile_table() -> Outcome {
    let n = 4;
    let (_, yn) = exitflow::experiments::counterexamples::m1_vs_j1_paths(n as u64).unwrap();
    let profile = exitflow::exit_profile(&yn, 0.25, 0.75).unwrap();
    let probes = ["0.3", "0.5", "0.51", "0.52", "0.55", "0.5625", "0.57", "0.6", "0.7", "0.74", "0.75", "0.26"];
    let mut bad = Vec::new();
    for p in probes {
        let digits = p.len() as u32 - 2;
        let u = Ratio::new(p[2..].parse::<i64>().unwrap(), 10i64.pow(digits));
        let want = band_profile(u, n);
        let want = *want.numer() as f64 / *want.denom() as f64;
        let got = profile.value_at(p.parse().unwrap()).unwrap();
        if got != fin(want) {
            bad.push(format!("u={p} got {got:?} want {want}"));
        }
    }
    let edge = band_profile(Ratio::new(1, 2) + Ratio::new(1, n), n) == Ratio::from_integer(2);
    outcome(bad.is_empty() && edge, if bad.is_empty() { "12 probes exact".into() } else { bad.join("; ") })
}

fn m1_vs_j1() -> Outcome {
    let mut m1 = Vec::new();
    for n in [10, 100, 1000] {
        m1.push(m1_vs_j1_example(n).unwrap().m1_upper);
    }
    let decreasing = m1.windows(2).all(|w| w[1] < w[0]);
    let mut j1 = Vec::new();
    for n in [4, 10, 100] {
        j1.push(m1_vs_j1_example(n).unwrap().j1_lower);
    }
    let ok = decreasing && m1[1] <= 0.1 && j1.iter().all(|&d| d >= 0.2);
    outcome(ok, format!("m1_upper {m1:?} j1_lower {j1:?}"))
}

fn bernoulli() -> Outcome {
    let rows = bernoulli_perturbation_sim(&[2, 10, 100], 10_000, 0).unwrap();
    let ok = rows.iter().all(|r| r.within_bars && r.finite_exits_exact);
    let detail = rows
        .iter()
        .map(|r| format!("n={} p_inf={:.4}±{:.4}", r.n, r.empirical_p_inf, r.three_sigma))
        .collect::<Vec<_>>()
        .join(" ");
    outcome(ok, detail)
}

fn donsker_exit() -> Outcome {
    let ks = |n| {
        let spec = RandomWalkSpec { law: StepLaw::Rademacher, n, seed: 0 };
        donsker_exit_experiment(&spec, 5000, BoundaryFn::Constant(1.0), 2.0).unwrap().ks.expect("constant level has an analytic law")
    };
    let (fine, coarse) = (ks(4096), ks(256));
    outcome(fine <= 0.05 && coarse >= fine - 0.02, format!("KS(4096)={fine:.4} KS(256)={coarse:.4}"))
}

fn donsker_profile() -> Outcome {
    let opts = ProfileOptions { u0: 0.5, u1: 1.5, ..ProfileOptions::default() };
    let means: Vec<f64> = [256, 1024, 4096]
        .into_iter()
        .map(|n| {
            let spec = RandomWalkSpec { law: StepLaw::StandardNormal, n, seed: 0 };
            donsker_profile_experiment(&spec, 500, &opts).unwrap().mean_m1_upper
        })
        .collect();
    outcome(means.windows(2).all(|w| w[1] < w[0]), format!("mean m1_upper {means:?}"))
}

fn route_b() -> Outcome {
    let nb = NeighborhoodSpec { horizon: 2.0, eta: 0.25, radius: 2.0, time_cells: 16, space_cells: 32 };
    let affine = BarrierField::moving_boundary(BoundaryFn::Linear { a: 1.0, b: 0.5 });
    let pass = route_b_noncharacteristic(&DiffusionSpec::scalar(1.0), &affine, &nb, 1.0).unwrap();
    let degenerate = DiffusionSpec::new(Drift::Constant(vec![0.0, 0.0]), Volatility::Constant(Matrix::diag(&[1.0, 0.0])))
        .unwrap();
    let flat = BarrierField::affine(vec![0.0, 1.0], BoundaryFn::Constant(1.0)).unwrap();
    let nb2 = NeighborhoodSpec { time_cells: 4, space_cells: 8, ..nb };
    // a zero minimum fails every c > 0; sample c across scales as well
    let fails = [1e-12, 1e-6, 1e-3, 0.5, 1.0, 10.0].iter().all(|&c| {
        let r = route_b_noncharacteristic(&degenerate, &flat, &nb2, c).unwrap();
        r.verdict == Verdict::Fail && r.min_norm == Some(0.0)
    });
    outcome(
        pass.verdict == Verdict::Pass && pass.min_norm == Some(1.0) && fails,
        format!("affine min_norm={:?}, degenerate fails for all sampled c: {fails}", pass.min_norm),
    )
}

fn random_monotone(rng: &mut ChaCha8Rng, horizon: f64) -> MonotonePath {
    let pieces = rng.random_range(1..10);
    let linear = rng.random_bool(0.5);
    let mut starts: Vec<f64> = (1..pieces).map(|_| rng.random_range(0.0..horizon)).collect();
    starts.push(0.0);
    starts.sort_by(f64::total_cmp);
    starts.dedup();
    let mut level = rng.random_range(-2.0..2.0);
    let mut segments: Vec<Segment> = Vec::new();
    for &s in &starts {
        if let Some(prev) = segments.last() {
            level = prev.value_at(s) + if rng.random_bool(0.7) { rng.random_range(0.0..1.0) } else { 0.0 };
        }
        let slope = if linear { rng.random_range(0.0..2.0) } else { 0.0 };
        segments.push(Segment::linear(s, level, slope));
    }
    let end = segments.last().unwrap().value_at(horizon) + rng.random_range(0.0..0.5);
    MonotonePath::new(CadlagPath::new(0.0, horizon, segments, end).unwrap()).unwrap()
}

fn f64_ends(g: &MonotonePath) -> (f64, f64) {
    (g.path().segments()[0].value, g.path().terminal())
}

fn appendix_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    // consecutive pairs share a horizon so the length bound applies to them
    let mut paths = Vec::with_capacity(1000);
    for _ in 0..500 {
        let horizon = rng.random_range(0.5..4.0);
        paths.push(random_monotone(&mut rng, horizon));
        paths.push(random_monotone(&mut rng, horizon));
    }
    let mut failures = Vec::new();
    for (i, g) in paths.iter().enumerate() {
        let p = g.path();
        let rep = canonical_rep(g);
        let on_graph = rep.knots().iter().all(|&(_, r, u)| {
            let (lo, hi) = (p.left_limit(r).unwrap(), p.eval(r).unwrap());
            lo.min(hi) - 1e-12 <= u && u <= lo.max(hi) + 1e-12
        });
        // r has slope at most 1 in ℓ, i.e. at most L in the rescaled parameter
        let lipschitz = rep.knots().windows(2).all(|w| w[1].1 - w[0].1 <= (w[1].0 - w[0].0) * (1.0 + 1e-12) + 1e-15);
        let zero = m1_upper_bound(g, g).unwrap() == 0.0;
        if !(on_graph && lipschitz && zero) {
            failures.push(format!("path {i}: graph={on_graph} lip={lipschitz} self={zero}"));
        }
    }
    for (i, w) in paths.chunks(2).enumerate() {
        let (f, g) = (f64_ends(&w[0]), f64_ends(&w[1]));
        let bound = (f.0 - g.0).abs() + (f.1 - g.1).abs();
        if (w[0].length() - w[1].length()).abs() > bound + 1e-12 {
            failures.push(format!("pair {i}: |L_f - L_g| exceeds endpoint bound"));
        }
    }
    outcome(failures.is_empty(), if failures.is_empty() { "1000 paths, 500 pairs".into() } else { failures.join("; ") })
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("circles counterexample", Duration::from_secs(1), circles),
        ("sticking example", Duration::from_secs(1), sticking),
        ("sharpness example", Duration::from_secs(1), sharpness),
        ("profile table", Duration::from_secs(1), profile_table),
        ("M1 vs J1 separation", Duration::from_secs(30), m1_vs_j1),
        ("Bernoulli perturbation", Duration::from_secs(10), bernoulli),
        ("Donsker exit law", Duration::from_secs(120), donsker_exit),
        ("Donsker profile convergence", Duration::from_secs(300), donsker_profile),
        ("Route B certificate", Duration::from_secs(1), route_b),
        ("monotone parametrization invariants", Duration::from_secs(10), appendix_invariants),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let ok = out.ok && in_time;
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {:<36} {}  [{:.2?} / {:?}{}] {}",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            elapsed,
            budget,
            if in_time { "" } else { " over budget" },
            out.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
