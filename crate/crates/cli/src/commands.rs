use crate::{BarrierArgs, Cli, Cmd, Counterexample, Donsker, Family, Metrics, Nt, Profile};
use anyhow::{bail, Context, Result};
use exitflow::barrier::DEFAULT_RESOLUTION;
use exitflow::experiments::donsker::{Comparison, ProfileOptions};
use exitflow::experiments::{self as ex, CircleFamily, RandomWalkSpec};
use exitflow::io::{read_grid_csv, read_point_cloud_csv};
use exitflow::nt_verification::{
    route_a_overshoot, route_b_noncharacteristic, DiffusionSpec, Drift, Matrix, NeighborhoodSpec, Verdict,
    Volatility,
};
use exitflow::{
    check_nt, exit_profile, j1_lower_bound_step, j1_upper_bound, m1_upper_bound, scalarize, BarrierField,
    BoundaryFn, CadlagPath, MonotonePath, TimeValue, VectorPath,
};
use serde_json::{json, Value};
use std::fs::File;
use std::path::{Path, PathBuf};

/// What a command produced: a summary record and an optional table.
pub struct Report {
    pub name: &'static str,
    /// Sample size tag used in output file names; `None` for commands on files.
    pub n: Option<String>,
    pub summary: Value,
    pub table: Option<String>,
    pub inconclusive: bool,
}

impl Report {
    fn new(name: &'static str, n: Option<String>, summary: Value) -> Self {
        Report { name, n, summary, table: None, inconclusive: false }
    }

    fn with_table(mut self, table: String) -> Self {
        self.table = Some(table);
        self
    }
}

fn to_value(record: &impl serde::Serialize) -> Value {
    serde_json::to_value(record).expect("records serialize")
}

fn boundary_fn(family: Family, level: f64, slope: f64) -> BoundaryFn {
    match family {
        Family::Constant => BoundaryFn::Constant(level),
        Family::Linear => BoundaryFn::Linear { a: level, b: slope },
        Family::Sqrt => BoundaryFn::Sqrt { a: level, b: slope },
    }
}

fn fmt_time(t: TimeValue) -> String {
    match t {
        TimeValue::Finite(x) => format!("{x:.16e}"),
        TimeValue::Infinite => "INF".into(),
    }
}

pub fn read_path(path: &Path) -> Result<CadlagPath> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.parse().with_context(|| format!("parsing {}", path.display()))
}

fn read_vector(paths: &[PathBuf]) -> Result<VectorPath> {
    let components = paths.iter().map(|p| read_path(p)).collect::<Result<Vec<_>>>()?;
    Ok(VectorPath::new(components)?)
}

fn barrier(args: &BarrierArgs, dim: usize, horizon: f64) -> Result<BarrierField> {
    let phi = if let Some(grid) = &args.grid {
        let file = File::open(grid).with_context(|| format!("opening {}", grid.display()))?;
        BarrierField::Grid(read_grid_csv(file).with_context(|| format!("reading grid {}", grid.display()))?)
    } else if let Some(cloud) = &args.cloud {
        let file = File::open(cloud).with_context(|| format!("opening {}", cloud.display()))?;
        BarrierField::Distance(read_point_cloud_csv(file, horizon).with_context(|| format!("reading {}", cloud.display()))?)
    } else {
        let g = boundary_fn(args.boundary, args.level, args.slope);
        if args.normal.is_empty() {
            if dim != 1 {
                bail!("a {dim}-dimensional path needs --normal");
            }
            BarrierField::moving_boundary(g)
        } else {
            BarrierField::affine(args.normal.clone(), g)?
        }
    };
    if phi.dim() != dim {
        bail!("barrier has dimension {} but the path has {dim} coordinates", phi.dim());
    }
    Ok(if args.shift != 0.0 { phi.shifted(args.shift) } else { phi })
}

pub fn run(cli: &Cli) -> Result<Report> {
    let seed = cli.seed;
    match &cli.command {
        Cmd::Counterexample(c) => counterexample(c, seed),
        Cmd::Donsker(Donsker::Exit(a)) => {
            let spec = RandomWalkSpec { law: a.law, n: a.n, seed };
            let rec = ex::donsker_exit_experiment(&spec, a.samples, boundary_fn(a.boundary, a.level, a.slope), a.horizon)?;
            let mut table = String::from("sample,exit_time\n");
            for (i, t) in rec.exit_times.iter().enumerate() {
                table.push_str(&format!("{i},{}\n", fmt_time(*t)));
            }
            let mut report = Report::new("donsker-exit", Some(a.n.to_string()), to_value(&rec)).with_table(table);
            report.inconclusive = rec.comparison == Comparison::Inconclusive;
            Ok(report)
        }
        Cmd::Donsker(Donsker::Profile(a)) => {
            let spec = RandomWalkSpec { law: exitflow::experiments::StepLaw::StandardNormal, n: a.n, seed };
            let opts = ProfileOptions { u0: a.u0, u1: a.u1, level: a.level, horizon: a.horizon, fine_cells: a.fine_cells };
            let rec = ex::donsker_profile_experiment(&spec, a.samples, &opts)?;
            let mut table = String::from("sample,m1_upper\n");
            for (i, d) in rec.per_sample.iter().enumerate() {
                table.push_str(&format!("{i},{d:.16e}\n"));
            }
            Ok(Report::new("donsker-profile", Some(a.n.to_string()), to_value(&rec)).with_table(table))
        }
        Cmd::Metrics(Metrics::Compare(a)) => {
            let (f, g) = (read_path(&a.a)?, read_path(&a.b)?);
            let m1 = match (MonotonePath::new(f.clone()), MonotonePath::new(g.clone())) {
                (Ok(mf), Ok(mg)) => Some(m1_upper_bound(&mf, &mg)?),
                _ => None,
            };
            let j1 = j1_upper_bound(&f, &g, a.knots, a.iters)?;
            let lower = if f.is_step() && g.is_step() { Some(j1_lower_bound_step(&f, &g, a.tol)?) } else { None };
            let summary = json!({
                "m1_upper": m1,
                "j1_upper": j1.cost,
                "j1_lower": lower,
                "lambda_knots": j1.lambda.knots(),
            });
            Ok(Report::new("metrics-compare", None, summary))
        }
        Cmd::Nt(Nt::Check(a)) => {
            let x = read_vector(&a.path)?;
            let horizon = a.horizon.unwrap_or(x.horizon());
            let phi = barrier(&a.barrier, x.dim(), horizon)?;
            let report = check_nt(&x, &phi, horizon)?;
            let y = scalarize(&x, &phi, DEFAULT_RESOLUTION)?.restrict(x.start(), horizon)?;
            let route_a = route_a_overshoot(&y).ok().map(|(positive, size)| json!({"overshoot_positive": positive, "overshoot": size}));
            let mut inconclusive = false;
            let route_b = if a.route_b {
                if a.sigma.len() != x.dim() {
                    bail!("--sigma needs {} entries", x.dim());
                }
                let diffusion =
                    DiffusionSpec::new(Drift::Constant(vec![0.0; x.dim()]), Volatility::Constant(Matrix::diag(&a.sigma)))?;
                let nb = NeighborhoodSpec {
                    horizon,
                    eta: a.eta,
                    radius: a.radius,
                    time_cells: a.time_cells,
                    space_cells: a.space_cells,
                };
                let r = route_b_noncharacteristic(&diffusion, &phi, &nb, a.c)?;
                inconclusive = r.verdict == Verdict::Inconclusive;
                Some(to_value(&r))
            } else {
                None
            };
            let nt: Value = serde_json::from_str(&report.to_json()).expect("report is JSON");
            let summary = json!({"nt": nt, "route_a": route_a, "route_b": route_b});
            let mut out = Report::new("nt-check", None, summary);
            out.inconclusive = inconclusive;
            Ok(out)
        }
        Cmd::Profile(Profile::Compute(a)) => {
            let x = read_vector(&a.path)?;
            let phi = barrier(&a.barrier, x.dim(), x.horizon())?;
            let y = scalarize(&x, &phi, DEFAULT_RESOLUTION)?;
            let profile = exit_profile(&y, a.u0, a.u1)?;
            let mut levels = vec![a.u0];
            levels.extend(profile.breakpoints());
            levels.push(a.u1);
            levels.dedup();
            let points = levels
                .into_iter()
                .map(|u| Ok(json!({"u": u, "tau": to_value(&profile.value_at(u)?)})))
                .collect::<Result<Vec<_>>>()?;
            let summary = json!({"u0": a.u0, "u1": a.u1, "points": points});
            Ok(Report::new("profile", None, summary).with_table(profile.to_csv()))
        }
    }
}

fn counterexample(c: &Counterexample, seed: u64) -> Result<Report> {
    Ok(match c {
        Counterexample::Circles(a) => {
            let rec = ex::circles_counterexample(&CircleFamily::new(a.n, a.p, a.q, a.s)?);
            Report::new("circles", Some(a.n.to_string()), to_value(&rec))
        }
        Counterexample::Sticking(a) => {
            Report::new("sticking", Some(a.n.to_string()), to_value(&ex::sticking_example(a.n)?))
        }
        Counterexample::Bernoulli(a) => {
            let rows = ex::bernoulli_perturbation_sim(&a.n, a.trials, seed)?;
            let tag = a.n.iter().map(u64::to_string).collect::<Vec<_>>().join("-");
            Report::new("bernoulli", Some(tag), to_value(&rows))
        }
        Counterexample::Sharpness(a) => {
            Report::new("sharpness", Some(a.n.to_string()), to_value(&ex::sharpness_example(a.n, a.u_star)?))
        }
        Counterexample::M1VsJ1(a) => {
            let rec = ex::m1_vs_j1_example(a.n)?;
            let mut table = String::from("profile,u_breakpoint,tau,kind\n");
            for (name, p) in [("approx", &rec.profile_n), ("limit", &rec.profile_limit)] {
                for line in p.to_csv().lines().skip(1) {
                    table.push_str(&format!("{name},{line}\n"));
                }
            }
            let summary = json!({
                "n": rec.n,
                "m1_upper": rec.m1_upper,
                "j1_lower": rec.j1_lower,
                "path_distance": rec.path_distance,
            });
            Report::new("m1-vs-j1", Some(a.n.to_string()), summary).with_table(table)
        }
    })
}
