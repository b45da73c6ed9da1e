mod commands;
mod config;
mod output;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use exitflow::experiments::StepLaw;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exit times of paths from moving domains: counterexamples, Skorokhod
/// metric bounds, non-tangency checks and random-walk experiments.
#[derive(Parser, Debug)]
#[command(name = "exitflow", version)]
struct Cli {
    /// Seed for Monte Carlo experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for `<experiment>_<n>_<seed>.json` and `.csv` outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Standard output format; `csv` prints the per-sample or per-row table when there is one.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Flat `key = value` file with defaults for any flag of the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Closed-form examples where small perturbations move exit times a lot.
    #[command(subcommand)]
    Counterexample(Counterexample),
    /// Scaled random walks against a boundary.
    #[command(subcommand)]
    Donsker(Donsker),
    /// Skorokhod distance bounds between two path files.
    #[command(subcommand)]
    Metrics(Metrics),
    /// Non-tangency checks.
    #[command(subcommand)]
    Nt(Nt),
    /// Exit-time profiles.
    #[command(subcommand)]
    Profile(Profile),
}

#[derive(Subcommand, Debug)]
enum Counterexample {
    /// Concentric circles of radius k/n closing in on the unit disk in Hausdorff
    /// distance, while a path on a circle of irrational radius never meets them.
    Circles(CirclesArgs),
    /// A path that climbs to the boundary and stays on it: shifting it down by
    /// 1/n removes the exit, shifting it up moves the exit to 1 − 1/n.
    Sticking(NArgs),
    /// The sticking path shifted up by 1/n with probability 1 − 1/n and down
    /// otherwise; reports how often the exit disappears.
    Bernoulli(BernoulliArgs),
    /// A quadratic touch of the level: shifting up by 1/n moves the exit back
    /// by n^(-1/2), shifting down moves it to the next jump.
    Sharpness(SharpnessArgs),
    /// A jump split into n small steps: exit profiles converge in M1 but stay
    /// apart in J1.
    #[command(name = "m1-vs-j1")]
    M1VsJ1(NArgs),
}

#[derive(Args, Debug)]
struct NArgs {
    #[arg(long, default_value_t = 10)]
    n: u64,
}

#[derive(Args, Debug)]
struct CirclesArgs {
    #[arg(long, default_value_t = 10)]
    n: u64,
    /// Radius is p·√s / q.
    #[arg(long, default_value_t = 1)]
    p: u64,
    #[arg(long, default_value_t = 2)]
    q: u64,
    #[arg(long, default_value_t = 2)]
    s: u64,
}

#[derive(Args, Debug)]
struct BernoulliArgs {
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',', default_value = "2,10,100")]
    n: Vec<u64>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
}

#[derive(Args, Debug)]
struct SharpnessArgs {
    #[arg(long, default_value_t = 4)]
    n: u64,
    #[arg(long, default_value_t = 0.5)]
    u_star: f64,
}

#[derive(Subcommand, Debug)]
enum Donsker {
    /// Exit times of X(t) = S_[nt]/√n from {x < g(t)}, with the Kolmogorov–Smirnov
    /// distance to the Brownian reflection law when g is constant.
    Exit(DonskerExitArgs),
    /// M1 distance between the exit profile of a normal-increment walk and that of
    /// the fine-grid Brownian path it is read off.
    Profile(DonskerProfileArgs),
}

#[derive(Args, Debug)]
struct DonskerExitArgs {
    #[arg(long, default_value = "rademacher")]
    law: StepLaw,
    #[arg(long, default_value_t = 4096)]
    n: usize,
    #[arg(long, default_value_t = 5000)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Family::Constant)]
    boundary: Family,
    /// Boundary value at t = 0.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    level: f64,
    /// Coefficient of t (linear) or √t (sqrt).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    slope: f64,
    #[arg(long, default_value_t = 2.0)]
    horizon: f64,
}

#[derive(Args, Debug)]
struct DonskerProfileArgs {
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 500)]
    samples: usize,
    #[arg(long, default_value_t = 0.5)]
    u0: f64,
    #[arg(long, default_value_t = 1.5)]
    u1: f64,
    /// Constant boundary the profiles are taken against.
    #[arg(long, default_value_t = 0.0)]
    level: f64,
    #[arg(long, default_value_t = 2.0)]
    horizon: f64,
    /// Cells of the fine Brownian grid on [0, horizon].
    #[arg(long, default_value_t = 1 << 14)]
    fine_cells: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Constant,
    Linear,
    Sqrt,
}

#[derive(Subcommand, Debug)]
enum Metrics {
    /// M1 upper bound (monotone paths), J1 upper bound with its time change, and a
    /// certified J1 lower bound (step paths). Non-applicable bounds are null.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// Interior knots of the searched time changes.
    #[arg(long, default_value_t = 8)]
    knots: usize,
    #[arg(long, default_value_t = 4)]
    iters: usize,
    /// Bisection tolerance of the J1 lower bound.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
}

#[derive(Subcommand, Debug)]
enum Nt {
    /// Classify the exit of a path as no exit, genuine crossing or a failure of the
    /// buffer or regularity condition; optionally certify non-tangency for a
    /// constant-coefficient diffusion via a grid bound on |σᵀ∇Φ| near the boundary.
    Check(NtArgs),
}

/// Barrier `Φ`: an affine moving boundary by default, or a grid / point cloud file.
#[derive(Args, Debug, Clone)]
struct BarrierArgs {
    /// Boundary family of `g(t)`: `level`, `level + slope·t` or `level + slope·√t`.
    #[arg(long, value_enum, default_value_t = Family::Constant)]
    boundary: Family,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    level: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    slope: f64,
    /// Normal of the affine barrier ⟨normal, x⟩ − g(t); defaults to [1].
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    normal: Vec<f64>,
    /// CSV grid `t,x1..xd,phi` interpolated multilinearly.
    #[arg(long, conflicts_with = "cloud")]
    grid: Option<PathBuf>,
    /// CSV point cloud `t,x1..xd`; the barrier is minus the distance to it.
    #[arg(long)]
    cloud: Option<PathBuf>,
    /// Exit level u: the domain becomes {Φ < u}.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    shift: f64,
}

#[derive(Args, Debug)]
struct NtArgs {
    /// Path file, one per coordinate.
    #[arg(long, required = true)]
    path: Vec<PathBuf>,
    #[command(flatten)]
    barrier: BarrierArgs,
    /// Defaults to the path's horizon.
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    route_b: bool,
    /// Diagonal of a constant volatility matrix.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    sigma: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 0.25)]
    eta: f64,
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    #[arg(long, default_value_t = 16)]
    time_cells: usize,
    #[arg(long, default_value_t = 32)]
    space_cells: usize,
}

#[derive(Subcommand, Debug)]
enum Profile {
    /// Exit-time profile u ↦ inf{t : Φ(t, x(t)) ≥ u} of a path on [u0, u1].
    Compute(ProfileArgs),
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[arg(long, required = true)]
    path: Vec<PathBuf>,
    #[command(flatten)]
    barrier: BarrierArgs,
    #[arg(long, allow_negative_numbers = true)]
    u0: f64,
    #[arg(long, allow_negative_numbers = true)]
    u1: f64,
}

fn set_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("EXITFLOW_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| anyhow::anyhow!("EXITFLOW_THREADS must be a count, got {raw:?}"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn parse_cli() -> anyhow::Result<Cli> {
    let argv: Vec<String> = std::env::args().collect();
    let command = Cli::command();
    let matches = command.clone().get_matches_from(&argv);
    let Some(path) = matches.get_one::<PathBuf>("config") else {
        return Ok(Cli::from_arg_matches(&matches)?);
    };
    let extra = config::as_args(&config::load(path)?, &command, &matches)?;
    let matches = command.try_get_matches_from(argv.into_iter().chain(extra))?;
    Ok(Cli::from_arg_matches(&matches)?)
}

fn main() -> ExitCode {
    let cli = match parse_cli() {
        Ok(cli) => cli,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = set_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let report = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = output::emit(&report, cli.format, cli.out.as_deref(), cli.seed) {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    if report.inconclusive {
        eprintln!("result is INCONCLUSIVE");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
