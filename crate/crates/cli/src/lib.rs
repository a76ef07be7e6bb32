//! Command-line experiment harness for `polyinv`.

pub mod config;
pub mod error;
pub mod examples;
pub mod output;
pub mod sample;
pub mod solve;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use polyinv::analysis::{run_suite, SUITES};
use polyinv::matrices::{gen_rhs, write_matrix_market, write_matrix_market_columns, RhsKind, RhsSpec};

use crate::config::{Generator, RawConfig, SEED_ENV};
use crate::error::{CliError, CliResult};
use crate::examples::{ExampleArgs, Scale};
use crate::sample::{parse_grid, read_points, sample_csv, StoredPolynomial};

#[derive(Debug, Parser)]
#[command(name = "polyinv", version, about = "Polynomial approximations of the inverse for many right-hand sides")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated test matrix (and optionally right-hand sides) in
    /// Matrix Market format.
    Gen(GenArgs),
    /// Solve one or more systems and write residual_history.csv,
    /// report.json and poly.json.
    Solve(SolveArgs),
    /// Evaluate a stored polynomial at sample points.
    SamplePoly(SampleArgs),
    /// Run a randomized sweep of an inequality check.
    Verify(VerifyArgs),
    /// Run a fixed experiment and write table.json.
    Example(ExampleCmd),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Generator spec such as convdiff2d:50,2,0,0.
    #[arg(long = "gen")]
    pub generator: String,
    /// Output .mtx file for the matrix.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write this many right-hand sides (array format) to --rhs-out.
    #[arg(long, default_value_t = 0)]
    pub nrhs: usize,
    #[arg(long)]
    pub rhs_out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Every flag may also be given as `key = value` in the --config file;
/// flags win.
#[derive(Debug, Args, Default)]
pub struct SolveArgs {
    /// Configuration file with one `key = value` per line.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Generator spec, e.g. convdiff2d:50,2,0,0.
    #[arg(long = "gen")]
    pub generator: Option<String>,
    /// Matrix Market file.
    #[arg(long)]
    pub mtx: Option<String>,
    /// Right-hand sides as an array-format Matrix Market file.
    #[arg(long)]
    pub rhs_file: Option<String>,
    /// normal_unit or four_phase.
    #[arg(long)]
    pub rhs_kind: Option<String>,
    #[arg(long)]
    pub nrhs: Option<String>,
    /// gmres, gmres_restarted, double, bicg, bicgstab or deflated.
    #[arg(long)]
    pub method: Option<String>,
    /// Tolerance for the first system (alias of --rtol1).
    #[arg(long, alias = "rtol1")]
    pub rtol: Option<String>,
    #[arg(long)]
    pub rtol2: Option<String>,
    #[arg(long)]
    pub rtol3: Option<String>,
    #[arg(long, alias = "d-phi-in")]
    pub dphi_in: Option<String>,
    /// Restart length of gmres_restarted.
    #[arg(long, short = 'm')]
    pub restart: Option<String>,
    #[arg(long)]
    pub nev: Option<String>,
    #[arg(long)]
    pub max_reapply: Option<String>,
    #[arg(long)]
    pub eig_residual_max: Option<String>,
    #[arg(long)]
    pub pofcutoff: Option<String>,
    /// none, basic or updating.
    #[arg(long)]
    pub stabilization: Option<String>,
    /// none or ilu0.
    #[arg(long)]
    pub precond: Option<String>,
    #[arg(long)]
    pub max_it: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub threads: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// poly.json written by solve (or a bare polynomial).
    pub poly: PathBuf,
    /// x0,x1,nx or x0,x1,nx,y0,y1,ny.
    #[arg(long, conflicts_with = "points")]
    pub grid: Option<String>,
    /// File with one point per line, `re` or `re,im`.
    #[arg(long)]
    pub points: Option<PathBuf>,
    /// CSV output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// thm_general, thm_normal, hritz_bound, interlacing, second_rhs or crouzeix.
    pub suite: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// JSON output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExampleCmd {
    pub id: u32,
    #[arg(long, value_enum, default_value_t = Scale::Desk)]
    pub scale: Scale,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Matrix Market file (example 8).
    #[arg(long)]
    pub mtx: Option<PathBuf>,
    /// Output directory (default out/example-<id>).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn env_seed() -> Option<String> {
    std::env::var(SEED_ENV).ok().filter(|s| !s.trim().is_empty())
}

fn seed_or_env(seed: Option<u64>) -> CliResult<u64> {
    match (seed, env_seed()) {
        (Some(s), _) => Ok(s),
        (None, Some(s)) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV} must be an unsigned integer, got '{s}'"))),
        (None, None) => Ok(0),
    }
}

/// Merges the config file and the flags of `solve`.
pub fn solve_config(args: &SolveArgs) -> CliResult<config::RunConfig> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    if args.generator.is_some() && args.mtx.is_some() {
        return Err(CliError::Config("give either --gen or --mtx, not both".into()));
    }
    let flags = [
        ("matrix", &args.generator),
        ("matrix", &args.mtx),
        ("rhs_file", &args.rhs_file),
        ("rhs_kind", &args.rhs_kind),
        ("nrhs", &args.nrhs),
        ("method", &args.method),
        ("rtol1", &args.rtol),
        ("rtol2", &args.rtol2),
        ("rtol3", &args.rtol3),
        ("d_phi_in", &args.dphi_in),
        ("restart", &args.restart),
        ("nev", &args.nev),
        ("max_reapply", &args.max_reapply),
        ("eig_residual_max", &args.eig_residual_max),
        ("pofcutoff", &args.pofcutoff),
        ("stabilization", &args.stabilization),
        ("precond", &args.precond),
        ("max_it", &args.max_it),
        ("seed", &args.seed),
        ("threads", &args.threads),
        ("out", &args.out),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            raw.set(key, v)?;
        }
    }
    raw.resolve(env_seed())
}

/// Executes a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(&args),
        Command::Solve(args) => {
            let cfg = solve_config(&args)?;
            let out = solve::cmd_solve(&cfg)?;
            let report = &out.report;
            println!(
                "{}: degree {}, total matvecs {}, max relative residual {:.3e}",
                report["report"]["method"].as_str().unwrap_or("?"),
                report["report"]["degree"],
                report["total_matvecs"],
                report["max_relative_residual"].as_f64().unwrap_or(f64::NAN)
            );
            Ok(())
        }
        Command::SamplePoly(args) => cmd_sample_poly(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Example(args) => {
            let out = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("out/example-{}", args.id)));
            let ex = ExampleArgs {
                scale: args.scale,
                seed: seed_or_env(args.seed)?,
                threads: args.threads.max(1),
                mtx: args.mtx.clone(),
            };
            let table = examples::timed(&format!("example {}", args.id), || examples::cmd_example(args.id, &ex, &out))?;
            print!("{}", table.render());
            eprintln!("table written to {}", out.join("table.json").display());
            Ok(())
        }
    }
}

pub fn cmd_gen(args: &GenArgs) -> CliResult<()> {
    let a = Generator::parse(&args.generator)?.build()?;
    write_matrix_market(&args.out, &a).map_err(CliError::Input)?;
    if args.nrhs > 0 {
        let path = args
            .rhs_out
            .as_ref()
            .ok_or_else(|| CliError::Config("--nrhs needs --rhs-out".into()))?;
        let spec = RhsSpec {
            kind: RhsKind::NormalUnit,
            seed: seed_or_env(args.seed)?,
            count: args.nrhs,
        };
        let rhs = gen_rhs::<f64>(a.n_rows(), &spec)?;
        write_matrix_market_columns(path, &rhs).map_err(CliError::Input)?;
    }
    eprintln!("wrote {} (n = {}, nnz = {})", args.out.display(), a.n_rows(), a.nnz());
    Ok(())
}

pub fn cmd_sample_poly(args: &SampleArgs) -> CliResult<()> {
    let poly = StoredPolynomial::read(&args.poly)?;
    let points = match (&args.grid, &args.points) {
        (Some(g), None) => parse_grid(g)?,
        (None, Some(p)) => read_points(p)?,
        _ => return Err(CliError::Config("give exactly one of --grid or --points".into())),
    };
    let csv = sample_csv(&poly, &points);
    match &args.out {
        Some(path) => output::write_text(path, &csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> CliResult<()> {
    if !SUITES.contains(&args.suite.as_str()) {
        return Err(CliError::Config(format!(
            "unknown suite '{}'; expected one of {}",
            args.suite,
            SUITES.join(", ")
        )));
    }
    if args.trials == 0 {
        return Err(CliError::Config("--trials must be positive".into()));
    }
    let seed = seed_or_env(args.seed)?;
    let reports = run_suite(&args.suite, args.trials, seed)?;
    let failed = reports.iter().filter(|r| !r.holds && !r.inconclusive).count();
    let inconclusive = reports.iter().filter(|r| r.inconclusive).count();
    let value = serde_json::json!({
        "suite": args.suite,
        "trials": args.trials,
        "seed": seed,
        "reports": reports,
        "failed": failed,
        "inconclusive": inconclusive,
    });
    match &args.out {
        Some(path) => output::write_json(path, &value)?,
        None => println!("{}", serde_json::to_string_pretty(&value).map_err(|e| CliError::Input(e.into()))?),
    }
    eprintln!(
        "{}: {} reports, {failed} violated, {inconclusive} inconclusive",
        args.suite,
        reports.len()
    );
    if failed + inconclusive > 0 {
        return Err(CliError::VerifyFailed(format!(
            "{}: {failed} violated and {inconclusive} inconclusive reports",
            args.suite
        )));
    }
    Ok(())
}
