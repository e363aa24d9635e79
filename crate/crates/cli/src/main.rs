//! `schwartz`: batch front end for spectral solves, expansions, Green
//! families and the invariant suites.
//!
//! Exit codes: 0 ok, 1 configuration error, 2 not divisible or not
//! invertible, 3 failed invariant.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};
use schwartz_spectral::green::green_family_with_policy;
use schwartz_spectral::probes::DEFAULT_SEED;
use schwartz_spectral::verify::run_suite;
use schwartz_spectral::{
    coordinates, green_family_divided, left_inverse_family, solve, spectral_apply, Grid,
    SpectralError,
};

use config::RunConfig;
use output::{
    write_csv, write_json, Divisibility, ExpandReport, Failure, GreenIndex, GreenReport,
    SolveReport,
};

const SEED_VAR: &str = "SCHWARTZ_SEED";

#[derive(Parser)]
#[command(name = "schwartz", version, about = "Spectral calculus over continuous eigenfamilies on grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve A(u) = d by dividing coordinates by the symbol.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory, overriding `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build Green family members at the given index points.
    Green {
        #[arg(long)]
        config: PathBuf,
        /// Index point, comma-separated in more than one dimension.
        #[arg(long = "index", required = true, num_args = 1.., allow_negative_numbers = true)]
        indices: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply the operator by spectral expansion and write its coordinates.
    Expand {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an invariant suite: identity, homomorphism, eigen, green, solver or all.
    Verify {
        suite: String,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

enum Outcome {
    Ok,
    Indivisible,
    VerifyFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Indivisible) => ExitCode::from(2),
        Ok(Outcome::VerifyFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Solve { config, out } => cmd_solve(&config, out),
        Command::Green {
            config,
            indices,
            out,
        } => cmd_green(&config, &indices, out),
        Command::Expand { config, out } => cmd_expand(&config, out),
        Command::Verify { suite, json } => cmd_verify(&suite, json),
    }
}

struct Loaded {
    config: RunConfig,
    grid: Grid,
    base: PathBuf,
    out_dir: PathBuf,
}

fn load(path: &Path, out: Option<PathBuf>) -> anyhow::Result<Loaded> {
    let config = RunConfig::load(path)?;
    let grid = config.grid()?;
    let base = path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let out_dir = match out {
        Some(dir) => dir,
        None => match &config.output.dir {
            Some(dir) if dir.is_absolute() => dir.clone(),
            Some(dir) => base.join(dir),
            None => base.clone(),
        },
    };
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    Ok(Loaded {
        config,
        grid,
        base,
        out_dir,
    })
}

fn cmd_solve(path: &Path, out: Option<PathBuf>) -> anyhow::Result<Outcome> {
    let run = load(path, out)?;
    let form = run.config.diagonal_form(&run.grid)?;
    let datum = run.config.datum(&run.grid, &run.base)?;
    let policy = run.config.policy;
    let mut report = SolveReport {
        command: "solve",
        status: "ok",
        grid: (&run.grid).into(),
        family: form.family.kind(),
        symbol: form.symbol.descriptor().to_string(),
        policy,
        residual: None,
        divisibility: Divisibility {
            divisible: true,
            zero_set_size: None,
            failure: None,
        },
        outputs: Vec::new(),
    };
    let outcome = match solve(&form.family, &form.symbol, &datum, &policy) {
        Ok(sol) => {
            write_csv(&run.out_dir.join("solution.csv"), &sol.solution)?;
            report.residual = Some(sol.residual);
            report.divisibility.zero_set_size = Some(sol.zero_set_size);
            report.outputs.push("solution.csv".into());
            Outcome::Ok
        }
        Err(e) => {
            let failure = Failure::from_error(&e).ok_or(e)?;
            eprintln!("error: {}", failure.message);
            report.status = failure.kind;
            report.divisibility.divisible = false;
            report.divisibility.failure = Some(failure);
            Outcome::Indivisible
        }
    };
    write_json(&run.out_dir.join("report.json"), &report)?;
    Ok(outcome)
}

fn parse_index(text: &str, dim: usize) -> anyhow::Result<Vec<f64>> {
    let point = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad index point `{text}`"))?;
    if point.len() != dim {
        bail!("index point `{text}` has {} coordinates, grid has dim {dim}", point.len());
    }
    Ok(point)
}

fn cmd_green(path: &Path, indices: &[String], out: Option<PathBuf>) -> anyhow::Result<Outcome> {
    let run = load(path, out)?;
    let form = run.config.diagonal_form(&run.grid)?;
    let policy = run.config.policy;
    let points = indices
        .iter()
        .map(|s| parse_index(s, run.grid.dim()))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let flat = points
        .iter()
        .map(|p| run.grid.locate(p))
        .collect::<Result<Vec<_>, _>>()?;

    let mu = left_inverse_family(&form.family)?;
    let mut report = GreenReport {
        command: "green",
        status: "ok",
        grid: (&run.grid).into(),
        family: form.family.kind(),
        symbol: form.symbol.descriptor().to_string(),
        policy,
        route: None,
        max_weak_residual: None,
        indices: Vec::new(),
        failures: Vec::new(),
    };
    let record = |e: SpectralError, report: &mut GreenReport| -> anyhow::Result<()> {
        let failure = Failure::from_error(&e).ok_or(e)?;
        report.failures.push(failure);
        Ok(())
    };
    let result = match green_family_with_policy(&form.family, &form.symbol, &mu, &policy) {
        Ok(r) => Some(("inverse", r)),
        Err(e) => {
            record(e, &mut report)?;
            match green_family_divided(&form.family, &form.symbol, &mu, &policy) {
                Ok(r) => Some(("divided", r)),
                Err(e) => {
                    record(e, &mut report)?;
                    None
                }
            }
        }
    };
    let outcome = match result {
        Some((route, result)) => {
            report.route = Some(route);
            let mut worst = 0.0_f64;
            for (point, &k) in points.iter().zip(&flat) {
                let file = format!("green_{k}.csv");
                write_csv(&run.out_dir.join(&file), &result.family.member_at(k))?;
                worst = worst.max(result.residuals[k]);
                report.indices.push(GreenIndex {
                    point: point.clone(),
                    flat_index: k,
                    weak_residual: result.residuals[k],
                    file,
                });
            }
            report.max_weak_residual = Some(worst);
            Outcome::Ok
        }
        None => {
            let last = report.failures.last().expect("both routes recorded");
            eprintln!("error: {}", last.message);
            report.status = last.kind;
            Outcome::Indivisible
        }
    };
    write_json(&run.out_dir.join("green.json"), &report)?;
    Ok(outcome)
}

fn cmd_expand(path: &Path, out: Option<PathBuf>) -> anyhow::Result<Outcome> {
    let run = load(path, out)?;
    let form = run.config.diagonal_form(&run.grid)?;
    let datum = run.config.datum(&run.grid, &run.base)?;
    let expanded = spectral_apply(&form.symbol, &form.family, &datum)?;
    let weighted = coordinates(&datum, &form.family)?
        .into_inner()
        .mul_symbol(&form.symbol)?;
    write_csv(&run.out_dir.join("expanded.csv"), &expanded)?;
    write_csv(&run.out_dir.join("coordinates.csv"), &weighted)?;
    let report = ExpandReport {
        command: "expand",
        status: "ok",
        grid: (&run.grid).into(),
        index_grid: form.family.index_grid().into(),
        family: form.family.kind(),
        symbol: form.symbol.descriptor().to_string(),
        outputs: vec!["expanded.csv".into(), "coordinates.csv".into()],
    };
    write_json(&run.out_dir.join("expand.json"), &report)?;
    Ok(Outcome::Ok)
}

fn seed() -> anyhow::Result<u64> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| anyhow!("{SEED_VAR}=`{s}` is not an unsigned integer")),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_SEED),
        Err(e) => Err(anyhow!("{SEED_VAR}: {e}")),
    }
}

fn cmd_verify(suite: &str, json: bool) -> anyhow::Result<Outcome> {
    let report = run_suite(suite, seed()?)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("{report}");
    }
    Ok(if report.all_passed() {
        Outcome::Ok
    } else {
        Outcome::VerifyFailed
    })
}
