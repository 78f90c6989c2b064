use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use nlslab::exponents::ProblemParams;
use nlslab::runner::{
    compute_exponents, parse_config, parse_strictness, run_preset, verify_records, Preset,
    RunConfig, Verified,
};

#[derive(Parser)]
#[command(name = "nlslab", version, about = "NLS experiments on R^d x T")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the preset described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the configured output directory.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Construct and verify the exponent systems for (d, alpha).
    Exponents {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        r: Option<String>,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value = "1/100")]
        theta_resolution: String,
        /// Emit only this system's value and constraint report.
        #[arg(long, value_enum)]
        mode: Option<System>,
        /// `strict` or `equality` for the auxiliary pair.
        #[arg(long, default_value = "equality")]
        strictness: String,
    },
    /// Re-check the Morawetz columns of a records file.
    Verify {
        records: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 1e-10)]
        positivity_tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum System {
    Subcritical,
    Critical,
    Perturbed,
    Theta,
    Aux,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("NLSLAB_THREADS") {
        let n: usize = v.parse().with_context(|| format!("NLSLAB_THREADS={v:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    configure_threads()?;
    match cli.command {
        Command::Run { config, output } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = parse_config(&text)?;
            if let Some(out) = output {
                cfg.output = out;
            }
            let outcome = run_preset(&cfg)?;
            for c in &outcome.checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            Ok(exit(outcome.passed()))
        }
        Command::Exponents {
            d,
            alpha,
            r,
            epsilon,
            theta,
            theta_resolution,
            mode,
            strictness,
        } => {
            let params = ProblemParams::parse(d, &alpha)?;
            let mut opts = RunConfig::preset_defaults(Preset::Exponents).exponents;
            opts.r = r;
            opts.epsilon = epsilon;
            opts.theta = theta;
            opts.theta_resolution = theta_resolution;
            opts.mode = parse_strictness(&strictness)?;
            let rep = compute_exponents(&params, &opts)?;
            let Some(mode) = mode else {
                println!("{}", serde_json::to_string_pretty(&rep)?);
                return Ok(exit(rep.all_feasible));
            };
            let (json, feasible) = match mode {
                System::Subcritical => selected(&rep.subcritical)?,
                System::Critical => selected(&rep.critical)?,
                System::Perturbed => selected(&rep.perturbed)?,
                System::Theta => selected(&rep.theta)?,
                System::Aux => selected(&rep.auxiliary)?,
            };
            println!("{json}");
            Ok(exit(feasible))
        }
        Command::Verify {
            records,
            tol,
            positivity_tol,
        } => {
            let s = verify_records(&records, tol, positivity_tol)?;
            println!(
                "{} rows, {} inequality violations, {} positivity violations",
                s.rows,
                s.inequality_violations.len(),
                s.positivity_violations.len()
            );
            Ok(exit(s.passed()))
        }
    }
}

fn selected<T: serde::Serialize>(system: &Option<Verified<T>>) -> Result<(String, bool)> {
    let v = system
        .as_ref()
        .context("that system is not constructed for these inputs")?;
    Ok((serde_json::to_string_pretty(v)?, v.report.feasible))
}

fn exit(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
