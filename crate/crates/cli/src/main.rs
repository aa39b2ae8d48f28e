//! `minsurf4`: verify, generate and mesh minimal surfaces in R^4.
//!
//! Exit codes: 0 when every applicable check holds (or none applies), 1 on
//! usage or config errors, 2 when a check reports an internal
//! inconsistency such as a counterexample.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use commands::{Ctx, Format};
use report::Sink;

#[derive(Parser, Debug)]
#[command(name = "minsurf4", version, about = "Minimal surfaces in R^4 from rational Weierstrass data")]
struct Cli {
    /// Directory for reports and artifacts; without it the report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized pipelines; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Format of tabular output (falsify rows).
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the exceptional-value inequality for a metric on a punctured plane.
    VerifyMain {
        #[arg(long)]
        config: PathBuf,
    },
    /// Emit the sharpness family with p ends and exponents m, and verify it.
    GenExample {
        #[arg(short)]
        p: usize,
        #[arg(short, value_delimiter = ',', required = true)]
        m: Vec<u32>,
    },
    /// Search random complete instances for counterexamples.
    Falsify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Number of complete instances to check.
        #[arg(short)]
        n: Option<usize>,
    },
    /// Curvature, minimality witnesses and the Gauss map bound of a minimal Lagrangian surface.
    Lagrangian {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the Moebius-strip construction pipeline.
    Nonorientable {
        #[arg(long)]
        config: PathBuf,
        /// Skip the exact conformality stage.
        #[arg(long)]
        no_conformality: bool,
    },
    /// Triangulate Re int phi over a grid.
    Mesh {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            anyhow::bail!("--tol must be positive, got {t}");
        }
    }
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    if format == Format::Csv && !matches!(cli.command, Command::Falsify { .. }) {
        anyhow::bail!("--format csv is only available for falsify");
    }
    let ctx = Ctx { seed: cli.seed, tol: cli.tol, format, sink: Sink { out: cli.out } };
    let report = match &cli.command {
        Command::VerifyMain { config } => commands::verify_main(&config::load(config)?, "verify-main")?,
        Command::GenExample { p, m } => commands::gen_example(&ctx, *p, m)?,
        Command::Falsify { config, n } => {
            let loaded = config.as_deref().map(config::load).transpose()?;
            commands::run_falsify(&ctx, loaded.as_ref(), *n)?
        }
        Command::Lagrangian { config } => commands::lagrangian(&ctx, &config::load(config)?)?,
        Command::Nonorientable { config, no_conformality } => {
            commands::nonorientable(&ctx, &config::load(config)?, !no_conformality)?
        }
        Command::Mesh { config } => commands::mesh(&ctx, &config::load(config)?)?,
    };
    ctx.sink.report(&report)?;
    if report.exit_code != 0 {
        eprintln!("verdict: {} (internal consistency failure)", report.verdict);
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
