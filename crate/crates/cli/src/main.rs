use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod output;
mod presets;
mod svg;
mod tasks;

use config::{ExperimentConfig, Format, Overrides};
use presets::Part;

/// Eigenstate completeness experiments for one-dimensional potentials.
#[derive(Parser)]
#[command(name = "eigencomplete", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Convergence tolerance override.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Band-edge exclusion margin override.
    #[arg(long = "edge-margin", global = true)]
    edge_margin: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run { config: PathBuf },
    /// Regenerate a preset figure or table.
    Reproduce {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(presets::NAMES))]
        name: String,
        #[arg(long, default_value = "output")]
        out: PathBuf,
    },
    /// Evaluate the plane-wave projection identity for one width.
    Identity {
        #[arg(long)]
        sigma: f64,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn invalid(message: String) -> Self {
        CliError { code: 2, message }
    }

    pub fn numerical(message: String) -> Self {
        CliError { code: 3, message }
    }

    pub fn from_core(stage: &str, e: eigencomplete::Error) -> Self {
        use eigencomplete::Error::*;
        let message = format!("{stage}: {e}");
        match e {
            NoSignChange { .. } | MaxIterations { .. } | NonConvergence { .. } | NoLimit { .. } => Self::numerical(message),
            _ => Self::invalid(message),
        }
    }
}

fn run(path: &Path, overrides: Overrides) -> Result<(), CliError> {
    let mut cfg = ExperimentConfig::load(path)?;
    cfg.apply(overrides);
    let initial = cfg.validate()?;
    let artifact = tasks::run(&cfg, initial.as_ref())?;
    output::ensure_dir(&cfg.output.dir)?;
    let files = output::write_artifact(&artifact, &cfg.output.dir, &cfg.output.formats, &output::timestamp())?;
    for m in &artifact.messages {
        println!("{m}");
    }
    for f in &files {
        println!("wrote {}", f.display());
    }
    if artifact.converged {
        Ok(())
    } else {
        Err(CliError::numerical(format!("task {}: tolerance not reached, results written and flagged", artifact.task)))
    }
}

fn reproduce(name: &str, out: &Path, overrides: Overrides) -> Result<(), CliError> {
    let figure = presets::figure(name).ok_or_else(|| CliError::invalid(format!("unknown preset {name}")))?;
    let stamp = output::timestamp();
    let formats = [Format::Csv, Format::Json];
    let mut artifacts = Vec::new();
    for (label, part) in figure.parts {
        let mut a = match part {
            Part::Run(mut cfg) => {
                cfg.apply(overrides);
                cfg.output.dir = out.to_path_buf();
                let initial = cfg.validate()?;
                tasks::run(&cfg, initial.as_ref())?
            }
            Part::CombSpectra { a, gamma, k_max, points } => presets::comb_spectra(a, gamma, k_max, points),
        };
        a.task = label;
        for m in &a.messages {
            println!("{}: {m}", a.task);
        }
        artifacts.push(a);
    }
    output::ensure_dir(out)?;
    for a in &artifacts {
        for f in output::write_artifact(a, out, &formats, &stamp)? {
            println!("wrote {}", f.display());
        }
    }
    let potential = artifacts.first().map_or("none", |a| a.potential.as_str());
    let svg = output::write_figure(figure.name, potential, figure.title, &artifacts, figure.columns, out, &stamp)?;
    println!("wrote {}", svg.display());
    match artifacts.iter().find(|a| !a.converged) {
        None => Ok(()),
        Some(a) => Err(CliError::numerical(format!("{}: tolerance not reached, results written and flagged", a.task))),
    }
}

fn identity(sigma: f64) -> Result<(), CliError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(CliError::invalid(format!("--sigma must be positive, got {sigma}")));
    }
    let v = eigencomplete::identity_check(sigma).map_err(|e| CliError::from_core("identity integral", e))?;
    println!("{}", tasks::identity_line(v));
    if (v - 1.0).abs() < 1e-6 {
        Ok(())
    } else {
        Err(CliError::numerical("identity integral deviates from 1 by more than 1e-6".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is set once");
    }
    let overrides = Overrides { tol: cli.tol, edge_margin: cli.edge_margin };
    let result = match &cli.command {
        Command::Run { config } => run(config, overrides),
        Command::Reproduce { name, out } => reproduce(name, out, overrides),
        Command::Identity { sigma } => identity(*sigma),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
