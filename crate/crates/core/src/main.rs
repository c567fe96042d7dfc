use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};
use log::info;

use rdfem::io::{parse_config, Mode, NetworkSource};
use rdfem::run::run;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliMode {
    Simulate,
    SteadyFlux,
    Fba,
    Phenotype,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Simulate => Mode::Simulate,
            CliMode::SteadyFlux => Mode::SteadyFlux,
            CliMode::Fba => Mode::Fba,
            CliMode::Phenotype => Mode::Phenotype,
        }
    }
}

/// Finite-element reaction-diffusion and flux-balance pipelines.
#[derive(Debug, Parser)]
#[command(name = "rdfem", version)]
struct Cli {
    mode: CliMode,
    /// Run configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Mesh file, overriding the configuration.
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Knowledge-base file, overriding the configuration's network.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Directory for output files given with relative paths.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    verbose: bool,
}

enum Failure {
    Input(anyhow::Error),
    Solver(anyhow::Error),
}

fn classify(e: rdfem::Error) -> Failure {
    if e.is_solver_failure() {
        Failure::Solver(e.into())
    } else {
        Failure::Input(e.into())
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("RDFEM_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("RDFEM_THREADS must be a positive integer, got `{v}`"))?;
        anyhow::ensure!(n > 0, "RDFEM_THREADS must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<bool, Failure> {
    configure_threads().map_err(Failure::Input)?;
    let text = std::fs::read_to_string(&cli.config)
        .with_context(|| format!("reading {}", cli.config.display()))
        .map_err(Failure::Input)?;
    let base = cli.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut cfg = parse_config(&text, &base)
        .map_err(|e| Failure::Input(anyhow::Error::from(e).context(cli.config.display().to_string())))?;
    let mode = Mode::from(cli.mode);
    if let Some(m) = cfg.mode {
        if m != mode {
            return Err(Failure::Input(anyhow::anyhow!("configuration is for mode `{m}`, command line asks for `{mode}`")));
        }
    }
    cfg.mode = Some(mode);
    if let Some(mesh) = &cli.mesh {
        cfg.mesh = Some(mesh.clone());
    }
    if let Some(kb) = &cli.kb {
        cfg.network = Some(NetworkSource::KnowledgeBase(kb.clone()));
    }
    if let Some(out) = &cli.out {
        std::fs::create_dir_all(out)
            .with_context(|| format!("creating {}", out.display()))
            .map_err(Failure::Input)?;
        for o in &mut cfg.outputs {
            let rel = o.path.strip_prefix(&base).map(Path::to_path_buf).unwrap_or_else(|_| o.path.clone());
            if rel.is_relative() {
                o.path = out.join(rel);
            }
        }
    }
    for path in cfg.mesh.iter().chain(match &cfg.network {
        Some(NetworkSource::KnowledgeBase(p)) => Some(p),
        _ => None,
    }) {
        if !path.exists() {
            return Err(Failure::Input(anyhow::anyhow!("{} does not exist", path.display())));
        }
    }

    info!("running {mode} from {}", cli.config.display());
    let report = run(&cfg).map_err(classify)?;
    info!("finished in {:.3} s, {} outputs", report.wall_time_s, report.outputs.len());
    let json = serde_json::to_string_pretty(&report).map_err(|e| Failure::Input(e.into()))?;
    println!("{json}");
    Ok(!report.solver_failed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: flux problem is infeasible or unbounded");
            ExitCode::from(3)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}
