use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dephaselab::error::EXIT_DISAGREEMENT;
use dephaselab::{apply_grid, presets, run, CliError, CliResult, Command, RunConfig};

#[derive(Parser)]
#[command(name = "dephaselab", version, about = "Coherence of a dephasing qubit prepared by nonselective measurement")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Trajectory |ρ₀₁(t)| and |ρ₀₁(t)/ρ₀₁(0)| as CSV.
    Evolve(Common),
    /// |ρ₀₁(0)| over one or two sweep axes as CSV.
    Initial(Common),
    /// Initial velocity 𝔙/η₋₁,₀ over one or two sweep axes as CSV.
    Velocity(Common),
    /// Analytic and grid-searched velocity extrema as JSON.
    Extrema(Common),
    /// Scheme family of each configured scheme as JSON.
    Classify(Common),
    /// Exact diagonalization against the analytic coherence as JSON.
    Oracle(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, value_name = "PATH", conflicts_with = "figure", required_unless_present = "figure")]
    config: Option<PathBuf>,
    /// Preset reproducing the parameters of figure N.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u8).range(1..=7))]
    figure: Option<u8>,
    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "FLOAT")]
    tol: Option<f64>,
    /// Points per sweep axis, time points, search grid or n_max.
    #[arg(long, value_name = "N[,N[,N]]", value_delimiter = ',')]
    grid: Vec<usize>,
    #[arg(long, value_name = "N", env = "DEPHASELAB_THREADS")]
    threads: Option<usize>,
    /// Print the resolved configuration instead of running.
    #[arg(long)]
    emit_config: bool,
}

impl Cmd {
    fn split(self) -> (Command, Common) {
        match self {
            Cmd::Evolve(c) => (Command::Evolve, c),
            Cmd::Initial(c) => (Command::Initial, c),
            Cmd::Velocity(c) => (Command::Velocity, c),
            Cmd::Extrema(c) => (Command::Extrema, c),
            Cmd::Classify(c) => (Command::Classify, c),
            Cmd::Oracle(c) => (Command::Oracle, c),
        }
    }
}

fn load(cmd: Command, args: &Common) -> CliResult<RunConfig> {
    let mut cfg = match (&args.config, args.figure) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            RunConfig::from_json(&text)?
        }
        (None, Some(n)) => {
            let (native, cfg) = presets::preset(n)?;
            if native != cmd && !matches!(cmd, Command::Classify) {
                return Err(CliError::config(format!(
                    "figure {n} is a {native:?} preset, not {cmd:?}"
                )));
            }
            cfg
        }
        (None, None) => return Err(CliError::config("need --config or --figure")),
    };
    apply_grid(cmd, &mut cfg, &args.grid)?;
    if args.tol.is_some() {
        cfg.tol = args.tol;
    }
    if args.out.is_some() {
        cfg.out = args.out.clone();
    }
    Ok(cfg)
}

fn execute(cmd: Command, args: Common) -> CliResult<i32> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(format!("--threads {n}: {e}")))?;
    }
    let cfg = load(cmd, &args)?;
    let (text, code) = if args.emit_config {
        (serde_json::to_string_pretty(&cfg)? + "\n", 0)
    } else {
        let report = run(cmd, &cfg)?;
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        let code = match &report.disagreement {
            Some(msg) => {
                eprintln!("disagreement: {msg}");
                EXIT_DISAGREEMENT
            }
            None => 0,
        };
        (report.render()?, code)
    };
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })?,
    }
    Ok(code)
}

fn main() -> ExitCode {
    let (cmd, args) = Cli::parse().cmd.split();
    match execute(cmd, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
