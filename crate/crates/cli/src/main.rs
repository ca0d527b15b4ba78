mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fpukp::Frame;

use crate::commands::SweepMode;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

const OUTPUTS: &str = "\
Outputs (all floats printed with 17 significant digits):
  errors.csv           t, err_<c> for the six error components, E, Q, H
                       horizontal components: u1 u2 v1 v2 w z
                       diagonal components:   al ad ax ay u v
  leading.csv          t, the six leading-term components, sum
  summary.json         run digest: lattice size, maxima, residual norms, flags
  residuals.csv        eps, name, l2, sup
  relations.csv        eps, name, sup (defining relations on the continuum grid)
  kp2_diagnostics.csv  tau, l2, l2_drift, zero_mode
  sweep.json, kp2.json, sample_bound.json, residuals.json

Exit status: 0 success, 1 runtime failure (partial outputs kept),
2 invalid arguments or configuration, 3 sweep thresholds not met.

Environment: KP2FPU_CONFIG, KP2FPU_OUT, KP2FPU_THREADS and KP2FPU_FRAME set the
flags; KP2FPU_EPS, KP2FPU_EPS_LIST, KP2FPU_TAU0, KP2FPU_DT, KP2FPU_DTAU,
KP2FPU_STRIDE, KP2FPU_SEED, KP2FPU_E0 and KP2FPU_K0 override config fields.";

#[derive(Parser)]
#[command(name = "fpukp", version, about = "Lattice/KP-II comparison runs and convergence sweeps", after_help = OUTPUTS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true, env = "KP2FPU_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory; overrides `out` in the config.
    #[arg(long, global = true, env = "KP2FPU_OUT")]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "KP2FPU_THREADS")]
    threads: Option<usize>,
    /// Overrides `frame` in the config.
    #[arg(long, global = true, env = "KP2FPU_FRAME", value_parser = parse_frame)]
    frame: Option<Frame>,
}

#[derive(Subcommand)]
enum Command {
    /// Co-evolve the lattice and the ansatz for one ε and record the error components.
    Simulate,
    /// Residual and error convergence over `eps_list`, with slope fits.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepMode::Full)]
        mode: SweepMode,
    },
    /// Standalone KP-II solve with conservation diagnostics.
    Kp2,
    /// Lattice sampling of random band-limited fields against their Sobolev norm.
    SampleBound,
    /// Lattice residuals and defining-relation residuals at t = 0.
    Residuals,
}

fn parse_frame(s: &str) -> Result<Frame, String> {
    s.parse().map_err(|e: fpukp::Error| e.to_string())
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot set thread count: {e}")))?;
    }
    let path = cli.config.ok_or_else(|| CliError::Usage("--config is required".into()))?;
    let mut cfg = RunConfig::load(&path, std::env::vars())?;
    if let Some(f) = cli.frame {
        cfg.frame = f;
        cfg.validate()?;
    }
    let out = cli.out.or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    match cli.command {
        Command::Simulate => commands::simulate(&cfg, &out),
        Command::Sweep { mode } => commands::sweep(&cfg, &out, mode),
        Command::Kp2 => commands::kp2(&cfg, &out),
        Command::SampleBound => commands::sample_bound(&cfg, &out),
        Command::Residuals => commands::residuals(&cfg, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
