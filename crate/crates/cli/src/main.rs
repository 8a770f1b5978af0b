use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use halfspace_cli::commands::{self, DataFormat};
use halfspace_cli::config::{ExperimentConfig, OracleKind};
use halfspace_cli::{exit, CliError};

/// Learning homogeneous halfspaces under Tsybakov noise.
#[derive(Parser, Debug)]
#[command(name = "thl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides the config file.
#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// TOML experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// gaussian | logistic | laplace | ball
    #[arg(long, global = true)]
    family: Option<String>,
    #[arg(long, global = true)]
    dim: Option<usize>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, value_enum, global = true)]
    oracle: Option<OracleKind>,
    /// Calibrate the certificate threshold by halving.
    #[arg(long, global = true)]
    auto_c: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a labeled dataset from the configured instance.
    Generate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: DataFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Look for a certificate that a direction is not optimal.
    Certify {
        #[command(flatten)]
        common: Common,
        /// Candidate direction, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        /// Dataset file; otherwise `--n` fresh samples are drawn.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, default_value_t = 300_000)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the learner end to end.
    Learn {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Spectral warm start diagnostics.
    Warmstart {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the config's [sweep] grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        repeats: Option<usize>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(f) = &common.family {
        cfg.instance.family = f.clone();
        cfg.instance.family()?;
    }
    if let Some(d) = common.dim {
        cfg.instance.dim = d;
    }
    if let Some(a) = common.alpha {
        cfg.instance.alpha = a;
    }
    if let Some(e) = common.epsilon {
        cfg.learner.epsilon = e;
    }
    if let Some(o) = common.oracle {
        cfg.oracle = o;
    }
    if common.auto_c {
        cfg.learner.auto_c = true;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Generate { common, n, format, out } => {
            let cfg = load(&common)?;
            let s = commands::cmd_generate(&cfg, n, format, &out)?;
            println!("d={} n={} seed={} flip_rate={:.5}", s.dim, s.n, s.seed, s.flip_rate);
            Ok(exit::OK)
        }
        Command::Certify { common, w, data, n, out } => {
            let cfg = load(&common)?;
            commands::cmd_certify(&cfg, data.as_deref(), n, &w, out.as_deref())
        }
        Command::Learn { common, n, repeats, rounds, out_dir } => {
            let mut cfg = load(&common)?;
            if let Some(n) = n {
                cfg.learner.samples_n = n;
            }
            if let Some(r) = repeats {
                cfg.repeats = r;
            }
            if let Some(r) = rounds {
                cfg.learner.max_rounds = r;
            }
            if let Some(d) = out_dir {
                cfg.output_dir = d;
            }
            let (code, rows) = commands::cmd_learn(&cfg)?;
            for r in rows {
                println!(
                    "repeat={} angle={:.4} err01={:.4} rounds={} stop={}",
                    r.repeat, r.final_angle, r.final_01_error, r.rounds_used, r.stop_reason
                );
            }
            Ok(code)
        }
        Command::Warmstart { common, w, n, out } => {
            let cfg = load(&common)?;
            commands::cmd_warmstart(&cfg, n, w.as_deref(), out.as_deref())
        }
        Command::Sweep { common, repeats, out_dir } => {
            let mut cfg = load(&common)?;
            if let Some(r) = repeats {
                cfg.repeats = r;
            }
            if let Some(d) = out_dir {
                cfg.output_dir = d;
            }
            for s in commands::cmd_sweep(&cfg)? {
                println!(
                    "point={} runs={} median_angle={:.4} median_err01={:.4}",
                    s.point, s.runs, s.median_final_angle, s.median_final_01_error
                );
            }
            Ok(exit::OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
