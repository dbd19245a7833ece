use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pairsim::commands;
use pairsim::config::{DetectorPreset, FilterPreset, Overrides, RunConfig, Sweep, OUT_DIR_ENV};
use pairsim::output::write_outputs;
use pairsim::CliError;
use pairsim_core::budget::Improvements;

/// Telecom polarization-entangled photon-pair source simulator.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration file.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    filter: Option<FilterPreset>,
    #[arg(long, global = true)]
    detector: Option<DetectorPreset>,
    /// mW
    #[arg(long, global = true, allow_negative_numbers = true)]
    pump_power: Option<f64>,
    /// Interferometer phase, rad.
    #[arg(long, global = true, allow_negative_numbers = true)]
    phase: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: $PAIRSIM_OUT_DIR, then ./pairsim-out).
    #[arg(short, long, global = true)]
    out_dir: Option<PathBuf>,
    /// Acquisition time per Monte Carlo run, s.
    #[arg(long, global = true, allow_negative_numbers = true)]
    duration: Option<f64>,
    /// Full coincidence window, s.
    #[arg(long, global = true, allow_negative_numbers = true)]
    window: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Emission spectrum versus wavelength.
    Spectrum {
        #[command(flatten)]
        common: Common,
    },
    /// Coincidence histogram and three-peak report.
    Histogram {
        #[command(flatten)]
        common: Common,
    },
    /// Coincidence fringe and visibility fits.
    Fringe {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sweep: Option<Sweep>,
        #[arg(long, allow_negative_numbers = true)]
        visibility: Option<f64>,
        /// Nominal and realized phases, e.g. the lock_sweep.dat written by `lock`.
        #[arg(long)]
        phases_from: Option<PathBuf>,
    },
    /// CHSH Bell parameter.
    Bell {
        #[command(flatten)]
        common: Common,
        /// Werner visibility of the analyzed state.
        #[arg(long, allow_negative_numbers = true)]
        visibility: Option<f64>,
    },
    /// Loss budget, available rates and multi-pair penalty.
    Budget {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        flat_top_filter: bool,
        #[arg(long)]
        spliced_fibers: bool,
        #[arg(long)]
        tapered_waveguide: bool,
        #[arg(long)]
        cavity_splitting: bool,
        #[arg(long)]
        all_improvements: bool,
    },
    /// Interferometer phase lock and set-phase sweep.
    Lock {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        kp: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        ki: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        kd: Option<f64>,
        /// Run with all gains at zero.
        #[arg(long)]
        open_loop: bool,
    },
    /// Timescale ordering report.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Spectrum { common }
            | Command::Histogram { common }
            | Command::Fringe { common, .. }
            | Command::Bell { common, .. }
            | Command::Budget { common, .. }
            | Command::Lock { common, .. }
            | Command::Check { common } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Histogram { .. } => "histogram",
            Command::Fringe { .. } => "fringe",
            Command::Bell { .. } => "bell",
            Command::Budget { .. } => "budget",
            Command::Lock { .. } => "lock",
            Command::Check { .. } => "check",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let c = cli.command.common().clone();
    let mut cfg = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    cfg.apply(&Overrides {
        filter: c.filter,
        detector: c.detector,
        pump_power: c.pump_power,
        phase: c.phase,
        seed: c.seed,
        output_dir: c.out_dir,
        duration: c.duration,
        coincidence_window: c.window,
    });
    let mut improvements = Improvements::default();
    match &cli.command {
        Command::Fringe {
            sweep,
            visibility,
            phases_from,
            ..
        } => {
            if let Some(s) = sweep {
                cfg.fringe.sweep = *s;
            }
            if let Some(v) = visibility {
                cfg.fringe.visibility = *v;
            }
            if phases_from.is_some() {
                cfg.fringe.phases_from = phases_from.clone();
            }
        }
        Command::Bell {
            visibility: Some(v),
            ..
        } => cfg.bell.visibility = *v,
        Command::Budget {
            flat_top_filter,
            spliced_fibers,
            tapered_waveguide,
            cavity_splitting,
            all_improvements,
            ..
        } => {
            improvements = if *all_improvements {
                Improvements::all()
            } else {
                Improvements {
                    flat_top_filter: *flat_top_filter,
                    spliced_fibers: *spliced_fibers,
                    tapered_waveguide: *tapered_waveguide,
                    cavity_splitting: *cavity_splitting,
                }
            };
        }
        Command::Lock {
            kp,
            ki,
            kd,
            open_loop,
            ..
        } => {
            for (slot, v) in [
                (&mut cfg.lock.kp, kp),
                (&mut cfg.lock.ki, ki),
                (&mut cfg.lock.kd, kd),
            ] {
                if let Some(v) = v {
                    *slot = *v;
                }
            }
            if *open_loop {
                (cfg.lock.kp, cfg.lock.ki, cfg.lock.kd) = (0.0, 0.0, 0.0);
            }
        }
        _ => {}
    }
    let env = std::env::var(OUT_DIR_ENV).ok();
    let cfg = cfg.resolve(env.as_deref())?;
    let out = match &cli.command {
        Command::Spectrum { .. } => commands::spectrum(&cfg)?,
        Command::Histogram { .. } => commands::histogram(&cfg)?,
        Command::Fringe { .. } => commands::fringe(&cfg)?,
        Command::Bell { .. } => commands::bell(&cfg)?,
        Command::Budget { .. } => commands::budget(&cfg, improvements)?,
        Command::Lock { .. } => commands::lock(&cfg)?,
        Command::Check { .. } => commands::check(&cfg)?,
    };
    write_outputs(&cfg, cli.command.name(), &out.tables, &out.report)?;
    for (k, v) in &out.report.entries {
        println!("{k}={v}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pairsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
