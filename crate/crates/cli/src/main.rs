mod commands;
mod config;
mod error;
mod output;
mod selftest;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RawConfig, RunConfig, Spacing};
use error::CliError;
use output::{Format, Sink};

/// Steady states, sweeps and spin-noise peaks of driven cascaded-Λ systems.
#[derive(Parser)]
#[command(name = "cascade", version)]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Relative cutoff for counting visible peaks.
    #[arg(long, global = true)]
    threshold: Option<f64>,

    /// Worker threads for sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// Flags that override configuration-file keys.
#[derive(Args, Default)]
struct Overrides {
    #[arg(long, global = true)]
    n_levels: Option<usize>,
    #[arg(long, global = true)]
    rabi_mhz: Option<f64>,
    #[arg(long, global = true)]
    rabi_over_gamma: Option<f64>,
    #[arg(long, global = true)]
    gamma_mhz: Option<f64>,
    #[arg(long, global = true)]
    gamma_prime_mhz: Option<f64>,
    /// Two-photon detuning Δ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    delta_mhz: Option<f64>,
    /// Comma-separated per-field detunings Δ_1..Δ_{N-1}.
    #[arg(long, global = true, allow_hyphen_values = true)]
    detunings_mhz: Option<String>,
    #[arg(long, global = true)]
    delta_omega_s_mhz: Option<f64>,
    #[arg(long, global = true)]
    ground_splitting_mhz: Option<f64>,
    #[arg(long, global = true)]
    excited_splitting_mhz: Option<f64>,
    /// One-photon detuning of the ⁸⁵Rb drives.
    #[arg(long, global = true, allow_negative_numbers = true)]
    detuning_mhz: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Any configuration key, as KEY=VALUE. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Overrides {
    fn pairs(&self) -> Result<Vec<(String, String)>, CliError> {
        let mut out = Vec::new();
        let mut add = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k.to_string(), v));
            }
        };
        let s = |v: Option<f64>| v.map(|x| x.to_string());
        add("n_levels", self.n_levels.map(|x| x.to_string()));
        add("rabi_mhz", s(self.rabi_mhz));
        add("rabi_over_gamma", s(self.rabi_over_gamma));
        add("gamma_mhz", s(self.gamma_mhz));
        add("gamma_prime_mhz", s(self.gamma_prime_mhz));
        add("delta_mhz", s(self.delta_mhz));
        add("detunings_mhz", self.detunings_mhz.clone());
        add("delta_omega_s_mhz", s(self.delta_omega_s_mhz));
        add("ground_splitting_mhz", s(self.ground_splitting_mhz));
        add("excited_splitting_mhz", s(self.excited_splitting_mhz));
        add("detuning_mhz", s(self.detuning_mhz));
        add("seed", self.seed.map(|x| x.to_string()));
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(out)
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    stop: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, value_enum)]
    spacing: Option<Spacing>,
}

impl SweepArgs {
    fn apply(&self, raw: &mut RawConfig) -> Result<(), CliError> {
        if let Some(v) = self.start {
            raw.set("sweep_start", v.to_string())?;
        }
        if let Some(v) = self.stop {
            raw.set("sweep_stop", v.to_string())?;
        }
        if let Some(v) = self.count {
            raw.set("sweep_count", v.to_string())?;
        }
        if let Some(v) = self.spacing {
            let name = match v {
                Spacing::Linear => "linear",
                Spacing::Log => "log",
            };
            raw.set("sweep_spacing", name)?;
        }
        Ok(())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Steady state of the N-level chain and its coherence peaks.
    Steady {
        /// Use the reduced ground-manifold model.
        #[arg(long)]
        effective: bool,
    },
    /// Height ratios against the two-photon detuning Δ (sweep values in MHz).
    SweepDetuning(SweepArgs),
    /// Height ratios against Ω/γ (sweep values are Ω/γ, log spacing by default).
    SweepRabi(SweepArgs),
    /// Peaks of the 16-state ⁸⁵Rb model.
    Rb85 {
        /// Also solve the 13-level chain truncation.
        #[arg(long)]
        truncated: bool,
    },
    /// Multi-photon transition amplitudes and their ratios.
    Rates,
    /// Equivalence checks between solvers and closed forms.
    Selftest,
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut raw = match &cli.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    for (k, v) in cli.overrides.pairs()? {
        raw.set(&k, v)?;
    }
    if let Some(t) = cli.threshold {
        raw.set("threshold", t.to_string())?;
    }
    let spacing = match &cli.command {
        Command::SweepDetuning(a) => {
            a.apply(&mut raw)?;
            Spacing::Linear
        }
        Command::SweepRabi(a) => {
            a.apply(&mut raw)?;
            Spacing::Log
        }
        _ => Spacing::Linear,
    };
    raw.resolve(spacing)
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = load(cli)?;
    let (name, flags): (&str, Vec<(&str, bool)>) = match &cli.command {
        Command::Steady { effective } => ("steady", vec![("effective", *effective)]),
        Command::SweepDetuning(_) => ("sweep-detuning", vec![]),
        Command::SweepRabi(_) => ("sweep-rabi", vec![]),
        Command::Rb85 { truncated } => ("rb85", vec![("truncated", *truncated)]),
        Command::Rates => ("rates", vec![]),
        Command::Selftest => ("selftest", vec![]),
    };
    if let Command::Selftest = cli.command {
        let failures = selftest::run(cfg.seed);
        return Ok(if failures == 0 { 0 } else { 1 });
    }
    let mut sink = Sink::new(&cli.out, cli.format, cfg.hash(name, &flags))?;
    match &cli.command {
        Command::Steady { effective } => commands::steady(&cfg, &mut sink, *effective)?,
        Command::SweepDetuning(_) => commands::sweep_detuning(&cfg, &mut sink, cli.parallel)?,
        Command::SweepRabi(_) => commands::sweep_rabi(&cfg, &mut sink, cli.parallel)?,
        Command::Rb85 { truncated } => commands::rb85(&cfg, &mut sink, *truncated)?,
        Command::Rates => commands::rates(&cfg, &mut sink)?,
        Command::Selftest => unreachable!(),
    }
    for path in sink.written() {
        eprintln!("wrote {}", path.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
