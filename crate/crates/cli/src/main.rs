use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use irs_mimo::config::{ExperimentConfig, SweepKind};
use irs_mimo::harness::{convergence_study, run_sweep, to_csv, to_json, SweepTable};
use irs_mimo::solvers::Method;
use irs_mimo::validate::run_invariant_suite;
use irs_mimo::PathlossMode;

#[derive(Parser)]
#[command(name = "irs-mimo", version, about = "Monte-Carlo sweeps for IRS-assisted MIMO beamforming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum efficiency versus transmit power.
    SweepPower(RunArgs),
    /// Spectrum efficiency versus the number of IRS elements.
    SweepElements(RunArgs),
    /// Spectrum efficiency versus the IRS x-coordinate.
    SweepDistance(RunArgs),
    /// Spectrum efficiency versus phase resolution.
    SweepBits(RunArgs),
    /// Per-sweep objective of the iterative solver.
    Convergence(RunArgs),
    /// Run the invariant checks on small random instances.
    Validate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random instances per check.
        #[arg(long, default_value_t = 20)]
        instances: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pathloss {
    Sum,
    Product,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment TOML; the bundled reference scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated methods, e.g. `iterative,sdr,no-irs`.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, value_enum)]
    pathloss: Option<Pathloss>,
    /// Worker threads; all cores when omitted. Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?
            }
            None => ExperimentConfig::reference(),
        };
        if let Some(seed) = self.seed {
            cfg.scenario.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(p) = self.pathloss {
            cfg.scenario.pathloss = match p {
                Pathloss::Sum => PathlossMode::DistanceSum,
                Pathloss::Product => PathlossMode::DistanceProduct,
            };
        }
        cfg.validate()?;
        if self.threads == Some(0) {
            bail!("--threads must be positive");
        }
        Ok(cfg)
    }

    fn methods(&self) -> Result<Option<Vec<Method>>> {
        self.methods
            .as_ref()
            .map(|list| {
                list.iter()
                    .filter(|s| !s.is_empty())
                    .map(|s| s.trim().parse::<Method>().map_err(Into::into))
                    .collect()
            })
            .transpose()
    }

    fn emit(&self, table: &SweepTable) -> Result<()> {
        let text = match self.format {
            Format::Csv => to_csv(table),
            Format::Json => to_json(table)?,
        };
        match &self.out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn sweep(kind: SweepKind, args: &RunArgs) -> Result<()> {
    let cfg = args.load()?;
    let mut spec = cfg.sweep_spec(kind)?;
    if let Some(methods) = args.methods()? {
        spec.methods = methods;
    }
    log::info!(
        "{kind} sweep: {} grid points x {} trials x {} methods",
        spec.grid.len(),
        spec.trials,
        spec.methods.len()
    );
    let table = run_sweep(&spec, args.threads)?;
    let failed: usize = table.rows.iter().map(|r| r.errors).sum();
    if failed > 0 {
        log::warn!("{failed} method runs failed and were left out of the means");
    }
    args.emit(&table)
}

fn convergence(args: &RunArgs) -> Result<()> {
    let cfg = args.load()?;
    if args.methods.is_some() {
        bail!("the convergence study always runs the iterative solver; drop --methods");
    }
    let section = &cfg.sweeps.convergence;
    let mut scenario = cfg.scenario.clone();
    if let Some(p) = section.transmit_power_dbm {
        scenario.transmit_power_dbm = p;
    }
    let study = convergence_study(&scenario, &section.elements, section.max_sweeps, cfg.trials, args.threads)?;
    args.emit(&study.table)
}

fn validate(seed: u64, instances: u64) -> Result<()> {
    let checks = run_invariant_suite(seed, instances);
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    if failed > 0 {
        bail!("{failed} of {} checks failed", checks.len());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SweepPower(a) => sweep(SweepKind::Power, a),
        Command::SweepElements(a) => sweep(SweepKind::Elements, a),
        Command::SweepDistance(a) => sweep(SweepKind::Distance, a),
        Command::SweepBits(a) => sweep(SweepKind::Bits, a),
        Command::Convergence(a) => convergence(a),
        Command::Validate { seed, instances } => validate(*seed, *instances),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
