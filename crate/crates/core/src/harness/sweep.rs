use rayon::prelude::*;
use serde::Serialize;

use super::trial::{run_trial, TrialRecord};
use crate::channel::ChannelSet;
use crate::config::{ExperimentConfig, PhaseResolution, ScenarioConfig, SweepKind};
use crate::effective::{active_beamformer, effective_channel, spectrum_efficiency};
use crate::error::{Error, Result};
use crate::qcqp::{PhaseVector, QcqpData};
use crate::rng::{stream, Purpose};
use crate::sdp::sdp_upper_bound;
use crate::solvers::{iterative_solve, IterativeOptions, Method};

/// A fully resolved sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub grid: Vec<f64>,
    pub trials: usize,
    pub base: ScenarioConfig,
    pub methods: Vec<Method>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.kind == SweepKind::Convergence {
            return Err(Error::Config("use convergence_study for the convergence kind".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.grid.windows(2).any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less)) {
            return Err(Error::Config("sweep grid must be strictly increasing".into()));
        }
        for &v in &self.grid {
            self.scenario_at(v)?;
        }
        Ok(())
    }

    /// The base scenario with the swept parameter set to `value`.
    pub fn scenario_at(&self, value: f64) -> Result<ScenarioConfig> {
        let mut cfg = self.base.clone();
        match self.kind {
            SweepKind::Power => cfg.transmit_power_dbm = value,
            SweepKind::Elements => {
                if !(value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64) {
                    return Err(Error::Config(format!("element count {value} is not a positive integer")));
                }
                cfg = cfg.with_irs_elements(value as usize)?;
            }
            SweepKind::Distance => cfg.irs_position.0[0] = value,
            SweepKind::Bits => cfg.quantization_bits = PhaseResolution::from_value(value)?,
            SweepKind::Convergence => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    /// Sweep `kind` with its section's overrides applied to the scenario.
    pub fn sweep_spec(&self, kind: SweepKind) -> Result<SweepSpec> {
        let section = match kind {
            SweepKind::Power => &self.sweeps.power,
            SweepKind::Elements => &self.sweeps.elements,
            SweepKind::Distance => &self.sweeps.distance,
            SweepKind::Bits => &self.sweeps.bits,
            SweepKind::Convergence => {
                return Err(Error::Config("the convergence study is not a grid sweep".into()))
            }
        };
        let mut base = self.scenario.clone();
        if let Some(p) = section.transmit_power_dbm {
            base.transmit_power_dbm = p;
        }
        if let Some(m) = section.irs_elements {
            base = base.with_irs_elements(m)?;
        }
        let spec = SweepSpec {
            kind,
            grid: section.grid.clone(),
            trials: self.trials,
            base,
            methods: section.methods.clone().unwrap_or_else(|| self.methods.clone()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Aggregate over the trials of one (sweep value, method) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub method: String,
    /// Successful trials.
    pub trials: usize,
    pub mean_se_bps_hz: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std_se_bps_hz: f64,
    pub mean_qcqp_objective: f64,
    pub mean_sweeps_used: f64,
    pub errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub kind: SweepKind,
    pub scenario: ScenarioConfig,
    pub rows: Vec<SweepRow>,
    /// Raw per-trial records in (sweep value, trial, method) order.
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

impl SweepTable {
    pub fn row(&self, sweep_value: f64, method: &str) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.sweep_value.total_cmp(&sweep_value).is_eq())
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return if xs.is_empty() { f64::NAN } else { 0.0 };
    }
    let mu = mean(xs);
    (xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

fn aggregate(sweep_value: f64, method: String, records: &[&TrialRecord]) -> SweepRow {
    let ok: Vec<&&TrialRecord> = records.iter().filter(|r| r.error.is_none()).collect();
    let se: Vec<f64> = ok.iter().map(|r| r.spectrum_efficiency).collect();
    let obj: Vec<f64> = ok.iter().map(|r| r.qcqp_objective).collect();
    let sweeps: Vec<f64> = ok.iter().map(|r| r.sweeps_used as f64).collect();
    SweepRow {
        sweep_value,
        method,
        trials: ok.len(),
        mean_se_bps_hz: mean(&se),
        std_se_bps_hz: sample_std(&se),
        mean_qcqp_objective: mean(&obj),
        mean_sweeps_used: mean(&sweeps),
        errors: records.len() - ok.len(),
    }
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs every (grid value, trial) pair, in parallel when `threads` allows,
/// and reduces in trial order. `threads = None` uses rayon's global pool.
pub fn run_sweep(spec: &SweepSpec, threads: Option<usize>) -> Result<SweepTable> {
    spec.validate()?;
    let scenarios: Vec<ScenarioConfig> = spec.grid.iter().map(|&v| spec.scenario_at(v)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, u64)> = (0..spec.grid.len())
        .flat_map(|g| (0..spec.trials as u64).map(move |t| (g, t)))
        .collect();
    let results: Vec<Result<Vec<TrialRecord>>> = in_pool(threads, || {
        jobs.par_iter()
            .map(|&(g, t)| run_trial(&scenarios[g], &spec.methods, t, spec.grid[g]))
            .collect()
    })?;
    let mut records = Vec::with_capacity(jobs.len() * spec.methods.len());
    for r in results {
        records.extend(r?);
    }

    let mut rows = Vec::with_capacity(spec.grid.len() * spec.methods.len());
    for (g, &value) in spec.grid.iter().enumerate() {
        let chunk = &records[g * spec.trials * spec.methods.len()..(g + 1) * spec.trials * spec.methods.len()];
        for &method in &spec.methods {
            let mine: Vec<&TrialRecord> = chunk.iter().filter(|r| r.method == method).collect();
            rows.push(aggregate(value, method.to_string(), &mine));
        }
    }
    Ok(SweepTable {
        kind: spec.kind,
        scenario: spec.base.clone(),
        rows,
        records,
    })
}

/// Per-sweep objective trace of one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTrace {
    pub elements: usize,
    pub trial_index: u64,
    /// `trace[0]` is the starting point, `trace[k]` the value after sweep `k`.
    pub objective: Vec<f64>,
    pub spectrum_efficiency: Vec<f64>,
    pub upper_bound: f64,
    /// Sweeps needed to come within `tol` (relative) of the final value.
    pub sweeps_to_plateau: usize,
    /// First sweep whose relative change from the previous one is below `tol`.
    pub first_small_step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub traces: Vec<ConvergenceTrace>,
    pub table: SweepTable,
}

fn rel_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(f64::MIN_POSITIVE)
}

/// First sweep `k ≥ 1` whose relative change from sweep `k - 1` is below
/// `tol`, or the last sweep if none is.
pub(crate) fn first_small_step(trace: &[f64], tol: f64) -> usize {
    (1..trace.len())
        .find(|&k| rel_change(trace[k], trace[k - 1]) < tol)
        .unwrap_or(trace.len() - 1)
}

/// Smallest `k` with `trace[k]` within `tol` (relative) of the last entry.
pub(crate) fn sweeps_to_plateau(trace: &[f64], tol: f64) -> usize {
    let last = *trace.last().expect("non-empty trace");
    (0..trace.len())
        .find(|&k| rel_change(last, trace[k]) < tol)
        .unwrap_or(trace.len() - 1)
}

/// Iterative solver traces with early exit disabled, `max_sweeps` sweeps for
/// each IRS size. The table uses the common schema with `sweep_value` the
/// sweep index, method label `iterative/M=<m>` and `mean_sweeps_used` the
/// mean sweeps to plateau.
pub fn convergence_study(
    base: &ScenarioConfig,
    elements: &[usize],
    max_sweeps: usize,
    trials: usize,
    threads: Option<usize>,
) -> Result<ConvergenceStudy> {
    if elements.is_empty() || max_sweeps == 0 || trials == 0 {
        return Err(Error::Config("convergence study needs elements, sweeps and trials".into()));
    }
    let scenarios: Vec<ScenarioConfig> = elements
        .iter()
        .map(|&m| base.clone().with_irs_elements(m).and_then(|c| c.validate().map(|_| c)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, u64)> = (0..elements.len())
        .flat_map(|e| (0..trials as u64).map(move |t| (e, t)))
        .collect();
    let traces: Vec<Result<ConvergenceTrace>> = in_pool(threads, || {
        jobs.par_iter()
            .map(|&(e, t)| trace_trial(&scenarios[e], t, max_sweeps))
            .collect()
    })?;
    let traces: Vec<ConvergenceTrace> = traces.into_iter().collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for &m in elements {
        let mine: Vec<&ConvergenceTrace> = traces.iter().filter(|t| t.elements == m).collect();
        let label = format!("{}/M={m}", Method::Iterative);
        let to_converge: Vec<f64> = mine.iter().map(|t| t.sweeps_to_plateau as f64).collect();
        for k in 0..=max_sweeps {
            let se: Vec<f64> = mine.iter().map(|t| t.spectrum_efficiency[k]).collect();
            let obj: Vec<f64> = mine.iter().map(|t| t.objective[k]).collect();
            rows.push(SweepRow {
                sweep_value: k as f64,
                method: label.clone(),
                trials: mine.len(),
                mean_se_bps_hz: mean(&se),
                std_se_bps_hz: sample_std(&se),
                mean_qcqp_objective: mean(&obj),
                mean_sweeps_used: mean(&to_converge),
                errors: 0,
            });
        }
    }
    Ok(ConvergenceStudy {
        table: SweepTable {
            kind: SweepKind::Convergence,
            scenario: base.clone(),
            rows,
            records: Vec::new(),
        },
        traces,
    })
}

fn trace_trial(cfg: &ScenarioConfig, trial_index: u64, max_sweeps: usize) -> Result<ConvergenceTrace> {
    let channels = ChannelSet::draw(cfg, &mut stream(cfg.seed, trial_index, Purpose::Channel))?;
    let qcqp = QcqpData::from_channels(&channels.scaled(cfg.snr_scale().sqrt()))?;
    let se_of = |theta: &PhaseVector| -> Result<f64> {
        let h = effective_channel(&channels, theta)?;
        let w = active_beamformer(&h, cfg.num_streams)?;
        spectrum_efficiency(&h, &w.matrix, cfg.transmit_power_mw(), cfg.noise_power_mw(), cfg.num_streams)
    };
    let one_sweep = IterativeOptions { max_sweeps: 1, tol: 0.0 };
    let mut theta = PhaseVector::zeros(qcqp.m());
    let mut objective = vec![crate::solvers::homogeneous_objective(&qcqp.r, &theta)];
    let mut se = vec![se_of(&theta)?];
    for _ in 0..max_sweeps {
        let rep = iterative_solve(&qcqp.r, &theta, &one_sweep);
        theta = rep.theta;
        objective.push(rep.final_objective);
        se.push(se_of(&theta)?);
    }
    Ok(ConvergenceTrace {
        elements: qcqp.m(),
        trial_index,
        sweeps_to_plateau: sweeps_to_plateau(&objective, cfg.solver.tol),
        first_small_step: first_small_step(&objective, cfg.solver.tol),
        objective,
        spectrum_efficiency: se,
        upper_bound: sdp_upper_bound(&qcqp.r),
    })
}
