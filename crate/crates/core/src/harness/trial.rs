use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::channel::ChannelSet;
use crate::config::ScenarioConfig;
use crate::effective::{active_beamformer, effective_channel, spectrum_efficiency, EffectiveChannel};
use crate::error::Result;
use crate::qcqp::{PhaseVector, QcqpData};
use crate::rng::{stream, Purpose};
use crate::sdp::{sdp_upper_bound, SdpOptions};
use crate::solvers::{
    iterative_quantized_solve, iterative_solve, no_irs_baseline, quantize_phases, random_phases, sdr_solve,
    IterativeOptions, Method, SdrOptions, SolverReport,
};

/// One method's outcome on one channel realisation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub sweep_value: f64,
    pub method: Method,
    /// bits/s/Hz; `NaN` when `error` is set.
    pub spectrum_efficiency: f64,
    /// `θ̄^H R θ̄` with `R` built from SNR-normalised channels.
    pub qcqp_objective: f64,
    pub sweeps_used: usize,
    /// Seconds; not covered by the determinism guarantee.
    pub wall_time: f64,
    pub channel_hash: u64,
    pub error: Option<String>,
}

/// Runs every method in `methods` on the channels of trial `trial_index`.
/// A failing method is recorded with its error and the others still run.
pub fn run_trial(cfg: &ScenarioConfig, methods: &[Method], trial_index: u64, sweep_value: f64) -> Result<Vec<TrialRecord>> {
    let channels = ChannelSet::draw(cfg, &mut stream(cfg.seed, trial_index, Purpose::Channel))?;
    // Scaling by sqrt(ρ/(Ns σ²)) keeps R at SNR scale instead of ~1e-12.
    let normalised = channels.scaled(cfg.snr_scale().sqrt());
    let qcqp = QcqpData::from_channels(&normalised)?;
    let hash = channels.realization_hash();

    let mut records = Vec::with_capacity(methods.len());
    for &method in methods {
        let start = Instant::now();
        let outcome = solve_method(cfg, method, &channels, &qcqp, trial_index).and_then(|(report, h_eff)| {
            let w = active_beamformer(&h_eff, cfg.num_streams)?;
            let se = spectrum_efficiency(
                &h_eff,
                &w.matrix,
                cfg.transmit_power_mw(),
                cfg.noise_power_mw(),
                cfg.num_streams,
            )?;
            Ok((report, se))
        });
        let wall_time = start.elapsed().as_secs_f64();
        records.push(match outcome {
            Ok((report, se)) => TrialRecord {
                trial_index,
                sweep_value,
                method,
                spectrum_efficiency: se,
                qcqp_objective: report.final_objective,
                sweeps_used: report.sweeps_used,
                wall_time,
                channel_hash: hash,
                error: None,
            },
            Err(e) => {
                log::warn!("trial {trial_index}, {method}: {e}");
                TrialRecord {
                    trial_index,
                    sweep_value,
                    method,
                    spectrum_efficiency: f64::NAN,
                    qcqp_objective: f64::NAN,
                    sweeps_used: 0,
                    wall_time,
                    channel_hash: hash,
                    error: Some(e.to_string()),
                }
            }
        });
    }
    Ok(records)
}

/// Phase vector and effective channel produced by `method`. `qcqp` must be
/// built from the (normalised) `channels` of the same trial.
pub fn solve_method(
    cfg: &ScenarioConfig,
    method: Method,
    channels: &ChannelSet,
    qcqp: &QcqpData,
    trial_index: u64,
) -> Result<(SolverReport, EffectiveChannel)> {
    let r = &qcqp.r;
    let m = qcqp.m();
    let settings = &cfg.solver;
    let iter_opts = IterativeOptions {
        max_sweeps: settings.sweeps,
        tol: settings.tol,
    };
    let init = || {
        if settings.random_init {
            random_phases(m, &mut stream(cfg.seed, trial_index, Purpose::RandomPhases))
        } else {
            PhaseVector::zeros(m)
        }
    };
    let sdr = || {
        let seed = stream(cfg.seed, trial_index, Purpose::SdpInit).random::<u64>();
        let opts = SdrOptions {
            sdp: SdpOptions::from_settings(&settings.sdp, seed),
            candidates: settings.candidates,
        };
        sdr_solve(r, &mut stream(cfg.seed, trial_index, Purpose::Randomization), &opts)
    };

    let report = match method {
        Method::Iterative => iterative_solve(r, &init(), &iter_opts),
        Method::IterativeQuantized => iterative_quantized_solve(r, &init(), &iter_opts, cfg.quantization_bits),
        Method::Sdr => sdr()?,
        Method::SdrQuantized => {
            let base = sdr()?;
            let theta = quantize_phases(&base.theta, cfg.quantization_bits);
            let mut report = SolverReport::simple(Method::SdrQuantized, r, theta, base.upper_bound);
            report.sweeps_used = base.sweeps_used;
            report.multiply_adds = base.multiply_adds;
            report.relaxation_objective = base.relaxation_objective;
            report.degenerate_reference = base.degenerate_reference;
            report
        }
        Method::Random => {
            let theta = random_phases(m, &mut stream(cfg.seed, trial_index, Purpose::RandomPhases));
            SolverReport::simple(Method::Random, r, theta, sdp_upper_bound(r))
        }
        Method::NoIrs => {
            let mut report = SolverReport::simple(Method::NoIrs, r, PhaseVector::zeros(m), sdp_upper_bound(r));
            // Without the reflected path only the constant term remains.
            report.initial_objective = 0.0;
            report.final_objective = 0.0;
            return Ok((report, no_irs_baseline(channels)));
        }
    };
    let h_eff = effective_channel(channels, &report.theta)?;
    Ok((report, h_eff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn small() -> ScenarioConfig {
        let mut cfg = ExperimentConfig::reference().scenario.with_irs_elements(16).unwrap();
        cfg.solver.candidates = 50;
        cfg
    }

    #[test]
    fn trials_are_deterministic_and_paired() {
        let cfg = small();
        let a = run_trial(&cfg, &Method::ALL, 3, 0.0).unwrap();
        let b = run_trial(&cfg, &Method::ALL, 3, 0.0).unwrap();
        assert_eq!(a.len(), Method::ALL.len());
        for (x, y) in a.iter().zip(&b) {
            assert!(x.error.is_none(), "{:?}", x.error);
            assert_eq!(x.spectrum_efficiency.to_bits(), y.spectrum_efficiency.to_bits());
            assert_eq!(x.qcqp_objective.to_bits(), y.qcqp_objective.to_bits());
            assert_eq!(x.channel_hash, a[0].channel_hash);
            assert!(x.spectrum_efficiency >= 0.0);
        }
    }

    #[test]
    fn method_set_does_not_change_results() {
        let cfg = small();
        let all = run_trial(&cfg, &Method::ALL, 1, 0.0).unwrap();
        let one = run_trial(&cfg, &[Method::Sdr], 1, 0.0).unwrap();
        let sdr = all.iter().find(|r| r.method == Method::Sdr).unwrap();
        assert_eq!(sdr.spectrum_efficiency.to_bits(), one[0].spectrum_efficiency.to_bits());
    }

    #[test]
    fn iterative_beats_no_irs_in_most_trials() {
        let cfg = small();
        let wins = (0..20)
            .filter(|&t| {
                let recs = run_trial(&cfg, &[Method::NoIrs, Method::Iterative], t, 0.0).unwrap();
                recs[1].spectrum_efficiency >= recs[0].spectrum_efficiency
            })
            .count();
        assert!(wins >= 18, "{wins}/20");
    }
}
