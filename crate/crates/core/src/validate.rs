//! Quick invariant checks on tiny random instances, run by `irs-mimo validate`.

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::ChannelSet;
use crate::effective::{active_beamformer, effective_channel, frobenius_objective};
use crate::linalg::{cscg_matrix, frobenius_sq, hermitian_form, CMatrix};
use crate::qcqp::{discrete_phase_set, qcqp_objective, PhaseVector, QcqpData};
use crate::rng::{stream, Purpose};
use crate::sdp::{sdp_upper_bound, solve_diag_sdp, SdpOptions};
use crate::solvers::{
    element_update, iterative_quantized_solve, quantize_phase, random_phases, IterativeOptions,
};
use crate::config::PhaseResolution;
use crate::qcqp::circular_distance;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed violation, or a count, depending on the check.
    pub detail: String,
}

fn random_channels(seed: u64, instance: u64, nt: usize, nr: usize, m: usize) -> ChannelSet {
    let mut g = stream(seed, instance, Purpose::Validation);
    ChannelSet::new(cscg_matrix(nt, nr, &mut g), cscg_matrix(m, nr, &mut g), cscg_matrix(m, nt, &mut g))
        .expect("consistent shapes")
}

/// Runs every check on `instances` random problems per check.
pub fn run_invariant_suite(seed: u64, instances: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let ch = random_channels(seed, i, 4, 2, 5);
        let theta = random_phases(5, &mut stream(seed, i, Purpose::RandomPhases));
        let h = effective_channel(&ch, &theta).expect("matching sizes");
        let w = active_beamformer(&h, 2).expect("valid stream count");
        let f = frobenius_objective(&h);
        worst = worst.max((frobenius_sq(&(&h.matrix * &w.matrix)) - f).abs() / f);
    }
    out.push(CheckResult {
        name: "trace identity",
        passed: worst < 1e-9,
        detail: format!("max relative error {worst:.3e}"),
    });

    let mut worst: f64 = 0.0;
    for i in 0..instances {
        let ch = random_channels(seed, i, 3, 2, 4);
        let theta = random_phases(4, &mut stream(seed, i, Purpose::RandomPhases));
        let q = QcqpData::from_channels(&ch).expect("matching sizes");
        let f = frobenius_objective(&effective_channel(&ch, &theta).expect("matching sizes"));
        let via_r = hermitian_form(&q.r, &theta.homogenized()) + q.constant_term;
        let direct = qcqp_objective(&q, &theta).expect("matching sizes") + q.constant_term;
        worst = worst.max((via_r - f).abs() / f).max((direct - f).abs() / f);
    }
    out.push(CheckResult {
        name: "qcqp reduction",
        passed: worst < 1e-9,
        detail: format!("max relative error {worst:.3e}"),
    });

    let mut violations = 0;
    for i in 0..instances {
        let q = QcqpData::from_channels(&random_channels(seed, i, 3, 2, 6)).expect("matching sizes");
        let mut bar = PhaseVector::zeros(6).homogenized();
        for _ in 0..3 {
            for m in 0..6 {
                let before = hermitian_form(&q.r, &bar);
                bar[m] = Complex64::from_polar(1.0, element_update(&q.r, &bar, m));
                if hermitian_form(&q.r, &bar) < before - 1e-12 * before.abs() {
                    violations += 1;
                }
            }
        }
        if hermitian_form(&q.r, &bar) > sdp_upper_bound(&q.r) * (1.0 + 1e-9) {
            violations += 1;
        }
    }
    out.push(CheckResult {
        name: "iterative monotonicity and bound",
        passed: violations == 0,
        detail: format!("{violations} violations"),
    });

    let mut violations = 0;
    for i in 0..instances {
        let q = QcqpData::from_channels(&random_channels(seed, i, 2, 2, 4)).expect("matching sizes");
        let best = exhaustive_discrete(&q.r, 2);
        let sdp = solve_diag_sdp(&q.r, &SdpOptions { seed: i, tol: 1e-12, max_sweeps: 20_000, rank: None });
        let quant = iterative_quantized_solve(
            &q.r,
            &PhaseVector::zeros(4),
            &IterativeOptions::default(),
            PhaseResolution::Bits(2),
        );
        let slack = 1e-9 * best.abs();
        if sdp.objective < best - slack || quant.final_objective > best + slack {
            violations += 1;
        }
    }
    out.push(CheckResult {
        name: "discrete sandwich (M=4, B=2)",
        passed: violations == 0,
        detail: format!("{violations} violations"),
    });

    let mut worst: f64 = 0.0;
    let mut g = stream(seed, 0, Purpose::Validation);
    for _ in 0..instances * 100 {
        let theta = random_phases(1, &mut g).phases()[0];
        for bits in 1..=4 {
            let q = quantize_phase(theta, bits);
            let nearest = discrete_phase_set(bits)
                .into_iter()
                .map(|p| circular_distance(p, theta))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(circular_distance(q, theta) - nearest);
        }
    }
    out.push(CheckResult {
        name: "nearest-point quantization",
        passed: worst <= 1e-12,
        detail: format!("max excess distance {worst:.3e}"),
    });

    out
}

/// Exhaustive maximum of `θ̄^H R θ̄` over all `2^(B·M)` discrete assignments.
pub fn exhaustive_discrete(r: &CMatrix, bits: u32) -> f64 {
    let m = r.nrows() - 1;
    let grid = discrete_phase_set(bits);
    let levels = grid.len();
    let total = levels.pow(m as u32);
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; m];
    for _ in 0..total {
        let theta = PhaseVector::from_phases(idx.iter().map(|&k| grid[k]).collect());
        best = best.max(hermitian_form(r, &theta.homogenized()));
        for d in idx.iter_mut() {
            *d += 1;
            if *d < levels {
                break;
            }
            *d = 0;
        }
    }
    best
}
