//! Element-wise coordinate ascent on `θ̄^H R θ̄`.
//!
//! Holding every other phase fixed, the objective depends on element `m`
//! only through `2 Re(e^{jθ_m} s_m)` with `s_m = Σ_{i≠m} conj(θ̄_i) R[i,m]`,
//! so the best phase is `-arg(s_m)` (or its nearest grid point). A sweep
//! visits `m = 0..M-1` in order and costs `Θ(M²)`.

use num_complex::Complex64;

use super::quantize::quantize_phase;
use super::{Method, SolverReport};
use crate::config::PhaseResolution;
use crate::linalg::{hermitian_form, CMatrix, CVector, ZERO};
use crate::qcqp::PhaseVector;
use crate::sdp::{sdp_upper_bound, ZERO_GRADIENT_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterativeOptions {
    /// Maximum number of sweeps `K`.
    pub max_sweeps: usize,
    /// Stop once the relative sweep-to-sweep change drops below this;
    /// non-positive disables early exit.
    pub tol: f64,
}

impl Default for IterativeOptions {
    fn default() -> Self {
        Self {
            max_sweeps: 5,
            tol: 1e-4,
        }
    }
}

/// `s_m` and the scale it is compared against.
fn coupling(r: &CMatrix, theta_bar: &CVector, m: usize) -> (Complex64, f64) {
    let mut s = ZERO;
    let mut scale = 0.0;
    for i in 0..theta_bar.len() {
        if i != m {
            let rim = r[(i, m)];
            s += theta_bar[i].conj() * rim;
            scale += rim.norm();
        }
    }
    (s, scale)
}

/// Phase of element `m` maximising the objective with the rest fixed,
/// `angle(conj(s_m))`. Returns the current phase when `s_m` vanishes.
pub fn element_update(r: &CMatrix, theta_bar: &CVector, m: usize) -> f64 {
    let (s, scale) = coupling(r, theta_bar, m);
    if s.norm() <= ZERO_GRADIENT_TOL * scale || s == ZERO {
        theta_bar[m].arg()
    } else {
        s.conj().arg()
    }
}

pub fn iterative_solve(r: &CMatrix, init: &PhaseVector, opts: &IterativeOptions) -> SolverReport {
    run(r, init, opts, PhaseResolution::Continuous)
}

/// Coordinate ascent where each element only takes values in the `bits`-bit
/// phase set. The starting point is quantised first.
pub fn iterative_quantized_solve(
    r: &CMatrix,
    init: &PhaseVector,
    opts: &IterativeOptions,
    resolution: PhaseResolution,
) -> SolverReport {
    let mut report = run(r, init, opts, resolution);
    report.method = Method::IterativeQuantized;
    report
}

fn run(r: &CMatrix, init: &PhaseVector, opts: &IterativeOptions, resolution: PhaseResolution) -> SolverReport {
    let m = init.len();
    assert_eq!(r.nrows(), m + 1, "R must be (M+1)x(M+1)");
    let snap = |p: f64| match resolution {
        PhaseResolution::Continuous => p,
        PhaseResolution::Bits(b) => quantize_phase(p, b),
    };
    let mut phases: Vec<f64> = init.phases().iter().map(|&p| snap(p)).collect();
    let mut theta_bar = PhaseVector::from_phases(phases.clone()).homogenized();

    let initial_objective = hermitian_form(r, &theta_bar);
    let mut objective = initial_objective;
    let mut trace = Vec::with_capacity(opts.max_sweeps);
    let mut min_gain = f64::INFINITY;
    let mut multiply_adds = ((m + 1) * (m + 1)) as u64;

    for _ in 0..opts.max_sweeps {
        for k in 0..m {
            let (s, scale) = coupling(r, &theta_bar, k);
            multiply_adds += m as u64;
            if s.norm() <= ZERO_GRADIENT_TOL * scale || s == ZERO {
                min_gain = min_gain.min(0.0);
                continue;
            }
            let target = snap(s.conj().arg());
            let next = Complex64::from_polar(1.0, target);
            // Change of 2 Re(e^{jθ_k} s_k); the rest of the form is unchanged.
            let gain = 2.0 * ((next * s).re - (theta_bar[k] * s).re);
            if gain > 0.0 {
                phases[k] = target;
                theta_bar[k] = next;
                min_gain = min_gain.min(gain);
            } else {
                min_gain = min_gain.min(0.0);
            }
        }
        let next = hermitian_form(r, &theta_bar);
        multiply_adds += ((m + 1) * (m + 1)) as u64;
        let change = (next - objective).abs() / next.abs().max(f64::MIN_POSITIVE);
        objective = next;
        trace.push(next);
        if change < opts.tol {
            break;
        }
    }

    let mut theta = PhaseVector::from_phases(phases);
    if let PhaseResolution::Bits(b) = resolution {
        theta = theta.into_discrete(b).expect("committed phases lie on the grid");
    }
    SolverReport {
        method: Method::Iterative,
        theta,
        initial_objective,
        sweeps_used: trace.len(),
        final_objective: objective,
        objective_trace: trace,
        upper_bound: sdp_upper_bound(r),
        min_update_gain: min_gain,
        multiply_adds,
        relaxation_objective: None,
        degenerate_reference: false,
    }
}
