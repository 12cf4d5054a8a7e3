//! Semidefinite relaxation followed by Gaussian randomisation.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::Rng;

use super::{Method, SolverReport};
use crate::error::{Error, Result};
use crate::linalg::{cscg, hermitian_form, CMatrix, CVector, ONE, ZERO};
use crate::qcqp::PhaseVector;
use crate::sdp::{sdp_upper_bound, solve_diag_sdp, SdpOptions, SdpSolution};

/// Eigenvalues of `V` below `-NEGATIVE_EIGENVALUE_TOL · λmax` are an error.
pub const NEGATIVE_EIGENVALUE_TOL: f64 = 1e-8;

/// `|θ̃[M+1]|` below this fraction of `max |θ̃|` counts as zero.
pub const REFERENCE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdrOptions {
    pub sdp: SdpOptions,
    pub candidates: usize,
}

impl Default for SdrOptions {
    fn default() -> Self {
        Self {
            sdp: SdpOptions::default(),
            candidates: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedPhases {
    pub theta: PhaseVector,
    /// The last coordinate was (numerically) zero and reference phase 0 was used.
    pub degenerate_reference: bool,
}

/// `θ_v = exp(j (arg θ̃[m] - arg θ̃[M+1]))`.
pub fn extract_phases(theta_tilde: &CVector) -> ExtractedPhases {
    let n = theta_tilde.len();
    assert!(n >= 1, "need at least the homogenising coordinate");
    let m = n - 1;
    let peak = theta_tilde.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let last = theta_tilde[m];
    let degenerate = last.norm() <= REFERENCE_TOL * peak || last == ZERO;
    let reference = if degenerate { 0.0 } else { last.arg() };
    let phases = (0..m).map(|i| theta_tilde[i].arg() - reference).collect();
    ExtractedPhases {
        theta: PhaseVector::from_phases(phases),
        degenerate_reference: degenerate,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Randomized {
    /// The winning candidate `U Σ^{1/2} r`.
    pub theta_tilde: CVector,
    pub extracted: ExtractedPhases,
    /// `θ̄^H R θ̄` of the extracted unit-modulus vector.
    pub objective: f64,
    /// Objective of every candidate, in draw order.
    pub candidate_objectives: Vec<f64>,
}

/// Draws `num_candidates` vectors `U Σ^{1/2} r` with `r ~ CN(0, I)` and keeps
/// the one whose extracted phase vector scores best on `R`.
pub fn gaussian_randomization<G: Rng + ?Sized>(
    sdp: &SdpSolution,
    r: &CMatrix,
    rng: &mut G,
    num_candidates: usize,
) -> Result<Randomized> {
    if num_candidates == 0 {
        return Err(Error::Domain("num_candidates must be at least 1".into()));
    }
    let n = sdp.v.nrows();
    if r.nrows() != n || r.ncols() != n {
        return Err(Error::Dimension(format!(
            "R is {}x{} but V is {n}x{n}",
            r.nrows(),
            r.ncols()
        )));
    }
    let eig = SymmetricEigen::new(sdp.v.clone());
    let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -NEGATIVE_EIGENVALUE_TOL * max.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::InfeasibleSdp {
            min_eigenvalue: min,
            max_eigenvalue: max,
        });
    }
    // Columns of U Σ^{1/2}. Eigenvalues at rounding level are clamped to zero
    // along with the negative ones; their columns are skipped but the `r`
    // entries are still drawn so the stream layout is fixed.
    let floor = n as f64 * f64::EPSILON * max;
    let factors: Vec<(usize, CVector)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > floor)
        .map(|(c, &l)| (c, eig.eigenvectors.column(c) * Complex64::from(l.sqrt())))
        .collect();

    let mut best: Option<Randomized> = None;
    let mut objectives = Vec::with_capacity(num_candidates);
    let mut draw = vec![ZERO; n];
    for _ in 0..num_candidates {
        for d in draw.iter_mut() {
            *d = cscg(rng);
        }
        let mut tilde = CVector::zeros(n);
        for (c, col) in &factors {
            tilde.axpy(draw[*c], col, ONE);
        }
        let extracted = extract_phases(&tilde);
        let objective = hermitian_form(r, &extracted.theta.homogenized());
        objectives.push(objective);
        if best.as_ref().is_none_or(|b| objective > b.objective) {
            best = Some(Randomized {
                theta_tilde: tilde,
                extracted,
                objective,
                candidate_objectives: Vec::new(),
            });
        }
    }
    let mut best = best.expect("at least one candidate");
    best.candidate_objectives = objectives;
    Ok(best)
}

/// SDP relaxation, randomisation and phase extraction.
pub fn sdr_solve<G: Rng + ?Sized>(r: &CMatrix, rng: &mut G, opts: &SdrOptions) -> Result<SolverReport> {
    let sdp = solve_diag_sdp(r, &opts.sdp);
    let picked = gaussian_randomization(&sdp, r, rng, opts.candidates)?;
    let n = r.nrows() as u64;
    Ok(SolverReport {
        method: Method::Sdr,
        theta: picked.extracted.theta,
        initial_objective: picked.objective,
        objective_trace: vec![picked.objective],
        final_objective: picked.objective,
        upper_bound: sdp_upper_bound(r),
        sweeps_used: sdp.iterations,
        min_update_gain: f64::INFINITY,
        multiply_adds: sdp.multiply_adds + opts.candidates as u64 * 2 * n * n,
        relaxation_objective: Some(sdp.objective),
        degenerate_reference: picked.extracted.degenerate_reference,
    })
}
