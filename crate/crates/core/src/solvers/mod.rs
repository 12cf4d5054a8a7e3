//! IRS phase-vector solvers and baselines.

mod iterative;
mod quantize;
mod sdr;

use std::fmt;
use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use iterative::{element_update, iterative_quantized_solve, iterative_solve, IterativeOptions};
pub use quantize::{quantize_phase, quantize_phases};
pub use sdr::{extract_phases, gaussian_randomization, sdr_solve, ExtractedPhases, Randomized, SdrOptions};

use crate::channel::ChannelSet;
use crate::effective::EffectiveChannel;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_form, CMatrix};
use crate::qcqp::PhaseVector;

/// Passive beamforming methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Semidefinite relaxation + Gaussian randomisation.
    Sdr,
    /// Element-wise coordinate ascent.
    Iterative,
    /// SDR output rounded to the discrete phase set.
    SdrQuantized,
    /// Coordinate ascent restricted to the discrete phase set.
    IterativeQuantized,
    /// I.i.d. uniform phases.
    Random,
    /// Direct link only.
    NoIrs,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Sdr,
        Method::Iterative,
        Method::SdrQuantized,
        Method::IterativeQuantized,
        Method::Random,
        Method::NoIrs,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Sdr => "sdr",
            Method::Iterative => "iterative",
            Method::SdrQuantized => "sdr-quantized",
            Method::IterativeQuantized => "iterative-quantized",
            Method::Random => "random",
            Method::NoIrs => "no-irs",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown method {s:?}")))
    }
}

/// Outcome of one passive-beamforming solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub method: Method,
    pub theta: PhaseVector,
    /// `θ̄^H R θ̄` at the starting point (iterative methods).
    pub initial_objective: f64,
    /// `θ̄^H R θ̄` after each sweep.
    pub objective_trace: Vec<f64>,
    pub final_objective: f64,
    /// `(M+1) λmax(R)`.
    pub upper_bound: f64,
    pub sweeps_used: usize,
    /// Smallest single element-update gain observed (iterative methods).
    pub min_update_gain: f64,
    /// Complex multiply-adds spent in the solve.
    pub multiply_adds: u64,
    /// SDP value `tr(RV)` for the SDR methods.
    pub relaxation_objective: Option<f64>,
    /// The homogenising coordinate vanished during phase extraction.
    pub degenerate_reference: bool,
}

impl SolverReport {
    pub(crate) fn simple(method: Method, r: &CMatrix, theta: PhaseVector, upper_bound: f64) -> Self {
        let objective = homogeneous_objective(r, &theta);
        Self {
            method,
            theta,
            initial_objective: objective,
            objective_trace: Vec::new(),
            final_objective: objective,
            upper_bound,
            sweeps_used: 0,
            min_update_gain: f64::INFINITY,
            multiply_adds: 0,
            relaxation_objective: None,
            degenerate_reference: false,
        }
    }
}

/// `θ̄^H R θ̄` with `θ̄ = [θ_v; 1]`.
pub fn homogeneous_objective(r: &CMatrix, theta: &PhaseVector) -> f64 {
    hermitian_form(r, &theta.homogenized())
}

/// `M` i.i.d. phases, uniform on `(-π, π]`.
pub fn random_phases<R: Rng + ?Sized>(m: usize, rng: &mut R) -> PhaseVector {
    PhaseVector::from_phases((0..m).map(|_| PI - 2.0 * PI * rng.random::<f64>()).collect())
}

/// Effective channel with the reflected path removed: `H_d^H`.
pub fn no_irs_baseline(channels: &ChannelSet) -> EffectiveChannel {
    EffectiveChannel {
        matrix: channels.direct.adjoint(),
    }
}
