//! Reduction of `‖H_r^H Θ G + H_d^H‖_F²` to a unit-modulus QCQP.
//!
//! With `G_c` the coupled reflected channel and `h_v = vec(H_d^H)`,
//!
//! ```text
//! ‖H_eff‖_F² = θ^H G_c^H G_c θ + 2 Re(θ^H G_c^H h_v) + h_v^H h_v
//!            = θ̄^H R θ̄ + h_v^H h_v,          θ̄ = [θ; 1]
//! ```
//!
//! where `R = [[G_c^H G_c, G_c^H h_v], [h_v^H G_c, 0]]`. Indices are 0-based:
//! the homogenising coordinate is `θ̄[M]`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::ChannelSet;
use crate::config::PhaseResolution;
use crate::error::{Error, Result};
use crate::geometry::wrap_angle;
use crate::linalg::{CMatrix, CVector, ONE, ZERO};

/// IRS reflection coefficients `θ_v[m] = exp(j θ[m])`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector {
    phases: Vec<f64>,
    resolution: PhaseResolution,
}

impl PhaseVector {
    /// Continuous phases; each is wrapped into `(-π, π]`.
    pub fn from_phases(phases: Vec<f64>) -> Self {
        Self {
            phases: phases.into_iter().map(wrap_angle).collect(),
            resolution: PhaseResolution::Continuous,
        }
    }

    /// All-zero phases (`θ_v` = all ones).
    pub fn zeros(m: usize) -> Self {
        Self::from_phases(vec![0.0; m])
    }

    /// Phases taken from the arguments of arbitrary nonzero complex entries.
    pub fn from_arguments(values: &[Complex64]) -> Self {
        Self::from_phases(values.iter().map(|z| z.arg()).collect())
    }

    /// Tags the vector as `bits`-bit discrete. Every phase must already lie
    /// on the grid.
    pub fn into_discrete(mut self, bits: u32) -> Result<Self> {
        let grid = discrete_phase_set(bits);
        let tol = 1e-9;
        for &p in &self.phases {
            if !grid.iter().any(|&g| circular_distance(g, p) < tol) {
                return Err(Error::Domain(format!("phase {p} is not on the {bits}-bit grid")));
            }
        }
        self.resolution = PhaseResolution::Bits(bits);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn resolution(&self) -> PhaseResolution {
        self.resolution
    }

    pub fn coefficients(&self) -> CVector {
        CVector::from_iterator(
            self.phases.len(),
            self.phases.iter().map(|&p| Complex64::from_polar(1.0, p)),
        )
    }

    /// `θ̄ = [θ_v; 1]`.
    pub fn homogenized(&self) -> CVector {
        let m = self.phases.len();
        CVector::from_fn(m + 1, |i, _| {
            if i < m {
                Complex64::from_polar(1.0, self.phases[i])
            } else {
                ONE
            }
        })
    }
}

/// The `2^B` phases `{-π + 2πk/2^B : k = 1..2^B}`, ascending.
pub fn discrete_phase_set(bits: u32) -> Vec<f64> {
    let levels = 1u64 << bits;
    (1..=levels)
        .map(|k| -PI + 2.0 * PI * k as f64 / levels as f64)
        .collect()
}

/// Angular distance on the circle, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// The reduced problem consumed by all passive solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct QcqpData {
    /// `G_c`, `(Nt·Nr) × M`.
    pub coupled: CMatrix,
    /// `h_v = vec(H_d^H)`, length `Nt·Nr`.
    pub direct: CVector,
    /// Homogenised `R`, `(M+1) × (M+1)` Hermitian.
    pub r: CMatrix,
    /// `h_v^H h_v`, dropped from the QCQP objective.
    pub constant_term: f64,
}

impl QcqpData {
    pub fn from_channels(channels: &ChannelSet) -> Result<Self> {
        let coupled = coupled_channel(&channels.ap_irs, &channels.irs_user)?;
        let direct = vectorize_direct(&channels.direct);
        Self::from_parts(coupled, direct)
    }

    pub fn from_parts(coupled: CMatrix, direct: CVector) -> Result<Self> {
        let r = build_r(&coupled, &direct)?;
        let constant_term = direct.norm_squared();
        Ok(Self {
            coupled,
            direct,
            r,
            constant_term,
        })
    }

    pub fn m(&self) -> usize {
        self.coupled.ncols()
    }
}

/// 0-based positions of the diagonal in the column-stacked `vec` of an
/// `M × M` matrix.
pub fn nonzero_index_set(m: usize) -> Vec<usize> {
    (0..m).map(|i| i * m + i).collect()
}

/// `G_c`, built column by column: column `m` is `G[m, :]^T ⊗ H_r^H[:, m]`.
pub fn coupled_channel(ap_irs: &CMatrix, irs_user: &CMatrix) -> Result<CMatrix> {
    let (m, nt) = ap_irs.shape();
    let (m2, nr) = irs_user.shape();
    if m != m2 {
        return Err(Error::Dimension(format!(
            "G has {m} rows but H_r has {m2}; both must equal the IRS size"
        )));
    }
    let mut out = CMatrix::zeros(nt * nr, m);
    for col in 0..m {
        for i in 0..nt {
            let g = ap_irs[(col, i)];
            for j in 0..nr {
                out[(i * nr + j, col)] = g * irs_user[(col, j)].conj();
            }
        }
    }
    Ok(out)
}

/// `h_v = vec(H_d^H)`, column-stacked.
pub fn vectorize_direct(direct: &CMatrix) -> CVector {
    let (nt, nr) = direct.shape();
    CVector::from_fn(nt * nr, |idx, _| {
        let (i, j) = (idx / nr, idx % nr);
        direct[(i, j)].conj()
    })
}

/// Homogenised QCQP matrix. The upper triangle is computed and mirrored, so
/// the result is exactly Hermitian with a real diagonal.
pub fn build_r(coupled: &CMatrix, direct: &CVector) -> Result<CMatrix> {
    if coupled.nrows() != direct.len() {
        return Err(Error::Dimension(format!(
            "G_c has {} rows but h_v has length {}",
            coupled.nrows(),
            direct.len()
        )));
    }
    let m = coupled.ncols();
    let mut r = CMatrix::zeros(m + 1, m + 1);
    for j in 0..m {
        let cj = coupled.column(j);
        for i in 0..=j {
            let v = coupled.column(i).dotc(&cj);
            if i == j {
                r[(i, i)] = Complex64::new(v.re, 0.0);
            } else {
                r[(i, j)] = v;
                r[(j, i)] = v.conj();
            }
        }
        let v = coupled.column(j).dotc(direct);
        r[(j, m)] = v;
        r[(m, j)] = v.conj();
    }
    r[(m, m)] = ZERO;
    Ok(r)
}

/// QCQP objective `θ^H G_c^H G_c θ + 2 Re(θ^H G_c^H h_v)`, evaluated through
/// `G_c` (not through `R`).
pub fn qcqp_objective(data: &QcqpData, theta: &PhaseVector) -> Result<f64> {
    if theta.len() != data.m() {
        return Err(Error::Dimension(format!(
            "phase vector has {} entries, problem has {}",
            theta.len(),
            data.m()
        )));
    }
    let g_theta = &data.coupled * theta.coefficients();
    Ok(g_theta.norm_squared() + 2.0 * g_theta.dotc(&data.direct).re)
}
