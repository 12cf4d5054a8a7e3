//! Low-rank solver for `max tr(R V)` subject to `diag(V) = 1`, `V ⪰ 0`.
//!
//! `V` is parameterised as `Y Y^H` with `Y` an `n × k` matrix of unit-norm
//! rows, so every iterate is feasible. Rows are updated cyclically; row `i`
//! moves to `g / ‖g‖` with `g = Σ_{j≠i} R[i,j] y_j`, which maximises the
//! objective over that row with the others fixed. With
//! `k = ⌈√(2n)⌉ + 1` the factorised problem generically shares the SDP's
//! global optimum.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::SdpSettings;
use crate::linalg::{cscg, max_eigenvalue, CMatrix, ZERO};
use crate::rng;

/// Relative size of `g` below which a row update is skipped.
pub const ZERO_GRADIENT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpOptions {
    pub rank: Option<usize>,
    pub max_sweeps: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self::from_settings(&SdpSettings::default(), 0)
    }
}

impl SdpOptions {
    pub fn from_settings(settings: &SdpSettings, seed: u64) -> Self {
        Self {
            rank: settings.rank,
            max_sweeps: settings.max_sweeps,
            tol: settings.tol,
            seed,
        }
    }
}

/// Default factor rank for an `n × n` problem.
pub fn default_rank(n: usize) -> usize {
    ((2.0 * n as f64).sqrt().ceil() as usize + 1).min(n.max(1))
}

/// Row-normalised factor `Y` with `V = Y Y^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactor {
    pub y: CMatrix,
}

impl LowRankFactor {
    /// Random unit-norm rows.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        let mut y = CMatrix::from_fn(n, k, |_, _| cscg(rng));
        for mut row in y.row_iter_mut() {
            let norm = row.norm();
            if norm > 0.0 {
                row /= Complex64::from(norm);
            } else {
                row[0] = Complex64::from(1.0);
            }
        }
        Self { y }
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn rank(&self) -> usize {
        self.y.ncols()
    }

    /// `tr(R Y Y^H) = Σ_{i,j} R[i,j] ⟨y_j, y_i⟩`.
    pub fn objective(&self, r: &CMatrix) -> f64 {
        let ry = r * &self.y;
        // tr(Y^H R Y)
        let mut acc = ZERO;
        for i in 0..self.n() {
            for l in 0..self.rank() {
                acc += self.y[(i, l)].conj() * ry[(i, l)];
            }
        }
        acc.re
    }

    /// Optimal update of row `i`; returns the objective gain (≥ 0). The row
    /// is left untouched when `g` vanishes or no strict gain is available.
    pub fn update_row(&mut self, r: &CMatrix, i: usize) -> f64 {
        let (n, k) = self.y.shape();
        let mut g = vec![ZERO; k];
        let mut scale = 0.0;
        for j in 0..n {
            if j == i {
                continue;
            }
            let rij = r[(i, j)];
            scale += rij.norm();
            for (l, gl) in g.iter_mut().enumerate() {
                *gl += rij * self.y[(j, l)];
            }
        }
        let g_norm = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if g_norm <= ZERO_GRADIENT_TOL * scale || g_norm == 0.0 {
            return 0.0;
        }
        // Row i contributes 2 Re⟨y_i, g⟩ off the diagonal; R[i,i] is fixed
        // because ‖y_i‖ = 1.
        let current: f64 = (0..k).map(|l| (self.y[(i, l)] * g[l].conj()).re).sum();
        let gain = 2.0 * (g_norm - current);
        if gain <= 0.0 {
            return 0.0;
        }
        for (l, gl) in g.iter().enumerate() {
            self.y[(i, l)] = gl / g_norm;
        }
        gain
    }

    /// `V = Y Y^H`, exactly Hermitian with unit diagonal.
    pub fn gram(&self) -> CMatrix {
        let n = self.n();
        let mut v = CMatrix::zeros(n, n);
        for i in 0..n {
            v[(i, i)] = Complex64::from(1.0);
            for j in (i + 1)..n {
                let z = self.y.row(i).dot(&self.y.row(j).map(|z| z.conj()));
                v[(i, j)] = z;
                v[(j, i)] = z.conj();
            }
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    /// `V`, `n × n` Hermitian PSD with unit diagonal.
    pub v: CMatrix,
    pub factor: LowRankFactor,
    /// `tr(R V)`.
    pub objective: f64,
    /// Full sweeps over all rows.
    pub iterations: usize,
    pub converged: bool,
    /// Complex multiply-adds spent in row updates.
    pub multiply_adds: u64,
}

/// Cyclic row-wise coordinate ascent on the factorised SDP.
pub fn solve_diag_sdp(r: &CMatrix, opts: &SdpOptions) -> SdpSolution {
    let n = r.nrows();
    assert_eq!(n, r.ncols(), "R must be square");
    if r.iter().all(|z| *z == ZERO) {
        let factor = LowRankFactor {
            y: CMatrix::identity(n, n),
        };
        return SdpSolution {
            v: CMatrix::identity(n, n),
            factor,
            objective: 0.0,
            iterations: 0,
            converged: true,
            multiply_adds: 0,
        };
    }

    let k = opts.rank.unwrap_or_else(|| default_rank(n)).clamp(1, n);
    let mut factor = LowRankFactor::random(n, k, &mut rng::from_seed(opts.seed));
    let mut objective = factor.objective(r);
    let mut iterations = 0;
    let mut converged = false;
    let mut multiply_adds = 0u64;

    while iterations < opts.max_sweeps {
        for i in 0..n {
            #[cfg(debug_assertions)]
            let before = factor.y.row(i).into_owned();
            let gain = factor.update_row(r, i);
            debug_assert!(gain >= 0.0);
            #[cfg(debug_assertions)]
            if gain == 0.0 {
                debug_assert_eq!(before, factor.y.row(i).into_owned());
            }
        }
        multiply_adds += (n * (n - 1) * k) as u64;
        iterations += 1;
        let next = factor.objective(r);
        let change = (next - objective).abs() / next.abs().max(f64::MIN_POSITIVE);
        objective = next;
        if change < opts.tol {
            converged = true;
            break;
        }
    }

    let v = factor.gram();
    let objective = trace_product(r, &v);
    SdpSolution {
        v,
        factor,
        objective,
        iterations,
        converged,
        multiply_adds,
    }
}

/// `tr(R V)` for Hermitian `R`, `V`.
pub fn trace_product(r: &CMatrix, v: &CMatrix) -> f64 {
    let n = r.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += r[(i, j)] * v[(j, i)];
        }
    }
    acc.re
}

/// `n · λmax(R)`: bounds `θ̄^H R θ̄` over unit-modulus `θ̄` and the SDP value.
pub fn sdp_upper_bound(r: &CMatrix) -> f64 {
    r.nrows() as f64 * max_eigenvalue(r)
}
