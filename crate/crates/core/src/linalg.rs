//! Thin aliases and helpers over `nalgebra` complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// One circularly-symmetric complex Gaussian sample with unit variance.
pub fn cscg<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of i.i.d. CN(0, 1) entries, filled in column-major order.
pub fn cscg_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| cscg(rng))
}

pub fn cscg_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> CVector {
    CVector::from_fn(len, |_, _| cscg(rng))
}

/// `x^H A x` for Hermitian `A`; the (rounding-level) imaginary part is dropped.
pub fn hermitian_form(a: &CMatrix, x: &CVector) -> f64 {
    debug_assert_eq!(a.nrows(), x.len());
    let mut acc = ZERO;
    for j in 0..a.ncols() {
        let mut col = ZERO;
        for i in 0..a.nrows() {
            col += x[i].conj() * a[(i, j)];
        }
        acc += col * x[j];
    }
    acc.re
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn max_eigenvalue(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn frobenius_sq(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Max-abs Hermitian defect `max |A - A^H|`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}
