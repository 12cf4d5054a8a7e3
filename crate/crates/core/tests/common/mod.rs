//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::io::Write;

use irs_mimo::linalg::{cscg_matrix, CMatrix, CVector};
use irs_mimo::rng;
use irs_mimo::ChannelSet;
use num_complex::Complex64;

/// Writes one line past the test harness's output capture.
pub fn report(id: &str, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    writeln!(err, "[acceptance] {id} {verdict}: {detail}").unwrap();
}

pub fn random_channels(seed: u64, nt: usize, nr: usize, m: usize) -> ChannelSet {
    let mut g = rng::from_seed(seed);
    ChannelSet::new(cscg_matrix(nt, nr, &mut g), cscg_matrix(m, nr, &mut g), cscg_matrix(m, nt, &mut g)).unwrap()
}

/// `H_r^H diag(θ) G + H_d^H` by explicit triple loop.
pub fn effective_by_loops(ch: &ChannelSet, theta: &[Complex64]) -> CMatrix {
    let (nt, nr, m) = (ch.nt(), ch.nr(), ch.m());
    CMatrix::from_fn(nr, nt, |u, a| {
        let mut acc = ch.direct[(a, u)].conj();
        for (k, t) in theta.iter().enumerate().take(m) {
            acc += ch.irs_user[(k, u)].conj() * t * ch.ap_irs[(k, a)];
        }
        acc
    })
}

pub fn fro_sq(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// `x^H A x` by explicit double loop.
pub fn quad_form(a: &CMatrix, x: &CVector) -> f64 {
    let n = x.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[i].conj() * a[(i, j)] * x[j];
        }
    }
    acc.re
}

/// `[exp(jθ); 1]`.
pub fn homogenize(phases: &[f64]) -> CVector {
    let m = phases.len();
    CVector::from_fn(m + 1, |i, _| {
        if i < m {
            Complex64::from_polar(1.0, phases[i])
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

/// Maximum of `θ̄^H R θ̄` over all `2^B`-level assignments, grid built here
/// as `-π + 2πk/2^B`, `k = 1..2^B`.
pub fn exhaustive_discrete(r: &CMatrix, bits: u32) -> f64 {
    let m = r.nrows() - 1;
    let levels = 1usize << bits;
    let grid: Vec<f64> = (1..=levels)
        .map(|k| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / levels as f64)
        .collect();
    let mut best = f64::NEG_INFINITY;
    for code in 0..levels.pow(m as u32) {
        let mut c = code;
        let phases: Vec<f64> = (0..m)
            .map(|_| {
                let p = grid[c % levels];
                c /= levels;
                p
            })
            .collect();
        best = best.max(quad_form(r, &homogenize(&phases)));
    }
    best
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}
