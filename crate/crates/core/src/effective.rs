//! Effective channel, SVD active beamformer and spectrum efficiency.

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{frobenius_sq, CMatrix, ONE};
use crate::qcqp::PhaseVector;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOL: f64 = 1e-12;

/// `H_eff = H_r^H diag(θ) G + H_d^H`, `Nr × Nt`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub matrix: CMatrix,
}

impl EffectiveChannel {
    pub fn nr(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn nt(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Top-`Ns` right singular vectors of the effective channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveBeamformer {
    /// `W`, `Nt × Ns`, orthonormal columns.
    pub matrix: CMatrix,
    /// Singular values of `H_eff`, non-increasing.
    pub singular_values: Vec<f64>,
    /// Set when `rank(H_eff) < Ns`.
    pub degenerate: bool,
}

pub fn effective_channel(channels: &ChannelSet, theta: &PhaseVector) -> Result<EffectiveChannel> {
    let m = channels.m();
    if theta.len() != m {
        return Err(Error::Dimension(format!(
            "phase vector has {} entries, IRS has {m}",
            theta.len()
        )));
    }
    let coeffs = theta.coefficients();
    // diag(θ) G without materialising the diagonal matrix.
    let mut theta_g = channels.ap_irs.clone();
    for (mut row, c) in theta_g.row_iter_mut().zip(coeffs.iter()) {
        row *= *c;
    }
    let mut h = channels.direct.adjoint();
    h.gemm(ONE, &channels.irs_user.adjoint(), &theta_g, ONE);
    Ok(EffectiveChannel { matrix: h })
}

pub fn active_beamformer(h_eff: &EffectiveChannel, ns: usize) -> Result<ActiveBeamformer> {
    let (nr, nt) = h_eff.matrix.shape();
    if ns == 0 || ns > nr.min(nt) {
        return Err(Error::Dimension(format!(
            "Ns = {ns} streams need 1 <= Ns <= min(Nr, Nt) = {}",
            nr.min(nt)
        )));
    }
    let svd = h_eff
        .matrix
        .clone()
        .try_svd(false, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Domain("SVD of the effective channel did not converge".into()))?;
    let v_t = svd.v_t.expect("requested right singular vectors");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite singular values")
    });
    let singular_values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();

    let mut w = CMatrix::zeros(nt, ns);
    for (col, &src) in order.iter().take(ns).enumerate() {
        // Row `src` of V^H is the conjugate of right singular vector `src`.
        let mut v: Vec<Complex64> = v_t.row(src).iter().map(|z| z.conj()).collect();
        fix_phase(&mut v);
        for (r, z) in v.into_iter().enumerate() {
            w[(r, col)] = z;
        }
    }

    let largest = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values
        .iter()
        .filter(|&&s| s > RANK_TOL * largest && s > 0.0)
        .count();
    Ok(ActiveBeamformer {
        matrix: w,
        singular_values,
        degenerate: rank < ns,
    })
}

/// Rotates `v` so its first non-negligible entry is real and non-negative.
fn fix_phase(v: &mut [Complex64]) {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-12 * scale).copied() {
        let rot = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

/// `log2 det(I + ρ/(Ns σ²) H W W^H H^H)` in bits/s/Hz.
pub fn spectrum_efficiency(
    h_eff: &EffectiveChannel,
    w: &CMatrix,
    power: f64,
    noise: f64,
    ns: usize,
) -> Result<f64> {
    if !(power >= 0.0 && noise > 0.0) {
        return Err(Error::Domain(format!(
            "need power >= 0 and noise > 0, got {power}, {noise}"
        )));
    }
    if w.nrows() != h_eff.nt() {
        return Err(Error::Dimension(format!(
            "beamformer has {} rows, channel has {} columns",
            w.nrows(),
            h_eff.nt()
        )));
    }
    let hw = &h_eff.matrix * w;
    let scale = Complex64::from(power / (ns as f64 * noise));
    let mut gram = CMatrix::identity(hw.nrows(), hw.nrows());
    gram.gemm(scale, &hw, &hw.adjoint(), ONE);
    let chol = Cholesky::new(gram)
        .ok_or_else(|| Error::Domain("I + c H W W^H H^H is not positive definite".into()))?;
    let l = chol.l_dirty();
    let log_det: f64 = (0..l.nrows()).map(|i| 2.0 * l[(i, i)].re.log2()).sum();
    Ok(log_det.max(0.0))
}

/// `‖H_eff‖_F²`.
pub fn frobenius_objective(h_eff: &EffectiveChannel) -> f64 {
    frobenius_sq(&h_eff.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cscg_matrix, ZERO};
    use crate::rng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn eff(m: CMatrix) -> EffectiveChannel {
        EffectiveChannel { matrix: m }
    }

    /// Independent oracle: `Σ log2(1 + c s_i²)` over singular values of H W.
    fn se_oracle(h: &CMatrix, w: &CMatrix, snr: f64) -> f64 {
        let sv = (h * w).singular_values();
        sv.iter().map(|s| (1.0 + snr * s * s).log2()).sum()
    }

    #[test]
    fn identity_effective_channel() {
        let m = 3;
        let channels = ChannelSet::new(
            CMatrix::zeros(m, m),
            CMatrix::identity(m, m),
            CMatrix::identity(m, m),
        )
        .unwrap();
        let h = effective_channel(&channels, &PhaseVector::zeros(m)).unwrap();
        assert_eq!(h.matrix, CMatrix::identity(m, m));
    }

    #[test]
    fn no_reflection_leaves_direct_link() {
        let mut r = rng::from_seed(1);
        let direct = cscg_matrix(4, 2, &mut r);
        let channels = ChannelSet::new(direct.clone(), CMatrix::zeros(5, 2), cscg_matrix(5, 4, &mut r)).unwrap();
        let theta = PhaseVector::from_phases(vec![0.1, 0.7, -2.0, 3.0, 1.0]);
        let h = effective_channel(&channels, &theta).unwrap();
        assert_eq!(h.matrix, direct.adjoint());
    }

    #[test]
    fn effective_channel_matches_entrywise_recomputation() {
        let mut r = rng::from_seed(2);
        let channels = ChannelSet::new(
            cscg_matrix(2, 2, &mut r),
            cscg_matrix(3, 2, &mut r),
            cscg_matrix(3, 2, &mut r),
        )
        .unwrap();
        let theta = PhaseVector::from_phases(vec![0.3, -1.1, 2.5]);
        let h = effective_channel(&channels, &theta).unwrap();
        let coeffs = theta.coefficients();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = channels.direct[(j, i)].conj();
                for m in 0..3 {
                    acc += channels.irs_user[(m, i)].conj() * coeffs[m] * channels.ap_irs[(m, j)];
                }
                assert!((h.matrix[(i, j)] - acc).norm() < 1e-14);
            }
        }
        let bad = PhaseVector::zeros(2);
        assert!(effective_channel(&channels, &bad).is_err());
    }

    #[test]
    fn diagonal_beamformer() {
        let h = eff(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(1.0, 0.0)])));
        let w = active_beamformer(&h, 2).unwrap();
        assert!(!w.degenerate);
        assert_relative_eq!(w.singular_values[0], 3.0, epsilon = 1e-12);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(w.matrix[(i, j)].norm(), expect, epsilon = 1e-12);
            }
        }
        // Phase convention: first nonzero entry real non-negative.
        assert!(w.matrix[(0, 0)].re > 0.0 && w.matrix[(0, 0)].im.abs() < 1e-15);
    }

    #[test]
    fn wide_channel_beamformer_picks_strongest_direction_first() {
        let mut m = CMatrix::zeros(2, 3);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(2.0, 0.0);
        let h = eff(m);
        let w = active_beamformer(&h, 2).unwrap();
        assert_relative_eq!(w.matrix[(1, 0)].norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(w.matrix[(0, 1)].norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(frobenius_sq(&(&h.matrix * &w.matrix)), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn rank_deficient_channel_is_flagged() {
        let mut m = CMatrix::zeros(2, 3);
        m[(0, 0)] = c(1.0, 0.0);
        let w = active_beamformer(&eff(m), 2).unwrap();
        assert!(w.degenerate);
        assert_eq!(w.matrix.shape(), (3, 2));
        assert!(active_beamformer(&eff(CMatrix::zeros(2, 3)), 3).is_err());
    }

    #[test]
    fn se_examples() {
        let h = eff(CMatrix::identity(2, 2));
        let w = CMatrix::identity(2, 2);
        assert_relative_eq!(spectrum_efficiency(&h, &w, 2.0, 1.0, 2).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(spectrum_efficiency(&h, &w, 0.0, 1.0, 2).unwrap(), 0.0);
        assert!(spectrum_efficiency(&h, &w, 1.0, 0.0, 2).is_err());
        assert!(spectrum_efficiency(&h, &CMatrix::identity(3, 2), 1.0, 1.0, 2).is_err());
    }

    #[test]
    fn se_matches_singular_value_oracle() {
        let mut r = rng::from_seed(3);
        for _ in 0..20 {
            let h = eff(cscg_matrix(3, 5, &mut r));
            let w = active_beamformer(&h, 3).unwrap();
            let got = spectrum_efficiency(&h, &w.matrix, 7.0, 0.5, 3).unwrap();
            assert_relative_eq!(got, se_oracle(&h.matrix, &w.matrix, 7.0 / 1.5), max_relative = 1e-11);
        }
    }

    #[test]
    fn frobenius_examples() {
        let h = eff(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(0.0, 4.0)])));
        assert_relative_eq!(frobenius_objective(&h), 25.0);
        assert_eq!(frobenius_objective(&eff(CMatrix::from_element(2, 2, ZERO))), 0.0);
    }

    fn random_unitary(n: usize, r: &mut rng::SimRng) -> CMatrix {
        cscg_matrix(n, n, r).qr().q()
    }

    fn random_orthonormal(rows: usize, cols: usize, r: &mut rng::SimRng) -> CMatrix {
        let q = cscg_matrix(rows, cols, r).qr().q();
        q.columns(0, cols).into_owned()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn trace_identity_and_orthonormality(seed in any::<u64>(), nr in 1usize..5, extra in 0usize..4) {
            let mut r = rng::from_seed(seed);
            let nt = nr + extra;
            let h = eff(cscg_matrix(nr, nt, &mut r));
            let w = active_beamformer(&h, nr).unwrap();
            let gram = w.matrix.adjoint() * &w.matrix;
            prop_assert!((gram - CMatrix::identity(nr, nr)).norm() < 1e-10);
            prop_assert!((frobenius_sq(&w.matrix) - nr as f64).abs() < 1e-10);
            let full = frobenius_objective(&h);
            let captured = frobenius_sq(&(&h.matrix * &w.matrix));
            prop_assert!((captured - full).abs() / full < 1e-9);
        }

        #[test]
        fn se_is_invariant_to_unitary_rotation(seed in any::<u64>()) {
            let mut r = rng::from_seed(seed);
            let h = eff(cscg_matrix(3, 4, &mut r));
            let w = active_beamformer(&h, 3).unwrap().matrix;
            let u = random_unitary(3, &mut r);
            let a = spectrum_efficiency(&h, &w, 10.0, 1.0, 3).unwrap();
            let b = spectrum_efficiency(&h, &(&w * u), 10.0, 1.0, 3).unwrap();
            prop_assert!((a - b).abs() < 1e-10 * a.max(1.0));
        }

        #[test]
        fn se_increases_with_power(seed in any::<u64>(), p in 0.01f64..100.0, step in 0.01f64..10.0) {
            let mut r = rng::from_seed(seed);
            let h = eff(cscg_matrix(2, 3, &mut r));
            let w = active_beamformer(&h, 2).unwrap().matrix;
            let lo = spectrum_efficiency(&h, &w, p, 1.0, 2).unwrap();
            let hi = spectrum_efficiency(&h, &w, p + step, 1.0, 2).unwrap();
            prop_assert!(hi > lo);
        }

        #[test]
        fn svd_beamformer_beats_other_orthonormal_precoders(seed in any::<u64>()) {
            let mut r = rng::from_seed(seed);
            let h = eff(cscg_matrix(2, 4, &mut r));
            let best = active_beamformer(&h, 2).unwrap().matrix;
            let other = random_orthonormal(4, 2, &mut r);
            let a = spectrum_efficiency(&h, &best, 20.0, 1.0, 2).unwrap();
            let b = spectrum_efficiency(&h, &other, 20.0, 1.0, 2).unwrap();
            prop_assert!(a >= b - 1e-12);
        }
    }
}
