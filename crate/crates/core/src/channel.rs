//! Channel synthesis: Rayleigh direct link, Rician reflected links.

use std::f64::consts::{FRAC_PI_2, PI};
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::geometry::{db_to_amplitude, los_component, pathloss_direct_db, pathloss_reflected_db};
use crate::linalg::{cscg_matrix, CMatrix};

/// Azimuth/elevation angles of the two line-of-sight components.
///
/// Link 1 is IRS–user (`H_r`), link 2 is AP–IRS (`G`). `*_arrival` angles feed
/// the IRS-side steering vector, `*_departure` the user/AP side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleSet {
    pub azimuth_arrival1: f64,
    pub azimuth_departure1: f64,
    pub azimuth_arrival2: f64,
    pub azimuth_departure2: f64,
    pub elevation_arrival1: f64,
    pub elevation_departure1: f64,
    pub elevation_arrival2: f64,
    pub elevation_departure2: f64,
}

impl AngleSet {
    /// Azimuths uniform on `(-π, π]`, elevations uniform on `(-π/2, π/2]`.
    pub fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut az = || PI - 2.0 * PI * rng.random::<f64>();
        let (a1, a2, a3, a4) = (az(), az(), az(), az());
        let mut el = || FRAC_PI_2 - PI * rng.random::<f64>();
        let (e1, e2, e3, e4) = (el(), el(), el(), el());
        Self {
            azimuth_arrival1: a1,
            azimuth_departure1: a2,
            azimuth_arrival2: a3,
            azimuth_departure2: a4,
            elevation_arrival1: e1,
            elevation_departure1: e2,
            elevation_arrival2: e3,
            elevation_departure2: e4,
        }
    }

    pub fn is_valid(&self) -> bool {
        let az = [
            self.azimuth_arrival1,
            self.azimuth_departure1,
            self.azimuth_arrival2,
            self.azimuth_departure2,
        ];
        let el = [
            self.elevation_arrival1,
            self.elevation_departure1,
            self.elevation_arrival2,
            self.elevation_departure2,
        ];
        az.iter().all(|&a| a > -PI && a <= PI) && el.iter().all(|&e| e > -FRAC_PI_2 && e <= FRAC_PI_2)
    }
}

/// One realisation of the three channel matrices, path loss included.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// `H_d`, `Nt × Nr`; the direct link seen by the user is `H_d^H`.
    pub direct: CMatrix,
    /// `H_r`, `M × Nr`.
    pub irs_user: CMatrix,
    /// `G`, `M × Nt`.
    pub ap_irs: CMatrix,
}

impl ChannelSet {
    pub fn new(direct: CMatrix, irs_user: CMatrix, ap_irs: CMatrix) -> Result<Self> {
        let set = Self {
            direct,
            irs_user,
            ap_irs,
        };
        set.check()?;
        Ok(set)
    }

    /// Draws angles, the direct channel and the reflected channels, in that
    /// order, from `rng`.
    pub fn draw<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<Self> {
        let angles = AngleSet::draw(rng);
        let direct = draw_direct_channel(cfg, rng)?;
        let (irs_user, ap_irs) = draw_reflected_channels(cfg, &angles, rng)?;
        Ok(Self {
            direct,
            irs_user,
            ap_irs,
        })
    }

    pub fn nt(&self) -> usize {
        self.direct.nrows()
    }

    pub fn nr(&self) -> usize {
        self.direct.ncols()
    }

    pub fn m(&self) -> usize {
        self.irs_user.nrows()
    }

    fn check(&self) -> Result<()> {
        let (nt, nr) = self.direct.shape();
        let m = self.irs_user.nrows();
        if self.irs_user.ncols() != nr || self.ap_irs.shape() != (m, nt) {
            return Err(Error::Dimension(format!(
                "H_d {:?}, H_r {:?}, G {:?} are inconsistent",
                self.direct.shape(),
                self.irs_user.shape(),
                self.ap_irs.shape()
            )));
        }
        Ok(())
    }

    /// Copy with every channel multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            direct: &self.direct * num_complex::Complex64::from(factor),
            irs_user: &self.irs_user * num_complex::Complex64::from(factor),
            ap_irs: &self.ap_irs * num_complex::Complex64::from(factor),
        }
    }

    /// Copy with the reflected path removed.
    pub fn without_irs(&self) -> Self {
        Self {
            direct: self.direct.clone(),
            irs_user: CMatrix::zeros(self.irs_user.nrows(), self.irs_user.ncols()),
            ap_irs: CMatrix::zeros(self.ap_irs.nrows(), self.ap_irs.ncols()),
        }
    }

    pub fn all_finite(&self) -> bool {
        [&self.direct, &self.irs_user, &self.ap_irs]
            .iter()
            .all(|m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    /// Bit-level fingerprint used to check that paired methods share a draw.
    pub fn realization_hash(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for m in [&self.direct, &self.irs_user, &self.ap_irs] {
            m.shape().hash(&mut h);
            for z in m.iter() {
                z.re.to_bits().hash(&mut h);
                z.im.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }
}

/// `(d0, d_ap_irs, d_irs_user)` in meters.
pub fn scenario_distances(cfg: &ScenarioConfig) -> Result<(f64, f64, f64)> {
    let d0 = cfg.ap_position.distance(&cfg.user_position);
    let d_ap_irs = cfg.ap_position.distance(&cfg.irs_position);
    let d_irs_user = cfg.irs_position.distance(&cfg.user_position);
    for (name, d) in [("AP-user", d0), ("AP-IRS", d_ap_irs), ("IRS-user", d_irs_user)] {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::Domain(format!("{name} distance is {d}; nodes must not coincide")));
        }
    }
    Ok((d0, d_ap_irs, d_irs_user))
}

/// LoS and NLoS mixing weights `(sqrt(κ/(1+κ)), sqrt(1/(1+κ)))`, exact at
/// `κ = 0` and `κ = ∞`.
pub fn rician_weights(kappa: f64) -> (f64, f64) {
    if kappa.is_infinite() {
        (1.0, 0.0)
    } else {
        ((kappa / (1.0 + kappa)).sqrt(), (1.0 / (1.0 + kappa)).sqrt())
    }
}

/// Rayleigh direct channel `L0(d0) H̃_d`, `Nt × Nr`.
pub fn draw_direct_channel<R: Rng + ?Sized>(cfg: &ScenarioConfig, rng: &mut R) -> Result<CMatrix> {
    let (d0, _, _) = scenario_distances(cfg)?;
    let amplitude = db_to_amplitude(pathloss_direct_db(d0)?);
    Ok(cscg_matrix(cfg.nt(), cfg.nr(), rng) * num_complex::Complex64::from(amplitude))
}

/// Rician reflected channels `(H_r, G)`.
///
/// The reflected-link loss is a single figure for the cascade; its amplitude
/// is split evenly between the two hops so that `L1 · L2` equals it.
pub fn draw_reflected_channels<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    angles: &AngleSet,
    rng: &mut R,
) -> Result<(CMatrix, CMatrix)> {
    let (_, d_ap_irs, d_irs_user) = scenario_distances(cfg)?;
    let cascade = db_to_amplitude(pathloss_reflected_db(d_ap_irs, d_irs_user, cfg.pathloss)?);
    let hop = cascade.sqrt();

    let los_r = los_component(
        &cfg.irs,
        &cfg.user,
        (angles.azimuth_arrival1, angles.elevation_arrival1),
        (angles.azimuth_departure1, angles.elevation_departure1),
    );
    let los_g = los_component(
        &cfg.irs,
        &cfg.ap,
        (angles.azimuth_arrival2, angles.elevation_arrival2),
        (angles.azimuth_departure2, angles.elevation_departure2),
    );
    let nlos_r = cscg_matrix(cfg.m(), cfg.nr(), rng);
    let nlos_g = cscg_matrix(cfg.m(), cfg.nt(), rng);

    let mix = |los: CMatrix, nlos: CMatrix, kappa: f64| {
        let (w_los, w_nlos) = rician_weights(kappa);
        los.zip_map(&nlos, |l, n| (l * w_los + n * w_nlos) * hop)
    };
    Ok((
        mix(los_r, nlos_r, cfg.rician_kappa1),
        mix(los_g, nlos_g, cfg.rician_kappa2),
    ))
}
