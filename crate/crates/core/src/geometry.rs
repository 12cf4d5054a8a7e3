//! Array geometry, steering vectors and distance-dependent path loss.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::PathlossMode;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Uniform planar array with `width × height` elements.
///
/// In config files an array is written either as `{ width, height }` or as
/// `{ elements }`, the latter laid out by [`UpaGeometry::factorized`].
/// `spacing` defaults to half a wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ArraySpec")]
pub struct UpaGeometry {
    /// Elements along the horizontal axis.
    pub width: usize,
    /// Elements along the vertical axis.
    pub height: usize,
    /// Inter-element spacing in wavelengths.
    pub spacing: f64,
}

fn default_spacing() -> f64 {
    0.5
}

#[derive(Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum ArraySpec {
    Shape {
        width: usize,
        height: usize,
        #[serde(default = "default_spacing")]
        spacing: f64,
    },
    Count {
        elements: usize,
        #[serde(default = "default_spacing")]
        spacing: f64,
    },
}

impl TryFrom<ArraySpec> for UpaGeometry {
    type Error = Error;

    fn try_from(spec: ArraySpec) -> Result<Self> {
        match spec {
            ArraySpec::Shape {
                width,
                height,
                spacing,
            } => Self::new(width, height, spacing),
            ArraySpec::Count { elements, spacing } => Self::factorized(elements, spacing),
        }
    }
}

impl UpaGeometry {
    pub fn new(width: usize, height: usize, spacing: f64) -> Result<Self> {
        let geom = Self {
            width,
            height,
            spacing,
        };
        geom.validate()?;
        Ok(geom)
    }

    /// Half-wavelength array with the given shape.
    pub fn half_wavelength(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            spacing: 0.5,
        }
    }

    /// Lays out `elements` as a near-square UPA: the width is the largest
    /// divisor not exceeding `sqrt(elements)` (64 → 8×8, 48 → 6×8, 80 → 8×10).
    pub fn factorized(elements: usize, spacing: f64) -> Result<Self> {
        if elements == 0 {
            return Err(Error::Domain("array must have at least one element".into()));
        }
        let mut width = 1;
        let mut w = 1;
        while w * w <= elements {
            if elements.is_multiple_of(w) {
                width = w;
            }
            w += 1;
        }
        Self::new(width, elements / width, spacing)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Domain(format!(
                "UPA must be at least 1x1, got {}x{}",
                self.width, self.height
            )));
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(Error::Domain(format!(
                "element spacing must be positive, got {}",
                self.spacing
            )));
        }
        Ok(())
    }

    pub fn elements(&self) -> usize {
        self.width * self.height
    }
}

/// UPA steering vector for azimuth `phi` and elevation `psi`.
///
/// Element `(m, n)` (horizontal index `m`, vertical index `n`) sits at flat
/// index `m * height + n` and carries `exp(j 2π (d/λ) (m sinφ sinψ + n cosψ))`.
pub fn steering_vector(geom: &UpaGeometry, azimuth: f64, elevation: f64) -> CVector {
    let k = 2.0 * PI * geom.spacing;
    let u = azimuth.sin() * elevation.sin();
    let v = elevation.cos();
    CVector::from_fn(geom.elements(), |idx, _| {
        let m = (idx / geom.height) as f64;
        let n = (idx % geom.height) as f64;
        Complex64::from_polar(1.0, k * (m * u + n * v))
    })
}

/// Rank-one line-of-sight component `a_rx(arrival) a_tx(departure)^H`.
pub fn los_component(
    rx: &UpaGeometry,
    tx: &UpaGeometry,
    arrival: (f64, f64),
    departure: (f64, f64),
) -> CMatrix {
    let a_rx = steering_vector(rx, arrival.0, arrival.1);
    let a_tx = steering_vector(tx, departure.0, departure.1);
    &a_rx * a_tx.adjoint()
}

fn check_distance(d: f64, what: &str) -> Result<()> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} distance must be positive, got {d}")))
    }
}

/// Direct AP–user path loss `32.6 + 36.7 log10(d)` in dB.
pub fn pathloss_direct_db(distance: f64) -> Result<f64> {
    check_distance(distance, "direct")?;
    Ok(32.6 + 36.7 * distance.log10())
}

/// Reflected AP–IRS–user path loss `35.6 + 22.0 log10(·)` in dB, where the
/// argument is the sum or the product of the two hop distances.
pub fn pathloss_reflected_db(d_ap_irs: f64, d_irs_user: f64, mode: PathlossMode) -> Result<f64> {
    check_distance(d_ap_irs, "AP-IRS")?;
    check_distance(d_irs_user, "IRS-user")?;
    let arg = match mode {
        PathlossMode::DistanceSum => d_ap_irs + d_irs_user,
        PathlossMode::DistanceProduct => d_ap_irs * d_irs_user,
    };
    Ok(35.6 + 22.0 * arg.log10())
}

/// Amplitude factor `10^(-loss/20)` for a loss in dB.
pub fn db_to_amplitude(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 20.0)
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}
