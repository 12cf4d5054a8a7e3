use std::f64::consts::PI;

use crate::config::PhaseResolution;
use crate::geometry::wrap_angle;
use crate::qcqp::{circular_distance, PhaseVector};

/// Nearest point of the `bits`-bit phase set `{-π + 2πk/2^B : k = 1..2^B}`
/// under circular distance; exact ties go to the smaller representative.
pub fn quantize_phase(theta: f64, bits: u32) -> f64 {
    let levels = (1u64 << bits) as f64;
    let step = 2.0 * PI / levels;
    let x = (wrap_angle(theta) + PI) / step;
    let lo = x.floor();
    let point = |k: f64| {
        // k = 0 and k = levels are the same point, π.
        let k = if k <= 0.0 { levels } else { k.min(levels) };
        -PI + step * k
    };
    let (a, b) = (point(lo), point(lo + 1.0));
    let (da, db) = (circular_distance(a, theta), circular_distance(b, theta));
    if (da - db).abs() <= 1e-12 {
        a.min(b)
    } else if da < db {
        a
    } else {
        b
    }
}

pub fn quantize_phases(theta: &PhaseVector, resolution: PhaseResolution) -> PhaseVector {
    match resolution {
        PhaseResolution::Continuous => theta.clone(),
        PhaseResolution::Bits(bits) => {
            PhaseVector::from_phases(theta.phases().iter().map(|&t| quantize_phase(t, bits)).collect())
                .into_discrete(bits)
                .expect("quantised phases lie on the grid")
        }
    }
}
