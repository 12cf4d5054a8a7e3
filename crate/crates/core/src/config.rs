//! Scenario and experiment configuration.
//!
//! Experiments are described by a TOML file (see `config/default.toml`). All
//! powers are given in dBm at this boundary and converted to linear
//! milliwatts internally.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{dbm_to_mw, UpaGeometry};
use crate::solvers::Method;

/// The annotated default experiment shipped with the crate.
pub const DEFAULT_CONFIG_TOML: &str = include_str!("../config/default.toml");

/// How the reflected-link path loss combines the two hop distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PathlossMode {
    #[serde(rename = "sum")]
    DistanceSum,
    #[default]
    #[serde(rename = "product")]
    DistanceProduct,
}

impl std::str::FromStr for PathlossMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Self::DistanceSum),
            "product" => Ok(Self::DistanceProduct),
            other => Err(Error::Config(format!(
                "unknown path-loss mode {other:?} (expected sum|product)"
            ))),
        }
    }
}

/// IRS phase resolution: continuous, or `B` bits (`2^B` levels).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseResolution {
    #[default]
    Continuous,
    Bits(u32),
}

impl PhaseResolution {
    /// Parses a sweep-grid value; `inf` means continuous.
    pub fn from_value(value: f64) -> Result<Self> {
        if value == f64::INFINITY {
            return Ok(Self::Continuous);
        }
        if value.fract() != 0.0 || !(1.0..=30.0).contains(&value) {
            return Err(Error::Config(format!(
                "quantization bits must be an integer in 1..=30 or inf, got {value}"
            )));
        }
        Ok(Self::Bits(value as u32))
    }

    pub fn as_value(&self) -> f64 {
        match self {
            Self::Continuous => f64::INFINITY,
            Self::Bits(b) => *b as f64,
        }
    }
}

impl fmt::Display for PhaseResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Continuous => f.write_str("inf"),
            Self::Bits(b) => write!(f, "{b}"),
        }
    }
}

impl Serialize for PhaseResolution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Continuous => s.serialize_str("inf"),
            Self::Bits(b) => s.serialize_u32(*b),
        }
    }
}

impl<'de> Deserialize<'de> for PhaseResolution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(u32),
            Float(f64),
            Word(String),
        }
        let value = match Repr::deserialize(d)? {
            Repr::Int(b) => b as f64,
            Repr::Float(v) => v,
            Repr::Word(w) if matches!(w.as_str(), "inf" | "continuous") => f64::INFINITY,
            Repr::Word(w) => return Err(serde::de::Error::custom(format!("bad resolution {w:?}"))),
        };
        PhaseResolution::from_value(value).map_err(serde::de::Error::custom)
    }
}

/// A 2-D position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(pub [f64; 2]);

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self([x, y])
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.0[0] - other.0[0]).hypot(self.0[1] - other.0[1])
    }
}

/// Low-rank SDP solver options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SdpSettings {
    /// Factor rank; `None` picks `ceil(sqrt(2n)) + 1` for an `n × n` problem.
    pub rank: Option<usize>,
    pub max_sweeps: usize,
    /// Relative objective change below which the solver stops.
    pub tol: f64,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            rank: None,
            max_sweeps: 500,
            tol: 1e-6,
        }
    }
}

/// Passive-beamforming solver knobs shared by every trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Maximum sweeps `K` of the element-wise iterative solvers.
    pub sweeps: usize,
    /// Early-exit relative change between consecutive sweeps.
    pub tol: f64,
    /// Start the iterative solvers from random phases instead of all zeros.
    pub random_init: bool,
    /// Gaussian-randomisation candidates for the SDR solver.
    pub candidates: usize,
    pub sdp: SdpSettings,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            sweeps: 5,
            tol: 1e-4,
            random_init: false,
            candidates: 1000,
            sdp: SdpSettings::default(),
        }
    }
}

/// Everything needed to draw channels and run the solvers for one operating
/// point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub ap: UpaGeometry,
    pub user: UpaGeometry,
    pub irs: UpaGeometry,
    pub num_streams: usize,
    pub ap_position: Position,
    pub user_position: Position,
    pub irs_position: Position,
    pub transmit_power_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub bandwidth_hz: f64,
    /// Rician factor of the IRS–user link (linear; `inf` = pure LoS).
    pub rician_kappa1: f64,
    /// Rician factor of the AP–IRS link (linear; `inf` = pure LoS).
    pub rician_kappa2: f64,
    #[serde(default)]
    pub pathloss: PathlossMode,
    #[serde(default)]
    pub quantization_bits: PhaseResolution,
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverSettings,
}

impl ScenarioConfig {
    pub fn nt(&self) -> usize {
        self.ap.elements()
    }

    pub fn nr(&self) -> usize {
        self.user.elements()
    }

    pub fn m(&self) -> usize {
        self.irs.elements()
    }

    pub fn transmit_power_mw(&self) -> f64 {
        dbm_to_mw(self.transmit_power_dbm)
    }

    /// Noise power in dBm: PSD integrated over the bandwidth.
    pub fn noise_power_dbm(&self) -> f64 {
        self.noise_psd_dbm_hz + 10.0 * self.bandwidth_hz.log10()
    }

    pub fn noise_power_mw(&self) -> f64 {
        dbm_to_mw(self.noise_power_dbm())
    }

    /// `ρ / (Ns σ²)`, the per-stream SNR scale in front of `H W W^H H^H`.
    pub fn snr_scale(&self) -> f64 {
        self.transmit_power_mw() / (self.num_streams as f64 * self.noise_power_mw())
    }

    /// Replaces the IRS with a factorised UPA of `elements` elements.
    pub fn with_irs_elements(mut self, elements: usize) -> Result<Self> {
        self.irs = UpaGeometry::factorized(elements, self.irs.spacing)?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.ap.validate()?;
        self.user.validate()?;
        self.irs.validate()?;
        if self.num_streams == 0 {
            return Err(Error::Config("num_streams must be positive".into()));
        }
        if self.num_streams != self.nr() || self.nr() > self.nt() {
            return Err(Error::Config(format!(
                "need Ns = Nr <= Nt, got Ns={} Nr={} Nt={}",
                self.num_streams,
                self.nr(),
                self.nt()
            )));
        }
        for (name, k) in [("rician_kappa1", self.rician_kappa1), ("rician_kappa2", self.rician_kappa2)] {
            if k.is_nan() || k < 0.0 {
                return Err(Error::Config(format!("{name} must be >= 0, got {k}")));
            }
        }
        for (name, v) in [
            ("transmit_power_dbm", self.transmit_power_dbm),
            ("noise_psd_dbm_hz", self.noise_psd_dbm_hz),
        ] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} must be finite")));
            }
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz > 0.0) {
            return Err(Error::Config("bandwidth_hz must be positive".into()));
        }
        if self.solver.sweeps == 0 || self.solver.candidates == 0 || self.solver.sdp.max_sweeps == 0 {
            return Err(Error::Config(
                "solver sweeps, candidates and sdp.max_sweeps must be positive".into(),
            ));
        }
        crate::channel::scenario_distances(self)?;
        Ok(())
    }
}

/// Kinds of experiment the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Power,
    Elements,
    Distance,
    Bits,
    Convergence,
}

impl SweepKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Power => "power",
            Self::Elements => "elements",
            Self::Distance => "distance",
            Self::Bits => "bits",
            Self::Convergence => "convergence",
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One `[sweeps.<kind>]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub grid: Vec<f64>,
    #[serde(default)]
    pub methods: Option<Vec<Method>>,
    #[serde(default)]
    pub transmit_power_dbm: Option<f64>,
    #[serde(default)]
    pub irs_elements: Option<usize>,
}

/// The `[sweeps.convergence]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    /// IRS sizes to trace.
    pub elements: Vec<usize>,
    /// Sweeps to run with early exit disabled.
    pub max_sweeps: usize,
    #[serde(default)]
    pub transmit_power_dbm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweeps {
    pub power: SweepSection,
    pub elements: SweepSection,
    pub distance: SweepSection,
    pub bits: SweepSection,
    pub convergence: ConvergenceSection,
}

/// A complete experiment file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub methods: Vec<Method>,
    pub scenario: ScenarioConfig,
    pub sweeps: Sweeps,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    /// The shipped default experiment.
    pub fn reference() -> Self {
        Self::from_toml(DEFAULT_CONFIG_TOML).expect("bundled default config is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        self.scenario.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_config_matches_reference_scenario() {
        let cfg = ExperimentConfig::reference();
        let s = &cfg.scenario;
        assert_eq!((s.ap.width, s.ap.height), (4, 4));
        assert_eq!((s.user.width, s.user.height), (4, 4));
        assert_eq!(s.num_streams, 16);
        assert_eq!(s.m(), 64);
        assert_eq!((s.irs.width, s.irs.height), (8, 8));
        assert!(s.rician_kappa1.is_infinite());
        assert_relative_eq!(s.rician_kappa2, 10.0);
        assert_relative_eq!(s.noise_psd_dbm_hz, -170.0);
        assert_relative_eq!(s.bandwidth_hz, 180e3);
        assert_eq!(s.ap_position, Position::new(0.0, 0.0));
        assert_eq!(s.user_position, Position::new(200.0, 30.0));
        assert_eq!(s.irs_position, Position::new(200.0, 0.0));
        assert_eq!(s.pathloss, PathlossMode::DistanceProduct);
        assert_eq!(cfg.trials, 100);
        assert_eq!(s.solver.sweeps, 5);
        assert_eq!(s.solver.candidates, 1000);
    }

    #[test]
    fn noise_power_aggregation() {
        let s = ExperimentConfig::reference().scenario;
        assert_relative_eq!(s.noise_power_dbm(), -117.447, epsilon = 1e-3);
        assert_relative_eq!(s.transmit_power_mw(), 1000.0, epsilon = 1e-9);
    }

    #[test]
    fn resolution_parsing() {
        #[derive(Deserialize)]
        struct T {
            b: PhaseResolution,
        }
        let p = |s: &str| toml::from_str::<T>(s).map(|t| t.b);
        assert_eq!(p("b = 3").unwrap(), PhaseResolution::Bits(3));
        assert_eq!(p("b = inf").unwrap(), PhaseResolution::Continuous);
        assert_eq!(p("b = \"inf\"").unwrap(), PhaseResolution::Continuous);
        assert!(p("b = 0").is_err());
        assert!(p("b = 1.5").is_err());
    }

    #[test]
    fn rejects_bad_scenarios() {
        let base = ExperimentConfig::reference().scenario;

        let mut s = base.clone();
        s.num_streams = 8;
        assert!(s.validate().is_err());

        let mut s = base.clone();
        s.user = UpaGeometry::half_wavelength(8, 4);
        s.num_streams = 32;
        assert!(s.validate().is_err(), "Nr > Nt must be rejected");

        let mut s = base.clone();
        s.irs_position = s.ap_position;
        assert!(s.validate().is_err());

        let mut s = base.clone();
        s.rician_kappa2 = -1.0;
        assert!(s.validate().is_err());

        let mut s = base;
        s.rician_kappa1 = 0.0;
        assert!(s.validate().is_ok());
    }

    #[test]
    fn array_spec_forms() {
        let g: UpaGeometry = toml::from_str("elements = 48").unwrap();
        assert_eq!((g.width, g.height, g.spacing), (6, 8, 0.5));
        let g: UpaGeometry = toml::from_str("width = 2\nheight = 3\nspacing = 0.25").unwrap();
        assert_eq!((g.width, g.height, g.spacing), (2, 3, 0.25));
        assert!(toml::from_str::<UpaGeometry>("width = 0\nheight = 3").is_err());
    }
}
