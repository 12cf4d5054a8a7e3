//! Joint active/passive beamforming for IRS-assisted point-to-point MIMO links.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`] and [`channel`] synthesise the direct (Rayleigh) and reflected
//!   (Rician, UPA line-of-sight) channels from a [`ScenarioConfig`].
//! - [`effective`] assembles `H_eff = H_r^H diag(θ) G + H_d^H`, the SVD active
//!   beamformer and the log-det spectrum efficiency.
//! - [`qcqp`] reduces the Frobenius objective to a unit-modulus QCQP and its
//!   homogenised matrix `R`.
//! - [`sdp`] is a low-rank coordinate-ascent solver for
//!   `max tr(RV) s.t. diag(V) = 1, V ⪰ 0`.
//! - [`solvers`] produces IRS phase vectors: SDR with Gaussian randomisation,
//!   element-wise iterative ascent, both quantisation procedures and the
//!   random / no-IRS baselines.
//! - [`harness`] runs seeded Monte-Carlo sweeps and emits CSV/JSON tables.

pub mod channel;
pub mod config;
pub mod effective;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod qcqp;
pub mod rng;
pub mod sdp;
pub mod solvers;
pub mod validate;

pub use channel::{AngleSet, ChannelSet};
pub use config::{ExperimentConfig, PathlossMode, PhaseResolution, ScenarioConfig};
pub use effective::{ActiveBeamformer, EffectiveChannel};
pub use error::{Error, Result};
pub use geometry::UpaGeometry;
pub use qcqp::{PhaseVector, QcqpData};
pub use sdp::{SdpOptions, SdpSolution};
pub use solvers::{Method, SolverReport};
