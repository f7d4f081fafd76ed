//! Numerical laboratory for Steklov and mixed Steklov-Neumann spectra on
//! collar geometries.
//!
//! The crate combines four layers:
//!
//! * [`profiles`] - the scalar collar profiles (boundary ramp, conformal
//!   step, smoothstep transitions);
//! * [`modes`] - spectral data of the boundary cross-sections, including
//!   the Berger-sphere family with linearly growing spectral gap;
//! * [`solver`] - separable collar problems reduced to weighted 1D
//!   Sturm-Liouville problems, with certified spectrum truncation;
//! * [`fem2d`] - an independent 2D Riemannian P1 finite-element solver
//!   used for cross-validation and quasi-isometry experiments;
//! * [`experiments`] - scenario presets, explicit bound certificates,
//!   sweeps and CSV/SVG reporting.

pub mod error;
pub mod modes;
pub mod numeric;
pub mod profiles;
pub mod solver;

pub use error::{Result, SteklovError};
pub use modes::{berger_mu, lambda2_bleecker, BoundaryFamily, Mode, ModeLabel};
pub use profiles::{BleeckerRamp, ConformalStep, Profile, SmoothStep};
pub use solver::{
    collar_volume, dtn_value, neumann_gap, reduce, steklov_spectrum, two_point_eigen,
    CollarKind, CollarScenario, ConformalFactor, EndCondition, ReducedModeProblem, RightBc,
    SteklovSpectrum,
};
