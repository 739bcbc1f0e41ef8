//! Three-level Λ-atom electromagnetically induced transparency: density-matrix
//! dynamics, adiabatic coherences, probe propagation modes, linear
//! susceptibility and a 1D Maxwell-Bloch propagator.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*F64` and `*F32`
//! aliases below name the common instantiations.

pub mod adiabatic;
pub mod bloch;
pub mod error;
pub mod maxwell;
pub mod modes;
pub mod numerics;
pub mod params;
pub mod scalar;
pub mod susceptibility;
pub mod validation;

pub use bloch::{
    bloch_rhs, integrate_bloch, population_ratio_check, reduced_resonant_rhs, BlochTrajectory,
    DensityMatrix3, Level, ReducedResiduals,
};
pub use error::{EitError, Result};
pub use params::{
    canonical_dimensionless, canonical_params, derive_rates, derive_rates_with_coupling,
    AtomParams, DerivedRates, FieldParams,
};
pub use scalar::Real;

pub type AtomParamsF64 = AtomParams<f64>;
pub type AtomParamsF32 = AtomParams<f32>;
pub type FieldParamsF64 = FieldParams<f64>;
pub type FieldParamsF32 = FieldParams<f32>;
pub type DerivedRatesF64 = DerivedRates<f64>;
pub type DensityMatrixF64 = DensityMatrix3<f64>;
pub type DensityMatrixF32 = DensityMatrix3<f32>;
