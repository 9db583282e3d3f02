//! Sharp constants of the Hardy–Leray inequality for divergence-free fields
//! and numerical machinery to check them.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod energy;
pub mod error;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod minimize;
pub mod operators;
pub mod params;
pub mod planar;
pub mod spectral;
pub mod verify;

pub use constants::{classical_constant, improvement_ratio, sharp_constant, sharp_constant_3d, Branch, ConstantBreakdown};
pub use error::{Error, Result};
pub use params::Params;
pub use spectral::{
    azimuthal_infimum, brute_force_infimum, f_2d, f_axisym, mode_quotient, poloidal_infimum, total_infimum,
    GridMinimum, ModeFamily, ReducedQuotient, SpectralPoint,
};
