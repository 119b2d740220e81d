//! Solvers for the 1-D spatially inhomogeneous six-wave kinetic equation in
//! exponentially weighted sup-norm spaces: direct resonant-manifold collision
//! quadrature, Picard and Kaniel–Shinbrot fixed-point solvers, and wave
//! (scattering) operators, validated against independent oracles.

pub mod bounds;
pub mod collision;
pub mod config;
pub mod duhamel;
pub mod error;
pub mod field;
pub mod ks;
pub mod oracle;
pub mod output;
pub mod quadrature;
pub mod scattering;
pub mod weights;

pub use error::{Result, SixwaveError};
pub use field::{Field, GridData, GridSpec, Trajectory};
pub use quadrature::QuadratureSpec;
pub use weights::WeightParams;
