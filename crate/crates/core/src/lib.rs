//! Exactly solvable position-dependent-mass Schrödinger problems.
//!
//! Units: m₀ = ħ = 1. The Hamiltonian is H = −½ d/dx (1/m) d/dx + V.

pub mod complex;
pub mod error;
pub mod families;
pub mod mass;
pub mod oracle;
pub mod ordering;
pub mod polynomials;
pub mod quadrature;
pub mod transform;

pub use complex::Complex;
pub use error::{PdmError, Result};
