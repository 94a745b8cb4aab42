//! Toeplitz subshifts over residually finite groups.
//!
//! The crate builds quotient chains for ℤ, ℤᵈ and F₂, nested fundamental
//! domains tiling them, multi-symbol and regular binary Toeplitz arrays on
//! top, and exact data about their periodic empirical measures. Every
//! combinatorial statement about these objects has a finite check in
//! [`verify`].
//!
//! Numeric routines are generic over [`Scalar`]; [`Rational`] is the exact
//! instantiation used for reports.

pub mod error;
pub mod experiment;
pub mod group;
pub mod measures;
pub mod scalar;
pub mod toeplitz;
pub mod tower;
pub mod verify;

pub use error::{Error, Result};
pub use group::{BackendSpec, ClassId, GroupElement, QuotientChain, Word};
pub use scalar::{Fraction, Scalar};
pub use toeplitz::{FamilyVariant, SymbolCycle, ToeplitzFamily};
pub use tower::{DomainTower, TowerMode};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type DensityRow = toeplitz::DensityRow<Rational>;
pub type DensityRowF64 = toeplitz::DensityRow<f64>;
pub type SimplexData = measures::SimplexData<Rational>;
pub type SimplexDataF64 = measures::SimplexData<f64>;
pub type LevelMatrix = measures::LevelMatrix<Rational>;
pub type LevelMatrixF64 = measures::LevelMatrix<f64>;
