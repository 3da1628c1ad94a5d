//! Numerical laboratory for the Cesàro operator
//! `(Cf)(x) = (1/x) ∫₀ˣ f(t)/(1−t) dt` on `L²(0,1)`.
//!
//! The crate realizes the operator, its adjoint, the unitary change of
//! variables to `L²(ℝ)`, the Fourier multiplier picture, closed-form
//! resolvents, the weighted-composition semigroup it generates, its
//! spectral measure, and constructors for its invariant subspaces.
//! Every identity is exposed as a checkable numerical residual.
//!
//! Functions on `(0,1)` are evaluated at [`UnitPoint`]s, which carry both
//! `x` and `1 − x` so that points within `1e−16` of the right endpoint keep
//! full relative precision.

pub mod error;
pub mod funcspace;
pub mod invariant;
pub mod linalg;
pub mod operators;
pub mod quadrature;
pub mod resolvent;
pub mod semigroup;
pub mod spectral;
pub mod suite;
pub mod transforms;

pub use error::{Error, Result};
pub use funcspace::{LineFn, LineGrid, UnitFn, UnitPoint, UnitScheme};
pub use num_complex::Complex64;
