//! Exact generalized Galois polynomials and the inversion statistic on
//! random words.
//!
//! The crate is organised bottom-up:
//!
//! * [`qpoly`] builds q-integers, q-factorials, Gaussian binomial and
//!   multinomial coefficients and the generalized Galois polynomials
//!   `G_n^(m)(q)` with exact big-integer coefficients.
//! * [`dist`] turns those polynomials into exact distributions of the number
//!   of inversions in a uniformly random word, with closed-form moments,
//!   total variation distances and local/central limit diagnostics.
//! * [`combinat`] holds words, inversion counting, and the bijections
//!   word ↔ lattice path ↔ Ferrers diagram.
//! * [`sampler`] provides seeded Monte Carlo samplers for the four
//!   equivalent constructions (random word, V-sum, U-statistic, Ferrers
//!   diagram) and the Hoeffding decomposition.
//! * [`analysis`] packages convergence diagnostics into [`CurveReport`]s.
//! * [`checks`] runs the full verification sweep.
//!
//! Floating-point code is generic over [`Real`] (`f32` or `f64`); exact code
//! uses [`Natural`] and [`Rational`].

pub mod analysis;
pub mod checks;
pub mod combinat;
pub mod dist;
mod error;
pub mod qpoly;
pub mod sampler;
pub mod scalar;
pub mod stats;

pub use analysis::{CurveReport, CurveRow};
pub use combinat::{FerrersDiagram, LatticePath, Step, Word};
pub use dist::{ExactPmf, MomentVariant, Moments};
pub use error::{Error, Result};
pub use qpoly::{CoeffPoly, Composition};
pub use sampler::{SampleStream, UPair};
pub use scalar::Real;

/// Arbitrary-precision nonnegative integer.
pub type Natural = num_bigint::BigUint;
/// Arbitrary-precision signed integer.
pub type Integer = num_bigint::BigInt;
/// Exact rational number.
pub type Rational = num_rational::BigRational;
/// Complex value of a polynomial on the unit circle, double precision.
pub type Complex64 = num_complex::Complex<f64>;
/// Curve report with double-precision statistics.
pub type Curve = CurveReport<f64>;

/// Master seed used whenever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5EED_1A7E_2013_0001;
