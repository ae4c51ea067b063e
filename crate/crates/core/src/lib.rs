//! Superoptimal approximation and unitary interpolation of rational matrix
//! symbols on the unit circle.
//!
//! The pipeline runs bottom-up:
//!
//! * [`ring`]: exact Laurent/rational scalar arithmetic, roots, spectral and
//!   inner–outer factorization, winding numbers.
//! * [`matfun`]: square matrix symbols, Fourier coefficients, residuals.
//! * [`hankel`]: Hankel norms, Schmidt pairs and Toeplitz kernel dimensions.
//! * [`nehari`]: scalar best analytic approximation.
//! * [`thematic`]: thematic completion, reduction and the superoptimal recursion.
//! * [`interpolant`]: unitary interpolants with prescribed nonnegative
//!   Wiener–Hopf indices.
//! * [`wh_index`]: independent certification of Wiener–Hopf index profiles.
//! * [`symbol_file`]: the JSON file format used by the command-line tool.

pub mod error;
pub mod grid;
pub mod hankel;
pub mod interpolant;
pub mod matfun;
pub mod nehari;
pub mod ring;
pub mod symbol_file;
pub mod thematic;
pub mod wh_index;

pub use error::{Error, Result};
pub use matfun::MatSymbol;
pub use ring::{LaurentScalar, RationalScalar};

pub type C64 = num_complex::Complex64;
