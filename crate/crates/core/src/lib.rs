//! Constructive lower bounds for the Neumann eigenvalue counting function on
//! convex planar domains.
//!
//! For a convex polygon `Ω` and `λ > 0` the toolkit builds the certificate
//!
//! ```text
//! N_N(Ω, λ) ≥ l ≥ |Ω| λ / (2√3 j₀²)
//! ```
//!
//! explicitly: points of a shifted triangular lattice of spacing `2r`,
//! `r = j₀/√λ`, are packed into `Ω` ([`lattice`]), a radial Bessel bump is
//! placed on each of them ([`test_functions`]) and every Rayleigh quotient is
//! shown to be at most `λ`. An independent P1 finite-element Neumann solver
//! ([`spectrum`]) supplies eigenvalues for cross-checking, and [`bounds`] ties
//! the pieces together.
//!
//! ```
//! use polya_cert::{bounds, geometry::ConvexPolygon, spectrum::NeumannSpectrum};
//!
//! let square = ConvexPolygon::rectangle(1.0, 1.0).unwrap();
//! let spectrum = NeumannSpectrum::rectangle_analytic(1.0, 1.0, 200.0).unwrap();
//! let report = bounds::verify_main_theorem(&square, 100.0, &spectrum, &Default::default()).unwrap();
//! assert_eq!(report.n_n, 13);
//! assert!(report.pass);
//! ```

// Negated float comparisons reject NaN deliberately; tabulated constants keep
// their published digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod lattice;
pub mod output;
pub mod quadrature;
pub mod special_functions;
pub mod spectrum;
pub mod test_functions;

pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, Point};
