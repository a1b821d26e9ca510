//! Exact solution of the cohomological equation `f - f o gamma = g` for a
//! hyperbolic affine automorphism `gamma(x) = A x + b` of the torus `T^p`,
//! with `g` a trigonometric polynomial.
//!
//! The lattice layer ([`lattice`]) is exact. The numerical layers are generic
//! over a [`Scalar`] (`f32` or `f64`); the aliases below fix `f64`.
//!
//! ```
//! use num_complex::Complex;
//! use toruscohom::lattice::parse_rational;
//! use toruscohom::{AffineTorusMap, IntMatrix, Series, SolveOptions, System};
//!
//! # fn main() -> toruscohom::Result<()> {
//! let a = IntMatrix::from_rows(vec![vec![1, 1], vec![1, 2]])?;
//! let map = AffineTorusMap::new(a, vec![parse_rational("1/2")?, parse_rational("0")?])?;
//! let sys = System::with_default_band(map)?;
//! let h = Series::basis_mode(2, vec![1, 1], Complex::new(1.0, 0.0))?;
//! let g = h.coboundary(&sys.map)?;
//! let f = sys.solve(&g, &SolveOptions::default()).unwrap().f;
//! assert!(f.max_coeff_diff(&h) < 1e-12);
//! # Ok(())
//! # }
//! ```

pub mod adapted_norm;
pub mod dense;
pub mod error;
pub mod fixtures;
pub mod fourier;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod scalar;
pub mod solver;
pub mod spectral;
pub mod system;

pub use adapted_norm::{build_adapted_norm, AdaptedNorm, OrbitKind};
pub use error::{Error, Result};
pub use fourier::{FourierSeries, Freq};
pub use lattice::{AffineTorusMap, DualMap, IntMatrix};
pub use scalar::Scalar;
pub use solver::{
    check_obstructions, phi, phi_zero, solve, ObstructionReport, PhiMode, SolveError, SolveOptions, SolveResult,
};
pub use spectral::{char_poly, companion_matrix, roots, HyperbolicSplitting, IntPolynomial, Spectrum};
pub use system::HyperbolicSystem;

pub type Series = FourierSeries<f64>;
pub type Series32 = FourierSeries<f32>;
pub type Splitting = HyperbolicSplitting<f64>;
pub type Norm = AdaptedNorm<f64>;
pub type Report = ObstructionReport<f64>;
pub type Solution = SolveResult<f64>;
pub type System = HyperbolicSystem<f64>;
pub type System32 = HyperbolicSystem<f32>;
