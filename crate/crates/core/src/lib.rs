//! Numerical geometry of extremal multiply-connected planar domains.
//!
//! The crate works on bounded domains whose boundary components are closed
//! analytic curves stored as truncated Fourier series. It computes the
//! geometric lower bound `λ_m = 2A/P` for the uniform distance from `z̄` to
//! analytic functions, fits the best analytic approximation `φ`, analyses the
//! quadratic differential `φ′(z) dz²` (zeros, Stokes graphs, trajectories),
//! integrates the vacuum equation `v″ = −(φ′/λ²) v` along complex paths with
//! its Liouville–Green approximation, and checks the curvature identities that
//! single out concentric annuli.
//!
//! All numerical code is generic over a [`Real`] scalar (`f32` or `f64`);
//! the `*64` aliases below fix the scalar to `f64`, which is what the stated
//! tolerances assume.

pub mod analytic;
pub mod appendix;
pub mod error;
pub mod extremal;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod minimax;
pub mod odewkb;
pub mod quadrature;
pub mod quaddiff;
pub mod rk;
pub mod scalar;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;

pub type Complex64 = Complex<f64>;
pub type Contour64 = geometry::Contour<f64>;
pub type Domain64 = geometry::Domain<f64>;
pub type GeometricSummary64 = geometry::GeometricSummary<f64>;
pub type RationalFunction64 = analytic::RationalFunction<f64>;
pub type MobiusMap64 = analytic::MobiusMap<f64>;
pub type ExtremalityReport64 = extremal::ExtremalityReport<f64>;
pub type VacuumSolution64 = extremal::VacuumSolution<f64>;
pub type ZeroOfPhiPrime64 = quaddiff::ZeroOfPhiPrime<f64>;
pub type Trajectory64 = quaddiff::Trajectory<f64>;
pub type StokesGraph64 = quaddiff::StokesGraph<f64>;
pub type PathSolution64 = odewkb::PathSolution<f64>;
pub type WkbApproximant64 = odewkb::WkbApproximant<f64>;
pub type AnnulusOracle64 = appendix::AnnulusOracle<f64>;
