//! Numerical solvers for the scalar additive jump problem and planar Riemann
//! boundary value problems on domains with fractal boundaries.
//!
//! The pipeline: Clifford algebra arithmetic and the even/odd reduction
//! ([`clifford`]), discrete Dirac/Cauchy-Riemann calculus and fundamental
//! solutions ([`fields`]), Whitney extension of Hoelder boundary data
//! ([`whitney`]), fractal curve construction with metric exponent estimation
//! ([`fractal`]), volume-potential quadrature ([`quadrature`]), and the two
//! solvers ([`jump`], [`rbvp2d`]).

pub mod clifford;
pub mod error;
pub mod fields;
pub mod fractal;
pub mod geometry;
pub mod jump;
pub mod quadrature;
pub mod rbvp2d;
pub mod report;
pub mod whitney;

pub use clifford::{BladeIndex, GradedParts, Multivector, MultivectorJson};
pub use error::{CoreError, Result};




