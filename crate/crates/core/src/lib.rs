//! Numerical laboratory for the zeros of Schrödinger-equation solutions
//! viewed as point vortices.
//!
//! * [`orthopoly`]: Hermite, Laguerre and Jacobi polynomials and their zeros.
//! * [`vortex`]: Kirchhoff dynamics of polynomial zeros.
//! * [`stieltjes`]: stationary Kirchhoff / electrostatic equilibria.
//! * [`susy`]: factorized partner Hamiltonians.
//! * [`laughlin`]: Laughlin log-amplitude, Berry connection, planar equilibria.
//! * [`landau`]: magnetic Schrödinger operator and Landau-level clusters.
//! * [`certify`]: the end-to-end acceptance criteria.

pub mod certify;
pub mod landau;
pub mod laughlin;
pub mod orthopoly;
pub mod stieltjes;
pub mod superpotential;
pub mod susy;
pub mod tridiag;
pub mod vortex;

pub use num_complex::Complex64;
