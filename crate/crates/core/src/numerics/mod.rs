//! Numerical substrate: adaptive ODE integration over complex state vectors
//! and Hermitian eigendecomposition with unitary state evolution.

pub mod eigen;
pub mod ode;

pub use eigen::{hermitian_eigensystem, unitary_evolve, EigenError, SpectralDecomposition};
pub use ode::{integrate_adaptive, integrate_adaptive_guarded, OdeError, OdeSettings, Trajectory};
