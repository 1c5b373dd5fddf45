//! Exact decoherence dynamics of two qubits, each coupled to its own
//! lossless single-mode cavity, with the counter-rotating interaction terms
//! retained.
//!
//! The library evolves the reduced state of each atom under a time-local
//! master equation with time-dependent coefficients (vacuum field, no
//! rotating-wave approximation), assembles the joint two-qubit state from the
//! single-qubit dynamical map, and tracks Wootters concurrence over time.
//! Three independent computational routes are provided and cross-checked:
//!
//! * an algebraic route — SU(2) disentangling of the time-ordered propagator
//!   via a Riccati system, or equivalently a linear transfer matrix
//!   ([`propagator`]);
//! * direct numerical integration of the master equation ([`oracles::tcl`]);
//! * exact evolution of the full atom–cavity Hamiltonian on a truncated Fock
//!   space ([`oracles::rabi`]), with the closed-form rotating-wave solution as
//!   the comparison baseline ([`oracles::jc`]).
//!
//! [`sweep`] drives parameter grids over (β², gt, ω₀/g, δ) and writes CSV
//! datasets; [`checks`] bundles the oracle cross-validation suite.

pub mod checks;
pub mod entanglement;
pub mod kernels;
pub mod numerics;
pub mod oracles;
pub mod propagator;
pub mod sweep;

pub use entanglement::{concurrence_general, concurrence_x, ConcurrenceSeries, InitialStateSpec, StateKind};
pub use kernels::{coefficient_set, evaluate_kernels, CoefficientSet, KernelValues, SystemParams};
pub use propagator::{JointState, MapCoefficients, QubitState};
pub use sweep::{Engine, ScenarioConfig};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
