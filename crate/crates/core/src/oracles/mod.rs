//! Independent validators for the algebraic propagator: literal
//! superoperator integration of the master equation, exact evolution of the
//! full (counter-rotating) atom–cavity model on a truncated Fock space, and
//! the closed-form rotating-wave reference.

pub mod figures;
pub mod jc;
pub mod rabi;
pub mod superop;
pub mod tcl;

pub use figures::{figure_scenario, FigureId, FigureScenario};
pub use jc::{jc_joint_state, jc_reference};
pub use rabi::{pair_hamiltonian, rabi_joint, CouplingForm, RabiConfig, RabiEvolution};
pub use superop::{master_rhs, SuperoperatorTerm};
pub use tcl::{tcl_direct, tcl_direct_joint};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("Fock truncation must keep at least 8 photon states, got {0}")]
    TruncationTooSmall(usize),
    #[error("time grid must be non-empty, ascending, and start at 0")]
    BadTimeGrid,
    #[error(transparent)]
    Ode(#[from] crate::numerics::ode::OdeError),
    #[error(transparent)]
    Eigen(#[from] crate::numerics::eigen::EigenError),
    #[error(transparent)]
    Entanglement(#[from] crate::entanglement::EntanglementError),
}

pub(crate) fn check_grid(t_grid: &[f64]) -> Result<(), OracleError> {
    let ok = t_grid.first() == Some(&0.0) && t_grid.windows(2).all(|w| w[1] > w[0]);
    if ok {
        Ok(())
    } else {
        Err(OracleError::BadTimeGrid)
    }
}
