//! Initial entangled states and Wootters concurrence.
//!
//! Initial states are |Φ⟩ = β|01⟩ + η|10⟩ and |Ψ⟩ = β|00⟩ + η|11⟩ with β
//! real in (0, 1), η = |η|e^{iφ}, β² + |η|² = 1. Concurrence is evaluated
//! either through the closed form valid on X-structured states or through
//! the general spin-flip construction; the two agree on X states and the
//! test suite pins that equivalence.

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::numerics::eigen::hermitian_eigensystem;
use crate::propagator::JointState;

#[derive(Debug, Error)]
pub enum EntanglementError {
    #[error("beta must lie strictly inside (0, 1), got {0}")]
    BetaOutOfRange(f64),
    #[error("state is not X-structured (residual {residual:.3e}); use concurrence_general")]
    NotXStructured { residual: f64 },
    #[error("state is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("state trace deviates from 1 by {0:.3e}")]
    TraceDeviation(f64),
    #[error("state is materially non-positive (eigenvalue {0:.3e})")]
    NotPositive(f64),
}

/// Which Bell-like superposition the pair starts in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// β|01⟩ + η|10⟩ — single shared excitation.
    Phi,
    /// β|00⟩ + η|11⟩ — double excitation component.
    Psi,
}

impl StateKind {
    pub fn label(&self) -> &'static str {
        match self {
            StateKind::Phi => "phi",
            StateKind::Psi => "psi",
        }
    }
}

impl std::str::FromStr for StateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "phi" => Ok(StateKind::Phi),
            "psi" => Ok(StateKind::Psi),
            other => Err(format!("unknown state kind '{other}' (expected phi or psi)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct InitialStateSpec {
    pub kind: StateKind,
    pub beta: f64,
    pub phase: f64,
}

impl InitialStateSpec {
    pub fn new(kind: StateKind, beta: f64, phase: f64) -> Result<Self, EntanglementError> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(EntanglementError::BetaOutOfRange(beta));
        }
        Ok(Self { kind, beta, phase })
    }

    pub fn from_beta_sq(kind: StateKind, beta_sq: f64, phase: f64) -> Result<Self, EntanglementError> {
        if !(beta_sq > 0.0 && beta_sq < 1.0) {
            return Err(EntanglementError::BetaOutOfRange(beta_sq));
        }
        Self::new(kind, beta_sq.sqrt(), phase)
    }

    /// η = √(1−β²) e^{iφ}.
    pub fn eta(&self) -> C64 {
        C64::from_polar((1.0 - self.beta * self.beta).sqrt(), self.phase)
    }

    /// Concurrence at t = 0: 2β√(1−β²).
    pub fn initial_concurrence(&self) -> f64 {
        2.0 * self.beta * (1.0 - self.beta * self.beta).sqrt()
    }
}

/// Time grid with concurrence values; values lie in [0, 1].
#[derive(Debug, Clone)]
pub struct ConcurrenceSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

/// Pure two-qubit density matrix for the requested superposition, in the
/// product basis {|11⟩, |10⟩, |01⟩, |00⟩}.
pub fn initial_state(spec: &InitialStateSpec) -> JointState {
    let beta = C64::from(spec.beta);
    let eta = spec.eta();
    let mut amps = [C64::ZERO; 4];
    match spec.kind {
        StateKind::Phi => {
            amps[2] = beta; // |01⟩
            amps[1] = eta; // |10⟩
        }
        StateKind::Psi => {
            amps[3] = beta; // |00⟩
            amps[0] = eta; // |11⟩
        }
    }
    let rho = Matrix4::from_fn(|i, j| amps[i] * amps[j].conj());
    JointState { rho }
}

/// Concurrence of an X-structured state:
/// max{0, 2(|ρ₂₃| − √(ρ₁₁ρ₄₄)), 2(|ρ₁₄| − √(ρ₂₂ρ₃₃))}.
pub fn concurrence_x(state: &JointState) -> Result<f64, EntanglementError> {
    let residual = state.x_residual();
    if residual > 1e-12 {
        return Err(EntanglementError::NotXStructured { residual });
    }
    let m = &state.rho;
    let d = |i: usize| m[(i, i)].re.max(0.0);
    let c1 = 2.0 * (m[(1, 2)].norm() - (d(0) * d(3)).sqrt());
    let c2 = 2.0 * (m[(0, 3)].norm() - (d(1) * d(2)).sqrt());
    Ok(c1.max(c2).max(0.0))
}

/// σ_y ⊗ σ_y, which is real: antidiag(−1, 1, 1, −1).
fn spin_flip() -> Matrix4<C64> {
    let mut y = Matrix4::from_element(C64::ZERO);
    y[(0, 3)] = C64::from(-1.0);
    y[(1, 2)] = C64::ONE;
    y[(2, 1)] = C64::ONE;
    y[(3, 0)] = C64::from(-1.0);
    y
}

const LAMBDA_CLAMP: f64 = 1e-10;

/// Wootters concurrence of a general two-qubit density matrix:
/// C = max{0, √λ₁ − √λ₂ − √λ₃ − √λ₄} with λᵢ the descending eigenvalues of
/// ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y). Computed through the Hermitian product
/// √ρ ρ̃ √ρ, which shares the spectrum.
pub fn concurrence_general(state: &JointState) -> Result<f64, EntanglementError> {
    let herm = state.hermiticity_residual();
    if herm > 1e-8 {
        return Err(EntanglementError::NotHermitian(herm));
    }
    let tr = state.trace_residual();
    if tr > 1e-6 {
        return Err(EntanglementError::TraceDeviation(tr));
    }

    let rho_d = DMatrix::from_fn(4, 4, |i, j| state.rho[(i, j)]);
    let sd = hermitian_eigensystem(&rho_d).expect("hermiticity already checked");
    let lam_min = sd.eigenvalues.min();
    if lam_min < -1e-6 {
        return Err(EntanglementError::NotPositive(lam_min));
    }
    let sqrt_rho = {
        let roots = DMatrix::from_diagonal(&sd.eigenvalues.map(|v| C64::from(v.max(0.0).sqrt())));
        &sd.eigenvectors * roots * sd.eigenvectors.adjoint()
    };

    let y = spin_flip();
    let tilde = y * state.rho.map(|z| z.conj()) * y;
    let tilde_d = DMatrix::from_fn(4, 4, |i, j| tilde[(i, j)]);
    let m = &sqrt_rho * tilde_d * &sqrt_rho;
    // Symmetrize away the rounding skew before the Hermitian solver.
    let m = (&m + m.adjoint()) * C64::from(0.5);
    let md = hermitian_eigensystem(&m).expect("product of Hermitian factors");

    let mut lams: Vec<f64> = md.eigenvalues.iter().copied().collect();
    lams.sort_by(|a, b| b.total_cmp(a));
    let mut roots = [0.0; 4];
    for (r, &lam) in roots.iter_mut().zip(&lams) {
        if lam < -LAMBDA_CLAMP {
            return Err(EntanglementError::NotPositive(lam));
        }
        *r = lam.max(0.0).sqrt();
    }
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}
