//! Exact dynamics of the full atom–cavity model on a truncated Fock space.
//!
//! Each atom–cavity pair evolves under
//!
//!   H = ω₀σ_z/2 + ω a†a + g(σ₊+σ₋)(a†+a)
//!
//! via one Hermitian spectral decomposition per parameter set, reused across
//! sample times. The entangled two-qubit initial state is a sum of two
//! product terms, each propagated as U⊗U on its own pair; the cavities are
//! then traced out pairwise, which avoids ever forming the squared joint
//! space. Truncation is validated by a doubling check on the concurrence.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4};
use num_complex::Complex64 as C64;

use super::{check_grid, OracleError};
use crate::entanglement::{concurrence_general, ConcurrenceSeries, InitialStateSpec, StateKind};
use crate::kernels::SystemParams;
use crate::numerics::eigen::{hermitian_eigensystem, SpectralDecomposition};
use crate::propagator::JointState;

/// Whether the pair Hamiltonian keeps the counter-rotating terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingForm {
    /// g(σ₊+σ₋)(a†+a): the full interaction.
    Full,
    /// g(σ₊a + σ₋a†): rotating-wave approximation.
    RotatingWave,
}

#[derive(Debug, Clone, Copy)]
pub struct RabiConfig {
    /// Photon number states 0..n_cut−1 are kept.
    pub n_cut: usize,
    pub params: SystemParams,
}

/// Atom–cavity pair Hamiltonian on the 2·n_cut basis |a⟩⊗|n⟩ with
/// a ∈ {0 = excited, 1 = ground}, index a·n_cut + n.
pub fn pair_hamiltonian(params: &SystemParams, n_cut: usize, form: CouplingForm) -> DMatrix<C64> {
    let dim = 2 * n_cut;
    let mut h = DMatrix::from_element(dim, dim, C64::ZERO);
    for a in 0..2 {
        let sz = if a == 0 { 0.5 } else { -0.5 };
        for n in 0..n_cut {
            h[(a * n_cut + n, a * n_cut + n)] = C64::from(params.omega0 * sz + params.omega * n as f64);
        }
    }
    let g = params.g;
    for n in 0..n_cut {
        // σ₊ a: |0,n⟩ → √n |1,n−1⟩ in (excited, ground) labels — here the
        // excited row is a = 0, so this couples (1, n) to (0, n−1).
        if n > 0 {
            let v = C64::from(g * (n as f64).sqrt());
            h[(n - 1, n_cut + n)] += v;
            h[(n_cut + n, n - 1)] += v;
        }
        // σ₊ a†: couples (1, n) to (0, n+1); counter-rotating, only in Full.
        if form == CouplingForm::Full && n + 1 < n_cut {
            let v = C64::from(g * ((n + 1) as f64).sqrt());
            h[(n + 1, n_cut + n)] += v;
            h[(n_cut + n, n + 1)] += v;
        }
    }
    h
}

/// Prepared evolution for one parameter set: the spectral decomposition and
/// the two product initial vectors (excited/ground atom, vacuum field).
pub struct RabiEvolution {
    decomposition: SpectralDecomposition,
    n_cut: usize,
}

impl RabiEvolution {
    pub fn new(config: &RabiConfig, form: CouplingForm) -> Result<Self, OracleError> {
        if config.n_cut < 8 {
            return Err(OracleError::TruncationTooSmall(config.n_cut));
        }
        let h = pair_hamiltonian(&config.params, config.n_cut, form);
        let decomposition = hermitian_eigensystem(&h)?;
        Ok(Self { decomposition, n_cut: config.n_cut })
    }

    fn initial_vector(&self, excited: bool) -> DVector<C64> {
        let mut v = DVector::from_element(2 * self.n_cut, C64::ZERO);
        v[if excited { 0 } else { self.n_cut }] = C64::ONE;
        v
    }

    /// Evolved pair states (excited-atom start, ground-atom start) at `t`.
    pub fn pair_states(&self, t: f64) -> (DVector<C64>, DVector<C64>) {
        let u1 = self.decomposition.evolve(&self.initial_vector(true), t);
        let u0 = self.decomposition.evolve(&self.initial_vector(false), t);
        (u1, u0)
    }

    /// Partial trace over the cavity of |φ⟩⟨χ|: a 2×2 atom operator.
    fn traced(&self, phi: &DVector<C64>, chi: &DVector<C64>) -> Matrix2<C64> {
        let nc = self.n_cut;
        Matrix2::from_fn(|a, ap| {
            (0..nc).map(|n| phi[a * nc + n] * chi[ap * nc + n].conj()).sum()
        })
    }

    /// Reduced two-qubit state at time `t` for the given initial
    /// superposition. The result is Hermitian and trace-1 by construction but
    /// need not be exactly X-structured.
    pub fn reduced_joint(&self, spec: &InitialStateSpec, t: f64) -> JointState {
        let (u1, u0) = self.pair_states(t);
        // Initial state as Σ c_k |a_k⟩|b_k⟩ with pair states from {u1, u0}.
        let beta = C64::from(spec.beta);
        let eta = spec.eta();
        let terms: [(C64, &DVector<C64>, &DVector<C64>); 2] = match spec.kind {
            StateKind::Phi => [(beta, &u0, &u1), (eta, &u1, &u0)],
            StateKind::Psi => [(beta, &u0, &u0), (eta, &u1, &u1)],
        };
        let mut rho = Matrix4::from_element(C64::ZERO);
        for (ck, ak, bk) in &terms {
            for (cl, al, bl) in &terms {
                let weight = ck * cl.conj();
                let ma = self.traced(ak, al);
                let mb = self.traced(bk, bl);
                for i in 0..2 {
                    for j in 0..2 {
                        for k in 0..2 {
                            for l in 0..2 {
                                rho[(2 * i + k, 2 * j + l)] += weight * ma[(i, j)] * mb[(k, l)];
                            }
                        }
                    }
                }
            }
        }
        JointState { rho }
    }

    /// Norm of the evolved total pair state, 1 up to rounding.
    pub fn norm_residual(&self, t: f64) -> f64 {
        let (u1, u0) = self.pair_states(t);
        let n1 = u1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let n0 = u0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (n1 - 1.0).abs().max((n0 - 1.0).abs())
    }
}

/// Evolve the pair under the full Hamiltonian and return the reduced joint
/// trajectory with its concurrence series.
pub fn rabi_joint(
    spec: &InitialStateSpec,
    config: &RabiConfig,
    t_grid: &[f64],
) -> Result<(Vec<JointState>, ConcurrenceSeries), OracleError> {
    check_grid(t_grid)?;
    let evo = RabiEvolution::new(config, CouplingForm::Full)?;
    let mut states = Vec::with_capacity(t_grid.len());
    let mut values = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let st = evo.reduced_joint(spec, t);
        values.push(concurrence_general(&st)?);
        states.push(st);
    }
    Ok((states, ConcurrenceSeries { times: t_grid.to_vec(), values }))
}

/// Doubling check: largest concurrence difference between runs at `n_cut`
/// and `2·n_cut`. Large residuals signal truncation non-convergence.
pub fn truncation_residual(
    spec: &InitialStateSpec,
    config: &RabiConfig,
    t_grid: &[f64],
) -> Result<f64, OracleError> {
    let (_, base) = rabi_joint(spec, config, t_grid)?;
    let doubled = RabiConfig { n_cut: 2 * config.n_cut, params: config.params };
    let (_, fine) = rabi_joint(spec, &doubled, t_grid)?;
    Ok(base
        .values
        .iter()
        .zip(&fine.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Raise `n_cut` by doubling until the doubling residual drops below
/// `target`, returning the accepted truncation and its residual.
pub fn converged_n_cut(
    spec: &InitialStateSpec,
    params: &SystemParams,
    t_grid: &[f64],
    start: usize,
    target: f64,
    max_n_cut: usize,
) -> Result<(usize, f64), OracleError> {
    let mut n_cut = start.max(8);
    loop {
        let cfg = RabiConfig { n_cut, params: *params };
        let residual = truncation_residual(spec, &cfg, t_grid)?;
        if residual < target || 2 * n_cut > max_n_cut {
            return Ok((n_cut, residual));
        }
        n_cut *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::concurrence_x;
    use crate::oracles::jc::jc_joint_state;

    fn grid(t_max: f64, step: f64) -> Vec<f64> {
        let n = (t_max / step).round() as usize;
        (0..=n).map(|i| i as f64 * step).collect()
    }

    #[test]
    fn hamiltonian_is_hermitian_and_detunes() {
        let p = SystemParams::detuned(3.0, 0.5).unwrap();
        for form in [CouplingForm::Full, CouplingForm::RotatingWave] {
            let h = pair_hamiltonian(&p, 12, form);
            let res = crate::numerics::eigen::hermiticity_residual(&h);
            assert_eq!(res, 0.0);
        }
        // Counter-rotating terms only in the full form.
        let full = pair_hamiltonian(&p, 12, CouplingForm::Full);
        let rwa = pair_hamiltonian(&p, 12, CouplingForm::RotatingWave);
        assert!(full[(1, 12)].norm() > 0.0);
        assert_eq!(rwa[(1, 12)], C64::ZERO);
    }

    #[test]
    fn uncoupled_pair_keeps_initial_concurrence() {
        let params = SystemParams { omega0: 3.0, omega: 3.0, g: 0.0, sum_freq: 6.0, detuning: 0.0 };
        let spec = InitialStateSpec::from_beta_sq(StateKind::Phi, 0.3, 0.0).unwrap();
        let cfg = RabiConfig { n_cut: 8, params };
        let (_, series) = rabi_joint(&spec, &cfg, &grid(5.0, 1.0)).unwrap();
        let expect = spec.initial_concurrence();
        for v in series.values {
            assert!((v - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn evolution_is_unitary_and_state_physical() {
        let p = SystemParams::resonant(1.5).unwrap();
        let cfg = RabiConfig { n_cut: 24, params: p };
        let evo = RabiEvolution::new(&cfg, CouplingForm::Full).unwrap();
        let spec = InitialStateSpec::from_beta_sq(StateKind::Psi, 0.6, 0.0).unwrap();
        for t in [0.0, 1.3, 4.8, 9.9] {
            assert!(evo.norm_residual(t) < 1e-10, "norm at t={t}");
            let st = evo.reduced_joint(&spec, t);
            assert!(st.trace_residual() < 1e-10, "trace at t={t}");
            assert!(st.hermiticity_residual() < 1e-12);
            assert!(st.min_eigenvalue() > -1e-10);
        }
    }

    #[test]
    fn truncation_residual_small_at_weak_coupling() {
        let p = SystemParams::resonant(30.0).unwrap();
        let spec = InitialStateSpec::from_beta_sq(StateKind::Phi, 0.5, 0.0).unwrap();
        let cfg = RabiConfig { n_cut: 8, params: p };
        let res = truncation_residual(&spec, &cfg, &grid(5.0, 0.5)).unwrap();
        assert!(res < 1e-6, "doubling residual {res:.3e}");
    }

    #[test]
    fn rwa_evolution_matches_closed_form_reference() {
        let p = SystemParams::detuned(5.0, 0.8).unwrap();
        let cfg = RabiConfig { n_cut: 8, params: p };
        let evo = RabiEvolution::new(&cfg, CouplingForm::RotatingWave).unwrap();
        let spec = InitialStateSpec::from_beta_sq(StateKind::Psi, 0.3, 0.4).unwrap();
        for t in [0.0, 0.7, 2.9, 6.1] {
            let numeric = evo.reduced_joint(&spec, t);
            let analytic = jc_joint_state(&spec, &p, t);
            let c_num = concurrence_general(&numeric).unwrap();
            let c_ana = concurrence_x(&analytic).unwrap();
            assert!((c_num - c_ana).abs() < 1e-10, "t={t}: {c_num} vs {c_ana}");
            let err = (numeric.rho - analytic.rho).map(|z| z.norm()).max();
            assert!(err < 1e-10, "state mismatch {err:.3e} at t={t}");
        }
    }

    #[test]
    fn truncation_guard() {
        let p = SystemParams::resonant(2.0).unwrap();
        let cfg = RabiConfig { n_cut: 4, params: p };
        assert!(matches!(
            RabiEvolution::new(&cfg, CouplingForm::Full),
            Err(OracleError::TruncationTooSmall(4))
        ));
    }
}
