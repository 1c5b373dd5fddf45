//! Direct numerical integration of the master equation, for one qubit and
//! for the joint pair (the local generator applied to each subsystem). This
//! is the reference dynamics against which the algebraic map is validated.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;

use super::{check_grid, OracleError};
use crate::kernels::{coefficient_set, SystemParams};
use crate::numerics::ode::{integrate_adaptive, OdeSettings};
use crate::oracles::superop::master_rhs;
use crate::propagator::{JointState, QubitState};

/// Integrate one qubit's master equation from `rho0`, sampling at `t_grid`
/// (ascending, starting at 0).
pub fn tcl_direct(
    rho0: &QubitState,
    params: &SystemParams,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<QubitState>, OracleError> {
    check_grid(t_grid)?;
    let p = *params;
    let y0: Vec<C64> = rho0.rho.iter().copied().collect();
    let rhs = move |t: f64, y: &[C64], dy: &mut [C64]| {
        let c = coefficient_set(t, &p);
        // nalgebra stores column-major; build and read back consistently.
        let rho = Matrix2::from_column_slice(y);
        let out = master_rhs(&c, &rho);
        dy.copy_from_slice(out.as_slice());
    };
    let span = (0.0, *t_grid.last().unwrap());
    let traj = integrate_adaptive(rhs, &y0, span, t_grid, settings)?;
    Ok(traj
        .states
        .iter()
        .map(|s| QubitState { rho: Matrix2::from_column_slice(s) })
        .collect())
}

/// Apply the single-qubit generator to subsystem A (first index) of a joint
/// 4×4 state, leaving B untouched.
fn apply_local_a(c: &crate::kernels::CoefficientSet, rho: &Matrix4<C64>, out: &mut Matrix4<C64>) {
    for b in 0..2 {
        for bp in 0..2 {
            let sub = Matrix2::new(rho[(b, bp)], rho[(b, 2 + bp)], rho[(2 + b, bp)], rho[(2 + b, 2 + bp)]);
            let res = master_rhs(c, &sub);
            out[(b, bp)] += res[(0, 0)];
            out[(b, 2 + bp)] += res[(0, 1)];
            out[(2 + b, bp)] += res[(1, 0)];
            out[(2 + b, 2 + bp)] += res[(1, 1)];
        }
    }
}

/// Same for subsystem B (second index).
fn apply_local_b(c: &crate::kernels::CoefficientSet, rho: &Matrix4<C64>, out: &mut Matrix4<C64>) {
    for a in 0..2 {
        for ap in 0..2 {
            let sub = Matrix2::new(
                rho[(2 * a, 2 * ap)],
                rho[(2 * a, 2 * ap + 1)],
                rho[(2 * a + 1, 2 * ap)],
                rho[(2 * a + 1, 2 * ap + 1)],
            );
            let res = master_rhs(c, &sub);
            out[(2 * a, 2 * ap)] += res[(0, 0)];
            out[(2 * a, 2 * ap + 1)] += res[(0, 1)];
            out[(2 * a + 1, 2 * ap)] += res[(1, 0)];
            out[(2 * a + 1, 2 * ap + 1)] += res[(1, 1)];
        }
    }
}

/// Integrate the joint master equation ρ̇ = (L⊗id + id⊗L)ρ for the two-qubit
/// state, both subsystems sharing the same parameters.
pub fn tcl_direct_joint(
    rho0: &JointState,
    params: &SystemParams,
    t_grid: &[f64],
    settings: &OdeSettings,
) -> Result<Vec<JointState>, OracleError> {
    check_grid(t_grid)?;
    let p = *params;
    let y0: Vec<C64> = rho0.rho.iter().copied().collect();
    let rhs = move |t: f64, y: &[C64], dy: &mut [C64]| {
        let c = coefficient_set(t, &p);
        let rho = Matrix4::from_column_slice(y);
        let mut out = Matrix4::from_element(C64::ZERO);
        apply_local_a(&c, &rho, &mut out);
        apply_local_b(&c, &rho, &mut out);
        dy.copy_from_slice(out.as_slice());
    };
    let span = (0.0, *t_grid.last().unwrap());
    let traj = integrate_adaptive(rhs, &y0, span, t_grid, settings)?;
    Ok(traj
        .states
        .iter()
        .map(|s| JointState { rho: Matrix4::from_column_slice(s) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{initial_state, InitialStateSpec, StateKind};
    use crate::kernels::evaluate_kernels;
    use crate::propagator::{build_transfer_matrix, map_from_transfer, propagate_single};

    fn grid(t_max: f64, step: f64) -> Vec<f64> {
        let n = (t_max / step).round() as usize;
        (0..=n).map(|i| i as f64 * step).collect()
    }

    #[test]
    fn starts_at_initial_state() {
        let p = SystemParams::resonant(1.5).unwrap();
        let st = QubitState::excited();
        let traj = tcl_direct(&st, &p, &[0.0, 1.0], &OdeSettings::default()).unwrap();
        assert_eq!(traj[0], st);
    }

    #[test]
    fn trace_is_conserved() {
        let p = SystemParams::resonant(1.5).unwrap();
        let traj = tcl_direct(&QubitState::excited(), &p, &grid(25.0, 0.5), &OdeSettings::default()).unwrap();
        for st in &traj {
            assert!((st.trace() - C64::ONE).norm() < 1e-9);
            assert!(st.hermiticity_residual() < 1e-12);
        }
    }

    #[test]
    fn matches_algebraic_map_at_moderate_coupling() {
        let p = SystemParams::resonant(1.5).unwrap();
        let ts = grid(25.0, 0.5);
        let direct = tcl_direct(&QubitState::excited(), &p, &ts, &OdeSettings::default()).unwrap();
        let tms = build_transfer_matrix(&p, &ts).unwrap();
        let mut worst: f64 = 0.0;
        for ((t, d), tm) in ts.iter().zip(&direct).zip(&tms) {
            let gamma = evaluate_kernels(*t, &p).gamma_k;
            let mc = map_from_transfer(tm, gamma).unwrap();
            let alg = propagate_single(&QubitState::excited(), &mc);
            worst = worst.max((d.rho - alg.rho).map(|z| z.norm()).max());
        }
        assert!(worst < 1e-7, "mismatch {worst:.3e}");
    }

    #[test]
    fn excited_state_weak_coupling_against_map() {
        let p = SystemParams::resonant(30.0).unwrap();
        let ts = vec![0.0, 5.0];
        let direct = tcl_direct(&QubitState::excited(), &p, &ts, &OdeSettings::default()).unwrap();
        let tms = build_transfer_matrix(&p, &ts).unwrap();
        let gamma = evaluate_kernels(5.0, &p).gamma_k;
        let mc = map_from_transfer(&tms[1], gamma).unwrap();
        let alg = propagate_single(&QubitState::excited(), &mc);
        let err = (direct[1].rho - alg.rho).map(|z| z.norm()).max();
        assert!(err < 1e-7, "mismatch {err:.3e}");
    }

    #[test]
    fn basis_matrices_reproduce_transfer_columns() {
        let p = SystemParams::detuned(3.0, 0.4).unwrap();
        let ts = grid(10.0, 1.0);
        let tms = build_transfer_matrix(&p, &ts).unwrap();
        // Basis matrices in the vectorization order ρ¹¹, ρ¹⁰, ρ⁰¹, ρ⁰⁰.
        let entries = [(0usize, 0usize), (0, 1), (1, 0), (1, 1)];
        for (col, &(i, j)) in entries.iter().enumerate() {
            let mut m = Matrix2::from_element(C64::ZERO);
            m[(i, j)] = C64::ONE;
            let traj = tcl_direct(&QubitState { rho: m }, &p, &ts, &OdeSettings::default()).unwrap();
            for (k, st) in traj.iter().enumerate() {
                let want = [
                    tms[k][(0, col)],
                    tms[k][(1, col)],
                    tms[k][(2, col)],
                    tms[k][(3, col)],
                ];
                let got = [st.rho[(0, 0)], st.rho[(0, 1)], st.rho[(1, 0)], st.rho[(1, 1)]];
                for (w, g) in want.iter().zip(&got) {
                    assert!((w - g).norm() < 1e-9, "column {col} sample {k}");
                }
            }
        }
    }

    #[test]
    fn joint_evolution_keeps_x_structure_and_physicality() {
        let p = SystemParams::resonant(3.0).unwrap();
        let spec = InitialStateSpec::from_beta_sq(StateKind::Phi, 0.4, 0.0).unwrap();
        let traj =
            tcl_direct_joint(&initial_state(&spec), &p, &grid(20.0, 0.5), &OdeSettings::default()).unwrap();
        for st in &traj {
            assert!(st.trace_residual() < 1e-9);
            assert!(st.hermiticity_residual() < 1e-12);
            assert!(st.x_residual() < 1e-12);
        }
    }
}
