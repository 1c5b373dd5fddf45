//! Closed-form rotating-wave (Jaynes–Cummings) reference with vacuum
//! cavities.
//!
//! In the single-excitation sector the excited-atom amplitude is
//!
//!   h(t) = e^{−iωt/2} [cos(Ωt/2) − i(δ/Ω) sin(Ωt/2)],  Ω = √(δ² + 4g²),
//!
//! reducing to cos(gt) (up to phase) at resonance, while the ground
//! atom–vacuum pair only picks up the phase e^{+iω₀t/2}. The two-qubit
//! reduced state follows analytically and stays exactly X-structured.

use nalgebra::Matrix4;
use num_complex::Complex64 as C64;

use super::{check_grid, OracleError};
use crate::entanglement::{concurrence_x, ConcurrenceSeries, InitialStateSpec, StateKind};
use crate::kernels::SystemParams;
use crate::propagator::JointState;

/// Excited-survival amplitude h(t) and photon-emission amplitude v(t) of one
/// atom–cavity pair; |h|² + |v|² = 1.
pub fn jc_amplitudes(params: &SystemParams, t: f64) -> (C64, C64) {
    let delta = params.detuning;
    let g = params.g;
    let rabi = (delta * delta + 4.0 * g * g).sqrt();
    let frame = C64::from_polar(1.0, -0.5 * params.omega * t);
    if rabi < 1e-300 {
        return (frame, C64::ZERO);
    }
    let half = 0.5 * rabi * t;
    let h = frame * C64::new(half.cos(), -(delta / rabi) * half.sin());
    let v = frame * C64::new(0.0, -(2.0 * g / rabi) * half.sin());
    (h, v)
}

/// Reduced two-qubit state of the rotating-wave model at time `t`.
pub fn jc_joint_state(spec: &InitialStateSpec, params: &SystemParams, t: f64) -> JointState {
    let (h, v) = jc_amplitudes(params, t);
    let p0 = C64::from_polar(1.0, 0.5 * params.omega0 * t);
    let beta = C64::from(spec.beta);
    let eta = spec.eta();
    let mut rho = Matrix4::from_element(C64::ZERO);
    match spec.kind {
        StateKind::Phi => {
            // Coherent single-excitation branch plus the emitted-photon weight
            // on |00⟩.
            let a10 = eta * h * p0;
            let a01 = beta * p0 * h;
            rho[(1, 1)] = C64::from(a10.norm_sqr());
            rho[(2, 2)] = C64::from(a01.norm_sqr());
            rho[(1, 2)] = a10 * a01.conj();
            rho[(2, 1)] = rho[(1, 2)].conj();
            let w = v.norm_sqr();
            rho[(3, 3)] = C64::from((beta.norm_sqr() + eta.norm_sqr()) * w);
        }
        StateKind::Psi => {
            // Cavity configurations split the doubly excited branch into
            // |11⟩, |10⟩, |01⟩, |00⟩ pieces; only the photonless piece stays
            // coherent with the β|00⟩ branch.
            let a11 = eta * h * h;
            let a00 = beta * p0 * p0;
            rho[(0, 0)] = C64::from(a11.norm_sqr());
            rho[(0, 3)] = a11 * a00.conj();
            rho[(3, 0)] = rho[(0, 3)].conj();
            let hv = (eta * h * v).norm_sqr();
            rho[(1, 1)] = C64::from(hv);
            rho[(2, 2)] = C64::from(hv);
            rho[(3, 3)] = C64::from(a00.norm_sqr() + (eta * v * v).norm_sqr());
        }
    }
    JointState { rho }
}

/// Concurrence of the rotating-wave model over a grid starting at 0.
pub fn jc_reference(
    spec: &InitialStateSpec,
    params: &SystemParams,
    t_grid: &[f64],
) -> Result<ConcurrenceSeries, OracleError> {
    check_grid(t_grid)?;
    let values = t_grid
        .iter()
        .map(|&t| concurrence_x(&jc_joint_state(spec, params, t)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConcurrenceSeries { times: t_grid.to_vec(), values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn resonant() -> SystemParams {
        SystemParams::resonant(5.0).unwrap()
    }

    #[test]
    fn amplitudes_are_normalized() {
        for p in [resonant(), SystemParams::detuned(5.0, 0.7).unwrap()] {
            for t in [0.0, 0.9, 3.3, 8.1] {
                let (h, v) = jc_amplitudes(&p, t);
                assert_abs_diff_eq!(h.norm_sqr() + v.norm_sqr(), 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn resonant_concurrence_follows_cos_squared() {
        let spec = InitialStateSpec::from_beta_sq(StateKind::Phi, 0.3, 0.0).unwrap();
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.05).collect();
        let series = jc_reference(&spec, &resonant(), &grid).unwrap();
        let amp = spec.initial_concurrence();
        for (t, v) in series.times.iter().zip(&series.values) {
            let expect = amp * t.cos().powi(2);
            assert_abs_diff_eq!(*v, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn bell_state_vanishes_and_revives() {
        let spec = InitialStateSpec::from_beta_sq(StateKind::Phi, 0.5, 0.0).unwrap();
        let series = jc_reference(&spec, &resonant(), &[0.0, FRAC_PI_2, PI]).unwrap();
        assert_abs_diff_eq!(series.values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(series.values[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(series.values[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn psi_state_has_sudden_death_interval() {
        // At β² = 0.2 the concurrence stays zero on a window inside one
        // period before recovering.
        let spec = InitialStateSpec::from_beta_sq(StateKind::Psi, 0.2, 0.0).unwrap();
        let grid: Vec<f64> = (0..=400).map(|i| i as f64 * PI / 400.0).collect();
        let series = jc_reference(&spec, &resonant(), &grid).unwrap();
        let dead: Vec<f64> = series
            .times
            .iter()
            .zip(&series.values)
            .filter(|(_, &v)| v <= 0.0)
            .map(|(&t, _)| t)
            .collect();
        assert!(!dead.is_empty());
        let len = dead.last().unwrap() - dead.first().unwrap();
        assert!(len > 0.1, "dead interval length {len}");
        // Concurrence recovers after the interval.
        assert!(*series.values.last().unwrap() > 0.5);
        // Predicted window: sin²(gt) ≥ β/|η| = 1/2, i.e. gt ∈ [π/4, 3π/4].
        assert!((dead.first().unwrap() - PI / 4.0).abs() < 0.02);
        assert!((dead.last().unwrap() - 3.0 * PI / 4.0).abs() < 0.02);
    }

    #[test]
    fn phase_does_not_change_concurrence() {
        let grid: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        let p = SystemParams::detuned(5.0, 0.6).unwrap();
        let base = jc_reference(
            &InitialStateSpec::from_beta_sq(StateKind::Psi, 0.35, 0.0).unwrap(),
            &p,
            &grid,
        )
        .unwrap();
        let rotated = jc_reference(
            &InitialStateSpec::from_beta_sq(StateKind::Psi, 0.35, 1.1).unwrap(),
            &p,
            &grid,
        )
        .unwrap();
        for (a, b) in base.values.iter().zip(&rotated.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
