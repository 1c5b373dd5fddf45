//! Single-qubit dynamical map and two-qubit joint state under the time-local
//! vacuum-cavity generator.
//!
//! Two equivalent routes produce the map:
//!
//! * **Riccati route** — SU(2) disentangling of the time-ordered exponential.
//!   Each sector (coherences driven by ε, populations by ν) satisfies
//!
//!     Ẋ₊ = μ₊ − μ₋X₊² + μ₀X₊,   Ẋ₀ = μ₀ − 2μ₋X₊,   Ẋ₋ = μ₋ e^{X₀},
//!
//!   from all-zero initial conditions, and the map coefficients follow
//!   algebraically. The Riccati variable can reach a pole in finite time at
//!   strong coupling; this is reported, never clamped.
//!
//! * **Transfer-matrix route** — direct integration of the linear generator
//!   acting on the four basis matrices. Never singular; the default engine.
//!
//! Both sectors decouple, the ν coefficients are real, and ε₋ = ε₊*, so the
//! map sends Hermitian states to Hermitian states.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::kernels::{coefficient_set, CoefficientSet, SystemParams};
use crate::numerics::ode::{integrate_partial, OdeError, OdeSettings};

/// Riccati pole guard: |X₊| beyond this is treated as blow-up.
pub const RICCATI_GUARD: f64 = 1e8;
/// Exponent bound before exp() in the map coefficients overflows f64.
const EXP_ARG_LIMIT: f64 = 700.0;

/// Integration settings for the map solvers, tighter than the general
/// defaults so that map-level residuals sit well below the contract bounds.
fn map_ode_settings() -> OdeSettings {
    OdeSettings { rel_tol: 1e-11, abs_tol: 1e-14, ..OdeSettings::default() }
}

#[derive(Debug, Error)]
pub enum PropagatorError {
    #[error("time grid must be non-empty, ascending, and start at 0")]
    BadTimeGrid,
    #[error("Riccati variable exceeded {RICCATI_GUARD:.0e} at t = {t}")]
    RiccatiBlowup { t: f64 },
    #[error("map coefficient exponent out of range at gamma = {gamma}")]
    CoefficientOverflow { gamma: f64 },
    #[error("joint state lacks X structure (off-pattern magnitude {residual:.3e})")]
    NotXStructured { residual: f64 },
    #[error("ODE failure: {0}")]
    Ode(#[from] OdeError),
}

/// Disentangling variables of both sectors at one time point. The k family
/// is driven by the real ν coefficients and stays real.
#[derive(Debug, Clone, Copy)]
pub struct RiccatiState {
    pub j_plus: C64,
    pub j_zero: C64,
    pub j_minus: C64,
    pub k_plus: C64,
    pub k_zero: C64,
    pub k_minus: C64,
}

/// The eight entries of the single-qubit map, before the e^{−Γ} scaling,
/// together with the decay exponent Γ. At t = 0 this is the identity map:
/// l = n = 1, m = p = 0, q = x = 1, r = y = 0, Γ = 0.
#[derive(Debug, Clone, Copy)]
pub struct MapCoefficients {
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub p: f64,
    pub q: C64,
    pub r: C64,
    pub x: C64,
    pub y: C64,
    pub gamma_k: f64,
}

impl MapCoefficients {
    pub fn identity() -> Self {
        Self {
            l: 1.0,
            m: 0.0,
            n: 1.0,
            p: 0.0,
            q: C64::ONE,
            r: C64::ZERO,
            x: C64::ONE,
            y: C64::ZERO,
            gamma_k: 0.0,
        }
    }
}

/// 2×2 density matrix of one atom over the basis {|1⟩ (excited), |0⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub rho: Matrix2<C64>,
}

impl QubitState {
    pub fn excited() -> Self {
        Self { rho: Matrix2::new(C64::ONE, C64::ZERO, C64::ZERO, C64::ZERO) }
    }

    pub fn ground() -> Self {
        Self { rho: Matrix2::new(C64::ZERO, C64::ZERO, C64::ZERO, C64::ONE) }
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let mut res: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                res = res.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        res
    }
}

/// 4×4 joint density matrix of the two atoms in the product basis
/// {|11⟩, |10⟩, |01⟩, |00⟩}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    pub rho: Matrix4<C64>,
}

/// Matrix positions required to vanish for an X-structured state.
const OFF_X: [(usize, usize); 8] =
    [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)];

impl JointState {
    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn trace_residual(&self) -> f64 {
        (self.trace() - C64::ONE).norm()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let mut res: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                res = res.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        res
    }

    /// Largest magnitude found outside the X pattern.
    pub fn x_residual(&self) -> f64 {
        OFF_X.iter().map(|&(i, j)| self.rho[(i, j)].norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.rho + self.rho.adjoint()) * C64::new(0.5, 0.0);
        let eig = herm.symmetric_eigen();
        eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }

    /// max(0, −λ_min): how far the state sits below positivity.
    pub fn positivity_residual(&self) -> f64 {
        (-self.min_eigenvalue()).max(0.0)
    }

    pub fn purity(&self) -> f64 {
        (self.rho * self.rho).trace().re
    }
}

type Su2Point = (C64, C64, C64);

/// Integrate one SU(2) disentangling system from zero initial conditions,
/// sampling at `t_grid`. `mu` returns (μ₊, μ₀, μ₋) at a time. On blow-up the
/// samples reached are returned with the failure time.
pub fn solve_su2<F>(mu: F, t_grid: &[f64]) -> (Vec<Su2Point>, Option<PropagatorError>)
where
    F: Fn(f64) -> (C64, C64, C64),
{
    let span = (0.0, *t_grid.last().unwrap_or(&0.0));
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let (mu_p, mu_0, mu_m) = mu(t);
        let x_plus = y[0];
        let x_zero = y[1];
        dy[0] = mu_p - mu_m * x_plus * x_plus + mu_0 * x_plus;
        dy[1] = mu_0 - 2.0 * mu_m * x_plus;
        dy[2] = mu_m * x_zero.exp();
    };
    let guard = |_t: f64, y: &[C64]| y[0].norm() <= RICCATI_GUARD && y[1].re.abs() <= 2.0 * EXP_ARG_LIMIT;
    let result = integrate_partial(rhs, &[C64::ZERO; 3], span, t_grid, &map_ode_settings(), guard);
    match result {
        Ok((traj, halt)) => {
            let points = traj.states.iter().map(|s| (s[0], s[1], s[2])).collect();
            let err = halt.map(|e| match e {
                OdeError::GuardTriggered { t } | OdeError::StepSizeUnderflow { t } => {
                    PropagatorError::RiccatiBlowup { t }
                }
                other => PropagatorError::Ode(other),
            });
            (points, err)
        }
        Err(e) => (Vec::new(), Some(PropagatorError::Ode(e))),
    }
}

fn check_grid(t_grid: &[f64]) -> Result<(), PropagatorError> {
    let ok = t_grid.first() == Some(&0.0) && t_grid.windows(2).all(|w| w[1] > w[0]);
    if ok {
        Ok(())
    } else {
        Err(PropagatorError::BadTimeGrid)
    }
}

/// Solve both disentangling families (j from ε, k from ν) over a grid that
/// starts at 0. Fails on the first Riccati pole; use
/// [`solve_riccati_partial`] to keep the prefix instead.
pub fn solve_riccati(params: &SystemParams, t_grid: &[f64]) -> Result<Vec<RiccatiState>, PropagatorError> {
    let (states, err) = solve_riccati_partial(params, t_grid)?;
    match err {
        None => Ok(states),
        Some(e) => Err(e),
    }
}

/// Like [`solve_riccati`], returning the states reached before a blow-up
/// together with the blow-up error.
pub fn solve_riccati_partial(
    params: &SystemParams,
    t_grid: &[f64],
) -> Result<(Vec<RiccatiState>, Option<PropagatorError>), PropagatorError> {
    check_grid(t_grid)?;
    let p = *params;
    let (j, j_err) = solve_su2(
        move |t| {
            let c = coefficient_set(t, &p);
            (c.eps_plus, c.eps0, c.eps_minus)
        },
        t_grid,
    );
    let (k, k_err) = solve_su2(
        move |t| {
            let c = coefficient_set(t, &p);
            (C64::new(c.nu_plus, 0.0), C64::new(c.nu0, 0.0), C64::new(c.nu_minus, 0.0))
        },
        t_grid,
    );
    if let Some(e @ PropagatorError::Ode(_)) = j_err {
        return Err(e);
    }
    if let Some(e @ PropagatorError::Ode(_)) = k_err {
        return Err(e);
    }
    let reached = j.len().min(k.len());
    let states = j
        .iter()
        .zip(&k)
        .take(reached)
        .map(|(&(jp, j0, jm), &(kp, k0, km))| RiccatiState {
            j_plus: jp,
            j_zero: j0,
            j_minus: jm,
            k_plus: kp,
            k_zero: k0,
            k_minus: km,
        })
        .collect();
    let err = match (j_err, k_err) {
        (None, None) => None,
        (Some(e), None) | (None, Some(e)) => Some(e),
        (Some(PropagatorError::RiccatiBlowup { t: tj }), Some(PropagatorError::RiccatiBlowup { t: tk })) => {
            Some(PropagatorError::RiccatiBlowup { t: tj.min(tk) })
        }
        (Some(e), Some(_)) => Some(e),
    };
    Ok((states, err))
}

/// Map coefficients from the disentangling variables:
/// l = e^{k₀/2} + e^{−k₀/2}k₊k₋, m = e^{−k₀/2}k₊, n = e^{−k₀/2},
/// p = e^{−k₀/2}k₋, and the same shapes with j for x, y, q, r.
pub fn map_coefficients(state: &RiccatiState, gamma_k: f64) -> Result<MapCoefficients, PropagatorError> {
    if state.k_zero.re.abs() > 2.0 * EXP_ARG_LIMIT || state.j_zero.re.abs() > 2.0 * EXP_ARG_LIMIT {
        return Err(PropagatorError::CoefficientOverflow { gamma: gamma_k });
    }
    debug_assert!(state.k_zero.im.abs() < 1e-10 && state.k_plus.im.abs() < 1e-10 && state.k_minus.im.abs() < 1e-10);
    let ek = (state.k_zero * 0.5).exp();
    let emk = (-state.k_zero * 0.5).exp();
    let ej = (state.j_zero * 0.5).exp();
    let emj = (-state.j_zero * 0.5).exp();
    Ok(MapCoefficients {
        l: (ek + emk * state.k_plus * state.k_minus).re,
        m: (emk * state.k_plus).re,
        n: emk.re,
        p: (emk * state.k_minus).re,
        q: emj,
        r: emj * state.j_minus,
        x: ej + emj * state.j_plus * state.j_minus,
        y: emj * state.j_plus,
        gamma_k,
    })
}

/// The generator acting on a vectorized 2×2 matrix (ρ¹¹, ρ¹⁰, ρ⁰¹, ρ⁰⁰):
/// the two populations form the ν sector, the two coherences the ε sector,
/// and the scalar term −g²(Re α + Re f) multiplies everything.
pub fn generator_apply(c: &CoefficientSet, v: &[C64; 4]) -> [C64; 4] {
    let s = c.scalar();
    [
        (s + 0.5 * c.nu0) * v[0] + c.nu_plus * v[3],
        (s + 0.0) * v[1] + 0.5 * c.eps0 * v[1] + c.eps_plus * v[2],
        (s + 0.0) * v[2] - 0.5 * c.eps0 * v[2] + c.eps_minus * v[1],
        (s - 0.5 * c.nu0) * v[3] + c.nu_minus * v[0],
    ]
}

/// Integrate the full physical map T(t) (columns = evolved images of the
/// basis matrices |i⟩⟨j|, identity at t = 0) over a grid starting at 0.
pub fn build_transfer_matrix(
    params: &SystemParams,
    t_grid: &[f64],
) -> Result<Vec<Matrix4<C64>>, PropagatorError> {
    check_grid(t_grid)?;
    let p = *params;
    // State layout: column-major 4×4, columns are images of ρ¹¹, ρ¹⁰, ρ⁰¹, ρ⁰⁰.
    let mut y0 = [C64::ZERO; 16];
    for c in 0..4 {
        y0[4 * c + c] = C64::ONE;
    }
    let rhs = move |t: f64, y: &[C64], dy: &mut [C64]| {
        let coeffs = coefficient_set(t, &p);
        for c in 0..4 {
            let col = [y[4 * c], y[4 * c + 1], y[4 * c + 2], y[4 * c + 3]];
            let out = generator_apply(&coeffs, &col);
            dy[4 * c..4 * c + 4].copy_from_slice(&out);
        }
    };
    let span = (0.0, *t_grid.last().unwrap());
    let (traj, halt) = integrate_partial(rhs, &y0, span, t_grid, &map_ode_settings(), |_, _| true)?;
    if let Some(e) = halt {
        return Err(PropagatorError::Ode(e));
    }
    Ok(traj
        .states
        .iter()
        .map(|s| Matrix4::from_fn(|r, c| s[4 * c + r]))
        .collect())
}

/// Recover the unscaled map coefficients from a physical transfer matrix by
/// dividing out e^{−Γ}.
pub fn map_from_transfer(tm: &Matrix4<C64>, gamma_k: f64) -> Result<MapCoefficients, PropagatorError> {
    if gamma_k > EXP_ARG_LIMIT {
        return Err(PropagatorError::CoefficientOverflow { gamma: gamma_k });
    }
    let eg = gamma_k.exp();
    Ok(MapCoefficients {
        l: (tm[(0, 0)] * eg).re,
        m: (tm[(0, 3)] * eg).re,
        n: (tm[(3, 3)] * eg).re,
        p: (tm[(3, 0)] * eg).re,
        x: tm[(1, 1)] * eg,
        y: tm[(1, 2)] * eg,
        r: tm[(2, 1)] * eg,
        q: tm[(2, 2)] * eg,
        gamma_k,
    })
}

/// Physical single-qubit map: e^{−Γ} ρ̃ with
/// ρ̃ = ( lρ¹¹+mρ⁰⁰ , xρ¹⁰+yρ⁰¹ ; qρ⁰¹+rρ¹⁰ , nρ⁰⁰+pρ¹¹ ).
pub fn propagate_single(rho0: &QubitState, coeffs: &MapCoefficients) -> QubitState {
    let d = (-coeffs.gamma_k).exp();
    let r11 = rho0.rho[(0, 0)];
    let r10 = rho0.rho[(0, 1)];
    let r01 = rho0.rho[(1, 0)];
    let r00 = rho0.rho[(1, 1)];
    QubitState {
        rho: Matrix2::new(
            d * (coeffs.l * r11 + coeffs.m * r00),
            d * (coeffs.x * r10 + coeffs.y * r01),
            d * (coeffs.q * r01 + coeffs.r * r10),
            d * (coeffs.n * r00 + coeffs.p * r11),
        ),
    }
}

/// Two-qubit map for identical subsystems: the tensor square of the
/// single-qubit map with overall weight e^{−2Γ}, evaluated on the X entries.
/// Population products couple the diagonal, coherence products the
/// antidiagonal; the X pattern is closed under the dynamics.
pub fn assemble_joint(rho0: &JointState, coeffs: &MapCoefficients) -> Result<JointState, PropagatorError> {
    let residual = rho0.x_residual();
    if residual > 1e-12 {
        return Err(PropagatorError::NotXStructured { residual });
    }
    // Physical (scaled) coefficients keep every product O(1) even when the
    // unscaled entries are ~e^{Γ}.
    let d = (-coeffs.gamma_k).exp();
    let l = C64::from(coeffs.l * d);
    let m = C64::from(coeffs.m * d);
    let n = C64::from(coeffs.n * d);
    let p = C64::from(coeffs.p * d);
    let q = coeffs.q * d;
    let r = coeffs.r * d;
    let x = coeffs.x * d;
    let y = coeffs.y * d;

    let g = &rho0.rho;
    let (d11, d22, d33, d44) = (g[(0, 0)], g[(1, 1)], g[(2, 2)], g[(3, 3)]);
    let (a14, a23, a32, a41) = (g[(0, 3)], g[(1, 2)], g[(2, 1)], g[(3, 0)]);

    let mut out = Matrix4::from_element(C64::ZERO);
    out[(0, 0)] = l * l * d11 + l * m * d22 + m * l * d33 + m * m * d44;
    out[(1, 1)] = l * p * d11 + l * n * d22 + m * p * d33 + m * n * d44;
    out[(2, 2)] = p * l * d11 + p * m * d22 + n * l * d33 + n * m * d44;
    out[(3, 3)] = p * p * d11 + p * n * d22 + n * p * d33 + n * n * d44;
    out[(0, 3)] = x * x * a14 + x * y * a23 + y * x * a32 + y * y * a41;
    out[(1, 2)] = x * r * a14 + x * q * a23 + y * r * a32 + y * q * a41;
    out[(2, 1)] = r * x * a14 + r * y * a23 + q * x * a32 + q * y * a41;
    out[(3, 0)] = r * r * a14 + r * q * a23 + q * r * a32 + q * q * a41;
    Ok(JointState { rho: out })
}
