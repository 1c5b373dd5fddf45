//! Time-dependent kernel functions of the vacuum-cavity master equation and
//! the coefficient set of its time-local generator.
//!
//! With Δ = ω + ω₀ (counter-rotating frequency) and δ = ω₀ − ω (detuning),
//! the kernels are
//!
//!   α(t)  = (1 − e^{−iΔt}) / (iΔ)            α̃(t) = ∫₀ᵗ α ds
//!   f(t)  = (e^{iδt} − 1) / (iδ)             F(t) = ∫₀ᵗ f ds
//!   Γ(t)  = g² (Re α̃ + Re F)
//!
//! The resonant limit δ → 0 (f → t, F → t²/2) is handled by series
//! expansions, switched on for |δ·t| below a small threshold so that the two
//! branches agree to well under 1e−10 at the seam.

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Frequencies are stated in units of the coupling g, which sets 1/time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Atomic transition frequency ω₀.
    pub omega0: f64,
    /// Cavity mode frequency ω.
    pub omega: f64,
    /// Atom–field coupling constant g.
    pub g: f64,
    /// Sum frequency Δ = ω + ω₀.
    pub sum_freq: f64,
    /// Detuning δ = ω₀ − ω.
    pub detuning: f64,
}

#[derive(Debug, Error)]
pub enum ParamError {
    #[error("{name} must be positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },
}

impl SystemParams {
    pub fn new(omega0: f64, omega: f64, g: f64) -> Result<Self, ParamError> {
        for (name, value) in [("omega0", omega0), ("omega", omega), ("g", g)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ParamError::NotPositive { name, value });
            }
        }
        Ok(Self { omega0, omega, g, sum_freq: omega + omega0, detuning: omega0 - omega })
    }

    /// Resonant system (ω = ω₀) with unit coupling.
    pub fn resonant(omega0: f64) -> Result<Self, ParamError> {
        Self::new(omega0, omega0, 1.0)
    }

    /// Detuned system (ω = ω₀ − δ) with unit coupling.
    pub fn detuned(omega0: f64, delta: f64) -> Result<Self, ParamError> {
        Self::new(omega0, omega0 - delta, 1.0)
    }
}

/// Kernel values at one time point. All fields vanish at t = 0, and
/// `gamma_k` ≥ 0 for t ≥ 0.
#[derive(Debug, Clone, Copy)]
pub struct KernelValues {
    pub alpha: C64,
    pub f: C64,
    pub alpha_tilde: C64,
    pub f_int: C64,
    pub gamma_k: f64,
}

/// Generator coefficients at one time point: ε drive the coherence sector,
/// ν the population sector. ε₋ is constructed as the exact conjugate of ε₊,
/// and the ν are real, so downstream propagation preserves Hermiticity to
/// rounding.
#[derive(Debug, Clone, Copy)]
pub struct CoefficientSet {
    pub eps0: C64,
    pub eps_plus: C64,
    pub eps_minus: C64,
    pub nu0: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
}

impl CoefficientSet {
    /// Scalar generator term −g²(Re α + Re f); also −dΓ/dt.
    pub fn scalar(&self) -> f64 {
        -0.5 * (self.nu_plus + self.nu_minus)
    }
}

const SERIES_THRESHOLD: f64 = 1e-4;

/// 1 − cos x, computed as 2 sin²(x/2) to avoid cancellation.
fn one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    2.0 * s * s
}

/// sin(x)/x.
fn sinc(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// (1 − cos x)/x.
fn cosm1_over(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        0.5 * x * (1.0 - x2 / 12.0 + x2 * x2 / 360.0)
    } else {
        one_minus_cos(x) / x
    }
}

/// (1 − cos x)/x².
fn cosm1_over2(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        0.5 * (1.0 - x2 / 12.0 + x2 * x2 / 360.0)
    } else {
        one_minus_cos(x) / (x * x)
    }
}

/// (x − sin x)/x².
fn xmsin_over2(x: f64) -> f64 {
    if x.abs() < SERIES_THRESHOLD {
        let x2 = x * x;
        x / 6.0 * (1.0 - x2 / 20.0 + x2 * x2 / 840.0)
    } else {
        (x - x.sin()) / (x * x)
    }
}

/// Evaluate α, f, their running integrals α̃, F, and Γ at time `t`.
pub fn evaluate_kernels(t: f64, params: &SystemParams) -> KernelValues {
    let big = params.sum_freq;
    let xb = big * t;
    let alpha = C64::new(xb.sin() / big, -one_minus_cos(xb) / big);
    let alpha_tilde = C64::new(one_minus_cos(xb) / (big * big), -t * t * xmsin_over2(xb));

    let xd = params.detuning * t;
    let f = C64::new(t * sinc(xd), t * cosm1_over(xd));
    let f_int = C64::new(t * t * cosm1_over2(xd), t * t * xmsin_over2(xd));

    let g2 = params.g * params.g;
    let gamma_k = g2 * (alpha_tilde.re + f_int.re);
    KernelValues { alpha, f, alpha_tilde, f_int, gamma_k }
}

/// Generator coefficients at time `t`:
/// ε₀ = −2i(ω₀ − g² Im α + g² Im f), ε± = g²(α + f*) and its conjugate,
/// ν₀ = 2g²(Re α − Re f), ν₊ = 2g² Re α, ν₋ = 2g² Re f.
pub fn coefficient_set(t: f64, params: &SystemParams) -> CoefficientSet {
    let k = evaluate_kernels(t, params);
    let g2 = params.g * params.g;
    let eps_plus = g2 * (k.alpha + k.f.conj());
    CoefficientSet {
        eps0: C64::new(0.0, -2.0 * (params.omega0 - g2 * k.alpha.im + g2 * k.f.im)),
        eps_plus,
        eps_minus: eps_plus.conj(),
        nu0: 2.0 * g2 * (k.alpha.re - k.f.re),
        nu_plus: 2.0 * g2 * k.alpha.re,
        nu_minus: 2.0 * g2 * k.f.re,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn unit_resonant() -> SystemParams {
        SystemParams::resonant(1.0).unwrap()
    }

    #[test]
    fn params_derived_frequencies() {
        let p = SystemParams::new(1.5, 0.9, 1.0).unwrap();
        assert_eq!(p.sum_freq, 2.4);
        assert_abs_diff_eq!(p.detuning, 0.6, epsilon = 1e-15);
        assert!(SystemParams::new(0.0, 1.0, 1.0).is_err());
        assert!(SystemParams::new(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn kernels_vanish_at_origin() {
        for p in [unit_resonant(), SystemParams::detuned(10.0, 1.0).unwrap()] {
            let k = evaluate_kernels(0.0, &p);
            assert_eq!(k.alpha, C64::ZERO);
            assert_eq!(k.f, C64::ZERO);
            assert_eq!(k.alpha_tilde, C64::ZERO);
            assert_eq!(k.f_int, C64::ZERO);
            assert_eq!(k.gamma_k, 0.0);
        }
    }

    #[test]
    fn resonant_limit_is_linear_and_quadratic() {
        let k = evaluate_kernels(2.0, &unit_resonant());
        assert_abs_diff_eq!(k.f.re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k.f.im, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k.f_int.re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k.f_int.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn closed_forms_at_quarter_period() {
        // Δ = 2, δ = 0, t = π/2.
        let k = evaluate_kernels(PI / 2.0, &unit_resonant());
        assert_abs_diff_eq!(k.alpha.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.alpha.im, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.alpha_tilde.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(k.alpha_tilde.im, -PI / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.f.re, PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(k.f_int.re, PI * PI / 8.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k.gamma_k, 0.5 + PI * PI / 8.0, epsilon = 1e-14);
    }

    #[test]
    fn coefficients_at_origin() {
        let p = SystemParams::detuned(3.0, 0.2).unwrap();
        let c = coefficient_set(0.0, &p);
        assert_eq!(c.eps_plus, C64::ZERO);
        assert_eq!(c.eps_minus, C64::ZERO);
        assert_eq!(c.nu0, 0.0);
        assert_eq!(c.nu_plus, 0.0);
        assert_eq!(c.nu_minus, 0.0);
        assert_eq!(c.eps0, C64::new(0.0, -6.0));
    }

    #[test]
    fn coefficients_at_quarter_period() {
        // Δ = 2, δ = 0, t = π/2: Re α = sin(π)/2 = 0, Re f = π/2.
        let c = coefficient_set(PI / 2.0, &unit_resonant());
        assert_abs_diff_eq!(c.nu_plus, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.nu_minus, PI, epsilon = 1e-14);
        assert_abs_diff_eq!(c.nu0, -PI, epsilon = 1e-14);
    }

    #[test]
    fn branch_seam_is_continuous() {
        // Evaluate just above and just below |δt| = 1e−4 at fixed t.
        let t = 10.0;
        for sign in [1.0, -1.0] {
            let d_lo = sign * (SERIES_THRESHOLD / t) * (1.0 - 1e-9);
            let d_hi = sign * (SERIES_THRESHOLD / t) * (1.0 + 1e-9);
            let lo = evaluate_kernels(t, &SystemParams::detuned(10.0, d_lo).unwrap());
            let hi = evaluate_kernels(t, &SystemParams::detuned(10.0, d_hi).unwrap());
            assert!((lo.f - hi.f).norm() < 1e-10);
            assert!((lo.f_int - hi.f_int).norm() < 1e-10);
            assert!((lo.gamma_k - hi.gamma_k).abs() < 1e-10);
        }
    }

    /// Adaptive Simpson quadrature, used as the independent check on the
    /// closed-form running integrals.
    fn simpson<F: Fn(f64) -> C64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> C64 {
        fn recurse<F: Fn(f64) -> C64 + Copy>(
            f: F,
            a: f64,
            b: f64,
            fa: C64,
            fm: C64,
            fb: C64,
            whole: C64,
            tol: f64,
            depth: u32,
        ) -> C64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            let delta = left + right - whole;
            if depth == 0 || delta.norm() < 15.0 * tol {
                left + right + delta / 15.0
            } else {
                recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                    + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
            }
        }
        let fa = f(a);
        let fb = f(b);
        let fm = f(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        recurse(f, a, b, fa, fm, fb, whole, tol, 40)
    }

    #[test]
    fn running_integrals_match_quadrature() {
        for p in [
            unit_resonant(),
            SystemParams::resonant(30.0).unwrap(),
            SystemParams::detuned(10.0, 1.0).unwrap(),
        ] {
            for t in [0.7, 5.3, 12.9, 25.0] {
                let k = evaluate_kernels(t, &p);
                let at = simpson(|s| evaluate_kernels(s, &p).alpha, 0.0, t, 1e-12);
                let ft = simpson(|s| evaluate_kernels(s, &p).f, 0.0, t, 1e-12);
                assert!((k.alpha_tilde - at).norm() < 1e-9, "alpha_tilde at t={t}");
                assert!((k.f_int - ft).norm() < 1e-9, "f_int at t={t}");
            }
        }
    }

    #[test]
    fn gamma_rate_matches_central_difference() {
        let p = SystemParams::detuned(10.0, 1.0).unwrap();
        let h = 1e-6;
        for t in [0.5, 2.0, 7.7, 20.0] {
            let c = coefficient_set(t, &p);
            let rate = -c.scalar();
            let dgamma = (evaluate_kernels(t + h, &p).gamma_k - evaluate_kernels(t - h, &p).gamma_k) / (2.0 * h);
            assert!((rate - dgamma).abs() < 1e-6, "t={t}: {rate} vs {dgamma}");
        }
    }

    proptest! {
        #[test]
        fn gamma_nonnegative_and_eps_conjugate(
            omega0 in 0.1f64..50.0,
            ratio in 0.02f64..2.0,
            t in 0.0f64..25.0,
        ) {
            let p = SystemParams::new(omega0, omega0 * ratio, 1.0).unwrap();
            let k = evaluate_kernels(t, &p);
            prop_assert!(k.gamma_k >= 0.0);
            let c = coefficient_set(t, &p);
            prop_assert_eq!(c.eps_plus.conj(), c.eps_minus);
            prop_assert_eq!(c.eps0.re, 0.0);
        }
    }
}
