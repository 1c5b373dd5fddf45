//! Adaptive embedded Runge–Kutta integration (Dormand–Prince 5(4)) for
//! complex-valued state vectors, with continuous dense output used to sample
//! trajectories at arbitrary requested times.

use num_complex::Complex64 as C64;
use thiserror::Error;

/// Tolerances and step bounds for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct OdeSettings {
    /// Relative tolerance on the local error estimate.
    pub rel_tol: f64,
    /// Absolute tolerance on the local error estimate.
    pub abs_tol: f64,
    /// Upper bound on the step size.
    pub max_step: f64,
    /// Initial step size; `None` selects one automatically.
    pub initial_step: Option<f64>,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            initial_step: None,
        }
    }
}

impl OdeSettings {
    fn validate(&self) -> Result<(), OdeError> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || !(self.max_step > 0.0) {
            return Err(OdeError::InvalidSettings);
        }
        if let Some(h) = self.initial_step {
            if !(h > 0.0) {
                return Err(OdeError::InvalidSettings);
            }
        }
        Ok(())
    }
}

/// Solution sampled at the requested times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
}

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("tolerances and step bounds must be positive")]
    InvalidSettings,
    #[error("integration span must not run backwards")]
    InvalidSpan,
    #[error("sample times must be ascending and lie inside the span")]
    InvalidSamples,
    #[error("step size underflow at t = {t} (stiffness or singularity)")]
    StepSizeUnderflow { t: f64 },
    #[error("step limit exceeded at t = {t}")]
    StepLimitExceeded { t: f64 },
    #[error("non-finite derivative at t = {t}")]
    NonFiniteDerivative { t: f64 },
    #[error("guard condition triggered at t = {t}")]
    GuardTriggered { t: f64 },
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Weights of the quartic dense-output polynomial.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const MAX_STEPS: usize = 20_000_000;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Integrate `y' = rhs(t, y)` over `span`, returning the solution at the
/// requested `samples` (ascending, inside the span). Local error per step is
/// kept within `abs_tol + rel_tol·|y|`; sample values between accepted steps
/// come from the method's continuous extension.
pub fn integrate_adaptive<F>(
    mut rhs: F,
    y0: &[C64],
    span: (f64, f64),
    samples: &[f64],
    settings: &OdeSettings,
) -> Result<Trajectory, OdeError>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let (traj, halt) = integrate_core(&mut rhs, y0, span, samples, settings, None)?;
    match halt {
        None => Ok(traj),
        Some(err) => Err(err),
    }
}

/// Like [`integrate_adaptive`], aborting as soon as `guard` returns `false`
/// at an accepted step.
pub fn integrate_adaptive_guarded<F, G>(
    mut rhs: F,
    y0: &[C64],
    span: (f64, f64),
    samples: &[f64],
    settings: &OdeSettings,
    mut guard: G,
) -> Result<Trajectory, OdeError>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    G: FnMut(f64, &[C64]) -> bool,
{
    let (traj, halt) = integrate_core(&mut rhs, y0, span, samples, settings, Some(&mut guard))?;
    match halt {
        None => Ok(traj),
        Some(err) => Err(err),
    }
}

/// Like [`integrate_adaptive_guarded`], but on failure returns the samples
/// reached before the failure time together with the error, instead of
/// discarding them.
pub fn integrate_partial<F, G>(
    mut rhs: F,
    y0: &[C64],
    span: (f64, f64),
    samples: &[f64],
    settings: &OdeSettings,
    mut guard: G,
) -> Result<(Trajectory, Option<OdeError>), OdeError>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    G: FnMut(f64, &[C64]) -> bool,
{
    integrate_core(&mut rhs, y0, span, samples, settings, Some(&mut guard))
}

/// Outer `Err` is reserved for invalid inputs; integration failures come back
/// as the `Option<OdeError>` next to whatever samples were reached.
fn integrate_core(
    rhs: &mut dyn FnMut(f64, &[C64], &mut [C64]),
    y0: &[C64],
    span: (f64, f64),
    samples: &[f64],
    settings: &OdeSettings,
    mut guard: Option<&mut dyn FnMut(f64, &[C64]) -> bool>,
) -> Result<(Trajectory, Option<OdeError>), OdeError> {
    settings.validate()?;
    let (t0, t_end) = span;
    if !t0.is_finite() || !t_end.is_finite() || t_end < t0 {
        return Err(OdeError::InvalidSpan);
    }
    if samples.windows(2).any(|w| w[1] < w[0])
        || samples.iter().any(|&s| s < t0 || s > t_end)
    {
        return Err(OdeError::InvalidSamples);
    }

    let n = y0.len();
    let mut traj = Trajectory { times: Vec::with_capacity(samples.len()), states: Vec::with_capacity(samples.len()) };
    let mut next_sample = 0;
    while next_sample < samples.len() && samples[next_sample] <= t0 {
        traj.times.push(samples[next_sample]);
        traj.states.push(y0.to_vec());
        next_sample += 1;
    }
    if t_end == t0 || next_sample == samples.len() {
        return Ok((traj, None));
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<C64>> = (0..7).map(|_| vec![C64::ZERO; n]).collect();
    let mut y_stage = vec![C64::ZERO; n];
    let mut y_new = vec![C64::ZERO; n];

    let scratch = &mut k[0];
    rhs(t, &y, scratch);
    if scratch.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Ok((traj, Some(OdeError::NonFiniteDerivative { t })));
    }

    let mut h = match settings.initial_step {
        Some(h0) => h0.min(settings.max_step).min(t_end - t0),
        None => initial_step_guess(rhs, t0, &y, &k[0], settings, t_end - t0),
    };
    let mut facmax = FAC_MAX;

    for _step in 0..MAX_STEPS {
        let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if h < h_min {
            return Ok((traj, Some(OdeError::StepSizeUnderflow { t })));
        }
        let mut last = t + h >= t_end;
        if last {
            h = t_end - t;
            last = true;
        }

        // Stages 2..7; k[0] holds f(t, y) from FSAL or initialization.
        let mut bad_stage = false;
        for s in 0..6 {
            for i in 0..n {
                let mut acc = C64::ZERO;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                y_stage[i] = y[i] + h * acc;
            }
            let (head, tail) = k.split_at_mut(s + 1);
            let _ = head;
            rhs(t + C[s] * h, &y_stage, &mut tail[0]);
            if tail[0].iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                bad_stage = true;
                break;
            }
        }
        if bad_stage {
            // Retry with a smaller step; a persistently non-finite field
            // will end in step-size underflow carrying the failure time.
            h *= 0.5;
            facmax = 1.0;
            continue;
        }
        // 5th-order solution is the last stage's argument (FSAL property):
        // y_new = y + h * sum(A[5][j] k_j) which equals the final y_stage.
        y_new.copy_from_slice(&y_stage);

        // Embedded error estimate.
        let mut err_sq = 0.0;
        for i in 0..n {
            let mut e = C64::ZERO;
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    e += E[j] * kj[i];
                }
            }
            let sc = settings.abs_tol + settings.rel_tol * y[i].norm().max(y_new[i].norm());
            let r = (h * e).norm() / sc;
            err_sq += r * r;
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            let t_new = t + h;
            // Dense output over (t, t_new]: quartic contd5 polynomial.
            if next_sample < samples.len() && samples[next_sample] <= t_new {
                let ydiff: Vec<C64> = (0..n).map(|i| y_new[i] - y[i]).collect();
                let bspl: Vec<C64> = (0..n).map(|i| h * k[0][i] - ydiff[i]).collect();
                while next_sample < samples.len() && samples[next_sample] <= t_new {
                    let theta = (samples[next_sample] - t) / h;
                    let theta1 = 1.0 - theta;
                    let state: Vec<C64> = (0..n)
                        .map(|i| {
                            let mut cont5 = C64::ZERO;
                            for (j, kj) in k.iter().enumerate() {
                                if D[j] != 0.0 {
                                    cont5 += D[j] * kj[i];
                                }
                            }
                            cont5 *= h;
                            let cont4 = ydiff[i] - h * k[6][i] - bspl[i] + theta1 * cont5;
                            y[i] + theta * (ydiff[i] + theta1 * (bspl[i] + theta * cont4))
                        })
                        .collect();
                    traj.times.push(samples[next_sample]);
                    traj.states.push(state);
                    next_sample += 1;
                }
            }

            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6); // FSAL: f(t_new, y_new) becomes the first stage.

            if let Some(g) = guard.as_mut() {
                if !g(t, &y) {
                    return Ok((traj, Some(OdeError::GuardTriggered { t })));
                }
            }
            if last || next_sample >= samples.len() {
                return Ok((traj, None));
            }
            let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, facmax);
            h = (h * fac).min(settings.max_step);
            facmax = FAC_MAX;
        } else {
            let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
            h *= fac;
            facmax = 1.0;
        }
    }
    Ok((traj, Some(OdeError::StepLimitExceeded { t })))
}

/// Step-size guess following the standard starting procedure: compare the
/// scaled sizes of the state and its derivative, then refine with one
/// explicit Euler probe.
fn initial_step_guess(
    rhs: &mut dyn FnMut(f64, &[C64], &mut [C64]),
    t0: f64,
    y0: &[C64],
    f0: &[C64],
    settings: &OdeSettings,
    span_len: f64,
) -> f64 {
    let n = y0.len();
    let sc: Vec<f64> = y0
        .iter()
        .map(|v| settings.abs_tol + settings.rel_tol * v.norm())
        .collect();
    let d0 = rms(y0.iter().zip(&sc).map(|(v, s)| v.norm() / s), n);
    let d1 = rms(f0.iter().zip(&sc).map(|(v, s)| v.norm() / s), n);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span_len);

    let y1: Vec<C64> = (0..n).map(|i| y0[i] + h0 * f0[i]).collect();
    let mut f1 = vec![C64::ZERO; n];
    rhs(t0 + h0, &y1, &mut f1);
    let d2 = rms(
        f1.iter().zip(f0).zip(&sc).map(|((a, b), s)| (a - b).norm() / s),
        n,
    ) / h0;

    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span_len).min(settings.max_step)
}

fn rms(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    (values.map(|v| v * v).sum::<f64>() / n as f64).sqrt()
}
