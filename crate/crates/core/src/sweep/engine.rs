//! The five computational engines behind a sweep, each producing a
//! concurrence series with physicality residuals per grid point.
//!
//! Engines are prepared once per (parameters, grid) — the expensive,
//! β²-independent work — and then evaluated per initial state. Points after
//! a Riccati pole come back as failure records instead of aborting the run.

use crate::entanglement::{concurrence_general, concurrence_x, initial_state, InitialStateSpec};
use crate::kernels::{evaluate_kernels, SystemParams};
use crate::numerics::ode::OdeSettings;
use crate::oracles::jc::jc_joint_state;
use crate::oracles::rabi::{CouplingForm, RabiConfig, RabiEvolution};
use crate::oracles::tcl::tcl_direct_joint;
use crate::oracles::OracleError;
use crate::propagator::{
    assemble_joint, build_transfer_matrix, map_coefficients, map_from_transfer,
    solve_riccati_partial, JointState, MapCoefficients, PropagatorError,
};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    /// Algebraic map via the linear transfer-matrix route (default).
    TclAlgebraic,
    /// Algebraic map via the Riccati disentangling route.
    TclRiccati,
    /// Direct integration of the joint master equation.
    TclDirect,
    /// Full counter-rotating model on a truncated Fock space.
    Rabi,
    /// Closed-form rotating-wave reference.
    JcRwa,
}

impl Engine {
    pub const ALL: [Engine; 5] =
        [Engine::TclAlgebraic, Engine::TclRiccati, Engine::TclDirect, Engine::Rabi, Engine::JcRwa];

    pub fn label(&self) -> &'static str {
        match self {
            Engine::TclAlgebraic => "tcl_algebraic",
            Engine::TclRiccati => "tcl_riccati",
            Engine::TclDirect => "tcl_direct",
            Engine::Rabi => "rabi",
            Engine::JcRwa => "jc_rwa",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .iter()
            .find(|e| e.label() == s)
            .copied()
            .ok_or_else(|| {
                let valid: Vec<&str> = Engine::ALL.iter().map(|e| e.label()).collect();
                format!("unknown engine '{s}'; valid engines: {}", valid.join(", "))
            })
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("engine failed at gt = {gt}: {reason}")]
    PointFailure { gt: f64, reason: String },
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy)]
pub struct EnginePoint {
    pub gt: f64,
    pub concurrence: f64,
    pub trace_residual: f64,
    pub positivity_residual: f64,
    pub hermiticity_residual: f64,
}

/// Either a value or a per-point failure record; the sweep keeps going.
#[derive(Debug, Clone)]
pub enum PointOutcome {
    Point(EnginePoint),
    Failed { gt: f64, reason: String },
}

impl PointOutcome {
    pub fn point(&self) -> Option<&EnginePoint> {
        match self {
            PointOutcome::Point(p) => Some(p),
            PointOutcome::Failed { .. } => None,
        }
    }
}

fn measure(gt: f64, state: &JointState, concurrence: f64) -> EnginePoint {
    EnginePoint {
        gt,
        concurrence,
        trace_residual: state.trace_residual(),
        positivity_residual: state.positivity_residual(),
        hermiticity_residual: state.hermiticity_residual(),
    }
}

fn x_point(gt: f64, state: &JointState) -> PointOutcome {
    match concurrence_x(state) {
        Ok(c) => PointOutcome::Point(measure(gt, state, c)),
        Err(e) => PointOutcome::Failed { gt, reason: e.to_string() },
    }
}

fn general_point(gt: f64, state: &JointState) -> PointOutcome {
    match concurrence_general(state) {
        Ok(c) => PointOutcome::Point(measure(gt, state, c)),
        Err(e) => PointOutcome::Failed { gt, reason: e.to_string() },
    }
}

enum Backend {
    /// Map coefficients per grid index; points past `failed_from` carry the
    /// recorded failure reason.
    Map { coeffs: Vec<MapCoefficients>, failed_from: Option<(usize, String)> },
    Direct,
    Rabi(RabiEvolution),
    Jc,
}

/// An engine bound to parameters and a time grid, ready to evaluate initial
/// states.
pub struct PreparedEngine {
    engine: Engine,
    params: SystemParams,
    t_grid: Vec<f64>,
    backend: Backend,
}

impl PreparedEngine {
    pub fn prepare(
        engine: Engine,
        params: &SystemParams,
        t_grid: &[f64],
        n_cut: usize,
    ) -> Result<Self, EngineError> {
        let backend = match engine {
            Engine::TclAlgebraic => {
                let tms = build_transfer_matrix(params, t_grid)?;
                let coeffs = t_grid
                    .iter()
                    .zip(&tms)
                    .map(|(&t, tm)| map_from_transfer(tm, evaluate_kernels(t, params).gamma_k))
                    .collect::<Result<Vec<_>, _>>()?;
                Backend::Map { coeffs, failed_from: None }
            }
            Engine::TclRiccati => {
                let (states, err) = solve_riccati_partial(params, t_grid)?;
                let mut coeffs = Vec::with_capacity(states.len());
                let mut failed_from = err.map(|e| (states.len(), e.to_string()));
                for (idx, (t, st)) in t_grid.iter().zip(&states).enumerate() {
                    match map_coefficients(st, evaluate_kernels(*t, params).gamma_k) {
                        Ok(mc) => coeffs.push(symmetrize_coherence_sector(mc)),
                        Err(e) => {
                            failed_from = Some((idx, e.to_string()));
                            break;
                        }
                    }
                }
                Backend::Map { coeffs, failed_from }
            }
            Engine::TclDirect => Backend::Direct,
            Engine::Rabi => {
                let cfg = RabiConfig { n_cut, params: *params };
                Backend::Rabi(RabiEvolution::new(&cfg, CouplingForm::Full)?)
            }
            Engine::JcRwa => Backend::Jc,
        };
        Ok(Self { engine, params: *params, t_grid: t_grid.to_vec(), backend })
    }

    pub fn engine(&self) -> Engine {
        self.engine
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }

    /// Evaluate the whole grid for one initial state.
    pub fn series(&self, spec: &InitialStateSpec) -> Vec<PointOutcome> {
        match &self.backend {
            Backend::Map { coeffs, failed_from } => {
                let rho0 = initial_state(spec);
                let mut out: Vec<PointOutcome> = coeffs
                    .iter()
                    .zip(&self.t_grid)
                    .map(|(mc, &gt)| match assemble_joint(&rho0, mc) {
                        Ok(st) => x_point(gt, &st),
                        Err(e) => PointOutcome::Failed { gt, reason: e.to_string() },
                    })
                    .collect();
                if let Some((from, reason)) = failed_from {
                    for &gt in &self.t_grid[*from..] {
                        out.push(PointOutcome::Failed { gt, reason: reason.clone() });
                    }
                }
                out
            }
            Backend::Direct => {
                let rho0 = initial_state(spec);
                match tcl_direct_joint(&rho0, &self.params, &self.t_grid, &OdeSettings::default()) {
                    Ok(states) => self
                        .t_grid
                        .iter()
                        .zip(&states)
                        .map(|(&gt, st)| general_point(gt, st))
                        .collect(),
                    Err(e) => {
                        let reason = e.to_string();
                        self.t_grid
                            .iter()
                            .map(|&gt| PointOutcome::Failed { gt, reason: reason.clone() })
                            .collect()
                    }
                }
            }
            Backend::Rabi(evo) => self
                .t_grid
                .iter()
                .map(|&gt| general_point(gt, &evo.reduced_joint(spec, gt)))
                .collect(),
            Backend::Jc => self
                .t_grid
                .iter()
                .map(|&gt| x_point(gt, &jc_joint_state(spec, &self.params, gt)))
                .collect(),
        }
    }

    /// Concurrence series only, failing on the first bad point.
    pub fn concurrence_series(&self, spec: &InitialStateSpec) -> Result<Vec<f64>, EngineError> {
        self.series(spec)
            .into_iter()
            .map(|o| match o {
                PointOutcome::Point(p) => Ok(p.concurrence),
                PointOutcome::Failed { gt, reason } => Err(EngineError::PointFailure { gt, reason }),
            })
            .collect()
    }
}

/// The coherence sector of an exact map satisfies q = x̄ and r = ȳ; enforce
/// that symmetry on numerically integrated coefficients so Hermiticity of
/// propagated states is exact rather than tolerance-limited.
fn symmetrize_coherence_sector(mut mc: MapCoefficients) -> MapCoefficients {
    let x = 0.5 * (mc.x + mc.q.conj());
    let y = 0.5 * (mc.y + mc.r.conj());
    mc.x = x;
    mc.q = x.conj();
    mc.y = y;
    mc.r = y.conj();
    mc
}

/// Largest |ΔC| between two engines' outcomes on the same grid; failures on
/// either side are skipped.
pub fn max_concurrence_delta(a: &[PointOutcome], b: &[PointOutcome]) -> f64 {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| match (x.point(), y.point()) {
            (Some(p), Some(q)) => Some((p.concurrence - q.concurrence).abs()),
            _ => None,
        })
        .fold(0.0, f64::max)
}
