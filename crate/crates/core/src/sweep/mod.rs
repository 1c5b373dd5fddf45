//! Parameter sweeps over (β², gt) grids: engine dispatch, CSV datasets,
//! per-β² feature summaries, and figure reproduction.
//!
//! Grid points are independent, so β² rows are evaluated in parallel when
//! the `parallel` feature is enabled (the default); records are always
//! emitted in grid order, so a given configuration produces a byte-identical
//! dataset either way. `ESD_THREADS` caps the worker count.

pub mod config;
pub mod engine;
pub mod revival;

pub use config::{ConfigError, ScenarioConfig};
pub use engine::{Engine, EngineError, EnginePoint, PointOutcome, PreparedEngine};
pub use revival::{analyze_series, Revival, SeriesAnalysis};

use std::fmt::Write as _;

use thiserror::Error;

use crate::entanglement::{EntanglementError, InitialStateSpec};
use crate::oracles::figures::{figure_scenario, FigureId};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    State(#[from] EntanglementError),
}

/// How to distribute β² rows across workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    #[cfg(feature = "parallel")]
    Rayon,
}

impl Parallelism {
    /// Rayon when compiled in, otherwise sequential.
    pub fn auto() -> Self {
        #[cfg(feature = "parallel")]
        {
            Parallelism::Rayon
        }
        #[cfg(not(feature = "parallel"))]
        {
            Parallelism::Sequential
        }
    }
}

/// Evaluate one prepared engine for every initial state, in grid order.
pub fn grid_series(
    prepared: &PreparedEngine,
    specs: &[InitialStateSpec],
    parallelism: Parallelism,
) -> Vec<Vec<PointOutcome>> {
    match parallelism {
        Parallelism::Sequential => specs.iter().map(|s| prepared.series(s)).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => {
            use rayon::prelude::*;
            specs.par_iter().map(|s| prepared.series(s)).collect()
        }
    }
}

/// Worker cap from `ESD_THREADS`, when set to a positive integer.
pub fn thread_cap_from_env() -> Option<usize> {
    std::env::var("ESD_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

#[cfg(feature = "parallel")]
fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let pool = thread_cap_from_env()
        .and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok());
    match pool {
        Some(pool) => pool.install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_thread_cap<T>(f: impl FnOnce() -> T) -> T {
    f()
}

/// Per-β² features of one engine's sweep.
#[derive(Debug, Clone)]
pub struct BetaSummary {
    pub beta_sq: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub first_zero: Option<f64>,
    pub revival_count: usize,
    pub failed_points: usize,
}

#[derive(Debug, Clone, Default)]
pub struct Summary {
    pub per_beta: Vec<BetaSummary>,
    pub max_trace_residual: f64,
    pub max_positivity_residual: f64,
    pub failed_points: usize,
    /// Largest |ΔC| between the two engines of a cross-check run.
    pub max_cross_delta: Option<f64>,
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "beta_sq    c_min          c_max          first_zero  revivals")?;
        for b in &self.per_beta {
            let fz = b
                .first_zero
                .map(|t| format!("{t:.4}"))
                .unwrap_or_else(|| "-".to_string());
            writeln!(
                f,
                "{:<10.4} {:<14.6e} {:<14.6e} {:<11} {}",
                b.beta_sq, b.c_min, b.c_max, fz, b.revival_count
            )?;
        }
        writeln!(f, "max trace residual:      {:.3e}", self.max_trace_residual)?;
        writeln!(f, "max positivity residual: {:.3e}", self.max_positivity_residual)?;
        if self.failed_points > 0 {
            writeln!(f, "failed points:           {}", self.failed_points)?;
        }
        if let Some(d) = self.max_cross_delta {
            writeln!(f, "max cross-engine |dC|:   {:.3e}", d)?;
        }
        Ok(())
    }
}

/// A completed run: the CSV dataset and its summary.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub csv: String,
    pub summary: Summary,
}

pub const CSV_HEADER: &str = "engine,state,beta_sq,gt,concurrence,trace_residual,positivity_residual";

/// 12 significant digits, the dataset-wide float format.
fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

fn push_record(csv: &mut String, engine: Engine, kind: crate::StateKind, beta_sq: f64, o: &PointOutcome) {
    match o {
        PointOutcome::Point(p) => {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                engine.label(),
                kind.label(),
                sig(beta_sq),
                sig(p.gt),
                sig(p.concurrence),
                sig(p.trace_residual),
                sig(p.positivity_residual),
            );
        }
        PointOutcome::Failed { gt, .. } => {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                engine.label(),
                kind.label(),
                sig(beta_sq),
                sig(*gt),
                sig(f64::NAN),
                sig(f64::NAN),
                sig(f64::NAN),
            );
        }
    }
}

fn summarize(
    beta_grid: &[f64],
    rows: &[Vec<PointOutcome>],
    t_grid: &[f64],
    zero_threshold: f64,
    revival_threshold: f64,
) -> Summary {
    let mut summary = Summary::default();
    for (beta_sq, row) in beta_grid.iter().zip(rows) {
        let mut times = Vec::with_capacity(t_grid.len());
        let mut values = Vec::with_capacity(t_grid.len());
        let mut c_min = f64::INFINITY;
        let mut c_max = f64::NEG_INFINITY;
        let mut failed = 0;
        for o in row {
            match o {
                PointOutcome::Point(p) => {
                    times.push(p.gt);
                    values.push(p.concurrence);
                    c_min = c_min.min(p.concurrence);
                    c_max = c_max.max(p.concurrence);
                    summary.max_trace_residual = summary.max_trace_residual.max(p.trace_residual);
                    summary.max_positivity_residual =
                        summary.max_positivity_residual.max(p.positivity_residual);
                }
                PointOutcome::Failed { .. } => failed += 1,
            }
        }
        let analysis = analyze_series(&times, &values, zero_threshold, revival_threshold);
        summary.failed_points += failed;
        summary.per_beta.push(BetaSummary {
            beta_sq: *beta_sq,
            c_min: if c_min.is_finite() { c_min } else { f64::NAN },
            c_max: if c_max.is_finite() { c_max } else { f64::NAN },
            first_zero: analysis.first_zero,
            revival_count: analysis.revivals.len(),
            failed_points: failed,
        });
    }
    summary
}

fn specs_for(config: &ScenarioConfig) -> Result<Vec<InitialStateSpec>, SweepError> {
    Ok(config
        .beta_sq
        .iter()
        .map(|&b| InitialStateSpec::from_beta_sq(config.kind, b, config.phase))
        .collect::<Result<Vec<_>, _>>()?)
}

/// Run one scenario: every (β², gt) grid point through the configured
/// engine, returning the CSV dataset and summary. With `cross-check` set,
/// both engines run and the dataset is the joined comparison.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunOutput, SweepError> {
    config.validate()?;
    let params = config.params()?;
    let t_grid = config.gt_grid();
    let specs = specs_for(config)?;

    with_thread_cap(|| {
        let prepared = PreparedEngine::prepare(config.engine, &params, &t_grid, config.n_cut)?;
        let rows = grid_series(&prepared, &specs, Parallelism::auto());

        match config.cross_check {
            None => {
                let mut csv = String::with_capacity(64 * (1 + specs.len() * t_grid.len()));
                csv.push_str(CSV_HEADER);
                csv.push('\n');
                for (spec, row) in specs.iter().zip(&rows) {
                    let beta_sq = spec.beta * spec.beta;
                    for o in row {
                        push_record(&mut csv, config.engine, config.kind, beta_sq, o);
                    }
                }
                let summary = summarize(
                    &config.beta_sq,
                    &rows,
                    &t_grid,
                    config.zero_threshold,
                    config.revival_threshold,
                );
                Ok(RunOutput { csv, summary })
            }
            Some(other) => {
                let second = PreparedEngine::prepare(other, &params, &t_grid, config.n_cut)?;
                let rows_b = grid_series(&second, &specs, Parallelism::auto());
                let mut csv = String::new();
                let _ = writeln!(
                    csv,
                    "engine_a,engine_b,state,beta_sq,gt,concurrence_a,concurrence_b,abs_delta"
                );
                let mut max_delta: f64 = 0.0;
                for ((spec, row_a), row_b) in specs.iter().zip(&rows).zip(&rows_b) {
                    let beta_sq = spec.beta * spec.beta;
                    for (a, b) in row_a.iter().zip(row_b) {
                        let gt = match a {
                            PointOutcome::Point(p) => p.gt,
                            PointOutcome::Failed { gt, .. } => *gt,
                        };
                        let ca = a.point().map(|p| p.concurrence).unwrap_or(f64::NAN);
                        let cb = b.point().map(|p| p.concurrence).unwrap_or(f64::NAN);
                        let delta = (ca - cb).abs();
                        if delta.is_finite() {
                            max_delta = max_delta.max(delta);
                        }
                        let _ = writeln!(
                            csv,
                            "{},{},{},{},{},{},{},{}",
                            config.engine.label(),
                            other.label(),
                            config.kind.label(),
                            sig(beta_sq),
                            sig(gt),
                            sig(ca),
                            sig(cb),
                            sig(delta),
                        );
                    }
                }
                let mut summary = summarize(
                    &config.beta_sq,
                    &rows,
                    &t_grid,
                    config.zero_threshold,
                    config.revival_threshold,
                );
                summary.max_cross_delta = Some(max_delta);
                Ok(RunOutput { csv, summary })
            }
        }
    })
}

/// Reproduce one published surface: the figure's canonical parameters on its
/// β² × gt grid, with provenance notes as leading comment lines.
pub fn reproduce_figure(id: FigureId) -> Result<RunOutput, SweepError> {
    let scenario = figure_scenario(id);
    let mut config = ScenarioConfig {
        kind: scenario.kind,
        beta_sq: scenario.beta_sq_grid.clone(),
        engine: scenario.engine,
        omega0: scenario.params.omega0,
        delta: scenario.params.detuning,
        ..ScenarioConfig::default()
    };
    config.gt_max = *scenario.gt_grid.last().unwrap();
    config.gt_step = scenario.gt_grid[1] - scenario.gt_grid[0];

    let mut header = String::new();
    let _ = writeln!(header, "# figure: {}", id.name());
    let _ = writeln!(header, "# engine: {}", scenario.engine.label());
    let _ = writeln!(header, "# state: {}", scenario.kind.label());
    let _ = writeln!(header, "# omega0: {}", scenario.params.omega0);
    let _ = writeln!(header, "# delta: {}", scenario.params.detuning);
    for note in &scenario.notes {
        let _ = writeln!(header, "# note: {note}");
    }

    let mut output = run_scenario(&config)?;
    output.csv = header + &output.csv;
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ScenarioConfig {
        ScenarioConfig {
            beta_sq: vec![0.2, 0.5, 0.8],
            omega0: 5.0,
            engine: Engine::JcRwa,
            gt_max: 1.0,
            gt_step: 0.01,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn record_count_matches_grid_cardinality() {
        let out = run_scenario(&tiny_config()).unwrap();
        let lines: Vec<&str> = out.csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        // 3 beta values x 101 samples.
        assert_eq!(lines.len(), 1 + 3 * 101);
        assert_eq!(out.summary.per_beta.len(), 3);
    }

    #[test]
    fn jc_rwa_dataset_matches_closed_form() {
        let mut cfg = tiny_config();
        cfg.beta_sq = vec![0.5];
        cfg.gt_max = std::f64::consts::PI;
        cfg.gt_step = std::f64::consts::PI / 100.0;
        let out = run_scenario(&cfg).unwrap();
        for line in out.csv.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let gt: f64 = cols[3].parse().unwrap();
            let c: f64 = cols[4].parse().unwrap();
            let expect = 2.0 * 0.5 * gt.cos().powi(2);
            assert!((c - expect).abs() < 1e-10, "gt={gt}: {c} vs {expect}");
        }
    }

    #[test]
    fn datasets_are_deterministic() {
        let a = run_scenario(&tiny_config()).unwrap();
        let b = run_scenario(&tiny_config()).unwrap();
        assert_eq!(a.csv, b.csv);
    }

    #[test]
    fn sequential_and_parallel_agree_byte_for_byte() {
        let cfg = tiny_config();
        let params = cfg.params().unwrap();
        let grid = cfg.gt_grid();
        let specs = specs_for(&cfg).unwrap();
        let prepared = PreparedEngine::prepare(cfg.engine, &params, &grid, cfg.n_cut).unwrap();
        let seq = grid_series(&prepared, &specs, Parallelism::Sequential);
        let auto = grid_series(&prepared, &specs, Parallelism::auto());
        for (a, b) in seq.iter().flatten().zip(auto.iter().flatten()) {
            match (a, b) {
                (PointOutcome::Point(p), PointOutcome::Point(q)) => {
                    assert_eq!(p.concurrence.to_bits(), q.concurrence.to_bits());
                }
                _ => panic!("unexpected failure records"),
            }
        }
    }

    #[test]
    fn cross_check_reports_max_delta() {
        let mut cfg = tiny_config();
        cfg.beta_sq = vec![0.4];
        cfg.engine = Engine::TclAlgebraic;
        cfg.cross_check = Some(Engine::TclDirect);
        cfg.omega0 = 1.5;
        cfg.gt_max = 5.0;
        cfg.gt_step = 0.05;
        let out = run_scenario(&cfg).unwrap();
        let delta = out.summary.max_cross_delta.unwrap();
        assert!(delta < 1e-6, "cross-engine delta {delta:.3e}");
        assert!(out.csv.lines().next().unwrap().contains("concurrence_a"));
    }

    #[test]
    fn figure_dataset_has_metadata() {
        let out = reproduce_figure(FigureId::Fig4a).unwrap();
        assert!(out.csv.starts_with("# figure: fig4a"));
        assert!(out.csv.contains("# note:"));
        assert!(out.csv.contains(CSV_HEADER));
    }
}
