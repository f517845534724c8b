//! Closed form against numerical roof for the symmetric family `ρ_F`.

use serde::Serialize;
use subent_core::{
    minimize_objective, perm_symmetric_state, s_of_f, symmetric_closed_form, OptimizationResult,
    OptimizerConfig, Result, SubalgebraSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Closed,
    Numeric,
    Both,
}

impl Method {
    pub fn closed(self) -> bool {
        self != Method::Numeric
    }

    pub fn numeric(self) -> bool {
        self != Method::Closed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "E_closed")]
    pub e_closed: Option<f64>,
    #[serde(rename = "E_numeric")]
    pub e_numeric: Option<f64>,
    pub theta_stars: Vec<f64>,
    /// `E_numeric − E_closed` when both are present.
    pub gap: Option<f64>,
}

/// `steps` evenly spaced fidelities from `lo` to `hi` inclusive; a single
/// step gives just `lo`.
pub fn fidelity_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![lo];
    }
    let h = (hi - lo) / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                hi
            } else {
                lo + h * i as f64
            }
        })
        .collect()
}

/// Numerical roof of `ρ_F` over the diagonal subalgebra.
pub fn symmetric_numeric(d: usize, f: f64, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    minimize_objective(&perm_symmetric_state(d, f)?, SubalgebraSpec::Diagonal, cfg)
}

pub fn scan_row(d: usize, f: f64, method: Method, cfg: &OptimizerConfig) -> Result<ScanRow> {
    let e_closed = if method.closed() {
        symmetric_closed_form(d, f)?
    } else {
        None
    };
    let e_numeric = if method.numeric() {
        Some(symmetric_numeric(d, f, cfg)?.value)
    } else {
        None
    };
    let theta_stars = if d == 3 { s_of_f(f)?.1 } else { Vec::new() };
    let gap = e_closed.zip(e_numeric).map(|(c, n)| n - c);
    Ok(ScanRow {
        f,
        e_closed,
        e_numeric,
        theta_stars,
        gap,
    })
}

pub fn scan(
    d: usize,
    lo: f64,
    hi: f64,
    steps: usize,
    method: Method,
    cfg: &OptimizerConfig,
) -> Result<Vec<ScanRow>> {
    fidelity_grid(lo, hi, steps)
        .into_iter()
        .map(|f| scan_row(d, f, method, cfg))
        .collect()
}
