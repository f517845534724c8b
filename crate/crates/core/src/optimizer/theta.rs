//! One-angle scan over cyclic-orbit decompositions of the symmetric qutrit
//! state `ρ_F`: `S(F) = min_θ Σ_k s(|w_k(F; θ)|²)`.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::golden_section;
use crate::error::{Error, Result};
use crate::qstate::neg_xlnx;
use crate::symmetric::orbit_components;

/// Grid used by [`s_of_f`].
pub const S_OF_F_GRID: usize = 720;
const MIN_GRID: usize = 16;
const REFINE_TOL: f64 = 1e-10;
const MERGE_TOL: f64 = 1e-6;
const FLAT_TOL: f64 = 1e-13;
/// Minima within this of the lowest one count as global.
const GLOBAL_TOL: f64 = 1e-10;
/// The profile is invariant under `θ → θ + 2π/3`.
const ORBIT_PERIOD: f64 = TAU / 3.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaProfile {
    pub f: f64,
    /// Uniform grid on `[0, 2π)`.
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Refined local minima `(θ*, value)` with `θ*` in `[0, 2π)`, sorted by angle.
    pub minima: Vec<(f64, f64)>,
}

impl ThetaProfile {
    pub fn min_value(&self) -> f64 {
        self.minima
            .iter()
            .map(|m| m.1)
            .fold(f64::INFINITY, f64::min)
    }

    /// Global minima reduced modulo `2π/3`, sorted by angle and merged.
    pub fn global_minima_mod_orbit(&self) -> Vec<(f64, f64)> {
        let best = self.min_value();
        let mut reduced: Vec<(f64, f64)> = self
            .minima
            .iter()
            .filter(|m| m.1 <= best + GLOBAL_TOL)
            .map(|&(t, v)| {
                let r = wrap(t, ORBIT_PERIOD);
                // a minimum just below the period is the one at 0
                (if ORBIT_PERIOD - r < MERGE_TOL { 0.0 } else { r }, v)
            })
            .collect();
        reduced.sort_by(|a, b| a.0.total_cmp(&b.0));
        merge_circular(reduced, ORBIT_PERIOD)
    }
}

/// `t` reduced into `[0, period)`.
fn wrap(t: f64, period: f64) -> f64 {
    let r = t % period;
    let r = if r < 0.0 { r + period } else { r };
    if r >= period {
        0.0
    } else {
        r
    }
}

fn profile(f: f64, theta: f64) -> f64 {
    orbit_components(f, theta)
        .iter()
        .map(|w| neg_xlnx(w * w))
        .sum()
}

/// Keeps the first of any run of angles closer than `MERGE_TOL`, wrapping at
/// `period`.
fn merge_circular(sorted: Vec<(f64, f64)>, period: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for m in sorted {
        match out.last_mut() {
            Some(last) if m.0 - last.0 < MERGE_TOL => {
                if m.1 < last.1 {
                    *last = m;
                }
            }
            _ => out.push(m),
        }
    }
    if out.len() > 1 {
        let (first, last) = (out[0], out[out.len() - 1]);
        if first.0 + period - last.0 < MERGE_TOL {
            out[0].1 = first.1.min(last.1);
            out.pop();
        }
    }
    out
}

pub fn theta_scan(f: f64, grid_size: usize) -> Result<ThetaProfile> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::FOutOfRange { f });
    }
    if grid_size < MIN_GRID {
        return Err(Error::GridTooSmall(grid_size));
    }
    let h = TAU / grid_size as f64;
    let grid: Vec<f64> = (0..grid_size).map(|i| i as f64 * h).collect();
    let values: Vec<f64> = grid.iter().map(|&t| profile(f, t)).collect();

    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if hi - lo < FLAT_TOL {
        let minima = alloc::vec![(0.0, values[0])];
        return Ok(ThetaProfile {
            f,
            grid,
            values,
            minima,
        });
    }

    let n = grid_size;
    let mut minima = Vec::new();
    for i in 0..n {
        let (prev, next) = (values[(i + n - 1) % n], values[(i + 1) % n]);
        if values[i] <= prev && values[i] < next {
            let (t, v) = golden_section(|t| profile(f, t), grid[i] - h, grid[i] + h, REFINE_TOL);
            let (t, v) = if v <= values[i] {
                (t, v)
            } else {
                (grid[i], values[i])
            };
            minima.push((wrap(t, TAU), v));
        }
    }
    minima.sort_by(|a, b| a.0.total_cmp(&b.0));
    let minima = merge_circular(minima, TAU);
    Ok(ThetaProfile {
        f,
        grid,
        values,
        minima,
    })
}

/// Minimal orbit entropy over `θ`, and the minimizing angles modulo `2π/3`.
pub fn s_of_f(f: f64) -> Result<(f64, Vec<f64>)> {
    let profile = theta_scan(f, S_OF_F_GRID)?;
    let minima = profile.global_minima_mod_orbit();
    Ok((
        profile.min_value(),
        minima.into_iter().map(|m| m.0).collect(),
    ))
}

/// Whether `θ = 0` (mod `2π/3`) minimizes the orbit entropy at `f`.
fn zero_is_minimizer(f: f64) -> Result<bool> {
    const AT_ZERO: f64 = 1e-5;
    let (_, minima) = s_of_f(f)?;
    Ok(minima.iter().any(|&t| t.min(ORBIT_PERIOD - t) <= AT_ZERO))
}

/// Bisects for the fidelity where the orbit minimizer leaves `θ = 0`.
pub fn find_bifurcation(f_lo: f64, f_hi: f64, tol_f: f64) -> Result<f64> {
    for f in [f_lo, f_hi] {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::FOutOfRange { f });
        }
    }
    if !(f_lo < f_hi) || !(tol_f > 0.0) {
        return Err(Error::InvalidConfig("need f_lo < f_hi and tol_f > 0"));
    }
    let (mut lo, mut hi) = (f_lo, f_hi);
    let at_lo = zero_is_minimizer(lo)?;
    if at_lo == zero_is_minimizer(hi)? {
        return Err(Error::NoBracket);
    }
    while hi - lo > tol_f {
        let mid = 0.5 * (lo + hi);
        if zero_is_minimizer(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
