use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Second differences below `−CONVEXITY_TOL` count as violations.
pub const CONVEXITY_TOL: f64 = 1e-9;
const SPACING_TOL: f64 = 1e-9;

/// Interior indices `i` where `v[i−1] − 2v[i] + v[i+1] < −1e-9`.
pub fn convexity_profile(f_grid: &[f64], values: &[f64]) -> Result<Vec<usize>> {
    if f_grid.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: f_grid.len(),
            found: values.len(),
        });
    }
    if f_grid.len() >= 2 {
        let h = f_grid[1] - f_grid[0];
        let uniform = f_grid.windows(2).all(|w| {
            w[1] - w[0] > 0.0 && ((w[1] - w[0]) - h).abs() <= SPACING_TOL * h.abs().max(1.0)
        });
        if !(h > 0.0) || !uniform {
            return Err(Error::NonUniformGrid);
        }
    }
    Ok((1..values.len().saturating_sub(1))
        .filter(|&i| values[i - 1] - 2.0 * values[i] + values[i + 1] < -CONVEXITY_TOL)
        .collect())
}
