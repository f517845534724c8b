//! Two-party states on `C^d ⊗ C^d` with basis index `j·d + k` for `|j⟩⊗|k⟩`:
//! the doubling map, isotropic states, entanglement of formation and the
//! embeddings of qubit pairs into larger local dimensions.

use alloc::vec;
use alloc::vec::Vec;

use crate::decomp::Decomposition;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};
use crate::optimizer::{minimize_objective, OptimizationResult, OptimizerConfig};
use crate::qstate::{DensityMatrix, StateVector, SubalgebraSpec};
use crate::symmetric::PermutationAction;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Entries off the `|jj⟩⟨kk|` positions larger than this break the
/// diagonal class.
pub const DIAGONAL_CLASS_TOL: f64 = 1e-10;
const CORRELATION_TOL: f64 = 1e-10;
/// Largest local dimension for which all `d!` permutations are enumerated.
pub const MAX_AVERAGE_DIM: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    local_dim: usize,
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(local_dim: usize, state: DensityMatrix) -> Result<Self> {
        if state.dim() != local_dim * local_dim {
            return Err(Error::DimensionMismatch {
                expected: local_dim * local_dim,
                found: state.dim(),
            });
        }
        Ok(Self { local_dim, state })
    }

    /// Infers the local dimension from a square total dimension.
    pub fn from_density(state: DensityMatrix) -> Result<Self> {
        let d = integer_sqrt(state.dim()).ok_or(Error::DimensionMismatch {
            expected: state.dim().isqrt() * state.dim().isqrt(),
            found: state.dim(),
        })?;
        Self::new(d, state)
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn into_state(self) -> DensityMatrix {
        self.state
    }

    pub fn factor_a(&self) -> SubalgebraSpec {
        SubalgebraSpec::FactorA {
            d_a: self.local_dim,
            d_b: self.local_dim,
        }
    }

    /// Largest modulus outside the `|jj⟩⟨kk|` positions.
    pub fn diagonal_class_residual(&self) -> f64 {
        let d = self.local_dim;
        let m = self.state.matrix();
        let mut worst = 0.0f64;
        for r in 0..d * d {
            for c in 0..d * d {
                if r % (d + 1) != 0 || c % (d + 1) != 0 {
                    worst = worst.max(m[(r, c)].norm());
                }
            }
        }
        worst
    }
}

fn integer_sqrt(n: usize) -> Option<usize> {
    let r = n.isqrt();
    (r * r == n).then_some(r)
}

/// `R_jk = ⟨jj|ρ|kk⟩` of a diagonal-class state.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    r: CMatrix,
}

impl CorrelationMatrix {
    pub fn new(r: CMatrix) -> Result<Self> {
        if !r.is_square() {
            return Err(Error::NotSquare {
                rows: r.rows(),
                cols: r.cols(),
            });
        }
        let trace = r.trace().re;
        if (trace - 1.0).abs() > CORRELATION_TOL {
            return Err(Error::NotUnitTrace { trace });
        }
        let min_eigenvalue = linalg::hermitian_eigenvalues(&r.hermitian_part())?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min_eigenvalue < -CORRELATION_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { r })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.r
    }

    pub fn into_density(self) -> DensityMatrix {
        DensityMatrix::from_matrix_unchecked(self.r.hermitian_part())
    }
}

/// `D[ρ] = Σ_jk R_jk |j⟩⟨k| ⊗ |j⟩⟨k|`.
pub fn doubling(rho: &DensityMatrix) -> BipartiteState {
    let d = rho.dim();
    let mut m = CMatrix::zeros(d * d, d * d);
    for j in 0..d {
        for k in 0..d {
            m[(j * (d + 1), k * (d + 1))] = rho.entry(j, k);
        }
    }
    BipartiteState {
        local_dim: d,
        state: DensityMatrix::from_matrix_unchecked(m),
    }
}

/// Inverse of [`doubling`] on the diagonal class.
pub fn undouble(rho_ab: &BipartiteState) -> Result<DensityMatrix> {
    let residual = rho_ab.diagonal_class_residual();
    if residual > DIAGONAL_CLASS_TOL {
        return Err(Error::NotInDiagonalClass { residual });
    }
    let d = rho_ab.local_dim;
    let m = rho_ab.state.matrix();
    let r = CMatrix::from_fn(d, d, |j, k| m[(j * (d + 1), k * (d + 1))]);
    Ok(CorrelationMatrix::new(r)?.into_density())
}

/// `Ψ = (1/√d) Σ_j |jj⟩`.
pub fn maximally_entangled(d: usize) -> Result<StateVector> {
    if d < 2 {
        return Err(Error::DimensionTooSmall { n: d, min: 2 });
    }
    let mut amps = vec![ZERO; d * d];
    let c = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for j in 0..d {
        amps[j * (d + 1)] = c;
    }
    StateVector::new(amps)
}

/// `|⟨Ψ|φ⟩|²` for `φ` on `C^d ⊗ C^d`.
pub fn entangled_fidelity(phi: &StateVector) -> Result<f64> {
    let d = integer_sqrt(phi.dim()).ok_or(Error::DimensionMismatch {
        expected: phi.dim().isqrt().pow(2),
        found: phi.dim(),
    })?;
    Ok(maximally_entangled(d)?.inner(phi).norm_sqr())
}

/// `ω_F = ((1−F)/(d²−1))(1 − |Ψ⟩⟨Ψ|) + F|Ψ⟩⟨Ψ|`.
pub fn isotropic(d: usize, f: f64) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::FOutOfRange { f });
    }
    let psi = maximally_entangled(d)?;
    let n = d * d;
    let rest = (1.0 - f) / (n as f64 - 1.0);
    let mut m = CMatrix::identity(n).scale(rest);
    m.add_scaled(f - rest, &CMatrix::outer(psi.amplitudes()));
    BipartiteState::new(d, DensityMatrix::from_matrix_unchecked(m))
}

/// Entanglement of formation: the roof over the first tensor factor.
pub fn eof(rho_ab: &BipartiteState, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    minimize_objective(&rho_ab.state, rho_ab.factor_a(), cfg)
}

/// Entanglement of formation of a diagonal-class state with the search kept
/// to ensembles of at most `d²` members supported on `span{|jj⟩}`.
///
/// Every pure state in the range of a diagonal-class state lies in that span,
/// so the restriction only caps the ensemble length.
pub fn eof_restricted(
    rho_ab: &BipartiteState,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    let residual = rho_ab.diagonal_class_residual();
    if residual > DIAGONAL_CLASS_TOL {
        return Err(Error::NotInDiagonalClass { residual });
    }
    let d = rho_ab.local_dim;
    let capped = cfg.with_length(cfg.length.min(d * d));
    let result = eof(rho_ab, &capped)?;
    debug_assert!(result.decomposition.decomposers().iter().all(|v| {
        v.amplitudes()
            .iter()
            .enumerate()
            .all(|(i, z)| i % (d + 1) == 0 || z.norm() < 1e-6)
    }));
    Ok(result)
}

/// `z1|00⟩ + (z2/√n) Σ_{j=1..n} |jj⟩` on `C^{n+1} ⊗ C^{n+1}`.
pub fn embed(z1: C64, z2: C64, n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    let norm = z1.norm_sqr() + z2.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized { norm: norm.sqrt() });
    }
    let d = n + 1;
    let mut amps = vec![ZERO; d * d];
    amps[0] = z1;
    let spread = z2 / (n as f64).sqrt();
    for j in 1..d {
        amps[j * (d + 1)] = spread;
    }
    StateVector::new(amps)
}

/// Fidelity above which a single orbit stops being optimal in local
/// dimension `n`: `4(n−1)/n²`.
pub fn f_double_star(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::DimensionTooSmall { n, min: 3 });
    }
    let n = n as f64;
    Ok(4.0 * (n - 1.0) / (n * n))
}

/// `(1/d!) Σ_π (U_π⊗U_π)|φ⟩⟨φ|(U_π⊗U_π)†` over all permutation matrices.
pub fn permutation_average(phi: &StateVector) -> Result<BipartiteState> {
    let d = integer_sqrt(phi.dim()).ok_or(Error::DimensionMismatch {
        expected: phi.dim().isqrt().pow(2),
        found: phi.dim(),
    })?;
    if d > MAX_AVERAGE_DIM {
        return Err(Error::DimensionTooLarge {
            n: d,
            max: MAX_AVERAGE_DIM,
        });
    }
    let perms: Vec<PermutationAction> = PermutationAction::all(d).collect();
    let weight = 1.0 / perms.len() as f64;
    let mut m = CMatrix::zeros(d * d, d * d);
    let mut moved = vec![ZERO; d * d];
    for g in &perms {
        let p = g.as_slice();
        for j in 0..d {
            for k in 0..d {
                moved[p[j] * d + p[k]] = phi.amplitudes()[j * d + k];
            }
        }
        m.add_scaled(weight, &CMatrix::outer(&moved));
    }
    BipartiteState::new(d, DensityMatrix::from_matrix_unchecked(m.hermitian_part()))
}

/// Mixture of the two embedded Case-1 decomposers,
/// `λ|W(z1,z2)⟩⟨·| + (1−λ)|W(z2*,z1*)⟩⟨·|`.
pub fn embedded_pair_state(z1: C64, z2: C64, lambda: f64, n: usize) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidDecomposition("weight outside [0, 1]"));
    }
    let w1 = embed(z1, z2, n)?;
    let w2 = embed(z2.conj(), z1.conj(), n)?;
    let mut m = CMatrix::outer(w1.amplitudes()).scale(lambda);
    m.add_scaled(1.0 - lambda, &CMatrix::outer(w2.amplitudes()));
    BipartiteState::new(
        n + 1,
        DensityMatrix::from_matrix_unchecked(m.hermitian_part()),
    )
}

/// Objective of the embedded pair itself: the Case-1 value plus
/// `ln n · (λ|z2|² + (1−λ)|z1|²)` from spreading one amplitude over `n` slots.
pub fn embedded_pair_objective(z1: C64, z2: C64, lambda: f64, n: usize) -> Result<f64> {
    let dec = crate::decomp::ExtremalDecomposition::new(
        vec![lambda, 1.0 - lambda],
        vec![embed(z1, z2, n)?, embed(z2.conj(), z1.conj(), n)?],
    )?;
    dec.objective(SubalgebraSpec::FactorA {
        d_a: n + 1,
        d_b: n + 1,
    })
}
