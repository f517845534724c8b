//! Convex decompositions of states and the ensemble-entropy objective.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::optimizer::{minimize_objective, OptimizerConfig};
use crate::qstate::{
    restrict, von_neumann_entropy, DensityMatrix, PureEntropy, StateVector, SubalgebraSpec,
};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Terms lighter than this are dropped when an ensemble is built.
pub const WEIGHT_PRUNE: f64 = 1e-14;
/// Eigenvalues at or below this count as outside the support.
pub const RANK_CUTOFF: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-10;
const ISOMETRY_TOL: f64 = 1e-10;
const POVM_TOL: f64 = 1e-10;

/// Anything that can be mixed back into a state and scored.
pub trait Decomposition {
    fn dim(&self) -> usize;
    fn weights(&self) -> &[f64];
    /// `Σ λ_j ρ_j`.
    fn reconstruct(&self) -> Result<DensityMatrix>;
    /// `Σ λ_j S(ρ_j restricted to sub)`.
    fn objective(&self, sub: SubalgebraSpec) -> Result<f64>;
}

pub fn reconstruct<D: Decomposition + ?Sized>(dec: &D) -> Result<DensityMatrix> {
    dec.reconstruct()
}

pub fn objective<D: Decomposition + ?Sized>(dec: &D, sub: SubalgebraSpec) -> Result<f64> {
    dec.objective(sub)
}

fn check_weights(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::InvalidDecomposition("empty ensemble"));
    }
    if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::InvalidDecomposition("weights must be positive"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidDecomposition("weights must sum to 1"));
    }
    Ok(total)
}

/// `ρ = Σ λ_j |φ_j⟩⟨φ_j|` with pure decomposers.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalDecomposition {
    weights: Vec<f64>,
    decomposers: Vec<StateVector>,
}

impl ExtremalDecomposition {
    /// Weights must be positive and sum to one within `1e-10` (they are then
    /// renormalized exactly); the length may not exceed `d²`.
    pub fn new(weights: Vec<f64>, decomposers: Vec<StateVector>) -> Result<Self> {
        if weights.len() != decomposers.len() {
            return Err(Error::InvalidDecomposition(
                "weights and decomposers differ in length",
            ));
        }
        let total = check_weights(&weights)?;
        let d = decomposers[0].dim();
        if let Some(bad) = decomposers.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        if decomposers.len() > d * d {
            return Err(Error::InvalidDecomposition("length exceeds d^2"));
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self {
            weights,
            decomposers,
        })
    }

    /// Splits unnormalized vectors `u_j` into weights `‖u_j‖²` and directions,
    /// dropping terms below [`WEIGHT_PRUNE`].
    pub fn from_unnormalized(vectors: &[Vec<C64>]) -> Result<Self> {
        let mut weights = Vec::with_capacity(vectors.len());
        let mut decomposers = Vec::with_capacity(vectors.len());
        for u in vectors {
            let w = linalg::norm_sqr(u);
            if w < WEIGHT_PRUNE {
                continue;
            }
            weights.push(w);
            decomposers.push(StateVector::normalized(u.clone())?);
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidDecomposition("all terms pruned"));
        }
        for w in &mut weights {
            *w /= total;
        }
        Self::new(weights, decomposers)
    }

    /// Single pure term.
    pub fn pure(v: StateVector) -> Self {
        Self {
            weights: alloc::vec![1.0],
            decomposers: alloc::vec![v],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn decomposers(&self) -> &[StateVector] {
        &self.decomposers
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &StateVector)> {
        self.weights.iter().copied().zip(self.decomposers.iter())
    }

    /// Each decomposer with its largest component made real positive.
    pub fn phase_aligned(&self) -> Self {
        Self {
            weights: self.weights.clone(),
            decomposers: self
                .decomposers
                .iter()
                .map(StateVector::phase_aligned)
                .collect(),
        }
    }
}

impl Decomposition for ExtremalDecomposition {
    fn dim(&self) -> usize {
        self.decomposers[0].dim()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn reconstruct(&self) -> Result<DensityMatrix> {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, v) in self.iter() {
            if v.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.dim(),
                });
            }
            m.add_scaled(w, &CMatrix::outer(v.amplitudes()));
        }
        Ok(DensityMatrix::from_matrix_unchecked(m.hermitian_part()))
    }

    fn objective(&self, sub: SubalgebraSpec) -> Result<f64> {
        sub.check(self.dim())?;
        let mut eval = PureEntropy::new(sub);
        Ok(self
            .iter()
            .map(|(w, v)| w * eval.weighted(v.amplitudes()))
            .sum())
    }
}

/// `ρ = Σ λ_j ρ_j` with mixed components.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedDecomposition {
    weights: Vec<f64>,
    components: Vec<DensityMatrix>,
}

impl MixedDecomposition {
    pub fn new(weights: Vec<f64>, components: Vec<DensityMatrix>) -> Result<Self> {
        if weights.len() != components.len() {
            return Err(Error::InvalidDecomposition(
                "weights and components differ in length",
            ));
        }
        let total = check_weights(&weights)?;
        let d = components[0].dim();
        if let Some(bad) = components.iter().find(|c| c.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.dim(),
            });
        }
        let weights = weights.into_iter().map(|w| w / total).collect();
        Ok(Self {
            weights,
            components,
        })
    }

    pub fn components(&self) -> &[DensityMatrix] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl From<&ExtremalDecomposition> for MixedDecomposition {
    fn from(dec: &ExtremalDecomposition) -> Self {
        Self {
            weights: dec.weights.clone(),
            components: dec.decomposers.iter().map(StateVector::projector).collect(),
        }
    }
}

impl Decomposition for MixedDecomposition {
    fn dim(&self) -> usize {
        self.components[0].dim()
    }

    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn reconstruct(&self) -> Result<DensityMatrix> {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (&w, c) in self.weights.iter().zip(&self.components) {
            if c.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: c.dim(),
                });
            }
            m.add_scaled(w, c.matrix());
        }
        Ok(DensityMatrix::from_matrix_unchecked(m.hermitian_part()))
    }

    fn objective(&self, sub: SubalgebraSpec) -> Result<f64> {
        let mut total = 0.0;
        for (&w, c) in self.weights.iter().zip(&self.components) {
            total += w * von_neumann_entropy(&restrict(c, sub)?)?;
        }
        Ok(total)
    }
}

/// Decomposition induced by a POVM `{M_j}`: weights `Tr(ρ M_j)` and
/// components `√ρ M_j √ρ / Tr(ρ M_j)`.
pub fn povm_decomposition(rho: &DensityMatrix, povm: &[CMatrix]) -> Result<MixedDecomposition> {
    let d = rho.dim();
    if povm.is_empty() {
        return Err(Error::InvalidPovm("no elements"));
    }
    let mut sum = CMatrix::zeros(d, d);
    for m in povm {
        if m.rows() != d || m.cols() != d {
            return Err(Error::InvalidPovm(
                "element dimension differs from the state",
            ));
        }
        if m.hermiticity_residual() > POVM_TOL {
            return Err(Error::InvalidPovm("element is not Hermitian"));
        }
        let smallest = linalg::hermitian_eigenvalues(m)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if smallest < -POVM_TOL {
            return Err(Error::InvalidPovm("element is not positive"));
        }
        sum.add_scaled(1.0, m);
    }
    if sum.max_abs_diff(&CMatrix::identity(d)) > POVM_TOL {
        return Err(Error::InvalidPovm("elements do not sum to the identity"));
    }

    let root = rho.sqrt()?;
    let mut weights = Vec::new();
    let mut components = Vec::new();
    for m in povm {
        let sandwich = &(&root * &m.hermitian_part()) * &root;
        let w = sandwich.trace().re;
        if w < WEIGHT_PRUNE {
            continue;
        }
        weights.push(w);
        components.push(DensityMatrix::from_matrix_unchecked(
            sandwich.scale(1.0 / w).hermitian_part(),
        ));
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    MixedDecomposition::new(weights, components)
}

/// Eigenpairs `(μ_k, e_k)` of the support of `rho`, scaled as `√μ_k e_k`.
pub(crate) fn scaled_support(rho: &DensityMatrix) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let eig = rho.eigen()?;
    let mut values = Vec::new();
    let mut scaled = Vec::new();
    for (k, &mu) in eig.values.iter().enumerate() {
        if mu > RANK_CUTOFF {
            let s = mu.sqrt();
            values.push(mu);
            scaled.push(eig.vector(k).into_iter().map(|z| z * s).collect());
        }
    }
    Ok((values, scaled))
}

/// Ensemble `u_j = Σ_k mixer[j,k] √μ_k e_k` generated by an `n×r` isometry.
/// Every extremal decomposition of `rho` arises this way.
pub fn mixer_ensemble(rho: &DensityMatrix, mixer: &CMatrix) -> Result<ExtremalDecomposition> {
    let (_, support) = scaled_support(rho)?;
    let rank = support.len();
    if mixer.cols() != rank {
        return Err(Error::RankMismatch {
            rank,
            columns: mixer.cols(),
        });
    }
    let gram = &mixer.adjoint() * mixer;
    let residual = gram.max_abs_diff(&CMatrix::identity(rank));
    if residual > ISOMETRY_TOL {
        return Err(Error::NotIsometry { residual });
    }
    let d = rho.dim();
    let vectors: Vec<Vec<C64>> = (0..mixer.rows())
        .map(|j| {
            let mut u = alloc::vec![linalg::ZERO; d];
            for (k, s) in support.iter().enumerate() {
                let c = mixer[(j, k)];
                for (ui, si) in u.iter_mut().zip(s) {
                    *ui += c * si;
                }
            }
            u
        })
        .collect();
    ExtremalDecomposition::from_unnormalized(&vectors)
}

/// `H_ρ(A) = S(ρ|A) − E(ρ; A)` with the roof value found numerically.
pub fn entropy_of_subalgebra(
    rho: &DensityMatrix,
    sub: SubalgebraSpec,
    cfg: &OptimizerConfig,
) -> Result<f64> {
    let restricted = von_neumann_entropy(&restrict(rho, sub)?)?;
    let best = minimize_objective(rho, sub, cfg)?;
    Ok(restricted - best.value)
}
