//! States, entropies and restriction to a subalgebra.
//!
//! Entropies are in nats throughout.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_eigen, hermitian_eigenvalues, CMatrix, HermitianEigen, C64, ZERO,
};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-EIGEN_CLAMP, 0)` are treated as exact zeros.
pub const EIGEN_CLAMP: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;

/// Hermitian, positive semidefinite, unit-trace `d×d` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
}

impl DensityMatrix {
    /// Validating constructor, see [`validate_density`].
    pub fn new(entries: CMatrix) -> Result<Self> {
        validate_density(entries)
    }

    /// For matrices that are states by construction.
    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        Self { m }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            m: CMatrix::identity(d).scale(1.0 / d as f64),
        }
    }

    pub fn pure(v: &StateVector) -> Self {
        Self {
            m: CMatrix::outer(v.amplitudes()),
        }
    }

    pub fn diagonal(probs: &ProbabilityVector) -> Self {
        Self {
            m: CMatrix::diagonal(probs.probs()),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn entry(&self, j: usize, k: usize) -> C64 {
        self.m[(j, k)]
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        hermitian_eigen(&self.m)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.m)
    }

    /// Number of eigenvalues above `cutoff`.
    pub fn rank(&self, cutoff: f64) -> Result<usize> {
        Ok(self.eigenvalues()?.iter().filter(|&&x| x > cutoff).count())
    }

    /// Largest entrywise deviation from `other`.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        self.m.max_abs_diff(&other.m)
    }

    pub fn diagonal_probabilities(&self) -> ProbabilityVector {
        ProbabilityVector {
            probs: (0..self.dim())
                .map(|i| self.m[(i, i)].re.max(0.0))
                .collect(),
        }
    }

    pub fn sqrt(&self) -> Result<CMatrix> {
        Ok(self.eigen()?.map_values(|x| x.max(0.0).sqrt()))
    }
}

/// Unit vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    /// Accepts amplitudes whose Euclidean norm is within `1e-12` of one.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let norm = linalg::norm_sqr(&amps).sqrt();
        if amps.is_empty() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = linalg::norm_sqr(&amps).sqrt();
        if amps.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { amps })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(d: usize, k: usize) -> Self {
        let mut amps = vec![ZERO; d];
        amps[k] = C64::new(1.0, 0.0);
        Self { amps }
    }

    /// `(1/√d) Σ_j |j⟩`.
    pub fn uniform(d: usize) -> Self {
        let a = 1.0 / (d as f64).sqrt();
        Self {
            amps: vec![C64::new(a, 0.0); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        linalg::dot(&self.amps, &other.amps)
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::pure(self)
    }

    /// Same ray with the largest-modulus component made real and positive.
    pub fn phase_aligned(&self) -> StateVector {
        let lead = self.amps.iter().copied().fold(ZERO, |best, z| {
            if z.norm() > best.norm() + 1e-15 {
                z
            } else {
                best
            }
        });
        let n = lead.norm();
        if n == 0.0 {
            return self.clone();
        }
        let rot = lead.conj() / n;
        StateVector {
            amps: self.amps.iter().map(|z| z * rot).collect(),
        }
    }
}

/// Restriction target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubalgebraSpec {
    /// Maximal abelian subalgebra of matrices diagonal in the computational basis.
    Diagonal,
    /// First tensor factor of `C^{d_a} ⊗ C^{d_b}`; restriction is the partial trace over B.
    FactorA { d_a: usize, d_b: usize },
}

impl SubalgebraSpec {
    pub fn check(&self, dim: usize) -> Result<()> {
        match *self {
            SubalgebraSpec::Diagonal => Ok(()),
            SubalgebraSpec::FactorA { d_a, d_b } if d_a * d_b == dim && d_a > 0 => Ok(()),
            SubalgebraSpec::FactorA { d_a, d_b } => Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: dim,
            }),
        }
    }

    /// Dimension of the restricted state.
    pub fn restricted_dim(&self, dim: usize) -> usize {
        match *self {
            SubalgebraSpec::Diagonal => dim,
            SubalgebraSpec::FactorA { d_a, .. } => d_a,
        }
    }
}

/// Classical distribution, e.g. the restriction of a state to the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector {
    probs: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = probs.iter().find(|&&p| p < -1e-12 || !p.is_finite()) {
            return Err(Error::DomainError { value: bad });
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitTrace { trace: total });
        }
        Ok(Self {
            probs: probs.into_iter().map(|p| p.max(0.0)).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        self.probs.iter().map(|&p| neg_xlnx(p)).sum()
    }
}

#[inline]
pub(crate) fn neg_xlnx(t: f64) -> f64 {
    if t > 0.0 {
        -t * t.ln()
    } else {
        0.0
    }
}

/// `s(t) = −t ln t` on `[0, 1]`, with `1e-12` slack clamped onto the interval.
pub fn shannon_term(t: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&t) {
        return Err(Error::DomainError { value: t });
    }
    Ok(neg_xlnx(t.clamp(0.0, 1.0)))
}

/// `S(ρ) = −Σ μ ln μ` over the spectrum.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    spectrum_entropy(&rho.eigenvalues()?)
}

pub(crate) fn spectrum_entropy(values: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &mu in values {
        if mu < -EIGEN_CLAMP {
            return Err(Error::NotPositive { min_eigenvalue: mu });
        }
        total += neg_xlnx(mu);
    }
    Ok(total)
}

/// Restriction of `rho` to `sub`: the diagonal part, or the partial trace over B.
pub fn restrict(rho: &DensityMatrix, sub: SubalgebraSpec) -> Result<DensityMatrix> {
    let dim = rho.dim();
    sub.check(dim)?;
    let m = match sub {
        SubalgebraSpec::Diagonal => CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                C64::new(rho.m[(i, i)].re, 0.0)
            } else {
                ZERO
            }
        }),
        SubalgebraSpec::FactorA { d_a, d_b } => CMatrix::from_fn(d_a, d_a, |i, k| {
            (0..d_b).map(|j| rho.m[(i * d_b + j, k * d_b + j)]).sum()
        }),
    };
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// `⟨φ|ρ|φ⟩`.
pub fn overlap(rho: &DensityMatrix, phi: &StateVector) -> Result<f64> {
    if rho.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: phi.dim(),
        });
    }
    Ok(rho.m.expectation(phi.amplitudes()).re)
}

/// Checks the density-matrix invariants and returns the Hermitian part as a
/// typed state.
pub fn validate_density(entries: CMatrix) -> Result<DensityMatrix> {
    if !entries.is_square() {
        return Err(Error::NotSquare {
            rows: entries.rows(),
            cols: entries.cols(),
        });
    }
    if entries
        .as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::NotHermitian { residual: f64::NAN });
    }
    let residual = entries.hermiticity_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let trace = entries.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::NotUnitTrace { trace });
    }
    let m = entries.hermitian_part();
    let min_eigenvalue = hermitian_eigenvalues(&m)?.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -EIGEN_CLAMP {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    Ok(DensityMatrix { m })
}

/// Evaluates `‖u‖² · S(restrict(|û⟩⟨û|, sub))` for unnormalized pure vectors
/// `u`, reusing a scratch buffer. This is the inner loop of the roof
/// minimization.
#[derive(Clone, Debug)]
pub struct PureEntropy {
    sub: SubalgebraSpec,
    scratch: Vec<C64>,
}

impl PureEntropy {
    pub fn new(sub: SubalgebraSpec) -> Self {
        Self {
            sub,
            scratch: Vec::new(),
        }
    }

    pub fn weighted(&mut self, u: &[C64]) -> f64 {
        match self.sub {
            SubalgebraSpec::Diagonal => {
                let mut w = 0.0;
                let mut acc = 0.0;
                for z in u {
                    let p = z.norm_sqr();
                    w += p;
                    acc += neg_xlnx(p);
                }
                weighted_from_parts(acc, w)
            }
            SubalgebraSpec::FactorA { d_a, d_b } => {
                let (m, w) = self.gram(u, d_a, d_b);
                if m <= 1 || w == 0.0 {
                    return 0.0;
                }
                let g = &mut self.scratch;
                let acc = if m == 2 {
                    let (hi, lo) = linalg::eigenvalues_2x2(g[0].re, g[1], g[3].re);
                    neg_xlnx(hi) + neg_xlnx(lo)
                } else {
                    // a non-converged Jacobi still leaves a near-diagonal buffer
                    let _ = linalg::jacobi(g, m, None);
                    (0..m).map(|k| neg_xlnx(g[k * m + k].re)).sum()
                };
                weighted_from_parts(acc, w)
            }
        }
    }

    /// `‖u‖² · (1 − Tr r²)` with `r` the normalized restriction of `û`.
    /// Smooth in `u`, and zero exactly where [`PureEntropy::weighted`] is.
    pub fn weighted_linear(&mut self, u: &[C64]) -> f64 {
        let (w, purity) = match self.sub {
            SubalgebraSpec::Diagonal => {
                let mut w = 0.0;
                let mut sq = 0.0;
                for z in u {
                    let p = z.norm_sqr();
                    w += p;
                    sq += p * p;
                }
                (w, sq)
            }
            SubalgebraSpec::FactorA { d_a, d_b } => {
                let (_, w) = self.gram(u, d_a, d_b);
                (w, self.scratch.iter().map(|z| z.norm_sqr()).sum())
            }
        };
        if w > 0.0 {
            (w - purity / w).max(0.0)
        } else {
            0.0
        }
    }

    /// Fills the scratch buffer with the Gram matrix of the smaller tensor
    /// side; returns its size and `‖u‖²`.
    fn gram(&mut self, u: &[C64], d_a: usize, d_b: usize) -> (usize, f64) {
        let (m, transposed) = if d_a <= d_b {
            (d_a, false)
        } else {
            (d_b, true)
        };
        let w = linalg::norm_sqr(u);
        let g = &mut self.scratch;
        g.clear();
        g.resize(m * m, ZERO);
        for r in 0..m {
            for c in r..m {
                let mut acc = ZERO;
                if transposed {
                    for i in 0..d_a {
                        acc += u[i * d_b + r].conj() * u[i * d_b + c];
                    }
                } else {
                    for j in 0..d_b {
                        acc += u[r * d_b + j] * u[c * d_b + j].conj();
                    }
                }
                g[r * m + c] = acc;
                g[c * m + r] = acc.conj();
            }
        }
        (m, w)
    }
}

/// With unnormalized eigenvalues `μ` summing to `w`:
/// `w · S(μ/w) = −Σ μ ln μ + w ln w`.
#[inline]
fn weighted_from_parts(neg_sum: f64, w: f64) -> f64 {
    if w > 0.0 {
        (neg_sum + w * w.ln()).max(0.0)
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{E, LN_2};

    fn ln3() -> f64 {
        3.0f64.ln()
    }

    #[test]
    fn shannon_term_boundaries() {
        assert_eq!(shannon_term(0.0).unwrap(), 0.0);
        assert_eq!(shannon_term(1.0).unwrap(), 0.0);
        assert!((shannon_term(1.0 / E).unwrap() - 1.0 / E).abs() < 1e-15);
        assert!((shannon_term(1.0 / E).unwrap() - 0.3678794).abs() < 1e-7);
        assert_eq!(shannon_term(-5e-13).unwrap(), 0.0);
        assert!(matches!(
            shannon_term(-1e-9),
            Err(Error::DomainError { .. })
        ));
        assert!(matches!(
            shannon_term(1.0 + 1e-9),
            Err(Error::DomainError { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        let mixed = DensityMatrix::maximally_mixed(3);
        assert!((von_neumann_entropy(&mixed).unwrap() - ln3()).abs() < 1e-14);

        let v = StateVector::normalized(vec![
            C64::new(1.0, 0.5),
            C64::new(-0.3, 0.2),
            C64::new(0.1, 0.0),
        ])
        .unwrap();
        assert!(von_neumann_entropy(&v.projector()).unwrap().abs() < 1e-13);

        let p = ProbabilityVector::new(vec![2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0]).unwrap();
        let expected = ln3() - LN_2 / 3.0;
        assert!(
            (von_neumann_entropy(&DensityMatrix::diagonal(&p)).unwrap() - expected).abs() < 1e-14
        );
        assert!((expected - 0.8675632).abs() < 1e-7);
    }

    #[test]
    fn restriction_examples() {
        let psi = crate::bipartite::maximally_entangled(3).unwrap();
        let reduced =
            restrict(&psi.projector(), SubalgebraSpec::FactorA { d_a: 3, d_b: 3 }).unwrap();
        assert!(reduced.distance(&DensityMatrix::maximally_mixed(3)) < 1e-15);

        let v = StateVector::normalized(vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0)]).unwrap();
        let diag = restrict(&v.projector(), SubalgebraSpec::Diagonal).unwrap();
        let shannon = v.projector().diagonal_probabilities().entropy();
        assert!((von_neumann_entropy(&diag).unwrap() - shannon).abs() < 1e-14);

        let bad = restrict(
            &DensityMatrix::maximally_mixed(4),
            SubalgebraSpec::FactorA { d_a: 3, d_b: 2 },
        );
        assert!(matches!(bad, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn overlap_examples() {
        let phi = StateVector::uniform(3);
        assert!((overlap(&phi.projector(), &phi).unwrap() - 1.0).abs() < 1e-15);
        assert!(
            (overlap(
                &DensityMatrix::maximally_mixed(4),
                &StateVector::basis(4, 2)
            )
            .unwrap()
                - 0.25)
                .abs()
                < 1e-15
        );
        assert!(overlap(&DensityMatrix::maximally_mixed(2), &phi).is_err());
    }

    #[test]
    fn validation_names_the_violation() {
        assert!(validate_density(CMatrix::identity(2).scale(0.5)).is_ok());
        let neg = CMatrix::diagonal(&[1.5, -0.5]);
        assert!(matches!(
            validate_density(neg),
            Err(Error::NotPositive { .. })
        ));
        let mut skew = CMatrix::identity(2).scale(0.5);
        skew[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(
            validate_density(skew),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            validate_density(CMatrix::identity(2)),
            Err(Error::NotUnitTrace { .. })
        ));
        assert!(matches!(
            validate_density(CMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn permutation_invariant_family_positivity_boundary() {
        // (1/3)[[1,x,x],[x,1,x],[x,x,1]] has eigenvalues (1+2x)/3 and (1-x)/3 (twice)
        let build = |x: f64| {
            CMatrix::from_fn(3, 3, |i, j| {
                C64::new(if i == j { 1.0 / 3.0 } else { x / 3.0 }, 0.0)
            })
        };
        assert!(matches!(
            validate_density(build(-0.6)),
            Err(Error::NotPositive { .. })
        ));
        assert!(validate_density(build(-0.5)).is_ok());
        assert!(validate_density(build(1.0)).is_ok());
    }

    #[test]
    fn pure_entropy_matches_restriction() {
        let u = vec![
            C64::new(0.3, 0.1),
            C64::new(-0.2, 0.4),
            C64::new(0.5, 0.0),
            C64::new(0.1, -0.6),
        ];
        let v = StateVector::normalized(u.clone()).unwrap();
        let w = linalg::norm_sqr(&u);
        for sub in [
            SubalgebraSpec::Diagonal,
            SubalgebraSpec::FactorA { d_a: 2, d_b: 2 },
        ] {
            let direct = von_neumann_entropy(&restrict(&v.projector(), sub).unwrap()).unwrap();
            let fast = PureEntropy::new(sub).weighted(&u);
            assert!((fast - w * direct).abs() < 1e-14, "{sub:?}");
        }
    }
}
