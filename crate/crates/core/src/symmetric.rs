//! Permutation-invariant states, cyclic-orbit decompositions and the closed
//! forms for their diagonal-subalgebra entanglement.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_3, LN_2};

use itertools::Itertools;

use crate::decomp::{Decomposition, ExtremalDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::qstate::{neg_xlnx, DensityMatrix, StateVector};
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Off-diagonal value where the optimal qutrit orbit splits in two.
pub const X_STAR: f64 = -0.4150234;
/// `(2 X_STAR + 1) / 3`, lower end of the single-orbit regime for `d = 3`.
pub const F_STAR: f64 = 0.0566511;
/// Upper end of the single-orbit regime for `d = 3`; above it the roof is
/// the chord to `F = 1`.
pub const F_STAR_STAR: f64 = 8.0 / 9.0;
/// Slack on the ends of the closed-form domain.
pub const DOMAIN_SLACK: f64 = 1e-9;

fn check_f(f: f64) -> Result<()> {
    if (0.0..=1.0).contains(&f) {
        Ok(())
    } else {
        Err(Error::FOutOfRange { f })
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::DimensionTooSmall { n: d, min: 2 })
    } else {
        Ok(())
    }
}

/// `ρ_F = ((1−F)/(d−1))(1 − |ψ⟩⟨ψ|) + F|ψ⟩⟨ψ|` with `ψ` uniform.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PermSymmetricState {
    d: usize,
    f: f64,
}

impl PermSymmetricState {
    pub fn new(d: usize, f: f64) -> Result<Self> {
        check_dim(d)?;
        check_f(f)?;
        Ok(Self { d, f })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn fidelity(&self) -> f64 {
        self.f
    }

    /// Common off-diagonal entry times `d`.
    pub fn x(&self) -> f64 {
        (self.d as f64 * self.f - 1.0) / (self.d as f64 - 1.0)
    }

    pub fn density(&self) -> DensityMatrix {
        let d = self.d;
        let diag = 1.0 / d as f64;
        let off = self.x() / d as f64;
        let m = CMatrix::from_fn(d, d, |j, k| C64::new(if j == k { diag } else { off }, 0.0));
        DensityMatrix::from_matrix_unchecked(m)
    }
}

pub fn perm_symmetric_state(d: usize, f: f64) -> Result<DensityMatrix> {
    Ok(PermSymmetricState::new(d, f)?.density())
}

/// `F = (1 + (d−1)x)/d`, the overlap with the uniform vector.
pub fn x_to_fidelity(d: usize, x: f64) -> Result<f64> {
    check_dim(d)?;
    let lo = -1.0 / (d as f64 - 1.0);
    if !(x >= lo - 1e-12 && x <= 1.0 + 1e-12) {
        return Err(Error::XOutOfRange { x });
    }
    Ok(((1.0 + (d as f64 - 1.0) * x) / d as f64).clamp(0.0, 1.0))
}

/// Optimal decomposition of the qubit state `[[a, b], [b*, 1−a]]` for the
/// diagonal subalgebra. Returns `(E, decomposition, λ)`.
pub fn case1_optimal(a: f64, b: C64) -> Result<(f64, ExtremalDecomposition, f64)> {
    let b_sqr = b.norm_sqr();
    if !(0.0..=1.0).contains(&a) || !(b_sqr <= a * (1.0 - a) + 1e-12) {
        return Err(Error::InvalidBlochParams { a, b_sqr });
    }
    let disc = (1.0 - 4.0 * b_sqr).max(0.0);
    if disc <= 1e-12 {
        // pure state; λ is 0/0 and the answer is the state itself
        let z1 = a.sqrt();
        let v = StateVector::normalized(vec![C64::new(z1, 0.0), b.conj() / z1])?;
        return Ok((2.0 * neg_xlnx(0.5), ExtremalDecomposition::pure(v), a));
    }
    let root = disc.sqrt();
    let p1 = (1.0 + root) / 2.0;
    let z1 = p1.sqrt();
    let z2 = b.conj() / z1;
    let lambda = ((1.0 + (2.0 * a - 1.0) / root) / 2.0).clamp(0.0, 1.0);
    let energy = neg_xlnx(p1) + neg_xlnx(z2.norm_sqr());

    let w1 = StateVector::normalized(vec![C64::new(z1, 0.0), z2])?;
    let w2 = StateVector::normalized(vec![z2.conj(), C64::new(z1, 0.0)])?;
    let (weights, vectors): (Vec<f64>, Vec<StateVector>) = [(lambda, w1), (1.0 - lambda, w2)]
        .into_iter()
        .filter(|(w, _)| *w > 1e-14)
        .unzip();
    let total: f64 = weights.iter().sum();
    let weights = weights.into_iter().map(|w| w / total).collect();
    Ok((
        energy,
        ExtremalDecomposition::new(weights, vectors)?,
        lambda,
    ))
}

/// Closed form for the symmetric qubit `ρ_F`.
pub fn case1_symmetric_entanglement(f: f64) -> Result<f64> {
    check_f(f)?;
    let r = 2.0 * (f * (1.0 - f)).sqrt();
    Ok(neg_xlnx((1.0 + r) / 2.0) + neg_xlnx((1.0 - r) / 2.0))
}

/// Components of the qutrit orbit generator at angle `theta`; no range check.
pub(crate) fn orbit_components(f: f64, theta: f64) -> [f64; 3] {
    let a = (3.0 * f).sqrt();
    let b = (1.5 * (1.0 - f)).sqrt();
    [
        (a + 2.0 * b * theta.cos()) / 3.0,
        (a - 2.0 * b * (theta - FRAC_PI_3).cos()) / 3.0,
        (a - 2.0 * b * (theta + FRAC_PI_3).cos()) / 3.0,
    ]
}

/// Real unit vector `w` with `|⟨ψ|w⟩|² = F` whose cyclic orbit decomposes
/// the qutrit `ρ_F`; `theta` runs over the remaining one-parameter family.
pub fn orbit_vector(f: f64, theta: f64) -> Result<StateVector> {
    check_f(f)?;
    let w = orbit_components(f, theta);
    StateVector::normalized(w.iter().map(|&x| C64::new(x, 0.0)).collect())
}

/// Single-orbit closed form for the qutrit, evaluated anywhere on `[0, 1]`.
pub fn case2_formula(f: f64) -> Result<f64> {
    check_f(f)?;
    let r = 2.0 * (2.0 * f * (1.0 - f)).sqrt();
    Ok(neg_xlnx((2.0 - f + r) / 3.0) + 2.0 * neg_xlnx(((1.0 + f - r) / 6.0).max(0.0)))
}

/// Qutrit entanglement on `[F*, 8/9]`, where a single orbit is optimal.
/// Outside that range the error carries the formula value anyway.
pub fn case2_entanglement(f: f64) -> Result<f64> {
    let value = case2_formula(f)?;
    if !(F_STAR - DOMAIN_SLACK..=F_STAR_STAR + DOMAIN_SLACK).contains(&f) {
        return Err(Error::FOutOfDomain { f, value });
    }
    Ok(value)
}

/// Orbit of the vector with one component `√p_F` and `d−1` equal others.
pub fn single_orbit_entanglement(d: usize, f: f64) -> Result<f64> {
    check_dim(d)?;
    check_f(f)?;
    let m = d as f64 - 1.0;
    let p = ((f.sqrt() + (m * (1.0 - f)).sqrt()).powi(2) / d as f64).min(1.0);
    Ok(neg_xlnx(p) + m * neg_xlnx((1.0 - p) / m))
}

/// Entanglement of the qutrit `ρ_F` pieced together from the closed forms:
/// `ln 2` at `F = 0`, the single-orbit formula on `[F*, 8/9]`, and the chord
/// to `(1, ln 3)` above. `None` on `(0, F*)`, where no closed form exists.
pub fn qutrit_closed_form(f: f64) -> Result<Option<f64>> {
    check_f(f)?;
    if f == 0.0 {
        return Ok(Some(LN_2));
    }
    if f < F_STAR - DOMAIN_SLACK {
        return Ok(None);
    }
    if f <= F_STAR_STAR {
        return Ok(Some(case2_formula(f)?));
    }
    chord_above(3, f).map(Some)
}

/// Best proven closed form for `ρ_F` in dimension `d`, if any: the qubit
/// formula, the qutrit piecewise form, and for `d ≥ 4` the single-orbit
/// value on `[1/d, F**]` with the chord above it.
pub fn symmetric_closed_form(d: usize, f: f64) -> Result<Option<f64>> {
    check_dim(d)?;
    check_f(f)?;
    match d {
        2 => case1_symmetric_entanglement(f).map(Some),
        3 => qutrit_closed_form(f),
        _ => {
            let lo = 1.0 / d as f64;
            let hi = 4.0 * (d as f64 - 1.0) / (d as f64 * d as f64);
            if f < lo - DOMAIN_SLACK {
                Ok(None)
            } else if f <= hi {
                single_orbit_entanglement(d, f).map(Some)
            } else {
                chord_above(d, f).map(Some)
            }
        }
    }
}

/// Linear interpolation between the orbit value at `F** = 4(d−1)/d²` and
/// `ln d` at `F = 1`.
pub fn chord_above(d: usize, f: f64) -> Result<f64> {
    check_dim(d)?;
    check_f(f)?;
    let lo = 4.0 * (d as f64 - 1.0) / (d as f64 * d as f64);
    let at_lo = single_orbit_entanglement(d, lo.min(1.0))?;
    if lo >= 1.0 {
        return Ok(at_lo);
    }
    let p = (f - lo) / (1.0 - lo);
    Ok(p * (d as f64).ln() + (1.0 - p) * at_lo)
}

/// `{V^j w}` with weights `1/d`, where `V` shifts basis index `k` to `k+1`.
pub fn cyclic_orbit_decomposition(w: &StateVector) -> Result<ExtremalDecomposition> {
    let d = w.dim();
    let shift = PermutationAction::cyclic_shift(d);
    let mut members = Vec::with_capacity(d);
    let mut v = w.clone();
    for _ in 0..d {
        let next = shift.apply(&v)?;
        members.push(v);
        v = next;
    }
    ExtremalDecomposition::new(vec![1.0 / d as f64; d], members)
}

/// Distinct component values of a real vector and how often each occurs.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitClass {
    /// Cluster means, largest first.
    pub distinct_values: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

/// Phase-aligns `w`, checks it is real to `tol`, and clusters its components
/// (single linkage, gaps above `tol` separate clusters).
pub fn classify_components(w: &StateVector, tol: f64) -> Result<OrbitClass> {
    let aligned = w.phase_aligned();
    let residual = aligned
        .amplitudes()
        .iter()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    if residual > tol {
        return Err(Error::NotRealizable { residual });
    }
    let mut values: Vec<f64> = aligned.amplitudes().iter().map(|z| z.re).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for v in values {
        match clusters.last_mut() {
            Some(c) if c[c.len() - 1] - v <= tol => c.push(v),
            _ => clusters.push(vec![v]),
        }
    }
    if clusters.len() > 3 {
        return Err(Error::MoreThanThreeValues {
            count: clusters.len(),
        });
    }
    Ok(OrbitClass {
        distinct_values: clusters
            .iter()
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect(),
        multiplicities: clusters.iter().map(Vec::len).collect(),
    })
}

/// Permutation `k → perm[k]` of basis indices, acting as `e_k → e_{perm[k]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermutationAction {
    perm: Vec<usize>,
}

impl PermutationAction {
    /// `perm` must be a bijection on `0..perm.len()`.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || seen[p] {
                return Err(Error::InvalidPermutation(d));
            }
            seen[p] = true;
        }
        Ok(Self { perm })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            perm: (0..d).collect(),
        }
    }

    pub fn cyclic_shift(d: usize) -> Self {
        Self {
            perm: (0..d).map(|k| (k + 1) % d).collect(),
        }
    }

    pub fn transposition(d: usize, i: usize, j: usize) -> Result<Self> {
        if i >= d || j >= d {
            return Err(Error::InvalidPermutation(d));
        }
        let mut perm: Vec<usize> = (0..d).collect();
        perm.swap(i, j);
        Ok(Self { perm })
    }

    /// All `d!` permutations in lexicographic order.
    pub fn all(d: usize) -> impl Iterator<Item = PermutationAction> {
        (0..d)
            .permutations(d)
            .map(|perm| PermutationAction { perm })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        let d = self.dim();
        if v.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); d];
        for (k, &z) in v.amplitudes().iter().enumerate() {
            out[self.perm[k]] = z;
        }
        StateVector::new(out)
    }

    /// `U ρ U†` for the permutation matrix `U`.
    pub fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let d = self.dim();
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.dim(),
            });
        }
        let mut m = CMatrix::zeros(d, d);
        for j in 0..d {
            for k in 0..d {
                m[(self.perm[j], self.perm[k])] = rho.entry(j, k);
            }
        }
        Ok(DensityMatrix::from_matrix_unchecked(m))
    }
}

/// Applies the permutation to every decomposer; weights unchanged.
pub fn permute_decomposition(
    dec: &ExtremalDecomposition,
    g: &PermutationAction,
) -> Result<ExtremalDecomposition> {
    if dec.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: dec.dim(),
        });
    }
    let members = dec
        .decomposers()
        .iter()
        .map(|v| g.apply(v))
        .collect::<Result<Vec<_>>>()?;
    ExtremalDecomposition::new(dec.weights().to_vec(), members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{overlap, SubalgebraSpec};
    use core::f64::consts::{FRAC_1_SQRT_2, PI};

    fn s(t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            -t * t.ln()
        }
    }

    fn ln3() -> f64 {
        3.0f64.ln()
    }

    #[test]
    fn perm_symmetric_examples() {
        let pure = perm_symmetric_state(3, 1.0).unwrap();
        assert!(pure.distance(&StateVector::uniform(3).projector()) < 1e-15);
        let mixed = perm_symmetric_state(3, 1.0 / 3.0).unwrap();
        assert!(mixed.distance(&DensityMatrix::maximally_mixed(3)) < 1e-15);
        let zero = perm_symmetric_state(3, 0.0).unwrap();
        assert!((zero.entry(0, 1).re + 1.0 / 6.0).abs() < 1e-15);
        assert!(matches!(
            perm_symmetric_state(3, 1.1),
            Err(Error::FOutOfRange { .. })
        ));
    }

    #[test]
    fn perm_symmetric_matches_projector_form() {
        for d in 2..6 {
            for f in [0.0, 0.2, 0.5, 0.9, 1.0] {
                let psi = StateVector::uniform(d).projector();
                let mut expected = CMatrix::identity(d).scale((1.0 - f) / (d as f64 - 1.0));
                expected.add_scaled(f - (1.0 - f) / (d as f64 - 1.0), psi.matrix());
                let rho = perm_symmetric_state(d, f).unwrap();
                assert!(rho.matrix().max_abs_diff(&expected) < 1e-15);
                assert!((overlap(&rho, &StateVector::uniform(d)).unwrap() - f).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn x_and_fidelity() {
        assert!((x_to_fidelity(3, X_STAR).unwrap() - F_STAR).abs() < 1e-7);
        assert_eq!(x_to_fidelity(4, 1.0).unwrap(), 1.0);
        assert!((x_to_fidelity(5, 0.0).unwrap() - 0.2).abs() < 1e-16);
        assert!(matches!(
            x_to_fidelity(3, -0.6),
            Err(Error::XOutOfRange { .. })
        ));
        for d in 2..6 {
            for x in [-1.0 / (d as f64 - 1.0), -0.1, 0.3, 1.0] {
                let f = x_to_fidelity(d, x).unwrap();
                assert!((PermSymmetricState::new(d, f).unwrap().x() - x).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn case1_examples() {
        let (e, dec, lambda) = case1_optimal(0.5, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(lambda, 0.5);
        assert_eq!(dec.decomposers()[0], StateVector::basis(2, 0));
        assert_eq!(dec.decomposers()[1], StateVector::basis(2, 1));

        let (e, _, _) = case1_optimal(0.5, C64::new(0.25, 0.0)).unwrap();
        let p1 = (1.0 + 0.75f64.sqrt()) / 2.0;
        assert!((e - (s(p1) + s(1.0 - p1))).abs() < 1e-15);
        assert!((e - 0.2457754).abs() < 1e-7);

        let (e, dec, lambda) = case1_optimal(0.5, C64::new(0.5, 0.0)).unwrap();
        assert!((e - LN_2).abs() < 1e-15);
        assert_eq!(lambda, 0.5);
        assert_eq!(dec.len(), 1);
        let plus = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        assert!((dec.decomposers()[0].inner(&plus).norm() - 1.0).abs() < 1e-15);

        assert!(matches!(
            case1_optimal(0.5, C64::new(0.6, 0.0)),
            Err(Error::InvalidBlochParams { .. })
        ));
        assert!(matches!(
            case1_optimal(1.5, C64::new(0.0, 0.0)),
            Err(Error::InvalidBlochParams { .. })
        ));
    }

    #[test]
    fn case1_reconstructs_complex_input() {
        let cases = [
            (0.3, C64::new(0.1, -0.35)),
            (0.9, C64::new(-0.2, 0.1)),
            (1.0, C64::new(0.0, 0.0)),
        ];
        for (a, b) in cases {
            let (e, dec, _) = case1_optimal(a, b).unwrap();
            let rho = dec.reconstruct().unwrap();
            assert!((rho.entry(0, 0).re - a).abs() < 1e-12);
            assert!((rho.entry(0, 1) - b).norm() < 1e-12);
            assert!((dec.objective(SubalgebraSpec::Diagonal).unwrap() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn case1_symmetric_examples() {
        assert!((case1_symmetric_entanglement(1.0).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(case1_symmetric_entanglement(0.5).unwrap(), 0.0);
        let (e, _, _) = case1_optimal(0.5, C64::new(0.25, 0.0)).unwrap();
        assert!((case1_symmetric_entanglement(0.75).unwrap() - e).abs() < 1e-14);
    }

    #[test]
    fn orbit_vector_examples() {
        let w = orbit_vector(8.0 / 9.0, 0.0).unwrap();
        let f: f64 = 8.0 / 9.0;
        let big = (f.sqrt() + (2.0 * (1.0 - f)).sqrt()) / 3.0f64.sqrt();
        let small = (f.sqrt() - ((1.0 - f) / 2.0).sqrt()) / 3.0f64.sqrt();
        let amps = w.amplitudes();
        assert!((amps[0].re - big).abs() < 1e-15);
        assert!((amps[1].re - small).abs() < 1e-15);
        assert!((amps[2].re - small).abs() < 1e-15);
        assert!((big - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);

        for theta in [0.0, 0.7, 3.0] {
            let w = orbit_vector(1.0, theta).unwrap();
            assert!((w.inner(&StateVector::uniform(3)).norm() - 1.0).abs() < 1e-15);
        }

        let w = orbit_vector(0.0, -PI / 6.0).unwrap();
        let mut comps: Vec<f64> = w.amplitudes().iter().map(|z| z.re).collect();
        comps.sort_by(f64::total_cmp);
        assert!((comps[0] + FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(comps[1].abs() < 1e-15);
        assert!((comps[2] - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn orbit_vector_is_unit_with_fixed_overlap() {
        for f in [0.0, 0.05, 0.4, 0.9, 1.0] {
            for theta in [0.0, 0.3, 1.9, 4.4] {
                let raw = orbit_components(f, theta);
                let norm: f64 = raw.iter().map(|x| x * x).sum();
                assert!((norm - 1.0).abs() < 1e-12);
                let w = orbit_vector(f, theta).unwrap();
                assert!((w.inner(&StateVector::uniform(3)).norm_sqr() - f).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orbit_reconstructs_symmetric_qutrit() {
        for f in [0.0, 0.1, 8.0 / 9.0, 0.97] {
            for theta in [0.0, 0.4, 2.5] {
                let dec = cyclic_orbit_decomposition(&orbit_vector(f, theta).unwrap()).unwrap();
                let rho = perm_symmetric_state(3, f).unwrap();
                assert!(
                    dec.reconstruct().unwrap().distance(&rho) < 1e-14,
                    "f={f} theta={theta}"
                );
            }
        }
    }

    #[test]
    fn case2_examples() {
        let target = ln3() - LN_2 / 3.0;
        assert!((case2_entanglement(8.0 / 9.0).unwrap() - target).abs() < 1e-12);
        assert!((target - 0.8675632).abs() < 1e-7);
        assert!(case2_entanglement(1.0 / 3.0).unwrap().abs() < 1e-15);
        let at_top = orbit_vector(8.0 / 9.0, 0.0).unwrap();
        let dec = cyclic_orbit_decomposition(&at_top).unwrap();
        assert!((dec.objective(SubalgebraSpec::Diagonal).unwrap() - target).abs() < 1e-14);
        match case2_entanglement(0.95) {
            Err(Error::FOutOfDomain { value, .. }) => {
                assert!((value - case2_formula(0.95).unwrap()).abs() < 1e-16)
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            case2_entanglement(0.01),
            Err(Error::FOutOfDomain { .. })
        ));
        assert!(case2_entanglement(0.888888889).is_ok());
    }

    #[test]
    fn single_orbit_examples() {
        for d in 2..7 {
            assert!(single_orbit_entanglement(d, 1.0 / d as f64).unwrap().abs() < 1e-12);
        }
        assert!((single_orbit_entanglement(3, 8.0 / 9.0).unwrap() - (ln3() - LN_2 / 3.0)).abs() < 1e-14);
        for i in 0..=20 {
            let f = i as f64 / 20.0;
            let a = single_orbit_entanglement(2, f).unwrap();
            let b = case1_symmetric_entanglement(f).unwrap();
            assert!((a - b).abs() < 1e-12, "f={f}");
        }
        assert!((single_orbit_entanglement(2, 0.75).unwrap() - 0.2457754).abs() < 1e-7);
        assert!(matches!(
            single_orbit_entanglement(1, 0.5),
            Err(Error::DimensionTooSmall { .. })
        ));
    }

    #[test]
    fn single_orbit_formula_agrees_with_its_orbit() {
        // cyclic orbit of (√p, √((1−p)/(d−1)), ...) reconstructs ρ_F
        for d in 3..6 {
            for f in [1.0 / d as f64, 0.5, 0.8] {
                let m = d as f64 - 1.0;
                let p = (f.sqrt() + (m * (1.0 - f)).sqrt()).powi(2) / d as f64;
                let mut comps = vec![((1.0 - p) / m).sqrt(); d];
                comps[0] = p.sqrt();
                let dec =
                    cyclic_orbit_decomposition(&StateVector::from_real(&comps).unwrap()).unwrap();
                let rho = perm_symmetric_state(d, f).unwrap();
                assert!(dec.reconstruct().unwrap().distance(&rho) < 1e-12);
                let e = dec.objective(SubalgebraSpec::Diagonal).unwrap();
                assert!((e - single_orbit_entanglement(d, f).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn chord_and_piecewise() {
        assert!((chord_above(3, 1.0).unwrap() - ln3()).abs() < 1e-15);
        assert!((chord_above(3, 8.0 / 9.0).unwrap() - (ln3() - LN_2 / 3.0)).abs() < 1e-14);
        assert_eq!(qutrit_closed_form(0.0).unwrap(), Some(LN_2));
        assert_eq!(qutrit_closed_form(0.03).unwrap(), None);
        assert_eq!(
            qutrit_closed_form(0.5).unwrap(),
            Some(case2_formula(0.5).unwrap())
        );
    }

    #[test]
    fn classify_examples() {
        let class = classify_components(&orbit_vector(8.0 / 9.0, 0.0).unwrap(), 1e-9).unwrap();
        assert_eq!(class.multiplicities, vec![1, 2]);
        assert!((class.distinct_values[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((class.distinct_values[1] - (1.0f64 / 6.0).sqrt()).abs() < 1e-12);

        let class = classify_components(&StateVector::uniform(4), 1e-9).unwrap();
        assert_eq!(class.multiplicities, vec![4]);
        assert!((class.distinct_values[0] - 0.5).abs() < 1e-15);

        let spread =
            StateVector::normalized([0.1, 0.2, 0.3, 0.4].map(|x| C64::new(x, 0.0)).to_vec())
                .unwrap();
        assert!(matches!(
            classify_components(&spread, 1e-9),
            Err(Error::MoreThanThreeValues { count: 4 })
        ));
        let complex =
            StateVector::normalized(vec![C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).unwrap();
        assert!(matches!(
            classify_components(&complex, 1e-5),
            Err(Error::NotRealizable { .. })
        ));
    }

    #[test]
    fn classify_ignores_global_phase() {
        let phase = C64::from_polar(1.0, 1.1);
        let w = orbit_vector(0.5, 0.0).unwrap();
        let rotated = StateVector::new(w.amplitudes().iter().map(|z| z * phase).collect()).unwrap();
        assert_eq!(
            classify_components(&rotated, 1e-9).unwrap().multiplicities,
            vec![1, 2]
        );
    }

    #[test]
    fn permutation_basics() {
        assert!(matches!(
            PermutationAction::new(vec![0, 0, 1]),
            Err(Error::InvalidPermutation(3))
        ));
        assert!(matches!(
            PermutationAction::new(vec![0, 3, 1]),
            Err(Error::InvalidPermutation(3))
        ));
        assert_eq!(PermutationAction::all(3).count(), 6);
        let shift = PermutationAction::cyclic_shift(3);
        let moved = shift.apply(&StateVector::basis(3, 2)).unwrap();
        assert_eq!(moved, StateVector::basis(3, 0));
    }

    #[test]
    fn symmetric_state_is_permutation_invariant() {
        for f in [0.0, 0.3, 0.75, 1.0] {
            let rho = perm_symmetric_state(3, f).unwrap();
            for g in PermutationAction::all(3) {
                assert!(
                    g.conjugate(&rho)
                        .unwrap()
                        .matrix()
                        .max_abs_diff(rho.matrix())
                        <= 1e-14
                );
            }
        }
    }

    #[test]
    fn permute_decomposition_examples() {
        let w = orbit_vector(0.4, 0.3).unwrap();
        let dec = cyclic_orbit_decomposition(&w).unwrap();
        assert_eq!(
            permute_decomposition(&dec, &PermutationAction::identity(3)).unwrap(),
            dec
        );

        let shifted = permute_decomposition(&dec, &PermutationAction::cyclic_shift(3)).unwrap();
        for v in shifted.decomposers() {
            assert!(dec
                .decomposers()
                .iter()
                .any(|u| (u.inner(v).norm() - 1.0).abs() < 1e-14));
        }

        let swap = PermutationAction::transposition(3, 1, 2).unwrap();
        let swapped = permute_decomposition(&dec, &swap).unwrap();
        let sub = SubalgebraSpec::Diagonal;
        assert!((swapped.objective(sub).unwrap() - dec.objective(sub).unwrap()).abs() < 1e-14);
        assert!(
            swapped
                .reconstruct()
                .unwrap()
                .distance(&dec.reconstruct().unwrap())
                < 1e-14
        );

        let wrong = PermutationAction::identity(2);
        assert!(matches!(
            permute_decomposition(&dec, &wrong),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
