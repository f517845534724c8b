use proptest::prelude::*;

use subent_core::{
    case1_optimal, doubling, embed, entangled_fidelity, isotropic, maximally_entangled, mixer_ensemble, overlap,
    perm_symmetric_state, permutation_average, permute_decomposition, povm_decomposition, restrict, undouble,
    validate_density, von_neumann_entropy, CMatrix, Decomposition, DensityMatrix, ExtremalDecomposition,
    PermutationAction, StateVector, SubalgebraSpec, C64,
};

const DIAG: SubalgebraSpec = SubalgebraSpec::Diagonal;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn vector(d: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(complex(), d)
        .prop_filter("zero vector", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v).unwrap())
}

/// `G G† / Tr` for a random square `G`, full rank almost surely.
fn density(d: usize) -> impl Strategy<Value = DensityMatrix> {
    prop::collection::vec(complex(), d * d).prop_map(move |g| {
        let g = CMatrix::from_row_major(d, d, g).unwrap();
        let m = &g * &g.adjoint();
        let tr = m.trace().re;
        validate_density(m.scale(1.0 / tr)).unwrap()
    })
}

fn sized_density() -> impl Strategy<Value = DensityMatrix> {
    (2usize..=4).prop_flat_map(density)
}

/// Orthonormal columns by Gram–Schmidt on a random `n×r` matrix.
fn isometry(n: usize, r: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), n * r).prop_filter_map("degenerate columns", move |raw| {
        let mut cols: Vec<Vec<C64>> = Vec::new();
        for k in 0..r {
            let mut c: Vec<C64> = (0..n).map(|j| raw[j * r + k]).collect();
            for q in &cols {
                let p: C64 = q.iter().zip(&c).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in c.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
            let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            cols.push(c.into_iter().map(|z| z / norm).collect());
        }
        Some(CMatrix::from_fn(n, r, |j, k| cols[k][j]))
    })
}

fn ensemble(d: usize) -> impl Strategy<Value = ExtremalDecomposition> {
    (1usize..=5)
        .prop_flat_map(move |n| {
            (prop::collection::vec(0.05..1.0f64, n), prop::collection::vec(vector(d), n))
        })
        .prop_map(|(w, vs)| {
            let total: f64 = w.iter().sum();
            ExtremalDecomposition::new(w.iter().map(|x| x / total).collect(), vs).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_bounded_by_the_dimension(rho in sized_density()) {
        let s = von_neumann_entropy(&rho).unwrap();
        prop_assert!(s >= -1e-12);
        prop_assert!(s <= (rho.dim() as f64).ln() + 1e-12);
    }

    #[test]
    fn pinching_never_lowers_entropy(rho in sized_density()) {
        let pinched = restrict(&rho, DIAG).unwrap();
        prop_assert!(von_neumann_entropy(&pinched).unwrap() >= von_neumann_entropy(&rho).unwrap() - 1e-10);
    }

    #[test]
    fn partial_trace_keeps_the_trace(rho in density(6)) {
        let a = restrict(&rho, SubalgebraSpec::FactorA { d_a: 2, d_b: 3 }).unwrap();
        let b = restrict(&rho, SubalgebraSpec::FactorA { d_a: 3, d_b: 2 }).unwrap();
        prop_assert!((a.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert!((b.matrix().trace().re - 1.0).abs() < 1e-12);
        prop_assert_eq!(a.dim(), 2);
    }

    #[test]
    fn overlap_is_a_probability(rho in density(3), phi in vector(3)) {
        let o = overlap(&rho, &phi).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&o));
        prop_assert!((overlap(&phi.projector(), &phi).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixer_ensembles_reconstruct_the_state(
        (rho, mixer) in (2usize..=4).prop_flat_map(|d| (density(d), (d..=d * d).prop_flat_map(move |n| isometry(n, d))))
    ) {
        let dec = mixer_ensemble(&rho, &mixer).unwrap();
        prop_assert!(dec.reconstruct().unwrap().distance(&rho) <= 1e-10);
        prop_assert!((dec.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn objective_ignores_order_and_phases(dec in ensemble(3), shift in 0usize..5, phase in 0.0..6.3f64) {
        let n = dec.len();
        let order: Vec<usize> = (0..n).map(|j| (j + shift) % n).collect();
        let weights: Vec<f64> = order.iter().map(|&j| dec.weights()[j]).collect();
        let rot = C64::from_polar(1.0, phase);
        let vectors: Vec<StateVector> = order
            .iter()
            .map(|&j| StateVector::new(dec.decomposers()[j].amplitudes().iter().map(|z| z * rot).collect()).unwrap())
            .collect();
        let other = ExtremalDecomposition::new(weights, vectors).unwrap();
        prop_assert!((other.objective(DIAG).unwrap() - dec.objective(DIAG).unwrap()).abs() < 1e-12);
        prop_assert!(other.reconstruct().unwrap().distance(&dec.reconstruct().unwrap()) < 1e-12);
    }

    #[test]
    fn objective_lies_between_zero_and_log_d(dec in ensemble(4)) {
        let v = dec.objective(DIAG).unwrap();
        prop_assert!((-1e-12..=4f64.ln() + 1e-12).contains(&v));
    }

    #[test]
    fn povm_components_mix_back(rho in density(3), p in 0.05..0.95f64) {
        // diagonal two-outcome POVM
        let m0 = CMatrix::diagonal(&[p, 1.0 - p, 0.5]);
        let m1 = CMatrix::diagonal(&[1.0 - p, p, 0.5]);
        let dec = povm_decomposition(&rho, &[m0, m1]).unwrap();
        prop_assert!(dec.reconstruct().unwrap().distance(&rho) < 1e-10);
    }

    #[test]
    fn relabelling_preserves_the_objective(dec in ensemble(3), k in 0usize..6) {
        let g = PermutationAction::all(3).nth(k).unwrap();
        let moved = permute_decomposition(&dec, &g).unwrap();
        prop_assert!((moved.objective(DIAG).unwrap() - dec.objective(DIAG).unwrap()).abs() <= 1e-12);
        let conj = g.conjugate(&dec.reconstruct().unwrap()).unwrap();
        prop_assert!(moved.reconstruct().unwrap().distance(&conj) < 1e-12);
    }

    #[test]
    fn symmetric_states_are_fixed_by_relabelling(d in 2usize..=5, f in 0.0..=1.0f64) {
        let rho = perm_symmetric_state(d, f).unwrap();
        let g = PermutationAction::cyclic_shift(d);
        prop_assert!(g.conjugate(&rho).unwrap().distance(&rho) < 1e-14);
        let uniform = StateVector::uniform(d);
        prop_assert!((overlap(&rho, &uniform).unwrap() - f).abs() < 1e-12);
    }

    #[test]
    fn qubit_optimum_reconstructs(a in 0.0..=1.0f64, b in complex()) {
        let bound = (a * (1.0 - a)).sqrt();
        let b = if b.norm() > bound { b * (bound / b.norm()) * 0.999 } else { b };
        let (value, dec, _) = case1_optimal(a, b).unwrap();
        let rho = validate_density(CMatrix::from_row_major(2, 2, vec![C64::new(a, 0.0), b, b.conj(), C64::new(1.0 - a, 0.0)]).unwrap()).unwrap();
        prop_assert!(dec.reconstruct().unwrap().distance(&rho) <= 1e-12);
        prop_assert!((dec.objective(DIAG).unwrap() - value).abs() < 1e-12);
    }

    #[test]
    fn doubling_round_trips(rho in sized_density()) {
        let doubled = doubling(&rho);
        prop_assert!(undouble(&doubled).unwrap().distance(&rho) < 1e-14);
        prop_assert!(doubled.diagonal_class_residual() < 1e-14);
    }

    #[test]
    fn permutation_average_is_idempotent(phi in vector(9)) {
        let once = permutation_average(&phi).unwrap();
        let eig = once.state().eigen().unwrap();
        let mut twice = CMatrix::zeros(9, 9);
        for (k, &mu) in eig.values.iter().enumerate() {
            if mu > 1e-14 {
                let v = StateVector::new(eig.vector(k)).unwrap();
                twice.add_scaled(mu, permutation_average(&v).unwrap().state().matrix());
            }
        }
        prop_assert!(twice.max_abs_diff(once.state().matrix()) < 1e-12);
        let psi = maximally_entangled(3).unwrap();
        prop_assert!((overlap(once.state(), &psi).unwrap() - entangled_fidelity(&phi).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn isotropic_fidelity_is_the_parameter(d in 2usize..=4, f in 0.0..=1.0f64) {
        let state = isotropic(d, f).unwrap();
        let psi = maximally_entangled(d).unwrap();
        prop_assert!((overlap(state.state(), &psi).unwrap() - f).abs() < 1e-12);
    }

    #[test]
    fn embedding_is_normalized(z1 in complex(), z2 in complex(), n in 2usize..=5) {
        prop_assume!(z1.norm_sqr() + z2.norm_sqr() > 1e-3);
        let norm = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
        let w = embed(z1 / norm, z2 / norm, n).unwrap();
        let total: f64 = w.amplitudes().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        prop_assert_eq!(w.dim(), (n + 1) * (n + 1));
    }
}
