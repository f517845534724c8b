use std::f64::consts::{FRAC_PI_6, LN_2, TAU};

use subent_core::symmetric::{case2_formula, chord_above, F_STAR, F_STAR_STAR};
use subent_core::{
    case2_entanglement, classify_components, convexity_profile, cyclic_orbit_decomposition, find_bifurcation,
    orbit_vector, permute_decomposition, single_orbit_entanglement, s_of_f, theta_scan, x_to_fidelity, Decomposition,
    Error, PermutationAction, SubalgebraSpec,
};

fn near_mod(t: f64, target: f64, period: f64, tol: f64) -> bool {
    let r = (t - target).rem_euclid(period);
    r < tol || period - r < tol
}

#[test]
fn scan_at_eight_ninths_has_one_orbit_minimum() {
    let p = theta_scan(8.0 / 9.0, 360).unwrap();
    let minima = p.global_minima_mod_orbit();
    assert_eq!(minima.len(), 1);
    assert!(near_mod(minima[0].0, 0.0, TAU / 3.0, 1e-6));
    assert!((minima[0].1 - (3f64.ln() - LN_2 / 3.0)).abs() < 1e-12);
    assert_eq!(p.grid.len(), 360);
    assert!(p.minima.iter().all(|m| (0.0..TAU).contains(&m.0)));
}

#[test]
fn scan_at_one_is_flat() {
    let p = theta_scan(1.0, 64).unwrap();
    assert!(p.values.iter().all(|v| (v - 3f64.ln()).abs() < 1e-12));
    assert!((p.min_value() - 3f64.ln()).abs() < 1e-12);
}

#[test]
fn scan_at_zero_sits_at_sixths() {
    let p = theta_scan(0.0, 720).unwrap();
    assert!((p.min_value() - LN_2).abs() < 1e-12);
    for (t, v) in &p.minima {
        assert!((v - LN_2).abs() < 1e-12);
        assert!(near_mod(*t, FRAC_PI_6, TAU / 6.0, 1e-6), "{t}");
    }
    let v = orbit_vector(0.0, -FRAC_PI_6).unwrap();
    let mut comps: Vec<f64> = v.amplitudes().iter().map(|z| z.re).collect();
    comps.sort_by(f64::total_cmp);
    let h = 0.5f64.sqrt();
    assert!((comps[0] + h).abs() < 1e-12 && comps[1].abs() < 1e-12 && (comps[2] - h).abs() < 1e-12);
}

#[test]
fn scan_rejects_bad_input() {
    assert!(matches!(theta_scan(1.2, 64), Err(Error::FOutOfRange { .. })));
    assert!(matches!(theta_scan(0.5, 8), Err(Error::GridTooSmall(8))));
    assert!(matches!(s_of_f(-0.1), Err(Error::FOutOfRange { .. })));
}

#[test]
fn orbit_minimum_matches_single_orbit_formula() {
    for i in 0..50 {
        let f = F_STAR + (F_STAR_STAR - F_STAR) * i as f64 / 49.0;
        let c = case2_entanglement(f).unwrap();
        assert!((c - single_orbit_entanglement(3, f).unwrap()).abs() <= 1e-12);
        assert!((c - s_of_f(f).unwrap().0).abs() <= 1e-9, "F = {f}");
    }
    assert!((s_of_f(0.5).unwrap().0 - case2_formula(0.5).unwrap()).abs() <= 1e-12);
}

#[test]
fn two_orbits_below_the_bifurcation() {
    let (value, minima) = s_of_f(0.02).unwrap();
    assert_eq!(minima.len(), 2);
    let scan = theta_scan(0.02, 720).unwrap().global_minima_mod_orbit();
    assert!((scan[0].1 - scan[1].1).abs() <= 1e-9);
    assert!(value < case2_formula(0.02).unwrap());

    // Each generator has three distinct components, and a transposition
    // carries one orbit onto the other at equal cost.
    let w_plus = orbit_vector(0.02, minima[0]).unwrap();
    let w_minus = orbit_vector(0.02, minima[1]).unwrap();
    let class = classify_components(&w_plus, 1e-6).unwrap();
    assert_eq!(class.multiplicities, vec![1, 1, 1]);

    let orbit = cyclic_orbit_decomposition(&w_plus).unwrap();
    let partner = cyclic_orbit_decomposition(&w_minus).unwrap();
    let swapped = permute_decomposition(&orbit, &PermutationAction::transposition(3, 1, 2).unwrap()).unwrap();
    let diag = SubalgebraSpec::Diagonal;
    assert!((swapped.objective(diag).unwrap() - orbit.objective(diag).unwrap()).abs() < 1e-12);
    // same set of rays as the partner orbit
    for v in swapped.decomposers() {
        let best = partner.decomposers().iter().map(|u| u.inner(v).norm()).fold(0.0, f64::max);
        assert!((best - 1.0).abs() < 1e-6, "overlap {best}");
    }
}

#[test]
fn bifurcation_location() {
    let f_star = find_bifurcation(0.0, 0.2, 1e-5).unwrap();
    assert!((f_star - 0.0566511).abs() < 5e-4, "{f_star}");
    assert!((x_to_fidelity(3, -0.4150234).unwrap() - 0.0566511).abs() < 1e-7);
    assert!(matches!(find_bifurcation(0.5, 0.8, 1e-5), Err(Error::NoBracket)));
    assert!(matches!(find_bifurcation(0.0, 0.03, 1e-5), Err(Error::NoBracket)));
}

#[test]
fn convexity_is_lost_above_eight_ninths() {
    let fs: Vec<f64> = (0..21).map(|i| 0.9 + 0.005 * i as f64).collect();
    let values: Vec<f64> = fs.iter().map(|&f| s_of_f(f).unwrap().0).collect();
    assert!(!convexity_profile(&fs, &values).unwrap().is_empty());

    let f_c = 0.5 + 2f64.sqrt() / 3.0;
    let p = 9.0 * f_c - 8.0;
    let chord = p * 3f64.ln() + (1.0 - p) * (3f64.ln() - LN_2 / 3.0);
    assert!((chord - chord_above(3, f_c).unwrap()).abs() < 1e-14);
    let gap = s_of_f(f_c).unwrap().0 - chord;
    assert!((gap - 5.7e-4).abs() < 2e-4, "{gap}");
}

/// The orbit minimum is concave just above `F = 0`, so it is not the roof
/// there; the three-orbit regime starts at the bifurcation.
#[test]
fn orbit_minimum_is_concave_below_the_bifurcation() {
    let fs: Vec<f64> = (0..90).map(|i| F_STAR_STAR * i as f64 / 89.0).collect();
    let values: Vec<f64> = fs.iter().map(|&f| s_of_f(f).unwrap().0).collect();
    let bad = convexity_profile(&fs, &values).unwrap();
    assert!(!bad.is_empty());
    assert!(bad.iter().all(|&i| fs[i] < F_STAR));
}
