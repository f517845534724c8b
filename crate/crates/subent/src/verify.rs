//! Acceptance suite shared by `subent verify` and the `acceptance` test target.
//!
//! Each criterion is a function returning a [`Check`] with the measured
//! numbers in its detail string. Tolerances are pinned here.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subent_core::bipartite::f_double_star;
use subent_core::symmetric::{chord_above, F_STAR, F_STAR_STAR, X_STAR};
use subent_core::{
    case1_optimal, case2_entanglement, classify_components, convexity_profile, doubling, embed,
    entangled_fidelity, eof, eof_restricted, find_bifurcation, isotropic, maximally_entangled,
    minimize_objective, mixer_ensemble, perm_symmetric_state, permute_decomposition,
    single_orbit_entanglement, s_of_f, theta_scan, undouble, validate_density, x_to_fidelity,
    BipartiteState, CMatrix, Decomposition, DensityMatrix, OptimizationResult, OptimizerConfig,
    PermutationAction, StateVector, SubalgebraSpec, C64,
};

use crate::output::{emit_scan, OutputFormat};
use crate::scan::{scan, Method};

/// Criteria that fail for mathematical reasons rather than numerical ones.
///
/// `5a`: the orbit minimum `s_of_f` is concave on `(0, F*)`; below the
/// bifurcation the true roof is the tangent chord from `(0, ln 2)` and lies
/// strictly under it, so second differences there are negative.
pub const KNOWN_FAILURES: &[&str] = &["5a"];

pub const CASE1_TOL: f64 = 1e-6;
pub const ANCHOR_EXACT_TOL: f64 = 1e-12;
pub const ANCHOR_NUMERIC_TOL: f64 = 1e-5;
pub const S_OF_F_TOL: f64 = 1e-9;
pub const BIFURCATION_WINDOW: f64 = 5e-4;
pub const BIFURCATION_REFERENCE: f64 = 0.056651;
pub const TWIN_MINIMA_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const CONVEXITY_TOL: f64 = 1e-9;
pub const WITNESS_CENTER: f64 = 5.7e-4;
pub const WITNESS_WINDOW: f64 = 2e-4;
pub const DOUBLING_TOL: f64 = 1e-4;
pub const ROUND_TRIP_TOL: f64 = 1e-14;
pub const SEPARABLE_TOL: f64 = 1e-6;
pub const PURE_EOF_TOL: f64 = 1e-6;
pub const PERMUTATION_TOL: f64 = 1e-12;
pub const REALITY_TOL: f64 = 1e-5;
pub const COMPONENT_TOL: f64 = 1e-4;
pub const MIXER_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Check {
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Check {
    pub fn line(&self, id: &str) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!(
            "{status} [{id}] {}: {} ({:.1}s)",
            self.title, self.detail, self.seconds
        )
    }
}

type Criterion = fn() -> Check;

pub const CRITERIA: &[(&str, Criterion)] = &[
    ("1", case1_oracle),
    ("2", qutrit_anchors),
    ("3", bifurcation),
    ("4", closed_form_identities),
    ("5a", orbit_minimum_convexity),
    ("5b", convexity_loss_witness),
    ("6", doubling_preservation),
    ("7", isotropic_and_embeddings),
    ("8", property_suites),
];

fn timed(title: &'static str, body: impl FnOnce() -> Result<(bool, String), String>) -> Check {
    let start = Instant::now();
    let (passed, detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check {
        title,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn err(e: subent_core::Error) -> String {
    format!("{}: {e}", e.name())
}

/// Accepts `NonConvergence` results too; the checks judge the values.
fn best(r: subent_core::Result<OptimizationResult>) -> Result<OptimizationResult, String> {
    match r {
        Ok(r) => Ok(r),
        Err(subent_core::Error::NonConvergence(r)) => Ok(*r),
        Err(e) => Err(err(e)),
    }
}

fn qubit(a: f64, b: C64) -> Result<DensityMatrix, String> {
    let m = CMatrix::from_row_major(
        2,
        2,
        vec![C64::new(a, 0.0), b, b.conj(), C64::new(1.0 - a, 0.0)],
    )
    .map_err(err)?;
    validate_density(m).map_err(err)
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    crate::scan::fidelity_grid(lo, hi, n)
}

pub fn case1_oracle() -> Check {
    timed("case-1 oracle, 100 random qubit states", || {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = OptimizerConfig::for_dim(2).with_length(4).with_restarts(32);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let a: f64 = rng.random();
            let r = rng.random::<f64>() * (a * (1.0 - a)).sqrt();
            let b = C64::from_polar(r, rng.random_range(0.0..2.0 * PI));
            let (closed, _, _) = case1_optimal(a, b).map_err(err)?;
            let numeric = best(minimize_objective(
                &qubit(a, b)?,
                SubalgebraSpec::Diagonal,
                &cfg,
            ))?;
            worst = worst.max((numeric.value - closed).abs());
        }
        Ok((
            worst <= CASE1_TOL,
            format!("max |numeric - closed| = {worst:.2e} (limit {CASE1_TOL:.0e})"),
        ))
    })
}

pub fn qutrit_anchors() -> Check {
    timed("qutrit anchor values", || {
        let target = 3f64.ln() - LN_2 / 3.0;
        let closed = case2_entanglement(8.0 / 9.0).map_err(err)?;
        let rho = perm_symmetric_state(3, 8.0 / 9.0).map_err(err)?;
        let numeric = best(minimize_objective(
            &rho,
            SubalgebraSpec::Diagonal,
            &OptimizerConfig::for_dim(3),
        ))?
        .value;
        let at_zero = s_of_f(0.0).map_err(err)?.0;
        let (e1, e2, e3) = (
            (closed - target).abs(),
            (numeric - target).abs(),
            (at_zero - LN_2).abs(),
        );
        Ok((
            e1 <= ANCHOR_EXACT_TOL && e2 <= ANCHOR_NUMERIC_TOL && e3 <= S_OF_F_TOL,
            format!("closed err {e1:.1e}, numeric {numeric:.10} err {e2:.1e}, S(0) err {e3:.1e}"),
        ))
    })
}

pub fn bifurcation() -> Check {
    timed("bifurcation of the optimal orbit", || {
        let f_star = find_bifurcation(0.0, 0.2, 1e-5).map_err(err)?;
        let from_x = x_to_fidelity(3, X_STAR).map_err(err)?;
        let minima = theta_scan(0.02, 720)
            .map_err(err)?
            .global_minima_mod_orbit();
        let twins = minima.len() == 2 && (minima[0].1 - minima[1].1).abs() <= TWIN_MINIMA_TOL;
        let near = (f_star - BIFURCATION_REFERENCE).abs() <= BIFURCATION_WINDOW
            && (f_star - from_x).abs() <= BIFURCATION_WINDOW;
        Ok((
            near && twins,
            format!(
                "F* = {f_star:.7} (x* gives {from_x:.7}); {} minima mod 2pi/3 at F = 0.02",
                minima.len()
            ),
        ))
    })
}

pub fn closed_form_identities() -> Check {
    timed("closed-form identities on [F*, 8/9]", || {
        let (mut orbit, mut scan) = (0.0f64, 0.0f64);
        for f in grid(F_STAR, F_STAR_STAR, 100) {
            let c = case2_entanglement(f).map_err(err)?;
            orbit = orbit.max((c - single_orbit_entanglement(3, f).map_err(err)?).abs());
            scan = scan.max((c - s_of_f(f).map_err(err)?.0).abs());
        }
        Ok((
            orbit <= IDENTITY_TOL && scan <= S_OF_F_TOL,
            format!("max |case2 - single orbit| = {orbit:.1e}, max |case2 - S| = {scan:.1e}"),
        ))
    })
}

pub fn orbit_minimum_convexity() -> Check {
    timed("second differences of S(F) on [0, 8/9]", || {
        let fs = grid(0.0, F_STAR_STAR, 90);
        let values = fs
            .iter()
            .map(|&f| s_of_f(f).map(|s| s.0))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let bad = convexity_profile(&fs, &values).map_err(err)?;
        let worst = values
            .windows(3)
            .map(|w| w[0] - 2.0 * w[1] + w[2])
            .fold(f64::INFINITY, f64::min);
        let where_ = if bad.is_empty() {
            String::new()
        } else {
            format!(
                " at F = {:.4}..{:.4}",
                fs[bad[0]],
                fs[*bad.last().unwrap_or(&bad[0])]
            )
        };
        Ok((
            bad.is_empty() && worst >= -CONVEXITY_TOL,
            format!(
                "{} violations, min second difference {worst:.2e}{where_}",
                bad.len()
            ),
        ))
    })
}

pub fn convexity_loss_witness() -> Check {
    timed("convexity-loss witness above 8/9", || {
        let f_c = 0.5 + 2f64.sqrt() / 3.0;
        let gap = s_of_f(f_c).map_err(err)?.0 - chord_above(3, f_c).map_err(err)?;
        Ok((
            (gap - WITNESS_CENTER).abs() <= WITNESS_WINDOW,
            format!("S(F_c) - chord = {gap:.4e} at F_c = {f_c:.7}"),
        ))
    })
}

pub fn doubling_preservation() -> Check {
    timed("doubling preserves the entanglement", || {
        let mut worst = 0.0f64;
        let mut round_trip = 0.0f64;
        for f in [0.2, 0.5, 8.0 / 9.0] {
            let rho = perm_symmetric_state(3, f).map_err(err)?;
            let single = best(minimize_objective(
                &rho,
                SubalgebraSpec::Diagonal,
                &OptimizerConfig::for_dim(3),
            ))?;
            let doubled = doubling(&rho);
            let two = best(eof_restricted(&doubled, &OptimizerConfig::for_dim(3)))?;
            worst = worst.max((two.value - single.value).abs());
            round_trip = round_trip.max(undouble(&doubled).map_err(err)?.distance(&rho));
        }
        Ok((
            worst <= DOUBLING_TOL && round_trip <= ROUND_TRIP_TOL,
            format!("max |restricted eof - diagonal| = {worst:.1e}, round trip {round_trip:.1e}"),
        ))
    })
}

pub fn isotropic_and_embeddings() -> Check {
    timed("isotropic states and embeddings", || {
        let mut separable = Vec::new();
        for d in [2usize, 3] {
            let cfg = OptimizerConfig::for_dim(d)
                .with_restarts(4)
                .with_max_iters(4000);
            separable.push(best(eof(&isotropic(d, 1.0 / d as f64).map_err(err)?, &cfg))?.value);
        }
        let mut pure_err = 0.0f64;
        for d in [2usize, 3] {
            let psi = maximally_entangled(d).map_err(err)?;
            let state = BipartiteState::new(d, psi.projector()).map_err(err)?;
            let r = best(eof(&state, &OptimizerConfig::for_dim(d).with_restarts(4)))?;
            pure_err = pure_err.max((r.value - (d as f64).ln()).abs());
        }
        let (x, y) = (
            C64::new(1.0 / 3f64.sqrt(), 0.0),
            C64::new((2.0f64 / 3.0).sqrt(), 0.0),
        );
        let fid1 = entangled_fidelity(&embed(x, y, 2).map_err(err)?).map_err(err)?;
        let fid2 = entangled_fidelity(&embed(y, x, 2).map_err(err)?).map_err(err)?;
        let fds = f_double_star(3).map_err(err)?;
        let fid_ok = (fid1 - 1.0).abs() <= 1e-15 && (fid2 - 8.0 / 9.0).abs() <= 1e-15;
        let sep_ok = separable.iter().all(|&v| v <= SEPARABLE_TOL);
        Ok((
            sep_ok && pure_err <= PURE_EOF_TOL && fid_ok && fds == 8.0 / 9.0,
            format!(
                "eof at F = 1/d: {:.1e} (d=2), {:.1e} (d=3); pure err {pure_err:.1e}; fidelities {fid1:.16}, {fid2:.16}; F**(3) = {fds}",
                separable[0], separable[1]
            ),
        ))
    })
}

fn random_state(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> Result<DensityMatrix, String> {
    let g: Vec<Vec<C64>> = (0..rank)
        .map(|_| {
            (0..d)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let mut m = CMatrix::zeros(d, d);
    for v in &g {
        m.add_scaled(1.0, &CMatrix::outer(v));
    }
    let tr = m.trace().re;
    validate_density(m.scale(1.0 / tr).hermitian_part()).map_err(err)
}

/// `n × r` matrix with orthonormal columns, by Gram–Schmidt on uniform entries.
fn random_isometry(rng: &mut ChaCha8Rng, n: usize, r: usize) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(r);
    while cols.len() < r {
        let mut v: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        for c in &cols {
            let p: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= p * y;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    CMatrix::from_fn(n, r, |j, k| cols[k][j])
}

fn max_imaginary(v: &StateVector) -> f64 {
    v.phase_aligned()
        .amplitudes()
        .iter()
        .map(|z| z.im.abs())
        .fold(0.0, f64::max)
}

pub fn property_suites() -> Check {
    timed(
        "permutation, reality, component and determinism properties",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            let mut notes = Vec::new();
            let mut ok = true;

            // Permuting every member of an optimal decomposition.
            let mut perm_err = 0.0f64;
            let mut states = Vec::new();
            for f in [0.02, 0.5, 0.95] {
                states.push(perm_symmetric_state(3, f).map_err(err)?);
            }
            states.push(random_state(&mut rng, 3, 3)?);
            for rho in &states {
                let r = best(minimize_objective(
                    rho,
                    SubalgebraSpec::Diagonal,
                    &OptimizerConfig::for_dim(3).with_restarts(8),
                ))?;
                for g in PermutationAction::all(3) {
                    let moved = permute_decomposition(&r.decomposition, &g).map_err(err)?;
                    let dv =
                        (moved.objective(SubalgebraSpec::Diagonal).map_err(err)? - r.value).abs();
                    let target = g.conjugate(rho).map_err(err)?;
                    let dr = moved.reconstruct().map_err(err)?.distance(&target);
                    perm_err = perm_err.max(dv);
                    ok &= dv <= PERMUTATION_TOL && dr <= 1e-8;
                }
            }
            notes.push(format!("permuted objective err {perm_err:.1e}"));

            // Optimal decomposers of symmetric states: real, at most three values.
            let mut worst_im = 0.0f64;
            let mut patterns_ok = true;
            for d in 2..=5usize {
                for f in [0.0, 0.1, 0.3, 0.6, 0.75, 0.9, 0.97] {
                    let rho = perm_symmetric_state(d, f).map_err(err)?;
                    let r = best(minimize_objective(
                        &rho,
                        SubalgebraSpec::Diagonal,
                        &OptimizerConfig::for_dim(d).with_restarts(8),
                    ))?;
                    for w in r.decomposition.decomposers() {
                        worst_im = worst_im.max(max_imaginary(w));
                        patterns_ok &= classify_components(w, COMPONENT_TOL).is_ok();
                    }
                }
            }
            ok &= worst_im <= REALITY_TOL && patterns_ok;
            notes.push(format!("max imaginary residual {worst_im:.1e}"));
            notes.push(format!(
                "three-value pattern {}",
                if patterns_ok { "holds" } else { "violated" }
            ));

            // Mixer ensembles reconstruct their state.
            let mut mixer_err = 0.0f64;
            for _ in 0..40 {
                let d = rng.random_range(2..=4usize);
                let rank = rng.random_range(1..=d);
                let rho = random_state(&mut rng, d, rank)?;
                let n = rng.random_range(rank..=d * d);
                let dec = mixer_ensemble(&rho, &random_isometry(&mut rng, n, rank)).map_err(err)?;
                mixer_err = mixer_err.max(dec.reconstruct().map_err(err)?.distance(&rho));
            }
            ok &= mixer_err <= MIXER_TOL;
            notes.push(format!("mixer reconstruction err {mixer_err:.1e}"));

            // Same seed, same bytes.
            let cfg = OptimizerConfig::for_dim(3).with_restarts(4).with_seed(7);
            let mut first = Vec::new();
            let mut second = Vec::new();
            emit_scan(
                &scan(3, 0.02, 0.98, 5, Method::Both, &cfg).map_err(err)?,
                OutputFormat::Csv,
                &mut first,
            )
            .map_err(|e| e.to_string())?;
            emit_scan(
                &scan(3, 0.02, 0.98, 5, Method::Both, &cfg).map_err(err)?,
                OutputFormat::Csv,
                &mut second,
            )
            .map_err(|e| e.to_string())?;
            let identical = first == second;
            ok &= identical;
            notes.push(format!(
                "repeated scan CSV {}",
                if identical {
                    "byte-identical"
                } else {
                    "differs"
                }
            ));

            Ok((ok, notes.join("; ")))
        },
    )
}
