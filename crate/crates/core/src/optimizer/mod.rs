//! Roof minimization over extremal decompositions, plus the one-angle orbit
//! scan used for permutation-symmetric qutrits.
//!
//! An ensemble of length `n` is stored as unnormalized vectors
//! `u_j = Σ_k M[j,k] √μ_k e_k` where `M` is an `n×r` isometry. Every
//! extremal decomposition of `ρ` has this form, and left-multiplying `M` by a
//! unitary keeps it an isometry, so a local search can move between
//! decompositions with plane (Givens) rotations acting on pairs of rows
//! without ever leaving the feasible set. Each pair subproblem has two real
//! parameters and is solved with a downhill simplex.

mod convexity;
mod simplex;
mod theta;

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::decomp::{scaled_support, Decomposition, ExtremalDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ZERO};
use crate::qstate::{DensityMatrix, PureEntropy, SubalgebraSpec};

pub use convexity::{convexity_profile, CONVEXITY_TOL};
pub use theta::{find_bifurcation, s_of_f, theta_scan, ThetaProfile, S_OF_F_GRID};

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use simplex::{nelder_mead, SimplexOptions};

/// Members whose directions overlap beyond `1 − MERGE_GAP` are fused.
const MERGE_GAP: f64 = 1e-7;
/// Members lighter than this are removed before the ensemble is re-balanced.
const DROP_WEIGHT: f64 = 1e-7;
const MAX_COMPACTIONS: usize = 6;
const PAIR_STEP_MAX: f64 = 0.6;
const PAIR_STEP_MIN: f64 = 1e-5;
/// Below this objective value the search switches to the smooth surrogate
/// for a while; the entropy's `−p ln p` cusp makes plain descent towards
/// zero-entropy members sublinear.
const POLISH_BELOW: f64 = 1e-3;
const POLISH_TOL: f64 = 1e-14;
/// Once a sweep gains less than `tol`, descent continues until the gain
/// drops below `tol · REFINE_FACTOR`, for at most `REFINE_SWEEPS` sweeps.
/// Amplitudes are only pinned to about the square root of the objective
/// tolerance, so this extra stretch is what makes the returned vectors
/// usable for structural checks.
const REFINE_FACTOR: f64 = 1e-3;
const REFINE_SWEEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Ensemble size.
    pub length: usize,
    pub restarts: usize,
    pub seed: u64,
    /// A restart has converged once a full sweep improves the objective by
    /// less than this.
    pub tol: f64,
    /// Sweep budget per restart.
    pub max_iters: usize,
}

impl OptimizerConfig {
    pub const DEFAULT_RESTARTS: usize = 32;
    pub const DEFAULT_SEED: u64 = 0;
    pub const DEFAULT_TOL: f64 = 1e-9;
    pub const DEFAULT_MAX_ITERS: usize = 1000;

    /// Defaults for a `dim`-dimensional state: length `dim²`.
    pub fn for_dim(dim: usize) -> Self {
        Self {
            length: dim * dim,
            restarts: Self::DEFAULT_RESTARTS,
            seed: Self::DEFAULT_SEED,
            tol: Self::DEFAULT_TOL,
            max_iters: Self::DEFAULT_MAX_ITERS,
        }
    }

    pub fn with_length(mut self, length: usize) -> Self {
        self.length = length;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 1 {
            return Err(Error::InvalidConfig("length must be at least 1"));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidConfig("restarts must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive"));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationResult {
    /// Best objective value, nats.
    pub value: f64,
    /// Decomposition attaining `value`, each decomposer phase-aligned.
    pub decomposition: ExtremalDecomposition,
    pub converged: bool,
    /// Max minus min over the restart optima.
    pub restart_spread: f64,
    /// Index of the restart that produced `decomposition`.
    pub best_restart: usize,
}

/// Outcome of a single local search.
#[derive(Clone, Debug)]
pub struct RestartOutcome {
    pub value: f64,
    pub converged: bool,
    pub sweeps: usize,
    vectors: Vec<Vec<C64>>,
}

/// A prepared roof minimization. Restarts are independent and can be run in
/// any order or in parallel; [`RoofSearch::select`] combines them
/// deterministically by restart index.
#[derive(Clone, Debug)]
pub struct RoofSearch {
    dim: usize,
    sub: SubalgebraSpec,
    cfg: OptimizerConfig,
    mu: Vec<f64>,
    support: Vec<Vec<C64>>,
}

impl RoofSearch {
    pub fn new(rho: &DensityMatrix, sub: SubalgebraSpec, cfg: &OptimizerConfig) -> Result<Self> {
        cfg.validate()?;
        sub.check(rho.dim())?;
        let (mu, support) = scaled_support(rho)?;
        if cfg.length < support.len() {
            return Err(Error::LengthBelowRank {
                length: cfg.length,
                rank: support.len(),
            });
        }
        if cfg.length > rho.dim() * rho.dim() {
            return Err(Error::InvalidConfig("length exceeds d^2"));
        }
        Ok(Self {
            dim: rho.dim(),
            sub,
            cfg: *cfg,
            mu,
            support,
        })
    }

    pub fn config(&self) -> &OptimizerConfig {
        &self.cfg
    }

    pub fn rank(&self) -> usize {
        self.support.len()
    }

    /// Runs local search number `restart` from its own random starting
    /// point. The stream depends only on `(cfg.seed, restart)`.
    pub fn run(&self, restart: usize) -> RestartOutcome {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(restart as u64);
        let mixer = random_isometry(&mut rng, self.cfg.length, self.rank());
        let mut ens = Ensemble::new(self.dim, self.sub, self.mix(&mixer));

        let budget = self.cfg.max_iters;
        let (mut converged, mut sweeps) = ens.descend(self.cfg.tol, budget, POLISH_BELOW);
        if !converged && sweeps < budget {
            // stopped early on a small value
            let mut trial = ens.clone();
            trial.set_linear(true);
            let (_, s) = trial.descend(POLISH_TOL, (budget - sweeps).div_ceil(2), 0.0);
            sweeps += s;
            trial.set_linear(false);
            if trial.total() < ens.total() {
                ens = trial;
            }
            let (c, s) = ens.descend(self.cfg.tol, budget.saturating_sub(sweeps), 0.0);
            converged = c;
            sweeps += s;
        }
        for _ in 0..MAX_COMPACTIONS {
            if sweeps >= budget || !self.compact(&mut ens) {
                break;
            }
            let (c, s) = ens.descend(self.cfg.tol, budget - sweeps, 0.0);
            converged = c;
            sweeps += s;
        }
        let vectors = ens.vectors();
        let value = ens.total();
        RestartOutcome {
            value,
            converged,
            sweeps,
            vectors,
        }
    }

    /// Best restart (lowest value; values within `tol` go to the lower
    /// index). Errors with `NonConvergence` if no restart converged.
    pub fn select(&self, outcomes: &[RestartOutcome]) -> Result<OptimizationResult> {
        let first = outcomes
            .first()
            .ok_or(Error::InvalidConfig("no restarts were run"))?;
        let mut best = 0;
        let (mut lo, mut hi) = (first.value, first.value);
        for (i, o) in outcomes.iter().enumerate().skip(1) {
            if o.value < outcomes[best].value - self.cfg.tol {
                best = i;
            }
            lo = lo.min(o.value);
            hi = hi.max(o.value);
        }
        let decomposition =
            ExtremalDecomposition::from_unnormalized(&outcomes[best].vectors)?.phase_aligned();
        let value = decomposition.objective(self.sub)?;
        let converged = outcomes.iter().any(|o| o.converged);
        let result = OptimizationResult {
            value,
            decomposition,
            converged,
            restart_spread: hi - lo,
            best_restart: best,
        };
        if converged {
            Ok(result)
        } else {
            Err(Error::NonConvergence(Box::new(result)))
        }
    }

    fn mix(&self, mixer: &CMatrix) -> Vec<Vec<C64>> {
        (0..mixer.rows())
            .map(|j| {
                let mut u = vec![ZERO; self.dim];
                for (k, s) in self.support.iter().enumerate() {
                    let c = mixer[(j, k)];
                    for (ui, si) in u.iter_mut().zip(s) {
                        *ui += c * si;
                    }
                }
                u
            })
            .collect()
    }

    /// Fuses near-parallel members and drops negligible ones, then restores
    /// an exact decomposition of `ρ`. Returns `false` if nothing changed.
    fn compact(&self, ens: &mut Ensemble) -> bool {
        ens.fuse_parallel();
        let keep: Vec<usize> = (0..ens.n)
            .filter(|&j| ens.weight(j) >= DROP_WEIGHT)
            .collect();
        if keep.len() == ens.n || keep.len() < self.rank() {
            return false;
        }
        // coordinates in the scaled eigenbasis: M[j,k] = ⟨s_k|u_j⟩ / μ_k
        let r = self.rank();
        let mut m = CMatrix::from_fn(keep.len(), r, |row, k| {
            linalg::dot(&self.support[k], ens.member(keep[row])) / self.mu[k]
        });
        if !lowdin(&mut m) {
            return false;
        }
        *ens = Ensemble::new(self.dim, self.sub, self.mix(&m));
        true
    }
}

/// Replaces `m` by the closest isometry `m (m†m)^{-1/2}`.
fn lowdin(m: &mut CMatrix) -> bool {
    let gram = &m.adjoint() * &*m;
    let Ok(eig) = linalg::hermitian_eigen(&gram) else {
        return false;
    };
    if eig.values.iter().any(|&v| !(v > 1e-8)) {
        return false;
    }
    let inv_root = eig.map_values(|v| 1.0 / v.sqrt());
    *m = &*m * &inv_root;
    true
}

/// Haar-distributed `n×r` isometry.
fn random_isometry(rng: &mut ChaCha8Rng, n: usize, r: usize) -> CMatrix {
    loop {
        let mut m = CMatrix::from_fn(n, r, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im)
        });
        if linalg::orthonormalize_columns(&mut m) {
            return m;
        }
    }
}

/// Mutable ensemble with cached per-member contributions
/// `‖u_j‖² S(restrict(û_j))`, or the linear-entropy surrogate.
#[derive(Clone)]
struct Ensemble {
    d: usize,
    n: usize,
    linear: bool,
    u: Vec<C64>,
    contrib: Vec<f64>,
    steps: Vec<f64>,
    eval: PureEntropy,
    a: Vec<C64>,
    b: Vec<C64>,
}

impl Ensemble {
    fn new(d: usize, sub: SubalgebraSpec, vectors: Vec<Vec<C64>>) -> Self {
        let n = vectors.len();
        let u: Vec<C64> = vectors.into_iter().flatten().collect();
        let mut eval = PureEntropy::new(sub);
        let contrib = u.chunks(d).map(|v| eval.weighted(v)).collect();
        Self {
            d,
            n,
            linear: false,
            u,
            contrib,
            steps: vec![PAIR_STEP_MAX / 2.0; n * n],
            eval,
            a: vec![ZERO; d],
            b: vec![ZERO; d],
        }
    }

    fn score(eval: &mut PureEntropy, linear: bool, v: &[C64]) -> f64 {
        if linear {
            eval.weighted_linear(v)
        } else {
            eval.weighted(v)
        }
    }

    fn set_linear(&mut self, linear: bool) {
        self.linear = linear;
        for j in 0..self.n {
            let v = &self.u[j * self.d..(j + 1) * self.d];
            self.contrib[j] = Self::score(&mut self.eval, linear, v);
        }
    }

    fn member(&self, j: usize) -> &[C64] {
        &self.u[j * self.d..(j + 1) * self.d]
    }

    fn weight(&self, j: usize) -> f64 {
        linalg::norm_sqr(self.member(j))
    }

    fn total(&self) -> f64 {
        self.contrib.iter().sum()
    }

    fn vectors(&self) -> Vec<Vec<C64>> {
        self.u.chunks(self.d).map(<[C64]>::to_vec).collect()
    }

    /// Sweeps over all member pairs until a sweep gains less than `tol`
    /// (converged, then refined) or the total drops below `stop_below` (not
    /// converged).
    fn descend(&mut self, tol: f64, budget: usize, stop_below: f64) -> (bool, usize) {
        let mut converged_at = None;
        for sweep in 1..=budget {
            let mut gain = 0.0;
            for i in 0..self.n {
                for j in i + 1..self.n {
                    gain += self.relax_pair(i, j);
                }
            }
            match converged_at {
                None if gain < tol => converged_at = Some(sweep),
                None if self.total() < stop_below => return (false, sweep),
                _ => {}
            }
            if let Some(at) = converged_at {
                if gain < tol * REFINE_FACTOR || sweep - at >= REFINE_SWEEPS {
                    return (true, sweep);
                }
            }
        }
        (converged_at.is_some(), budget)
    }

    /// Writes `G(z)·(u_i, u_j)` into the scratch vectors, where
    /// `G(z) = [[cos|z|, −e], [ē, cos|z|]]` with `e = z sin|z|/|z|`.
    fn rotate_into(&mut self, i: usize, j: usize, z: &[f64; 2]) {
        let r = z[0].hypot(z[1]);
        let c = r.cos();
        let sinc = if r < 1e-6 {
            1.0 - r * r / 6.0
        } else {
            r.sin() / r
        };
        let e = C64::new(z[0] * sinc, z[1] * sinc);
        let (ui, uj) = (i * self.d, j * self.d);
        for k in 0..self.d {
            let (x, y) = (self.u[ui + k], self.u[uj + k]);
            self.a[k] = x * c - e * y;
            self.b[k] = e.conj() * x + y * c;
        }
    }

    fn pair_value(&mut self, i: usize, j: usize, z: &[f64; 2]) -> f64 {
        self.rotate_into(i, j, z);
        Self::score(&mut self.eval, self.linear, &self.a)
            + Self::score(&mut self.eval, self.linear, &self.b)
    }

    /// Optimizes the rotation of members `i` and `j`; returns the gain.
    fn relax_pair(&mut self, i: usize, j: usize) -> f64 {
        let before = self.contrib[i] + self.contrib[j];
        if self.weight(i) == 0.0 && self.weight(j) == 0.0 {
            return 0.0;
        }
        let slot = i * self.n + j;
        let opts = SimplexOptions {
            step: self.steps[slot],
            xtol: 1e-8,
            ftol: 1e-16,
            max_evals: 400,
        };
        let out = nelder_mead(|z| self.pair_value(i, j, z), [0.0, 0.0], before, &opts);
        let moved = out.x[0].hypot(out.x[1]);
        if !(out.value < before) || moved == 0.0 {
            self.steps[slot] = (self.steps[slot] * 0.5).max(PAIR_STEP_MIN);
            return 0.0;
        }
        self.steps[slot] = (2.0 * moved).clamp(PAIR_STEP_MIN, PAIR_STEP_MAX);
        self.rotate_into(i, j, &out.x);
        let d = self.d;
        self.u[i * d..(i + 1) * d].copy_from_slice(&self.a);
        self.u[j * d..(j + 1) * d].copy_from_slice(&self.b);
        self.contrib[i] = Self::score(&mut self.eval, self.linear, &self.a);
        self.contrib[j] = Self::score(&mut self.eval, self.linear, &self.b);
        (before - self.contrib[i] - self.contrib[j]).max(0.0)
    }

    /// Rotates the whole weight of `u_j` into `u_i` whenever the two are
    /// parallel up to `MERGE_GAP` in fidelity.
    fn fuse_parallel(&mut self) {
        for i in 0..self.n {
            for j in i + 1..self.n {
                let (wi, wj) = (self.weight(i), self.weight(j));
                if wi == 0.0 || wj == 0.0 {
                    continue;
                }
                let ov = linalg::dot(self.member(i), self.member(j));
                if ov.norm_sqr() < (1.0 - MERGE_GAP) * wi * wj {
                    continue;
                }
                // u_j ≈ α u_i; the rotation with cos = 1/√(1+|α|²),
                // e = −conj(α)/√(1+|α|²) sends u_j to its residual.
                let alpha = ov / wi;
                let c = 1.0 / (1.0 + alpha.norm_sqr()).sqrt();
                let d = self.d;
                for k in 0..d {
                    let (x, y) = (self.u[i * d + k], self.u[j * d + k]);
                    self.u[i * d + k] = (x + alpha.conj() * y) * c;
                    self.u[j * d + k] = (y - alpha * x) * c;
                }
                for m in [i, j] {
                    let v = &self.u[m * d..(m + 1) * d];
                    self.contrib[m] = Self::score(&mut self.eval, self.linear, v);
                }
            }
        }
    }
}

/// Sequential [`RoofSearch`]: all restarts in index order.
pub fn minimize_objective(
    rho: &DensityMatrix,
    sub: SubalgebraSpec,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    let search = RoofSearch::new(rho, sub, cfg)?;
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts).map(|r| search.run(r)).collect();
    search.select(&outcomes)
}

/// Golden-section search for a minimum of `f` on `[lo, hi]` down to a
/// bracket of width `tol`. Returns `(x, f(x))`.
pub(crate) fn golden_section(
    mut f: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> (f64, f64) {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}
