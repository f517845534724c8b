#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Entanglement of a state with respect to a subalgebra, computed as a roof
//! over extremal decompositions, with the closed forms known for
//! permutation-symmetric states and the doubling map onto two-party states.

extern crate alloc;

pub mod bipartite;
pub mod decomp;
mod error;
pub mod linalg;
pub mod optimizer;
pub mod qstate;
pub mod symmetric;

pub use bipartite::{
    doubling, embed, entangled_fidelity, eof, eof_restricted, f_double_star, isotropic,
    maximally_entangled, permutation_average, undouble, BipartiteState, CorrelationMatrix,
};
pub use decomp::{
    entropy_of_subalgebra, mixer_ensemble, povm_decomposition, Decomposition,
    ExtremalDecomposition, MixedDecomposition,
};
pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use optimizer::{
    convexity_profile, find_bifurcation, minimize_objective, s_of_f, theta_scan,
    OptimizationResult, OptimizerConfig, RoofSearch, ThetaProfile,
};
pub use qstate::{
    overlap, restrict, shannon_term, validate_density, von_neumann_entropy, DensityMatrix,
    ProbabilityVector, StateVector, SubalgebraSpec,
};
pub use symmetric::{
    case1_optimal, case1_symmetric_entanglement, case2_entanglement, classify_components,
    cyclic_orbit_decomposition, orbit_vector, perm_symmetric_state, permute_decomposition,
    single_orbit_entanglement, qutrit_closed_form, symmetric_closed_form, x_to_fidelity, OrbitClass,
    PermSymmetricState, PermutationAction,
};
