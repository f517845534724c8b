use alloc::boxed::Box;

use crate::optimizer::OptimizationResult;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("trace {trace} is not 1")]
    NotUnitTrace { trace: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("argument {value} outside [0, 1]")]
    DomainError { value: f64 },
    #[error("Jacobi eigensolver did not converge for dimension {dim}")]
    EigenSolver { dim: usize },
    #[error("invalid POVM: {0}")]
    InvalidPovm(&'static str),
    #[error("mixer columns are not orthonormal (residual {residual:e})")]
    NotIsometry { residual: f64 },
    #[error("mixer has {columns} columns but the state has rank {rank}")]
    RankMismatch { rank: usize, columns: usize },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(&'static str),
    #[error("ensemble length {length} is below the state rank {rank}")]
    LengthBelowRank { length: usize, rank: usize },
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("no restart met the convergence tolerance (best value {})", .0.value)]
    NonConvergence(Box<OptimizationResult>),
    #[error("fidelity {f} outside [0, 1]")]
    FOutOfRange { f: f64 },
    #[error("fidelity {f} outside the proven domain of the closed form (formula value {value})")]
    FOutOfDomain { f: f64, value: f64 },
    #[error("off-diagonal parameter {x} outside [-1/(d-1), 1]")]
    XOutOfRange { x: f64 },
    #[error("invalid 2x2 state parameters (a = {a}, |b|^2 = {b_sqr})")]
    InvalidBlochParams { a: f64, b_sqr: f64 },
    #[error("theta grid needs at least 16 points, got {0}")]
    GridTooSmall(usize),
    #[error("predicate takes the same value at both ends of the interval")]
    NoBracket,
    #[error("grid is not strictly increasing with uniform spacing")]
    NonUniformGrid,
    #[error("vector is not real up to a global phase (residual {residual:e})")]
    NotRealizable { residual: f64 },
    #[error("vector has {count} distinct component values")]
    MoreThanThreeValues { count: usize },
    #[error("state is not in the diagonal class (stray entry {residual:e})")]
    NotInDiagonalClass { residual: f64 },
    #[error("dimension {n} is below the minimum {min}")]
    DimensionTooSmall { n: usize, min: usize },
    #[error("dimension {n} is above the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("not a permutation of 0..{0}")]
    InvalidPermutation(usize),
}

impl Error {
    /// Stable identifier printed by front ends.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotSquare { .. } => "NotSquare",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotUnitTrace { .. } => "NotUnitTrace",
            Error::NotPositive { .. } => "NotPositive",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::DomainError { .. } => "DomainError",
            Error::EigenSolver { .. } => "EigenSolver",
            Error::InvalidPovm(_) => "InvalidPOVM",
            Error::NotIsometry { .. } => "NotIsometry",
            Error::RankMismatch { .. } => "RankMismatch",
            Error::InvalidDecomposition(_) => "InvalidDecomposition",
            Error::LengthBelowRank { .. } => "LengthBelowRank",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NonConvergence(_) => "NonConvergence",
            Error::FOutOfRange { .. } => "FOutOfRange",
            Error::FOutOfDomain { .. } => "FOutOfDomain",
            Error::XOutOfRange { .. } => "XOutOfRange",
            Error::InvalidBlochParams { .. } => "InvalidBlochParams",
            Error::GridTooSmall(_) => "GridTooSmall",
            Error::NoBracket => "NoBracket",
            Error::NonUniformGrid => "NonUniformGrid",
            Error::NotRealizable { .. } => "NotRealizable",
            Error::MoreThanThreeValues { .. } => "MoreThanThreeValues",
            Error::NotInDiagonalClass { .. } => "NotInDiagonalClass",
            Error::DimensionTooSmall { .. } => "DimensionTooSmall",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::InvalidPermutation(_) => "InvalidPermutation",
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
