use alloc::boxed::Box;
use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid {n_theta}x{n_phi} is under-resolved (minimum 8x5)")]
    UnderResolved { n_theta: usize, n_phi: usize },
    #[error("node index {index} out of range (grid has {count} nodes)")]
    InvalidNode { index: usize, count: usize },
    #[error("cycle basis is empty")]
    EmptyBasis,

    #[error("non-finite matrix entry at node {node}")]
    NonFinite { node: usize },
    #[error("field expects a {expected} point")]
    DomainMismatch { expected: &'static str },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not normal (relative commutator residual {residual:e})")]
    NotNormal { residual: f64 },
    #[error("eigen-solver failed to meet its residual contract ({residual:e})")]
    SolverFailure { residual: f64 },
    #[error("eigenvalue gap {gap:e} below {tol:e}; projector formula would divide by ~0")]
    GapUnderflow { gap: f64, tol: f64 },
    #[error("ambiguous eigenvalue matching at node {node}; retry at finer resolution")]
    AmbiguousMatching { node: usize },
    #[error("ordering certificate failed on edge ({from}, {to}), mismatch ratio {ratio:.3}; retry at finer resolution")]
    Monodromy { from: usize, to: usize, ratio: f64 },

    #[error("point within finite-difference step of a pole (phi = {phi})")]
    ChartBoundary { phi: f64 },
    #[error("overlap trace {overlap:e} below 1e-3 on plaquette {plaquette}; mesh too coarse for this bundle")]
    Resolution { plaquette: usize, overlap: f64 },
    #[error("rounding residual {residual:.3} on cycle {cycle} exceeds 0.1")]
    Inconclusive { cycle: usize, residual: f64 },

    #[error("projector contract violated: {what}")]
    Contract { what: &'static str },
    #[error("theta undefined: characteristic polynomials differ (max deviation {deviation:e})")]
    CharPolyMismatch { deviation: f64 },
    #[error("theta undefined: eigenvalue orderings differ at node {node}")]
    OrderingMismatch { node: usize },

    #[error("classes belong to different ring models")]
    MixedRingModels,
    #[error("unsupported class degree {degree}")]
    Degree { degree: u32 },

    #[error("infeasible Chern tuple: entries sum to {sum}, but the Whitney sum formula forces 0")]
    Infeasible { sum: i64 },
    #[error("need at least {min} bands, got {found}")]
    TooFewBands { min: usize, found: usize },
    #[error("lines fail to span at node {node} (smallest singular value {sigma:e})")]
    Degenerate { node: usize, sigma: f64 },
    #[error("at node {node}: {source}")]
    AtNode { node: usize, source: Box<Error> },
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_node(self, node: usize) -> Self {
        match self {
            e @ (Error::AtNode { .. } | Error::NonFinite { .. }) => e,
            e => Error::AtNode { node, source: Box::new(e) },
        }
    }
}
