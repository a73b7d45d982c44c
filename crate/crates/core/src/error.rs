use thiserror::Error;

use crate::oscillator::TruncationLadder;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix entries: expected {expected} values, found {found}")]
    EntryCount { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: max asymmetry {asymmetry:.3e} (max entry {scale:.3e})")]
    NotHermitian { asymmetry: f64, scale: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("energy {energy} is infeasible: must exceed the ground energy {ground:.3e}")]
    InfeasibleEnergy { energy: f64, ground: f64 },

    #[error(
        "operation needs a zero ground energy, but min eigenvalue of G is {min_eigenvalue:.3e}"
    )]
    GroundEnergyNotZero { min_eigenvalue: f64 },

    #[error("resource guard: size {requested} exceeds limit {limit}")]
    ResourceLimit { requested: usize, limit: usize },

    #[error("eigendecomposition failed to converge")]
    Eigen,

    #[error("duality gap {gap:.3e} exceeds allowance {allowed:.3e} at E = {energy}")]
    DualityGap { energy: f64, gap: f64, allowed: f64 },

    #[error("energy grid must be non-empty and strictly increasing")]
    BadGrid,

    #[error("curve invariant `{invariant}` violated at grid index {index} (excess {excess:.3e})")]
    CurveInvariant {
        invariant: &'static str,
        index: usize,
        excess: f64,
    },

    #[error("value squared not concave on grid triple ({0}, {1}, {2})")]
    Concavity(usize, usize, usize),

    #[error("at E = {energy}: {source}")]
    AtEnergy {
        energy: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("truncation ladder did not converge below d_max = {d_max}")]
    Convergence {
        d_max: usize,
        ladder: Box<TruncationLadder>,
    },

    /// `ratios` pairs `(x, ‖A‖_E/√E)` with `x` the truncation dimension at one
    /// energy (`axis = "dim"`) or the energy itself (`axis = "energy"`).
    #[error("ratio ‖A‖_E/√E increases along {axis} ({ratios:?}); operator is not relatively bounded on this ladder")]
    Divergent {
        axis: &'static str,
        ratios: Vec<(f64, f64)>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Kraus operators violate sum K†K <= I: max eigenvalue {max_eigenvalue:.12}")]
    KrausNotContractive { max_eigenvalue: f64 },

    #[error("sampling failed: {0}")]
    Sampling(String),
}

impl Error {
    pub(crate) fn at_energy(energy: f64, source: Error) -> Self {
        Error::AtEnergy {
            energy,
            source: Box::new(source),
        }
    }
}
