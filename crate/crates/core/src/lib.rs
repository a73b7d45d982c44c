//! Energy-constrained operator norms `‖A‖_E^G`, relative-boundedness
//! frontiers `Γ_√G(A)` and `√G`-bounds on finite-dimensional truncations.
//!
//! * [`linalg`]: dense complex matrices, Hermitian eigensystems, states.
//! * [`solver`]: E-norms via Lagrangian duality, with oracle and primal routes.
//! * [`envelope`]: coefficient frontiers, membership certificates, bound estimates.
//! * [`oscillator`]: Fock-basis `q`, `p`, `N` and truncation ladders.
//! * [`channel`]: tensor-extension inequality and energy amplification of Kraus maps.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod envelope;
pub mod error;
pub mod linalg;
pub mod oscillator;
pub mod policy;
pub mod solver;

pub use channel::{
    extension_inequality_check, sample_constrained_pair, y_phi, ConstrainedVectorSample,
    ExtensionCheck, KrausMap,
};
pub use envelope::{
    enorm_from_gamma, gamma_frontier, gamma_membership, gbound_fixed, BoundEstimate, BoundMethod,
    GammaFrontier, GammaPoint, Membership,
};
pub use error::{Error, Result};
pub use linalg::{
    expectation, gram, hermitian_eigensystem, random_pure_state, tensor, ComplexMatrix,
    DensityMatrix, Eigensystem, HermitianMatrix, PureState, C64,
};
pub use oscillator::{
    build_ladder_ops, converged_enorm, gbound_ladder, oscillator_pair, ConvergedENorm,
    FockTruncation, LadderOps, LadderRecord, OscillatorOp, TruncationLadder,
};
pub use policy::Tolerances;
pub use solver::{
    enorm_curve, enorm_dual, enorm_oracle, enorm_primal_pure, enorm_purified, ENormCurve,
    ENormPoint, OperatorPair, OracleBounds,
};
