//! Numeric policy shared by every module.
//!
//! All comparison slacks live here so a test run can tighten or loosen them in
//! one place. Relative tolerances are scaled by the quantity named on the field.

/// Tolerance record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max Hermitian asymmetry, relative to the max-abs entry.
    pub hermitian: f64,
    /// Smallest eigenvalue allowed for a PSD matrix or density matrix.
    pub psd: f64,
    /// Allowed deviation of a density-matrix trace from one.
    pub trace: f64,
    /// Squared-norm slack for sub-normalized pure states.
    pub state_norm: f64,
    /// `λ_min(G)` at or below this counts as a zero ground energy.
    pub ground_zero: f64,
    /// Energies within this distance above `λ_min(G)` are treated as infeasible.
    pub infeasible_margin: f64,
    /// Width of the degenerate top eigenspace, relative to `1 + max|λ|`.
    pub top_window: f64,
    /// Dual bisection stopping width, relative to `1 + μ`.
    pub mu_width: f64,
    /// Allowed primal-dual gap, relative to `1 + value²`.
    pub gap: f64,
    /// Witness energy slack, relative to `E`.
    pub witness_energy: f64,
    /// Curve concavity and ratio-monotonicity slack, relative to the curve scale.
    pub curve_shape: f64,
    /// Curve monotonicity slack (absolute, on values).
    pub curve_monotone: f64,
    /// Membership slack, relative to the curve scale.
    pub membership: f64,
    /// Kraus completeness slack on `λ_max(Σ K†K) - 1`.
    pub kraus: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-12,
        psd: 1e-10,
        trace: 1e-10,
        state_norm: 1e-12,
        ground_zero: 1e-8,
        infeasible_margin: 1e-12,
        top_window: 1e-8,
        mu_width: 1e-12,
        gap: 1e-7,
        witness_energy: 1e-8,
        curve_shape: 1e-7,
        curve_monotone: 1e-9,
        membership: 1e-9,
        kraus: 1e-10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
