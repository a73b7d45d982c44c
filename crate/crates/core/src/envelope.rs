//! Coefficient frontier `Γ_√G(A)` and `√G`-bound estimates from sampled curves.
//!
//! `(a, b) ∈ Γ` exactly when the line `a² + b²E` dominates `‖A‖_E²` for all
//! `E > 0`. On a grid the curve is known only at samples, so the frontier is
//! built from secants of the concave `value²`, and membership beyond the grid
//! uses the dual multipliers as supergradients: `value²(E') ≤ value²(E) + μ*(E' − E)`.

use crate::error::{Error, Result};
use crate::policy::Tolerances;
use crate::solver::ENormCurve;

/// Coefficients `(a, b)` of a relative bound `‖Aφ‖² ≤ a²‖φ‖² + b²‖√G φ‖²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaPoint {
    pub a: f64,
    pub b: f64,
}

impl GammaPoint {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Gamma point needs finite nonnegative coefficients, got ({a}, {b})"
            )));
        }
        Ok(Self { a, b })
    }

    /// `√(a² + b²E)`.
    pub fn bound_at(&self, energy: f64) -> f64 {
        (self.a * self.a + self.b * self.b * energy).sqrt()
    }
}

/// Lower-left frontier of `Γ`, sorted by `b` ascending.
#[derive(Clone, Debug)]
pub struct GammaFrontier {
    pub points: Vec<GammaPoint>,
}

/// Verdict of [`gamma_membership`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Membership {
    Member,
    /// Certificate: `value²(energy) − (a² + b²·energy) = excess > 0`.
    NonMember {
        energy: f64,
        excess: f64,
    },
    /// Holds on the grid but cannot be certified outside it.
    Undecided,
}

/// Supergradient membership test of `p` against a sampled curve.
pub fn gamma_membership(curve: &ENormCurve, p: GammaPoint) -> Membership {
    let tol = Tolerances::DEFAULT;
    let slack = tol.membership * curve.scale();
    let (a2, b2) = (p.a * p.a, p.b * p.b);
    let line = |e: f64| a2 + b2 * e;

    let mut worst: Option<(f64, f64)> = None;
    for pt in &curve.points {
        let excess = pt.value * pt.value - line(pt.energy);
        if excess > slack && worst.is_none_or(|(_, w)| excess > w) {
            worst = Some((pt.energy, excess));
        }
    }
    if let Some((energy, excess)) = worst {
        return Membership::NonMember { energy, excess };
    }
    let (Some(first), Some(last)) = (curve.points.first(), curve.points.last()) else {
        return Membership::Undecided;
    };

    // Below the grid: value²(E) ≤ f₀ + μ₀(E − E₀); both sides are affine, so check E = 0.
    let f0 = first.value * first.value;
    let head_ok = a2 + slack >= f0 - first.mu_star * first.energy;

    // Above the grid: value²(E) ≤ min(f_n + μ_n(E − E_n), ‖A‖²).
    let cap = curve.pair.a().operator_norm().powi(2);
    let fl = last.value * last.value;
    let tail_ok = if a2 + slack >= cap || b2 + tol.membership >= last.mu_star {
        true
    } else if last.mu_star > 0.0 {
        let e_cap = last.energy + (cap - fl).max(0.0) / last.mu_star;
        line(e_cap) + slack >= cap
    } else {
        false
    };

    if head_ok && tail_ok {
        Membership::Member
    } else {
        Membership::Undecided
    }
}

/// Support lines of `value²` through adjacent grid samples.
pub fn gamma_frontier(curve: &ENormCurve) -> Result<GammaFrontier> {
    let tol = Tolerances::DEFAULT;
    let e = curve.energies();
    let f: Vec<f64> = curve.values().iter().map(|v| v * v).collect();
    if f.is_empty() {
        return Err(Error::BadGrid);
    }
    let scale = curve.scale();
    for k in 1..f.len().saturating_sub(1) {
        let interp = f[k - 1] + (f[k + 1] - f[k - 1]) * (e[k] - e[k - 1]) / (e[k + 1] - e[k - 1]);
        if interp - f[k] > tol.curve_shape * scale {
            return Err(Error::Concavity(k - 1, k, k + 1));
        }
    }

    let mut lines: Vec<(f64, f64)> = Vec::new();
    if f.len() == 1 {
        let p = &curve.points[0];
        lines.push((f[0] - p.mu_star * p.energy, p.mu_star));
    }
    for k in 0..f.len().saturating_sub(1) {
        let slope = (f[k + 1] - f[k]) / (e[k + 1] - e[k]);
        lines.push((f[k] - slope * e[k], slope));
    }
    let mut points: Vec<GammaPoint> = lines
        .into_iter()
        .map(|(c, s)| GammaPoint {
            a: c.max(0.0).sqrt(),
            b: s.max(0.0).sqrt(),
        })
        .collect();
    points.sort_by(|x, y| x.b.total_cmp(&y.b).then(y.a.total_cmp(&x.a)));
    points.dedup_by(|x, y| {
        (x.a - y.a).abs() <= 1e-12 * (1.0 + y.a) && (x.b - y.b).abs() <= 1e-12 * (1.0 + y.b)
    });
    Ok(GammaFrontier { points })
}

/// `min over the frontier of √(a² + b²E)`.
pub fn enorm_from_gamma(frontier: &GammaFrontier, energy: f64) -> f64 {
    frontier
        .points
        .iter()
        .map(|p| p.bound_at(energy))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundMethod {
    FixedTruncationInf,
    LadderExtrapolated,
}

impl BoundMethod {
    pub fn name(self) -> &'static str {
        match self {
            BoundMethod::FixedTruncationInf => "fixed_truncation_inf",
            BoundMethod::LadderExtrapolated => "ladder_extrapolated",
        }
    }
}

/// Estimate of `b_√G(A)` with the ratio sequence `(E, ‖A‖_E/√E)` behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundEstimate {
    pub value: f64,
    pub sequence: Vec<(f64, f64)>,
    pub method: BoundMethod,
    pub uncertainty: f64,
    pub warning: Option<String>,
}

pub const FIXED_TRUNCATION_WARNING: &str = "fixed finite truncation: this is the bound of the \
truncated matrix, which tends to 0 as E grows; use a truncation ladder for unbounded operators";

/// Infimum of the ratio `‖A‖_E/√E` over the grid, attained at the last point.
pub fn gbound_fixed(curve: &ENormCurve) -> BoundEstimate {
    let sequence: Vec<(f64, f64)> = curve
        .points
        .iter()
        .map(|p| (p.energy, p.value / p.energy.sqrt()))
        .collect();
    let value = sequence.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let uncertainty = match sequence.as_slice() {
        [.., x, y] => (x.1 - y.1).abs(),
        _ => 0.0,
    };
    BoundEstimate {
        value: if value.is_finite() { value } else { 0.0 },
        sequence,
        method: BoundMethod::FixedTruncationInf,
        uncertainty,
        warning: Some(FIXED_TRUNCATION_WARNING.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, HermitianMatrix};
    use crate::oscillator::{oscillator_pair, OscillatorOp};
    use crate::solver::{enorm_curve, enorm_dual, OperatorPair};

    fn identity_curve() -> ENormCurve {
        let pair = OperatorPair::new(
            ComplexMatrix::identity(2),
            HermitianMatrix::from_real_diagonal(&[0.0, 1.0]),
        )
        .unwrap();
        enorm_curve(&pair, &[0.25, 0.5, 1.0, 2.0]).unwrap()
    }

    /// Pair with ‖A‖_E² = E for E ≤ 1: A = diag(0, 1), G = diag(0, 1).
    fn linear_curve() -> ENormCurve {
        let pair = OperatorPair::new(
            ComplexMatrix::from_real_diagonal(&[0.0, 1.0]),
            HermitianMatrix::from_real_diagonal(&[0.0, 1.0]),
        )
        .unwrap();
        enorm_curve(&pair, &[0.2, 0.4, 0.6, 0.8]).unwrap()
    }

    #[test]
    fn constant_curve_frontier() {
        let fr = gamma_frontier(&identity_curve()).unwrap();
        assert_eq!(fr.points.len(), 1);
        assert!((fr.points[0].a - 1.0).abs() < 1e-9 && fr.points[0].b.abs() < 1e-6);
        assert!((enorm_from_gamma(&fr, 3.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn linear_curve_frontier() {
        let fr = gamma_frontier(&linear_curve()).unwrap();
        for p in &fr.points {
            assert!(p.a < 1e-6 && (p.b - 1.0).abs() < 1e-6, "{p:?}");
        }
    }

    #[test]
    fn infimum_formula_examples() {
        let fr = GammaFrontier {
            points: vec![GammaPoint::new(1.0, 0.0).unwrap()],
        };
        assert_eq!(enorm_from_gamma(&fr, 17.0), 1.0);
        let fr = GammaFrontier {
            points: vec![
                GammaPoint::new(0.0, 1.0).unwrap(),
                GammaPoint::new(1.0, 0.0).unwrap(),
            ],
        };
        assert_eq!(enorm_from_gamma(&fr, 4.0), 1.0);
        assert!(GammaPoint::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn operator_norm_is_member() {
        let pair = OperatorPair::random(4, 3).unwrap();
        let grid: Vec<f64> = (1..=8).map(|k| 0.1 * k as f64).collect();
        let curve = enorm_curve(&pair, &grid).unwrap();
        let op = pair.a().operator_norm();
        for b in [0.0, 0.5, 3.0] {
            assert_eq!(
                gamma_membership(&curve, GammaPoint::new(op, b).unwrap()),
                Membership::Member
            );
        }
        match gamma_membership(&curve, GammaPoint::new(0.0, 0.0).unwrap()) {
            Membership::NonMember { energy, excess } => {
                assert!(excess > 0.0 && grid.contains(&energy))
            }
            other => panic!("expected non-member, got {other:?}"),
        }
    }

    #[test]
    fn tangent_line_is_member() {
        let pair = OperatorPair::random(5, 8).unwrap();
        let grid: Vec<f64> = (1..=10).map(|k| 0.15 * k as f64).collect();
        let curve = enorm_curve(&pair, &grid).unwrap();
        for k in 1..grid.len() - 1 {
            let pt = &curve.points[k];
            let f = pt.value * pt.value;
            let a2 = f - pt.mu_star * pt.energy;
            let p = GammaPoint::new(a2.max(0.0).sqrt(), pt.mu_star.sqrt()).unwrap();
            assert_eq!(gamma_membership(&curve, p), Membership::Member, "k = {k}");
        }
    }

    #[test]
    fn frontier_points_are_members_and_round_trip() {
        let pair = OperatorPair::random(5, 21).unwrap();
        let grid: Vec<f64> = (1..=12).map(|k| 0.2 * k as f64).collect();
        let curve = enorm_curve(&pair, &grid).unwrap();
        let fr = gamma_frontier(&curve).unwrap();
        assert!(fr
            .points
            .windows(2)
            .all(|w| w[0].b <= w[1].b && w[0].a >= w[1].a - 1e-12));
        for p in &fr.points {
            assert_ne!(
                std::mem::discriminant(&gamma_membership(&curve, *p)),
                std::mem::discriminant(&Membership::NonMember {
                    energy: 0.0,
                    excess: 0.0
                })
            );
        }
        for pt in &curve.points {
            let r = enorm_from_gamma(&fr, pt.energy);
            assert!((r - pt.value).abs() <= 1e-6 * (1.0 + pt.value));
        }
    }

    #[test]
    fn position_below_bound_is_non_member() {
        let pair = oscillator_pair(OscillatorOp::Position, 1.0, 128).unwrap();
        let curve = enorm_curve(&pair, &[0.5, 1.0, 2.0, 4.0]).unwrap();
        let b = 2f64.sqrt() * (1.0 - 0.05);
        assert!(matches!(
            gamma_membership(&curve, GammaPoint::new(0.0, b).unwrap()),
            Membership::NonMember { .. }
        ));
    }

    #[test]
    fn position_frontier_slopes_decrease_toward_bound() {
        let pair = oscillator_pair(OscillatorOp::Position, 1.0, 256).unwrap();
        let grid = [1.0, 2.0, 4.0, 8.0, 12.0];
        let curve = enorm_curve(&pair, &grid).unwrap();
        let fr = gamma_frontier(&curve).unwrap();
        // Sorted by b ascending: the smallest slope belongs to the largest energies.
        let bs: Vec<f64> = fr.points.iter().map(|p| p.b).collect();
        assert!(bs[0] > 2f64.sqrt() && bs[0] < 2f64.sqrt() * 1.05, "{bs:?}");
    }

    #[test]
    fn fixed_bound_examples() {
        let est = gbound_fixed(&identity_curve());
        assert!((est.value - 1.0 / 2f64.sqrt()).abs() < 1e-9);
        assert_eq!(est.method, BoundMethod::FixedTruncationInf);
        assert!(est.warning.is_some());
        assert!(est.sequence.windows(2).all(|w| w[1].1 <= w[0].1));

        let lin = gbound_fixed(&linear_curve());
        assert!((lin.value - 1.0).abs() < 1e-6);

        let pair = OperatorPair::random(4, 2).unwrap();
        let e_max = 1e6 * pair.max_energy();
        let curve = enorm_curve(&pair, &[1.0, 10.0, e_max]).unwrap();
        let est = gbound_fixed(&curve);
        let op = pair.a().operator_norm();
        assert!((est.value - op / e_max.sqrt()).abs() < 1e-9);
        assert!(est.value < 1e-2);
        assert!((enorm_dual(&pair, e_max).unwrap().value - op).abs() < 1e-8);
    }
}
