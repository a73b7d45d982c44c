//! Truncated harmonic oscillator in the Fock basis and truncation ladders.
//!
//! Levels are 0-indexed; `a|n⟩ = √n |n−1⟩`. The number operator is the exact
//! spectral truncation `diag(0, 1, …, d−1)`; the truncated `a a† − I` is wrong
//! in its top diagonal entry.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::envelope::{BoundEstimate, BoundMethod};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64, ZERO};
use crate::solver::{enorm_dual, OperatorPair};

/// Fock space cut at `dim` levels for an oscillator of frequency `omega`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockTruncation {
    dim: usize,
    omega: f64,
}

impl FockTruncation {
    pub fn new(dim: usize, omega: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParameter(format!(
                "Fock truncation needs at least 2 levels, got {dim}"
            )));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "oscillator frequency must be positive, got {omega}"
            )));
        }
        Ok(Self { dim, omega })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

/// Ladder, quadrature and number operators on one truncation.
#[derive(Clone, Debug)]
pub struct LadderOps {
    pub a: ComplexMatrix,
    pub a_dag: ComplexMatrix,
    pub q: HermitianMatrix,
    pub p: HermitianMatrix,
    pub n: HermitianMatrix,
}

pub fn build_ladder_ops(t: &FockTruncation) -> LadderOps {
    let d = t.dim;
    let w = t.omega;
    let a = ComplexMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    });
    let a_dag = a.adjoint();
    let qs = 1.0 / (2.0 * w).sqrt();
    let ps = (w / 2.0).sqrt();
    // q = (a + a†)/√(2ω), p = −i√(ω/2)(a − a†); both tridiagonal.
    let q = ComplexMatrix::from_fn(d, d, |i, j| {
        let s = if j == i + 1 {
            (j as f64).sqrt()
        } else if i == j + 1 {
            (i as f64).sqrt()
        } else {
            0.0
        };
        C64::new(s * qs, 0.0)
    });
    let p = ComplexMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            C64::new(0.0, -(j as f64).sqrt() * ps)
        } else if i == j + 1 {
            C64::new(0.0, (i as f64).sqrt() * ps)
        } else {
            ZERO
        }
    });
    let levels: Vec<f64> = (0..d).map(|k| k as f64).collect();
    LadderOps {
        a,
        a_dag,
        q: HermitianMatrix::new(q).expect("q is Hermitian by construction"),
        p: HermitianMatrix::new(p).expect("p is Hermitian by construction"),
        n: HermitianMatrix::from_real_diagonal(&levels),
    }
}

/// Which oscillator observable plays the role of `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OscillatorOp {
    Position,
    Momentum,
    Number,
}

impl OscillatorOp {
    pub fn symbol(self) -> &'static str {
        match self {
            OscillatorOp::Position => "q",
            OscillatorOp::Momentum => "p",
            OscillatorOp::Number => "N",
        }
    }

    /// Known bracket `(lower, upper)` for `‖op‖_E^N`: strict lower, inclusive upper.
    /// `None` for the number operator.
    pub fn enorm_bracket(self, omega: f64, energy: f64) -> Option<(f64, f64)> {
        let (lo, hi) = (2.0 * energy + 0.5, 2.0 * energy + 1.0);
        match self {
            OscillatorOp::Position => Some(((lo / omega).sqrt(), (hi / omega).sqrt())),
            OscillatorOp::Momentum => Some(((lo * omega).sqrt(), (hi * omega).sqrt())),
            OscillatorOp::Number => None,
        }
    }
}

impl fmt::Display for OscillatorOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for OscillatorOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" | "position" => Ok(OscillatorOp::Position),
            "p" | "momentum" => Ok(OscillatorOp::Momentum),
            "N" | "n" | "number" => Ok(OscillatorOp::Number),
            other => Err(Error::InvalidParameter(format!(
                "unknown oscillator operator `{other}` (expected q, p or N)"
            ))),
        }
    }
}

/// `(op, N)` on `dim` Fock levels.
pub fn oscillator_pair(op: OscillatorOp, omega: f64, dim: usize) -> Result<OperatorPair> {
    let ops = build_ladder_ops(&FockTruncation::new(dim, omega)?);
    let a = match op {
        OscillatorOp::Position => ops.q.into_complex(),
        OscillatorOp::Momentum => ops.p.into_complex(),
        OscillatorOp::Number => ops.n.clone().into_complex(),
    };
    OperatorPair::new(a, ops.n)
}

/// One rung: value of the E-norm at a given truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderRecord {
    pub energy: f64,
    pub dim: usize,
    pub value: f64,
}

/// Final value for one energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergedENorm {
    pub energy: f64,
    pub value: f64,
    pub dim_used: usize,
    /// `|Δ| / (1 + value)` between the last two rungs.
    pub achieved_tol: f64,
}

/// Dimension schedule with per-rung records and converged values.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationLadder {
    pub op: OscillatorOp,
    pub omega: f64,
    pub dims: Vec<usize>,
    pub records: Vec<LadderRecord>,
    pub converged: Vec<ConvergedENorm>,
}

/// First rung of every ladder.
pub const LADDER_START_DIM: usize = 16;
pub const DEFAULT_LADDER_TOL: f64 = 1e-8;
pub const DEFAULT_DMAX: usize = 512;
/// Geometric energy schedule used by [`gbound_ladder`] by default.
pub const DEFAULT_SCHEDULE: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    Ok(())
}

/// Doubling ladder `16, 32, …` until successive values differ by less than
/// `tol·(1 + value)`.
pub fn converged_enorm(
    op: OscillatorOp,
    omega: f64,
    energy: f64,
    tol: f64,
    d_max: usize,
) -> Result<(ConvergedENorm, Vec<LadderRecord>)> {
    check_tol(tol)?;
    if !(energy > 0.0) {
        return Err(Error::InfeasibleEnergy {
            energy,
            ground: 0.0,
        });
    }
    if d_max < 2 * LADDER_START_DIM {
        return Err(Error::InvalidParameter(format!(
            "d_max must allow at least two rungs (>= {}), got {d_max}",
            2 * LADDER_START_DIM
        )));
    }
    let mut records: Vec<LadderRecord> = Vec::new();
    let mut dim = LADDER_START_DIM;
    while dim <= d_max {
        let pair = oscillator_pair(op, omega, dim)?;
        let value = enorm_dual(&pair, energy)?.value;
        if let Some(prev) = records.last() {
            if prev.value - value > 1e-9 * (1.0 + value) {
                return Err(Error::CurveInvariant {
                    invariant: "value non-decreasing in truncation dimension",
                    index: records.len(),
                    excess: prev.value - value,
                });
            }
            let achieved = (value - prev.value).abs() / (1.0 + value);
            records.push(LadderRecord { energy, dim, value });
            if achieved < tol {
                let out = ConvergedENorm {
                    energy,
                    value,
                    dim_used: dim,
                    achieved_tol: achieved,
                };
                return Ok((out, records));
            }
        } else {
            records.push(LadderRecord { energy, dim, value });
        }
        dim *= 2;
    }
    Err(Error::Convergence {
        d_max,
        ladder: Box::new(TruncationLadder {
            op,
            omega,
            dims: records.iter().map(|r| r.dim).collect(),
            records,
            converged: Vec::new(),
        }),
    })
}

/// Intercept of the least-squares polynomial of `degree` in `1/E` through `seq`.
#[allow(clippy::needless_range_loop)]
fn extrapolate_ratio(seq: &[(f64, f64)], degree: usize) -> f64 {
    let k = degree + 1;
    // Normal equations, solved by Gaussian elimination with partial pivoting.
    let mut m = vec![vec![0.0; k + 1]; k];
    for &(e, r) in seq {
        let x = 1.0 / e;
        for i in 0..k {
            for j in 0..k {
                m[i][j] += x.powi((i + j) as i32);
            }
            m[i][k] += r * x.powi(i as i32);
        }
    }
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for row in col + 1..k {
            let f = m[row][col] / m[col][col];
            for c in col..=k {
                m[row][c] -= f * m[col][c];
            }
        }
    }
    let mut coef = vec![0.0; k];
    for row in (0..k).rev() {
        let tail: f64 = (row + 1..k).map(|c| m[row][c] * coef[c]).sum();
        coef[row] = (m[row][k] - tail) / m[row][row];
    }
    coef[0]
}

/// Fit degree: quadratic in `1/E` when it leaves a residual degree of freedom.
fn fit_degree(points: usize) -> usize {
    points.saturating_sub(2).clamp(1, 2)
}

/// `√N`-bound of `op` from converged ratios `‖op‖_E/√E` along `schedule`.
pub fn gbound_ladder(
    op: OscillatorOp,
    omega: f64,
    schedule: &[f64],
    tol: f64,
    d_max: usize,
) -> Result<(BoundEstimate, TruncationLadder)> {
    if schedule.len() < 2 || schedule.windows(2).any(|w| !(w[1] > w[0])) || schedule[0] <= 0.0 {
        return Err(Error::BadGrid);
    }
    let results: Vec<Result<(ConvergedENorm, Vec<LadderRecord>)>> = schedule
        .par_iter()
        .map(|&e| converged_enorm(op, omega, e, tol, d_max))
        .collect();

    let mut records = Vec::new();
    let mut converged = Vec::new();
    let assemble = |records: Vec<LadderRecord>, converged: Vec<ConvergedENorm>| {
        let mut dims: Vec<usize> = records.iter().map(|r| r.dim).collect();
        dims.sort_unstable();
        dims.dedup();
        TruncationLadder {
            op,
            omega,
            dims,
            records,
            converged,
        }
    };
    for (res, &e) in results.into_iter().zip(schedule) {
        match res {
            Ok((c, recs)) => {
                records.extend(recs);
                converged.push(c);
            }
            Err(Error::Convergence { ladder, .. }) if rung_ratios_grow(&ladder.records) => {
                let ratios = ladder
                    .records
                    .iter()
                    .map(|r| (r.dim as f64, r.value / e.sqrt()))
                    .collect();
                return Err(Error::Divergent {
                    axis: "dim",
                    ratios,
                });
            }
            // Everything computed so far, including the failing energy's rungs.
            Err(Error::Convergence {
                ladder: failed,
                d_max,
            }) => {
                records.extend(failed.records);
                return Err(Error::Convergence {
                    d_max,
                    ladder: Box::new(assemble(records, converged)),
                });
            }
            Err(err) => return Err(Error::at_energy(e, err)),
        }
    }
    let ladder = TruncationLadder {
        op,
        omega,
        dims: assemble(records.clone(), Vec::new()).dims,
        records,
        converged,
    };

    let sequence: Vec<(f64, f64)> = ladder
        .converged
        .iter()
        .map(|c| (c.energy, c.value / c.energy.sqrt()))
        .collect();
    if sequence
        .windows(2)
        .any(|w| w[1].1 > w[0].1 + 1e-9 * (1.0 + w[0].1))
    {
        return Err(Error::Divergent {
            axis: "energy",
            ratios: sequence,
        });
    }
    let last = sequence.last().unwrap().1;
    let degree = fit_degree(sequence.len());
    let b = extrapolate_ratio(&sequence, degree).clamp(0.0, last);
    let b_lower = extrapolate_ratio(&sequence, degree - 1).clamp(0.0, last);
    let estimate = BoundEstimate {
        value: b,
        uncertainty: (b_lower - b).abs(),
        method: BoundMethod::LadderExtrapolated,
        sequence,
        warning: None,
    };
    Ok((estimate, ladder))
}

/// Ratios growing by more than 10% per doubling: no finite limit in sight.
fn rung_ratios_grow(records: &[LadderRecord]) -> bool {
    records.len() >= 2 && records.windows(2).all(|w| w[1].value > 1.1 * w[0].value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::tensor;

    fn exact_position(omega: f64, e: f64) -> f64 {
        // Squeezed vacuum with mean excitation E saturates ⟨q²⟩.
        (e.sqrt() + (e + 1.0).sqrt()) / (2.0 * omega).sqrt()
    }

    #[test]
    fn two_level_block() {
        let ops = build_ladder_ops(&FockTruncation::new(2, 1.0).unwrap());
        let s = 0.5f64.sqrt();
        assert!((ops.q.get(0, 1).re - s).abs() < 1e-15 && (ops.q.get(1, 0).re - s).abs() < 1e-15);
        assert_eq!(ops.q.get(0, 0), ZERO);
        assert_eq!(ops.n, HermitianMatrix::from_real_diagonal(&[0.0, 1.0]));
    }

    #[test]
    fn canonical_commutator_off_the_edge() {
        let d = 8;
        for omega in [0.5, 1.0, 3.0] {
            let ops = build_ladder_ops(&FockTruncation::new(d, omega).unwrap());
            let q = ops.q.as_complex();
            let p = ops.p.as_complex();
            let comm = q.matmul(p).unwrap().sub(&p.matmul(q).unwrap()).unwrap();
            for i in 0..d - 1 {
                for j in 0..d - 1 {
                    let want = if i == j { C64::new(0.0, 1.0) } else { ZERO };
                    assert!((comm.get(i, j) - want).norm() < 1e-12, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn number_operator_vs_truncated_products() {
        let d = 6;
        let ops = build_ladder_ops(&FockTruncation::new(d, 1.0).unwrap());
        // a†a of the truncated a is already diag(0..d−1).
        let ada = ops.a_dag.matmul(&ops.a).unwrap();
        assert!(ada.sub(ops.n.as_complex()).unwrap().max_abs() < 1e-12);
        // a a† − I deviates from N only in the top level.
        let aad_minus_i = ops
            .a
            .matmul(&ops.a_dag)
            .unwrap()
            .sub(&ComplexMatrix::identity(d))
            .unwrap();
        let diff = aad_minus_i.sub(ops.n.as_complex()).unwrap();
        for i in 0..d {
            for j in 0..d {
                if (i, j) != (d - 1, d - 1) {
                    assert!(diff.get(i, j).norm() < 1e-12, "({i},{j})");
                }
            }
        }
        assert!((diff.get(d - 1, d - 1).re + d as f64).abs() < 1e-12);
    }

    #[test]
    fn quadratures_hermitian_and_tensor_compatible() {
        let ops = build_ladder_ops(&FockTruncation::new(5, 2.0).unwrap());
        let q = ops.q.as_complex();
        assert_eq!(q.adjoint(), *q);
        let t = tensor(q, &ComplexMatrix::identity(1));
        assert_eq!(t, *q);
    }

    #[test]
    fn bad_truncation_rejected() {
        assert!(FockTruncation::new(1, 1.0).is_err());
        assert!(FockTruncation::new(4, 0.0).is_err());
        assert!("x".parse::<OscillatorOp>().is_err());
        assert_eq!("q".parse::<OscillatorOp>().unwrap(), OscillatorOp::Position);
    }

    #[test]
    fn converged_values_in_bracket() {
        for op in [OscillatorOp::Position, OscillatorOp::Momentum] {
            let (c, recs) = converged_enorm(op, 1.0, 1.0, 1e-9, 512).unwrap();
            let (lo, hi) = op.enorm_bracket(1.0, 1.0).unwrap();
            assert!(c.value > lo && c.value <= hi + 1e-6, "{op}: {}", c.value);
            assert!((c.value - exact_position(1.0, 1.0)).abs() < 1e-8);
            assert!(recs.windows(2).all(|w| w[1].value >= w[0].value - 1e-12));
        }
    }

    #[test]
    fn omega_scaling() {
        let (c1, _) = converged_enorm(OscillatorOp::Position, 1.0, 1.0, 1e-10, 512).unwrap();
        let (c4, _) = converged_enorm(OscillatorOp::Position, 4.0, 1.0, 1e-10, 512).unwrap();
        assert!((c4.value - 0.5 * c1.value).abs() < 1e-8);
        let (p4, _) = converged_enorm(OscillatorOp::Momentum, 4.0, 1.0, 1e-10, 512).unwrap();
        assert!((p4.value - 2.0 * c1.value).abs() < 1e-8);
    }

    #[test]
    fn ladder_bound_position_unit_frequency() {
        let (b, ladder) = gbound_ladder(
            OscillatorOp::Position,
            1.0,
            &DEFAULT_SCHEDULE,
            1e-8,
            DEFAULT_DMAX,
        )
        .unwrap();
        assert!(
            (b.value - 2f64.sqrt()).abs() < 0.01 * 2f64.sqrt(),
            "{}",
            b.value
        );
        assert!(b.sequence.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(ladder.converged.len(), DEFAULT_SCHEDULE.len());
        assert_eq!(b.method, BoundMethod::LadderExtrapolated);
    }

    #[test]
    fn ladder_bound_momentum_scales_up_with_frequency() {
        // ‖p‖²/E → 2ω, so the bound at ω = 2 is 2.
        let (b, _) = gbound_ladder(
            OscillatorOp::Momentum,
            2.0,
            &DEFAULT_SCHEDULE,
            1e-8,
            DEFAULT_DMAX,
        )
        .unwrap();
        assert!((b.value - 2.0).abs() < 0.01 * 2.0, "{}", b.value);
    }

    #[test]
    fn number_operator_diverges() {
        // At truncation d the extreme occupation mixture gives ‖N‖_E² = E(d−1).
        for d in [16usize, 32] {
            let pair = oscillator_pair(OscillatorOp::Number, 1.0, d).unwrap();
            for e in [1.0, 4.0] {
                let v = enorm_dual(&pair, e).unwrap().value;
                let brute = (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i as f64, j as f64)))
                    .filter(|(i, j)| *i <= e && *j >= e && j > i)
                    .map(|(i, j)| {
                        let w = (e - i) / (j - i);
                        (1.0 - w) * i * i + w * j * j
                    })
                    .fold(e * e, f64::max);
                assert!(
                    (v * v - brute).abs() < 1e-8 * brute,
                    "d {d} E {e}: {} vs {brute}",
                    v * v
                );
            }
        }
        match gbound_ladder(OscillatorOp::Number, 1.0, &[1.0, 2.0], 1e-8, 128) {
            Err(Error::Divergent { axis, ratios }) => {
                assert_eq!(axis, "dim");
                assert!(ratios.windows(2).all(|w| w[1].1 > w[0].1));
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn convergence_failure_carries_partial_ladder() {
        match converged_enorm(OscillatorOp::Position, 1.0, 10.0, 1e-14, 64) {
            Err(Error::Convergence { ladder, d_max }) => {
                assert_eq!(d_max, 64);
                assert_eq!(ladder.dims, vec![16, 32, 64]);
                assert_eq!(ladder.records.len(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
        match gbound_ladder(OscillatorOp::Position, 1.0, &[0.5, 10.0], 1e-6, 64) {
            Err(Error::Convergence { ladder, .. }) => {
                assert_eq!(ladder.dims, vec![16, 32, 64]);
                assert_eq!(ladder.converged.len(), 1);
                assert_eq!(ladder.records.last().unwrap().energy, 10.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
