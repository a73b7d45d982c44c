//! Energy-constrained operator norms on finite-dimensional pairs `(A, G)`.
//!
//! `‖A‖_E^G² = max { Tr(A†A ρ) : ρ ⪰ 0, Tr ρ = 1, Tr(Gρ) ≤ E }` is a linear
//! program over a spectrahedron. Three independent routes are provided:
//!
//! * [`enorm_dual`]: minimize the convex dual `λ_max(A†A − μG) + μE` over
//!   `μ ≥ 0` and recover a primal witness from the top eigenspace.
//! * [`enorm_oracle`]: sampled lower bounds and gridded dual upper bounds.
//! * [`enorm_primal_pure`]: projected ascent over pure states
//!   `{‖φ‖ ≤ 1, ‖√G φ‖² ≤ E}`.

use faer::Mat;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    complex_eigensystem, derive_seed, gram, inner, mat_vec, norm_sq, random_complex_matrix,
    random_pure_state_from, real_eigensystem, rng_from_seed, tensor, tensor_hermitian,
    ComplexMatrix, DensityMatrix, Eigensystem, HermitianMatrix, PureState, C64, ZERO,
};
use crate::policy::Tolerances;

/// Spectral data of the constraint operator `G`.
#[derive(Clone, Debug)]
pub(crate) struct Constraint {
    pub g: HermitianMatrix,
    pub eigen: Eigensystem,
}

impl Constraint {
    pub fn new(g: HermitianMatrix) -> Result<Self> {
        let eigen = g.eigensystem();
        if eigen.values[0] < -Tolerances::DEFAULT.psd {
            return Err(Error::NotPositive {
                min_eigenvalue: eigen.values[0],
            });
        }
        Ok(Self { g, eigen })
    }

    pub fn min(&self) -> f64 {
        self.eigen.values[0]
    }

    pub fn max(&self) -> f64 {
        self.eigen.max_value()
    }

    pub fn ground(&self) -> Vec<C64> {
        self.eigen.vector(0)
    }
}

/// Operator `A` together with the positive energy operator `G`.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    a: ComplexMatrix,
    objective: HermitianMatrix,
    constraint: Constraint,
    ground_state_zero: bool,
}

impl OperatorPair {
    pub fn new(a: ComplexMatrix, g: HermitianMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        if a.rows() != g.dim() {
            return Err(Error::DimensionMismatch {
                left: a.rows(),
                right: g.dim(),
            });
        }
        let constraint = Constraint::new(g)?;
        let ground_state_zero = constraint.min() <= Tolerances::DEFAULT.ground_zero;
        Ok(Self {
            objective: gram(&a),
            a,
            constraint,
            ground_state_zero,
        })
    }

    /// Random complex `A` (entries scaled by `1/√dim`) and `G = B†B − λ_min(B†B)·I`.
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let scale = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        let a = random_complex_matrix(&mut rng, dim, dim).scale(scale);
        let b = random_complex_matrix(&mut rng, dim, dim).scale(scale);
        let g0 = gram(&b);
        let shift = g0.min_eigenvalue();
        let g = g0.add_scaled(&HermitianMatrix::identity(dim), -shift)?;
        Self::new(a, g)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn g(&self) -> &HermitianMatrix {
        &self.constraint.g
    }

    /// `A†A`.
    pub fn objective(&self) -> &HermitianMatrix {
        &self.objective
    }

    pub fn ground_energy(&self) -> f64 {
        self.constraint.min()
    }

    pub fn max_energy(&self) -> f64 {
        self.constraint.max()
    }

    /// Numerical form of `inf ‖Gφ‖ = 0`: `λ_min(G) ≤ 1e-8`.
    pub fn ground_state_zero(&self) -> bool {
        self.ground_state_zero
    }

    pub(crate) fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    /// `(A ⊗ I_n, G ⊗ I_n)`.
    pub fn tensor_identity(&self, n: usize) -> Result<Self> {
        let id = ComplexMatrix::identity(n);
        let a = tensor(&self.a, &id);
        let g = tensor_hermitian(self.g(), &HermitianMatrix::identity(n));
        Self::new(a, g)
    }

    fn check_energy(&self, energy: f64) -> Result<()> {
        check_energy(&self.constraint, energy)
    }
}

fn check_energy(c: &Constraint, energy: f64) -> Result<()> {
    if !energy.is_finite() || energy <= c.min() + Tolerances::DEFAULT.infeasible_margin {
        return Err(Error::InfeasibleEnergy {
            energy,
            ground: c.min(),
        });
    }
    Ok(())
}

/// One evaluation of the E-norm with its certificates.
#[derive(Clone, Debug)]
pub struct ENormPoint {
    pub energy: f64,
    pub value: f64,
    /// Dual multiplier of the energy constraint; the slope of `value²` in `E`.
    pub mu_star: f64,
    pub witness: DensityMatrix,
    /// `value² − Tr(A†A·witness)`.
    pub gap: f64,
}

/// `M − μG` with a real fast path.
enum Pencil {
    Real { m: Mat<f64>, g: Mat<f64> },
    Complex { m: Mat<C64>, g: Mat<C64> },
}

impl Pencil {
    fn new(m: &HermitianMatrix, g: &HermitianMatrix) -> Self {
        if m.is_real() && g.is_real() {
            Pencil::Real {
                m: m.real_part(),
                g: g.real_part(),
            }
        } else {
            Pencil::Complex {
                m: m.as_complex().as_mat().to_owned(),
                g: g.as_complex().as_mat().to_owned(),
            }
        }
    }

    fn eigensystem(&self, mu: f64) -> Eigensystem {
        match self {
            Pencil::Real { m, g } => {
                let h = m - g * faer::Scale(mu);
                real_eigensystem(h.as_ref())
            }
            Pencil::Complex { m, g } => {
                let h = m - g * faer::Scale(C64::new(mu, 0.0));
                complex_eigensystem(h.as_ref())
            }
        }
    }
}

fn quad(h: &HermitianMatrix, v: &[C64]) -> f64 {
    inner(v, &mat_vec(h.as_complex().as_mat(), v)).re
}

/// Candidate pure state with its objective and energy.
struct Candidate {
    vector: Vec<C64>,
    objective: f64,
    energy: f64,
}

impl Candidate {
    fn new(vector: Vec<C64>, m: &HermitianMatrix, g: &HermitianMatrix) -> Self {
        let n = norm_sq(&vector).sqrt();
        let vector: Vec<C64> = vector.into_iter().map(|z| z / n).collect();
        Self {
            objective: quad(m, &vector),
            energy: quad(g, &vector),
            vector,
        }
    }
}

/// Eigenvectors within `window` of the top eigenvalue.
fn top_window(es: &Eigensystem, window: f64) -> Vec<Vec<C64>> {
    let top = es.max_value();
    let scale = 1.0 + es.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    es.values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= top - window * scale)
        .map(|(k, _)| es.vector(k))
        .collect()
}

/// Vectors of extreme `G`-expectation inside the span of orthonormal `basis`.
fn extreme_energy_vectors(basis: &[Vec<C64>], g: &HermitianMatrix) -> Vec<Vec<C64>> {
    if basis.len() <= 1 {
        return basis.to_vec();
    }
    let k = basis.len();
    let gv: Vec<Vec<C64>> = basis
        .iter()
        .map(|v| mat_vec(g.as_complex().as_mat(), v))
        .collect();
    let compressed = ComplexMatrix::from_fn(k, k, |i, j| inner(&basis[i], &gv[j]));
    let compressed =
        HermitianMatrix::with_tolerance(compressed, 1e-8).expect("compressed Hermitian form");
    let es = compressed.eigensystem();
    let combine = |col: usize| -> Vec<C64> {
        let coeffs = es.vector(col);
        let dim = basis[0].len();
        let mut out = vec![ZERO; dim];
        for (c, v) in coeffs.iter().zip(basis) {
            for (o, x) in out.iter_mut().zip(v) {
                *o += c * x;
            }
        }
        out
    };
    vec![combine(0), combine(k - 1)]
}

/// Best feasible mixture of at most two candidates with `Tr(Gρ) ≤ E`.
fn best_mixture(cands: &[Candidate], energy: f64) -> Option<(f64, Vec<(f64, usize)>)> {
    let mut best: Option<(f64, Vec<(f64, usize)>)> = None;
    let mut consider = |obj: f64, parts: Vec<(f64, usize)>| {
        if best.as_ref().is_none_or(|(b, _)| obj > *b) {
            best = Some((obj, parts));
        }
    };
    for (i, ci) in cands.iter().enumerate() {
        if ci.energy <= energy {
            consider(ci.objective, vec![(1.0, i)]);
            for (j, cj) in cands.iter().enumerate() {
                if cj.energy > energy {
                    let w = (energy - ci.energy) / (cj.energy - ci.energy);
                    let obj = (1.0 - w) * ci.objective + w * cj.objective;
                    consider(obj, vec![(1.0 - w, i), (w, j)]);
                }
            }
        }
    }
    best
}

/// Solution of `max Tr(Mρ)` over the energy-constrained state space.
#[derive(Clone, Debug)]
pub(crate) struct LinearMax {
    /// Dual value `min_μ λ_max(M − μG) + μE`.
    pub optimum: f64,
    pub mu: f64,
    pub witness: DensityMatrix,
    /// `Tr(M·witness)`.
    pub attained: f64,
}

const MAX_DOUBLINGS: usize = 1100;

/// Lagrangian dual of the energy-constrained linear program.
pub(crate) fn maximize_linear(
    m: &HermitianMatrix,
    c: &Constraint,
    energy: f64,
    tol: &Tolerances,
) -> Result<LinearMax> {
    check_energy(c, energy)?;
    let g = &c.g;
    let pencil = Pencil::new(m, g);
    let dual = |mu: f64, lam: f64| lam + mu * energy;

    let mut eigensystems: Vec<(f64, Eigensystem)> = Vec::new();
    let es0 = pencil.eigensystem(0.0);
    let window0 = top_window(&es0, tol.top_window);
    let min_energy0 = extreme_energy_vectors(&window0, g)
        .iter()
        .map(|v| quad(g, v))
        .fold(f64::INFINITY, f64::min);

    let (mu, optimum) = if min_energy0 <= energy {
        let lam = es0.max_value();
        eigensystems.push((0.0, es0));
        (0.0, lam)
    } else {
        // Subgradient of the dual at μ is E − ⟨v|G|v⟩ over top eigenvectors v;
        // it is nondecreasing in μ, so bisect on its sign.
        let energy_range = |es: &Eigensystem| -> (f64, f64) {
            let window = top_window(es, tol.top_window);
            extreme_energy_vectors(&window, g)
                .iter()
                .map(|v| quad(g, v))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
                    (lo.min(e), hi.max(e))
                })
        };
        let mut lo = (0.0, es0);
        let mut hi_mu = 1.0;
        let mut doublings = 0;
        let mut best = (0.0, dual(0.0, lo.1.max_value()));
        let mut hi = loop {
            let es = pencil.eigensystem(hi_mu);
            let f = dual(hi_mu, es.max_value());
            if f < best.1 {
                best = (hi_mu, f);
            }
            let (e_min, e_max) = energy_range(&es);
            if e_min <= energy && energy <= e_max {
                best = (hi_mu, f);
                lo = (hi_mu, es);
                break None;
            }
            if e_max < energy {
                break Some((hi_mu, es));
            }
            lo = (hi_mu, es);
            hi_mu *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS {
                return Err(Error::InfeasibleEnergy {
                    energy,
                    ground: c.min(),
                });
            }
        };
        while let Some((b, _)) = &hi {
            let a = lo.0;
            let b = *b;
            if b - a <= tol.mu_width * (1.0 + 0.5 * (a + b)) {
                break;
            }
            let mid = 0.5 * (a + b);
            let es = pencil.eigensystem(mid);
            let f = dual(mid, es.max_value());
            if f < best.1 {
                best = (mid, f);
            }
            let (e_min, e_max) = energy_range(&es);
            if e_min <= energy && energy <= e_max {
                best = (mid, f);
                lo = (mid, es);
                hi = None;
            } else if e_max < energy {
                hi = Some((mid, es));
            } else {
                lo = (mid, es);
            }
        }
        eigensystems.push(lo);
        if let Some(h) = hi {
            eigensystems.push(h);
        }
        best
    };

    // Witness: mixtures of top-eigenspace vectors near μ*, bracket endpoints
    // and the ground state of G.
    let mut cands = vec![Candidate::new(c.ground(), m, g)];
    for (_, es) in &eigensystems {
        let window = top_window(es, tol.top_window);
        for v in extreme_energy_vectors(&window, g) {
            cands.push(Candidate::new(v, m, g));
        }
        if window.len() > 2 {
            for v in window {
                cands.push(Candidate::new(v, m, g));
            }
        }
    }
    let (attained, parts) =
        best_mixture(&cands, energy).expect("ground state of G is always feasible");
    let states: Vec<PureState> = parts
        .iter()
        .map(|&(_, i)| PureState::from_unchecked(cands[i].vector.clone()))
        .collect();
    let mix: Vec<(f64, &PureState)> = parts.iter().map(|p| p.0).zip(states.iter()).collect();
    let witness = DensityMatrix::mixture(&mix)?;
    Ok(LinearMax {
        optimum,
        mu,
        witness,
        attained,
    })
}

/// `‖A‖_E^G` through the Lagrangian dual, with witness state and gap.
pub fn enorm_dual(pair: &OperatorPair, energy: f64) -> Result<ENormPoint> {
    let tol = Tolerances::DEFAULT;
    let sol = maximize_linear(&pair.objective, &pair.constraint, energy, &tol)?;
    let optimum = sol.optimum.max(0.0);
    let gap = (optimum - sol.attained).max(0.0);
    let allowed = tol.gap * (1.0 + optimum);
    if gap > allowed {
        return Err(Error::DualityGap {
            energy,
            gap,
            allowed,
        });
    }
    Ok(ENormPoint {
        energy,
        value: optimum.sqrt(),
        mu_star: sol.mu,
        witness: sol.witness,
        gap,
    })
}

/// Two-sided bracket from [`enorm_oracle`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleBounds {
    pub lower: f64,
    pub upper: f64,
}

impl OracleBounds {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

const ORACLE_GRID: usize = 64;
const ORACLE_LEVELS: usize = 8;

/// Independent bracket `lower ≤ ‖A‖_E^G ≤ upper`.
///
/// Lower bounds come from explicit feasible states: `budget` Haar states
/// mixed with the ground state of `G` until feasible, the eigenvectors of
/// `A†A`, and pairwise mixtures of eigenvectors of `A†A − μG` on a 64-point
/// μ grid. Upper bounds are dual values on the same grid. The grid is
/// re-centred on its best point and refined a fixed number of times.
pub fn enorm_oracle(
    pair: &OperatorPair,
    energy: f64,
    budget: usize,
    seed: u64,
) -> Result<OracleBounds> {
    pair.check_energy(energy)?;
    let m = &pair.objective;
    let g = pair.g();
    let ground = pair.constraint.ground();
    let e_min = pair.ground_energy();
    let ground_obj = quad(m, &ground);
    let mut lower = ground_obj;

    // Feasible value of |φ⟩⟨φ| mixed with the ground state if needed.
    let feasible_value = |obj: f64, en: f64| -> f64 {
        if en <= energy {
            obj
        } else {
            let t = (en - energy) / (en - e_min);
            (1.0 - t) * obj + t * ground_obj
        }
    };

    let mut rng = rng_from_seed(seed);
    for _ in 0..budget {
        let phi = random_pure_state_from(&mut rng, pair.dim());
        let v = phi.amplitudes();
        lower = lower.max(feasible_value(quad(m, v), quad(g, v)));
    }

    let m_es = m.eigensystem();
    for k in 0..pair.dim() {
        let v = m_es.vector(k);
        if quad(g, &v) <= energy {
            lower = lower.max(quad(m, &v));
        }
    }

    let m_max = m_es.max_value().max(0.0);
    let mu_cap = 4.0 * m_max / (energy - e_min).max(1e-6);
    let mut upper = f64::INFINITY;
    let (mut lo, mut hi) = (0.0, mu_cap.max(1e-12));
    for _ in 0..ORACLE_LEVELS {
        let step = (hi - lo) / (ORACLE_GRID - 1) as f64;
        let mut tops: Vec<(f64, f64)> = Vec::with_capacity(ORACLE_GRID);
        let mut best_k = 0;
        let mut best_dual = f64::INFINITY;
        for k in 0..ORACLE_GRID {
            let mu = lo + step * k as f64;
            let h = m.add_scaled(g, -mu)?;
            let es = h.eigensystem();
            let dual = es.max_value() + mu * energy;
            if dual < best_dual {
                best_dual = dual;
                best_k = k;
            }
            upper = upper.min(dual);
            let pts: Vec<(f64, f64)> = (0..pair.dim())
                .map(|i| {
                    let v = es.vector(i);
                    (quad(m, &v), quad(g, &v))
                })
                .collect();
            for &(oi, ei) in &pts {
                lower = lower.max(feasible_value(oi, ei));
                for &(oj, ej) in &pts {
                    if ei <= energy && ej > energy {
                        let w = (energy - ei) / (ej - ei);
                        lower = lower.max((1.0 - w) * oi + w * oj);
                    }
                }
            }
            tops.push(*pts.last().unwrap());
        }
        for &(oi, ei) in &tops {
            for &(oj, ej) in &tops {
                if ei <= energy && ej > energy {
                    let w = (energy - ei) / (ej - ei);
                    lower = lower.max((1.0 - w) * oi + w * oj);
                }
            }
        }
        let centre = lo + step * best_k as f64;
        lo = (centre - step).max(0.0);
        hi = centre + step;
    }
    let upper = upper.max(0.0).sqrt();
    let lower = lower.max(0.0).sqrt().min(upper);
    Ok(OracleBounds { lower, upper })
}

/// Euclidean projection onto `{Σ|x_k|² ≤ 1, Σ g_k|x_k|² ≤ E}` in the eigenbasis of `G`.
fn project(y: &[C64], gk: &[f64], energy: f64) -> Vec<C64> {
    let weights: Vec<f64> = y.iter().map(|z| z.norm_sqr()).collect();
    let norm_at = |alpha: f64, beta: f64| -> f64 {
        weights
            .iter()
            .zip(gk)
            .map(|(w, g)| w / (1.0 + alpha + beta * g).powi(2))
            .sum()
    };
    let energy_at = |alpha: f64, beta: f64| -> f64 {
        weights
            .iter()
            .zip(gk)
            .map(|(w, g)| g * w / (1.0 + alpha + beta * g).powi(2))
            .sum()
    };
    let shrink = |alpha: f64, beta: f64| -> Vec<C64> {
        y.iter()
            .zip(gk)
            .map(|(z, g)| z / (1.0 + alpha + beta * g))
            .collect()
    };
    // Root of a decreasing function on [0, ∞).
    let solve = |f: &dyn Fn(f64) -> f64| -> f64 {
        if f(0.0) <= 0.0 {
            return 0.0;
        }
        let mut hi = 1.0;
        while f(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e300 {
                return hi;
            }
        }
        let mut lo = 0.0;
        while hi - lo > 1e-15 * (1.0 + hi) {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };

    let n0 = norm_at(0.0, 0.0);
    let e0 = energy_at(0.0, 0.0);
    if n0 <= 1.0 && e0 <= energy {
        return y.to_vec();
    }
    if n0 > 1.0 {
        let alpha = n0.sqrt() - 1.0;
        if e0 / n0 <= energy {
            return shrink(alpha, 0.0);
        }
    }
    if e0 > energy {
        let beta = solve(&|b| energy_at(0.0, b) - energy);
        if norm_at(0.0, beta) <= 1.0 {
            return shrink(0.0, beta);
        }
    }
    let alpha_for = |beta: f64| solve(&|a| norm_at(a, beta) - 1.0);
    let beta = solve(&|b| energy_at(alpha_for(b), b) - energy);
    shrink(alpha_for(beta), beta)
}

const PRIMAL_RANDOM_STARTS: usize = 12;
const PRIMAL_MAX_ITERS: usize = 20_000;

/// Maximize `‖Aφ‖` over `{‖φ‖ ≤ 1, ‖√G φ‖² ≤ E}` by multi-start projected ascent.
pub fn enorm_primal_pure(pair: &OperatorPair, energy: f64, seed: u64) -> Result<ENormPoint> {
    if !pair.ground_state_zero() {
        return Err(Error::GroundEnergyNotZero {
            min_eigenvalue: pair.ground_energy(),
        });
    }
    pair.check_energy(energy)?;
    let dim = pair.dim();
    let w = &pair.constraint.eigen.vectors;
    let gk: Vec<f64> = pair
        .constraint
        .eigen
        .values
        .iter()
        .map(|v| v.max(0.0))
        .collect();
    // Objective in the eigenbasis of G.
    let m_rot = w.adjoint().matmul(pair.objective.as_complex())?.matmul(w)?;
    let m_rot = HermitianMatrix::with_tolerance(m_rot, 1e-9)?;
    let m_es = m_rot.eigensystem();
    let step = 1.0 / m_es.max_value().max(1e-300);
    let obj = |x: &[C64]| quad(&m_rot, x);

    let mut starts: Vec<Vec<C64>> = (0..dim).map(|k| m_es.vector(k)).collect();
    let mut rng = rng_from_seed(seed);
    for _ in 0..PRIMAL_RANDOM_STARTS {
        starts.push(random_pure_state_from(&mut rng, dim).into_amplitudes());
    }

    let mut best: Option<(f64, Vec<C64>)> = None;
    for start in starts {
        let mut x = project(&start, &gk, energy);
        let mut f = obj(&x);
        let mut stalls = 0;
        for _ in 0..PRIMAL_MAX_ITERS {
            let mx = mat_vec(m_rot.as_complex().as_mat(), &x);
            let y: Vec<C64> = x.iter().zip(&mx).map(|(a, b)| a + b * step).collect();
            let x_new = project(&y, &gk, energy);
            let f_new = obj(&x_new);
            if f_new - f <= 1e-15 * (1.0 + f.abs()) {
                stalls += 1;
            } else {
                stalls = 0;
            }
            if f_new >= f {
                x = x_new;
                f = f_new;
            }
            if stalls >= 3 {
                break;
            }
        }
        if best.as_ref().is_none_or(|(bf, _)| f > *bf) {
            best = Some((f, x));
        }
    }
    let (_, x) = best.expect("at least one start");

    // Back to the original basis.
    let phi = mat_vec(w.as_mat(), &x);
    let m = &pair.objective;
    let g = pair.g();
    let value_sq = quad(m, &phi).max(0.0);

    // KKT multiplier from A†Aφ ≈ αφ + βGφ, used only for the certificate.
    let mphi = mat_vec(m.as_complex().as_mat(), &phi);
    let gphi = mat_vec(g.as_complex().as_mat(), &phi);
    let (p11, p12, p22) = (norm_sq(&phi), inner(&phi, &gphi).re, norm_sq(&gphi));
    let (r1, r2) = (inner(&phi, &mphi).re, inner(&gphi, &mphi).re);
    let det = p11 * p22 - p12 * p12;
    let mu_star = if det.abs() > 1e-14 * (p11 * p22).max(1e-300) {
        ((p11 * r2 - p12 * r1) / det).max(0.0)
    } else {
        0.0
    };
    let dual = m.add_scaled(g, -mu_star)?.max_eigenvalue() + mu_star * energy;
    let gap = (dual - value_sq).max(0.0);

    // Top up a sub-normalized vector with the zero-energy ground state.
    let norm2 = norm_sq(&phi);
    let ground = PureState::from_unchecked(pair.constraint.ground());
    let unit = PureState::normalized(phi)?;
    let witness = if norm2 < 1.0 {
        DensityMatrix::mixture(&[(norm2, &unit), (1.0 - norm2, &ground)])?
    } else {
        DensityMatrix::from_pure(&unit)?
    };
    Ok(ENormPoint {
        energy,
        value: value_sq.sqrt(),
        mu_star,
        witness,
        gap,
    })
}

/// Largest `n · dim` accepted by [`enorm_purified`].
pub const PURIFICATION_LIMIT: usize = 4096;

/// Pure-state E-norm of `(A ⊗ I_n, G ⊗ I_n)`.
pub fn enorm_purified(pair: &OperatorPair, energy: f64, n: usize) -> Result<f64> {
    let requested = n.saturating_mul(pair.dim());
    if n == 0 || requested > PURIFICATION_LIMIT {
        return Err(Error::ResourceLimit {
            requested,
            limit: PURIFICATION_LIMIT,
        });
    }
    if n == 1 {
        return Ok(enorm_primal_pure(pair, energy, 0)?.value);
    }
    let big = pair.tensor_identity(n)?;
    Ok(enorm_primal_pure(&big, energy, 0)?.value)
}

/// Sampled curve `E ↦ ‖A‖_E^G`.
#[derive(Clone, Debug)]
pub struct ENormCurve {
    pub pair: OperatorPair,
    pub points: Vec<ENormPoint>,
}

impl ENormCurve {
    pub fn energies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.energy).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// `max(1, max value²)`, the scale for relative shape tolerances.
    pub fn scale(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.value * p.value)
            .fold(1.0, f64::max)
    }

    /// Monotonicity, concavity of `value²` and monotone `value²/E`.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        validate_shape(&self.energies(), &self.values(), tol)
    }
}

/// Shape checks shared by E-norm curves.
pub fn validate_shape(energies: &[f64], values: &[f64], tol: &Tolerances) -> Result<()> {
    let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
    let scale = sq.iter().copied().fold(1.0, f64::max);
    for k in 1..values.len() {
        let drop = values[k - 1] - values[k];
        if drop > tol.curve_monotone {
            return Err(Error::CurveInvariant {
                invariant: "non-decreasing value",
                index: k,
                excess: drop,
            });
        }
        let r_prev = sq[k - 1] / energies[k - 1];
        let r = sq[k] / energies[k];
        if r - r_prev > tol.curve_shape * scale / energies[k - 1] {
            return Err(Error::CurveInvariant {
                invariant: "non-increasing value²/E",
                index: k,
                excess: r - r_prev,
            });
        }
    }
    for k in 1..values.len().saturating_sub(1) {
        let (e0, e1, e2) = (energies[k - 1], energies[k], energies[k + 1]);
        let interp = sq[k - 1] + (sq[k + 1] - sq[k - 1]) * (e1 - e0) / (e2 - e0);
        if interp - sq[k] > tol.curve_shape * scale {
            return Err(Error::Concavity(k - 1, k, k + 1));
        }
    }
    Ok(())
}

/// Evaluate [`enorm_dual`] on each grid energy and validate the curve shape.
pub fn enorm_curve(pair: &OperatorPair, grid: &[f64]) -> Result<ENormCurve> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::BadGrid);
    }
    let points = grid
        .par_iter()
        .map(|&e| enorm_dual(pair, e).map_err(|err| Error::at_energy(e, err)))
        .collect::<Result<Vec<_>>>()?;
    let curve = ENormCurve {
        pair: pair.clone(),
        points,
    };
    curve.validate(&Tolerances::DEFAULT)?;
    Ok(curve)
}

/// Per-point seeds for seeded evaluations over a grid.
pub fn grid_seeds(master: u64, len: usize) -> Vec<u64> {
    (0..len as u64).map(|i| derive_seed(master, i)).collect()
}
