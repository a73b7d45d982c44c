//! Tensor-extension inequality sampling and the energy amplification
//! functional `Y_Φ(E)` of Kraus maps.

use crate::error::{Error, Result};
use crate::linalg::{
    complex_normal, gram, norm_sq, random_complex_matrix, random_pure_state_from, rng_from_seed,
    ComplexMatrix, HermitianMatrix, PureState, C64, ZERO,
};
use crate::policy::Tolerances;
use crate::solver::{enorm_dual, maximize_linear, Constraint, OperatorPair};

/// Pair of vectors in `H ⊗ K` with bounded energy and distance.
#[derive(Clone, Debug)]
pub struct ConstrainedVectorSample {
    pub phi: PureState,
    pub psi: PureState,
    pub k_dim: usize,
    pub energy: f64,
    pub eps: f64,
}

/// `⟨x|(G ⊗ I_k)|x⟩` without forming the Kronecker product.
fn tensor_energy(g: &HermitianMatrix, k_dim: usize, x: &[C64]) -> f64 {
    apply_tensor_identity(g.as_complex(), k_dim, x)
        .iter()
        .zip(x)
        .map(|(y, z)| (z.conj() * y).re)
        .sum()
}

/// `(A ⊗ I_k) x` with block index `i·k + l`.
fn apply_tensor_identity(a: &ComplexMatrix, k_dim: usize, x: &[C64]) -> Vec<C64> {
    let d = a.rows();
    let mut out = vec![ZERO; d * k_dim];
    for i in 0..d {
        for j in 0..a.cols() {
            let aij = a.get(i, j);
            if aij == ZERO {
                continue;
            }
            for l in 0..k_dim {
                out[i * k_dim + l] += aij * x[j * k_dim + l];
            }
        }
    }
    out
}

const PROJECTION_STEPS: usize = 100;

/// Smallest `t ∈ [0, 1]` with `inside(path(t))`, assuming `inside(path(1))`
/// and a convex feasible set along the path.
fn bisect_path(inside: impl Fn(f64) -> bool) -> Result<f64> {
    if inside(0.0) {
        return Ok(0.0);
    }
    if !inside(1.0) {
        return Err(Error::Sampling(
            "path endpoint is outside the constraint set".into(),
        ));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..PROJECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

fn lerp(x: &[C64], y: &[C64], t: f64) -> Vec<C64> {
    x.iter()
        .zip(y)
        .map(|(a, b)| a * (1.0 - t) + b * t)
        .collect()
}

/// Draw `φ, ψ ∈ V = {x ∈ H⊗K : ‖√G⊗I x‖² ≤ E}` with `‖φ − ψ‖ ≤ ε` and norms ≤ 1.
///
/// `φ` is a Haar vector pulled toward `ground ⊗ e₁` until it meets the energy
/// bound. `ψ = φ + η` with `‖η‖ ≤ ε` is pulled back toward `φ` until it is in
/// `V` and in the unit ball.
pub fn sample_constrained_pair(
    pair: &OperatorPair,
    k_dim: usize,
    energy: f64,
    eps: f64,
    seed: u64,
) -> Result<ConstrainedVectorSample> {
    if !pair.ground_state_zero() {
        return Err(Error::GroundEnergyNotZero {
            min_eigenvalue: pair.ground_energy(),
        });
    }
    if k_dim == 0 || !(eps >= 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need k_dim >= 1 and eps >= 0, got k_dim = {k_dim}, eps = {eps}"
        )));
    }
    if !(energy > pair.ground_energy().max(0.0)) {
        return Err(Error::InfeasibleEnergy {
            energy,
            ground: pair.ground_energy(),
        });
    }
    let g = pair.g();
    let dim = pair.dim() * k_dim;
    let mut rng = rng_from_seed(seed);
    let phi0 = random_pure_state_from(&mut rng, dim).into_amplitudes();

    let ground = pair.constraint().ground();
    let mut anchor = vec![ZERO; dim];
    for (i, z) in ground.iter().enumerate() {
        anchor[i * k_dim] = *z;
    }
    let e_ok = |x: &[C64]| tensor_energy(g, k_dim, x) <= energy;
    let t = bisect_path(|t| e_ok(&lerp(&phi0, &anchor, t)))?;
    let phi = lerp(&phi0, &anchor, t);

    let direction: Vec<C64> = (0..dim).map(|_| complex_normal(&mut rng)).collect();
    let dn = norm_sq(&direction).sqrt();
    let radius = eps * rand::Rng::random::<f64>(&mut rng);
    let psi0: Vec<C64> = phi
        .iter()
        .zip(&direction)
        .map(|(p, d)| p + d * (radius / dn))
        .collect();
    let unit_ok = |x: &[C64]| norm_sq(x) <= 1.0 + Tolerances::DEFAULT.state_norm;
    let s = bisect_path(|s| {
        let x = lerp(&psi0, &phi, s);
        e_ok(&x) && unit_ok(&x)
    })?;
    let psi = if eps == 0.0 {
        phi.clone()
    } else {
        lerp(&psi0, &phi, s)
    };

    Ok(ConstrainedVectorSample {
        phi: PureState::new(phi)?,
        psi: PureState::new(psi)?,
        k_dim,
        energy,
        eps,
    })
}

impl ConstrainedVectorSample {
    /// Energy of `φ` and `ψ` under `G ⊗ I_k`.
    pub fn energies(&self, g: &HermitianMatrix) -> (f64, f64) {
        (
            tensor_energy(g, self.k_dim, self.phi.amplitudes()),
            tensor_energy(g, self.k_dim, self.psi.amplitudes()),
        )
    }

    pub fn distance(&self) -> f64 {
        self.phi
            .amplitudes()
            .iter()
            .zip(self.psi.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Both sides of `‖A⊗I(φ − ψ)‖ ≤ ε ‖A‖_{4E/ε²}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtensionCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl ExtensionCheck {
    /// `margin ≥ −slack·(1 + rhs)`.
    pub fn holds(&self, slack: f64) -> bool {
        self.margin >= -slack * (1.0 + self.rhs)
    }
}

pub fn extension_inequality_check(
    pair: &OperatorPair,
    sample: &ConstrainedVectorSample,
) -> Result<ExtensionCheck> {
    if !(sample.eps > 0.0) {
        return Err(Error::InvalidParameter("eps must be positive".into()));
    }
    let diff: Vec<C64> = sample
        .phi
        .amplitudes()
        .iter()
        .zip(sample.psi.amplitudes())
        .map(|(a, b)| a - b)
        .collect();
    let lhs = norm_sq(&apply_tensor_identity(pair.a(), sample.k_dim, &diff)).sqrt();
    let e_big = 4.0 * sample.energy / (sample.eps * sample.eps);
    let rhs = sample.eps * enorm_dual(pair, e_big)?.value;
    Ok(ExtensionCheck {
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// Completely positive map given by Kraus operators with `Σ K†K ⪯ I`.
#[derive(Clone, Debug)]
pub struct KrausMap {
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausMap {
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus_ops
            .first()
            .ok_or_else(|| Error::InvalidParameter("no Kraus operators given".into()))?;
        let dim = first.rows();
        for k in &kraus_ops {
            if !k.is_square() {
                return Err(Error::NotSquare {
                    rows: k.rows(),
                    cols: k.cols(),
                });
            }
            if k.rows() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: k.rows(),
                });
            }
        }
        let map = Self { kraus_ops };
        let max_eigenvalue = map.effect().max_eigenvalue();
        if max_eigenvalue > 1.0 + Tolerances::DEFAULT.kraus {
            return Err(Error::KrausNotContractive { max_eigenvalue });
        }
        Ok(map)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus_ops: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// `{|0⟩⟨i|}`: every input ends in level 0.
    pub fn ground_collapse(dim: usize) -> Self {
        let kraus_ops = (0..dim)
            .map(|i| {
                ComplexMatrix::from_fn(dim, dim, |r, c| {
                    if r == 0 && c == i {
                        C64::new(1.0, 0.0)
                    } else {
                        ZERO
                    }
                })
            })
            .collect();
        Self { kraus_ops }
    }

    /// Random trace-preserving map: Gaussian `K_i` rescaled by `S^{-1/2}`, `S = Σ K_i†K_i`.
    pub fn random(dim: usize, count: usize, seed: u64) -> Result<Self> {
        if dim == 0 || count == 0 {
            return Err(Error::InvalidParameter(
                "dim and count must be positive".into(),
            ));
        }
        let mut rng = rng_from_seed(seed);
        let raw: Vec<ComplexMatrix> = (0..count)
            .map(|_| random_complex_matrix(&mut rng, dim, dim))
            .collect();
        let mut s = HermitianMatrix::from_real_diagonal(&vec![0.0; dim]);
        for k in &raw {
            s = s.add_scaled(&gram(k), 1.0)?;
        }
        let es = s.eigensystem();
        let inv_sqrt: Vec<f64> = es.values.iter().map(|v| 1.0 / v.sqrt()).collect();
        let v = &es.vectors;
        let s_inv_half = v
            .matmul(&ComplexMatrix::from_real_diagonal(&inv_sqrt))?
            .matmul(&v.adjoint())?;
        let kraus_ops = raw
            .iter()
            .map(|k| k.matmul(&s_inv_half))
            .collect::<Result<Vec<_>>>()?;
        Self::new(kraus_ops)
    }

    pub fn dim(&self) -> usize {
        self.kraus_ops[0].rows()
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// `Σ K†K`.
    pub fn effect(&self) -> HermitianMatrix {
        let mut acc = gram(&self.kraus_ops[0]);
        for k in &self.kraus_ops[1..] {
            acc = acc.add_scaled(&gram(k), 1.0).expect("matching dims");
        }
        acc
    }

    /// `Σ K†GK`, the observable whose input expectation equals `Tr G Φ_*(ρ)`.
    pub fn output_energy_operator(&self, g: &HermitianMatrix) -> Result<HermitianMatrix> {
        if g.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: g.dim(),
            });
        }
        let n = self.dim();
        let mut acc = ComplexMatrix::zeros(n, n);
        for k in &self.kraus_ops {
            let term = k.adjoint().matmul(g.as_complex())?.matmul(k)?;
            acc = acc.add(&term)?;
        }
        HermitianMatrix::with_tolerance(acc, 1e-10)
    }
}

/// `Y_Φ(E) = sup { Tr G Φ_*(ρ) : Tr Gρ ≤ E }`.
pub fn y_phi(map: &KrausMap, g: &HermitianMatrix, energy: f64) -> Result<f64> {
    let h = map.output_energy_operator(g)?;
    let constraint = Constraint::new(g.clone())?;
    let sol = maximize_linear(&h, &constraint, energy, &Tolerances::DEFAULT)?;
    Ok(sol.optimum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::QuantumState;

    fn number_g(d: usize) -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(&(0..d).map(|k| k as f64).collect::<Vec<_>>())
    }

    #[test]
    fn zero_eps_gives_identical_vectors() {
        let pair = OperatorPair::random(4, 1).unwrap();
        let s = sample_constrained_pair(&pair, 2, 0.5, 0.0, 9).unwrap();
        assert_eq!(s.phi, s.psi);
        assert!(matches!(
            extension_inequality_check(&pair, &s),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn equal_vectors_have_zero_lhs() {
        let pair = OperatorPair::random(4, 2).unwrap();
        let mut s = sample_constrained_pair(&pair, 2, 1.0, 0.2, 3).unwrap();
        s.psi = s.phi.clone();
        let c = extension_inequality_check(&pair, &s).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert!(c.rhs > 0.0 && c.holds(0.0));
    }

    #[test]
    fn samples_satisfy_invariants() {
        for seed in 0..1000u64 {
            let pair = OperatorPair::random(4, seed % 7).unwrap();
            let k = 1 + (seed % 3) as usize;
            let s = sample_constrained_pair(&pair, k, 1.0, 0.3, seed).unwrap();
            let (ep, es) = s.energies(pair.g());
            assert!(ep <= 1.0 && es <= 1.0);
            assert!(s.distance() <= 0.3);
            assert!(s.psi.norm_sq() <= 1.0 + 1e-12 && s.phi.norm_sq() <= 1.0 + 1e-12);
            assert_eq!(s.phi.dim(), 4 * k);
        }
    }

    #[test]
    fn single_factor_reduces_to_h() {
        let pair = OperatorPair::random(3, 4).unwrap();
        let s = sample_constrained_pair(&pair, 1, 0.7, 0.1, 5).unwrap();
        assert_eq!(s.phi.dim(), 3);
        let e = s.phi.raw_expectation(pair.g()).re;
        assert!(e <= 0.7);
    }

    #[test]
    fn identity_operator_extension_check() {
        let pair = OperatorPair::new(ComplexMatrix::identity(3), number_g(3)).unwrap();
        for seed in 0..50 {
            let s = sample_constrained_pair(&pair, 2, 0.8, 0.25, seed).unwrap();
            let c = extension_inequality_check(&pair, &s).unwrap();
            assert!((c.rhs - 0.25).abs() < 1e-12);
            assert!((c.lhs - s.distance()).abs() < 1e-12);
            assert!(c.holds(1e-8));
        }
    }

    #[test]
    fn sampling_requires_zero_ground_energy() {
        let pair = OperatorPair::new(
            ComplexMatrix::identity(2),
            HermitianMatrix::from_real_diagonal(&[1.0, 2.0]),
        )
        .unwrap();
        assert!(matches!(
            sample_constrained_pair(&pair, 1, 1.5, 0.1, 0),
            Err(Error::GroundEnergyNotZero { .. })
        ));
    }

    #[test]
    fn identity_channel_saturates_energy() {
        let g = number_g(4);
        let id = KrausMap::identity(4);
        for e in [0.5, 1.0, 2.5, 3.0, 7.0] {
            let y = y_phi(&id, &g, e).unwrap();
            assert!((y - e.min(3.0)).abs() < 1e-8, "E {e}: {y}");
        }
    }

    #[test]
    fn ground_collapse_has_zero_output_energy() {
        let g = number_g(4);
        let map = KrausMap::ground_collapse(4);
        assert!((map.effect().max_eigenvalue() - 1.0).abs() < 1e-12);
        for e in [0.5, 2.0] {
            assert!(y_phi(&map, &g, e).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn random_channel_concave_in_energy() {
        let g = number_g(4);
        let map = KrausMap::random(4, 3, 17).unwrap();
        assert!((map.effect().max_eigenvalue() - 1.0).abs() < 1e-10);
        let grid: Vec<f64> = (1..=16).map(|k| 0.2 * k as f64).collect();
        let ys: Vec<f64> = grid.iter().map(|&e| y_phi(&map, &g, e).unwrap()).collect();
        let scale = ys.iter().copied().fold(1.0, f64::max);
        for k in 1..grid.len() - 1 {
            let interp = 0.5 * (ys[k - 1] + ys[k + 1]);
            assert!(interp - ys[k] <= 1e-8 * scale);
        }
        assert!(ys.windows(2).all(|w| w[1] >= w[0] - 1e-10));
    }

    #[test]
    fn kraus_validation() {
        let too_big = ComplexMatrix::identity(2).scale(C64::new(1.1, 0.0));
        assert!(matches!(
            KrausMap::new(vec![too_big]),
            Err(Error::KrausNotContractive { .. })
        ));
        assert!(KrausMap::new(vec![]).is_err());
        assert!(matches!(
            KrausMap::new(vec![ComplexMatrix::identity(2), ComplexMatrix::identity(3)]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
