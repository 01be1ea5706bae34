//! Entropies, divergences, smoothing and conditional min/Hartley entropies.
//!
//! All logarithms are base 2. Divergences that blow up on support violations
//! return [`Divergence::Infinite`] rather than `f64::INFINITY`, so callers have to
//! handle the case explicitly before doing arithmetic.

use std::fmt;

use thiserror::Error;

use crate::qcore::{eigh, trace_norm_hermitian, ComplexMatrix, DensityOperator, QcoreError, EIG_CUTOFF};

/// Probability mass (or weight of a state outside a support) that counts as nonzero.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Normalization tolerance for classical distributions and joint tables.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error("probabilities must be nonnegative and sum to 1 (sum {0})")]
    NotNormalized(f64),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("argument {0} outside [0, 1]")]
    Domain(f64),
    #[error("smoothing parameter {0} outside [0, 1)")]
    Smoothing(f64),
    #[error("reference distribution has empty support")]
    EmptySupport,
    #[error("unsupported input: {0}")]
    Unsupported(String),
}

/// A divergence value that may be `+∞` on support violations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    pub fn finite(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Divergence::Infinite)
    }
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Finite(v) => write!(f, "{v}"),
            Divergence::Infinite => f.write_str("inf"),
        }
    }
}

/// Labelled classical distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalDistribution {
    outcomes: Vec<String>,
    probs: Vec<f64>,
}

fn check_probs(probs: &[f64], tol: f64) -> Result<(), EntropyError> {
    let sum: f64 = probs.iter().sum();
    if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) || (sum - 1.0).abs() > tol {
        return Err(EntropyError::NotNormalized(sum));
    }
    Ok(())
}

impl ClassicalDistribution {
    pub fn new(outcomes: Vec<String>, probs: Vec<f64>) -> Result<Self, EntropyError> {
        if outcomes.len() != probs.len() {
            return Err(EntropyError::LengthMismatch(outcomes.len(), probs.len()));
        }
        check_probs(&probs, NORMALIZATION_TOL)?;
        Ok(Self { outcomes, probs })
    }

    /// Distribution over outcomes labelled `0..n`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self, EntropyError> {
        let outcomes = (0..probs.len()).map(|i| i.to_string()).collect();
        Self::new(outcomes, probs)
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Joint classical distribution `P_{YZ}` stored as `table[y][z]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    table: Vec<Vec<f64>>,
}

impl JointTable {
    pub fn new(table: Vec<Vec<f64>>) -> Result<Self, EntropyError> {
        let cols = table.first().map_or(0, Vec::len);
        if let Some(bad) = table.iter().find(|row| row.len() != cols) {
            return Err(EntropyError::LengthMismatch(cols, bad.len()));
        }
        let flat: Vec<f64> = table.iter().flatten().copied().collect();
        check_probs(&flat, NORMALIZATION_TOL)?;
        Ok(Self { table })
    }

    pub fn ys(&self) -> usize {
        self.table.len()
    }

    pub fn zs(&self) -> usize {
        self.table.first().map_or(0, Vec::len)
    }

    pub fn get(&self, y: usize, z: usize) -> f64 {
        self.table[y][z]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.table
    }

    /// Marginal on Z.
    pub fn marginal_z(&self) -> Vec<f64> {
        (0..self.zs())
            .map(|z| self.table.iter().map(|row| row[z]).sum())
            .collect()
    }

    /// Marginal on Y.
    pub fn marginal_y(&self) -> Vec<f64> {
        self.table.iter().map(|row| row.iter().sum()).collect()
    }
}

/// Classical-quantum state `Σ_x p(x) |x⟩⟨x| ⊗ ρ_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CQState {
    probs: ClassicalDistribution,
    states: Vec<DensityOperator>,
}

impl CQState {
    pub fn new(probs: ClassicalDistribution, states: Vec<DensityOperator>) -> Result<Self, EntropyError> {
        if probs.len() != states.len() {
            return Err(EntropyError::LengthMismatch(probs.len(), states.len()));
        }
        if let Some(first) = states.first() {
            if let Some(bad) = states.iter().find(|s| s.dim() != first.dim()) {
                return Err(QcoreError::DimensionMismatch(first.dim(), bad.dim()).into());
            }
        }
        Ok(Self { probs, states })
    }

    pub fn probs(&self) -> &ClassicalDistribution {
        &self.probs
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }
}

/// Input accepted by [`cond_hmin`].
#[derive(Debug, Clone, Copy)]
pub enum MinEntropyInput<'a> {
    Classical(&'a JointTable),
    Cq(&'a CQState),
}

fn xlogx(x: f64) -> f64 {
    if x > EIG_CUTOFF {
        x * x.log2()
    } else {
        0.0
    }
}

/// `−x log x − (1−x) log(1−x)`.
pub fn binary_entropy(x: f64) -> Result<f64, EntropyError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(EntropyError::Domain(x));
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Shannon entropy of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| xlogx(x)).sum::<f64>()
}

/// Von Neumann entropy `−Tr ρ log ρ`.
pub fn vn_entropy(rho: &DensityOperator) -> f64 {
    shannon_entropy(&rho.eigen().values).max(0.0)
}

fn check_same_dim(rho: &DensityOperator, sigma: &DensityOperator) -> Result<(), EntropyError> {
    if rho.dim() != sigma.dim() {
        return Err(QcoreError::DimensionMismatch(rho.dim(), sigma.dim()).into());
    }
    Ok(())
}

/// Weight of `rho` outside the support of `sigma`, i.e. `Tr(Π_ker(σ) ρ)`.
fn weight_outside_support(rho: &DensityOperator, sigma_eig: &crate::qcore::Eigen) -> f64 {
    sigma_eig
        .values
        .iter()
        .zip(&sigma_eig.vectors)
        .filter(|(v, _)| **v <= EIG_CUTOFF)
        .map(|(_, vec)| rho.matrix().sandwich(vec, vec).re)
        .sum()
}

/// Relative entropy `D(ρ‖σ) = Tr ρ log ρ − Tr ρ log σ`.
pub fn rel_entropy(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Divergence, EntropyError> {
    check_same_dim(rho, sigma)?;
    let se = sigma.eigen();
    if weight_outside_support(rho, &se) > SUPPORT_TOL {
        return Ok(Divergence::Infinite);
    }
    let log_sigma = se.apply(|x| if x > EIG_CUTOFF { x.log2() } else { 0.0 });
    let neg_entropy = -vn_entropy(rho);
    let cross = rho.matrix().matmul(&log_sigma).trace().re;
    Ok(Divergence::Finite((neg_entropy - cross).max(0.0)))
}

/// Max-relative entropy `D∞(ρ‖σ) = log λ_max(σ^{-1/2} ρ σ^{-1/2})` with a generalized inverse.
pub fn dmax(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Divergence, EntropyError> {
    check_same_dim(rho, sigma)?;
    let se = sigma.eigen();
    if weight_outside_support(rho, &se) > SUPPORT_TOL {
        return Ok(Divergence::Infinite);
    }
    let inv_sqrt = se.apply(|x| if x > EIG_CUTOFF { 1.0 / x.sqrt() } else { 0.0 });
    let m = inv_sqrt.matmul(rho.matrix()).matmul(&inv_sqrt);
    let top = eigh(&m).max_value();
    Ok(Divergence::Finite(top.log2()))
}

/// Classical relative entropy `D(P‖Q)`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<Divergence, EntropyError> {
    if p.len() != q.len() {
        return Err(EntropyError::LengthMismatch(p.len(), q.len()));
    }
    let mut d = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            if pi > SUPPORT_TOL {
                return Ok(Divergence::Infinite);
            }
            continue;
        }
        d += pi * (pi / qi).log2();
    }
    Ok(Divergence::Finite(d.max(0.0)))
}

/// Smallest ℓ1 distance from `p` to a normalized `p′` with `p′(x) ≤ cap(x)`,
/// or `None` when no normalized `p′` fits under the caps.
///
/// Moving mass `E = Σ (p−cap)₊` off capped cells and back into cells with room
/// costs exactly `2E`; it is possible iff `Σ cap ≥ 1`.
fn l1_projection_cost(p: &[f64], cap: &[f64]) -> Option<f64> {
    let room: f64 = cap.iter().sum();
    if room < 1.0 - 1e-15 {
        return None;
    }
    let excess: f64 = p.iter().zip(cap).map(|(a, c)| (a - c).max(0.0)).sum();
    Some(2.0 * excess)
}

/// ℓ1-smoothed max-relative entropy of classical distributions,
/// `min λ` over normalized `P′` with `‖P−P′‖₁ ≤ ε` and `P′ ≤ 2^λ Q`.
///
/// Solved by bisection on λ; feasibility at fixed λ is the closed-form
/// water-filling cost of [`l1_projection_cost`].
pub fn smoothed_dmax_classical(
    p: &ClassicalDistribution,
    q: &ClassicalDistribution,
    eps: f64,
) -> Result<Divergence, EntropyError> {
    if p.len() != q.len() {
        return Err(EntropyError::LengthMismatch(p.len(), q.len()));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(EntropyError::Smoothing(eps));
    }
    let (pp, qq) = (p.probs(), q.probs());
    if qq.iter().all(|&x| x <= 0.0) {
        return Err(EntropyError::EmptySupport);
    }
    let feasible = |lambda: f64| {
        let scale = lambda.exp2();
        let cap: Vec<f64> = qq.iter().map(|&x| scale * x).collect();
        l1_projection_cost(pp, &cap).is_some_and(|cost| cost <= eps + 1e-15)
    };

    // Mass outside supp(Q) can never be covered; at ratio max P/Q only that mass is excess.
    let outside: f64 = pp.iter().zip(qq).filter(|(_, &b)| b <= 0.0).map(|(a, _)| a).sum();
    if 2.0 * outside > eps + 1e-15 {
        return Ok(Divergence::Infinite);
    }
    let max_ratio = pp
        .iter()
        .zip(qq)
        .filter(|(_, &b)| b > 0.0)
        .map(|(a, b)| a / b)
        .fold(0.0, f64::max);
    // λ ≥ 0 always: Σ 2^λ Q ≥ 1 is needed for a normalized P′.
    let mut hi = max_ratio.max(1.0).log2();
    if !feasible(hi) {
        // Only possible with mass outside supp(Q) that the ratio bound cannot absorb.
        hi += 1.0;
        while !feasible(hi) {
            hi += 1.0;
            if hi > 1100.0 {
                return Ok(Divergence::Infinite);
            }
        }
    }
    let mut lo = 0.0f64;
    if feasible(lo) {
        return Ok(Divergence::Finite(0.0));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(Divergence::Finite(hi))
}

/// Guessing-probability form of the conditional min-entropy of a classical table.
fn hmin_classical(table: &JointTable) -> f64 {
    let guess: f64 = (0..table.zs())
        .map(|z| (0..table.ys()).map(|y| table.get(y, z)).fold(0.0, f64::max))
        .sum();
    -guess.log2()
}

/// Conditional min-entropy `H∞(X|E)` as `−log` of the optimal guessing probability.
///
/// Supported inputs: classical tables (exact), CQ states with two classical
/// symbols (Helstrom), and CQ states whose conditional operators pairwise
/// commute (reduced to the classical case).
pub fn cond_hmin(input: MinEntropyInput<'_>) -> Result<f64, EntropyError> {
    match input {
        MinEntropyInput::Classical(t) => Ok(hmin_classical(t)),
        MinEntropyInput::Cq(cq) => {
            let probs = cq.probs().probs();
            let states = cq.states();
            match states.len() {
                0 => Err(EntropyError::Unsupported("empty CQ state".into())),
                1 => Ok(0.0),
                2 => {
                    let diff = &states[0].matrix().scale(probs[0]) - &states[1].matrix().scale(probs[1]);
                    let guess = 0.5 * (1.0 + trace_norm_hermitian(&diff));
                    Ok(-guess.log2())
                }
                _ => {
                    let table = commuting_cq_to_table(cq)?;
                    Ok(hmin_classical(&table))
                }
            }
        }
    }
}

/// Joint table `P(x, k) = p(x)⟨k|ρ_x|k⟩` in a common eigenbasis of commuting `ρ_x`.
fn commuting_cq_to_table(cq: &CQState) -> Result<JointTable, EntropyError> {
    let states = cq.states();
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            if states[i].matrix().commutator_norm(states[j].matrix()) > 1e-9 {
                return Err(EntropyError::Unsupported(
                    "CQ min-entropy needs two symbols or pairwise commuting states".into(),
                ));
            }
        }
    }
    let dim = states[0].dim();
    // A generic combination separates the joint eigenspaces.
    let mut combo = ComplexMatrix::zeros(dim, dim);
    for (k, s) in states.iter().enumerate() {
        let w = ((k + 2) as f64).sqrt().fract() + 0.1 * k as f64 + 1.0;
        combo = &combo + &s.matrix().scale(w);
    }
    let basis = eigh(&combo).vectors;
    let probs = cq.probs().probs();
    let mut table = vec![vec![0.0; dim]; states.len()];
    for (x, s) in states.iter().enumerate() {
        for (k, v) in basis.iter().enumerate() {
            let off: f64 = basis
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, w)| s.matrix().sandwich(w, v).norm())
                .fold(0.0, f64::max);
            if off > 1e-8 {
                return Err(EntropyError::Unsupported(
                    "could not diagonalize commuting CQ states simultaneously".into(),
                ));
            }
            table[x][k] = probs[x] * s.matrix().sandwich(v, v).re.max(0.0);
        }
    }
    let sum: f64 = table.iter().flatten().sum();
    for row in table.iter_mut() {
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    JointTable::new(table)
}

fn hartley_of_support(support: &[Vec<bool>]) -> f64 {
    let zs = support.first().map_or(0, Vec::len);
    let widest = (0..zs)
        .map(|z| support.iter().filter(|row| row[z]).count())
        .max()
        .unwrap_or(0);
    (widest.max(1) as f64).log2()
}

/// Conditional Hartley entropy `H₀(Y|Z) = log max_z |{y : P(y,z) > 0}|`.
///
/// With `eps > 0` this greedily deletes the lightest cells (ties broken toward
/// the widest column, then row-major order) while the ℓ1 cost `2·(deleted mass)`
/// stays within `eps`, and recomputes. The result is an upper bound on the
/// ε-smoothed value, which is an infimum.
pub fn cond_h0(table: &JointTable, eps: f64) -> Result<f64, EntropyError> {
    if !(eps >= 0.0) {
        return Err(EntropyError::Smoothing(eps));
    }
    let mut support: Vec<Vec<bool>> = table
        .rows()
        .iter()
        .map(|row| row.iter().map(|&v| v > 0.0).collect())
        .collect();
    if eps == 0.0 {
        return Ok(hartley_of_support(&support));
    }
    let col_width: Vec<usize> = (0..table.zs())
        .map(|z| support.iter().filter(|row| row[z]).count())
        .collect();
    let mut cells: Vec<(usize, usize)> = (0..table.ys())
        .flat_map(|y| (0..table.zs()).map(move |z| (y, z)))
        .filter(|&(y, z)| table.get(y, z) > 0.0)
        .collect();
    cells.sort_by(|&(y1, z1), &(y2, z2)| {
        table
            .get(y1, z1)
            .total_cmp(&table.get(y2, z2))
            .then(col_width[z2].cmp(&col_width[z1]))
            .then((y1, z1).cmp(&(y2, z2)))
    });
    let mut remaining = cells.len();
    let mut spent = 0.0;
    for &(y, z) in &cells {
        let cost = 2.0 * table.get(y, z);
        if remaining <= 1 || spent + cost > eps + 1e-12 {
            break;
        }
        spent += cost;
        support[y][z] = false;
        remaining -= 1;
    }
    Ok(hartley_of_support(&support))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::PureState;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn plus() -> DensityOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(vec![c(h), c(h)]).unwrap().density()
    }

    fn dist(p: &[f64]) -> ClassicalDistribution {
        ClassicalDistribution::from_probs(p.to_vec()).unwrap()
    }

    #[test]
    fn von_neumann_examples() {
        assert!(vn_entropy(&plus()).abs() < 1e-12);
        assert!((vn_entropy(&DensityOperator::maximally_mixed(2)) - 1.0).abs() < 1e-12);
        for d in [3, 5, 6] {
            let h = vn_entropy(&DensityOperator::maximally_mixed(d));
            assert!((h - (d as f64).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = DensityOperator::classical(&[0.3, 0.7]).unwrap();
        assert!(rel_entropy(&rho, &rho).unwrap().finite().unwrap().abs() < 1e-12);
        let zero = PureState::basis(2, 0).density();
        let one = PureState::basis(2, 1).density();
        let half = DensityOperator::maximally_mixed(2);
        let d = rel_entropy(&zero, &half).unwrap().finite().unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert_eq!(rel_entropy(&zero, &one).unwrap(), Divergence::Infinite);
    }

    #[test]
    fn dmax_examples() {
        let rho = plus().mix(&DensityOperator::maximally_mixed(2), 0.4).unwrap();
        assert!(dmax(&rho, &rho).unwrap().finite().unwrap().abs() < 1e-10);
        let zero = PureState::basis(2, 0).density();
        let half = DensityOperator::maximally_mixed(2);
        // σ^{-1/2} ρ σ^{-1/2} = 2|0⟩⟨0|
        assert!((dmax(&zero, &half).unwrap().finite().unwrap() - 1.0).abs() < 1e-12);
        let one = PureState::basis(2, 1).density();
        assert!(dmax(&zero, &one).unwrap().is_infinite());
    }

    #[test]
    fn smoothed_dmax_examples() {
        let p = dist(&[0.2, 0.5, 0.3]);
        let q = dist(&[0.4, 0.4, 0.2]);
        let exact = (0.3f64 / 0.2).max(0.5 / 0.4).log2();
        let s = smoothed_dmax_classical(&p, &q, 0.0).unwrap().finite().unwrap();
        assert!((s - exact).abs() < 1e-12);
        for eps in [0.0, 0.2, 0.7] {
            assert_eq!(smoothed_dmax_classical(&q, &q, eps).unwrap(), Divergence::Finite(0.0));
        }
        // P′ = (1−t, t) with t ≤ 1/4 and max((1−t)/½, t/½) minimized at t = 1/4.
        let grid_best = (0..=2500)
            .map(|i| i as f64 / 10000.0)
            .map(|t| (2.0 * (1.0 - t)).max(2.0 * t))
            .fold(f64::INFINITY, f64::min)
            .log2();
        let s = smoothed_dmax_classical(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5]), 0.5)
            .unwrap()
            .finite()
            .unwrap();
        assert!((s - grid_best).abs() < 1e-9);
        assert!((s - 1.5f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn smoothed_dmax_support_cases() {
        let p = dist(&[0.9, 0.1]);
        let q = dist(&[1.0, 0.0]);
        assert!(smoothed_dmax_classical(&p, &q, 0.1).unwrap().is_infinite());
        let s = smoothed_dmax_classical(&p, &q, 0.2).unwrap();
        assert_eq!(s, Divergence::Finite(0.0));
        assert!(smoothed_dmax_classical(&p, &q, 1.0).is_err());
    }

    #[test]
    fn min_entropy_classical_cases() {
        let indep = JointTable::new(vec![vec![0.125; 2]; 4]).unwrap();
        assert!((cond_hmin(MinEntropyInput::Classical(&indep)).unwrap() - 2.0).abs() < 1e-12);
        let copied = JointTable::new(vec![vec![0.25, 0.0, 0.0], vec![0.0, 0.5, 0.0], vec![0.0, 0.0, 0.25]]).unwrap();
        assert!(cond_hmin(MinEntropyInput::Classical(&copied)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn min_entropy_helstrom() {
        let probs = ClassicalDistribution::from_probs(vec![0.5, 0.5]).unwrap();
        let cq = CQState::new(probs, vec![PureState::basis(2, 0).density(), plus()]).unwrap();
        let want = -(0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2)).log2();
        assert!((cond_hmin(MinEntropyInput::Cq(&cq)).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn min_entropy_commuting_and_rejected() {
        let probs = ClassicalDistribution::from_probs(vec![0.2, 0.3, 0.5]).unwrap();
        let states = vec![
            DensityOperator::classical(&[1.0, 0.0]).unwrap(),
            DensityOperator::classical(&[0.5, 0.5]).unwrap(),
            DensityOperator::classical(&[0.1, 0.9]).unwrap(),
        ];
        let cq = CQState::new(probs.clone(), states).unwrap();
        // columns: k=0 → max(0.2, 0.15, 0.05) = 0.2; k=1 → max(0, 0.15, 0.45) = 0.45
        let want = -(0.65f64).log2();
        assert!((cond_hmin(MinEntropyInput::Cq(&cq)).unwrap() - want).abs() < 1e-10);

        let noncommuting = vec![
            PureState::basis(2, 0).density(),
            plus(),
            DensityOperator::maximally_mixed(2),
        ];
        let cq = CQState::new(probs, noncommuting).unwrap();
        assert!(matches!(
            cond_hmin(MinEntropyInput::Cq(&cq)),
            Err(EntropyError::Unsupported(_))
        ));
    }

    #[test]
    fn hartley_examples() {
        let function = JointTable::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
        assert_eq!(cond_h0(&function, 0.0).unwrap(), 0.0);
        let indep = JointTable::new(vec![vec![0.1; 2]; 5]).unwrap();
        assert!((cond_h0(&indep, 0.0).unwrap() - 5f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn hartley_smoothing_three_cells() {
        let third = 1.0 / 3.0;
        let t = JointTable::new(vec![vec![third, third], vec![third, 0.0]]).unwrap();
        assert_eq!(cond_h0(&t, 0.0).unwrap(), 1.0);
        // Deleting one cell costs 2/3 ≤ 0.67; the widest column goes first.
        assert_eq!(cond_h0(&t, 0.67).unwrap(), 0.0);
        assert_eq!(cond_h0(&t, 0.6).unwrap(), 1.0);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        let direct = -0.11 * 0.11f64.log2() - 0.89 * 0.89f64.log2();
        assert!((binary_entropy(0.11).unwrap() - direct).abs() < 1e-15);
        assert!((binary_entropy(0.11).unwrap() - 0.499916).abs() < 1e-6);
        assert!(binary_entropy(1.2).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn distribution_validation() {
        assert!(ClassicalDistribution::from_probs(vec![0.5, 0.6]).is_err());
        assert!(ClassicalDistribution::from_probs(vec![1.5, -0.5]).is_err());
        assert!(JointTable::new(vec![vec![0.5], vec![0.25, 0.25]]).is_err());
    }
}
