//! γ₂* of small real matrices, the distributional γ₂^α of sign matrices, and
//! the numerical consequence `(1−2ε)·γ₂^α(F,p) ≤ eff_local` of the
//! partition-bound comparison for XOR predicates.

use rand::Rng;

use super::partition::{eff_local, Variant, DEFAULT_LOCAL_BUDGET};
use super::BoundsError;
use crate::games::xor_game;
use crate::rng;

/// Largest `|X|·|Y|` for which γ₂^α enumerates every sign matrix `F′`.
pub const GAMMA2_ALPHA_MAX_ENTRIES: usize = 12;
const RESTARTS: usize = 64;
const GRID_STEPS: usize = 2000;
/// Seed of the deterministic restart streams used by the alternating optimizer.
const RESTART_SEED: u64 = 0x6761_6d6d_6132;

#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, BoundsError> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(BoundsError::InvalidInput(format!(
                "{} entries for a {rows}×{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(BoundsError::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

/// A `±1` matrix, e.g. the truth table of `f : X × Y → {−1, +1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i8>) -> Result<Self, BoundsError> {
        if entries.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(BoundsError::InvalidInput("sign matrix shape".into()));
        }
        if entries.iter().any(|&e| e != 1 && e != -1) {
            return Err(BoundsError::InvalidInput("sign matrix entries must be ±1".into()));
        }
        Ok(Self { rows, cols, entries })
    }

    /// `+1` where `bits` is false, `−1` where it is true.
    pub fn from_bits(rows: usize, cols: usize, bits: &[bool]) -> Result<Self, BoundsError> {
        Self::new(rows, cols, bits.iter().map(|&b| if b { -1 } else { 1 }).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    /// Entry-wise product `F ∘ p`.
    pub fn hadamard(&self, p: &[f64]) -> Result<RealMatrix, BoundsError> {
        RealMatrix::new(
            self.rows,
            self.cols,
            self.entries.iter().zip(p).map(|(&f, &w)| f as f64 * w).collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gamma2Kind {
    /// Exact up to the refinement tolerance (smaller side ≤ 2).
    ExactSmall,
    /// Best value found by alternating optimization.
    LowerBound,
    /// γ₂^α whose inner γ₂* values were only lower-bounded, so the
    /// candidates are not guaranteed to be on either side of the truth.
    Approximate,
}

impl Gamma2Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Gamma2Kind::ExactSmall => "exact_small",
            Gamma2Kind::LowerBound => "lower_bound",
            Gamma2Kind::Approximate => "approximate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gamma2Result {
    pub value: f64,
    pub kind: Gamma2Kind,
    /// The maximizing `F′` (γ₂^α only).
    pub maximizer: Option<SignMatrix>,
}

/// `Σ_y sqrt(a_y² + b_y² + 2 a_y b_y t)`: the objective for two row vectors at `cos θ = t`.
fn two_row_objective(m: &RealMatrix, t: f64) -> f64 {
    (0..m.cols)
        .map(|y| {
            let (a, b) = (m.get(0, y), m.get(1, y));
            (a * a + b * b + 2.0 * a * b * t).max(0.0).sqrt()
        })
        .sum()
}

/// Maximizes the concave two-row objective over `t ∈ [−1, 1]`: a grid at
/// spacing 1e-3 followed by golden-section refinement of the best bracket.
fn two_row_exact(m: &RealMatrix) -> f64 {
    let h = 2.0 / GRID_STEPS as f64;
    let (mut best_k, mut best) = (0, f64::NEG_INFINITY);
    for k in 0..=GRID_STEPS {
        let v = two_row_objective(m, -1.0 + k as f64 * h);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    let mut lo = (-1.0 + (best_k as f64 - 1.0) * h).max(-1.0);
    let mut hi = (-1.0 + (best_k as f64 + 1.0) * h).min(1.0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    while hi - lo > 1e-12 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if two_row_objective(m, m1) < two_row_objective(m, m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    best.max(two_row_objective(m, 0.5 * (lo + hi)))
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Alternating best responses from random unit vectors in `R^{rows}`.
fn alternating(m: &RealMatrix) -> f64 {
    let d = m.rows;
    let mut best = 0.0f64;
    for r in 0..RESTARTS {
        let mut rng = rng::stream(RESTART_SEED, r as u64);
        let mut u: Vec<Vec<f64>> = (0..m.rows)
            .map(|_| {
                let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                normalize(&mut v);
                v
            })
            .collect();
        let mut v: Vec<Vec<f64>> = vec![vec![0.0; d]; m.cols];
        let mut prev = f64::NEG_INFINITY;
        for _ in 0..10_000 {
            let mut value = 0.0;
            for (y, vy) in v.iter_mut().enumerate() {
                let mut s = vec![0.0; d];
                for (x, ux) in u.iter().enumerate() {
                    for k in 0..d {
                        s[k] += m.get(x, y) * ux[k];
                    }
                }
                if normalize(&mut s) > 0.0 {
                    *vy = s;
                }
            }
            for (x, ux) in u.iter_mut().enumerate() {
                let mut s = vec![0.0; d];
                for (y, vy) in v.iter().enumerate() {
                    for k in 0..d {
                        s[k] += m.get(x, y) * vy[k];
                    }
                }
                let n = normalize(&mut s);
                if n > 0.0 {
                    *ux = s;
                }
                value += n;
            }
            if value - prev < 1e-14 {
                prev = prev.max(value);
                break;
            }
            prev = value;
        }
        best = best.max(prev);
    }
    best
}

/// `γ₂*(M) = max Σ_{x,y} M[x,y]⟨u_x, v_y⟩` over unit vectors of dimension
/// `min(rows, cols)`.
pub fn gamma2_star(m: &RealMatrix) -> Gamma2Result {
    let m = if m.rows <= m.cols { m.clone() } else { m.transpose() };
    let (value, kind) = match m.rows {
        1 => ((0..m.cols).map(|y| m.get(0, y).abs()).sum(), Gamma2Kind::ExactSmall),
        2 => (two_row_exact(&m), Gamma2Kind::ExactSmall),
        _ => (alternating(&m), Gamma2Kind::LowerBound),
    };
    Gamma2Result {
        value,
        kind,
        maximizer: None,
    }
}

fn check_distribution(p: &[f64], n: usize) -> Result<(), BoundsError> {
    let s: f64 = p.iter().sum();
    if p.len() != n || p.iter().any(|v| !(*v >= 0.0)) || (s - 1.0).abs() > 1e-9 {
        return Err(BoundsError::InvalidInput(format!(
            "p must be a distribution over {n} entries"
        )));
    }
    Ok(())
}

/// `γ₂^α(F,p) = max_{F′} ((α+1)⟨F, F′∘p⟩ − (α−1)) / (2 γ₂*(F′∘p))`, with
/// `F′` enumerated in binary order (bit `k` set ⇒ entry `k` is `−1`); the
/// first maximizer wins ties.
pub fn gamma2_alpha(f: &SignMatrix, p: &[f64], alpha: f64) -> Result<Gamma2Result, BoundsError> {
    let k = f.rows * f.cols;
    check_distribution(p, k)?;
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(BoundsError::InvalidInput(format!(
            "alpha = {alpha} must be a finite value ≥ 1"
        )));
    }
    if k > GAMMA2_ALPHA_MAX_ENTRIES {
        return Err(BoundsError::BudgetExceeded {
            needed: k as f64,
            budget: GAMMA2_ALPHA_MAX_ENTRIES as f64,
        });
    }
    let mut best: Option<(f64, SignMatrix)> = None;
    let mut all_exact = true;
    for mask in 0u32..(1u32 << k) {
        let fp = SignMatrix::new(
            f.rows,
            f.cols,
            (0..k).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect(),
        )?;
        let g = gamma2_star(&fp.hadamard(p)?);
        all_exact &= g.kind == Gamma2Kind::ExactSmall;
        if g.value <= 1e-300 {
            continue;
        }
        let inner: f64 = (0..k).map(|i| (f.entries[i] * fp.entries[i]) as f64 * p[i]).sum();
        let cand = ((alpha + 1.0) * inner - (alpha - 1.0)) / (2.0 * g.value);
        if best.as_ref().is_none_or(|(b, _)| cand > *b + 1e-12) {
            best = Some((cand, fp));
        }
    }
    let (value, fp) = best.ok_or_else(|| BoundsError::InvalidInput("p has no mass".into()))?;
    Ok(Gamma2Result {
        value,
        kind: if all_exact {
            Gamma2Kind::ExactSmall
        } else {
            Gamma2Kind::Approximate
        },
        maximizer: Some(fp),
    })
}

#[derive(Debug, Clone)]
pub struct Thm2Report {
    pub eps: f64,
    /// `(1+2ε)/(1−2ε)`; infinite at `ε = 1/2`.
    pub alpha: f64,
    pub gamma2_alpha: Option<Gamma2Result>,
    /// `L = (1−2ε)·γ₂^α(F,p)`, or 0 when `ε ≥ 1/2`.
    pub lower: f64,
    /// `U = eff_local` of the XOR predicate `a·b = f(x,y)`, average variant.
    pub upper: f64,
    pub holds: bool,
}

/// Compares `L = (1−2ε)·γ₂^α(F,p)` at `α = (1+2ε)/(1−2ε)` with the local
/// partition bound `U` of the XOR predicate `a·b = f(x,y)`; since the local
/// bound dominates the quantum one, `L ≤ U` must hold.
pub fn check_thm2(f: &SignMatrix, p: &[f64], eps: f64) -> Result<Thm2Report, BoundsError> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(BoundsError::InvalidInput(format!("eps = {eps} must lie in [0, 1]")));
    }
    check_distribution(p, f.rows * f.cols)?;
    let bits: Vec<bool> = f.entries.iter().map(|&e| e == -1).collect();
    let game = xor_game(f.rows, f.cols, p.to_vec(), &bits)?;
    let upper = eff_local(&game, eps, Variant::Average, DEFAULT_LOCAL_BUDGET)?.eff;
    let (alpha, g2, lower) = if eps >= 0.5 {
        (f64::INFINITY, None, 0.0)
    } else {
        let alpha = (1.0 + 2.0 * eps) / (1.0 - 2.0 * eps);
        let g = gamma2_alpha(f, p, alpha)?;
        let lower = (1.0 - 2.0 * eps) * g.value;
        (alpha, Some(g), lower)
    };
    Ok(Thm2Report {
        eps,
        alpha,
        gamma2_alpha: g2,
        lower,
        upper,
        holds: lower <= upper + 1e-6,
    })
}
