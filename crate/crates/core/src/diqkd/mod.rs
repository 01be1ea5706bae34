//! Device-independent key distribution with leaky boxes: a simulator for the
//! Magic Square protocol, key-rate formulas and tail-bound checks.
//!
//! The constants `ν` and `β` in the key rate have no known numeric values;
//! they are inputs with heuristic defaults [`DEFAULT_NU`] and [`DEFAULT_BETA`].

mod boxes;
mod protocol;
mod sweep;

use rand::seq::index::sample;
use serde::Serialize;
use thiserror::Error;

use crate::entropy::{binary_entropy, EntropyError};
use crate::games::GameError;
use crate::rng;

pub use boxes::{bit, copy_wins, honest_boxes, BoxPair, ClassicalCheatingBoxes, HonestBoxes, Party};
pub use protocol::{
    abort_test, run_batch, run_protocol, summarize, test_threshold, AdversaryRound, AdversaryScript, BatchSummary,
    LeakageBudget, Phase, ProtocolParams, TestOutcome, TranscriptRecord,
};
pub use sweep::{format_real, sweep, write_csv, SweepGrid, SweepRow, CSV_HEADER};

/// Heuristic default for `ν`, not derived from any analysis.
pub const DEFAULT_NU: f64 = 0.01;
/// Heuristic default for `β`, not derived from any analysis.
pub const DEFAULT_BETA: f64 = 1.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiqkdError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("leakage budget exceeded: {needed} bits needed, limit {limit}")]
    BudgetExceeded { needed: u64, limit: u64 },
    #[error("adversary protocol violation: {0}")]
    Adversary(String),
    #[error("invalid adversary script: {0}")]
    Json(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyRateParams {
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub c: f64,
    pub nu: f64,
    pub beta: f64,
    pub pr_e: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeyRate {
    /// `α(ν − β(√c + √α) − 2h₂(4δ) − γ)n − log₂(1/Pr[E])`.
    pub hmin_minus_h0_bits: f64,
    /// `ε′ = 2·2^{−8δ²αn}/Pr[E]`.
    pub eps_smooth: f64,
    pub rate_per_copy: f64,
}

/// Min-entropy minus zero-entropy lower bound for the raw keys; negative
/// values are returned as they are.
pub fn key_rate(p: &KeyRateParams) -> Result<KeyRate, DiqkdError> {
    let bad = |m: String| Err(DiqkdError::InvalidParams(m));
    if p.n == 0 {
        return bad("n must be at least 1".into());
    }
    if !(p.alpha > 0.0 && p.alpha <= 1.0) || !(0.0..=1.0).contains(&p.gamma) {
        return bad("need alpha ∈ (0, 1] and gamma ∈ [0, 1]".into());
    }
    if !(0.0..=0.125).contains(&p.delta) {
        return bad(format!(
            "delta = {} must lie in [0, 1/8] so that h₂(4δ) is defined",
            p.delta
        ));
    }
    if !(p.c >= 0.0) || !p.c.is_finite() || !p.nu.is_finite() || !(p.beta >= 0.0) || !p.beta.is_finite() {
        return bad("need finite c ≥ 0, ν and β ≥ 0".into());
    }
    if !(p.pr_e > 0.0 && p.pr_e <= 1.0) {
        return bad(format!("PrE = {} must lie in (0, 1]", p.pr_e));
    }
    let n = p.n as f64;
    let per_sifted = p.nu - p.beta * (p.c.sqrt() + p.alpha.sqrt()) - 2.0 * binary_entropy(4.0 * p.delta)? - p.gamma;
    let bits = p.alpha * per_sifted * n + p.pr_e.log2();
    let eps_smooth = 2.0 * (-8.0 * p.delta * p.delta * p.alpha * n).exp2() / p.pr_e;
    Ok(KeyRate {
        hmin_minus_h0_bits: bits,
        eps_smooth,
        rate_per_copy: bits / n,
    })
}

/// Honest abort probability bound `2^{−2δ²γαn}`.
pub fn chernoff_abort_bound(delta: f64, gamma: f64, alpha: f64, n: usize) -> f64 {
    (-2.0 * delta * delta * gamma * alpha * n as f64).exp2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SerflingEstimate {
    /// Frequency of `Σ_{i∈T} Zᵢ ≥ (1−ε)|T|` and `Σᵢ Zᵢ < (1−2ε)n`.
    pub empirical: f64,
    /// `3·√(p̂(1−p̂)/trials)`.
    pub three_sigma: f64,
    /// `2^{−2ε²γn}`.
    pub bound: f64,
    pub trials: usize,
    pub t_size: usize,
}

/// Monte Carlo estimate of the sampling tail for a fixed bit pattern `Z`,
/// with `T` a uniform subset of size `max(1, ⌊γn⌋)`.
pub fn serfling_mc(
    gamma: f64,
    eps: f64,
    pattern: &[bool],
    trials: usize,
    seed: u64,
) -> Result<SerflingEstimate, DiqkdError> {
    let n = pattern.len();
    if n == 0 || !(gamma > 0.0 && gamma <= 1.0) || !(0.0..=0.5).contains(&eps) || trials == 0 {
        return Err(DiqkdError::InvalidParams(
            "need n ≥ 1, γ ∈ (0,1], ε ∈ [0,1/2], trials ≥ 1".into(),
        ));
    }
    let t_size = ((gamma * n as f64).floor() as usize).clamp(1, n);
    let ones = pattern.iter().filter(|&&z| z).count();
    let bound = (-2.0 * eps * eps * gamma * n as f64).exp2();
    let mut hits = 0usize;
    if (ones as f64) < (1.0 - 2.0 * eps) * n as f64 {
        let need = (1.0 - eps) * t_size as f64;
        let mut r = rng::stream(seed, 0);
        for _ in 0..trials {
            let s = sample(&mut r, n, t_size).into_iter().filter(|&i| pattern[i]).count();
            if s as f64 >= need {
                hits += 1;
            }
        }
    }
    let p = hits as f64 / trials as f64;
    Ok(SerflingEstimate {
        empirical: p,
        three_sigma: 3.0 * (p * (1.0 - p) / trials as f64).sqrt(),
        bound,
        trials,
        t_size,
    })
}

/// Threshold pattern with `ones` leading ones out of `n`.
pub fn threshold_pattern(n: usize, ones: usize) -> Vec<bool> {
    (0..n).map(|i| i < ones).collect()
}

/// Worst threshold pattern: since `T` is uniform only the number of ones
/// matters, so every count below `(1−2ε)n` is scanned (with independent
/// streams) and the largest frequency is returned with its count.
pub fn serfling_worst_threshold(
    n: usize,
    gamma: f64,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<(usize, SerflingEstimate), DiqkdError> {
    let limit = (1.0 - 2.0 * eps) * n as f64;
    let mut best: Option<(usize, SerflingEstimate)> = None;
    for k in (0..=n).filter(|&k| (k as f64) < limit) {
        let est = serfling_mc(
            gamma,
            eps,
            &threshold_pattern(n, k),
            trials,
            seed.wrapping_add(k as u64),
        )?;
        if best.as_ref().is_none_or(|(_, b)| est.empirical > b.empirical) {
            best = Some((k, est));
        }
    }
    best.ok_or_else(|| DiqkdError::InvalidParams("no pattern lies below (1−2ε)n".into()))
}
