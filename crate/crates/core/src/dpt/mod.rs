//! Direct-product bound evaluators, empirical repeated-game probes with
//! limited communication, and a classical check of substate perturbation.
//!
//! The asymptotic exponents carry unspecified constants; they are exposed as
//! `exponent_const` (default 1) rather than presented as known values. All
//! logarithms are base 2, bounds are clamped to `[0, 1]` and exponents are
//! floored to integers.

mod probe;
mod substate;

use thiserror::Error;

use crate::entropy::EntropyError;
use crate::games::GameError;

pub use probe::{
    empirical_repeated_value, ProtocolTables, RepetitionProbe, SearchKind, SearchMode, DEFAULT_SEARCH_BUDGET,
};
pub use substate::{
    max_fidelity_under_cap, substate_perturbation_check_classical, SubstateInstance, SubstateReport, SubstateStatus,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DptError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("validity gate violated: need 1 ≤ c < {limit}, got c = {c}")]
    GateViolated { c: f64, limit: f64 },
    #[error("budget exceeded: need {needed:e}, budget {budget:e}")]
    BudgetExceeded { needed: f64, budget: f64 },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

/// Parameters shared by the bound evaluators.
#[derive(Debug, Clone, PartialEq)]
pub struct DPTParams {
    /// Number of players `l`.
    pub l: usize,
    /// Number of copies `n`.
    pub n: usize,
    /// Total communication per copy (bits).
    pub c: f64,
    /// Optional per-player split of `c`.
    pub c_j: Option<Vec<f64>>,
    pub eps: f64,
    pub zeta: f64,
    /// `ν = 1 − ω*` of the single-copy game.
    pub nu: f64,
    /// Output alphabet sizes `|A¹|, …, |A^l|`.
    pub alphabet_sizes: Vec<usize>,
    /// Size of the conditioning set `|C|`.
    pub c_size: usize,
    /// Probability of the conditioning event.
    pub pr_e: f64,
    /// Stand-in for the unspecified constant inside the exponents.
    pub exponent_const: f64,
}

impl Default for DPTParams {
    fn default() -> Self {
        Self {
            l: 2,
            n: 1,
            c: 0.0,
            c_j: None,
            eps: 0.0,
            zeta: 0.1,
            nu: 0.0,
            alphabet_sizes: vec![2, 2],
            c_size: 0,
            pr_e: 1.0,
            exponent_const: 1.0,
        }
    }
}

impl DPTParams {
    pub fn validate(&self) -> Result<(), DptError> {
        let bad = |m: String| Err(DptError::InvalidParams(m));
        if self.l == 0 || self.n == 0 {
            return bad("l and n must be at least 1".into());
        }
        if self.alphabet_sizes.len() != self.l || self.alphabet_sizes.contains(&0) {
            return bad(format!("need {} positive alphabet sizes", self.l));
        }
        if !(self.c >= 0.0) || !self.c.is_finite() {
            return bad(format!("c = {} must be finite and nonnegative", self.c));
        }
        if let Some(cj) = &self.c_j {
            let s: f64 = cj.iter().sum();
            if cj.len() != self.l || (s - self.c).abs() > 1e-9 * (1.0 + self.c) {
                return bad(format!("per-player communication sums to {s}, expected c = {}", self.c));
            }
        }
        for (name, v) in [("eps", self.eps), ("nu", self.nu)] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} must lie in [0, 1]"));
            }
        }
        if !(self.zeta > 0.0 && self.zeta < 1.0) {
            return bad(format!("zeta = {} must lie in (0, 1)", self.zeta));
        }
        if !(self.pr_e > 0.0 && self.pr_e <= 1.0) {
            return bad(format!("PrE = {} must lie in (0, 1]", self.pr_e));
        }
        if !(self.exponent_const >= 0.0) || !self.exponent_const.is_finite() {
            return bad("exponent_const must be finite and nonnegative".into());
        }
        Ok(())
    }

    /// `log₂(|A¹|·…·|A^l|)`.
    pub fn log_alphabet(&self) -> f64 {
        log_alphabet(&self.alphabet_sizes)
    }
}

fn log_alphabet(sizes: &[usize]) -> f64 {
    sizes.iter().map(|&s| (s as f64).log2()).sum()
}

/// `δ = (|C|·log₂(|A¹|·…·|A^l|) + log₂(1/Pr[E])) / n`.
pub fn delta_of(c_size: usize, pr_e: f64, n: usize, alphabet_sizes: &[usize]) -> Result<f64, DptError> {
    if n == 0 {
        return Err(DptError::InvalidParams("n must be at least 1".into()));
    }
    if !(pr_e > 0.0 && pr_e <= 1.0) {
        return Err(DptError::InvalidParams(format!("PrE = {pr_e} must lie in (0, 1]")));
    }
    Ok((c_size as f64 * log_alphabet(alphabet_sizes) - pr_e.log2()) / n as f64)
}

fn floored_exponent(x: f64) -> i32 {
    if x.is_finite() {
        x.floor().clamp(0.0, i32::MAX as f64) as i32
    } else {
        i32::MAX
    }
}

/// Less-than-one-bit-per-copy bound: `base^⌊k·ν²n/(l²·log₂Π|Aʲ|)⌋` with
/// `base = 1 − ν/2 + 4√(lc)`; equals 1 whenever `base ≥ 1`.
pub fn dpt_case_i_bound(params: &DPTParams) -> Result<f64, DptError> {
    params.validate()?;
    if params.c >= 1.0 {
        return Err(DptError::InvalidParams(format!(
            "case (i) needs c < 1, got {}",
            params.c
        )));
    }
    let l = params.l as f64;
    let base = 1.0 - params.nu / 2.0 + 4.0 * (l * params.c).sqrt();
    if base >= 1.0 {
        return Ok(1.0);
    }
    let log_a = params.log_alphabet();
    let raw = params.exponent_const * params.nu * params.nu * params.n as f64 / (l * l * log_a);
    Ok(base.max(0.0).powi(floored_exponent(raw)))
}

/// Upper end of the case (ii) validity window, `ζ²·eff / (270 l³)`.
pub fn case_ii_gate(l: usize, zeta: f64, eff: f64) -> f64 {
    zeta * zeta * eff / (270.0 * (l as f64).powi(3))
}

/// At-least-one-bit-per-copy bound `(1−ε)^⌊k·n/log₂Π|Aʲ|⌋`, valid when
/// `1 ≤ c < ζ²·eff/(270 l³)` for the partition bound `eff` at error `ε+ζ`.
pub fn dpt_case_ii_bound(params: &DPTParams, eff: f64) -> Result<f64, DptError> {
    params.validate()?;
    if !(eff >= 1.0) {
        return Err(DptError::InvalidParams(format!("eff = {eff} must be at least 1")));
    }
    let limit = case_ii_gate(params.l, params.zeta, eff);
    if !(params.c >= 1.0 && params.c < limit) {
        return Err(DptError::GateViolated { c: params.c, limit });
    }
    let raw = params.exponent_const * params.n as f64 / params.log_alphabet();
    Ok((1.0 - params.eps).clamp(0.0, 1.0).powi(floored_exponent(raw)))
}

/// Which form of the random-subset bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RandvMode {
    /// `(ω* + β(√(lc) + l√(t·log₂Π|Aʲ|/n)))^t` with `ω* = 1 − ν`.
    Generic,
    /// `((1 − ν + β(√c + √(t/n)))/9)^t` for the eavesdropper Magic Square game.
    Mse,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandvParams {
    pub t: usize,
    pub n: usize,
    pub c: f64,
    pub l: usize,
    pub nu: f64,
    /// Stand-in for the unspecified constant in front of the correction.
    pub beta: f64,
    pub alphabet_sizes: Vec<usize>,
    pub mode: RandvMode,
}

/// Bound on winning a uniformly random size-`t` subset of `n` copies.
pub fn randv_bound(p: &RandvParams) -> Result<f64, DptError> {
    if p.n == 0 || p.t > p.n {
        return Err(DptError::InvalidParams(format!(
            "need 0 ≤ t ≤ n with n ≥ 1 (t = {}, n = {})",
            p.t, p.n
        )));
    }
    if !(0.0..=1.0).contains(&p.nu) || !(p.c >= 0.0) || !(p.beta >= 0.0) {
        return Err(DptError::InvalidParams(
            "nu ∈ [0,1], c ≥ 0 and beta ≥ 0 required".into(),
        ));
    }
    if p.t == 0 {
        return Ok(1.0);
    }
    let frac = p.t as f64 / p.n as f64;
    let base = match p.mode {
        RandvMode::Generic => {
            if p.alphabet_sizes.len() != p.l {
                return Err(DptError::InvalidParams(format!("need {} alphabet sizes", p.l)));
            }
            let l = p.l as f64;
            (1.0 - p.nu) + p.beta * ((l * p.c).sqrt() + l * (frac * log_alphabet(&p.alphabet_sizes)).sqrt())
        }
        RandvMode::Mse => (1.0 - p.nu + p.beta * (p.c.sqrt() + frac.sqrt())) / 9.0,
    };
    Ok(base.clamp(0.0, 1.0).powi(p.t as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case_i(l: usize, c: f64, nu: f64, n: usize) -> DPTParams {
        DPTParams {
            l,
            n,
            c,
            nu,
            alphabet_sizes: vec![4; l],
            ..DPTParams::default()
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_of(0, 1.0, 10, &[4, 4]).unwrap(), 0.0);
        assert!((delta_of(1, 0.5, 10, &[4, 4]).unwrap() - 0.5).abs() < 1e-15);
        let a = delta_of(3, 0.25, 10, &[2, 3]).unwrap();
        let b = delta_of(3, 0.25, 20, &[2, 3]).unwrap();
        assert!((a - 2.0 * b).abs() < 1e-15);
        assert!(delta_of(1, 0.0, 10, &[2]).is_err());
    }

    #[test]
    fn case_i_examples() {
        // c = 0, ν = 1: base 1/2, exponent ⌊n/(l²·log)⌋.
        let p = case_i(2, 0.0, 1.0, 160);
        assert!((dpt_case_i_bound(&p).unwrap() - 0.5f64.powi(10)).abs() < 1e-15);
        assert_eq!(dpt_case_i_bound(&case_i(2, 0.0, 0.0, 100)).unwrap(), 1.0);
        // l = 2, c = 0.01, ν = 0.5: base 1 − 0.25 + 4√0.02 > 1, so the bound is trivial.
        assert_eq!(dpt_case_i_bound(&case_i(2, 0.01, 0.5, 10_000)).unwrap(), 1.0);
        // Smaller c gives base < 1 with exponent ⌊0.25·10⁴/16⌋ = 156.
        let base = 1.0 - 0.25 + 4.0 * (2.0f64 * 1e-4).sqrt();
        let got = dpt_case_i_bound(&case_i(2, 1e-4, 0.5, 10_000)).unwrap();
        assert!((got / base.powi(156) - 1.0).abs() < 1e-12, "{got}");
        assert!(dpt_case_i_bound(&case_i(2, 1.0, 0.5, 10)).is_err());
    }

    #[test]
    fn case_i_is_trivial_above_threshold() {
        for l in 1..=4 {
            for nu in [0.1, 0.5, 1.0] {
                let c = nu * nu / (64.0 * l as f64);
                for k in [1.0, 1.5, 4.0] {
                    if c * k < 1.0 {
                        assert_eq!(dpt_case_i_bound(&case_i(l, c * k, nu, 1000)).unwrap(), 1.0);
                    }
                }
            }
        }
    }

    #[test]
    fn case_i_monotonicity() {
        let grid_c = [0.0, 1e-5, 1e-4, 5e-4, 1e-3];
        let grid_nu = [0.2, 0.4, 0.6, 0.8, 1.0];
        let grid_n = [100, 1000, 5000, 20000];
        for &nu in &grid_nu {
            for &n in &grid_n {
                let vals: Vec<f64> = grid_c
                    .iter()
                    .map(|&c| dpt_case_i_bound(&case_i(2, c, nu, n)).unwrap())
                    .collect();
                assert!(vals.windows(2).all(|w| w[1] >= w[0]), "c: {vals:?}");
            }
        }
        for &c in &grid_c {
            for &n in &grid_n {
                let vals: Vec<f64> = grid_nu
                    .iter()
                    .map(|&nu| dpt_case_i_bound(&case_i(2, c, nu, n)).unwrap())
                    .collect();
                assert!(vals.windows(2).all(|w| w[1] <= w[0]), "nu: {vals:?}");
            }
            for &nu in &grid_nu {
                let vals: Vec<f64> = grid_n
                    .iter()
                    .map(|&n| dpt_case_i_bound(&case_i(2, c, nu, n)).unwrap())
                    .collect();
                assert!(vals.windows(2).all(|w| w[1] <= w[0]), "n: {vals:?}");
            }
        }
    }

    #[test]
    fn case_ii_examples() {
        let mut p = DPTParams {
            n: 100,
            c: 1.0,
            eps: 0.0,
            zeta: 0.1,
            alphabet_sizes: vec![4, 4],
            ..DPTParams::default()
        };
        assert_eq!(dpt_case_ii_bound(&p, 1e6).unwrap(), 1.0);
        p.eps = 0.5;
        assert!((dpt_case_ii_bound(&p, 1e6).unwrap() - 0.5f64.powi(25)).abs() < 1e-18);
        assert!((case_ii_gate(2, 0.1, 1e6) - 0.01 * 1e6 / 2160.0).abs() < 1e-12);
        assert!(case_ii_gate(2, 0.1, 1e6) > 4.6);
        // Gate violations are reported.
        assert!(matches!(
            dpt_case_ii_bound(&p, 100.0),
            Err(DptError::GateViolated { .. })
        ));
        p.c = 0.5;
        assert!(matches!(dpt_case_ii_bound(&p, 1e6), Err(DptError::GateViolated { .. })));
    }

    #[test]
    fn per_player_split_must_match() {
        let p = DPTParams {
            c: 0.5,
            c_j: Some(vec![0.25, 0.2]),
            ..DPTParams::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn randv_examples() {
        let mut p = RandvParams {
            t: 0,
            n: 1000,
            c: 0.01,
            l: 3,
            nu: 0.1,
            beta: 1.0,
            alphabet_sizes: vec![4, 4, 36],
            mode: RandvMode::Mse,
        };
        assert_eq!(randv_bound(&p).unwrap(), 1.0);
        p.t = 10;
        let want = (1.1f64 / 9.0).powi(10);
        assert!((randv_bound(&p).unwrap() - want).abs() < 1e-15 * want.max(1e-300) + 1e-300);
        p.c = 0.0;
        p.t = p.n;
        assert!((randv_bound(&p).unwrap() - ((1.0 - 0.1 + 1.0) / 9.0f64).powi(1000)).abs() < 1e-300);
        p.t = p.n + 1;
        assert!(randv_bound(&p).is_err());
    }

    #[test]
    fn randv_nonincreasing_in_t_below_one() {
        let mut p = RandvParams {
            t: 0,
            n: 10_000,
            c: 0.0,
            l: 2,
            nu: 0.3,
            beta: 0.05,
            alphabet_sizes: vec![4, 4],
            mode: RandvMode::Generic,
        };
        let mut prev = 1.0;
        for t in [1, 2, 5, 10, 20] {
            p.t = t;
            let v = randv_bound(&p).unwrap();
            assert!(v <= prev + 1e-15, "t={t}: {v} > {prev}");
            prev = v;
        }
    }
}
