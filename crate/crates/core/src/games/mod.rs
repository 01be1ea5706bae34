//! l-player nonlocal games.
//!
//! A game is an input distribution `p` over `X¹×…×X^l`, output alphabets
//! `A¹…A^l` and a winning predicate `V(a, x)`. Tuples are flattened in
//! mixed radix with player 0 most significant; the dense predicate table is
//! indexed by `a_idx · |X| + x_idx`.

mod builtin;
mod classical;
mod json;
mod quantum;
mod repeat;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::qcore::QcoreError;

pub use builtin::{
    builtin, canonical_ms_strategy, chsh, magic_square, mermin_peres_square, mse, xor_game, BUILTIN_NAMES,
};
pub use classical::{classical_value, DEFAULT_STRATEGY_BUDGET};
pub use json::{GameSpec, PredicateSpec};
pub use quantum::{
    evaluate_quantum_strategy, quantum_correlation, seesaw, seesaw_with_trace, QuantumStrategy, SeesawConfig,
    SeesawTrace, POVM_TOL,
};
pub use repeat::{
    random_subset_value, repeat, MonteCarloEstimate, RepeatedPlay, DENSE_TABLE_LIMIT, DISTRIBUTION_LIMIT,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("budget exceeded: need {needed:e}, budget {budget:e}")]
    BudgetExceeded { needed: f64, budget: f64 },
    #[error("invalid POVM: {0}")]
    Povm(String),
    #[error("strategy does not match game: {0}")]
    Mismatch(String),
    #[error("unknown builtin game {0:?}")]
    UnknownBuiltin(String),
    #[error("game JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}

/// Mixed-radix encoding of tuples, first digit most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Radix {
    sizes: Vec<usize>,
    len: usize,
}

impl Radix {
    pub fn new(sizes: Vec<usize>) -> Self {
        let len = sizes.iter().product();
        Self { sizes, len }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Number of tuples.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.sizes).fold(0, |acc, (&d, &s)| acc * s + d)
    }

    pub fn decode(&self, mut idx: usize, out: &mut [usize]) {
        for k in (0..self.sizes.len()).rev() {
            out[k] = idx % self.sizes[k];
            idx /= self.sizes[k];
        }
    }

    pub fn decode_vec(&self, idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        self.decode(idx, &mut out);
        out
    }
}

/// Callable predicate `V(a, x)` over per-player output and input indices.
pub type PredicateFn = dyn Fn(&[usize], &[usize]) -> bool + Send + Sync;

/// Winning predicate storage.
#[derive(Clone)]
pub enum WinRule {
    /// Dense table indexed by `a_idx · |X| + x_idx`.
    Table(Arc<Vec<bool>>),
    Callable(Arc<PredicateFn>),
}

impl fmt::Debug for WinRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WinRule::Table(t) => write!(f, "Table({} entries)", t.len()),
            WinRule::Callable(_) => f.write_str("Callable"),
        }
    }
}

/// An l-player game `(p, X¹×…×X^l, A¹×…×A^l, V)`.
#[derive(Debug, Clone)]
pub struct GamePredicate {
    name: Option<String>,
    inputs: Vec<Vec<String>>,
    outputs: Vec<Vec<String>>,
    p: Vec<f64>,
    rule: WinRule,
    input_radix: Radix,
    output_radix: Radix,
    suggested_dims: Option<Vec<usize>>,
}

impl GamePredicate {
    pub fn new(
        inputs: Vec<Vec<String>>,
        outputs: Vec<Vec<String>>,
        p: Vec<f64>,
        rule: WinRule,
    ) -> Result<Self, GameError> {
        if inputs.is_empty() || inputs.len() != outputs.len() {
            return Err(GameError::InvalidGame(format!(
                "{} input alphabets for {} output alphabets",
                inputs.len(),
                outputs.len()
            )));
        }
        if inputs.iter().chain(&outputs).any(Vec::is_empty) {
            return Err(GameError::InvalidGame("empty alphabet".into()));
        }
        let input_radix = Radix::new(inputs.iter().map(Vec::len).collect());
        let output_radix = Radix::new(outputs.iter().map(Vec::len).collect());
        if p.len() != input_radix.len() {
            return Err(GameError::InvalidGame(format!(
                "p has {} entries, expected {}",
                p.len(),
                input_radix.len()
            )));
        }
        let sum: f64 = p.iter().sum();
        if p.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) || (sum - 1.0).abs() > 1e-9 {
            return Err(GameError::InvalidGame(format!(
                "p must be a probability distribution (sum {sum})"
            )));
        }
        if let WinRule::Table(t) = &rule {
            let want = input_radix.len() * output_radix.len();
            if t.len() != want {
                return Err(GameError::InvalidGame(format!(
                    "V has {} entries, expected {want}",
                    t.len()
                )));
            }
        }
        Ok(Self {
            name: None,
            inputs,
            outputs,
            p,
            rule,
            input_radix,
            output_radix,
            suggested_dims: None,
        })
    }

    /// Builds a dense table by evaluating `v` on every `(a, x)` pair.
    pub fn from_fn(
        inputs: Vec<Vec<String>>,
        outputs: Vec<Vec<String>>,
        p: Vec<f64>,
        v: impl Fn(&[usize], &[usize]) -> bool,
    ) -> Result<Self, GameError> {
        let ir = Radix::new(inputs.iter().map(Vec::len).collect());
        let or = Radix::new(outputs.iter().map(Vec::len).collect());
        let mut table = Vec::with_capacity(ir.len() * or.len());
        let mut a = vec![0; or.sizes().len()];
        let mut x = vec![0; ir.sizes().len()];
        for ai in 0..or.len() {
            or.decode(ai, &mut a);
            for xi in 0..ir.len() {
                ir.decode(xi, &mut x);
                table.push(v(&a, &x));
            }
        }
        Self::new(inputs, outputs, p, WinRule::Table(Arc::new(table)))
    }

    pub(crate) fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub(crate) fn with_suggested_dims(mut self, dims: Vec<usize>) -> Self {
        self.suggested_dims = Some(dims);
        self
    }

    /// Replaces the input distribution.
    pub fn with_distribution(mut self, p: Vec<f64>) -> Result<Self, GameError> {
        let checked = Self::new(self.inputs.clone(), self.outputs.clone(), p, self.rule.clone())?;
        self.p = checked.p;
        Ok(self)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn players(&self) -> usize {
        self.inputs.len()
    }

    pub fn inputs(&self) -> &[Vec<String>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vec<String>] {
        &self.outputs
    }

    pub fn input_radix(&self) -> &Radix {
        &self.input_radix
    }

    pub fn output_radix(&self) -> &Radix {
        &self.output_radix
    }

    pub fn input_sizes(&self) -> &[usize] {
        self.input_radix.sizes()
    }

    pub fn output_sizes(&self) -> &[usize] {
        self.output_radix.sizes()
    }

    /// `p(x)` for a flat input index.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn rule(&self) -> &WinRule {
        &self.rule
    }

    /// Local dimensions the constructor suggests for see-saw.
    pub fn suggested_dims(&self) -> Vec<usize> {
        self.suggested_dims.clone().unwrap_or_else(|| vec![2; self.players()])
    }

    pub fn wins(&self, a: &[usize], x: &[usize]) -> bool {
        match &self.rule {
            WinRule::Table(t) => t[self.output_radix.encode(a) * self.input_radix.len() + self.input_radix.encode(x)],
            WinRule::Callable(f) => f(a, x),
        }
    }

    /// `V` on flat indices.
    pub fn wins_idx(&self, a_idx: usize, x_idx: usize) -> bool {
        match &self.rule {
            WinRule::Table(t) => t[a_idx * self.input_radix.len() + x_idx],
            WinRule::Callable(f) => {
                let a = self.output_radix.decode_vec(a_idx);
                let x = self.input_radix.decode_vec(x_idx);
                f(&a, &x)
            }
        }
    }
}

/// Conditional distribution `q(a|x)` stored as `q[x_idx · |A| + a_idx]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    input_radix: Radix,
    output_radix: Radix,
    q: Vec<f64>,
}

impl Correlation {
    pub fn new(input_sizes: Vec<usize>, output_sizes: Vec<usize>, q: Vec<f64>) -> Result<Self, GameError> {
        let input_radix = Radix::new(input_sizes);
        let output_radix = Radix::new(output_sizes);
        if q.len() != input_radix.len() * output_radix.len() {
            return Err(GameError::InvalidGame(format!(
                "correlation has {} entries, expected {}",
                q.len(),
                input_radix.len() * output_radix.len()
            )));
        }
        if q.iter().any(|v| !v.is_finite() || *v < -1e-9) {
            return Err(GameError::InvalidGame("correlation entries must be nonnegative".into()));
        }
        Ok(Self {
            input_radix,
            output_radix,
            q,
        })
    }

    pub fn input_radix(&self) -> &Radix {
        &self.input_radix
    }

    pub fn output_radix(&self) -> &Radix {
        &self.output_radix
    }

    pub fn get(&self, a_idx: usize, x_idx: usize) -> f64 {
        self.q[x_idx * self.output_radix.len() + a_idx]
    }

    pub fn row(&self, x_idx: usize) -> &[f64] {
        let n = self.output_radix.len();
        &self.q[x_idx * n..(x_idx + 1) * n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    pub fn total(&self, x_idx: usize) -> f64 {
        self.row(x_idx).iter().sum()
    }

    /// Largest deviation of any per-input total from `target`.
    pub fn normalization_defect(&self, target: f64) -> f64 {
        (0..self.input_radix.len())
            .map(|x| (self.total(x) - target).abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of the no-signalling conditions: for every player `j`,
    /// the marginal of the other players may not depend on `x_j`.
    pub fn no_signalling_defect(&self) -> f64 {
        let l = self.input_radix.sizes().len();
        let mut worst = 0.0f64;
        let mut x = vec![0; l];
        let mut a = vec![0; l];
        for j in 0..l {
            let others_in: Vec<usize> = (0..l)
                .map(|k| if k == j { 1 } else { self.input_radix.sizes()[k] })
                .collect();
            let others_out: Vec<usize> = (0..l)
                .map(|k| if k == j { 1 } else { self.output_radix.sizes()[k] })
                .collect();
            let ri = Radix::new(others_in);
            let ro = Radix::new(others_out);
            for xi in 0..ri.len() {
                ri.decode(xi, &mut x);
                for ai in 0..ro.len() {
                    ro.decode(ai, &mut a);
                    let mut first = None;
                    for xj in 0..self.input_radix.sizes()[j] {
                        x[j] = xj;
                        let x_idx = self.input_radix.encode(&x);
                        let mut m = 0.0;
                        for aj in 0..self.output_radix.sizes()[j] {
                            a[j] = aj;
                            m += self.get(self.output_radix.encode(&a), x_idx);
                        }
                        match first {
                            None => first = Some(m),
                            Some(f) => worst = worst.max((m - f).abs()),
                        }
                    }
                    a[j] = 0;
                }
                x[j] = 0;
            }
        }
        worst
    }

    /// `Σ_x p(x) Σ_{a : V(a,x)} q(a|x)`.
    pub fn winning_probability(&self, game: &GamePredicate) -> Result<f64, GameError> {
        if self.input_radix != game.input_radix || self.output_radix != game.output_radix {
            return Err(GameError::Mismatch("correlation alphabets differ from game".into()));
        }
        let mut total = 0.0;
        for (x, &px) in game.p().iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            let row = self.row(x);
            let s: f64 = row
                .iter()
                .enumerate()
                .filter(|(a, _)| game.wins_idx(*a, x))
                .map(|(_, q)| q)
                .sum();
            total += px * s;
        }
        Ok(total)
    }
}

/// Deterministic strategy: `maps[j][x_j]` is player `j`'s output on input `x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalStrategy {
    pub maps: Vec<Vec<usize>>,
}

impl ClassicalStrategy {
    pub fn new(maps: Vec<Vec<usize>>) -> Self {
        Self { maps }
    }

    fn check(&self, game: &GamePredicate) -> Result<(), GameError> {
        if self.maps.len() != game.players() {
            return Err(GameError::Mismatch("player count".into()));
        }
        for (j, m) in self.maps.iter().enumerate() {
            if m.len() != game.input_sizes()[j] || m.iter().any(|&a| a >= game.output_sizes()[j]) {
                return Err(GameError::Mismatch(format!("map of player {j}")));
            }
        }
        Ok(())
    }

    pub fn outputs_for(&self, x: &[usize]) -> Vec<usize> {
        x.iter().zip(&self.maps).map(|(&xi, m)| m[xi]).collect()
    }

    pub fn value(&self, game: &GamePredicate) -> Result<f64, GameError> {
        self.check(game)?;
        let mut x = vec![0; game.players()];
        let mut total = 0.0;
        for (xi, &px) in game.p().iter().enumerate() {
            game.input_radix().decode(xi, &mut x);
            if game.wins(&self.outputs_for(&x), &x) {
                total += px;
            }
        }
        Ok(total)
    }

    pub fn to_correlation(&self, game: &GamePredicate) -> Result<Correlation, GameError> {
        self.check(game)?;
        let nx = game.input_radix().len();
        let na = game.output_radix().len();
        let mut q = vec![0.0; nx * na];
        let mut x = vec![0; game.players()];
        for xi in 0..nx {
            game.input_radix().decode(xi, &mut x);
            let a = game.output_radix().encode(&self.outputs_for(&x));
            q[xi * na + a] = 1.0;
        }
        Correlation::new(game.input_sizes().to_vec(), game.output_sizes().to_vec(), q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Exact,
    LowerBound,
}

impl ValueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Exact => "exact",
            ValueKind::LowerBound => "lower_bound",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Certificate {
    Classical(ClassicalStrategy),
    Quantum(Box<QuantumStrategy>),
}

#[derive(Debug, Clone)]
pub struct GameValueResult {
    pub value: f64,
    pub kind: ValueKind,
    pub certificate: Certificate,
}
