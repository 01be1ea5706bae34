//! The key-distribution protocol with a metered leakage window.
//!
//! Randomness for run `r` with seed `s`: Alice uses `substream(s, r, 0)`,
//! Bob `substream(s, r, 1)` and the boxes `substream(s, r, 2)`. Run 0 is what
//! [`run_protocol`] executes, so a batch reproduces single runs exactly.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::boxes::{bit, BoxPair, Party};
use super::DiqkdError;
use crate::rng;

/// Slack when comparing `(1−2δ)|T|` with an integer.
const THRESHOLD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub n: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub delta: f64,
    pub seed: u64,
}

impl ProtocolParams {
    pub fn validate(&self) -> Result<(), DiqkdError> {
        let bad = |m: String| Err(DiqkdError::InvalidParams(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha = {} must lie in (0, 1]", self.alpha));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad(format!("gamma = {} must lie in (0, 1]", self.gamma));
        }
        if !(0.0..0.5).contains(&self.delta) {
            return bad(format!("delta = {} must lie in [0, 1/2)", self.delta));
        }
        Ok(())
    }

    /// `|S| = max(1, ⌊αn⌋)`.
    pub fn s_size(&self) -> usize {
        ((self.alpha * self.n as f64).floor() as usize).clamp(1, self.n)
    }

    /// `|T| = max(1, ⌊γ|S|⌋)`.
    pub fn t_size(&self) -> usize {
        let s = self.s_size();
        ((self.gamma * s as f64).floor() as usize).clamp(1, s)
    }
}

/// Bits the adversary may still send; every message is debited here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LeakageBudget {
    pub limit_bits: u64,
    pub used_bits: u64,
}

impl LeakageBudget {
    pub fn new(limit_bits: u64) -> Self {
        Self {
            limit_bits,
            used_bits: 0,
        }
    }

    /// Budget `⌊c·n⌋` for `c` bits per copy.
    pub fn per_copy(c: f64, n: usize) -> Result<Self, DiqkdError> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(DiqkdError::InvalidParams(format!(
                "c = {c} must be finite and nonnegative"
            )));
        }
        Ok(Self::new((c * n as f64).floor() as u64))
    }

    pub fn debit(&mut self, bits: u64) -> Result<(), DiqkdError> {
        let needed = self.used_bits.saturating_add(bits);
        if needed > self.limit_bits {
            return Err(DiqkdError::BudgetExceeded {
                needed,
                limit: self.limit_bits,
            });
        }
        self.used_bits = needed;
        Ok(())
    }

    pub fn remaining(&self) -> u64 {
        self.limit_bits - self.used_bits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// Between input entry and output production.
    #[default]
    PreOutput,
    /// After the outputs are fixed; always a protocol violation.
    PostOutput,
}

/// One message of an adversary script.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryRound {
    pub from: Party,
    pub to: Party,
    pub bits: usize,
    /// Built-in behaviour producing the message: `zeros`, `inputs`, `outputs`
    /// for boxes, and `zeros` or `relay` (forward what Eve has received) for Eve.
    pub function_id: String,
    #[serde(default)]
    pub phase: Phase,
}

/// `{"rounds": [{"from", "to", "bits", "function_id"}, …]}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AdversaryScript {
    pub rounds: Vec<AdversaryRound>,
}

impl AdversaryScript {
    pub fn from_json_str(s: &str) -> Result<Self, DiqkdError> {
        let script: Self = serde_json::from_str(s).map_err(|e| DiqkdError::Json(e.to_string()))?;
        for r in &script.rounds {
            if r.from == r.to {
                return Err(DiqkdError::Adversary(format!("{:?} cannot message itself", r.from)));
            }
        }
        Ok(script)
    }

    /// Total bits the script sends.
    pub fn total_bits(&self) -> u64 {
        self.rounds.iter().map(|r| r.bits as u64).sum()
    }

    /// Alice's box leaks its inputs for the first `copies` copies to Bob's box.
    pub fn leak_alice_inputs(copies: usize) -> Self {
        Self {
            rounds: vec![AdversaryRound {
                from: Party::AliceBox,
                to: Party::BobBox,
                bits: 2 * copies,
                function_id: "inputs".into(),
                phase: Phase::PreOutput,
            }],
        }
    }
}

/// Eve's side of the leakage channel: a log of everything she received.
#[derive(Debug, Default)]
struct Eve {
    log: Vec<(String, Vec<bool>)>,
}

impl Eve {
    fn compose(&self, bits: usize, function_id: &str) -> Result<(String, Vec<bool>), DiqkdError> {
        match function_id {
            "zeros" => Ok(("zeros".into(), vec![false; bits])),
            "relay" => {
                let tag = self.log.first().map_or("zeros".to_string(), |(t, _)| t.clone());
                let mut msg: Vec<bool> = self
                    .log
                    .iter()
                    .flat_map(|(_, m)| m.iter().copied())
                    .take(bits)
                    .collect();
                msg.resize(bits, false);
                Ok((tag, msg))
            }
            other => Err(DiqkdError::Adversary(format!("unknown Eve behaviour {other:?}"))),
        }
    }
}

/// Public transcript and statistics of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranscriptRecord {
    /// Sifted positions, increasing.
    pub s: Vec<usize>,
    /// Test positions, increasing, `T ⊆ S`.
    pub t: Vec<usize>,
    pub x_s: Vec<u8>,
    pub y_s: Vec<u8>,
    pub a_t: Vec<u8>,
    pub aborted: bool,
    pub test_matches: usize,
    pub test_threshold: usize,
    /// `K^A = (a_i[y_i])_{i∈S}`; present only without abort.
    pub key_a: Option<Vec<u8>>,
    /// `K^B = (b_i[x_i])_{i∈S}`; present only without abort.
    pub key_b: Option<Vec<u8>>,
    /// Fraction of mismatches `a_i[y_i] ≠ b_i[x_i]` on `T`.
    pub qber_t: f64,
    /// Fraction of mismatches on `S` (simulator-side statistic).
    pub mismatch_s: f64,
    pub leaked_bits: u64,
}

/// Outcome of the test on `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestOutcome {
    Pass,
    Abort,
}

/// Smallest number of matches that passes: `⌈(1−2δ)|T|⌉`.
pub fn test_threshold(t_len: usize, delta: f64) -> usize {
    ((1.0 - 2.0 * delta) * t_len as f64 - THRESHOLD_SLACK).ceil().max(0.0) as usize
}

/// Passes iff `a_i[y_i] = b_i[x_i]` for at least `(1−2δ)|T|` positions.
pub fn abort_test(a_t: &[u8], b_t: &[u8], x_t: &[u8], y_t: &[u8], delta: f64) -> TestOutcome {
    let matches = (0..a_t.len())
        .filter(|&i| bit(a_t[i], y_t[i]) == bit(b_t[i], x_t[i]))
        .count();
    if matches >= test_threshold(a_t.len(), delta) {
        TestOutcome::Pass
    } else {
        TestOutcome::Abort
    }
}

/// Runs the protocol once (run index 0).
pub fn run_protocol(
    params: &ProtocolParams,
    boxes: &mut dyn BoxPair,
    adversary: Option<&AdversaryScript>,
    budget: &mut LeakageBudget,
) -> Result<TranscriptRecord, DiqkdError> {
    run_indexed(params, 0, boxes, adversary, budget)
}

fn run_indexed(
    params: &ProtocolParams,
    run: u64,
    boxes: &mut dyn BoxPair,
    adversary: Option<&AdversaryScript>,
    budget: &mut LeakageBudget,
) -> Result<TranscriptRecord, DiqkdError> {
    params.validate()?;
    let n = params.n;
    let mut alice = rng::substream(params.seed, run, 0);
    let mut bob = rng::substream(params.seed, run, 1);
    let mut box_rng = rng::substream(params.seed, run, 2);

    let x: Vec<u8> = (0..n).map(|_| alice.gen_range(0..3)).collect();
    let y: Vec<u8> = (0..n).map(|_| bob.gen_range(0..3)).collect();
    boxes.load(&x, &y, &mut box_rng);

    let rounds = adversary.map_or(&[][..], |a| a.rounds.as_slice());
    let mut eve = Eve::default();
    for r in rounds.iter().filter(|r| r.phase == Phase::PreOutput) {
        budget.debit(r.bits as u64)?;
        let (tag, msg) = match r.from {
            Party::Eve => eve.compose(r.bits, &r.function_id)?,
            side => (r.function_id.clone(), boxes.compose(side, r.bits, &r.function_id)?),
        };
        debug_assert_eq!(msg.len(), r.bits);
        match r.to {
            Party::Eve => eve.log.push((tag, msg)),
            side => boxes.receive(side, &tag, &msg),
        }
    }
    let (a, b) = boxes.outputs(&mut box_rng);
    if rounds.iter().any(|r| r.phase == Phase::PostOutput) {
        return Err(DiqkdError::Adversary(
            "message scheduled after the outputs were fixed".into(),
        ));
    }
    if a.len() != n || b.len() != n {
        return Err(DiqkdError::Adversary(
            "boxes returned the wrong number of outputs".into(),
        ));
    }

    let mut s: Vec<usize> = sample(&mut alice, n, params.s_size()).into_vec();
    s.sort_unstable();
    let mut t: Vec<usize> = sample(&mut alice, s.len(), params.t_size())
        .into_iter()
        .map(|k| s[k])
        .collect();
    t.sort_unstable();

    let ka = |i: usize| bit(a[i], y[i]);
    let kb = |i: usize| bit(b[i], x[i]);
    let pick = |v: &[u8], idx: &[usize]| -> Vec<u8> { idx.iter().map(|&i| v[i]).collect() };
    let outcome = abort_test(&pick(&a, &t), &pick(&b, &t), &pick(&x, &t), &pick(&y, &t), params.delta);
    let test_matches = t.iter().filter(|&&i| ka(i) == kb(i)).count();
    let mismatch_s = s.iter().filter(|&&i| ka(i) != kb(i)).count() as f64 / s.len() as f64;
    let aborted = outcome == TestOutcome::Abort;
    Ok(TranscriptRecord {
        x_s: pick(&x, &s),
        y_s: pick(&y, &s),
        a_t: pick(&a, &t),
        aborted,
        test_matches,
        test_threshold: test_threshold(t.len(), params.delta),
        key_a: (!aborted).then(|| s.iter().map(|&i| ka(i)).collect()),
        key_b: (!aborted).then(|| s.iter().map(|&i| kb(i)).collect()),
        qber_t: 1.0 - test_matches as f64 / t.len() as f64,
        mismatch_s,
        leaked_bits: budget.used_bits,
        s,
        t,
    })
}

/// Aggregate statistics over a batch of runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchSummary {
    pub runs: usize,
    pub aborts: usize,
    pub abort_freq: f64,
    /// Mean QBER on `T` over all runs.
    pub mean_qber: f64,
    /// Mean mismatch fraction on `S` over non-aborted runs (NaN if none).
    pub mean_mismatch_nonaborted: f64,
    /// Whether `K^A = K^B` in every non-aborted run.
    pub keys_always_agree: bool,
}

/// Runs `runs` independent executions (run `r` uses the streams of index `r`)
/// in parallel; each run gets fresh boxes and a fresh `⌊c·n⌋` budget.
pub fn run_batch<F>(
    params: &ProtocolParams,
    make_boxes: F,
    adversary: Option<&AdversaryScript>,
    c: f64,
    runs: usize,
) -> Result<Vec<TranscriptRecord>, DiqkdError>
where
    F: Fn() -> Result<Box<dyn BoxPair>, DiqkdError> + Sync,
{
    params.validate()?;
    LeakageBudget::per_copy(c, params.n)?;
    let threads = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(runs.max(1));
    let chunk = runs.div_ceil(threads).max(1);
    let mut results: Vec<Option<Result<TranscriptRecord, DiqkdError>>> = vec![None; runs];
    std::thread::scope(|scope| {
        for (k, slots) in results.chunks_mut(chunk).enumerate() {
            let make_boxes = &make_boxes;
            scope.spawn(move || {
                for (i, slot) in slots.iter_mut().enumerate() {
                    let r = (k * chunk + i) as u64;
                    *slot = Some(make_boxes().and_then(|mut b| {
                        let mut budget = LeakageBudget::per_copy(c, params.n)?;
                        run_indexed(params, r, b.as_mut(), adversary, &mut budget)
                    }));
                }
            });
        }
    });
    results.into_iter().map(|r| r.expect("every run executed")).collect()
}

pub fn summarize(records: &[TranscriptRecord]) -> BatchSummary {
    let runs = records.len();
    let aborts = records.iter().filter(|r| r.aborted).count();
    let kept: Vec<&TranscriptRecord> = records.iter().filter(|r| !r.aborted).collect();
    BatchSummary {
        runs,
        aborts,
        abort_freq: if runs == 0 {
            f64::NAN
        } else {
            aborts as f64 / runs as f64
        },
        mean_qber: records.iter().map(|r| r.qber_t).sum::<f64>() / runs as f64,
        mean_mismatch_nonaborted: kept.iter().map(|r| r.mismatch_s).sum::<f64>() / kept.len() as f64,
        keys_always_agree: kept.iter().all(|r| r.key_a == r.key_b),
    }
}
