//! Device models: honest δ-noisy Magic Square boxes and a classical cheating
//! pair that can exploit leaked inputs.
//!
//! Outputs are 3-bit strings stored as integers `v ∈ 0..8` with `a[k]` the
//! `k`-th character of the binary label, i.e. `a[k] = (v >> (2−k)) & 1`.
//! Alice's strings have even parity, Bob's odd parity.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DiqkdError;
use crate::games::{canonical_ms_strategy, classical_value, magic_square, quantum_correlation, Certificate};

/// Bit `k` of a 3-bit output string.
pub fn bit(v: u8, k: u8) -> u8 {
    (v >> (2 - k)) & 1
}

/// The `idx`-th string of the given parity class, in label order.
fn parity_string(parity: u32, idx: usize) -> u8 {
    (0..8u8)
        .filter(|v| v.count_ones() % 2 == parity)
        .nth(idx)
        .expect("index within parity class")
}

/// Whether copy `(x, y)` with outputs `(a, b)` is won: `a[y] = b[x]`.
pub fn copy_wins(a: u8, b: u8, x: u8, y: u8) -> bool {
    bit(a, y) == bit(b, x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Party {
    AliceBox,
    BobBox,
    Eve,
}

/// A pair of boxes for `n` copies of Magic Square.
///
/// The protocol calls `load`, then runs any leakage rounds (`compose` for the
/// sending box, `receive` for the receiving one), then `outputs`, after which
/// no further messages are allowed.
pub trait BoxPair: Send {
    fn load(&mut self, x: &[u8], y: &[u8], rng: &mut ChaCha8Rng);

    /// A message of exactly `bits` bits produced by the box on side `from`.
    fn compose(&mut self, from: Party, bits: usize, function_id: &str) -> Result<Vec<bool>, DiqkdError>;

    fn receive(&mut self, at: Party, function_id: &str, msg: &[bool]);

    /// Fixes the outputs `(a, b)`.
    fn outputs(&mut self, rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<u8>);
}

/// Message behaviours available to every box:
/// - `zeros`: `bits` zero bits;
/// - `inputs`: the sender's inputs, two bits per copy from copy 0 on;
/// - `outputs`: the first two bits of the sender's planned outputs per copy
///   (the parity fixes the third).
fn standard_message(
    function_id: &str,
    bits: usize,
    inputs: &[u8],
    planned: Option<&[u8]>,
) -> Result<Vec<bool>, DiqkdError> {
    let two_bits = |vals: &mut dyn Iterator<Item = (u8, u8)>| -> Vec<bool> {
        let mut out: Vec<bool> = vals.flat_map(|(hi, lo)| [hi == 1, lo == 1]).take(bits).collect();
        out.resize(bits, false);
        out
    };
    match function_id {
        "zeros" => Ok(vec![false; bits]),
        "inputs" => Ok(two_bits(&mut inputs.iter().map(|&x| (x >> 1, x & 1)))),
        "outputs" => match planned {
            Some(p) => Ok(two_bits(&mut p.iter().map(|&v| (bit(v, 0), bit(v, 1))))),
            None => Err(DiqkdError::Adversary(
                "outputs are not determined before output time".into(),
            )),
        },
        other => Err(DiqkdError::Adversary(format!("unknown message function {other:?}"))),
    }
}

fn decode_pairs(msg: &[bool]) -> Vec<u8> {
    msg.chunks_exact(2).map(|c| (c[0] as u8) << 1 | c[1] as u8).collect()
}

/// Honest boxes playing every copy δ-noisily: `(a, b)` is sampled from the
/// canonical perfect quantum strategy, then with probability `2δ` Bob's output
/// is replaced by a uniform odd-parity string. Each copy is won with
/// probability exactly `1 − δ` whatever the inputs.
#[derive(Debug, Clone)]
pub struct HonestBoxes {
    delta: f64,
    /// `cdf[3x + y]` is the cumulative distribution over `(a_idx, b_idx)`.
    cdf: Vec<Vec<f64>>,
    x: Vec<u8>,
    y: Vec<u8>,
    planned: Option<(Vec<u8>, Vec<u8>)>,
}

impl HonestBoxes {
    pub fn new(delta: f64) -> Result<Self, DiqkdError> {
        if !(0.0..=0.5).contains(&delta) {
            return Err(DiqkdError::InvalidParams(format!(
                "delta = {delta} must lie in [0, 1/2]"
            )));
        }
        let g = magic_square();
        let q = quantum_correlation(&g, &canonical_ms_strategy())?;
        let cdf = (0..9)
            .map(|xi| {
                let mut acc = 0.0;
                q.row(xi)
                    .iter()
                    .map(|&p| {
                        acc += p.max(0.0);
                        acc
                    })
                    .collect::<Vec<f64>>()
            })
            .map(|mut c| {
                let total = *c.last().unwrap();
                c.iter_mut().for_each(|v| *v /= total);
                c
            })
            .collect();
        Ok(Self {
            delta,
            cdf,
            x: Vec::new(),
            y: Vec::new(),
            planned: None,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Alias matching the protocol vocabulary.
pub fn honest_boxes(delta: f64) -> Result<HonestBoxes, DiqkdError> {
    HonestBoxes::new(delta)
}

impl BoxPair for HonestBoxes {
    fn load(&mut self, x: &[u8], y: &[u8], rng: &mut ChaCha8Rng) {
        self.x = x.to_vec();
        self.y = y.to_vec();
        let mut a = Vec::with_capacity(x.len());
        let mut b = Vec::with_capacity(x.len());
        for (&xi, &yi) in x.iter().zip(y) {
            let cdf = &self.cdf[3 * xi as usize + yi as usize];
            let u: f64 = rng.gen();
            let k = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1);
            a.push(parity_string(0, k / 4));
            let mut bv = parity_string(1, k % 4);
            if rng.gen_bool(2.0 * self.delta) {
                bv = parity_string(1, rng.gen_range(0..4));
            }
            b.push(bv);
        }
        self.planned = Some((a, b));
    }

    fn compose(&mut self, from: Party, bits: usize, function_id: &str) -> Result<Vec<bool>, DiqkdError> {
        let (inputs, planned) = match from {
            Party::AliceBox => (&self.x, self.planned.as_ref().map(|p| p.0.as_slice())),
            Party::BobBox => (&self.y, self.planned.as_ref().map(|p| p.1.as_slice())),
            Party::Eve => return Err(DiqkdError::Adversary("boxes cannot speak for Eve".into())),
        };
        standard_message(function_id, bits, inputs, planned)
    }

    fn receive(&mut self, _at: Party, _function_id: &str, _msg: &[bool]) {}

    fn outputs(&mut self, _rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<u8>) {
        self.planned.take().expect("outputs requested after load")
    }
}

/// A classical cheating pair: each box answers with a fixed optimal classical
/// Magic Square strategy (winning 8/9 of uniformly random copies). When Bob's
/// box learns Alice's input `x_i` through leakage (`inputs` messages), it
/// answers copy `i` so that it is won with certainty.
#[derive(Debug, Clone)]
pub struct ClassicalCheatingBoxes {
    alice: [u8; 3],
    bob: [u8; 3],
    x: Vec<u8>,
    y: Vec<u8>,
    known_x: Vec<Option<u8>>,
}

impl ClassicalCheatingBoxes {
    pub fn new() -> Result<Self, DiqkdError> {
        let g = magic_square();
        let r = classical_value(&g, 1e6)?;
        let Certificate::Classical(s) = r.certificate else {
            unreachable!("classical value returns a classical certificate")
        };
        let pick = |j: usize, parity: u32| -> [u8; 3] {
            let m = &s.maps[j];
            [0, 1, 2].map(|i| parity_string(parity, m[i]))
        };
        Ok(Self {
            alice: pick(0, 0),
            bob: pick(1, 1),
            x: Vec::new(),
            y: Vec::new(),
            known_x: Vec::new(),
        })
    }

    /// Number of copies for which Bob's box currently knows Alice's input.
    pub fn leaked_copies(&self) -> usize {
        self.known_x.iter().filter(|k| k.is_some()).count()
    }
}

impl BoxPair for ClassicalCheatingBoxes {
    fn load(&mut self, x: &[u8], y: &[u8], _rng: &mut ChaCha8Rng) {
        self.x = x.to_vec();
        self.y = y.to_vec();
        self.known_x = vec![None; x.len()];
    }

    fn compose(&mut self, from: Party, bits: usize, function_id: &str) -> Result<Vec<bool>, DiqkdError> {
        match from {
            Party::AliceBox => {
                let planned: Vec<u8> = self.x.iter().map(|&x| self.alice[x as usize]).collect();
                standard_message(function_id, bits, &self.x, Some(&planned))
            }
            Party::BobBox => {
                let planned: Vec<u8> = self.y.iter().map(|&y| self.bob[y as usize]).collect();
                standard_message(function_id, bits, &self.y, Some(&planned))
            }
            Party::Eve => Err(DiqkdError::Adversary("boxes cannot speak for Eve".into())),
        }
    }

    fn receive(&mut self, at: Party, function_id: &str, msg: &[bool]) {
        if at == Party::BobBox && function_id == "inputs" {
            for (slot, x) in self.known_x.iter_mut().zip(decode_pairs(msg)) {
                if x < 3 {
                    *slot = Some(x);
                }
            }
        }
    }

    fn outputs(&mut self, _rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<u8>) {
        let a: Vec<u8> = self.x.iter().map(|&x| self.alice[x as usize]).collect();
        let b = self
            .y
            .iter()
            .enumerate()
            .map(|(i, &y)| match self.known_x[i] {
                Some(x) => {
                    let target = bit(self.alice[x as usize], y);
                    (0..8u8)
                        .find(|&v| v.count_ones() % 2 == 1 && bit(v, x) == target)
                        .expect("an odd string with a prescribed bit exists")
                }
                None => self.bob[y as usize],
            })
            .collect();
        (a, b)
    }
}
