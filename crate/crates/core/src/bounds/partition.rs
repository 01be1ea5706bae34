//! Partition-bound relaxations over abort-augmented alphabets.
//!
//! Every player may output the abort symbol `⊥`, stored as the last index of
//! its augmented alphabet. A correlation "does not abort" on an output tuple
//! iff no component is `⊥`. The three variants constrain the non-abort mass
//! and the success mass:
//!
//! | variant      | non-abort mass          | success mass                     |
//! |--------------|-------------------------|----------------------------------|
//! | `WorstCase`  | `= η` for every input   | `≥ (1−ε)η` for every input       |
//! | `Tilde`      | `= η` for every input   | `p`-average `≥ (1−ε)η`           |
//! | `Average`    | `p`-average `= η`       | `p`-average `≥ (1−ε)η`           |
//!
//! Maximizing `η` over no-signalling correlations gives a lower bound on the
//! quantum partition bound `eff = 1/η`; maximizing over shared-randomness
//! mixtures of deterministic abort-augmented strategies gives an upper bound.

use std::collections::HashMap;
use std::fmt;

use super::lp::{solve_lp, Direction, LinearProgram, Sense};
use super::BoundsError;
use crate::games::{Correlation, GamePredicate, Radix};

/// Smallest `η` the programs will accept; keeps `eff = 1/η` finite.
pub const ETA_FLOOR: f64 = 1e-9;
/// Default cap on the number of deterministic abort-augmented strategy tuples.
pub const DEFAULT_LOCAL_BUDGET: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    WorstCase,
    Tilde,
    Average,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::WorstCase, Variant::Tilde, Variant::Average];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::WorstCase => "worst_case",
            Variant::Tilde => "tilde",
            Variant::Average => "average",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Variant {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "worst_case" | "worst-case" => Ok(Variant::WorstCase),
            "tilde" => Ok(Variant::Tilde),
            "average" | "avg" => Ok(Variant::Average),
            other => Err(BoundsError::InvalidInput(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relaxation {
    NoSignalling,
    Local,
}

impl Relaxation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relaxation::NoSignalling => "no_signalling",
            Relaxation::Local => "local",
        }
    }
}

impl fmt::Display for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Relaxation {
    type Err = BoundsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "no_signalling" | "ns" | "no-signalling" => Ok(Relaxation::NoSignalling),
            "local" => Ok(Relaxation::Local),
            other => Err(BoundsError::InvalidInput(format!("unknown relaxation {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PartitionBoundResult {
    pub eta: f64,
    pub eff: f64,
    pub variant: Variant,
    pub relaxation: Relaxation,
    /// Correlation over the abort-augmented alphabets (`⊥` is the last output of each player).
    pub certificate: Correlation,
}

/// Non-abort mass, success mass and replayed `η` of an abort-augmented correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub eta: f64,
    /// Largest violation of the variant's constraints (and normalization).
    pub violation: f64,
}

/// Maps an augmented output index to the original one, or `None` when some player aborts.
fn augmented_outputs(g: &GamePredicate) -> (Radix, Vec<Option<usize>>) {
    let aug = Radix::new(g.output_sizes().iter().map(|s| s + 1).collect());
    let mut a = vec![0; g.players()];
    let map = (0..aug.len())
        .map(|i| {
            aug.decode(i, &mut a);
            if a.iter().zip(g.output_sizes()).any(|(ai, s)| ai == s) {
                None
            } else {
                Some(g.output_radix().encode(&a))
            }
        })
        .collect();
    (aug, map)
}

/// A column's contribution per input: `(x, non-abort, win)` with nonzero entries only.
type Footprint = Vec<(usize, bool, bool)>;

fn check_eps(eps: f64) -> Result<(), BoundsError> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(BoundsError::InvalidInput(format!("eps = {eps} must lie in [0, 1]")));
    }
    Ok(())
}

/// Appends the variant rows for columns `0..footprints.len()` and `η` at column `eta`.
fn add_variant_rows(
    lp: &mut LinearProgram,
    g: &GamePredicate,
    footprints: &[Footprint],
    eta: usize,
    eps: f64,
    variant: Variant,
) {
    let nx = g.input_radix().len();
    let mut nonabort: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nx];
    let mut win: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nx];
    for (k, fp) in footprints.iter().enumerate() {
        for &(x, n, w) in fp {
            if n {
                nonabort[x].push((k, 1.0));
            }
            if w {
                win[x].push((k, 1.0));
            }
        }
    }
    let p = g.p();
    let averaged = |rows: &[Vec<(usize, f64)>]| -> Vec<(usize, f64)> {
        let mut acc: HashMap<usize, f64> = HashMap::new();
        for (x, row) in rows.iter().enumerate() {
            for &(k, v) in row {
                *acc.entry(k).or_default() += p[x] * v;
            }
        }
        let mut out: Vec<(usize, f64)> = acc.into_iter().filter(|(_, v)| *v != 0.0).collect();
        out.sort_by_key(|e| e.0);
        out
    };
    match variant {
        Variant::WorstCase | Variant::Tilde => {
            for row in &nonabort {
                let mut r = row.clone();
                r.push((eta, -1.0));
                lp.add(r, Sense::Eq, 0.0);
            }
        }
        Variant::Average => {
            let mut r = averaged(&nonabort);
            r.push((eta, -1.0));
            lp.add(r, Sense::Eq, 0.0);
        }
    }
    match variant {
        Variant::WorstCase => {
            for row in &win {
                let mut r = row.clone();
                r.push((eta, -(1.0 - eps)));
                lp.add(r, Sense::Ge, 0.0);
            }
        }
        Variant::Tilde | Variant::Average => {
            let mut r = averaged(&win);
            r.push((eta, -(1.0 - eps)));
            lp.add(r, Sense::Ge, 0.0);
        }
    }
}

/// No-signalling equalities over the correlation variables `offset + x·|A| + a`:
/// for every player `j`, the marginal of the other players may not depend on `x_j`.
pub fn add_no_signalling_rows(lp: &mut LinearProgram, inputs: &Radix, outputs: &Radix, offset: usize) {
    let l = inputs.sizes().len();
    let na = outputs.len();
    let mut x = vec![0; l];
    let mut a = vec![0; l];
    for j in 0..l {
        let nxj = inputs.sizes()[j];
        if nxj < 2 {
            continue;
        }
        let ri = Radix::new((0..l).map(|k| if k == j { 1 } else { inputs.sizes()[k] }).collect());
        let ro = Radix::new((0..l).map(|k| if k == j { 1 } else { outputs.sizes()[k] }).collect());
        for xi in 0..ri.len() {
            ri.decode(xi, &mut x);
            for ai in 0..ro.len() {
                ro.decode(ai, &mut a);
                let marginal = |xj: usize, x: &mut Vec<usize>, a: &mut Vec<usize>| -> Vec<usize> {
                    x[j] = xj;
                    let x_idx = inputs.encode(x);
                    (0..outputs.sizes()[j])
                        .map(|aj| {
                            a[j] = aj;
                            offset + x_idx * na + outputs.encode(a)
                        })
                        .collect()
                };
                let base = marginal(0, &mut x, &mut a);
                for xj in 1..nxj {
                    let other = marginal(xj, &mut x, &mut a);
                    let mut row: Vec<(usize, f64)> = other.iter().map(|&v| (v, 1.0)).collect();
                    row.extend(base.iter().map(|&v| (v, -1.0)));
                    lp.add(row, Sense::Eq, 0.0);
                }
                x[j] = 0;
                a[j] = 0;
            }
        }
    }
}

/// Packages a solution after replaying it: a certificate whose constraint
/// violation is not negligible next to `η` only met the solver's absolute
/// feasibility tolerance, which at the `η` floor means the program is infeasible.
fn finish(
    g: &GamePredicate,
    eps: f64,
    eta: f64,
    variant: Variant,
    relaxation: Relaxation,
    certificate: Correlation,
) -> Result<PartitionBoundResult, BoundsError> {
    let eta = eta.clamp(ETA_FLOOR, 1.0);
    let replay = replay_partition(g, &certificate, eps, variant)?;
    if replay.violation > 1e-3 * eta || (replay.eta - eta).abs() > 1e-3 * eta {
        return Err(BoundsError::Infeasible);
    }
    Ok(PartitionBoundResult {
        eta,
        eff: 1.0 / eta,
        variant,
        relaxation,
        certificate,
    })
}

/// Partition bound over the no-signalling polytope on abort-augmented
/// alphabets: a lower bound on the quantum `eff` of the same variant.
pub fn eff_ns(g: &GamePredicate, eps: f64, variant: Variant) -> Result<PartitionBoundResult, BoundsError> {
    check_eps(eps)?;
    if g.players() > 3 {
        return Err(BoundsError::InvalidInput("at most 3 players are supported".into()));
    }
    let (aug, map) = augmented_outputs(g);
    let nx = g.input_radix().len();
    let na = aug.len();
    let nvars = nx * na;
    let eta = nvars;
    let mut objective = vec![0.0; nvars + 1];
    objective[eta] = 1.0;
    let mut lp = LinearProgram::new(Direction::Maximize, objective);
    lp.set_bounds(eta, ETA_FLOOR, 1.0);

    let footprints: Vec<Footprint> = (0..nvars)
        .map(|k| {
            let (x, a) = (k / na, k % na);
            match map[a] {
                Some(orig) => vec![(x, true, g.wins_idx(orig, x))],
                None => vec![],
            }
        })
        .collect();
    for x in 0..nx {
        lp.add((0..na).map(|a| (x * na + a, 1.0)).collect(), Sense::Eq, 1.0);
    }
    add_no_signalling_rows(&mut lp, g.input_radix(), &aug, 0);
    add_variant_rows(&mut lp, g, &footprints, eta, eps, variant);

    let sol = solve_lp(&lp)?;
    let q: Vec<f64> = sol.x[..nvars].iter().map(|v| v.max(0.0)).collect();
    let cert = Correlation::new(g.input_sizes().to_vec(), aug.sizes().to_vec(), q)?;
    finish(g, eps, sol.x[eta], variant, Relaxation::NoSignalling, cert)
}

/// Partition bound over shared-randomness mixtures of deterministic
/// abort-augmented strategies: an upper bound on the quantum `eff`.
///
/// Strategy tuples with identical per-input (non-abort, win) patterns are
/// merged into one LP column.
pub fn eff_local(
    g: &GamePredicate,
    eps: f64,
    variant: Variant,
    budget: f64,
) -> Result<PartitionBoundResult, BoundsError> {
    check_eps(eps)?;
    let l = g.players();
    let aug_sizes: Vec<usize> = g.output_sizes().iter().map(|s| s + 1).collect();
    let count: f64 = (0..l)
        .map(|j| (aug_sizes[j] as f64).powi(g.input_sizes()[j] as i32))
        .product();
    if count > budget {
        return Err(BoundsError::BudgetExceeded { needed: count, budget });
    }
    let (aug, map) = augmented_outputs(g);
    let nx = g.input_radix().len();
    let inputs: Vec<Vec<usize>> = (0..nx).map(|x| g.input_radix().decode_vec(x)).collect();

    // Enumerate strategy tuples with an odometer over (player, input) digits.
    let digits: Vec<(usize, usize)> = (0..l)
        .flat_map(|j| (0..g.input_sizes()[j]).map(move |xj| (j, xj)))
        .collect();
    let mut maps: Vec<Vec<usize>> = (0..l).map(|j| vec![0; g.input_sizes()[j]]).collect();
    let mut columns: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut representatives: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut footprints: Vec<Footprint> = Vec::new();
    let mut a = vec![0; l];
    loop {
        let mut key = Vec::with_capacity(nx);
        let mut fp = Vec::new();
        for (x, xs) in inputs.iter().enumerate() {
            for j in 0..l {
                a[j] = maps[j][xs[j]];
            }
            let code = match map[aug.encode(&a)] {
                None => 0u8,
                Some(orig) => {
                    let w = g.wins_idx(orig, x);
                    fp.push((x, true, w));
                    1 + w as u8
                }
            };
            key.push(code);
        }
        if let std::collections::hash_map::Entry::Vacant(e) = columns.entry(key) {
            e.insert(footprints.len());
            footprints.push(fp);
            representatives.push(maps.clone());
        }
        let mut k = digits.len();
        let done = loop {
            if k == 0 {
                break true;
            }
            k -= 1;
            let (j, xj) = digits[k];
            maps[j][xj] += 1;
            if maps[j][xj] < aug_sizes[j] {
                break false;
            }
            maps[j][xj] = 0;
        };
        if done {
            break;
        }
    }

    let ncols = footprints.len();
    let eta = ncols;
    let mut objective = vec![0.0; ncols + 1];
    objective[eta] = 1.0;
    let mut lp = LinearProgram::new(Direction::Maximize, objective);
    lp.set_bounds(eta, ETA_FLOOR, 1.0);
    lp.add((0..ncols).map(|k| (k, 1.0)).collect(), Sense::Eq, 1.0);
    add_variant_rows(&mut lp, g, &footprints, eta, eps, variant);
    let sol = solve_lp(&lp)?;

    let na = aug.len();
    let mut q = vec![0.0; nx * na];
    for (k, rep) in representatives.iter().enumerate() {
        let w = sol.x[k].max(0.0);
        if w == 0.0 {
            continue;
        }
        for (x, xs) in inputs.iter().enumerate() {
            let a: Vec<usize> = (0..l).map(|j| rep[j][xs[j]]).collect();
            q[x * na + aug.encode(&a)] += w;
        }
    }
    let cert = Correlation::new(g.input_sizes().to_vec(), aug.sizes().to_vec(), q)?;
    finish(g, eps, sol.x[eta], variant, Relaxation::Local, cert)
}

/// Recomputes `η` from an abort-augmented correlation and measures how far
/// it is from satisfying the variant's constraints.
pub fn replay_partition(g: &GamePredicate, q: &Correlation, eps: f64, variant: Variant) -> Result<Replay, BoundsError> {
    let (aug, map) = augmented_outputs(g);
    if q.output_radix() != &aug || q.input_radix() != g.input_radix() {
        return Err(BoundsError::InvalidInput(
            "certificate alphabets do not match the game".into(),
        ));
    }
    let nx = g.input_radix().len();
    let mut nonabort = vec![0.0; nx];
    let mut success = vec![0.0; nx];
    for x in 0..nx {
        for (a, &v) in q.row(x).iter().enumerate() {
            if let Some(orig) = map[a] {
                nonabort[x] += v;
                if g.wins_idx(orig, x) {
                    success[x] += v;
                }
            }
        }
    }
    let p = g.p();
    let avg = |v: &[f64]| v.iter().zip(p).map(|(a, b)| a * b).sum::<f64>();
    let mut violation = q.normalization_defect(1.0);
    let eta = match variant {
        Variant::WorstCase | Variant::Tilde => {
            let eta = nonabort[0];
            for &n in &nonabort {
                violation = violation.max((n - eta).abs());
            }
            eta
        }
        Variant::Average => avg(&nonabort),
    };
    match variant {
        Variant::WorstCase => {
            for &s in &success {
                violation = violation.max((1.0 - eps) * eta - s);
            }
        }
        Variant::Tilde | Variant::Average => {
            violation = violation.max((1.0 - eps) * eta - avg(&success));
        }
    }
    Ok(Replay { eta, violation })
}

/// Maximum winning probability over no-signalling correlations.
#[derive(Debug, Clone)]
pub struct NsValue {
    pub value: f64,
    pub certificate: Correlation,
}

/// Exact no-signalling value of a game.
///
/// A player with a single input can be conditioned on its output without
/// leaving the no-signalling set, so such players are split off: the value is
/// the maximum over their outputs of the value of the remaining game.
pub fn ns_value(g: &GamePredicate) -> Result<NsValue, BoundsError> {
    let l = g.players();
    if l >= 2 {
        if let Some(k) = (0..l).find(|&j| g.input_sizes()[j] == 1) {
            return ns_value_split(g, k);
        }
    }
    let nx = g.input_radix().len();
    let na = g.output_radix().len();
    let nvars = nx * na;
    let mut objective = vec![0.0; nvars];
    for x in 0..nx {
        for a in 0..na {
            if g.wins_idx(a, x) {
                objective[x * na + a] = g.p()[x];
            }
        }
    }
    let mut lp = LinearProgram::new(Direction::Maximize, objective);
    for x in 0..nx {
        lp.add((0..na).map(|a| (x * na + a, 1.0)).collect(), Sense::Eq, 1.0);
    }
    add_no_signalling_rows(&mut lp, g.input_radix(), g.output_radix(), 0);
    let sol = solve_lp(&lp)?;
    let q: Vec<f64> = sol.x.iter().map(|v| v.max(0.0)).collect();
    Ok(NsValue {
        value: sol.value,
        certificate: Correlation::new(g.input_sizes().to_vec(), g.output_sizes().to_vec(), q)?,
    })
}

fn ns_value_split(g: &GamePredicate, k: usize) -> Result<NsValue, BoundsError> {
    let l = g.players();
    let keep: Vec<usize> = (0..l).filter(|&j| j != k).collect();
    let sub_inputs: Vec<Vec<String>> = keep.iter().map(|&j| g.inputs()[j].clone()).collect();
    let sub_outputs: Vec<Vec<String>> = keep.iter().map(|&j| g.outputs()[j].clone()).collect();
    let mut best: Option<(f64, usize, Correlation)> = None;
    for e in 0..g.output_sizes()[k] {
        let expand = |sub: &[usize], fill: usize| -> Vec<usize> {
            let mut full = Vec::with_capacity(l);
            let mut it = sub.iter();
            for j in 0..l {
                full.push(if j == k { fill } else { *it.next().unwrap() });
            }
            full
        };
        let sub = GamePredicate::from_fn(sub_inputs.clone(), sub_outputs.clone(), g.p().to_vec(), |a, x| {
            g.wins(&expand(a, e), &expand(x, 0))
        })?;
        let r = ns_value(&sub)?;
        if best.as_ref().is_none_or(|(v, _, _)| r.value > *v + 1e-12) {
            best = Some((r.value, e, r.certificate));
        }
    }
    let (value, e, sub_q) = best.expect("nonempty alphabet");
    // Embed: player k deterministically outputs e.
    let nx = g.input_radix().len();
    let na = g.output_radix().len();
    let mut q = vec![0.0; nx * na];
    let mut a_full = vec![0; l];
    let mut x_full = vec![0; l];
    for xs in 0..sub_q.input_radix().len() {
        let xsub = sub_q.input_radix().decode_vec(xs);
        for (pos, &j) in keep.iter().enumerate() {
            x_full[j] = xsub[pos];
        }
        x_full[k] = 0;
        let xi = g.input_radix().encode(&x_full);
        for (asub_idx, &v) in sub_q.row(xs).iter().enumerate() {
            let asub = sub_q.output_radix().decode_vec(asub_idx);
            for (pos, &j) in keep.iter().enumerate() {
                a_full[j] = asub[pos];
            }
            a_full[k] = e;
            q[xi * na + g.output_radix().encode(&a_full)] = v;
        }
    }
    Ok(NsValue {
        value,
        certificate: Correlation::new(g.input_sizes().to_vec(), g.output_sizes().to_vec(), q)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{chsh, magic_square};
    use rand::{Rng, SeedableRng};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn always_true() -> GamePredicate {
        GamePredicate::from_fn(
            vec![labels(2), labels(2)],
            vec![labels(2), labels(2)],
            vec![0.25; 4],
            |_, _| true,
        )
        .unwrap()
    }

    #[test]
    fn always_true_predicate_has_unit_efficiency() {
        for v in Variant::ALL {
            assert!((eff_ns(&always_true(), 0.0, v).unwrap().eff - 1.0).abs() < 1e-9);
            assert!((eff_local(&always_true(), 0.0, v, DEFAULT_LOCAL_BUDGET).unwrap().eff - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn eps_one_is_vacuous() {
        for v in Variant::ALL {
            assert!((eff_ns(&chsh(), 1.0, v).unwrap().eff - 1.0).abs() < 1e-9);
            assert!((eff_local(&chsh(), 1.0, v, DEFAULT_LOCAL_BUDGET).unwrap().eff - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn chsh_no_signalling_value_is_one() {
        let r = ns_value(&chsh()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        assert!(r.certificate.no_signalling_defect() < 1e-9);
    }

    #[test]
    fn chsh_partition_bounds_sandwich_and_replay() {
        let g = chsh();
        for eps in [0.0, 0.1] {
            for v in Variant::ALL {
                let ns = eff_ns(&g, eps, v).unwrap();
                let loc = eff_local(&g, eps, v, DEFAULT_LOCAL_BUDGET).unwrap();
                assert!(ns.eff <= loc.eff + 1e-6, "{v} eps={eps}: {} > {}", ns.eff, loc.eff);
                for r in [&ns, &loc] {
                    let rep = replay_partition(&g, &r.certificate, eps, v).unwrap();
                    assert!((rep.eta - r.eta).abs() < 1e-8, "{v}: {} vs {}", rep.eta, r.eta);
                    assert!(rep.violation < 1e-8);
                }
                assert!(ns.certificate.no_signalling_defect() < 1e-8);
            }
        }
    }

    /// CHSH at ε = 0 locally: guessing both inputs with shared randomness and
    /// aborting on a wrong guess reaches η = 1/4; the LP must do at least as well.
    #[test]
    fn chsh_local_zero_error() {
        let r = eff_local(&chsh(), 0.0, Variant::WorstCase, DEFAULT_LOCAL_BUDGET).unwrap();
        assert!(r.eta >= 0.25 - 1e-9, "{}", r.eta);
    }

    #[test]
    fn single_player_relaxations_coincide() {
        let g = GamePredicate::from_fn(vec![labels(3)], vec![labels(2)], vec![0.2, 0.3, 0.5], |a, x| {
            a[0] == x[0] % 2
        })
        .unwrap();
        for eps in [0.0, 0.2] {
            for v in Variant::ALL {
                let ns = eff_ns(&g, eps, v).unwrap().eff;
                let loc = eff_local(&g, eps, v, DEFAULT_LOCAL_BUDGET).unwrap().eff;
                assert!((ns - loc).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn variants_are_ordered_on_random_predicates() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..15 {
            let table: Vec<bool> = (0..16).map(|_| rng.gen_bool(0.5)).collect();
            let w: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() + 0.05).collect();
            let s: f64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|v| v / s).collect();
            let g = GamePredicate::new(
                vec![labels(2), labels(2)],
                vec![labels(2), labels(2)],
                p,
                crate::games::WinRule::Table(std::sync::Arc::new(table)),
            )
            .unwrap();
            let eps = 0.1;
            for relax in [Relaxation::NoSignalling, Relaxation::Local] {
                let eff = |v| match relax {
                    Relaxation::NoSignalling => eff_ns(&g, eps, v).map(|r| r.eff),
                    Relaxation::Local => eff_local(&g, eps, v, DEFAULT_LOCAL_BUDGET).map(|r| r.eff),
                };
                let (Ok(w), Ok(t), Ok(a)) = (eff(Variant::WorstCase), eff(Variant::Tilde), eff(Variant::Average))
                else {
                    // A predicate with a never-winnable input makes the worst case infeasible.
                    continue;
                };
                assert!(w >= t - 1e-6 && t >= a - 1e-6, "{relax}: {w} {t} {a}");
                assert!(eff_ns(&g, eps, Variant::Average).unwrap().eff <= a + 1e-6);
            }
        }
    }

    #[test]
    fn unwinnable_input_is_infeasible_in_worst_case() {
        let g = GamePredicate::from_fn(vec![labels(2)], vec![labels(2)], vec![0.5, 0.5], |_, x| x[0] == 0).unwrap();
        assert_eq!(
            eff_ns(&g, 0.0, Variant::WorstCase).unwrap_err(),
            BoundsError::Infeasible
        );
        assert!(eff_ns(&g, 0.0, Variant::Average).is_ok());
    }

    #[test]
    fn split_matches_full_program() {
        // CHSH with a third player holding one input and two outputs that must
        // equal Alice's output on (0,0): the split and the full LP must agree.
        let base = chsh();
        let g = GamePredicate::from_fn(
            vec![labels(2), labels(2), labels(1)],
            vec![labels(2), labels(2), labels(2)],
            vec![0.25; 4],
            |a, x| base.wins(&a[..2], &x[..2]) && (x[0] + x[1] > 0 || a[2] == a[0]),
        )
        .unwrap();
        let split = ns_value(&g).unwrap();
        // Full program without the split.
        let nx = g.input_radix().len();
        let na = g.output_radix().len();
        let mut obj = vec![0.0; nx * na];
        for x in 0..nx {
            for a in 0..na {
                if g.wins_idx(a, x) {
                    obj[x * na + a] = g.p()[x];
                }
            }
        }
        let mut lp = LinearProgram::new(Direction::Maximize, obj);
        for x in 0..nx {
            lp.add((0..na).map(|a| (x * na + a, 1.0)).collect(), Sense::Eq, 1.0);
        }
        add_no_signalling_rows(&mut lp, g.input_radix(), g.output_radix(), 0);
        let full = solve_lp(&lp).unwrap().value;
        assert!((split.value - full).abs() < 1e-9, "{} vs {full}", split.value);
        assert!((split.certificate.winning_probability(&g).unwrap() - split.value).abs() < 1e-9);
        assert!(split.certificate.no_signalling_defect() < 1e-9);
    }

    #[test]
    fn magic_square_average_zero_error_is_one() {
        let r = eff_ns(&magic_square(), 0.0, Variant::Average).unwrap();
        assert!((r.eff - 1.0).abs() < 1e-6, "{}", r.eff);
    }
}
