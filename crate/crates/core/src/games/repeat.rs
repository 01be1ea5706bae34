//! Parallel repetition and Monte Carlo estimates of randomized-subset predicates.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{ClassicalStrategy, Correlation, GameError, GamePredicate, Radix, WinRule};
use crate::rng;

/// Largest predicate table stored densely; larger games keep a callable predicate.
pub const DENSE_TABLE_LIMIT: usize = 1_000_000;
/// Largest input distribution `repeat` will materialize.
pub const DISTRIBUTION_LIMIT: usize = 10_000_000;

fn checked_pow(base: usize, n: usize, budget: usize) -> Result<usize, GameError> {
    let mut acc: usize = 1;
    for _ in 0..n {
        acc = acc
            .checked_mul(base)
            .filter(|&v| v <= budget)
            .ok_or(GameError::BudgetExceeded {
                needed: (base as f64).powi(n as i32),
                budget: budget as f64,
            })?;
    }
    Ok(acc)
}

/// `n` independent copies: product distribution `pⁿ`, outputs and inputs are
/// `n`-tuples (labels joined by `|`, copy 0 most significant) and the
/// predicate is the conjunction over copies.
pub fn repeat(g: &GamePredicate, n: usize) -> Result<GamePredicate, GameError> {
    if n == 0 {
        return Err(GameError::InvalidGame("repeat needs n ≥ 1".into()));
    }
    if n == 1 {
        return Ok(g.clone());
    }
    let l = g.players();
    let nx_rep = checked_pow(g.input_radix().len(), n, DISTRIBUTION_LIMIT)?;
    let na_rep = (g.output_radix().len() as f64).powi(n as i32);

    let tuples = |alphabet: &[String]| -> Vec<String> {
        let r = Radix::new(vec![alphabet.len(); n]);
        (0..r.len())
            .map(|i| {
                r.decode_vec(i)
                    .iter()
                    .map(|&d| alphabet[d].as_str())
                    .collect::<Vec<_>>()
                    .join("|")
            })
            .collect()
    };
    let inputs: Vec<Vec<String>> = g.inputs().iter().map(|a| tuples(a)).collect();
    let outputs: Vec<Vec<String>> = g.outputs().iter().map(|a| tuples(a)).collect();

    let in_copy: Vec<Radix> = g.input_sizes().iter().map(|&s| Radix::new(vec![s; n])).collect();
    let out_copy: Vec<Radix> = g.output_sizes().iter().map(|&s| Radix::new(vec![s; n])).collect();
    let rep_in = Radix::new(inputs.iter().map(Vec::len).collect());

    // Base input index of copy i for a repeated input tuple.
    let base_inputs = |x_rep: &[usize]| -> Vec<usize> {
        let digits: Vec<Vec<usize>> = (0..l).map(|j| in_copy[j].decode_vec(x_rep[j])).collect();
        (0..n)
            .map(|i| {
                let xi: Vec<usize> = (0..l).map(|j| digits[j][i]).collect();
                g.input_radix().encode(&xi)
            })
            .collect()
    };

    let mut p = Vec::with_capacity(nx_rep);
    let mut x_rep = vec![0; l];
    let mut copies_of_input = Vec::with_capacity(nx_rep);
    for xi in 0..nx_rep {
        rep_in.decode(xi, &mut x_rep);
        let base = base_inputs(&x_rep);
        p.push(base.iter().map(|&b| g.p()[b]).product::<f64>());
        copies_of_input.push(base);
    }
    // Renormalize away rounding in the product.
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);

    let base_outputs = move |a_rep: &[usize], g: &GamePredicate, out_copy: &[Radix]| -> Vec<usize> {
        let digits: Vec<Vec<usize>> = (0..a_rep.len()).map(|j| out_copy[j].decode_vec(a_rep[j])).collect();
        (0..n)
            .map(|i| {
                let ai: Vec<usize> = (0..a_rep.len()).map(|j| digits[j][i]).collect();
                g.output_radix().encode(&ai)
            })
            .collect()
    };

    let table_size = na_rep * nx_rep as f64;
    let rule = if table_size <= DENSE_TABLE_LIMIT as f64 {
        let na = na_rep as usize;
        let rep_out = Radix::new(outputs.iter().map(Vec::len).collect());
        let mut table = Vec::with_capacity(na * nx_rep);
        let mut a_rep = vec![0; l];
        for ai in 0..na {
            rep_out.decode(ai, &mut a_rep);
            let a_base = base_outputs(&a_rep, g, &out_copy);
            for x_base in &copies_of_input {
                table.push(a_base.iter().zip(x_base).all(|(&a, &x)| g.wins_idx(a, x)));
            }
        }
        WinRule::Table(Arc::new(table))
    } else {
        let base = g.clone();
        let out_copy = out_copy.clone();
        let in_copy = in_copy.clone();
        WinRule::Callable(Arc::new(move |a: &[usize], x: &[usize]| {
            let a_digits: Vec<Vec<usize>> = (0..a.len()).map(|j| out_copy[j].decode_vec(a[j])).collect();
            let x_digits: Vec<Vec<usize>> = (0..x.len()).map(|j| in_copy[j].decode_vec(x[j])).collect();
            (0..n).all(|i| {
                let ai: Vec<usize> = a_digits.iter().map(|d| d[i]).collect();
                let xi: Vec<usize> = x_digits.iter().map(|d| d[i]).collect();
                base.wins(&ai, &xi)
            })
        }))
    };

    let mut out = GamePredicate::new(inputs, outputs, p, rule)?;
    if let Some(name) = g.name() {
        out = out.with_name(&format!("{name}^{n}"));
    }
    Ok(out)
}

/// A strategy for `n` copies played jointly: given the per-copy input tuples
/// `inputs[i][j]`, return the per-copy output tuples.
pub trait RepeatedPlay {
    fn play(&self, g: &GamePredicate, inputs: &[Vec<usize>], rng: &mut ChaCha8Rng) -> Vec<Vec<usize>>;
}

/// A deterministic strategy applied independently to every copy.
impl RepeatedPlay for ClassicalStrategy {
    fn play(&self, _g: &GamePredicate, inputs: &[Vec<usize>], _rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
        inputs.iter().map(|x| self.outputs_for(x)).collect()
    }
}

/// Independent samples from the correlation in every copy.
impl RepeatedPlay for Correlation {
    fn play(&self, g: &GamePredicate, inputs: &[Vec<usize>], rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
        inputs
            .iter()
            .map(|x| {
                let row = self.row(g.input_radix().encode(x));
                let a = sample_index(row, rng);
                g.output_radix().decode_vec(a)
            })
            .collect()
    }
}

fn sample_index(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: usize,
}

/// Estimates the probability that `V` holds on a uniformly random size-`t`
/// subset of `n` copies, including the subset randomness. All randomness is
/// drawn from the stream `(seed, 0)`.
pub fn random_subset_value(
    g: &GamePredicate,
    n: usize,
    t: usize,
    strategy: &dyn RepeatedPlay,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloEstimate, GameError> {
    if t > n {
        return Err(GameError::InvalidGame(format!("subset size {t} exceeds {n} copies")));
    }
    if trials == 0 {
        return Err(GameError::InvalidGame("at least one trial required".into()));
    }
    let mut rng = rng::stream(seed, 0);
    let mut wins = 0usize;
    for _ in 0..trials {
        let inputs: Vec<Vec<usize>> = (0..n)
            .map(|_| g.input_radix().decode_vec(sample_index(g.p(), &mut rng)))
            .collect();
        let outputs = strategy.play(g, &inputs, &mut rng);
        let subset = sample(&mut rng, n, t);
        if subset.iter().all(|i| g.wins(&outputs[i], &inputs[i])) {
            wins += 1;
        }
    }
    let value = wins as f64 / trials as f64;
    Ok(MonteCarloEstimate {
        value,
        std_error: (value * (1.0 - value) / trials as f64).sqrt(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{chsh, classical_value, magic_square, Certificate, DEFAULT_STRATEGY_BUDGET};

    #[test]
    fn repeat_once_is_identity() {
        let g = chsh();
        let r = repeat(&g, 1).unwrap();
        assert_eq!(r.p(), g.p());
        for a in 0..4 {
            for x in 0..4 {
                assert_eq!(r.wins_idx(a, x), g.wins_idx(a, x));
            }
        }
    }

    #[test]
    fn magic_square_squared() {
        let g = magic_square();
        let r = repeat(&g, 2).unwrap();
        assert_eq!(r.output_sizes(), &[16, 16]);
        assert_eq!(r.input_sizes(), &[9, 9]);
        assert!((r.p().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let res = classical_value(&g, DEFAULT_STRATEGY_BUDGET).unwrap();
        let Certificate::Classical(s) = res.certificate else {
            unreachable!()
        };
        // Product certificate: play the optimal single-copy strategy in both coordinates.
        let product = ClassicalStrategy::new(
            (0..2)
                .map(|j| {
                    (0..9)
                        .map(|xr| {
                            let (x0, x1) = (xr / 3, xr % 3);
                            s.maps[j][x0] * 4 + s.maps[j][x1]
                        })
                        .collect()
                })
                .collect(),
        );
        let v = product.value(&r).unwrap();
        assert!((v - (8.0f64 / 9.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn large_repetition_keeps_callable_predicate() {
        let r = repeat(&magic_square(), 3).unwrap();
        assert!(matches!(r.rule(), WinRule::Callable(_)));
        let a = r.outputs()[0].iter().position(|s| s == "000|000|000").unwrap();
        let b = r.outputs()[1].iter().position(|s| s == "001|001|001").unwrap();
        let x = r.inputs()[0].iter().position(|s| s == "0|0|0").unwrap();
        assert!(r.wins(&[a, b], &[x, x]));
    }

    #[test]
    fn empty_subset_always_wins() {
        let g = chsh();
        let s = ClassicalStrategy::new(vec![vec![0, 0], vec![1, 1]]);
        let est = random_subset_value(&g, 4, 0, &s, 100, 1).unwrap();
        assert_eq!(est.value, 1.0);
    }

    #[test]
    fn perfect_product_strategy_always_wins() {
        let bits = vec!["0".to_string(), "1".to_string()];
        let g = GamePredicate::from_fn(vec![bits.clone()], vec![bits], vec![0.5, 0.5], |a, x| a[0] == x[0]).unwrap();
        let s = ClassicalStrategy::new(vec![vec![0, 1]]);
        assert_eq!(random_subset_value(&g, 6, 4, &s, 500, 2).unwrap().value, 1.0);
    }

    #[test]
    fn subset_value_matches_product_formula() {
        let g = magic_square();
        let Certificate::Classical(s) = classical_value(&g, DEFAULT_STRATEGY_BUDGET).unwrap().certificate else {
            unreachable!()
        };
        let est = random_subset_value(&g, 10, 5, &s, 100_000, 3).unwrap();
        let want = (8.0f64 / 9.0).powi(5);
        assert!(
            (est.value - want).abs() <= 3.0 * est.std_error,
            "{} vs {want}",
            est.value
        );
    }

    #[test]
    fn subset_larger_than_copies_is_rejected() {
        let s = ClassicalStrategy::new(vec![vec![0, 0], vec![0, 0]]);
        assert!(random_subset_value(&chsh(), 2, 3, &s, 10, 0).is_err());
    }
}
