//! Exact classical values by enumerating deterministic strategies.

use super::{Certificate, ClassicalStrategy, GameError, GamePredicate, GameValueResult, ValueKind};

pub const DEFAULT_STRATEGY_BUDGET: f64 = 1e8;

/// Number of deterministic strategies of players `0..l-1` (the last player best-responds).
fn prefix_strategy_count(g: &GamePredicate) -> f64 {
    let l = g.players();
    (0..l - 1)
        .map(|j| (g.output_sizes()[j] as f64).powi(g.input_sizes()[j] as i32))
        .product()
}

/// Exact classical value `ω(g)`.
///
/// Enumerates deterministic strategies for all players but the last in
/// lexicographic order and lets the last player best-respond. `budget`
/// bounds the total deterministic strategy count; the first argmax wins ties.
pub fn classical_value(g: &GamePredicate, budget: f64) -> Result<GameValueResult, GameError> {
    let l = g.players();
    let last = l - 1;
    let total = prefix_strategy_count(g) * (g.output_sizes()[last] as f64).powi(g.input_sizes()[last] as i32);
    if total > budget {
        return Err(GameError::BudgetExceeded { needed: total, budget });
    }

    let ir = g.input_radix();
    let nx = ir.len();
    let n_last_in = g.input_sizes()[last];
    let n_last_out = g.output_sizes()[last];
    let inputs: Vec<Vec<usize>> = (0..nx).map(|x| ir.decode_vec(x)).collect();
    let support: Vec<usize> = (0..nx).filter(|&x| g.p()[x] > 0.0).collect();

    // Odometer over the digits (player j, input x_j) for j < last.
    let digits: Vec<(usize, usize)> = (0..last)
        .flat_map(|j| (0..g.input_sizes()[j]).map(move |xj| (j, xj)))
        .collect();
    let mut maps: Vec<Vec<usize>> = (0..l).map(|j| vec![0; g.input_sizes()[j]]).collect();

    let mut best_value = f64::NEG_INFINITY;
    let mut best_maps = maps.clone();
    let mut score = vec![0.0; n_last_in * n_last_out];
    let mut a = vec![0; l];

    loop {
        score.iter_mut().for_each(|s| *s = 0.0);
        for &x in &support {
            let xs = &inputs[x];
            for j in 0..last {
                a[j] = maps[j][xs[j]];
            }
            let y = xs[last];
            for b in 0..n_last_out {
                a[last] = b;
                if g.wins(&a, xs) {
                    score[y * n_last_out + b] += g.p()[x];
                }
            }
        }
        let mut value = 0.0;
        for y in 0..n_last_in {
            let row = &score[y * n_last_out..(y + 1) * n_last_out];
            let (b, v) = row.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (b, &v)| if v > acc.1 { (b, v) } else { acc },
            );
            maps[last][y] = b;
            value += v;
        }
        if value > best_value + 1e-15 {
            best_value = value;
            best_maps = maps.clone();
        }

        // Advance the odometer; the last digit varies fastest.
        let mut k = digits.len();
        loop {
            if k == 0 {
                let strategy = ClassicalStrategy::new(best_maps);
                return Ok(GameValueResult {
                    value: best_value,
                    kind: ValueKind::Exact,
                    certificate: Certificate::Classical(strategy),
                });
            }
            k -= 1;
            let (j, xj) = digits[k];
            maps[j][xj] += 1;
            if maps[j][xj] < g.output_sizes()[j] {
                break;
            }
            maps[j][xj] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{chsh, magic_square, repeat};

    fn value(g: &GamePredicate) -> f64 {
        classical_value(g, DEFAULT_STRATEGY_BUDGET).unwrap().value
    }

    #[test]
    fn magic_square_is_eight_ninths() {
        let r = classical_value(&magic_square(), DEFAULT_STRATEGY_BUDGET).unwrap();
        assert!((r.value - 8.0 / 9.0).abs() < 1e-12);
        assert_eq!(r.kind, ValueKind::Exact);
        let Certificate::Classical(s) = r.certificate else {
            panic!("classical certificate expected")
        };
        assert!((s.value(&magic_square()).unwrap() - r.value).abs() < 1e-12);
    }

    #[test]
    fn chsh_is_three_quarters() {
        assert!((value(&chsh()) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn always_true_predicate() {
        let bits = vec!["0".to_string(), "1".to_string()];
        let g = GamePredicate::from_fn(
            vec![bits.clone(), bits.clone()],
            vec![bits.clone(), bits],
            vec![0.25; 4],
            |_, _| true,
        )
        .unwrap();
        assert_eq!(value(&g), 1.0);
    }

    #[test]
    fn single_player_best_responds() {
        let bits = vec!["0".to_string(), "1".to_string()];
        let g = GamePredicate::from_fn(vec![bits.clone()], vec![bits], vec![0.3, 0.7], |a, x| a[0] == x[0]).unwrap();
        assert!((value(&g) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn budget_is_enforced() {
        let err = classical_value(&magic_square(), 100.0).unwrap_err();
        assert!(matches!(err, GameError::BudgetExceeded { .. }));
    }

    #[test]
    fn repetition_does_not_increase_chsh_value() {
        let g = chsh();
        let v1 = value(&g);
        let v2 = value(&repeat(&g, 2).unwrap());
        assert!(v2 <= v1 + 1e-12);
        assert!(v2 >= v1 * v1 - 1e-12);
    }

    /// Independent oracle: brute force over every strategy tuple.
    #[test]
    fn matches_full_brute_force_on_random_games() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let labels = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
            let table: Vec<bool> = (0..4 * 6).map(|_| rng.gen_bool(0.4)).collect();
            let w: Vec<f64> = (0..6).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|v| v / s).collect();
            let g = GamePredicate::new(
                vec![labels(2), labels(3)],
                vec![labels(2), labels(2)],
                p.clone(),
                crate::games::WinRule::Table(std::sync::Arc::new(table)),
            )
            .unwrap();
            let mut best = 0.0f64;
            for fa in 0..4usize {
                for fb in 0..8usize {
                    let s = ClassicalStrategy::new(vec![
                        (0..2).map(|i| (fa >> i) & 1).collect(),
                        (0..3).map(|i| (fb >> i) & 1).collect(),
                    ]);
                    best = best.max(s.value(&g).unwrap());
                }
            }
            assert!((value(&g) - best).abs() < 1e-12);
        }
    }
}
