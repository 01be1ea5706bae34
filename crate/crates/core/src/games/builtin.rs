//! Builtin games: Magic Square, its eavesdropper extension, CHSH and generic
//! XOR games, plus the Mermin–Peres strategy for Magic Square.

use num_complex::Complex64;

use super::{GameError, GamePredicate, QuantumStrategy};
use crate::qcore::{ComplexMatrix, PureState, SubsystemSpec};

pub const BUILTIN_NAMES: [&str; 3] = ["magic_square", "mse", "chsh"];

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn bit_strings(parity: usize) -> Vec<String> {
    (0..8usize)
        .filter(|v| v.count_ones() as usize % 2 == parity)
        .map(|v| format!("{:03b}", v))
        .collect()
}

/// Bit `k` of the `idx`-th string of the given parity class (`a[k]`, first character is `k = 0`).
fn string_bit(parity: usize, idx: usize, k: usize) -> u8 {
    let v = (0..8usize)
        .filter(|v| v.count_ones() as usize % 2 == parity)
        .nth(idx)
        .expect("index within parity class");
    ((v >> (2 - k)) & 1) as u8
}

/// Magic Square: Alice gets row `x`, Bob column `y`; Alice answers an
/// even-parity string, Bob an odd-parity one; they win iff `a[y] = b[x]`.
pub fn magic_square() -> GamePredicate {
    GamePredicate::from_fn(
        vec![labels(3), labels(3)],
        vec![bit_strings(0), bit_strings(1)],
        vec![1.0 / 9.0; 9],
        |a, x| string_bit(0, a[0], x[1]) == string_bit(1, a[1], x[0]),
    )
    .expect("valid builtin")
    .with_name("magic_square")
    .with_suggested_dims(vec![4, 4])
}

/// Magic Square with an eavesdropper. Alice's input is `(x, z)` labelled
/// `"xz"` (index `2x + z`), Bob's is `y`, Eve's input is a singleton and her
/// output `(x′, y′, z′, c)` is labelled `"x′y′z′c"` (index `((3x′+y′)·2+z′)·2+c`).
/// The players win iff `x = x′`, `y = y′`, `a[y] = c` and
/// (`a[y] = b[x]` or `z = z′`).
pub fn mse() -> GamePredicate {
    let alice_in = (0..3).flat_map(|x| (0..2).map(move |z| format!("{x}{z}"))).collect();
    let eve_out = (0..3)
        .flat_map(|x| (0..3).flat_map(move |y| (0..2).flat_map(move |z| (0..2).map(move |c| format!("{x}{y}{z}{c}")))))
        .collect();
    GamePredicate::from_fn(
        vec![alice_in, labels(3), vec!["-".to_string()]],
        vec![bit_strings(0), bit_strings(1), eve_out],
        vec![1.0 / 18.0; 18],
        |a, inp| {
            let (x, z, y) = (inp[0] / 2, inp[0] % 2, inp[1]);
            let e = a[2];
            let (c, z2, y2, x2) = (e % 2, (e / 2) % 2, (e / 4) % 3, e / 12);
            let ay = string_bit(0, a[0], y);
            let bx = string_bit(1, a[1], x);
            x == x2 && y == y2 && ay as usize == c && (ay == bx || z == z2)
        },
    )
    .expect("valid builtin")
    .with_name("mse")
    .with_suggested_dims(vec![4, 4, 2])
}

/// CHSH: binary inputs and outputs, win iff `a ⊕ b = x ∧ y`.
pub fn chsh() -> GamePredicate {
    GamePredicate::from_fn(
        vec![labels(2), labels(2)],
        vec![labels(2), labels(2)],
        vec![0.25; 4],
        |a, x| (a[0] ^ a[1]) == (x[0] & x[1]),
    )
    .expect("valid builtin")
    .with_name("chsh")
}

/// Two-player XOR game: inputs drawn from `p` (row-major over `nx × ny`),
/// binary outputs, win iff `a ⊕ b = f(x, y)`.
pub fn xor_game(nx: usize, ny: usize, p: Vec<f64>, f: &[bool]) -> Result<GamePredicate, GameError> {
    if f.len() != nx * ny {
        return Err(GameError::InvalidGame(format!(
            "XOR function has {} entries, expected {}",
            f.len(),
            nx * ny
        )));
    }
    GamePredicate::from_fn(vec![labels(nx), labels(ny)], vec![labels(2), labels(2)], p, |a, x| {
        ((a[0] ^ a[1]) == 1) == f[x[0] * ny + x[1]]
    })
}

pub fn builtin(name: &str) -> Result<GamePredicate, GameError> {
    match name {
        "magic_square" => Ok(magic_square()),
        "mse" => Ok(mse()),
        "chsh" => Ok(chsh()),
        other => Err(GameError::UnknownBuiltin(other.to_string())),
    }
}

fn pauli(c: char) -> ComplexMatrix {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let data = match c {
        'I' => vec![one, z, z, one],
        'X' => vec![z, one, one, z],
        'Y' => vec![z, -i, i, z],
        'Z' => vec![one, z, z, -one],
        _ => unreachable!("unknown Pauli {c}"),
    };
    ComplexMatrix::from_vec(2, 2, data).expect("finite")
}

/// The Mermin–Peres square of two-qubit observables. Each row multiplies
/// to `+I` and each column to `−I`.
pub fn mermin_peres_square() -> [[ComplexMatrix; 3]; 3] {
    let obs = |s: f64, p: &str| {
        let mut c = p.chars();
        pauli(c.next().unwrap()).kron(&pauli(c.next().unwrap())).scale(s)
    };
    [
        [obs(1.0, "XI"), obs(1.0, "IX"), obs(1.0, "XX")],
        [obs(1.0, "IZ"), obs(1.0, "ZI"), obs(1.0, "ZZ")],
        [obs(-1.0, "XZ"), obs(-1.0, "ZX"), obs(1.0, "YY")],
    ]
}

/// `Π_k (I + (−1)^{bit_k} O_k) / 2`.
fn joint_projector(observables: &[&ComplexMatrix], bits: &[u8]) -> ComplexMatrix {
    let id = ComplexMatrix::identity(4);
    let mut acc = id.clone();
    for (o, &b) in observables.iter().zip(bits) {
        let sign = if b == 0 { 1.0 } else { -1.0 };
        let factor = (&id + &o.scale(sign)).scale(0.5);
        acc = acc.matmul(&factor);
    }
    acc
}

/// Mermin–Peres strategy on `|Φ⁺⟩_{A₁B₁} ⊗ |Φ⁺⟩_{A₂B₂}`, ordered `A₁A₂B₁B₂`.
/// Alice on row `x` measures the three row observables; Bob on column `y`
/// measures the transposes of the column observables.
pub fn canonical_ms_strategy() -> QuantumStrategy {
    let square = mermin_peres_square();
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    for k in 0..4 {
        amps[k * 4 + k] = Complex64::new(0.5, 0.0);
    }
    let state = PureState::new(amps).expect("normalized");
    let alice = (0..3)
        .map(|x| {
            let row: Vec<&ComplexMatrix> = square[x].iter().collect();
            (0..4)
                .map(|a| {
                    let bits: Vec<u8> = (0..3).map(|k| string_bit(0, a, k)).collect();
                    joint_projector(&row, &bits)
                })
                .collect()
        })
        .collect();
    let bob = (0..3)
        .map(|y| {
            let col: Vec<ComplexMatrix> = (0..3).map(|r| square[r][y].transpose()).collect();
            let col_refs: Vec<&ComplexMatrix> = col.iter().collect();
            (0..4)
                .map(|b| {
                    let bits: Vec<u8> = (0..3).map(|k| string_bit(1, b, k)).collect();
                    joint_projector(&col_refs, &bits)
                })
                .collect()
        })
        .collect();
    QuantumStrategy::new(
        state,
        SubsystemSpec::new(vec![4, 4]).expect("valid dims"),
        vec![alice, bob],
    )
    .expect("Mermin–Peres measurements are projective")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{evaluate_quantum_strategy, quantum_correlation, ClassicalStrategy};

    #[test]
    fn magic_square_shape() {
        let g = magic_square();
        assert_eq!(g.output_sizes(), &[4, 4]);
        assert!((g.p()[g.input_radix().encode(&[1, 2])] - 1.0 / 9.0).abs() < 1e-15);
        let a = g.outputs()[0].iter().position(|s| s == "000").unwrap();
        let b = g.outputs()[1].iter().position(|s| s == "100").unwrap();
        assert!(!g.wins(&[a, b], &[0, 0]));
        for s in &g.outputs()[0] {
            assert_eq!(s.chars().filter(|&c| c == '1').count() % 2, 0);
        }
        for s in &g.outputs()[1] {
            assert_eq!(s.chars().filter(|&c| c == '1').count() % 2, 1);
        }
    }

    #[test]
    fn chsh_predicate() {
        let g = chsh();
        assert!(!g.wins(&[0, 0], &[1, 1]));
        assert!(g.wins(&[0, 1], &[1, 1]));
        assert!(g.wins(&[1, 1], &[0, 1]));
    }

    #[test]
    fn mse_shape_and_known_strategy() {
        let g = mse();
        assert_eq!(g.output_sizes()[2], 36);
        assert_eq!(g.input_sizes(), &[6, 3, 1]);
        // Alice and Bob play a deterministic pair winning MS at (0,0):
        // Alice "000", Bob "001". Eve always guesses x′=y′=z′=0 and c=a[0]=0.
        let s = ClassicalStrategy::new(vec![vec![0; 6], vec![0; 3], vec![0]]);
        let v = s.value(&g).unwrap();
        assert!((v - 1.0 / 9.0).abs() < 1e-12, "{v}");
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn mermin_peres_products() {
        let sq = mermin_peres_square();
        let id = ComplexMatrix::identity(4);
        for r in 0..3 {
            let p = sq[r][0].matmul(&sq[r][1]).matmul(&sq[r][2]);
            assert!(p.max_abs_diff(&id) < 1e-12);
            for a in 0..3 {
                for b in 0..3 {
                    assert!(sq[r][a].commutator_norm(&sq[r][b]) < 1e-12);
                }
            }
        }
        for c in 0..3 {
            let p = sq[0][c].matmul(&sq[1][c]).matmul(&sq[2][c]);
            assert!(p.max_abs_diff(&id.scale(-1.0)) < 1e-12);
        }
    }

    #[test]
    fn canonical_strategy_wins_with_certainty() {
        let g = magic_square();
        let s = canonical_ms_strategy();
        let v = evaluate_quantum_strategy(&g, &s).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
        // Every outcome with nonzero probability satisfies the parity constraints
        // by construction of the alphabets; also check total probability per input.
        let q = quantum_correlation(&g, &s).unwrap();
        assert!(q.normalization_defect(1.0) < 1e-9);
        assert!(q.no_signalling_defect() < 1e-9);
    }

    #[test]
    fn unknown_builtin_is_an_error() {
        assert!(matches!(builtin("nope"), Err(GameError::UnknownBuiltin(_))));
        for name in BUILTIN_NAMES {
            assert_eq!(builtin(name).unwrap().name(), Some(name));
        }
    }
}
