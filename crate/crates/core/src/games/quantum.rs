//! Quantum strategies and see-saw lower bounds on the entangled value.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;

use super::{Certificate, Correlation, GameError, GamePredicate, GameValueResult, ValueKind};
use crate::qcore::random::{ginibre, random_pure};
use crate::qcore::{eigh, ComplexMatrix, PureState, SubsystemSpec, EIG_CUTOFF};
use crate::rng;

/// Completeness/positivity tolerance for POVMs.
pub const POVM_TOL: f64 = 1e-9;

/// A shared pure state with one subsystem per player and, for each player
/// and input, a POVM indexed by output.
#[derive(Debug, Clone)]
pub struct QuantumStrategy {
    state: PureState,
    spec: SubsystemSpec,
    /// `povms[j][x_j][a_j]`.
    povms: Vec<Vec<Vec<ComplexMatrix>>>,
}

impl QuantumStrategy {
    pub fn new(state: PureState, spec: SubsystemSpec, povms: Vec<Vec<Vec<ComplexMatrix>>>) -> Result<Self, GameError> {
        if state.dim() != spec.total_dim() {
            return Err(GameError::Mismatch(format!(
                "state dimension {} but subsystems multiply to {}",
                state.dim(),
                spec.total_dim()
            )));
        }
        if povms.len() != spec.dims().len() {
            return Err(GameError::Mismatch("one subsystem per player required".into()));
        }
        for (j, player) in povms.iter().enumerate() {
            let d = spec.dims()[j];
            for (x, povm) in player.iter().enumerate() {
                let mut sum = ComplexMatrix::zeros(d, d);
                for m in povm {
                    if m.rows() != d || m.cols() != d {
                        return Err(GameError::Povm(format!(
                            "player {j} input {x}: operator is not {d}×{d}"
                        )));
                    }
                    if m.hermiticity_defect() > POVM_TOL {
                        return Err(GameError::Povm(format!("player {j} input {x}: operator not Hermitian")));
                    }
                    let min = eigh(m).values.first().copied().unwrap_or(0.0);
                    if min < -POVM_TOL {
                        return Err(GameError::Povm(format!(
                            "player {j} input {x}: eigenvalue {min:e} is negative"
                        )));
                    }
                    sum = &sum + m;
                }
                let defect = sum.max_abs_diff(&ComplexMatrix::identity(d));
                if defect > POVM_TOL {
                    return Err(GameError::Povm(format!(
                        "player {j} input {x}: completeness defect {defect:e}"
                    )));
                }
            }
        }
        Ok(Self { state, spec, povms })
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn spec(&self) -> &SubsystemSpec {
        &self.spec
    }

    pub fn povms(&self) -> &[Vec<Vec<ComplexMatrix>>] {
        &self.povms
    }

    fn check_game(&self, g: &GamePredicate) -> Result<(), GameError> {
        if self.povms.len() != g.players() {
            return Err(GameError::Mismatch("player count".into()));
        }
        for j in 0..g.players() {
            if self.povms[j].len() != g.input_sizes()[j] || self.povms[j].iter().any(|p| p.len() != g.output_sizes()[j])
            {
                return Err(GameError::Mismatch(format!("alphabets of player {j}")));
            }
        }
        Ok(())
    }
}

/// Applies `op` to subsystem `j` of a state vector.
fn apply_local(v: &[Complex64], dims: &[usize], j: usize, op: &ComplexMatrix) -> Vec<Complex64> {
    let d = dims[j];
    let right: usize = dims[j + 1..].iter().product();
    let left = v.len() / (d * right);
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for l in 0..left {
        for i in 0..d {
            let dst = (l * d + i) * right;
            for k in 0..d {
                let o = op[(i, k)];
                if o == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = (l * d + k) * right;
                for r in 0..right {
                    out[dst + r] += o * v[src + r];
                }
            }
        }
    }
    out
}

fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `q(a|x) = ⟨ψ| ⊗ⱼ Mʲ_{aʲ|xʲ} |ψ⟩` for every input/output tuple.
pub fn quantum_correlation(g: &GamePredicate, s: &QuantumStrategy) -> Result<Correlation, GameError> {
    s.check_game(g)?;
    let l = g.players();
    let na = g.output_radix().len();
    let nx = g.input_radix().len();
    let mut q = vec![0.0; nx * na];
    let psi = s.state.amplitudes();
    let dims = s.spec.dims();

    struct Ctx<'a> {
        s: &'a QuantumStrategy,
        x: &'a [usize],
        psi: &'a [Complex64],
        dims: &'a [usize],
        out: &'a mut [f64],
    }
    fn rec(ctx: &mut Ctx<'_>, j: usize, v: &[Complex64], a_idx: usize) {
        if j == ctx.dims.len() {
            ctx.out[a_idx] = inner(ctx.psi, v).re.max(0.0);
            return;
        }
        let povm = &ctx.s.povms[j][ctx.x[j]];
        for (a, m) in povm.iter().enumerate() {
            let w = apply_local(v, ctx.dims, j, m);
            rec(ctx, j + 1, &w, a_idx * povm.len() + a);
        }
    }

    let mut x = vec![0; l];
    for xi in 0..nx {
        g.input_radix().decode(xi, &mut x);
        let mut ctx = Ctx {
            s,
            x: &x,
            psi,
            dims,
            out: &mut q[xi * na..(xi + 1) * na],
        };
        rec(&mut ctx, 0, psi, 0);
    }
    Correlation::new(g.input_sizes().to_vec(), g.output_sizes().to_vec(), q)
}

/// Winning probability `Σ_x p(x) Σ_{a : V(a,x)} ⟨ψ| ⊗ⱼ Mʲ_{aʲ|xʲ} |ψ⟩`.
pub fn evaluate_quantum_strategy(g: &GamePredicate, s: &QuantumStrategy) -> Result<f64, GameError> {
    quantum_correlation(g, s)?.winning_probability(g)
}

#[derive(Debug, Clone)]
pub struct SeesawConfig {
    /// Local dimension per player; `None` uses the game's suggestion.
    pub local_dims: Option<Vec<usize>>,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            local_dims: None,
            restarts: 20,
            max_iters: 500,
            tol: 1e-9,
            seed: 0,
        }
    }
}

/// Values after every see-saw iteration of one restart.
#[derive(Debug, Clone)]
pub struct SeesawTrace {
    pub restart: usize,
    pub values: Vec<f64>,
}

/// Effective winning operator `W = Σ_x p(x) Σ_{a : V} ⊗ⱼ Mʲ_{aʲ|xʲ}`.
fn winning_operator(g: &GamePredicate, povms: &[Vec<Vec<ComplexMatrix>>], dim: usize) -> ComplexMatrix {
    let l = g.players();
    let mut w = ComplexMatrix::zeros(dim, dim);
    let mut x = vec![0; l];
    let mut a = vec![0; l];
    for (xi, &px) in g.p().iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        g.input_radix().decode(xi, &mut x);
        for ai in 0..g.output_radix().len() {
            g.output_radix().decode(ai, &mut a);
            if !g.wins(&a, &x) {
                continue;
            }
            let mut term = povms[0][x[0]][a[0]].clone();
            for j in 1..l {
                term = term.kron(&povms[j][x[j]][a[j]]);
            }
            w = &w + &term.scale(px);
        }
    }
    w
}

/// `Bʲ_{aʲ|xʲ} = Σ p(x) Σ_{a : V} Tr_{−j}[(⊗_{k≠j} Mᵏ ⊗ I) |ψ⟩⟨ψ|]`, so that the
/// value equals `Σ Tr(Mʲ Bʲ)` for fixed other players.
fn player_operators(
    g: &GamePredicate,
    povms: &[Vec<Vec<ComplexMatrix>>],
    psi: &[Complex64],
    dims: &[usize],
    j: usize,
) -> Vec<Vec<ComplexMatrix>> {
    let l = g.players();
    let d = dims[j];
    let right: usize = dims[j + 1..].iter().product();
    let left = psi.len() / (d * right);
    let mut b: Vec<Vec<ComplexMatrix>> = (0..g.input_sizes()[j])
        .map(|_| (0..g.output_sizes()[j]).map(|_| ComplexMatrix::zeros(d, d)).collect())
        .collect();

    let others_out: Vec<usize> = (0..l).map(|k| if k == j { 1 } else { g.output_sizes()[k] }).collect();
    let others = super::Radix::new(others_out);
    let mut x = vec![0; l];
    let mut a = vec![0; l];
    for (xi, &px) in g.p().iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        g.input_radix().decode(xi, &mut x);
        for oi in 0..others.len() {
            others.decode(oi, &mut a);
            let winners: Vec<usize> = (0..g.output_sizes()[j])
                .filter(|&aj| {
                    a[j] = aj;
                    g.wins(&a, &x)
                })
                .collect();
            if winners.is_empty() {
                continue;
            }
            let mut v = psi.to_vec();
            for k in (0..l).filter(|&k| k != j) {
                v = apply_local(&v, dims, k, &povms[k][x[k]][a[k]]);
            }
            let mut c = ComplexMatrix::zeros(d, d);
            for lft in 0..left {
                for i in 0..d {
                    for i2 in 0..d {
                        let mut acc = Complex64::new(0.0, 0.0);
                        let base_i = (lft * d + i) * right;
                        let base_i2 = (lft * d + i2) * right;
                        for r in 0..right {
                            acc += v[base_i + r] * psi[base_i2 + r].conj();
                        }
                        c[(i, i2)] += acc;
                    }
                }
            }
            let c = c.scale(px);
            for aj in winners {
                b[x[j]][aj] = &b[x[j]][aj] + &c;
            }
        }
    }
    b.into_iter()
        .map(|row| row.into_iter().map(|m| m.hermitian_part()).collect())
        .collect()
}

fn positive_projector(m: &ComplexMatrix) -> ComplexMatrix {
    eigh(m).apply(|v| if v > EIG_CUTOFF { 1.0 } else { 0.0 })
}

fn overlap(m: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    m.matmul(b).trace().re
}

/// Improves one POVM against fixed operators `b[a]`, never decreasing `Σ Tr(M_a B_a)`.
fn improve_povm(povm: &mut [ComplexMatrix], b: &[ComplexMatrix], tol: f64) {
    let d = povm[0].rows();
    match povm.len() {
        1 => povm[0] = ComplexMatrix::identity(d),
        2 => {
            let p = positive_projector(&(&b[0] - &b[1]));
            let old = overlap(&povm[0], &b[0]) + overlap(&povm[1], &b[1]);
            let q = &ComplexMatrix::identity(d) - &p;
            let new = overlap(&p, &b[0]) + overlap(&q, &b[1]);
            if new >= old {
                povm[0] = p;
                povm[1] = q;
            }
        }
        m => {
            for _ in 0..200 {
                let mut improved = false;
                for u in 0..m {
                    for w in (u + 1)..m {
                        let s = &povm[u] + &povm[w];
                        let root = eigh(&s).apply(|v| if v > EIG_CUTOFF { v.sqrt() } else { 0.0 });
                        let delta = root.matmul(&(&b[u] - &b[w])).matmul(&root);
                        let mu = root.matmul(&positive_projector(&delta)).matmul(&root);
                        let mw = &s - &mu;
                        let old = overlap(&povm[u], &b[u]) + overlap(&povm[w], &b[w]);
                        let new = overlap(&mu, &b[u]) + overlap(&mw, &b[w]);
                        if new > old + tol {
                            povm[u] = mu.hermitian_part();
                            povm[w] = mw.hermitian_part();
                            improved = true;
                        }
                    }
                }
                if !improved {
                    break;
                }
            }
        }
    }
}

/// Random POVM `M_a = S^{-1/2} G_a S^{-1/2}` with `G_a` Wishart and `S = Σ G_a`.
fn random_povm(d: usize, outcomes: usize, rng: &mut ChaCha8Rng) -> Vec<ComplexMatrix> {
    let gs: Vec<ComplexMatrix> = (0..outcomes)
        .map(|_| {
            let g = ginibre(d, d, rng);
            g.matmul(&g.adjoint())
        })
        .collect();
    let mut s = ComplexMatrix::zeros(d, d);
    for g in &gs {
        s = &s + g;
    }
    let inv_root = eigh(&s).apply(|v| if v > EIG_CUTOFF { 1.0 / v.sqrt() } else { 0.0 });
    gs.iter()
        .map(|g| inv_root.matmul(g).matmul(&inv_root).hermitian_part())
        .collect()
}

fn run_restart(
    g: &GamePredicate,
    dims: &[usize],
    cfg: &SeesawConfig,
    restart: usize,
) -> Result<(QuantumStrategy, Vec<f64>), GameError> {
    let mut rng = rng::stream(cfg.seed, restart as u64);
    let spec = SubsystemSpec::new(dims.to_vec())?;
    let total = spec.total_dim();
    let mut psi = random_pure(total, &mut rng).amplitudes().to_vec();
    let mut povms: Vec<Vec<Vec<ComplexMatrix>>> = (0..g.players())
        .map(|j| {
            (0..g.input_sizes()[j])
                .map(|_| random_povm(dims[j], g.output_sizes()[j], &mut rng))
                .collect()
        })
        .collect();

    let mut values = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..cfg.max_iters {
        let w = winning_operator(g, &povms, total);
        let e = eigh(&w);
        psi = e.vectors.last().expect("nonempty").clone();
        for j in 0..g.players() {
            let b = player_operators(g, &povms, &psi, dims, j);
            for (xj, povm) in povms[j].iter_mut().enumerate() {
                improve_povm(povm, &b[xj], cfg.tol);
            }
        }
        let strategy = QuantumStrategy {
            state: PureState::normalized(psi.clone())?,
            spec: spec.clone(),
            povms: povms.clone(),
        };
        let v = evaluate_quantum_strategy(g, &strategy)?;
        values.push(v);
        if v - prev < cfg.tol {
            return Ok((strategy, values));
        }
        prev = v;
    }
    let strategy = QuantumStrategy {
        state: PureState::normalized(psi)?,
        spec,
        povms,
    };
    Ok((strategy, values))
}

/// See-saw lower bound on the entangled value, also returning per-restart
/// value trajectories. Restart `r` draws from the stream `(seed, r)`.
pub fn seesaw_with_trace(
    g: &GamePredicate,
    cfg: &SeesawConfig,
) -> Result<(GameValueResult, Vec<SeesawTrace>), GameError> {
    let dims = cfg.local_dims.clone().unwrap_or_else(|| g.suggested_dims());
    if dims.len() != g.players() || dims.contains(&0) {
        return Err(GameError::Mismatch(
            "one positive local dimension per player required".into(),
        ));
    }
    let mut best: Option<(f64, QuantumStrategy)> = None;
    let mut traces = Vec::with_capacity(cfg.restarts);
    for r in 0..cfg.restarts.max(1) {
        let (strategy, values) = run_restart(g, &dims, cfg, r)?;
        let v = values.last().copied().unwrap_or(0.0);
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, strategy));
        }
        traces.push(SeesawTrace { restart: r, values });
    }
    let (value, strategy) = best.expect("at least one restart");
    Ok((
        GameValueResult {
            value,
            kind: ValueKind::LowerBound,
            certificate: Certificate::Quantum(Box::new(strategy)),
        },
        traces,
    ))
}

/// See-saw lower bound on the entangled value.
pub fn seesaw(g: &GamePredicate, cfg: &SeesawConfig) -> Result<GameValueResult, GameError> {
    seesaw_with_trace(g, cfg).map(|(r, _)| r)
}
