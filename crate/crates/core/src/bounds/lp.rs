//! Dense two-phase simplex with Bland's anti-cycling rule.

// Tableau updates read most clearly with explicit row/column indices.
#![allow(clippy::needless_range_loop)]

use super::BoundsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

/// A constraint `Σ coeffs · x  (sense)  rhs` stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `optimize c·x` subject to linear constraints and per-variable bounds
/// `lower ≤ x ≤ upper` (lower may be `−∞`, upper may be `+∞`).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub direction: Direction,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    pub pivots: usize,
}

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-10;
const FEASIBILITY_TOL: f64 = 1e-8;
const MAX_PIVOTS: usize = 500_000;
/// Largest dense tableau (entries) the solver will allocate.
pub const TABLEAU_BUDGET: usize = 60_000_000;

impl LinearProgram {
    /// Variables default to `x ≥ 0`.
    pub fn new(direction: Direction, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            direction,
            objective,
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { coeffs, sense, rhs });
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    fn validate(&self) -> Result<(), BoundsError> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(BoundsError::InvalidLp("bound vectors have the wrong length".into()));
        }
        for (i, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if l == f64::INFINITY || u == f64::NEG_INFINITY || l > u || l.is_nan() || u.is_nan() {
                return Err(BoundsError::InvalidLp(format!("bad bounds on variable {i}")));
            }
        }
        for c in &self.constraints {
            if !c.rhs.is_finite() || c.coeffs.iter().any(|(j, v)| *j >= n || !v.is_finite()) {
                return Err(BoundsError::InvalidLp(
                    "constraint refers to unknown variable or is not finite".into(),
                ));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(BoundsError::InvalidLp("objective is not finite".into()));
        }
        Ok(())
    }

    /// Largest violation of the constraints and bounds at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for c in &self.constraints {
            let lhs: f64 = c.coeffs.iter().map(|&(j, v)| v * x[j]).sum();
            let d = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(d);
        }
        for (i, &xi) in x.iter().enumerate() {
            worst = worst.max(self.lower[i] - xi).max(xi - self.upper[i]);
        }
        worst
    }
}

/// How an original variable maps onto nonnegative standard-form columns.
enum VarMap {
    Shift { col: usize, lower: f64 },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    rows: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize, obj: &mut [f64]) {
        let w = self.width;
        let p = self.data[r * w + c];
        for v in &mut self.data[r * w..(r + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.data[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * w + c];
            if f != 0.0 {
                for (dst, src) in self.data[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *dst -= f * src;
                }
                self.data[i * w + c] = 0.0;
            }
        }
        let f = obj[c];
        if f != 0.0 {
            for (dst, src) in obj.iter_mut().zip(&pivot_row) {
                *dst -= f * src;
            }
            obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Minimizes the objective row `obj` (reduced costs, last entry `−value`)
    /// over columns `< allowed`, Bland's rule throughout.
    fn run(&mut self, obj: &mut [f64], allowed: usize, pivots: &mut usize) -> Result<(), BoundsError> {
        loop {
            let Some(c) = (0..allowed).find(|&j| obj[j] < -COST_TOL) else {
                return Ok(());
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                            if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = best else {
                return Err(BoundsError::Unbounded);
            };
            self.pivot(r, c, obj);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(BoundsError::IterationLimit(MAX_PIVOTS));
            }
        }
    }
}

/// Solves the program. Infeasible and unbounded programs are reported as
/// distinct errors.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, BoundsError> {
    lp.validate()?;
    let n = lp.num_vars();

    // Standard-form columns y ≥ 0.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    for i in 0..n {
        if lp.lower[i].is_finite() {
            maps.push(VarMap::Shift {
                col: ncols,
                lower: lp.lower[i],
            });
            ncols += 1;
        } else {
            maps.push(VarMap::Split {
                pos: ncols,
                neg: ncols + 1,
            });
            ncols += 2;
        }
    }

    // Rows over y: (sparse coeffs, sense, rhs).
    type Row = (Vec<(usize, f64)>, Sense, f64);
    let mut rows: Vec<Row> = Vec::new();
    let substitute = |coeffs: &[(usize, f64)], rhs: f64| -> (Vec<(usize, f64)>, f64) {
        let mut out = Vec::with_capacity(coeffs.len() + 1);
        let mut rhs = rhs;
        for &(j, v) in coeffs {
            match maps[j] {
                VarMap::Shift { col, lower } => {
                    out.push((col, v));
                    rhs -= v * lower;
                }
                VarMap::Split { pos, neg } => {
                    out.push((pos, v));
                    out.push((neg, -v));
                }
            }
        }
        (out, rhs)
    };
    for c in &lp.constraints {
        let (coeffs, rhs) = substitute(&c.coeffs, c.rhs);
        rows.push((coeffs, c.sense, rhs));
    }
    for i in 0..n {
        if lp.upper[i].is_finite() {
            let (coeffs, rhs) = substitute(&[(i, 1.0)], lp.upper[i]);
            rows.push((coeffs, Sense::Le, rhs));
        }
    }

    // Normalize to rhs ≥ 0.
    for row in rows.iter_mut() {
        if row.2 < 0.0 {
            for (_, v) in row.0.iter_mut() {
                *v = -*v;
            }
            row.2 = -row.2;
            row.1 = match row.1 {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            };
        }
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let n_art = rows.iter().filter(|r| r.1 != Sense::Le).count();
    let art_start = ncols + n_slack;
    let width = art_start + n_art + 1;
    if m.saturating_mul(width) > TABLEAU_BUDGET {
        return Err(BoundsError::BudgetExceeded {
            needed: (m * width) as f64,
            budget: TABLEAU_BUDGET as f64,
        });
    }

    let mut t = Tableau {
        width,
        data: vec![0.0; m * width],
        basis: vec![0; m],
        rows: m,
    };
    let mut slack = ncols;
    let mut art = art_start;
    for (i, (coeffs, sense, rhs)) in rows.iter().enumerate() {
        for &(j, v) in coeffs {
            t.data[i * width + j] += v;
        }
        t.data[i * width + width - 1] = *rhs;
        match sense {
            Sense::Le => {
                t.data[i * width + slack] = 1.0;
                t.basis[i] = slack;
                slack += 1;
            }
            Sense::Ge => {
                t.data[i * width + slack] = -1.0;
                slack += 1;
                t.data[i * width + art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
            Sense::Eq => {
                t.data[i * width + art] = 1.0;
                t.basis[i] = art;
                art += 1;
            }
        }
    }

    let mut pivots = 0;

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        let mut obj = vec![0.0; width];
        for i in 0..m {
            if t.basis[i] >= art_start {
                for j in 0..width {
                    if j < art_start || j == width - 1 {
                        obj[j] -= t.at(i, j);
                    }
                }
            }
        }
        t.run(&mut obj, art_start, &mut pivots)?;
        let infeasibility = -obj[width - 1];
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        if infeasibility > FEASIBILITY_TOL * scale {
            return Err(BoundsError::Infeasible);
        }
        // Drive remaining artificials out of the basis or drop redundant rows.
        let mut i = 0;
        while i < t.rows {
            if t.basis[i] >= art_start {
                if let Some(c) = (0..art_start).find(|&j| t.at(i, j).abs() > 1e-9) {
                    t.pivot(i, c, &mut obj);
                    pivots += 1;
                    i += 1;
                } else {
                    let w = t.width;
                    t.data.drain(i * w..(i + 1) * w);
                    t.basis.remove(i);
                    t.rows -= 1;
                }
            } else {
                i += 1;
            }
        }
    }

    // Phase 2: the real objective as a minimization over y.
    let sign = match lp.direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let mut cost = vec![0.0; width];
    for (i, map) in maps.iter().enumerate() {
        let c = sign * lp.objective[i];
        match *map {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }
    let mut obj = cost.clone();
    for i in 0..t.rows {
        let cb = cost[t.basis[i]];
        if cb != 0.0 {
            for j in 0..width {
                obj[j] -= cb * t.at(i, j);
            }
        }
    }
    for j in art_start..width - 1 {
        obj[j] = 0.0;
    }
    t.run(&mut obj, art_start, &mut pivots)?;

    let mut y = vec![0.0; art_start];
    for i in 0..t.rows {
        if t.basis[i] < art_start {
            y[t.basis[i]] = t.rhs(i).max(0.0);
        }
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|map| match *map {
            VarMap::Shift { col, lower } => lower + y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { value, x, pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_variable() {
        let mut lp = LinearProgram::new(Direction::Maximize, vec![1.0]);
        lp.add(vec![(0, 1.0)], Sense::Le, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded_are_distinct() {
        let mut lp = LinearProgram::new(Direction::Maximize, vec![1.0]);
        lp.add(vec![(0, 1.0)], Sense::Le, 1.0);
        lp.add(vec![(0, 1.0)], Sense::Ge, 2.0);
        assert_eq!(solve_lp(&lp).unwrap_err(), BoundsError::Infeasible);
        let lp = LinearProgram::new(Direction::Maximize, vec![1.0]);
        assert_eq!(solve_lp(&lp).unwrap_err(), BoundsError::Unbounded);
    }

    #[test]
    fn equalities_free_variables_and_bounds() {
        // min x + y, x - y = 1, y ∈ [-2, 5], x free → x = -1, y = -2.
        let mut lp = LinearProgram::new(Direction::Minimize, vec![1.0, 1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, -2.0, 5.0);
        lp.add(vec![(0, 1.0), (1, -1.0)], Sense::Eq, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value + 3.0).abs() < 1e-12, "{s:?}");
        assert!((s.x[0] + 1.0).abs() < 1e-12 && (s.x[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(Direction::Maximize, vec![1.0, 2.0]);
        lp.add(vec![(0, 1.0), (1, 1.0)], Sense::Eq, 1.0);
        lp.add(vec![(0, 2.0), (1, 2.0)], Sense::Eq, 2.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
    }

    /// Beale's classic cycling example; Bland's rule must terminate.
    #[test]
    fn degenerate_cycling_example_terminates() {
        let mut lp = LinearProgram::new(Direction::Maximize, vec![0.75, -150.0, 0.02, -6.0]);
        lp.add(vec![(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)], Sense::Le, 0.0);
        lp.add(vec![(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)], Sense::Le, 0.0);
        lp.add(vec![(2, 1.0)], Sense::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!((s.value - 0.05).abs() < 1e-9, "{}", s.value);
    }

    fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
            if a[piv][col].abs() < 1e-10 {
                return None;
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for i in 0..n {
                if i != col {
                    let f = a[i][col] / a[col][col];
                    for k in col..n {
                        a[i][k] -= f * a[col][k];
                    }
                    b[i] -= f * b[col];
                }
            }
        }
        Some((0..n).map(|i| b[i] / a[i][i]).collect())
    }

    /// Independent oracle: enumerate every vertex of {Ax ≤ b, x ≥ 0}.
    fn vertex_enumeration(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> f64 {
        let n = c.len();
        let mut rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = -1.0;
            rows.push((e, 0.0));
        }
        let m = rows.len();
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != n {
                continue;
            }
            let chosen: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            let mut aa: Vec<Vec<f64>> = chosen.iter().map(|&i| rows[i].0.clone()).collect();
            let mut bb: Vec<f64> = chosen.iter().map(|&i| rows[i].1).collect();
            if let Some(x) = solve_dense(&mut aa, &mut bb) {
                let feasible = rows
                    .iter()
                    .all(|(r, rhs)| r.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-9);
                if feasible {
                    best = best.max(c.iter().zip(&x).map(|(p, q)| p * q).sum());
                }
            }
        }
        best
    }

    #[test]
    fn random_programs_match_vertex_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(1..=6);
            let m = rng.gen_range(1..=6);
            let a: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect())
                .collect();
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..4.0)).collect();
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..2.0)).collect();
            let mut lp = LinearProgram::new(Direction::Maximize, c.clone());
            // Box the region so both methods see a bounded polytope.
            let mut a_all = a.clone();
            let mut b_all = b.clone();
            for j in 0..n {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                a_all.push(e);
                b_all.push(10.0);
            }
            for (row, &rhs) in a_all.iter().zip(&b_all) {
                lp.add(row.iter().copied().enumerate().collect(), Sense::Le, rhs);
            }
            let s = solve_lp(&lp).unwrap();
            let oracle = vertex_enumeration(&a_all, &b_all, &c);
            assert!(
                (s.value - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()),
                "simplex {} vs vertices {oracle}",
                s.value
            );
            assert!(lp.violation(&s.x) < 1e-9);
        }
    }
}
