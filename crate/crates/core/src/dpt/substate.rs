//! Classical (diagonal) check of substate perturbation: a substate bound
//! against `ψ_X ⊗ σ_B` survives replacing `σ_B` by a nearby `ρ_B` at the cost
//! of a factor `2(1 + 4/δ₀²)` and extra distance `δ₀ + δ₁`.
//!
//! For diagonal states every question reduces to: what is the largest
//! Bhattacharyya fidelity `Σ √(pᵢ rᵢ)` between a fixed distribution `p` and a
//! distribution `r` with `0 ≤ r ≤ cap`? The answer is attained at
//! `rᵢ = min(capᵢ, k·pᵢ)` (KKT water-filling), so feasibility of
//! "purified distance ≤ t under the cap" is decided exactly.

use rand::Rng;

use super::DptError;
use crate::entropy::JointTable;

const PROB_TOL: f64 = 1e-9;
const DIST_TOL: f64 = 1e-12;

/// Largest Bhattacharyya fidelity between `p` and a probability vector `r`
/// with `0 ≤ r ≤ cap`, together with the maximizer; `None` if no such `r`
/// exists (`Σ cap < 1`).
pub fn max_fidelity_under_cap(p: &[f64], cap: &[f64]) -> Option<(f64, Vec<f64>)> {
    assert_eq!(p.len(), cap.len());
    let cap_total: f64 = cap.iter().sum();
    if cap_total < 1.0 - PROB_TOL {
        return None;
    }
    let support: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    let support_cap: f64 = support.iter().map(|&i| cap[i]).sum();
    let mut r = vec![0.0; p.len()];
    if support_cap <= 1.0 {
        // Every supported cell saturates; the remainder goes to cells outside
        // the support of p, where it does not affect the fidelity.
        for &i in &support {
            r[i] = cap[i];
        }
        let mut rest = 1.0 - support_cap;
        for i in (0..p.len()).filter(|&i| p[i] <= 0.0) {
            let take = rest.min(cap[i]);
            r[i] = take;
            rest -= take;
        }
    } else {
        // Σ min(capᵢ, k pᵢ) is piecewise linear in k; the breakpoints are capᵢ/pᵢ.
        let mut order = support.clone();
        order.sort_by(|&a, &b| (cap[a] / p[a]).partial_cmp(&(cap[b] / p[b])).unwrap());
        let mut saturated = 0.0;
        let mut free_mass: f64 = support.iter().map(|&i| p[i]).sum();
        for &i in &order {
            let t = cap[i] / p[i];
            if saturated + t * free_mass >= 1.0 {
                break;
            }
            saturated += cap[i];
            free_mass -= p[i];
        }
        let k = if free_mass > 0.0 {
            (1.0 - saturated) / free_mass
        } else {
            0.0
        };
        for &i in &support {
            r[i] = cap[i].min(k * p[i]);
        }
    }
    let f: f64 = p.iter().zip(&r).map(|(a, b)| (a * b).sqrt()).sum();
    Some((f.clamp(0.0, 1.0), r))
}

fn purified(f: f64) -> f64 {
    (1.0 - f * f).max(0.0).sqrt()
}

fn check_prob(name: &str, v: &[f64]) -> Result<(), DptError> {
    let s: f64 = v.iter().sum();
    if v.iter().any(|x| !(x.is_finite() && *x >= -PROB_TOL)) || (s - 1.0).abs() > 1e-6 {
        return Err(DptError::InvalidParams(format!("{name} is not a probability vector")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubstateStatus {
    /// A witness `ρ′` satisfying the conclusion exists.
    Feasible,
    /// No witness exists although the hypotheses hold.
    Infeasible,
    /// The inputs violate a hypothesis; the conclusion was not tested.
    HypothesisFailed(String),
}

impl SubstateStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SubstateStatus::Feasible => "feasible",
            SubstateStatus::Infeasible => "infeasible",
            SubstateStatus::HypothesisFailed(_) => "hypothesis_failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubstateReport {
    pub status: SubstateStatus,
    /// Smallest purified distance from `σ_XB` to a state below `2^c ψ_X⊗σ_B`.
    pub hypothesis_distance: Option<f64>,
    /// Purified distance between `σ_B` and `ρ_B`.
    pub marginal_distance: f64,
    /// Cap factor `2^{c+1}(1 + 4/δ₀²)` of the conclusion.
    pub conclusion_factor: f64,
    /// Target distance `2ε + δ₀ + δ₁`.
    pub conclusion_target: f64,
    /// Smallest achievable purified distance under the conclusion cap.
    pub conclusion_distance: Option<f64>,
    /// Witness `ρ′_XB`, row-major over `(x, b)`.
    pub witness: Option<Vec<f64>>,
}

/// Checks the substate perturbation conclusion on a classical instance.
///
/// `sigma_xb` has rows indexed by `x` and columns by `b`. The hypotheses
/// (a `σ′` within purified distance `eps` of `σ_XB` below `2^c ψ_X⊗σ_B`;
/// `Δ(σ_B, ρ_B) ≤ δ₁`; `δ₀ > 0`) are verified first.
pub fn substate_perturbation_check_classical(
    sigma_xb: &JointTable,
    psi_x: &[f64],
    rho_b: &[f64],
    c: f64,
    eps: f64,
    delta0: f64,
    delta1: f64,
) -> Result<SubstateReport, DptError> {
    let (nx, nb) = (sigma_xb.ys(), sigma_xb.zs());
    if psi_x.len() != nx || rho_b.len() != nb {
        return Err(DptError::InvalidParams(format!(
            "ψ_X needs {nx} entries and ρ_B needs {nb} entries"
        )));
    }
    let sigma: Vec<f64> = sigma_xb.rows().iter().flatten().copied().collect();
    check_prob("σ_XB", &sigma)?;
    check_prob("ψ_X", psi_x)?;
    check_prob("ρ_B", rho_b)?;
    if !c.is_finite() || [eps, delta1].iter().any(|v| !(0.0..=1.0).contains(v)) || !delta0.is_finite() {
        return Err(DptError::InvalidParams("need finite c and ε, δ₁ ∈ [0, 1]".into()));
    }
    let sigma_b = sigma_xb.marginal_z();
    let product = |scale: f64, b: &[f64]| -> Vec<f64> {
        (0..nx)
            .flat_map(|x| (0..nb).map(move |y| (x, y)))
            .map(|(x, y)| scale * psi_x[x] * b[y])
            .collect()
    };

    let marginal_distance = purified(sigma_b.iter().zip(rho_b).map(|(a, b)| (a * b).sqrt()).sum::<f64>());
    let hyp = max_fidelity_under_cap(&sigma, &product(c.exp2(), &sigma_b)).map(|(f, _)| purified(f));
    let target = 2.0 * eps + delta0 + delta1;
    let factor = if delta0 > 0.0 {
        (c + 1.0).exp2() * (1.0 + 4.0 / (delta0 * delta0))
    } else {
        f64::NAN
    };
    let mut report = SubstateReport {
        status: SubstateStatus::Feasible,
        hypothesis_distance: hyp,
        marginal_distance,
        conclusion_factor: factor,
        conclusion_target: target,
        conclusion_distance: None,
        witness: None,
    };
    let failure = if delta0 <= 0.0 {
        Some(format!("δ₀ = {delta0} must be positive"))
    } else if hyp.is_none_or(|d| d > eps + DIST_TOL) {
        Some(match hyp {
            Some(d) => format!("no σ′ within ε = {eps} below 2^c ψ⊗σ_B (closest is {d})"),
            None => "2^c ψ⊗σ_B has total mass below 1".to_string(),
        })
    } else if marginal_distance > delta1 + DIST_TOL {
        Some(format!("Δ(σ_B, ρ_B) = {marginal_distance} exceeds δ₁ = {delta1}"))
    } else {
        None
    };
    if let Some(msg) = failure {
        report.status = SubstateStatus::HypothesisFailed(msg);
        return Ok(report);
    }

    match max_fidelity_under_cap(&sigma, &product(factor, rho_b)) {
        Some((f, r)) => {
            let d = purified(f);
            report.conclusion_distance = Some(d);
            if d <= target + DIST_TOL {
                report.witness = Some(r);
            } else {
                report.status = SubstateStatus::Infeasible;
            }
        }
        None => report.status = SubstateStatus::Infeasible,
    }
    Ok(report)
}

/// A classical instance of the substate perturbation check.
#[derive(Debug, Clone)]
pub struct SubstateInstance {
    pub sigma_xb: JointTable,
    pub psi_x: Vec<f64>,
    pub rho_b: Vec<f64>,
    pub c: f64,
    pub eps: f64,
    pub delta0: f64,
    pub delta1: f64,
}

impl SubstateInstance {
    /// Random `nx × nb` instance whose hypotheses hold by construction: `ε`
    /// and `δ₁` are the achieved distances plus a small random slack.
    pub fn random_valid<R: Rng + ?Sized>(rng: &mut R, nx: usize, nb: usize) -> Self {
        let draw = |rng: &mut R, n: usize| -> Vec<f64> {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.02..1.0)).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect()
        };
        let flat = draw(rng, nx * nb);
        let rows: Vec<Vec<f64>> = flat.chunks(nb).map(|r| r.to_vec()).collect();
        let sigma_xb = JointTable::new(rows).expect("a normalized table");
        let psi_x = draw(rng, nx);
        let sigma_b = sigma_xb.marginal_z();
        // ρ_B: a random mixture of σ_B with fresh noise.
        let noise = draw(rng, nb);
        let w = rng.gen_range(0.0..0.5);
        let rho_b: Vec<f64> = sigma_b.iter().zip(&noise).map(|(s, n)| (1.0 - w) * s + w * n).collect();
        let c: f64 = rng.gen_range(0.0..3.0);
        let cap: Vec<f64> = (0..nx * nb)
            .map(|i| c.exp2() * psi_x[i / nb] * sigma_b[i % nb])
            .collect();
        let eps_min = max_fidelity_under_cap(&flat, &cap).map_or(1.0, |(f, _)| purified(f));
        let eps = (eps_min + rng.gen_range(0.0..0.05)).min(1.0);
        let d1 = purified(sigma_b.iter().zip(&rho_b).map(|(a, b)| (a * b).sqrt()).sum::<f64>());
        let delta1 = (d1 + rng.gen_range(0.0..0.05)).min(1.0);
        let delta0 = rng.gen_range(0.05..0.5);
        Self {
            sigma_xb,
            psi_x,
            rho_b,
            c,
            eps,
            delta0,
            delta1,
        }
    }

    pub fn check(&self) -> Result<SubstateReport, DptError> {
        substate_perturbation_check_classical(
            &self.sigma_xb,
            &self.psi_x,
            &self.rho_b,
            self.c,
            self.eps,
            self.delta0,
            self.delta1,
        )
    }
}
