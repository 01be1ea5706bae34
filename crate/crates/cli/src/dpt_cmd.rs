use clap::{Args, Subcommand, ValueEnum};
use leakdpt::dpt::{
    delta_of, dpt_case_i_bound, dpt_case_ii_bound, empirical_repeated_value, randv_bound,
    substate_perturbation_check_classical, DPTParams, RandvMode, RandvParams, RepetitionProbe, SearchMode,
    SubstateInstance, SubstateReport, SubstateStatus, DEFAULT_SEARCH_BUDGET,
};
use leakdpt::entropy::JointTable;
use leakdpt::rng;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::game_cmd::GameSource;
use crate::{parse_matrix, GlobalArgs, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKind {
    /// Less than one bit of communication per copy.
    CaseI,
    /// At least one bit per copy, gated by a partition bound.
    CaseII,
    /// Winning a random subset of the copies.
    Randv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RandvModeArg {
    Generic,
    Mse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProbeMode {
    Auto,
    Exhaustive,
    HillClimb,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(value_enum)]
    which: BoundKind,
    /// Number of players.
    #[arg(long, default_value_t = 2)]
    l: usize,
    /// Number of copies.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Communication per copy in bits.
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    /// ν = 1 − ω* of the single-copy game.
    #[arg(long, default_value_t = 0.1)]
    nu: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    zeta: f64,
    /// Output alphabet sizes, comma separated (default 2 per player).
    #[arg(long, value_delimiter = ',')]
    alphabets: Option<Vec<usize>>,
    /// Size of the conditioning set.
    #[arg(long, default_value_t = 0)]
    c_size: usize,
    /// Probability of the conditioning event.
    #[arg(long, default_value_t = 1.0)]
    pr_e: f64,
    /// Stand-in for the unspecified constant in the exponent.
    #[arg(long, default_value_t = 1.0)]
    exponent_const: f64,
    /// Partition bound eff at error ε+ζ (case-ii).
    #[arg(long)]
    eff: Option<f64>,
    /// Subset size (randv).
    #[arg(long, default_value_t = 0)]
    t: usize,
    /// Stand-in for the unspecified correction constant (randv).
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, value_enum, default_value_t = RandvModeArg::Generic)]
    mode: RandvModeArg,
}

#[derive(Debug, Args)]
pub struct SubstateArgs {
    /// Joint distribution σ_XB, rows x separated by `;`.
    #[arg(long, requires_all = ["psi", "rho"], conflicts_with = "random")]
    sigma: Option<String>,
    /// Distribution ψ_X, comma separated.
    #[arg(long, value_delimiter = ',')]
    psi: Option<Vec<f64>>,
    /// Distribution ρ_B, comma separated.
    #[arg(long, value_delimiter = ',')]
    rho: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta0: f64,
    #[arg(long, default_value_t = 0.0)]
    delta1: f64,
    /// Check this many random instances whose hypotheses hold by construction.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 2)]
    nx: usize,
    #[arg(long, default_value_t = 2)]
    nb: usize,
}

#[derive(Debug, Subcommand)]
pub enum DptCommand {
    /// Evaluate a direct-product bound formula.
    Bound(BoundArgs),
    /// Best one-round protocol for n copies with a few bits of communication.
    Probe {
        #[command(flatten)]
        source: GameSource,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        comm_bits: u32,
        /// Bits per player, comma separated (default: all on player 0).
        #[arg(long, value_delimiter = ',')]
        comm_split: Option<Vec<u32>>,
        #[arg(long, value_enum, default_value_t = ProbeMode::Auto)]
        mode: ProbeMode,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// Largest number of protocols enumerated in exhaustive mode.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: f64,
    },
    /// Classical check of substate perturbation.
    SubstateCheck(SubstateArgs),
}

fn bound(a: BoundArgs) -> Result<Value, CliError> {
    let alphabets = a.alphabets.clone().unwrap_or_else(|| vec![2; a.l]);
    let params = json!({
        "l": a.l, "n": a.n, "c": a.c, "nu": a.nu, "eps": a.eps, "zeta": a.zeta,
        "alphabet_sizes": alphabets, "c_size": a.c_size, "pr_e": a.pr_e,
        "exponent_const": a.exponent_const,
    });
    let p = DPTParams {
        l: a.l,
        n: a.n,
        c: a.c,
        c_j: None,
        eps: a.eps,
        zeta: a.zeta,
        nu: a.nu,
        alphabet_sizes: alphabets.clone(),
        c_size: a.c_size,
        pr_e: a.pr_e,
        exponent_const: a.exponent_const,
    };
    let (name, value, mut params) = match a.which {
        BoundKind::CaseI => ("case_i", dpt_case_i_bound(&p)?, params),
        BoundKind::CaseII => {
            let eff = a.eff.ok_or_else(|| CliError::Usage("case-ii needs --eff".into()))?;
            let mut params = params;
            params["eff"] = json!(eff);
            ("case_ii", dpt_case_ii_bound(&p, eff)?, params)
        }
        BoundKind::Randv => {
            let mode = match a.mode {
                RandvModeArg::Generic => RandvMode::Generic,
                RandvModeArg::Mse => RandvMode::Mse,
            };
            let v = randv_bound(&RandvParams {
                t: a.t,
                n: a.n,
                c: a.c,
                l: a.l,
                nu: a.nu,
                beta: a.beta,
                alphabet_sizes: alphabets.clone(),
                mode,
            })?;
            let params = json!({
                "t": a.t, "n": a.n, "c": a.c, "l": a.l, "nu": a.nu, "beta": a.beta,
                "alphabet_sizes": alphabets,
                "mode": match mode { RandvMode::Generic => "generic", RandvMode::Mse => "mse" },
            });
            ("randv", v, params)
        }
    };
    if a.which != BoundKind::Randv {
        params["delta"] = json!(delta_of(a.c_size, a.pr_e, a.n, &p.alphabet_sizes)?);
    }
    Ok(json!({ "bound_name": name, "params": params, "value": value }))
}

fn report_json(r: &SubstateReport) -> Value {
    json!({
        "status": r.status.as_str(),
        "reason": match &r.status { SubstateStatus::HypothesisFailed(m) => Some(m.clone()), _ => None },
        "hypothesis_distance": r.hypothesis_distance,
        "marginal_distance": r.marginal_distance,
        "conclusion_factor": r.conclusion_factor,
        "conclusion_target": r.conclusion_target,
        "conclusion_distance": r.conclusion_distance,
        "witness": r.witness,
    })
}

fn substate(a: SubstateArgs, seed: u64) -> Result<Value, CliError> {
    if let Some(count) = a.random {
        if a.nx == 0 || a.nb == 0 {
            return Err(CliError::Usage("--nx and --nb must be positive".into()));
        }
        let mut rng = rng::stream(seed, 0);
        let mut tally = [0usize; 3];
        for _ in 0..count {
            let r = SubstateInstance::random_valid(&mut rng, a.nx, a.nb).check()?;
            tally[match r.status {
                SubstateStatus::Feasible => 0,
                SubstateStatus::Infeasible => 1,
                SubstateStatus::HypothesisFailed(_) => 2,
            }] += 1;
        }
        return Ok(json!({
            "instances": count, "nx": a.nx, "nb": a.nb, "seed": seed,
            "feasible": tally[0], "infeasible": tally[1], "hypothesis_failed": tally[2],
        }));
    }
    let sigma = a
        .sigma
        .ok_or_else(|| CliError::Usage("give --sigma/--psi/--rho or --random".into()))?;
    let (rows, cols, flat) = parse_matrix(&sigma)?;
    let table = JointTable::new(flat.chunks(cols).map(<[f64]>::to_vec).collect())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    debug_assert_eq!(table.ys(), rows);
    let report = substate_perturbation_check_classical(
        &table,
        a.psi.as_deref().unwrap_or_default(),
        a.rho.as_deref().unwrap_or_default(),
        a.c,
        a.eps,
        a.delta0,
        a.delta1,
    )?;
    Ok(report_json(&report))
}

pub fn run(cmd: DptCommand, global: &GlobalArgs) -> Result<Output, CliError> {
    let v = match cmd {
        DptCommand::Bound(a) => bound(a)?,
        DptCommand::Probe {
            source,
            n,
            comm_bits,
            comm_split,
            mode,
            restarts,
            budget,
        } => {
            let (name, g) = source.load()?;
            let mut probe = RepetitionProbe::new(g, n, comm_bits)
                .with_seed(global.seed)
                .with_mode(match mode {
                    ProbeMode::Auto => SearchMode::Auto,
                    ProbeMode::Exhaustive => SearchMode::Exhaustive,
                    ProbeMode::HillClimb => SearchMode::HillClimb,
                });
            probe.comm_split = comm_split;
            probe.restarts = restarts;
            probe.search_budget = budget;
            let r = empirical_repeated_value(probe)?;
            let t = r.protocol.as_ref().expect("a protocol accompanies the value");
            json!({
                "game": name,
                "n": n,
                "comm_bits": comm_bits,
                "seed": global.seed,
                "value": r.best_value,
                "kind": r.kind.map(|k| k.as_str()),
                "protocol": {
                    "message_bits": t.message_bits,
                    "encoders": t.encoders,
                    "decoders": t.decoders,
                },
            })
        }
        DptCommand::SubstateCheck(a) => substate(a, global.seed)?,
    };
    Ok(Output::Data(v))
}
