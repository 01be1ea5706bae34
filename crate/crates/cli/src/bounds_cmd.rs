use clap::{Args, Subcommand, ValueEnum};
use leakdpt::bounds::{
    check_thm2, eff_local, eff_ns, gamma2_alpha, gamma2_star, Gamma2Result, PartitionBoundResult, SignMatrix, Variant,
    DEFAULT_LOCAL_BUDGET,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::game_cmd::GameSource;
use crate::{parse_matrix, GlobalArgs, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    WorstCase,
    Tilde,
    Average,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelaxationArg {
    Ns,
    Local,
    Both,
}

/// A two-party XOR function given as a ±1 matrix with an input distribution.
#[derive(Debug, Args, Clone)]
pub struct XorArgs {
    /// Sign matrix F, rows separated by `;`, e.g. "1,1;1,-1".
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    /// Input distribution in the same layout (default: uniform).
    #[arg(long)]
    pub p: Option<String>,
}

impl XorArgs {
    fn parse(&self) -> Result<(SignMatrix, Vec<f64>), CliError> {
        let (r, c, entries) = parse_matrix(&self.f)?;
        let signs = entries
            .iter()
            .map(|&v| {
                if v == 1.0 {
                    Ok(1i8)
                } else if v == -1.0 {
                    Ok(-1i8)
                } else {
                    Err(CliError::Usage(format!("sign matrix entry {v} is not ±1")))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let f = SignMatrix::new(r, c, signs)?;
        let p = match &self.p {
            None => vec![1.0 / (r * c) as f64; r * c],
            Some(s) => {
                let (pr, pc, p) = parse_matrix(s)?;
                if (pr, pc) != (r, c) {
                    return Err(CliError::Usage(format!("p is {pr}×{pc} but F is {r}×{c}")));
                }
                p
            }
        };
        Ok((f, p))
    }
}

#[derive(Debug, Subcommand)]
pub enum BoundsCommand {
    /// Partition-bound efficiencies over the no-signalling and local relaxations.
    Eff {
        #[command(flatten)]
        source: GameSource,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = VariantArg::All)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = RelaxationArg::Both)]
        relaxation: RelaxationArg,
        /// Largest number of deterministic strategy tuples for the local relaxation.
        #[arg(long, default_value_t = DEFAULT_LOCAL_BUDGET)]
        budget: f64,
    },
    /// γ₂*(F∘p), or γ₂^α(F,p) with --alpha-approx.
    Gamma2 {
        #[command(flatten)]
        xor: XorArgs,
        #[arg(long)]
        alpha_approx: Option<f64>,
    },
    /// Checks (1−2ε)·γ₂^α(F,p) ≤ eff_local of the XOR game with α = (1+2ε)/(1−2ε).
    CheckThm2 {
        #[command(flatten)]
        xor: XorArgs,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
}

fn partition_row(r: &PartitionBoundResult) -> Value {
    json!({
        "variant": r.variant.as_str(),
        "relaxation": r.relaxation.as_str(),
        "eta": r.eta,
        "eff": r.eff,
        "log2_eff": r.eff.log2(),
    })
}

fn gamma2_json(r: &Gamma2Result) -> Value {
    json!({
        "value": r.value,
        "kind": r.kind.as_str(),
        "maximizer": r.maximizer.as_ref().map(|m| {
            m.entries().chunks(m.cols()).map(|row| row.to_vec()).collect::<Vec<_>>()
        }),
    })
}

pub fn run(cmd: BoundsCommand, _global: &GlobalArgs) -> Result<Output, CliError> {
    match cmd {
        BoundsCommand::Eff {
            source,
            eps,
            variant,
            relaxation,
            budget,
        } => {
            let (name, g) = source.load()?;
            let variants: Vec<Variant> = match variant {
                VariantArg::WorstCase => vec![Variant::WorstCase],
                VariantArg::Tilde => vec![Variant::Tilde],
                VariantArg::Average => vec![Variant::Average],
                VariantArg::All => Variant::ALL.to_vec(),
            };
            let mut rows = Vec::new();
            for v in variants {
                if relaxation != RelaxationArg::Local {
                    rows.push(partition_row(&eff_ns(&g, eps, v)?));
                }
                if relaxation != RelaxationArg::Ns {
                    rows.push(partition_row(&eff_local(&g, eps, v, budget)?));
                }
            }
            Ok(Output::Data(json!({ "game": name, "eps": eps, "results": rows })))
        }
        BoundsCommand::Gamma2 { xor, alpha_approx } => {
            let (f, p) = xor.parse()?;
            let (name, r) = match alpha_approx {
                None => ("gamma2_star", gamma2_star(&f.hadamard(&p)?)),
                Some(a) => ("gamma2_alpha", gamma2_alpha(&f, &p, a)?),
            };
            let mut v = gamma2_json(&r);
            v["quantity"] = json!(name);
            v["alpha"] = json!(alpha_approx);
            Ok(Output::Data(v))
        }
        BoundsCommand::CheckThm2 { xor, eps } => {
            let (f, p) = xor.parse()?;
            let r = check_thm2(&f, &p, eps)?;
            Ok(Output::Data(json!({
                "eps": r.eps,
                "alpha": r.alpha,
                "gamma2_alpha": r.gamma2_alpha.as_ref().map(gamma2_json),
                "lower": r.lower,
                "upper": r.upper,
                "holds": r.holds,
            })))
        }
    }
}
