use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};
use leakdpt::diqkd::{
    chernoff_abort_bound, key_rate, run_batch, serfling_mc, serfling_worst_threshold, summarize, sweep,
    threshold_pattern, write_csv, AdversaryScript, BoxPair, ClassicalCheatingBoxes, DiqkdError, HonestBoxes,
    KeyRateParams, ProtocolParams, SweepGrid, DEFAULT_BETA, DEFAULT_NU,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::Format;
use crate::{GlobalArgs, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoxesArg {
    /// Magic-square boxes with a δ-noisy Bob.
    Honest,
    /// Deterministic classical boxes that exploit leaked inputs.
    Cheating,
}

#[derive(Debug, Subcommand)]
pub enum DiqkdCommand {
    /// Simulate the protocol: one transcript, or a summary over several runs.
    Run {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.2)]
        gamma: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        /// Leakage budget in bits per copy.
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[arg(long, value_enum, default_value_t = BoxesArg::Honest)]
        boxes: BoxesArg,
        /// Adversary script in the JSON adversary schema.
        #[arg(long)]
        adversary: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        runs: usize,
    },
    /// Key-rate lower bound for one parameter point.
    Rate {
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.2)]
        gamma: f64,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        c: f64,
        #[arg(long, default_value_t = DEFAULT_NU)]
        nu: f64,
        #[arg(long, default_value_t = DEFAULT_BETA)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        pr_e: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Key rates over a parameter grid (CSV by default).
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "1000")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        alpha: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.2")]
        gamma: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.01")]
        delta: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        c: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0.01")]
        nu: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        beta: Vec<f64>,
        /// Pr[E] values; ignored when --runs > 0 (estimated from honest runs).
        #[arg(long, value_delimiter = ',', default_value = "1")]
        pr_e: Vec<f64>,
        /// Honest runs per grid point used to estimate Pr[E].
        #[arg(long, default_value_t = 0)]
        runs: usize,
    },
    /// Monte Carlo check of the sampling tail bound used by the test step.
    Serfling {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0.2)]
        gamma: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        /// Number of ones in the threshold pattern.
        #[arg(long, conflicts_with = "worst")]
        ones: Option<usize>,
        /// Scan every pattern below (1−2ε)n and report the worst.
        #[arg(long)]
        worst: bool,
    },
}

fn make_boxes(kind: BoxesArg, delta: f64) -> Result<Box<dyn BoxPair>, DiqkdError> {
    Ok(match kind {
        BoxesArg::Honest => Box::new(HonestBoxes::new(delta)?),
        BoxesArg::Cheating => Box::new(ClassicalCheatingBoxes::new()?),
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Compute(e.to_string()))
}

pub fn run(cmd: DiqkdCommand, global: &GlobalArgs) -> Result<Output, CliError> {
    let seed = global.seed;
    match cmd {
        DiqkdCommand::Run {
            n,
            alpha,
            gamma,
            delta,
            c,
            boxes,
            adversary,
            runs,
        } => {
            if runs == 0 {
                return Err(CliError::Usage("--runs must be at least 1".into()));
            }
            let script = match &adversary {
                None => None,
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                    Some(AdversaryScript::from_json_str(&text)?)
                }
            };
            let params = ProtocolParams {
                n,
                alpha,
                gamma,
                delta,
                seed,
            };
            let records = run_batch(&params, || make_boxes(boxes, delta), script.as_ref(), c, runs)?;
            let mut v = if runs == 1 {
                to_value(&records[0])?
            } else {
                to_value(&summarize(&records))?
            };
            v["params"] = json!({
                "n": n, "alpha": alpha, "gamma": gamma, "delta": delta, "c": c, "seed": seed,
                "s_size": params.s_size(), "t_size": params.t_size(),
                "boxes": match boxes { BoxesArg::Honest => "honest", BoxesArg::Cheating => "cheating" },
            });
            Ok(Output::Data(v))
        }
        DiqkdCommand::Rate {
            alpha,
            gamma,
            delta,
            c,
            nu,
            beta,
            pr_e,
            n,
        } => {
            let r = key_rate(&KeyRateParams {
                alpha,
                gamma,
                delta,
                c,
                nu,
                beta,
                pr_e,
                n,
            })?;
            let mut v = to_value(&r)?;
            v["honest_abort_bound"] = json!(chernoff_abort_bound(delta, gamma, alpha, n));
            v["params"] = json!({
                "alpha": alpha, "gamma": gamma, "delta": delta, "c": c, "nu": nu, "beta": beta,
                "pr_e": pr_e, "n": n,
            });
            Ok(Output::Data(v))
        }
        DiqkdCommand::Sweep {
            n,
            alpha,
            gamma,
            delta,
            c,
            nu,
            beta,
            pr_e,
            runs,
        } => {
            let grid = SweepGrid {
                n,
                alpha,
                gamma,
                delta,
                c,
                nu,
                beta,
                pr_e,
            };
            let rows = sweep(&grid, runs, seed)?;
            match global.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&rows, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
                    Ok(Output::Text(String::from_utf8(buf).expect("CSV output is UTF-8")))
                }
                Format::Json => Ok(Output::Data(to_value(&rows)?)),
            }
        }
        DiqkdCommand::Serfling {
            n,
            gamma,
            eps,
            trials,
            ones,
            worst,
        } => {
            let (k, est) = if worst {
                serfling_worst_threshold(n, gamma, eps, trials, seed)?
            } else {
                let k = ones.unwrap_or_else(|| ((1.0 - 2.0 * eps) * n as f64).ceil().max(1.0) as usize - 1);
                (k, serfling_mc(gamma, eps, &threshold_pattern(n, k), trials, seed)?)
            };
            let mut v = to_value(&est)?;
            v["ones"] = json!(k);
            v["n"] = json!(n);
            v["gamma"] = json!(gamma);
            v["eps"] = json!(eps);
            v["seed"] = json!(seed);
            v["within_bound"] = json!(est.empirical <= est.bound + est.three_sigma);
            Ok(Output::Data(v))
        }
    }
}
