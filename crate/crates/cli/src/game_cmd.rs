use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use leakdpt::games::{
    builtin, classical_value, quantum_correlation, seesaw, Certificate, GamePredicate, SeesawConfig,
    DEFAULT_STRATEGY_BUDGET,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{GlobalArgs, Output};

/// Where the game comes from: a builtin name or a JSON file.
#[derive(Debug, Args, Clone)]
#[group(required = true, multiple = false)]
pub struct GameSource {
    /// Builtin game: magic_square, mse or chsh.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Game description in the JSON game schema.
    #[arg(long)]
    pub game: Option<PathBuf>,
}

impl GameSource {
    pub fn load(&self) -> Result<(String, GamePredicate), CliError> {
        match (&self.builtin, &self.game) {
            (Some(name), _) => Ok((name.clone(), builtin(name)?)),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                let g = GamePredicate::from_json_str(&text)?;
                let name = g.name().map_or_else(|| path.display().to_string(), str::to_string);
                Ok((name, g))
            }
            (None, None) => Err(CliError::Usage("one of --builtin or --game is required".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Exact value by strategy enumeration.
    Classical,
    /// See-saw lower bound on the quantum value.
    Seesaw,
}

#[derive(Debug, Subcommand)]
pub enum GameCommand {
    /// Classical value or see-saw quantum lower bound.
    Value {
        #[command(flatten)]
        source: GameSource,
        #[arg(long, value_enum, default_value_t = Method::Classical)]
        method: Method,
        /// See-saw restarts.
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// See-saw iterations per restart.
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        /// Local dimensions for see-saw, comma separated (default: the game's suggestion).
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Largest number of deterministic strategies to enumerate.
        #[arg(long, default_value_t = DEFAULT_STRATEGY_BUDGET)]
        budget: f64,
    },
    /// Print a builtin game in the JSON game schema.
    Builtin { name: String },
}

pub fn run(cmd: GameCommand, global: &GlobalArgs) -> Result<Output, CliError> {
    match cmd {
        GameCommand::Value {
            source,
            method,
            restarts,
            max_iters,
            dims,
            budget,
        } => {
            let (name, g) = source.load()?;
            let result = match method {
                Method::Classical => classical_value(&g, budget)?,
                Method::Seesaw => seesaw(
                    &g,
                    &SeesawConfig {
                        local_dims: dims,
                        restarts,
                        max_iters,
                        seed: global.seed,
                        ..SeesawConfig::default()
                    },
                )?,
            };
            let certificate = match &result.certificate {
                Certificate::Classical(s) => json!({
                    "type": "deterministic",
                    "outputs": s.maps.iter().enumerate().map(|(j, m)| {
                        m.iter().map(|&a| Value::String(g.outputs()[j][a].clone())).collect::<Vec<_>>()
                    }).collect::<Vec<_>>(),
                }),
                Certificate::Quantum(q) => {
                    let corr = quantum_correlation(&g, q)?;
                    let nx = g.input_radix().len();
                    json!({
                        "type": "quantum",
                        "local_dims": q.spec().dims(),
                        "correlation": (0..nx).map(|x| corr.row(x).to_vec()).collect::<Vec<_>>(),
                    })
                }
            };
            Ok(Output::Data(json!({
                "game": name,
                "method": match method { Method::Classical => "classical", Method::Seesaw => "seesaw" },
                "value": result.value,
                "kind": result.kind.as_str(),
                "seed": global.seed,
                "certificate": certificate,
            })))
        }
        GameCommand::Builtin { name } => {
            let g = builtin(&name)?;
            let spec = g.to_spec()?;
            let mut v = serde_json::to_value(spec).map_err(|e| CliError::Compute(e.to_string()))?;
            v["name"] = Value::String(name);
            Ok(Output::Data(v))
        }
    }
}
