//! JSON game schema: `players`, `inputs`, `outputs`, `p` (row-major over
//! input tuples) and `V` (row-major boolean table over `(a, x)` or the name
//! of a builtin game).

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::builtin::builtin;
use super::{GameError, GamePredicate, WinRule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PredicateSpec {
    Builtin(String),
    Table(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    #[serde(default)]
    pub players: Option<usize>,
    #[serde(default)]
    pub inputs: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub outputs: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub p: Option<Vec<f64>>,
    #[serde(rename = "V")]
    pub v: PredicateSpec,
}

impl GameSpec {
    pub fn into_game(self) -> Result<GamePredicate, GameError> {
        match self.v {
            PredicateSpec::Builtin(name) => builtin(&name),
            PredicateSpec::Table(table) => {
                let missing = |f: &str| GameError::Json(format!("field `{f}` is required with a table predicate"));
                let inputs = self.inputs.ok_or_else(|| missing("inputs"))?;
                let outputs = self.outputs.ok_or_else(|| missing("outputs"))?;
                let p = self.p.ok_or_else(|| missing("p"))?;
                if let Some(l) = self.players {
                    if l != inputs.len() {
                        return Err(GameError::Json(format!(
                            "players = {l} but {} input alphabets",
                            inputs.len()
                        )));
                    }
                }
                GamePredicate::new(inputs, outputs, p, WinRule::Table(Arc::new(table)))
            }
        }
    }
}

impl GamePredicate {
    pub fn from_json_str(s: &str) -> Result<Self, GameError> {
        let spec: GameSpec = serde_json::from_str(s).map_err(|e| GameError::Json(e.to_string()))?;
        spec.into_game()
    }

    /// Dense schema representation; callable predicates are materialized when small enough.
    pub fn to_spec(&self) -> Result<GameSpec, GameError> {
        let table = match self.rule() {
            WinRule::Table(t) => t.as_ref().clone(),
            WinRule::Callable(_) => {
                let size = self.input_radix().len() as f64 * self.output_radix().len() as f64;
                if size > super::DENSE_TABLE_LIMIT as f64 {
                    return Err(GameError::BudgetExceeded {
                        needed: size,
                        budget: super::DENSE_TABLE_LIMIT as f64,
                    });
                }
                let nx = self.input_radix().len();
                (0..self.output_radix().len() * nx)
                    .map(|i| self.wins_idx(i / nx, i % nx))
                    .collect()
            }
        };
        Ok(GameSpec {
            players: Some(self.players()),
            inputs: Some(self.inputs().to_vec()),
            outputs: Some(self.outputs().to_vec()),
            p: Some(self.p().to_vec()),
            v: PredicateSpec::Table(table),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::chsh;

    #[test]
    fn builtin_by_name() {
        let g = GamePredicate::from_json_str(r#"{"V": "magic_square"}"#).unwrap();
        assert_eq!(g.output_sizes(), &[4, 4]);
        assert!(GamePredicate::from_json_str(r#"{"V": "tetris"}"#).is_err());
    }

    #[test]
    fn table_roundtrip() {
        let g = chsh();
        let json = serde_json::to_string(&g.to_spec().unwrap()).unwrap();
        let back = GamePredicate::from_json_str(&json).unwrap();
        assert_eq!(back.p(), g.p());
        for a in 0..4 {
            for x in 0..4 {
                assert_eq!(back.wins_idx(a, x), g.wins_idx(a, x));
            }
        }
    }

    #[test]
    fn malformed_json_is_reported() {
        let err = GamePredicate::from_json_str(r#"{"V": [true], "p": [1.0]}"#).unwrap_err();
        assert!(matches!(err, GameError::Json(_)));
        assert!(GamePredicate::from_json_str("not json").is_err());
        let wrong_players = r#"{"players": 3, "inputs": [["0"]], "outputs": [["0"]], "p": [1.0], "V": [true]}"#;
        assert!(GamePredicate::from_json_str(wrong_players).is_err());
    }
}
