//! Partition-bound relaxations and γ₂-type bounds, with a self-contained
//! dense simplex solver.

mod gamma2;
mod lp;
mod partition;

use thiserror::Error;

use crate::games::GameError;

pub use gamma2::{
    check_thm2, gamma2_alpha, gamma2_star, Gamma2Kind, Gamma2Result, RealMatrix, SignMatrix, Thm2Report,
    GAMMA2_ALPHA_MAX_ENTRIES,
};
pub use lp::{solve_lp, Constraint, Direction, LinearProgram, LpSolution, Sense, TABLEAU_BUDGET};
pub use partition::{
    add_no_signalling_rows, eff_local, eff_ns, ns_value, replay_partition, NsValue, PartitionBoundResult, Relaxation,
    Replay, Variant, DEFAULT_LOCAL_BUDGET, ETA_FLOOR,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
    #[error("invalid linear program: {0}")]
    InvalidLp(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("budget exceeded: need {needed:e}, budget {budget:e}")]
    BudgetExceeded { needed: f64, budget: f64 },
    #[error(transparent)]
    Game(#[from] GameError),
}
