//! Computations around nonlocal games with limited communication.
//!
//! - [`qcore`]: small dense quantum states, fidelity and distances.
//! - [`entropy`]: entropies, divergences and smoothing in the classical case.
//! - [`games`]: l-player games, exact classical values, see-saw lower bounds.
//! - [`bounds`]: simplex LP solver, partition-bound relaxations, γ₂-type bounds.
//! - [`dpt`]: direct-product bound evaluators and repeated-game probes.
//! - [`diqkd`]: DIQKD protocol simulator with metered leakage and key rates.

// Parameter checks are written as `!(x >= 0.0)` on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod diqkd;
pub mod dpt;
pub mod entropy;
pub mod games;
pub mod qcore;
pub mod rng;
