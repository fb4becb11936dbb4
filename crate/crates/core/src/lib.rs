//! Fair allocation of indivisible items to agents with budget (knapsack)
//! constraints, under identical additive valuations.
//!
//! Solvers:
//! - [`greedy::solve_general`]: ½-EF1 for arbitrary budgets, `(1 - 1/κ)`-EF1
//!   when items are small relative to budgets.
//! - [`uniform::solve_uniform`]: exact EF1 when all budgets are equal.
//! - [`two_agent::solve_two_agent`]: exact EF1 for two agents.
//! - [`baselines`]: budget-aware round-robin and density greedy, without
//!   guarantees.
//! - [`nsw::solve_nsw_exact`]: exhaustive Nash social welfare maximization.
//!
//! [`envy`] certifies the EF / EF1 ratio of any allocation exactly.
//! All arithmetic is exact ([`rational::Rational`]).

pub mod baselines;
pub mod cli;
pub mod envy;
pub mod error;
pub mod feasibility;
pub mod greedy;
pub mod instances;
pub mod model;
pub mod nsw;
pub mod rational;
pub mod two_agent;
pub mod uniform;

pub use error::{Error, Result};
pub use model::{Allocation, Instance, Item};
pub use rational::Rational;
