//! Run-time audit of the greedy solver's guarantees.
//!
//! [`Audit`] is an [`Observer`] that re-checks after every step:
//! the level and size invariants, EF1 among the active bundles, and at each
//! finalization that passively finalized bundles have smaller budgets and at
//! least the value of the actively finalized one. It also counts iterations
//! and records every `try_fit` outcome next to the sorted-matching
//! feasibility check of the same augmented bundles.

use num_traits::Zero;

use super::{assert_state_invariants, Event, Fit, GreedySolver, Observer, SolverState, TraceStep};
use crate::feasibility::is_feasible_configuration;
use crate::rational::Rational;

#[derive(Debug, Default)]
pub struct Audit {
    pub steps: usize,
    pub commits: usize,
    pub finalizations: usize,
    pub attempts: usize,
    /// `try_fit` outcomes that disagreed with the feasibility check.
    pub disagreements: usize,
    pub violations: Vec<String>,
}

impl Audit {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.disagreements == 0
    }
}

/// Sizes of the bundles after adding `item` at `position`.
pub fn augmented_sizes(solver: &GreedySolver, state: &SolverState, position: usize, item: usize) -> Vec<Rational> {
    let mut sizes = state.sizes.clone();
    sizes[position] += &solver.item(item).size;
    sizes
}

/// Claim checked between iterations: every active bundle is envied by no
/// other active bundle after removing its most valuable item.
pub fn active_ef1_violation(solver: &GreedySolver, state: &SolverState) -> Option<(usize, usize)> {
    let top: Vec<Rational> = state
        .bundles
        .iter()
        .map(|b| {
            b.iter()
                .map(|&j| solver.item(j).value.clone())
                .max()
                .unwrap_or_else(Rational::zero)
        })
        .collect();
    for i in state.active() {
        for j in state.active() {
            if i != j && state.values[i] < &state.values[j] - &top[j] {
                return Some((i, j));
            }
        }
    }
    None
}

impl Observer for Audit {
    fn attempt(
        &mut self,
        solver: &GreedySolver,
        before: &SolverState,
        position: usize,
        item: usize,
        fit: Option<&Fit>,
    ) {
        self.attempts += 1;
        let sizes = augmented_sizes(solver, before, position, item);
        let feasible = is_feasible_configuration(&sizes, solver.budgets()).expect("equal lengths");
        if feasible != fit.is_some() {
            self.disagreements += 1;
        }
    }

    fn step(&mut self, solver: &GreedySolver, previous: &SolverState, step: &TraceStep) {
        self.steps += 1;
        let state = &step.state;
        if let Err(v) = assert_state_invariants(state, solver.budgets()) {
            self.violations.push(format!("step {}: {v:?}", self.steps));
        }
        if let Some((i, j)) = active_ef1_violation(solver, state) {
            self.violations.push(format!(
                "step {}: active position {} envies {} beyond one item",
                self.steps,
                i + 1,
                j + 1
            ));
        }
        match &step.event {
            Event::Commit { .. } => self.commits += 1,
            Event::Finalize { position, passive } => {
                self.finalizations += 1;
                let budgets = solver.budgets();
                for &k in passive {
                    if budgets[k] > budgets[*position] || state.values[k] < state.values[*position] {
                        self.violations.push(format!(
                            "step {}: passively finalized position {} is worse off than {}",
                            self.steps,
                            k + 1,
                            position + 1
                        ));
                    }
                }
                if previous.active_from > *position {
                    self.violations
                        .push(format!("step {}: finalized an inactive position", self.steps));
                }
            }
        }
    }
}
