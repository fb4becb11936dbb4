//! Feasible configurations: can a multiset of bundles be handed out so that
//! every agent's bundle fits her budget?
//!
//! Budgets are a single scalar capacity, so matching the k-th smallest bundle
//! to the k-th smallest budget is optimal. The check is exact and runs in
//! `O(n log n)`.

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Witness permutation of a feasible configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Placement {
    /// `bundle_of_agent[i]` is the bundle given to agent `i`.
    pub bundle_of_agent: Vec<usize>,
}

impl Placement {
    /// Inverse view: `agent_of_bundle()[b]` is the agent receiving bundle `b`.
    pub fn agent_of_bundle(&self) -> Vec<usize> {
        let mut inv = vec![0; self.bundle_of_agent.len()];
        for (agent, &bundle) in self.bundle_of_agent.iter().enumerate() {
            inv[bundle] = agent;
        }
        inv
    }

    pub fn is_identity(&self) -> bool {
        self.bundle_of_agent.iter().enumerate().all(|(i, &b)| i == b)
    }
}

/// Returns a placement of the bundles onto the budgets, or `None` when the
/// configuration is infeasible. Ties in sizes or budgets are ordered by index.
pub fn check_feasible_configuration(bundle_sizes: &[Rational], budgets: &[Rational]) -> Result<Option<Placement>> {
    if bundle_sizes.len() != budgets.len() {
        return Err(Error::InvalidInput(format!(
            "{} bundle sizes but {} budgets",
            bundle_sizes.len(),
            budgets.len()
        )));
    }
    let n = budgets.len();
    let mut by_size: Vec<usize> = (0..n).collect();
    by_size.sort_by(|&a, &b| bundle_sizes[a].cmp(&bundle_sizes[b]).then(a.cmp(&b)));
    let mut by_budget: Vec<usize> = (0..n).collect();
    by_budget.sort_by(|&a, &b| budgets[a].cmp(&budgets[b]).then(a.cmp(&b)));

    let mut bundle_of_agent = vec![0; n];
    for (&bundle, &agent) in by_size.iter().zip(&by_budget) {
        if bundle_sizes[bundle] > budgets[agent] {
            return Ok(None);
        }
        bundle_of_agent[agent] = bundle;
    }
    Ok(Some(Placement { bundle_of_agent }))
}

pub fn is_feasible_configuration(bundle_sizes: &[Rational], budgets: &[Rational]) -> Result<bool> {
    Ok(check_feasible_configuration(bundle_sizes, budgets)?.is_some())
}
