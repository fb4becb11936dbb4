//! Greedy with early stop for equal budgets: the poorest agent takes the
//! densest item that still fits, and the whole run stops the first time the
//! poorest agent cannot take anything.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Allocation, Instance};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformRun {
    pub allocation: Allocation,
    /// `(agent, item)` in allocation order.
    pub picks: Vec<(usize, usize)>,
    /// Agent whose turn triggered the stop.
    pub stopped_at: usize,
}

/// Bundles built by the early-stop greedy, shared with the two-agent solver.
pub(crate) struct EarlyStop {
    pub bundles: Vec<Vec<usize>>,
    pub picks: Vec<(usize, usize)>,
    pub stopped_at: usize,
}

/// Runs the early-stop greedy for `agents` agents sharing `capacity`, over
/// the items with `eligible[j]` set.
pub(crate) fn early_stop_greedy(
    instance: &Instance,
    capacity: &Rational,
    agents: usize,
    eligible: &[bool],
) -> EarlyStop {
    let densities: Vec<Rational> = instance.items().iter().map(|it| it.density()).collect();
    let mut order: Vec<usize> = (0..instance.item_count()).filter(|&j| eligible[j]).collect();
    order.sort_by(|&a, &b| densities[b].cmp(&densities[a]).then(a.cmp(&b)));

    let mut taken = vec![false; instance.item_count()];
    let mut bundles = vec![Vec::new(); agents];
    let mut values = vec![Rational::zero(); agents];
    let mut sizes = vec![Rational::zero(); agents];
    let mut picks = Vec::new();
    loop {
        let i = (0..agents)
            .min_by(|&a, &b| values[a].cmp(&values[b]).then(a.cmp(&b)))
            .expect("at least one agent");
        let pick = order
            .iter()
            .copied()
            .find(|&g| !taken[g] && &sizes[i] + &instance.item(g).size <= *capacity);
        let Some(g) = pick else {
            return EarlyStop {
                bundles,
                picks,
                stopped_at: i,
            };
        };
        taken[g] = true;
        bundles[i].push(g);
        values[i] += &instance.item(g).value;
        sizes[i] += &instance.item(g).size;
        picks.push((i, g));
    }
}

pub fn solve_uniform_run(instance: &Instance) -> Result<UniformRun> {
    let capacity = instance.budget(0);
    if instance.budgets().iter().any(|b| b != capacity) {
        return Err(Error::Precondition("the uniform solver needs all budgets equal".into()));
    }
    let eligible = vec![true; instance.item_count()];
    let run = early_stop_greedy(instance, capacity, instance.agents(), &eligible);
    Ok(UniformRun {
        allocation: Allocation::from_agent_bundles(instance, run.bundles),
        picks: run.picks,
        stopped_at: run.stopped_at,
    })
}

pub fn solve_uniform(instance: &Instance) -> Result<Allocation> {
    Ok(solve_uniform_run(instance)?.allocation)
}
