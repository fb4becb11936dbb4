//! Naive procedures with no fairness guarantee under budgets, kept as
//! comparison points.

use num_traits::Zero;

use crate::model::{Allocation, Instance};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRobinRun {
    pub allocation: Allocation,
    /// `(agent, item)` in pick order.
    pub picks: Vec<(usize, usize)>,
    /// Picks made before the first turn on which an agent could take nothing.
    pub picks_before_first_stall: usize,
}

impl RoundRobinRun {
    /// Allocation obtained by keeping only the first `count` picks.
    pub fn truncated(&self, instance: &Instance, count: usize) -> Allocation {
        let mut bundles = vec![Vec::new(); instance.agents()];
        for &(agent, item) in &self.picks[..count] {
            bundles[agent].push(item);
        }
        Allocation::from_agent_bundles(instance, bundles)
    }
}

/// Agents take turns in index order, each taking the most valuable remaining
/// item that fits her remaining budget (ties to the lowest index). Agents
/// with nothing that fits are skipped; the run ends when a full round
/// allocates nothing.
pub fn solve_round_robin_run(instance: &Instance) -> RoundRobinRun {
    let n = instance.agents();
    let mut order: Vec<usize> = (0..instance.item_count()).collect();
    order.sort_by(|&a, &b| instance.item(b).value.cmp(&instance.item(a).value).then(a.cmp(&b)));

    let mut taken = vec![false; instance.item_count()];
    let mut used = vec![Rational::zero(); n];
    let mut bundles = vec![Vec::new(); n];
    let mut picks = Vec::new();
    let mut first_stall = None;
    loop {
        let mut progressed = false;
        for agent in 0..n {
            let pick = order
                .iter()
                .copied()
                .find(|&g| !taken[g] && &used[agent] + &instance.item(g).size <= *instance.budget(agent));
            match pick {
                Some(g) => {
                    taken[g] = true;
                    used[agent] += &instance.item(g).size;
                    bundles[agent].push(g);
                    picks.push((agent, g));
                    progressed = true;
                }
                None => {
                    first_stall.get_or_insert(picks.len());
                }
            }
        }
        if !progressed {
            break;
        }
    }
    RoundRobinRun {
        allocation: Allocation::from_agent_bundles(instance, bundles),
        picks_before_first_stall: first_stall.unwrap_or(picks.len()),
        picks,
    }
}

pub fn solve_round_robin(instance: &Instance) -> Allocation {
    solve_round_robin_run(instance).allocation
}

/// The poorest non-finalized agent takes the densest item that fits her
/// remaining budget; an agent with nothing that fits is finalized.
pub fn solve_density_greedy(instance: &Instance) -> Allocation {
    let n = instance.agents();
    let densities: Vec<Rational> = instance.items().iter().map(|it| it.density()).collect();
    let mut order: Vec<usize> = (0..instance.item_count()).collect();
    order.sort_by(|&a, &b| densities[b].cmp(&densities[a]).then(a.cmp(&b)));

    let mut taken = vec![false; instance.item_count()];
    let mut finalized = vec![false; n];
    let mut values = vec![Rational::zero(); n];
    let mut sizes = vec![Rational::zero(); n];
    let mut bundles = vec![Vec::new(); n];
    while let Some(i) = (0..n)
        .filter(|&a| !finalized[a])
        .min_by(|&a, &b| values[a].cmp(&values[b]).then(a.cmp(&b)))
    {
        let pick = order
            .iter()
            .copied()
            .find(|&g| !taken[g] && &sizes[i] + &instance.item(g).size <= *instance.budget(i));
        match pick {
            Some(g) => {
                taken[g] = true;
                values[i] += &instance.item(g).value;
                sizes[i] += &instance.item(g).size;
                bundles[i].push(g);
            }
            None => finalized[i] = true,
        }
    }
    Allocation::from_agent_bundles(instance, bundles)
}
