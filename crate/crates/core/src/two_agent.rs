//! Divide and choose for two agents.
//!
//! Phase 1 runs the early-stop greedy for both agents under the smaller
//! budget. The smaller-budget agent keeps one of the two bundles. Phase 2
//! lets the larger-budget agent greedily fill her budget from everything
//! except that bundle.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{bundle_size, bundle_value, Allocation, Instance};
use crate::uniform::early_stop_greedy;

/// Which phase-1 bundle the smaller-budget agent keeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Selection {
    /// The more valuable bundle; on a value tie the smaller one.
    #[default]
    ProofConsistent,
    /// The less valuable bundle; on a value tie the smaller one. Not EF1 in
    /// general; kept for regression comparisons.
    LiteralArgmin,
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proof" => Ok(Self::ProofConsistent),
            "argmin" => Ok(Self::LiteralArgmin),
            other => Err(Error::InvalidInput(format!(
                "unknown selection {other:?}; expected proof or argmin"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoAgentRun {
    pub allocation: Allocation,
    /// Agent with the smaller budget (0-based; agent 0 on a tie).
    pub first: usize,
    /// Phase-1 bundles, in the early-stop greedy's agent order.
    pub phase1: [Vec<usize>; 2],
    /// Index into `phase1` of the bundle kept by `first`.
    pub kept: usize,
}

pub fn solve_two_agent_run(instance: &Instance, selection: Selection) -> Result<TwoAgentRun> {
    if instance.agents() != 2 {
        return Err(Error::Precondition(format!(
            "the two-agent solver needs exactly 2 agents, got {}",
            instance.agents()
        )));
    }
    let (first, second) = if instance.budget(1) < instance.budget(0) {
        (1, 0)
    } else {
        (0, 1)
    };
    let m = instance.item_count();

    let phase1 = early_stop_greedy(instance, instance.budget(first), 2, &vec![true; m]);
    let [a, b]: [Vec<usize>; 2] = phase1.bundles.try_into().expect("two bundles");
    let (va, vb) = (bundle_value(instance, &a), bundle_value(instance, &b));
    let kept = if va == vb {
        usize::from(bundle_size(instance, &b) < bundle_size(instance, &a))
    } else {
        match selection {
            Selection::ProofConsistent => usize::from(vb > va),
            Selection::LiteralArgmin => usize::from(vb < va),
        }
    };
    let phase1 = [a, b];
    let kept_bundle = phase1[kept].clone();

    let mut eligible = vec![true; m];
    for &j in &kept_bundle {
        eligible[j] = false;
    }
    let phase2 = early_stop_greedy(instance, instance.budget(second), 1, &eligible);
    let mut agent_bundles = vec![Vec::new(), Vec::new()];
    agent_bundles[first] = kept_bundle;
    agent_bundles[second] = phase2.bundles.into_iter().next().expect("one bundle");

    Ok(TwoAgentRun {
        allocation: Allocation::from_agent_bundles(instance, agent_bundles),
        first,
        phase1,
        kept,
    })
}

pub fn solve_two_agent(instance: &Instance, selection: Selection) -> Result<Allocation> {
    Ok(solve_two_agent_run(instance, selection)?.allocation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envy::{allocation_ratio, EnvyMode};
    use crate::instances::{fixture, FixtureName};
    use crate::rational::{int, rat};

    #[test]
    fn table2_proof_consistent() {
        let inst = fixture(FixtureName::Table2, &rat(1, 10)).unwrap();
        let run = solve_two_agent_run(&inst, Selection::ProofConsistent).unwrap();
        assert_eq!(run.phase1, [vec![0], vec![1]]);
        assert_eq!(run.kept, 0);
        assert_eq!(run.allocation.bundles(), &[vec![2], vec![0], vec![1]]);
        assert_eq!(
            allocation_ratio(&inst, &run.allocation, EnvyMode::Ef1).unwrap().ratio,
            int(1)
        );
    }

    #[test]
    fn table2_literal_argmin_breaks_ef1() {
        let inst = fixture(FixtureName::Table2, &rat(1, 10)).unwrap();
        let alloc = solve_two_agent(&inst, Selection::LiteralArgmin).unwrap();
        assert_eq!(alloc.bundles(), &[vec![], vec![1], vec![0, 2]]);
        assert_eq!(allocation_ratio(&inst, &alloc, EnvyMode::Ef1).unwrap().ratio, rat(2, 9));
    }

    #[test]
    fn no_items() {
        let inst = Instance::new(vec![int(1), int(2)], vec![]).unwrap();
        let alloc = solve_two_agent(&inst, Selection::ProofConsistent).unwrap();
        assert!(alloc.bundles().iter().all(Vec::is_empty));
        assert_eq!(allocation_ratio(&inst, &alloc, EnvyMode::Ef1).unwrap().ratio, int(1));
    }

    #[test]
    fn larger_budget_first_is_relabelled() {
        let inst = Instance::from_pairs(
            vec![int(3), int(1)],
            vec![(int(2), int(1)), (int(1), int(1)), (int(1), int(1))],
        )
        .unwrap();
        let run = solve_two_agent_run(&inst, Selection::ProofConsistent).unwrap();
        assert_eq!(run.first, 1);
        assert_eq!(run.allocation.agent_bundle(1), &[0]);
        assert_eq!(run.allocation.agent_bundle(0), &[1, 2]);
    }

    #[test]
    fn needs_two_agents() {
        let inst = Instance::new(vec![int(1)], vec![]).unwrap();
        assert!(matches!(
            solve_two_agent(&inst, Selection::ProofConsistent),
            Err(Error::Precondition(_))
        ));
        assert_eq!("argmin".parse::<Selection>().unwrap(), Selection::LiteralArgmin);
        assert!("max".parse::<Selection>().is_err());
    }
}
