//! The ½-EF1 greedy solver for arbitrary budgets.
//!
//! Agents are placed at *positions* sorted by ascending budget. Each position
//! carries a level `l(p)` and may only hold a bundle that fits the budget of
//! the `l(p)`-th position (its virtual budget). An item is offered to the
//! poorest active position; [`GreedySolver::try_fit`] either finds a way to
//! accommodate it by swapping bundles within a level and raising levels, or
//! reports that the bundles plus the item are not a feasible configuration.
//!
//! Levels are 1-based as in the trace output; positions are 0-based in
//! memory and 1-based in JSON.

pub mod audit;

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::model::{Allocation, Instance, Item};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    /// Lowest position among equally poor agents, lowest item index among
    /// equally dense items.
    #[default]
    Canonical,
    /// Ties resolved by a seeded random ranking. Meant for tests that must
    /// not depend on a particular tie-break.
    Randomized(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverState {
    /// Items per position, in the order they were added.
    pub bundles: Vec<Vec<usize>>,
    pub sizes: Vec<Rational>,
    pub values: Vec<Rational>,
    /// 1-based levels; position `p` has virtual budget `budgets[levels[p] - 1]`.
    pub levels: Vec<usize>,
    /// Positions `active_from..n` are active.
    pub active_from: usize,
    /// Unallocated items, dummy included.
    pub unallocated: BTreeSet<usize>,
    /// Agent seated at each position.
    pub holders: Vec<usize>,
}

impl SolverState {
    pub fn positions(&self) -> usize {
        self.bundles.len()
    }

    pub fn is_active(&self, position: usize) -> bool {
        position >= self.active_from && position < self.positions()
    }

    pub fn active(&self) -> std::ops::Range<usize> {
        self.active_from..self.positions()
    }

    /// Largest position sharing the level of `position`.
    pub fn last_at_level_of(&self, position: usize) -> usize {
        let level = self.levels[position];
        (position..self.positions())
            .rev()
            .find(|&p| self.levels[p] == level)
            .unwrap_or(position)
    }

    /// Exchanges the bundles at `a` and `b`. Agents with equal budgets are
    /// interchangeable, so between such positions the agents move along with
    /// their bundles.
    fn exchange(&mut self, a: usize, b: usize, budgets: &[Rational]) {
        self.bundles.swap(a, b);
        self.sizes.swap(a, b);
        self.values.swap(a, b);
        if budgets[a] == budgets[b] {
            self.holders.swap(a, b);
        }
    }
}

/// Result of a successful [`GreedySolver::try_fit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fit {
    pub state: SolverState,
    /// Position whose bundle received the item.
    pub landed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Event {
    Commit {
        position: usize,
        item: usize,
        landed: usize,
    },
    /// `position` is the actively finalized one (after the swap); `passive`
    /// lists the other positions deactivated in the same step.
    Finalize { position: usize, passive: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub event: Event,
    pub state: SolverState,
}

/// Hooks into a solver run. All methods default to no-ops.
pub trait Observer {
    fn attempt(
        &mut self,
        _solver: &GreedySolver,
        _before: &SolverState,
        _position: usize,
        _item: usize,
        _fit: Option<&Fit>,
    ) {
    }

    fn step(&mut self, _solver: &GreedySolver, _previous: &SolverState, _step: &TraceStep) {}
}

impl Observer for () {}

#[derive(Clone, Debug)]
pub struct GeneralRun {
    pub allocation: Allocation,
    pub trace: Vec<TraceStep>,
}

pub struct GreedySolver {
    items: Vec<Item>,
    real_items: usize,
    budgets: Vec<Rational>,
    agent_of_position: Vec<usize>,
    scan_order: Vec<usize>,
    position_rank: Vec<usize>,
}

impl GreedySolver {
    pub fn new(instance: &Instance, tie_break: TieBreak) -> Self {
        let n = instance.agents();
        let mut agent_of_position: Vec<usize> = (0..n).collect();
        agent_of_position.sort_by(|&a, &b| instance.budget(a).cmp(instance.budget(b)).then(a.cmp(&b)));
        let budgets: Vec<Rational> = agent_of_position.iter().map(|&a| instance.budget(a).clone()).collect();

        let mut items = instance.items().to_vec();
        let dummy_size = budgets.last().expect("at least one agent") + Rational::from_integer(1.into());
        items.push(Item {
            value: Rational::zero(),
            size: dummy_size,
        });

        let (item_rank, position_rank) = match tie_break {
            TieBreak::Canonical => ((0..items.len()).collect(), (0..n).collect()),
            TieBreak::Randomized(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut ir: Vec<usize> = (0..items.len()).collect();
                ir.shuffle(&mut rng);
                let mut pr: Vec<usize> = (0..n).collect();
                pr.shuffle(&mut rng);
                (ir, pr)
            }
        };
        let densities: Vec<Rational> = items.iter().map(Item::density).collect();
        let mut scan_order: Vec<usize> = (0..items.len()).collect();
        scan_order.sort_by(|&a, &b| densities[b].cmp(&densities[a]).then(item_rank[a].cmp(&item_rank[b])));

        Self {
            real_items: instance.item_count(),
            items,
            budgets,
            agent_of_position,
            scan_order,
            position_rank,
        }
    }

    /// Budgets in position order (ascending).
    pub fn budgets(&self) -> &[Rational] {
        &self.budgets
    }

    /// Initial seating: agents by ascending budget.
    pub fn agent_of_position(&self) -> &[usize] {
        &self.agent_of_position
    }

    /// Index of the internal dummy item.
    pub fn dummy(&self) -> usize {
        self.real_items
    }

    pub fn item(&self, index: usize) -> &Item {
        &self.items[index]
    }

    /// Items in the order the solver scans them: densest first.
    pub fn scan_order(&self) -> &[usize] {
        &self.scan_order
    }

    pub fn initial_state(&self) -> SolverState {
        let n = self.budgets.len();
        SolverState {
            bundles: vec![Vec::new(); n],
            sizes: vec![Rational::zero(); n],
            values: vec![Rational::zero(); n],
            levels: vec![1; n],
            active_from: 0,
            unallocated: (0..self.items.len()).collect(),
            holders: self.agent_of_position.clone(),
        }
    }

    fn virtual_budget(&self, state: &SolverState, position: usize) -> &Rational {
        &self.budgets[state.levels[position] - 1]
    }

    /// Tries to add `item` to the bundle at `position`, on a copy of `state`.
    /// Returns `None` when the bundles plus the item admit no budget-feasible
    /// placement; `state` itself is never modified.
    ///
    /// Expects `position` to be active and `item` unallocated.
    pub fn try_fit(&self, state: &SolverState, position: usize, item: usize) -> Option<Fit> {
        debug_assert!(state.is_active(position));
        debug_assert!(state.unallocated.contains(&item));
        let g = &self.items[item];
        let mut next = state.clone();
        let mut at = position;
        while &next.sizes[at] + &g.size > *self.virtual_budget(&next, at) {
            let last = next.last_at_level_of(at);
            if last != at {
                next.exchange(at, last, &self.budgets);
                at = last;
            } else if next.levels[at] < at + 1 {
                next.levels[at] += 1;
            } else {
                return None;
            }
        }
        next.bundles[at].push(item);
        next.sizes[at] += &g.size;
        next.values[at] += &g.value;
        next.unallocated.remove(&item);
        Some(Fit {
            state: next,
            landed: at,
        })
    }

    /// Active position with the least valuable bundle.
    pub fn poorest_active(&self, state: &SolverState) -> Option<usize> {
        state.active().min_by(|&a, &b| {
            state.values[a]
                .cmp(&state.values[b])
                .then(self.position_rank[a].cmp(&self.position_rank[b]))
        })
    }

    pub fn run(&self, observer: &mut impl Observer) -> GeneralRun {
        let mut state = self.initial_state();
        let mut trace = Vec::new();

        while let Some(i) = self.poorest_active(&state) {
            let mut committed = None;
            for &g in &self.scan_order {
                if !state.unallocated.contains(&g) {
                    continue;
                }
                let fit = self.try_fit(&state, i, g);
                observer.attempt(self, &state, i, g, fit.as_ref());
                if let Some(fit) = fit {
                    committed = Some((g, fit));
                    break;
                }
            }

            let step = match committed {
                Some((item, fit)) => TraceStep {
                    event: Event::Commit {
                        position: i,
                        item,
                        landed: fit.landed,
                    },
                    state: fit.state,
                },
                None => {
                    let j = state.last_at_level_of(i);
                    let mut next = state.clone();
                    next.exchange(i, j, &self.budgets);
                    next.active_from = j + 1;
                    let passive = (state.active_from..=j).filter(|&p| p != j).collect();
                    TraceStep {
                        event: Event::Finalize { position: j, passive },
                        state: next,
                    }
                }
            };
            observer.step(self, &state, &step);
            state = step.state.clone();
            trace.push(step);
        }

        GeneralRun {
            allocation: self.allocation_of(&state),
            trace,
        }
    }

    /// Maps positions back to agents; leftover real items go to the charity.
    pub fn allocation_of(&self, state: &SolverState) -> Allocation {
        let n = self.budgets.len();
        let mut bundles = vec![Vec::new(); n + 1];
        for (p, bundle) in state.bundles.iter().enumerate() {
            bundles[state.holders[p] + 1] = bundle.iter().copied().filter(|&j| j < self.real_items).collect();
        }
        bundles[0] = state
            .unallocated
            .iter()
            .copied()
            .filter(|&j| j < self.real_items)
            .collect();
        Allocation::from_bundles(bundles)
    }

    /// One JSON object describing a trace step, ids 1-based.
    pub fn step_json(&self, index: usize, step: &TraceStep) -> serde_json::Value {
        let one_based = |v: &[usize]| v.iter().map(|j| j + 1).collect::<Vec<_>>();
        let s = &step.state;
        let mut obj = json!({
            "step": index,
            "bundles": s.bundles.iter().map(|b| one_based(b)).collect::<Vec<_>>(),
            "sizes": s.sizes.iter().map(rational::format_rational).collect::<Vec<_>>(),
            "values": s.values.iter().map(rational::format_rational).collect::<Vec<_>>(),
            "levels": s.levels,
            "active": s.active().map(|p| p + 1).collect::<Vec<_>>(),
            "unallocated": s.unallocated.iter().map(|j| j + 1).collect::<Vec<_>>(),
            "dummy": self.dummy() + 1,
            "agents": one_based(&s.holders),
        });
        match &step.event {
            Event::Commit { position, item, landed } => {
                obj["event"] = json!("commit");
                obj["position"] = json!(position + 1);
                obj["item"] = json!(item + 1);
                obj["landed"] = json!(landed + 1);
            }
            Event::Finalize { position, passive } => {
                obj["event"] = json!("finalize");
                obj["position"] = json!(position + 1);
                obj["passive"] = json!(one_based(passive));
            }
        }
        obj
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvariantViolation {
    Level { position: usize, detail: String },
    Size { position: usize, detail: String },
}

/// Checks the level invariant (`l` non-decreasing in position and
/// `l(p) ≤ p`) and the size invariant (`s(X_p)` lies in
/// `(B_{l(p)-1}, B_{l(p)}]`, with `B_0 = -∞`). `budgets` are in position order.
pub fn assert_state_invariants(state: &SolverState, budgets: &[Rational]) -> Result<(), InvariantViolation> {
    for (p, &level) in state.levels.iter().enumerate() {
        if level < 1 || level > p + 1 {
            return Err(InvariantViolation::Level {
                position: p + 1,
                detail: format!("level {level} outside 1..={}", p + 1),
            });
        }
        if p > 0 && state.levels[p - 1] > level {
            return Err(InvariantViolation::Level {
                position: p + 1,
                detail: format!("level {level} below level {} of position {p}", state.levels[p - 1]),
            });
        }
    }
    for (p, (size, &level)) in state.sizes.iter().zip(&state.levels).enumerate() {
        let upper = &budgets[level - 1];
        let above_lower = level == 1 || size > &budgets[level - 2];
        if size > upper || !above_lower {
            return Err(InvariantViolation::Size {
                position: p + 1,
                detail: format!("size {} outside the band of level {level}", rational::Display(size)),
            });
        }
    }
    Ok(())
}

pub fn solve_general(instance: &Instance) -> GeneralRun {
    GreedySolver::new(instance, TieBreak::Canonical).run(&mut ())
}

pub fn solve_general_with(instance: &Instance, tie_break: TieBreak, observer: &mut impl Observer) -> GeneralRun {
    GreedySolver::new(instance, tie_break).run(observer)
}
