//! Instances, allocations and the aggregate operations every solver shares.
//!
//! Items and agents are 0-based in memory. The JSON forms use 1-based item
//! ids and agent keys `"1"..="n"`, with `"0"` for the charity.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Index of the charity bundle inside [`Allocation::bundles`].
pub const CHARITY: usize = 0;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Item {
    #[serde(with = "rational::string")]
    pub value: Rational,
    #[serde(with = "rational::string")]
    pub size: Rational,
}

impl Item {
    pub fn new(value: Rational, size: Rational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::InvalidInput(format!(
                "item value must be non-negative, got {}",
                rational::Display(&value)
            )));
        }
        if !size.is_positive() {
            return Err(Error::InvalidInput(format!(
                "item size must be positive, got {}",
                rational::Display(&size)
            )));
        }
        Ok(Self { value, size })
    }

    /// Value per unit of size.
    pub fn density(&self) -> Rational {
        &self.value / &self.size
    }
}

/// Value-to-size ratio of an item.
pub fn density(item: &Item) -> Rational {
    item.density()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InstanceWire", into = "InstanceWire")]
pub struct Instance {
    budgets: Vec<Rational>,
    items: Vec<Item>,
}

#[derive(Serialize, Deserialize)]
struct InstanceWire {
    #[serde(with = "rational::string_vec")]
    budgets: Vec<Rational>,
    items: Vec<Item>,
}

impl TryFrom<InstanceWire> for Instance {
    type Error = Error;

    fn try_from(wire: InstanceWire) -> Result<Self> {
        let items = wire
            .items
            .into_iter()
            .map(|it| Item::new(it.value, it.size))
            .collect::<Result<Vec<_>>>()?;
        Instance::new(wire.budgets, items)
    }
}

impl From<Instance> for InstanceWire {
    fn from(instance: Instance) -> Self {
        InstanceWire {
            budgets: instance.budgets,
            items: instance.items,
        }
    }
}

impl Instance {
    pub fn new(budgets: Vec<Rational>, items: Vec<Item>) -> Result<Self> {
        if budgets.is_empty() {
            return Err(Error::InvalidInput("an instance needs at least one agent".into()));
        }
        if let Some(b) = budgets.iter().find(|b| !b.is_positive()) {
            return Err(Error::InvalidInput(format!(
                "budgets must be positive, got {}",
                rational::Display(b)
            )));
        }
        for item in &items {
            Item::new(item.value.clone(), item.size.clone())?;
        }
        Ok(Self { budgets, items })
    }

    /// Builds an instance from `(value, size)` pairs.
    pub fn from_pairs(budgets: Vec<Rational>, pairs: Vec<(Rational, Rational)>) -> Result<Self> {
        let items = pairs
            .into_iter()
            .map(|(v, s)| Item::new(v, s))
            .collect::<Result<Vec<_>>>()?;
        Self::new(budgets, items)
    }

    pub fn agents(&self) -> usize {
        self.budgets.len()
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn item(&self, index: usize) -> &Item {
        &self.items[index]
    }

    pub fn budgets(&self) -> &[Rational] {
        &self.budgets
    }

    pub fn budget(&self, agent: usize) -> &Rational {
        &self.budgets[agent]
    }

    /// Same items, different budgets.
    pub fn with_budgets(&self, budgets: Vec<Rational>) -> Result<Self> {
        Self::new(budgets, self.items.clone())
    }

    pub fn total_size(&self) -> Rational {
        self.items.iter().map(|it| &it.size).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Exact `(value, size)` sums of a bundle.
pub fn bundle_totals(instance: &Instance, bundle: &[usize]) -> Result<(Rational, Rational)> {
    let mut value = Rational::zero();
    let mut size = Rational::zero();
    for &j in bundle {
        let item = instance.items.get(j).ok_or_else(|| {
            Error::InvalidInput(format!(
                "item {} does not exist (instance has {} items)",
                j + 1,
                instance.item_count()
            ))
        })?;
        value += &item.value;
        size += &item.size;
    }
    Ok((value, size))
}

pub fn bundle_value(instance: &Instance, bundle: &[usize]) -> Rational {
    bundle.iter().map(|&j| &instance.items[j].value).sum()
}

pub fn bundle_size(instance: &Instance, bundle: &[usize]) -> Rational {
    bundle.iter().map(|&j| &instance.items[j].size).sum()
}

/// Smallest budget divided by the largest item size.
pub fn kappa(instance: &Instance) -> Result<Rational> {
    let max_size = instance
        .items
        .iter()
        .map(|it| &it.size)
        .max()
        .ok_or(Error::UndefinedKappa)?;
    let min_budget = instance
        .budgets
        .iter()
        .min()
        .expect("instances have at least one agent");
    Ok(min_budget / max_size)
}

/// A partition of the items into the charity bundle (index 0) and one bundle
/// per agent (index `i + 1` for agent `i`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "AllocationWire", into = "AllocationWire")]
pub struct Allocation {
    bundles: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct AllocationWire {
    bundles: BTreeMap<usize, Vec<usize>>,
}

impl TryFrom<AllocationWire> for Allocation {
    type Error = Error;

    fn try_from(wire: AllocationWire) -> Result<Self> {
        let len = wire.bundles.keys().max().map_or(1, |k| k + 1);
        let mut bundles = vec![Vec::new(); len];
        for (key, items) in wire.bundles {
            let mut zero_based = Vec::with_capacity(items.len());
            for id in items {
                if id == 0 {
                    return Err(Error::InvalidInput("item ids are 1-based; found 0".into()));
                }
                zero_based.push(id - 1);
            }
            bundles[key] = zero_based;
        }
        Ok(Allocation { bundles })
    }
}

impl From<Allocation> for AllocationWire {
    fn from(allocation: Allocation) -> Self {
        let bundles = allocation
            .bundles
            .into_iter()
            .enumerate()
            .map(|(k, items)| (k, items.into_iter().map(|j| j + 1).collect()))
            .collect();
        AllocationWire { bundles }
    }
}

impl Allocation {
    /// Everything in the charity bundle.
    pub fn all_to_charity(instance: &Instance) -> Self {
        let mut bundles = vec![Vec::new(); instance.agents() + 1];
        bundles[CHARITY] = (0..instance.item_count()).collect();
        Self { bundles }
    }

    /// Builds an allocation from agent bundles; the charity receives every
    /// item of `instance` not mentioned in `agent_bundles`.
    pub fn from_agent_bundles(instance: &Instance, agent_bundles: Vec<Vec<usize>>) -> Self {
        let mut taken = vec![false; instance.item_count()];
        for &j in agent_bundles.iter().flatten() {
            if let Some(t) = taken.get_mut(j) {
                *t = true;
            }
        }
        let charity = (0..instance.item_count()).filter(|&j| !taken[j]).collect();
        let mut bundles = Vec::with_capacity(agent_bundles.len() + 1);
        bundles.push(charity);
        bundles.extend(agent_bundles);
        Self::from_bundles(bundles)
    }

    /// Raw constructor: `bundles[0]` is the charity. Bundles are sorted but
    /// otherwise unchecked; see [`validate_allocation`].
    pub fn from_bundles(mut bundles: Vec<Vec<usize>>) -> Self {
        if bundles.is_empty() {
            bundles.push(Vec::new());
        }
        for b in &mut bundles {
            b.sort_unstable();
        }
        Self { bundles }
    }

    /// Number of agents, not counting the charity.
    pub fn agents(&self) -> usize {
        self.bundles.len() - 1
    }

    pub fn charity(&self) -> &[usize] {
        &self.bundles[CHARITY]
    }

    /// Bundle of agent `agent` (0-based).
    pub fn agent_bundle(&self, agent: usize) -> &[usize] {
        &self.bundles[agent + 1]
    }

    /// All bundles, charity first.
    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    /// Pads with empty agent bundles up to `agents` agents.
    pub fn pad_agents(mut self, agents: usize) -> Self {
        while self.bundles.len() < agents + 1 {
            self.bundles.push(Vec::new());
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("allocation serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    AgentCount { expected: usize, found: usize },
    UnknownItem { item: usize, holder: usize },
    DuplicatedItem { item: usize, holders: Vec<usize> },
    MissingItem { item: usize },
    BudgetExceeded { agent: usize, overshoot: Rational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AgentCount { expected, found } => {
                write!(
                    f,
                    "allocation has {found} agent bundles, instance has {expected} agents"
                )
            }
            Violation::UnknownItem { item, holder } => {
                write!(f, "bundle {holder} holds item {} which does not exist", item + 1)
            }
            Violation::DuplicatedItem { item, holders } => {
                write!(f, "item {} appears in bundles {holders:?}", item + 1)
            }
            Violation::MissingItem { item } => write!(f, "item {} is in no bundle", item + 1),
            Violation::BudgetExceeded { agent, overshoot } => write!(
                f,
                "agent {} exceeds its budget by {}",
                agent + 1,
                rational::Display(overshoot)
            ),
        }
    }
}

/// Checks that `allocation` partitions the items and respects every budget.
/// All violations are reported, not just the first one.
pub fn validate_allocation(instance: &Instance, allocation: &Allocation) -> Result<(), Vec<Violation>> {
    let mut violations = Vec::new();
    if allocation.agents() != instance.agents() {
        violations.push(Violation::AgentCount {
            expected: instance.agents(),
            found: allocation.agents(),
        });
    }

    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); instance.item_count()];
    for (k, bundle) in allocation.bundles.iter().enumerate() {
        for &j in bundle {
            match holders.get_mut(j) {
                Some(h) => h.push(k),
                None => violations.push(Violation::UnknownItem { item: j, holder: k }),
            }
        }
    }
    for (j, h) in holders.into_iter().enumerate() {
        match h.len() {
            0 => violations.push(Violation::MissingItem { item: j }),
            1 => {}
            _ => violations.push(Violation::DuplicatedItem { item: j, holders: h }),
        }
    }

    for agent in 0..allocation.agents().min(instance.agents()) {
        let size: Rational = allocation
            .agent_bundle(agent)
            .iter()
            .filter_map(|&j| instance.items.get(j))
            .map(|it| &it.size)
            .sum();
        let budget = instance.budget(agent);
        if &size > budget {
            violations.push(Violation::BudgetExceeded {
                agent,
                overshoot: size - budget,
            });
        }
    }

    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// [`validate_allocation`] folded into an [`Error`].
pub fn ensure_valid(instance: &Instance, allocation: &Allocation) -> Result<()> {
    validate_allocation(instance, allocation).map_err(|vs| {
        let text = vs.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
        Error::InvalidInput(format!("invalid allocation: {text}"))
    })
}
