//! Exact EF / EF1 approximation ratios by exhaustive subset enumeration.
//!
//! For an envious agent `i` and an envied bundle `X_j` (the charity included)
//! the oracle computes the largest value agent `i` could be deprived of:
//! the best budget-feasible `T ⊆ X_j`, minus its most valuable item under EF1.
//! Items with identical `(value, size)` are interchangeable for this maximum,
//! so the enumeration runs over how many copies of each distinct item enter
//! `T` rather than over raw subsets. It is still exhaustive.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{bundle_size, bundle_value, ensure_valid, Allocation, Instance};
use crate::rational::{self, Rational};

/// Largest bundle (in items) the oracle agrees to enumerate by default.
pub const DEFAULT_ENUMERATION_BOUND: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvyMode {
    Ef,
    Ef1,
}

/// The maximizing sub-bundle found by [`EnvyOracle::max_deprived_value`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deprivation {
    pub value: Rational,
    /// Sorted item indices of `T`.
    pub subset: Vec<usize>,
    /// Removed item under EF1; `None` under EF or when `T` is empty.
    pub removed: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Envious agent (0-based).
    pub envious: usize,
    /// Envied bundle index: 0 for the charity, `j + 1` for agent `j`.
    pub envied: usize,
    pub subset: Vec<usize>,
    pub removed: Option<usize>,
    pub deprived_value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvyReport {
    pub mode: EnvyMode,
    /// Worst ratio over all pairs, in `[0, 1]`.
    pub ratio: Rational,
    /// Every pair attaining `ratio`; empty when `ratio == 1`.
    pub witnesses: Vec<Witness>,
}

impl EnvyReport {
    pub fn is_exact(&self) -> bool {
        self.ratio.is_one()
    }

    /// JSON with 1-based item and agent ids and exact rational strings.
    pub fn to_json(&self) -> serde_json::Value {
        let witnesses: Vec<_> = self
            .witnesses
            .iter()
            .map(|w| {
                serde_json::json!({
                    "envious": w.envious + 1,
                    "envied": w.envied,
                    "subset": w.subset.iter().map(|j| j + 1).collect::<Vec<_>>(),
                    "removed": w.removed.map(|j| j + 1),
                    "deprived_value": rational::format_rational(&w.deprived_value),
                })
            })
            .collect();
        serde_json::json!({
            "notion": self.mode,
            "ratio": rational::format_rational(&self.ratio),
            "witnesses": witnesses,
        })
    }
}

struct Group<'a> {
    value: &'a Rational,
    size: &'a Rational,
    members: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct EnvyOracle {
    bound: usize,
}

impl Default for EnvyOracle {
    fn default() -> Self {
        Self {
            bound: DEFAULT_ENUMERATION_BOUND,
        }
    }
}

impl EnvyOracle {
    pub fn with_bound(bound: usize) -> Self {
        Self { bound }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn max_deprived_value(
        &self,
        instance: &Instance,
        source: &[usize],
        budget: &Rational,
        mode: EnvyMode,
    ) -> Result<Deprivation> {
        if source.len() > self.bound {
            return Err(Error::EnumerationBound {
                size: source.len(),
                bound: self.bound,
            });
        }
        if let Some(&bad) = source.iter().find(|&&j| j >= instance.item_count()) {
            return Err(Error::InvalidInput(format!("item {} does not exist", bad + 1)));
        }

        let mut keyed: BTreeMap<(&Rational, &Rational), Vec<usize>> = BTreeMap::new();
        for &j in source {
            let it = instance.item(j);
            keyed.entry((&it.value, &it.size)).or_default().push(j);
        }
        let mut groups: Vec<Group> = keyed
            .into_iter()
            .map(|((value, size), mut members)| {
                members.sort_unstable();
                members.dedup();
                Group { value, size, members }
            })
            .collect();
        groups.sort_by(|a, b| b.value.cmp(a.value).then(a.members[0].cmp(&b.members[0])));

        let mut search = Search {
            groups: &groups,
            budget,
            mode,
            counts: vec![0; groups.len()],
            best: Rational::zero(),
            best_counts: vec![0; groups.len()],
        };
        search.descend(0, &Rational::zero(), &Rational::zero(), None);

        let mut subset: Vec<usize> = groups
            .iter()
            .zip(&search.best_counts)
            .flat_map(|(g, &c)| g.members[..c].iter().copied())
            .collect();
        subset.sort_unstable();
        let removed = match mode {
            EnvyMode::Ef => None,
            EnvyMode::Ef1 => most_valuable(instance, &subset),
        };
        Ok(Deprivation {
            value: search.best,
            subset,
            removed,
        })
    }

    pub fn allocation_ratio(&self, instance: &Instance, allocation: &Allocation, mode: EnvyMode) -> Result<EnvyReport> {
        ensure_valid(instance, allocation)?;
        if let Some(b) = allocation.bundles().iter().find(|b| b.len() > self.bound) {
            return Err(Error::EnumerationBound {
                size: b.len(),
                bound: self.bound,
            });
        }

        let mut ratio = Rational::one();
        let mut witnesses = Vec::new();
        for envious in 0..instance.agents() {
            let own = bundle_value(instance, allocation.agent_bundle(envious));
            let budget = instance.budget(envious);
            for (envied, bundle) in allocation.bundles().iter().enumerate() {
                if envied == envious + 1 {
                    continue;
                }
                let d = self.max_deprived_value(instance, bundle, budget, mode)?;
                if d.value.is_zero() || own >= d.value {
                    continue;
                }
                let r = &own / &d.value;
                if r < ratio {
                    ratio = r;
                    witnesses.clear();
                } else if r > ratio {
                    continue;
                }
                witnesses.push(Witness {
                    envious,
                    envied,
                    subset: d.subset,
                    removed: d.removed,
                    deprived_value: d.value,
                });
            }
        }
        Ok(EnvyReport { mode, ratio, witnesses })
    }
}

struct Search<'g, 'a> {
    groups: &'g [Group<'a>],
    budget: &'g Rational,
    mode: EnvyMode,
    counts: Vec<usize>,
    best: Rational,
    best_counts: Vec<usize>,
}

impl Search<'_, '_> {
    /// Visits every budget-feasible count vector whose nonzero entries all lie
    /// at or after group `from`, extending the current one.
    fn descend(&mut self, from: usize, size: &Rational, value: &Rational, top: Option<&Rational>) {
        let deprived = match (self.mode, top) {
            (EnvyMode::Ef, _) => value.clone(),
            (EnvyMode::Ef1, Some(top)) => value - top,
            (EnvyMode::Ef1, None) => Rational::zero(),
        };
        if deprived > self.best {
            self.best = deprived;
            self.best_counts.clone_from(&self.counts);
        }

        let groups = self.groups;
        for (g, group) in groups.iter().enumerate().skip(from) {
            let mut s = size.clone();
            let mut v = value.clone();
            for c in 1..=group.members.len() {
                s += group.size;
                if &s > self.budget {
                    break;
                }
                v += group.value;
                self.counts[g] = c;
                // Groups are sorted by value, so the first one entered holds
                // the most valuable item of T.
                self.descend(g + 1, &s, &v, Some(top.unwrap_or(group.value)));
            }
            self.counts[g] = 0;
        }
    }
}

/// Highest-value item of `items`, ties to the lowest index.
fn most_valuable(instance: &Instance, items: &[usize]) -> Option<usize> {
    items
        .iter()
        .copied()
        .max_by(|&a, &b| instance.item(a).value.cmp(&instance.item(b).value).then(b.cmp(&a)))
}

pub fn max_deprived_value(
    instance: &Instance,
    source: &[usize],
    budget: &Rational,
    mode: EnvyMode,
) -> Result<Deprivation> {
    EnvyOracle::default().max_deprived_value(instance, source, budget, mode)
}

pub fn allocation_ratio(instance: &Instance, allocation: &Allocation, mode: EnvyMode) -> Result<EnvyReport> {
    EnvyOracle::default().allocation_ratio(instance, allocation, mode)
}

/// Checks one instance of the density-domination property behind charity envy:
/// with `s(X) ≤ B` and `s(Y) ≤ B`, if every `g ∈ Y` satisfies
/// `s(W_g + g) > B` where `W_g` holds the items of `X` at least as dense as
/// `g`, then some `j ∈ Y` has `v(Y - j) ≤ v(X)`. Returns `true` when the
/// hypothesis fails. An empty `Y` imposes nothing.
pub fn density_domination_holds(instance: &Instance, x: &[usize], y: &[usize], budget: &Rational) -> Result<bool> {
    let bound = DEFAULT_ENUMERATION_BOUND;
    for set in [x, y] {
        if set.len() > bound {
            return Err(Error::EnumerationBound { size: set.len(), bound });
        }
        if set.iter().any(|&j| j >= instance.item_count()) {
            return Err(Error::InvalidInput("item index out of range".into()));
        }
        if &bundle_size(instance, set) > budget {
            return Err(Error::InvalidInput("set exceeds the budget".into()));
        }
    }
    if y.is_empty() {
        return Ok(true);
    }

    let hypothesis = y.iter().all(|&g| {
        let rho_g = instance.item(g).density();
        let mut size = Rational::zero();
        let mut has_g = false;
        for &j in x {
            if instance.item(j).density() >= rho_g {
                size += &instance.item(j).size;
                has_g |= j == g;
            }
        }
        if !has_g {
            size += &instance.item(g).size;
        }
        &size > budget
    });
    if !hypothesis {
        return Ok(true);
    }

    let top = most_valuable(instance, y).expect("y is nonempty");
    let rest = bundle_value(instance, y) - &instance.item(top).value;
    Ok(rest <= bundle_value(instance, x))
}
