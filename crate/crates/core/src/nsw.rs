//! Nash social welfare: evaluation and exhaustive maximization.
//!
//! Allocations are compared by `(number of agents with positive value,
//! product of those values)` lexicographically, which orders allocations
//! whose plain product is zero by how many agents they serve.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{bundle_value, ensure_valid, Allocation, Instance};
use crate::rational::{self, Rational};

pub const DEFAULT_SEARCH_LIMIT: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NswValue {
    pub positive_count: usize,
    /// Product of the positive bundle values; 1 when there are none.
    pub product: Rational,
}

impl NswValue {
    pub fn from_values<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Self {
        let mut positive_count = 0;
        let mut product = Rational::one();
        for v in values {
            if v > &Rational::zero() {
                positive_count += 1;
                product *= v;
            }
        }
        Self {
            positive_count,
            product,
        }
    }

    /// The plain product over `agents` agents.
    pub fn nsw(&self, agents: usize) -> Rational {
        if self.positive_count < agents {
            Rational::zero()
        } else {
            self.product.clone()
        }
    }
}

impl Ord for NswValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.positive_count
            .cmp(&other.positive_count)
            .then_with(|| self.product.cmp(&other.product))
    }
}

impl PartialOrd for NswValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn nsw_value(instance: &Instance, allocation: &Allocation) -> Result<NswValue> {
    ensure_valid(instance, allocation)?;
    let values: Vec<Rational> = (0..instance.agents())
        .map(|a| bundle_value(instance, allocation.agent_bundle(a)))
        .collect();
    Ok(NswValue::from_values(&values))
}

/// `assignment[j]` is 0 for the charity or `i + 1` for agent `i`.
fn allocation_from_assignment(instance: &Instance, assignment: &[usize]) -> Allocation {
    let mut bundles = vec![Vec::new(); instance.agents() + 1];
    for (j, &holder) in assignment.iter().enumerate() {
        bundles[holder].push(j);
    }
    Allocation::from_bundles(bundles)
}

struct Best {
    value: NswValue,
    assignment: Vec<usize>,
}

struct Enumeration<'a> {
    instance: &'a Instance,
    assignment: Vec<usize>,
    sizes: Vec<Rational>,
    values: Vec<Rational>,
    best: Option<Best>,
}

impl Enumeration<'_> {
    fn new(instance: &Instance) -> Enumeration<'_> {
        let n = instance.agents();
        Enumeration {
            instance,
            assignment: Vec::with_capacity(instance.item_count()),
            sizes: vec![Rational::zero(); n],
            values: vec![Rational::zero(); n],
            best: None,
        }
    }

    /// Places `item` with `holder` if the budget allows; returns whether it did.
    fn place(&mut self, item: usize, holder: usize) -> bool {
        if holder > 0 {
            let it = self.instance.item(item);
            let a = holder - 1;
            let size = &self.sizes[a] + &it.size;
            if &size > self.instance.budget(a) {
                return false;
            }
            self.sizes[a] = size;
            self.values[a] += &it.value;
        }
        self.assignment.push(holder);
        true
    }

    fn unplace(&mut self, item: usize) {
        let holder = self.assignment.pop().expect("placed before");
        if holder > 0 {
            let it = self.instance.item(item);
            self.sizes[holder - 1] -= &it.size;
            self.values[holder - 1] -= &it.value;
        }
    }

    /// Depth-first over items in index order, holders in ascending order, so
    /// the first optimum met is the lexicographically smallest assignment.
    fn descend(&mut self, item: usize) {
        if item == self.instance.item_count() {
            let value = NswValue::from_values(&self.values);
            if self.best.as_ref().is_none_or(|b| value > b.value) {
                self.best = Some(Best {
                    value,
                    assignment: self.assignment.clone(),
                });
            }
            return;
        }
        for holder in 0..=self.instance.agents() {
            if self.place(item, holder) {
                self.descend(item + 1);
                self.unplace(item);
            }
        }
    }
}

/// Exhaustively maximizes `(positive count, product)` over all budget-feasible
/// allocations. Refuses instances with more than `limit` raw assignments
/// `(n + 1)^m`.
pub fn solve_nsw_exact(instance: &Instance, limit: u64) -> Result<(Allocation, NswValue)> {
    let n = instance.agents();
    let m = instance.item_count();
    let required = num_traits::pow(BigUint::from(n + 1), m);
    if required > BigUint::from(limit) {
        return Err(Error::SearchTooLarge {
            required: required.to_string(),
            limit,
        });
    }
    if m == 0 {
        let alloc = Allocation::all_to_charity(instance);
        let value = NswValue::from_values(&vec![Rational::zero(); n]);
        return Ok((alloc, value));
    }

    // Split on the first item's holder; branches are reduced in holder order.
    let branches: Vec<Option<Best>> = (0..=n)
        .into_par_iter()
        .map(|holder| {
            let mut e = Enumeration::new(instance);
            if !e.place(0, holder) {
                return None;
            }
            e.descend(1);
            e.best
        })
        .collect();
    let best = branches
        .into_iter()
        .flatten()
        .reduce(|acc, b| if b.value > acc.value { b } else { acc })
        .expect("assigning everything to the charity is always feasible");
    Ok((allocation_from_assignment(instance, &best.assignment), best.value))
}

impl std::fmt::Display for NswValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} positive, product {}",
            self.positive_count,
            rational::Display(&self.product)
        )
    }
}
