//! Test-only oracles that share no code with the library's enumeration.
#![allow(dead_code)]

use fairknap::envy::EnvyMode;
use fairknap::instances::{gen_random, GenParams};
use fairknap::rational::{int, rat};
use fairknap::{Allocation, Instance, Rational};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deprived value by plain bitmask enumeration over raw subsets.
pub fn naive_deprived(instance: &Instance, source: &[usize], budget: &Rational, mode: EnvyMode) -> Rational {
    assert!(source.len() <= 16, "naive oracle is for small bundles only");
    let mut best = Rational::zero();
    for mask in 0u32..(1 << source.len()) {
        let members: Vec<usize> = (0..source.len())
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| source[b])
            .collect();
        let size: Rational = members.iter().map(|&j| instance.item(j).size.clone()).sum();
        if &size > budget {
            continue;
        }
        let value: Rational = members.iter().map(|&j| instance.item(j).value.clone()).sum();
        let w = match mode {
            EnvyMode::Ef => value,
            EnvyMode::Ef1 => match members.iter().map(|&j| instance.item(j).value.clone()).max() {
                Some(top) => value - top,
                None => Rational::zero(),
            },
        };
        if w > best {
            best = w;
        }
    }
    best
}

/// EF1 deprived value via anchors: for each candidate removed item `a`,
/// the best knapsack over the other items worth at most `v_a`.
pub fn anchored_deprived(instance: &Instance, source: &[usize], budget: &Rational) -> Rational {
    let mut best = Rational::zero();
    for &a in source {
        let anchor = instance.item(a);
        if &anchor.size > budget {
            continue;
        }
        let room = budget - &anchor.size;
        let others: Vec<usize> = source
            .iter()
            .copied()
            .filter(|&j| j != a && instance.item(j).value <= anchor.value)
            .collect();
        for mask in 0u32..(1 << others.len()) {
            let members = (0..others.len()).filter(|b| mask & (1 << b) != 0).map(|b| others[b]);
            let (mut s, mut v) = (Rational::zero(), Rational::zero());
            for j in members {
                s += &instance.item(j).size;
                v += &instance.item(j).value;
            }
            if s <= room && v > best {
                best = v;
            }
        }
    }
    best
}

/// Allocation ratio recomputed from the definition with [`naive_deprived`].
pub fn naive_ratio(instance: &Instance, allocation: &Allocation, mode: EnvyMode) -> Rational {
    let mut ratio = Rational::one();
    for i in 0..instance.agents() {
        let own: Rational = allocation
            .agent_bundle(i)
            .iter()
            .map(|&j| instance.item(j).value.clone())
            .sum();
        for (k, bundle) in allocation.bundles().iter().enumerate() {
            if k == i + 1 {
                continue;
            }
            let w = naive_deprived(instance, bundle, instance.budget(i), mode);
            if !w.is_zero() {
                let r = (&own / &w).min(Rational::one());
                ratio = ratio.min(r);
            }
        }
    }
    ratio
}

pub fn bundle_value(instance: &Instance, bundle: &[usize]) -> Rational {
    bundle.iter().map(|&j| instance.item(j).value.clone()).sum()
}

pub fn bundle_size(instance: &Instance, bundle: &[usize]) -> Rational {
    bundle.iter().map(|&j| instance.item(j).size.clone()).sum()
}

/// Random instance with `n` in `n_range` and `m` in `m_range`, seeded.
pub fn random_instance(seed: u64, n_range: (usize, usize), m_range: (usize, usize), uniform: bool) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5_5A5A);
    let n = rng.gen_range(n_range.0..=n_range.1);
    let m = rng.gen_range(m_range.0..=m_range.1);
    // Alternate between two shapes: many small items and a few chunky ones.
    let (sizes, budgets) = if rng.gen_bool(0.5) {
        ((rat(1, 10), int(1)), (rat(1, 2), int(3)))
    } else {
        ((rat(1, 4), int(2)), (int(1), int(4)))
    };
    gen_random(&GenParams {
        n,
        m,
        seed,
        value_range: (rat(1, 10), int(10)),
        size_range: sizes,
        budget_range: budgets,
        kappa_floor: None,
        uniform_budgets: uniform,
    })
    .unwrap()
}

pub fn from_one_based(items: &[usize]) -> Vec<usize> {
    items.iter().map(|j| j - 1).collect()
}
