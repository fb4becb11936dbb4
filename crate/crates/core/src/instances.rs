//! Fixture instances and a seeded random instance generator.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Instance, Item};
use crate::rational::{int, rat, Rational};

/// Grid resolution for random rationals: every draw is `lo + (hi - lo) * k / GRID`.
pub const GRID: i64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureName {
    /// Two unit budgets; one large item `(1, 1)` and 99 copies of `(1/2, 1/10)`.
    Table1,
    /// Two unit budgets; items `(1, ε)`, `(2ε, 2ε)`, `(1-ε, 1-ε)`.
    Table2,
    /// Budgets `(2-ε, 100)`; six items listed by descending density.
    Table3,
}

impl FromStr for FixtureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table1" => Ok(Self::Table1),
            "table2" => Ok(Self::Table2),
            "table3" => Ok(Self::Table3),
            other => Err(Error::InvalidInput(format!(
                "unknown fixture {other:?}; expected table1, table2 or table3"
            ))),
        }
    }
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Table1 => "table1",
            Self::Table2 => "table2",
            Self::Table3 => "table3",
        })
    }
}

/// Builds a named fixture. `epsilon` must lie in `(0, 1/10]` for `table2`
/// and `table3`; `table1` ignores it.
pub fn fixture(name: FixtureName, epsilon: &Rational) -> Result<Instance> {
    let one = Rational::one();
    if name != FixtureName::Table1 && (!epsilon.is_positive() || epsilon > &rat(1, 10)) {
        return Err(Error::InvalidInput(format!(
            "epsilon must be in (0, 1/10] for {name}, got {}",
            crate::rational::Display(epsilon)
        )));
    }
    let eps = epsilon.clone();
    match name {
        FixtureName::Table1 => Instance::from_pairs(
            vec![one.clone(), one.clone()],
            std::iter::once((one.clone(), one))
                .chain(std::iter::repeat_n((rat(1, 2), rat(1, 10)), 99))
                .collect(),
        ),
        FixtureName::Table2 => Instance::from_pairs(
            vec![one.clone(), one.clone()],
            vec![
                (one.clone(), eps.clone()),
                (&eps * int(2), &eps * int(2)),
                (&one - &eps, &one - &eps),
            ],
        ),
        FixtureName::Table3 => {
            let small = &one - int(3) * &eps;
            Instance::from_pairs(
                vec![int(2) - &eps, int(100)],
                vec![
                    (eps.clone(), &eps * &eps * &eps),
                    (one.clone(), eps.clone()),
                    (one.clone(), one.clone()),
                    (int(2) - &eps, int(2)),
                    (small.clone(), &one - &eps),
                    (small, &one - &eps),
                ],
            )
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub value_range: (Rational, Rational),
    pub size_range: (Rational, Rational),
    pub budget_range: (Rational, Rational),
    /// Caps item sizes at `min budget / kappa_floor`.
    pub kappa_floor: Option<Rational>,
    /// Draw one budget and give it to every agent.
    pub uniform_budgets: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            n: 2,
            m: 8,
            seed: 0,
            value_range: (rat(1, 10), int(10)),
            size_range: (rat(1, 10), int(1)),
            budget_range: (rat(1, 2), int(3)),
            kappa_floor: None,
            uniform_budgets: false,
        }
    }
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        for (name, (lo, hi)) in [
            ("value", &self.value_range),
            ("size", &self.size_range),
            ("budget", &self.budget_range),
        ] {
            if lo > hi {
                return Err(Error::InvalidInput(format!("{name} range is empty")));
            }
            if !lo.is_positive() {
                return Err(Error::InvalidInput(format!("{name} range must be positive")));
            }
        }
        if let Some(k) = &self.kappa_floor {
            if !k.is_positive() {
                return Err(Error::InvalidInput("kappa floor must be positive".into()));
            }
        }
        Ok(())
    }
}

fn draw(rng: &mut ChaCha8Rng, lo: &Rational, hi: &Rational) -> Rational {
    let k = rng.gen_range(0..=GRID);
    lo + (hi - lo) * rat(k, GRID)
}

/// Deterministic in `params.seed`.
pub fn gen_random(params: &GenParams) -> Result<Instance> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let (blo, bhi) = &params.budget_range;
    let budgets: Vec<Rational> = if params.uniform_budgets {
        vec![draw(&mut rng, blo, bhi); params.n]
    } else {
        (0..params.n).map(|_| draw(&mut rng, blo, bhi)).collect()
    };

    let (slo, shi) = &params.size_range;
    let (size_lo, size_hi) = match &params.kappa_floor {
        Some(k) => {
            let cap = budgets.iter().min().expect("n >= 1") / k;
            let hi = shi.clone().min(cap);
            (slo.clone().min(hi.clone()), hi)
        }
        None => (slo.clone(), shi.clone()),
    };
    debug_assert!(!size_lo.is_zero());

    let (vlo, vhi) = &params.value_range;
    let items = (0..params.m)
        .map(|_| {
            let value = draw(&mut rng, vlo, vhi);
            let size = draw(&mut rng, &size_lo, &size_hi);
            Item::new(value, size)
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(budgets, items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{density, kappa};

    #[test]
    fn table1_shape() {
        let inst = fixture(FixtureName::Table1, &rat(1, 2)).unwrap();
        assert_eq!(inst.item_count(), 100);
        let small: Rational = inst.items()[1..].iter().map(|it| &it.value).sum();
        assert_eq!(small, rat(99, 2));
    }

    #[test]
    fn table2_densities() {
        let inst = fixture(FixtureName::Table2, &rat(1, 10)).unwrap();
        let d: Vec<Rational> = inst.items().iter().map(density).collect();
        assert_eq!(d, vec![int(10), int(1), int(1)]);
    }

    #[test]
    fn table3_densities_descend() {
        let inst = fixture(FixtureName::Table3, &rat(1, 100)).unwrap();
        let d: Vec<Rational> = inst.items().iter().map(density).collect();
        assert_eq!(
            d,
            vec![int(10_000), int(100), int(1), rat(199, 200), rat(97, 99), rat(97, 99)]
        );
        for eps in [rat(1, 10), rat(1, 20), rat(1, 1000), rat(1, 100_000)] {
            let inst = fixture(FixtureName::Table3, &eps).unwrap();
            let d: Vec<Rational> = inst.items().iter().map(density).collect();
            assert!(d.windows(2).take(4).all(|w| w[0] > w[1]), "eps = {eps}");
            assert_eq!(d[4], d[5]);
        }
    }

    #[test]
    fn epsilon_out_of_range_is_rejected() {
        assert!(fixture(FixtureName::Table2, &int(0)).is_err());
        assert!(fixture(FixtureName::Table3, &rat(1, 5)).is_err());
        assert!(fixture(FixtureName::Table1, &int(7)).is_ok());
    }

    #[test]
    fn generator_is_deterministic() {
        let p = GenParams {
            n: 3,
            m: 10,
            seed: 42,
            ..GenParams::default()
        };
        assert_eq!(gen_random(&p).unwrap().to_json(), gen_random(&p).unwrap().to_json());
        let q = GenParams { seed: 43, ..p.clone() };
        assert_ne!(gen_random(&p).unwrap(), gen_random(&q).unwrap());
    }

    #[test]
    fn empty_item_list() {
        let inst = gen_random(&GenParams {
            m: 0,
            ..GenParams::default()
        })
        .unwrap();
        assert_eq!(inst.item_count(), 0);
    }

    #[test]
    fn kappa_floor_is_respected() {
        for seed in 0..50 {
            let p = GenParams {
                n: 3,
                m: 12,
                seed,
                budget_range: (int(1), int(1)),
                kappa_floor: Some(int(10)),
                ..GenParams::default()
            };
            let inst = gen_random(&p).unwrap();
            assert!(inst.items().iter().all(|it| it.size <= rat(1, 10)));
            assert!(kappa(&inst).unwrap() >= int(10));
        }
    }

    #[test]
    fn uniform_budgets_are_equal() {
        let inst = gen_random(&GenParams {
            n: 4,
            uniform_budgets: true,
            seed: 9,
            ..GenParams::default()
        })
        .unwrap();
        assert!(inst.budgets().windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        let p = GenParams {
            value_range: (int(2), int(1)),
            ..GenParams::default()
        };
        assert!(gen_random(&p).is_err());
        let p = GenParams {
            size_range: (int(0), int(1)),
            ..GenParams::default()
        };
        assert!(gen_random(&p).is_err());
        let p = GenParams {
            n: 0,
            ..GenParams::default()
        };
        assert!(gen_random(&p).is_err());
    }
}
