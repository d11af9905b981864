//! Seeded random instances for tests and experiments.
//!
//! A generator is a `ChaCha8Rng` seeded with a `u64`, so the same seed and
//! parameters give the same instance on every platform. Applications pick a
//! member uniformly and then each argument uniformly from `0..n` (repeats
//! allowed). Weights are uniform in `1..=max_weight` under `N` and in
//! `-max_weight..=max_weight` without zero under `Z`.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::formula::{Formula, WeightRange};
use crate::language::ConstraintLanguage;
use crate::oracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceSpec {
    pub nvars: usize,
    pub applications: usize,
    pub weight_range: WeightRange,
    pub max_weight: u64,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random formula with threshold 0.
pub fn random_formula(rng: &mut impl Rng, language: &ConstraintLanguage, spec: InstanceSpec) -> Result<Formula> {
    let mut phi = Formula::new(spec.nvars, spec.weight_range);
    if spec.nvars == 0 || language.is_empty() {
        return Ok(phi);
    }
    let max = spec.max_weight.max(1) as i64;
    for _ in 0..spec.applications {
        let c = language.constraints().choose(rng).unwrap().clone();
        let tuple = (0..c.arity()).map(|_| rng.gen_range(0..spec.nvars)).collect();
        let w = match spec.weight_range {
            WeightRange::N => rng.gen_range(1..=max),
            WeightRange::Z => {
                let w = rng.gen_range(1..=max);
                if rng.gen_bool(0.5) {
                    -w
                } else {
                    w
                }
            }
        };
        phi.add(c, tuple, w)?;
    }
    Ok(phi)
}

/// Picks a threshold that makes the decision questions non-trivial: the
/// optimum, one above it, one below it, an attained value or an
/// unattained value just above one.
pub fn tight_threshold(rng: &mut impl Rng, phi: &Formula, cap: usize) -> Result<BigInt> {
    let values = oracle::value_table(phi, cap)?;
    let opt = values.iter().max().cloned().unwrap_or_default();
    Ok(match rng.gen_range(0..5) {
        0 => opt,
        1 => opt + 1,
        2 => opt - 1,
        3 => values[rng.gen_range(0..values.len())].clone(),
        _ => values[rng.gen_range(0..values.len())].clone() + 1,
    })
}

/// A random formula whose threshold comes from [`tight_threshold`].
pub fn random_instance(rng: &mut impl Rng, language: &ConstraintLanguage, spec: InstanceSpec, cap: usize) -> Result<Formula> {
    let mut phi = random_formula(rng, language, spec)?;
    phi.threshold = tight_threshold(rng, &phi, cap)?;
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn spec(range: WeightRange) -> InstanceSpec {
        InstanceSpec {
            nvars: 5,
            applications: 12,
            weight_range: range,
            max_weight: 9,
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let l = catalog::language(&["NAE3", "XOR"]).unwrap();
        let a = random_instance(&mut rng(7), &l, spec(WeightRange::Z), 24).unwrap();
        let b = random_instance(&mut rng(7), &l, spec(WeightRange::Z), 24).unwrap();
        assert_eq!(a, b);
        let c = random_instance(&mut rng(8), &l, spec(WeightRange::Z), 24).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn weights_respect_range() {
        let l = catalog::language(&["OR2"]).unwrap();
        let phi = random_formula(&mut rng(1), &l, spec(WeightRange::N)).unwrap();
        assert!(phi.applications().all(|a| a.weight > BigInt::from(0)));
        assert!(phi.applications().all(|a| a.weight <= BigInt::from(9 * 12)));
    }
}
