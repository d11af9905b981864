//! Weighted constraint systems.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::language::ConstraintLanguage;
use crate::poly::{characteristic_polynomial, MultilinearPolynomial};

/// A constraint applied to a tuple of 0-based variable indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Application {
    pub constraint: Arc<Constraint>,
    pub tuple: Vec<usize>,
}

impl Application {
    pub fn new(constraint: Arc<Constraint>, tuple: Vec<usize>) -> Self {
        Application { constraint, tuple }
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        let row = self.tuple.iter().fold(0usize, |acc, &j| (acc << 1) | x[j] as usize);
        self.constraint.eval_row(row)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedApplication {
    pub constraint: Arc<Constraint>,
    pub tuple: Vec<usize>,
    pub weight: BigInt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightRange {
    /// Integer weights.
    Z,
    /// Non-negative integer weights.
    N,
}

impl fmt::Display for WeightRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRange::Z => write!(f, "Z"),
            WeightRange::N => write!(f, "N"),
        }
    }
}

/// Applications keyed by `(constraint name, tuple)`; adding an application
/// with an existing key adds its weight. Zero weights are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    nvars: usize,
    entries: BTreeMap<(String, Vec<usize>), (Arc<Constraint>, BigInt)>,
    weight_range: WeightRange,
    pub threshold: BigInt,
    pub declared_weight_exponent: Option<u32>,
}

impl Formula {
    pub fn new(nvars: usize, weight_range: WeightRange) -> Self {
        Formula {
            nvars,
            entries: BTreeMap::new(),
            weight_range,
            threshold: BigInt::zero(),
            declared_weight_exponent: None,
        }
    }

    pub fn with_threshold(mut self, t: impl Into<BigInt>) -> Self {
        self.threshold = t.into();
        self
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Grows the variable set; never shrinks it.
    pub fn extend_vars(&mut self, nvars: usize) {
        self.nvars = self.nvars.max(nvars);
    }

    pub fn weight_range(&self) -> WeightRange {
        self.weight_range
    }

    /// Changes the range tag, checking the weights against `N`.
    pub fn set_weight_range(&mut self, range: WeightRange) -> Result<()> {
        if range == WeightRange::N {
            if let Some(a) = self.applications().find(|a| a.weight.is_negative()) {
                return Err(Error::WeightRange(format!(
                    "weight {} on {} under N",
                    a.weight,
                    a.constraint.name()
                )));
            }
        }
        self.weight_range = range;
        Ok(())
    }

    pub fn add(&mut self, constraint: Arc<Constraint>, tuple: Vec<usize>, weight: impl Into<BigInt>) -> Result<()> {
        let weight = weight.into();
        if tuple.len() != constraint.arity() {
            return Err(Error::Format(format!(
                "{} has arity {} but is applied to {} variables",
                constraint.name(),
                constraint.arity(),
                tuple.len()
            )));
        }
        if let Some(&j) = tuple.iter().find(|&&j| j >= self.nvars) {
            return Err(Error::IndexOutOfRange {
                index: j + 1,
                nvars: self.nvars,
            });
        }
        if let Some(other) = self.constraint_named(constraint.name()) {
            if !other.same_function(&constraint) {
                return Err(Error::Format(format!(
                    "two different constraints share the name `{}`",
                    constraint.name()
                )));
            }
        }
        match self.entries.entry((constraint.name().to_string(), tuple)) {
            Entry::Vacant(e) => {
                e.insert((constraint, weight));
            }
            Entry::Occupied(mut e) => e.get_mut().1 += weight,
        }
        if self.weight_range == WeightRange::N {
            if let Some(a) = self.applications().find(|a| a.weight.is_negative()) {
                let msg = format!("weight {} on {} under N", a.weight, a.constraint.name());
                return Err(Error::WeightRange(msg));
            }
        }
        Ok(())
    }

    fn constraint_named(&self, name: &str) -> Option<&Arc<Constraint>> {
        let start = (name.to_string(), Vec::new());
        self.entries
            .range(start..)
            .next()
            .filter(|((n, _), _)| n == name)
            .map(|(_, (c, _))| c)
    }

    /// Applications in canonical order (name, then tuple).
    pub fn applications(&self) -> impl Iterator<Item = WeightedApplication> + '_ {
        self.entries.values().zip(self.entries.keys()).map(|((c, w), (_, t))| WeightedApplication {
            constraint: c.clone(),
            tuple: t.clone(),
            weight: w.clone(),
        })
    }

    pub fn weight_of(&self, name: &str, tuple: &[usize]) -> Option<&BigInt> {
        self.entries.get(&(name.to_string(), tuple.to_vec())).map(|(_, w)| w)
    }

    /// `|Φ|`, the number of applications.
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `||Φ||`, the total absolute weight.
    pub fn norm(&self) -> BigInt {
        self.entries.values().map(|(_, w)| w.abs()).sum()
    }

    /// `Φ(x)`, the total weight of satisfied applications.
    pub fn value(&self, x: &[bool]) -> BigInt {
        let mut acc = BigInt::zero();
        for ((_, tuple), (c, w)) in &self.entries {
            let row = tuple.iter().fold(0usize, |acc, &j| (acc << 1) | x[j] as usize);
            if c.eval_row(row) {
                acc += w;
            }
        }
        acc
    }

    /// Distinct constraints used, in name order.
    pub fn constraints(&self) -> Vec<Arc<Constraint>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for ((name, _), (c, _)) in &self.entries {
            if seen.insert(name.clone()) {
                out.push(c.clone());
            }
        }
        out
    }

    /// `Σ w · P_f(x_tuple)`.
    pub fn polynomial(&self) -> Result<MultilinearPolynomial> {
        let mut out = MultilinearPolynomial::zero(self.nvars);
        let mut cache: BTreeMap<String, MultilinearPolynomial> = BTreeMap::new();
        for ((name, tuple), (c, w)) in &self.entries {
            if w.is_zero() {
                continue;
            }
            let p = match cache.get(name) {
                Some(p) => p,
                None => {
                    let p = characteristic_polynomial(c)?;
                    cache.entry(name.clone()).or_insert(p)
                }
            };
            let q = p.apply_tuple(tuple, self.nvars)?;
            out.add_scaled(&BigRational::from_integer(w.clone()), &q);
        }
        Ok(out)
    }

    /// `Φ₁ + Φ₂` over the union of the variable sets; thresholds add.
    pub fn sum(&self, other: &Formula) -> Result<Formula> {
        let range = match (self.weight_range, other.weight_range) {
            (WeightRange::N, WeightRange::N) => WeightRange::N,
            _ => WeightRange::Z,
        };
        let mut out = Formula::new(self.nvars.max(other.nvars), range);
        out.threshold = &self.threshold + &other.threshold;
        for a in self.applications().chain(other.applications()) {
            out.add(a.constraint, a.tuple, a.weight)?;
        }
        Ok(out)
    }

    /// `α · Φ`; the threshold is scaled too.
    pub fn scalar_mul(&self, alpha: &BigInt) -> Formula {
        let mut out = self.clone();
        for (_, w) in out.entries.values_mut() {
            *w *= alpha;
        }
        out.threshold = &self.threshold * alpha;
        if alpha.is_negative() && out.weight_range == WeightRange::N && !self.is_empty() {
            out.weight_range = WeightRange::Z;
        }
        out
    }

    /// Checks `||Φ|| ≤ n^c` for the declared exponent, if any.
    pub fn check_weight_exponent(&self) -> Result<()> {
        if let Some(c) = self.declared_weight_exponent {
            let bound = BigInt::from(self.nvars).pow(c);
            if self.norm() > bound {
                return Err(Error::WeightRange(format!(
                    "total weight {} exceeds n^c = {}^{} = {}",
                    self.norm(),
                    self.nvars,
                    c,
                    bound
                )));
            }
        }
        Ok(())
    }

    /// Smallest `c` with `||Φ|| ≤ max(n, 2)^c`.
    pub fn minimal_weight_exponent(&self) -> u32 {
        let norm = self.norm();
        let base = BigInt::from(self.nvars.max(2));
        let mut c = 0u32;
        let mut p = BigInt::from(1);
        while p < norm {
            p *= &base;
            c += 1;
        }
        c
    }

    /// Whether every applied constraint is (by function) a member of `language`.
    pub fn is_over(&self, language: &ConstraintLanguage) -> bool {
        self.constraints().iter().all(|c| language.contains_function(c))
    }

    /// A single-variable formula with no applications and the given threshold.
    pub fn constant_instance(range: WeightRange, threshold: impl Into<BigInt>) -> Formula {
        Formula::new(1, range).with_threshold(threshold)
    }
}
