//! Constraint languages and their finite closures.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::constraint::{Constraint, PatternMode, Slot, SubstitutionPattern};
use crate::error::{Error, Result};

/// Closures are materialized only for members up to this arity.
pub const MAX_CLOSURE_ARITY: usize = 8;

/// A finite, non-empty set of uniquely named constraints. Member order is
/// significant: every choice made by the reductions scans members in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintLanguage {
    name: String,
    constraints: Vec<Arc<Constraint>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosureMode {
    /// `Γ^{T,F}`: substitute variables and constants.
    Constants,
    /// `Γ^{LIT}`: substitute literals.
    Literals,
    /// `Γ^{NEG}`: add pointwise negations.
    Negations,
}

impl ClosureMode {
    pub fn suffix(&self) -> &'static str {
        match self {
            ClosureMode::Constants => "TF",
            ClosureMode::Literals => "LIT",
            ClosureMode::Negations => "NEG",
        }
    }
}

impl ConstraintLanguage {
    /// A user-supplied language: non-empty, unique names, every arity >= 1.
    pub fn new(name: impl Into<String>, constraints: Vec<Arc<Constraint>>) -> Result<Self> {
        if let Some(c) = constraints.iter().find(|c| c.arity() == 0) {
            return Err(Error::InvalidLanguage(format!(
                "constraint `{}` has arity 0; constants are only allowed inside closures",
                c.name()
            )));
        }
        Self::with_constants(name, constraints)
    }

    /// Like [`ConstraintLanguage::new`] but admits 0-ary members.
    pub fn with_constants(name: impl Into<String>, constraints: Vec<Arc<Constraint>>) -> Result<Self> {
        let name = name.into();
        if constraints.is_empty() {
            return Err(Error::InvalidLanguage(format!("language `{name}` is empty")));
        }
        let mut seen = HashSet::new();
        for c in &constraints {
            if !seen.insert(c.name().to_string()) {
                return Err(Error::InvalidLanguage(format!(
                    "duplicate constraint name `{}` in `{name}`",
                    c.name()
                )));
            }
        }
        Ok(ConstraintLanguage { name, constraints })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn constraints(&self) -> &[Arc<Constraint>] {
        &self.constraints
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<Constraint>> {
        self.constraints.iter()
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Arc<Constraint>> {
        self.constraints.iter().find(|c| c.name() == name)
    }

    /// First member computing the same function as `c`.
    pub fn find_function(&self, c: &Constraint) -> Option<&Arc<Constraint>> {
        self.constraints.iter().find(|m| m.same_function(c))
    }

    pub fn contains_function(&self, c: &Constraint) -> bool {
        self.find_function(c).is_some()
    }

    pub fn max_arity(&self) -> usize {
        self.constraints.iter().map(|c| c.arity()).max().unwrap_or(0)
    }

    /// Members of `self` followed by members of `other` whose names are new.
    pub fn union(&self, other: &ConstraintLanguage) -> ConstraintLanguage {
        let mut constraints = self.constraints.clone();
        for c in &other.constraints {
            if self.get(c.name()).is_none() {
                constraints.push(c.clone());
            }
        }
        ConstraintLanguage {
            name: format!("{}+{}", self.name, other.name),
            constraints,
        }
    }

    /// Set of distinct functions, as `(arity, table)` pairs.
    pub fn function_set(&self) -> HashSet<(usize, Vec<bool>)> {
        self.constraints
            .iter()
            .map(|c| (c.arity(), c.table().to_vec()))
            .collect()
    }

    /// Materializes `Γ^{T,F}`, `Γ^{LIT}` or `Γ^{NEG}`, deduplicated by
    /// function. Original members keep their names and come first.
    pub fn closure(&self, mode: ClosureMode) -> Result<ConstraintLanguage> {
        if let Some(c) = self.constraints.iter().find(|c| c.arity() > MAX_CLOSURE_ARITY) {
            return Err(Error::ArityCap {
                arity: c.arity(),
                cap: MAX_CLOSURE_ARITY,
                what: "closure materialization",
            });
        }
        let mut out = Dedup::default();
        for c in &self.constraints {
            out.push(c.clone());
        }
        for f in &self.constraints {
            match mode {
                ClosureMode::Negations => out.push(f.negation()),
                ClosureMode::Constants | ClosureMode::Literals => {
                    for pattern in canonical_patterns(f.arity(), mode) {
                        let g = f.apply_pattern(&pattern)?;
                        if !out.fresh_canonical(&g) {
                            continue;
                        }
                        for perm in permutations(pattern.target_arity) {
                            let permuted = permute_pattern(&pattern, &perm);
                            out.push(f.apply_pattern(&permuted)?);
                        }
                    }
                }
            }
        }
        ConstraintLanguage::with_constants(format!("{}^{}", self.name, mode.suffix()), out.members)
    }
}

impl fmt::Display for ConstraintLanguage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{", self.name)?;
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c.name())?;
        }
        write!(f, "}}")
    }
}

#[derive(Default)]
struct Dedup {
    members: Vec<Arc<Constraint>>,
    seen: HashSet<(usize, Vec<bool>)>,
    canonical_seen: HashSet<(usize, Vec<bool>)>,
}

impl Dedup {
    fn push(&mut self, c: Arc<Constraint>) {
        if self.seen.insert((c.arity(), c.table().to_vec())) {
            self.members.push(c);
        }
    }

    /// Records a canonical-pattern result; false if already expanded.
    fn fresh_canonical(&mut self, c: &Constraint) -> bool {
        self.canonical_seen.insert((c.arity(), c.table().to_vec()))
    }
}

/// All patterns for a `k`-ary constraint in which target variables appear in
/// order of first occurrence (`x1` before `x2`, ...). Every other pattern is a
/// variable permutation of one of these.
pub(crate) fn canonical_patterns(k: usize, mode: ClosureMode) -> Vec<SubstitutionPattern> {
    fn rec(k: usize, mode: ClosureMode, used: usize, slots: &mut Vec<Slot>, out: &mut Vec<SubstitutionPattern>) {
        if slots.len() == k {
            let pmode = match mode {
                ClosureMode::Literals => PatternMode::Literals,
                _ => PatternMode::Constants,
            };
            out.push(SubstitutionPattern {
                target_arity: used,
                slots: slots.clone(),
                mode: pmode,
            });
            return;
        }
        let mut choices = Vec::new();
        if mode == ClosureMode::Constants {
            choices.push((Slot::Const(false), used));
            choices.push((Slot::Const(true), used));
        }
        for i in 0..=used {
            let next = if i == used { used + 1 } else { used };
            choices.push((Slot::Var(i), next));
            if mode == ClosureMode::Literals {
                choices.push((Slot::Neg(i), next));
            }
        }
        for (slot, next) in choices {
            slots.push(slot);
            rec(k, mode, next, slots, out);
            slots.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, mode, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Permutations of `0..d` in lexicographic order, identity first.
pub(crate) fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..d).collect();
    let mut out = vec![perm.clone()];
    loop {
        let Some(i) = (1..perm.len()).rev().find(|&i| perm[i - 1] < perm[i]) else {
            return out;
        };
        let j = (i..perm.len()).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
        out.push(perm.clone());
    }
}

fn permute_pattern(p: &SubstitutionPattern, perm: &[usize]) -> SubstitutionPattern {
    let slots = p
        .slots
        .iter()
        .map(|s| match *s {
            Slot::Var(i) => Slot::Var(perm[i]),
            Slot::Neg(i) => Slot::Neg(perm[i]),
            c => c,
        })
        .collect();
    SubstitutionPattern {
        target_arity: p.target_arity,
        slots,
        mode: p.mode,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn rejects_empty_duplicate_and_nullary() {
        assert!(ConstraintLanguage::new("e", vec![]).is_err());
        let xor = Arc::new(catalog::xor(2));
        assert!(ConstraintLanguage::new("d", vec![xor.clone(), xor.clone()]).is_err());
        let c0 = Arc::new(Constraint::new("ZERO", 0, vec![false]).unwrap());
        assert!(ConstraintLanguage::new("z", vec![c0.clone()]).is_err());
        assert!(ConstraintLanguage::with_constants("z", vec![c0]).is_ok());
    }

    #[test]
    fn negation_closure_of_xor_adds_equality() {
        let l = catalog::language(&["XOR"]).unwrap();
        let neg = l.closure(ClosureMode::Negations).unwrap();
        assert_eq!(neg.len(), 2);
        assert_eq!(neg.constraints()[1].table(), &[true, false, false, true]);
    }

    #[test]
    fn literal_closure_of_or2_contains_all_two_clauses() {
        let l = catalog::language(&["OR2"]).unwrap();
        let lit = l.closure(ClosureMode::Literals).unwrap();
        for clause in [
            |x: &[bool]| x[0] || x[1],
            |x: &[bool]| !x[0] || x[1],
            |x: &[bool]| !x[0] || !x[1],
            |x: &[bool]| x[0] || !x[1],
        ] {
            let c = Constraint::from_fn("c", 2, clause).unwrap();
            assert!(lit.contains_function(&c));
        }
        // Four binary clauses, x, ¬x and the constant-true unary function.
        assert_eq!(lit.len(), 7);
    }

    #[test]
    fn constants_closure_includes_nullary_constants() {
        let l = catalog::language(&["OR2"]).unwrap();
        let tf = l.closure(ClosureMode::Constants).unwrap();
        assert!(tf.iter().any(|c| c.arity() == 0 && c.table() == [true]));
        assert!(tf.iter().any(|c| c.arity() == 0 && c.table() == [false]));
    }

    #[test]
    fn closures_are_idempotent() {
        for names in [vec!["XOR"], vec!["NAE3"], vec!["OR2", "AND2"], vec!["EX3"], vec!["DICUT"]] {
            let l = catalog::language(&names).unwrap();
            for mode in [ClosureMode::Constants, ClosureMode::Literals, ClosureMode::Negations] {
                let once = l.closure(mode).unwrap();
                let twice = once.closure(mode).unwrap();
                assert_eq!(once.function_set(), twice.function_set(), "{names:?} {mode:?}");
            }
        }
    }

    #[test]
    fn closure_rejects_large_arity() {
        let big = Arc::new(catalog::or(9));
        let l = ConstraintLanguage::new("big", vec![big]).unwrap();
        assert!(matches!(
            l.closure(ClosureMode::Constants),
            Err(Error::ArityCap { .. })
        ));
    }

    #[test]
    fn permutations_are_lexicographic() {
        assert_eq!(
            permutations(3),
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![2, 1, 0]
            ]
        );
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
