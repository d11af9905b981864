//! Exact multilinear polynomials over the rationals.
//!
//! Variables are 0-based internally (`x1` is index 0). Monomials order by
//! degree, then lexicographically, which fixes the serialized term order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::constraint::{Constraint, Slot};
use crate::error::{Error, Result};
use crate::language::ConstraintLanguage;

/// Default arity cap for characteristic polynomials.
pub const DEFAULT_POLY_ARITY_CAP: usize = 16;

/// A product of distinct variables; the empty product is the constant monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    /// Sorts and deduplicates, since `x_i^2 = x_i` on Boolean points.
    pub fn new(mut vars: Vec<usize>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        Monomial(vars)
    }

    pub fn constant() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Monomial(vec![i])
    }

    pub fn vars(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn union(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    v.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    v.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    v.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        v.extend_from_slice(&self.0[i..]);
        v.extend_from_slice(&other.0[j..]);
        Monomial(v)
    }

    pub fn eval(&self, x: &[bool]) -> bool {
        self.0.iter().all(|&i| x[i])
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (n, i) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, "*")?;
            }
            write!(f, "x{}", i + 1)?;
        }
        Ok(())
    }
}

/// Sparse map from monomials to nonzero rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPolynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

fn ratio(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl MultilinearPolynomial {
    pub fn zero(nvars: usize) -> Self {
        MultilinearPolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::constant(), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    /// The polynomial `x_{i+1}`.
    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars.max(i + 1));
        p.add_term(Monomial::var(i), BigRational::one());
        p
    }

    /// Collects terms, merging equal monomials and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if let Some(&i) = m.vars().last() {
                if i >= nvars {
                    return Err(Error::IndexOutOfRange { index: i + 1, nvars });
                }
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Raises the declared variable count; never lowers it.
    pub fn with_nvars(mut self, nvars: usize) -> Self {
        self.nvars = self.nvars.max(nvars);
        self
    }

    /// Terms in canonical order (degree, then lexicographic).
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn constant_term(&self) -> BigRational {
        self.coefficient(&Monomial::constant())
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        if let Some(&i) = m.vars().last() {
            self.nvars = self.nvars.max(i + 1);
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Largest monomial size with a nonzero coefficient; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().next_back().map_or(0, Monomial::degree)
    }

    /// Monomials of exactly degree `d`, lexicographically.
    pub fn monomials_of_degree(&self, d: usize) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().filter(move |(m, _)| m.degree() == d)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Evaluates on a Boolean point; `x` must cover every variable in a term.
    pub fn evaluate(&self, x: &[bool]) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            if let Some(&i) = m.vars().last() {
                if i >= x.len() {
                    return Err(Error::IndexOutOfRange {
                        index: i + 1,
                        nvars: x.len(),
                    });
                }
            }
            if m.eval(x) {
                acc += c;
            }
        }
        Ok(acc)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.nvars = self.nvars.max(other.nvars);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// Adds `scale * other` in place.
    pub fn add_scaled(&mut self, scale: &BigRational, other: &Self) {
        if scale.is_zero() {
            return;
        }
        self.nvars = self.nvars.max(other.nvars);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c * scale);
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(&-BigRational::one(), other);
        out
    }

    pub fn scale(&self, alpha: &BigRational) -> Self {
        if alpha.is_zero() {
            return Self::zero(self.nvars);
        }
        MultilinearPolynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * alpha)).collect(),
        }
    }

    /// Product reduced with `x_i^2 = x_i`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars.max(other.nvars));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.union(m2), c1 * c2);
            }
        }
        out
    }

    /// Substitutes `x_i -> 1 - x_i`.
    pub fn negate_variable(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars.max(i + 1));
        for (m, c) in &self.terms {
            if m.contains(i) {
                let rest = Monomial(m.vars().iter().copied().filter(|&j| j != i).collect());
                out.add_term(rest, c.clone());
                out.add_term(m.clone(), -c.clone());
            } else {
                out.add_term(m.clone(), c.clone());
            }
        }
        out
    }

    /// `P(ξ_1, ..., ξ_k)` for slots over `target_nvars` variables.
    pub fn substitute(&self, slots: &[Slot], target_nvars: usize) -> Result<Self> {
        if let Some(&i) = self.terms.keys().filter_map(|m| m.vars().last()).max() {
            if i >= slots.len() {
                return Err(Error::IndexOutOfRange {
                    index: i + 1,
                    nvars: slots.len(),
                });
            }
        }
        for s in slots {
            if let Slot::Var(j) | Slot::Neg(j) = *s {
                if j >= target_nvars {
                    return Err(Error::IndexOutOfRange {
                        index: j + 1,
                        nvars: target_nvars,
                    });
                }
            }
        }
        let mut out = Self::zero(target_nvars);
        for (m, c) in &self.terms {
            // Expand the product of slot polynomials, skipping the general
            // multiply when every slot is a plain variable.
            let mut partial: Vec<(Monomial, BigRational)> = vec![(Monomial::constant(), c.clone())];
            for &i in m.vars() {
                match slots[i] {
                    Slot::Const(true) => {}
                    Slot::Const(false) => {
                        partial.clear();
                        break;
                    }
                    Slot::Var(j) => {
                        let v = Monomial::var(j);
                        for (pm, _) in partial.iter_mut() {
                            *pm = pm.union(&v);
                        }
                    }
                    Slot::Neg(j) => {
                        let v = Monomial::var(j);
                        let mut next = Vec::with_capacity(partial.len() * 2);
                        for (pm, pc) in partial {
                            next.push((pm.union(&v), -pc.clone()));
                            next.push((pm, pc));
                        }
                        partial = next;
                    }
                }
            }
            for (pm, pc) in partial {
                out.add_term(pm, pc);
            }
        }
        Ok(out)
    }

    /// Renames variable `i` to `tuple[i]`; repeated targets collapse.
    pub fn apply_tuple(&self, tuple: &[usize], target_nvars: usize) -> Result<Self> {
        let slots: Vec<Slot> = tuple.iter().map(|&j| Slot::Var(j)).collect();
        self.substitute(&slots, target_nvars)
    }
}

impl fmt::Display for MultilinearPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_constant() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

fn check_poly_arity(f: &Constraint, cap: usize) -> Result<()> {
    if f.arity() > cap {
        return Err(Error::ArityCap {
            arity: f.arity(),
            cap,
            what: "characteristic polynomials",
        });
    }
    Ok(())
}

/// Characteristic polynomial via the subset Möbius transform of the table.
pub fn characteristic_polynomial(f: &Constraint) -> Result<MultilinearPolynomial> {
    characteristic_polynomial_capped(f, DEFAULT_POLY_ARITY_CAP)
}

pub fn characteristic_polynomial_capped(f: &Constraint, cap: usize) -> Result<MultilinearPolynomial> {
    check_poly_arity(f, cap)?;
    let k = f.arity();
    let mut c: Vec<i64> = f.table().iter().map(|&b| b as i64).collect();
    for bit in 0..k {
        let step = 1usize << bit;
        for r in 0..c.len() {
            if r & step != 0 {
                c[r] -= c[r ^ step];
            }
        }
    }
    let mut p = MultilinearPolynomial::zero(k);
    for (r, &v) in c.iter().enumerate() {
        if v != 0 {
            let vars = (0..k).filter(|&i| r >> (k - 1 - i) & 1 == 1).collect();
            p.add_term(Monomial(vars), ratio(v));
        }
    }
    Ok(p)
}

/// Characteristic polynomial as `Σ_{s: f(s)=1} ∏_i R_i^s(x)` where `R_i^s`
/// is `x_i` or `1 - x_i`.
pub fn characteristic_polynomial_by_expansion(f: &Constraint) -> Result<MultilinearPolynomial> {
    check_poly_arity(f, DEFAULT_POLY_ARITY_CAP)?;
    let k = f.arity();
    let mut total = MultilinearPolynomial::zero(k);
    for row in f.satisfying_rows() {
        let mut prod = MultilinearPolynomial::one(k);
        for i in 0..k {
            let xi = MultilinearPolynomial::variable(k, i);
            let factor = if row >> (k - 1 - i) & 1 == 1 {
                xi
            } else {
                MultilinearPolynomial::one(k).sub(&xi)
            };
            prod = prod.mul(&factor);
        }
        total.add_assign(&prod);
    }
    Ok(total.with_nvars(k))
}

pub fn degree_of_constraint(f: &Constraint) -> Result<usize> {
    Ok(characteristic_polynomial(f)?.degree())
}

pub fn degree_of_language(language: &ConstraintLanguage) -> Result<usize> {
    language
        .iter()
        .map(|c| degree_of_constraint(c))
        .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
}

/// The elementary symmetric polynomial `e_i` in `k` variables.
pub fn elementary_symmetric(k: usize, i: usize) -> MultilinearPolynomial {
    let mut p = MultilinearPolynomial::zero(k);
    for mask in 0u64..1u64 << k {
        if mask.count_ones() as usize == i {
            let vars = (0..k).filter(|&j| mask >> j & 1 == 1).collect();
            p.add_term(Monomial(vars), BigRational::one());
        }
    }
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetricKind {
    Nae,
    Xor,
    Ex,
}

/// Closed forms in the elementary symmetric basis:
/// `NAE_k = Σ_{i=1}^{k-1} (-1)^{i-1} e_i`, plus `-2 e_k` when `k` is even;
/// `XOR_k = Σ (-2)^{i-1} e_i`; `EX_k = Σ i (-1)^{i-1} e_i`.
///
/// The NAE form follows from `NAE_k = 1 - AND_k - NOR_k`. For even `k` the
/// top coefficient is `-2`, not `-1`: `e_1 - e_2` is `OR2`, not `NAE2`.
pub fn symmetric_formula(kind: SymmetricKind, k: usize) -> Result<MultilinearPolynomial> {
    if k == 0 {
        return Err(Error::Precondition("symmetric formulas need k >= 1".into()));
    }
    let mut p = MultilinearPolynomial::zero(k);
    for i in 1..=k {
        let sign: i64 = if i % 2 == 1 { 1 } else { -1 };
        let coeff = match kind {
            SymmetricKind::Nae if i == k => ratio(if k % 2 == 1 { 0 } else { -2 }),
            SymmetricKind::Nae => ratio(sign),
            SymmetricKind::Xor => BigRational::from_integer(BigInt::from(-2).pow(i as u32 - 1)),
            SymmetricKind::Ex => ratio(sign * i as i64),
        };
        p.add_scaled(&coeff, &elementary_symmetric(k, i));
    }
    Ok(p.with_nvars(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use std::sync::Arc;

    fn poly(nvars: usize, terms: &[(i64, &[usize])]) -> MultilinearPolynomial {
        MultilinearPolynomial::from_terms(
            nvars,
            terms.iter().map(|(c, v)| (Monomial::new(v.iter().map(|i| i - 1).collect()), ratio(*c))),
        )
        .unwrap()
    }

    #[test]
    fn or2_polynomial() {
        let p = characteristic_polynomial(&catalog::or(2)).unwrap();
        assert_eq!(p, poly(2, &[(1, &[1]), (1, &[2]), (-1, &[1, 2])]));
        assert_eq!(p.to_string(), "x1 + x2 - x1*x2");
    }

    #[test]
    fn nae3_and_ex3_polynomials() {
        let nae = characteristic_polynomial(&catalog::nae(3)).unwrap();
        assert_eq!(
            nae,
            poly(3, &[(1, &[1]), (1, &[2]), (1, &[3]), (-1, &[1, 2]), (-1, &[1, 3]), (-1, &[2, 3])])
        );
        let ex = characteristic_polynomial(&catalog::ex(3)).unwrap();
        assert_eq!(
            ex,
            poly(
                3,
                &[
                    (1, &[1]),
                    (1, &[2]),
                    (1, &[3]),
                    (-2, &[1, 2]),
                    (-2, &[1, 3]),
                    (-2, &[2, 3]),
                    (3, &[1, 2, 3])
                ]
            )
        );
    }

    #[test]
    fn zero_constraint_has_zero_polynomial() {
        let z = Constraint::new("Z", 3, vec![false; 8]).unwrap();
        let p = characteristic_polynomial(&z).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn substituting_a_negated_slot() {
        let p = characteristic_polynomial(&catalog::or(3)).unwrap().negate_variable(2);
        assert_eq!(
            p,
            poly(3, &[(1, &[]), (-1, &[3]), (1, &[1, 3]), (1, &[2, 3]), (-1, &[1, 2, 3])])
        );
        let or3 = Arc::new(catalog::or(3));
        let g = or3
            .apply_pattern(&crate::constraint::SubstitutionPattern::parse("[x1,x2,~x3]").unwrap())
            .unwrap();
        assert_eq!(characteristic_polynomial(&g).unwrap(), p);
    }

    #[test]
    fn evaluation() {
        let nae = characteristic_polynomial(&catalog::nae(3)).unwrap();
        assert_eq!(nae.evaluate(&[true, true, true]).unwrap(), ratio(0));
        let or2 = characteristic_polynomial(&catalog::or(2)).unwrap();
        assert_eq!(or2.evaluate(&[true, false]).unwrap(), ratio(1));
        let x = poly(2, &[(1, &[1]), (1, &[2]), (-2, &[1, 2])]);
        assert_eq!(x.evaluate(&[true, true]).unwrap(), ratio(0));
        assert!(matches!(or2.evaluate(&[true]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn arithmetic() {
        let x1 = MultilinearPolynomial::variable(1, 0);
        assert!(x1.add(&x1.scale(&ratio(-1))).is_zero());
        let x = poly(2, &[(1, &[1]), (1, &[2]), (-2, &[1, 2])]);
        assert_eq!(x.scale(&ratio(5)), poly(2, &[(5, &[1]), (5, &[2]), (-10, &[1, 2])]));
        assert_eq!(x1.mul(&x1), x1);
    }

    #[test]
    fn degrees() {
        assert_eq!(degree_of_constraint(&catalog::nae(4)).unwrap(), 4);
        assert_eq!(degree_of_constraint(&catalog::nae(5)).unwrap(), 4);
        for k in 2..=5 {
            assert_eq!(degree_of_constraint(&catalog::xor(k)).unwrap(), k);
            assert_eq!(degree_of_constraint(&catalog::and(k)).unwrap(), k);
        }
        assert_eq!(degree_of_constraint(&catalog::recursive_nae(2)).unwrap(), 4);
    }

    #[test]
    fn symmetric_formulas() {
        let x = symmetric_formula(SymmetricKind::Xor, 2).unwrap();
        assert_eq!(x, poly(2, &[(1, &[1]), (1, &[2]), (-2, &[1, 2])]));
        let n = symmetric_formula(SymmetricKind::Nae, 3).unwrap();
        assert_eq!(n, elementary_symmetric(3, 1).sub(&elementary_symmetric(3, 2)));
        // The unadjusted alternating sum for even k is a different function.
        let naive = elementary_symmetric(2, 1).sub(&elementary_symmetric(2, 2));
        assert_ne!(naive, characteristic_polynomial(&catalog::nae(2)).unwrap());
        assert_eq!(naive, characteristic_polynomial(&catalog::or(2)).unwrap());
        assert_eq!(symmetric_formula(SymmetricKind::Ex, 1).unwrap(), poly(1, &[(1, &[1])]));
        for k in 1..=6 {
            for (kind, c) in [
                (SymmetricKind::Nae, catalog::nae(k)),
                (SymmetricKind::Xor, catalog::xor(k)),
                (SymmetricKind::Ex, catalog::ex(k)),
            ] {
                assert_eq!(symmetric_formula(kind, k).unwrap(), characteristic_polynomial(&c).unwrap(), "{kind:?} {k}");
            }
        }
    }

    #[test]
    fn two_paths_agree_on_catalog() {
        for c in catalog::standard_constraints(6) {
            assert_eq!(
                characteristic_polynomial(&c).unwrap(),
                characteristic_polynomial_by_expansion(&c).unwrap(),
                "{}",
                c.name()
            );
        }
    }

    #[test]
    fn arity_cap() {
        let big = catalog::or(17);
        assert!(matches!(characteristic_polynomial(&big), Err(Error::ArityCap { .. })));
        assert!(characteristic_polynomial_capped(&big, 17).is_ok());
    }

    #[test]
    fn tuple_application_collapses_repeats() {
        // XOR(x, x) = 0.
        let p = characteristic_polynomial(&catalog::xor(2)).unwrap();
        assert!(p.apply_tuple(&[0, 0], 1).unwrap().is_zero());
        let q = p.apply_tuple(&[2, 0], 3).unwrap();
        assert_eq!(q, poly(3, &[(1, &[1]), (1, &[3]), (-2, &[1, 3])]));
    }
}
