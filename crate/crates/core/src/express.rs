//! Writing polynomials as rational combinations of applications of one
//! constraint under constant substitutions.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::constraint::{row_bits, Constraint, PatternMode, Slot, SubstitutionPattern};
use crate::error::{Error, Result};
use crate::language::ConstraintLanguage;
use crate::poly::{characteristic_polynomial, Monomial, MultilinearPolynomial};

/// A `d`-ary constraint of degree exactly `d` obtained from `f` with constants.
#[derive(Clone, Debug)]
pub struct DegreeWitness {
    pub degree: usize,
    pub pattern: SubstitutionPattern,
    pub constraint: Arc<Constraint>,
    pub polynomial: MultilinearPolynomial,
    /// Coefficient of `x_1 ... x_d` in `polynomial`.
    pub leading_coefficient: BigInt,
}

/// All witnesses `f_D, f_{D-1}, ..., f_1` for `D = deg(f)`, each obtained from
/// the previous one by a single substitution.
#[derive(Clone, Debug)]
pub struct WitnessChain {
    base: Arc<Constraint>,
    /// `levels[d - 1]` is the degree-`d` witness.
    levels: Vec<DegreeWitness>,
}

fn full_monomial(d: usize) -> Monomial {
    Monomial::new((0..d).collect())
}

fn make_witness(base: &Arc<Constraint>, pattern: SubstitutionPattern, d: usize) -> Result<DegreeWitness> {
    let g = base.apply_pattern(&pattern)?;
    let p = characteristic_polynomial(&g)?;
    let lead = p.coefficient(&full_monomial(d));
    if p.degree() != d || lead.is_zero() || !lead.is_integer() {
        return Err(Error::Precondition(format!(
            "witness {}{} has degree {} instead of {d}",
            base.name(),
            pattern,
            p.degree()
        )));
    }
    Ok(DegreeWitness {
        degree: d,
        pattern,
        constraint: g,
        polynomial: p,
        leading_coefficient: lead.to_integer(),
    })
}

impl WitnessChain {
    pub fn new(f: &Arc<Constraint>) -> Result<Self> {
        if f.is_trivial() {
            return Err(Error::Precondition(format!("`{}` is trivial", f.name())));
        }
        let pf = characteristic_polynomial(f)?;
        let top = pf.degree();
        let k = f.arity();
        // Keep the first top-degree monomial, zero everything else.
        let (m, _) = pf.monomials_of_degree(top).next().expect("non-trivial constraint");
        let mut next_var = 0;
        let slots = (0..k)
            .map(|i| {
                if m.contains(i) {
                    next_var += 1;
                    Slot::Var(next_var - 1)
                } else {
                    Slot::Const(false)
                }
            })
            .collect();
        let pattern = SubstitutionPattern::new(top, slots, PatternMode::Constants)?;
        let mut levels = vec![make_witness(f, pattern, top)?];
        for d in (1..top).rev() {
            let prev = levels.last().unwrap();
            let e = d + 1;
            let step: Vec<Slot> = match prev.polynomial.monomials_of_degree(d).next() {
                Some((m, _)) => {
                    let missing = (0..e).find(|&i| !m.contains(i)).unwrap();
                    let mut v = 0;
                    (0..e)
                        .map(|i| {
                            if i == missing {
                                Slot::Const(false)
                            } else {
                                v += 1;
                                Slot::Var(v - 1)
                            }
                        })
                        .collect()
                }
                None => (0..e)
                    .map(|i| if i == d { Slot::Const(true) } else { Slot::Var(i) })
                    .collect(),
            };
            let inner = SubstitutionPattern::new(d, step, PatternMode::Constants)?;
            let pattern = prev.pattern.then(&inner)?;
            levels.push(make_witness(f, pattern, d)?);
        }
        levels.reverse();
        Ok(WitnessChain { base: f.clone(), levels })
    }

    pub fn base(&self) -> &Arc<Constraint> {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, d: usize) -> Result<&DegreeWitness> {
        if d == 0 || d > self.levels.len() {
            return Err(Error::Precondition(format!(
                "degree {d} outside 1..={} for `{}`",
                self.levels.len(),
                self.base.name()
            )));
        }
        Ok(&self.levels[d - 1])
    }
}

pub fn find_degree_witness(f: &Arc<Constraint>, d: usize) -> Result<DegreeWitness> {
    WitnessChain::new(f)?.level(d).cloned()
}

/// `α · g(x_{j_1}, ..., x_{j_r})` with `g = base(pattern)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinationTerm {
    pub coefficient: BigRational,
    pub pattern: SubstitutionPattern,
    pub constraint: Arc<Constraint>,
    /// 0-based variable indices, one per pattern variable.
    pub tuple: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearCombination {
    pub base: Arc<Constraint>,
    pub nvars: usize,
    pub terms: Vec<CombinationTerm>,
}

impl LinearCombination {
    /// `Σ α_i · P_{g_i}(x_{tuple_i})` as a polynomial over `nvars` variables.
    pub fn expand(&self) -> Result<MultilinearPolynomial> {
        let mut out = MultilinearPolynomial::zero(self.nvars);
        for t in &self.terms {
            let p = characteristic_polynomial(&t.constraint)?.apply_tuple(&t.tuple, self.nvars)?;
            out.add_scaled(&t.coefficient, &p);
        }
        Ok(out)
    }

    /// Formal identity check against `target`.
    pub fn verify(&self, target: &MultilinearPolynomial) -> Result<bool> {
        let e = self.expand()?;
        Ok(same_terms(&e, target))
    }

    /// `Σ α_i · g_i(x_{tuple_i})` at a Boolean point.
    pub fn evaluate(&self, x: &[bool]) -> BigRational {
        let mut acc = BigRational::zero();
        for t in &self.terms {
            let args: Vec<bool> = t.tuple.iter().map(|&j| x[j]).collect();
            if t.constraint.eval(&args) {
                acc += &t.coefficient;
            }
        }
        acc
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator(&self) -> BigInt {
        self.terms
            .iter()
            .fold(BigInt::one(), |acc, t| acc.lcm(t.coefficient.denom()))
    }

    pub fn scale(&self, factor: &BigRational) -> LinearCombination {
        LinearCombination {
            base: self.base.clone(),
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|t| CombinationTerm {
                    coefficient: &t.coefficient * factor,
                    ..t.clone()
                })
                .collect(),
        }
    }
}

fn same_terms(a: &MultilinearPolynomial, b: &MultilinearPolynomial) -> bool {
    a.len() == b.len() && a.terms().zip(b.terms()).all(|(x, y)| x == y)
}

/// Decomposes `p` using the witness chain of `f`, highest degree first; the
/// constant is carried by `f` at its lexicographically largest satisfying row.
pub fn decompose(p: &MultilinearPolynomial, f: &Arc<Constraint>) -> Result<LinearCombination> {
    let chain = WitnessChain::new(f)?;
    decompose_with(p, &chain)
}

pub fn decompose_with(p: &MultilinearPolynomial, chain: &WitnessChain) -> Result<LinearCombination> {
    let f = chain.base();
    let df = chain.degree();
    if p.degree() > df {
        return Err(Error::DegreeExcess {
            have: p.degree(),
            limit: df,
        });
    }
    let nvars = p.nvars();
    let pf = characteristic_polynomial(f)?;
    if nvars >= f.arity() && same_terms(p, &pf) {
        return Ok(LinearCombination {
            base: f.clone(),
            nvars,
            terms: vec![CombinationTerm {
                coefficient: BigRational::one(),
                pattern: SubstitutionPattern::identity(f.arity()),
                constraint: f.clone(),
                tuple: (0..f.arity()).collect(),
            }],
        });
    }
    let mut rest = p.clone();
    let mut terms = Vec::new();
    for d in (1..=p.degree()).rev() {
        let w = chain.level(d)?;
        let beta = BigRational::from_integer(w.leading_coefficient.clone());
        let top: Vec<(Monomial, BigRational)> = rest
            .monomials_of_degree(d)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        for (m, alpha) in top {
            let coefficient = alpha / &beta;
            let q = w.polynomial.apply_tuple(m.vars(), nvars)?;
            rest.add_scaled(&-coefficient.clone(), &q);
            terms.push(CombinationTerm {
                coefficient,
                pattern: w.pattern.clone(),
                constraint: w.constraint.clone(),
                tuple: m.vars().to_vec(),
            });
        }
    }
    let c = rest.constant_term();
    if !c.is_zero() {
        let row = f.satisfying_rows().last().expect("non-trivial constraint");
        let slots = row_bits(row, f.arity()).into_iter().map(Slot::Const).collect();
        let pattern = SubstitutionPattern::new(0, slots, PatternMode::Constants)?;
        let g = f.apply_pattern(&pattern)?;
        rest.add_term(Monomial::constant(), -c.clone());
        terms.push(CombinationTerm {
            coefficient: c,
            pattern,
            constraint: g,
            tuple: Vec::new(),
        });
    }
    debug_assert!(rest.is_zero());
    Ok(LinearCombination {
        base: f.clone(),
        nvars,
        terms,
    })
}

/// Combinations for every member of a language, all scaled by the common
/// denominator `beta` so that each represents `beta · P_g` with integer weights.
#[derive(Clone, Debug)]
pub struct LanguageDecomposition {
    pub beta: BigInt,
    pub base: Arc<Constraint>,
    /// Members of the source language paired with their scaled combination.
    pub members: Vec<(Arc<Constraint>, LinearCombination)>,
}

impl LanguageDecomposition {
    pub fn get(&self, g: &Constraint) -> Option<&LinearCombination> {
        self.members.iter().find(|(c, _)| c.same_function(g)).map(|(_, l)| l)
    }
}

pub fn language_denominator(source: &ConstraintLanguage, f: &Arc<Constraint>) -> Result<LanguageDecomposition> {
    let chain = WitnessChain::new(f)?;
    let mut raw = Vec::new();
    for g in source.iter() {
        let pg = characteristic_polynomial(g)?.with_nvars(g.arity());
        raw.push((g.clone(), decompose_with(&pg, &chain)?));
    }
    let beta = raw.iter().fold(BigInt::one(), |acc, (_, l)| acc.lcm(&l.denominator()));
    let scale = BigRational::from_integer(beta.clone());
    let members = raw.into_iter().map(|(g, l)| (g, l.scale(&scale))).collect();
    Ok(LanguageDecomposition {
        beta,
        base: f.clone(),
        members,
    })
}
