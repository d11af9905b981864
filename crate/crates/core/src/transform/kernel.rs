use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Signed;

use super::{carry_exponent, linear_chain, TransformOutput};
use crate::catalog;
use crate::certificate::{Bounds, TransformCertificate, ValueMap};
use crate::classify::{classify_language, Verdict};
use crate::error::{Error, Result};
use crate::formula::{Formula, WeightRange};
use crate::implementation::SearchCaps;
use crate::language::ConstraintLanguage;
use crate::oracle;
use crate::poly::{characteristic_polynomial, degree_of_language, MultilinearPolynomial};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    /// Monomials of the summed polynomial, constant term included.
    pub monomials: usize,
    pub kernel_nvars: usize,
    pub kernel_size: usize,
    pub max_weight_bits: u64,
    /// Weights with a sign bit plus `⌈log₂ n⌉`-bit indices, over all applications.
    pub total_bits: u64,
    /// The decision, when the language is solved directly.
    pub solved: Option<bool>,
}

fn bits(x: &BigInt) -> u64 {
    x.bits().max(1)
}

fn report(kernel: &Formula, monomials: usize, solved: Option<bool>) -> KernelReport {
    let index_bits = bits(&BigInt::from(kernel.nvars().max(1)));
    let mut max_weight_bits = 0;
    let mut total_bits = 0;
    for a in kernel.applications() {
        let b = bits(&a.weight.abs());
        max_weight_bits = max_weight_bits.max(b);
        total_bits += b + 1 + index_bits * a.tuple.len() as u64;
    }
    KernelReport {
        monomials,
        kernel_nvars: kernel.nvars(),
        kernel_size: kernel.size(),
        max_weight_bits,
        total_bits,
        solved,
    }
}

/// Sums `Φ` into its polynomial and folds the constant term into the
/// threshold: `Φ(x) ≥ t ⟺ P(x) − c ≥ t − c`.
pub fn compress_to_polynomial(phi: &Formula) -> Result<(MultilinearPolynomial, BigInt)> {
    let mut p = phi.polynomial()?;
    let c = p.constant_term();
    if !c.is_integer() {
        return Err(Error::Format("non-integral constant term".into()));
    }
    p.add_term(crate::poly::Monomial::constant(), -c.clone());
    Ok((p, &phi.threshold - c.to_integer()))
}

/// Kernel over `language` with range `N`.
///
/// NP-hard languages go through the polynomial, re-read as a `Γ_dAND`
/// formula and mapped back by the linear chain. The others are decided
/// directly and replaced by a one-variable instance.
pub fn kernelize(
    phi: &Formula,
    language: &ConstraintLanguage,
    caps: SearchCaps,
    oracle_cap: usize,
) -> Result<(TransformOutput, KernelReport)> {
    let cls = classify_language(language);
    if cls.verdict == Verdict::PolyTimeSolvable {
        let yes = solve_easy(phi, language, oracle_cap)?;
        let out = Formula::constant_instance(WeightRange::N, if yes { 0 } else { 1 });
        let certificate = TransformCertificate::new("kernelize", phi, &out, ValueMap::Solved, Bounds::additive(1, 1, 1, 0));
        let rep = report(&out, 0, Some(yes));
        return Ok((TransformOutput { formula: out, certificate }, rep));
    }
    let d = degree_of_language(language)?.max(1);
    let p = phi.polynomial()?;
    let monomials = p.len();
    let (p, t0) = compress_to_polynomial(phi)?;
    let ands: Vec<Arc<_>> = (1..=d).map(|k| Arc::new(catalog::and(k))).collect();
    let and_lang = ConstraintLanguage::new(format!("{d}AND"), ands.clone())?;
    let mut psi = Formula::new(phi.nvars(), WeightRange::Z).with_threshold(t0);
    for (m, a) in p.terms() {
        let k = m.degree();
        if k > d {
            return Err(Error::DegreeExcess { have: k, limit: d });
        }
        psi.add(ands[k - 1].clone(), m.vars().to_vec(), a.to_integer())?;
    }
    carry_exponent(phi, &mut psi);

    let mut kmax = 0;
    let mut spread = BigInt::from(1);
    for c in phi.constraints() {
        kmax = kmax.max(c.arity());
        let s: BigInt = characteristic_polynomial(&c)?.terms().map(|(_, a)| a.to_integer().abs()).sum();
        spread = spread.max(s);
    }
    let vm = ValueMap::Affine {
        scale: 1.into(),
        shift: &psi.threshold - &phi.threshold,
    };
    let enc = TransformCertificate::new("monomial_encoding", phi, &psi, vm, Bounds::additive(0, 1usize << kmax, spread, 0));
    let chain = linear_chain(&psi, &and_lang, language, caps)?;
    let certificate = TransformCertificate::compose("kernelize", vec![enc, chain.certificate]);
    let rep = report(&chain.formula, monomials, None);
    Ok((
        TransformOutput {
            formula: chain.formula,
            certificate,
        },
        rep,
    ))
}

/// `∃x Φ(x) ≥ t` for a polynomial-time language: a valid constant
/// assignment is optimal under nonnegative weights, otherwise the oracle.
fn solve_easy(phi: &Formula, language: &ConstraintLanguage, cap: usize) -> Result<bool> {
    let flags = classify_language(language).language;
    let nonneg = phi.applications().all(|a| !a.weight.is_negative());
    if nonneg && phi.is_over(language) && (flags.trivial || flags.zero_valid || flags.one_valid) {
        let all_valid = |bit: bool| phi.applications().all(|a| a.constraint.is_trivial() || a.constraint.eval(&vec![bit; a.constraint.arity()]));
        for bit in [false, true] {
            if all_valid(bit) {
                return Ok(phi.value(&vec![bit; phi.nvars()]) >= phi.threshold);
            }
        }
    }
    Ok(oracle::brute_force_capped(phi, cap)?.decision(&phi.threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::verify_transformation;
    use crate::io;
    use crate::language::ClosureMode;

    fn max_cut() -> Formula {
        let xor = Arc::new(catalog::xor(2));
        let mut phi = Formula::new(3, WeightRange::N).with_threshold(5);
        phi.add(xor.clone(), vec![0, 1], 3).unwrap();
        phi.add(xor.clone(), vec![1, 0], 2).unwrap();
        phi.add(xor, vec![0, 2], 1).unwrap();
        phi
    }

    #[test]
    fn max_cut_kernel() {
        let phi = max_cut();
        assert_eq!(phi.polynomial().unwrap().to_string(), "6*x1 + 5*x2 + x3 - 10*x1*x2 - 2*x1*x3");
        let l = catalog::language(&["XOR"]).unwrap();
        let (out, rep) = kernelize(&phi, &l, SearchCaps::default(), 24).unwrap();
        assert_eq!(rep.monomials, 5);
        assert!(out.formula.is_over(&l));
        assert!(oracle::decide(&out.formula, &out.formula.threshold).unwrap());
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().fully_passed());
    }

    #[test]
    fn duplicates_do_not_grow_the_kernel() {
        let l = catalog::language(&["XOR"]).unwrap();
        let or = Arc::new(catalog::xor(2));
        let mut once = Formula::new(2, WeightRange::N).with_threshold(1);
        once.add(or.clone(), vec![0, 1], 1).unwrap();
        let mut many = Formula::new(2, WeightRange::N).with_threshold(1);
        for _ in 0..100 {
            many.add(or.clone(), vec![0, 1], 1).unwrap();
        }
        let a = kernelize(&once, &l, SearchCaps::default(), 24).unwrap().1;
        let b = kernelize(&many, &l, SearchCaps::default(), 24).unwrap().1;
        assert_eq!(a.kernel_size, b.kernel_size);
    }

    #[test]
    fn lit_closed_language_keeps_few_variables() {
        let l = catalog::language(&["NAE3"]).unwrap().closure(ClosureMode::Literals).unwrap();
        let mut phi = Formula::new(4, WeightRange::N).with_threshold(3);
        let ternary: Vec<_> = l.iter().filter(|c| c.arity() == 3).cloned().collect();
        phi.add(ternary[0].clone(), vec![0, 1, 2], 2).unwrap();
        phi.add(ternary[1].clone(), vec![1, 2, 3], 1).unwrap();
        let (out, _) = kernelize(&phi, &l, SearchCaps::default(), 24).unwrap();
        assert!(out.formula.nvars() <= phi.nvars() + 2);
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().fully_passed());
    }

    #[test]
    fn easy_languages_are_solved() {
        let l = catalog::language(&["OR2"]).unwrap();
        let mut phi = Formula::new(2, WeightRange::N).with_threshold(3);
        phi.add(Arc::new(catalog::or(2)), vec![0, 1], 3).unwrap();
        let (out, rep) = kernelize(&phi, &l, SearchCaps::default(), 24).unwrap();
        assert_eq!(rep.solved, Some(true));
        assert_eq!(out.certificate.value_map, ValueMap::Solved);
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().passed());
        phi.threshold = 4.into();
        let (out, rep) = kernelize(&phi, &l, SearchCaps::default(), 24).unwrap();
        assert_eq!(rep.solved, Some(false));
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().passed());
    }

    #[test]
    fn compression_listings() {
        let mut phi = Formula::new(2, WeightRange::N).with_threshold(2);
        phi.add(Arc::new(catalog::or(2)), vec![0, 1], 4).unwrap();
        let (p, t) = compress_to_polynomial(&phi).unwrap();
        assert_eq!(io::emit_polynomial(&p, Some(&t)), "polynomial 2\nthreshold 2\n4 1\n4 2\n-4 1 2\n");
        let (p, t) = compress_to_polynomial(&Formula::new(2, WeightRange::N).with_threshold(1)).unwrap();
        assert_eq!(io::emit_polynomial(&p, Some(&t)), "polynomial 2\nthreshold 1\n");
        let (p, _) = compress_to_polynomial(&max_cut()).unwrap();
        assert_eq!(p.len(), 5);
    }
}
