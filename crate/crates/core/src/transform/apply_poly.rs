use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{carry_exponent, precondition, TransformOutput};
use crate::certificate::{Bounds, TransformCertificate, ValueMap};
use crate::constraint::Slot;
use crate::error::{Error, Result};
use crate::express::language_denominator;
use crate::formula::{Formula, WeightRange};
use crate::language::ConstraintLanguage;
use crate::poly::{characteristic_polynomial, degree_of_language};

/// Replaces every application of `g ∈ source` by the integer combination
/// of `target`-patterns realizing `β·P_g`, so that `Φ'(x) = β·Φ(x)`.
///
/// The combinations are built over the first member of `target` of the
/// largest degree; patterns without constants are written as applications
/// of that member, the rest as constant-substituted variants of it.
pub fn apply_poly(phi: &Formula, source: &ConstraintLanguage, target: &ConstraintLanguage) -> Result<TransformOutput> {
    let d_src = degree_of_language(source)?;
    let d_dst = degree_of_language(target)?;
    if d_src > d_dst {
        return Err(Error::DegreeExcess {
            have: d_src,
            limit: d_dst,
        });
    }
    precondition(target.iter().any(|c| !c.is_trivial()), || {
        format!("{} has only trivial members", target.name())
    })?;
    let mut f = None;
    let mut best = 0;
    for c in target.iter() {
        let d = characteristic_polynomial(c)?.degree();
        if f.is_none() || d > best {
            f = Some(c.clone());
            best = d;
        }
    }
    let f = f.unwrap();
    let dec = language_denominator(source, &f)?;
    let beta = dec.beta.clone();

    let mut out = Formula::new(phi.nvars(), WeightRange::Z);
    for a in phi.applications() {
        let lc = dec.get(&a.constraint).ok_or_else(|| {
            Error::Precondition(format!("`{}` is not a member of {}", a.constraint.name(), source.name()))
        })?;
        for term in &lc.terms {
            let c = term.coefficient.to_integer();
            if c.is_zero() {
                continue;
            }
            let tuple: Vec<usize> = term.tuple.iter().map(|&j| a.tuple[j]).collect();
            let w = &a.weight * &c;
            if term.pattern.slots.iter().all(|s| matches!(s, Slot::Var(_))) {
                let ftuple = term
                    .pattern
                    .slots
                    .iter()
                    .map(|s| tuple[s.variable().unwrap()])
                    .collect();
                out.add(f.clone(), ftuple, w)?;
            } else {
                out.add(term.constraint.clone(), tuple, w)?;
            }
        }
    }
    out.threshold = &phi.threshold * &beta;
    carry_exponent(phi, &mut out);

    let size_factor = dec.members.iter().map(|(_, l)| l.terms.len()).max().unwrap_or(1).max(1);
    let weight_constant = dec
        .members
        .iter()
        .map(|(_, l)| l.terms.iter().map(|t| t.coefficient.to_integer().abs()).sum::<BigInt>())
        .max()
        .unwrap_or_else(|| BigInt::from(1));
    let vm = ValueMap::Affine {
        scale: beta,
        shift: BigInt::zero(),
    };
    let bounds = Bounds::additive(0, size_factor, weight_constant, 0);
    let certificate = TransformCertificate::new("apply_poly", phi, &out, vm, bounds);
    Ok(TransformOutput { formula: out, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::certificate::verify_transformation;
    use std::sync::Arc;

    #[test]
    fn or2_over_xor_doubles() {
        let mut phi = Formula::new(2, WeightRange::Z).with_threshold(1);
        phi.add(Arc::new(catalog::or(2)), vec![0, 1], 1).unwrap();
        let src = catalog::language(&["OR2"]).unwrap();
        let dst = catalog::language(&["XOR"]).unwrap();
        let out = apply_poly(&phi, &src, &dst).unwrap();
        assert_eq!(out.formula.threshold, BigInt::from(2));
        assert_eq!(out.certificate.value_map, ValueMap::Affine { scale: 2.into(), shift: 0.into() });
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().fully_passed());
    }

    #[test]
    fn identity_over_same_language() {
        let xor = Arc::new(catalog::xor(2));
        let mut phi = Formula::new(3, WeightRange::Z).with_threshold(2);
        phi.add(xor.clone(), vec![0, 1], 3).unwrap();
        phi.add(xor, vec![2, 1], -1).unwrap();
        let l = catalog::language(&["XOR"]).unwrap();
        let out = apply_poly(&phi, &l, &l).unwrap();
        assert_eq!(out.formula, phi);
        assert_eq!(out.certificate.value_map, ValueMap::Affine { scale: 1.into(), shift: 0.into() });
    }

    #[test]
    fn negated_or3_over_ex3() {
        let or3n = catalog::resolve("OR3[x1,x2,~x3]", &[]).unwrap();
        let src = ConstraintLanguage::new("S", vec![or3n.clone()]).unwrap();
        let dst = catalog::language(&["EX3"]).unwrap();
        let mut phi = Formula::new(3, WeightRange::Z).with_threshold(1);
        phi.add(or3n, vec![0, 1, 2], 1).unwrap();
        let out = apply_poly(&phi, &src, &dst).unwrap();
        assert_eq!(out.formula.threshold, BigInt::from(6));
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().fully_passed());
    }

    #[test]
    fn degree_violation() {
        let src = catalog::language(&["XOR3"]).unwrap();
        let dst = catalog::language(&["XOR"]).unwrap();
        let phi = Formula::new(3, WeightRange::Z);
        assert!(matches!(apply_poly(&phi, &src, &dst), Err(Error::DegreeExcess { have: 3, limit: 2 })));
    }
}
