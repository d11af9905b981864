use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{carry_exponent, TransformOutput};
use crate::certificate::{Bounds, TransformCertificate, ValueMap};
use crate::error::{Error, Result};
use crate::formula::{Formula, WeightRange};
use crate::language::ConstraintLanguage;

/// Rewrites applications of `¬f` as `f` with negated weight, using
/// `w·¬f = w − w·f`. The output is over `base` with range `Z`.
pub fn neg_to_base(phi: &Formula, base: &ConstraintLanguage) -> Result<TransformOutput> {
    let mut out = Formula::new(phi.nvars(), WeightRange::Z);
    let mut shift = BigInt::zero();
    for a in phi.applications() {
        if let Some(m) = base.find_function(&a.constraint) {
            out.add(m.clone(), a.tuple, a.weight)?;
        } else if let Some(m) = base.find_function(&a.constraint.negation()) {
            shift -= &a.weight;
            out.add(m.clone(), a.tuple, -a.weight)?;
        } else {
            return Err(Error::Precondition(format!(
                "`{}` is neither in {} nor the negation of a member",
                a.constraint.name(),
                base.name()
            )));
        }
    }
    out.threshold = &phi.threshold + &shift;
    carry_exponent(phi, &mut out);
    let vm = ValueMap::Affine {
        scale: 1.into(),
        shift,
    };
    let certificate = TransformCertificate::new("neg_to_base", phi, &out, vm, Bounds::additive(0, 1, 1, 0));
    Ok(TransformOutput { formula: out, certificate })
}

/// Replaces each negative-weight application by its negation with the
/// absolute weight. The output has range `N`.
pub fn signed_to_unsigned_neg(phi: &Formula) -> Result<TransformOutput> {
    let mut out = Formula::new(phi.nvars(), WeightRange::N);
    let mut shift = BigInt::zero();
    for a in phi.applications() {
        if a.weight.is_negative() {
            shift -= &a.weight;
            out.add(a.constraint.negation(), a.tuple, -a.weight)?;
        } else {
            out.add(a.constraint, a.tuple, a.weight)?;
        }
    }
    out.threshold = &phi.threshold + &shift;
    carry_exponent(phi, &mut out);
    let vm = ValueMap::Affine {
        scale: 1.into(),
        shift,
    };
    let certificate = TransformCertificate::new("signed_to_unsigned_neg", phi, &out, vm, Bounds::additive(0, 1, 1, 0));
    Ok(TransformOutput { formula: out, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::certificate::verify_transformation;
    use std::sync::Arc;

    fn xor() -> Arc<crate::Constraint> {
        Arc::new(catalog::xor(2))
    }

    #[test]
    fn negated_xor_becomes_negative_xor() {
        let mut phi = Formula::new(2, WeightRange::Z).with_threshold(4);
        phi.add(xor().negation(), vec![0, 1], 4).unwrap();
        let base = catalog::language(&["XOR"]).unwrap();
        let out = neg_to_base(&phi, &base).unwrap();
        assert_eq!(out.formula.weight_of("XOR", &[0, 1]), Some(&BigInt::from(-4)));
        assert_eq!(out.formula.threshold, BigInt::from(0));
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().fully_passed());
    }

    #[test]
    fn mixed_shift_counts_negated_only() {
        let or2 = Arc::new(catalog::or(2));
        let mut phi = Formula::new(2, WeightRange::Z).with_threshold(1);
        phi.add(or2.clone(), vec![0, 1], 2).unwrap();
        phi.add(or2.negation(), vec![1, 0], 3).unwrap();
        let out = neg_to_base(&phi, &catalog::language(&["OR2"]).unwrap()).unwrap();
        assert_eq!(out.certificate.value_map, ValueMap::Affine { scale: 1.into(), shift: (-3).into() });
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().fully_passed());
    }

    #[test]
    fn unnegated_input_is_unchanged() {
        let mut phi = Formula::new(2, WeightRange::Z).with_threshold(7);
        phi.add(xor(), vec![0, 1], 3).unwrap();
        let out = neg_to_base(&phi, &catalog::language(&["XOR"]).unwrap()).unwrap();
        assert_eq!(out.formula, phi);
    }

    #[test]
    fn negative_weights_flip() {
        let mut phi = Formula::new(2, WeightRange::Z).with_threshold(0);
        phi.add(xor(), vec![0, 1], -4).unwrap();
        let out = signed_to_unsigned_neg(&phi).unwrap();
        assert_eq!(out.formula.weight_of("~XOR", &[0, 1]), Some(&BigInt::from(4)));
        assert_eq!(out.formula.threshold, BigInt::from(4));
        assert_eq!(out.formula.weight_range(), WeightRange::N);
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().fully_passed());
    }

    #[test]
    fn both_polarities_flip() {
        let mut phi = Formula::new(2, WeightRange::Z).with_threshold(-1);
        phi.add(xor(), vec![0, 1], -1).unwrap();
        phi.add(xor().negation(), vec![0, 1], -1).unwrap();
        let out = signed_to_unsigned_neg(&phi).unwrap();
        assert_eq!(out.formula.threshold, BigInt::from(1));
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().fully_passed());
    }
}
