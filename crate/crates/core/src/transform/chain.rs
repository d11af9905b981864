use std::sync::Arc;

use super::{apply_poly, implement_lit, implement_tf, neg_to_base, precondition, unsigned_lit, TransformOutput};
use crate::catalog;
use crate::certificate::{Bounds, TransformCertificate, ValueMap};
use crate::classify::classify_language;
use crate::error::Result;
use crate::formula::Formula;
use crate::implementation::SearchCaps;
use crate::language::ConstraintLanguage;

/// `apply_poly` then `implement_tf`: from `source` over `Z` to `target` over `Z`.
pub fn additive_chain(
    phi: &Formula,
    source: &ConstraintLanguage,
    target: &ConstraintLanguage,
    caps: SearchCaps,
) -> Result<TransformOutput> {
    let a = apply_poly(phi, source, target)?;
    let b = implement_tf(&a.formula, target, caps)?;
    let certificate = TransformCertificate::compose("additive", vec![a.certificate, b.certificate]);
    Ok(TransformOutput {
        formula: b.formula,
        certificate,
    })
}

/// Renames every application to the member of `language` with the same
/// function, when all have one.
fn rebind(phi: &Formula, language: &ConstraintLanguage) -> Result<Option<Formula>> {
    let mut out = Formula::new(phi.nvars(), phi.weight_range()).with_threshold(phi.threshold.clone());
    out.declared_weight_exponent = phi.declared_weight_exponent;
    for a in phi.applications() {
        match language.find_function(&a.constraint) {
            Some(m) => out.add(m.clone(), a.tuple, a.weight)?,
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// The additive chain followed by `unsigned_lit` and `implement_lit`, ending
/// over `target` with range `N`. When `target` already contains every
/// literal variant produced, the last step is a renaming.
pub fn linear_chain(
    phi: &Formula,
    source: &ConstraintLanguage,
    target: &ConstraintLanguage,
    caps: SearchCaps,
) -> Result<TransformOutput> {
    let flags = classify_language(target).language;
    precondition(!flags.trivial, || format!("{} is trivial", target.name()))?;
    precondition(!flags.zero_valid, || format!("{} is 0-valid", target.name()))?;
    precondition(!flags.one_valid, || format!("{} is 1-valid", target.name()))?;
    precondition(!flags.two_monotone, || format!("{} is 2-monotone", target.name()))?;
    let a = additive_chain(phi, source, target, caps)?;
    let b = unsigned_lit(&a.formula)?;
    let c = match rebind(&b.formula, target)? {
        Some(f) => {
            let vm = ValueMap::Affine {
                scale: 1.into(),
                shift: 0.into(),
            };
            let certificate = TransformCertificate::new("rebind", &b.formula, &f, vm, Bounds::additive(0, 1, 1, 0));
            TransformOutput { formula: f, certificate }
        }
        None => implement_lit(&b.formula, target, caps)?,
    };
    let certificate = TransformCertificate::compose("linear", vec![a.certificate, b.certificate, c.certificate]);
    Ok(TransformOutput {
        formula: c.formula,
        certificate,
    })
}

#[derive(Clone, Debug)]
pub struct CycleReport {
    pub output: TransformOutput,
    /// `(stage, nvars)` after each leg, starting with the input.
    pub stages: Vec<(String, usize)>,
}

impl CycleReport {
    pub fn variable_growth(&self) -> usize {
        self.output.certificate.n_out - self.output.certificate.n_in
    }
}

/// `Γ_2SAT → {XOR, ¬XOR} → {XOR} → Γ_2SAT`, all over `Z`.
pub fn reduction_cycle(phi: &Formula, caps: SearchCaps) -> Result<CycleReport> {
    let sat = catalog::d_sat(2);
    let xor = Arc::new(catalog::xor(2));
    let xor_neg = ConstraintLanguage::new("XOR+~XOR", vec![xor.clone(), xor.negation()])?;
    let xor_only = ConstraintLanguage::new("XOR", vec![xor])?;
    let a = additive_chain(phi, &sat, &xor_neg, caps)?;
    let b = neg_to_base(&a.formula, &xor_only)?;
    let c = additive_chain(&b.formula, &xor_only, &sat, caps)?;
    let stages = vec![
        (sat.name().to_string(), phi.nvars()),
        (xor_neg.name().to_string(), a.formula.nvars()),
        (xor_only.name().to_string(), b.formula.nvars()),
        (sat.name().to_string(), c.formula.nvars()),
    ];
    let certificate = TransformCertificate::compose("cycle", vec![a.certificate, b.certificate, c.certificate]);
    Ok(CycleReport {
        output: TransformOutput {
            formula: c.formula,
            certificate,
        },
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::{verify_transformation, TransformKind};
    use crate::formula::WeightRange;

    fn sample(l: &ConstraintLanguage, n: usize, t: i64) -> Formula {
        let mut phi = Formula::new(n, WeightRange::Z).with_threshold(t);
        for (i, c) in l.iter().enumerate() {
            let tuple = (0..c.arity()).map(|j| (i + 2 * j) % n).collect();
            phi.add(c.clone(), tuple, (i as i64 % 5) - 2).unwrap();
        }
        phi
    }

    #[test]
    fn same_language_additive_is_near_identity() {
        let l = catalog::language(&["XOR"]).unwrap();
        let phi = sample(&l, 3, 1);
        let out = additive_chain(&phi, &l, &l, SearchCaps::default()).unwrap();
        assert_eq!(out.certificate.kind, TransformKind::Additive);
        assert_eq!(out.certificate.steps[0].value_map, ValueMap::Affine { scale: 1.into(), shift: 0.into() });
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().fully_passed());
    }

    #[test]
    fn two_sat_to_xor_linear() {
        let sat = catalog::d_sat(2);
        let xor = catalog::language(&["XOR"]).unwrap();
        for t in -2..=3 {
            let phi = sample(&sat, 4, t);
            let out = linear_chain(&phi, &sat, &xor, SearchCaps::default()).unwrap();
            assert_eq!(out.certificate.kind, TransformKind::Linear);
            assert!(out.formula.is_over(&xor));
            let r = verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap();
            assert!(r.fully_passed(), "t={t}\n{r}");
        }
    }

    #[test]
    fn and_language_to_nae3() {
        let and = catalog::d_and(2);
        let nae = catalog::language(&["NAE3"]).unwrap();
        let mut phi = Formula::new(3, WeightRange::Z).with_threshold(2);
        phi.add(Arc::new(catalog::and(2)), vec![0, 1], 3).unwrap();
        phi.add(Arc::new(catalog::and(1)), vec![2], -1).unwrap();
        let out = linear_chain(&phi, &and, &nae, SearchCaps::default()).unwrap();
        assert!(verify_transformation(&phi, &out.formula, &out.certificate, 24).unwrap().fully_passed());
    }

    #[test]
    fn linear_chain_names_failing_condition() {
        let and = catalog::d_and(2);
        let target = catalog::language(&["T", "F"]).unwrap();
        let e = linear_chain(&Formula::new(1, WeightRange::Z), &and, &target, SearchCaps::default()).unwrap_err();
        assert!(e.to_string().contains("2-monotone"));
    }

    #[test]
    fn cycle_round_trip() {
        let sat = catalog::d_sat(2);
        for t in -1..=2 {
            let phi = sample(&sat, 4, t);
            let rep = reduction_cycle(&phi, SearchCaps::default()).unwrap();
            assert_eq!(rep.output.certificate.kind, TransformKind::Additive);
            assert!(rep.variable_growth() <= rep.output.certificate.var_constant);
            let r = verify_transformation(&phi, &rep.output.formula, &rep.output.certificate, 24).unwrap();
            assert!(r.fully_passed(), "{r}");
            assert!(rep.output.formula.is_over(&sat));
        }
    }
}
