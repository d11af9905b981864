use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{carry_exponent, precondition, resolve_member, TransformOutput};
use crate::certificate::{Bounds, TransformCertificate, ValueMap};
use crate::classify::classify_language;
use crate::constraint::{Constraint, PatternMode, Slot, SubstitutionPattern};
use crate::error::{Error, Result};
use crate::formula::{Formula, WeightRange};
use crate::implementation::{implement_xor, SearchCaps};
use crate::language::ConstraintLanguage;

/// All `2^k` literal variants of `c`, in subset order (bit `i` of the index
/// negates argument `i + 1`); index 0 is `c` itself.
fn literal_variants(c: &Arc<Constraint>) -> Result<Vec<Arc<Constraint>>> {
    let k = c.arity();
    let mut out = vec![c.clone()];
    for s in 1..1usize << k {
        let slots = (0..k).map(|i| if s >> i & 1 == 1 { Slot::Neg(i) } else { Slot::Var(i) }).collect();
        let p = SubstitutionPattern::new(k, slots, PatternMode::Literals)?;
        out.push(c.apply_pattern(&p)?);
    }
    Ok(out)
}

/// Removes negative weights by adding, on every used `(f, tuple)`, all
/// literal variants of `f` with weight `W = max(0, −min w)`. These sum to the
/// constant `|f|`, so `Φ'(x) = Φ(x) + W·Σ|f|`.
pub fn unsigned_lit(phi: &Formula) -> Result<TransformOutput> {
    let min = phi.applications().map(|a| a.weight).min().unwrap_or_else(BigInt::zero);
    let w = if min.is_negative() { -min } else { BigInt::zero() };
    let mut out = phi.clone();
    let mut shift = BigInt::zero();
    let mut variants: HashMap<String, Vec<Arc<Constraint>>> = HashMap::new();
    let mut kmax = 0;
    if !w.is_zero() {
        out.set_weight_range(WeightRange::Z)?;
        for a in phi.applications() {
            kmax = kmax.max(a.constraint.arity());
            if !variants.contains_key(a.constraint.name()) {
                variants.insert(a.constraint.name().to_string(), literal_variants(&a.constraint)?);
            }
            for v in &variants[a.constraint.name()] {
                out.add(v.clone(), a.tuple.clone(), w.clone())?;
            }
            shift += &w * BigInt::from(a.constraint.count_satisfying());
        }
    }
    out.set_weight_range(WeightRange::N)?;
    out.threshold = &phi.threshold + &shift;
    carry_exponent(phi, &mut out);
    let spread = 1usize << kmax;
    let distinct = variants.len().max(1);
    let bounds = Bounds::additive(0, spread, 1 + spread * distinct, kmax as u32);
    let vm = ValueMap::Affine {
        scale: 1.into(),
        shift,
    };
    let certificate = TransformCertificate::new("unsigned_lit", phi, &out, vm, bounds);
    Ok(TransformOutput { formula: out, certificate })
}

/// Removes negated arguments by giving each variable `x_i` a copy `x̂_i`
/// linked by a `W`-weighted XOR implementation, `W = ||Φ|| + 1`; negated
/// slots read the copy instead.
pub fn implement_lit(phi: &Formula, language: &ConstraintLanguage, caps: SearchCaps) -> Result<TransformOutput> {
    precondition(phi.weight_range() == WeightRange::N, || "implement_lit needs weight range N".into())?;
    let flags = classify_language(language).language;
    precondition(!flags.trivial, || format!("{} is trivial", language.name()))?;
    precondition(!flags.zero_valid, || format!("{} is 0-valid", language.name()))?;
    precondition(!flags.one_valid, || format!("{} is 1-valid", language.name()))?;
    precondition(!flags.two_monotone, || format!("{} is 2-monotone", language.name()))?;

    if phi.threshold.is_negative() {
        // Values are nonnegative: `≥ t` always holds, `= t` never does.
        let out = Formula::constant_instance(WeightRange::N, -1);
        let bounds = Bounds::linear(1, 1, 1, 0);
        let certificate = TransformCertificate::new("implement_lit", phi, &out, ValueMap::Existential, bounds);
        return Ok(TransformOutput { formula: out, certificate });
    }

    let xor = implement_xor(language, caps)?.ok_or_else(|| Error::NoImplementation {
        target: "XOR".into(),
        reason: format!("no strict implementation over {} within the search caps", language.name()),
    })?;
    let n = phi.nvars();
    let q = xor.aux;
    let mut out = Formula::new((2 + q) * n, WeightRange::N);
    for a in phi.applications() {
        let (m, pattern) = resolve_member(language, &a.constraint, PatternMode::Literals)?;
        let tuple = pattern
            .slots
            .iter()
            .map(|s| match *s {
                Slot::Var(j) => a.tuple[j],
                Slot::Neg(j) => n + a.tuple[j],
                Slot::Const(_) => unreachable!("literals-only resolution"),
            })
            .collect();
        out.add(m, tuple, a.weight)?;
    }
    let w: BigInt = phi.norm() + 1;
    for i in 0..n {
        for app in xor.instantiate(&[i, n + i], 2 * n + i * q) {
            out.add(app.constraint, app.tuple, w.clone())?;
        }
    }
    out.threshold = BigInt::from(n * xor.alpha) * &w + &phi.threshold;
    carry_exponent(phi, &mut out);
    let g = xor.applications.len();
    let bounds = Bounds::linear(2 + q, 1 + g, 1 + g, 1);
    let certificate = TransformCertificate::new("implement_lit", phi, &out, ValueMap::Existential, bounds);
    Ok(TransformOutput { formula: out, certificate })
}
