use num_bigint::BigInt;

use super::{carry_exponent, precondition, resolve_member, TransformOutput};
use crate::certificate::{Bounds, TransformCertificate, ValueMap};
use crate::classify::classify_language;
use crate::constraint::{PatternMode, Slot};
use crate::error::{Error, Result};
use crate::formula::{Formula, WeightRange};
use crate::implementation::{implement_constants, implement_xor, Implementation, SearchCaps};
use crate::language::ConstraintLanguage;

/// Replaces constants by two fresh variables `x_T`, `x_F` pinned by
/// `W`-weighted implementations, `W = 2·||Φ|| + 1`. A C-closed language
/// pins them with `XOR(x_T, x_F)`, any other with `T(x_T)` and `F(x_F)`.
pub fn implement_tf(phi: &Formula, language: &ConstraintLanguage, caps: SearchCaps) -> Result<TransformOutput> {
    let flags = classify_language(language).language;
    precondition(!flags.trivial, || format!("{} is trivial", language.name()))?;
    precondition(!flags.zero_valid, || format!("{} is 0-valid", language.name()))?;
    precondition(!flags.one_valid, || format!("{} is 1-valid", language.name()))?;

    let norm = phi.norm();
    if phi.threshold < -norm.clone() {
        // Every assignment reaches t, none equals it.
        let out = Formula::constant_instance(WeightRange::Z, -1);
        let certificate = TransformCertificate::new("implement_tf", phi, &out, ValueMap::Existential, Bounds::additive(1, 1, 1, 0));
        return Ok(TransformOutput { formula: out, certificate });
    }

    let gadgets: Vec<(Implementation, Vec<usize>)> = if flags.c_closed {
        let xor = implement_xor(language, caps)?.ok_or_else(|| Error::NoImplementation {
            target: "XOR".into(),
            reason: format!("no strict implementation over {} within the search caps", language.name()),
        })?;
        vec![(xor, vec![0, 1])]
    } else {
        let (t, f) = implement_constants(language, caps)?.ok_or_else(|| Error::NoImplementation {
            target: "T/F".into(),
            reason: format!("no strict constant implementations over {} within the search caps", language.name()),
        })?;
        vec![(t, vec![0]), (f, vec![1])]
    };

    let n = phi.nvars();
    let (x_t, x_f) = (n, n + 1);
    let aux: usize = gadgets.iter().map(|(g, _)| g.aux).sum();
    let mut out = Formula::new(n + 2 + aux, WeightRange::Z);
    for a in phi.applications() {
        let (m, pattern) = resolve_member(language, &a.constraint, PatternMode::Constants)?;
        let tuple = pattern
            .slots
            .iter()
            .map(|s| match *s {
                Slot::Var(j) => a.tuple[j],
                Slot::Const(true) => x_t,
                Slot::Const(false) => x_f,
                Slot::Neg(_) => unreachable!("constants-only resolution"),
            })
            .collect();
        out.add(m, tuple, a.weight)?;
    }
    let w: BigInt = 2 * &norm + 1;
    let mut next = n + 2;
    let mut alpha = 0usize;
    let mut gadget_apps = 0usize;
    for (g, prim) in &gadgets {
        let primaries: Vec<usize> = prim.iter().map(|&p| if p == 0 { x_t } else { x_f }).collect();
        for app in g.instantiate(&primaries, next) {
            out.add(app.constraint, app.tuple, w.clone())?;
        }
        next += g.aux;
        alpha += g.alpha;
        gadget_apps += g.applications.len();
    }
    out.threshold = BigInt::from(alpha) * &w + &phi.threshold;
    carry_exponent(phi, &mut out);
    let bounds = Bounds::additive(2 + aux, 1 + gadget_apps, 1 + 2 * gadget_apps, 0);
    let certificate = TransformCertificate::new("implement_tf", phi, &out, ValueMap::Existential, bounds);
    Ok(TransformOutput { formula: out, certificate })
}
