//! Decision-preserving transformations between weighted formulas.
//!
//! Every transform returns the output formula (with its threshold) and a
//! [`TransformCertificate`] recording the value map and the constants it
//! guarantees.

mod apply_poly;
mod chain;
mod implement_tf;
mod kernel;
mod literals;
mod signed;
mod vertex_cover;

use std::sync::Arc;

pub use apply_poly::apply_poly;
pub use chain::{additive_chain, linear_chain, reduction_cycle, CycleReport};
pub use implement_tf::implement_tf;
pub use kernel::{compress_to_polynomial, kernelize, KernelReport};
pub use literals::{implement_lit, unsigned_lit};
pub use signed::{neg_to_base, signed_to_unsigned_neg};
pub use vertex_cover::vc_reduce;

use crate::certificate::TransformCertificate;
use crate::constraint::{Constraint, Derivation, PatternMode, Slot, SubstitutionPattern};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::language::ConstraintLanguage;

#[derive(Clone, Debug)]
pub struct TransformOutput {
    pub formula: Formula,
    pub certificate: TransformCertificate,
}

/// Outputs inherit a declared weight exponent as the smallest valid one.
fn carry_exponent(input: &Formula, output: &mut Formula) {
    if input.declared_weight_exponent.is_some() {
        output.declared_weight_exponent = Some(output.minimal_weight_exponent());
    }
}

/// Writes `c` as `member(pattern)` for a member of `language`, following
/// pattern derivations. Patterns of a disallowed kind are rejected.
fn resolve_member(
    language: &ConstraintLanguage,
    c: &Arc<Constraint>,
    allow: PatternMode,
) -> Result<(Arc<Constraint>, SubstitutionPattern)> {
    if let Some(m) = language.find_function(c) {
        return Ok((m.clone(), SubstitutionPattern::identity(c.arity())));
    }
    if let Some(Derivation::Pattern { base, pattern }) = c.derivation() {
        let admitted = pattern.slots.iter().all(|s| {
            !matches!((allow, s), (PatternMode::Constants, Slot::Neg(_)) | (PatternMode::Literals, Slot::Const(_)))
        });
        if admitted {
            if let Ok((m, inner)) = resolve_member(language, base, allow) {
                return Ok((m, inner.then(pattern)?));
            }
        }
    }
    let what = match allow {
        PatternMode::Constants => "constant substitutions",
        PatternMode::Literals => "literal substitutions",
        PatternMode::Mixed => "substitutions",
    };
    Err(Error::Precondition(format!(
        "`{}` is not a member of {} up to {what}",
        c.name(),
        language.name()
    )))
}

fn precondition(ok: bool, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Precondition(message()))
    }
}
