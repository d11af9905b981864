//! Transformation certificates and their verification.
//!
//! Each transform records the concrete constants it guarantees:
//!
//! * variables: `n_out ≤ n_in + var_constant` (additive) or
//!   `n_out ≤ var_factor · max(n_in, 1)` (linear);
//! * size: `size_out ≤ size_factor · (size_in + max(n_in, 1))`;
//! * weight: `weight_out ≤ weight_constant · (weight_in + 1) · max(n_in, 2)^weight_exponent`.
//!
//! Composed certificates derive their constants from the steps, so the
//! summary bound follows from the per-step bounds.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::formula::Formula;
use crate::oracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Additive,
    Linear,
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformKind::Additive => write!(f, "additive"),
            TransformKind::Linear => write!(f, "linear"),
        }
    }
}

/// How values of the input relate to values of the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueMap {
    /// Same variables and `Φ₂(x) = scale · Φ₁(x) + shift` for every `x`.
    Affine { scale: BigInt, shift: BigInt },
    /// Only the `≥ t` and `= t` questions correspond.
    Existential,
    /// The output is a constant instance encoding the `≥ t` answer only.
    Solved,
}

impl fmt::Display for ValueMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueMap::Affine { scale, shift } => write!(f, "affine {scale} {shift}"),
            ValueMap::Existential => write!(f, "existential"),
            ValueMap::Solved => write!(f, "solved"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformCertificate {
    pub transform: String,
    pub kind: TransformKind,
    pub n_in: usize,
    pub n_out: usize,
    pub size_in: usize,
    pub size_out: usize,
    pub weight_in: BigInt,
    pub weight_out: BigInt,
    pub threshold_in: BigInt,
    pub threshold_out: BigInt,
    pub value_map: ValueMap,
    pub var_constant: usize,
    pub var_factor: usize,
    pub size_factor: BigInt,
    pub weight_constant: BigInt,
    pub weight_exponent: u32,
    pub steps: Vec<TransformCertificate>,
}

/// Constants a transform guarantees, independent of the instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub kind: TransformKind,
    pub var_constant: usize,
    pub var_factor: usize,
    pub size_factor: BigInt,
    pub weight_constant: BigInt,
    pub weight_exponent: u32,
}

impl Bounds {
    pub fn additive(var_constant: usize, size_factor: impl Into<BigInt>, weight_constant: impl Into<BigInt>, weight_exponent: u32) -> Self {
        Bounds {
            kind: TransformKind::Additive,
            var_constant,
            var_factor: 1 + var_constant,
            size_factor: size_factor.into(),
            weight_constant: weight_constant.into(),
            weight_exponent,
        }
    }

    pub fn linear(var_factor: usize, size_factor: impl Into<BigInt>, weight_constant: impl Into<BigInt>, weight_exponent: u32) -> Self {
        Bounds {
            kind: TransformKind::Linear,
            var_constant: 0,
            var_factor,
            size_factor: size_factor.into(),
            weight_constant: weight_constant.into(),
            weight_exponent,
        }
    }
}

impl TransformCertificate {
    pub fn new(transform: impl Into<String>, input: &Formula, output: &Formula, value_map: ValueMap, bounds: Bounds) -> Self {
        TransformCertificate {
            transform: transform.into(),
            kind: bounds.kind,
            n_in: input.nvars(),
            n_out: output.nvars(),
            size_in: input.size(),
            size_out: output.size(),
            weight_in: input.norm(),
            weight_out: output.norm(),
            threshold_in: input.threshold.clone(),
            threshold_out: output.threshold.clone(),
            value_map,
            var_constant: bounds.var_constant,
            var_factor: bounds.var_factor,
            size_factor: bounds.size_factor,
            weight_constant: bounds.weight_constant,
            weight_exponent: bounds.weight_exponent,
            steps: Vec::new(),
        }
    }

    /// Growth factor of `max(n, 2)` across this transform.
    fn growth(&self) -> BigInt {
        BigInt::from(match self.kind {
            TransformKind::Additive => 1 + self.var_constant,
            TransformKind::Linear => self.var_factor,
        })
    }

    /// Sequential composition; `steps` must be non-empty and chained.
    pub fn compose(transform: impl Into<String>, steps: Vec<TransformCertificate>) -> TransformCertificate {
        let first = steps.first().expect("composition of no steps");
        let last = steps.last().unwrap();
        let kind = if steps.iter().all(|s| s.kind == TransformKind::Additive) {
            TransformKind::Additive
        } else {
            TransformKind::Linear
        };
        let mut value_map = ValueMap::Affine {
            scale: BigInt::one(),
            shift: BigInt::zero(),
        };
        for s in &steps {
            value_map = match (&value_map, &s.value_map) {
                (_, ValueMap::Solved) | (ValueMap::Solved, _) => ValueMap::Solved,
                (ValueMap::Affine { scale: a1, shift: b1 }, ValueMap::Affine { scale: a2, shift: b2 }) => {
                    ValueMap::Affine {
                        scale: a2 * a1,
                        shift: a2 * b1 + b2,
                    }
                }
                _ => ValueMap::Existential,
            };
        }
        let mut growth = BigInt::one();
        let mut size_factor = BigInt::one();
        let mut weight_constant = BigInt::one();
        let mut weight_exponent = 0;
        for s in &steps {
            weight_constant *= (&s.weight_constant + 1u32) * growth.pow(s.weight_exponent);
            weight_exponent += s.weight_exponent;
            size_factor *= &s.size_factor + s.growth();
            growth *= s.growth();
        }
        let var_constant = steps.iter().map(|s| s.var_constant).sum();
        let var_factor = growth.try_into().unwrap_or(usize::MAX);
        TransformCertificate {
            transform: transform.into(),
            kind,
            n_in: first.n_in,
            n_out: last.n_out,
            size_in: first.size_in,
            size_out: last.size_out,
            weight_in: first.weight_in.clone(),
            weight_out: last.weight_out.clone(),
            threshold_in: first.threshold_in.clone(),
            threshold_out: last.threshold_out.clone(),
            value_map,
            var_constant,
            var_factor,
            size_factor,
            weight_constant,
            weight_exponent,
            steps,
        }
    }

    pub fn variables_ok(&self) -> bool {
        match self.kind {
            TransformKind::Additive => self.n_out <= self.n_in + self.var_constant,
            TransformKind::Linear => self.n_out <= self.var_factor.saturating_mul(self.n_in.max(1)),
        }
    }

    pub fn size_ok(&self) -> bool {
        BigInt::from(self.size_out) <= &self.size_factor * BigInt::from(self.size_in + self.n_in.max(1))
    }

    pub fn weight_ok(&self) -> bool {
        let n = BigInt::from(self.n_in.max(2));
        self.weight_out <= &self.weight_constant * (&self.weight_in + 1u32) * n.pow(self.weight_exponent)
    }

    pub fn threshold_ok(&self) -> bool {
        match &self.value_map {
            ValueMap::Affine { scale, shift } => self.threshold_out == scale * &self.threshold_in + shift,
            _ => true,
        }
    }

    /// Steps connect: each step's output matches the next step's input.
    pub fn chained_ok(&self) -> bool {
        self.steps.windows(2).all(|w| {
            w[0].n_out == w[1].n_in
                && w[0].size_out == w[1].size_in
                && w[0].weight_out == w[1].weight_in
                && w[0].threshold_out == w[1].threshold_in
        }) && self.steps.iter().all(|s| s.accounting_ok())
    }

    pub fn accounting_ok(&self) -> bool {
        self.variables_ok() && self.size_ok() && self.weight_ok() && self.threshold_ok() && self.chained_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skipped(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Pass => write!(f, "PASS"),
            Outcome::Fail => write!(f, "FAIL"),
            Outcome::Skipped(why) => write!(f, "SKIP ({why})"),
        }
    }
}

fn outcome(b: bool) -> Outcome {
    if b {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub rows: Vec<(String, Outcome)>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|(_, o)| *o != Outcome::Fail)
    }

    /// True when no row failed and none was skipped.
    pub fn fully_passed(&self) -> bool {
        self.rows.iter().all(|(_, o)| *o == Outcome::Pass)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, o) in &self.rows {
            writeln!(f, "{name:<28} {o}")?;
        }
        Ok(())
    }
}

/// Checks the recorded accounting against both formulas and, within the
/// oracle cap, the decision equivalences and the affine value relation.
pub fn verify_transformation(
    input: &Formula,
    output: &Formula,
    cert: &TransformCertificate,
    cap: usize,
) -> Result<VerificationReport> {
    let mut rows = Vec::new();
    let matches = cert.n_in == input.nvars()
        && cert.n_out == output.nvars()
        && cert.size_in == input.size()
        && cert.size_out == output.size()
        && cert.weight_in == input.norm()
        && cert.weight_out == output.norm()
        && cert.threshold_in == input.threshold
        && cert.threshold_out == output.threshold;
    rows.push(("record matches formulas".to_string(), outcome(matches)));
    rows.push(("(1) variables".to_string(), outcome(cert.variables_ok())));
    rows.push(("(2) size".to_string(), outcome(cert.size_ok())));
    rows.push(("(3) weight".to_string(), outcome(cert.weight_ok())));
    rows.push(("threshold map".to_string(), outcome(cert.threshold_ok())));
    rows.push(("steps compose".to_string(), outcome(cert.chained_ok())));
    let within = input.nvars() <= cap && output.nvars() <= cap;
    if within {
        let a = oracle::decisions(input, cap)?;
        let b = oracle::decisions(output, cap)?;
        rows.push(("(4) exists >= t".to_string(), outcome(a.geq == b.geq)));
        match cert.value_map {
            ValueMap::Solved => rows.push(("(5) exists = t".to_string(), Outcome::Skipped("solved instance".into()))),
            _ => rows.push(("(5) exists = t".to_string(), outcome(a.eq == b.eq))),
        }
    } else {
        let why = format!("over oracle cap {cap}");
        rows.push(("(4) exists >= t".to_string(), Outcome::Skipped(why.clone())));
        rows.push(("(5) exists = t".to_string(), Outcome::Skipped(why)));
    }
    if let ValueMap::Affine { scale, shift } = &cert.value_map {
        if input.nvars() == output.nvars() && within {
            let ok = oracle::check_affine(input, output, scale, shift, cap)?;
            rows.push(("affine values".to_string(), outcome(ok)));
        }
    }
    Ok(VerificationReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::WeightRange;

    fn bare(n_in: usize, n_out: usize, bounds: Bounds, vm: ValueMap) -> TransformCertificate {
        let a = Formula::new(n_in, WeightRange::Z);
        let b = Formula::new(n_out, WeightRange::Z);
        TransformCertificate::new("t", &a, &b, vm, bounds)
    }

    #[test]
    fn affine_maps_compose() {
        let s1 = bare(2, 2, Bounds::additive(0, 1, 1, 0), ValueMap::Affine { scale: 2.into(), shift: 1.into() });
        let s2 = bare(2, 2, Bounds::additive(0, 1, 1, 0), ValueMap::Affine { scale: 3.into(), shift: (-4).into() });
        let c = TransformCertificate::compose("c", vec![s1, s2]);
        assert_eq!(c.value_map, ValueMap::Affine { scale: 6.into(), shift: (-1).into() });
        assert_eq!(c.kind, TransformKind::Additive);
    }

    #[test]
    fn linear_step_makes_chain_linear() {
        let s1 = bare(2, 4, Bounds::additive(2, 1, 1, 0), ValueMap::Existential);
        let s2 = bare(4, 8, Bounds::linear(2, 1, 1, 1), ValueMap::Existential);
        let c = TransformCertificate::compose("c", vec![s1, s2]);
        assert_eq!(c.kind, TransformKind::Linear);
        assert_eq!(c.var_factor, 6);
        assert!(c.accounting_ok());
    }

    #[test]
    fn violated_variable_bound_is_detected() {
        let s = bare(2, 5, Bounds::additive(2, 1, 1, 0), ValueMap::Existential);
        assert!(!s.variables_ok());
    }
}
