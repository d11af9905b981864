//! Named constraints and languages used throughout the crate and its tests.
//!
//! Built-in names: `T`, `F`, `XOR` (= `XOR2`), `DICUT` (`x1 ∧ ¬x2`) and the
//! families `OR<k>`, `AND<k>`, `NAE<k>`, `XOR<k>`, `EX<k>` (exactly one true)
//! and `RNAE<k>`, the `3^k`-ary recursive composition of `NAE3`.
//!
//! Names may also be derived: `~g` is the negation of `g` and `g[x1,~x2,0]`
//! is `g` under a substitution pattern. [`resolve`] understands both forms.

use std::sync::Arc;

use crate::constraint::{Constraint, SubstitutionPattern};
use crate::error::{Error, Result};
use crate::language::{ClosureMode, ConstraintLanguage};

fn popcount(x: &[bool]) -> usize {
    x.iter().filter(|&&b| b).count()
}

pub fn t() -> Constraint {
    Constraint::from_fn("T", 1, |x| x[0]).unwrap()
}

pub fn f() -> Constraint {
    Constraint::from_fn("F", 1, |x| !x[0]).unwrap()
}

pub fn or(k: usize) -> Constraint {
    Constraint::from_fn(format!("OR{k}"), k, |x| popcount(x) > 0).unwrap()
}

pub fn and(k: usize) -> Constraint {
    Constraint::from_fn(format!("AND{k}"), k, |x| popcount(x) == x.len()).unwrap()
}

pub fn nae(k: usize) -> Constraint {
    Constraint::from_fn(format!("NAE{k}"), k, |x| {
        let p = popcount(x);
        p > 0 && p < x.len()
    })
    .unwrap()
}

pub fn xor(k: usize) -> Constraint {
    let name = if k == 2 { "XOR".to_string() } else { format!("XOR{k}") };
    Constraint::from_fn(name, k, |x| popcount(x) % 2 == 1).unwrap()
}

pub fn ex(k: usize) -> Constraint {
    Constraint::from_fn(format!("EX{k}"), k, |x| popcount(x) == 1).unwrap()
}

pub fn dicut() -> Constraint {
    Constraint::from_fn("DICUT", 2, |x| x[0] && !x[1]).unwrap()
}

/// `f_0(x) = x`, `f_k = NAE3(f_{k-1}(first third), f_{k-1}(second), f_{k-1}(third))`.
pub fn recursive_nae(level: u32) -> Constraint {
    fn eval(x: &[bool]) -> bool {
        if x.len() == 1 {
            return x[0];
        }
        let third = x.len() / 3;
        let a = eval(&x[..third]);
        let b = eval(&x[third..2 * third]);
        let c = eval(&x[2 * third..]);
        !(a == b && b == c)
    }
    Constraint::from_fn(format!("RNAE{level}"), 3usize.pow(level), eval).unwrap()
}

/// Looks up a built-in constraint by name.
pub fn builtin(name: &str) -> Option<Constraint> {
    match name {
        "T" => return Some(t()),
        "F" => return Some(f()),
        "XOR" => return Some(xor(2)),
        "DICUT" => return Some(dicut()),
        _ => {}
    }
    let split = name.find(|c: char| c.is_ascii_digit())?;
    let (family, digits) = name.split_at(split);
    let k: usize = digits.parse().ok().filter(|&k| k >= 1)?;
    let c = match family {
        "OR" => or(k),
        "AND" => and(k),
        "NAE" => nae(k),
        "XOR" => xor(k).with_name(name),
        "EX" => ex(k),
        "RNAE" if k <= 2 => recursive_nae(k as u32),
        _ => return None,
    };
    if c.arity() > crate::constraint::MAX_TABLE_ARITY {
        return None;
    }
    Some(c)
}

/// Language of built-in constraints, named by joining the member names.
pub fn language(names: &[&str]) -> Result<ConstraintLanguage> {
    let members = names
        .iter()
        .map(|n| builtin(n).map(Arc::new).ok_or_else(|| Error::UnknownConstraint(n.to_string())))
        .collect::<Result<Vec<_>>>()?;
    ConstraintLanguage::new(names.join(","), members)
}

/// `Γ_{d-SAT} = {OR_d}^{LIT}`.
pub fn d_sat(d: usize) -> ConstraintLanguage {
    let l = language(&[&format!("OR{d}")])
        .unwrap()
        .closure(ClosureMode::Literals)
        .unwrap();
    rename(l, format!("{d}SAT"))
}

/// `Γ_{d-AND} = {AND_1, ..., AND_d}`.
pub fn d_and(d: usize) -> ConstraintLanguage {
    let members = (1..=d).map(|k| Arc::new(and(k))).collect();
    ConstraintLanguage::new(format!("{d}AND"), members).unwrap()
}

fn rename(l: ConstraintLanguage, name: String) -> ConstraintLanguage {
    ConstraintLanguage::with_constants(name, l.constraints().to_vec()).unwrap()
}

/// Every built-in constraint family member of arity `1..=max_arity`.
pub fn standard_constraints(max_arity: usize) -> Vec<Constraint> {
    let mut out = vec![t(), f(), dicut()];
    for k in 1..=max_arity {
        out.push(or(k));
        out.push(and(k));
        out.push(xor(k));
        out.push(ex(k));
        if k >= 2 {
            out.push(nae(k));
        }
    }
    out
}

/// The fixed set of languages exercised by the property suites.
pub fn standard_languages() -> Vec<ConstraintLanguage> {
    let plain: &[&[&str]] = &[
        &["XOR"],
        &["NAE3"],
        &["EX3"],
        &["DICUT"],
        &["OR2"],
        &["AND2", "T"],
        &["XOR3"],
        &["NAE4"],
        &["EX2"],
        &["OR3", "F"],
        &["AND2", "XOR"],
    ];
    let mut out: Vec<ConstraintLanguage> = plain.iter().map(|n| language(n).unwrap()).collect();
    out.push(d_sat(2));
    out.push(language(&["NAE3"]).unwrap().closure(ClosureMode::Literals).unwrap());
    out.push(language(&["XOR"]).unwrap().closure(ClosureMode::Negations).unwrap());
    out
}

/// Resolves a possibly derived constraint name against `languages`, then the
/// built-ins. `~g` negates `g`; `g[slots]` applies a pattern to `g`.
pub fn resolve(name: &str, languages: &[&ConstraintLanguage]) -> Result<Arc<Constraint>> {
    for l in languages {
        if let Some(c) = l.get(name) {
            return Ok(c.clone());
        }
    }
    if let Some(rest) = name.strip_prefix('~') {
        return Ok(resolve(rest, languages)?.negation());
    }
    if name.ends_with(']') {
        if let Some(open) = matching_open(name) {
            let base = resolve(&name[..open], languages)?;
            let pattern = SubstitutionPattern::parse(&name[open..])?;
            if pattern.slots.len() != base.arity() {
                return Err(Error::UnknownConstraint(name.to_string()));
            }
            return base.apply_pattern(&pattern);
        }
    }
    builtin(name)
        .map(Arc::new)
        .ok_or_else(|| Error::UnknownConstraint(name.to_string()))
}

fn matching_open(name: &str) -> Option<usize> {
    let bytes = name.as_bytes();
    let mut depth = 0usize;
    for i in (0..bytes.len()).rev() {
        match bytes[i] {
            b']' => depth += 1,
            b'[' => {
                depth -= 1;
                if depth == 0 {
                    return (i > 0).then_some(i);
                }
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_by_name() {
        assert_eq!(builtin("XOR").unwrap().table(), &[false, true, true, false]);
        assert_eq!(builtin("XOR2").unwrap().name(), "XOR2");
        assert_eq!(builtin("NAE3").unwrap().count_satisfying(), 6);
        assert_eq!(builtin("EX3").unwrap().count_satisfying(), 3);
        assert_eq!(builtin("RNAE1").unwrap().arity(), 3);
        assert_eq!(builtin("RNAE2").unwrap().arity(), 9);
        assert!(builtin("FOO3").is_none());
        assert!(builtin("OR0").is_none());
    }

    #[test]
    fn recursive_nae_level_one_is_nae3() {
        assert!(recursive_nae(1).same_function(&nae(3)));
    }

    #[test]
    fn resolves_derived_names() {
        let l = language(&["NAE3"]).unwrap();
        let g = resolve("NAE3[x1,x2,0]", &[&l]).unwrap();
        assert!(g.same_function(&or(2)));
        let neg = resolve("~XOR", &[]).unwrap();
        assert_eq!(neg.table(), &[true, false, false, true]);
        let nested = resolve("~OR2[~x1,~x2]", &[]).unwrap();
        assert!(nested.same_function(&and(2)));
        assert!(resolve("NOPE", &[&l]).is_err());
        assert!(resolve("OR2[x1]", &[]).is_err());
    }

    #[test]
    fn two_sat_language_shape() {
        let l = d_sat(2);
        assert_eq!(l.len(), 7);
        assert!(l.contains_function(&t()));
        assert!(l.contains_function(&f()));
    }
}
