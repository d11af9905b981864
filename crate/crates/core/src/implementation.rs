//! Strict α-implementations: verification, bounded search and composition.
//!
//! An implementation of a `p`-ary target uses `p` primary variables
//! (indices `0..p`) followed by `q` auxiliary ones (`p..p+q`).

use std::collections::HashSet;
use std::sync::Arc;

use crate::catalog;
use crate::classify::classify_language;
use crate::constraint::{row_index, Constraint};
use crate::error::{Error, Result};
use crate::formula::Application;
use crate::io;
use crate::language::ConstraintLanguage;

/// Largest `p + q` the verifier enumerates.
pub const MAX_IMPLEMENTATION_VARS: usize = 20;
/// Largest `p + q` the search enumerates (assignment sets fit in a `u64`).
pub const MAX_SEARCH_VARS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Implementation {
    pub target: Arc<Constraint>,
    pub primary: usize,
    pub aux: usize,
    pub applications: Vec<Application>,
    pub alpha: usize,
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    pub alpha: usize,
    pub strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchCaps {
    pub max_aux: usize,
    pub max_apps: usize,
    pub max_target_arity: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_aux: 2,
            max_apps: 4,
            max_target_arity: 3,
        }
    }
}

/// Exhaustive check over all `2^{p+q}` assignments; `α` is the global maximum.
pub fn verify_implementation(
    target: &Constraint,
    primary: usize,
    aux: usize,
    applications: &[Application],
) -> Result<Verification> {
    let nvars = primary + aux;
    if target.arity() != primary {
        return Err(Error::Format(format!(
            "target {} has arity {} but the implementation has {} primary variables",
            target.name(),
            target.arity(),
            primary
        )));
    }
    if nvars > MAX_IMPLEMENTATION_VARS {
        return Err(Error::ArityCap {
            arity: nvars,
            cap: MAX_IMPLEMENTATION_VARS,
            what: "implementation verification",
        });
    }
    for a in applications {
        if a.tuple.len() != a.constraint.arity() {
            return Err(Error::Format(format!(
                "{} has arity {} but is applied to {} variables",
                a.constraint.name(),
                a.constraint.arity(),
                a.tuple.len()
            )));
        }
        if let Some(&j) = a.tuple.iter().find(|&&j| j >= nvars) {
            return Err(Error::IndexOutOfRange { index: j + 1, nvars });
        }
    }
    let mut best = vec![0usize; 1 << primary];
    let mut x = vec![false; nvars];
    for code in 0..1usize << nvars {
        for (i, b) in x.iter_mut().enumerate() {
            *b = code >> (nvars - 1 - i) & 1 == 1;
        }
        let count = applications.iter().filter(|a| a.eval(&x)).count();
        let px = code >> aux;
        best[px] = best[px].max(count);
    }
    Ok(judge(target, &best))
}

/// Validity from the per-primary maxima.
fn judge(target: &Constraint, best: &[usize]) -> Verification {
    let alpha = best.iter().copied().max().unwrap_or(0);
    let mut valid = alpha >= 1;
    let mut strict = true;
    for (px, &m) in best.iter().enumerate() {
        if target.eval_row(px) {
            valid &= m == alpha;
        } else {
            valid &= m < alpha;
            strict &= m + 1 == alpha;
        }
    }
    Verification {
        valid,
        alpha,
        strict: valid && strict,
    }
}

impl Implementation {
    /// Verifies and packages; `None` when the candidate is not a valid
    /// implementation.
    pub fn certify(target: Arc<Constraint>, primary: usize, aux: usize, applications: Vec<Application>) -> Result<Option<Self>> {
        let v = verify_implementation(&target, primary, aux, &applications)?;
        Ok(v.valid.then_some(Implementation {
            target,
            primary,
            aux,
            applications,
            alpha: v.alpha,
            strict: v.strict,
        }))
    }

    pub fn verify(&self) -> Result<Verification> {
        verify_implementation(&self.target, self.primary, self.aux, &self.applications)
    }

    pub fn nvars(&self) -> usize {
        self.primary + self.aux
    }

    /// Applications with primaries bound to `primaries` and auxiliaries
    /// numbered from `aux_start`.
    pub fn instantiate(&self, primaries: &[usize], aux_start: usize) -> Vec<Application> {
        self.applications
            .iter()
            .map(|a| Application {
                constraint: a.constraint.clone(),
                tuple: a
                    .tuple
                    .iter()
                    .map(|&v| if v < self.primary { primaries[v] } else { aux_start + v - self.primary })
                    .collect(),
            })
            .collect()
    }

    /// Implements a constraint by itself with a single application.
    pub fn identity(c: Arc<Constraint>) -> Self {
        let k = c.arity();
        Implementation {
            target: c.clone(),
            primary: k,
            aux: 0,
            applications: vec![Application::new(c, (0..k).collect())],
            alpha: 1,
            strict: true,
        }
    }
}

/// Implementations shipped with the library, in the text format of
/// [`io::emit_implementation`]. Each is re-verified when used.
const CATALOG: &str = "\
impl XOR p=2 q=0 alpha=1 strict=1
XOR 1 2
end
impl XOR p=2 q=0 alpha=1 strict=1
NAE3 1 2 2
end
impl XOR p=2 q=0 alpha=2 strict=1
OR2 1 2
OR2[~x1,~x2] 1 2
end
impl XOR p=2 q=0 alpha=1 strict=1
DICUT 1 2
DICUT 2 1
end
impl XOR p=2 q=0 alpha=1 strict=1
EX3 1 1 2
EX3 1 2 2
end
impl T p=1 q=0 alpha=1 strict=1
T 1
end
impl F p=1 q=0 alpha=1 strict=1
F 1
end
impl T p=1 q=1 alpha=1 strict=1
EX3 1 2 2
end
impl F p=1 q=2 alpha=2 strict=1
EX3 1 2 3
EX3 2 2 3
end
impl T p=1 q=1 alpha=1 strict=1
DICUT 1 2
end
impl F p=1 q=1 alpha=1 strict=1
DICUT 2 1
end
";

/// Parsed catalog entries (over built-in constraints).
pub fn catalog_entries() -> Result<Vec<Implementation>> {
    io::parse_implementations(CATALOG, &[])
}

/// Rebinds an implementation onto members of `language`, matching by function.
fn rebind(entry: &Implementation, language: &ConstraintLanguage) -> Option<Vec<Application>> {
    entry
        .applications
        .iter()
        .map(|a| {
            language
                .find_function(&a.constraint)
                .map(|m| Application::new(m.clone(), a.tuple.clone()))
        })
        .collect()
}

/// First catalog entry for `target` expressible over `language`, re-verified.
pub fn from_catalog(language: &ConstraintLanguage, target: &Arc<Constraint>) -> Result<Option<Implementation>> {
    for entry in catalog_entries()? {
        if !entry.target.same_function(target) {
            continue;
        }
        if let Some(apps) = rebind(&entry, language) {
            if let Some(imp) = Implementation::certify(target.clone(), entry.primary, entry.aux, apps)? {
                if imp.strict {
                    return Ok(Some(imp));
                }
            }
        }
    }
    Ok(None)
}

/// Why no implementation can exist, when that follows from closure
/// properties shared by every non-trivial member of the language.
fn obstruction(language: &ConstraintLanguage, target: &Constraint) -> Option<&'static str> {
    let rep = classify_language(language);
    let t = crate::classify::classify(target);
    if rep.language.zero_valid && !t.zero_valid {
        return Some("every member is 0-valid but the target is not");
    }
    if rep.language.one_valid && !t.one_valid {
        return Some("every member is 1-valid but the target is not");
    }
    if rep.language.c_closed && !t.c_closed {
        return Some("every member is C-closed but the target is not");
    }
    None
}

/// Catalog first, then exhaustive search by increasing `q`, then increasing
/// number of applications. Candidates are ordered by constraint name and
/// tuple; the first strict implementation found is returned.
pub fn search_implementation(
    language: &ConstraintLanguage,
    target: &Arc<Constraint>,
    caps: SearchCaps,
) -> Result<Option<Implementation>> {
    let p = target.arity();
    if p > caps.max_target_arity {
        return Err(Error::ArityCap {
            arity: p,
            cap: caps.max_target_arity,
            what: "implementation search targets",
        });
    }
    if let Some(imp) = from_catalog(language, target)? {
        return Ok(Some(imp));
    }
    if obstruction(language, target).is_some() {
        return Ok(None);
    }
    for q in 0..=caps.max_aux {
        if p + q > MAX_SEARCH_VARS {
            break;
        }
        if let Some(imp) = search_fixed_aux(language, target, q, caps.max_apps)? {
            return Ok(Some(imp));
        }
    }
    Ok(None)
}

/// Diagnostic for a failed search.
pub fn explain_failure(language: &ConstraintLanguage, target: &Constraint, caps: SearchCaps) -> String {
    match obstruction(language, target) {
        Some(r) => r.to_string(),
        None => format!(
            "no strict implementation with at most {} auxiliary variables and {} applications",
            caps.max_aux, caps.max_apps
        ),
    }
}

struct Candidate {
    app: Application,
    /// Bit `code` is set when the application holds at assignment `code`.
    mask: u64,
}

fn candidates(language: &ConstraintLanguage, nvars: usize) -> Vec<Candidate> {
    let mut members: Vec<&Arc<Constraint>> = language.iter().filter(|c| c.arity() >= 1).collect();
    members.sort_by(|a, b| a.name().cmp(b.name()));
    let full: u64 = if nvars == 6 { u64::MAX } else { (1u64 << (1 << nvars)) - 1 };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in members {
        let k = c.arity();
        let total = nvars.pow(k as u32);
        for idx in 0..total {
            let mut tuple = vec![0usize; k];
            let mut r = idx;
            for slot in tuple.iter_mut().rev() {
                *slot = r % nvars;
                r /= nvars;
            }
            let mut mask = 0u64;
            for code in 0..1usize << nvars {
                let args: Vec<bool> = tuple.iter().map(|&j| code >> (nvars - 1 - j) & 1 == 1).collect();
                if c.eval_row(row_index(&args)) {
                    mask |= 1 << code;
                }
            }
            if mask == 0 || mask == full || !seen.insert(mask) {
                continue;
            }
            out.push(Candidate {
                app: Application::new(c.clone(), tuple),
                mask,
            });
        }
    }
    out
}

fn search_fixed_aux(
    language: &ConstraintLanguage,
    target: &Arc<Constraint>,
    q: usize,
    max_apps: usize,
) -> Result<Option<Implementation>> {
    let p = target.arity();
    let nvars = p + q;
    if nvars == 0 {
        return Ok(None);
    }
    let cands = candidates(language, nvars);
    let npoints = 1usize << nvars;
    for m in 1..=max_apps {
        let mut counts = vec![0u8; npoints];
        let mut chosen = Vec::with_capacity(m);
        if let Some(sel) = dfs(&cands, target, p, q, m, 0, &mut counts, &mut chosen) {
            let apps = sel.into_iter().map(|i| cands[i].app.clone()).collect();
            let imp = Implementation::certify(target.clone(), p, q, apps)?
                .expect("search and verifier disagree");
            debug_assert!(imp.strict);
            return Ok(Some(imp));
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    cands: &[Candidate],
    target: &Constraint,
    p: usize,
    q: usize,
    m: usize,
    start: usize,
    counts: &mut [u8],
    chosen: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    if chosen.len() == m {
        let best: Vec<usize> = (0..1usize << p)
            .map(|px| {
                let base = px << q;
                (0..1usize << q).map(|y| counts[base + y] as usize).max().unwrap()
            })
            .collect();
        let v = judge(target, &best);
        return (v.valid && v.strict).then(|| chosen.clone());
    }
    for i in start..cands.len() {
        let mask = cands[i].mask;
        for (code, c) in counts.iter_mut().enumerate() {
            *c += (mask >> code & 1) as u8;
        }
        chosen.push(i);
        let found = dfs(cands, target, p, q, m, i, counts, chosen);
        chosen.pop();
        for (code, c) in counts.iter_mut().enumerate() {
            *c -= (mask >> code & 1) as u8;
        }
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Replaces every outer application whose constraint is the target of an
/// inner implementation by that implementation, with fresh auxiliaries.
pub fn compose_implementations(outer: &Implementation, inner: &[Implementation]) -> Result<Implementation> {
    if !outer.strict || inner.iter().any(|i| !i.strict) {
        return Err(Error::Precondition("composition needs strict implementations".into()));
    }
    let mut next = outer.primary + outer.aux;
    let mut apps = Vec::new();
    for a in &outer.applications {
        match inner.iter().find(|i| i.target.same_function(&a.constraint)) {
            Some(imp) => {
                apps.extend(imp.instantiate(&a.tuple, next));
                next += imp.aux;
            }
            None => apps.push(a.clone()),
        }
    }
    let aux = next - outer.primary;
    match Implementation::certify(outer.target.clone(), outer.primary, aux, apps)? {
        Some(imp) if imp.strict => Ok(imp),
        _ => Err(Error::NoImplementation {
            target: outer.target.name().to_string(),
            reason: "composition did not verify as strict".into(),
        }),
    }
}

pub fn implement(language: &ConstraintLanguage, target: &Arc<Constraint>, caps: SearchCaps) -> Result<Option<Implementation>> {
    search_implementation(language, target, caps)
}

/// `T` and `F` implementations, when both exist within the caps.
pub fn implement_constants(
    language: &ConstraintLanguage,
    caps: SearchCaps,
) -> Result<Option<(Implementation, Implementation)>> {
    let t = implement(language, &Arc::new(catalog::t()), caps)?;
    let f = implement(language, &Arc::new(catalog::f()), caps)?;
    Ok(t.zip(f))
}

/// A strict XOR implementation: direct search, or via `T`/`F` when the
/// language is not C-closed.
pub fn implement_xor(language: &ConstraintLanguage, caps: SearchCaps) -> Result<Option<Implementation>> {
    let xor = Arc::new(catalog::xor(2));
    if let Some(imp) = implement(language, &xor, caps)? {
        return Ok(Some(imp));
    }
    if classify_language(language).language.c_closed {
        return Ok(None);
    }
    let Some((t, f)) = implement_constants(language, caps)? else {
        return Ok(None);
    };
    let helpers = ConstraintLanguage::new("TF", vec![t.target.clone(), f.target.clone()])?;
    let extended = language.union(&helpers);
    let Some(outer) = implement(&extended, &xor, caps)? else {
        return Ok(None);
    };
    compose_implementations(&outer, &[t, f]).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::ClosureMode;

    fn arc(c: Constraint) -> Arc<Constraint> {
        Arc::new(c)
    }

    fn lit_or2() -> ConstraintLanguage {
        catalog::language(&["OR2"]).unwrap().closure(ClosureMode::Literals).unwrap()
    }

    #[test]
    fn or2_pair_implements_xor() {
        let or2 = arc(catalog::or(2));
        let nand = catalog::resolve("OR2[~x1,~x2]", &[]).unwrap();
        let apps = vec![Application::new(or2.clone(), vec![0, 1]), Application::new(nand, vec![0, 1])];
        let v = verify_implementation(&catalog::xor(2), 2, 0, &apps).unwrap();
        assert_eq!(v, Verification { valid: true, alpha: 2, strict: true });
        let v = verify_implementation(&catalog::xor(2), 2, 0, &apps[..1]).unwrap();
        assert!(!v.valid);
    }

    #[test]
    fn self_implementation() {
        let t = arc(catalog::t());
        let imp = Implementation::identity(t.clone());
        assert_eq!(imp.verify().unwrap(), Verification { valid: true, alpha: 1, strict: true });
    }

    #[test]
    fn out_of_range_index() {
        let apps = vec![Application::new(arc(catalog::xor(2)), vec![0, 2])];
        assert!(matches!(
            verify_implementation(&catalog::xor(2), 2, 0, &apps),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn catalog_entries_verify() {
        for e in catalog_entries().unwrap() {
            let v = e.verify().unwrap();
            assert!(v.valid && v.strict, "{}", e.target.name());
            assert_eq!(v.alpha, e.alpha, "{}", e.target.name());
        }
    }

    #[test]
    fn searches_find_xor() {
        let caps = SearchCaps::default();
        let imp = search_implementation(&lit_or2(), &arc(catalog::xor(2)), caps).unwrap().unwrap();
        assert_eq!(imp.alpha, 2);
        assert_eq!(imp.applications.len(), 2);
        let x = search_implementation(&catalog::language(&["XOR"]).unwrap(), &arc(catalog::xor(2)), caps)
            .unwrap()
            .unwrap();
        assert_eq!(x.alpha, 1);
        let n = search_implementation(&catalog::language(&["NAE3"]).unwrap(), &arc(catalog::xor(2)), caps)
            .unwrap()
            .unwrap();
        assert_eq!(n.applications[0].tuple, vec![0, 1, 1]);
    }

    #[test]
    fn plain_search_without_catalog() {
        // XOR(x1,x2) ∧ x3 is in no catalog entry. XOR needs no auxiliaries:
        // G(x,y,x) + G(y,x,y).
        let g = arc(Constraint::from_fn("G", 3, |x| (x[0] != x[1]) && x[2]).unwrap());
        let l = ConstraintLanguage::new("G", vec![g]).unwrap();
        for target in [catalog::t(), catalog::f(), catalog::xor(2)] {
            let imp = search_implementation(&l, &arc(target.clone()), SearchCaps::default()).unwrap();
            let imp = imp.unwrap_or_else(|| panic!("{}", target.name()));
            assert!(imp.verify().unwrap().strict);
            assert!(imp.applications.len() <= 2);
        }
    }

    #[test]
    fn obstructions_short_circuit() {
        let caps = SearchCaps::default();
        let nae = catalog::language(&["NAE3"]).unwrap();
        assert!(search_implementation(&nae, &arc(catalog::t()), caps).unwrap().is_none());
        let or2 = catalog::language(&["OR2"]).unwrap();
        assert!(search_implementation(&or2, &arc(catalog::f()), caps).unwrap().is_none());
        assert!(explain_failure(&or2, &catalog::f(), caps).contains("1-valid"));
    }

    #[test]
    fn composition_through_constants() {
        let ex3 = catalog::language(&["EX3"]).unwrap();
        let (t, f) = implement_constants(&ex3, SearchCaps::default()).unwrap().unwrap();
        let helpers = ConstraintLanguage::new("TF", vec![t.target.clone(), f.target.clone()]).unwrap();
        let extended = ex3.union(&helpers);
        let outer = implement(&extended, &arc(catalog::xor(2)), SearchCaps::default()).unwrap().unwrap();
        let composed = compose_implementations(&outer, &[t, f]).unwrap();
        assert!(composed.verify().unwrap().strict);
        assert!(composed.applications.iter().all(|a| a.constraint.name() == "EX3"));
    }

    #[test]
    fn composition_with_identity_is_unchanged() {
        let xor = arc(catalog::xor(2));
        let outer = Implementation::identity(xor.clone());
        let composed = compose_implementations(&outer, &[Implementation::identity(xor)]).unwrap();
        assert_eq!(composed.applications, outer.applications);
        assert_eq!(composed.alpha, 1);
    }

    #[test]
    fn non_strict_inputs_are_rejected() {
        // Two copies of T(x): α = 2, but x = 0 only reaches 0.
        let t = arc(catalog::t());
        let apps = vec![Application::new(t.clone(), vec![0]), Application::new(t.clone(), vec![0])];
        let loose = Implementation::certify(t, 1, 0, apps).unwrap().unwrap();
        assert!(!loose.strict);
        assert!(compose_implementations(&loose, &[]).is_err());
    }

    #[test]
    fn xor_for_every_np_hard_standard_language() {
        for l in catalog::standard_languages() {
            let rep = classify_language(&l);
            if rep.verdict != crate::classify::Verdict::NpHard {
                continue;
            }
            let imp = implement_xor(&l, SearchCaps::default()).unwrap();
            let imp = imp.unwrap_or_else(|| panic!("no XOR for {}", l.name()));
            assert!(imp.verify().unwrap().strict, "{}", l.name());
        }
    }
}
