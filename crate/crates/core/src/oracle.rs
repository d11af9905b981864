//! Exhaustive reference solver.
//!
//! Assignments are enumerated in Gray-code order. Each application keeps its
//! current truth-table row, and flipping a variable XORs a precomputed mask
//! into the rows of the applications that mention it. Assignment codes put
//! `x1` in the most significant bit, so the lexicographically smallest
//! maximizer is the one with the smallest code.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::formula::Formula;

pub const DEFAULT_ORACLE_CAP: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub optimum: BigInt,
    pub witness: Vec<bool>,
}

impl SolveResult {
    pub fn decision(&self, t: &BigInt) -> bool {
        &self.optimum >= t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EquivalenceMode {
    /// `∃x Φ(x) ≥ t`.
    Geq,
    /// `∃x Φ(x) = t`.
    Eq,
}

/// Precompiled formula for enumeration with machine-word values.
struct Compiled {
    n: usize,
    tables: Vec<Vec<bool>>,
    weights: Vec<i64>,
    /// Per variable, the applications mentioning it and the row mask to flip.
    touches: Vec<Vec<(usize, usize)>>,
}

fn compile(phi: &Formula) -> Option<Compiled> {
    // Keep every partial sum safely inside i64.
    if phi.norm() > BigInt::from(i64::MAX / 4) {
        return None;
    }
    let n = phi.nvars();
    let mut tables = Vec::new();
    let mut weights = Vec::new();
    let mut touches = vec![Vec::new(); n];
    for (a, app) in phi.applications().enumerate() {
        let k = app.tuple.len();
        let mut masks = vec![0usize; n];
        for (pos, &j) in app.tuple.iter().enumerate() {
            masks[j] |= 1 << (k - 1 - pos);
        }
        for (j, &m) in masks.iter().enumerate() {
            if m != 0 {
                touches[j].push((a, m));
            }
        }
        tables.push(app.constraint.table().to_vec());
        weights.push(app.weight.to_i64()?);
    }
    Some(Compiled {
        n,
        tables,
        weights,
        touches,
    })
}

fn check_cap(phi: &Formula, cap: usize) -> Result<()> {
    if phi.nvars() > cap {
        return Err(Error::OracleCap {
            nvars: phi.nvars(),
            cap,
        });
    }
    Ok(())
}

fn code_bits(code: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| code >> (n - 1 - i) & 1 == 1).collect()
}

/// Visits every assignment once, as `(code, value)`.
fn enumerate_i64(c: &Compiled, mut visit: impl FnMut(u64, i64)) {
    let mut rows = vec![0usize; c.tables.len()];
    let mut value: i64 = c
        .tables
        .iter()
        .zip(&c.weights)
        .filter(|(t, _)| t[0])
        .map(|(_, w)| w)
        .sum();
    let mut code: u64 = 0;
    visit(code, value);
    let total: u64 = 1u64 << c.n;
    for step in 1..total {
        // Gray code: flip bit `b`, the position of the lowest set bit of step.
        let b = step.trailing_zeros() as usize;
        let var = c.n - 1 - b;
        code ^= 1 << b;
        for &(a, m) in &c.touches[var] {
            let t = &c.tables[a];
            let old = t[rows[a]];
            rows[a] ^= m;
            let new = t[rows[a]];
            if old != new {
                if new {
                    value += c.weights[a];
                } else {
                    value -= c.weights[a];
                }
            }
        }
        visit(code, value);
    }
}

fn enumerate_big(phi: &Formula, mut visit: impl FnMut(u64, BigInt)) {
    let n = phi.nvars();
    for code in 0..1u64 << n {
        visit(code, phi.value(&code_bits(code, n)));
    }
}

/// Optimum, smallest-code maximizer, and whether `exact` is attained.
fn scan(phi: &Formula, cap: usize, exact: Option<&BigInt>) -> Result<(SolveResult, bool)> {
    check_cap(phi, cap)?;
    let n = phi.nvars();
    if let Some(c) = compile(phi) {
        let target = exact.and_then(|t| t.to_i64());
        let mut best = i64::MIN;
        let mut best_code = u64::MAX;
        let mut hit = false;
        enumerate_i64(&c, |code, v| {
            if v > best || (v == best && code < best_code) {
                best = v;
                best_code = code;
            }
            if Some(v) == target {
                hit = true;
            }
        });
        let res = SolveResult {
            optimum: BigInt::from(best),
            witness: code_bits(best_code, n),
        };
        return Ok((res, hit));
    }
    let mut best: Option<BigInt> = None;
    let mut best_code = u64::MAX;
    let mut hit = false;
    enumerate_big(phi, |code, v| {
        if exact == Some(&v) {
            hit = true;
        }
        let better = match &best {
            None => true,
            Some(b) => v > *b || (v == *b && code < best_code),
        };
        if better {
            best = Some(v);
            best_code = code;
        }
    });
    let res = SolveResult {
        optimum: best.unwrap_or_else(BigInt::zero),
        witness: code_bits(best_code, n),
    };
    Ok((res, hit))
}

pub fn brute_force(phi: &Formula) -> Result<SolveResult> {
    brute_force_capped(phi, DEFAULT_ORACLE_CAP)
}

pub fn brute_force_capped(phi: &Formula, cap: usize) -> Result<SolveResult> {
    Ok(scan(phi, cap, None)?.0)
}

pub fn decide(phi: &Formula, t: &BigInt) -> Result<bool> {
    Ok(brute_force(phi)?.decision(t))
}

pub fn decide_exact(phi: &Formula, t: &BigInt) -> Result<bool> {
    decide_exact_capped(phi, t, DEFAULT_ORACLE_CAP)
}

pub fn decide_exact_capped(phi: &Formula, t: &BigInt, cap: usize) -> Result<bool> {
    Ok(scan(phi, cap, Some(t))?.1)
}

/// Both decisions for the formula's own threshold in one pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decisions {
    pub geq: bool,
    pub eq: bool,
}

pub fn decisions(phi: &Formula, cap: usize) -> Result<Decisions> {
    let (res, hit) = scan(phi, cap, Some(&phi.threshold))?;
    Ok(Decisions {
        geq: res.optimum >= phi.threshold,
        eq: hit,
    })
}

/// Compares the decisions of `(Φ₁, t₁)` and `(Φ₂, t₂)`.
pub fn check_equivalence(
    phi1: &Formula,
    t1: &BigInt,
    phi2: &Formula,
    t2: &BigInt,
    mode: EquivalenceMode,
    cap: usize,
) -> Result<bool> {
    Ok(match mode {
        EquivalenceMode::Geq => brute_force_capped(phi1, cap)?.decision(t1) == brute_force_capped(phi2, cap)?.decision(t2),
        EquivalenceMode::Eq => decide_exact_capped(phi1, t1, cap)? == decide_exact_capped(phi2, t2, cap)?,
    })
}

/// All values `Φ(x)` indexed by assignment code.
pub fn value_table(phi: &Formula, cap: usize) -> Result<Vec<BigInt>> {
    check_cap(phi, cap)?;
    let mut out = vec![BigInt::zero(); 1usize << phi.nvars()];
    match compile(phi) {
        Some(c) => enumerate_i64(&c, |code, v| out[code as usize] = BigInt::from(v)),
        None => enumerate_big(phi, |code, v| out[code as usize] = v),
    }
    Ok(out)
}

/// Checks `Φ₂(x) = a·Φ₁(x) + b` for every `x`, when both share the variable set.
pub fn check_affine(phi1: &Formula, phi2: &Formula, a: &BigInt, b: &BigInt, cap: usize) -> Result<bool> {
    if phi1.nvars() != phi2.nvars() {
        return Ok(false);
    }
    let v1 = value_table(phi1, cap)?;
    let v2 = value_table(phi2, cap)?;
    Ok(v1.iter().zip(&v2).all(|(x, y)| *y == a * x + b))
}
