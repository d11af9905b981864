//! Boolean constraints stored as truth tables, and substitution patterns.
//!
//! A `k`-ary constraint is stored as `2^k` Boolean values. Row `s` of the
//! table holds `f(s_1, ..., s_k)` where the assignment is read as a `k`-bit
//! number with variable 1 in the most significant position, so for `OR2` the
//! table is `[f(0,0), f(0,1), f(1,0), f(1,1)] = [0, 1, 1, 1]`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest arity for which a truth table is materialized.
pub const MAX_TABLE_ARITY: usize = 20;

/// How a constraint was obtained from another one.
#[derive(Clone, Debug)]
pub enum Derivation {
    /// `g(x_1..x_d) = base(slots)`.
    Pattern {
        base: Arc<Constraint>,
        pattern: SubstitutionPattern,
    },
    /// `g = ¬base` pointwise.
    Negation { base: Arc<Constraint> },
}

/// A named Boolean function `{0,1}^k -> {0,1}`.
///
/// Equality and hashing only look at the name, the arity and the table; the
/// optional derivation is bookkeeping used by the reductions.
#[derive(Clone, Debug)]
pub struct Constraint {
    name: String,
    arity: usize,
    table: Vec<bool>,
    derivation: Option<Derivation>,
}

impl PartialEq for Constraint {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.arity == other.arity && self.table == other.table
    }
}

impl Eq for Constraint {}

impl Hash for Constraint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.name.hash(state);
        self.arity.hash(state);
        self.table.hash(state);
    }
}

/// Index of the table row for `args` (variable 1 is the most significant bit).
#[inline]
pub fn row_index(args: &[bool]) -> usize {
    args.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
}

/// Bits of row `index` of a `k`-ary table, variable 1 first.
pub fn row_bits(index: usize, k: usize) -> Vec<bool> {
    (0..k).map(|i| (index >> (k - 1 - i)) & 1 == 1).collect()
}

/// Parses a bit string such as `"011"`.
pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn check_table_arity(arity: usize) -> Result<()> {
    if arity > MAX_TABLE_ARITY {
        return Err(Error::ArityCap {
            arity,
            cap: MAX_TABLE_ARITY,
            what: "truth tables",
        });
    }
    Ok(())
}

impl Constraint {
    /// Builds a constraint from a full truth table.
    pub fn new(name: impl Into<String>, arity: usize, table: Vec<bool>) -> Result<Self> {
        check_table_arity(arity)?;
        if table.len() != 1usize << arity {
            return Err(Error::Format(format!(
                "truth table of length {} does not match arity {}",
                table.len(),
                arity
            )));
        }
        Ok(Constraint {
            name: name.into(),
            arity,
            table,
            derivation: None,
        })
    }

    /// Builds a constraint from its satisfying rows. Duplicate rows are ignored.
    pub fn from_rows<I, R>(name: impl Into<String>, arity: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[bool]>,
    {
        check_table_arity(arity)?;
        let mut table = vec![false; 1 << arity];
        for row in rows {
            let row = row.as_ref();
            if row.len() != arity {
                return Err(Error::Format(format!(
                    "row of width {} in a constraint of arity {}",
                    row.len(),
                    arity
                )));
            }
            table[row_index(row)] = true;
        }
        Constraint::new(name, arity, table)
    }

    /// Builds a constraint from bit strings like `"01"`.
    pub fn from_bit_strings(name: impl Into<String>, arity: usize, rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| parse_bits(r).ok_or_else(|| Error::Format(format!("bad bit string `{r}`"))))
            .collect::<Result<Vec<_>>>()?;
        Constraint::from_rows(name, arity, parsed)
    }

    /// Tabulates a predicate over all assignments.
    pub fn from_fn(name: impl Into<String>, arity: usize, f: impl Fn(&[bool]) -> bool) -> Result<Self> {
        check_table_arity(arity)?;
        let table = (0..1usize << arity).map(|i| f(&row_bits(i, arity))).collect();
        Constraint::new(name, arity, table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        self.derivation.as_ref()
    }

    pub fn with_name(&self, name: impl Into<String>) -> Constraint {
        Constraint {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Drops the derivation record.
    pub fn detached(&self) -> Constraint {
        Constraint {
            derivation: None,
            ..self.clone()
        }
    }

    pub fn eval(&self, args: &[bool]) -> bool {
        debug_assert_eq!(args.len(), self.arity);
        self.table[row_index(args)]
    }

    pub fn eval_row(&self, index: usize) -> bool {
        self.table[index]
    }

    /// Number of satisfying rows, `|f|`.
    pub fn count_satisfying(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    pub fn satisfying_rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn is_trivial(&self) -> bool {
        self.table.iter().all(|&b| b == self.table[0])
    }

    /// True iff both constraints denote the same function.
    pub fn same_function(&self, other: &Constraint) -> bool {
        self.arity == other.arity && self.table == other.table
    }

    /// Pointwise negation; negating a negation returns the original.
    pub fn negation(self: &Arc<Self>) -> Arc<Constraint> {
        if let Some(Derivation::Negation { base }) = &self.derivation {
            return base.clone();
        }
        Arc::new(Constraint {
            name: format!("~{}", self.name),
            arity: self.arity,
            table: self.table.iter().map(|b| !b).collect(),
            derivation: Some(Derivation::Negation { base: self.clone() }),
        })
    }

    /// Evaluates `self` under `pattern`: the result is the `d`-ary constraint
    /// `g(x_1..x_d) = self(slot_1, ..., slot_k)`.
    pub fn apply_pattern(self: &Arc<Self>, pattern: &SubstitutionPattern) -> Result<Arc<Constraint>> {
        if pattern.slots.len() != self.arity {
            return Err(Error::Format(format!(
                "pattern with {} slots applied to `{}` of arity {}",
                pattern.slots.len(),
                self.name,
                self.arity
            )));
        }
        pattern.validate()?;
        let d = pattern.target_arity;
        check_table_arity(d)?;
        let mut args = vec![false; self.arity];
        let table = (0..1usize << d)
            .map(|row| {
                let x = row_bits(row, d);
                for (arg, slot) in args.iter_mut().zip(&pattern.slots) {
                    *arg = slot.eval(&x);
                }
                self.eval(&args)
            })
            .collect();
        Ok(Arc::new(Constraint {
            name: format!("{}{}", self.name, pattern),
            arity: d,
            table,
            derivation: Some(Derivation::Pattern {
                base: self.clone(),
                pattern: pattern.clone(),
            }),
        }))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// One position of a substitution pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    /// Target variable `x_{i+1}`.
    Var(usize),
    /// Negated target variable `¬x_{i+1}`.
    Neg(usize),
    Const(bool),
}

impl Slot {
    pub fn eval(&self, x: &[bool]) -> bool {
        match *self {
            Slot::Var(i) => x[i],
            Slot::Neg(i) => !x[i],
            Slot::Const(c) => c,
        }
    }

    pub fn negated(self) -> Slot {
        match self {
            Slot::Var(i) => Slot::Neg(i),
            Slot::Neg(i) => Slot::Var(i),
            Slot::Const(c) => Slot::Const(!c),
        }
    }

    pub fn variable(&self) -> Option<usize> {
        match *self {
            Slot::Var(i) | Slot::Neg(i) => Some(i),
            Slot::Const(_) => None,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Var(i) => write!(f, "x{}", i + 1),
            Slot::Neg(i) => write!(f, "~x{}", i + 1),
            Slot::Const(c) => write!(f, "{}", *c as u8),
        }
    }
}

/// Which slot kinds a pattern may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PatternMode {
    /// Variables and the constants 0/1 (expressibility with constants).
    Constants,
    /// Variables and negated variables (expressibility with literals).
    Literals,
    /// Any slot kind.
    Mixed,
}

/// The vector `(ξ_1, ..., ξ_k)` substituted into a `k`-ary constraint to get
/// a `d`-ary one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubstitutionPattern {
    pub target_arity: usize,
    pub slots: Vec<Slot>,
    pub mode: PatternMode,
}

impl SubstitutionPattern {
    pub fn new(target_arity: usize, slots: Vec<Slot>, mode: PatternMode) -> Result<Self> {
        let p = SubstitutionPattern {
            target_arity,
            slots,
            mode,
        };
        p.validate()?;
        Ok(p)
    }

    /// Picks the narrowest mode that admits `slots`.
    pub fn infer(target_arity: usize, slots: Vec<Slot>) -> Result<Self> {
        let has_neg = slots.iter().any(|s| matches!(s, Slot::Neg(_)));
        let has_const = slots.iter().any(|s| matches!(s, Slot::Const(_)));
        let mode = match (has_neg, has_const) {
            (true, true) => PatternMode::Mixed,
            (true, false) => PatternMode::Literals,
            (false, _) => PatternMode::Constants,
        };
        SubstitutionPattern::new(target_arity, slots, mode)
    }

    pub fn identity(k: usize) -> Self {
        SubstitutionPattern {
            target_arity: k,
            slots: (0..k).map(Slot::Var).collect(),
            mode: PatternMode::Constants,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.target_arity == self.slots.len()
            && self.slots.iter().enumerate().all(|(i, s)| *s == Slot::Var(i))
    }

    pub fn validate(&self) -> Result<()> {
        for slot in &self.slots {
            if let Some(i) = slot.variable() {
                if i >= self.target_arity {
                    return Err(Error::Format(format!(
                        "slot {} references a variable beyond target arity {}",
                        slot, self.target_arity
                    )));
                }
            }
            match (self.mode, slot) {
                (PatternMode::Constants, Slot::Neg(_)) => {
                    return Err(Error::Format(format!("negated slot {slot} in a constants pattern")))
                }
                (PatternMode::Literals, Slot::Const(_)) => {
                    return Err(Error::Format(format!("constant slot {slot} in a literals pattern")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Pattern for `h` over `f`, given `self` for `g` over `f` and `inner` for
    /// `h` over `g`.
    pub fn then(&self, inner: &SubstitutionPattern) -> Result<SubstitutionPattern> {
        if inner.slots.len() != self.target_arity {
            return Err(Error::Format(format!(
                "cannot compose: inner pattern has {} slots, outer target arity is {}",
                inner.slots.len(),
                self.target_arity
            )));
        }
        let slots = self
            .slots
            .iter()
            .map(|s| match *s {
                Slot::Const(c) => Slot::Const(c),
                Slot::Var(i) => inner.slots[i],
                Slot::Neg(i) => inner.slots[i].negated(),
            })
            .collect();
        SubstitutionPattern::infer(inner.target_arity, slots)
    }

    /// Parses the bracketed form `[x1,~x2,0]`; the target arity is the
    /// largest variable index mentioned.
    pub fn parse(s: &str) -> Result<Self> {
        let inner = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Format(format!("pattern `{s}` is not bracketed")))?;
        let mut slots = Vec::new();
        if !inner.is_empty() {
            for tok in inner.split(',') {
                let slot = match tok {
                    "0" => Slot::Const(false),
                    "1" => Slot::Const(true),
                    _ => {
                        let (neg, rest) = match tok.strip_prefix('~') {
                            Some(r) => (true, r),
                            None => (false, tok),
                        };
                        let idx: usize = rest
                            .strip_prefix('x')
                            .and_then(|n| n.parse().ok())
                            .filter(|&n: &usize| n >= 1)
                            .ok_or_else(|| Error::Format(format!("bad slot `{tok}` in pattern `{s}`")))?;
                        if neg {
                            Slot::Neg(idx - 1)
                        } else {
                            Slot::Var(idx - 1)
                        }
                    }
                };
                slots.push(slot);
            }
        }
        let d = slots.iter().filter_map(|s| s.variable()).map(|i| i + 1).max().unwrap_or(0);
        SubstitutionPattern::infer(d, slots)
    }
}

impl fmt::Display for SubstitutionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, s) in self.slots.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}
