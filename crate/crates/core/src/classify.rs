//! Structural properties of constraints and the Max CSP dichotomy.

use std::fmt;

use crate::constraint::Constraint;
use crate::language::ConstraintLanguage;

/// Per-constraint properties.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Flags {
    pub trivial: bool,
    pub zero_valid: bool,
    pub one_valid: bool,
    pub two_monotone: bool,
    pub c_closed: bool,
    pub symmetric: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    PolyTimeSolvable,
    NpHard,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub per_constraint: Vec<(String, Flags)>,
    /// Each flag holds iff every non-trivial member has it; `trivial` holds
    /// iff every member is trivial.
    pub language: Flags,
    pub verdict: Verdict,
}

/// Witness `(P, Q)` of 2-monotonicity, as bit masks over variable positions
/// (bit `i` = variable `i + 1`). `None` marks an absent term.
pub type MonotoneWitness = (Option<u32>, Option<u32>);

pub fn classify(f: &Constraint) -> Flags {
    let k = f.arity();
    let table = f.table();
    let n = table.len();
    let all = n - 1;
    let trivial = f.is_trivial();
    let zero_valid = table[0];
    let one_valid = table[all];
    // Complementing every input maps row i to row !i.
    let c_closed = (0..n).all(|i| table[i] == table[all ^ i]);
    let mut by_weight: Vec<Option<bool>> = vec![None; k + 1];
    let mut symmetric = true;
    for (i, &v) in table.iter().enumerate() {
        let w = i.count_ones() as usize;
        match by_weight[w] {
            None => by_weight[w] = Some(v),
            Some(u) if u != v => {
                symmetric = false;
                break;
            }
            _ => {}
        }
    }
    Flags {
        trivial,
        zero_valid,
        one_valid,
        two_monotone: two_monotone_witness(f).is_some(),
        c_closed,
        symmetric,
    }
}

/// Finds `P`, `Q` with `f ≡ (∧_{i∈P} x_i) ∨ (∧_{j∈Q} ¬x_j)`, where an absent
/// term contributes nothing and at least one term is present.
///
/// For a fixed positive term the best negative term is forced: it must cover
/// the rows of `f` outside the positive cube, and the smallest zero-cube doing
/// so fixes to zero exactly the coordinates that vanish on all those rows.
pub fn two_monotone_witness(f: &Constraint) -> Option<MonotoneWitness> {
    let k = f.arity();
    let table = f.table();
    let rows = table.len();
    // Row index r has variable i at bit (k - 1 - i).
    let row_mask = |vars: u32| -> usize {
        (0..k)
            .filter(|i| vars >> i & 1 == 1)
            .fold(0usize, |acc, i| acc | 1 << (k - 1 - i))
    };
    let full: usize = rows - 1;
    let positive_options = std::iter::once(None).chain((0..1u32 << k).map(Some));
    for p in positive_options {
        let pm = p.map(row_mask);
        let in_pos = |r: usize| pm.is_some_and(|m| r & m == m);
        if (0..rows).any(|r| in_pos(r) && !table[r]) {
            continue;
        }
        let mut zero_everywhere = full;
        let mut residual = false;
        for (r, &sat) in table.iter().enumerate() {
            if sat && !in_pos(r) {
                residual = true;
                zero_everywhere &= !r;
            }
        }
        if !residual {
            if p.is_some() {
                return Some((p, None));
            }
            // No positive term and nothing to cover: f is constant 0, which
            // needs at least one term; any present term is satisfiable.
            continue;
        }
        // Negative cube {r : r & zero_everywhere == 0}.
        let covered = (0..rows).all(|r| {
            let in_neg = r & zero_everywhere == 0;
            table[r] == (in_pos(r) || in_neg)
        });
        if covered {
            let q = (0..k)
                .filter(|&i| zero_everywhere >> (k - 1 - i) & 1 == 1)
                .fold(0u32, |acc, i| acc | 1 << i);
            return Some((p, Some(q)));
        }
    }
    None
}

pub fn classify_language(language: &ConstraintLanguage) -> ClassificationReport {
    let per_constraint: Vec<(String, Flags)> = language
        .iter()
        .map(|c| (c.name().to_string(), classify(c)))
        .collect();
    let nontrivial: Vec<&Flags> = per_constraint
        .iter()
        .map(|(_, fl)| fl)
        .filter(|fl| !fl.trivial)
        .collect();
    let all = |p: fn(&Flags) -> bool| nontrivial.iter().all(|fl| p(fl));
    let lang = Flags {
        trivial: nontrivial.is_empty(),
        zero_valid: all(|f| f.zero_valid),
        one_valid: all(|f| f.one_valid),
        two_monotone: all(|f| f.two_monotone),
        c_closed: all(|f| f.c_closed),
        symmetric: all(|f| f.symmetric),
    };
    let verdict = if lang.trivial || lang.zero_valid || lang.one_valid || lang.two_monotone {
        Verdict::PolyTimeSolvable
    } else {
        Verdict::NpHard
    };
    ClassificationReport {
        per_constraint,
        language: lang,
        verdict,
    }
}

impl ClassificationReport {
    /// One-line summary, e.g. `np_hard (not 0-valid, not 1-valid, not 2-monotone)`.
    pub fn summary(&self) -> String {
        let l = &self.language;
        match self.verdict {
            Verdict::NpHard => "np_hard (not 0-valid, not 1-valid, not 2-monotone)".to_string(),
            Verdict::PolyTimeSolvable => {
                let mut reasons = Vec::new();
                if l.trivial {
                    reasons.push("trivial");
                }
                if l.zero_valid {
                    reasons.push("0-valid");
                }
                if l.one_valid {
                    reasons.push("1-valid");
                }
                if l.two_monotone {
                    reasons.push("2-monotone");
                }
                format!("poly_time_solvable ({})", reasons.join(", "))
            }
        }
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = |v: bool| v as u8;
        write!(
            f,
            "trivial={} zero_valid={} one_valid={} two_monotone={} c_closed={} symmetric={}",
            b(self.trivial),
            b(self.zero_valid),
            b(self.one_valid),
            b(self.two_monotone),
            b(self.c_closed),
            b(self.symmetric)
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::PolyTimeSolvable => write!(f, "poly_time_solvable"),
            Verdict::NpHard => write!(f, "np_hard"),
        }
    }
}
