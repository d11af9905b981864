//! Line-oriented text formats.
//!
//! All formats ignore blank lines and `#` comments, report syntax errors with
//! 1-based line and column, and use 1-based variable indices. Emitters write
//! canonical, newline-terminated ASCII, so `emit(parse(x))` normalizes `x`.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::catalog;
use crate::certificate::{TransformCertificate, TransformKind, ValueMap};
use crate::constraint::{format_bits, parse_bits, row_bits, Constraint, SubstitutionPattern, MAX_TABLE_ARITY};
use crate::error::{Error, Result};
use crate::express::{CombinationTerm, LinearCombination};
use crate::formula::{Application, Formula, WeightRange};
use crate::implementation::Implementation;
use crate::language::ConstraintLanguage;
use crate::poly::{Monomial, MultilinearPolynomial};

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    line: usize,
    column: usize,
    text: &'a str,
}

impl Token<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::syntax(self.line, self.column, message)
    }

    fn parse<T: FromStr>(&self, what: &str) -> Result<T> {
        self.text
            .parse()
            .map_err(|_| self.error(format!("expected {what}, found `{}`", self.text)))
    }

    fn keyword(&self, kw: &str) -> Result<()> {
        if self.text == kw {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found `{}`", self.text)))
        }
    }
}

/// Non-empty lines after comment stripping, as token lists.
struct Lines<'a> {
    inner: std::iter::Peekable<std::vec::IntoIter<(usize, Vec<Token<'a>>)>>,
    last_line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let mut out = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            last_line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let mut toks = Vec::new();
            let mut start = None;
            for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
                if ch.is_whitespace() {
                    if let Some(s) = start.take() {
                        toks.push(Token {
                            line: i + 1,
                            column: s + 1,
                            text: &body[s..pos],
                        });
                    }
                } else if start.is_none() {
                    start = Some(pos);
                }
            }
            if !toks.is_empty() {
                out.push((i + 1, toks));
            }
        }
        Lines {
            inner: out.into_iter().peekable(),
            last_line,
        }
    }

    fn next(&mut self) -> Option<Vec<Token<'a>>> {
        self.inner.next().map(|(_, t)| t)
    }

    fn peek(&mut self) -> Option<&Vec<Token<'a>>> {
        self.inner.peek().map(|(_, t)| t)
    }

    fn expect(&mut self, what: &str) -> Result<Vec<Token<'a>>> {
        let line = self.last_line.max(1);
        self.next()
            .ok_or_else(|| Error::syntax(line, 1, format!("unexpected end of input, expected {what}")))
    }

    fn finish(&mut self) -> Result<()> {
        match self.next() {
            None => Ok(()),
            Some(t) => Err(t[0].error(format!("unexpected trailing content `{}`", t[0].text))),
        }
    }
}

fn arity_check(toks: &[Token], expected: usize, what: &str) -> Result<()> {
    if toks.len() != expected {
        let at = toks.get(expected).or(toks.last()).unwrap();
        return Err(at.error(format!("{what}: expected {expected} fields, found {}", toks.len())));
    }
    Ok(())
}

fn index(tok: &Token, nvars: usize) -> Result<usize> {
    let i: usize = tok.parse("variable index")?;
    if i == 0 || i > nvars {
        return Err(tok.error(format!("variable index {i} out of range 1..={nvars}")));
    }
    Ok(i - 1)
}

fn key_value<'a>(tok: &Token<'a>, key: &str) -> Result<&'a str> {
    tok.text
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| tok.error(format!("expected `{key}=<value>`, found `{}`", tok.text)))
}

fn located(tok: &Token, e: Error) -> Error {
    match e {
        Error::Syntax { .. } => e,
        other => tok.error(other.to_string()),
    }
}

// ---------------------------------------------------------------- languages

/// Parses `constraint <name> <arity>` blocks of satisfying rows ending in `end`.
pub fn parse_language(text: &str, name: &str) -> Result<ConstraintLanguage> {
    let mut lines = Lines::new(text);
    let mut members = Vec::new();
    let mut seen = BTreeSet::new();
    while let Some(head) = lines.next() {
        head[0].keyword("constraint")?;
        arity_check(&head, 3, "constraint header")?;
        let cname = head[1].text;
        if !seen.insert(cname.to_string()) {
            return Err(head[1].error(format!("duplicate constraint name `{cname}`")));
        }
        let arity: usize = head[2].parse("arity")?;
        if arity == 0 {
            return Err(head[2].error("constraints must have arity at least 1"));
        }
        if arity > MAX_TABLE_ARITY {
            return Err(head[2].error(format!("arity {arity} exceeds the cap of {MAX_TABLE_ARITY}")));
        }
        let mut rows = Vec::new();
        loop {
            let row = lines.expect("a row or `end`")?;
            if row[0].text == "end" {
                arity_check(&row, 1, "end")?;
                break;
            }
            arity_check(&row, 1, "row")?;
            let bits = parse_bits(row[0].text).ok_or_else(|| row[0].error(format!("bad bit string `{}`", row[0].text)))?;
            if bits.len() != arity {
                return Err(row[0].error(format!("row of width {} in a constraint of arity {arity}", bits.len())));
            }
            rows.push(bits);
        }
        let c = Constraint::from_rows(cname, arity, rows).map_err(|e| located(&head[0], e))?;
        members.push(Arc::new(c));
    }
    ConstraintLanguage::new(name, members)
}

pub fn emit_constraint(c: &Constraint) -> String {
    let mut out = format!("constraint {} {}\n", c.name(), c.arity());
    for r in c.satisfying_rows() {
        out.push_str(&format_bits(&row_bits(r, c.arity())));
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

pub fn emit_language(l: &ConstraintLanguage) -> String {
    l.iter().map(|c| emit_constraint(c)).collect()
}

// ---------------------------------------------------------------- instances

/// Splits an output file into its instance part and an appended
/// `certificate` block, if present.
pub fn split_certificate(text: &str) -> (&str, Option<&str>) {
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        if line.split('#').next().unwrap_or("").split_whitespace().next() == Some("certificate") {
            return (&text[..offset], Some(&text[offset..]));
        }
        offset += line.len();
    }
    (text, None)
}

/// Parses `maxcsp <n> <m> <Z|N> <t> [c=<exponent>]` and `m` application
/// lines `<name> <weight> <i1> .. <ik>`. Names resolve against `languages`
/// and then the built-ins, including derived `~g` and `g[slots]` forms.
pub fn parse_instance(text: &str, languages: &[&ConstraintLanguage]) -> Result<Formula> {
    let mut lines = Lines::new(text);
    let head = lines.expect("a `maxcsp` header")?;
    head[0].keyword("maxcsp")?;
    if head.len() != 5 && head.len() != 6 {
        return Err(head.last().unwrap().error("header: expected `maxcsp <n> <m> <Z|N> <t> [c=<exponent>]`"));
    }
    let n: usize = head[1].parse("variable count")?;
    let m: usize = head[2].parse("application count")?;
    let range = match head[3].text {
        "Z" => WeightRange::Z,
        "N" => WeightRange::N,
        other => return Err(head[3].error(format!("expected `Z` or `N`, found `{other}`"))),
    };
    let t: BigInt = head[4].parse("threshold")?;
    let mut phi = Formula::new(n, range).with_threshold(t);
    if let Some(tok) = head.get(5) {
        phi.declared_weight_exponent = Some(key_value(tok, "c")?.parse().map_err(|_| tok.error("bad exponent"))?);
    }
    let mut cache: Vec<(String, Arc<Constraint>)> = Vec::new();
    for _ in 0..m {
        let line = lines.expect("an application line")?;
        if line.len() < 2 {
            return Err(line[0].error("application: expected `<name> <weight> <indices>`"));
        }
        let c = match cache.iter().find(|(k, _)| k == line[0].text) {
            Some((_, c)) => c.clone(),
            None => {
                let c = catalog::resolve(line[0].text, languages).map_err(|e| located(&line[0], e))?;
                cache.push((line[0].text.to_string(), c.clone()));
                c
            }
        };
        let w: BigInt = line[1].parse("weight")?;
        if range == WeightRange::N && w < BigInt::from(0) {
            return Err(line[1].error(format!("weight range violation: negative weight {w} under N")));
        }
        if line.len() - 2 != c.arity() {
            let at = line.get(2 + c.arity()).unwrap_or(line.last().unwrap());
            return Err(at.error(format!(
                "arity mismatch: `{}` takes {} arguments, found {}",
                c.name(),
                c.arity(),
                line.len() - 2
            )));
        }
        let tuple = line[2..].iter().map(|t| index(t, n)).collect::<Result<Vec<_>>>()?;
        phi.add(c, tuple, w).map_err(|e| located(&line[0], e))?;
    }
    lines.finish()?;
    if phi.declared_weight_exponent.is_some() {
        phi.check_weight_exponent().map_err(|e| located(&head[5], e))?;
    }
    Ok(phi)
}

pub fn emit_instance(phi: &Formula) -> String {
    let mut out = format!("maxcsp {} {} {} {}", phi.nvars(), phi.size(), phi.weight_range(), phi.threshold);
    if let Some(c) = phi.declared_weight_exponent {
        let _ = write!(out, " c={c}");
    }
    out.push('\n');
    for a in phi.applications() {
        let _ = write!(out, "{} {}", a.constraint.name(), a.weight);
        for &i in &a.tuple {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    out
}

// -------------------------------------------------------------- polynomials

fn parse_rational(tok: &Token) -> Result<BigRational> {
    let bad = || tok.error(format!("expected a rational coefficient, found `{}`", tok.text));
    match tok.text.split_once('/') {
        None => Ok(BigRational::from_integer(tok.text.parse().map_err(|_| bad())?)),
        Some((a, b)) => {
            let a: BigInt = a.parse().map_err(|_| bad())?;
            let b: BigInt = b.parse().map_err(|_| bad())?;
            if b == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(a, b))
        }
    }
}

/// A polynomial listing: `polynomial <n>`, an optional `threshold <t>`, then
/// lines `<coeff> <i1> ..`, with `<coeff> -` for the constant term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialListing {
    pub polynomial: MultilinearPolynomial,
    pub threshold: Option<BigInt>,
}

pub fn parse_polynomial(text: &str) -> Result<PolynomialListing> {
    let mut lines = Lines::new(text);
    let head = lines.expect("a `polynomial` header")?;
    head[0].keyword("polynomial")?;
    arity_check(&head, 2, "polynomial header")?;
    let n: usize = head[1].parse("variable count")?;
    let mut threshold = None;
    if lines.peek().is_some_and(|l| l[0].text == "threshold") {
        let l = lines.next().unwrap();
        arity_check(&l, 2, "threshold")?;
        threshold = Some(l[1].parse("threshold")?);
    }
    let mut p = MultilinearPolynomial::zero(n);
    let mut seen = BTreeSet::new();
    while let Some(l) = lines.next() {
        if l.len() < 2 {
            return Err(l[0].error("monomial: expected `<coeff> <indices>` or `<coeff> -`"));
        }
        let coeff = parse_rational(&l[0])?;
        let mono = if l.len() == 2 && l[1].text == "-" {
            Monomial::constant()
        } else {
            Monomial::new(l[1..].iter().map(|t| index(t, n)).collect::<Result<Vec<_>>>()?)
        };
        if !seen.insert(mono.clone()) {
            return Err(l[0].error(format!("duplicate monomial {mono}")));
        }
        p.add_term(mono, coeff);
    }
    Ok(PolynomialListing { polynomial: p, threshold })
}

pub fn emit_polynomial(p: &MultilinearPolynomial, threshold: Option<&BigInt>) -> String {
    let mut out = format!("polynomial {}\n", p.nvars());
    if let Some(t) = threshold {
        let _ = writeln!(out, "threshold {t}");
    }
    for (m, c) in p.terms() {
        let _ = write!(out, "{c}");
        if m.is_constant() {
            out.push_str(" -");
        }
        for &i in m.vars() {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------- implementations

/// Parses `impl <target> p=<p> q=<q> alpha=<a> strict=<0|1>` blocks of
/// application lines `<name> <i1> ..` ending in `end`. Recorded `alpha` and
/// `strict` are taken as stated; use [`Implementation::verify`] to check.
pub fn parse_implementations(text: &str, languages: &[&ConstraintLanguage]) -> Result<Vec<Implementation>> {
    let mut lines = Lines::new(text);
    let mut out = Vec::new();
    while let Some(head) = lines.next() {
        head[0].keyword("impl")?;
        arity_check(&head, 6, "impl header")?;
        let target = catalog::resolve(head[1].text, languages).map_err(|e| located(&head[1], e))?;
        let p: usize = key_value(&head[2], "p")?.parse().map_err(|_| head[2].error("bad p"))?;
        let q: usize = key_value(&head[3], "q")?.parse().map_err(|_| head[3].error("bad q"))?;
        let alpha: usize = key_value(&head[4], "alpha")?.parse().map_err(|_| head[4].error("bad alpha"))?;
        let strict = match key_value(&head[5], "strict")? {
            "0" => false,
            "1" => true,
            _ => return Err(head[5].error("strict must be 0 or 1")),
        };
        if p != target.arity() {
            return Err(head[2].error(format!("p={p} but `{}` has arity {}", target.name(), target.arity())));
        }
        let mut apps = Vec::new();
        loop {
            let l = lines.expect("an application or `end`")?;
            if l[0].text == "end" {
                arity_check(&l, 1, "end")?;
                break;
            }
            let c = catalog::resolve(l[0].text, languages).map_err(|e| located(&l[0], e))?;
            arity_check(&l, 1 + c.arity(), "application")?;
            let tuple = l[1..].iter().map(|t| index(t, p + q)).collect::<Result<Vec<_>>>()?;
            apps.push(Application::new(c, tuple));
        }
        out.push(Implementation {
            target,
            primary: p,
            aux: q,
            applications: apps,
            alpha,
            strict,
        });
    }
    Ok(out)
}

pub fn emit_implementation(imp: &Implementation) -> String {
    let mut out = format!(
        "impl {} p={} q={} alpha={} strict={}\n",
        imp.target.name(),
        imp.primary,
        imp.aux,
        imp.alpha,
        u8::from(imp.strict)
    );
    for a in &imp.applications {
        out.push_str(a.constraint.name());
        for &i in &a.tuple {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    out.push_str("end\n");
    out
}

// ------------------------------------------------------------- combinations

/// `combination <base> <nvars>`, then `<coeff> <pattern> <indices|->` lines.
pub fn emit_combination(lc: &LinearCombination) -> String {
    let mut out = format!("combination {} {}\n", lc.base.name(), lc.nvars);
    for t in &lc.terms {
        let _ = write!(out, "{} {}", t.coefficient, t.pattern);
        if t.tuple.is_empty() {
            out.push_str(" -");
        }
        for &i in &t.tuple {
            let _ = write!(out, " {}", i + 1);
        }
        out.push('\n');
    }
    out
}

pub fn parse_combination(text: &str, languages: &[&ConstraintLanguage]) -> Result<LinearCombination> {
    let mut lines = Lines::new(text);
    let head = lines.expect("a `combination` header")?;
    head[0].keyword("combination")?;
    arity_check(&head, 3, "combination header")?;
    let base = catalog::resolve(head[1].text, languages).map_err(|e| located(&head[1], e))?;
    let nvars: usize = head[2].parse("variable count")?;
    let mut terms = Vec::new();
    while let Some(l) = lines.next() {
        if l.len() < 3 {
            return Err(l[0].error("term: expected `<coeff> <pattern> <indices|->`"));
        }
        let coefficient = parse_rational(&l[0])?;
        let parsed = SubstitutionPattern::parse(l[1].text).map_err(|e| located(&l[1], e))?;
        if parsed.slots.len() != base.arity() {
            return Err(l[1].error(format!("pattern has {} slots, `{}` has arity {}", parsed.slots.len(), base.name(), base.arity())));
        }
        let tuple = if l.len() == 3 && l[2].text == "-" {
            Vec::new()
        } else {
            l[2..].iter().map(|t| index(t, nvars)).collect::<Result<Vec<_>>>()?
        };
        if tuple.len() < parsed.target_arity {
            return Err(l[2].error("fewer indices than the pattern's variables"));
        }
        let pattern = SubstitutionPattern::new(tuple.len(), parsed.slots, parsed.mode).map_err(|e| located(&l[1], e))?;
        let constraint = base.apply_pattern(&pattern).map_err(|e| located(&l[1], e))?;
        terms.push(CombinationTerm {
            coefficient,
            pattern,
            constraint,
            tuple,
        });
    }
    Ok(LinearCombination { base, nvars, terms })
}

// ------------------------------------------------------------- certificates

fn emit_certificate_into(out: &mut String, c: &TransformCertificate) {
    let _ = writeln!(out, "certificate");
    let _ = writeln!(out, "transform {}", c.transform);
    let _ = writeln!(out, "kind {}", c.kind);
    let _ = writeln!(out, "n_in {}", c.n_in);
    let _ = writeln!(out, "n_out {}", c.n_out);
    let _ = writeln!(out, "size_in {}", c.size_in);
    let _ = writeln!(out, "size_out {}", c.size_out);
    let _ = writeln!(out, "weight_in {}", c.weight_in);
    let _ = writeln!(out, "weight_out {}", c.weight_out);
    let _ = writeln!(out, "threshold_in {}", c.threshold_in);
    let _ = writeln!(out, "threshold_out {}", c.threshold_out);
    let _ = writeln!(out, "value_map {}", c.value_map);
    let _ = writeln!(out, "var_constant {}", c.var_constant);
    let _ = writeln!(out, "var_factor {}", c.var_factor);
    let _ = writeln!(out, "size_factor {}", c.size_factor);
    let _ = writeln!(out, "weight_constant {}", c.weight_constant);
    let _ = writeln!(out, "weight_exponent {}", c.weight_exponent);
    let _ = writeln!(out, "steps {}", c.steps.len());
    for s in &c.steps {
        emit_certificate_into(out, s);
    }
    let _ = writeln!(out, "end");
}

pub fn emit_certificate(c: &TransformCertificate) -> String {
    let mut out = String::new();
    emit_certificate_into(&mut out, c);
    out
}

fn field<'a>(lines: &mut Lines<'a>, key: &str) -> Result<Vec<Token<'a>>> {
    let l = lines.expect(&format!("`{key}`"))?;
    l[0].keyword(key)?;
    if l.len() < 2 {
        return Err(l[0].error(format!("`{key}` needs a value")));
    }
    Ok(l)
}

fn scalar<T: FromStr>(lines: &mut Lines, key: &str) -> Result<T> {
    let l = field(lines, key)?;
    arity_check(&l, 2, key)?;
    l[1].parse(key)
}

fn parse_certificate_block(lines: &mut Lines) -> Result<TransformCertificate> {
    let head = lines.expect("`certificate`")?;
    head[0].keyword("certificate")?;
    arity_check(&head, 1, "certificate")?;
    let tr = field(lines, "transform")?;
    arity_check(&tr, 2, "transform")?;
    let transform = tr[1].text.to_string();
    let k = field(lines, "kind")?;
    let kind = match k[1].text {
        "additive" => TransformKind::Additive,
        "linear" => TransformKind::Linear,
        other => return Err(k[1].error(format!("unknown kind `{other}`"))),
    };
    let n_in = scalar(lines, "n_in")?;
    let n_out = scalar(lines, "n_out")?;
    let size_in = scalar(lines, "size_in")?;
    let size_out = scalar(lines, "size_out")?;
    let weight_in = scalar(lines, "weight_in")?;
    let weight_out = scalar(lines, "weight_out")?;
    let threshold_in = scalar(lines, "threshold_in")?;
    let threshold_out = scalar(lines, "threshold_out")?;
    let vm = field(lines, "value_map")?;
    let value_map = match vm[1].text {
        "affine" => {
            arity_check(&vm, 4, "value_map")?;
            ValueMap::Affine {
                scale: vm[2].parse("scale")?,
                shift: vm[3].parse("shift")?,
            }
        }
        "existential" => ValueMap::Existential,
        "solved" => ValueMap::Solved,
        other => return Err(vm[1].error(format!("unknown value map `{other}`"))),
    };
    let var_constant = scalar(lines, "var_constant")?;
    let var_factor = scalar(lines, "var_factor")?;
    let size_factor = scalar(lines, "size_factor")?;
    let weight_constant = scalar(lines, "weight_constant")?;
    let weight_exponent = scalar(lines, "weight_exponent")?;
    let nsteps: usize = scalar(lines, "steps")?;
    let mut steps = Vec::with_capacity(nsteps);
    for _ in 0..nsteps {
        steps.push(parse_certificate_block(lines)?);
    }
    let end = lines.expect("`end`")?;
    end[0].keyword("end")?;
    Ok(TransformCertificate {
        transform,
        kind,
        n_in,
        n_out,
        size_in,
        size_out,
        weight_in,
        weight_out,
        threshold_in,
        threshold_out,
        value_map,
        var_constant,
        var_factor,
        size_factor,
        weight_constant,
        weight_exponent,
        steps,
    })
}

/// Parses one `certificate .. end` block (line numbers are relative to `text`).
pub fn parse_certificate(text: &str) -> Result<TransformCertificate> {
    let mut lines = Lines::new(text);
    let c = parse_certificate_block(&mut lines)?;
    lines.finish()?;
    Ok(c)
}

/// Parses an instance with an optional appended certificate.
pub fn parse_output(text: &str, languages: &[&ConstraintLanguage]) -> Result<(Formula, Option<TransformCertificate>)> {
    let (inst, cert) = split_certificate(text);
    let phi = parse_instance(inst, languages)?;
    let offset = inst.lines().count();
    let cert = cert
        .map(|c| {
            parse_certificate(c).map_err(|e| match e {
                Error::Syntax { line, column, message } => Error::syntax(line + offset, column, message),
                other => other,
            })
        })
        .transpose()?;
    Ok((phi, cert))
}

// ------------------------------------------------------------------- graphs

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    /// 0-based, each edge stored with `u < v`.
    pub edges: Vec<(usize, usize)>,
}

/// `graph <n> <e>` followed by `e` lines `<u> <v>`; the graph must be simple.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = Lines::new(text);
    let head = lines.expect("a `graph` header")?;
    head[0].keyword("graph")?;
    arity_check(&head, 3, "graph header")?;
    let n: usize = head[1].parse("vertex count")?;
    let e: usize = head[2].parse("edge count")?;
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(e);
    for _ in 0..e {
        let l = lines.expect("an edge line")?;
        arity_check(&l, 2, "edge")?;
        let u = index(&l[0], n)?;
        let v = index(&l[1], n)?;
        if u == v {
            return Err(l[1].error("self-loop in a simple graph"));
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(l[0].error("duplicate edge in a simple graph"));
        }
        edges.push(key);
    }
    lines.finish()?;
    Ok(Graph { n, edges })
}

pub fn emit_graph(g: &Graph) -> String {
    let mut out = format!("graph {} {}\n", g.n, g.edges.len());
    for &(u, v) in &g.edges {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}
