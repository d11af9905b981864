//! Language arguments.
//!
//! A language is either a path to a language file or a comma-separated list
//! of built-in names (`XOR`, `NAE3`, `OR2`, ...). The names `2SAT`, `3SAT`
//! and `2AND` (any digit) select `Γ_{d-SAT}` and `Γ_{d-AND}`. A trailing
//! `:lit`, `:tf` or `:neg` takes the corresponding closure.

use std::path::Path;

use anyhow::{bail, Context, Result};
use maxcsp_core::{catalog, io, ClosureMode, ConstraintLanguage};

pub fn language(arg: &str) -> Result<ConstraintLanguage> {
    let (base, mode) = match arg.rsplit_once(':') {
        Some((b, "lit")) => (b, Some(ClosureMode::Literals)),
        Some((b, "tf")) => (b, Some(ClosureMode::Constants)),
        Some((b, "neg")) => (b, Some(ClosureMode::Negations)),
        _ => (arg, None),
    };
    let l = plain(base)?;
    match mode {
        Some(m) => l.closure(m).with_context(|| format!("closing `{base}`")),
        None => Ok(l),
    }
}

fn plain(base: &str) -> Result<ConstraintLanguage> {
    let path = Path::new(base);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {base}"))?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("L");
        return io::parse_language(&text, name).with_context(|| format!("parsing {base}"));
    }
    if let Some(l) = family(base) {
        return Ok(l);
    }
    let names: Vec<&str> = base.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        bail!("empty language `{base}`");
    }
    Ok(catalog::language(&names)?)
}

fn family(name: &str) -> Option<ConstraintLanguage> {
    let (digits, rest) = name.split_at(name.find(|c: char| !c.is_ascii_digit())?);
    let d: usize = digits.parse().ok().filter(|&d| (1..=4).contains(&d))?;
    match rest {
        "SAT" => Some(catalog::d_sat(d)),
        "AND" => Some(catalog::d_and(d)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_and_closures() {
        assert_eq!(language("XOR").unwrap().len(), 1);
        assert_eq!(language("XOR,NAE3").unwrap().len(), 2);
        assert_eq!(language("XOR:neg").unwrap().len(), 2);
        assert_eq!(language("2SAT").unwrap().name(), "2SAT");
        assert_eq!(language("3AND").unwrap().len(), 3);
        assert!(language("OR2:lit").unwrap().len() >= 4);
        assert!(language("NOPE").is_err());
    }
}
