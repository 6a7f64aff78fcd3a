//! Line-oriented text form of operator expressions.
//!
//! ```text
//! {(1/2) ds e + (3/4i) pi^-1} g0 g1 (d11 A_0) E_2 d0 Om
//! ```
//!
//! Each line is one term: a brace-delimited coefficient followed by a word.
//! Coefficient parts are `(gaussian) monomial` joined by ` + `; a Gaussian
//! rational reads `a`, `bi` or `a+bi` with rational `a`, `b`. Word tokens
//! are `g0`..`g3` (upper gamma), `d0`..`d3` (lower derivative), `A_mu`,
//! `E_k`, `B_k`, a differentiated field `(d<indices> X_k)`, `Om` for the
//! energy operator and `1` for the empty word. The zero expression is the
//! single line `0`. Lines starting with `#` are ignored.
//!
//! Parsing multiplies the atoms of a line in the order written and
//! normalizes, so any spelling of a term is accepted; printing always emits
//! the canonical spelling, which makes the format round-trip exactly.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, Monomial, ScalarCoeff, Symbol};

use super::build;
use super::expr::OpExpr;
use super::word::{Field, FieldKind, Word};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos: line, msg: msg.into() }
}

fn parse_rational(s: &str, line: usize) -> Result<BigRational> {
    let bad = || err(line, format!("bad rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn parse_gaussian(s: &str, line: usize) -> Result<GaussianRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(err(line, "empty number"));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(GaussianRational::real(parse_rational(s, line)?));
    };
    let split = body.char_indices().filter(|&(k, c)| k > 0 && (c == '+' || c == '-')).map(|(k, _)| k).next_back();
    let (re, im) = match split {
        Some(k) => (parse_rational(&body[..k], line)?, &body[k..]),
        None => (BigRational::from_integer(BigInt::from(0)), body),
    };
    let im = match im {
        "" | "+" => BigRational::from_integer(BigInt::from(1)),
        "-" => BigRational::from_integer(BigInt::from(-1)),
        other => parse_rational(other.trim_start_matches('+'), line)?,
    };
    Ok(GaussianRational::new(re, im))
}

pub fn parse_coeff(s: &str, line: usize) -> Result<ScalarCoeff> {
    let s = s.trim();
    if s == "0" {
        return Ok(ScalarCoeff::zero());
    }
    let mut parts = Vec::new();
    for part in s.split(" + ") {
        let part = part.trim();
        let rest = part
            .strip_prefix('(')
            .ok_or_else(|| err(line, format!("coefficient part `{part}` must start with `(`")))?;
        let close = rest.find(')').ok_or_else(|| err(line, "unclosed `(`"))?;
        let g = parse_gaussian(&rest[..close], line)?;
        let mut mono = Monomial::one();
        for tok in rest[close + 1..].split_whitespace() {
            let (name, pow) = match tok.split_once('^') {
                Some((n, p)) => (n, p.parse::<i32>().map_err(|_| err(line, format!("bad exponent in `{tok}`")))?),
                None => (tok, 1),
            };
            let sym = Symbol::extra(name).map_err(|_| err(line, format!("bad symbol `{name}`")))?;
            mono = mono.mul(&Monomial::symbol(sym, pow));
        }
        parts.push((g, mono));
    }
    Ok(ScalarCoeff::from_parts(parts))
}

fn digit(c: char, max: u32, line: usize) -> Result<usize> {
    c.to_digit(10).filter(|&d| d <= max).map(|d| d as usize).ok_or_else(|| err(line, format!("bad index `{c}`")))
}

fn parse_field(tok: &str, line: usize) -> Result<Field> {
    let (letter, idx) = tok.split_once('_').ok_or_else(|| err(line, format!("bad field `{tok}`")))?;
    let kind = match letter {
        "A" => FieldKind::Potential,
        "E" => FieldKind::Electric,
        "B" => FieldKind::Magnetic,
        _ => return Err(err(line, format!("unknown field `{letter}`"))),
    };
    let mut chars = idx.chars();
    let c = chars.next().ok_or_else(|| err(line, "missing field index"))?;
    if chars.next().is_some() {
        return Err(err(line, format!("bad field index `{idx}`")));
    }
    let index = digit(c, 3, line)?;
    if kind != FieldKind::Potential && index == 0 {
        return Err(err(line, format!("`{tok}` has no time component")));
    }
    Ok(Field::new(kind, index))
}

fn parse_atom(tok: &str, line: usize) -> Result<OpExpr> {
    if tok == "1" {
        return Ok(OpExpr::one());
    }
    if tok == "Om" {
        return Ok(build::energy());
    }
    if let Some(inner) = tok.strip_prefix('(') {
        let inner = inner.strip_suffix(')').ok_or_else(|| err(line, format!("unclosed `{tok}`")))?;
        let (ds, f) = inner.split_once(' ').ok_or_else(|| err(line, format!("bad atom `{tok}`")))?;
        let ds = ds.strip_prefix('d').ok_or_else(|| err(line, format!("bad derivative `{ds}`")))?;
        if ds.is_empty() {
            return Err(err(line, "empty derivative list"));
        }
        let mut field = parse_field(f.trim(), line)?;
        for c in ds.chars() {
            field = field.differentiated(digit(c, 3, line)?);
        }
        return Ok(build::field(field));
    }
    let mut chars = tok.chars();
    match (chars.next(), chars.next(), chars.next()) {
        (Some('g'), Some(c), None) => Ok(build::gamma(digit(c, 3, line)?)),
        (Some('d'), Some(c), None) => Ok(build::partial(digit(c, 3, line)?)),
        _ if tok.contains('_') => Ok(build::field(parse_field(tok, line)?)),
        _ => Err(err(line, format!("unknown token `{tok}`"))),
    }
}

fn tokens(s: &str, line: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut it = s.split_whitespace();
    while let Some(t) = it.next() {
        if t.starts_with('(') && !t.ends_with(')') {
            let next = it.next().ok_or_else(|| err(line, format!("unclosed `{t}`")))?;
            out.push(format!("{t} {next}"));
        } else {
            out.push(t.to_string());
        }
    }
    Ok(out)
}

/// Parses a whole expression.
pub fn parse(text: &str) -> Result<OpExpr> {
    let mut total = OpExpr::zero();
    let mut saw_zero = false;
    let mut saw_term = false;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        if l == "0" {
            saw_zero = true;
            continue;
        }
        saw_term = true;
        let body = l.strip_prefix('{').ok_or_else(|| err(line, "term must start with `{`"))?;
        let close = body.find('}').ok_or_else(|| err(line, "unclosed `{`"))?;
        let coeff = parse_coeff(&body[..close], line)?;
        let mut term = OpExpr::scalar(coeff);
        let toks = tokens(&body[close + 1..], line)?;
        if toks.is_empty() {
            return Err(err(line, "missing word (use `1` for the identity)"));
        }
        for t in toks {
            term = &term * &parse_atom(&t, line)?;
        }
        total = &total + &term;
    }
    if saw_zero && saw_term {
        return Err(err(0, "`0` cannot be mixed with terms"));
    }
    if !saw_zero && !saw_term {
        return Err(err(0, "empty expression"));
    }
    Ok(total)
}

/// Canonical text; identical to `Display`.
pub fn emit(e: &OpExpr) -> String {
    e.to_string()
}

/// Parses a single canonical word, e.g. `g0 (d1 A_2) d3`.
pub fn parse_word(s: &str) -> Result<Word> {
    let e = parse(&format!("{{(1)}} {s}"))?;
    let mut it = e.terms();
    match (it.next(), it.next()) {
        (Some((w, c)), None) if c.is_one() => Ok(w.clone()),
        _ => Err(err(1, format!("`{s}` is not a canonical word"))),
    }
}
