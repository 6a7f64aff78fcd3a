use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::gamma::{GammaRep, Mat4};
use crate::scalar::{Bindings, GaussianRational, ScalarCoeff, Symbol};

use super::word::{sign_value, Blade, Field, Multi, Word, NO_DERIVS};

/// Normalized sum of `coefficient * word`. Every value of this type is in
/// canonical form: words are canonical and like words are merged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct OpExpr {
    terms: BTreeMap<Word, ScalarCoeff>,
}

impl OpExpr {
    pub fn zero() -> OpExpr {
        OpExpr::default()
    }

    pub fn one() -> OpExpr {
        OpExpr::term(ScalarCoeff::one(), Word::one())
    }

    pub fn scalar(c: ScalarCoeff) -> OpExpr {
        OpExpr::term(c, Word::one())
    }

    pub fn term(c: ScalarCoeff, w: Word) -> OpExpr {
        let mut e = OpExpr::zero();
        e.add_term(c, w);
        e
    }

    pub fn word(w: Word) -> OpExpr {
        OpExpr::term(ScalarCoeff::one(), w)
    }

    pub fn from_terms<I: IntoIterator<Item = (ScalarCoeff, Word)>>(it: I) -> OpExpr {
        let mut e = OpExpr::zero();
        for (c, w) in it {
            e.add_term(c, w);
        }
        e
    }

    /// Adds `c * w`; `w` must already be canonical.
    pub fn add_term(&mut self, c: ScalarCoeff, w: Word) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &ScalarCoeff)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &Word) -> ScalarCoeff {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &ScalarCoeff) -> OpExpr {
        OpExpr::from_terms(self.terms.iter().map(|(w, k)| (k * c, w.clone())))
    }

    pub fn map_coeffs<F: Fn(&ScalarCoeff) -> ScalarCoeff>(&self, f: F) -> OpExpr {
        OpExpr::from_terms(self.terms.iter().map(|(w, k)| (f(k), w.clone())))
    }

    pub fn try_map_coeffs<F: Fn(&ScalarCoeff) -> Result<ScalarCoeff>>(&self, f: F) -> Result<OpExpr> {
        let mut out = OpExpr::zero();
        for (w, k) in &self.terms {
            out.add_term(f(k)?, w.clone());
        }
        Ok(out)
    }

    pub fn filter<F: Fn(&Word, &ScalarCoeff) -> bool>(&self, keep: F) -> OpExpr {
        OpExpr { terms: self.terms.iter().filter(|(w, c)| keep(w, c)).map(|(w, c)| (w.clone(), c.clone())).collect() }
    }

    pub fn substitute(&self, bindings: &Bindings) -> Result<OpExpr> {
        self.try_map_coeffs(|c| c.substitute(bindings))
    }

    /// Sub-sum of coefficient parts carrying exactly `power` factors of `sym`.
    pub fn symbol_grade(&self, sym: &Symbol, power: i32) -> OpExpr {
        self.map_coeffs(|c| c.filter_parts(|m| m.power_of(sym) == power))
    }

    /// Keeps coefficient parts whose power of `sym` is at most `max`.
    pub fn truncate_symbol(&self, sym: &Symbol, max: i32) -> (OpExpr, usize) {
        let mut dropped = 0;
        let mut out = OpExpr::zero();
        for (w, c) in &self.terms {
            let kept = c.filter_parts(|m| m.power_of(sym) <= max);
            dropped += c.num_parts() - kept.num_parts();
            out.add_term(kept, w.clone());
        }
        (out, dropped)
    }

    /// Distinct powers of `sym` present.
    pub fn symbol_powers(&self, sym: &Symbol) -> Vec<i32> {
        let mut p: Vec<i32> =
            self.terms.values().flat_map(|c| c.parts().map(|(m, _)| m.power_of(sym)).collect::<Vec<_>>()).collect();
        p.sort_unstable();
        p.dedup();
        p
    }

    pub fn commutator(&self, other: &OpExpr) -> OpExpr {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &OpExpr) -> OpExpr {
        &(self * other) + &(other * self)
    }

    pub fn pow(&self, k: u32) -> OpExpr {
        (0..k).fold(OpExpr::one(), |acc, _| &acc * self)
    }

    /// Parts commuting (`true`) and anticommuting (`false`) with `gamma^0`.
    pub fn split_parity(&self) -> (OpExpr, OpExpr) {
        (self.filter(|w, _| w.blade.is_even()), self.filter(|w, _| !w.blade.is_even()))
    }

    /// Matrix image of a derivative-free expression. Field atoms become
    /// commuting scalar symbols named after the atom.
    pub fn to_matrix(&self, rep: &GammaRep) -> Result<Mat4<ScalarCoeff>> {
        let mut out = Mat4::<ScalarCoeff>::zero();
        for (w, c) in &self.terms {
            if w.derivs != NO_DERIVS || w.energy != 0 {
                return Err(Error::UnexpectedForm(format!("cannot map operator word `{w}` to a matrix")));
            }
            let mut k = c.clone();
            for f in &w.fields {
                k = &k * &ScalarCoeff::sym(Symbol::extra(&f.symbol_name())?);
            }
            out = out.add(&w.blade.to_matrix(rep).to_coeff().scale(&k));
        }
        Ok(out)
    }

    /// Largest field count over all terms.
    pub fn max_fields(&self) -> usize {
        self.terms.keys().map(Word::field_count).max().unwrap_or(0)
    }
}

/// Applies one `d_mu` to `(fields, rest)` pairs by the product rule.
fn leibniz(acc: Vec<(Vec<Field>, Multi)>, mu: usize) -> Vec<(Vec<Field>, Multi)> {
    let mut out = Vec::with_capacity(acc.len() * 2);
    for (fields, rest) in acc {
        for i in 0..fields.len() {
            let mut f = fields.clone();
            f[i] = f[i].differentiated(mu);
            out.push((f, rest));
        }
        let mut r = rest;
        r[mu] += 1;
        out.push((fields, r));
    }
    out
}

fn energy_expansion() -> OpExpr {
    // i d_0 - e A_0
    OpExpr::from_terms([
        (ScalarCoeff::i(), Word::deriv(0)),
        (-ScalarCoeff::sym(Symbol::E), Word::field(Field::potential(0))),
    ])
}

fn mul_words(a: &Word, b: &Word, coeff: &ScalarCoeff, out: &mut OpExpr) {
    if a.energy > 0 && !b.is_matrix() {
        let mut head = a.clone();
        head.energy -= 1;
        let left = &OpExpr::word(head) * &energy_expansion();
        let prod = &left * &OpExpr::word(b.clone());
        for (w, c) in prod.terms() {
            out.add_term(c * coeff, w.clone());
        }
        return;
    }
    let (sign, blade) = a.blade.mul(b.blade);
    let coeff = coeff.scale(&sign_value(sign));
    let mut spread = vec![(b.fields.clone(), NO_DERIVS)];
    for mu in 0..4 {
        for _ in 0..a.derivs[mu] {
            spread = leibniz(spread, mu);
        }
    }
    for (fields, rest) in spread {
        let mut all = a.fields.clone();
        all.extend(fields);
        all.sort();
        let mut derivs = rest;
        for mu in 0..4 {
            derivs[mu] += b.derivs[mu];
        }
        let w = Word { blade, fields: all, derivs, energy: a.energy + b.energy };
        out.add_term(coeff.clone(), w);
    }
}

impl<'a> Mul<&'a OpExpr> for &'a OpExpr {
    type Output = OpExpr;
    fn mul(self, o: &OpExpr) -> OpExpr {
        let mut out = OpExpr::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                mul_words(w1, w2, &(c1 * c2), &mut out);
            }
        }
        out
    }
}

impl<'a> Add<&'a OpExpr> for &'a OpExpr {
    type Output = OpExpr;
    fn add(self, o: &OpExpr) -> OpExpr {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(c.clone(), w.clone());
        }
        out
    }
}

impl<'a> Sub<&'a OpExpr> for &'a OpExpr {
    type Output = OpExpr;
    fn sub(self, o: &OpExpr) -> OpExpr {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(-c, w.clone());
        }
        out
    }
}

impl Neg for &OpExpr {
    type Output = OpExpr;
    fn neg(self) -> OpExpr {
        self.map_coeffs(|c| -c)
    }
}

impl Add for OpExpr {
    type Output = OpExpr;
    fn add(self, o: OpExpr) -> OpExpr {
        &self + &o
    }
}

impl Sub for OpExpr {
    type Output = OpExpr;
    fn sub(self, o: OpExpr) -> OpExpr {
        &self - &o
    }
}

impl Mul for OpExpr {
    type Output = OpExpr;
    fn mul(self, o: OpExpr) -> OpExpr {
        &self * &o
    }
}

impl Neg for OpExpr {
    type Output = OpExpr;
    fn neg(self) -> OpExpr {
        -&self
    }
}

impl From<ScalarCoeff> for OpExpr {
    fn from(c: ScalarCoeff) -> OpExpr {
        OpExpr::scalar(c)
    }
}

impl From<Blade> for OpExpr {
    fn from(b: Blade) -> OpExpr {
        OpExpr::word(Word::blade(b))
    }
}

impl fmt::Display for OpExpr {
    /// One term per line, `{coefficient} word`; the zero expression is `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (w, c) in &self.terms {
            writeln!(f, "{{{c}}} {w}")?;
        }
        Ok(())
    }
}

/// Gaussian-rational multiple of an expression.
pub fn times(c: GaussianRational, e: &OpExpr) -> OpExpr {
    e.scale(&ScalarCoeff::constant(c))
}
