//! Exact coefficient ring.
//!
//! Every coefficient in the engine is a finite sum of Gaussian rationals
//! times monomials in commuting formal symbols (`pi`, `e`, `m`, `ds`, ...).
//! Symbols may carry negative integer exponents, so `1/m` and `pi^-2` are
//! ordinary monomials. Nothing here ever rounds; floats only appear in
//! [`ScalarCoeff::to_float`], which the numeric oracles use.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Rational `n/d` from machine integers.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::real(ratio(n, d))
    }

    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn powi(&self, k: i32) -> Result<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..k.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    /// `3`, `-1/2`, `2i`, `-1/3i`, `1/2+3/4i`, `1-i`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |r: &BigRational| -> String {
            if r.is_one() {
                "i".to_string()
            } else if (-r).is_one() {
                "-i".to_string()
            } else {
                format!("{}i", fmt_rational(r))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rational(&self.re)),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let im = im_part(&self.im);
                if self.im.is_negative() {
                    write!(f, "{}{}", fmt_rational(&self.re), im)
                } else {
                    write!(f, "{}+{}", fmt_rational(&self.re), im)
                }
            }
        }
    }
}

/// A formal commuting symbol. Names are ASCII identifiers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Cow<'static, str>);

impl Symbol {
    pub const PI: Symbol = Symbol(Cow::Borrowed("pi"));
    /// Particle charge.
    pub const E: Symbol = Symbol(Cow::Borrowed("e"));
    /// Electron mass.
    pub const M: Symbol = Symbol(Cow::Borrowed("m"));
    /// World length of the spread particle.
    pub const DS: Symbol = Symbol(Cow::Borrowed("ds"));
    /// `kappa = -i ds m`.
    pub const KAPPA: Symbol = Symbol(Cow::Borrowed("kappa"));
    pub const ALPHA: Symbol = Symbol(Cow::Borrowed("alpha"));
    pub const EPS0: Symbol = Symbol(Cow::Borrowed("eps0"));
    /// Self-energy.
    pub const DM: Symbol = Symbol(Cow::Borrowed("dm"));
    pub const R0: Symbol = Symbol(Cow::Borrowed("r0"));
    /// Scalar potential used as a number (not as a field atom).
    pub const PHI: Symbol = Symbol(Cow::Borrowed("phi"));
    pub const M_MU: Symbol = Symbol(Cow::Borrowed("m_mu"));
    /// Mode number of the quantization condition.
    pub const N: Symbol = Symbol(Cow::Borrowed("n"));
    /// Radial distance.
    pub const R: Symbol = Symbol(Cow::Borrowed("r"));

    pub const BUILTIN: [Symbol; 13] = [
        Self::PI,
        Self::E,
        Self::M,
        Self::DS,
        Self::KAPPA,
        Self::ALPHA,
        Self::EPS0,
        Self::DM,
        Self::R0,
        Self::PHI,
        Self::M_MU,
        Self::N,
        Self::R,
    ];

    /// Registers an additional symbol. The name must be an ASCII identifier.
    pub fn extra(name: &str) -> Result<Symbol> {
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(Error::Parse { pos: 0, msg: format!("invalid symbol name `{name}`") });
        }
        Ok(Self::BUILTIN
            .iter()
            .find(|s| s.name() == name)
            .cloned()
            .unwrap_or_else(|| Symbol(Cow::Owned(name.to_string()))))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn pretty(&self) -> &str {
        match self.name() {
            "pi" => "π",
            "ds" => "δs",
            "kappa" => "κ",
            "alpha" => "α",
            "eps0" => "ε₀",
            "dm" => "δm",
            "r0" => "r₀",
            "phi" => "φ",
            "m_mu" => "m_μ",
            other => other,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Product of symbols with nonzero integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(BTreeMap<Symbol, i32>);

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn symbol(s: Symbol, power: i32) -> Self {
        let mut m = BTreeMap::new();
        if power != 0 {
            m.insert(s, power);
        }
        Monomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn power_of(&self, s: &Symbol) -> i32 {
        self.0.get(s).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, i32)> {
        self.0.iter().map(|(s, &p)| (s, p))
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.0.clone();
        for (s, p) in &other.0 {
            let e = out.entry(s.clone()).or_insert(0);
            *e += p;
            if *e == 0 {
                out.remove(s);
            }
        }
        Monomial(out)
    }

    pub fn powi(&self, k: i32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(s, p)| (s.clone(), p * k)).collect())
    }

    pub fn without(&self, s: &Symbol) -> Monomial {
        let mut out = self.0.clone();
        out.remove(s);
        Monomial(out)
    }

    fn fmt_with(&self, pretty: bool) -> String {
        self.0
            .iter()
            .map(|(s, p)| {
                let name = if pretty { s.pretty() } else { s.name() };
                if *p == 1 {
                    name.to_string()
                } else {
                    format!("{name}^{p}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(false))
    }
}

/// Bindings used by [`ScalarCoeff::substitute`].
pub type Bindings = BTreeMap<Symbol, ScalarCoeff>;

/// Numeric values used by [`ScalarCoeff::to_float`].
pub type NumericBindings = BTreeMap<Symbol, Complex64>;

const SUBSTITUTION_ROUNDS: usize = 32;

/// Sum of `GaussianRational x Monomial` parts, like terms merged, zero parts
/// removed. The empty sum is exact zero.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ScalarCoeff(BTreeMap<Monomial, GaussianRational>);

impl ScalarCoeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn i() -> Self {
        Self::constant(GaussianRational::i())
    }

    pub fn int(n: i64) -> Self {
        Self::constant(GaussianRational::int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::constant(GaussianRational::frac(n, d))
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn rational(r: BigRational) -> Self {
        Self::constant(GaussianRational::real(r))
    }

    pub fn sym(s: Symbol) -> Self {
        Self::term(GaussianRational::one(), Monomial::symbol(s, 1))
    }

    pub fn sym_pow(s: Symbol, p: i32) -> Self {
        Self::term(GaussianRational::one(), Monomial::symbol(s, p))
    }

    pub fn term(c: GaussianRational, m: Monomial) -> Self {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(m, c);
        }
        ScalarCoeff(map)
    }

    /// Builds a coefficient from parts in any order, merging like terms.
    pub fn from_parts<I: IntoIterator<Item = (GaussianRational, Monomial)>>(parts: I) -> Self {
        let mut out = ScalarCoeff::zero();
        for (c, m) in parts {
            out.add_part(c, m);
        }
        out
    }

    fn add_part(&mut self, c: GaussianRational, m: Monomial) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&m) {
            Some(existing) => {
                let sum = &*existing + &c;
                if sum.is_zero() {
                    self.0.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.0.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.0.iter()
    }

    pub fn num_parts(&self) -> usize {
        self.0.len()
    }

    /// The value if no symbols remain.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.0.len() {
            0 => Some(GaussianRational::zero()),
            1 => {
                let (m, c) = self.0.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.as_constant().filter(|c| c.is_real()).map(|c| c.re)
    }

    /// Returns the single part when the coefficient is a monomial term.
    pub fn as_single(&self) -> Option<(&Monomial, &GaussianRational)> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self.0.keys().flat_map(|m| m.iter().map(|(s, _)| s.clone())).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.0.keys().any(|m| m.power_of(s) != 0)
    }

    /// Keeps only the parts for which `keep` holds.
    pub fn filter_parts<F: Fn(&Monomial) -> bool>(&self, keep: F) -> ScalarCoeff {
        ScalarCoeff(self.0.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect())
    }

    pub fn scale(&self, c: &GaussianRational) -> ScalarCoeff {
        ScalarCoeff::from_parts(self.0.iter().map(|(m, v)| (v * c, m.clone())))
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> ScalarCoeff {
        ScalarCoeff(self.0.iter().map(|(m, v)| (m.mul(mono), v.clone())).collect())
    }

    pub fn conj(&self) -> ScalarCoeff {
        ScalarCoeff(self.0.iter().map(|(m, v)| (m.clone(), v.conj())).collect())
    }

    pub fn pow(&self, k: u32) -> ScalarCoeff {
        let mut acc = ScalarCoeff::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a single-part coefficient.
    pub fn inv(&self) -> Result<ScalarCoeff> {
        match self.as_single() {
            Some((m, c)) => Ok(ScalarCoeff::term(c.inv()?, m.powi(-1))),
            None if self.is_zero() => Err(Error::DivisionByZero),
            None => Err(Error::NotInvertible { symbol: self.to_string(), power: -1 }),
        }
    }

    /// Integer power; negative powers require a single-part coefficient.
    pub fn powi(&self, k: i32) -> Result<ScalarCoeff> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.inv()?.pow(k.unsigned_abs()))
        }
    }

    pub fn checked_div(&self, d: &ScalarCoeff) -> Result<ScalarCoeff> {
        Ok(self * &d.inv()?)
    }

    fn substitute_once(&self, bindings: &Bindings) -> Result<ScalarCoeff> {
        let mut out = ScalarCoeff::zero();
        for (mono, c) in &self.0 {
            let mut acc = ScalarCoeff::constant(c.clone());
            let mut free = Monomial::one();
            for (s, p) in mono.iter() {
                match bindings.get(s) {
                    Some(b) => {
                        let raised = b.powi(p).map_err(|_| Error::NotInvertible { symbol: s.to_string(), power: p })?;
                        acc = &acc * &raised;
                    }
                    None => free = free.mul(&Monomial::symbol(s.clone(), p)),
                }
            }
            out = &out + &acc.mul_monomial(&free);
        }
        Ok(out)
    }

    /// Eliminates every bound symbol. Bindings may refer to each other; a
    /// cyclic set is reported once the round budget is exhausted.
    pub fn substitute(&self, bindings: &Bindings) -> Result<ScalarCoeff> {
        let mut cur = self.clone();
        for _ in 0..SUBSTITUTION_ROUNDS {
            if !bindings.keys().any(|s| cur.contains_symbol(s)) {
                return Ok(cur);
            }
            cur = cur.substitute_once(bindings)?;
        }
        if bindings.keys().any(|s| cur.contains_symbol(s)) {
            let remaining = bindings
                .keys()
                .filter(|s| cur.contains_symbol(s))
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::CyclicBindings { rounds: SUBSTITUTION_ROUNDS, remaining });
        }
        Ok(cur)
    }

    /// Approximate evaluation. Every remaining symbol must be bound.
    pub fn to_float(&self, bindings: &NumericBindings) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (mono, c) in &self.0 {
            let mut v = c.to_complex();
            for (s, p) in mono.iter() {
                let x = bindings.get(s).ok_or_else(|| Error::UnboundSymbol(s.to_string()))?;
                v *= x.powi(p);
            }
            total += v;
        }
        Ok(total)
    }

    fn fmt_with(&self, pretty: bool) -> String {
        if self.0.is_empty() {
            return "0".to_string();
        }
        self.0
            .iter()
            .map(|(m, c)| if m.is_one() { format!("({c})") } else { format!("({c}) {}", m.fmt_with(pretty)) })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Human-oriented rendering with Greek letters.
    pub fn pretty(&self) -> String {
        self.fmt_with(true)
    }
}

impl fmt::Display for ScalarCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with(false))
    }
}

impl<'a> Add<&'a ScalarCoeff> for &'a ScalarCoeff {
    type Output = ScalarCoeff;
    fn add(self, o: &ScalarCoeff) -> ScalarCoeff {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_part(c.clone(), m.clone());
        }
        out
    }
}

impl<'a> Sub<&'a ScalarCoeff> for &'a ScalarCoeff {
    type Output = ScalarCoeff;
    fn sub(self, o: &ScalarCoeff) -> ScalarCoeff {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_part(-c.clone(), m.clone());
        }
        out
    }
}

impl<'a> Mul<&'a ScalarCoeff> for &'a ScalarCoeff {
    type Output = ScalarCoeff;
    fn mul(self, o: &ScalarCoeff) -> ScalarCoeff {
        let mut out = ScalarCoeff::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &o.0 {
                out.add_part(c1 * c2, m1.mul(m2));
            }
        }
        out
    }
}

impl Neg for &ScalarCoeff {
    type Output = ScalarCoeff;
    fn neg(self) -> ScalarCoeff {
        ScalarCoeff(self.0.iter().map(|(m, c)| (m.clone(), -c.clone())).collect())
    }
}

impl Neg for ScalarCoeff {
    type Output = ScalarCoeff;
    fn neg(self) -> ScalarCoeff {
        -&self
    }
}

impl Add for ScalarCoeff {
    type Output = ScalarCoeff;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl Sub for ScalarCoeff {
    type Output = ScalarCoeff;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl Mul for ScalarCoeff {
    type Output = ScalarCoeff;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl Div for ScalarCoeff {
    type Output = ScalarCoeff;
    /// Panics when `o` is not a single nonzero part; use
    /// [`ScalarCoeff::checked_div`] where that can happen.
    fn div(self, o: Self) -> Self {
        self.checked_div(&o).expect("divisor must be a nonzero monomial term")
    }
}

impl AddAssign<&ScalarCoeff> for ScalarCoeff {
    fn add_assign(&mut self, o: &ScalarCoeff) {
        for (m, c) in &o.0 {
            self.add_part(c.clone(), m.clone());
        }
    }
}

impl From<GaussianRational> for ScalarCoeff {
    fn from(c: GaussianRational) -> Self {
        ScalarCoeff::constant(c)
    }
}

impl From<Symbol> for ScalarCoeff {
    fn from(s: Symbol) -> Self {
        ScalarCoeff::sym(s)
    }
}

/// Shorthand for products of symbols with a rational prefactor, e.g.
/// `mono(-1, 2, &[(Symbol::KAPPA, 1), (Symbol::M, -1)])` is `-kappa/(2 m)`.
pub fn mono(num: i64, den: i64, syms: &[(Symbol, i32)]) -> ScalarCoeff {
    let m = syms.iter().fold(Monomial::one(), |acc, (s, p)| acc.mul(&Monomial::symbol(s.clone(), *p)));
    ScalarCoeff::term(GaussianRational::frac(num, den), m)
}

/// Same as [`mono`] with an imaginary prefactor.
pub fn imono(num: i64, den: i64, syms: &[(Symbol, i32)]) -> ScalarCoeff {
    &mono(num, den, syms) * &ScalarCoeff::i()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kappa_bindings() -> Bindings {
        let mut b = Bindings::new();
        b.insert(Symbol::KAPPA, imono(-1, 1, &[(Symbol::DS, 1), (Symbol::M, 1)]));
        b.insert(Symbol::DS, mono(2, 1, &[(Symbol::PI, 1), (Symbol::M, -1)]));
        b
    }

    #[test]
    fn product_of_conjugate_phases() {
        let a = imono(2, 1, &[(Symbol::PI, 1)]);
        let b = imono(-1, 1, &[(Symbol::PI, -1)]);
        assert_eq!(&a * &b, ScalarCoeff::int(2));
    }

    #[test]
    fn multiplicative_identity() {
        let k = ScalarCoeff::sym(Symbol::KAPPA);
        assert_eq!(&k * &ScalarCoeff::one(), k);
    }

    #[test]
    fn kappa_is_minus_two_pi_i() {
        let k = ScalarCoeff::sym(Symbol::KAPPA).substitute(&kappa_bindings()).unwrap();
        assert_eq!(k, imono(-2, 1, &[(Symbol::PI, 1)]));
    }

    #[test]
    fn world_length_inverse_gives_mass() {
        let c = mono(2, 1, &[(Symbol::PI, 1), (Symbol::DS, -1)]);
        let mut b = Bindings::new();
        b.insert(Symbol::DS, mono(2, 1, &[(Symbol::PI, 1), (Symbol::M, -1)]));
        assert_eq!(c.substitute(&b).unwrap(), ScalarCoeff::sym(Symbol::M));
    }

    #[test]
    fn self_energy_chain_reduces_to_alpha_over_pi() {
        // kappa dm / m with dm = i e^2 m / (8 pi^3 eps0), e^2 = 4 pi eps0 alpha
        let mut b = kappa_bindings();
        b.insert(Symbol::DM, imono(1, 8, &[(Symbol::E, 2), (Symbol::M, 1), (Symbol::PI, -3), (Symbol::EPS0, -1)]));
        b.insert(Symbol::EPS0, mono(1, 4, &[(Symbol::E, 2), (Symbol::PI, -1), (Symbol::ALPHA, -1)]));
        let c = mono(1, 1, &[(Symbol::KAPPA, 1), (Symbol::DM, 1), (Symbol::M, -1)]);
        assert_eq!(c.substitute(&b).unwrap(), mono(1, 1, &[(Symbol::ALPHA, 1), (Symbol::PI, -1)]));
    }

    #[test]
    fn empty_bindings_leave_input() {
        let c = mono(3, 7, &[(Symbol::E, 2), (Symbol::M, -1)]);
        assert_eq!(c.substitute(&Bindings::new()).unwrap(), c);
    }

    #[test]
    fn cyclic_bindings_are_reported() {
        let mut b = Bindings::new();
        b.insert(Symbol::M, ScalarCoeff::sym(Symbol::M_MU));
        b.insert(Symbol::M_MU, ScalarCoeff::sym(Symbol::M));
        let err = ScalarCoeff::sym(Symbol::M).substitute(&b).unwrap_err();
        assert!(matches!(err, Error::CyclicBindings { .. }));
    }

    #[test]
    fn negative_power_of_sum_is_rejected() {
        let mut b = Bindings::new();
        b.insert(Symbol::M, &ScalarCoeff::sym(Symbol::DM) + &ScalarCoeff::one());
        let err = ScalarCoeff::sym_pow(Symbol::M, -1).substitute(&b).unwrap_err();
        assert!(matches!(err, Error::NotInvertible { .. }));
    }

    #[test]
    fn float_evaluation() {
        let mut nb = NumericBindings::new();
        nb.insert(Symbol::ALPHA, Complex64::new(1.0 / 137.036, 0.0));
        nb.insert(Symbol::PI, Complex64::new(std::f64::consts::PI, 0.0));
        let c = mono(1, 3, &[(Symbol::ALPHA, 2), (Symbol::PI, -2)]);
        let v = c.to_float(&nb).unwrap();
        let direct = (1.0 / 137.036 / std::f64::consts::PI).powi(2) / 3.0;
        assert!((v.re - direct).abs() < 1e-18);
        assert!((v.re - 1.7985e-6).abs() < 1e-9);
        assert_eq!(ScalarCoeff::zero().to_float(&nb).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(ScalarCoeff::frac(63, 192).to_float(&nb).unwrap().re, 0.328125);
    }

    #[test]
    fn unbound_symbol_is_named() {
        let err = ScalarCoeff::sym(Symbol::KAPPA).to_float(&NumericBindings::new()).unwrap_err();
        assert_eq!(err, Error::UnboundSymbol("kappa".into()));
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussianRational::new(ratio(1, 2), ratio(-3, 4)).to_string(), "1/2-3/4i");
        assert_eq!(GaussianRational::new(ratio(0, 1), ratio(-1, 1)).to_string(), "-i");
        assert_eq!(mono(-1, 2, &[(Symbol::E, 1), (Symbol::M, -2)]).to_string(), "(-1/2) e m^-2");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn gauss() -> impl Strategy<Value = GaussianRational> {
            (-30i64..30, 1i64..12, -30i64..30, 1i64..12)
                .prop_map(|(a, b, c, d)| GaussianRational::new(ratio(a, b), ratio(c, d)))
        }

        fn coeff() -> impl Strategy<Value = ScalarCoeff> {
            let sym = prop::sample::select(vec![Symbol::PI, Symbol::E, Symbol::M, Symbol::ALPHA]);
            prop::collection::vec((gauss(), sym, -2i32..3), 0..4).prop_map(|parts| {
                ScalarCoeff::from_parts(parts.into_iter().map(|(c, s, p)| (c, Monomial::symbol(s, p))))
            })
        }

        proptest! {
            #[test]
            fn gaussian_ring_axioms(a in gauss(), b in gauss(), c in gauss()) {
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a * &b, &b * &a);
            }

            #[test]
            fn coeff_ring_axioms(a in coeff(), b in coeff(), c in coeff()) {
                prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
                prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
                prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
                prop_assert_eq!(&a - &a, ScalarCoeff::zero());
            }

            #[test]
            fn canonical_form_ignores_construction_order(
                parts in prop::collection::vec((gauss(), 0usize..4, -2i32..3), 0..6),
                seed in any::<u64>(),
            ) {
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                let syms = [Symbol::PI, Symbol::E, Symbol::M, Symbol::DS];
                let items: Vec<(GaussianRational, Monomial)> = parts
                    .iter()
                    .map(|(c, s, p)| (c.clone(), Monomial::symbol(syms[*s].clone(), *p)))
                    .collect();
                let mut shuffled = items.clone();
                shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
                prop_assert_eq!(ScalarCoeff::from_parts(items), ScalarCoeff::from_parts(shuffled));
            }

            #[test]
            fn substitution_commutes_with_evaluation(c in coeff(), mv in 1i64..9, ev in 1i64..9) {
                let mut b = Bindings::new();
                b.insert(Symbol::M, mono(2, 1, &[(Symbol::PI, 1), (Symbol::E, -1)]));
                b.insert(Symbol::ALPHA, mono(1, mv, &[(Symbol::E, 2), (Symbol::PI, -1)]));
                let mut nb = NumericBindings::new();
                let pi = std::f64::consts::PI;
                let e = ev as f64 / 3.0;
                nb.insert(Symbol::PI, Complex64::new(pi, 0.0));
                nb.insert(Symbol::E, Complex64::new(e, 0.0));
                nb.insert(Symbol::M, Complex64::new(2.0 * pi / e, 0.0));
                nb.insert(Symbol::ALPHA, Complex64::new(e * e / (mv as f64 * pi), 0.0));
                let direct = c.to_float(&nb).unwrap();
                let via = c.substitute(&b).unwrap().to_float(&nb).unwrap();
                let scale = direct.norm().max(1.0);
                prop_assert!((direct - via).norm() <= 1e-12 * scale);
            }
        }
    }
}
