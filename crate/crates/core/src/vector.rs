//! Abstract three-vector algebra with ε–δ contraction.
//!
//! Vector expressions are sums of `coeff * scalar-products * v` where `v` is
//! a single vector or an irreducible cross product of two vectors. Nested
//! cross products are expanded with `a x (b x c) = b (a.c) - c (a.b)` and
//! scalar results are reduced to dot products and triple products in a
//! canonical order.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::{ScalarCoeff, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vector(pub &'static str);

pub const SIGMA: Vector = Vector("sigma");
pub const MAGNETIC: Vector = Vector("B");
pub const POSITION: Vector = Vector("r");
pub const POTENTIAL: Vector = Vector("A");
pub const ELECTRIC: Vector = Vector("E");

/// Product of dot products and triple products, each stored sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Contraction {
    dots: Vec<(Vector, Vector)>,
    triples: Vec<[Vector; 3]>,
}

impl Contraction {
    fn dot(a: Vector, b: Vector) -> Contraction {
        Contraction { dots: vec![if a <= b { (a, b) } else { (b, a) }], triples: vec![] }
    }

    /// `a . (b x c)` in canonical order with its sign; zero when repeated.
    fn triple(a: Vector, b: Vector, c: Vector) -> Option<(i64, Contraction)> {
        let mut v = [a, b, c];
        if v[0] == v[1] || v[1] == v[2] || v[0] == v[2] {
            return None;
        }
        let mut sign = 1;
        for i in 0..3 {
            for j in 0..2 - i {
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        Some((sign, Contraction { dots: vec![], triples: vec![v] }))
    }

    fn mul(&self, o: &Contraction) -> Contraction {
        let mut dots = self.dots.clone();
        dots.extend(o.dots.iter().copied());
        dots.sort();
        let mut triples = self.triples.clone();
        triples.extend(o.triples.iter().copied());
        triples.sort();
        Contraction { dots, triples }
    }

    fn count(&self, v: Vector) -> usize {
        let d = self.dots.iter().map(|&(a, b)| usize::from(a == v) + usize::from(b == v)).sum::<usize>();
        d + self.triples.iter().flatten().filter(|&&x| x == v).count()
    }

    pub fn is_one(&self) -> bool {
        self.dots.is_empty() && self.triples.is_empty()
    }
}

impl fmt::Display for Contraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.dots.iter().map(|(a, b)| format!("({}.{})", a.0, b.0)).collect();
        parts.extend(self.triples.iter().map(|t| format!("[{} {} {}]", t[0].0, t[1].0, t[2].0)));
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Direction {
    Along(Vector),
    /// `a x b` with `a < b`.
    Cross(Vector, Vector),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScalarExpr(BTreeMap<Contraction, ScalarCoeff>);

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VecExpr(BTreeMap<(Contraction, Direction), ScalarCoeff>);

fn add_into<K: Ord>(map: &mut BTreeMap<K, ScalarCoeff>, k: K, c: ScalarCoeff) {
    let sum = match map.remove(&k) {
        Some(old) => &old + &c,
        None => c,
    };
    if !sum.is_zero() {
        map.insert(k, sum);
    }
}

impl ScalarExpr {
    pub fn zero() -> ScalarExpr {
        ScalarExpr::default()
    }

    pub fn constant(c: ScalarCoeff) -> ScalarExpr {
        let mut m = BTreeMap::new();
        add_into(&mut m, Contraction::default(), c);
        ScalarExpr(m)
    }

    fn single(c: ScalarCoeff, k: Contraction) -> ScalarExpr {
        let mut m = BTreeMap::new();
        add_into(&mut m, k, c);
        ScalarExpr(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Contraction, &ScalarCoeff)> {
        self.0.iter()
    }

    pub fn add(&self, o: &ScalarExpr) -> ScalarExpr {
        let mut m = self.0.clone();
        for (k, c) in &o.0 {
            add_into(&mut m, k.clone(), c.clone());
        }
        ScalarExpr(m)
    }

    pub fn mul(&self, o: &ScalarExpr) -> ScalarExpr {
        let mut m = BTreeMap::new();
        for (k1, c1) in &self.0 {
            for (k2, c2) in &o.0 {
                add_into(&mut m, k1.mul(k2), c1 * c2);
            }
        }
        ScalarExpr(m)
    }

    pub fn scale(&self, c: &ScalarCoeff) -> ScalarExpr {
        ScalarExpr::constant(c.clone()).mul(self)
    }

    /// Coefficient of `a . b`.
    pub fn dot_coefficient(&self, a: Vector, b: Vector) -> ScalarCoeff {
        self.0.get(&Contraction::dot(a, b)).cloned().unwrap_or_else(ScalarCoeff::zero)
    }

    /// Everything except the `a . b` term.
    pub fn without_dot(&self, a: Vector, b: Vector) -> ScalarExpr {
        let key = Contraction::dot(a, b);
        ScalarExpr(self.0.iter().filter(|(k, _)| **k != key).map(|(k, c)| (k.clone(), c.clone())).collect())
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.0.iter().map(|(k, c)| format!("{{{c}}} {k}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl VecExpr {
    pub fn atom(v: Vector) -> VecExpr {
        let mut m = BTreeMap::new();
        add_into(&mut m, (Contraction::default(), Direction::Along(v)), ScalarCoeff::one());
        VecExpr(m)
    }

    fn single(c: ScalarCoeff, k: Contraction, d: Direction) -> VecExpr {
        let mut m = BTreeMap::new();
        add_into(&mut m, (k, d), c);
        VecExpr(m)
    }

    pub fn add(&self, o: &VecExpr) -> VecExpr {
        let mut m = self.0.clone();
        for (k, c) in &o.0 {
            add_into(&mut m, k.clone(), c.clone());
        }
        VecExpr(m)
    }

    pub fn scale(&self, c: &ScalarCoeff) -> VecExpr {
        VecExpr(self.0.iter().map(|(k, v)| (k.clone(), v * c)).filter(|(_, v)| !v.is_zero()).collect())
    }

    pub fn times(&self, s: &ScalarExpr) -> VecExpr {
        let mut m = BTreeMap::new();
        for ((k1, d), c1) in &self.0 {
            for (k2, c2) in &s.0 {
                add_into(&mut m, (k1.mul(k2), d.clone()), c1 * c2);
            }
        }
        VecExpr(m)
    }

    pub fn dot(&self, o: &VecExpr) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for ((k1, d1), c1) in &self.0 {
            for ((k2, d2), c2) in &o.0 {
                let base = ScalarExpr::single(c1 * c2, k1.mul(k2));
                out = out.add(&base.mul(&dot_directions(d1, d2)));
            }
        }
        out
    }

    pub fn cross(&self, o: &VecExpr) -> VecExpr {
        let mut out = VecExpr::default();
        for ((k1, d1), c1) in &self.0 {
            for ((k2, d2), c2) in &o.0 {
                let base = ScalarExpr::single(c1 * c2, k1.mul(k2));
                out = out.add(&cross_directions(d1, d2).times(&base));
            }
        }
        out
    }
}

fn dot_directions(a: &Direction, b: &Direction) -> ScalarExpr {
    use Direction::*;
    let triple = |x, y, z| match Contraction::triple(x, y, z) {
        Some((s, k)) => ScalarExpr::single(ScalarCoeff::int(s), k),
        None => ScalarExpr::zero(),
    };
    let dot = |x, y| ScalarExpr::single(ScalarCoeff::one(), Contraction::dot(x, y));
    match (a, b) {
        (Along(x), Along(y)) => dot(*x, *y),
        (Along(x), Cross(y, z)) | (Cross(y, z), Along(x)) => triple(*x, *y, *z),
        // (a x b).(c x d) = (a.c)(b.d) - (a.d)(b.c)
        (Cross(p, q), Cross(r, s)) => {
            dot(*p, *r).mul(&dot(*q, *s)).add(&dot(*p, *s).mul(&dot(*q, *r)).scale(&ScalarCoeff::int(-1)))
        }
    }
}

fn cross_directions(a: &Direction, b: &Direction) -> VecExpr {
    use Direction::*;
    let along = |v| VecExpr::atom(v);
    let dot = |x, y| ScalarExpr::single(ScalarCoeff::one(), Contraction::dot(x, y));
    // a x (b x c) = b (a.c) - c (a.b)
    let bac_cab = |a: Vector, b: Vector, c: Vector| {
        along(b).times(&dot(a, c)).add(&along(c).times(&dot(a, b)).scale(&ScalarCoeff::int(-1)))
    };
    match (a, b) {
        (Along(x), Along(y)) => {
            if x == y {
                VecExpr::default()
            } else if x < y {
                VecExpr::single(ScalarCoeff::one(), Contraction::default(), Cross(*x, *y))
            } else {
                VecExpr::single(ScalarCoeff::int(-1), Contraction::default(), Cross(*y, *x))
            }
        }
        (Along(x), Cross(y, z)) => bac_cab(*x, *y, *z),
        (Cross(y, z), Along(x)) => bac_cab(*x, *y, *z).scale(&ScalarCoeff::int(-1)),
        // (a x b) x (c x d) = c [a b d] - d [a b c]
        (Cross(p, q), Cross(r, s)) => {
            let t = |x, y, z| match Contraction::triple(x, y, z) {
                Some((sg, k)) => ScalarExpr::single(ScalarCoeff::int(sg), k),
                None => ScalarExpr::zero(),
            };
            along(*r).times(&t(*p, *q, *s)).add(&along(*s).times(&t(*p, *q, *r)).scale(&ScalarCoeff::int(-1)))
        }
    }
}

/// How directional averages over the position vector are taken.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Only `r.r -> r^2`.
    None,
    /// `(B.r)` times any further `r` averages to zero.
    #[default]
    BDotRVanishes,
    /// `<r_i r_j> = r^2 delta_ij / 3`, odd powers of `r` vanish.
    Isotropic,
}

/// Self-field of a charge at rest in a constant magnetic field:
/// `A = (1/2) B x r`, `E = -(phi/r^2) r`.
pub fn self_field() -> (VecExpr, VecExpr) {
    let a = VecExpr::atom(MAGNETIC).cross(&VecExpr::atom(POSITION)).scale(&ScalarCoeff::frac(1, 2));
    let e = VecExpr::atom(POSITION).scale(&crate::scalar::mono(-1, 1, &[(Symbol::PHI, 1), (Symbol::R, -2)]));
    (a, e)
}

/// Replaces `r.r` by `r^2` and applies the chosen average over directions of `r`.
pub fn spherical_reduction(s: &ScalarExpr, averaging: Averaging) -> ScalarExpr {
    let r2 = ScalarCoeff::sym_pow(Symbol::R, 2);
    let mut out = ScalarExpr::zero();
    for (k, c) in s.terms() {
        let mut c = c.clone();
        let mut dots = Vec::new();
        for &(a, b) in &k.dots {
            if a == POSITION && b == POSITION {
                c = &c * &r2;
            } else {
                dots.push((a, b));
            }
        }
        let k = Contraction { dots, triples: k.triples.clone() };
        let n_r = k.count(POSITION);
        let reduced = match averaging {
            Averaging::None => Some((c, k)),
            Averaging::BDotRVanishes => {
                let has_br = k.dots.contains(&Contraction::dot(MAGNETIC, POSITION).dots[0]);
                (!(has_br && n_r >= 2)).then_some((c, k))
            }
            Averaging::Isotropic => isotropic(c, k, n_r),
        };
        if let Some((c, k)) = reduced {
            out = out.add(&ScalarExpr::single(c, k));
        }
    }
    out
}

fn isotropic(c: ScalarCoeff, k: Contraction, n_r: usize) -> Option<(ScalarCoeff, Contraction)> {
    match n_r {
        0 => Some((c, k)),
        2 if k.triples.is_empty() => {
            let partners: Vec<Vector> = k
                .dots
                .iter()
                .filter_map(|&(a, b)| {
                    if a == POSITION {
                        Some(b)
                    } else if b == POSITION {
                        Some(a)
                    } else {
                        None
                    }
                })
                .collect();
            let rest: Vec<(Vector, Vector)> =
                k.dots.iter().copied().filter(|&(a, b)| a != POSITION && b != POSITION).collect();
            let mut out = Contraction { dots: rest, triples: vec![] }.mul(&Contraction::dot(partners[0], partners[1]));
            out.dots.sort();
            let c = &c * &crate::scalar::mono(1, 3, &[(Symbol::R, 2)]);
            Some((c, out))
        }
        _ if n_r % 2 == 1 => None,
        _ => Some((c, k)),
    }
}

/// `sigma.(A x E)` and `A.E` for the self-field, before averaging.
pub fn self_field_structures() -> (ScalarExpr, ScalarExpr) {
    let (a, e) = self_field();
    (VecExpr::atom(SIGMA).dot(&a.cross(&e)), a.dot(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::mono;

    fn v(x: Vector) -> VecExpr {
        VecExpr::atom(x)
    }

    #[test]
    fn double_cross_expansion() {
        // (B x r) x r = -B (r.r) + r (B.r)
        let lhs = v(MAGNETIC).cross(&v(POSITION)).cross(&v(POSITION));
        let dot = |a, b| ScalarExpr::single(ScalarCoeff::one(), Contraction::dot(a, b));
        let rhs = v(MAGNETIC)
            .times(&dot(POSITION, POSITION))
            .scale(&ScalarCoeff::int(-1))
            .add(&v(POSITION).times(&dot(MAGNETIC, POSITION)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn triple_products_are_antisymmetric() {
        let abc = v(SIGMA).dot(&v(MAGNETIC).cross(&v(POSITION)));
        let bac = v(MAGNETIC).dot(&v(SIGMA).cross(&v(POSITION)));
        assert_eq!(abc, bac.scale(&ScalarCoeff::int(-1)));
        assert!(v(MAGNETIC).dot(&v(MAGNETIC).cross(&v(POSITION))).is_zero());
    }

    #[test]
    fn lagrange_identity() {
        let l = v(SIGMA).cross(&v(MAGNETIC)).dot(&v(SIGMA).cross(&v(MAGNETIC)));
        assert_eq!(l.terms().count(), 2);
    }

    #[test]
    fn self_field_spin_term() {
        let (so, ae) = self_field_structures();
        assert!(ae.is_zero());
        let red = spherical_reduction(&so, Averaging::BDotRVanishes);
        assert_eq!(red, ScalarExpr::single(mono(1, 2, &[(Symbol::PHI, 1)]), Contraction::dot(SIGMA, MAGNETIC)));
    }

    #[test]
    fn without_averaging_both_terms_remain() {
        let (so, _) = self_field_structures();
        let red = spherical_reduction(&so, Averaging::None);
        assert_eq!(red.terms().count(), 2);
        assert_eq!(red.dot_coefficient(SIGMA, MAGNETIC), mono(1, 2, &[(Symbol::PHI, 1)]));
    }

    #[test]
    fn isotropic_average_gives_two_thirds() {
        let bxr_x_r = v(MAGNETIC).cross(&v(POSITION)).cross(&v(POSITION));
        let s = v(SIGMA).dot(&bxr_x_r);
        let red = spherical_reduction(&s, Averaging::Isotropic);
        assert_eq!(red.dot_coefficient(SIGMA, MAGNETIC), mono(-2, 3, &[(Symbol::R, 2)]));
        let reduced = spherical_reduction(&s, Averaging::BDotRVanishes);
        assert_eq!(reduced.dot_coefficient(SIGMA, MAGNETIC), mono(-1, 1, &[(Symbol::R, 2)]));
    }
}
