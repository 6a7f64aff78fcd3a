//! Canonical operator words.
//!
//! A word is `blade * fields * derivatives * energy^k`, read left to right:
//! a product of upper-index gamma generators in increasing order, a sorted
//! list of commuting field atoms, a multiset of partial derivatives acting on
//! everything to their right, and a power of the opaque energy operator
//! `i d_0 - e A_0` at the far right.

use std::fmt;

use crate::gamma::{GammaRep, QMat};
use crate::scalar::GaussianRational;

/// Multiplicities of `d_0 .. d_3` (lower index).
pub type Multi = [u8; 4];

pub const NO_DERIVS: Multi = [0; 4];

pub fn unit(mu: usize) -> Multi {
    let mut d = NO_DERIVS;
    d[mu] = 1;
    d
}

pub fn order(d: &Multi) -> u32 {
    d.iter().map(|&x| u32::from(x)).sum()
}

/// Bitmask over `gamma^0 .. gamma^3`; the element is the product of the set
/// generators in increasing index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Blade(pub u8);

impl Blade {
    pub const ONE: Blade = Blade(0);

    pub fn gamma(mu: usize) -> Blade {
        Blade(1 << mu)
    }

    pub fn has(self, mu: usize) -> bool {
        self.0 & (1 << mu) != 0
    }

    pub fn grade(self) -> u32 {
        self.0.count_ones()
    }

    /// Number of spatial generators; even blades commute with `gamma^0`.
    pub fn spatial_grade(self) -> u32 {
        (self.0 & 0b1110).count_ones()
    }

    pub fn is_even(self) -> bool {
        self.spatial_grade().is_multiple_of(2)
    }

    /// `self * other = sign * (self ^ other)` under the (+,-,-,-) metric.
    pub fn mul(self, other: Blade) -> (i8, Blade) {
        let mut swaps = 0u32;
        for j in 0..4 {
            if other.has(j) {
                swaps += (self.0 >> (j + 1)).count_ones();
            }
        }
        let squared_spatial = (self.0 & other.0 & 0b1110).count_ones();
        let sign = if (swaps + squared_spatial).is_multiple_of(2) { 1 } else { -1 };
        (sign, Blade(self.0 ^ other.0))
    }

    pub fn to_matrix(self, rep: &GammaRep) -> QMat {
        (0..4).filter(|&mu| self.has(mu)).fold(QMat::identity(), |acc, mu| acc.mul(&rep.gamma_upper[mu]))
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..4).filter(move |&mu| self.has(mu))
    }
}

/// Hermitian conjugate of a blade is `sign * blade`.
pub fn blade_dagger_sign(b: Blade) -> i8 {
    // (g^a g^b ...)^dagger = ... g^b^dagger g^a^dagger, g^0 hermitian,
    // g^k antihermitian; reversing k generators costs k(k-1)/2 swaps.
    let k = b.grade();
    let rev = (k * k.saturating_sub(1) / 2) % 2;
    let anti = b.spatial_grade() % 2;
    if (rev + anti).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldKind {
    /// Four-potential with lower index, `A_0 = phi`, `A_k = -A^k`.
    Potential,
    /// Cartesian component of the electric field.
    Electric,
    /// Cartesian component of the magnetic field.
    Magnetic,
}

impl FieldKind {
    pub fn letter(self) -> char {
        match self {
            FieldKind::Potential => 'A',
            FieldKind::Electric => 'E',
            FieldKind::Magnetic => 'B',
        }
    }
}

/// A field component, possibly differentiated: `(d^d F_index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Field {
    pub kind: FieldKind,
    pub index: u8,
    pub d: Multi,
}

impl Field {
    pub fn new(kind: FieldKind, index: usize) -> Field {
        Field { kind, index: index as u8, d: NO_DERIVS }
    }

    pub fn potential(mu: usize) -> Field {
        Field::new(FieldKind::Potential, mu)
    }

    pub fn electric(k: usize) -> Field {
        Field::new(FieldKind::Electric, k)
    }

    pub fn magnetic(k: usize) -> Field {
        Field::new(FieldKind::Magnetic, k)
    }

    pub fn differentiated(mut self, mu: usize) -> Field {
        self.d[mu] += 1;
        self
    }

    pub fn with_derivs(mut self, d: Multi) -> Field {
        self.d = d;
        self
    }

    /// Stable identifier usable as a scalar symbol name.
    pub fn symbol_name(&self) -> String {
        let mut s = String::new();
        if order(&self.d) > 0 {
            s.push('d');
            s.push_str(&deriv_digits(&self.d));
        }
        s.push(self.kind.letter());
        s.push('_');
        s.push_str(&self.index.to_string());
        s
    }
}

pub fn deriv_digits(d: &Multi) -> String {
    let mut s = String::new();
    for (mu, &n) in d.iter().enumerate() {
        for _ in 0..n {
            s.push(char::from(b'0' + mu as u8));
        }
    }
    s
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if order(&self.d) == 0 {
            write!(f, "{}_{}", self.kind.letter(), self.index)
        } else {
            write!(f, "(d{} {}_{})", deriv_digits(&self.d), self.kind.letter(), self.index)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    pub blade: Blade,
    pub fields: Vec<Field>,
    pub derivs: Multi,
    pub energy: u8,
}

impl Word {
    pub fn one() -> Word {
        Word::default()
    }

    pub fn blade(b: Blade) -> Word {
        Word { blade: b, ..Word::default() }
    }

    pub fn field(f: Field) -> Word {
        Word { fields: vec![f], ..Word::default() }
    }

    pub fn deriv(mu: usize) -> Word {
        Word { derivs: unit(mu), ..Word::default() }
    }

    pub fn energy() -> Word {
        Word { energy: 1, ..Word::default() }
    }

    /// True when the word is a constant matrix.
    pub fn is_matrix(&self) -> bool {
        self.fields.is_empty() && self.derivs == NO_DERIVS && self.energy == 0
    }

    pub fn field_count(&self) -> usize {
        self.fields.len()
    }

    pub fn deriv_order(&self) -> u32 {
        order(&self.derivs)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.blade.indices().map(|mu| format!("g{mu}")).collect();
        parts.extend(self.fields.iter().map(|x| x.to_string()));
        for (mu, &n) in self.derivs.iter().enumerate() {
            for _ in 0..n {
                parts.push(format!("d{mu}"));
            }
        }
        for _ in 0..self.energy {
            parts.push("Om".to_string());
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// Coefficient-free sign of a blade product as a Gaussian rational.
pub fn sign_value(s: i8) -> GaussianRational {
    GaussianRational::int(i64::from(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blade_products_follow_the_metric() {
        let g = Blade::gamma;
        assert_eq!(g(1).mul(g(0)), (-1, Blade(0b0011)));
        assert_eq!(g(0).mul(g(0)), (1, Blade::ONE));
        assert_eq!(g(2).mul(g(2)), (-1, Blade::ONE));
        let (s, b) = Blade(0b0110).mul(Blade(0b0110));
        assert_eq!((s, b), (-1, Blade::ONE));
    }

    #[test]
    fn blade_product_matches_matrices() {
        let rep = GammaRep::dirac().unwrap();
        for a in 0..16u8 {
            for b in 0..16u8 {
                let (s, c) = Blade(a).mul(Blade(b));
                let lhs = Blade(a).to_matrix(&rep).mul(&Blade(b).to_matrix(&rep));
                let rhs = c.to_matrix(&rep).scale(&sign_value(s));
                assert_eq!(lhs, rhs, "blades {a:04b} {b:04b}");
            }
        }
    }

    #[test]
    fn dagger_sign_matches_matrices() {
        let rep = GammaRep::dirac().unwrap();
        for a in 0..16u8 {
            let m = Blade(a).to_matrix(&rep);
            assert_eq!(m.dagger(), m.scale(&sign_value(blade_dagger_sign(Blade(a)))));
        }
    }

    #[test]
    fn word_display() {
        let w = Word {
            blade: Blade(0b0011),
            fields: vec![Field::potential(0).differentiated(1).differentiated(1), Field::electric(2)],
            derivs: unit(0),
            energy: 1,
        };
        assert_eq!(w.to_string(), "g0 g1 (d11 A_0) E_2 d0 Om");
        assert_eq!(Word::one().to_string(), "1");
    }
}
