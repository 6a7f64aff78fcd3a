//! Named building blocks in covariant and 3+1 notation.
//!
//! Spatial indices in the 3+1 helpers run over `1..=3`. Three-vectors are
//! arrays of operator components, and `dot`/`cross` keep the operator order
//! of their arguments.

use crate::scalar::{GaussianRational, ScalarCoeff, Symbol};

use super::expr::OpExpr;
use super::word::{Blade, Field, Word};

pub type V3 = [OpExpr; 3];

/// `+1` for the time index, `-1` for spatial ones.
pub fn metric_sign(mu: usize) -> i64 {
    if mu == 0 {
        1
    } else {
        -1
    }
}

fn c(n: i64) -> ScalarCoeff {
    ScalarCoeff::int(n)
}

pub fn sym(s: Symbol) -> OpExpr {
    OpExpr::scalar(ScalarCoeff::sym(s))
}

pub fn i_unit() -> OpExpr {
    OpExpr::scalar(ScalarCoeff::i())
}

/// `gamma^mu`.
pub fn gamma(mu: usize) -> OpExpr {
    Blade::gamma(mu).into()
}

/// `gamma_mu`.
pub fn gamma_lower(mu: usize) -> OpExpr {
    gamma(mu).scale(&c(metric_sign(mu)))
}

/// `d_mu`.
pub fn partial(mu: usize) -> OpExpr {
    OpExpr::word(Word::deriv(mu))
}

/// `d^mu`.
pub fn partial_up(mu: usize) -> OpExpr {
    partial(mu).scale(&c(metric_sign(mu)))
}

/// `A_mu`.
pub fn potential(mu: usize) -> OpExpr {
    OpExpr::word(Word::field(Field::potential(mu)))
}

/// `A^mu`.
pub fn potential_up(mu: usize) -> OpExpr {
    potential(mu).scale(&c(metric_sign(mu)))
}

pub fn field(f: Field) -> OpExpr {
    OpExpr::word(Word::field(f))
}

/// `gamma^mu d_mu`.
pub fn slash_partial() -> OpExpr {
    (0..4).fold(OpExpr::zero(), |acc, mu| &acc + &(&gamma(mu) * &partial(mu)))
}

/// `gamma^mu A_mu`.
pub fn slash_potential() -> OpExpr {
    (0..4).fold(OpExpr::zero(), |acc, mu| &acc + &(&gamma(mu) * &potential(mu)))
}

/// `(i/2)[gamma^mu, gamma^nu]`.
pub fn sigma_munu(mu: usize, nu: usize) -> OpExpr {
    gamma(mu)
        .commutator(&gamma(nu))
        .scale(&ScalarCoeff::constant(GaussianRational::new(crate::scalar::ratio(0, 1), crate::scalar::ratio(1, 2))))
}

pub fn beta() -> OpExpr {
    gamma(0)
}

/// `alpha_k = beta gamma^k`, `k` in `1..=3`.
pub fn alpha(k: usize) -> OpExpr {
    &gamma(0) * &gamma(k)
}

/// Spin matrix `sigma_k = i gamma^i gamma^j` with `(i, j, k)` cyclic.
pub fn sigma(k: usize) -> OpExpr {
    let i = k % 3 + 1;
    let j = (k + 1) % 3 + 1;
    &(&i_unit() * &gamma(i)) * &gamma(j)
}

/// Opaque `i d_t - e phi`.
pub fn energy() -> OpExpr {
    OpExpr::word(Word::energy())
}

/// Scalar potential `phi = A_0`.
pub fn phi() -> OpExpr {
    potential(0)
}

/// Cartesian vector potential `A^k = -A_k`.
pub fn vector_potential() -> V3 {
    std::array::from_fn(|k| potential(k + 1).scale(&c(-1)))
}

pub fn electric() -> V3 {
    std::array::from_fn(|k| field(Field::electric(k + 1)))
}

pub fn magnetic() -> V3 {
    std::array::from_fn(|k| field(Field::magnetic(k + 1)))
}

pub fn grad() -> V3 {
    std::array::from_fn(|k| partial(k + 1))
}

/// Momentum `p = -i grad`.
pub fn momentum() -> V3 {
    std::array::from_fn(|k| partial(k + 1).scale(&-ScalarCoeff::i()))
}

/// Kinetic momentum `pi = p - e A` with the given vector potential.
pub fn kinetic_momentum_with(a: &V3) -> V3 {
    let p = momentum();
    let e = ScalarCoeff::sym(Symbol::E);
    std::array::from_fn(|k| &p[k] - &a[k].scale(&e))
}

pub fn kinetic_momentum() -> V3 {
    kinetic_momentum_with(&vector_potential())
}

pub fn alpha_vec() -> V3 {
    std::array::from_fn(|k| alpha(k + 1))
}

pub fn sigma_vec() -> V3 {
    std::array::from_fn(|k| sigma(k + 1))
}

pub fn dot(a: &V3, b: &V3) -> OpExpr {
    (0..3).fold(OpExpr::zero(), |acc, k| &acc + &(&a[k] * &b[k]))
}

pub fn cross(a: &V3, b: &V3) -> V3 {
    std::array::from_fn(|k| {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        &(&a[i] * &b[j]) - &(&a[j] * &b[i])
    })
}

pub fn scale_vec(v: &V3, s: &ScalarCoeff) -> V3 {
    std::array::from_fn(|k| v[k].scale(s))
}

pub fn add_vec(a: &V3, b: &V3) -> V3 {
    std::array::from_fn(|k| &a[k] + &b[k])
}

pub fn mul_vec_left(left: &OpExpr, v: &V3) -> V3 {
    std::array::from_fn(|k| left * &v[k])
}

/// `sum_k d_k d_k` applied to a field atom.
pub fn laplacian_of(f: Field) -> OpExpr {
    (1..4).fold(OpExpr::zero(), |acc, k| &acc + &field(f.differentiated(k).differentiated(k)))
}
