//! Campbell–Hausdorff and conjugation series, graded by the world length.

use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, ScalarCoeff, Symbol};

use super::expr::OpExpr;

pub const MIN_ORDER: i32 = 1;
pub const MAX_ORDER: i32 = 3;

fn check_order(order: i32) -> Result<()> {
    if (MIN_ORDER..=MAX_ORDER).contains(&order) {
        Ok(())
    } else {
        Err(Error::OrderOutOfRange { order, min: MIN_ORDER, max: MAX_ORDER })
    }
}

fn check_graded(name: &str, e: &OpExpr) -> Result<()> {
    match e.symbol_powers(&Symbol::DS).first() {
        Some(&p) if p < 1 => {
            Err(Error::UnexpectedForm(format!("{name} must carry at least one power of ds, found {p}")))
        }
        _ => Ok(()),
    }
}

/// Terms of `e` with exactly `power` factors of the world length.
pub fn grade_filter(e: &OpExpr, power: i32) -> OpExpr {
    e.symbol_grade(&Symbol::DS, power)
}

fn truncate(e: &OpExpr, order: i32) -> OpExpr {
    e.truncate_symbol(&Symbol::DS, order).0
}

/// `log(exp(X) exp(Y))` through third-order brackets, truncated at
/// `ds^order`.
pub fn cbh_expand(x: &OpExpr, y: &OpExpr, order: i32) -> Result<OpExpr> {
    check_order(order)?;
    check_graded("X", x)?;
    check_graded("Y", y)?;
    let mut z = x + y;
    if order >= 2 {
        let xy = x.commutator(y);
        z = &z + &xy.scale(&ScalarCoeff::frac(1, 2));
        if order >= 3 {
            let third = &xy.commutator(y) - &xy.commutator(x);
            z = &z + &third.scale(&ScalarCoeff::frac(1, 12));
        }
    }
    Ok(truncate(&z, order))
}

/// `phi + i[phi, w] - 1/2 [[phi, w], w] + ...`, the expansion of
/// `exp(-i w) phi exp(i w)`, truncated at `ds^order`.
pub fn conjugate_expand(phi: &OpExpr, omega: &OpExpr, order: i32) -> Result<OpExpr> {
    check_order(order)?;
    check_graded("omega", omega)?;
    let mut total = phi.clone();
    let mut nested = phi.clone();
    let mut factor = GaussianRational::one();
    for k in 1..=order {
        nested = truncate(&nested.commutator(omega), order);
        // i^k / k!
        factor = &(&factor * &GaussianRational::i()) * &GaussianRational::frac(1, i64::from(k));
        total = &total + &nested.scale(&ScalarCoeff::constant(factor.clone()));
    }
    Ok(truncate(&total, order))
}
