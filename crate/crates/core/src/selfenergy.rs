//! Electrostatic self-energy of a charge spread over a four-dimensional
//! sphere, integrated along an imaginary radius.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{imono, ScalarCoeff, Symbol};

use std::f64::consts::PI;

/// Field magnitude `r0 e / (2 pi^2 eps0 r^3)` at radius `r`.
pub fn field_profile(r: f64, r0: f64, e_charge: f64, eps0: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    Ok(r0 * e_charge / (2.0 * PI * PI * eps0 * r.powi(3)))
}

/// Area of the three-sphere of radius `r`.
pub fn sphere_area(r: f64) -> f64 {
    2.0 * PI * PI * r.powi(3)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub r0: f64,
    pub e_charge: f64,
    pub eps0: f64,
    /// Upper limit of the numeric part, in units of `r0`.
    pub cutoff: f64,
    pub rel_tol: f64,
    /// Maximum integrand evaluations.
    pub budget: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { r0: 1.0, e_charge: 1.0, eps0: 1.0, cutoff: 1e6, rel_tol: 1e-12, budget: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfEnergy {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: u32,
}

/// `(eps0/2r0) int_{r0}^inf |E|^2 2 pi^2 r^3 i dr`, numeric part up to the
/// cutoff plus the exact tail of `int r^-3`.
pub fn self_energy_quadrature(cfg: &QuadratureConfig) -> Result<SelfEnergy> {
    if !(cfg.r0 > 0.0) || !(cfg.cutoff > 1.0) {
        return Err(Error::Domain(format!("need r0 > 0 and cutoff > 1, got {} and {}", cfg.r0, cfg.cutoff)));
    }
    let (r0, e, eps0) = (cfg.r0, cfg.e_charge, cfg.eps0);
    let prefactor = eps0 / (2.0 * r0);
    let integrand = |r: f64| {
        let f = r0 * e / (2.0 * PI * PI * eps0 * r.powi(3));
        prefactor * f * f * sphere_area(r)
    };
    let upper = cfg.cutoff * r0;
    let mut total = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut a = r0;
    while a < upper {
        let b = (a * 10.0).min(upper);
        // magnitude of the piece sets the absolute target
        let scale = integrand(a) * (b - a);
        let out = quadrature::double_exponential::integrate(integrand, a, b, scale * cfg.rel_tol * 1e-2);
        total += out.integral;
        error += out.error_estimate;
        evaluations += out.num_function_evaluations;
        a = b;
    }
    // int_R^inf c r^-3 dr = c / (2 R^2), with c = integrand(r) r^3
    total += integrand(upper) * upper.powi(3) / (2.0 * upper * upper);
    if error > cfg.rel_tol * total.abs() || evaluations > cfg.budget {
        return Err(Error::QuadratureBudget { estimate: error / total.abs(), evaluations: evaluations as usize });
    }
    Ok(SelfEnergy { value: Complex64::new(0.0, total), error_estimate: error, evaluations })
}

/// Symbolic `i e^2 / (8 pi^2 eps0 r0)`.
pub fn closed_form_delta_m() -> ScalarCoeff {
    imono(1, 8, &[(Symbol::E, 2), (Symbol::PI, -2), (Symbol::EPS0, -1), (Symbol::R0, -1)])
}

/// `i e^2 / (8 pi^2 eps0 r0)` as a number.
pub fn closed_form_value(r0: f64, e_charge: f64, eps0: f64) -> Complex64 {
    Complex64::new(0.0, e_charge * e_charge / (8.0 * PI * PI * eps0 * r0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{mono, Bindings};

    #[test]
    fn profile_at_r0_and_scaling() {
        let f = field_profile(1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((f - 1.0 / (2.0 * PI * PI)).abs() < 1e-15);
        let ratio = field_profile(4.0, 1.0, 1.0, 1.0).unwrap() / field_profile(2.0, 1.0, 1.0, 1.0).unwrap();
        assert!((ratio - 0.125).abs() < 1e-15);
        assert!(field_profile(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(field_profile(-1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn gauss_flux_is_constant() {
        for r in [0.5, 1.0, 7.0, 300.0] {
            let flux = field_profile(r, 2.0, 3.0, 0.5).unwrap() * sphere_area(r);
            assert!((flux - 2.0 * 3.0 / 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_constants() {
        let s = self_energy_quadrature(&QuadratureConfig::default()).unwrap();
        assert!((s.value.im - 1.0 / (8.0 * PI * PI)).abs() < 1e-12);
        assert!((s.value.im - 0.0126651).abs() < 1e-7);
        assert_eq!(s.value.re, 0.0);
    }

    #[test]
    fn tiny_budget_is_reported() {
        let cfg = QuadratureConfig { budget: 3, ..QuadratureConfig::default() };
        assert!(matches!(self_energy_quadrature(&cfg), Err(Error::QuadratureBudget { .. })));
    }

    #[test]
    fn closed_form_substitutions() {
        let r0 = Bindings::from([(Symbol::R0, mono(1, 1, &[(Symbol::PI, 1), (Symbol::M, -1)]))]);
        let with_mass = closed_form_delta_m().substitute(&r0).unwrap();
        assert_eq!(with_mass, imono(1, 8, &[(Symbol::E, 2), (Symbol::M, 1), (Symbol::PI, -3), (Symbol::EPS0, -1)]));
        let mut chain = r0.clone();
        chain.insert(Symbol::EPS0, mono(1, 4, &[(Symbol::E, 2), (Symbol::PI, -1), (Symbol::ALPHA, -1)]));
        let bound = closed_form_delta_m().substitute(&chain).unwrap();
        assert_eq!(bound, imono(1, 2, &[(Symbol::ALPHA, 1), (Symbol::M, 1), (Symbol::PI, -2)]));
    }
}
