//! Evolution-matrix conditions, the quantization condition and the wave
//! equation of the spread electron.

use nalgebra::{Complex, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma::{GammaRep, Mat4, QMat};
use crate::ops::bch::{cbh_expand, conjugate_expand};
use crate::ops::build::*;
use crate::ops::rules::{Rule, RuleSet};
use crate::ops::{Field, OpExpr};
use crate::scalar::{Bindings, GaussianRational, ScalarCoeff, Symbol};

pub type CMat = Matrix4<Complex64>;

pub fn to_cmat(m: &QMat) -> CMat {
    m.to_complex()
}

/// `|| gamma^0 U^dagger gamma^0 U - I ||` for `U = exp(i ds M)`.
pub fn check_pseudo_unitarity(rep: &GammaRep, m: &CMat, delta_s: f64) -> f64 {
    let u = (m * Complex::new(0.0, delta_s)).exp();
    let g0 = to_cmat(&rep.beta);
    (g0 * u.adjoint() * g0 * u - CMat::identity()).norm()
}

/// Matrix `-e gamma^mu A_mu` for numeric `e` and lower-index potential.
pub fn potential_generator(rep: &GammaRep, e: f64, a_lower: [f64; 4]) -> CMat {
    (0..4).fold(CMat::zeros(), |acc, mu| acc + to_cmat(&rep.gamma_upper[mu]) * Complex::from(-e * a_lower[mu]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hermiticity {
    pub hermitian: bool,
    /// First entry `(i, j)` with `(g0 M)_ij != conj((g0 M)_ji)`.
    pub witness: Option<(usize, usize, ScalarCoeff, ScalarCoeff)>,
}

/// Whether `gamma^0 M` is hermitian, treating every symbol as real.
pub fn hermiticity_condition(rep: &GammaRep, m: &OpExpr) -> Result<Hermiticity> {
    let g0m = (&beta() * m).to_matrix(rep)?;
    let dag: Mat4<ScalarCoeff> = g0m.dagger();
    for i in 0..4 {
        for j in 0..4 {
            if g0m.get(i, j) != dag.get(i, j) {
                return Ok(Hermiticity {
                    hermitian: false,
                    witness: Some((i, j, g0m.get(i, j).clone(), dag.get(i, j).clone())),
                });
            }
        }
    }
    Ok(Hermiticity { hermitian: true, witness: None })
}

pub const QUANTIZATION_TOL: f64 = 1e-8;
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Clone, Debug, Serialize)]
pub struct EigenCheck {
    pub eigenvalue: (f64, f64),
    pub satisfies_2npi: bool,
    /// `n` with `i lambda = 2 n pi` when flagged.
    pub n: Option<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantizationCheck {
    pub eigen: Vec<EigenCheck>,
    pub flagged: usize,
    pub kernel_dimension: usize,
    pub condition: f64,
}

impl QuantizationCheck {
    /// The kernel of `exp(Z) - I` is spanned by the flagged eigenvectors.
    pub fn consistent(&self) -> bool {
        self.flagged == self.kernel_dimension
    }
}

/// Eigenvectors of an upper-triangular matrix by back substitution.
fn triangular_eigenvectors(t: &CMat) -> Result<CMat> {
    let scale = t.norm().max(1.0);
    let mut v = CMat::zeros();
    for k in 0..4 {
        let lambda = t[(k, k)];
        v[(k, k)] = Complex::new(1.0, 0.0);
        for j in (0..k).rev() {
            let s: Complex64 = (j + 1..=k).map(|l| t[(j, l)] * v[(l, k)]).sum();
            let den = t[(j, j)] - lambda;
            if den.norm() <= 1e-12 * scale {
                if s.norm() > 1e-10 * scale {
                    return Err(Error::IllConditioned(f64::INFINITY));
                }
                v[(j, k)] = Complex::new(0.0, 0.0);
            } else {
                v[(j, k)] = -s / den;
            }
        }
    }
    Ok(v)
}

fn singular_values(m: &CMat) -> Vec<f64> {
    m.svd(false, false).singular_values.iter().copied().collect()
}

/// Spectral form of the quantization condition: `exp(Z) v = v` exactly when
/// `i lambda` is a multiple of `2 pi`.
pub fn quantization_kernel_check(z: &CMat) -> Result<QuantizationCheck> {
    let (q, t) = z.schur().unpack();
    let mut vecs = q * triangular_eigenvectors(&t)?;
    for mut col in vecs.column_iter_mut() {
        let n = col.norm();
        col /= Complex::from(n);
    }
    let sv = singular_values(&vecs);
    let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(a, b), &s| (a.max(s), b.min(s)));
    let condition = smax / smin;
    if !condition.is_finite() || condition >= MAX_CONDITION {
        return Err(Error::IllConditioned(condition));
    }
    let eigen: Vec<EigenCheck> = (0..4)
        .map(|k| {
            let lambda = t[(k, k)];
            let ok = (lambda.exp() - 1.0).norm() < QUANTIZATION_TOL;
            let n = (Complex64::i() * lambda).re / (2.0 * std::f64::consts::PI);
            EigenCheck { eigenvalue: (lambda.re, lambda.im), satisfies_2npi: ok, n: ok.then(|| n.round() as i64) }
        })
        .collect();
    let shifted = z.exp() - CMat::identity();
    let thresh = QUANTIZATION_TOL * shifted.norm().max(1.0);
    let kernel_dimension = singular_values(&shifted).iter().filter(|&&s| s < thresh).count();
    let flagged = eigen.iter().filter(|e| e.satisfies_2npi).count();
    Ok(QuantizationCheck { eigen, flagged, kernel_dimension, condition })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WaveEquationResult {
    /// `i gamma.d - e gamma.A - m`.
    pub dirac_part: OpExpr,
    /// `v_series[k]` is the correction of world-length grade `k + 1`.
    pub v_series: Vec<OpExpr>,
    pub mass_term: ScalarCoeff,
}

/// `ds = 2 pi / m`, `n = 1`.
pub fn compton_bindings() -> Bindings {
    Bindings::from([
        (Symbol::DS, crate::scalar::mono(2, 1, &[(Symbol::PI, 1), (Symbol::M, -1)])),
        (Symbol::N, ScalarCoeff::one()),
    ])
}

/// `X = ds gamma.d`, `Y = i ds e gamma.A`.
pub fn generators() -> (OpExpr, OpExpr) {
    let ds = ScalarCoeff::sym(Symbol::DS);
    let x = slash_partial().scale(&ds);
    let y = slash_potential().scale(&(&(&ds * &ScalarCoeff::sym(Symbol::E)) * &ScalarCoeff::i()));
    (x, y)
}

/// Wave equation with corrections up to `V_order`.
pub fn derive_wave_equation(order: i32) -> Result<WaveEquationResult> {
    if !(1..=2).contains(&order) {
        return Err(Error::OrderOutOfRange { order, min: 1, max: 2 });
    }
    let (x, y) = generators();
    let z = cbh_expand(&x, &y, order + 1)?;
    let two_n_pi = crate::scalar::mono(2, 1, &[(Symbol::N, 1), (Symbol::PI, 1)]);
    let phi = &z.scale(&ScalarCoeff::i()) - &OpExpr::scalar(two_n_pi);
    let omega = y.scale(&ScalarCoeff::i());
    let shifted = conjugate_expand(&phi, &omega, order + 1)?.scale(&ScalarCoeff::sym_pow(Symbol::DS, -1));

    let mass_part = shifted.symbol_grade(&Symbol::DS, -1).substitute(&compton_bindings())?;
    let mass_term = -mass_part.coeff(&crate::ops::Word::one());
    if mass_part != OpExpr::scalar(-mass_term.clone()) {
        return Err(Error::UnexpectedForm(format!("mass part is not a scalar: {mass_part}")));
    }
    let dirac_part = &shifted.symbol_grade(&Symbol::DS, 0) + &mass_part;
    let v_series = (1..=order).map(|k| shifted.symbol_grade(&Symbol::DS, k)).collect();
    Ok(WaveEquationResult { dirac_part, v_series, mass_term })
}

/// Printed form `(ds e / 2) [gamma.d, gamma.A]`.
pub fn v1_commutator_form() -> OpExpr {
    let c = crate::scalar::mono(1, 2, &[(Symbol::DS, 1), (Symbol::E, 1)]);
    slash_partial().commutator(&slash_potential()).scale(&c)
}

/// Printed form `-(i ds^2 e / 12) [[gamma.d, gamma.A], gamma(i d + e A)]`.
pub fn v2_commutator_form() -> OpExpr {
    let c = crate::scalar::imono(-1, 12, &[(Symbol::DS, 2), (Symbol::E, 1)]);
    let kinetic = &slash_partial().scale(&ScalarCoeff::i()) + &slash_potential().scale(&ScalarCoeff::sym(Symbol::E));
    slash_partial().commutator(&slash_potential()).commutator(&kinetic).scale(&c)
}

/// `ds = i kappa / m`.
pub fn kappa_binding() -> Bindings {
    Bindings::from([(Symbol::DS, crate::scalar::imono(1, 1, &[(Symbol::KAPPA, 1), (Symbol::M, -1)]))])
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliForm {
    /// `kappa (e/4m) { sigma^{mu nu} F_{mu nu} - 2 sigma^{mu nu}(A_mu d_nu - A_nu d_mu) }`.
    pub covariant: OpExpr,
    /// `-kappa (e/2m) { (sigma.B - i alpha.E) - 2 { sigma.(A x grad) - i alpha.(phi grad + A d_t) } }`.
    pub three_plus_one: OpExpr,
    /// `(i kappa e / 2m) d.A`, the part both forms leave out.
    pub gauge_term: OpExpr,
    /// Input with `ds` expressed through `kappa`.
    pub v1: OpExpr,
}

fn f_munu(mu: usize, nu: usize) -> OpExpr {
    &field(Field::potential(nu).differentiated(mu)) - &field(Field::potential(mu).differentiated(nu))
}

pub fn pauli_covariant() -> OpExpr {
    let mut fs = OpExpr::zero();
    let mut orbital = OpExpr::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            let s = sigma_munu(mu, nu);
            fs = &fs + &(&s * &f_munu(mu, nu));
            let ad = &(&potential(mu) * &partial(nu)) - &(&potential(nu) * &partial(mu));
            orbital = &orbital + &(&s * &ad);
        }
    }
    let c = crate::scalar::mono(1, 4, &[(Symbol::KAPPA, 1), (Symbol::E, 1), (Symbol::M, -1)]);
    (&fs - &orbital.scale(&ScalarCoeff::int(2))).scale(&c)
}

pub fn pauli_three_plus_one() -> OpExpr {
    let a = vector_potential();
    let i = ScalarCoeff::i();
    let sigma_b = dot(&sigma_vec(), &magnetic());
    let alpha_e = dot(&alpha_vec(), &electric());
    let sigma_axg = dot(&sigma_vec(), &cross(&a, &grad()));
    let phi_grad_a_dt: V3 = std::array::from_fn(|k| &(&phi() * &grad()[k]) + &(&a[k] * &partial(0)));
    let alpha_flow = dot(&alpha_vec(), &phi_grad_a_dt);
    let inner = &(&sigma_b - &alpha_e.scale(&i)) - &(&sigma_axg - &alpha_flow.scale(&i)).scale(&ScalarCoeff::int(2));
    inner.scale(&crate::scalar::mono(-1, 2, &[(Symbol::KAPPA, 1), (Symbol::E, 1), (Symbol::M, -1)]))
}

pub fn lorenz_term() -> OpExpr {
    let div = (0..4).fold(OpExpr::zero(), |acc, mu| {
        &acc + &field(Field::potential(mu).differentiated(mu)).scale(&ScalarCoeff::int(metric_sign(mu)))
    });
    div.scale(&crate::scalar::imono(1, 2, &[(Symbol::KAPPA, 1), (Symbol::E, 1), (Symbol::M, -1)]))
}

/// Rewrites `V_1` into the Pauli-term forms and checks both equalities.
pub fn v1_to_pauli_form(v1: &OpExpr) -> Result<PauliForm> {
    if v1.symbol_powers(&Symbol::DS) != [1] {
        return Err(Error::UnexpectedForm(format!(
            "expected world-length grade 1, found {:?}",
            v1.symbol_powers(&Symbol::DS)
        )));
    }
    let v1 = v1.substitute(&kappa_binding())?;
    let covariant = pauli_covariant();
    let three_plus_one = pauli_three_plus_one();
    let gauge_term = lorenz_term();
    let cov_gap = &(&v1 - &covariant) - &gauge_term;
    if !cov_gap.is_zero() {
        return Err(Error::Consistency(format!("covariant Pauli form differs by\n{cov_gap}")));
    }
    let rules = RuleSet::new([Rule::EmFields]);
    let split_gap = rules.apply(&(&(&v1 - &three_plus_one) - &gauge_term))?;
    if !split_gap.is_zero() {
        return Err(Error::Consistency(format!("3+1 Pauli form differs by\n{split_gap}")));
    }
    Ok(PauliForm { covariant, three_plus_one, gauge_term, v1 })
}

/// `exp(i M)` pseudo-unitarity in the exact sense: `gamma^0 M^dagger gamma^0 = M`.
pub fn pseudo_hermitian(rep: &GammaRep, m: &QMat) -> bool {
    rep.beta.mul(&m.dagger()).mul(&rep.beta) == *m
}

pub fn gaussian(re: i64, im: i64) -> GaussianRational {
    GaussianRational::new(crate::scalar::ratio(re, 1), crate::scalar::ratio(im, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{density, Spinor};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rep() -> GammaRep {
        GammaRep::dirac().unwrap()
    }

    #[test]
    fn potential_generator_is_pseudo_unitary() {
        let rep = rep();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let m = potential_generator(&rep, 0.3, a);
            assert!(check_pseudo_unitarity(&rep, &m, 0.7) <= 1e-10);
        }
        assert!(check_pseudo_unitarity(&rep, &CMat::identity(), 1.3) <= 1e-10);
        let bad = CMat::identity() * Complex64::i();
        let r = check_pseudo_unitarity(&rep, &bad, 1.0);
        // U = exp(-1) I, so the residual is 2 |exp(-2) - 1|
        assert!((r - 2.0 * (1.0 - (-2.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn density_is_conserved() {
        let rep = rep();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let u = (potential_generator(&rep, 1.0, a) * Complex::new(0.0, 0.9)).exp();
            let psi: [Complex64; 4] =
                std::array::from_fn(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let upsi = u * nalgebra::Vector4::from(psi);
            let before = density(&rep, &Spinor(psi));
            let after = density(&rep, &Spinor(std::array::from_fn(|i| upsi[i])));
            assert!((before - after).abs() < 1e-10);
        }
    }

    #[test]
    fn hermiticity_cases() {
        let rep = rep();
        let m = slash_potential().scale(&-ScalarCoeff::sym(Symbol::E));
        assert!(hermiticity_condition(&rep, &m).unwrap().hermitian);
        assert!(hermiticity_condition(&rep, &OpExpr::zero()).unwrap().hermitian);
        let g0123 = &(&(&gamma(0) * &gamma(1)) * &gamma(2)) * &gamma(3);
        // gamma^0 gamma^0 gamma^1 gamma^2 gamma^3 = gamma^1 gamma^2 gamma^3 is hermitian
        assert!(hermiticity_condition(&rep, &g0123).unwrap().hermitian);
        let g5 = g0123.scale(&ScalarCoeff::i());
        let h = hermiticity_condition(&rep, &g5).unwrap();
        assert!(!h.hermitian);
        let (_, _, lhs, rhs) = h.witness.unwrap();
        assert_eq!(lhs, -rhs);
    }

    #[test]
    fn planted_spectra() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let diag = |d: [Complex64; 4]| CMat::from_diagonal(&nalgebra::Vector4::from(d));
        let z = diag([Complex::new(0.0, -two_pi), 0.0.into(), 0.0.into(), 0.0.into()]);
        let q = quantization_kernel_check(&z).unwrap();
        assert_eq!(q.flagged, 4);
        assert_eq!(q.kernel_dimension, 4);
        let ns: Vec<_> = q.eigen.iter().map(|e| e.n).collect();
        assert!(ns.contains(&Some(1)) && ns.contains(&Some(0)));
        let z = diag([Complex::new(0.0, -std::f64::consts::PI), 0.0.into(), 0.0.into(), 0.0.into()]);
        let q = quantization_kernel_check(&z).unwrap();
        assert_eq!(q.flagged, 3);
        assert_eq!(q.kernel_dimension, 3);
        assert!(q.consistent());
    }

    #[test]
    fn defective_input_is_rejected() {
        let mut z = CMat::zeros();
        z[(0, 1)] = Complex::new(1.0, 0.0);
        assert!(matches!(quantization_kernel_check(&z), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn free_particle() {
        let w = derive_wave_equation(2).unwrap();
        let free = |e: &OpExpr| e.filter(|w, _| w.fields.is_empty());
        assert_eq!(
            free(&w.dirac_part),
            &slash_partial().scale(&ScalarCoeff::i()) - &OpExpr::scalar(ScalarCoeff::sym(Symbol::M))
        );
        assert!(w.v_series.iter().all(|v| free(v).is_zero()));
        assert_eq!(w.mass_term, ScalarCoeff::sym(Symbol::M));
    }

    #[test]
    fn wave_equation_matches_printed_forms() {
        let w = derive_wave_equation(2).unwrap();
        let expected = &(&slash_partial().scale(&ScalarCoeff::i())
            - &slash_potential().scale(&ScalarCoeff::sym(Symbol::E)))
            - &OpExpr::scalar(ScalarCoeff::sym(Symbol::M));
        assert_eq!(w.dirac_part, expected);
        assert_eq!(w.v_series[0], v1_commutator_form());
        assert_eq!(w.v_series[1], v2_commutator_form());
        assert_eq!(w.v_series[0].symbol_powers(&Symbol::DS), [1]);
        assert_eq!(w.v_series[1].symbol_powers(&Symbol::DS), [2]);
        assert_eq!(derive_wave_equation(1).unwrap().v_series, vec![v1_commutator_form()]);
        assert!(derive_wave_equation(3).is_err());
    }

    #[test]
    fn pauli_forms_agree() {
        let p = v1_to_pauli_form(&v1_commutator_form()).unwrap();
        let fs = p.covariant.filter(|w, _| w.derivs == crate::ops::word::NO_DERIVS);
        assert!(!fs.is_empty());
        assert!(v1_to_pauli_form(&v2_commutator_form()).is_err());
    }

    #[test]
    fn exact_pseudo_hermiticity() {
        let rep = rep();
        assert!(pseudo_hermitian(&rep, &rep.gamma_upper[2]));
        assert!(!pseudo_hermitian(&rep, &QMat::identity().scale(&gaussian(0, 1))));
    }

    #[test]
    fn chain_rule_for_even_functions() {
        // g(s^2) with s = gamma_mu x^mu: gamma^mu d_mu g = 2 s g'(s^2)
        let rep = rep();
        let g = |t: f64| (0.3 * t).sin();
        let dg = |t: f64| 0.3 * (0.3 * t).cos();
        let x = [0.4, -0.2, 0.7, 0.1];
        let sq = |x: [f64; 4]| x[0] * x[0] - x[1] * x[1] - x[2] * x[2] - x[3] * x[3];
        let h = 1e-5;
        let mut lhs = CMat::zeros();
        for mu in 0..4 {
            let (mut p, mut m) = (x, x);
            p[mu] += h;
            m[mu] -= h;
            let d = (g(sq(p)) - g(sq(m))) / (2.0 * h);
            lhs += to_cmat(&rep.gamma_upper[mu]) * Complex::from(d);
        }
        let s = (0..4).fold(CMat::zeros(), |acc, mu| acc + to_cmat(&rep.gamma_lower[mu]) * Complex::from(x[mu]));
        let rhs = s * Complex::from(2.0 * dg(sq(x)));
        assert!((lhs - rhs).norm() < 1e-6);
    }
}
