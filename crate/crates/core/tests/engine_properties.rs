use gfactor_core::gamma::GammaRep;
use gfactor_core::ops::bch::{cbh_expand, grade_filter};
use gfactor_core::ops::build::*;
use gfactor_core::ops::rules::{Rule, RuleSet};
use gfactor_core::ops::text::{emit, parse};
use gfactor_core::ops::{Field, OpExpr};
use gfactor_core::scalar::{GaussianRational, NumericBindings, ScalarCoeff, Symbol};
use nalgebra::Matrix4;
use num_complex::Complex64;
use proptest::prelude::*;

fn atom(k: u8) -> OpExpr {
    let i = (k % 4) as usize;
    match k / 4 {
        0 => gamma(i),
        1 => partial(i),
        2 => potential(i),
        3 => field(Field::electric(i.max(1))),
        _ => field(Field::potential(i).differentiated((i + 1) % 4)),
    }
}

fn word() -> impl Strategy<Value = OpExpr> {
    prop::collection::vec(0u8..20, 1..=3).prop_map(|ks| ks.into_iter().fold(OpExpr::one(), |acc, k| &acc * &atom(k)))
}

fn gaussian() -> impl Strategy<Value = ScalarCoeff> {
    (-3i64..=3, -3i64..=3, 1i64..=4).prop_map(|(re, im, d)| {
        ScalarCoeff::constant(GaussianRational::new(
            gfactor_core::scalar::ratio(re, d),
            gfactor_core::scalar::ratio(im, d),
        ))
    })
}

fn expr() -> impl Strategy<Value = OpExpr> {
    prop::collection::vec((gaussian(), word()), 1..=3)
        .prop_map(|ts| ts.into_iter().fold(OpExpr::zero(), |acc, (c, w)| &acc + &w.scale(&c)))
}

/// Derivative-free, field-free products of gamma matrices.
fn matrix_expr() -> impl Strategy<Value = OpExpr> {
    prop::collection::vec((gaussian(), prop::collection::vec(0usize..4, 0..=4)), 1..=4).prop_map(|ts| {
        ts.into_iter().fold(OpExpr::zero(), |acc, (c, idx)| {
            let w = idx.into_iter().fold(OpExpr::one(), |w, mu| &w * &gamma(mu));
            &acc + &w.scale(&c)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_identity(a in word(), b in word(), c in word()) {
        let j = &(&a.commutator(&b).commutator(&c) + &b.commutator(&c).commutator(&a)) + &c.commutator(&a).commutator(&b);
        prop_assert!(j.is_zero(), "{}", j);
    }

    #[test]
    fn text_round_trip_is_idempotent(e in expr()) {
        let text = emit(&e);
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(emit(&back), text);
    }

    #[test]
    fn rule_application_is_idempotent(e in expr()) {
        let rs = RuleSet::new([Rule::StaticFields, Rule::LorenzGauge, Rule::EmFields, Rule::CurlFreeE]);
        let once = rs.apply(&e).unwrap();
        prop_assert_eq!(rs.apply(&once).unwrap(), once);
    }

    #[test]
    fn rules_are_confluent(e in expr(), perm in Just(Rule::ALL).prop_shuffle()) {
        let rs = RuleSet::new([Rule::StaticFields, Rule::LorenzGauge, Rule::EmFields, Rule::CurlFreeE, Rule::WeakField]);
        let (shuffled, _) = rs.apply_in_order(&e, &perm).unwrap();
        prop_assert_eq!(shuffled, rs.apply(&e).unwrap());
    }

    #[test]
    fn representation_is_faithful(a in matrix_expr(), b in matrix_expr()) {
        let rep = GammaRep::dirac().unwrap();
        let ma = a.to_matrix(&rep).unwrap();
        let mb = b.to_matrix(&rep).unwrap();
        prop_assert_eq!((&a * &b).to_matrix(&rep).unwrap(), ma.mul(&mb));
        prop_assert_eq!((&a + &b).to_matrix(&rep).unwrap(), ma.add(&mb));
    }

    #[test]
    fn commutator_is_bilinear(a in expr(), b in expr(), c in expr(), k in gaussian()) {
        prop_assert_eq!(a.commutator(&(&b + &c.scale(&k))), &a.commutator(&b) + &a.commutator(&c).scale(&k));
        prop_assert_eq!((&a + &c.scale(&k)).commutator(&b), &a.commutator(&b) + &c.commutator(&b).scale(&k));
    }

    #[test]
    fn cbh_grades_are_homogeneous(a in matrix_expr(), b in matrix_expr(), k in gaussian()) {
        let ds = ScalarCoeff::sym(Symbol::DS);
        let (x, y) = (a.scale(&ds), b.scale(&ds));
        let z = cbh_expand(&x, &y, 3).unwrap();
        let zk = cbh_expand(&x.scale(&k), &y.scale(&k), 3).unwrap();
        for p in 1..=3 {
            prop_assert_eq!(grade_filter(&zk, p), grade_filter(&z, p).scale(&k.pow(p as u32)));
        }
    }
}

type CMat = Matrix4<Complex64>;

fn numeric(e: &OpExpr, ds: f64) -> CMat {
    let rep = GammaRep::dirac().unwrap();
    let m = e.to_matrix(&rep).unwrap();
    let b = NumericBindings::from([(Symbol::DS, Complex64::new(ds, 0.0))]);
    CMat::from_fn(|i, j| m.get(i, j).to_float(&b).unwrap())
}

/// `log(M)` for `M` close to the identity, by the Mercator series.
fn log_near_identity(m: &CMat) -> CMat {
    let a = m - CMat::identity();
    let mut term = a;
    let mut out = CMat::zeros();
    for k in 1..60 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out += term * Complex64::new(sign / k as f64, 0.0);
        term *= a;
    }
    out
}

#[test]
fn cbh_truncation_error_is_fourth_order() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let ds = ScalarCoeff::sym(Symbol::DS);
    for _ in 0..10 {
        let mut rand_op = || {
            (0..4).fold(OpExpr::zero(), |acc, mu| {
                let re: i64 = rng.gen_range(-4..=4);
                let im: i64 = rng.gen_range(-4..=4);
                let c = ScalarCoeff::constant(GaussianRational::new(
                    gfactor_core::scalar::ratio(re, 4),
                    gfactor_core::scalar::ratio(im, 4),
                ));
                &acc + &(&gamma(mu) * &gamma((mu + 1) % 4)).scale(&c)
            })
        };
        let (x, y) = (rand_op().scale(&ds), rand_op().scale(&ds));
        let z = cbh_expand(&x, &y, 3).unwrap();
        let residual = |s: f64| {
            let exact = log_near_identity(&(numeric(&x, s).exp() * numeric(&y, s).exp()));
            (numeric(&z, s) - exact).norm()
        };
        let s = 0.02;
        let ratio = residual(s) / residual(s / 2.0);
        assert!(ratio >= 8.0 * 0.8, "residual ratio {ratio}");
    }
}
