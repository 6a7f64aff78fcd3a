//! Numeric and exact identity checks run by `check identities`, and the
//! matrix reader behind `quantize`.

use std::str::FromStr;

use gfactor_core::dirac::{check_pseudo_unitarity, hermiticity_condition, potential_generator, CMat};
use gfactor_core::gamma::{alpha_dot_identity, GammaRep};
use gfactor_core::ops::build::slash_potential;
use gfactor_core::ops::OpExpr;
use gfactor_core::scalar::{ratio, GaussianRational, ScalarCoeff, Symbol};
use gfactor_core::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PSEUDO_UNITARITY_TOL: f64 = 1e-10;
pub const COUNTEREXAMPLE_MIN: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn outcome(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { name: name.into(), pass, detail: detail.into() }
}

/// Largest `|| g0 U^dagger g0 U - I ||` over `samples` random real potentials.
pub fn pseudo_unitarity_worst(rep: &GammaRep, seed: u64, samples: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let a: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
            let e = rng.gen_range(0.1..1.5);
            let ds = rng.gen_range(0.05..1.0);
            check_pseudo_unitarity(rep, &potential_generator(rep, e, a), ds)
        })
        .fold(0.0, f64::max)
}

fn random_rational_vector(rng: &mut ChaCha8Rng) -> [ScalarCoeff; 3] {
    std::array::from_fn(|_| {
        let n = rng.gen_range(-50i64..=50);
        let d = rng.gen_range(1i64..=12);
        ScalarCoeff::constant(GaussianRational::new(ratio(n, d), ratio(0, 1)))
    })
}

/// Number of random rational pairs for which `(alpha.a)(alpha.b) = a.b + i sigma.(a x b)` fails.
pub fn alpha_dot_failures(rep: &GammaRep, seed: u64, samples: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .filter(|_| {
            let a = random_rational_vector(&mut rng);
            let b = random_rational_vector(&mut rng);
            !alpha_dot_identity(rep, &a, &b).holds()
        })
        .count()
}

pub fn identity_suite(rep: &GammaRep, seed: u64) -> Result<Vec<Outcome>> {
    let mut out = Vec::new();

    let worst = pseudo_unitarity_worst(rep, seed, 20);
    out.push(outcome(
        "pseudo-unitarity, 20 random potentials",
        worst <= PSEUDO_UNITARITY_TOL,
        format!("worst residual {worst:.3e} (tolerance {PSEUDO_UNITARITY_TOL:e})"),
    ));

    let counter = check_pseudo_unitarity(rep, &(CMat::identity() * Complex64::i()), 1.0);
    out.push(outcome(
        "pseudo-unitarity fails for M = iI",
        counter > COUNTEREXAMPLE_MIN,
        format!("residual {counter:.6} (must exceed {COUNTEREXAMPLE_MIN})"),
    ));

    let generator = slash_potential().scale(&-ScalarCoeff::sym(Symbol::E));
    let h = hermiticity_condition(rep, &generator)?;
    out.push(outcome("g0 M hermitian for M = -e gamma.A", h.hermitian, "entrywise with real symbols"));
    let h = hermiticity_condition(rep, &OpExpr::scalar(ScalarCoeff::i()))?;
    let witness = h.witness.map(|(i, j, a, b)| format!("({i},{j}): {a} vs {b}")).unwrap_or_default();
    out.push(outcome("g0 M not hermitian for M = iI", !h.hermitian, witness));

    let failures = alpha_dot_failures(rep, seed ^ 0x5eed, 100);
    out.push(outcome(
        "(alpha.a)(alpha.b) = a.b + i sigma.(a x b), 100 rational pairs",
        failures == 0,
        format!("{failures} failures"),
    ));
    Ok(out)
}

/// Four rows of four whitespace-separated complex numbers such as `1.5-2i`.
pub fn parse_matrix(text: &str) -> Result<CMat> {
    let rows: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    if rows.len() != 4 {
        return Err(Error::Parse { pos: 0, msg: format!("expected 4 rows, found {}", rows.len()) });
    }
    let mut m = CMat::zeros();
    for (i, row) in rows.iter().enumerate() {
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != 4 {
            return Err(Error::Parse { pos: i + 1, msg: format!("expected 4 entries, found {}", tokens.len()) });
        }
        for (j, tok) in tokens.iter().enumerate() {
            let z = Complex64::from_str(tok)
                .map_err(|_| Error::Parse { pos: i + 1, msg: format!("bad complex number `{tok}`") })?;
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::Parse { pos: i + 1, msg: format!("non-finite entry `{tok}`") });
            }
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_pass() {
        let rep = GammaRep::dirac().unwrap();
        let suite = identity_suite(&rep, 1).unwrap();
        assert!(suite.iter().all(|o| o.pass), "{suite:?}");
    }

    #[test]
    fn matrix_file_format() {
        let m = parse_matrix("1 0 0 0\n0 1+2i 0 0\n0 0 -3.5i 0\n0 0 0 2-1e-3i\n").unwrap();
        assert_eq!(m[(1, 1)], Complex64::new(1.0, 2.0));
        assert_eq!(m[(2, 2)], Complex64::new(0.0, -3.5));
        assert_eq!(m[(3, 3)], Complex64::new(2.0, -1e-3));
        assert!(parse_matrix("1 0 0\n0 1 0\n0 0 1\n").is_err());
        assert!(parse_matrix("1 0 0 0\n0 1 0 0\n0 0 x 0\n0 0 0 1\n").is_err());
        assert!(parse_matrix("1 0 0 0\n0 1 0 0\n0 0 1\n0 0 0 1\n").is_err());
    }
}
