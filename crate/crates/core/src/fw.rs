//! Foldy–Wouthuysen reduction to order `1/m^2` and the alteration caused by
//! the first-order correction of the wave equation.

use serde::{Deserialize, Serialize};

use crate::audit::{Audit, AuditKind};
use crate::dirac::v1_commutator_form;
use crate::error::{Error, Result};
use crate::ops::build::*;
use crate::ops::rules::{project_out, Rule, RuleSet};
use crate::ops::{Field, OpExpr, Word};
use crate::scalar::{mono, ScalarCoeff, Symbol};

fn inv_m(p: i32) -> ScalarCoeff {
    ScalarCoeff::sym_pow(Symbol::M, -p)
}

fn e() -> ScalarCoeff {
    ScalarCoeff::sym(Symbol::E)
}

fn beta_m() -> OpExpr {
    beta().scale(&ScalarCoeff::sym(Symbol::M))
}

/// `H = beta m + even + odd` split by the beta grading.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    pub expr: OpExpr,
    pub even: OpExpr,
    pub odd: OpExpr,
    pub mass: OpExpr,
}

impl Hamiltonian {
    pub fn new(expr: OpExpr) -> Result<Hamiltonian> {
        let mass = expr
            .filter(|w, c| *w == Word::blade(crate::ops::Blade::gamma(0)) && c.contains_symbol(&Symbol::M))
            .map_coeffs(|c| c.filter_parts(|m| *m == crate::scalar::Monomial::symbol(Symbol::M, 1)));
        let (even, odd) = split_even_odd(&(&expr - &mass))?;
        Ok(Hamiltonian { expr, even, odd, mass })
    }

    /// `alpha.pi + e phi + beta m` with `pi = p - e A`.
    pub fn dirac() -> Hamiltonian {
        let h = &(&dot(&alpha_vec(), &kinetic_momentum()) + &phi().scale(&e())) + &beta_m();
        Hamiltonian::new(h).expect("Dirac Hamiltonian splits")
    }

    pub fn reassembled(&self) -> OpExpr {
        &(&self.mass + &self.even) + &self.odd
    }
}

/// Beta-grading split of a 3+1 operator.
pub fn split_even_odd(h: &OpExpr) -> Result<(OpExpr, OpExpr)> {
    let (even, odd) = h.split_parity();
    if &even + &odd != *h {
        return Err(Error::UnexpectedForm(format!("term neither even nor odd in\n{h}")));
    }
    Ok((even, odd))
}

/// `beta m + e + (1/2m) beta o^2 - (1/8m^2) [o, [o, e]]`.
pub fn fw_transform(h: &Hamiltonian, order: i32) -> Result<OpExpr> {
    if order != 2 {
        return Err(Error::OrderOutOfRange { order, min: 2, max: 2 });
    }
    let o = &h.odd;
    let kinetic = (&beta() * &(o * o)).scale(&mono(1, 2, &[(Symbol::M, -1)]));
    let darwin = o.commutator(&o.commutator(&h.even)).scale(&mono(-1, 8, &[(Symbol::M, -2)]));
    Ok(&(&(&h.mass + &h.even) + &kinetic) + &darwin)
}

/// Rewrites potential derivatives into `E`, `B` for static fields. Products
/// of alpha matrices are already reduced to spin matrices by the blade
/// normal form.
pub fn pauli_reduce(hfw: &OpExpr) -> Result<OpExpr> {
    RuleSet::new([Rule::StaticFields, Rule::EmFields]).apply(hfw)
}

/// `(1/2m) beta pi^2 + e phi + beta m - (e/2m) beta sigma.B - (e/4m^2) sigma.(E x pi) + (e/8m^2) lap phi`.
pub fn pauli_hamiltonian() -> OpExpr {
    let pi = kinetic_momentum();
    let kinetic = (&beta() * &dot(&pi, &pi)).scale(&mono(1, 2, &[(Symbol::M, -1)]));
    let magnetic_term =
        (&beta() * &dot(&sigma_vec(), &magnetic())).scale(&mono(-1, 2, &[(Symbol::E, 1), (Symbol::M, -1)]));
    let spin_orbit =
        dot(&sigma_vec(), &cross(&electric(), &pi)).scale(&mono(-1, 4, &[(Symbol::E, 1), (Symbol::M, -2)]));
    let darwin = laplacian_of(Field::potential(0)).scale(&mono(1, 8, &[(Symbol::E, 1), (Symbol::M, -2)]));
    let h = &(&(&(&kinetic + &phi().scale(&e())) + &beta_m()) + &magnetic_term) + &spin_orbit;
    &h + &darwin
}

/// `beta sigma.B`.
pub fn spin_magnetic() -> OpExpr {
    &beta() * &dot(&sigma_vec(), &magnetic())
}

/// Signature word of `beta sigma.B`: the `B_3` component.
pub fn spin_magnetic_signature() -> Word {
    spin_magnetic()
        .terms()
        .find(|(w, _)| w.fields == [Field::magnetic(3)])
        .map(|(w, _)| w.clone())
        .expect("beta sigma.B has a B_3 term")
}

/// Multiple of `beta sigma.B` contained in `e`.
pub fn spin_magnetic_coefficient(e: &OpExpr) -> Result<ScalarCoeff> {
    Ok(project_out(e, &spin_magnetic(), &spin_magnetic_signature())?.coefficient)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionSet {
    pub static_fields: bool,
    pub curl_free_e: bool,
    pub nonrelativistic: bool,
    pub commuting_phi: bool,
    pub weak_field: bool,
}

impl Default for AssumptionSet {
    fn default() -> Self {
        AssumptionSet {
            static_fields: true,
            curl_free_e: true,
            nonrelativistic: true,
            commuting_phi: true,
            weak_field: true,
        }
    }
}

impl AssumptionSet {
    pub fn none() -> AssumptionSet {
        AssumptionSet {
            static_fields: false,
            curl_free_e: false,
            nonrelativistic: false,
            commuting_phi: false,
            weak_field: false,
        }
    }

    pub fn require_all_but_optional(&self) -> Result<()> {
        for (on, name) in [
            (self.static_fields, "static_fields"),
            (self.nonrelativistic, "nonrelativistic"),
            (self.commuting_phi, "commuting_phi"),
        ] {
            if !on {
                return Err(Error::MissingAssumption(name));
            }
        }
        Ok(())
    }

    fn field_rules(&self) -> RuleSet {
        let mut rs = RuleSet::new([Rule::EmFields]);
        if self.static_fields {
            rs = rs.with(Rule::StaticFields);
        }
        if self.curl_free_e {
            rs = rs.with(Rule::CurlFreeE);
        }
        if self.weak_field {
            rs = rs.with(Rule::WeakField);
        }
        rs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct V1Residual {
    pub result: OpExpr,
    pub audit: Audit,
}

/// `iA.E`, `sigma.(A x E)` and friends in Cartesian components.
pub fn a_dot_e() -> OpExpr {
    dot(&vector_potential(), &electric())
}

pub fn sigma_a_cross_e() -> OpExpr {
    dot(&sigma_vec(), &cross(&vector_potential(), &electric()))
}

/// Expected closed form `-kappa (e^2/2m^2) sigma.(A x E) - kappa (e^2/4m^2) i A.E`.
pub fn v1_residual_target() -> OpExpr {
    let c1 = mono(-1, 2, &[(Symbol::KAPPA, 1), (Symbol::E, 2), (Symbol::M, -2)]);
    let c2 = crate::scalar::imono(-1, 4, &[(Symbol::KAPPA, 1), (Symbol::E, 2), (Symbol::M, -2)]);
    &sigma_a_cross_e().scale(&c1) + &a_dot_e().scale(&c2)
}

/// Replaces every opaque energy operator by `i d_0 - e phi` acting from the
/// right position it occupies.
pub fn expand_energy(e: &OpExpr) -> OpExpr {
    let expansion = &partial(0).scale(&ScalarCoeff::i()) - &phi().scale(&self::e());
    let mut out = OpExpr::zero();
    for (w, c) in e.terms() {
        let mut head = OpExpr::word(Word { energy: 0, ..w.clone() }).scale(c);
        for _ in 0..w.energy {
            head = &head * &expansion;
        }
        out = &out + &head;
    }
    out
}

/// `(beta/m) Omega`.
fn energy_factor() -> OpExpr {
    (&beta() * &energy()).scale(&inv_m(1))
}

fn curl(v_of: impl Fn(usize) -> Field) -> V3 {
    std::array::from_fn(|k| {
        let (i, j) = ((k + 1) % 3 + 1, (k + 2) % 3 + 1);
        &field(v_of(j).differentiated(i)) - &field(v_of(i).differentiated(j))
    })
}

/// Named structures of the first-order alteration.
pub mod structures {
    use super::*;

    /// `i sigma.(curl E)`.
    pub fn curl_e() -> OpExpr {
        dot(&sigma_vec(), &curl(Field::electric)).scale(&ScalarCoeff::i())
    }

    /// `(div E) + 2 E.grad`.
    pub fn divergence() -> OpExpr {
        (1..4).fold(OpExpr::zero(), |acc, k| {
            let d = field(Field::electric(k).differentiated(k));
            &acc + &(&d + &(&field(Field::electric(k)) * &partial(k)).scale(&ScalarCoeff::int(2)))
        })
    }

    /// `beta sigma.(B - 2 A x grad) (beta/m) Omega`.
    pub fn spin_energy() -> OpExpr {
        let a = vector_potential();
        let inner = add_vec(&magnetic(), &scale_vec(&cross(&a, &grad()), &ScalarCoeff::int(-2)));
        &(&beta() * &dot(&sigma_vec(), &inner)) * &energy_factor()
    }

    pub fn spin_orbit() -> OpExpr {
        sigma_a_cross_e()
    }

    /// `i A.E (beta/m) Omega`.
    pub fn potential_energy() -> OpExpr {
        (&a_dot_e() * &energy_factor()).scale(&ScalarCoeff::i())
    }

    /// `i (div A) Omega / m`.
    pub fn divergence_a() -> OpExpr {
        let div = (1..4).fold(OpExpr::zero(), |acc, k| &acc - &field(Field::potential(k).differentiated(k)));
        (&div * &energy()).scale(&(&ScalarCoeff::i() * &inv_m(1)))
    }
}

fn signature(structure: &OpExpr, pick: impl Fn(&Word) -> bool) -> Word {
    structure.terms().map(|(w, _)| w).find(|w| pick(w)).cloned().expect("structure contains its signature word")
}

/// Multiples of the named structures in the static first-order alteration.
#[derive(Clone, Debug, PartialEq)]
pub struct Alteration {
    pub even: OpExpr,
    pub odd: OpExpr,
    /// `(1/2m) beta {o, do}`.
    pub anticommutator_part: OpExpr,
    /// `-(1/8m^2)([do,[o,e]] + [o,[do,e]] + [o,[o,de]])`.
    pub commutator_part: OpExpr,
    pub curl_e: ScalarCoeff,
    pub divergence: ScalarCoeff,
    pub spin_energy: ScalarCoeff,
    pub spin_orbit: ScalarCoeff,
    pub divergence_a: ScalarCoeff,
    pub potential_energy: ScalarCoeff,
    /// Part of the anticommutator term outside the named structures.
    pub residual: OpExpr,
    /// Part of the commutator term beyond the `A.E` structure.
    pub neglected: OpExpr,
}

fn static_rules() -> RuleSet {
    RuleSet::new([Rule::StaticFields, Rule::EmFields])
}

/// Exact first-order change of the FW Hamiltonian and its decomposition.
pub fn v1_alteration_terms() -> Result<Alteration> {
    let h = Hamiltonian::dirac();
    let v1 = crate::dirac::v1_to_pauli_form(&v1_commutator_form())?.three_plus_one;
    let (even, odd) = split_even_odd(&-(&beta() * &v1))?;
    let o = &h.odd;
    let anticommutator_part = (&beta() * &o.anticommutator(&odd)).scale(&mono(1, 2, &[(Symbol::M, -1)]));
    let commutator_part = (&(&odd.commutator(&o.commutator(&h.even)) + &o.commutator(&odd.commutator(&h.even)))
        + &o.commutator(&o.commutator(&even)))
        .scale(&mono(-1, 8, &[(Symbol::M, -2)]));

    let rs = static_rules();
    let prep = |s: OpExpr| rs.apply(&expand_energy(&s));
    let mut rest = rs.apply(&anticommutator_part)?;
    let mut take = |s: OpExpr, pick: &dyn Fn(&Word) -> bool| -> Result<ScalarCoeff> {
        let s = prep(s)?;
        let p = project_out(&rest, &s, &signature(&s, pick))?;
        rest = p.remainder;
        Ok(p.coefficient)
    };
    let b3 = Field::magnetic(3);
    let spin_energy = take(structures::spin_energy(), &|w| w.fields == [b3] && w.derivs[0] == 1)?;
    let divergence_a =
        take(structures::divergence_a(), &|w| w.fields == [Field::potential(1).differentiated(1)] && w.derivs[0] == 1)?;
    let curl_e = take(structures::curl_e(), &|w| w.fields == [Field::electric(2).differentiated(1)])?;
    let divergence = take(structures::divergence(), &|w| w.fields == [Field::electric(1).differentiated(1)])?;
    let spin_orbit = take(structures::spin_orbit(), &|w| w.fields == [Field::potential(1), Field::electric(2)])?;
    let residual = rest;

    let s5 = prep(structures::potential_energy())?;
    let sig5 = signature(&s5, |w: &Word| w.fields == [Field::potential(1), Field::electric(1)] && w.derivs[0] == 1);
    let p5 = project_out(&rs.apply(&commutator_part)?, &s5, &sig5)?;
    Ok(Alteration {
        even,
        odd,
        anticommutator_part,
        commutator_part,
        curl_e,
        divergence,
        spin_energy,
        spin_orbit,
        divergence_a,
        potential_energy: p5.coefficient,
        residual,
        neglected: p5.remainder,
    })
}

/// `dH^FW` under the given assumptions.
pub fn v1_residual(assumptions: &AssumptionSet) -> Result<V1Residual> {
    assumptions.require_all_but_optional()?;
    let stage = "v1_residual";
    let mut audit = Audit::new();
    audit.push(stage, AuditKind::Resolution, "gauge term (i kappa e/2m) d.A of V1 removed by the Lorenz condition", 1);
    let alt = v1_alteration_terms()?;
    if alt.residual.is_zero() {
        audit.push(stage, AuditKind::Check, "anticommutator term decomposes exactly into named structures", 0);
    } else {
        audit.push(
            stage,
            AuditKind::Residual,
            format!("anticommutator remainder:\n{}", alt.residual),
            alt.residual.len(),
        );
    }
    audit.push(stage, AuditKind::Dropped, "commutator terms beyond i A.E (beta/m) Omega", alt.neglected.len());
    audit.push(
        stage,
        AuditKind::Resolution,
        "(beta/m) Omega placed rightmost, so grad in A x grad acts on phi inside Omega",
        1,
    );
    audit.push(stage, AuditKind::Dropped, "i (div A) Omega / m, zero for static fields in Lorenz gauge", 1);

    let assembled = [
        (structures::curl_e(), &alt.curl_e),
        (structures::spin_energy(), &alt.spin_energy),
        (structures::spin_orbit(), &alt.spin_orbit),
        (structures::potential_energy(), &alt.potential_energy),
    ]
    .iter()
    .fold(alt.even.clone(), |acc, (s, c)| &acc + &s.scale(c));
    let with_divergence = &assembled + &structures::divergence().scale(&alt.divergence);

    let mut rules = assumptions.field_rules();
    let (fielded, counts) = rules.apply_counted(&with_divergence)?;
    for (r, n) in &counts {
        audit.push(stage, AuditKind::Assumed, r.name(), *n);
    }
    let div = rules.apply(&structures::divergence())?;
    let sig = signature(&div, |w: &Word| w.fields == [Field::electric(1).differentiated(1)]);
    let p = project_out(&fielded, &div, &sig)?;
    audit.push(stage, AuditKind::Assumed, "commuting_phi", p.removed_terms);
    rules = rules.with(Rule::NonRelativistic);
    let (result, counts) = rules.apply_counted(&p.remainder)?;
    audit.push(stage, AuditKind::Assumed, "nonrelativistic", counts.get(&Rule::NonRelativistic).copied().unwrap_or(0));
    Ok(V1Residual { result, audit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_of_the_dirac_hamiltonian() {
        let h = Hamiltonian::dirac();
        assert_eq!(h.reassembled(), h.expr);
        assert_eq!(h.even, phi().scale(&e()));
        assert_eq!(h.odd, dot(&alpha_vec(), &kinetic_momentum()));
        let (even, odd) = split_even_odd(&spin_magnetic()).unwrap();
        assert_eq!(even, spin_magnetic());
        assert!(odd.is_zero());
    }

    #[test]
    fn free_particle_transform() {
        let h = Hamiltonian::new(&dot(&alpha_vec(), &momentum()) + &beta_m()).unwrap();
        let p = momentum();
        let expected = &beta_m() + &(&beta() * &dot(&p, &p)).scale(&mono(1, 2, &[(Symbol::M, -1)]));
        assert_eq!(fw_transform(&h, 2).unwrap(), expected);
        assert!(fw_transform(&h, 3).is_err());
    }

    #[test]
    fn pauli_hamiltonian_and_g_equal_two() {
        let reduced = pauli_reduce(&fw_transform(&Hamiltonian::dirac(), 2).unwrap()).unwrap();
        assert_eq!(reduced, pauli_reduce(&pauli_hamiltonian()).unwrap());
        assert_eq!(spin_magnetic_coefficient(&reduced).unwrap(), mono(-1, 2, &[(Symbol::E, 1), (Symbol::M, -1)]));
    }

    #[test]
    fn orthogonal_alpha_vectors_leave_only_spin() {
        // (alpha.a)(alpha.b) with a = x, b = y is i sigma_z
        let a = alpha(1);
        let b = alpha(2);
        assert_eq!(&a * &b, &i_unit() * &sigma(3));
    }

    #[test]
    fn transform_is_even() {
        let alt = v1_alteration_terms().unwrap();
        let full = &(&Hamiltonian::dirac().expr + &alt.even) + &alt.odd;
        let out = fw_transform(&Hamiltonian::new(full).unwrap(), 2).unwrap();
        assert!(out.split_parity().1.is_zero());
        assert!(fw_transform(&Hamiltonian::dirac(), 2).unwrap().split_parity().1.is_zero());
    }

    #[test]
    fn alteration_coefficients() {
        let alt = v1_alteration_terms().unwrap();
        let k = |n, d, e, m| mono(n, d, &[(Symbol::KAPPA, 1), (Symbol::E, e), (Symbol::M, m)]);
        assert!(alt.residual.is_zero());
        assert_eq!(alt.curl_e, k(1, 4, 1, -2));
        assert_eq!(alt.divergence, k(1, 4, 1, -2));
        // cancels the even alteration once Omega -> beta m
        assert_eq!(alt.spin_energy, k(-1, 2, 1, -1));
        assert_eq!(alt.spin_orbit, k(-1, 2, 2, -2));
        assert_eq!(alt.potential_energy, k(-1, 4, 2, -2));
    }

    #[test]
    fn residual_matches_closed_form() {
        let r = v1_residual(&AssumptionSet::default()).unwrap();
        assert_eq!(r.result, v1_residual_target());
        assert!(r.audit.of_kind(AuditKind::Dropped).count() >= 2);
        assert_eq!(r.audit.of_kind(AuditKind::Residual).count(), 0);
    }

    #[test]
    fn curl_term_survives_without_assumption() {
        let a = AssumptionSet { curl_free_e: false, ..AssumptionSet::default() };
        let r = v1_residual(&a).unwrap();
        let extra = structures::curl_e().scale(&mono(1, 4, &[(Symbol::KAPPA, 1), (Symbol::E, 1), (Symbol::M, -2)]));
        assert_eq!(&r.result - &v1_residual_target(), extra);
    }

    #[test]
    fn missing_assumption_is_named() {
        let a = AssumptionSet { nonrelativistic: false, ..AssumptionSet::default() };
        assert_eq!(v1_residual(&a).unwrap_err(), Error::MissingAssumption("nonrelativistic"));
        let a = AssumptionSet { static_fields: false, ..AssumptionSet::default() };
        assert_eq!(v1_residual(&a).unwrap_err(), Error::MissingAssumption("static_fields"));
    }

    #[test]
    fn zero_electric_field_kills_residual() {
        let r = v1_residual(&AssumptionSet::default()).unwrap().result;
        assert!(r.filter(|w, _| !w.fields.iter().any(|f| f.kind == crate::ops::FieldKind::Electric)).is_zero());
    }

    #[test]
    fn commuting_phi_removes_only_the_divergence() {
        let alt = v1_alteration_terms().unwrap();
        let rs = static_rules().with(Rule::CurlFreeE);
        let line = rs.apply(&alt.anticommutator_part).unwrap();
        let div = rs.apply(&structures::divergence()).unwrap();
        let sig = signature(&div, |w: &Word| w.fields == [Field::electric(1).differentiated(1)]);
        let p = project_out(&line, &div, &sig).unwrap();
        assert_eq!(p.removed_terms, div.len());
        assert_eq!(&p.remainder + &div.scale(&p.coefficient), line);
    }
}
