//! Anomalous magnetic moment through second order in the fine structure
//! constant.
//!
//! Every correction is expressed as a multiple `c` of `(e/2m) beta sigma.B`
//! for the particle's own mass. The uncorrected magnetic term of the
//! Foldy–Wouthuysen Hamiltonian is `b (e/2m) beta sigma.B` with `g/2 = 1`,
//! so a correction contributes `c / b` to `(g - 2)/2`. The baseline `b` is
//! computed, never assumed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::audit::{Audit, AuditKind};
use crate::error::{Error, Result};
use crate::fw::{
    a_dot_e, fw_transform, pauli_reduce, sigma_a_cross_e, spin_magnetic_coefficient, v1_residual, AssumptionSet,
    Hamiltonian,
};
use crate::ops::build::*;
use crate::ops::rules::{project_out, Rule, RuleSet};
use crate::ops::{Field, FieldKind, OpExpr, Word};
use crate::scalar::{imono, mono, Bindings, GaussianRational, Monomial, ScalarCoeff, Symbol};
use crate::vector::{self, Averaging};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Particle {
    Electron,
    Muon,
}

impl Particle {
    pub fn name(self) -> &'static str {
        match self {
            Particle::Electron => "electron",
            Particle::Muon => "muon",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParticleConfig {
    pub particle: Particle,
    pub mass: Symbol,
    /// Mass in units of the electron mass.
    pub mass_ratio: BigRational,
}

impl ParticleConfig {
    pub fn electron() -> ParticleConfig {
        ParticleConfig { particle: Particle::Electron, mass: Symbol::M, mass_ratio: BigRational::one() }
    }

    /// Muon with `m_mu/m = 206.8`.
    pub fn muon() -> ParticleConfig {
        ParticleConfig::muon_with_ratio(BigRational::new(1034.into(), 5.into())).expect("positive ratio")
    }

    pub fn muon_with_ratio(ratio: BigRational) -> Result<ParticleConfig> {
        if !ratio.is_positive() {
            return Err(Error::Domain(format!("mass ratio must be positive, got {ratio}")));
        }
        Ok(ParticleConfig { particle: Particle::Muon, mass: Symbol::M_MU, mass_ratio: ratio })
    }

    pub fn of(particle: Particle) -> ParticleConfig {
        match particle {
            Particle::Electron => ParticleConfig::electron(),
            Particle::Muon => ParticleConfig::muon(),
        }
    }

    /// Renames the engine's generic mass symbol to this particle's mass.
    fn own_mass(&self, c: &ScalarCoeff) -> Result<ScalarCoeff> {
        if self.mass == Symbol::M {
            return Ok(c.clone());
        }
        c.substitute(&Bindings::from([(Symbol::M, ScalarCoeff::sym(self.mass.clone()))]))
    }
}

/// Classical self-energy of a charge spread over a four-dimensional sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfEnergyModel {
    /// `i e^2 / (8 pi^2 eps0 r0)`.
    pub delta_m: ScalarCoeff,
    /// `pi / m` for the particle mass.
    pub r0: ScalarCoeff,
}

impl SelfEnergyModel {
    pub fn for_mass(mass: &Symbol) -> SelfEnergyModel {
        SelfEnergyModel {
            delta_m: crate::selfenergy::closed_form_delta_m(),
            r0: mono(1, 1, &[(Symbol::PI, 1), (mass.clone(), -1)]),
        }
    }

    /// `kappa -> -i ds m`, `ds -> 2 pi/m`, `dm`, `r0`, `eps0 -> e^2/(4 pi alpha)`.
    pub fn bindings(&self, mass: &Symbol) -> Bindings {
        Bindings::from([
            (Symbol::KAPPA, imono(-1, 1, &[(Symbol::DS, 1), (mass.clone(), 1)])),
            (Symbol::DS, mono(2, 1, &[(Symbol::PI, 1), (mass.clone(), -1)])),
            (Symbol::DM, self.delta_m.clone()),
            (Symbol::R0, self.r0.clone()),
            (Symbol::EPS0, mono(1, 4, &[(Symbol::E, 2), (Symbol::PI, -1), (Symbol::ALPHA, -1)])),
        ])
    }
}

/// `alpha / pi`.
pub fn alpha_over_pi() -> ScalarCoeff {
    mono(1, 1, &[(Symbol::ALPHA, 1), (Symbol::PI, -1)])
}

/// Rational multiple of `(alpha/pi)^k` if `c` is exactly that.
pub fn alpha_power_coefficient(c: &ScalarCoeff, k: i32) -> Option<BigRational> {
    if c.is_zero() {
        return Some(BigRational::zero());
    }
    let unit = Monomial::symbol(Symbol::ALPHA, k).mul(&Monomial::symbol(Symbol::PI, -k));
    match c.as_single() {
        Some((m, g)) if *m == unit && g.is_real() => Some(g.re.clone()),
        _ => None,
    }
}

/// Splits an anomaly into `(k, rational)` pairs by power of `alpha/pi`.
pub fn alpha_series(c: &ScalarCoeff) -> Option<Vec<(i32, BigRational)>> {
    let mut out = Vec::new();
    for (m, g) in c.parts() {
        let k = m.power_of(&Symbol::ALPHA);
        let unit = Monomial::symbol(Symbol::ALPHA, k).mul(&Monomial::symbol(Symbol::PI, -k));
        if *m != unit || !g.is_real() {
            return None;
        }
        out.push((k, g.re.clone()));
    }
    out.sort_by_key(|(k, _)| *k);
    Some(out)
}

/// One correction to the magnetic term.
#[derive(Clone, Debug, PartialEq)]
pub struct Contribution {
    pub label: String,
    /// Power of `alpha/pi`.
    pub order: i32,
    /// Multiple of `(e/2m) beta sigma.B` with all bindings applied.
    pub hamiltonian: ScalarCoeff,
    /// Contribution to `(g - 2)/2`.
    pub anomaly: ScalarCoeff,
}

impl Contribution {
    /// Rational multiple of `(alpha/pi)^order`.
    pub fn rational(&self) -> Option<BigRational> {
        alpha_power_coefficient(&self.anomaly, self.order)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub order: i32,
    pub this_work: Option<f64>,
    pub reference: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub particle: ParticleConfig,
    /// Multiple of `(e/2m) beta sigma.B` in the uncorrected Hamiltonian.
    pub baseline: ScalarCoeff,
    pub contributions: Vec<Contribution>,
    pub total: ScalarCoeff,
    pub comparisons: Vec<Comparison>,
    pub audit: Audit,
}

impl MomentReport {
    /// Rational multiple of `(alpha/pi)^k` in the total.
    pub fn coefficient(&self, k: i32) -> BigRational {
        alpha_series(&self.total)
            .and_then(|s| s.into_iter().find(|(p, _)| *p == k).map(|(_, r)| r))
            .unwrap_or_else(BigRational::zero)
    }
}

/// `e / 2m`.
pub fn magneton() -> ScalarCoeff {
    mono(1, 2, &[(Symbol::E, 1), (Symbol::M, -1)])
}

/// Multiple of `(e/2m) beta sigma.B` in `e`.
pub fn magnetic_units(e: &OpExpr) -> Result<ScalarCoeff> {
    spin_magnetic_coefficient(e)?.checked_div(&magneton())
}

/// The uncorrected magnetic term of the reduced Dirac Hamiltonian.
pub fn baseline_coefficient() -> Result<ScalarCoeff> {
    let reduced = pauli_reduce(&fw_transform(&Hamiltonian::dirac(), 2)?)?;
    magnetic_units(&reduced)
}

/// `c phi -> c dm / e`, using `dm = beta e phi` and `beta^2 = 1`, which
/// turns `phi sigma.B` into `(dm/e) beta sigma.B`.
fn phi_to_self_energy(c: &ScalarCoeff) -> Result<ScalarCoeff> {
    if c.parts().any(|(m, _)| m.power_of(&Symbol::PHI) != 1) {
        return Err(Error::UnexpectedForm(format!("expected exactly one power of phi in {c}")));
    }
    Ok(&c.substitute(&Bindings::from([(Symbol::PHI, ScalarCoeff::one())]))?
        * &mono(1, 1, &[(Symbol::DM, 1), (Symbol::E, -1)]))
}

/// Spherically reduces `k sigma.(A x E)` in the self-field and returns the
/// multiple of `(e/2m) beta sigma.B`.
pub fn spin_orbit_to_magnetic(k: &ScalarCoeff, averaging: Averaging) -> Result<ScalarCoeff> {
    let (so, _) = vector::self_field_structures();
    let reduced = vector::spherical_reduction(&so, averaging);
    let rest = reduced.without_dot(vector::SIGMA, vector::MAGNETIC);
    if !rest.is_zero() {
        return Err(Error::UnexpectedForm(format!("sigma.(A x E) does not average to sigma.B: {rest}")));
    }
    let sb = reduced.dot_coefficient(vector::SIGMA, vector::MAGNETIC);
    phi_to_self_energy(&(k * &sb))?.checked_div(&magneton())
}

/// Binds the self-energy chain for the particle.
pub fn bind(c: &ScalarCoeff, p: &ParticleConfig) -> Result<ScalarCoeff> {
    let model = SelfEnergyModel::for_mass(&p.mass);
    p.own_mass(c)?.substitute(&model.bindings(&p.mass))
}

fn contribution(label: &str, order: i32, units: &ScalarCoeff, baseline: &ScalarCoeff) -> Result<Contribution> {
    Ok(Contribution {
        label: label.to_string(),
        order,
        hamiltonian: units.clone(),
        anomaly: units.checked_div(baseline)?,
    })
}

fn require_free_of(c: &ScalarCoeff, syms: &[Symbol], what: &str) -> Result<()> {
    for s in syms {
        if c.contains_symbol(s) {
            return Err(Error::UnexpectedForm(format!("{what} still depends on {s}: {c}")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrder {
    /// Multiple of `(e/2m) beta sigma.B` before binding, `-(1/2) kappa dm / m`.
    pub unbound: ScalarCoeff,
    pub contribution: Contribution,
    pub audit: Audit,
}

pub fn first_order_correction(p: &ParticleConfig) -> Result<FirstOrder> {
    let stage = "first_order";
    let residual = v1_residual(&AssumptionSet::default())?;
    let mut audit = residual.audit;
    let so_sig = signature_with(&sigma_a_cross_e(), &[Field::potential(1), Field::electric(2)]);
    let so = project_out(&residual.result, &sigma_a_cross_e(), &so_sig)?;
    let ae_sig = signature_with(&a_dot_e(), &[Field::potential(1), Field::electric(1)]);
    let ae = project_out(&so.remainder, &a_dot_e(), &ae_sig)?;
    if !ae.remainder.is_zero() {
        return Err(Error::UnexpectedForm(format!("first-order alteration has extra terms:\n{}", ae.remainder)));
    }
    let (_, a_dot_e_self) = vector::self_field_structures();
    if !a_dot_e_self.is_zero() {
        return Err(Error::UnexpectedForm(format!("A.E does not vanish in the self-field: {a_dot_e_self}")));
    }
    audit.push(stage, AuditKind::Check, "A.E vanishes identically for A = B x r/2, E parallel to r", 1);
    audit.push(stage, AuditKind::Assumed, "(B.r) r averages to zero over directions", 1);
    let unbound = spin_orbit_to_magnetic(&so.coefficient, Averaging::BDotRVanishes)?;
    let bound = bind(&unbound, p)?;
    require_free_of(&bound, &[Symbol::M, Symbol::M_MU, Symbol::E], "first-order correction")?;
    let baseline = baseline_coefficient()?;
    let contribution = contribution("self-energy spin-orbit term", 1, &bound, &baseline)?;
    Ok(FirstOrder { unbound, contribution, audit })
}

fn signature_with(structure: &OpExpr, fields: &[Field]) -> Word {
    structure
        .terms()
        .map(|(w, _)| w)
        .find(|w| w.fields == fields)
        .cloned()
        .expect("structure has the requested field pattern")
}

#[derive(Clone, Debug, PartialEq)]
pub struct V2Term {
    pub label: char,
    pub expr: OpExpr,
}

/// The double commutator `[[gamma.d, gamma.A], gamma(i d + e A)]` split into
/// seven named parts.
#[derive(Clone, Debug, PartialEq)]
pub struct V2Expansion {
    pub full: OpExpr,
    pub terms: Vec<V2Term>,
    /// `-i gamma^mu (d^nu d_nu A_mu)`, zero for a source-free potential in
    /// Lorenz gauge and not covered by the seven parts.
    pub wave_term: OpExpr,
}

/// `-i gamma^mu box A_mu`.
pub fn wave_term() -> OpExpr {
    let mut out = OpExpr::zero();
    for mu in 0..4 {
        for nu in 0..4 {
            let f = field(Field::potential(mu).differentiated(nu).differentiated(nu));
            out = &out + &(&gamma(mu) * &f).scale(&ScalarCoeff::int(metric_sign(nu)));
        }
    }
    out.scale(&-ScalarCoeff::i())
}

pub fn double_commutator() -> OpExpr {
    let kinetic = &slash_partial().scale(&ScalarCoeff::i()) + &slash_potential().scale(&ScalarCoeff::sym(Symbol::E));
    slash_partial().commutator(&slash_potential()).commutator(&kinetic)
}

fn v2_parts() -> Vec<V2Term> {
    let i = ScalarCoeff::i();
    let e = ScalarCoeff::sym(Symbol::E);
    let k = |n: i64| ScalarCoeff::int(n);
    let d_a = |xi: usize, nu: usize| field(Field::potential(nu).differentiated(xi));
    let dirac_like = &slash_partial().scale(&i) - &slash_potential().scale(&e);
    let mut parts: Vec<OpExpr> = vec![OpExpr::zero(); 7];
    for xi in 0..4 {
        for nu in 0..4 {
            parts[0] = &parts[0] + &(&(&gamma(xi) * &gamma(nu)) * &d_a(xi, nu));
        }
    }
    parts[0] = (&parts[0] * &dirac_like).scale(&k(2));
    for nu in 0..4 {
        for mu in 0..4 {
            let inner = &partial(mu).scale(&i) - &potential(mu).scale(&e);
            parts[1] = &parts[1] + &(&(&(&potential(nu) * &gamma(mu)) * &inner) * &partial_up(nu));
            parts[4] = &parts[4] + &(&(&gamma(mu) * &d_a(nu, mu)) * &partial_up(nu));
            parts[5] = &parts[5] + &(&(&gamma(nu) * &d_a(mu, nu)) * &potential_up(mu));
            parts[6] = &parts[6] + &(&(&gamma(mu) * &d_a(mu, nu)) * &potential_up(nu));
        }
    }
    parts[1] = parts[1].scale(&k(4));
    parts[2] = (&(&slash_potential() * &slash_partial()) * &slash_partial()).scale(&(&k(-4) * &i));
    parts[3] = (&(&slash_potential() * &slash_potential()) * &slash_partial()).scale(&(&k(4) * &e));
    parts[4] = parts[4].scale(&(&k(-2) * &i));
    parts[5] = parts[5].scale(&(&k(-4) * &e));
    parts[6] = parts[6].scale(&(&k(6) * &e));
    parts.into_iter().zip('a'..='g').map(|(expr, label)| V2Term { label, expr }).collect()
}

pub fn expand_v2_terms() -> Result<V2Expansion> {
    let full = double_commutator();
    let terms = v2_parts();
    let covered = terms.iter().fold(OpExpr::zero(), |acc, t| &acc + &t.expr);
    let leftover = &full - &covered;
    let wave = wave_term();
    if leftover != wave {
        let rest = &leftover - &wave;
        return Err(Error::PartitionLeftover { count: rest.len(), terms: rest.to_string() });
    }
    Ok(V2Expansion { full, terms, wave_term: leftover })
}

/// `i kappa^2 e / (12 m^2)`, the prefactor of the double commutator once
/// `ds = i kappa/m`.
pub fn v2_prefactor() -> ScalarCoeff {
    imono(1, 12, &[(Symbol::KAPPA, 2), (Symbol::E, 1), (Symbol::M, -2)])
}

/// Change of the Hamiltonian caused by a wave-equation correction `v`.
fn alteration(v: &OpExpr) -> OpExpr {
    -(&beta() * &v.scale(&v2_prefactor()))
}

/// `beta e phi` as an operator.
fn self_energy_operator() -> OpExpr {
    (&beta() * &phi()).scale(&ScalarCoeff::sym(Symbol::E))
}

fn dirac_with_odd(odd: &OpExpr) -> Result<Hamiltonian> {
    let h = &(&(odd + &phi().scale(&ScalarCoeff::sym(Symbol::E))) + &(&beta() * &sym(Symbol::M)));
    Hamiltonian::new(h.clone())
}

/// Magnetic term of the reduced Hamiltonian with
/// `o = alpha.(p_scale p - a_scale e A)`.
fn scaled_magnetic_units(p_scale: &ScalarCoeff, a_scale: &ScalarCoeff) -> Result<ScalarCoeff> {
    let e = ScalarCoeff::sym(Symbol::E);
    let pi: V3 = std::array::from_fn(|k| &momentum()[k].scale(p_scale) - &vector_potential()[k].scale(&(a_scale * &e)));
    let h = dirac_with_odd(&dot(&alpha_vec(), &pi))?;
    magnetic_units(&pauli_reduce(&fw_transform(&h, 2)?)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrder {
    /// Spin term of part (a), multiple of `(e/2m) beta sigma.B`.
    pub spin_term: ScalarCoeff,
    /// Shift of the magnetic term from rescaling `A`.
    pub rescaling_shift: ScalarCoeff,
    /// `spin_term + rescaling_shift`, exactly zero.
    pub cancellation: ScalarCoeff,
    /// Odd alteration from part (g) and the `alpha.E dm` piece of (a).
    pub odd_alteration: OpExpr,
    /// Multiple of `(e/2m) beta sigma.B` before binding.
    pub unbound: ScalarCoeff,
    pub contribution: Contribution,
    pub audit: Audit,
}

pub fn second_order_correction(p: &ParticleConfig) -> Result<SecondOrder> {
    let stage = "second_order";
    let mut audit = Audit::new();
    let i = ScalarCoeff::i();
    let e = ScalarCoeff::sym(Symbol::E);
    let k = |n: i64| ScalarCoeff::int(n);
    let dm = ScalarCoeff::sym(Symbol::DM);
    let m = ScalarCoeff::sym(Symbol::M);

    let expansion = expand_v2_terms()?;
    audit.push(
        stage,
        AuditKind::Assumed,
        "source-free potential: -i gamma^mu (box A_mu) = 0",
        expansion.wave_term.len(),
    );
    let part = |c: char| &expansion.terms[(c as u8 - b'a') as usize].expr;

    // (a): 2 gamma^xi gamma^nu (d_xi A_nu) = 2i sigma.B + 2 alpha.E
    let d_a = |xi: usize, nu: usize| field(Field::potential(nu).differentiated(xi));
    let mut prefactor = OpExpr::zero();
    for xi in 0..4 {
        for nu in 0..4 {
            prefactor = &prefactor + &(&(&gamma(xi) * &gamma(nu)) * &d_a(xi, nu)).scale(&k(2));
        }
    }
    let spin_b = dot(&sigma_vec(), &magnetic());
    let alpha_e = dot(&alpha_vec(), &electric());
    let expected = &spin_b.scale(&(&k(2) * &i)) + &alpha_e.scale(&k(2));
    if RuleSet::new([Rule::LorenzGauge, Rule::EmFields]).apply(&prefactor)? != expected {
        return Err(Error::UnexpectedForm("field-strength prefactor of part (a)".into()));
    }
    audit.push(stage, AuditKind::Check, "2 gamma gamma (dA) = 2i sigma.B + 2 alpha.E", 1);
    audit.push(stage, AuditKind::Assumed, "Dirac equation: (i gamma.d - e gamma.A) acts as m", 1);
    audit.push(stage, AuditKind::Dropped, "-2i beta alpha.E d_0: no spin matrix after the transform", 1);
    let spin_term = magnetic_units(&alteration(&spin_b.scale(&(&(&k(2) * &i) * &m))))?;

    // (b) + (c) + (d), collected with i gamma^0 d_0 ~ m + dm and e gamma^0 A_0 = dm
    audit.push(stage, AuditKind::Assumed, "parts (b), (c), (d) collected to leading order in dm", 3);
    audit.push(stage, AuditKind::Resolution, "A_k in the collected (b), (c), (d) terms is the Cartesian component", 1);
    let a_cart = vector_potential();
    let mut collected = OpExpr::zero();
    for kk in 0..3 {
        let g = gamma(kk + 1);
        let first = (&g * &a_cart[kk]).scale(&(&(-&e) * &m.pow(2)));
        let kinetic = &partial(kk + 1).scale(&i) - &a_cart[kk].scale(&e);
        let second = (&g * &kinetic).scale(&(&m * &dm));
        collected = &(&collected + &first) + &second;
    }
    let collected = collected.scale(&(&(&k(4) * &i) * &e.inv()?));
    let bcd = alteration(&collected);
    let a_term = dot(&alpha_vec(), &a_cart).scale(&-&e);
    let pa_term = dot(&alpha_vec(), &add_vec(&scale_vec(&momentum(), &k(-1)), &scale_vec(&a_cart, &-&e)));
    let lambda = mono(1, 3, &[(Symbol::KAPPA, 2)]);
    let mu = mono(1, 3, &[(Symbol::KAPPA, 2), (Symbol::DM, 1), (Symbol::M, -1)]);
    if bcd != &a_term.scale(&lambda) + &pa_term.scale(&mu) {
        return Err(Error::UnexpectedForm(format!("collected (b), (c), (d) alteration:\n{bcd}")));
    }
    audit.push(stage, AuditKind::Check, "collected (b), (c), (d) alter the odd part by (1/3) kappa^2 (-e alpha.A) + (1/3) kappa^2 (dm/m) alpha.(-p - eA)", 1);

    // Rescaled A must cancel the spin term of (a) exactly.
    let baseline = baseline_coefficient()?;
    let rescaling_shift = &scaled_magnetic_units(&ScalarCoeff::one(), &(&ScalarCoeff::one() + &lambda))? - &baseline;
    let cancellation = &spin_term + &rescaling_shift;
    if !cancellation.is_zero() {
        return Err(Error::CancellationFailed { left: spin_term.to_string(), right: rescaling_shift.to_string() });
    }
    audit.push(stage, AuditKind::Check, format!("spin term {spin_term} cancels rescaling shift {rescaling_shift}"), 0);

    // p and A variations of the second collected term cancel at linear order.
    let var = ScalarCoeff::sym(Symbol::extra("mu")?);
    let varied = scaled_magnetic_units(&(&ScalarCoeff::one() - &var), &(&ScalarCoeff::one() + &var))?;
    let linear = varied.filter_parts(|m| m.power_of(&Symbol::extra("mu").expect("valid name")) == 1);
    if !linear.is_zero() {
        return Err(Error::CancellationFailed { left: "p variation".into(), right: linear.to_string() });
    }
    audit.push(stage, AuditKind::Check, "p and A variations cancel in the magnetic term at first order", 0);
    audit.push(stage, AuditKind::Dropped, "second-order remainder of the p and A variations", 1);

    audit.push(stage, AuditKind::Dropped, "part (e) under static weak fields", part('e').len());
    audit.push(stage, AuditKind::Dropped, "part (f) under static weak fields", part('f').len());

    // (g) keeps gamma^k (d_k A_0) A^0, which is 6 alpha.E (beta e phi).
    let g_static = RuleSet::new([Rule::StaticFields, Rule::EmFields]).apply(part('g'))?;
    let is_phi_e = |w: &Word| {
        w.fields.len() == 2
            && w.fields.contains(&Field::potential(0))
            && w.fields.iter().any(|f| f.kind == FieldKind::Electric && f.d == Field::electric(1).d)
    };
    let g_kept = g_static.filter(|w, _| is_phi_e(w));
    if g_kept != (&alpha_e * &self_energy_operator()).scale(&k(6)) {
        return Err(Error::UnexpectedForm(format!("part (g) scalar-potential piece:\n{g_kept}")));
    }
    audit.push(stage, AuditKind::Check, "part (g) scalar-potential piece is 6 alpha.E (beta e phi)", 1);
    audit.push(stage, AuditKind::Dropped, "part (g) vector-potential pieces", g_static.len() - g_kept.len());

    // 2 alpha.E (-e gamma^0 A_0) from (a) plus (g), with dm as a number.
    let a3 = (&alpha_e * &(&gamma(0) * &phi())).scale(&(&k(-2) * &e));
    if a3 != (&alpha_e * &self_energy_operator()).scale(&k(-2)) {
        return Err(Error::UnexpectedForm("scalar-potential piece of part (a)".into()));
    }
    let odd_alteration = alteration(&alpha_e.scale(&(&k(4) * &dm)));
    let odd_expected = (&beta() * &alpha_e).scale(&imono(
        -1,
        3,
        &[(Symbol::KAPPA, 2), (Symbol::DM, 1), (Symbol::E, 1), (Symbol::M, -2)],
    ));
    if odd_alteration != odd_expected {
        return Err(Error::UnexpectedForm(format!("combined odd alteration:\n{odd_alteration}")));
    }

    // (1/2m) beta {o, do} with the vector-potential part of o.
    let shift = (&beta() * &a_term.anticommutator(&odd_alteration)).scale(&mono(1, 2, &[(Symbol::M, -1)]));
    let so_sig = signature_with(&sigma_a_cross_e(), &[Field::potential(1), Field::electric(2)]);
    let so = project_out(&shift, &sigma_a_cross_e(), &so_sig)?;
    if !so.remainder.is_zero() {
        return Err(Error::UnexpectedForm(format!("anticommutator leaves extra terms:\n{}", so.remainder)));
    }
    audit.push(stage, AuditKind::Dropped, "(1/2m) beta {alpha.p, do}: no sigma.(A x E) term", 1);
    audit.push(stage, AuditKind::Assumed, "(B.r) r averages to zero over directions", 1);
    let unbound = spin_orbit_to_magnetic(&so.coefficient, Averaging::BDotRVanishes)?;
    let bound = bind(&unbound, p)?;
    require_free_of(&bound, &[Symbol::M, Symbol::M_MU, Symbol::E], "second-order correction")?;
    let contribution = contribution("alpha.E self-energy terms of parts (a) and (g)", 2, &bound, &baseline)?;
    audit.push(
        stage,
        AuditKind::Resolution,
        format!("sign of the anomaly taken relative to the baseline magnetic term {baseline}"),
        1,
    );
    Ok(SecondOrder { spin_term, rescaling_shift, cancellation, odd_alteration, unbound, contribution, audit })
}

/// `-(1/12) (alpha/4pi)^2` per pair loop, in units of `e/2m` of the loop
/// particle.
pub fn pair_loop() -> ScalarCoeff {
    mono(-1, 192, &[(Symbol::ALPHA, 2), (Symbol::PI, -2)])
}

pub fn vacuum_polarization_adjust(p: &ParticleConfig) -> Result<Vec<Contribution>> {
    let baseline = baseline_coefficient()?;
    let mut out = Vec::new();
    match p.particle {
        Particle::Electron => {
            out.push(contribution("vacuum polarization, electron pairs", 2, &pair_loop(), &baseline)?);
        }
        Particle::Muon => {
            out.push(contribution("vacuum polarization, muon pairs", 2, &pair_loop(), &baseline)?);
            // e/2m = (m_mu/m) e/2m_mu
            let ratio = ScalarCoeff::constant(GaussianRational::real(p.mass_ratio.clone()));
            out.push(contribution("vacuum polarization, electron pairs", 2, &(&pair_loop() * &ratio), &baseline)?);
        }
    }
    Ok(out)
}

/// QED second-order coefficient of the electron anomaly.
pub const QED_ELECTRON_ALPHA2: f64 = -0.3285;
/// Remaining difference from experiment, in units of `(alpha/pi)^3`.
pub const EXPERIMENT_GAP_ALPHA3: f64 = 1.5;
/// Rounded muon `alpha^2` coefficient with both pair loops.
pub const MUON_ALPHA2_ESTIMATE: f64 = 0.75;

fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn moment_report(p: &ParticleConfig, order: i32, vacuum_polarization: bool) -> Result<MomentReport> {
    if !(1..=2).contains(&order) {
        return Err(Error::OrderOutOfRange { order, min: 1, max: 2 });
    }
    let baseline = baseline_coefficient()?;
    let mut audit = Audit::new();
    audit.push("moment", AuditKind::Resolution, format!("baseline magnetic term {baseline} (e/2m) beta sigma.B"), 1);
    let first = first_order_correction(p)?;
    audit.extend(first.audit);
    let mut contributions = vec![first.contribution];
    if order >= 2 {
        let second = second_order_correction(p)?;
        audit.extend(second.audit);
        contributions.push(second.contribution);
        if vacuum_polarization {
            audit.push("moment", AuditKind::Assumed, "pair-creation loops taken as -(1/12)(alpha/4pi)^2 each", 1);
            contributions.extend(vacuum_polarization_adjust(p)?);
        }
    }
    let total = contributions.iter().fold(ScalarCoeff::zero(), |acc, c| &acc + &c.anomaly);
    let mut report = MomentReport { particle: p.clone(), baseline, contributions, total, comparisons: vec![], audit };
    if p.particle == Particle::Electron && order >= 2 {
        report.comparisons.push(Comparison {
            label: "QED alpha^2".into(),
            order: 2,
            this_work: Some(to_f64(&report.coefficient(2))),
            reference: QED_ELECTRON_ALPHA2,
        });
        report.comparisons.push(Comparison {
            label: "experiment gap alpha^3".into(),
            order: 3,
            this_work: None,
            reference: EXPERIMENT_GAP_ALPHA3,
        });
    }
    if p.particle == Particle::Muon && order >= 2 && vacuum_polarization {
        report.comparisons.push(Comparison {
            label: "muon alpha^2 estimate".into(),
            order: 2,
            this_work: Some(to_f64(&report.coefficient(2))),
            reference: MUON_ALPHA2_ESTIMATE,
        });
    }
    Ok(report)
}

/// `n / d` as a rational.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::{kappa_binding, v2_commutator_form};

    fn kappa_dm_over_m() -> ScalarCoeff {
        mono(1, 1, &[(Symbol::KAPPA, 1), (Symbol::DM, 1), (Symbol::M, -1)])
    }

    #[test]
    fn self_energy_chain_gives_alpha_over_pi() {
        for p in [ParticleConfig::electron(), ParticleConfig::muon()] {
            assert_eq!(bind(&kappa_dm_over_m(), &p).unwrap(), alpha_over_pi());
        }
    }

    #[test]
    fn baseline_is_minus_one() {
        assert_eq!(baseline_coefficient().unwrap(), ScalarCoeff::int(-1));
    }

    #[test]
    fn first_order_is_half_alpha_over_pi() {
        let f = first_order_correction(&ParticleConfig::electron()).unwrap();
        assert_eq!(f.unbound, &kappa_dm_over_m() * &ScalarCoeff::frac(-1, 2));
        assert_eq!(f.contribution.hamiltonian, &alpha_over_pi() * &ScalarCoeff::frac(-1, 2));
        assert_eq!(f.contribution.rational(), Some(rational(1, 2)));
    }

    #[test]
    fn first_order_is_mass_independent() {
        let e = first_order_correction(&ParticleConfig::electron()).unwrap().contribution;
        let mu = first_order_correction(&ParticleConfig::muon()).unwrap().contribution;
        assert_eq!(e.anomaly, mu.anomaly);
    }

    #[test]
    fn no_self_energy_no_correction() {
        let f = first_order_correction(&ParticleConfig::electron()).unwrap();
        let off = f.unbound.substitute(&Bindings::from([(Symbol::DM, ScalarCoeff::zero())])).unwrap();
        assert!(off.is_zero());
    }

    #[test]
    fn charge_flip_leaves_anomaly_unchanged() {
        let flip = Bindings::from([(Symbol::E, ScalarCoeff::int(-1) * ScalarCoeff::sym(Symbol::E))]);
        let f = first_order_correction(&ParticleConfig::electron()).unwrap();
        let model = SelfEnergyModel::for_mass(&Symbol::M);
        let flipped = f.unbound.substitute(&flip).unwrap().substitute(&model.bindings(&Symbol::M)).unwrap();
        let flipped = flipped.substitute(&flip).unwrap();
        assert_eq!(flipped, f.contribution.hamiltonian);
    }

    #[test]
    fn partition_leaves_only_the_wave_term() {
        let x = expand_v2_terms().unwrap();
        assert_eq!(x.terms.len(), 7);
        let sum = x.terms.iter().fold(x.wave_term.clone(), |acc, t| &acc + &t.expr);
        assert_eq!(sum, x.full);
        assert!(!x.wave_term.is_zero());
    }

    #[test]
    fn printed_part_g() {
        let x = expand_v2_terms().unwrap();
        let mut g = OpExpr::zero();
        for mu in 0..4 {
            for nu in 0..4 {
                g = &g + &(&(&gamma(mu) * &field(Field::potential(nu).differentiated(mu))) * &potential_up(nu));
            }
        }
        assert_eq!(x.terms[6].expr, g.scale(&mono(6, 1, &[(Symbol::E, 1)])));
    }

    #[test]
    fn parts_vanish_without_potential() {
        let zero_a = |e: &OpExpr| e.filter(|w, _| w.fields.is_empty());
        for t in expand_v2_terms().unwrap().terms {
            assert!(zero_a(&t.expr).is_zero(), "part {}", t.label);
        }
    }

    #[test]
    fn prefactor_matches_wave_equation() {
        let v2 = v2_commutator_form().substitute(&kappa_binding()).unwrap();
        assert_eq!(v2, double_commutator().scale(&v2_prefactor()));
    }

    #[test]
    fn second_order_cancellation_and_value() {
        let s = second_order_correction(&ParticleConfig::electron()).unwrap();
        assert_eq!(s.spin_term, mono(1, 3, &[(Symbol::KAPPA, 2)]));
        assert_eq!(s.rescaling_shift, mono(-1, 3, &[(Symbol::KAPPA, 2)]));
        assert!(s.cancellation.is_zero());
        assert_eq!(s.unbound, &kappa_dm_over_m().pow(2) * &ScalarCoeff::frac(1, 3));
        assert_eq!(s.contribution.rational(), Some(rational(-1, 3)));
    }

    #[test]
    fn electron_report() {
        let r = moment_report(&ParticleConfig::electron(), 2, false).unwrap();
        assert_eq!(r.coefficient(1), rational(1, 2));
        assert_eq!(r.coefficient(2), rational(-1, 3));
        let r = moment_report(&ParticleConfig::electron(), 2, true).unwrap();
        assert_eq!(r.coefficient(2), rational(-63, 192));
        assert_eq!(r.comparisons[0].reference, QED_ELECTRON_ALPHA2);
    }

    #[test]
    fn muon_report() {
        let r = moment_report(&ParticleConfig::muon(), 2, true).unwrap();
        let expected = &rational(-1, 3) + &(&rational(1, 192) * &(&rational(1, 1) + &rational(1034, 5)));
        assert_eq!(r.coefficient(2), expected);
        assert!((to_f64(&expected) - 0.748958).abs() < 1e-6);
        let unit = ParticleConfig::muon_with_ratio(rational(1, 1)).unwrap();
        let r = moment_report(&unit, 2, true).unwrap();
        assert_eq!(r.coefficient(2), &rational(-1, 3) + &rational(2, 192));
        assert!(ParticleConfig::muon_with_ratio(rational(0, 1)).is_err());
    }

    #[test]
    fn total_is_sum_of_contributions() {
        let r = moment_report(&ParticleConfig::muon(), 2, true).unwrap();
        let sum = r.contributions.iter().fold(ScalarCoeff::zero(), |a, c| &a + &c.anomaly);
        assert_eq!(sum, r.total);
        assert!(moment_report(&ParticleConfig::electron(), 3, false).is_err());
    }
}
