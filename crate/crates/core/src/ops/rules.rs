//! Toggleable rewrite rules on canonical words.
//!
//! Each rule maps a single term to a sum of terms or leaves it alone.
//! [`RuleSet::apply`] runs the enabled rules to a fixpoint under a step
//! budget. Structure elimination, which needs the whole expression, is
//! handled separately by [`project_out`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{ScalarCoeff, Symbol};

use super::expr::OpExpr;
use super::word::{sign_value, Blade, Field, FieldKind, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Any time derivative of a field vanishes.
    StaticFields,
    /// `d_0 A_0 = sum_k d_k A_k`.
    LorenzGauge,
    /// Rewrites potential derivatives into electric and magnetic components.
    EmFields,
    /// Symmetrizes spatial derivatives of the electric field.
    CurlFreeE,
    /// Drops terms with three or more field atoms.
    WeakField,
    /// Replaces a lone rightmost energy operator by `beta m`.
    NonRelativistic,
}

impl Rule {
    pub const ALL: [Rule; 6] = [
        Rule::StaticFields,
        Rule::LorenzGauge,
        Rule::EmFields,
        Rule::CurlFreeE,
        Rule::WeakField,
        Rule::NonRelativistic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::StaticFields => "static_fields",
            Rule::LorenzGauge => "lorenz_gauge",
            Rule::EmFields => "em_fields",
            Rule::CurlFreeE => "curl_free_e",
            Rule::WeakField => "weak_field",
            Rule::NonRelativistic => "nonrelativistic",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.name() == name)
    }

    fn rewrite(self, w: &Word) -> Result<Option<OpExpr>> {
        match self {
            Rule::StaticFields => Ok(w.fields.iter().any(|f| f.d[0] > 0).then(OpExpr::zero)),
            Rule::WeakField => Ok((w.fields.len() >= 3).then(OpExpr::zero)),
            Rule::LorenzGauge => Ok(replace_first(w, |f| {
                (f.kind == FieldKind::Potential && f.index == 0 && f.d[0] > 0).then(|| {
                    let mut d = f.d;
                    d[0] -= 1;
                    (1..4)
                        .map(|k| {
                            let mut dk = d;
                            dk[k] += 1;
                            (ScalarCoeff::one(), Field::potential(k).with_derivs(dk))
                        })
                        .collect()
                })
            })),
            Rule::EmFields => Ok(replace_first(w, em_fields)),
            Rule::CurlFreeE => Ok(replace_first(w, |f| {
                if f.kind != FieldKind::Electric {
                    return None;
                }
                let j = usize::from(f.index);
                let i = (1..j).find(|&i| f.d[i] > 0)?;
                let mut d = f.d;
                d[i] -= 1;
                d[j] += 1;
                Some(vec![(ScalarCoeff::one(), Field::electric(i).with_derivs(d))])
            })),
            Rule::NonRelativistic => match w.energy {
                0 => Ok(None),
                1 => {
                    let (s, blade) = w.blade.mul(Blade::gamma(0));
                    let word = Word { blade, energy: 0, ..w.clone() };
                    let c = ScalarCoeff::sym(Symbol::M).scale(&sign_value(s));
                    Ok(Some(OpExpr::term(c, word)))
                }
                _ => Err(Error::EnergyNotIsolated(w.to_string())),
            },
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> i64 {
    match (i, j, k) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (3, 2, 1) | (1, 3, 2) | (2, 1, 3) => -1,
        _ => 0,
    }
}

fn em_fields(f: &Field) -> Option<Vec<(ScalarCoeff, Field)>> {
    if f.kind != FieldKind::Potential {
        return None;
    }
    let j = usize::from(f.index);
    if j == 0 {
        // d_k A_0 = -E_k + d_0 A_k
        let k = (1..4).find(|&k| f.d[k] > 0)?;
        let mut d = f.d;
        d[k] -= 1;
        let mut d0 = d;
        d0[0] += 1;
        return Some(vec![
            (ScalarCoeff::int(-1), Field::electric(k).with_derivs(d)),
            (ScalarCoeff::one(), Field::potential(k).with_derivs(d0)),
        ]);
    }
    // d_i A_j = d_j A_i - eps_ijk B_k for i > j
    let i = (j + 1..4).rev().find(|&i| f.d[i] > 0)?;
    let k = 6 - i - j;
    let mut d = f.d;
    d[i] -= 1;
    let mut dj = d;
    dj[j] += 1;
    Some(vec![
        (ScalarCoeff::one(), Field::potential(i).with_derivs(dj)),
        (ScalarCoeff::int(-levi_civita(i, j, k)), Field::magnetic(k).with_derivs(d)),
    ])
}

/// Replaces the first field for which `f` yields a combination.
fn replace_first<F>(w: &Word, f: F) -> Option<OpExpr>
where
    F: Fn(&Field) -> Option<Vec<(ScalarCoeff, Field)>>,
{
    for (pos, field) in w.fields.iter().enumerate() {
        if let Some(repl) = f(field) {
            let mut out = OpExpr::zero();
            for (c, nf) in repl {
                let mut fields = w.fields.clone();
                fields[pos] = nf;
                fields.sort();
                out.add_term(c, Word { fields, ..w.clone() });
            }
            return Some(out);
        }
    }
    None
}

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub enabled: BTreeSet<Rule>,
    pub budget: usize,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet { enabled: BTreeSet::new(), budget: DEFAULT_BUDGET }
    }
}

/// How often each rule fired during one application.
pub type FireCounts = BTreeMap<Rule, usize>;

impl RuleSet {
    pub fn new<I: IntoIterator<Item = Rule>>(rules: I) -> RuleSet {
        RuleSet { enabled: rules.into_iter().collect(), ..RuleSet::default() }
    }

    pub fn with(mut self, r: Rule) -> RuleSet {
        self.enabled.insert(r);
        self
    }

    pub fn without(mut self, r: Rule) -> RuleSet {
        self.enabled.remove(&r);
        self
    }

    pub fn contains(&self, r: Rule) -> bool {
        self.enabled.contains(&r)
    }

    pub fn apply(&self, e: &OpExpr) -> Result<OpExpr> {
        Ok(self.apply_counted(e)?.0)
    }

    pub fn apply_counted(&self, e: &OpExpr) -> Result<(OpExpr, FireCounts)> {
        let order: Vec<Rule> = self.enabled.iter().copied().collect();
        self.apply_in_order(e, &order)
    }

    /// Fixpoint application trying rules in the given order on each term.
    pub fn apply_in_order(&self, e: &OpExpr, order: &[Rule]) -> Result<(OpExpr, FireCounts)> {
        let mut counts = FireCounts::new();
        let mut out = OpExpr::zero();
        let mut work: Vec<(ScalarCoeff, Word)> = e.terms().map(|(w, c)| (c.clone(), w.clone())).collect();
        let mut steps = 0usize;
        while let Some((c, w)) = work.pop() {
            let mut fired = false;
            for &rule in order.iter().filter(|r| self.enabled.contains(r)) {
                if let Some(repl) = rule.rewrite(&w)? {
                    steps += 1;
                    if steps > self.budget {
                        return Err(Error::RewriteBudget { budget: self.budget, term: w.to_string() });
                    }
                    *counts.entry(rule).or_default() += 1;
                    work.extend(repl.terms().map(|(rw, rc)| (&c * rc, rw.clone())));
                    fired = true;
                    break;
                }
            }
            if !fired {
                out.add_term(c, w);
            }
        }
        Ok((out, counts))
    }
}

/// Result of removing a multiple of a known structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub coefficient: ScalarCoeff,
    pub remainder: OpExpr,
    pub removed_terms: usize,
}

/// Reads the multiple of `structure` from the coefficient of `signature` in
/// `e` and subtracts it.
pub fn project_out(e: &OpExpr, structure: &OpExpr, signature: &Word) -> Result<Projection> {
    let unit = structure.coeff(signature);
    if unit.is_zero() {
        return Err(Error::UnexpectedForm(format!("signature `{signature}` absent from structure")));
    }
    let coefficient = e.coeff(signature).checked_div(&unit)?;
    let remainder = e - &structure.scale(&coefficient);
    let removed_terms = e.len().saturating_sub(remainder.len());
    Ok(Projection { coefficient, remainder, removed_terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::build::*;

    fn all_rules() -> RuleSet {
        RuleSet::new([Rule::StaticFields, Rule::EmFields, Rule::CurlFreeE])
    }

    #[test]
    fn static_rule_kills_time_derivatives() {
        let e = field(Field::potential(2).differentiated(0));
        assert!(RuleSet::new([Rule::StaticFields]).apply(&e).unwrap().is_zero());
    }

    #[test]
    fn potential_gradient_becomes_electric_field() {
        let e = field(Field::potential(0).differentiated(2));
        let got = RuleSet::new([Rule::EmFields]).apply(&e).unwrap();
        let expected = &field(Field::potential(2).differentiated(0)) - &field(Field::electric(2));
        assert_eq!(got, expected);
    }

    #[test]
    fn curl_of_potential_is_magnetic_field() {
        // B^3 = d_1 A^2 - d_2 A^1 = -(d_1 A_2) + (d_2 A_1)
        let curl = &field(Field::potential(1).differentiated(2)) - &field(Field::potential(2).differentiated(1));
        let got = RuleSet::new([Rule::EmFields]).apply(&curl).unwrap();
        assert_eq!(got, field(Field::magnetic(3)));
    }

    #[test]
    fn curl_free_electric_field() {
        let curl = &field(Field::electric(2).differentiated(1)) - &field(Field::electric(1).differentiated(2));
        assert!(RuleSet::new([Rule::CurlFreeE]).apply(&curl).unwrap().is_zero());
    }

    #[test]
    fn nonrelativistic_requires_single_energy() {
        let rs = RuleSet::new([Rule::NonRelativistic]);
        let e = &(&beta() * &energy()).scale(&ScalarCoeff::sym_pow(Symbol::M, -1)) * &OpExpr::one();
        assert_eq!(rs.apply(&e).unwrap(), OpExpr::one());
        // products always expand a left energy factor, so only a hand-built
        // word can carry a higher power
        let twice = OpExpr::word(Word { energy: 2, ..Word::one() });
        assert_eq!((&energy() * &energy()).terms().map(|(w, _)| w.energy).max(), Some(1));
        assert!(matches!(rs.apply(&twice), Err(Error::EnergyNotIsolated(_))));
    }

    #[test]
    fn lorenz_gauge_trades_time_divergence() {
        let e = field(Field::potential(0).differentiated(0));
        let got = RuleSet::new([Rule::LorenzGauge]).apply(&e).unwrap();
        let expected = (1..4).fold(OpExpr::zero(), |acc, k| &acc + &field(Field::potential(k).differentiated(k)));
        assert_eq!(got, expected);
    }

    #[test]
    fn rule_order_does_not_matter_on_mixed_terms() {
        let e = &(&laplacian_of(Field::potential(0)) * &field(Field::potential(3).differentiated(1)))
            + &field(Field::potential(2).differentiated(3).differentiated(0));
        let rs = all_rules();
        let a = rs.apply_in_order(&e, &[Rule::StaticFields, Rule::EmFields, Rule::CurlFreeE]).unwrap().0;
        let b = rs.apply_in_order(&e, &[Rule::CurlFreeE, Rule::EmFields, Rule::StaticFields]).unwrap().0;
        assert_eq!(a, b);
    }

    #[test]
    fn budget_is_enforced() {
        let mut rs = RuleSet::new([Rule::EmFields]);
        rs.budget = 0;
        let e = field(Field::potential(0).differentiated(1));
        assert!(matches!(rs.apply(&e), Err(Error::RewriteBudget { .. })));
    }

    #[test]
    fn projection_recovers_multiple() {
        let s = &field(Field::electric(1)) + &field(Field::electric(2));
        let e = &s.scale(&ScalarCoeff::frac(3, 4)) + &field(Field::magnetic(1));
        let p = project_out(&e, &s, &Word::field(Field::electric(1))).unwrap();
        assert_eq!(p.coefficient, ScalarCoeff::frac(3, 4));
        assert_eq!(p.remainder, field(Field::magnetic(1)));
        assert_eq!(p.removed_terms, 2);
    }
}
