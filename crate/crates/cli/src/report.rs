//! Report document: exact coefficients, checks, traces and the audit trail,
//! rendered as diff-stable text or as JSON.

use std::fmt::Write as _;

use gfactor_core::audit::AuditEntry;
use gfactor_core::moment::{alpha_series, Comparison, MomentReport};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use gfactor_core::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// One exact coefficient of `(alpha/pi)^order`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContributionRow {
    pub label: String,
    pub order: i32,
    pub num: String,
    pub den: String,
    pub value: f64,
}

impl ContributionRow {
    pub fn new(label: impl Into<String>, order: i32, r: &BigRational) -> Self {
        ContributionRow {
            label: label.into(),
            order,
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            value: r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn rational(&self) -> Result<BigRational> {
        let bad = |what: &str| Error::Schema(format!("{what} in row `{}`", self.label));
        let num: BigInt = self.num.parse().map_err(|_| bad("bad numerator"))?;
        let den: BigInt = self.den.parse().map_err(|_| bad("bad denominator"))?;
        if !den.is_positive() {
            return Err(bad("non-positive denominator"));
        }
        let r = BigRational::new(num.clone(), den.clone());
        if *r.numer() != num || *r.denom() != den {
            return Err(bad("unreduced fraction"));
        }
        Ok(r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueRow {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub name: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub passed: bool,
    pub checks: Vec<CheckRow>,
    pub contributions: Vec<ContributionRow>,
    pub total: Vec<ContributionRow>,
    pub comparisons: Vec<Comparison>,
    pub values: Vec<ValueRow>,
    pub traces: Vec<Trace>,
    pub audit: Vec<AuditEntry>,
}

impl ReportDocument {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            config,
            passed: true,
            checks: vec![],
            contributions: vec![],
            total: vec![],
            comparisons: vec![],
            values: vec![],
            traces: vec![],
            audit: vec![],
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckRow { name: name.into(), pass, detail: detail.into() });
        self.passed &= pass;
    }

    pub fn value(&mut self, name: impl Into<String>, value: f64) {
        self.values.push(ValueRow { name: name.into(), value });
    }

    pub fn trace(&mut self, name: impl Into<String>, text: impl Into<String>) {
        self.traces.push(Trace { name: name.into(), text: text.into() });
    }

    pub fn add_moment(&mut self, report: &MomentReport) -> Result<()> {
        for c in &report.contributions {
            let r = c
                .rational()
                .ok_or_else(|| Error::UnexpectedForm(format!("`{}` is not a rational power of alpha/pi", c.label)))?;
            self.contributions.push(ContributionRow::new(c.label.clone(), c.order, &r));
        }
        let series = alpha_series(&report.total)
            .ok_or_else(|| Error::UnexpectedForm(format!("total is not a series in alpha/pi: {}", report.total)))?;
        for (k, r) in series {
            self.total.push(ContributionRow::new(format!("alpha^{k}"), k, &r));
        }
        self.comparisons.extend(report.comparisons.iter().cloned());
        self.audit.extend(report.audit.entries().iter().cloned());
        Ok(())
    }

    /// Structural checks applied to every document before it is written and
    /// after it is read back.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!("schema version {} (expected {SCHEMA_VERSION})", self.schema_version)));
        }
        if self.command.is_empty() {
            return Err(Error::Schema("empty command".into()));
        }
        if self.passed != self.checks.iter().all(|c| c.pass) {
            return Err(Error::Schema("`passed` disagrees with the checks".into()));
        }
        for row in self.contributions.iter().chain(&self.total) {
            let r = row.rational()?;
            let expected = r.to_f64().unwrap_or(f64::NAN);
            if (row.value - expected).abs() > 1e-12 * expected.abs().max(1.0) {
                return Err(Error::Schema(format!("value of `{}` disagrees with {}/{}", row.label, row.num, row.den)));
            }
        }
        if !self.total.is_empty() {
            for k in self.total.iter().map(|t| t.order) {
                let sum = self
                    .contributions
                    .iter()
                    .filter(|c| c.order == k)
                    .try_fold(BigRational::zero(), |acc, c| c.rational().map(|r| acc + r))?;
                let total = self.total.iter().find(|t| t.order == k).expect("order present").rational()?;
                if sum != total {
                    return Err(Error::Schema(format!("alpha^{k} total is not the sum of its contributions")));
                }
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<ReportDocument> {
        let doc: ReportDocument = serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Schema(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "gfactor {}", self.tool_version);
        let _ = writeln!(out, "command: {}", self.command);
        let status = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "status: {status}");
        if !self.checks.is_empty() {
            let passed = self.checks.iter().filter(|c| c.pass).count();
            let _ = writeln!(out, "\nchecks ({passed}/{} pass)", self.checks.len());
            for c in &self.checks {
                let mark = if c.pass { "pass" } else { "FAIL" };
                if c.detail.is_empty() {
                    let _ = writeln!(out, "  [{mark}] {}", c.name);
                } else {
                    let _ = writeln!(out, "  [{mark}] {}: {}", c.name, c.detail.replace('\n', " | "));
                }
            }
        }
        if !self.values.is_empty() {
            let _ = writeln!(out, "\nvalues");
            for v in &self.values {
                let _ = writeln!(out, "  {:<28} {}", v.name, sig6(v.value));
            }
        }
        if !self.contributions.is_empty() {
            let _ = writeln!(out, "\ncontributions to (g-2)/2");
            let width = self.contributions.iter().map(|c| c.label.chars().count()).max().unwrap_or(0);
            for c in &self.contributions {
                let frac = fraction(c);
                let _ =
                    writeln!(out, "  {:<width$}  {:<7} {:>12}  {}", c.label, power_label(c.order), frac, sig6(c.value));
            }
        }
        if !self.total.is_empty() {
            let _ = writeln!(out, "\n{}", total_line(&self.total));
        }
        if !self.comparisons.is_empty() {
            let _ = writeln!(out, "\ncomparisons");
            for c in &self.comparisons {
                match c.this_work {
                    Some(v) => {
                        let _ = writeln!(
                            out,
                            "  {}: this work {}, reference {}, difference {}",
                            c.label,
                            sig6(v),
                            sig6(c.reference),
                            sig6(v - c.reference)
                        );
                    }
                    None => {
                        let _ = writeln!(out, "  {}: reference {}", c.label, sig6(c.reference));
                    }
                }
            }
        }
        for t in &self.traces {
            let _ = writeln!(out, "\n--- {} ---", t.name);
            out.push_str(&t.text);
            if !t.text.ends_with('\n') {
                out.push('\n');
            }
        }
        if !self.audit.is_empty() {
            let _ = writeln!(out, "\naudit");
            for a in &self.audit {
                let kind =
                    serde_json::to_value(a.kind).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
                let detail = a.detail.replace('\n', " | ");
                let _ = writeln!(out, "  [{}] {kind} ({}): {detail}", a.stage, a.count);
            }
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Text => {
                self.validate()?;
                Ok(self.to_text())
            }
            Format::Json => self.to_json(),
        }
    }
}

fn fraction(c: &ContributionRow) -> String {
    if c.den == "1" {
        c.num.clone()
    } else {
        format!("{}/{}", c.num, c.den)
    }
}

fn power_label(k: i32) -> String {
    match k {
        1 => "(α/π)".to_string(),
        2 => "(α/π)²".to_string(),
        3 => "(α/π)³".to_string(),
        _ => format!("(α/π)^{k}"),
    }
}

/// `(g−2)/2 = 1/2(α/π) − 1/3(α/π)²`.
pub fn total_line(total: &[ContributionRow]) -> String {
    let mut s = String::from("(g−2)/2 =");
    if total.is_empty() {
        s.push_str(" 0");
    }
    for (i, t) in total.iter().enumerate() {
        let negative = t.num.starts_with('-');
        let magnitude = ContributionRow { num: t.num.trim_start_matches('-').to_string(), ..t.clone() };
        let sign = match (i, negative) {
            (0, false) => " ",
            (0, true) => " −",
            (_, false) => " + ",
            (_, true) => " − ",
        };
        let _ = write!(s, "{sign}{}{}", fraction(&magnitude), power_label(t.order));
    }
    s
}

/// Six significant digits, fixed notation where it stays short.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..=6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.5e}")
    }
}
