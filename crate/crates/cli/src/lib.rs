//! Command-line driver: runs the check suites, derivations and the moment
//! pipeline, and assembles a [`ReportDocument`].

pub mod report;
pub mod suites;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gfactor_core::dirac::{
    derive_wave_equation, quantization_kernel_check, v1_commutator_form, v1_to_pauli_form, v2_commutator_form,
};
use gfactor_core::fw::{
    fw_transform, pauli_hamiltonian, pauli_reduce, spin_magnetic_coefficient, v1_residual, v1_residual_target,
    AssumptionSet, Hamiltonian,
};
use gfactor_core::gamma::{clifford_suite, GammaRep};
use gfactor_core::moment::{moment_report, Particle, ParticleConfig};
use gfactor_core::ops::text::emit;
use gfactor_core::ops::{Field, OpExpr};
use gfactor_core::scalar::{mono, Symbol};
use gfactor_core::selfenergy::{closed_form_value, self_energy_quadrature, QuadratureConfig};
use gfactor_core::{Error, Result};
use num_rational::BigRational;
use serde::Serialize;

pub use report::{Format, ReportDocument};

/// Directory used for reports when `--output` is not given.
pub const OUTPUT_DIR_ENV: &str = "GFACTOR_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const SELF_ENERGY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "gfactor", version, about = "Exact g-factor corrections for a spread Dirac particle")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Switch off an assumption of the first-order residual (repeatable).
    #[arg(long = "disable", global = true, value_enum)]
    pub disabled: Vec<Assumption>,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Structural check suites.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        /// Seed for the randomized identity checks.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Symbolic derivations.
    Derive {
        #[command(subcommand)]
        target: Derivation,
    },
    /// Foldy–Wouthuysen reduction of the Dirac Hamiltonian.
    Fw {
        /// Also derive the first-order residual.
        #[arg(long)]
        with_v1: bool,
    },
    /// Anomalous moment through the requested order in alpha.
    Moment {
        #[arg(long, value_enum, default_value_t = ParticleArg::Electron)]
        particle: ParticleArg,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(i32).range(1..=2))]
        order: i32,
        #[arg(long)]
        vacuum_polarization: bool,
        /// Muon to electron mass ratio as a fraction, e.g. `1034/5`.
        #[arg(long)]
        mass_ratio: Option<String>,
    },
    /// Self-energy integral against its closed form.
    Selfenergy {
        #[arg(long, default_value_t = 1.0)]
        r0: f64,
        #[arg(long, default_value_t = 1.0)]
        charge: f64,
        #[arg(long, default_value_t = 1.0)]
        eps0: f64,
    },
    /// Spectral quantization check of a 4x4 complex matrix.
    Quantize {
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Clifford,
    Identities,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivation {
    WaveEquation {
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(i32).range(1..=2))]
        order: i32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticleArg {
    Electron,
    Muon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    StaticFields,
    CurlFreeE,
    Nonrelativistic,
    CommutingPhi,
    WeakField,
}

impl RunConfig {
    pub fn new(command: Command) -> RunConfig {
        RunConfig { command, format: Format::Text, output: None, disabled: vec![] }
    }

    pub fn assumptions(&self) -> AssumptionSet {
        let mut set = AssumptionSet::default();
        for a in &self.disabled {
            match a {
                Assumption::StaticFields => set.static_fields = false,
                Assumption::CurlFreeE => set.curl_free_e = false,
                Assumption::Nonrelativistic => set.nonrelativistic = false,
                Assumption::CommutingPhi => set.commuting_phi = false,
                Assumption::WeakField => set.weak_field = false,
            }
        }
        set
    }

    /// Canonical command line, used in the report header and file names.
    pub fn command_line(&self) -> String {
        let mut s = match &self.command {
            Command::Check { suite, .. } => format!("check {}", value_name(*suite)),
            Command::Derive { target: Derivation::WaveEquation { order } } => {
                format!("derive wave-equation --order {order}")
            }
            Command::Fw { with_v1 } => if *with_v1 { "fw --with-v1" } else { "fw" }.to_string(),
            Command::Moment { particle, order, vacuum_polarization, mass_ratio } => {
                let mut s = format!("moment --particle {} --order {order}", value_name(*particle));
                if *vacuum_polarization {
                    s.push_str(" --vacuum-polarization");
                }
                if let Some(r) = mass_ratio {
                    s.push_str(&format!(" --mass-ratio {r}"));
                }
                s
            }
            Command::Selfenergy { r0, charge, eps0 } => format!("selfenergy --r0 {r0} --charge {charge} --eps0 {eps0}"),
            Command::Quantize { matrix } => format!("quantize --matrix {}", matrix.display()),
        };
        for a in &self.disabled {
            s.push_str(&format!(" --disable {}", value_name(*a)));
        }
        s
    }
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

/// Exit status and the assembled report.
#[derive(Clone, Debug)]
pub struct Run {
    pub exit: i32,
    pub doc: ReportDocument,
}

/// Runs one command. Malformed input is an `Err`; a failing check or an
/// engine error yields a document whose exit status is nonzero.
pub fn run(config: &RunConfig) -> Result<Run> {
    let echo = serde_json::to_value(config).map_err(|e| Error::Schema(e.to_string()))?;
    let mut doc = ReportDocument::new(config.command_line(), echo);
    let outcome = match &config.command {
        Command::Check { suite: Suite::Clifford, .. } => check_clifford(&mut doc),
        Command::Check { suite: Suite::Identities, seed } => check_identities(&mut doc, *seed),
        Command::Derive { target: Derivation::WaveEquation { order } } => wave_equation(&mut doc, *order),
        Command::Fw { with_v1 } => fw(&mut doc, *with_v1, config.assumptions()),
        Command::Moment { particle, order, vacuum_polarization, mass_ratio } => {
            let p = particle_config(*particle, mass_ratio.as_deref())?;
            moment(&mut doc, &p, *order, *vacuum_polarization)
        }
        Command::Selfenergy { r0, charge, eps0 } => {
            if !(*r0 > 0.0 && *charge > 0.0 && *eps0 > 0.0) {
                return Err(Error::Domain("r0, charge and eps0 must be positive".into()));
            }
            selfenergy(&mut doc, *r0, *charge, *eps0)
        }
        Command::Quantize { matrix } => {
            let text = std::fs::read_to_string(matrix).map_err(|e| Error::Io(format!("{}: {e}", matrix.display())))?;
            let z = suites::parse_matrix(&text)?;
            quantize(&mut doc, &z)
        }
    };
    if let Err(e) = outcome {
        doc.check("engine", false, e.to_string());
    }
    let exit = if doc.passed { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok(Run { exit, doc })
}

fn particle_config(particle: ParticleArg, mass_ratio: Option<&str>) -> Result<ParticleConfig> {
    match (particle, mass_ratio) {
        (ParticleArg::Electron, None) => Ok(ParticleConfig::of(Particle::Electron)),
        (ParticleArg::Electron, Some(_)) => Err(Error::Domain("--mass-ratio applies to the muon only".into())),
        (ParticleArg::Muon, None) => Ok(ParticleConfig::of(Particle::Muon)),
        (ParticleArg::Muon, Some(r)) => {
            let ratio: BigRational =
                r.trim().parse().map_err(|_| Error::Parse { pos: 0, msg: format!("bad mass ratio `{r}`") })?;
            ParticleConfig::muon_with_ratio(ratio)
        }
    }
}

fn check_clifford(doc: &mut ReportDocument) -> Result<()> {
    let rep = GammaRep::dirac()?;
    for c in clifford_suite(&rep) {
        doc.check(c.name, c.pass, c.detail);
    }
    Ok(())
}

fn check_identities(doc: &mut ReportDocument, seed: u64) -> Result<()> {
    let rep = GammaRep::dirac()?;
    for o in suites::identity_suite(&rep, seed)? {
        doc.check(o.name, o.pass, o.detail);
    }
    Ok(())
}

fn wave_equation(doc: &mut ReportDocument, order: i32) -> Result<()> {
    let w = derive_wave_equation(order)?;
    doc.trace("dirac part", emit(&w.dirac_part));
    doc.trace("mass term", w.mass_term.to_string());
    let forms = [v1_commutator_form(), v2_commutator_form()];
    for (k, (v, form)) in w.v_series.iter().zip(&forms).enumerate() {
        let name = format!("V{}", k + 1);
        doc.check(format!("{name} equals its commutator form"), v == form, format!("{} terms", v.len()));
        doc.trace(name, emit(v));
    }
    match v1_to_pauli_form(&w.v_series[0]) {
        Ok(p) => {
            doc.check("V1 equals the Pauli-term forms up to the gauge term", true, "(i kappa e/2m) d.A");
            doc.trace("V1 gauge term", emit(&p.gauge_term));
        }
        Err(e) => doc.check("V1 equals the Pauli-term forms up to the gauge term", false, e.to_string()),
    }
    Ok(())
}

fn curl_e_present(e: &OpExpr) -> bool {
    e.terms().any(|(w, _)| {
        w.fields.iter().any(|f| (1..=3).any(|i| (1..=3).any(|j| i != j && *f == Field::electric(i).differentiated(j))))
    })
}

fn fw(doc: &mut ReportDocument, with_v1: bool, assumptions: AssumptionSet) -> Result<()> {
    let reduced = pauli_reduce(&fw_transform(&Hamiltonian::dirac(), 2)?)?;
    doc.trace("reduced Hamiltonian", emit(&reduced));
    doc.check("reduced Hamiltonian equals the Pauli Hamiltonian", reduced == pauli_reduce(&pauli_hamiltonian())?, "");
    let b = spin_magnetic_coefficient(&reduced)?;
    let expected = mono(-1, 2, &[(Symbol::E, 1), (Symbol::M, -1)]);
    doc.check("beta sigma.B coefficient is -e/2m (g = 2)", b == expected, b.to_string());
    if with_v1 {
        let v1 = v1_residual(&assumptions)?;
        doc.trace("first-order residual", emit(&v1.result));
        doc.audit.extend(v1.audit.entries().iter().cloned());
        if assumptions.curl_free_e {
            let target = v1_residual_target();
            doc.check(
                "first-order residual equals -kappa(e^2/2m^2) sigma.(A x E) - kappa(e^2/4m^2) iA.E",
                v1.result == target,
                format!("{} terms", v1.result.len()),
            );
        } else {
            doc.check("curl E term present without the curl-free assumption", curl_e_present(&v1.result), "");
        }
    }
    Ok(())
}

fn moment(doc: &mut ReportDocument, p: &ParticleConfig, order: i32, vacuum_polarization: bool) -> Result<()> {
    let report = moment_report(p, order, vacuum_polarization)?;
    doc.trace("baseline", format!("{} (e/2m) beta sigma.B", report.baseline));
    doc.add_moment(&report)?;
    doc.check("total is a rational series in alpha/pi", !doc.total.is_empty(), report.total.to_string());
    Ok(())
}

fn selfenergy(doc: &mut ReportDocument, r0: f64, charge: f64, eps0: f64) -> Result<()> {
    let cfg = QuadratureConfig { r0, e_charge: charge, eps0, ..QuadratureConfig::default() };
    let s = self_energy_quadrature(&cfg)?;
    let closed = closed_form_value(r0, charge, eps0);
    let rel = (s.value - closed).norm() / closed.norm();
    doc.value("quadrature (imaginary part)", s.value.im);
    doc.value("closed form (imaginary part)", closed.im);
    doc.value("relative difference", rel);
    doc.value("evaluations", s.evaluations as f64);
    doc.check("matches i e^2/(8 pi^2 eps0 r0)", rel <= SELF_ENERGY_TOL, format!("relative difference {rel:.3e}"));
    doc.check("purely imaginary", s.value.re == 0.0, format!("real part {}", s.value.re));
    Ok(())
}

fn quantize(doc: &mut ReportDocument, z: &gfactor_core::dirac::CMat) -> Result<()> {
    let q = quantization_kernel_check(z)?;
    for (k, e) in q.eigen.iter().enumerate() {
        let n = e.n.map(|n| format!(", n = {n}")).unwrap_or_default();
        doc.trace(
            format!("eigenvalue {k}"),
            format!(
                "{} {:+}i, satisfies 2n pi: {}{n}",
                report::sig6(e.eigenvalue.0),
                report::sig6(e.eigenvalue.1),
                e.satisfies_2npi
            ),
        );
    }
    doc.value("flagged eigenvalues", q.flagged as f64);
    doc.value("kernel dimension of exp(Z) - I", q.kernel_dimension as f64);
    doc.value("eigenbasis condition number", q.condition);
    doc.check(
        "kernel dimension equals flagged count",
        q.consistent(),
        format!("{} vs {}", q.kernel_dimension, q.flagged),
    );
    Ok(())
}

/// Destination when `--output` is absent: `$GFACTOR_OUTPUT_DIR/<command>.<ext>`
/// if the variable is set, otherwise stdout.
pub fn output_path(config: &RunConfig, env_dir: Option<&Path>) -> Option<PathBuf> {
    if let Some(p) = &config.output {
        return Some(p.clone());
    }
    let dir = env_dir?;
    let stem: String = config
        .command_line()
        .split_whitespace()
        .take_while(|t| !t.contains('/'))
        .collect::<Vec<_>>()
        .join("_")
        .replace("--", "")
        .replace('-', "_");
    let ext = match config.format {
        Format::Text => "txt",
        Format::Json => "json",
    };
    Some(dir.join(format!("{stem}.{ext}")))
}

/// Renders the document and writes it to `path`, or stdout when `None`.
pub fn emit_report(doc: &ReportDocument, format: Format, path: Option<&Path>) -> Result<()> {
    let text = doc.render(format)?;
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))
        }
    }
}
