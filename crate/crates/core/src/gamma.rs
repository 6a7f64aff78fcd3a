//! Dirac-basis gamma matrices with exact Gaussian-rational entries.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{GaussianRational, ScalarCoeff};

/// Minimal ring interface shared by the exact and numeric matrix entries.
pub trait Ring: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Ring for GaussianRational {
    fn zero() -> Self {
        GaussianRational::zero()
    }
    fn one() -> Self {
        GaussianRational::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn conj(&self) -> Self {
        GaussianRational::conj(self)
    }
    fn is_zero(&self) -> bool {
        GaussianRational::is_zero(self)
    }
}

/// Symbols are treated as real under conjugation.
impl Ring for ScalarCoeff {
    fn zero() -> Self {
        ScalarCoeff::zero()
    }
    fn one() -> Self {
        ScalarCoeff::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        ScalarCoeff::conj(self)
    }
    fn is_zero(&self) -> bool {
        ScalarCoeff::is_zero(self)
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.norm_sqr() == 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mat4<T>(pub [[T; 4]; 4]);

/// Exact 4x4 matrix.
pub type QMat = Mat4<GaussianRational>;

impl<T: Ring> Mat4<T> {
    pub fn from_fn<F: FnMut(usize, usize) -> T>(mut f: F) -> Self {
        Mat4(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn zero() -> Self {
        Self::from_fn(|_, _| T::zero())
    }

    pub fn identity() -> Self {
        Self::diag([T::one(), T::one(), T::one(), T::one()])
    }

    pub fn diag(d: [T; 4]) -> Self {
        Self::from_fn(|i, j| if i == j { d[i].clone() } else { T::zero() })
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.0[i][j]
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].add(&o.0[i][j]))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].add(&o.0[i][j].neg()))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_fn(|i, j| c.mul(&self.0[i][j]))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::from_fn(|i, j| (0..4).fold(T::zero(), |acc, k| acc.add(&self.0[i][k].mul(&o.0[k][j]))))
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn trace(&self) -> T {
        (0..4).fold(T::zero(), |acc, i| acc.add(&self.0[i][i]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_zero())
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn anticommutator(&self, o: &Self) -> Self {
        self.mul(o).add(&o.mul(self))
    }

    /// Entries where `self` and `other` differ.
    pub fn diff_entries(&self, other: &Self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                if self.0[i][j] != other.0[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

impl QMat {
    pub fn to_complex(&self) -> Matrix4<Complex64> {
        Matrix4::from_fn(|i, j| self.0[i][j].to_complex())
    }

    pub fn to_coeff(&self) -> Mat4<ScalarCoeff> {
        Mat4::from_fn(|i, j| ScalarCoeff::constant(self.0[i][j].clone()))
    }
}

/// `g = diag(+1, -1, -1, -1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinkowskiMetric {
    pub g: [[i64; 4]; 4],
}

impl Default for MinkowskiMetric {
    fn default() -> Self {
        let mut g = [[0; 4]; 4];
        g[0][0] = 1;
        for (k, row) in g.iter_mut().enumerate().skip(1) {
            row[k] = -1;
        }
        MinkowskiMetric { g }
    }
}

impl MinkowskiMetric {
    pub fn get(&self, mu: usize, nu: usize) -> i64 {
        self.g[mu][nu]
    }

    /// Diagonal sign used to raise or lower an index.
    pub fn sign(&self, mu: usize) -> i64 {
        self.g[mu][mu]
    }

    pub fn squares_to_identity(&self) -> bool {
        (0..4).all(|i| {
            (0..4).all(|j| {
                let s: i64 = (0..4).map(|k| self.g[i][k] * self.g[k][j]).sum();
                s == i64::from(i == j)
            })
        })
    }
}

fn gr(re: i64, im: i64) -> GaussianRational {
    GaussianRational::new(crate::scalar::ratio(re, 1), crate::scalar::ratio(im, 1))
}

/// 2x2 Pauli matrices, index 0..3 for x, y, z.
pub fn pauli(k: usize) -> [[GaussianRational; 2]; 2] {
    match k {
        0 => [[gr(0, 0), gr(1, 0)], [gr(1, 0), gr(0, 0)]],
        1 => [[gr(0, 0), gr(0, -1)], [gr(0, 1), gr(0, 0)]],
        2 => [[gr(1, 0), gr(0, 0)], [gr(0, 0), gr(-1, 0)]],
        _ => panic!("pauli index {k} out of range"),
    }
}

fn blocks(
    tl: Option<[[GaussianRational; 2]; 2]>,
    tr: Option<[[GaussianRational; 2]; 2]>,
    bl: Option<[[GaussianRational; 2]; 2]>,
    br: Option<[[GaussianRational; 2]; 2]>,
) -> QMat {
    QMat::from_fn(|i, j| {
        let b = match (i < 2, j < 2) {
            (true, true) => &tl,
            (true, false) => &tr,
            (false, true) => &bl,
            (false, false) => &br,
        };
        b.as_ref().map_or_else(GaussianRational::zero, |m| m[i % 2][j % 2].clone())
    })
}

fn neg2(m: [[GaussianRational; 2]; 2]) -> [[GaussianRational; 2]; 2] {
    m.map(|r| r.map(|x| -x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GammaRep {
    pub metric: MinkowskiMetric,
    pub gamma_lower: [QMat; 4],
    pub gamma_upper: [QMat; 4],
    pub beta: QMat,
    /// `alpha_k = beta gamma^k`.
    pub alpha: [QMat; 3],
    /// `diag(pauli_k, pauli_k)`.
    pub sigma: [QMat; 3],
    /// `(i/2)[gamma^mu, gamma^nu]`.
    pub sigma_munu: [[QMat; 4]; 4],
}

impl GammaRep {
    /// Standard Dirac basis; construction fails if any structural check fails.
    pub fn dirac() -> Result<GammaRep> {
        let id2 = [[gr(1, 0), gr(0, 0)], [gr(0, 0), gr(1, 0)]];
        let g0 = blocks(Some(id2.clone()), None, None, Some(neg2(id2)));
        let gk = |k: usize| blocks(None, Some(pauli(k)), Some(neg2(pauli(k))), None);
        let rep = GammaRep::from_upper([g0, gk(0), gk(1), gk(2)]);
        rep.verify()?;
        Ok(rep)
    }

    /// Derives all companion matrices from arbitrary upper-index generators
    /// without checking the Clifford relations.
    pub fn from_upper(gamma_upper: [QMat; 4]) -> GammaRep {
        let metric = MinkowskiMetric::default();
        let gamma_lower =
            std::array::from_fn(|mu| if metric.sign(mu) < 0 { gamma_upper[mu].neg() } else { gamma_upper[mu].clone() });
        let beta = gamma_upper[0].clone();
        let alpha = std::array::from_fn(|k| beta.mul(&gamma_upper[k + 1]));
        let sigma = std::array::from_fn(|k| {
            let p = pauli(k);
            blocks(Some(p.clone()), None, None, Some(p))
        });
        let half_i = GaussianRational::new(crate::scalar::ratio(0, 1), crate::scalar::ratio(1, 2));
        let sigma_munu = std::array::from_fn(|mu| {
            std::array::from_fn(|nu| gamma_upper[mu].commutator(&gamma_upper[nu]).scale(&half_i))
        });
        GammaRep { metric, gamma_lower, gamma_upper, beta, alpha, sigma, sigma_munu }
    }

    pub fn verify(&self) -> Result<()> {
        let failed: Vec<String> =
            clifford_suite(self).into_iter().filter(|c| !c.pass).map(|c| format!("{}: {}", c.name, c.detail)).collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::Consistency(failed.join("; ")))
        }
    }

    /// Upper or lower index matrix by role.
    pub fn gamma(&self, mu: usize, upper: bool) -> &QMat {
        if upper {
            &self.gamma_upper[mu]
        } else {
            &self.gamma_lower[mu]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnticommutatorCheck {
    pub mu: usize,
    pub nu: usize,
    pub expected: i64,
    pub pass: bool,
}

/// `{gamma_mu, gamma_nu} = 2 g_{mu nu} I` for all 16 ordered pairs.
pub fn check_anticommutators(rep: &GammaRep) -> Vec<AnticommutatorCheck> {
    let mut out = Vec::with_capacity(16);
    for mu in 0..4 {
        for nu in 0..4 {
            let expected = 2 * rep.metric.get(mu, nu);
            let target = QMat::identity().scale(&GaussianRational::int(expected));
            let got = rep.gamma_lower[mu].anticommutator(&rep.gamma_lower[nu]);
            out.push(AnticommutatorCheck { mu, nu, expected, pass: got == target });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), pass, detail: detail.into() }
    }
}

/// The full structural suite: anticommutators, index round trip, the
/// hermiticity sandwich, traces, and the spin-matrix identifications.
pub fn clifford_suite(rep: &GammaRep) -> Vec<CheckResult> {
    let mut out: Vec<CheckResult> = check_anticommutators(rep)
        .into_iter()
        .map(|c| {
            CheckResult::new(format!("anticommutator({},{})", c.mu, c.nu), c.pass, format!("expected {}I", c.expected))
        })
        .collect();

    out.push(CheckResult::new("metric squares to identity", rep.metric.squares_to_identity(), "g g = I"));

    for mu in 0..4 {
        let s = GaussianRational::int(rep.metric.sign(mu));
        let lowered = rep.gamma_upper[mu].scale(&s);
        let raised = lowered.scale(&s);
        out.push(CheckResult::new(
            format!("index round trip {mu}"),
            lowered == rep.gamma_lower[mu] && raised == rep.gamma_upper[mu],
            "lower then raise",
        ));
        let sandwich = rep.beta.mul(&rep.gamma_upper[mu].dagger()).mul(&rep.beta);
        out.push(CheckResult::new(
            format!("hermiticity sandwich {mu}"),
            sandwich == rep.gamma_upper[mu],
            "g0 (g^mu)^dagger g0 = g^mu",
        ));
        out.push(CheckResult::new(
            format!("traceless gamma {mu}"),
            rep.gamma_upper[mu].trace().is_zero(),
            "tr g^mu = 0",
        ));
    }

    let traceless_sigma = (0..4)
        .flat_map(|mu| (0..4).map(move |nu| (mu, nu)))
        .filter(|(mu, nu)| mu != nu)
        .all(|(mu, nu)| rep.sigma_munu[mu][nu].trace().is_zero());
    out.push(CheckResult::new("traceless sigma^{mu nu}", traceless_sigma, "mu != nu"));

    out.push(CheckResult::new("beta squares to identity", rep.beta.mul(&rep.beta) == QMat::identity(), "beta^2 = I"));

    let spin_ok = (0..3).all(|k| {
        let (i, j) = ((k + 1) % 3 + 1, (k + 2) % 3 + 1);
        rep.sigma[k] == rep.sigma_munu[i][j]
    });
    out.push(CheckResult::new("spin matrices", spin_ok, "sigma_k = sigma^{ij}, (i,j,k) cyclic"));
    out
}

/// Both sides of `(alpha.a)(alpha.b) = a.b + i sigma.(a x b)` for
/// scalar-valued components, and their difference.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaDotIdentity {
    pub lhs: Mat4<ScalarCoeff>,
    pub rhs: Mat4<ScalarCoeff>,
    pub difference: Mat4<ScalarCoeff>,
}

impl AlphaDotIdentity {
    pub fn holds(&self) -> bool {
        self.difference.is_zero()
    }
}

pub fn alpha_dot_identity(rep: &GammaRep, a: &[ScalarCoeff; 3], b: &[ScalarCoeff; 3]) -> AlphaDotIdentity {
    let dot_with = |mats: &[QMat; 3], v: &[ScalarCoeff; 3]| {
        (0..3).fold(Mat4::<ScalarCoeff>::zero(), |acc, k| acc.add(&mats[k].to_coeff().scale(&v[k])))
    };
    let lhs = dot_with(&rep.alpha, a).mul(&dot_with(&rep.alpha, b));
    let dot = (0..3).fold(ScalarCoeff::zero(), |acc, k| &acc + &(&a[k] * &b[k]));
    let cross: [ScalarCoeff; 3] = std::array::from_fn(|k| {
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        &(&a[i] * &b[j]) - &(&a[j] * &b[i])
    });
    let rhs = Mat4::<ScalarCoeff>::identity().scale(&dot).add(&dot_with(&rep.sigma, &cross).scale(&ScalarCoeff::i()));
    let difference = lhs.sub(&rhs);
    AlphaDotIdentity { lhs, rhs, difference }
}

/// Four-component spinor.
#[derive(Clone, Debug, PartialEq)]
pub struct Spinor<T>(pub [T; 4]);

impl<T: Ring> Spinor<T> {
    /// `psi^dagger gamma^0`, as a row.
    pub fn adjoint(&self, rep: &GammaRep, lift: impl Fn(&GaussianRational) -> T) -> [T; 4] {
        std::array::from_fn(|j| {
            (0..4).fold(T::zero(), |acc, i| acc.add(&self.0[i].conj().mul(&lift(rep.beta.get(i, j)))))
        })
    }

    pub fn apply(&self, m: &Mat4<T>) -> Spinor<T> {
        Spinor(std::array::from_fn(|i| (0..4).fold(T::zero(), |acc, j| acc.add(&m.0[i][j].mul(&self.0[j])))))
    }
}

/// `rho = psi-bar psi`.
pub fn density(rep: &GammaRep, psi: &Spinor<Complex64>) -> f64 {
    let bar = psi.adjoint(rep, GaussianRational::to_complex);
    (0..4).map(|i| bar[i] * psi.0[i]).sum::<Complex64>().re
}

pub fn density_exact(rep: &GammaRep, psi: &Spinor<GaussianRational>) -> GaussianRational {
    let bar = psi.adjoint(rep, Clone::clone);
    (0..4).fold(GaussianRational::zero(), |acc, i| &acc + &(&bar[i] * &psi.0[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{mono, Symbol};
    use proptest::prelude::*;

    fn rep() -> GammaRep {
        GammaRep::dirac().unwrap()
    }

    #[test]
    fn dirac_rep_passes_every_check() {
        let rep = rep();
        assert!(clifford_suite(&rep).iter().all(|c| c.pass));
        assert_eq!(check_anticommutators(&rep).iter().filter(|c| c.pass).count(), 16);
    }

    #[test]
    fn anticommutator_examples() {
        let rep = rep();
        let two = QMat::identity().scale(&GaussianRational::int(2));
        assert_eq!(rep.gamma_upper[0].anticommutator(&rep.gamma_upper[0]), two);
        assert!(rep.gamma_upper[0].anticommutator(&rep.gamma_upper[1]).is_zero());
    }

    #[test]
    fn sigma_12_is_block_pauli_z() {
        let rep = rep();
        let d = QMat::diag([gr(1, 0), gr(-1, 0), gr(1, 0), gr(-1, 0)]);
        assert_eq!(rep.sigma_munu[1][2], d);
        assert_eq!(rep.sigma[2], d);
    }

    #[test]
    fn swapped_generator_breaks_mixed_pairs() {
        let good = rep();
        let mut up = good.gamma_upper.clone();
        up[1] = up[2].clone();
        let bad = GammaRep::from_upper(up);
        let checks = check_anticommutators(&bad);
        let failing: Vec<(usize, usize)> = checks.iter().filter(|c| !c.pass).map(|c| (c.mu, c.nu)).collect();
        assert_eq!(failing, vec![(1, 2), (2, 1)]);
        assert!(bad.verify().is_err());
    }

    #[test]
    fn identity_rep_fails_off_diagonal() {
        let bad = GammaRep::from_upper(std::array::from_fn(|_| QMat::identity()));
        let checks = check_anticommutators(&bad);
        assert!(!checks.iter().find(|c| c.mu == 0 && c.nu == 1).unwrap().pass);
    }

    #[test]
    fn alpha_dot_examples() {
        let rep = rep();
        let e = |k: usize| -> [ScalarCoeff; 3] {
            std::array::from_fn(|i| if i == k { ScalarCoeff::one() } else { ScalarCoeff::zero() })
        };
        let same = alpha_dot_identity(&rep, &e(0), &e(0));
        assert!(same.holds());
        assert_eq!(same.lhs, Mat4::identity());

        let xy = alpha_dot_identity(&rep, &e(0), &e(1));
        assert!(xy.holds());
        assert_eq!(xy.lhs, rep.sigma[2].to_coeff().scale(&ScalarCoeff::i()));
    }

    #[test]
    fn alpha_dot_symbolic_components() {
        let rep = rep();
        let a = [ScalarCoeff::sym(Symbol::E), mono(1, 2, &[(Symbol::M, -1)]), ScalarCoeff::int(3)];
        let b = [ScalarCoeff::sym(Symbol::PHI), ScalarCoeff::zero(), ScalarCoeff::sym(Symbol::R)];
        assert!(alpha_dot_identity(&rep, &a, &b).holds());
    }

    #[test]
    fn density_examples() {
        let rep = rep();
        let c = |x: f64| Complex64::new(x, 0.0);
        assert_eq!(density(&rep, &Spinor([c(1.0), c(0.0), c(0.0), c(0.0)])), 1.0);
        assert_eq!(density(&rep, &Spinor([c(0.0), c(0.0), c(1.0), c(0.0)])), -1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(density(&rep, &Spinor([c(h), c(0.0), c(h), c(0.0)])).abs() < 1e-15);
        let exact = Spinor([gr(1, 0), gr(0, 0), gr(1, 0), gr(0, 0)]);
        assert!(density_exact(&rep, &exact).is_zero());
    }

    proptest! {
        #[test]
        fn alpha_dot_identity_random(v in proptest::collection::vec((-20i64..20, 1i64..9), 6)) {
            let rep = rep();
            let c = |k: usize| ScalarCoeff::frac(v[k].0, v[k].1);
            let a = [c(0), c(1), c(2)];
            let b = [c(3), c(4), c(5)];
            prop_assert!(alpha_dot_identity(&rep, &a, &b).holds());
        }
    }
}
