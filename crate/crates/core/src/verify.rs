//! Named verification suites with machine-readable reports.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::triangle;
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::limits::{
    commutator_limit_check, eval_jet, limit_poly, matrix_limit_check, measure_poisson_sign, moebius_iteration_check,
    poisson_at, stereo_consistency_check, MoebiusMatrix, SpherePoint, POISSON_SIGN,
};
use crate::matrep::{
    cg_f64, k_cap, make_rep, max_abs, norm_closed_form_k, reduced_matrix_element, rel_diff, CMatrix,
    ExactRep, Rep,
};
use crate::psi::{
    associativity_defect, build_psi, coordinate, coordinate_vector, ext_d, ladder_psi, metric, pi0, project, psi_norm,
    rho, rotation_phase, rotation_sign, PsiField, PsiLabel,
};
use crate::surd::{rat, rat_int, CSurd, Surd};
use crate::symalg::{norm_sq_poly, table1_check, Algebra, ExactScalar, NormalForm};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Norms,
    Eigen,
    Orthogonality,
    Product,
    Table1,
    Moebius,
    Poisson,
    Leibniz,
    Psi,
    RotationSign,
    All,
}

impl Suite {
    pub const EACH: [Suite; 10] = [
        Suite::Norms,
        Suite::Eigen,
        Suite::Orthogonality,
        Suite::Product,
        Suite::Table1,
        Suite::Moebius,
        Suite::Poisson,
        Suite::Leibniz,
        Suite::Psi,
        Suite::RotationSign,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Norms => "norms",
            Suite::Eigen => "eigen",
            Suite::Orthogonality => "orthogonality",
            Suite::Product => "product",
            Suite::Table1 => "table1",
            Suite::Moebius => "moebius",
            Suite::Poisson => "poisson",
            Suite::Leibniz => "leibniz",
            Suite::Psi => "psi",
            Suite::RotationSign => "rotation-sign",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub k_max: HalfInt,
    pub n_max: i64,
    /// Replaces the default absolute/relative tolerance of every
    /// tolerance-type check.
    pub tol: Option<f64>,
    pub seed: u64,
    pub exact: bool,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig { suite, k_max: HalfInt::int(5), n_max: 4, tol: None, seed: 0, exact: false }
    }

    pub fn validate(&self) -> Result<()> {
        let cap = k_cap();
        if self.k_max > cap {
            return Err(Error::KCap { k: self.k_max, cap });
        }
        if self.k_max.is_negative() || self.n_max < 0 {
            return Err(Error::Parse("k_max and n_max must be nonnegative".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Parse(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(())
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    fn ks(&self) -> Vec<HalfInt> {
        (0..=self.k_max.twice()).map(HalfInt::from_twice).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within([f64; 2]),
    /// Exact identities; `measured` counts failures.
    Exact,
}

impl Bound {
    fn holds(self, x: f64) -> bool {
        match self {
            Bound::AtMost(b) => x <= b,
            Bound::AtLeast(b) => x >= b,
            Bound::Within([lo, hi]) => (lo..=hi).contains(&x),
            Bound::Exact => x == 0.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub measured: f64,
    pub bound: Bound,
    pub pass: bool,
    /// Reported, but does not gate the exit status.
    pub advisory: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn new(suite: Suite, name: impl Into<String>, measured: f64, bound: Bound) -> Self {
        Check {
            suite: suite.name(),
            name: name.into(),
            measured,
            bound,
            pass: bound.holds(measured),
            advisory: false,
            note: None,
        }
    }

    fn exact(suite: Suite, name: impl Into<String>, failures: usize) -> Self {
        Check::new(suite, name, failures as f64, Bound::Exact)
    }

    fn advisory(mut self, note: &str) -> Self {
        self.advisory = true;
        self.note = Some(note.into());
        self
    }

    fn error(suite: Suite, name: impl Into<String>, e: &Error) -> Self {
        Check {
            suite: suite.name(),
            name: name.into(),
            measured: f64::NAN,
            bound: Bound::Exact,
            pass: false,
            advisory: false,
            note: Some(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub advisory: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
    pub summary: Summary,
    pub pass: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass && !c.advisory)
    }
}

pub fn run(cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let suites: Vec<Suite> = if cfg.suite == Suite::All { Suite::EACH.to_vec() } else { vec![cfg.suite] };
    let mut checks = Vec::new();
    for s in suites {
        checks.extend(run_one(s, cfg));
    }
    let failed = checks.iter().filter(|c| !c.pass && !c.advisory).count();
    let summary = Summary {
        total: checks.len(),
        passed: checks.iter().filter(|c| c.pass).count(),
        failed,
        advisory: checks.iter().filter(|c| c.advisory && !c.pass).count(),
    };
    Ok(Report { schema_version: SCHEMA_VERSION, config: cfg.clone(), checks, pass: failed == 0, summary })
}

fn run_one(s: Suite, cfg: &SuiteConfig) -> Vec<Check> {
    match s {
        Suite::Norms => norms(cfg),
        Suite::Eigen => eigen(cfg),
        Suite::Orthogonality => orthogonality(cfg),
        Suite::Product => product(cfg),
        Suite::Table1 => table1(),
        Suite::Moebius => moebius(),
        Suite::Poisson => poisson(cfg),
        Suite::Leibniz => leibniz(cfg),
        Suite::Psi => psi(cfg),
        Suite::RotationSign => rotation(cfg),
        Suite::All => unreachable!(),
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn or_error(s: Suite, name: String, r: Result<Check>) -> Check {
    r.unwrap_or_else(|e| Check::error(s, name, &e))
}

const EPS: [f64; 2] = [1.0, 0.37];

// ---------------------------------------------------------------------------

/// Trace norm against the closed form, relative error, `n ≤ 2k+1`, all `m`.
pub fn norm_rel_error(k: HalfInt, eps: f64) -> Result<f64> {
    let rep = make_rep(k, eps)?;
    let mut worst = 0.0f64;
    for n in 0..=(k.twice() + 1) {
        let want = norm_closed_form_k(n, k, eps);
        for m in -n..=n {
            let p = rep.pmn_matrix(n, m)?;
            let got = rep.trace_inner(&p, &p)?;
            worst = worst.max((got - c(want)).norm() / want.max(1.0));
        }
    }
    Ok(worst)
}

fn norms(cfg: &SuiteConfig) -> Vec<Check> {
    let s = Suite::Norms;
    let tol = cfg.tol(1e-10);
    let mut out: Vec<Check> = cfg
        .ks()
        .par_iter()
        .flat_map_iter(|&k| {
            EPS.iter().map(move |&eps| {
                or_error(s, format!("k={k} ε={eps} trace norm vs closed form (rel)"), norm_rel_error(k, eps).map(|v| Check::new(s, format!("k={k} ε={eps} trace norm vs closed form (rel)"), v, Bound::AtMost(tol))))
            })
        })
        .collect();
    let zeros = cfg
        .ks()
        .iter()
        .filter(|k| norm_closed_form_k(k.twice() + 1, **k, 1.0) != 0.0)
        .count();
    out.push(Check::exact(s, "closed form vanishes at n = 2k+1", zeros));
    let scalar_poly = (0..=cfg.n_max)
        .filter(|&n| {
            // R² = ε²k(k+1) turns the polynomial norm into the k-form
            let k = HalfInt::int(n);
            let v = crate::symalg::eval_scalar(&norm_sq_poly(n), 0.5, 0.5 * ((n * (n + 1)) as f64).sqrt());
            (v.re - norm_closed_form_k(n, k, 0.5)).abs() > 1e-12 * v.re.abs().max(1.0)
        })
        .count();
    out.push(Check::exact(s, "symbolic norm polynomial vs closed form", scalar_poly));
    if cfg.exact {
        let kmax = cfg.k_max.min(HalfInt::int(3));
        let mut bad = 0;
        for k in (0..=kmax.twice()).map(HalfInt::from_twice) {
            let ex = match ExactRep::new(k, rat(1, 2)) {
                Ok(x) => x,
                Err(e) => {
                    out.push(Check::error(s, "exact trace norms", &e));
                    continue;
                }
            };
            for n in 0..=(k.twice() + 1) {
                for m in -n..=n {
                    let p = ex.pmn_matrix(n, m).expect("label in range");
                    let tr = p.trace_form(&p);
                    let want = CSurd::real(Surd::from_rational(ex.norm_sq(n)));
                    if tr != want {
                        bad += 1;
                    }
                }
            }
        }
        out.push(Check::exact(s, format!("exact trace norms, k ≤ {kmax}, ε = 1/2"), bad));
    }
    out
}

// ---------------------------------------------------------------------------

fn ladder_coeff(n: i64, m: i64) -> CSurd {
    CSurd::real(Surd::sqrt(&rat_int((n - m) * (n + m + 1))).expect("nonnegative"))
}

/// Failing `(identity, n, m)` among `ad_z`, `ad_{J±}`, `Δ` on `P^m_n`.
pub fn symbolic_eigen_failures(nmax: i64) -> Result<Vec<String>> {
    let alg = Algebra::sphere();
    let eps = ExactScalar::var(0);
    let mut bad = vec![];
    for n in 0..=nmax {
        for m in -n..=n {
            let p = alg.build_pmn(n, m)?;
            let em = eps.scale(&CSurd::from_int(m));
            if alg.ad(&NormalForm::z(), &p) != p.scale(&em) {
                bad.push(format!("ad_z P^{m}_{n}"));
            }
            let up = if m < n { alg.build_pmn(n, m + 1)?.scale(&eps.scale(&ladder_coeff(n, m))) } else { NormalForm::zero() };
            if alg.ad(&NormalForm::jp(), &p) != up {
                bad.push(format!("ad_J+ P^{m}_{n}"));
            }
            let down =
                if m > -n { alg.build_pmn(n, m - 1)?.scale(&eps.scale(&ladder_coeff(n, -m))) } else { NormalForm::zero() };
            if alg.ad(&NormalForm::jm(), &p) != down {
                bad.push(format!("ad_J- P^{m}_{n}"));
            }
            let lap = eps.mul(&eps).scale(&CSurd::from_int(n * (n + 1)));
            if alg.laplacian(&p) != p.scale(&lap) {
                bad.push(format!("Δ P^{m}_{n}"));
            }
        }
    }
    Ok(bad)
}

/// Largest scaled residual of the eigen, ladder and Laplacian relations in
/// the spin-`k` matrices.
pub fn matrix_eigen_residual(k: HalfInt, eps: f64) -> Result<f64> {
    let rep = make_rep(k, eps)?;
    let ad = Rep::comm;
    let mut worst = 0.0f64;
    for n in 0..=k.twice() {
        for m in -n..=n {
            let p = rep.pmn_matrix(n, m)?;
            let scale = (max_abs(&p) * rep.rhat).max(1.0);
            let zero = CMatrix::zeros(p.nrows(), p.ncols());
            let up = if m < n { rep.pmn_matrix(n, m + 1)? * c(eps * (((n - m) * (n + m + 1)) as f64).sqrt()) } else { zero.clone() };
            let down = if m > -n { rep.pmn_matrix(n, m - 1)? * c(eps * (((n + m) * (n - m + 1)) as f64).sqrt()) } else { zero };
            let lap = ad(&rep.j0, &ad(&rep.j0, &p)) + (ad(&rep.jp, &ad(&rep.jm, &p)) + ad(&rep.jm, &ad(&rep.jp, &p))) * c(0.5);
            let res = [
                max_abs(&(ad(&rep.j0, &p) - &p * c(eps * m as f64))) / scale,
                max_abs(&(ad(&rep.jp, &p) - up)) / scale,
                max_abs(&(ad(&rep.jm, &p) - down)) / scale,
                max_abs(&(lap - &p * c(eps * eps * (n * (n + 1)) as f64))) / (scale * rep.rhat.max(1.0)),
            ];
            worst = res.iter().copied().fold(worst, f64::max);
        }
    }
    Ok(worst)
}

fn eigen(cfg: &SuiteConfig) -> Vec<Check> {
    let s = Suite::Eigen;
    let mut out = vec![match symbolic_eigen_failures(cfg.n_max) {
        Ok(bad) => {
            let mut ch = Check::exact(s, format!("symbolic eigen/ladder/Laplacian, n ≤ {}", cfg.n_max), bad.len());
            if !bad.is_empty() {
                ch.note = Some(bad.join(", "));
            }
            ch
        }
        Err(e) => Check::error(s, "symbolic eigen/ladder/Laplacian", &e),
    }];
    let tol = cfg.tol(1e-12);
    out.extend(cfg.ks().par_iter().flat_map_iter(|&k| {
        EPS.iter().map(move |&eps| {
            let name = format!("k={k} ε={eps} matrix residual (scaled)");
            or_error(s, name.clone(), matrix_eigen_residual(k, eps).map(|v| Check::new(s, name, v, Bound::AtMost(tol))))
        })
    }).collect::<Vec<_>>());
    if cfg.exact {
        let kmax = cfg.k_max.min(HalfInt::int(2));
        let alg = Algebra::sphere();
        let mut bad = 0;
        for k in (0..=kmax.twice()).map(HalfInt::from_twice) {
            let ex = ExactRep::new(k, rat(2, 3)).expect("valid rep");
            for n in 0..=k.twice() {
                for m in -n..=n {
                    let a = ex.pmn_matrix(n, m).expect("label");
                    let b = ex.eval_normal_form(&alg.build_pmn(n, m).expect("label"));
                    if a != b {
                        bad += 1;
                    }
                }
            }
        }
        out.push(Check::exact(s, format!("exact commutator build = exact normal form, k ≤ {kmax}"), bad));
    }
    out
}

// ---------------------------------------------------------------------------

/// Failing symbolic conjugation and orthogonality identities, `n ≤ nmax`.
pub fn symbolic_orthogonality_failures(nmax: i64) -> Result<Vec<String>> {
    let alg = Algebra::sphere();
    let mut bad = vec![];
    for n in 0..=nmax {
        for m in -n..=n {
            let p = alg.build_pmn(n, m)?;
            let sign = CSurd::from_int(if m % 2 == 0 { 1 } else { -1 });
            if alg.dagger(&p) != alg.build_pmn(n, -m)?.scale_c(&sign) {
                bad.push(format!("dagger P^{m}_{n}"));
            }
            for n2 in 0..=nmax {
                if m.abs() > n2 {
                    continue;
                }
                let ip = alg.inner(&p, &alg.build_pmn(n2, m)?)?;
                let want = if n2 == n { norm_sq_poly(n) } else { ExactScalar::zero() };
                if ip != want {
                    bad.push(format!("⟨P^{m}_{n}, P^{m}_{n2}⟩"));
                }
            }
        }
    }
    Ok(bad)
}

/// Largest conjugation and off-diagonal overlap residuals, relative.
pub fn matrix_orthogonality_residual(k: HalfInt, eps: f64) -> Result<(f64, f64)> {
    let rep = make_rep(k, eps)?;
    let labels: Vec<(i64, i64)> = (0..=k.twice()).flat_map(|n| (-n..=n).map(move |m| (n, m))).collect();
    let mats = labels.iter().map(|&(n, m)| rep.pmn_matrix(n, m)).collect::<Result<Vec<_>>>()?;
    let (mut conj, mut orth) = (0.0f64, 0.0f64);
    for (i, &(n, m)) in labels.iter().enumerate() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let j = labels.iter().position(|&l| l == (n, -m)).expect("label present");
        conj = conj.max(rel_diff(&mats[i].adjoint(), &(&mats[j] * c(sign))));
        for (j, &(n2, m2)) in labels.iter().enumerate() {
            if (n, m) != (n2, m2) {
                let scale = (rep.norm_sq(n) * rep.norm_sq(n2)).sqrt().max(1.0);
                orth = orth.max(rep.trace_inner(&mats[i], &mats[j])?.norm() / scale);
            }
        }
    }
    Ok((conj, orth))
}

fn orthogonality(cfg: &SuiteConfig) -> Vec<Check> {
    let s = Suite::Orthogonality;
    let nsym = cfg.n_max.min(4);
    let mut out = vec![match symbolic_orthogonality_failures(nsym) {
        Ok(bad) => {
            let mut ch = Check::exact(s, format!("symbolic conjugation and orthogonality, n ≤ {nsym}"), bad.len());
            if !bad.is_empty() {
                ch.note = Some(bad.join(", "));
            }
            ch
        }
        Err(e) => Check::error(s, "symbolic conjugation and orthogonality", &e),
    }];
    let tol = cfg.tol(1e-12);
    out.extend(
        cfg.ks()
            .par_iter()
            .flat_map_iter(|&k| match matrix_orthogonality_residual(k, 0.7) {
                Ok((a, b)) => vec![
                    Check::new(s, format!("k={k} conjugation (rel)"), a, Bound::AtMost(tol)),
                    Check::new(s, format!("k={k} orthogonality (rel)"), b, Bound::AtMost(tol)),
                ],
                Err(e) => vec![Check::error(s, format!("k={k}"), &e)],
            })
            .collect::<Vec<_>>(),
    );
    out
}

// ---------------------------------------------------------------------------

/// Worst reconstruction residual and worst `|coeff − CG·RM|` (relative to
/// `max(1, |CG·RM|)`) over `n1, n2 ≤ nmax`, all `m`, at spin `k`.
pub fn scalar_product_law(k: HalfInt, nmax: i64, eps: f64) -> Result<(f64, f64)> {
    let rep = make_rep(k, eps)?;
    let nmax = nmax.min(k.twice());
    let (mut res, mut dev) = (0.0f64, 0.0f64);
    let i = HalfInt::int;
    for n1 in 0..=nmax {
        for n2 in 0..=nmax {
            for m1 in -n1..=n1 {
                for m2 in -n2..=n2 {
                    let rpt = rep.decompose_product(n1, m1, n2, m2)?;
                    res = res.max(rpt.residual);
                    for t in &rpt.terms {
                        let cg = cg_f64(i(n1), i(n2), i(t.n), i(m1), i(m2));
                        let want = cg * reduced_matrix_element(i(n1), i(n2), i(t.n), HalfInt::ZERO, HalfInt::ZERO, k, eps)?;
                        dev = dev.max((rpt.coeff(t.n) - c(want)).norm() / want.abs().max(1.0));
                    }
                }
            }
        }
    }
    Ok((res, dev))
}

/// Same law on fields with shifts `|r| ≤ rmax`, `n1, n2 ≤ nmax` (half-integer
/// steps), projected back onto coefficients.
pub fn shifted_product_law(k: HalfInt, nmax: HalfInt, rmax: HalfInt, eps: f64) -> Result<(f64, f64)> {
    let (mut res, mut dev) = (0.0f64, 0.0f64);
    let ns: Vec<HalfInt> = (0..=nmax.twice()).map(HalfInt::from_twice).collect();
    for &n1 in &ns {
        for &n2 in &ns {
            for r1 in n1.projections().filter(|r| r.abs() <= rmax) {
                for r2 in n2.projections().filter(|r| r.abs() <= rmax) {
                    if (k + r2).is_negative() || (k + r1 + r2).is_negative() {
                        continue;
                    }
                    for m1 in n1.projections() {
                        for m2 in n2.projections() {
                            let a = build_psi(k + r2, PsiLabel::new(n1, r1, m1)?, eps)?;
                            let b = build_psi(k, PsiLabel::new(n2, r2, m2)?, eps)?;
                            let ex = project(&rho(&a, &b)?, eps)?;
                            res = res.max(ex.residual);
                            for (&(n, _), v) in &ex.field.coeffs {
                                let want = cg_f64(n1, n2, n, m1, m2) * reduced_matrix_element(n1, n2, n, r1, r2, k, eps)?;
                                dev = dev.max((*v - c(want)).norm() / want.abs().max(1.0));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((res, dev))
}

fn product(cfg: &SuiteConfig) -> Vec<Check> {
    let s = Suite::Product;
    let (tres, tdev) = (cfg.tol(1e-10), cfg.tol(1e-9));
    let nmax = cfg.n_max.min(4);
    let pair = |name: String, r: Result<(f64, f64)>| -> Vec<Check> {
        match r {
            Ok((a, b)) => vec![
                Check::new(s, format!("{name} reconstruction residual"), a, Bound::AtMost(tres)),
                Check::new(s, format!("{name} coefficient vs CG×RM"), b, Bound::AtMost(tdev)),
            ],
            Err(e) => vec![Check::error(s, name, &e)],
        }
    };
    let mut out: Vec<Check> = cfg
        .ks()
        .par_iter()
        .filter(|k| **k <= HalfInt::int(5))
        .flat_map_iter(|&k| pair(format!("k={k} n ≤ {nmax}"), scalar_product_law(k, nmax, 0.8)))
        .collect();
    for k in [HalfInt::int(2), HalfInt::int(3)].into_iter().filter(|k| *k <= cfg.k_max) {
        out.extend(pair(format!("k={k} shifted, n ≤ 2, |r| ≤ 1"), shifted_product_law(k, HalfInt::int(2), HalfInt::ONE, 0.65)));
    }
    out
}

// ---------------------------------------------------------------------------

fn table1() -> Vec<Check> {
    let s = Suite::Table1;
    let rpt = match table1_check() {
        Ok(r) => r,
        Err(e) => return vec![Check::error(s, "Table 1", &e)],
    };
    let mut out: Vec<Check> = rpt
        .rows
        .iter()
        .map(|r| {
            let ch = Check::exact(s, format!("P^{}_{} = {}", r.m, r.n, r.expected), usize::from(!r.exact_match));
            if r.advisory {
                let note = r.note.clone().unwrap_or_else(|| format!("built {}", r.built));
                ch.advisory(&note)
            } else {
                ch
            }
        })
        .collect();
    out.push(Check::new(s, "entries", rpt.rows.len() as f64, Bound::Within([16.0, 16.0])));
    out.push(Check::new(s, "exact matches outside the advisory set", rpt.exact_pass as f64, Bound::Within([14.0, 14.0])));
    out
}

// ---------------------------------------------------------------------------

fn moebius() -> Vec<Check> {
    let s = Suite::Moebius;
    let map = MoebiusMatrix::new();
    let mut out: Vec<Check> = moebius_iteration_check(&map, 5).into_iter().map(|c| Check::exact(s, c.name, usize::from(!c.holds))).collect();
    for a in [None, Some(rat_int(1)), Some(rat_int(-1))] {
        out.extend(stereo_consistency_check(&map, a).into_iter().map(|c| Check::exact(s, c.name, usize::from(!c.holds))));
    }
    let variant = moebius_iteration_check(&MoebiusMatrix::with_rhat_denominator(), 2);
    let broken = variant.iter().filter(|c| !c.holds).count();
    out.push(
        Check::exact(s, "iteration with lower-left entry −εα²/(8R̂)", broken)
            .advisory("the R̂³ denominator is the one implied by the quotient relation"),
    );
    out
}

// ---------------------------------------------------------------------------

/// Worst symbolic-vs-quadrature deviation over all pairs `n1, n2 ≤ nmax`.
pub fn poisson_worst(nmax: i64, r: f64) -> Result<f64> {
    let labels: Vec<(i64, i64)> = (0..=nmax).flat_map(|n| (-n..=n).map(move |m| (n, m))).collect();
    let pairs: Vec<_> = labels.iter().flat_map(|a| labels.iter().map(move |b| (*a, *b))).collect();
    pairs
        .par_iter()
        .map(|&((n1, m1), (n2, m2))| commutator_limit_check(n1, m1, n2, m2, r).map(|x| x.max_abs_dev))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Worst matrix-sequence deviation over pairs `n1, n2 ≤ nmax` at spin `k`.
pub fn matrix_sequence_deviation(nmax: i64, k: HalfInt, r: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for n1 in 0..=nmax {
        for m1 in -n1..=n1 {
            for n2 in 0..=nmax {
                for m2 in -n2..=n2 {
                    worst = worst.max(matrix_limit_check(n1, m1, n2, m2, k, r)?.max_abs_dev);
                }
            }
        }
    }
    Ok(worst)
}

fn poisson(cfg: &SuiteConfig) -> Vec<Check> {
    let s = Suite::Poisson;
    let mut out = vec![];
    let nmax = cfg.n_max.min(3);
    out.push(or_error(
        s,
        "symbolic limit vs quadrature".into(),
        poisson_worst(nmax, 1.0).map(|v| Check::new(s, format!("symbolic limit vs quadrature, n1,n2 ≤ {nmax}"), v, Bound::AtMost(cfg.tol(1e-8)))),
    ));
    out.push(or_error(
        s,
        "bracket sign".into(),
        measure_poisson_sign(1, 0, 1, 1, 1.0).map(|(sg, _)| {
            let mut ch = Check::exact(s, "measured sign equals POISSON_SIGN", usize::from(sg != POISSON_SIGN));
            ch.note = Some(format!("lim (1/iε)[f,g] = {sg:+} {{f,g}} with J₊ = R sin θ e^{{iφ}}"));
            ch
        }),
    ));
    let d8 = matrix_sequence_deviation(2, HalfInt::int(8), 1.0);
    let d16 = matrix_sequence_deviation(2, HalfInt::int(16), 1.0);
    match (d8, d16) {
        (Ok(a), Ok(b)) => {
            let ratio = a / b;
            out.push(
                Check::new(s, "matrix-sequence deviation ratio k=8/k=16", ratio, Bound::Within([1.7, 2.3]))
                    .advisory("deviation is O(ε²) = O(1/k²); expected ratio (16·17)/(8·9) ≈ 3.78"),
            );
            let eps_sq = (16.0 * 17.0) / (8.0 * 9.0);
            out.push(Check::new(s, "matrix-sequence ratio / ε² ratio", ratio / eps_sq, Bound::Within([0.95, 1.05])));
        }
        (Err(e), _) | (_, Err(e)) => out.push(Check::error(s, "matrix sequence", &e)),
    }
    // antisymmetry and Leibniz at sampled points
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    let alg = Algebra::sphere();
    let (mut anti, mut leib) = (0.0f64, 0.0f64);
    for _ in 0..32 {
        let p = SpherePoint { theta: rng.random_range(0.05..3.09), phi: rng.random_range(0.0..6.28) };
        let pick = |rng: &mut StdRng| {
            let n = rng.random_range(0..=2i64);
            limit_poly(n, rng.random_range(-n..=n)).expect("label")
        };
        let (f, g, h) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let gh = alg.multiply(&g, &h).at_eps_zero();
        let (jf, jg, jh, jgh) = (eval_jet(&f, p, 1.0), eval_jet(&g, p, 1.0), eval_jet(&h, p, 1.0), eval_jet(&gh, p, 1.0));
        anti = anti.max((poisson_at(&jf, &jg, p, 1.0) + poisson_at(&jg, &jf, p, 1.0)).norm());
        let rhs = poisson_at(&jf, &jg, p, 1.0) * jh.f + jg.f * poisson_at(&jf, &jh, p, 1.0);
        leib = leib.max((poisson_at(&jf, &jgh, p, 1.0) - rhs).norm());
    }
    out.push(Check::new(s, "bracket antisymmetry (sampled)", anti, Bound::AtMost(cfg.tol(1e-12))));
    out.push(Check::new(s, "bracket Leibniz rule (sampled)", leib, Bound::AtMost(cfg.tol(1e-12))));
    out
}

// ---------------------------------------------------------------------------

/// Leibniz defect of `d` at spin `k` with `R = 1`: the largest bare defect
/// `‖d(fg) − d(f)g − f d(g)‖` and the largest defect relative to `‖d(fg)‖`,
/// over `f, g ∈ {Ψ(n,0,m) : 1 ≤ n ≤ 2}`.
pub fn leibniz_defect(k: i64) -> Result<(f64, f64)> {
    let kk = HalfInt::int(k);
    let eps = 1.0 / ((k * (k + 1)) as f64).sqrt();
    let (mut abs, mut rel) = (0.0f64, 0.0f64);
    let scalar = |n: i64, m: i64| PsiLabel::new(HalfInt::int(n), HalfInt::ZERO, HalfInt::int(m)).map(PsiField::basis);
    for n1 in 1..=2 {
        for m1 in -n1..=n1 {
            for n2 in 1..=2 {
                for m2 in -n2..=n2 {
                    let (f, g) = (scalar(n1, m1)?, scalar(n2, m2)?);
                    let fk = f.instantiate(kk, eps)?;
                    let gk = g.instantiate(kk, eps)?;
                    let whole = ext_d(&rho(&fk, &gk)?, eps)?;
                    let left = rho(&ext_d(&fk, eps)?, &gk)?;
                    let right = rho(&f.instantiate(kk - HalfInt::ONE, eps)?, &ext_d(&gk, eps)?)?;
                    let defect = whole.sub(&left)?.sub(&right)?.norm();
                    abs = abs.max(defect);
                    rel = rel.max(defect / whole.norm());
                }
            }
        }
    }
    Ok((abs, rel))
}

fn leibniz(_cfg: &SuiteConfig) -> Vec<Check> {
    let s = Suite::Leibniz;
    match (leibniz_defect(4), leibniz_defect(8)) {
        (Ok((a4, r4)), Ok((a8, r8))) => vec![
            Check::new(s, "bare defect ratio D(4)/D(8)", a4 / a8, Bound::Within([1.6, 2.4]))
                .advisory("d carries a factor ε, so the bare defect is O(ε²)"),
            Check::new(s, "relative defect ratio D(4)/D(8)", r4 / r8, Bound::Within([1.6, 2.4])),
            Check::new(s, "bare defect decreases", a4 - a8, Bound::AtLeast(0.0)),
        ],
        (Err(e), _) | (_, Err(e)) => vec![Check::error(s, "Leibniz defect", &e)],
    }
}

// ---------------------------------------------------------------------------

/// `max‖Σ x^m X_m‖` and `max‖Σ X_m x^m‖`, relative to the operand scale.
pub fn coordinate_annihilation(k: HalfInt, eps: f64) -> Result<f64> {
    let mut a = CMatrix::zeros(k.dim(), (k - HalfInt::ONE).dim());
    let mut b = a.clone();
    let mut scale = 0.0f64;
    for m in -1..=1 {
        let x = coordinate(k, m, eps)?;
        let xv = coordinate_vector(k, m, eps)?;
        a += &rho(&x, &xv)?.matrix;
        b += &rho(&xv, &coordinate(k - HalfInt::ONE, m, eps)?)?.matrix;
        scale = scale.max(max_abs(&x.matrix) * max_abs(&xv.matrix));
    }
    Ok(max_abs(&a).max(max_abs(&b)) / scale.max(1.0))
}

/// `π₀(g(X_i, X_j))` for `i, j ∈ {-1, 0, 1}` and the largest full element.
pub fn metric_table(k: HalfInt, eps: f64) -> Result<[[(Complex64, f64); 3]; 3]> {
    let mut out = [[(Complex64::default(), 0.0); 3]; 3];
    for i in -1..=1i64 {
        for j in -1..=1i64 {
            let g = metric(&coordinate_vector(k, i, eps)?, &coordinate_vector(k, j, eps)?)?;
            out[(i + 1) as usize][(j + 1) as usize] = (pi0(&g), max_abs(&g.matrix));
        }
    }
    Ok(out)
}

fn psi(cfg: &SuiteConfig) -> Vec<Check> {
    let s = Suite::Psi;
    let mut out = vec![];
    let tol = cfg.tol(1e-12);
    // trace norms and ladder construction
    let kmax = cfg.k_max.min(HalfInt::int(4));
    let (mut norm_dev, mut ladder_dev) = (0.0f64, 0.0f64);
    for k in (0..=kmax.twice()).map(HalfInt::from_twice) {
        for nt in 0..=4 {
            let n = HalfInt::from_twice(nt);
            for r in n.projections().filter(|r| !(k + *r).is_negative()) {
                let want = if triangle(k, n, k + r) { psi_norm(k, n, r, 0.8).map(|x| x * x).unwrap_or(f64::NAN) } else { 0.0 };
                for m in n.projections() {
                    let Ok(l) = PsiLabel::new(n, r, m) else { continue };
                    let (Ok(a), Ok(b)) = (build_psi(k, l, 0.8), ladder_psi(k, l, 0.8)) else {
                        norm_dev = f64::NAN;
                        continue;
                    };
                    norm_dev = norm_dev.max((a.inner(&a).map(|z| z.re).unwrap_or(f64::NAN) - want).abs() / want.max(1.0));
                    if max_abs(&b.matrix) > 0.0 {
                        ladder_dev = ladder_dev.max(rel_diff(&a.matrix, &b.matrix));
                    }
                }
            }
        }
    }
    out.push(Check::new(s, format!("field trace norms vs closed form, k ≤ {kmax}, n ≤ 2"), norm_dev, Bound::AtMost(cfg.tol(1e-10))));
    out.push(Check::new(s, format!("coupling build vs oscillator build, k ≤ {kmax}, n ≤ 2"), ladder_dev, Bound::AtMost(cfg.tol(1e-10))));
    // coordinates and metric
    let ks: Vec<HalfInt> = cfg.ks().into_iter().filter(|k| *k >= HalfInt::ONE).collect();
    let eps = 0.7;
    let mut annih = 0.0f64;
    let (mut diag_dev, mut off_pi0, mut delta_dev) = (0.0f64, 0.0f64, 0.0f64);
    let mut off_full = f64::INFINITY;
    for &k in &ks {
        annih = annih.max(coordinate_annihilation(k, eps).unwrap_or(f64::NAN));
        let kf = k.to_f64();
        let Ok(tab) = metric_table(k, eps) else {
            diag_dev = f64::NAN;
            continue;
        };
        for i in 0..3 {
            for j in 0..3 {
                let (p, full) = tab[i][j];
                let delta = if i == j { 1.0 } else { 0.0 };
                delta_dev = delta_dev.max((p - c(delta)).norm());
                if i == j {
                    let want = eps * kf * (2.0 * kf + 1.0) / (3.0 * (kf + 1.0));
                    diag_dev = diag_dev.max((p - c(want)).norm() / want.max(1.0));
                } else {
                    off_pi0 = off_pi0.max(p.norm());
                    // the base k-1 must carry weight |i-j|
                    if k.twice() - 2 >= 2 * (i as i64 - j as i64).abs() {
                        off_full = off_full.min(full);
                    }
                }
            }
        }
    }
    let krange = format!("1 ≤ k ≤ {}", cfg.k_max);
    out.push(Check::new(s, format!("Σ x^m X_m = Σ X_m x^m = 0, {krange}"), annih, Bound::AtMost(tol)));
    out.push(Check::new(s, format!("π₀ g(X_i,X_i) = εk(2k+1)/(3(k+1)), {krange}"), diag_dev, Bound::AtMost(tol)));
    out.push(Check::new(s, format!("π₀ g(X_i,X_j) = 0 for i ≠ j, {krange}"), off_pi0, Bound::AtMost(tol)));
    out.push(
        Check::new(s, format!("π₀ g(X_i,X_j) = δ_ij, {krange}"), delta_dev, Bound::AtMost(cfg.tol(1e-10)))
            .advisory("the diagonal is εk(2k+1)/(3(k+1)) under the stated normalisation"),
    );
    if off_full.is_finite() {
        out.push(Check::new(s, "off-diagonal g(X_i,X_j) full elements nonzero", off_full, Bound::AtLeast(1e-6)));
    }
    // nonassociativity
    let k = HalfInt::int(2);
    let witness = (|| -> Result<f64> {
        let a = PsiField::basis(PsiLabel::new(HalfInt::ONE, HalfInt::ZERO, HalfInt::ONE)?);
        let b = PsiField::basis(PsiLabel::new(HalfInt::ONE, HalfInt::ONE, HalfInt::ZERO)?);
        let half = HalfInt::from_twice(1);
        let cf = PsiField::basis(PsiLabel::new(half, half, half)?);
        associativity_defect(&a, &b, &cf, k, 1.0)
    })();
    out.push(or_error(s, "nonassociativity witness".into(), witness.map(|v| Check::new(s, "nonassociativity witness at k=2", v, Bound::AtLeast(1e-6)))));
    out
}

// ---------------------------------------------------------------------------

/// Largest `|phase − (−1)^{2r}|` over `n ≤ 2` at spin `k`.
pub fn rotation_deviation(k: HalfInt) -> Result<f64> {
    let mut worst = 0.0f64;
    for nt in 0..=4 {
        let n = HalfInt::from_twice(nt);
        for r in n.projections().filter(|r| !(k + *r).is_negative()) {
            for m in n.projections() {
                let l = PsiLabel::new(n, r, m)?;
                if let Some(p) = rotation_phase(&build_psi(k, l, 1.0)?) {
                    worst = worst.max((p - c(rotation_sign(l) as f64)).norm());
                }
            }
        }
    }
    Ok(worst)
}

fn rotation(cfg: &SuiteConfig) -> Vec<Check> {
    let s = Suite::RotationSign;
    let mut ks = vec![HalfInt::int(1), HalfInt::from_twice(3), HalfInt::int(2)];
    ks.retain(|k| *k <= cfg.k_max.max(HalfInt::int(2)));
    ks.into_iter()
        .map(|k| {
            let name = format!("k={k} rotation by 2π gives (−1)^{{2r}}");
            or_error(s, name.clone(), rotation_deviation(k).map(|v| Check::new(s, name, v, Bound::AtMost(cfg.tol(1e-12)))))
        })
        .collect()
}
