//! Commutative limit: functions on the sphere, the Poisson bracket as the
//! first-order commutator, and the stereographic Möbius map.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::matrep::{make_rep, norm_closed_form, trace_form, Rep};
use crate::poly::MPoly;
use crate::surd::{rat, rat_int, CSurd, Coeff};
use crate::symalg::{Algebra, ExactScalar, NormalForm};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::Parse(format!("θ = {theta} outside [0, π]")));
        }
        if !(0.0..2.0 * std::f64::consts::PI).contains(&phi) {
            return Err(Error::Parse(format!("φ = {phi} outside [0, 2π)")));
        }
        Ok(SpherePoint { theta, phi })
    }
}

/// Value and first derivatives in `θ` and `φ`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Jet {
    pub f: Complex64,
    pub d_theta: Complex64,
    pub d_phi: Complex64,
}

/// `p(z)` and `p'(z)` at `ε = 0`.
fn eval_z(p: &MPoly<CSurd, 3>, z: f64, r: f64) -> (Complex64, Complex64) {
    let (mut v, mut dv) = (c(0.0), c(0.0));
    for (e, cf) in p.terms() {
        if e[1] != 0 {
            continue;
        }
        let k = cf.to_c64() * r.powi(e[2] as i32);
        v += k * z.powi(e[0] as i32);
        if e[0] > 0 {
            dv += k * (e[0] as f64) * z.powi(e[0] as i32 - 1);
        }
    }
    (v, dv)
}

/// `f` at `ε = 0` with `z = R cos θ`, `J± = R sin θ e^{±iφ}`.
pub fn eval_jet(f: &NormalForm, p: SpherePoint, r: f64) -> Jet {
    let z = r * p.theta.cos();
    let rho = r * p.theta.sin();
    let mut out = Jet::default();
    for (s, poly) in f.terms() {
        let (u, du) = eval_z(poly, z, r);
        let a = s.unsigned_abs() as i32;
        let w = Complex64::from_polar(1.0, s as f64 * p.phi);
        let t = u * rho.powi(a) * w;
        out.f += t;
        // d/dθ: z' = -ρ, ρ' = z
        let mut dt = -du * rho * rho.powi(a);
        if a > 0 {
            dt += u * (a as f64) * rho.powi(a - 1) * z;
        }
        out.d_theta += dt * w;
        out.d_phi += t * Complex64::new(0.0, s as f64);
    }
    out
}

pub fn eval_on_sphere(f: &NormalForm, p: SpherePoint, r: f64) -> Complex64 {
    eval_jet(f, p, r).f
}

/// `{f,g} = (1/(R sin θ))(∂_φf ∂_θg − ∂_θf ∂_φg)` from two jets.
pub fn poisson_at(f: &Jet, g: &Jet, p: SpherePoint, r: f64) -> Complex64 {
    (f.d_phi * g.d_theta - f.d_theta * g.d_phi) / c(r * p.theta.sin())
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` from the eigenvalues of
/// the Jacobi matrix.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let mut jac = DMatrix::<f64>::zeros(order, order);
    for i in 1..order {
        let b = i as f64 / ((4 * i * i - 1) as f64).sqrt();
        jac[(i, i - 1)] = b;
        jac[(i - 1, i)] = b;
    }
    let eig = jac.symmetric_eigen();
    let mut out: Vec<(f64, f64)> = (0..order).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Product grid with weights normalised to `(1/4π)∫ dΩ`.
#[derive(Clone, Debug)]
pub struct SphereQuadrature {
    pub points: Vec<(SpherePoint, f64)>,
}

impl SphereQuadrature {
    pub fn new(n_theta: usize, n_phi: usize) -> Self {
        let mut points = Vec::with_capacity(n_theta * n_phi);
        for (t, w) in gauss_legendre(n_theta) {
            for j in 0..n_phi {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
                points.push((SpherePoint { theta: t.acos(), phi }, w / (2.0 * n_phi as f64)));
            }
        }
        SphereQuadrature { points }
    }

    /// Orders `2·nmax+8` in `cos θ` and `4·nmax+8` in `φ`.
    pub fn for_degree(nmax: i64) -> Self {
        let n = nmax.max(0) as usize;
        Self::new(2 * n + 8, 4 * n + 8)
    }

    pub fn integrate(&self, f: impl Fn(SpherePoint) -> Complex64) -> Complex64 {
        self.points.iter().map(|(p, w)| f(*p) * *w).sum()
    }
}

/// `π₀(f̄ g)` at `ε = 0` by quadrature.
pub fn quad_inner(f: &NormalForm, g: &NormalForm, r: f64, grid: &SphereQuadrature) -> Complex64 {
    grid.integrate(|p| eval_on_sphere(f, p, r).conj() * eval_on_sphere(g, p, r))
}

/// Numeric coefficients over `P^m_n` keyed by `(n, m)`.
pub type NumericCoeffs = BTreeMap<(i64, i64), Complex64>;

fn bracket_coeffs_on(f: &NormalForm, g: &NormalForm, nmax: i64, r: f64, grid: &SphereQuadrature) -> Result<NumericCoeffs> {
    let alg = Algebra::sphere();
    let (f0, g0) = (f.at_eps_zero(), g.at_eps_zero());
    let mut out = NumericCoeffs::new();
    for n in 0..=nmax {
        let norm = norm_closed_form(n, 0.0, r * r);
        for m in -n..=n {
            let p = alg.build_pmn(n, m)?.at_eps_zero();
            let v = grid.integrate(|pt| {
                let b = poisson_at(&eval_jet(&f0, pt, r), &eval_jet(&g0, pt, r), pt, r);
                eval_on_sphere(&p, pt, r).conj() * b
            });
            out.insert((n, m), v / c(norm));
        }
    }
    Ok(out)
}

/// Coefficients of `{P^{m1}_{n1}, P^{m2}_{n2}}` over the `ε = 0` basis for
/// all `(n, m)` with `n ≤ n1+n2`, by quadrature; rerun at a higher order
/// and flagged if the two disagree beyond `1e-10`.
pub fn poisson_bracket_coeffs(n1: i64, m1: i64, n2: i64, m2: i64, r: f64) -> Result<NumericCoeffs> {
    let alg = Algebra::sphere();
    let f = alg.build_pmn(n1, m1)?;
    let g = alg.build_pmn(n2, m2)?;
    let nmax = n1 + n2;
    let a = bracket_coeffs_on(&f, &g, nmax, r, &SphereQuadrature::for_degree(nmax))?;
    let b = bracket_coeffs_on(&f, &g, nmax, r, &SphereQuadrature::for_degree(nmax + 2))?;
    let dev = max_dev(&a, &b);
    let scale = a.values().map(|v| v.norm()).fold(1.0, f64::max);
    if dev > 1e-10 * scale {
        return Err(Error::Quadrature(format!("orders disagree by {dev:e}")));
    }
    Ok(a)
}

/// Exact `ε → 0` limit of `(1/(iε))[P^{m1}_{n1}, P^{m2}_{n2}]` in the basis,
/// as polynomials in `R`.
pub fn symbolic_limit_coeffs(n1: i64, m1: i64, n2: i64, m2: i64) -> Result<BTreeMap<(i64, i64), ExactScalar>> {
    let alg = Algebra::sphere();
    let comm = alg.commutator(&alg.build_pmn(n1, m1)?, &alg.build_pmn(n2, m2)?);
    let q = comm
        .div_eps_pow(1)
        .ok_or_else(|| Error::NotInvertible("commutator not divisible by ε".into()))?;
    let minus_i = CSurd::i().neg_c();
    let coeffs = alg.expand_in_basis(&q, n1 + n2)?;
    Ok(coeffs.into_iter().map(|(key, v)| (key, v.scale(&minus_i).set_zero(0))).collect())
}

/// Overall sign relating the commutator limit to the bracket above,
/// with `J₊ = R sin θ e^{iφ}`: `lim (1/(iε))[f,g] = POISSON_SIGN · {f,g}`.
pub const POISSON_SIGN: f64 = -1.0;

fn max_dev(a: &NumericCoeffs, b: &NumericCoeffs) -> f64 {
    let mut keys: Vec<_> = a.keys().chain(b.keys()).copied().collect();
    keys.sort();
    keys.dedup();
    keys.iter()
        .map(|k| (a.get(k).copied().unwrap_or_default() - b.get(k).copied().unwrap_or_default()).norm())
        .fold(0.0, f64::max)
}

fn eval_limit(sym: &BTreeMap<(i64, i64), ExactScalar>, r: f64) -> NumericCoeffs {
    sym.iter().map(|(k, v)| (*k, v.eval_real(&[0.0, r]))).collect()
}

/// `{"pair":[n1,m1,n2,m2],"max_abs_dev":float,"method":"symbolic|quadrature|matrix"}`
#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub pair: [i64; 4],
    pub max_abs_dev: f64,
    pub method: String,
}

/// Sign `s` minimising `max|symbolic − s·quadrature|`, with that deviation.
pub fn measure_poisson_sign(n1: i64, m1: i64, n2: i64, m2: i64, r: f64) -> Result<(f64, f64)> {
    let sym = eval_limit(&symbolic_limit_coeffs(n1, m1, n2, m2)?, r);
    let quad = poisson_bracket_coeffs(n1, m1, n2, m2, r)?;
    let scaled = |s: f64| -> NumericCoeffs { quad.iter().map(|(k, v)| (*k, v * c(s))).collect() };
    let (dp, dm) = (max_dev(&sym, &scaled(1.0)), max_dev(&sym, &scaled(-1.0)));
    Ok(if dp <= dm { (1.0, dp) } else { (-1.0, dm) })
}

/// Symbolic limit against `POISSON_SIGN ×` the quadrature bracket.
pub fn commutator_limit_check(n1: i64, m1: i64, n2: i64, m2: i64, r: f64) -> Result<LimitReport> {
    let sym = eval_limit(&symbolic_limit_coeffs(n1, m1, n2, m2)?, r);
    let quad: NumericCoeffs = poisson_bracket_coeffs(n1, m1, n2, m2, r)?
        .into_iter()
        .map(|(k, v)| (k, v * c(POISSON_SIGN)))
        .collect();
    Ok(LimitReport { pair: [n1, m1, n2, m2], max_abs_dev: max_dev(&sym, &quad), method: "symbolic".into() })
}

/// Coefficients of `(1/(iε))[P^{m1}_{n1}, P^{m2}_{n2}]` in the spin-`k`
/// representation at fixed `R`, `ε = R/√(k(k+1))`, against the exact limit.
pub fn matrix_limit_check(n1: i64, m1: i64, n2: i64, m2: i64, k: HalfInt, r: f64) -> Result<LimitReport> {
    let kf = k.to_f64();
    let eps = r / (kf * (kf + 1.0)).sqrt();
    let rep = make_rep(k, eps)?;
    let sym = eval_limit(&symbolic_limit_coeffs(n1, m1, n2, m2)?, r);
    let a = rep.pmn_matrix(n1, m1)?;
    let b = rep.pmn_matrix(n2, m2)?;
    let comm = Rep::comm(&a, &b) / Complex64::new(0.0, eps);
    let mut got = NumericCoeffs::new();
    for n in 0..=(n1 + n2).min(k.twice()) {
        for m in -n..=n {
            let p = rep.pmn_matrix(n, m)?;
            got.insert((n, m), trace_form(&p, &comm) / c(rep.norm_sq(n)));
        }
    }
    Ok(LimitReport { pair: [n1, m1, n2, m2], max_abs_dev: max_dev(&sym, &got), method: "matrix".into() })
}

// ---------------------------------------------------------------------------
// Möbius map and stereographic projection

/// Variables of the stereographic identities: `ε, R̂, α², x`.
pub const SE: usize = 0;
pub const SR: usize = 1;
pub const SA: usize = 2;
pub const SX: usize = 3;

pub type RPoly = MPoly<BigRational, 4>;

fn v(i: usize) -> RPoly {
    RPoly::var(i)
}

fn k(q: BigRational) -> RPoly {
    RPoly::constant(q)
}

fn ki(n: i64) -> RPoly {
    k(rat_int(n))
}

/// Numeric parameters of `ρ`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MoebiusParams {
    pub epsilon: f64,
    pub rhat: f64,
    pub alpha_sq: f64,
}

/// `ρ(x) = ((1+ε/2R̂)x + 2εR̂/α²) / ((−εα²/8R̂³)x + (1−ε/2R̂))`
pub fn moebius(p: MoebiusParams, x: f64) -> Result<f64> {
    let num = (1.0 + p.epsilon / (2.0 * p.rhat)) * x + 2.0 * p.epsilon * p.rhat / p.alpha_sq;
    let den = (-p.epsilon * p.alpha_sq / (8.0 * p.rhat.powi(3))) * x + (1.0 - p.epsilon / (2.0 * p.rhat));
    if den == 0.0 || !den.is_finite() {
        return Err(Error::Pole);
    }
    Ok(num / den)
}

/// `ρ` as a matrix `[[a, b], [c, d]]`, `ρ(x) = (ax+b)/(cx+d)`, with
/// entries over `(ε, R̂, α²)` scaled by `8R̂³α²`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusMatrix {
    pub a: RPoly,
    pub b: RPoly,
    pub c: RPoly,
    pub d: RPoly,
}

impl MoebiusMatrix {
    pub fn new() -> Self {
        let (e, r, al) = (v(SE), v(SR), v(SA));
        let r2 = r.mul(&r);
        let r3 = r2.mul(&r);
        let base = r3.mul(&al).scale(&rat_int(8));
        let half = e.mul(&r2).mul(&al).scale(&rat_int(4));
        MoebiusMatrix {
            a: base.add(&half),
            b: e.mul(&r2).mul(&r2).scale(&rat_int(16)),
            c: e.mul(&al).mul(&al).neg(),
            d: base.sub(&half),
        }
    }

    /// The same map with lower-left entry `−εα²/(8R̂)`; fails the group law.
    pub fn with_rhat_denominator() -> Self {
        let mut m = Self::new();
        let r = v(SR);
        m.c = m.c.mul(&r.mul(&r));
        m
    }

    /// `ε ↦ s·ε`.
    pub fn with_epsilon(&self, s: &RPoly) -> Self {
        let f = |p: &RPoly| p.substitute(SE, s);
        MoebiusMatrix { a: f(&self.a), b: f(&self.b), c: f(&self.c), d: f(&self.d) }
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Self) -> Self {
        MoebiusMatrix {
            a: self.a.mul(&o.a).add(&self.b.mul(&o.c)),
            b: self.a.mul(&o.b).add(&self.b.mul(&o.d)),
            c: self.c.mul(&o.a).add(&self.d.mul(&o.c)),
            d: self.c.mul(&o.b).add(&self.d.mul(&o.d)),
        }
    }

    /// Numerator and denominator as polynomials in `x`.
    pub fn apply(&self, x: &RPoly) -> (RPoly, RPoly) {
        (self.a.mul(x).add(&self.b), self.c.mul(x).add(&self.d))
    }
}

impl Default for MoebiusMatrix {
    fn default() -> Self {
        Self::new()
    }
}

/// `N₁/D₁ = N₂/D₂` by cross-multiplication.
fn same_fraction(a: &(RPoly, RPoly), b: &(RPoly, RPoly)) -> bool {
    a.0.mul(&b.1) == b.0.mul(&a.1)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

fn check(name: impl Into<String>, holds: bool) -> IdentityCheck {
    IdentityCheck { name: name.into(), holds }
}

/// `ρⁿ(ε, x) = ρ(nε, x)` for `1 ≤ n ≤ nmax`, and `ρ(ε) ∘ ρ(−ε) = id`.
pub fn moebius_iteration_check(map: &MoebiusMatrix, nmax: u32) -> Vec<IdentityCheck> {
    let x = v(SX);
    let mut out = vec![];
    let mut iter = map.clone();
    for n in 1..=nmax {
        if n > 1 {
            iter = map.compose(&iter);
        }
        let target = map.with_epsilon(&v(SE).scale(&rat_int(n as i64)));
        out.push(check(format!("iterate n={n}"), same_fraction(&iter.apply(&x), &target.apply(&x))));
    }
    let inv = map.compose(&map.with_epsilon(&v(SE).neg()));
    out.push(check("inverse ε, −ε", same_fraction(&inv.apply(&x), &(x.clone(), ki(1)))));
    let zero = map.with_epsilon(&RPoly::zero());
    out.push(check("identity at ε=0", same_fraction(&zero.apply(&x), &(x, ki(1)))));
    out
}

/// Rational function in `(ε, R̂, α², x)` as numerator over denominator.
#[derive(Clone, Debug)]
struct Frac(RPoly, RPoly);

impl Frac {
    fn poly(p: RPoly) -> Self {
        Frac(p, ki(1))
    }
    fn add(&self, o: &Frac) -> Frac {
        if self.1 == o.1 {
            return Frac(self.0.add(&o.0), self.1.clone());
        }
        Frac(self.0.mul(&o.1).add(&o.0.mul(&self.1)), self.1.mul(&o.1))
    }
    fn neg(&self) -> Frac {
        Frac(self.0.neg(), self.1.clone())
    }
    fn sub(&self, o: &Frac) -> Frac {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Frac) -> Frac {
        Frac(self.0.mul(&o.0), self.1.mul(&o.1))
    }
    fn eq(&self, o: &Frac) -> bool {
        self.0.mul(&o.1) == o.0.mul(&self.1)
    }
    fn at(&self, i: usize, val: &RPoly) -> Frac {
        Frac(self.0.substitute(i, val), self.1.substitute(i, val))
    }
}

/// `F(x) = 4R̂²α²/(4R̂²+α²x)`
fn stereo_factor(x: &Frac) -> Frac {
    let r2 = v(SR).mul(&v(SR));
    let num = r2.mul(&v(SA)).scale(&rat_int(4));
    let den = Frac::poly(r2.scale(&rat_int(4))).add(&Frac::poly(v(SA)).mul(x));
    Frac(num.mul(&den.1), den.0)
}

/// `J₀(x) = R̂(4R̂²−α²x)/(4R̂²+α²x) − ε/2`
fn stereo_j0(x: &Frac) -> Frac {
    let r = v(SR);
    let r2 = r.mul(&r).scale(&rat_int(4));
    let ax = Frac::poly(v(SA)).mul(x);
    let num = Frac::poly(r2.clone()).sub(&ax).mul(&Frac::poly(r));
    let den = Frac::poly(r2).add(&ax);
    Frac(num.0.mul(&den.1), num.1.mul(&den.0)).sub(&Frac::poly(v(SE).scale(&rat(1, 2))))
}

/// Identities tying the stereographic algebra to the sphere algebra:
///
/// * the quotient relation `zz̄ − z̄z ∼ −ε/(8R̂³α²)(4R̂²+α²zz̄)(4R̂²+α²z̄z)`
///   is solved by `z̄z = ρ(zz̄)`;
/// * at `ε = 0`, `J₀² + (J₊J₋+J₋J₊)/(2α²) = R̂²`;
/// * for all `ε`, with `x = zz̄`, `y = z̄z = ρ(x)` and `R² = R̂² − ε²/4`:
///   `J₋J₊ = F(x)²x = α²(R² − J₀² − εJ₀)`,
///   `J₊J₋ = F(y)²y = α²(R² − J₀² + εJ₀)`, and `J₀(x) − J₀(y) = ε`
///   (equivalent to `[J₀, J₊] = εJ₊`).
///
/// `alpha_sq = None` keeps `α²` symbolic.
pub fn stereo_consistency_check(map: &MoebiusMatrix, alpha_sq: Option<BigRational>) -> Vec<IdentityCheck> {
    let at_alpha = |f: Frac| match &alpha_sq {
        Some(a) => f.at(SA, &k(a.clone())),
        None => f,
    };
    let label = match &alpha_sq {
        Some(a) => format!(" (α²={a})"),
        None => String::new(),
    };
    let (e, r, al) = (v(SE), v(SR), v(SA));
    let x = Frac::poly(v(SX));
    let (yn, yd) = map.apply(&v(SX));
    let y = Frac(yn, yd);
    let r2 = r.mul(&r);
    let mut out = vec![];

    // quotient relation, multiplied through by 8R̂³α²
    let lhs = x.sub(&y).mul(&Frac::poly(r2.mul(&r).mul(&al).scale(&rat_int(8))));
    let four_r2 = Frac::poly(r2.scale(&rat_int(4)));
    let rhs = four_r2
        .add(&Frac::poly(al.clone()).mul(&x))
        .mul(&four_r2.add(&Frac::poly(al.clone()).mul(&y)))
        .mul(&Frac::poly(e.neg()));
    out.push(check(format!("quotient relation ⇔ z̄z = ρ(zz̄){label}"), at_alpha(lhs).eq(&at_alpha(rhs))));

    // ε = 0 Casimir
    let zero = RPoly::zero();
    let j0 = stereo_j0(&x).at(SE, &zero);
    let f2x = stereo_factor(&x).mul(&stereo_factor(&x)).mul(&x);
    let inv_two_alpha = Frac(ki(1), al.scale(&rat_int(2)));
    let cas = j0.mul(&j0).add(&f2x.add(&f2x).mul(&inv_two_alpha));
    out.push(check(format!("ε=0 Casimir = R̂²{label}"), at_alpha(cas).eq(&at_alpha(Frac::poly(r2.clone())))));

    // full relations at symbolic ε
    let rsq = Frac::poly(r2.sub(&e.mul(&e).scale(&rat(1, 4))));
    let j0 = stereo_j0(&x);
    let eps = Frac::poly(e.clone());
    let alpha = Frac::poly(al.clone());
    let jm_jp = stereo_factor(&x).mul(&stereo_factor(&x)).mul(&x);
    let want = alpha.mul(&rsq.sub(&j0.mul(&j0)).sub(&eps.mul(&j0)));
    out.push(check(format!("J₋J₊ = α²(R² − J₀² − εJ₀){label}"), at_alpha(jm_jp).eq(&at_alpha(want))));
    let jp_jm = stereo_factor(&y).mul(&stereo_factor(&y)).mul(&y);
    let want = alpha.mul(&rsq.sub(&j0.mul(&j0)).add(&eps.mul(&j0)));
    out.push(check(format!("J₊J₋ = α²(R² − J₀² + εJ₀){label}"), at_alpha(jp_jm).eq(&at_alpha(want))));
    let shift = j0.sub(&stereo_j0(&y));
    out.push(check(format!("J₀(zz̄) − J₀(z̄z) = ε{label}"), at_alpha(shift).eq(&at_alpha(eps))));
    out
}

/// `J₀ = R cos θ`, `J± = R sin θ e^{±iφ}` at a point.
pub fn sphere_generators(p: SpherePoint, r: f64) -> [Complex64; 3] {
    let rho = r * p.theta.sin();
    [c(r * p.theta.cos()), Complex64::from_polar(rho, p.phi), Complex64::from_polar(rho, -p.phi)]
}

/// `z`-polynomial of `P^m_n` at `ε = 0` exposed for reports.
pub fn limit_poly(n: i64, m: i64) -> Result<NormalForm> {
    Ok(Algebra::sphere().build_pmn(n, m)?.at_eps_zero())
}
