//! Fields `Ψ(n, r, m)` as rectangular Wigner operators `V_k → V_{k+r}`.
//!
//! `r = 0` fields are the scalar basis `P^m_n`; `r = ±1` are vectors and
//! covectors, half-integer `r` spinors. The product `ρ` is composition of
//! operators at matching bases; on abstract coefficient fields it depends on
//! the base, which is what makes it nonassociative.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::coefficients::{clebsch_gordan, factorial, triangle};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::matrep::{make_rep, trace_form, CMatrix};
use crate::surd::rat_to_f64;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PsiLabel {
    pub n: HalfInt,
    pub r: HalfInt,
    pub m: HalfInt,
}

impl PsiLabel {
    pub fn new(n: HalfInt, r: HalfInt, m: HalfInt) -> Result<Self> {
        let l = PsiLabel { n, r, m };
        if l.is_valid() {
            Ok(l)
        } else {
            Err(Error::InvalidPsiLabel { n, r, m })
        }
    }

    pub fn is_valid(&self) -> bool {
        !self.n.is_negative()
            && self.r.abs() <= self.n
            && self.m.abs() <= self.n
            && (self.n - self.r).is_integer()
            && (self.n - self.m).is_integer()
    }

    /// All valid labels with `n ≤ nmax` and shift `r`.
    pub fn all_with_r(r: HalfInt, nmax: HalfInt) -> Vec<PsiLabel> {
        let mut out = Vec::new();
        let mut n = r.abs();
        while n <= nmax {
            for m in n.projections() {
                out.push(PsiLabel { n, r, m });
            }
            n = n + HalfInt::ONE;
        }
        out
    }
}

/// Operator `V_k → V_{k+r}` with optional basis label.
#[derive(Clone, Debug)]
pub struct PsiOp {
    pub base_k: HalfInt,
    pub r: HalfInt,
    pub label: Option<PsiLabel>,
    pub matrix: CMatrix,
}

impl PsiOp {
    pub fn target_k(&self) -> HalfInt {
        self.base_k + self.r
    }

    pub fn unlabeled(base_k: HalfInt, r: HalfInt, matrix: CMatrix) -> Self {
        PsiOp { base_k, r, label: None, matrix }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    pub fn dagger(&self) -> PsiOp {
        PsiOp {
            base_k: self.target_k(),
            r: -self.r,
            label: self.label.map(|l| PsiLabel { n: l.n, r: -l.r, m: -l.m }),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, s: Complex64) -> PsiOp {
        PsiOp { label: None, matrix: &self.matrix * s, ..self.clone() }
    }

    pub fn add(&self, o: &PsiOp) -> Result<PsiOp> {
        self.same_space(o)?;
        Ok(PsiOp::unlabeled(self.base_k, self.r, &self.matrix + &o.matrix))
    }

    pub fn sub(&self, o: &PsiOp) -> Result<PsiOp> {
        self.same_space(o)?;
        Ok(PsiOp::unlabeled(self.base_k, self.r, &self.matrix - &o.matrix))
    }

    fn same_space(&self, o: &PsiOp) -> Result<()> {
        if self.base_k != o.base_k || self.r != o.r {
            return Err(Error::BaseMismatch { left: self.base_k, right: o.base_k });
        }
        Ok(())
    }

    /// `(1/(2k+1)) Tr(a†b)` over the source space.
    pub fn inner(&self, o: &PsiOp) -> Result<Complex64> {
        self.same_space(o)?;
        Ok(trace_form(&self.matrix, &o.matrix))
    }

    pub fn norm(&self) -> f64 {
        trace_form(&self.matrix, &self.matrix).re.max(0.0).sqrt()
    }
}

fn check_base(k: HalfInt, l: &PsiLabel) -> Result<()> {
    if !l.is_valid() {
        return Err(Error::InvalidPsiLabel { n: l.n, r: l.r, m: l.m });
    }
    if k.is_negative() {
        return Err(Error::NegativeSpin(k));
    }
    if (k + l.r).is_negative() {
        return Err(Error::NegativeSpin(k + l.r));
    }
    Ok(())
}

/// Wigner operator with elements `⟨k+r, j+m| U |k, j⟩ = CG(k, n, k+r; j, m, j+m)`.
/// Couplings that violate the triangle rule give the zero operator.
pub fn unit_tensor(k: HalfInt, label: PsiLabel) -> Result<PsiOp> {
    check_base(k, &label)?;
    let kt = k + label.r;
    let mut mat = CMatrix::zeros(kt.dim(), k.dim());
    if triangle(k, label.n, kt) {
        for (col, j) in k.projections().enumerate() {
            let jt = j + label.m;
            if jt.abs() > kt {
                continue;
            }
            let row = ((kt - jt).twice() / 2) as usize;
            mat[(row, col)] = c(clebsch_gordan(k, label.n, kt, j, label.m, jt).to_f64());
        }
    }
    Ok(PsiOp { base_k: k, r: label.r, label: Some(label), matrix: mat })
}

/// Frobenius-normalised unit tensor.
pub fn unit_tensor_normalized(k: HalfInt, label: PsiLabel) -> Result<PsiOp> {
    let u = unit_tensor(k, label)?;
    let f = u.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if f == 0.0 {
        return Ok(u);
    }
    Ok(PsiOp { matrix: &u.matrix / c(f), ..u })
}

/// `‖Ψ(n,r,·)‖²_k / ε^{2n}` as an exact rational:
///
/// ```text
/// (n+r)!(n-r)!/(2n+1)! · ∏_{p=1}^{n+r} (2k+1+p) · ∏_{p=1}^{n-r} (2k+1-p)
/// ```
///
/// At `r = 0` this is the scalar norm with `4R²/ε² + 1 = (2k+1)²`.
pub fn psi_norm_sq_unit(k: HalfInt, n: HalfInt, r: HalfInt) -> Result<BigRational> {
    let l = PsiLabel { n, r, m: n };
    check_base(k, &l)?;
    let np = (n + r).as_integer().unwrap();
    let nm = (n - r).as_integer().unwrap();
    let tn = n.twice();
    let d = k.twice() + 1;
    let mut q = BigRational::new(factorial(np) * factorial(nm), factorial(tn + 1));
    for p in 1..=np {
        q *= BigRational::from_integer(BigInt::from(d + p));
    }
    for p in 1..=nm {
        q *= BigRational::from_integer(BigInt::from(d - p));
    }
    Ok(q)
}

/// `‖Ψ(n,r,·)‖_k` at deformation `ε`.
pub fn psi_norm(k: HalfInt, n: HalfInt, r: HalfInt, epsilon: f64) -> Result<f64> {
    let q = psi_norm_sq_unit(k, n, r)?;
    Ok(rat_to_f64(&q).sqrt() * epsilon.abs().powf(n.to_f64()))
}

/// Cached `‖Ψ(n,r,·)‖_k` values at fixed `ε`.
#[derive(Clone, Debug, Default)]
pub struct PsiNormTable {
    pub epsilon: f64,
    pub entries: BTreeMap<(HalfInt, HalfInt, HalfInt), f64>,
}

impl PsiNormTable {
    pub fn build(kmax: HalfInt, nmax: HalfInt, epsilon: f64) -> Self {
        let mut entries = BTreeMap::new();
        for kt in 0..=kmax.twice() {
            let k = HalfInt::from_twice(kt);
            for nt in 0..=nmax.twice() {
                let n = HalfInt::from_twice(nt);
                for r in n.projections() {
                    if let Ok(v) = psi_norm(k, n, r, epsilon) {
                        entries.insert((k, n, r), v);
                    }
                }
            }
        }
        PsiNormTable { epsilon, entries }
    }

    pub fn get(&self, k: HalfInt, n: HalfInt, r: HalfInt) -> Option<f64> {
        self.entries.get(&(k, n, r)).copied()
    }
}

/// `Ψ(n,r,m) = (-1)^{n-r} ‖Ψ‖_k √(2n+1) √(2k+1) / √(2k+2r+1) · U`
pub fn build_psi(k: HalfInt, label: PsiLabel, epsilon: f64) -> Result<PsiOp> {
    let u = unit_tensor(k, label)?;
    let norm = psi_norm(k, label.n, label.r, epsilon)?;
    let sign = (label.n - label.r).parity_sign().unwrap() as f64;
    let dn = label.n.dim() as f64;
    let dk = k.dim() as f64;
    let dkr = (k + label.r).dim() as f64;
    let pref = sign * norm * (dn * dk / dkr).sqrt();
    Ok(PsiOp { matrix: &u.matrix * c(pref), ..u })
}

/// Independent construction from two oscillators `a±, b±` with
/// `[a₋, a₊] = [b₋, b₊] = ε`, `J₊ = a₊b₋`, `J₋ = a₋b₊`: the top component is
/// `a₊^{n+r} b₋^{n-r}` and the rest follow by the lowering used for `P^m_n`.
pub fn ladder_psi(k: HalfInt, label: PsiLabel, epsilon: f64) -> Result<PsiOp> {
    check_base(k, &label)?;
    let (n, r, m) = (label.n, label.r, label.m);
    let kt = k + r;
    let up = (n + r).as_integer().unwrap();
    let down = (n - r).as_integer().unwrap();
    let mut top = CMatrix::zeros(kt.dim(), k.dim());
    for (col, j) in k.projections().enumerate() {
        let na = (k + j).as_integer().unwrap();
        let nb = (k - j).as_integer().unwrap();
        if nb < down {
            continue;
        }
        let jt = j + n;
        if jt.abs() > kt {
            continue;
        }
        let mut coef = 1.0f64;
        for t in 1..=up {
            coef *= epsilon * (na + t) as f64;
        }
        for t in 0..down {
            coef *= epsilon * (nb - t) as f64;
        }
        let row = ((kt - jt).twice() / 2) as usize;
        top[(row, col)] = c(coef.sqrt());
    }
    let src = make_rep(k, epsilon)?;
    let dst = make_rep(kt, epsilon)?;
    let steps = (n - m).as_integer().unwrap();
    let mut g = top;
    for _ in 0..steps {
        g = (&dst.jm * &g - &g * &src.jm) * c(1.0 / epsilon);
    }
    let npm = (n + m).as_integer().unwrap();
    let nmm = (n - m).as_integer().unwrap();
    let c2 = BigRational::new(factorial(npm), factorial(n.twice()) * factorial(nmm));
    Ok(PsiOp { base_k: k, r, label: Some(label), matrix: g * c(rat_to_f64(&c2).sqrt()) })
}

/// `ρ(a, b) = a ∘ b`; requires `a` based where `b` lands.
pub fn rho(a: &PsiOp, b: &PsiOp) -> Result<PsiOp> {
    if a.base_k != b.target_k() {
        return Err(Error::BaseMismatch { left: a.base_k, right: b.target_k() });
    }
    Ok(PsiOp::unlabeled(b.base_k, a.r + b.r, &a.matrix * &b.matrix))
}

/// `[a, f] = a∘f - f∘a` for `r = 0` operators on a common base.
pub fn ad(a: &PsiOp, f: &PsiOp) -> Result<PsiOp> {
    rho(a, f)?.sub(&rho(f, a)?)
}

/// Coefficient field over `Ψ(n, r, m)` at fixed `r`, independent of base.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiField {
    pub r: HalfInt,
    pub coeffs: BTreeMap<(HalfInt, HalfInt), Complex64>,
}

impl PsiField {
    pub fn basis(label: PsiLabel) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((label.n, label.m), c(1.0));
        PsiField { r: label.r, coeffs }
    }

    pub fn zero(r: HalfInt) -> Self {
        PsiField { r, coeffs: BTreeMap::new() }
    }

    pub fn add_term(&mut self, n: HalfInt, m: HalfInt, v: Complex64) {
        *self.coeffs.entry((n, m)).or_insert(c(0.0)) += v;
    }

    /// Sum of basis operators at base `k`; labels beyond the truncation
    /// at `k` contribute zero.
    pub fn instantiate(&self, k: HalfInt, epsilon: f64) -> Result<PsiOp> {
        let kt = k + self.r;
        if kt.is_negative() {
            return Err(Error::NegativeSpin(kt));
        }
        let mut mat = CMatrix::zeros(kt.dim(), k.dim());
        for ((n, m), v) in &self.coeffs {
            let label = PsiLabel::new(*n, self.r, *m)?;
            mat += build_psi(k, label, epsilon)?.matrix * *v;
        }
        Ok(PsiOp::unlabeled(k, self.r, mat))
    }

    /// `{"r":"1/2","terms":[{"n":..,"m":..,"coeff":[re,im]}]}`
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .coeffs
            .iter()
            .map(|((n, m), v)| serde_json::json!({ "n": n, "m": m, "coeff": [v.re, v.im] }))
            .collect();
        serde_json::json!({ "r": self.r, "terms": terms })
    }

    pub fn max_abs_diff(&self, o: &PsiField) -> f64 {
        let mut keys: Vec<_> = self.coeffs.keys().chain(o.coeffs.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        keys.iter()
            .map(|key| {
                let a = self.coeffs.get(key).copied().unwrap_or_default();
                let b = o.coeffs.get(key).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// Expansion of an operator over `Ψ(n, r, m)` at its base, with the
/// reconstruction residual `max|op - Σ c Ψ| / max(1, max|op|)`.
#[derive(Clone, Debug)]
pub struct PsiExpansion {
    pub field: PsiField,
    pub residual: f64,
}

pub fn project(op: &PsiOp, epsilon: f64) -> Result<PsiExpansion> {
    let k = op.base_k;
    let r = op.r;
    let nmax = k + k + r;
    let mut field = PsiField::zero(r);
    let mut recon = CMatrix::zeros(op.matrix.nrows(), op.matrix.ncols());
    for label in PsiLabel::all_with_r(r, nmax) {
        let b = build_psi(k, label, epsilon)?;
        let nsq = psi_norm(k, label.n, r, epsilon)?.powi(2);
        if nsq == 0.0 {
            continue;
        }
        let v = trace_form(&b.matrix, &op.matrix) / c(nsq);
        if v.norm() > 0.0 {
            recon += &b.matrix * v;
            field.add_term(label.n, label.m, v);
        }
    }
    let scale = crate::matrep::max_abs(&op.matrix).max(1.0);
    let residual = crate::matrep::max_abs(&(&op.matrix - &recon)) / scale;
    Ok(PsiExpansion { field, residual })
}

/// Field product at base `k`: `a` instantiated at `k + r_b`, `b` at `k`.
pub fn rho_fields(a: &PsiField, b: &PsiField, k: HalfInt, epsilon: f64) -> Result<PsiField> {
    let bo = b.instantiate(k, epsilon)?;
    let ao = a.instantiate(k + b.r, epsilon)?;
    Ok(project(&rho(&ao, &bo)?, epsilon)?.field)
}

/// Field product with every factor read at the same base `k`, compared
/// across bracketings: `ρ_k(ρ_k(a,b),c) - ρ_k(a,ρ_k(b,c))`, maximum
/// coefficient difference. Vanishes when `c` has `r = 0`.
pub fn associativity_defect(a: &PsiField, b: &PsiField, cf: &PsiField, k: HalfInt, epsilon: f64) -> Result<f64> {
    let left = rho_fields(&rho_fields(a, b, k, epsilon)?, cf, k, epsilon)?;
    let right = rho_fields(a, &rho_fields(b, cf, k, epsilon)?, k, epsilon)?;
    Ok(left.max_abs_diff(&right))
}

/// `x^m = (2R̂+ε)^{-½} Ψ(1,0,m)` at base `k`, `R̂ = ε(k+½)`.
pub fn coordinate(k: HalfInt, m: i64, epsilon: f64) -> Result<PsiOp> {
    let label = PsiLabel::new(HalfInt::ONE, HalfInt::ZERO, HalfInt::int(m))?;
    let s = (2.0 * rhat(k, epsilon) + epsilon).powf(-0.5);
    Ok(build_psi(k, label, epsilon)?.scale(c(s)))
}

/// `dx^m = (2R̂+ε)^{-½} Ψ(1,-1,m)` at base `k`.
pub fn coordinate_form(k: HalfInt, m: i64, epsilon: f64) -> Result<PsiOp> {
    let label = PsiLabel::new(HalfInt::ONE, -HalfInt::ONE, HalfInt::int(m))?;
    let s = (2.0 * rhat(k, epsilon) + epsilon).powf(-0.5);
    let mut op = build_psi(k, label, epsilon)?.scale(c(s));
    op.label = Some(label);
    Ok(op)
}

/// `X_m = (dx^m)†`, based at `k - 1`.
pub fn coordinate_vector(k: HalfInt, m: i64, epsilon: f64) -> Result<PsiOp> {
    Ok(coordinate_form(k, m, epsilon)?.dagger())
}

pub fn rhat(k: HalfInt, epsilon: f64) -> f64 {
    epsilon * (k.to_f64() + 0.5)
}

/// `df = Σ_m (-1)^{m+1} dx^{-m} · ad_{x^m} f` for scalar `f` at base `k ≥ 1`.
pub fn ext_d(f: &PsiOp, epsilon: f64) -> Result<PsiOp> {
    if f.r != HalfInt::ZERO {
        return Err(Error::InvalidPsiLabel { n: HalfInt::ZERO, r: f.r, m: HalfInt::ZERO });
    }
    let k = f.base_k;
    if k < HalfInt::ONE {
        return Err(Error::NegativeSpin(k - HalfInt::ONE));
    }
    let mut out = PsiOp::unlabeled(k, -HalfInt::ONE, CMatrix::zeros((k - HalfInt::ONE).dim(), k.dim()));
    for m in -1..=1i64 {
        let x = coordinate(k, m, epsilon)?;
        let dx = coordinate_form(k, -m, epsilon)?;
        let sign = if (m + 1) % 2 == 0 { 1.0 } else { -1.0 };
        out = out.add(&rho(&dx, &ad(&x, f)?)?.scale(c(sign)))?;
    }
    Ok(out)
}

/// `X(f) = ρ(df, X)` for a vector `X` based at `k-1` and scalar `f` at `k`.
pub fn vector_action(x: &PsiOp, f: &PsiOp, epsilon: f64) -> Result<PsiOp> {
    if x.r != HalfInt::ONE {
        return Err(Error::InvalidPsiLabel { n: HalfInt::ONE, r: x.r, m: HalfInt::ZERO });
    }
    rho(&ext_d(f, epsilon)?, x)
}

/// `g(X, Y) = ρ(X† Y)`
pub fn metric(x: &PsiOp, y: &PsiOp) -> Result<PsiOp> {
    rho(&x.dagger(), y)
}

/// Identity component `(1/(2k+1)) Tr f` of an `r = 0` operator.
pub fn pi0(f: &PsiOp) -> Complex64 {
    let d = f.matrix.ncols();
    let mut acc = c(0.0);
    for i in 0..d.min(f.matrix.nrows()) {
        acc += f.matrix[(i, i)];
    }
    acc / c(d as f64)
}

/// Phase of `Ψ` under conjugation by the `2π` rotation `e^{2πiJ₀/ε}` on
/// `V_{k+r}` and `V_k`, measured on the matrix; `None` if `Ψ` vanishes.
pub fn rotation_phase(op: &PsiOp) -> Option<Complex64> {
    let src = op.base_k;
    let dst = op.target_k();
    let rot = |k: HalfInt| -> Vec<Complex64> {
        k.projections().map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j.to_f64())).collect()
    };
    let us = rot(src);
    let ud = rot(dst);
    let mut rotated = op.matrix.clone();
    for i in 0..rotated.nrows() {
        for j in 0..rotated.ncols() {
            rotated[(i, j)] = ud[i] * op.matrix[(i, j)] * us[j].conj();
        }
    }
    let (mut best, mut idx) = (0.0, (0, 0));
    for i in 0..op.matrix.nrows() {
        for j in 0..op.matrix.ncols() {
            if op.matrix[(i, j)].norm() > best {
                best = op.matrix[(i, j)].norm();
                idx = (i, j);
            }
        }
    }
    if best == 0.0 {
        return None;
    }
    let phase = rotated[idx] / op.matrix[idx];
    Some(phase)
}

/// Expected sign `(-1)^{2r}`.
pub fn rotation_sign(label: PsiLabel) -> i64 {
    if label.r.is_integer() {
        1
    } else {
        -1
    }
}

/// One row of the checked-in convention ledger.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct PhaseEntry {
    pub n: HalfInt,
    pub r: HalfInt,
    /// `build_psi = phase · ladder_psi`
    pub phase_vs_ladder: i64,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ConventionLedger {
    pub version: u32,
    /// `build_psi(n,0,m) = phase · P^m_n` per `n`.
    pub scalar_phase: Vec<(i64, i64)>,
    pub psi_phase: Vec<PhaseEntry>,
    /// Sign of `c_n / (CG · RM)` for scalar products; `null` when it varies.
    pub product_sign: Vec<ProductSign>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct ProductSign {
    pub n1: i64,
    pub n2: i64,
    pub n: i64,
    pub sign: i64,
}

pub const CONVENTIONS_JSON: &str = include_str!("../data/conventions.json");

pub fn convention_ledger() -> ConventionLedger {
    serde_json::from_str(CONVENTIONS_JSON).expect("embedded convention ledger parses")
}

/// Measure `build_psi / ladder_psi` as a real sign, if the ratio is a
/// constant ±1 to `tol`.
pub fn measure_phase(k: HalfInt, label: PsiLabel, epsilon: f64, tol: f64) -> Result<Option<i64>> {
    let a = build_psi(k, label, epsilon)?;
    let b = ladder_psi(k, label, epsilon)?;
    let nb = trace_form(&b.matrix, &b.matrix).re;
    if nb == 0.0 {
        return Ok(None);
    }
    let ratio = trace_form(&b.matrix, &a.matrix) / c(nb);
    let s = ratio.re.round();
    let resid = crate::matrep::rel_diff(&a.matrix, &(&b.matrix * c(s)));
    if (ratio - c(s)).norm() < tol && s.abs() == 1.0 && resid < tol {
        Ok(Some(s as i64))
    } else {
        Ok(None)
    }
}
