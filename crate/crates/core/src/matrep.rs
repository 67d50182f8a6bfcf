//! Finite `(2k+1)`-dimensional representations and the matrix basis `P^m_n`.
//!
//! Basis order: row/column 0 is `|k, k⟩`, the last is `|k, -k⟩`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::coefficients::{clebsch_gordan, factorial, wigner_6j};
use crate::error::{Error, Result};
use crate::halfint::HalfInt;
use crate::surd::{rat_int, CSurd, Coeff, Surd};
use crate::symalg::{AlgebraParams, Algebra, NormalForm, Param};

pub type CMatrix = DMatrix<Complex64>;

/// Default cap on `k`; overridable through `NC_SPHERE_KCAP`.
pub const DEFAULT_K_CAP: i64 = 24;

pub fn k_cap() -> HalfInt {
    std::env::var("NC_SPHERE_KCAP")
        .ok()
        .and_then(|s| s.parse::<HalfInt>().ok())
        .unwrap_or(HalfInt::int(DEFAULT_K_CAP))
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The spin-`k` representation at deformation `ε`.
#[derive(Clone, Debug)]
pub struct Rep {
    pub k: HalfInt,
    pub epsilon: f64,
    /// Exact `ε` when the representation was built from a rational.
    pub epsilon_exact: Option<BigRational>,
    pub j0: CMatrix,
    pub jp: CMatrix,
    pub jm: CMatrix,
    /// `R² = ε²k(k+1)`
    pub rsq: f64,
    /// `R̂ = ε(k+½)`
    pub rhat: f64,
}

pub fn make_rep(k: HalfInt, epsilon: f64) -> Result<Rep> {
    if k.is_negative() {
        return Err(Error::NegativeSpin(k));
    }
    let cap = k_cap();
    if k > cap {
        return Err(Error::KCap { k, cap });
    }
    if epsilon == 0.0 || !epsilon.is_finite() {
        return Err(Error::Parse(format!("ε must be finite and nonzero, got {epsilon}")));
    }
    let d = k.dim();
    let kf = k.to_f64();
    let mut j0 = CMatrix::zeros(d, d);
    let mut jp = CMatrix::zeros(d, d);
    for (i, j) in k.projections().enumerate() {
        let jf = j.to_f64();
        j0[(i, i)] = c(epsilon * jf);
        if i > 0 {
            // J₊|k,j⟩ = ε√((k-j)(k+j+1)) |k,j+1⟩
            jp[(i - 1, i)] = c(epsilon * ((kf - jf) * (kf + jf + 1.0)).sqrt());
        }
    }
    let jm = jp.adjoint();
    Ok(Rep {
        k,
        epsilon,
        epsilon_exact: None,
        j0,
        jp,
        jm,
        rsq: epsilon * epsilon * kf * (kf + 1.0),
        rhat: epsilon * (kf + 0.5),
    })
}

/// Representation with rational `ε`; float matrices plus exact `ε` retained
/// for [`ExactMatrix`] computations.
pub fn make_rep_exact(k: HalfInt, epsilon: BigRational) -> Result<Rep> {
    let mut rep = make_rep(k, crate::surd::rat_to_f64(&epsilon))?;
    rep.epsilon_exact = Some(epsilon);
    Ok(rep)
}

impl Rep {
    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    pub fn identity(&self) -> CMatrix {
        CMatrix::identity(self.dim(), self.dim())
    }

    /// `J0² + ½(J₊J₋ + J₋J₊)`
    pub fn casimir(&self) -> CMatrix {
        &self.j0 * &self.j0 + (&self.jp * &self.jm + &self.jm * &self.jp) * c(0.5)
    }

    pub fn comm(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a * b - b * a
    }

    /// `P^m_n` from iterated commutators `ε^{m-n} c (ad J₋)^{n-m} J₊ⁿ`.
    pub fn pmn_matrix(&self, n: i64, m: i64) -> Result<CMatrix> {
        if n < 0 || m.abs() > n {
            return Err(Error::InvalidLabel { n, m });
        }
        // Gauge S = diag(s_i), s_i / s_{i-1} = √a_i, a_i = (k-j)(k+j+1):
        // S⁻¹J₊S has integer entries a_i and S⁻¹J₋S has entries 1 at ε = 1,
        // so the commutators run exactly in integers.
        let d = self.dim();
        let a: Vec<BigInt> = self
            .k
            .projections()
            .map(|j| BigInt::from((self.k - j).twice() * (self.k + j + HalfInt::ONE).twice() / 4))
            .collect();
        let mut g: Vec<Vec<BigInt>> = (0..d).map(|i| (0..d).map(|l| BigInt::from((i == l) as i64)).collect()).collect();
        for _ in 0..n {
            // (J₊G)[i,l] = a_{i+1} G[i+1,l]
            g = (0..d).map(|i| (0..d).map(|l| if i + 1 < d { &a[i + 1] * &g[i + 1][l] } else { BigInt::zero() }).collect()).collect();
        }
        for _ in 0..(n - m) {
            // [J₋,G][i,l] = G[i-1,l] - G[i,l+1]
            g = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|l| {
                            let up = if i > 0 { g[i - 1][l].clone() } else { BigInt::zero() };
                            let right = if l + 1 < d { g[i][l + 1].clone() } else { BigInt::zero() };
                            up - right
                        })
                        .collect()
                })
                .collect();
        }
        let c2 = BigRational::new(factorial(n + m), factorial(2 * n) * factorial(n - m));
        let pref = crate::surd::rat_to_f64(&c2).sqrt() * self.epsilon.powi(n as i32);
        let sq: Vec<f64> = a.iter().map(|x| crate::surd::rat_to_f64(&BigRational::from_integer(x.clone())).sqrt()).collect();
        let mut out = CMatrix::zeros(d, d);
        for i in 0..d {
            for l in 0..d {
                if g[i][l].is_zero() {
                    continue;
                }
                // s_i / s_l
                let ratio = if i >= l {
                    sq[l + 1..=i].iter().product::<f64>()
                } else {
                    1.0 / sq[i + 1..=l].iter().product::<f64>()
                };
                let v = crate::surd::rat_to_f64(&BigRational::from_integer(g[i][l].clone()));
                out[(i, l)] = c(v * ratio * pref);
            }
        }
        Ok(out)
    }

    /// `P^m_n` by evaluating the symbolic normal form on this representation.
    pub fn pmn_matrix_normal_form(&self, n: i64, m: i64) -> Result<CMatrix> {
        let nf = Algebra::sphere().build_pmn(n, m)?;
        Ok(self.eval_normal_form(&nf))
    }

    /// Whether `P^m_n` lies in the quotient (`n ≥ 2k+1`, zero norm).
    pub fn quotient_boundary(&self, n: i64) -> bool {
        n > self.k.twice()
    }

    /// Evaluate `Σ_s L_s p_s(z)` with `z = J0`, `R = √(R²)`. On the
    /// representation `z = εj` and `R = ε√(k(k+1))`, so each monomial is
    /// summed exactly per total degree before multiplying by `ε^d`.
    pub fn eval_normal_form(&self, f: &NormalForm) -> CMatrix {
        let d = self.dim();
        let kk = BigRational::from_integer(BigInt::from(self.k.twice() * (self.k.twice() + 2))) / BigRational::from_integer(BigInt::from(4));
        let rs = Surd::sqrt(&kk).expect("k(k+1) ≥ 0");
        let mut out = CMatrix::zeros(d, d);
        for (s, p) in f.terms() {
            let mut diag = CMatrix::zeros(d, d);
            for (i, j) in self.k.projections().enumerate() {
                let jq = BigRational::new(BigInt::from(j.twice()), BigInt::from(2));
                let mut by_degree: std::collections::BTreeMap<u32, CSurd> = Default::default();
                for (e, cf) in p.terms() {
                    let mut v = cf.scale(&num_traits::Pow::pow(&jq, e[0]));
                    for _ in 0..e[2] {
                        v = v.mul_c(&CSurd::real(rs.clone()));
                    }
                    let slot = by_degree.entry(e[0] + e[1] + e[2]).or_insert_with(CSurd::zero_c);
                    *slot = slot.add_c(&v);
                }
                diag[(i, i)] = by_degree.iter().map(|(deg, v)| v.to_c64() * self.epsilon.powi(*deg as i32)).sum();
            }
            let lad = if s >= 0 { &self.jp } else { &self.jm };
            let mut l = self.identity();
            for _ in 0..s.unsigned_abs() {
                l = lad * l;
            }
            out += l * diag;
        }
        out
    }

    /// `(1/(2k+1)) Tr(A†B)`
    pub fn trace_inner(&self, a: &CMatrix, b: &CMatrix) -> Result<Complex64> {
        let d = self.dim();
        if a.shape() != (d, d) || b.shape() != (d, d) {
            return Err(Error::Dimension(format!(
                "expected {d}×{d}, got {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        Ok(trace_form(a, b))
    }

    /// `‖P^m_n‖²` at this representation's `ε, k`.
    pub fn norm_sq(&self, n: i64) -> f64 {
        norm_closed_form_k(n, self.k, self.epsilon)
    }

    /// Expand `P^{m1}_{n1} P^{m2}_{n2}` over `P^{m1+m2}_n`.
    pub fn decompose_product(&self, n1: i64, m1: i64, n2: i64, m2: i64) -> Result<ExpansionReport> {
        let a = self.pmn_matrix(n1, m1)?;
        let b = self.pmn_matrix(n2, m2)?;
        let prod = &a * &b;
        let m = m1 + m2;
        let mut terms = Vec::new();
        let mut recon = CMatrix::zeros(self.dim(), self.dim());
        let nmin = (n1 - n2).abs().max(m.abs());
        let mut degenerate = Vec::new();
        for n in nmin..=(n1 + n2) {
            if self.quotient_boundary(n) {
                degenerate.push(n);
                continue;
            }
            let p = self.pmn_matrix(n, m)?;
            let cn = trace_form(&p, &prod) / c(self.norm_sq(n));
            recon += p * cn;
            terms.push(ExpansionTerm { n, coeff: [cn.re, cn.im] });
        }
        let residual = max_abs(&(&prod - &recon)) / max_abs(&prod).max(1.0);
        Ok(ExpansionReport { m, terms, residual, truncated: !degenerate.is_empty(), degenerate })
    }
}

/// `(1/d) Tr(A†B)` over the column (source) dimension.
pub fn trace_form(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc / c(a.ncols() as f64)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max|A-B| / max(1, max|B|)`
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    max_abs(&(a - b)) / max_abs(b).max(1.0)
}

/// `(n!)²/(2n+1)! ∏_{r=1}^{n}(4R² + ε²(1-r²))`
pub fn norm_closed_form(n: i64, epsilon: f64, rsq: f64) -> f64 {
    let pref = BigRational::new(factorial(n) * factorial(n), factorial(2 * n + 1));
    let mut prod = crate::surd::rat_to_f64(&pref);
    for r in 1..=n {
        prod *= 4.0 * rsq + epsilon * epsilon * (1 - r * r) as f64;
    }
    prod
}

/// Closed form at `R² = ε²k(k+1)`, with the factor `4k(k+1) + 1 - r²`
/// evaluated in integers so the zero at `n = 2k+1` is exact.
pub fn norm_closed_form_k(n: i64, k: HalfInt, epsilon: f64) -> f64 {
    let tk = k.twice();
    // 4k(k+1) + 1 = (2k+1)²
    let s = (tk + 1) * (tk + 1);
    let mut q = BigRational::new(factorial(n) * factorial(n), factorial(2 * n + 1));
    for r in 1..=n {
        q *= rat_int(s - r * r);
    }
    crate::surd::rat_to_f64(&q) * epsilon.powi(2 * n as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionTerm {
    pub n: i64,
    pub coeff: [f64; 2],
}

/// `{"terms":[{"n":int,"coeff":[re,im]}],"residual":float}` plus quotient flags.
#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    pub m: i64,
    pub terms: Vec<ExpansionTerm>,
    pub residual: f64,
    /// Some `n ≤ n1+n2` fell at or beyond the quotient boundary `2k+1`.
    pub truncated: bool,
    pub degenerate: Vec<i64>,
}

impl ExpansionReport {
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.n == n)
            .map(|t| Complex64::new(t.coeff[0], t.coeff[1]))
            .unwrap_or_default()
    }
}

/// Reduced matrix element
///
/// ```text
/// (-1)^{2k+n1+n2+r1+r2} ‖n1,r1‖_{k+r2} ‖n2,r2‖_k / ‖n,r1+r2‖_k
///   · √(2k+2r2+1) √(2n1+1) √(2n2+1) · {k+r1+r2 n1 k+r2; n2 k n}
/// ```
///
/// with the field norms of [`crate::psi::psi_norm`] at `ε`.
pub fn reduced_matrix_element(
    n1: HalfInt,
    n2: HalfInt,
    n: HalfInt,
    r1: HalfInt,
    r2: HalfInt,
    k: HalfInt,
    epsilon: f64,
) -> Result<f64> {
    use crate::psi::psi_norm;
    let r = r1 + r2;
    let sixj = wigner_6j(k + r, n1, k + r2, n2, k, n);
    if sixj.is_zero() {
        return Ok(0.0);
    }
    let den = psi_norm(k, n, r, epsilon)?;
    if den == 0.0 {
        return Err(Error::DegenerateNorm { n, r, k });
    }
    let num = psi_norm(k + r2, n1, r1, epsilon)? * psi_norm(k, n2, r2, epsilon)?;
    let sign = (k + k + n1 + n2 + r1 + r2).parity_sign().unwrap_or(1) as f64;
    let dims = ((k + k + r2 + r2).twice() / 2 + 1) as f64 * (2.0 * n1.to_f64() + 1.0) * (2.0 * n2.to_f64() + 1.0);
    Ok(sign * num / den * dims.sqrt() * sixj.to_f64())
}

/// CG coefficient as `f64`.
pub fn cg_f64(j1: HalfInt, j2: HalfInt, j: HalfInt, m1: HalfInt, m2: HalfInt) -> f64 {
    clebsch_gordan(j1, j2, j, m1, m2, m1 + m2).to_f64()
}

/// Dense matrix with exact complex-surd entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<CSurd>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![CSurd::zero_c(); rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m.data[i * d + i] = CSurd::one_c();
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &CSurd {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CSurd) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero_c() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(l, j);
                    if b.is_zero_c() {
                        continue;
                    }
                    let v = out.get(i, j).add_c(&a.mul_c(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub_c(b)).collect(),
        }
    }

    pub fn scale(&self, s: &CSurd) -> Self {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.mul_c(s)).collect() }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// `(1/cols) Tr(A†B)`
    pub fn trace_form(&self, o: &Self) -> CSurd {
        let mut acc = CSurd::zero_c();
        for (a, b) in self.data.iter().zip(&o.data) {
            acc = acc.add_c(&a.conj().mul_c(b));
        }
        acc.scale(&BigRational::new(BigInt::from(1), BigInt::from(self.cols)))
    }

    pub fn to_float(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }
}

/// Exact `J0, J₊, J₋` for rational `ε`.
pub struct ExactRep {
    pub k: HalfInt,
    pub epsilon: BigRational,
    pub j0: ExactMatrix,
    pub jp: ExactMatrix,
    pub jm: ExactMatrix,
}

impl ExactRep {
    pub fn new(k: HalfInt, epsilon: BigRational) -> Result<Self> {
        if k.is_negative() {
            return Err(Error::NegativeSpin(k));
        }
        if epsilon.is_zero() {
            return Err(Error::Parse("ε must be nonzero".into()));
        }
        let d = k.dim();
        let mut j0 = ExactMatrix::zeros(d, d);
        let mut jp = ExactMatrix::zeros(d, d);
        let half = |x: HalfInt| BigRational::new(BigInt::from(x.twice()), BigInt::from(2));
        for (i, j) in k.projections().enumerate() {
            j0.set(i, i, CSurd::real(Surd::from_rational(&epsilon * half(j))));
            if i > 0 {
                let prod = half(k - j) * half(k + j + HalfInt::ONE);
                jp.set(i - 1, i, CSurd::real(Surd::sqrt(&prod)?.scale(&epsilon)));
            }
        }
        let jm = jp.adjoint();
        Ok(ExactRep { k, epsilon, j0, jp, jm })
    }

    /// `R² = ε²k(k+1)`
    pub fn rsq(&self) -> BigRational {
        let k = BigRational::new(BigInt::from(self.k.twice()), BigInt::from(2));
        &self.epsilon * &self.epsilon * &k * (&k + rat_int(1))
    }

    fn comm(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
        a.mul(b).sub(&b.mul(a))
    }

    pub fn pmn_matrix(&self, n: i64, m: i64) -> Result<ExactMatrix> {
        if n < 0 || m.abs() > n {
            return Err(Error::InvalidLabel { n, m });
        }
        let d = self.k.dim();
        let mut g = ExactMatrix::identity(d);
        for _ in 0..n {
            g = self.jp.mul(&g);
        }
        let inv_eps = CSurd::real(Surd::from_rational(self.epsilon.recip()));
        for _ in 0..(n - m) {
            g = Self::comm(&self.jm, &g).scale(&inv_eps);
        }
        let c2 = BigRational::new(factorial(n + m), factorial(2 * n) * factorial(n - m));
        Ok(g.scale(&CSurd::real(Surd::sqrt(&c2)?)))
    }

    /// Evaluate a normal form with exact `ε` and `R²`.
    pub fn eval_normal_form(&self, f: &NormalForm) -> ExactMatrix {
        let params = AlgebraParams {
            epsilon: Param::Value(self.epsilon.clone()),
            rsq: Param::Value(self.rsq()),
            ..Default::default()
        };
        let f = f.specialize(&params);
        let d = self.k.dim();
        let mut out = ExactMatrix::zeros(d, d);
        for (s, p) in f.terms() {
            let mut diag = ExactMatrix::zeros(d, d);
            for i in 0..d {
                let z = self.j0.get(i, i).clone();
                let mut acc = CSurd::zero_c();
                for (e, coef) in p.terms() {
                    debug_assert!(e[1] == 0 && e[2] == 0, "unspecialised parameter");
                    let mut t = coef.clone();
                    for _ in 0..e[0] {
                        t = t.mul_c(&z);
                    }
                    acc = acc.add_c(&t);
                }
                diag.set(i, i, acc);
            }
            let lad = if s >= 0 { &self.jp } else { &self.jm };
            let mut l = ExactMatrix::identity(d);
            for _ in 0..s.unsigned_abs() {
                l = lad.mul(&l);
            }
            let term = l.mul(&diag);
            out = ExactMatrix { rows: d, cols: d, data: out.data.iter().zip(&term.data).map(|(a, b)| a.add_c(b)).collect() };
        }
        out
    }

    /// Exact `‖P^m_n‖²` from the closed form.
    pub fn norm_sq(&self, n: i64) -> BigRational {
        let tk = self.k.twice();
        let s = (tk + 1) * (tk + 1);
        let mut q = BigRational::new(factorial(n) * factorial(n), factorial(2 * n + 1));
        for r in 1..=n {
            q *= rat_int(s - r * r);
        }
        let e2 = &self.epsilon * &self.epsilon;
        for _ in 0..n {
            q *= &e2;
        }
        q
    }
}
