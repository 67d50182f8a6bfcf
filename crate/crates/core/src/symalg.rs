//! Exact symbolic algebra `P(ε, R, α)` in ladder normal form.
//!
//! Every element is written as `Σ_s L_s p_s(z)` where `L_s = J₊^s` for
//! `s > 0`, `J₋^{|s|}` for `s < 0` and `1` for `s = 0`. Products are reduced
//! with
//!
//! ```text
//! p(z) J₊ = J₊ p(z+ε)        p(z) J₋ = J₋ p(z-ε)
//! J₊J₋ = α²(R² - z² + εz)    J₋J₊ = α²(R² - z² - εz)
//! ```
//!
//! so no mixed ladder products survive. `ε` and `R` stay symbolic; numeric
//! specialisation is done afterwards with [`NormalForm::specialize`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::coefficients::factorial;
use crate::error::{Error, Result};
use crate::poly::{binomial, MPoly};
use crate::surd::{rat, rat_int, rat_string, CSurd, Surd};

/// Exact coefficient: polynomial in `(ε, R)` with complex-surd coefficients.
pub type ExactScalar = MPoly<CSurd, 2>;
/// Polynomial in `(z, ε, R)`.
pub type ZPoly = MPoly<CSurd, 3>;

pub const VZ: usize = 0;
pub const VEPS: usize = 1;
pub const VR: usize = 2;

/// A parameter that is either left symbolic or fixed to an exact rational.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Param {
    #[default]
    Symbol,
    Value(BigRational),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraParams {
    pub epsilon: Param,
    /// `R²`
    pub rsq: Param,
    /// `α²`; 1 is the sphere.
    pub alpha_sq: BigRational,
}

impl Default for AlgebraParams {
    fn default() -> Self {
        AlgebraParams { epsilon: Param::Symbol, rsq: Param::Symbol, alpha_sq: rat_int(1) }
    }
}

impl AlgebraParams {
    pub fn sphere() -> Self {
        Self::default()
    }

    /// `R̂² = R² + ε²/4` as a polynomial in `(ε, R)`.
    pub fn rhat_sq(&self) -> ExactScalar {
        let eps = ExactScalar::var(0);
        let r = ExactScalar::var(1);
        r.mul(&r).add(&eps.mul(&eps).scale(&CSurd::real(Surd::from_rational(rat(1, 4)))))
    }
}

fn cs(n: i64) -> CSurd {
    CSurd::from_int(n)
}

fn shift_cache() -> &'static Mutex<HashMap<(i64, u32), Arc<ZPoly>>> {
    static C: OnceLock<Mutex<HashMap<(i64, u32), Arc<ZPoly>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// `(z + cε)^k`
fn shifted_power(c: i64, k: u32) -> Arc<ZPoly> {
    if let Some(p) = shift_cache().lock().unwrap().get(&(c, k)) {
        return p.clone();
    }
    let mut p = ZPoly::zero();
    for t in 0..=k {
        let coeff = binomial(k, t) as i128 * (c as i128).pow(k - t);
        let coeff = BigInt::from(coeff);
        p.add_term([t, k - t, 0], &CSurd::real(Surd::from_rational(BigRational::from_integer(coeff))));
    }
    let p = Arc::new(p);
    shift_cache().lock().unwrap().insert((c, k), p.clone());
    p
}

/// `p(z + cε)`
pub fn shift_z(p: &ZPoly, c: i64) -> ZPoly {
    if c == 0 {
        return p.clone();
    }
    let mut out = ZPoly::zero();
    for (e, coef) in p.terms() {
        let base = ZPoly::monomial([0, e[1], e[2]], coef.clone());
        out.add_assign(&shifted_power(c, e[0]).mul(&base));
    }
    out
}

/// Element of `P(ε, R, α)` in ladder normal form.
#[derive(Clone, PartialEq, Default)]
pub struct NormalForm {
    terms: BTreeMap<i64, ZPoly>,
}

impl NormalForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_term(0, ZPoly::one())
    }

    pub fn from_term(s: i64, p: ZPoly) -> Self {
        let mut nf = Self::zero();
        nf.add_term(s, &p);
        nf
    }

    pub fn scalar(c: ExactScalar) -> Self {
        let mut p = ZPoly::zero();
        for (e, coef) in c.terms() {
            p.add_term([0, e[0], e[1]], coef);
        }
        Self::from_term(0, p)
    }

    pub fn constant(c: CSurd) -> Self {
        Self::from_term(0, ZPoly::constant(c))
    }

    pub fn z() -> Self {
        Self::from_term(0, ZPoly::var(VZ))
    }

    pub fn jp() -> Self {
        Self::from_term(1, ZPoly::one())
    }

    pub fn jm() -> Self {
        Self::from_term(-1, ZPoly::one())
    }

    /// `x = (J₊ + J₋)/2`
    pub fn x() -> Self {
        Self::jp().add(&Self::jm()).scale_c(&CSurd::real(Surd::from_rational(rat(1, 2))))
    }

    /// `y = (J₊ - J₋)/(2i)`
    pub fn y() -> Self {
        // 1/(2i) = -i/2
        let c = CSurd { re: Surd::zero(), im: Surd::from_rational(rat(-1, 2)) };
        Self::jp().sub(&Self::jm()).scale_c(&c)
    }

    pub fn eps() -> Self {
        Self::from_term(0, ZPoly::var(VEPS))
    }

    pub fn add_term(&mut self, s: i64, p: &ZPoly) {
        if p.is_zero() {
            return;
        }
        let e = self.terms.entry(s).or_default();
        e.add_assign(p);
        if e.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &ZPoly)> {
        self.terms.iter().map(|(s, p)| (*s, p))
    }

    pub fn term(&self, s: i64) -> ZPoly {
        self.terms.get(&s).cloned().unwrap_or_default()
    }

    /// Ladder weights present.
    pub fn weights(&self) -> Vec<i64> {
        self.terms.keys().copied().collect()
    }

    /// Coefficient of `L_s z^a` as an exact scalar in `(ε, R)`.
    pub fn coeff(&self, s: i64, a: u32) -> ExactScalar {
        let mut out = ExactScalar::zero();
        if let Some(p) = self.terms.get(&s) {
            for (e, c) in p.terms() {
                if e[0] == a {
                    out.add_term([e[1], e[2]], c);
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (s, p) in &o.terms {
            out.add_term(*s, p);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_polys(|p| p.neg())
    }

    pub fn scale_c(&self, c: &CSurd) -> Self {
        self.map_polys(|p| p.scale(c))
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let lifted = NormalForm::scalar(c.clone()).term(0);
        self.map_polys(|p| p.mul(&lifted))
    }

    fn map_polys(&self, f: impl Fn(&ZPoly) -> ZPoly) -> Self {
        let mut out = Self::zero();
        for (s, p) in &self.terms {
            out.add_term(*s, &f(p));
        }
        out
    }

    /// Exact division by `ε^k`; `None` if not divisible.
    pub fn div_eps_pow(&self, k: u32) -> Option<Self> {
        let mut out = Self::zero();
        for (s, p) in &self.terms {
            out.add_term(*s, &p.div_var_pow(VEPS, k)?);
        }
        Some(out)
    }

    /// Substitute `ε = 0`.
    pub fn at_eps_zero(&self) -> Self {
        self.map_polys(|p| p.set_zero(VEPS))
    }

    /// Substitute the numeric parameters of `params`. Odd powers of `R` are
    /// left symbolic when only `R²` is fixed.
    pub fn specialize(&self, params: &AlgebraParams) -> Self {
        let mut out = self.clone();
        if let Param::Value(e) = &params.epsilon {
            let v = ZPoly::constant(CSurd::real(Surd::from_rational(e.clone())));
            out = out.map_polys(|p| p.substitute(VEPS, &v));
        }
        if let Param::Value(rsq) = &params.rsq {
            out = out.map_polys(|p| {
                let mut q = ZPoly::zero();
                for (e, c) in p.terms() {
                    let pw = e[2] / 2;
                    let mut val = c.clone();
                    for _ in 0..pw {
                        val = val.mul(&CSurd::real(Surd::from_rational(rsq.clone())));
                    }
                    q.add_term([e[0], e[1], e[2] % 2], &val);
                }
                q
            });
        }
        out
    }

    /// Maximum ladder power plus z-degree over all terms.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(s, p)| s.unsigned_abs() as u32 + p.degree_in(VZ).unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Human-readable form such as `-J+(2z + ε)`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (s, p) in self.terms.iter().rev() {
            let lad = match *s {
                0 => String::new(),
                1 => "J+".into(),
                -1 => "J-".into(),
                s if s > 0 => format!("J+^{s}"),
                s => format!("J-^{}", -s),
            };
            let poly = p.render(&["z", "ε", "R"]);
            parts.push(match (lad.is_empty(), poly.as_str()) {
                (true, _) => poly.clone(),
                (false, "1") => lad,
                (false, _) => format!("{lad}·({poly})"),
            });
        }
        parts.join(" + ")
    }

    /// Numeric evaluation of the `z`-polynomial of weight `s`.
    pub fn eval_poly(&self, s: i64, z: Complex64, eps: f64, r: f64) -> Complex64 {
        match self.terms.get(&s) {
            Some(p) => p.eval(&[z, Complex64::new(eps, 0.0), Complex64::new(r, 0.0)]),
            None => Complex64::new(0.0, 0.0),
        }
    }
}

impl fmt::Debug for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NormalForm({})", self.render())
    }
}

#[derive(Serialize)]
struct ScalarTermJson<'a> {
    eps: u32,
    #[serde(rename = "R")]
    r: u32,
    re: &'a Surd,
    im: &'a Surd,
}

/// Exact scalar JSON: `{"terms":[{"eps":a,"R":b,"re":Surd,"im":Surd}]}`.
pub fn scalar_json(c: &ExactScalar) -> serde_json::Value {
    let terms: Vec<_> = c
        .terms()
        .map(|(e, v)| serde_json::to_value(ScalarTermJson { eps: e[0], r: e[1], re: &v.re, im: &v.im }).unwrap())
        .collect();
    serde_json::json!({ "terms": terms })
}

/// `{"terms":[{"s":int,"poly":[ExactScalar per z-power]}]}`
impl Serialize for NormalForm {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut terms = Vec::new();
        for (s, p) in &self.terms {
            let deg = p.degree_in(VZ).unwrap_or(0);
            let poly: Vec<_> = (0..=deg).map(|a| scalar_json(&self.coeff(*s, a))).collect();
            terms.push(serde_json::json!({ "s": s, "poly": poly }));
        }
        let mut st = ser.serialize_struct("NormalForm", 1)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// Expansion coefficients over the `P^m_n` basis.
pub type PBasisCoeffs = BTreeMap<(i64, i64), ExactScalar>;

/// Multiplication context; carries `α²`.
#[derive(Clone, Debug, PartialEq)]
pub struct Algebra {
    alpha_sq: BigRational,
}

impl Default for Algebra {
    fn default() -> Self {
        Algebra::sphere()
    }
}

impl Algebra {
    pub fn sphere() -> Self {
        Algebra { alpha_sq: rat_int(1) }
    }

    pub fn new(alpha_sq: BigRational) -> Result<Self> {
        if alpha_sq.is_zero() {
            return Err(Error::Parse("α² must be nonzero".into()));
        }
        Ok(Algebra { alpha_sq })
    }

    pub fn from_params(p: &AlgebraParams) -> Result<Self> {
        Self::new(p.alpha_sq.clone())
    }

    pub fn alpha_sq(&self) -> &BigRational {
        &self.alpha_sq
    }

    fn alpha_c(&self) -> CSurd {
        CSurd::real(Surd::from_rational(self.alpha_sq.clone()))
    }

    /// `J₊J₋ = α²(R² - z² + εz)` (`sign = +1`) or `J₋J₊` (`sign = -1`), shifted by `z → z + cε`.
    fn casimir_factor(&self, sign: i64, c: i64) -> ZPoly {
        let z = ZPoly::var(VZ);
        let eps = ZPoly::var(VEPS);
        let r = ZPoly::var(VR);
        let base = r.mul(&r).sub(&z.mul(&z)).add(&eps.mul(&z).scale(&cs(sign)));
        shift_z(&base, c).scale(&self.alpha_c())
    }

    /// `L_s L_t = L_w C(z)`.
    fn ladder_product(&self, s: i64, t: i64) -> (i64, ZPoly) {
        if s == 0 || t == 0 || s.signum() == t.signum() {
            return (s + t, ZPoly::one());
        }
        let mut c = ZPoly::one();
        if s > 0 {
            let u = -t;
            if s >= u {
                for i in 0..u {
                    c = c.mul(&self.casimir_factor(1, -i));
                }
            } else {
                for i in 0..s {
                    c = c.mul(&self.casimir_factor(1, -(u - s) - i));
                }
            }
        } else {
            let v = -s;
            if v >= t {
                for i in 0..t {
                    c = c.mul(&self.casimir_factor(-1, i));
                }
            } else {
                for i in 0..v {
                    c = c.mul(&self.casimir_factor(-1, (t - v) + i));
                }
            }
        }
        (s + t, c)
    }

    /// Normal-ordered product.
    pub fn multiply(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        let mut out = NormalForm::zero();
        for (s, p) in &a.terms {
            for (t, q) in &b.terms {
                let (w, c) = self.ladder_product(*s, *t);
                let poly = c.mul(&shift_z(p, *t)).mul(q);
                out.add_term(w, &poly);
            }
        }
        out
    }

    pub fn commutator(&self, a: &NormalForm, b: &NormalForm) -> NormalForm {
        self.multiply(a, b).sub(&self.multiply(b, a))
    }

    /// `ad_a f = [a, f]`
    pub fn ad(&self, a: &NormalForm, f: &NormalForm) -> NormalForm {
        self.commutator(a, f)
    }

    pub fn casimir(&self) -> NormalForm {
        // J₀² + (J₊J₋ + J₋J₊)/(2α²)
        let z = NormalForm::z();
        let pm = self.multiply(&NormalForm::jp(), &NormalForm::jm());
        let mp = self.multiply(&NormalForm::jm(), &NormalForm::jp());
        let inv = CSurd::real(Surd::from_rational((rat_int(2) * &self.alpha_sq).recip()));
        self.multiply(&z, &z).add(&pm.add(&mp).scale_c(&inv))
    }

    /// Laplacian `Δ = ad_z² + ½(ad_{J₊}ad_{J₋} + ad_{J₋}ad_{J₊})`, the adjoint Casimir.
    pub fn laplacian(&self, f: &NormalForm) -> NormalForm {
        let z = NormalForm::z();
        let jp = NormalForm::jp();
        let jm = NormalForm::jm();
        let a = self.ad(&z, &self.ad(&z, f));
        let b = self.ad(&jp, &self.ad(&jm, f));
        let c = self.ad(&jm, &self.ad(&jp, f));
        let half = CSurd::real(Surd::from_rational(rat(1, 2)));
        a.add(&b.add(&c).scale_c(&half))
    }

    /// `P^m_n` for all `m = n, n-1, …, -n` (index `n - m`).
    pub fn pmn_family(&self, n: i64) -> Result<Arc<Vec<NormalForm>>> {
        if n < 0 {
            return Err(Error::InvalidLabel { n, m: 0 });
        }
        type FamilyCache = Mutex<HashMap<(String, i64), Arc<Vec<NormalForm>>>>;
        static CACHE: OnceLock<FamilyCache> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let key = (self.alpha_sq.to_string(), n);
        if let Some(f) = cache.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        // G_m = ε^{m-n} (ad J₋)^{n-m} J₊ⁿ, built one lowering at a time.
        let jm = NormalForm::jm();
        let mut g = NormalForm::from_term(n, ZPoly::one());
        let mut fam = Vec::with_capacity(2 * n as usize + 1);
        for m in (-n..=n).rev() {
            if m < n {
                g = self
                    .ad(&jm, &g)
                    .div_eps_pow(1)
                    .expect("ad J₋ of a normal form is divisible by ε");
            }
            let c2 = BigRational::new(factorial(n + m), factorial(2 * n) * factorial(n - m));
            let c = CSurd::real(Surd::sqrt(&c2).unwrap());
            fam.push(g.scale_c(&c));
        }
        let fam = Arc::new(fam);
        cache.lock().unwrap().insert(key, fam.clone());
        Ok(fam)
    }

    /// `P^m_n = ε^{m-n} ((n+m)!/((2n)!(n-m)!))^½ (ad J₋)^{n-m}(J₊ⁿ)`
    pub fn build_pmn(&self, n: i64, m: i64) -> Result<NormalForm> {
        if n < 0 || m.abs() > n {
            return Err(Error::InvalidLabel { n, m });
        }
        Ok(self.pmn_family(n)?[(n - m) as usize].clone())
    }

    /// Antilinear involution with `J₊† = J₋`, `z† = z`, `(ab)† = b†a†`.
    pub fn dagger(&self, a: &NormalForm) -> NormalForm {
        // (L_s p(z))† = p̄(z) L_{-s} = L_{-s} p̄(z - sε)
        let mut out = NormalForm::zero();
        for (s, p) in &a.terms {
            let conj = p.map_coeffs(|c| c.conj());
            out.add_term(-s, &shift_z(&conj, -s));
        }
        out
    }

    /// Exact expansion over `{P^m_n : n ≤ nmax}` by triangular elimination per
    /// ladder weight (the basis element `P^s_n` has `z`-degree `n - |s|` with
    /// a numeric leading coefficient).
    pub fn expand_in_basis(&self, f: &NormalForm, nmax: i64) -> Result<PBasisCoeffs> {
        let mut out = PBasisCoeffs::new();
        for (s, p) in &f.terms {
            self.expand_weight(*s, p.clone(), nmax, &mut out)?;
        }
        Ok(out)
    }

    fn expand_weight(&self, s: i64, mut p: ZPoly, nmax: i64, out: &mut PBasisCoeffs) -> Result<()> {
        while let Some(d) = p.degree_in(VZ) {
            let n = d as i64 + s.abs();
            if n > nmax {
                return Err(Error::OutsideSpan { nmax, residual: NormalForm::from_term(s, p).render() });
            }
            let basis = self.build_pmn(n, s)?;
            let q = basis.term(s);
            let lead = q.coeff(&[d, 0, 0]);
            let inv = lead.inverse()?;
            let top = p.coeff_of(VZ, d);
            let c = top.scale(&inv);
            p = p.sub(&q.mul(&c));
            let mut cs2 = ExactScalar::zero();
            for (e, v) in c.terms() {
                cs2.add_term([e[1], e[2]], v);
            }
            let entry = out.entry((n, s)).or_default();
            entry.add_assign(&cs2);
            if entry.is_zero() {
                out.remove(&(n, s));
            }
        }
        Ok(())
    }

    /// Identity component of `f`.
    pub fn pi0(&self, f: &NormalForm) -> Result<ExactScalar> {
        let mut out = PBasisCoeffs::new();
        let p = f.term(0);
        let nmax = p.degree_in(VZ).unwrap_or(0) as i64;
        self.expand_weight(0, p, nmax, &mut out)?;
        Ok(out.remove(&(0, 0)).unwrap_or_default())
    }

    /// Sesquilinear form `π₀(f† g)`.
    pub fn inner(&self, f: &NormalForm, g: &NormalForm) -> Result<ExactScalar> {
        self.pi0(&self.multiply(&self.dagger(f), g))
    }
}

/// `(n!)²/(2n+1)! ∏_{r=1}^{n} (4R² + ε²(1 - r²))` as an exact polynomial.
pub fn norm_sq_poly(n: i64) -> ExactScalar {
    let eps = ExactScalar::var(0);
    let r = ExactScalar::var(1);
    let mut prod = ExactScalar::one();
    for k in 1..=n {
        let f = r.mul(&r).scale(&cs(4)).add(&eps.mul(&eps).scale(&cs(1 - k * k)));
        prod = prod.mul(&f);
    }
    let c = BigRational::new(factorial(n) * factorial(n), factorial(2 * n + 1));
    prod.scale(&CSurd::real(Surd::from_rational(c)))
}

/// Pochhammer symbol `(a)_k` as a polynomial.
fn pochhammer<const N: usize>(a: &MPoly<BigRational, N>, k: u32) -> MPoly<BigRational, N> {
    let mut acc = MPoly::one();
    for i in 0..k {
        acc = acc.mul(&a.add(&MPoly::from_int(i as i64)));
    }
    acc
}

/// Hahn polynomial `h_n^{(α,β)}(x, N)` as a polynomial in `(x, N)`:
///
/// ```text
/// h = (-1)^n (β+1)_n (N-n)_n / n! · ₃F₂(-n, α+β+n+1, -x; β+1, 1-N; 1)
/// ```
///
/// normalised so the leading coefficient in `x` is `(α+β+n+1)_n / n!`.
/// The ratio `(N-n)_n / (1-N)_k` is expanded as a polynomial so no
/// rational functions of `N` appear.
pub fn hahn_poly(alpha: i64, beta: i64, n: u32) -> MPoly<BigRational, 2> {
    type Q2 = MPoly<BigRational, 2>;
    let x = Q2::var(0);
    let big_n = Q2::var(1);
    let nfact = BigRational::from_integer(factorial(n as i64));
    let sign_n = if n % 2 == 0 { 1 } else { -1 };
    let mut out = Q2::zero();
    for k in 0..=n {
        // (β+1)_n / (β+1)_k = (β+k+1)_{n-k}
        let mut beta_ratio = BigRational::one();
        for i in 0..(n - k) {
            beta_ratio *= rat_int(beta + k as i64 + 1 + i as i64);
        }
        let mut minus_n = BigRational::one();
        let mut top = BigRational::one();
        for i in 0..k {
            minus_n *= rat_int(-(n as i64) + i as i64);
            top *= rat_int(alpha + beta + n as i64 + 1 + i as i64);
        }
        let kfact = BigRational::from_integer(factorial(k as i64));
        let scalar = rat_int(sign_n) * &beta_ratio * &minus_n * &top / (&kfact * &nfact);
        let sign_k = if k % 2 == 0 { 1 } else { -1 };
        let mut nprod = Q2::from_int(sign_k);
        for j in (k + 1)..=n {
            nprod = nprod.mul(&big_n.sub(&Q2::from_int(j as i64)));
        }
        let term = pochhammer(&x.neg(), k).mul(&nprod).scale(&scalar);
        out = out.add(&term);
    }
    out
}

/// `P^m_n` assembled from the Hahn-polynomial representation
///
/// ```text
/// m ≥ 0:  J₊^m (-ε)^{n-m} C(2n, n-m)^{-½} h^{(m,m)}_{n-m}(z/ε + (N-1)/2, N-m)
/// m < 0:  (-1)^{|m|} J₋^{|m|} (-ε)^{n-|m|} C(2n, n-|m|)^{-½} h^{(|m|,|m|)}_{n-|m|}(z/ε - |m| + (N-1)/2, N-|m|)
/// ```
///
/// with `N² - 1 = 4R²/ε²`. The result is polynomial in `(z, ε, R)` because
/// only even powers of `N` survive.
pub fn hahn_pmn(n: i64, m: i64) -> Result<NormalForm> {
    type Q2 = MPoly<BigRational, 2>;
    if n < 0 || m.abs() > n {
        return Err(Error::InvalidLabel { n, m });
    }
    let mu = m.abs();
    let deg = (n - mu) as u32;
    let h = hahn_poly(mu, mu, deg);
    // variables of `h`: (x, N); substitute in terms of (u = z/ε, N)
    let u = Q2::var(0);
    let big_n = Q2::var(1);
    let shift = if m >= 0 { 0 } else { -mu };
    let x_val = u
        .add(&Q2::from_int(shift))
        .add(&big_n.sub(&Q2::from_int(1)).scale(&rat(1, 2)));
    let n_val = big_n.sub(&Q2::from_int(mu));
    // substitute N first into a fresh variable slot to avoid capture
    let h_un = {
        let mut acc = Q2::zero();
        let x_pows: Vec<Q2> = (0..=deg).map(|k| x_val.pow(k)).collect();
        let dn = h.degree_in(1).unwrap_or(0);
        let n_pows: Vec<Q2> = (0..=dn).map(|k| n_val.pow(k)).collect();
        for (e, c) in h.terms() {
            acc = acc.add(&x_pows[e[0] as usize].mul(&n_pows[e[1] as usize]).scale(c));
        }
        acc
    };
    // prefactor: (-1)^{n-mu} C(2n, n-mu)^{-1/2}, times (-1)^mu for m < 0
    let mut sign = if (n - mu) % 2 == 0 { 1 } else { -1 };
    if m < 0 && mu % 2 == 1 {
        sign = -sign;
    }
    let binom = BigRational::new(factorial(2 * n), factorial(n - mu) * factorial(n + mu));
    let pref = CSurd::real(Surd::sqrt(&binom.recip()).unwrap().scale(&rat_int(sign)));
    // u^a N^b  →  z^a ε^{deg-a} (ε² + 4R²)^{b/2} ε^{-b}
    let four_r2_plus_eps2 = {
        let e = ZPoly::var(VEPS);
        let r = ZPoly::var(VR);
        e.mul(&e).add(&r.mul(&r).scale(&cs(4)))
    };
    let mut poly = ZPoly::zero();
    for (e, c) in h_un.terms() {
        let (a, b) = (e[0], e[1]);
        if b % 2 == 1 {
            return Err(Error::Parse(format!("odd power N^{b} in Hahn form of P^{m}_{n}")));
        }
        let eps_pow = deg as i64 - a as i64 - b as i64;
        if eps_pow < 0 {
            return Err(Error::Parse(format!("negative ε power in Hahn form of P^{m}_{n}")));
        }
        let mono = ZPoly::monomial([a, eps_pow as u32, 0], CSurd::real(Surd::from_rational(c.clone())));
        poly = poly.add(&mono.mul(&four_r2_plus_eps2.pow(b / 2)));
    }
    Ok(NormalForm::from_term(m, poly.scale(&pref)))
}

/// One Table-1 entry as stored in the fixture.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Table1Entry {
    pub n: i64,
    pub m: i64,
    /// Display form, for reports.
    pub display: String,
    /// Rational part of the prefactor, `"num/den"`.
    pub rational: String,
    /// Radicand of the prefactor, `"num/den"`.
    pub sqrt: String,
    /// Terms `[coeff, z power, ε power, R power]` of the polynomial factor.
    pub poly: Vec<(String, u32, u32, u32)>,
    #[serde(default)]
    pub advisory: bool,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Table1Fixture {
    pub version: u32,
    pub entries: Vec<Table1Entry>,
}

pub const TABLE1_JSON: &str = include_str!("../data/table1.json");

pub fn table1_fixture() -> Table1Fixture {
    serde_json::from_str(TABLE1_JSON).expect("embedded Table 1 fixture parses")
}

fn parse_rat(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => Ok(BigRational::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)),
        None => Ok(BigRational::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

impl Table1Entry {
    pub fn to_normal_form(&self) -> Result<NormalForm> {
        let q = parse_rat(&self.rational)?;
        let root = Surd::sqrt(&parse_rat(&self.sqrt)?)?;
        let pref = CSurd::real(root.scale(&q));
        let mut p = ZPoly::zero();
        for (c, a, b, r) in &self.poly {
            p.add_term([*a, *b, *r], &CSurd::real(Surd::from_rational(parse_rat(c)?)));
        }
        Ok(NormalForm::from_term(self.m, p.scale(&pref)))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Row {
    pub n: i64,
    pub m: i64,
    pub expected: String,
    pub built: String,
    pub exact_match: bool,
    pub advisory: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
    pub exact_pass: usize,
    pub advisory: usize,
    pub hard_failures: usize,
}

/// Compare `build_pmn` against every embedded Table-1 expression.
pub fn table1_check() -> Result<Table1Report> {
    let alg = Algebra::sphere();
    let fx = table1_fixture();
    let mut rows = Vec::new();
    for e in &fx.entries {
        let built = alg.build_pmn(e.n, e.m)?;
        let expected = e.to_normal_form()?;
        rows.push(Table1Row {
            n: e.n,
            m: e.m,
            expected: e.display.clone(),
            built: built.render(),
            exact_match: built == expected,
            advisory: e.advisory,
            note: e.note.clone(),
        });
    }
    let exact_pass = rows.iter().filter(|r| r.exact_match && !r.advisory).count();
    let advisory = rows.iter().filter(|r| r.advisory).count();
    let hard_failures = rows.iter().filter(|r| !r.exact_match && !r.advisory).count();
    Ok(Table1Report { rows, exact_pass, advisory, hard_failures })
}

/// Serialise expansion coefficients as `[{"n":..,"m":..,"coeff":ExactScalar}]`.
pub fn coeffs_json(c: &PBasisCoeffs) -> serde_json::Value {
    serde_json::Value::Array(
        c.iter()
            .map(|((n, m), v)| serde_json::json!({ "n": n, "m": m, "coeff": scalar_json(v) }))
            .collect(),
    )
}

/// Evaluate an exact scalar numerically.
pub fn eval_scalar(c: &ExactScalar, eps: f64, r: f64) -> Complex64 {
    c.eval_real(&[eps, r])
}

/// Render an exact scalar.
pub fn render_scalar(c: &ExactScalar) -> String {
    c.render(&["ε", "R"])
}

/// `"num/den"` helper re-exported for report writers.
pub fn rational_string(q: &BigRational) -> String {
    rat_string(q)
}
