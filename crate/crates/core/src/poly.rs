//! Sparse commutative polynomials in a fixed number of variables.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::surd::{rat_int, rat_to_f64, CSurd, Coeff, Surd};

pub type Exps<const N: usize> = [u32; N];

/// `Σ c·x₀^e₀ … x_{N-1}^e_{N-1}` with nonzero coefficients only.
#[derive(Clone, PartialEq)]
pub struct MPoly<C: Coeff, const N: usize> {
    terms: BTreeMap<Exps<N>, C>,
}

impl<C: Coeff, const N: usize> Default for MPoly<C, N> {
    fn default() -> Self {
        MPoly { terms: BTreeMap::new() }
    }
}

impl<C: Coeff, const N: usize> MPoly<C, N> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        Self::monomial([0; N], c)
    }

    pub fn one() -> Self {
        Self::constant(C::one_c())
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(C::from_rational(rat_int(n)))
    }

    pub fn monomial(e: Exps<N>, c: C) -> Self {
        let mut p = Self::zero();
        if !c.is_zero_c() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0; N];
        e[i] = 1;
        Self::monomial(e, C::one_c())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps<N>, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exps<N>) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero_c)
    }

    pub fn add_term(&mut self, e: Exps<N>, c: &C) {
        if c.is_zero_c() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v = v.add_c(c);
                if v.is_zero_c() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (e, c) in &o.terms {
            self.add_term(*e, c);
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        MPoly { terms: self.terms.iter().map(|(e, c)| (*e, c.neg_c())).collect() }
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero_c() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, &c.mul_c(s));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let mut e = [0; N];
                for i in 0..N {
                    e[i] = e1[i] + e2[i];
                }
                out.add_term(e, &c1.mul_c(c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, &f(c));
        }
        out
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    /// Total degree.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Exact division by `x_i^k`; `None` if some term is not divisible.
    pub fn div_var_pow(&self, i: usize, k: u32) -> Option<Self> {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] < k {
                return None;
            }
            let mut e2 = *e;
            e2[i] -= k;
            out.add_term(e2, c);
        }
        Some(out)
    }

    /// Multiply by `x_i^k`.
    pub fn mul_var_pow(&self, i: usize, k: u32) -> Self {
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = *e;
                    e2[i] += k;
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Substitute `x_i = 0`.
    pub fn set_zero(&self, i: usize) -> Self {
        MPoly { terms: self.terms.iter().filter(|(e, _)| e[i] == 0).map(|(e, c)| (*e, c.clone())).collect() }
    }

    /// Coefficient of `x_i^k` as a polynomial in the remaining variables
    /// (variable `i` keeps exponent zero).
    pub fn coeff_of(&self, i: usize, k: u32) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] == k {
                let mut e2 = *e;
                e2[i] = 0;
                out.add_term(e2, c);
            }
        }
        out
    }

    /// Substitute `x_i = value` where `value` is a polynomial.
    pub fn substitute(&self, i: usize, value: &Self) -> Self {
        let deg = self.degree_in(i).unwrap_or(0);
        let mut powers = vec![Self::one()];
        for k in 1..=deg as usize {
            powers.push(powers[k - 1].mul(value));
        }
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let k = e2[i] as usize;
            e2[i] = 0;
            out.add_assign(&powers[k].mul(&Self::monomial(e2, c.clone())));
        }
        out
    }

    /// Evaluate with a coefficient-to-complex map.
    pub fn eval_with(&self, x: &[Complex64; N], cf: impl Fn(&C) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = cf(c);
            for i in 0..N {
                if e[i] > 0 {
                    t *= x[i].powu(e[i]);
                }
            }
            acc += t;
        }
        acc
    }

    /// Leading term in lexicographic exponent order.
    pub fn leading(&self) -> Option<(&Exps<N>, &C)> {
        self.terms.iter().next_back()
    }
}

pub trait ToComplex {
    fn to_c64(&self) -> Complex64;
}

impl ToComplex for BigRational {
    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(self), 0.0)
    }
}

impl ToComplex for Surd {
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }
}

impl ToComplex for CSurd {
    fn to_c64(&self) -> Complex64 {
        CSurd::to_c64(self)
    }
}

impl<C: Coeff + ToComplex, const N: usize> MPoly<C, N> {
    pub fn eval(&self, x: &[Complex64; N]) -> Complex64 {
        self.eval_with(x, |c| c.to_c64())
    }

    pub fn eval_real(&self, x: &[f64; N]) -> Complex64 {
        let xc = x.map(|v| Complex64::new(v, 0.0));
        self.eval(&xc)
    }
}

impl<const N: usize> MPoly<BigRational, N> {
    /// Lift to complex-surd coefficients.
    pub fn to_csurd(&self) -> MPoly<CSurd, N> {
        let mut out = MPoly::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, &CSurd::real(Surd::from_rational(c.clone())));
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| rat_to_f64(c).abs()).fold(0.0, f64::max)
    }
}

impl<C: Coeff + fmt::Display, const N: usize> MPoly<C, N> {
    /// Human-readable rendering with the supplied variable names.
    pub fn render(&self, names: &[&str; N]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mut mono = String::new();
            for i in 0..N {
                match e[i] {
                    0 => {}
                    1 => mono.push_str(names[i]),
                    k => mono.push_str(&format!("{}^{}", names[i], k)),
                }
            }
            let cs = c.to_string();
            let piece = if mono.is_empty() {
                cs
            } else if cs == "1" {
                mono
            } else if cs == "-1" {
                format!("-{mono}")
            } else {
                format!("({cs}){mono}")
            };
            parts.push(piece);
        }
        parts.join(" + ")
    }
}

impl<C: Coeff + fmt::Display, const N: usize> fmt::Debug for MPoly<C, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        write!(f, "[")?;
        for (e, c) in &self.terms {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{c}·{e:?}")?;
        }
        write!(f, "]")
    }
}

/// Binomial coefficient as `i64` (small arguments only).
pub fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc.to_i64().expect("binomial overflow")
}
