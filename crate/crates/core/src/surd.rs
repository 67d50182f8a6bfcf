//! Exact sums of rational multiples of square roots, `Σ q·√p`.
//!
//! Radicands are kept as squarefree positive integers; any rational radicand
//! `a/b` is rewritten as `√(ab)/b` on construction, so the canonical form is
//! unique and equality is structural.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Coefficient ring interface shared by [`Surd`], [`CSurd`] and plain
/// rationals so polynomials can be generic over them.
pub trait Coeff:
    Clone + PartialEq + fmt::Debug + Send + Sync + 'static
{
    fn zero_c() -> Self;
    fn one_c() -> Self;
    fn is_zero_c(&self) -> bool;
    fn add_c(&self, other: &Self) -> Self;
    fn mul_c(&self, other: &Self) -> Self;
    fn neg_c(&self) -> Self;
    fn from_rational(q: BigRational) -> Self;
    fn sub_c(&self, other: &Self) -> Self {
        self.add_c(&other.neg_c())
    }
}

impl Coeff for BigRational {
    fn zero_c() -> Self {
        Zero::zero()
    }
    fn one_c() -> Self {
        One::one()
    }
    fn is_zero_c(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_c(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_c(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn from_rational(q: BigRational) -> Self {
        q
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Scale down huge numerators/denominators before dividing.
            let nb = q.numer().bits() as i64;
            let db = q.denom().bits() as i64;
            let shift = (nb.max(db) - 900).max(0) as usize;
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

/// Format a rational as `"num/den"` (denominator always present).
pub fn rat_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Decompose `n = s² · f` with `f` squarefree.
pub fn squarefree_split(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut rem = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= rem {
        let mut count = 0u32;
        loop {
            let (q, r) = rem.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            rem = q;
            count += 1;
        }
        if count > 0 {
            square *= p.pow(count / 2);
            if count % 2 == 1 {
                free *= &p;
            }
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    free *= rem;
    (square, free)
}

/// `Σ q·√p` with squarefree integer radicands.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Surd {
    terms: BTreeMap<BigUint, BigRational>,
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn one() -> Self {
        Surd::from_rational(rat_int(1))
    }

    pub fn from_int(n: i64) -> Self {
        Surd::from_rational(rat_int(n))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut s = Surd::zero();
        if !q.is_zero() {
            s.terms.insert(BigUint::one(), q);
        }
        s
    }

    /// `√r` for a nonnegative rational `r`.
    pub fn sqrt(r: &BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::NotInvertible(format!("square root of negative {r}")));
        }
        Ok(Self::sqrt_abs_signed(r, 1))
    }

    /// `sign(r)·√|r|`: the usual encoding of a signed square root.
    pub fn signed_sqrt(r: &BigRational) -> Self {
        let sign = if r.is_negative() { -1 } else { 1 };
        Self::sqrt_abs_signed(&r.abs(), sign)
    }

    fn sqrt_abs_signed(r: &BigRational, sign: i64) -> Self {
        if r.is_zero() {
            return Surd::zero();
        }
        // √(a/b) = √(ab)/b
        let a = r.numer().magnitude();
        let b = r.denom().magnitude();
        let (s, f) = squarefree_split(&(a * b));
        let q = BigRational::new(BigInt::from_biguint(Sign::Plus, s) * sign, BigInt::from_biguint(Sign::Plus, b.clone()));
        Surd::term(q, f)
    }

    /// `q·√p` for squarefree `p` (not checked).
    fn term(q: BigRational, p: BigUint) -> Self {
        let mut s = Surd::zero();
        if !q.is_zero() {
            s.terms.insert(p, q);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&BigUint::one()).is_some_and(|q| q.is_one())
    }

    /// Terms `(q, p)` in increasing radicand order.
    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &BigUint)> {
        self.terms.iter().map(|(p, q)| (q, p))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The value as a rational, if it has no irrational part.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(rat_int(0)),
            1 => self.terms.get(&BigUint::one()).cloned(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, q)| rat_to_f64(q) * p.to_f64().unwrap_or(f64::INFINITY).sqrt())
            .sum()
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        if q.is_zero() {
            return Surd::zero();
        }
        Surd { terms: self.terms.iter().map(|(p, c)| (p.clone(), c * q)).collect() }
    }

    /// Square, valid as a rational only for single-term surds.
    pub fn square_rational(&self) -> Option<BigRational> {
        (self * self).as_rational()
    }

    /// Inverse of a single-term surd `q√p` is `√p/(q p)`.
    pub fn inverse(&self) -> Result<Self> {
        if self.terms.len() != 1 {
            return Err(Error::NotInvertible(format!("{self}")));
        }
        let (p, q) = self.terms.iter().next().unwrap();
        let pq = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, p.clone())) * q;
        Ok(Surd::term(pq.recip(), p.clone()))
    }

    /// Sign of the value (exact for single-term surds; numeric otherwise).
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.terms.len() == 1 {
            if self.terms.values().next().unwrap().is_negative() {
                -1
            } else {
                1
            }
        } else if self.to_f64() < 0.0 {
            -1
        } else {
            1
        }
    }
}

impl Add<&Surd> for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Surd> for Surd {
    fn add_assign(&mut self, rhs: &Surd) {
        for (p, q) in &rhs.terms {
            let e = self.terms.entry(p.clone()).or_insert_with(|| rat_int(0));
            *e += q;
            if e.is_zero() {
                self.terms.remove(p);
            }
        }
    }
}

impl Sub<&Surd> for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        self + &(-rhs)
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { terms: self.terms.iter().map(|(p, q)| (p.clone(), -q)).collect() }
    }
}

impl Mul<&Surd> for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let mut out = Surd::zero();
        for (p1, q1) in &self.terms {
            for (p2, q2) in &rhs.terms {
                // p1, p2 squarefree: p1 p2 = g² (p1/g)(p2/g), the latter squarefree.
                let g = p1.gcd(p2);
                let rad = (p1 / &g) * (p2 / &g);
                let q = q1 * q2 * BigRational::from_integer(BigInt::from_biguint(Sign::Plus, g));
                out += &Surd::term(q, rad);
            }
        }
        out
    }
}

impl Coeff for Surd {
    fn zero_c() -> Self {
        Surd::zero()
    }
    fn one_c() -> Self {
        Surd::one()
    }
    fn is_zero_c(&self) -> bool {
        Surd::is_zero(self)
    }
    fn add_c(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_c(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn from_rational(q: BigRational) -> Self {
        Surd::from_rational(q)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (p, q)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if p.is_one() {
                write!(f, "{q}")?;
            } else if q.is_one() {
                write!(f, "√{p}")?;
            } else {
                write!(f, "({q})√{p}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Surd({self})")
    }
}

#[derive(Serialize)]
struct SurdTermJson {
    q: String,
    p: String,
}

/// `{"terms":[{"q":"num/den","p":"num/den"}]}`
impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<SurdTermJson> = self
            .terms
            .iter()
            .map(|(p, q)| SurdTermJson { q: rat_string(q), p: format!("{p}/1") })
            .collect();
        let mut st = ser.serialize_struct("Surd", 1)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

/// Complex surd `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct CSurd {
    pub re: Surd,
    pub im: Surd,
}

impl CSurd {
    pub fn real(re: Surd) -> Self {
        CSurd { re, im: Surd::zero() }
    }

    pub fn i() -> Self {
        CSurd { re: Surd::zero(), im: Surd::one() }
    }

    pub fn from_int(n: i64) -> Self {
        CSurd::real(Surd::from_int(n))
    }

    pub fn conj(&self) -> Self {
        CSurd { re: self.re.clone(), im: -&self.im }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CSurd { re: self.re.scale(q), im: self.im.scale(q) }
    }

    /// Inverse when one of the parts is zero and the other a single term.
    pub fn inverse(&self) -> Result<Self> {
        if self.im.is_zero() {
            Ok(CSurd::real(self.re.inverse()?))
        } else if self.re.is_zero() {
            // 1/(i b) = -i/b
            Ok(CSurd { re: Surd::zero(), im: -&self.im.inverse()? })
        } else {
            Err(Error::NotInvertible(format!("{self}")))
        }
    }

    pub fn mul_i(&self) -> Self {
        CSurd { re: -&self.im, im: self.re.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero_c()
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_c(o)
    }
}

impl Coeff for CSurd {
    fn zero_c() -> Self {
        CSurd::default()
    }
    fn one_c() -> Self {
        CSurd::real(Surd::one())
    }
    fn is_zero_c(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add_c(&self, o: &Self) -> Self {
        CSurd { re: &self.re + &o.re, im: &self.im + &o.im }
    }
    fn mul_c(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return CSurd::real(&self.re * &o.re);
        }
        CSurd {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
    fn neg_c(&self) -> Self {
        CSurd { re: -&self.re, im: -&self.im }
    }
    fn from_rational(q: BigRational) -> Self {
        CSurd::real(Surd::from_rational(q))
    }
}

impl fmt::Display for CSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "i({})", self.im),
            (false, false) => write!(f, "{} + i({})", self.re, self.im),
        }
    }
}

impl fmt::Debug for CSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CSurd({self})")
    }
}
