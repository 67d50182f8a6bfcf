//! Half-integers stored as doubled integers.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// An exact half-integer `twice / 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct HalfInt {
    twice: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    #[inline]
    pub const fn from_twice(twice: i64) -> Self {
        HalfInt { twice }
    }

    #[inline]
    pub const fn int(n: i64) -> Self {
        HalfInt { twice: 2 * n }
    }

    #[inline]
    pub const fn twice(self) -> i64 {
        self.twice
    }

    #[inline]
    pub fn is_integer(self) -> bool {
        self.twice % 2 == 0
    }

    /// Integer value, if this is an integer.
    pub fn as_integer(self) -> Option<i64> {
        if self.is_integer() {
            Some(self.twice / 2)
        } else {
            None
        }
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }

    pub fn abs(self) -> Self {
        HalfInt { twice: self.twice.abs() }
    }

    pub fn is_negative(self) -> bool {
        self.twice < 0
    }

    /// `2j + 1`, the dimension of the spin-`j` irrep.
    pub fn dim(self) -> usize {
        debug_assert!(self.twice >= 0);
        (self.twice + 1) as usize
    }

    /// `(-1)^self` for integer `self`; `None` otherwise.
    pub fn parity_sign(self) -> Option<i64> {
        self.as_integer().map(|n| if n.rem_euclid(2) == 0 { 1 } else { -1 })
    }

    /// `j, j-1, ..., -j`.
    pub fn projections(self) -> impl DoubleEndedIterator<Item = HalfInt> + Clone {
        let t = self.twice;
        (0..=t).map(move |i| HalfInt::from_twice(t - 2 * i))
    }

    /// Same parity class (`a - b` integer).
    pub fn congruent(self, other: HalfInt) -> bool {
        (self.twice - other.twice) % 2 == 0
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice + rhs.twice }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt { twice: self.twice - rhs.twice }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl From<i64> for HalfInt {
    fn from(n: i64) -> Self {
        HalfInt::int(n)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// Accepts `"p"` or `"p/2"` with `p` odd; anything else (floats, other
/// denominators, unreduced forms like `"4/2"`) is rejected.
impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::Parse(format!("invalid half-integer {s:?}: expected \"p\" or \"p/2\""));
        let s = s.trim();
        match s.split_once('/') {
            None => {
                let n: i64 = s.parse().map_err(|_| bad())?;
                Ok(HalfInt::int(n))
            }
            Some((num, den)) => {
                if den != "2" {
                    return Err(bad());
                }
                let p: i64 = num.parse().map_err(|_| bad())?;
                if p % 2 == 0 {
                    return Err(bad());
                }
                Ok(HalfInt::from_twice(p))
            }
        }
    }
}

impl From<HalfInt> for String {
    fn from(h: HalfInt) -> String {
        h.to_string()
    }
}

impl TryFrom<String> for HalfInt {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl PartialEq<i64> for HalfInt {
    fn eq(&self, other: &i64) -> bool {
        self.twice == 2 * other
    }
}

impl PartialOrd<i64> for HalfInt {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.twice.partial_cmp(&(2 * other))
    }
}

/// Shorthand: `h(3, 2)` is 3/2, `h(1, 1)` is 1.
pub fn h(num: i64, den: i64) -> HalfInt {
    match den {
        1 => HalfInt::int(num),
        2 => HalfInt::from_twice(num),
        _ => panic!("half-integer denominator must be 1 or 2"),
    }
}
