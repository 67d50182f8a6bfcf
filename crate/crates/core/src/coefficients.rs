//! Exact Clebsch–Gordan coefficients and Wigner 3-j / 6-j symbols.
//!
//! Phase convention: Condon–Shortley. `⟨j1 j1; j2 (j-j1) | j j⟩ > 0`, ladder
//! matrix elements are real and nonnegative. Every value is returned as an
//! exact [`Surd`]; couplings that violate a selection rule evaluate to zero.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::halfint::HalfInt;
use crate::surd::{rat_int, Surd};

/// Factorials up to this argument are memoized.
pub const DEFAULT_FACTORIAL_CAP: usize = 200;

fn factorial_table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(DEFAULT_FACTORIAL_CAP + 1);
        t.push(BigInt::one());
        for i in 1..=DEFAULT_FACTORIAL_CAP {
            let next = &t[i - 1] * BigInt::from(i);
            t.push(next);
        }
        t
    })
}

/// `n!` as an exact integer.
pub fn factorial(n: i64) -> BigInt {
    assert!(n >= 0, "factorial of negative {n}");
    let t = factorial_table();
    let n = n as usize;
    if n < t.len() {
        return t[n].clone();
    }
    let mut acc = t[t.len() - 1].clone();
    for i in t.len()..=n {
        acc *= BigInt::from(i);
    }
    acc
}

fn fact_h(x: HalfInt) -> BigInt {
    factorial(x.as_integer().expect("factorial of a non-integer"))
}

/// Triangle and integrality condition for three spins.
pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    !(a.is_negative() || b.is_negative() || c.is_negative())
        && (a + b + c).is_integer()
        && c <= a + b
        && c >= (a - b).abs()
}

/// Arguments of `⟨j1 m1; j2 m2 | j m⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CgKey {
    pub j1: HalfInt,
    pub j2: HalfInt,
    pub j: HalfInt,
    pub m1: HalfInt,
    pub m2: HalfInt,
    pub m: HalfInt,
}

impl CgKey {
    pub fn new(j1: HalfInt, j2: HalfInt, j: HalfInt, m1: HalfInt, m2: HalfInt, m: HalfInt) -> Self {
        CgKey { j1, j2, j, m1, m2, m }
    }

    /// All selection rules: triangle, projection ranges, parity, `m = m1+m2`.
    pub fn is_allowed(&self) -> bool {
        let proj_ok = |j: HalfInt, m: HalfInt| m.abs() <= j && j.congruent(m);
        triangle(self.j1, self.j2, self.j)
            && proj_ok(self.j1, self.m1)
            && proj_ok(self.j2, self.m2)
            && proj_ok(self.j, self.m)
            && self.m == self.m1 + self.m2
    }
}

/// `{j1 j2 j3; j4 j5 j6}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SixJKey(pub [HalfInt; 6]);

impl SixJKey {
    pub fn is_allowed(&self) -> bool {
        let [j1, j2, j3, j4, j5, j6] = self.0;
        triangle(j1, j2, j3) && triangle(j1, j5, j6) && triangle(j4, j2, j6) && triangle(j4, j5, j3)
    }

    /// The 24 images under column permutations and upper/lower swaps of two
    /// columns (the tetrahedral symmetry group).
    pub fn symmetric_images(&self) -> Vec<SixJKey> {
        let [a, b, c, d, e, f] = self.0;
        let cols = [(a, d), (b, e), (c, f)];
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(24);
        for p in perms {
            let c0 = cols[p[0]];
            let c1 = cols[p[1]];
            let c2 = cols[p[2]];
            // identity, and the three ways of flipping two columns
            for flip in [[false, false, false], [true, true, false], [true, false, true], [false, true, true]] {
                let pick = |col: (HalfInt, HalfInt), fl: bool| if fl { (col.1, col.0) } else { col };
                let (u0, l0) = pick(c0, flip[0]);
                let (u1, l1) = pick(c1, flip[1]);
                let (u2, l2) = pick(c2, flip[2]);
                out.push(SixJKey([u0, u1, u2, l0, l1, l2]));
            }
        }
        out
    }
}

/// Clebsch–Gordan coefficient `⟨j1 m1; j2 m2 | j m⟩` by the Racah formula.
pub fn clebsch_gordan(j1: HalfInt, j2: HalfInt, j: HalfInt, m1: HalfInt, m2: HalfInt, m: HalfInt) -> Surd {
    let key = CgKey::new(j1, j2, j, m1, m2, m);
    if !key.is_allowed() {
        return Surd::zero();
    }
    let pre_num = BigInt::from(j.twice() + 1)
        * fact_h(j + j1 - j2)
        * fact_h(j - j1 + j2)
        * fact_h(j1 + j2 - j)
        * fact_h(j + m)
        * fact_h(j - m)
        * fact_h(j1 - m1)
        * fact_h(j1 + m1)
        * fact_h(j2 - m2)
        * fact_h(j2 + m2);
    let pre_den = fact_h(j1 + j2 + j + HalfInt::ONE);
    let prefactor = BigRational::new(pre_num, pre_den);

    // Σ_k (-1)^k / [k! (j1+j2-j-k)! (j1-m1-k)! (j2+m2-k)! (j-j2+m1+k)! (j-j1-m2+k)!]
    let a = (j1 + j2 - j).as_integer().unwrap();
    let b = (j1 - m1).as_integer().unwrap();
    let c = (j2 + m2).as_integer().unwrap();
    let d = (j - j2 + m1).as_integer().unwrap();
    let e = (j - j1 - m2).as_integer().unwrap();
    let kmin = 0.max(-d).max(-e);
    let kmax = a.min(b).min(c);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = factorial(k) * factorial(a - k) * factorial(b - k) * factorial(c - k) * factorial(d + k) * factorial(e + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Surd::sqrt(&prefactor).expect("nonnegative prefactor").scale(&sum)
}

/// Wigner 3-j symbol via its relation to the Clebsch–Gordan coefficient.
pub fn wigner_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> Surd {
    let cg = clebsch_gordan(j1, j2, j3, m1, m2, -m3);
    if cg.is_zero() {
        return cg;
    }
    let phase = (j1 - j2 - m3).parity_sign().expect("integer phase");
    let norm = Surd::sqrt(&BigRational::new(BigInt::one(), BigInt::from(j3.twice() + 1))).unwrap();
    (&cg * &norm).scale(&rat_int(phase))
}

fn delta_sq(a: HalfInt, b: HalfInt, c: HalfInt) -> BigRational {
    BigRational::new(fact_h(a + b - c) * fact_h(a - b + c) * fact_h(b + c - a), fact_h(a + b + c + HalfInt::ONE))
}

/// Wigner 6-j symbol `{j1 j2 j3; j4 j5 j6}` by the Racah formula.
pub fn wigner_6j(j1: HalfInt, j2: HalfInt, j3: HalfInt, j4: HalfInt, j5: HalfInt, j6: HalfInt) -> Surd {
    let key = SixJKey([j1, j2, j3, j4, j5, j6]);
    if !key.is_allowed() {
        return Surd::zero();
    }
    let tri = delta_sq(j1, j2, j3) * delta_sq(j1, j5, j6) * delta_sq(j4, j2, j6) * delta_sq(j4, j5, j3);
    let i = |x: HalfInt| x.as_integer().unwrap();
    let a1 = i(j1 + j2 + j3);
    let a2 = i(j1 + j5 + j6);
    let a3 = i(j4 + j2 + j6);
    let a4 = i(j4 + j5 + j3);
    let b1 = i(j1 + j2 + j4 + j5);
    let b2 = i(j2 + j3 + j5 + j6);
    let b3 = i(j3 + j1 + j6 + j4);
    let tmin = a1.max(a2).max(a3).max(a4);
    let tmax = b1.min(b2).min(b3);
    let mut sum = BigRational::zero();
    for t in tmin..=tmax {
        let num = factorial(t + 1);
        let den = factorial(t - a1)
            * factorial(t - a2)
            * factorial(t - a3)
            * factorial(t - a4)
            * factorial(b1 - t)
            * factorial(b2 - t)
            * factorial(b3 - t);
        let term = BigRational::new(num, den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Surd::sqrt(&tri).unwrap().scale(&sum)
}

/// Ladder matrix element `√((j∓m)(j±m+1))` as an exact surd.
fn ladder_element(j: HalfInt, m: HalfInt, raise: bool) -> Surd {
    let (a, b) = if raise { (j - m, j + m + HalfInt::ONE) } else { (j + m, j - m + HalfInt::ONE) };
    // a, b are integers whenever m is a valid projection of j
    let prod = BigRational::new(BigInt::from(a.twice() * b.twice()), BigInt::from(4));
    Surd::sqrt(&prod).unwrap()
}

/// Independent CG oracle: builds the coupled multiplet `|j m⟩` explicitly on
/// the `(2j1+1)(2j2+1)` product basis. The top state `|j j⟩` is the vector in
/// the `M = j` block annihilated by the total raising operator (hence
/// orthogonal to every multiplet with larger `j`), fixed by the
/// Condon–Shortley sign; lower states come from the total lowering operator.
pub fn coupling_oracle_cg(j1: HalfInt, j2: HalfInt, j: HalfInt, m1: HalfInt, m2: HalfInt, m: HalfInt) -> Surd {
    if !CgKey::new(j1, j2, j, m1, m2, m).is_allowed() {
        return Surd::zero();
    }
    let n1 = j1.dim();
    let n2 = j2.dim();
    let idx = |a: HalfInt, b: HalfInt| -> usize {
        let i1 = ((j1 - a).twice() / 2) as usize;
        let i2 = ((j2 - b).twice() / 2) as usize;
        i1 * n2 + i2
    };
    let mut state = vec![Surd::zero(); n1 * n2];

    // Highest-weight state: c(a+1) = -c(a) √((j1-a)(j1+a+1)) / √((j2-(j-a-1))(j2+j-a)).
    let a_min = (-j1).max(j - j2);
    let a_max = j1.min(j + j2);
    let mut c = Surd::one();
    let mut a = a_min;
    let mut norm_sq = BigRational::zero();
    loop {
        state[idx(a, j - a)] = c.clone();
        norm_sq += c.square_rational().expect("single-term coefficient");
        if a == a_max {
            break;
        }
        let up1 = ladder_element(j1, a, true);
        let up2 = ladder_element(j2, j - a - HalfInt::ONE, true);
        c = -&(&(&c * &up1) * &up2.inverse().expect("nonzero ladder element"));
        a = a + HalfInt::ONE;
    }
    // Normalise and fix the sign so the m1 = j1 component is positive.
    let mut scale = Surd::sqrt(&norm_sq).unwrap().inverse().unwrap();
    if state[idx(a_max, j - a_max)].signum() < 0 {
        scale = -&scale;
    }
    for s in state.iter_mut() {
        *s = &*s * &scale;
    }

    // Lower from M = j down to M = m.
    let mut mm = j;
    while mm > m {
        let mut next = vec![Surd::zero(); n1 * n2];
        for a in j1.projections() {
            for b in j2.projections() {
                let coef = &state[idx(a, b)];
                if coef.is_zero() {
                    continue;
                }
                if a > -j1 {
                    let t = idx(a - HalfInt::ONE, b);
                    next[t] += &(coef * &ladder_element(j1, a, false));
                }
                if b > -j2 {
                    let t = idx(a, b - HalfInt::ONE);
                    next[t] += &(coef * &ladder_element(j2, b, false));
                }
            }
        }
        let inv = ladder_element(j, mm, false).inverse().expect("nonzero lowering element");
        for s in next.iter_mut() {
            *s = &*s * &inv;
        }
        state = next;
        mm = mm - HalfInt::ONE;
    }
    state[idx(m1, m2)].clone()
}
