//! Closed-form counts and bounds on family sizes, evaluated exactly.
//!
//! Integers are `BigInt`, quotients that need not be integral stay `BigRational`, and
//! expressions with `sqrt 2` or `e^{sqrt n}` are returned as outward-rounded
//! [`Interval`]s at a caller-chosen working precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::enumeration::PartitionShape;
use crate::error::{invalid, Result};
use crate::interval::{self, div_exact, Interval};

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << e as usize
}

fn rat(n: BigInt) -> BigRational {
    BigRational::from_integer(n)
}

/// Exact integer, exact rational, or an enclosure of an irrational value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundValue {
    Integer(BigInt),
    Rational(BigRational),
    Interval(Interval),
}

impl BoundValue {
    pub fn lo(&self) -> BigRational {
        match self {
            BoundValue::Integer(i) => rat(i.clone()),
            BoundValue::Rational(q) => q.clone(),
            BoundValue::Interval(iv) => iv.lo().clone(),
        }
    }

    pub fn hi(&self) -> BigRational {
        match self {
            BoundValue::Integer(i) => rat(i.clone()),
            BoundValue::Rational(q) => q.clone(),
            BoundValue::Interval(iv) => iv.hi().clone(),
        }
    }

    /// Ordering of the bound against `x`, or `None` if an interval straddles it.
    pub fn cmp_integer(&self, x: &BigInt) -> Option<Ordering> {
        match self {
            BoundValue::Integer(i) => Some(i.cmp(x)),
            BoundValue::Rational(q) => Some(q.cmp(&rat(x.clone()))),
            BoundValue::Interval(iv) => iv.cmp_integer(x),
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Integer(i) => write!(f, "{i}"),
            BoundValue::Rational(q) => write!(f, "{q}"),
            BoundValue::Interval(iv) => write!(f, "{iv}"),
        }
    }
}

/// Hamilton cycles on `[n]` (even `n`) containing a fixed perfect matching:
/// `(n/2)! 2^{n/2} / n`.
pub fn eq1_count(n: u64) -> Result<BigInt> {
    if n < 4 || n % 2 == 1 {
        return Err(invalid(format!("matching-cycle count needs even n >= 4, got {n}")));
    }
    let num = factorial(n / 2) * pow2(n / 2);
    Ok(div_exact(&num, &BigInt::from(n)).expect("(n/2)! 2^(n/2) is divisible by even n >= 4"))
}

/// Hamilton cycles on `[n]` (odd `n`) containing a fixed near-matching:
/// `floor(n/2)! 2^{floor(n/2)} / (n - 1)`.
pub fn near_count(n: u64) -> Result<BigInt> {
    if n < 5 || n % 2 == 0 {
        return Err(invalid(format!("near-matching cycle count needs odd n >= 5, got {n}")));
    }
    let m = n / 2;
    let num = factorial(m) * pow2(m);
    Ok(div_exact(&num, &BigInt::from(n - 1)).expect("m! 2^m is divisible by 2m"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem1Bounds {
    /// `(n-1)! / (2 floor(n/2)! (1+sqrt 2)^n)`.
    pub lower: Interval,
    /// `n! / (floor(n/2)! 2^{floor(n/2)})`.
    pub upper: BigInt,
    /// `ceil(n/2)! 2^{ceil(n/2)}`.
    pub upper_weak: BigInt,
}

/// Bounds on the largest Hamilton-cycle family with pairwise degree-4 unions.
pub fn theorem1_bounds(n: u64, bits: u32) -> Result<Theorem1Bounds> {
    if n < 3 {
        return Err(invalid(format!("cycle bounds need n >= 3, got {n}")));
    }
    let m = n / 2;
    let upper = div_exact(&factorial(n), &(factorial(m) * pow2(m))).expect("integral for every n");
    let c = n.div_ceil(2);
    let upper_weak = factorial(c) * pow2(c);
    let (a, b) = interval::one_plus_sqrt2_pow(n as u32);
    let growth = interval::quadratic_sqrt2(&a, &b, bits + 16);
    let numer = BigRational::new(factorial(n - 1), 2 * factorial(m));
    let lower = growth.recip_scaled(&numer).rounded(bits);
    Ok(Theorem1Bounds {
        lower,
        upper,
        upper_weak,
    })
}

/// Literal sum `sum_{s=ceil(n/3)}^{floor(n/2)} C(s, n-2s) 2^s (s-1)!`.
pub fn eq3_bound(n: u64) -> BigInt {
    (n.div_ceil(3)..=n / 2)
        .filter(|&s| s >= 1)
        .map(|s| binomial(s, n - 2 * s) * pow2(s) * factorial(s - 1))
        .sum()
}

/// Per-`s` term count of minimal coverings used by the incompatibility sum: `C(s, n-2s)`.
pub fn covering_formula(n: u64, s: u64) -> BigInt {
    if 2 * s > n {
        return BigInt::zero();
    }
    binomial(s, n - 2 * s)
}

/// `(1 + sqrt 2)^n floor(n/2)!`, the chained bound on incompatible cycles.
pub fn final_bound(n: u64, bits: u32) -> Interval {
    let (a, b) = interval::one_plus_sqrt2_pow(n as u32);
    interval::quadratic_sqrt2(&a, &b, bits + 16)
        .scale(&rat(factorial(n / 2)))
        .rounded(bits)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theorem2Bounds {
    /// Size of the triangle construction: `n!/((n/3)! 6^{n/3})` when `3 | n`, else
    /// `(3q)!/(q! 6^q)` with `n = 3q + r`, `r` in `{4, 5}`.
    pub lower: BigInt,
    pub lower_is_closed_form: bool,
    /// `e^{sqrt n} n! / floor(n/3)!`.
    pub upper: Interval,
}

/// `(q, r)` with `n = 3q + r`, `r = 0` when `3 | n`, else `r` in `{4, 5}`.
pub fn triangle_split(n: u64) -> (u64, u64) {
    match n % 3 {
        0 => (n / 3, 0),
        r => (n / 3 - 1, r + 3),
    }
}

pub fn triangle_factor_count(n: u64) -> BigInt {
    debug_assert_eq!(n % 3, 0);
    let q = n / 3;
    div_exact(&factorial(n), &(factorial(q) * BigInt::from(6).pow(q as u32))).expect("integral")
}

pub fn theorem2_bounds(n: u64, bits: u32) -> Result<Theorem2Bounds> {
    if n < 3 {
        return Err(invalid(format!("2-regular bounds need n >= 3, got {n}")));
    }
    let (q, r) = triangle_split(n);
    let lower = triangle_factor_count(3 * q);
    let sqrt_n = interval::sqrt_enclosure(&rat(n.into()), bits + 16);
    let growth = interval::exp_enclosure(&sqrt_n, bits + 16);
    let upper = growth.scale(&BigRational::new(factorial(n), factorial(n / 3))).rounded(bits);
    Ok(Theorem2Bounds {
        lower,
        lower_is_closed_form: r == 0,
        upper,
    })
}

/// The counting quantities attached to one 2-regular shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeBounds {
    pub n: u64,
    pub t: u64,
    /// Odd parts.
    pub k: u64,
    /// Single edges of the covering pattern, `3k + 2l = n`.
    pub l: u64,
    /// `n! / (t! 2^t prod n_i)`, claimed upper bound on `|F(p)|`.
    pub f_upper: BigRational,
    /// `(k+l)! / (n t! prod n_i)`, claimed lower bound on `|C(p)|`.
    pub c_lower: BigRational,
    /// `n n! / (k+l)!`.
    pub m_upper_shape: BigRational,
    /// `n n! / floor(n/3)!`.
    pub m_upper: BigRational,
    /// `k + l >= n/3`.
    pub k_plus_l_at_least_third: bool,
}

pub fn shape_bounds(p: &PartitionShape) -> Result<ShapeBounds> {
    p.check_two_regular()?;
    let n = p.n() as u64;
    let t = p.t() as u64;
    let k = p.odd_parts() as u64;
    let l = p.pattern_edges() as u64;
    let prod: BigInt = p.parts().iter().map(|&x| BigInt::from(x)).product();
    let nf = factorial(n);
    let f_upper = BigRational::new(nf.clone(), factorial(t) * pow2(t) * &prod);
    let c_lower = BigRational::new(factorial(k + l), BigInt::from(n) * factorial(t) * &prod);
    let m_upper_shape = BigRational::new(BigInt::from(n) * &nf, factorial(k + l));
    let m_upper = BigRational::new(BigInt::from(n) * &nf, factorial(n / 3));
    Ok(ShapeBounds {
        n,
        t,
        k,
        l,
        f_upper,
        c_lower,
        m_upper_shape,
        m_upper,
        k_plus_l_at_least_third: 3 * (k + l) >= n,
    })
}

/// Number of partitions of `n`, by the pentagonal-number recurrence.
pub fn partition_count(n: u64) -> BigInt {
    let n = n as usize;
    let mut table = vec![BigInt::zero(); n + 1];
    table[0] = BigInt::one();
    for i in 1..=n {
        let mut sum = BigInt::zero();
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > i {
                break;
            }
            let mut term = table[i - g1].clone();
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= i {
                term += &table[i - g2];
            }
            if k % 2 == 1 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        table[i] = sum;
    }
    table.swap_remove(n)
}

/// Enclosure of `e^{sqrt n} / n`.
pub fn hardy_ramanujan(n: u64, bits: u32) -> Interval {
    assert!(n >= 1);
    let sqrt_n = interval::sqrt_enclosure(&rat(n.into()), bits + 16);
    interval::exp_enclosure(&sqrt_n, bits + 16)
        .scale(&BigRational::new(BigInt::one(), n.into()))
        .rounded(bits)
}

/// Result of comparing an exact count against an enclosure: `Some(true)` if
/// `count < bound` is decided, `Some(false)` if `count >= bound` is decided.
pub fn strictly_below<F: Fn(u32) -> Interval>(count: &BigInt, bound: F) -> Option<bool> {
    let (ord, _) = interval::decide(bound, &rat(count.clone()));
    ord.map(|o| o == Ordering::Greater)
}
