//! Closed intervals with exact rational endpoints.
//!
//! Irrational quantities are enclosed by intervals whose endpoints are dyadic
//! rationals with denominator `2^precision`. Arithmetic only ever rounds outward, so
//! the true value stays inside. Comparisons against integers either decide or report
//! that the enclosure straddles the integer.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub const DEFAULT_PRECISION: u32 = 128;
pub const MAX_PRECISION: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
    precision: u32,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn floor_dyadic(q: &BigRational, bits: u32) -> BigRational {
    let scaled = q * BigRational::from_integer(pow2(bits));
    BigRational::new(scaled.floor().to_integer(), pow2(bits))
}

fn ceil_dyadic(q: &BigRational, bits: u32) -> BigRational {
    let scaled = q * BigRational::from_integer(pow2(bits));
    BigRational::new(scaled.ceil().to_integer(), pow2(bits))
}

impl Interval {
    pub fn point(q: BigRational) -> Self {
        Interval {
            lo: q.clone(),
            hi: q,
            precision: 0,
        }
    }

    pub fn new(lo: BigRational, hi: BigRational, precision: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi, precision }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// Rounds endpoints outward to multiples of `2^-bits`.
    pub fn rounded(&self, bits: u32) -> Self {
        Interval {
            lo: floor_dyadic(&self.lo, bits),
            hi: ceil_dyadic(&self.hi, bits),
            precision: bits,
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
            precision: self.precision.max(other.precision),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Interval {
            lo,
            hi,
            precision: self.precision,
        }
    }

    /// Product of two intervals with non-negative lower endpoints.
    pub fn mul_nonneg(&self, other: &Interval) -> Interval {
        assert!(!self.lo.is_negative() && !other.lo.is_negative());
        Interval {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
            precision: self.precision.max(other.precision),
        }
    }

    /// `c / self` for `c >= 0` and a strictly positive interval.
    pub fn recip_scaled(&self, c: &BigRational) -> Interval {
        assert!(self.lo.is_positive() && !c.is_negative());
        Interval {
            lo: c / &self.hi,
            hi: c / &self.lo,
            precision: self.precision,
        }
    }

    /// `Some(ordering of value vs x)` when decided for every point of the interval.
    pub fn cmp_integer(&self, x: &BigInt) -> Option<Ordering> {
        self.cmp_rational(&BigRational::from_integer(x.clone()))
    }

    pub fn cmp_rational(&self, x: &BigRational) -> Option<Ordering> {
        if &self.hi < x {
            Some(Ordering::Less)
        } else if &self.lo > x {
            Some(Ordering::Greater)
        } else if &self.lo == x && &self.hi == x {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        ((&self.lo + &self.hi) / BigRational::from_integer(2.into()))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Enclosure of `sqrt(x)` for rational `x >= 0`.
pub fn sqrt_enclosure(x: &BigRational, bits: u32) -> Interval {
    assert!(!x.is_negative());
    // floor(sqrt(floor(x * 4^bits))) = floor(sqrt(x * 4^bits))
    let scaled = (x * BigRational::from_integer(pow2(2 * bits))).floor().to_integer();
    let root = scaled.to_biguint().expect("non-negative").sqrt();
    let root = BigInt::from(root);
    let exact = &root * &root == scaled && (x * BigRational::from_integer(pow2(2 * bits))).is_integer();
    let lo = BigRational::new(root.clone(), pow2(bits));
    let hi = if exact { lo.clone() } else { BigRational::new(root + 1, pow2(bits)) };
    Interval::new(lo, hi, bits)
}

/// Enclosure of `x^(1/k)` for rational `x >= 0`, `k >= 1`.
pub fn root_enclosure(x: &BigRational, k: u32, bits: u32) -> Interval {
    assert!(k >= 1 && !x.is_negative());
    if k == 1 {
        return Interval::point(x.clone());
    }
    let scale = pow2(k * bits);
    let scaled_q = x * BigRational::from_integer(scale);
    let scaled = scaled_q.floor().to_integer();
    let root: BigUint = scaled.to_biguint().expect("non-negative").nth_root(k);
    let root = BigInt::from(root);
    let exact = num_traits::pow(root.clone(), k as usize) == scaled && scaled_q.is_integer();
    let lo = BigRational::new(root.clone(), pow2(bits));
    let hi = if exact { lo.clone() } else { BigRational::new(root + 1, pow2(bits)) };
    Interval::new(lo, hi, bits)
}

/// Enclosure of `exp(x)` for a rational `x >= 0`.
fn exp_point(x: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let one = BigRational::one();
    let tol = BigRational::new(BigInt::one(), pow2(bits + 8));
    let mut sum = one.clone();
    let mut term = one.clone();
    let mut k: u64 = 0;
    loop {
        k += 1;
        term = term * x / BigRational::from_integer(k.into());
        sum += &term;
        // tail after term k: <= term * x/(k+1) / (1 - x/(k+2))
        let kk = BigRational::from_integer((k + 2).into());
        if x < &kk {
            let next = &term * x / BigRational::from_integer((k + 1).into());
            let tail = &next / (&one - x / &kk);
            if tail < tol {
                let lo = floor_dyadic(&sum, bits);
                let hi = ceil_dyadic(&(&sum + tail), bits);
                return (lo, hi);
            }
        }
    }
}

/// Enclosure of `exp` over a non-negative interval, using monotonicity.
pub fn exp_enclosure(x: &Interval, bits: u32) -> Interval {
    assert!(!x.lo().is_negative());
    let (lo, _) = exp_point(x.lo(), bits);
    let (_, hi) = exp_point(x.hi(), bits);
    Interval::new(lo, hi, bits)
}

/// `(1 + sqrt 2)^n` as the exact pair `(a, b)` with value `a + b sqrt 2`.
pub fn one_plus_sqrt2_pow(n: u32) -> (BigInt, BigInt) {
    let (mut a, mut b) = (BigInt::one(), BigInt::zero());
    for _ in 0..n {
        let na = &a + 2 * &b;
        let nb = &a + &b;
        a = na;
        b = nb;
    }
    (a, b)
}

/// Enclosure of `a + b sqrt 2` for `b >= 0`.
pub fn quadratic_sqrt2(a: &BigInt, b: &BigInt, bits: u32) -> Interval {
    let s2 = sqrt_enclosure(&BigRational::from_integer(2.into()), bits + 16);
    s2.scale(&BigRational::from_integer(b.clone()))
        .add(&Interval::point(BigRational::from_integer(a.clone())))
        .rounded(bits)
}

/// Re-evaluates `f` at doubling precision until its comparison with `x` is decided.
/// Returns the last ordering (`None` if still straddling at [`MAX_PRECISION`]) and the
/// precision used.
pub fn decide<F: Fn(u32) -> Interval>(f: F, x: &BigRational) -> (Option<Ordering>, u32) {
    let mut bits = DEFAULT_PRECISION;
    loop {
        let iv = f(bits);
        let ord = iv.cmp_rational(x);
        if ord.is_some() || bits >= MAX_PRECISION {
            return (ord, bits);
        }
        bits *= 2;
    }
}

/// Ceiling of a rational.
pub fn ceil(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

fn pow10(e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Scientific notation with `digits` significant digits, rounded toward +inf when
/// `up` and toward -inf otherwise.
pub fn to_scientific(q: &BigRational, digits: usize, up: bool) -> String {
    assert!(digits >= 1);
    if q.is_zero() {
        return "0".into();
    }
    let negative = q.is_negative();
    let mag = q.abs();
    let mut e = ((mag.numer().bits() as f64 - mag.denom().bits() as f64) * std::f64::consts::LOG10_2) as i64;
    while pow10(e) > mag {
        e -= 1;
    }
    while pow10(e + 1) <= mag {
        e += 1;
    }
    let scaled = &mag / pow10(e - digits as i64 + 1);
    let mut m = if up != negative { scaled.ceil() } else { scaled.floor() }.to_integer();
    if m == num_traits::pow(BigInt::from(10), digits) {
        m = num_traits::pow(BigInt::from(10), digits - 1);
        e += 1;
    }
    let s = m.to_string();
    let mantissa = if digits == 1 { s } else { format!("{}.{}", &s[..1], &s[1..]) };
    format!("{}{mantissa}e{e}", if negative { "-" } else { "" })
}

impl Interval {
    /// Endpoints in scientific notation, rounded outward.
    pub fn decimal_bounds(&self, digits: usize) -> (String, String) {
        (to_scientific(&self.lo, digits, false), to_scientific(&self.hi, digits, true))
    }
}

pub(crate) fn div_exact(a: &BigInt, b: &BigInt) -> Option<BigInt> {
    let (q, r) = a.div_rem(b);
    r.is_zero().then_some(q)
}
