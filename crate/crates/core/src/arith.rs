//! Rational angles modulo one and certified enclosures of `|1 - e^{2 pi i phi}|`.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

pub type Rational = BigRational;

/// Relative slack applied to every floating point result before it is
/// reported as an enclosure bound.
const REL_SLACK: f64 = 1.0 / (1u64 << 48) as f64;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn half() -> Rational {
    rat(1, 2)
}

/// Reduces a rational into `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// A character value `e^{2 pi i phi}` stored as the exact residue `phi mod 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(Rational);

impl Angle {
    pub fn new(q: Rational) -> Self {
        Angle(frac(&q))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::new(rat(n, d))
    }

    pub fn zero() -> Self {
        Angle(Rational::zero())
    }

    /// Builds `numer / p^exp mod 1` without a general gcd: the only common
    /// factors possible are powers of `p`.
    pub fn from_prime_power(numer: BigUint, p: u64, exp: usize) -> Self {
        let modulus = BigUint::from(p).pow(exp as u32);
        let mut n = numer % &modulus;
        if n.is_zero() {
            return Self::zero();
        }
        let mut e = exp;
        if p == 2 {
            let tz = n.trailing_zeros().unwrap_or(0) as usize;
            let shift = tz.min(e);
            n >>= shift;
            e -= shift;
        } else {
            let pb = BigUint::from(p);
            while e > 0 {
                let (q, r) = n.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                n = q;
                e -= 1;
            }
        }
        let den = BigUint::from(p).pow(e as u32);
        Angle(Rational::new_raw(
            BigInt::from_biguint(Sign::Plus, n),
            BigInt::from_biguint(Sign::Plus, den),
        ))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Angle::new(&self.0 * Rational::from_integer(k.clone()))
    }
}

impl Add for &Angle {
    type Output = Angle;
    fn add(self, rhs: &Angle) -> Angle {
        Angle::new(&self.0 + &rhs.0)
    }
}

impl Sub for &Angle {
    type Output = Angle;
    fn sub(self, rhs: &Angle) -> Angle {
        Angle::new(&self.0 - &rhs.0)
    }
}

impl Neg for &Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new(-&self.0)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Angle {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_rational(s).map(Angle::new)
    }
}

/// Parses `p/q` or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer: BigInt = n
        .parse()
        .map_err(|_| ParseError::new(0, format!("invalid numerator `{n}`")))?;
    let denom: BigInt = d
        .parse()
        .map_err(|_| ParseError::new(n.len() + 1, format!("invalid denominator `{d}`")))?;
    if denom.is_zero() {
        return Err(ParseError::new(n.len() + 1, "zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Distance from the angle's value to the nearest integer, in `[0, 1/2]`.
pub fn nearest_int_dist(a: &Angle) -> Rational {
    let one_minus = Rational::one() - &a.0;
    if a.0 <= one_minus {
        a.0.clone()
    } else {
        one_minus
    }
}

/// A certified enclosure of a non-negative real.
///
/// An infinite `hi` marks a lower bound only.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundInterval {
    pub lo: f64,
    pub hi: f64,
    pub exact: bool,
}

impl BoundInterval {
    pub fn exact(v: f64) -> Self {
        Self { lo: v, hi: v, exact: true }
    }

    pub fn zero() -> Self {
        Self::exact(0.0)
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Self { lo, hi, exact: false }
    }

    /// Encloses a floating point approximation with relative error well
    /// below `2^-48`.
    pub fn around(v: f64) -> Self {
        Self::new(down(v), up(v))
    }

    pub fn lower_only(lo: f64) -> Self {
        Self { lo, hi: f64::INFINITY, exact: false }
    }

    pub fn is_lower_only(&self) -> bool {
        self.hi.is_infinite()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Interval sum with outward rounding.
    pub fn add(&self, other: &Self) -> Self {
        // adding a zero endpoint is exact in floating point
        let sum = |a: f64, b: f64, round: fn(f64) -> f64| if a == 0.0 || b == 0.0 { a + b } else { round(a + b) };
        Self {
            lo: sum(self.lo, other.lo, down),
            hi: sum(self.hi, other.hi, up),
            exact: self.exact && other.exact && (self.lo == 0.0 || other.lo == 0.0),
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
            exact: self.exact && other.exact && self.lo == other.lo,
        }
    }

    /// `true` when every point of the interval is strictly below `q`.
    pub fn certainly_below(&self, q: &Rational) -> bool {
        self.hi < rational_lower(q)
    }

    /// `true` when every point of the interval is at least `q`.
    pub fn certainly_at_least(&self, q: &Rational) -> bool {
        self.lo >= rational_upper(q)
    }
}

impl fmt::Display for BoundInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.16e},{:.16e}]", self.lo, self.hi)
    }
}

impl FromStr for BoundInterval {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| ParseError::new(0, "interval must be written as [lo,hi]"))?;
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| ParseError::new(1, "missing comma"))?;
        let lo: f64 = lo.trim().parse().map_err(|_| ParseError::new(1, "invalid lower bound"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| ParseError::new(lo.to_string().len() + 2, "invalid upper bound"))?;
        if !(lo <= hi) {
            return Err(ParseError::new(0, "lower bound exceeds upper bound"));
        }
        Ok(BoundInterval { lo, hi, exact: lo == hi })
    }
}

pub(crate) fn down(v: f64) -> f64 {
    if v <= 0.0 {
        return if v == 0.0 { 0.0 } else { v * (1.0 + REL_SLACK) - f64::MIN_POSITIVE };
    }
    (v - v * REL_SLACK - f64::MIN_POSITIVE).next_down().max(0.0)
}

pub(crate) fn up(v: f64) -> f64 {
    if v.is_infinite() {
        return v;
    }
    (v + v.abs() * REL_SLACK + f64::MIN_POSITIVE).next_up()
}

/// A value `<= q` (for non-negative `q`, clamped at zero).
pub fn rational_lower(q: &Rational) -> f64 {
    let v = q.to_f64().unwrap_or(0.0);
    if q.is_negative() {
        return down_signed(v);
    }
    down(v)
}

/// A value `>= q`.
pub fn rational_upper(q: &Rational) -> f64 {
    let v = q.to_f64().unwrap_or(f64::INFINITY);
    if q.is_negative() {
        return -down(-v);
    }
    up(v)
}

fn down_signed(v: f64) -> f64 {
    -up(-v)
}

/// Encloses the rationals `lo <= hi`; exact when they coincide on a float.
pub fn enclose(lo: &Rational, hi: &Rational) -> BoundInterval {
    if lo == hi {
        if let Some(v) = lo.to_f64() {
            if Rational::from_float(v).as_ref() == Some(lo) {
                return BoundInterval::exact(v);
            }
        }
    }
    BoundInterval::new(rational_lower(lo), rational_upper(hi))
}

/// Enclosure of `pi * q` for `q >= 0`.
pub fn pi_times(q: &Rational) -> BoundInterval {
    if q.is_zero() {
        return BoundInterval::zero();
    }
    BoundInterval::new(down(PI * rational_lower(q)), up(PI * rational_upper(q)))
}

/// Enclosure of `2 sin(pi r)` for `r` in `[0, 1/2]`.
pub(crate) fn chord(r: &Rational) -> BoundInterval {
    if r.is_zero() {
        return BoundInterval::zero();
    }
    if *r == half() {
        return BoundInterval::exact(2.0);
    }
    if *r == rat(1, 6) {
        return BoundInterval::exact(1.0);
    }
    let v = r.to_f64().unwrap_or(0.0);
    let c = 2.0 * (PI * v).sin();
    BoundInterval::new(down(c), up(c).min(2.0))
}

/// Encloses `|1 - e^{2 pi i a}| = 2 sin(pi ||a||)`.
pub fn unit_norm(a: &Angle) -> BoundInterval {
    chord(&nearest_int_dist(a))
}

/// A closed arc `[start, start + width]` on the circle, `width >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngleRange {
    pub start: Angle,
    pub width: Rational,
}

impl AngleRange {
    pub fn point(a: Angle) -> Self {
        Self { start: a, width: Rational::zero() }
    }

    /// The arc `[lo, hi]` for arbitrary rationals `lo <= hi`.
    pub fn between(lo: &Rational, hi: &Rational) -> Self {
        Self { start: Angle::new(lo.clone()), width: hi - lo }
    }

    pub fn sub(&self, other: &AngleRange) -> AngleRange {
        // [a, a+w] - [b, b+v] = [a - b - v, a - b + w]
        let start = Angle::new(self.start.value() - other.start.value() - &other.width);
        AngleRange { start, width: &self.width + &other.width }
    }

    /// Minimum and maximum of the nearest-integer distance over the arc.
    pub fn dist_range(&self) -> (Rational, Rational) {
        if self.width >= Rational::one() {
            return (Rational::zero(), half());
        }
        let s = self.start.value().clone();
        let e = &s + &self.width;
        let dist = |x: &Rational| {
            let f = frac(x);
            let g = Rational::one() - &f;
            if f <= g {
                f
            } else {
                g
            }
        };
        let ds = dist(&s);
        let de = dist(&e);
        let contains_int = s.is_zero() || e >= Rational::one();
        let h = half();
        let contains_half = (s <= h && h <= e) || e >= rat(3, 2);
        let lo = if contains_int { Rational::zero() } else { ds.clone().min(de.clone()) };
        let hi = if contains_half { h } else { ds.max(de) };
        (lo, hi)
    }

    /// Encloses `|1 - e^{2 pi i phi}|` over every `phi` in the arc.
    pub fn unit_norm(&self) -> BoundInterval {
        if self.width.is_zero() {
            return unit_norm(&self.start);
        }
        let (lo, hi) = self.dist_range();
        let l = chord(&lo);
        let h = chord(&hi);
        BoundInterval::new(l.lo, h.hi)
    }
}

impl PartialOrd for BoundInterval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.hi.partial_cmp(&other.hi)
    }
}
