use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::element::{mixed_radix_fraction, Element, Model, TailRule};
use super::sequence::{BaseSequence, IndexRule};
use crate::arith::{Angle, AngleRange, BoundInterval, Rational};
use crate::error::{Error, Result};

/// Largest p-adic digit count any pairing is allowed to read.
pub const MAX_PADIC_DIGITS: usize = 1 << 22;

/// A continuous character of one of the compact models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Character {
    /// `x -> k x` on the circle.
    Torus(BigInt),
    /// The fraction `numer / p^exp` of `Z(p^inf)`, in lowest terms.
    PAdic { p: u64, numer: BigUint, exp: usize },
    /// Finitely supported `(chi_n)` with `0 <= chi_n < b_n`; trailing zeros trimmed.
    Product(Vec<BigUint>),
}

impl Character {
    /// `m / p^t` reduced to lowest terms.
    pub fn padic(p: u64, m: BigUint, t: usize) -> Self {
        let a = Angle::from_prime_power(m, p, t);
        let exp = exponent_of(a.value().denom(), p);
        let numer = a.value().numer().to_biguint().unwrap_or_default();
        Character::PAdic { p, numer, exp }
    }

    pub fn product(mut coeffs: Vec<BigUint>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Character::Product(coeffs)
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            Character::Torus(k) => k.is_zero(),
            Character::PAdic { numer, .. } => numer.is_zero(),
            Character::Product(c) => c.is_empty(),
        }
    }

    /// Number of leading digits the character reads, or `None` when it
    /// reads all of them (the circle).
    pub fn digits_read(&self) -> Option<usize> {
        match self {
            Character::Torus(_) => None,
            Character::PAdic { exp, .. } => Some(*exp),
            Character::Product(c) => Some(c.len()),
        }
    }
}

fn exponent_of(denom: &BigInt, p: u64) -> usize {
    let mut d = denom.magnitude().clone();
    let pb = BigUint::from(p);
    let mut e = 0;
    while d > BigUint::one() {
        d /= &pb;
        e += 1;
    }
    e
}

/// A character sequence `u = (u_n)` in the dual of one of the models.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CharSequence {
    /// `u_n = prod_{k <= n} a_k` in the dual `Z` of the circle.
    Torus { bases: BaseSequence },
    /// `u_k = 1 / p^{n_k + 1}` in `Z(p^inf)`.
    PAdic { p: u64, index: IndexRule },
    /// `u_n = 1` in the `n`-th summand of `sum_n Z(b_n)`.
    Product { bases: BaseSequence },
}

impl CharSequence {
    pub fn model(&self) -> Model {
        match self {
            CharSequence::Torus { bases } => Model::Torus { bases: bases.clone() },
            CharSequence::PAdic { p, .. } => Model::PAdic { p: *p },
            CharSequence::Product { bases } => Model::Product { bases: bases.clone() },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model().validate()?;
        if let CharSequence::PAdic { index, .. } = self {
            if !index.strictly_increasing() {
                return Err(Error::InvalidRule("n_k must be strictly increasing".into()));
            }
        }
        Ok(())
    }

    pub fn check_element(&self, x: &Element) -> Result<()> {
        if self.model() != *x.model() {
            return Err(Error::ModelMismatch(format!(
                "sequence lives on {} but element on {}",
                self.model().name(),
                x.model().name()
            )));
        }
        Ok(())
    }

    pub fn term(&self, n: usize) -> Result<Character> {
        Ok(match self {
            CharSequence::Torus { bases } => {
                let u = bases.partial_products(n + 1).pop().expect("n + 1 terms");
                Character::Torus(BigInt::from_biguint(Sign::Plus, u))
            }
            CharSequence::PAdic { p, index } => {
                let nk = index.term(n).ok_or_else(|| Error::OutOfRange(format!("n_{n} overflows")))?;
                Character::padic(*p, BigUint::one(), nk as usize + 1)
            }
            CharSequence::Product { .. } => {
                let mut coeffs = vec![BigUint::zero(); n + 1];
                coeffs[n] = BigUint::one();
                Character::Product(coeffs)
            }
        })
    }

    /// Digits of `x` needed to evaluate `u_0, ..., u_{count-1}` exactly.
    pub(crate) fn digits_needed(&self, count: usize) -> Option<usize> {
        match self {
            CharSequence::Torus { .. } => None,
            CharSequence::PAdic { index, .. } => {
                if count == 0 {
                    return Some(0);
                }
                index.term(count - 1).map(|t| t as usize + 1)
            }
            CharSequence::Product { .. } => Some(count),
        }
    }

    /// Largest `count <= wanted` whose pairings stay within the p-adic digit cap.
    pub(crate) fn feasible_count(&self, wanted: usize) -> usize {
        match self {
            CharSequence::PAdic { index, .. } => (0..wanted)
                .take_while(|&k| index.term(k).is_some_and(|t| (t as usize) < MAX_PADIC_DIGITS))
                .count(),
            _ => wanted,
        }
    }
}

/// The value `(chi, x)` as an exact angle or a certified arc.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pairing {
    Exact(Angle),
    Enclosed(AngleRange),
}

impl Pairing {
    pub fn range(&self) -> AngleRange {
        match self {
            Pairing::Exact(a) => AngleRange::point(a.clone()),
            Pairing::Enclosed(r) => r.clone(),
        }
    }

    pub fn exact(&self) -> Option<&Angle> {
        match self {
            Pairing::Exact(a) => Some(a),
            Pairing::Enclosed(_) => None,
        }
    }

    pub fn unit_norm(&self) -> BoundInterval {
        self.range().unit_norm()
    }
}

/// Upper bound factor on `sum_{n >= m} c_n / u_n` relative to `1 / u_{m-1}`.
fn torus_tail_factor(tail: &TailRule) -> Rational {
    match tail {
        TailRule::Zero => Rational::zero(),
        TailRule::ScaledFloor(t) => t.clone(),
        _ => Rational::one(),
    }
}

/// The circle point `x` enclosed as `[S, S + T]` from its first `count` digits.
pub(crate) fn torus_enclosure(x: &Element, bases: &BaseSequence, horizon: usize) -> (BigUint, BigUint, Rational) {
    let count = if x.is_finite() { x.prefix().len() } else { horizon.max(x.prefix().len()) }.max(1);
    let (numer, denom) = mixed_radix_fraction(&bases.terms(count), &x.digits(count));
    let width = if x.is_finite() {
        Rational::zero()
    } else {
        torus_tail_factor(x.tail()) / Rational::from_integer(BigInt::from(denom.clone()))
    };
    (numer, denom, width)
}

fn padic_numerator(digits: &[BigUint], p: u64) -> BigUint {
    if p <= 256 {
        let bytes: Vec<u8> = digits.iter().map(|d| d.iter_u32_digits().next().unwrap_or(0) as u8).collect();
        BigUint::from_radix_le(&bytes, p as u32).unwrap_or_default()
    } else {
        let pb = BigUint::from(p);
        digits.iter().rev().fold(BigUint::zero(), |acc, d| acc * &pb + d)
    }
}

/// Evaluates `(chi, x)`.
///
/// `horizon` bounds the number of digits read: p-adic and product characters
/// must fit inside it, and circle points with an infinite tail are truncated
/// there and returned as an arc.
pub fn pair(chi: &Character, x: &Element, horizon: usize) -> Result<Pairing> {
    match (chi, x.model()) {
        (Character::Torus(k), Model::Torus { bases }) => {
            if x.is_finite() && x.prefix().len() > horizon {
                return Err(Error::HorizonTooSmall { horizon, needed: x.prefix().len() });
            }
            let (numer, denom, width) = torus_enclosure(x, bases, horizon);
            let d = BigInt::from(denom);
            let start = Rational::new(k * BigInt::from(numer), d);
            if width.is_zero() {
                return Ok(Pairing::Exact(Angle::new(start)));
            }
            let span = Rational::from_integer(k.clone()) * width;
            let (lo, hi) = if span.is_negative() { (&start + &span, start) } else { (start.clone(), start + span) };
            Ok(Pairing::Enclosed(AngleRange::between(&lo, &hi)))
        }
        (Character::PAdic { p, numer, exp }, Model::PAdic { p: q }) if p == q => {
            if *exp > horizon {
                return Err(Error::HorizonTooSmall { horizon, needed: *exp });
            }
            let n = padic_numerator(&x.digits(*exp), *p);
            Ok(Pairing::Exact(Angle::from_prime_power(numer * n, *p, *exp)))
        }
        (Character::Product(coeffs), Model::Product { bases }) => {
            if coeffs.len() > horizon {
                return Err(Error::HorizonTooSmall { horizon, needed: coeffs.len() });
            }
            let bs = bases.terms(coeffs.len());
            let ds = x.digits(coeffs.len());
            let mut sum = Rational::zero();
            for ((c, d), b) in coeffs.iter().zip(&ds).zip(&bs) {
                if c >= b {
                    return Err(Error::DigitOutOfRange { index: 0, digit: c.to_string(), base: b.to_string() });
                }
                sum += Rational::new(BigInt::from(c * d), BigInt::from(b.clone()));
            }
            Ok(Pairing::Exact(Angle::new(sum)))
        }
        _ => Err(Error::ModelMismatch(format!("character does not act on the {} model", x.model().name()))),
    }
}

/// `(u_n, x)` for `n < count`, sharing one digit expansion of `x`.
///
/// Circle points with an infinite tail are read to `digit_horizon` digits.
pub fn pair_sequence(u: &CharSequence, x: &Element, count: usize, digit_horizon: usize) -> Result<Vec<Pairing>> {
    u.check_element(x)?;
    match u {
        CharSequence::Torus { bases } => {
            let horizon = digit_horizon.max(count + 1);
            let (numer, denom, width) = torus_enclosure(x, bases, horizon);
            let us = bases.partial_products(count);
            Ok(us
                .iter()
                .map(|un| {
                    // u_n x = numer / (denom / u_n) whenever u_n divides denom
                    let (q, r) = denom.div_rem(un);
                    if r.is_zero() {
                        let m = numer.mod_floor(&q);
                        let start = Rational::new(BigInt::from(m), BigInt::from(q.clone()));
                        if width.is_zero() {
                            Pairing::Exact(Angle::new(start))
                        } else {
                            let w = &width * Rational::from_integer(BigInt::from(un.clone()));
                            Pairing::Enclosed(AngleRange { start: Angle::new(start), width: w })
                        }
                    } else {
                        // finite element whose support ends before n: u_n x is an integer
                        let v = Rational::new(BigInt::from(un * &numer), BigInt::from(denom.clone()));
                        Pairing::Exact(Angle::new(v))
                    }
                })
                .collect())
        }
        CharSequence::PAdic { p, index } => {
            let needed = u.digits_needed(count).unwrap_or(0);
            if needed > MAX_PADIC_DIGITS {
                return Err(Error::HorizonTooSmall { horizon: MAX_PADIC_DIGITS, needed });
            }
            let digits = x.digits(needed);
            (0..count)
                .map(|k| {
                    let nk = index.term(k).expect("bounded by digits_needed") as usize;
                    let n = padic_numerator(&digits[..=nk], *p);
                    Ok(Pairing::Exact(Angle::from_prime_power(n, *p, nk + 1)))
                })
                .collect()
        }
        CharSequence::Product { bases } => {
            let bs = bases.terms(count);
            let ds = x.digits(count);
            Ok(ds
                .into_iter()
                .zip(bs)
                .map(|(d, b)| Pairing::Exact(Angle::new(Rational::new(d.into(), b.into()))))
                .collect())
        }
    }
}

/// Signed integer value of a finitely supported p-adic digit string.
pub(crate) fn padic_value(digits: &[BigUint], p: u64) -> BigInt {
    BigInt::from(padic_numerator(digits, p))
}

pub(crate) fn abs_rational(q: Rational) -> Rational {
    if q.is_negative() {
        -q
    } else {
        q
    }
}
