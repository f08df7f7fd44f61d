use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::sequence::{is_prime, BaseSequence, IndexRule};
use crate::arith::Rational;
use crate::error::{Error, Result};

/// Which compact group a point or character lives in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Model {
    /// The circle `R/Z` with mixed-radix coordinates over `a_n`.
    Torus { bases: BaseSequence },
    /// The p-adic integers.
    PAdic { p: u64 },
    /// `prod_n Z(b_n)`.
    Product { bases: BaseSequence },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Torus { .. } => "torus",
            Model::PAdic { .. } => "padic",
            Model::Product { .. } => "product",
        }
    }

    /// The radix at index `n`: `a_n`, `p`, or `b_n`.
    pub fn base(&self, n: usize) -> BigUint {
        match self {
            Model::Torus { bases } | Model::Product { bases } => bases.term(n),
            Model::PAdic { p } => BigUint::from(*p),
        }
    }

    pub fn bases(&self, count: usize) -> Vec<BigUint> {
        match self {
            Model::Torus { bases } | Model::Product { bases } => bases.terms(count),
            Model::PAdic { p } => vec![BigUint::from(*p); count],
        }
    }

    /// Smallest radix at or beyond index `n`.
    fn min_base_from(&self, n: usize) -> BigUint {
        match self {
            Model::Torus { bases } | Model::Product { bases } => bases.min_from(n),
            Model::PAdic { p } => BigUint::from(*p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Torus { bases } if !bases.is_torus_admissible() => Err(Error::InvalidRule(
                "torus bases must satisfy a_n >= 2 and a_n -> infinity".into(),
            )),
            Model::Product { bases } if !bases.is_product_admissible() => Err(Error::InvalidRule(
                "product orders must satisfy 1 < b_0 < b_1 < ...".into(),
            )),
            Model::PAdic { p } if !is_prime(*p) => Err(Error::InvalidRule(format!("{p} is not prime"))),
            _ => Ok(()),
        }
    }
}

/// The symbolic rule producing digits at every index `n >= prefix.len()`.
///
/// Rules are evaluated at the absolute index, so a tail starting after a
/// prefix of length `m` produces the same digits it would at `n` with no prefix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TailRule {
    Zero,
    ConstantDigit(BigUint),
    /// `digit_n = pattern[n mod pattern.len()]`.
    Periodic(Vec<BigUint>),
    /// `digit_n = floor((a_n - 1) t)` on the circle, `floor(b_n t)` in a
    /// product, `floor(p t)` in the p-adic integers; `0 <= t < 1`.
    ScaledFloor(Rational),
    /// `digit_n = 1` iff `n = n_{l+i} - s` for some `i >= 1`.
    SpacedOnes { l: usize, s: usize, index: IndexRule },
}

impl TailRule {
    /// The digit at index `n` given the radix there.
    fn digit(&self, n: usize, base: &BigUint, model: &Model, ones: &BTreeSet<u64>) -> BigUint {
        match self {
            TailRule::Zero => BigUint::zero(),
            TailRule::ConstantDigit(c) => c.clone(),
            TailRule::Periodic(pattern) => pattern[n % pattern.len()].clone(),
            TailRule::ScaledFloor(t) => {
                let scale = match model {
                    Model::Torus { .. } => base - 1u8,
                    _ => base.clone(),
                };
                floor_times(&scale, t)
            }
            TailRule::SpacedOnes { .. } => {
                if ones.contains(&(n as u64)) {
                    BigUint::one()
                } else {
                    BigUint::zero()
                }
            }
        }
    }

    /// Positions of the ones of a `SpacedOnes` rule below `limit`.
    fn ones_below(&self, limit: usize) -> BTreeSet<u64> {
        let mut set = BTreeSet::new();
        if let TailRule::SpacedOnes { l, s, index } = self {
            for i in 1.. {
                let Some(nk) = index.term(l + i) else { break };
                if nk < *s as u64 {
                    continue;
                }
                let pos = nk - *s as u64;
                if pos >= limit as u64 {
                    break;
                }
                set.insert(pos);
            }
        }
        set
    }

    /// Largest digit the rule can emit, when it does not depend on the radix.
    fn max_fixed_digit(&self) -> Option<BigUint> {
        match self {
            TailRule::Zero => Some(BigUint::zero()),
            TailRule::ConstantDigit(c) => Some(c.clone()),
            TailRule::Periodic(p) => p.iter().max().cloned(),
            TailRule::SpacedOnes { .. } => Some(BigUint::one()),
            TailRule::ScaledFloor(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TailRule::Zero)
    }
}

pub(crate) fn floor_times(n: &BigUint, t: &Rational) -> BigUint {
    let prod = Rational::from_integer(BigInt::from(n.clone())) * t;
    prod.floor().to_integer().to_biguint().unwrap_or_default()
}

/// A point of one of the compact models: a finite digit prefix followed by a
/// rule-described tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    model: Model,
    prefix: Vec<BigUint>,
    tail: TailRule,
}

impl Element {
    pub fn new(model: Model, prefix: Vec<BigUint>, tail: TailRule) -> Result<Self> {
        model.validate()?;
        let el = Element { model, prefix, tail };
        el.validate()?;
        Ok(el)
    }

    pub fn from_digits(model: Model, prefix: &[u64], tail: TailRule) -> Result<Self> {
        Self::new(model, prefix.iter().map(|&d| BigUint::from(d)).collect(), tail)
    }

    pub fn zero(model: Model) -> Result<Self> {
        Self::new(model, Vec::new(), TailRule::Zero)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn prefix(&self) -> &[BigUint] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// Finite support: the digits vanish past the prefix.
    pub fn is_finite(&self) -> bool {
        self.tail.is_zero()
    }

    /// One past the last nonzero prefix digit, for finitely supported elements.
    pub fn support_len(&self) -> Option<usize> {
        if !self.is_finite() {
            return None;
        }
        Some(self.prefix.iter().rposition(|d| !d.is_zero()).map_or(0, |i| i + 1))
    }

    fn validate(&self) -> Result<()> {
        let len = self.prefix.len();
        let bases = self.model.bases(len);
        for (n, (d, b)) in self.prefix.iter().zip(&bases).enumerate() {
            if d >= b {
                return Err(Error::DigitOutOfRange { index: n, digit: d.to_string(), base: b.to_string() });
            }
        }
        match &self.tail {
            TailRule::Periodic(p) if p.is_empty() => {
                return Err(Error::InvalidElement("periodic tail needs a nonempty pattern".into()))
            }
            TailRule::ScaledFloor(t) if t.is_negative() || *t >= Rational::one() => {
                return Err(Error::InvalidElement("scaled-floor factor must lie in [0, 1)".into()))
            }
            TailRule::SpacedOnes { index, .. } if !index.strictly_increasing() => {
                return Err(Error::InvalidRule("index rule must be strictly increasing".into()))
            }
            _ => {}
        }
        if let Some(max) = self.tail.max_fixed_digit() {
            let min_base = self.model.min_base_from(len);
            if max >= min_base {
                return Err(Error::DigitOutOfRange {
                    index: len,
                    digit: max.to_string(),
                    base: min_base.to_string(),
                });
            }
        }
        Ok(())
    }

    /// The first `count` digits.
    pub fn digits(&self, count: usize) -> Vec<BigUint> {
        let needs_bases = matches!(self.tail, TailRule::ScaledFloor(_));
        let bases = if needs_bases { self.model.bases(count) } else { Vec::new() };
        let ones = self.tail.ones_below(count);
        let zero = BigUint::zero();
        (0..count)
            .map(|n| match self.prefix.get(n) {
                Some(d) => d.clone(),
                None => {
                    let base = bases.get(n).unwrap_or(&zero);
                    self.tail.digit(n, base, &self.model, &ones)
                }
            })
            .collect()
    }

    pub fn digit(&self, n: usize) -> BigUint {
        if let Some(d) = self.prefix.get(n) {
            return d.clone();
        }
        let base = self.model.base(n);
        let ones = self.tail.ones_below(n + 1);
        self.tail.digit(n, &base, &self.model, &ones)
    }

    /// Exact value `sum c_n / u_n` of a finitely supported torus element.
    pub fn torus_value(&self) -> Result<Rational> {
        let Model::Torus { bases } = &self.model else {
            return Err(Error::ModelMismatch("torus value of a non-torus element".into()));
        };
        if !self.is_finite() {
            return Err(Error::InvalidElement("element has an infinite tail".into()));
        }
        let count = self.prefix.len().max(1);
        let (numer, denom) = mixed_radix_fraction(&bases.terms(count), &self.digits(count));
        Ok(Rational::new(numer.into(), denom.into()))
    }

    /// Group sum of two finitely supported elements of the same model.
    pub fn add(&self, other: &Element) -> Result<Element> {
        if self.model != other.model {
            return Err(Error::ModelMismatch(format!("{} vs {}", self.model.name(), other.model.name())));
        }
        if !self.is_finite() || !other.is_finite() {
            return Err(Error::InvalidElement("addition is implemented for finite support only".into()));
        }
        let len = self.prefix.len().max(other.prefix.len());
        let (a, b) = (self.digits(len), other.digits(len));
        let mut out = vec![BigUint::zero(); len];
        match &self.model {
            Model::Torus { bases } => {
                // index 0 is the most significant place; carries move towards it
                let bs = bases.terms(len);
                let mut carry = BigUint::zero();
                for n in (0..len).rev() {
                    let s = &a[n] + &b[n] + &carry;
                    let (q, r) = s.div_rem(&bs[n]);
                    out[n] = r;
                    carry = q;
                }
            }
            Model::PAdic { p } => {
                let pb = BigUint::from(*p);
                let mut carry = BigUint::zero();
                for n in 0..len {
                    let s = &a[n] + &b[n] + &carry;
                    let (q, r) = s.div_rem(&pb);
                    out[n] = r;
                    carry = q;
                }
                if !carry.is_zero() {
                    out.push(carry);
                }
            }
            Model::Product { bases } => {
                let bs = bases.terms(len);
                for n in 0..len {
                    out[n] = (&a[n] + &b[n]) % &bs[n];
                }
            }
        }
        while out.last().is_some_and(|d| d.is_zero()) {
            out.pop();
        }
        Element::new(self.model.clone(), out, TailRule::Zero)
    }
}

/// `sum_{n < count} c_n / u_n` as `(numerator, u_{count-1})`, by Horner's rule.
pub(crate) fn mixed_radix_fraction(bases: &[BigUint], digits: &[BigUint]) -> (BigUint, BigUint) {
    let mut numer = BigUint::zero();
    let mut denom = BigUint::one();
    for (b, c) in bases.iter().zip(digits) {
        numer = numer * b + c;
        denom *= b;
    }
    (numer, denom)
}

/// Greedy mixed-radix expansion `q = sum c_n / u_n` of a rational in `[0, 1)`.
pub fn encode_torus(q: &Rational, bases: &BaseSequence, horizon: usize) -> Result<Element> {
    if q.is_negative() || *q >= Rational::one() {
        return Err(Error::OutOfRange(format!("{q} is not in [0, 1)")));
    }
    let model = Model::Torus { bases: bases.clone() };
    model.validate()?;
    let mut rest = q.clone();
    let mut digits = Vec::new();
    let mut n = 0usize;
    while !rest.is_zero() {
        if n >= horizon {
            return Err(Error::NonTerminating(horizon));
        }
        let scaled = rest * Rational::from_integer(BigInt::from(bases.term(n)));
        let c = scaled.floor();
        rest = scaled - &c;
        digits.push(c.to_integer().to_biguint().expect("digit is non-negative"));
        n += 1;
    }
    Element::new(model, digits, TailRule::Zero)
}
