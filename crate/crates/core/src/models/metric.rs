use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::character::{abs_rational, pair_sequence, padic_value, torus_enclosure, CharSequence};
use super::element::{Element, Model, TailRule};
use crate::arith::{chord, enclose, half, AngleRange, BoundInterval, Rational};
use crate::error::{Error, Result};

/// Number of indices examined when no horizon is given.
pub const DEFAULT_HORIZON: usize = 256;

/// Extra digits read past the pairing horizon for circle points with infinite tails.
const TORUS_DIGIT_SLACK: usize = 64;

fn same_model(x: &Element, y: &Element) -> Result<()> {
    if x.model() != y.model() {
        return Err(Error::ModelMismatch(format!("{} vs {}", x.model().name(), y.model().name())));
    }
    Ok(())
}

fn pow2_neg(n: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << n)
}

/// Rational bounds `lo <= d(x, y) <= hi` from the first `horizon` digits.
pub fn distance_bounds(x: &Element, y: &Element, horizon: usize) -> Result<(Rational, Rational)> {
    same_model(x, y)?;
    match x.model() {
        Model::Torus { bases } => {
            let (nx, dx, tx) = torus_enclosure(x, bases, horizon);
            let (ny, dy, ty) = torus_enclosure(y, bases, horizon);
            let sx = Rational::new(nx.into(), dx.into());
            let sy = Rational::new(ny.into(), dy.into());
            let diff = &sx - &sy;
            let arc = AngleRange::between(&(&diff - &ty), &(&diff + &tx));
            Ok(arc.dist_range())
        }
        Model::PAdic { .. } | Model::Product { .. } => {
            let longest = x.prefix().len().max(y.prefix().len());
            // rules are read at absolute indices, so equal tails agree past both prefixes
            let count = if x.tail() == y.tail() { longest } else { horizon.max(longest) };
            let (a, b) = (x.digits(count), y.digits(count));
            match a.iter().zip(&b).position(|(p, q)| p != q) {
                Some(n) => {
                    let d = pow2_neg(n);
                    Ok((d.clone(), d))
                }
                None if x.tail() == y.tail() => Ok((Rational::zero(), Rational::zero())),
                None => Ok((Rational::zero(), pow2_neg(count))),
            }
        }
    }
}

/// The exact ambient distance: `||x - y||` on the circle, `2^{-n}` at the
/// first differing digit otherwise.
pub fn metric_d(x: &Element, y: &Element) -> Result<Rational> {
    let (lo, hi) = distance_bounds(x, y, DEFAULT_HORIZON)?;
    if lo != hi {
        return Err(Error::Incomparable(format!(
            "distance only known to lie in [{lo}, {hi}] after {DEFAULT_HORIZON} digits"
        )));
    }
    Ok(lo)
}

/// `T` with `(u_n, x) - (prefix contribution) in [0, T]` for every `n >= count`.
fn tail_offset(u: &CharSequence, x: &Element, count: usize) -> Option<Rational> {
    let len = x.prefix().len();
    let fixed_max = match x.tail() {
        TailRule::Zero => return Some(Rational::zero()),
        TailRule::ScaledFloor(t) => match u {
            CharSequence::PAdic { .. } => return None,
            _ => return Some(t.clone()),
        },
        TailRule::ConstantDigit(c) => c.clone(),
        TailRule::Periodic(p) => p.iter().max().cloned().unwrap_or_default(),
        TailRule::SpacedOnes { l: _, s, index } => match u {
            CharSequence::PAdic { p, index: ui } => {
                // ones sit at n_{l+i} - s, so with gaps above s none lies in (n_k - s, n_k]
                if ui != index || index.first_index_with_gaps_above(*s as u64, count) != Some(count) {
                    return None;
                }
                return Some(Rational::new(BigInt::one(), BigInt::from(*p).pow(*s as u32)));
            }
            _ => 1u8.into(),
        },
    };
    let big = |v| Rational::from_integer(BigInt::from(v));
    match u {
        // sum_{m > n} c / (a_{n+1} ... a_m) <= c / (A - 1)
        CharSequence::Torus { bases } => {
            let a = bases.min_from(count.max(len) + 1);
            Some(big(fixed_max) / big(a - 1u8))
        }
        CharSequence::Product { bases } => Some(big(fixed_max) / big(bases.min_from(count.max(len)))),
        CharSequence::PAdic { .. } => None,
    }
}

/// Bound on `||(u_n, x) - (u_n, y)||` over every `n >= count`.
fn tail_bound(u: &CharSequence, x: &Element, y: &Element, count: usize) -> Option<Rational> {
    let (lx, ly) = (x.prefix().len(), y.prefix().len());
    let longest = lx.max(ly);
    match u {
        CharSequence::Torus { .. } | CharSequence::Product { .. } => {
            if count < longest {
                return None;
            }
            if x.tail() == y.tail() {
                return Some(Rational::zero());
            }
            let (tx, ty) = (tail_offset(u, x, count)?, tail_offset(u, y, count)?);
            Some(if tx > ty { tx } else { ty })
        }
        CharSequence::PAdic { p, index } => {
            let n = index.term(count)? as usize;
            if n + 1 < longest {
                return None;
            }
            let scale = Rational::from_integer(BigInt::from(*p).pow(n as u32 + 1));
            if x.tail() == y.tail() {
                let d = padic_value(&x.digits(longest), *p) - padic_value(&y.digits(longest), *p);
                return Some(Rational::from_integer(d.abs()) / scale);
            }
            let (tx, ty) = (tail_offset(u, x, count)?, tail_offset(u, y, count)?);
            let d = padic_value(x.prefix(), *p) - padic_value(y.prefix(), *p);
            let lead = Rational::from_integer(d.abs()) / scale;
            Some(lead + if tx > ty { tx } else { ty })
        }
    }
}

/// Encloses `rho(x, y) = d(x, y) + sup_n |(u_n, x) - (u_n, y)|`.
///
/// Indices `n < horizon` are evaluated exactly (or as certified arcs); the
/// remaining indices are covered by an analytic tail bound when the tail
/// rules admit one, otherwise the result is a lower bound only.
pub fn rho(u: &CharSequence, x: &Element, y: &Element, horizon: usize) -> Result<BoundInterval> {
    u.check_element(x)?;
    u.check_element(y)?;
    let (dlo, dhi) = distance_bounds(x, y, horizon)?;
    let d = enclose(&dlo, &dhi);
    let count = u.feasible_count(horizon.max(1));
    let digit_horizon = horizon + TORUS_DIGIT_SLACK;
    let px = pair_sequence(u, x, count, digit_horizon)?;
    let py = pair_sequence(u, y, count, digit_horizon)?;
    let sup = px
        .par_iter()
        .zip(py.par_iter())
        .map(|(a, b)| a.range().sub(&b.range()).unit_norm())
        .reduce(BoundInterval::zero, |a, b| a.max(&b));
    let sup = match tail_bound(u, x, y, count) {
        Some(r) => {
            let t = chord(&abs_rational(r).min(half()));
            BoundInterval { lo: sup.lo, hi: sup.hi.max(t.hi), exact: sup.exact && t.hi <= sup.lo }
        }
        None => BoundInterval::lower_only(sup.lo),
    };
    Ok(d.add(&sup))
}
