//! Membership in `s_u(X) = {x : (u_n, x) -> 1}`.
//!
//! Verdicts come from the digit criteria of the three models, evaluated
//! symbolically on the tail rule. [`numeric_oracle`] evaluates the raw
//! pairings instead and can only ever report consistency.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{nearest_int_dist, pi_times, rational_lower, up, Angle, BoundInterval, Rational};
use crate::error::{Error, Result};
use crate::models::{
    floor_times, pair_sequence, CharSequence, Element, IndexRule, TailRule, MAX_PADIC_DIGITS,
};

/// Which criterion produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// Circle: `||c_n / a_n|| -> 0`.
    Eq2,
    /// p-adic: `n_k - m_k -> infinity`, valid when the gaps of `n_k` diverge.
    Eq4,
    /// Product: `||a_n / b_n|| -> 0`.
    Eq5,
    /// Direct evaluation of `(u_k, x)` for p-adic points that are integers.
    Direct,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Eq2 => "eq2",
            Criterion::Eq4 => "eq4",
            Criterion::Eq5 => "eq5",
            Criterion::Direct => "direct",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Member,
    /// `limit` is a limit point of the criterion quantity: `||c_n/a_n||`,
    /// `||a_n/b_n||`, or the p-adic defect `n_k - m_k`.
    NonMember { limit: Rational },
    Undetermined { horizon: usize },
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Member => "Member",
            Outcome::NonMember { .. } => "NonMember",
            Outcome::Undetermined { .. } => "Undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub criterion: Criterion,
    /// `(index, criterion quantity)` for every index examined.
    pub evidence: Vec<(usize, Rational)>,
    pub reason: String,
}

/// `m_k = max(j_k, n_{k-1})` for the p-adic digits `digits`, `k >= 2`.
///
/// `j_k = n_k` when `0 < a_{n_k} < p - 1`, otherwise the least `j` such that
/// the digits on `(j, n_k]` are all `0` or all `p - 1`.
pub fn compute_mk(p: u64, index: &IndexRule, digits: &[BigUint], k: usize) -> Result<u64> {
    let nk = mk_bounds(index, digits.len(), k)?;
    let small: Vec<u64> = digits[..=nk as usize].iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect();
    mk_small(p, index, &small, k)
}

fn mk_bounds(index: &IndexRule, available: usize, k: usize) -> Result<u64> {
    if k < 2 {
        return Err(Error::OutOfRange(format!("m_k is defined for k > 1, got k = {k}")));
    }
    let nk = index.term(k).ok_or_else(|| Error::OutOfRange(format!("n_{k} overflows")))?;
    if (available as u64) <= nk {
        return Err(Error::PrefixTooShort { needed: nk as usize + 1, available });
    }
    Ok(nk)
}

fn mk_small(p: u64, index: &IndexRule, digits: &[u64], k: usize) -> Result<u64> {
    let nk = mk_bounds(index, digits.len(), k)?;
    let prev = index.term(k - 1).expect("n_{k-1} <= n_k");
    let top = digits[nk as usize];
    if top != 0 && top != p - 1 {
        return Ok(nk);
    }
    // only max(j_k, n_{k-1}) matters, so the walk stops at n_{k-1}
    let mut j = nk - 1;
    while j > prev && digits[j as usize] == top {
        j -= 1;
    }
    Ok(j.max(prev))
}

fn check_model(u: &CharSequence, x: &Element) -> Result<()> {
    u.check_element(x)
}

/// Limit of `||digit_n / base_n||` along a tail over bases tending to infinity.
fn fixed_digit_limit(x: &Element) -> Option<Rational> {
    match x.tail() {
        TailRule::Zero | TailRule::ConstantDigit(_) | TailRule::Periodic(_) | TailRule::SpacedOnes { .. } => {
            Some(Rational::zero())
        }
        TailRule::ScaledFloor(t) => {
            let one_minus = Rational::one() - t;
            Some(if *t < one_minus { t.clone() } else { one_minus })
        }
    }
}

fn digit_ratio_evidence(x: &Element, bases: &[BigUint]) -> Vec<(usize, Rational)> {
    x.digits(bases.len())
        .into_iter()
        .zip(bases)
        .enumerate()
        .map(|(n, (d, b))| (n, nearest_int_dist(&Angle::new(Rational::new(d.into(), b.clone().into())))))
        .collect()
}

fn ratio_verdict(x: &Element, bases: &[BigUint], criterion: Criterion) -> Verdict {
    let evidence = digit_ratio_evidence(x, bases);
    let limit = fixed_digit_limit(x).expect("every tail rule has a ratio limit");
    let (outcome, reason) = if limit.is_zero() {
        (Outcome::Member, format!("{} digits over unbounded bases vanish in the limit", tail_name(x.tail())))
    } else {
        (
            Outcome::NonMember { limit: limit.clone() },
            format!("digit ratios converge to {limit} under the scaled-floor tail"),
        )
    };
    Verdict { outcome, criterion, evidence, reason }
}

fn tail_name(t: &TailRule) -> &'static str {
    match t {
        TailRule::Zero => "zero",
        TailRule::ConstantDigit(_) => "constant",
        TailRule::Periodic(_) => "periodic",
        TailRule::ScaledFloor(_) => "scaled-floor",
        TailRule::SpacedOnes { .. } => "spaced-ones",
    }
}

/// Circle criterion: `x` is in `s_u(T)` iff `||c_n / a_n|| -> 0`.
pub fn member_torus(u: &CharSequence, x: &Element, horizon: usize) -> Result<Verdict> {
    check_model(u, x)?;
    let CharSequence::Torus { bases } = u else {
        return Err(Error::ModelMismatch("member_torus needs a circle sequence".into()));
    };
    Ok(ratio_verdict(x, &bases.terms(horizon + 1), Criterion::Eq2))
}

/// Product criterion: `x` is in `s_u` iff `||a_n / b_n|| -> 0`.
pub fn member_product(u: &CharSequence, x: &Element, horizon: usize) -> Result<Verdict> {
    check_model(u, x)?;
    let CharSequence::Product { bases } = u else {
        return Err(Error::ModelMismatch("member_product needs a product sequence".into()));
    };
    Ok(ratio_verdict(x, &bases.terms(horizon), Criterion::Eq5))
}

/// The digit the tail eventually repeats, if it is eventually constant.
fn eventual_constant(x: &Element, p: u64) -> Option<BigUint> {
    match x.tail() {
        TailRule::Zero => Some(BigUint::zero()),
        TailRule::ConstantDigit(c) => Some(c.clone()),
        TailRule::Periodic(pat) if pat.iter().all(|d| *d == pat[0]) => Some(pat[0].clone()),
        TailRule::ScaledFloor(t) => Some(floor_times(&BigUint::from(p), t)),
        _ => None,
    }
}

/// Defects `n_k - m_k` for `2 <= k < count`, or `None` past the digit cap.
fn defects(p: u64, index: &IndexRule, x: &Element, count: usize) -> Option<Vec<(usize, Rational)>> {
    if count <= 2 {
        return Some(Vec::new());
    }
    let last = index.term(count - 1)? as usize;
    if last >= MAX_PADIC_DIGITS {
        return None;
    }
    let digits: Vec<u64> = x.digits(last + 1).iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect();
    (2..count)
        .map(|k| {
            let nk = index.term(k)?;
            let mk = mk_small(p, index, &digits, k).ok()?;
            Some((k, Rational::from_integer(BigInt::from(nk - mk))))
        })
        .collect()
}

fn defect_at(p: u64, index: &IndexRule, x: &Element, k: usize) -> Option<u64> {
    let nk = index.term(k)? as usize;
    if nk >= MAX_PADIC_DIGITS {
        return None;
    }
    let digits: Vec<u64> = x.digits(nk + 1).iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect();
    Some(nk as u64 - mk_small(p, index, &digits, k).ok()?)
}

/// p-adic criterion: with `n_{k+1} - n_k -> infinity`, `x` is in `s_u(Delta_p)`
/// iff `n_k - m_k -> infinity`.
///
/// Points whose digits are eventually `0` or eventually `p - 1` are integers,
/// so `(u_k, x) = x / p^{n_k + 1} -> 0` and they are members for every index
/// rule. Other tails need diverging gaps for the criterion to apply.
pub fn member_padic(u: &CharSequence, x: &Element, horizon: usize) -> Result<Verdict> {
    check_model(u, x)?;
    let CharSequence::PAdic { p, index } = u else {
        return Err(Error::ModelMismatch("member_padic needs a p-adic sequence".into()));
    };
    let p = *p;
    if !index.strictly_increasing() {
        return Err(Error::InvalidRule("n_k must be strictly increasing".into()));
    }
    let diverge = index.gaps_diverge();
    let count = u.feasible_count(horizon);
    let evidence = defects(p, index, x, count).unwrap_or_default();
    let len = x.prefix().len() as u64;
    let verdict = |outcome, criterion, reason: String| Verdict { outcome, criterion, evidence: evidence.clone(), reason };
    let undetermined = |reason: &str| {
        Ok(verdict(Outcome::Undetermined { horizon }, Criterion::Eq4, reason.to_string()))
    };

    if let Some(c) = eventual_constant(x, p) {
        let top = BigUint::from(p - 1);
        if c.is_zero() || c == top {
            let criterion = if diverge { Criterion::Eq4 } else { Criterion::Direct };
            return Ok(verdict(
                Outcome::Member,
                criterion,
                "digits are eventually 0 or p-1, so the point is an integer and its pairings vanish".into(),
            ));
        }
        // a middle digit at every n_k forces j_k = n_k; the pairings tend to c/(p-1) != 0
        return Ok(verdict(
            Outcome::NonMember { limit: Rational::zero() },
            if diverge { Criterion::Eq4 } else { Criterion::Direct },
            format!("constant middle digit {c} gives n_k - m_k = 0"),
        ));
    }
    if !diverge {
        return undetermined("index gaps do not diverge, so the run-length criterion does not apply");
    }
    match x.tail() {
        TailRule::Periodic(pat) => {
            let period = pat.len();
            let Some(m) = index.residue_period(period as u64) else {
                return undetermined("n_k mod period has no closed form for this index rule");
            };
            // past K0 every run is shorter than the period and starts beyond n_{k-1}
            let Some(g) = index.first_index_with_gaps_above(period as u64 - 1, 0) else {
                return undetermined("gap search exhausted");
            };
            let Some(reach) = index.first_index_reaching(len + period as u64) else {
                return undetermined("index search exhausted");
            };
            let k0 = 2.max(g + 1).max(reach + 1);
            let window: Option<Vec<u64>> = (k0..k0 + m).map(|k| defect_at(p, index, x, k)).collect();
            let Some(window) = window else {
                return undetermined("defect window exceeds the digit cap");
            };
            let min = *window.iter().min().expect("window is nonempty");
            Ok(verdict(
                Outcome::NonMember { limit: Rational::from_integer(min.into()) },
                Criterion::Eq4,
                format!("n_k - m_k is periodic in k with period {m} and takes the value {min}"),
            ))
        }
        TailRule::SpacedOnes { l, s, index: ones } => {
            if ones != index {
                return undetermined("spaced ones follow a different index rule than u");
            }
            let Some(g) = index.first_index_with_gaps_above(*s as u64, 0) else {
                return undetermined("gap search exhausted");
            };
            let Some(reach) = index.first_index_reaching(len + *s as u64) else {
                return undetermined("index search exhausted");
            };
            let k0 = 2.max(l + 1).max(g + 1).max(reach);
            let Some(d) = defect_at(p, index, x, k0) else {
                return undetermined("first stable index exceeds the digit cap");
            };
            Ok(verdict(
                Outcome::NonMember { limit: Rational::from_integer(d.into()) },
                Criterion::Eq4,
                format!("n_k - m_k = {d} for every k >= {k0}"),
            ))
        }
        _ => undetermined("tail rule outside the decidable grammar"),
    }
}

/// Dispatches to the criterion of the sequence's model.
pub fn member(u: &CharSequence, x: &Element, horizon: usize) -> Result<Verdict> {
    match u {
        CharSequence::Torus { .. } => member_torus(u, x, horizon),
        CharSequence::PAdic { .. } => member_padic(u, x, horizon),
        CharSequence::Product { .. } => member_product(u, x, horizon),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleOutcome {
    MemberConsistent,
    /// The last quarter of the trace reaches `pi * candidate / 2`.
    NonMemberConsistent { candidate: f64 },
    Undetermined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub outcome: OracleOutcome,
    /// Enclosures of `|1 - (u_n, x)|` for `n < trace.len()`.
    pub trace: Vec<BoundInterval>,
    pub tol: f64,
}

impl OracleReport {
    pub fn tail(&self) -> &[BoundInterval] {
        &self.trace[self.trace.len() * 3 / 4..]
    }
}

/// Evaluates `|1 - (u_n, x)|` directly for `n < horizon`.
pub fn numeric_oracle(u: &CharSequence, x: &Element, horizon: usize, tol: f64) -> Result<OracleReport> {
    let count = u.feasible_count(horizon);
    let pairs = pair_sequence(u, x, count, horizon + 64)?;
    let trace: Vec<BoundInterval> = pairs.iter().map(|p| p.unit_norm()).collect();
    let tail = &trace[trace.len() * 3 / 4..];
    let max_hi = tail.iter().map(|b| b.hi).fold(0.0, f64::max);
    let max_lo = tail.iter().map(|b| b.lo).fold(0.0, f64::max);
    let outcome = if max_hi < tol {
        OracleOutcome::MemberConsistent
    } else if max_lo >= tol {
        OracleOutcome::NonMemberConsistent { candidate: 2.0 * max_lo / std::f64::consts::PI }
    } else {
        OracleOutcome::Undetermined
    };
    Ok(OracleReport { outcome, trace, tol })
}

/// Upper bound on `||(u_n, x)||` from the criterion quantity at index `n`.
fn criterion_bound(u: &CharSequence, x: &Element, n: usize, padic_digits: &[u64]) -> Option<Rational> {
    match u {
        // u_n x = c_{n+1}/a_{n+1} + (something in [0, 1/a_{n+1}))
        CharSequence::Torus { bases } => {
            let a = bases.term(n + 1);
            let q = nearest_int_dist(&Angle::new(Rational::new(x.digit(n + 1).into(), a.clone().into())));
            Some(q + Rational::new(BigInt::from(2), a.into()))
        }
        CharSequence::Product { bases } => {
            let b = bases.term(n);
            Some(nearest_int_dist(&Angle::new(Rational::new(x.digit(n).into(), b.into()))))
        }
        // the digits on (m_k, n_k] form a run, so the angle is within p^{-(n_k - m_k)} of an integer
        CharSequence::PAdic { p, index } => {
            if n < 2 {
                return None;
            }
            let nk = index.term(n)?;
            let mk = mk_small(*p, index, padic_digits, n).ok()?;
            Some(Rational::new(BigInt::one(), BigInt::from(*p).pow((nk - mk) as u32)))
        }
    }
}

/// Checks a symbolic verdict against an oracle trace.
///
/// Every trace entry in the last quarter must respect `2 pi` times the
/// criterion bound at its index; a `NonMember(L)` verdict additionally needs
/// some entry there with lower bound at least `0.99 pi lambda`, where `lambda`
/// is `L` on the circle and in products and `p^{-L-1}` in the p-adic model.
pub fn check_consistency(u: &CharSequence, x: &Element, verdict: &Verdict, report: &OracleReport) -> Result<()> {
    let start = report.trace.len() * 3 / 4;
    let padic_digits: Vec<u64> = match u {
        CharSequence::PAdic { index, .. } if !report.trace.is_empty() => {
            let last = index.term(report.trace.len() - 1).unwrap_or(0) as usize;
            x.digits(last + 1).iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect()
        }
        _ => Vec::new(),
    };
    for (n, b) in report.trace.iter().enumerate().skip(start) {
        let Some(bound) = criterion_bound(u, x, n, &padic_digits) else { continue };
        let cap = up(2.0 * pi_times(&bound).hi);
        if b.hi > cap {
            return Err(Error::Inconsistent(format!("trace at {n} is {b}, above 2 pi * {bound}")));
        }
    }
    if let Outcome::NonMember { limit } = &verdict.outcome {
        let lambda = match u {
            CharSequence::PAdic { p, .. } => {
                let e = limit.to_integer().to_u32().unwrap_or(u32::MAX).saturating_add(1);
                Rational::new(BigInt::one(), BigInt::from(*p).pow(e))
            }
            _ => limit.clone(),
        };
        let need = 0.99 * std::f64::consts::PI * rational_lower(&lambda);
        if !report.tail().iter().any(|b| b.lo >= need) {
            return Err(Error::Inconsistent(format!(
                "NonMember({limit}) but no late trace entry reaches {need:e}"
            )));
        }
        if report.outcome == OracleOutcome::MemberConsistent {
            return Err(Error::Inconsistent("NonMember verdict against a vanishing trace".into()));
        }
    }
    Ok(())
}
