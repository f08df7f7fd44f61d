//! Certified reconstructions of the witness sequences behind the dense
//! non-`F_sigma` T-characterized subgroups.
//!
//! Each construction picks its parameters minimally, builds the witnesses,
//! and records every inequality of the argument as a [`BudgetCheck`]. Exact
//! quantities are compared exactly; anything involving `pi` or `sin` is
//! compared through outward-rounded enclosures, so a passing check is certain.

use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{down, nearest_int_dist, rat, rational_lower, unit_norm, Angle, BoundInterval, Rational};
use crate::decision::{exponent, select_unbounded_witness, Exponent, GroupDescriptor, WitnessFamily};
use crate::error::{Error, Result};
use crate::membership::{compute_mk, member, Outcome, Verdict};
use crate::models::{
    distance_bounds, floor_times, metric_d, pair_sequence, rho, BaseSequence, CharSequence, Element, IndexRule,
    Model, TailRule, DEFAULT_HORIZON, SEARCH_LIMIT,
};

/// A certified lower bound on an asserted bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Threshold {
    pub label: String,
    /// Every value strictly below `lo` is strictly below the bound.
    pub lo: f64,
    /// The bound itself when it is rational.
    pub exact: Option<Rational>,
}

impl Threshold {
    pub fn rational(label: impl Into<String>, q: Rational) -> Self {
        Threshold { label: label.into(), lo: rational_lower(&q), exact: Some(q) }
    }

    /// `2 pi q`, rounded down.
    pub fn two_pi_times(label: impl Into<String>, q: &Rational) -> Self {
        Threshold { label: label.into(), lo: down(2.0 * PI * rational_lower(q)), exact: None }
    }

    /// `a + 2 pi b`, rounded down.
    pub fn plus_two_pi_times(label: impl Into<String>, a: &Rational, b: &Rational) -> Self {
        let lo = down(rational_lower(a) + down(2.0 * PI * rational_lower(b)));
        Threshold { label: label.into(), lo, exact: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Below(Threshold),
    Zero,
    Equals(Rational),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Computed {
    Exact(Rational),
    Interval(BoundInterval),
}

/// One asserted inequality together with the value that was computed for it.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetCheck {
    pub name: String,
    pub index: Option<usize>,
    pub bound: Bound,
    pub computed: Computed,
    pub pass: bool,
}

impl BudgetCheck {
    fn exact_below(name: &str, index: Option<usize>, value: Rational, bound: Threshold) -> Self {
        let q = bound.exact.clone().expect("exact comparisons need a rational bound");
        let pass = value < q;
        BudgetCheck { name: name.into(), index, bound: Bound::Below(bound), computed: Computed::Exact(value), pass }
    }

    fn interval_below(name: &str, index: Option<usize>, value: BoundInterval, bound: Threshold) -> Self {
        let pass = !value.is_lower_only() && value.hi < bound.lo;
        BudgetCheck { name: name.into(), index, bound: Bound::Below(bound), computed: Computed::Interval(value), pass }
    }

    fn equals(name: &str, index: Option<usize>, value: Rational, expected: Rational) -> Self {
        let pass = value == expected;
        let bound = if expected.is_zero() { Bound::Zero } else { Bound::Equals(expected) };
        BudgetCheck { name: name.into(), index, bound, computed: Computed::Exact(value), pass }
    }

    fn holds(name: &str, index: Option<usize>, ok: bool, value: Rational, bound: Threshold) -> Self {
        BudgetCheck { name: name.into(), index, bound: Bound::Below(bound), computed: Computed::Exact(value), pass: ok }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parameters {
    pub epsilon: Rational,
    pub l: usize,
    pub s: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessEntry {
    pub index: usize,
    pub element: Element,
    pub rho: BoundInterval,
    /// `(case label, largest |1 - (u_n, x)| over the case)`.
    pub cases: Vec<(String, BoundInterval)>,
    pub verdict: Outcome,
    /// Bounds on the distance to the limit element.
    pub limit_distance: (Rational, Rational),
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessReport {
    pub family: WitnessFamily,
    pub parameters: Parameters,
    pub sequence: CharSequence,
    pub witnesses: Vec<WitnessEntry>,
    pub limit: Element,
    pub limit_verdict: Verdict,
    pub budget_checks: Vec<BudgetCheck>,
}

impl WitnessReport {
    pub fn all_pass(&self) -> bool {
        self.budget_checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BudgetCheck> {
        self.budget_checks.iter().filter(|c| !c.pass)
    }
}

fn check_epsilon(eps: &Rational) -> Result<()> {
    if *eps <= Rational::zero() || *eps >= rat(1, 10) {
        return Err(Error::OutOfRange(format!("epsilon must satisfy 0 < epsilon < 1/10, got {eps}")));
    }
    Ok(())
}

fn int(v: impl Into<BigInt>) -> Rational {
    Rational::from_integer(v.into())
}

fn max_norm<'a>(it: impl Iterator<Item = &'a BoundInterval>) -> BoundInterval {
    it.fold(BoundInterval::zero(), |a, b| a.max(b))
}

/// `x_k = sum_{n=l}^{k} floor((a_n - 1) eps / 20) / u_n`, zero for `k <= l`.
pub fn torus_witness(bases: &BaseSequence, eps: &Rational, l: usize, k: usize) -> Result<Element> {
    let model = Model::Torus { bases: bases.clone() };
    if k <= l {
        return Element::zero(model);
    }
    let t = eps / int(20);
    let a = bases.terms(k + 1);
    let digits = (0..=k).map(|n| if n < l { BigUint::zero() } else { floor_times(&(&a[n] - 1u8), &t) }).collect();
    Element::new(model, digits, TailRule::Zero)
}

/// Circle construction over `u_n = a_0 a_1 ... a_n`.
pub fn lemma31(bases: &BaseSequence, eps: &Rational, k_max: usize) -> Result<WitnessReport> {
    check_epsilon(eps)?;
    let model = Model::Torus { bases: bases.clone() };
    model.validate()?;
    let u = CharSequence::Torus { bases: bases.clone() };
    let eps20 = eps / int(20);
    let us = bases.partial_products(SEARCH_LIMIT.min(k_max.max(64) + 2));
    let l = (1..us.len())
        .find(|&l| int(2u8) / int(us[l - 1].clone()) < eps20)
        .ok_or_else(|| Error::InvalidRule("no l with 2/u_(l-1) < eps/20 in range".into()))?;
    let mut checks = Vec::new();
    let two_over = int(2u8) / int(us[l - 1].clone());
    checks.push(BudgetCheck::exact_below("l: 2/u_(l-1) < eps/20", None, two_over.clone(), Threshold::rational("eps/20", eps20.clone())));
    if l >= 2 {
        let prev = int(2u8) / int(us[l - 2].clone());
        let minimal = prev >= eps20;
        checks.push(BudgetCheck::holds("l minimal", None, minimal, prev, Threshold::rational("eps/20 (must fail at l-1)", eps20.clone())));
    }

    let limit = Element::new(model.clone(), vec![BigUint::zero(); l], TailRule::ScaledFloor(eps20.clone()))?;
    let limit_verdict = member(&u, &limit, DEFAULT_HORIZON)?;
    let rho_bound = &eps20 + eps * rat(2, 3);
    let ks: Vec<usize> = (l + 1..=k_max).collect();
    let per_k: Result<Vec<(WitnessEntry, Vec<BudgetCheck>)>> = ks
        .par_iter()
        .map(|&k| {
            let x = torus_witness(bases, eps, l, k)?;
            let mut c = Vec::new();
            let value = x.torus_value()?;
            c.push(BudgetCheck::exact_below("near zero: x_k < 2/u_(l-1)", Some(k), value.clone(), Threshold::rational("2/u_(l-1)", two_over.clone())));
            let zero = Element::zero(model.clone())?;
            let d = metric_d(&zero, &x)?;
            c.push(BudgetCheck::exact_below("near zero: d(0,x_k) < eps/20", Some(k), d, Threshold::rational("eps/20", eps20.clone())));
            // u_s x_k for s < k, and u_k x_k which must be an integer
            let pairs = pair_sequence(&u, &x, k + 1, k + 1)?;
            let angles: Vec<Angle> = pairs.iter().map(|p| p.exact().expect("finite element").clone()).collect();
            let max_angle = angles[..k].iter().map(|a| a.value().clone()).max().unwrap_or_else(Rational::zero);
            c.push(BudgetCheck::exact_below("s<k: max_{s<k} u_s x_k mod 1 < eps/10", Some(k), max_angle, Threshold::rational("eps/10", eps / int(10))));
            let norms: Vec<BoundInterval> = angles.iter().map(unit_norm).collect();
            let case1 = max_norm(norms[..k].iter());
            c.push(BudgetCheck::interval_below("s<k: |1-(u_s,x_k)| < 2eps/3", Some(k), case1, Threshold::rational("2eps/3", eps * rat(2, 3))));
            c.push(BudgetCheck::equals("s>=k: u_k x_k mod 1 = 0", Some(k), angles[k].value().clone(), Rational::zero()));
            let r = rho(&u, &zero, &x, k + 2)?;
            c.push(BudgetCheck::interval_below("rho(0,x_k) < eps/20 + 2eps/3", Some(k), r, Threshold::rational("eps/20+2eps/3", rho_bound.clone())));
            c.push(BudgetCheck::interval_below("rho(0,x_k) < eps", Some(k), r, Threshold::rational("eps", eps.clone())));
            let entry = WitnessEntry {
                index: k,
                verdict: member(&u, &x, k + 8)?.outcome,
                limit_distance: distance_bounds(&x, &limit, k + 32)?,
                element: x,
                rho: r,
                cases: vec![("s<k".into(), case1), ("s>=k".into(), norms[k])],
            };
            Ok((entry, c))
        })
        .collect();
    let (witnesses, mut rest) = split(per_k?);
    checks.append(&mut rest);
    push_limit_check(&mut checks, &limit_verdict, &eps20);
    Ok(WitnessReport {
        family: WitnessFamily::A,
        parameters: Parameters { epsilon: eps.clone(), l, s: None },
        sequence: u,
        witnesses,
        limit,
        limit_verdict,
        budget_checks: checks,
    })
}

fn split(per: Vec<(WitnessEntry, Vec<BudgetCheck>)>) -> (Vec<WitnessEntry>, Vec<BudgetCheck>) {
    let mut entries = Vec::with_capacity(per.len());
    let mut checks = Vec::new();
    for (e, mut c) in per {
        entries.push(e);
        checks.append(&mut c);
    }
    (entries, checks)
}

fn push_limit_check(checks: &mut Vec<BudgetCheck>, verdict: &Verdict, expected: &Rational) {
    let value = match &verdict.outcome {
        Outcome::NonMember { limit } => limit.clone(),
        _ => int(-1),
    };
    checks.push(BudgetCheck::equals("limit verdict NonMember", None, value, expected.clone()));
}

/// `omega_r`: ones exactly at `n_{l+i} - s` for `1 <= i <= r`.
pub fn padic_witness(p: u64, index: &IndexRule, l: usize, s: usize, r: usize) -> Result<Element> {
    let model = Model::PAdic { p };
    if r == 0 {
        return Element::zero(model);
    }
    let top = index.term(l + r).ok_or_else(|| Error::OutOfRange("n_(l+r) overflows".into()))? as usize - s;
    let mut digits = vec![BigUint::zero(); top + 1];
    for i in 1..=r {
        let pos = index.term(l + i).expect("below n_(l+r)") as usize - s;
        digits[pos] = BigUint::one();
    }
    Element::new(model, digits, TailRule::Zero)
}

/// p-adic construction over `u_k = 1 / p^{n_k + 1}`.
pub fn lemma32(p: u64, index: &IndexRule, eps: &Rational, r_max: usize) -> Result<WitnessReport> {
    check_epsilon(eps)?;
    let model = Model::PAdic { p };
    model.validate()?;
    if !index.strictly_increasing() || !index.gaps_diverge() {
        return Err(Error::InvalidRule("n_k must increase with gaps tending to infinity".into()));
    }
    let u = CharSequence::PAdic { p, index: index.clone() };
    let eps20 = eps / int(20);
    let pow2 = |s: usize| Rational::new(BigInt::one(), BigInt::one() << s);
    let s = (0..SEARCH_LIMIT).find(|&s| pow2(s) < eps20).expect("2^-s eventually below eps/20");
    let g = index
        .first_index_with_gaps_above(s as u64, 0)
        .ok_or_else(|| Error::InvalidRule(format!("gaps never exceed {s}")))?;
    let l = g.max(s + 1);
    let mut checks = vec![
        BudgetCheck::exact_below("s: 2^-s < eps/20", None, pow2(s), Threshold::rational("eps/20", eps20.clone())),
    ];
    if s > 0 {
        checks.push(BudgetCheck::holds("s minimal", None, pow2(s - 1) >= eps20, pow2(s - 1), Threshold::rational("eps/20 (must fail at s-1)", eps20.clone())));
    }
    let gap_l = index.gap(l).unwrap_or(0);
    checks.push(BudgetCheck::holds("gaps: n_(w+1) - n_w > s for w >= l", Some(l), gap_l > s as u64 && index.first_index_with_gaps_above(s as u64, l) == Some(l), int(gap_l), Threshold::rational("s", int(s as u64))));
    let nterm = |k: usize| index.term(k).map(|v| v as usize).ok_or_else(|| Error::OutOfRange(format!("n_{k} overflows")));
    let n_l = nterm(l)?;
    let n_l1 = nterm(l + 1)?;
    // d(0, omega_r) = 2^{-(n_{l+1} - s)} < 2^{-n_l} <= 2^{-l} < 2^{-s} < eps/20
    let chain = n_l1 - s > n_l && n_l >= l && l > s;
    checks.push(BudgetCheck::holds("distance: 2^-(n_(l+1)-s) < 2^-n_l <= 2^-l < 2^-s", None, chain, pow2(n_l1 - s), Threshold::rational("2^-s", pow2(s))));
    let p_s = Rational::new(BigInt::one(), BigInt::from(p).pow(s as u32));
    checks.push(BudgetCheck::holds("2pi/p^s < eps/2", None, up_two_pi(&p_s) < rational_lower(&(eps / int(2))), p_s.clone(), Threshold::rational("eps/2", eps / int(2))));

    let omega_tilde = Element::new(model.clone(), Vec::new(), TailRule::SpacedOnes { l, s, index: index.clone() })?;
    let limit_verdict = member(&u, &omega_tilde, DEFAULT_HORIZON)?;
    let last_k = l + r_max + 1;
    let ones_digits = omega_tilde.digits(nterm(last_k)? + 1);
    for k in l + 1..=last_k {
        let mk = compute_mk(p, index, &ones_digits, k)?;
        checks.push(BudgetCheck::equals("m_k(limit) = n_k - s", Some(k), int(mk), int((nterm(k)? - s) as u64)));
    }

    let rho_bound = &eps20 + eps / int(2);
    let rs: Vec<usize> = (1..=r_max).collect();
    let per_r: Result<Vec<(WitnessEntry, Vec<BudgetCheck>)>> = rs
        .par_iter()
        .map(|&r| {
            let w = padic_witness(p, index, l, s, r)?;
            let zero = Element::zero(model.clone())?;
            let mut c = Vec::new();
            c.push(BudgetCheck::equals("distance: d(0,omega_r)", Some(r), metric_d(&zero, &w)?, pow2(n_l1 - s)));
            let support = w.prefix().len() as u64;
            let reach = index.first_index_reaching(support).ok_or_else(|| Error::OutOfRange("index search".into()))?;
            // a few indices past l + r exercise the vanishing tail
            let count = reach.max(l + r + 5) + 1;
            let pairs = pair_sequence(&u, &w, count, count)?;
            let angles: Vec<Rational> = pairs.iter().map(|q| q.exact().expect("p-adic pairings are exact").value().clone()).collect();
            let norms: Vec<BoundInterval> = pairs.iter().map(|q| q.unit_norm()).collect();
            let case1 = angles[..=l].iter().max().cloned().unwrap_or_else(Rational::zero);
            c.push(BudgetCheck::equals("k<=l: (u_k,omega_r) = 1 for k <= l", Some(r), case1, Rational::zero()));
            let mid = l + 1..=l + r;
            let case2_angle = mid.clone().map(|k| angles[k].clone()).max().unwrap_or_else(Rational::zero);
            c.push(BudgetCheck::exact_below("l<k<=l+r: angle < p^-s for l < k <= l+r", Some(r), case2_angle, Threshold::rational("p^-s", p_s.clone())));
            let case2 = max_norm(norms[l + 1..=l + r].iter());
            c.push(BudgetCheck::interval_below("l<k<=l+r: |1-(u_k,omega_r)| < eps/2", Some(r), case2, Threshold::rational("eps/2", eps / int(2))));
            let case3 = max_norm(norms[l + r + 1..].iter());
            c.push(BudgetCheck::interval_below("k>l+r: |1-(u_k,omega_r)| < eps/2", Some(r), case3, Threshold::rational("eps/2", eps / int(2))));
            let n_lr = nterm(l + r)?;
            for k in l + r + 1..count {
                // 2 pi p^{n_{l+r} - s + 1} / p^{n_k + 1}
                let q = Rational::new(BigInt::from(p).pow((n_lr - s + 1) as u32), BigInt::from(p).pow(nterm(k)? as u32 + 1));
                c.push(BudgetCheck::interval_below(&format!("k>l+r: tail bound, r={r}"), Some(k), norms[k], Threshold::two_pi_times("2pi p^(n_(l+r)-s+1)/p^(n_k+1)", &q)));
            }
            let rv = rho(&u, &zero, &w, count)?;
            c.push(BudgetCheck::interval_below("rho(0,omega_r) < eps/20 + eps/2", Some(r), rv, Threshold::rational("eps/20+eps/2", rho_bound.clone())));
            c.push(BudgetCheck::interval_below("rho(0,omega_r) < eps", Some(r), rv, Threshold::rational("eps", eps.clone())));
            let entry = WitnessEntry {
                index: r,
                verdict: member(&u, &w, count)?.outcome,
                limit_distance: distance_bounds(&w, &omega_tilde, count)?,
                element: w,
                rho: rv,
                cases: vec![("k<=l".into(), max_norm(norms[..=l].iter())), ("l<k<=l+r".into(), case2), ("k>l+r".into(), case3)],
            };
            Ok((entry, c))
        })
        .collect();
    let (witnesses, mut rest) = split(per_r?);
    checks.append(&mut rest);
    push_limit_check(&mut checks, &limit_verdict, &int(s as u64));
    Ok(WitnessReport {
        family: WitnessFamily::B(p),
        parameters: Parameters { epsilon: eps.clone(), l, s: Some(s) },
        sequence: u,
        witnesses,
        limit: omega_tilde,
        limit_verdict,
        budget_checks: checks,
    })
}

fn up_two_pi(q: &Rational) -> f64 {
    crate::arith::up(2.0 * crate::arith::pi_times(q).hi)
}

/// `omega_k`: digits `floor(eps b_n / 20)` for `l <= n <= k`, zero elsewhere.
pub fn product_witness(bases: &BaseSequence, eps: &Rational, l: usize, k: usize) -> Result<Element> {
    let model = Model::Product { bases: bases.clone() };
    let t = eps / int(20);
    let b = bases.terms(k + 1);
    let digits = (0..=k).map(|n| if n < l { BigUint::zero() } else { floor_times(&b[n], &t) }).collect();
    Element::new(model, digits, TailRule::Zero)
}

/// Product construction over `u_n = 1` in the `n`-th summand.
pub fn lemma33(bases: &BaseSequence, eps: &Rational, k_max: usize) -> Result<WitnessReport> {
    check_epsilon(eps)?;
    let model = Model::Product { bases: bases.clone() };
    model.validate()?;
    let u = CharSequence::Product { bases: bases.clone() };
    let eps20 = eps / int(20);
    let eps3 = eps / int(3);
    let pow2 = |s: usize| Rational::new(BigInt::one(), BigInt::one() << s);
    let l = (0..SEARCH_LIMIT).find(|&l| pow2(l) < eps3).expect("2^-l eventually below eps/3");
    let mut checks = vec![BudgetCheck::exact_below("l: 2^-l < eps/3", None, pow2(l), Threshold::rational("eps/3", eps3.clone()))];
    if l > 0 {
        checks.push(BudgetCheck::holds("l minimal", None, pow2(l - 1) >= eps3, pow2(l - 1), Threshold::rational("eps/3 (must fail at l-1)", eps3.clone())));
    }
    checks.push(BudgetCheck::holds("2pi eps/20 < eps", None, up_two_pi(&eps20) < rational_lower(eps), eps20.clone(), Threshold::rational("eps", eps.clone())));
    let limit = Element::new(model.clone(), vec![BigUint::zero(); l], TailRule::ScaledFloor(eps20.clone()))?;
    let limit_verdict = member(&u, &limit, DEFAULT_HORIZON)?;
    let rho_bound = Threshold::plus_two_pi_times("eps/3 + 2pi eps/20", &eps3, &eps20);
    let ks: Vec<usize> = (l + 1..=k_max).collect();
    let per_k: Result<Vec<(WitnessEntry, Vec<BudgetCheck>)>> = ks
        .par_iter()
        .map(|&k| {
            let w = product_witness(bases, eps, l, k)?;
            let zero = Element::zero(model.clone())?;
            let mut c = Vec::new();
            let d = metric_d(&zero, &w)?;
            c.push(BudgetCheck::holds("d(0,omega_k) <= 2^-l", Some(k), d <= pow2(l), d.clone(), Threshold::rational("2^-l", pow2(l))));
            let count = k + 4;
            let pairs = pair_sequence(&u, &w, count, count)?;
            let angles: Vec<Rational> = pairs.iter().map(|q| q.exact().expect("exact").value().clone()).collect();
            let max_ratio = angles[l..=k].iter().max().cloned().unwrap_or_else(Rational::zero);
            c.push(BudgetCheck::holds("digit/b_n <= eps/20", Some(k), max_ratio <= eps20, max_ratio.clone(), Threshold::rational("eps/20", eps20.clone())));
            let norms: Vec<BoundInterval> = pairs.iter().map(|q| q.unit_norm()).collect();
            let inner = max_norm(norms[..=k].iter());
            c.push(BudgetCheck::interval_below("|1-(u_n,omega_k)| < eps", Some(k), inner, Threshold::rational("eps", eps.clone())));
            let outer = angles[k + 1..].iter().max().cloned().unwrap_or_else(Rational::zero);
            c.push(BudgetCheck::equals("(u_n,omega_k) = 1 for n > k", Some(k), outer, Rational::zero()));
            let rv = rho(&u, &zero, &w, count)?;
            c.push(BudgetCheck::interval_below("rho(0,omega_k) < eps/3 + 2pi eps/20", Some(k), rv, rho_bound.clone()));
            c.push(BudgetCheck::interval_below("rho(0,omega_k) < eps", Some(k), rv, Threshold::rational("eps", eps.clone())));
            let entry = WitnessEntry {
                index: k,
                verdict: member(&u, &w, count)?.outcome,
                limit_distance: distance_bounds(&w, &limit, k + 32)?,
                element: w,
                rho: rv,
                cases: vec![("n<=k".into(), inner), ("n>k".into(), max_norm(norms[k + 1..].iter()))],
            };
            Ok((entry, c))
        })
        .collect();
    let (witnesses, mut rest) = split(per_k?);
    checks.append(&mut rest);
    push_limit_check(&mut checks, &limit_verdict, &eps20);
    Ok(WitnessReport {
        family: WitnessFamily::C(bases.clone()),
        parameters: Parameters { epsilon: eps.clone(), l, s: None },
        sequence: u,
        witnesses,
        limit,
        limit_verdict,
        budget_checks: checks,
    })
}

/// Choices left open by the dispatch: circle bases, p-adic index rule, and run length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessConfig {
    pub torus_bases: BaseSequence,
    pub padic_index: IndexRule,
    /// `k_max` for the circle and product constructions, `r_max` for the p-adic one.
    pub scale: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig { torus_bases: BaseSequence::arith(100, 100), padic_index: IndexRule::Squares, scale: 40 }
    }
}

/// Runs the construction matching the unbounded subgroup found in `d`.
pub fn run_theorem13(d: &GroupDescriptor, eps: &Rational, config: &WitnessConfig) -> Result<WitnessReport> {
    if let Exponent::Finite(e) = exponent(d) {
        return Err(Error::Bounded(format!("exponent {e} is finite")));
    }
    match select_unbounded_witness(d)? {
        WitnessFamily::A => lemma31(&config.torus_bases, eps, config.scale),
        WitnessFamily::B(p) => lemma32(p, &config.padic_index, eps, config.scale),
        WitnessFamily::C(b) => lemma33(&b, eps, config.scale),
    }
}

/// `||x||` for a finitely supported circle point, exact.
pub fn torus_norm(x: &Element) -> Result<Rational> {
    Ok(nearest_int_dist(&Angle::new(x.torus_value()?)))
}

/// `k` with `u_k x` an integer, the first index past which all pairings are trivial.
pub fn torus_annihilating_index(bases: &BaseSequence, x: &Element) -> Result<usize> {
    let v = x.torus_value()?;
    let us = bases.partial_products(x.prefix().len().max(1));
    us.iter()
        .position(|u| (int(u.clone()) * &v).is_integer())
        .ok_or_else(|| Error::OutOfRange("no partial product clears the denominator".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{Factor, FactorKind, Multiplicity};

    fn eps() -> Rational {
        rat(2, 25)
    }

    #[test]
    fn lemma31_parameters_and_budgets() {
        let r = lemma31(&BaseSequence::arith(100, 100), &eps(), 12).unwrap();
        assert_eq!(r.parameters.l, 2);
        for c in r.failures() {
            panic!("failed budget {c:?}");
        }
        assert_eq!(r.limit_verdict.outcome, Outcome::NonMember { limit: rat(1, 250) });
        assert!(r.witnesses.iter().all(|w| w.verdict == Outcome::Member));
        assert_eq!(r.witnesses.len(), 10);
    }

    #[test]
    fn lemma31_degenerate_range_is_zero() {
        let b = BaseSequence::arith(100, 100);
        let x = torus_witness(&b, &eps(), 2, 2).unwrap();
        assert!(x.prefix().is_empty());
        let u = CharSequence::Torus { bases: b.clone() };
        let zero = Element::zero(u.model()).unwrap();
        assert_eq!(rho(&u, &zero, &x, 4).unwrap(), BoundInterval::zero());
        assert!(lemma31(&b, &eps(), 2).unwrap().witnesses.is_empty());
    }

    #[test]
    fn lemma31_witnesses_converge_monotonically() {
        let r = lemma31(&BaseSequence::arith(100, 100), &eps(), 10).unwrap();
        let his: Vec<&Rational> = r.witnesses.iter().map(|w| &w.limit_distance.1).collect();
        assert!(his.windows(2).all(|w| w[1] < w[0]), "{his:?}");
    }

    #[test]
    fn lemma32_parameters_and_budgets() {
        let r = lemma32(2, &IndexRule::Squares, &eps(), 8).unwrap();
        assert_eq!((r.parameters.s, r.parameters.l), (Some(8), 9));
        for c in r.failures() {
            panic!("failed budget {c:?}");
        }
        assert_eq!(r.limit_verdict.outcome, Outcome::NonMember { limit: rat(8, 1) });
        assert!(r.witnesses.iter().all(|w| w.verdict == Outcome::Member));
        let his: Vec<&Rational> = r.witnesses.iter().map(|w| &w.limit_distance.1).collect();
        assert!(his.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn lemma32_rejects_bounded_gaps() {
        let arith = IndexRule::Arithmetic { start: 1, step: 3 };
        assert!(lemma32(2, &arith, &eps(), 4).is_err());
        assert!(lemma32(4, &IndexRule::Squares, &eps(), 4).is_err());
    }

    #[test]
    fn lemma33_parameters_and_budgets() {
        let r = lemma33(&BaseSequence::geom(2, 2), &eps(), 16).unwrap();
        assert_eq!(r.parameters.l, 6);
        for c in r.failures() {
            panic!("failed budget {c:?}");
        }
        assert_eq!(r.limit_verdict.outcome, Outcome::NonMember { limit: rat(1, 250) });
        assert!(r.witnesses.iter().all(|w| w.verdict == Outcome::Member));
    }

    #[test]
    fn lemma33_small_bases_give_zero_witnesses() {
        let r = lemma33(&BaseSequence::arith(2, 1), &eps(), 20).unwrap();
        assert!(r.all_pass());
        for w in &r.witnesses {
            assert!(w.element.support_len() == Some(0));
            assert_eq!(w.rho, BoundInterval::zero());
        }
    }

    #[test]
    fn epsilon_range_is_enforced() {
        let b = BaseSequence::arith(100, 100);
        assert!(lemma31(&b, &rat(1, 10), 4).is_err());
        assert!(lemma31(&b, &rat(0, 1), 4).is_err());
        assert!(lemma33(&BaseSequence::geom(2, 2), &rat(1, 5), 4).is_err());
    }

    #[test]
    fn budgets_hold_across_epsilons() {
        for e in [rat(1, 100), rat(1, 50), rat(2, 25), rat(9, 100)] {
            assert!(lemma31(&BaseSequence::arith(100, 100), &e, 12).unwrap().all_pass(), "circle {e}");
            assert!(lemma32(2, &IndexRule::Squares, &e, 6).unwrap().all_pass(), "p-adic {e}");
            assert!(lemma32(3, &IndexRule::Triangular, &e, 6).unwrap().all_pass(), "3-adic {e}");
            assert!(lemma33(&BaseSequence::geom(2, 2), &e, 12).unwrap().all_pass(), "product {e}");
        }
    }

    #[test]
    fn dispatch_follows_the_case_order() {
        let cfg = WitnessConfig { scale: 6, ..WitnessConfig::default() };
        let one = Multiplicity::Finite(1);
        let z = GroupDescriptor::new(vec![Factor::new(FactorKind::InfiniteCyclic, one)]).unwrap();
        assert_eq!(run_theorem13(&z, &eps(), &cfg).unwrap().family, WitnessFamily::A);
        let pr = GroupDescriptor::new(vec![Factor::new(FactorKind::Prufer(2), one)]).unwrap();
        assert_eq!(run_theorem13(&pr, &eps(), &cfg).unwrap().family, WitnessFamily::B(2));
        let fam = GroupDescriptor::new(vec![Factor::new(FactorKind::CyclicFamily(BaseSequence::geom(2, 2)), one)]).unwrap();
        assert!(matches!(run_theorem13(&fam, &eps(), &cfg).unwrap().family, WitnessFamily::C(_)));
        let bounded = GroupDescriptor::new(vec![Factor::new(FactorKind::Cyclic(4), Multiplicity::Omega)]).unwrap();
        assert!(matches!(run_theorem13(&bounded, &eps(), &cfg), Err(Error::Bounded(_))));
    }

    #[test]
    fn annihilating_index_of_witnesses() {
        let b = BaseSequence::arith(100, 100);
        let x = torus_witness(&b, &eps(), 2, 7).unwrap();
        assert!(torus_annihilating_index(&b, &x).unwrap() <= 7);
        assert!(torus_norm(&x).unwrap() < rat(1, 250));
    }
}
