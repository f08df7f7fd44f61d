//! Acceptance suite: one PASS/FAIL line per criterion, every tolerance pinned.
//!
//! Each criterion is checked against an oracle written here from first
//! principles rather than through the library code path it tests.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tchar_core::arith::rat;
use tchar_core::{
    check_consistency, compute_mk, connected_dual, lemma31, lemma32, lemma33, member, numeric_oracle, socle_rank,
    tchar_decide, unit_norm, Angle, BaseSequence, BoundInterval, CharSequence, Element, Factor, FactorKind,
    GroupDescriptor, IndexRule, Multiplicity, Outcome, TailRule,
};

/// Relative agreement demanded between certified enclosures and f64 oracles.
const REL_TOL: f64 = 1e-12;
/// Absolute slack for oracle values at or near zero.
const ABS_TOL: f64 = 1e-300;

const SANDWICH_SAMPLES: usize = 10_000;
const SANDWICH_MAX_DENOM: i64 = 10_000;
const SANDWICH_LIMIT: Duration = Duration::from_secs(5);
const CIRCLE_LIMIT: Duration = Duration::from_secs(30);
const PADIC_LIMIT: Duration = Duration::from_secs(60);
const PRODUCT_LIMIT: Duration = Duration::from_secs(10);
const SWEEP_LIMIT: Duration = Duration::from_secs(60);
const CONSISTENCY_SAMPLES: usize = 100;
const CONSISTENCY_HORIZON: usize = 256;
const ORACLE_TOL: f64 = 1e-6;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

/// The enclosure contains `v` up to the pinned relative tolerance.
fn encloses(b: &BoundInterval, v: f64) -> bool {
    let slack = v.abs() * REL_TOL + ABS_TOL;
    b.lo <= v + slack && v - slack <= b.hi
}

fn big(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `||q||` computed from the fractional part directly.
fn dist_to_int(q: &BigRational) -> BigRational {
    let f = q - q.floor();
    let g = BigRational::one() - &f;
    if f < g {
        f
    } else {
        g
    }
}

fn chord_f64(q: &BigRational) -> f64 {
    2.0 * (PI * dist_to_int(q).to_f64().unwrap()).sin()
}

fn sandwich() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_gap = f64::INFINITY;
    for i in 0..SANDWICH_SAMPLES {
        // always include the extreme denominator and the point 1/2
        let q = if i == 0 { SANDWICH_MAX_DENOM } else { rng.gen_range(1..=SANDWICH_MAX_DENOM) };
        let p = if i == 0 { q / 2 } else { rng.gen_range(0..q) };
        let a = Angle::from_ratio(p, q);
        let r = p.min(q - p) as f64 / q as f64;
        let norm = unit_norm(&a);
        let direct = 2.0 * (PI * r).sin();
        ensure(encloses(&norm, direct), || format!("{p}/{q}: {norm} misses {direct}"))?;
        // pi ||phi|| <= |1 - e^{2 pi i phi}| <= 2 pi ||phi||, on certified lower and upper ends
        ensure(PI * r * (1.0 - REL_TOL) <= norm.hi, || format!("{p}/{q}: lower sandwich fails, {norm}"))?;
        ensure(norm.lo <= 2.0 * PI * r * (1.0 + REL_TOL) + ABS_TOL, || format!("{p}/{q}: upper sandwich fails, {norm}"))?;
        if r > 0.0 {
            worst_gap = worst_gap.min(norm.lo / (PI * r));
        }
    }
    within_time(start, SANDWICH_LIMIT)?;
    Ok(format!("{SANDWICH_SAMPLES} angles, min |1-e|/(pi||phi||) = {worst_gap:.6}, {:.2?}", start.elapsed()))
}

fn circle_construction() -> Check {
    let start = Instant::now();
    let eps = rat(2, 25);
    let bases = BaseSequence::arith(100, 100);
    let report = lemma31(&bases, &eps, 40).map_err(|e| e.to_string())?;
    ensure(report.parameters.l == 2, || format!("l = {}", report.parameters.l))?;
    ensure(report.witnesses.len() == 38, || format!("{} witnesses", report.witnesses.len()))?;
    let bound_a = 1.0 / 250.0 + 4.0 / 75.0;
    let a: Vec<BigRational> = (0..=41).map(|n| big(100 * (n as i64 + 1))).collect();
    let u: Vec<BigRational> = a.iter().scan(BigRational::one(), |acc, x| {
        *acc = &*acc * x;
        Some(acc.clone())
    }).collect();
    for w in &report.witnesses {
        let k = w.index;
        ensure(w.rho.hi < bound_a && w.rho.hi < 0.08, || format!("k={k}: rho {}", w.rho))?;
        ensure(w.verdict == Outcome::Member, || format!("k={k}: witness not a member"))?;
        // x_k = sum_{n=2}^{k} floor((a_n - 1)/250) / u_n, recomputed here
        let x: BigRational = (2..=k)
            .map(|n| big((100 * (n as i64 + 1) - 1) / 250) / &u[n])
            .fold(BigRational::zero(), |s, t| s + t);
        let sup = (0..k).map(|s| chord_f64(&(&u[s] * &x))).fold(0.0, f64::max);
        let rho = x.to_f64().unwrap() + sup;
        ensure(encloses(&w.rho, rho), || format!("k={k}: {} misses oracle {rho}", w.rho))?;
        ensure((&u[k] * &x).is_integer(), || format!("k={k}: u_k x_k not an integer"))?;
    }
    ensure(report.all_pass(), || format!("{} budget failures", report.failures().count()))?;
    ensure(
        report.limit_verdict.outcome == Outcome::NonMember { limit: rat(1, 250) },
        || format!("limit verdict {:?}", report.limit_verdict.outcome),
    )?;
    within_time(start, CIRCLE_LIMIT)?;
    let worst = report.witnesses.iter().map(|w| w.rho.hi).fold(0.0, f64::max);
    Ok(format!("38 witnesses, max rho hi {worst:.6} < {bound_a:.6}, limit NonMember(1/250), {:.2?}", start.elapsed()))
}

/// `m_k` from its definition, scanning the run that ends at `n_k`.
fn mk_oracle(p: u64, n: &[u64], digits: &[u64], k: usize) -> u64 {
    let nk = n[k] as usize;
    let top = digits[nk];
    let j = if top > 0 && top < p - 1 {
        nk as u64
    } else {
        let mut j = nk;
        while j > 0 && digits[j - 1] == top {
            j -= 1;
        }
        // digits on (j - 1, n_k] agree; the definition's j is one below the run
        j.saturating_sub(1) as u64
    };
    j.max(n[k - 1])
}

fn padic_construction() -> Check {
    let start = Instant::now();
    let eps = rat(2, 25);
    let report = lemma32(2, &IndexRule::Squares, &eps, 30).map_err(|e| e.to_string())?;
    let (l, s) = (report.parameters.l, report.parameters.s);
    ensure(l == 9 && s == Some(8), || format!("l={l}, s={s:?}"))?;
    let n: Vec<u64> = (0..=45u64).map(|k| k * k).collect();
    let mut limit_digits = vec![0u64; (n[45] + 1) as usize];
    for i in 1..=35 {
        limit_digits[(n[9 + i] - 8) as usize] = 1;
    }
    for w in &report.witnesses {
        let r = w.index;
        ensure(w.rho.hi < 0.08, || format!("r={r}: rho {}", w.rho))?;
        ensure(w.verdict == Outcome::Member, || format!("r={r}: witness not a member"))?;
        // omega_r has ones at n_{9+i} - 8; its pairings are exact dyadic rationals
        let ones: Vec<u64> = (1..=r).map(|i| n[9 + i] - 8).collect();
        let pairing = |k: usize| -> BigRational {
            let numer: BigInt = ones.iter().filter(|&&j| j <= n[k]).map(|&j| BigInt::one() << j).sum();
            BigRational::new(numer, BigInt::one() << (n[k] + 1))
        };
        let sup = (0..=9 + r + 3).map(|k| chord_f64(&pairing(k))).fold(0.0, f64::max);
        let rho = 2f64.powi(-92) + sup;
        ensure(encloses(&w.rho, rho), || format!("r={r}: {} misses oracle {rho}", w.rho))?;
    }
    let digits: Vec<BigUint> = limit_digits.iter().map(|&d| BigUint::from(d)).collect();
    for k in 10..=40 {
        let got = compute_mk(2, &IndexRule::Squares, &digits, k).map_err(|e| e.to_string())?;
        let want = mk_oracle(2, &n, &limit_digits, k);
        ensure(got == want && got == n[k] - 8, || format!("k={k}: m_k {got}, oracle {want}, n_k - 8 = {}", n[k] - 8))?;
    }
    ensure(report.all_pass(), || format!("{} budget failures", report.failures().count()))?;
    ensure(
        report.limit_verdict.outcome == Outcome::NonMember { limit: rat(8, 1) },
        || format!("limit verdict {:?}", report.limit_verdict.outcome),
    )?;
    within_time(start, PADIC_LIMIT)?;
    let worst = report.witnesses.iter().map(|w| w.rho.hi).fold(0.0, f64::max);
    Ok(format!("s=8, l=9, 30 witnesses, max rho hi {worst:.6} < 0.08, m_k = n_k - 8 on 10..=40, {:.2?}", start.elapsed()))
}

fn product_construction() -> Check {
    let start = Instant::now();
    let eps = rat(2, 25);
    let report = lemma33(&BaseSequence::geom(2, 2), &eps, 40).map_err(|e| e.to_string())?;
    ensure(report.parameters.l == 6, || format!("l = {}", report.parameters.l))?;
    for w in &report.witnesses {
        let k = w.index;
        ensure(w.rho.hi < 0.08, || format!("k={k}: rho {}", w.rho))?;
        ensure(w.verdict == Outcome::Member, || format!("k={k}: witness not a member"))?;
        // digit floor(2^{n+1} / 250) over b_n = 2^{n+1}; the first nonzero digit is at n = 7
        let ratios: Vec<BigRational> = (6..=k)
            .map(|n| BigRational::new((BigInt::one() << (n + 1)) / 250, BigInt::one() << (n + 1)))
            .collect();
        let sup = ratios.iter().map(chord_f64).fold(0.0, f64::max);
        let rho = 2f64.powi(-7) + sup;
        ensure(encloses(&w.rho, rho), || format!("k={k}: {} misses oracle {rho}", w.rho))?;
    }
    ensure(report.all_pass(), || format!("{} budget failures", report.failures().count()))?;
    ensure(
        report.limit_verdict.outcome == Outcome::NonMember { limit: rat(1, 250) },
        || format!("limit verdict {:?}", report.limit_verdict.outcome),
    )?;
    within_time(start, PRODUCT_LIMIT)?;
    let worst = report.witnesses.iter().map(|w| w.rho.hi).fold(0.0, f64::max);
    Ok(format!("{} witnesses, max rho hi {worst:.6} < 0.08, limit NonMember(1/250), {:.2?}", report.witnesses.len(), start.elapsed()))
}

/// Invariant factors `d_1 | d_2 | ... | d_m` of `Z(n_1) + ... + Z(n_m)` by
/// repeated gcd/lcm exchange on the diagonal.
fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    let mut d = orders.to_vec();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let (g, l) = (d[i].gcd(&d[j]), d[i].lcm(&d[j]));
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

/// Largest `r` with `Z(e)^r` inside the group: the number of invariant factors divisible by `e`.
fn socle_oracle(orders: &[u64], e: u64) -> u64 {
    invariant_factors(orders).iter().filter(|&&d| d % e == 0).count() as u64
}

fn truncate(kinds: &[(u64, Multiplicity)], k: u64) -> Vec<u64> {
    kinds
        .iter()
        .flat_map(|&(n, m)| {
            let c = match m {
                Multiplicity::Finite(c) => c,
                Multiplicity::Omega => k,
            };
            std::iter::repeat(n).take(c as usize)
        })
        .collect()
}

fn decision_sweep() -> Check {
    let start = Instant::now();
    let orders: Vec<u64> = (2..=16).collect();
    let mults = [Multiplicity::Finite(1), Multiplicity::Finite(2), Multiplicity::Finite(3), Multiplicity::Omega];
    let mut sets: Vec<Vec<u64>> = Vec::new();
    for size in 1..=4 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            sets.push(idx.iter().map(|&i| orders[i]).collect());
            let Some(pos) = (0..size).rev().find(|&p| idx[p] < orders.len() - size + p) else { break };
            idx[pos] += 1;
            for q in pos + 1..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    let results: Vec<Result<(usize, usize), String>> = sets
        .par_iter()
        .map(|set| {
            let mut cases = 0;
            let mut disagreements = 0;
            let combos = mults.len().pow(set.len() as u32);
            for mut c in 0..combos {
                let kinds: Vec<(u64, Multiplicity)> = set
                    .iter()
                    .map(|&n| {
                        let m = mults[c % mults.len()];
                        c /= mults.len();
                        (n, m)
                    })
                    .collect();
                let d = GroupDescriptor::new(kinds.iter().map(|&(n, m)| Factor::new(FactorKind::Cyclic(n), m)).collect())
                    .map_err(|e| e.to_string())?;
                let e = set.iter().fold(1u64, |a, &n| a.lcm(&n));
                let finite: u64 = kinds.iter().map(|&(_, m)| if let Multiplicity::Finite(c) = m { c } else { 0 }).sum();
                // the rank is min over primes of affine functions of k, so growth at k = C+1 settles omega
                let grows = socle_oracle(&truncate(&kinds, finite + 2), e) > socle_oracle(&truncate(&kinds, finite + 1), e);
                let answer = tchar_decide(&d, true, true).map_err(|e| e.to_string())?.answer;
                cases += 1;
                if answer != grows {
                    disagreements += 1;
                }
                for k in 1..=5 {
                    let got = socle_rank(&d, e, k).map_err(|e| e.to_string())?.rank;
                    if got != socle_oracle(&truncate(&kinds, k), e) {
                        return Err(format!("socle rank of {d} at k={k}: {got}"));
                    }
                }
            }
            Ok((cases, disagreements))
        })
        .collect();
    let mut cases = 0;
    let mut disagreements = 0;
    for r in results {
        let (c, d) = r?;
        cases += c;
        disagreements += d;
    }
    ensure(disagreements == 0, || format!("{disagreements} disagreements over {cases} descriptors"))?;
    within_time(start, SWEEP_LIMIT)?;
    Ok(format!("{cases} descriptors, 0 disagreements, truncated ranks agree for k=1..=5, {:.2?}", start.elapsed()))
}

fn decision_table() -> Check {
    let parse = |s: &str| s.parse::<GroupDescriptor>().map_err(|e| e.to_string());
    let cases = [("Z:1", true), ("Z(2):1", false), ("Z(2):omega", true), ("Z(2):omega + Z(4):1", false)];
    for (text, want) in cases {
        let got = tchar_decide(&parse(text)?, true, true).map_err(|e| e.to_string())?.answer;
        ensure(got == want, || format!("{text}: got {got}, want {want}"))?;
    }
    ensure(connected_dual(&parse("Z:1")?), || "Z should have a connected dual".into())?;
    ensure(!connected_dual(&parse("Z(2):1 + Z:1")?), || "Z(2) + Z should not have a connected dual".into())?;
    Ok("4 decisions and 2 connectivity answers match".into())
}

fn sample(rng: &mut ChaCha8Rng, u: &CharSequence) -> Option<Element> {
    let len = rng.gen_range(0..6);
    let tail = match (u, rng.gen_range(0..4)) {
        (_, 0) => TailRule::Zero,
        (CharSequence::PAdic { .. }, 1) => TailRule::ConstantDigit(1u8.into()),
        (CharSequence::PAdic { .. }, 2) => TailRule::Periodic(vec![0u8.into(), 1u8.into(), 1u8.into()]),
        (CharSequence::PAdic { index, .. }, _) => {
            let s = rng.gen_range(0..5);
            TailRule::SpacedOnes { l: s + rng.gen_range(1..6), s, index: index.clone() }
        }
        (_, 1) => TailRule::ConstantDigit(1u8.into()),
        (_, 2) => TailRule::Periodic(vec![0u8.into(), 1u8.into()]),
        _ => TailRule::ScaledFloor(rat(rng.gen_range(1..20), 20)),
    };
    let digits: Vec<u64> = (0..len).map(|_| rng.gen_range(0..2)).collect();
    Element::from_digits(u.model(), &digits, tail).ok()
}

fn consistency() -> Check {
    let seqs = [
        CharSequence::Torus { bases: BaseSequence::arith(100, 100) },
        CharSequence::PAdic { p: 2, index: IndexRule::Squares },
        CharSequence::Product { bases: BaseSequence::geom(2, 2) },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut summary = Vec::new();
    for u in &seqs {
        let (mut members, mut non_members, mut done) = (0, 0, 0);
        while done < CONSISTENCY_SAMPLES {
            let Some(x) = sample(&mut rng, u) else { continue };
            done += 1;
            let v = member(u, &x, CONSISTENCY_HORIZON).map_err(|e| e.to_string())?;
            match v.outcome {
                Outcome::Member => members += 1,
                Outcome::NonMember { .. } => non_members += 1,
                Outcome::Undetermined { .. } => return Err(format!("{x}: Undetermined inside the grammar")),
            }
            let report = numeric_oracle(u, &x, CONSISTENCY_HORIZON, ORACLE_TOL).map_err(|e| e.to_string())?;
            ensure(report.trace.len() == CONSISTENCY_HORIZON, || format!("{x}: trace of {}", report.trace.len()))?;
            check_consistency(u, &x, &v, &report).map_err(|e| format!("{x}: {e}"))?;
        }
        ensure(members > 0 && non_members > 0, || format!("{}: {members} members, {non_members} non-members", u.model().name()))?;
        summary.push(format!("{} {members}/{non_members}", u.model().name()));
    }
    Ok(format!("0 contradictions; member/non-member counts: {}", summary.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 7] = [
        ("sandwich bound on 10^4 rationals", sandwich),
        ("circle witnesses, a_n = 100(n+1), eps = 2/25", circle_construction),
        ("2-adic witnesses, n_k = k^2, eps = 2/25", padic_construction),
        ("product witnesses, b_n = 2^(n+1), eps = 2/25", product_construction),
        ("finite-exponent decisions against invariant-factor oracle", decision_sweep),
        ("decision table", decision_table),
        ("membership verdicts against numeric traces", consistency),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("acceptance {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
