//! Self-check suites run by `tchar verify`.

use std::time::Instant;

use anyhow::Result;
use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tchar_core::arith::{pi_times, rat};
use tchar_core::{
    check_consistency, member, minap_admissible, nearest_int_dist, numeric_oracle, tchar_decide, unit_norm, Angle,
    BaseSequence, CharSequence, Element, Factor, FactorKind, GroupDescriptor, IndexRule, Multiplicity, TailRule,
    WitnessConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// `pi ||phi|| <= |1 - e^{2 pi i phi}| <= 2 pi ||phi||` on random rationals.
    Eq02,
    /// Symbolic membership verdicts against the numeric oracle.
    Membership,
    /// Every budget of the three witness constructions on an epsilon grid.
    Budgets,
    /// Decision procedure against the MinAP characterization, plus text round trips.
    Decision,
    All,
}

pub struct Outcome {
    pub record: Value,
    pub pass: bool,
}

pub fn run(suite: Suite, samples: usize, seed: u64, horizon: usize, tol: f64) -> Result<Vec<Outcome>> {
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![Suite::Eq02, Suite::Membership, Suite::Budgets, Suite::Decision],
        s => vec![s],
    };
    let mut out = Vec::new();
    for s in suites {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = Instant::now();
        let (checked, failures) = match s {
            Suite::Eq02 => eq02(&mut rng, samples),
            Suite::Membership => membership(&mut rng, samples, horizon, tol)?,
            Suite::Budgets => budgets(samples)?,
            Suite::Decision => decision(&mut rng, samples)?,
            Suite::All => unreachable!(),
        };
        let name = s.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
        out.push(Outcome {
            pass: failures.is_empty(),
            record: json!({
                "suite": name,
                "checked": checked,
                "failures": failures.len(),
                "first_failures": failures.iter().take(5).collect::<Vec<_>>(),
                "pass": failures.is_empty(),
                "seconds": start.elapsed().as_secs_f64(),
            }),
        });
    }
    Ok(out)
}

fn eq02(rng: &mut ChaCha8Rng, samples: usize) -> (usize, Vec<String>) {
    let mut failures = Vec::new();
    for _ in 0..samples {
        let q = rng.gen_range(1..=10_000i64);
        let p = rng.gen_range(0..q);
        let a = Angle::from_ratio(p, q);
        let d = nearest_int_dist(&a);
        let norm = unit_norm(&a);
        let pi_d = pi_times(&d);
        // both enclosures are certified, so overlap is what a true inequality allows
        if !(pi_d.lo <= norm.hi && norm.lo <= 2.0 * pi_d.hi) {
            failures.push(format!("{p}/{q}: norm {norm} against pi*d {pi_d}"));
        }
    }
    (samples, failures)
}

pub fn sample_element(rng: &mut ChaCha8Rng, u: &CharSequence) -> Option<Element> {
    let model = u.model();
    let len = rng.gen_range(0..8);
    let (digit_cap, tails): (u64, Vec<TailRule>) = match u {
        CharSequence::PAdic { p, index } => (
            *p,
            vec![
                TailRule::Zero,
                TailRule::ConstantDigit((p - 1).into()),
                TailRule::Periodic(vec![0u8.into(), 1u8.into()]),
                TailRule::SpacedOnes { l: rng.gen_range(4..12), s: rng.gen_range(0..4), index: index.clone() },
            ],
        ),
        _ => (
            2,
            vec![
                TailRule::Zero,
                TailRule::ConstantDigit(1u8.into()),
                TailRule::Periodic(vec![1u8.into(), 0u8.into(), 1u8.into()]),
                TailRule::ScaledFloor(rat(rng.gen_range(0..20), 20)),
            ],
        ),
    };
    let digits: Vec<u64> = (0..len).map(|_| rng.gen_range(0..digit_cap)).collect();
    let tail = tails[rng.gen_range(0..tails.len())].clone();
    Element::from_digits(model, &digits, tail).ok()
}

fn membership(rng: &mut ChaCha8Rng, samples: usize, horizon: usize, tol: f64) -> Result<(usize, Vec<String>)> {
    let seqs = [
        CharSequence::Torus { bases: BaseSequence::arith(100, 100) },
        CharSequence::PAdic { p: 2, index: IndexRule::Squares },
        CharSequence::Product { bases: BaseSequence::geom(2, 2) },
    ];
    let mut failures = Vec::new();
    let mut checked = 0;
    for u in &seqs {
        let mut done = 0;
        while done < samples {
            let Some(x) = sample_element(rng, u) else { continue };
            done += 1;
            checked += 1;
            let v = member(u, &x, horizon)?;
            let report = numeric_oracle(u, &x, horizon, tol)?;
            if let Err(e) = check_consistency(u, &x, &v, &report) {
                failures.push(format!("{x}: {e}"));
            }
        }
    }
    Ok((checked, failures))
}

fn budgets(samples: usize) -> Result<(usize, Vec<String>)> {
    let scale = samples.clamp(1, 40);
    let mut failures = Vec::new();
    let mut checked = 0;
    let families = [
        "Z:1".parse::<GroupDescriptor>()?,
        "Zp(2,inf):1".parse()?,
        "Zfam(geom(2,2)):1".parse()?,
    ];
    for eps in [rat(1, 100), rat(1, 50), rat(2, 25), rat(9, 100)] {
        for d in &families {
            let cfg = WitnessConfig { scale, ..WitnessConfig::default() };
            let r = tchar_core::run_theorem13(d, &eps, &cfg)?;
            checked += r.budget_checks.len();
            failures.extend(r.failures().map(|c| format!("{} eps={eps}: {} at {:?}", r.family.letter(), c.name, c.index)));
            if r.witnesses.iter().any(|w| w.verdict != tchar_core::Outcome::Member) {
                failures.push(format!("{} eps={eps}: a witness is not a member", r.family.letter()));
            }
        }
    }
    Ok((checked, failures))
}

fn random_descriptor(rng: &mut ChaCha8Rng) -> GroupDescriptor {
    let n = rng.gen_range(1..5);
    let factors = (0..n)
        .map(|_| {
            let kind = match rng.gen_range(0..10) {
                0 => FactorKind::InfiniteCyclic,
                1 => FactorKind::Prufer([2, 3, 5][rng.gen_range(0..3)]),
                2 => FactorKind::CyclicFamily(BaseSequence::geom(2, 2)),
                _ => FactorKind::Cyclic(rng.gen_range(2..17)),
            };
            let mult = if rng.gen_bool(0.3) { Multiplicity::Omega } else { Multiplicity::Finite(rng.gen_range(1..4)) };
            Factor::new(kind, mult)
        })
        .collect();
    GroupDescriptor::new(factors).expect("generated descriptors are valid")
}

fn decision(rng: &mut ChaCha8Rng, samples: usize) -> Result<(usize, Vec<String>)> {
    let mut failures = Vec::new();
    for _ in 0..samples {
        let d = random_descriptor(rng);
        let back: GroupDescriptor = d.to_string().parse()?;
        if back != d {
            failures.push(format!("round trip changed {d} into {back}"));
        }
        if d.is_finite() {
            continue;
        }
        let t = tchar_decide(&d, true, true)?;
        if t.answer != minap_admissible(&d).answer {
            failures.push(format!("{d}: decision {} disagrees with MinAP", t.answer));
        }
    }
    Ok((samples, failures))
}
