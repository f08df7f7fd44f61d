//! `tchar`: command-line surface over the `tchar-core` library.
//!
//! Exit codes: `decide` 0 yes / 1 no; `member` 0 Member / 1 NonMember /
//! 3 Undetermined; `witness` and `verify` 0 when every check passes, 1
//! otherwise. Input and usage errors exit with 2.

mod io;
mod verify;

use std::fs::File;
use std::io::{stdout, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tchar_core::arith::parse_rational;
use tchar_core::text::{parse_char_sequence, parse_character, parse_descriptor, parse_digits, parse_element};
use tchar_core::{
    all_gdelta_tchar, check_consistency, connected_dual, encode_torus, lemma31, lemma32, lemma33, member,
    minap_admissible, numeric_oracle, pair, run_theorem13, BaseSequence, CharSequence, Decision, Element, IndexRule,
    Model, Outcome, Pairing, Rational, TailRule, WitnessConfig,
};

use io::Format;

#[derive(Parser, Debug)]
#[command(name = "tchar", version, about = "Characterized subgroups of compact abelian groups")]
struct Cli {
    /// Indices evaluated before tail rules take over.
    #[arg(long, global = true, env = "TCHAR_HORIZON", default_value_t = 256)]
    horizon: usize,
    /// Numeric oracle tolerance, as a float or a rational.
    #[arg(long, global = true, default_value = "1/1000000", value_parser = io::parse_tolerance)]
    tolerance: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::JsonLines)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Query {
    /// Is the closed subgroup with this annihilator T-characterized?
    Tchar,
    /// Does the group admit a Hausdorff MinAP group topology?
    Minap,
    /// Is the compact dual connected?
    Connected,
    /// Is every closed G_delta-subgroup of the dual T-characterized?
    AllGdelta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Auto,
    A,
    B,
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Torus,
    Padic,
    Product,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a question about a group descriptor (text or file).
    Decide {
        #[arg(long)]
        annihilator: String,
        /// The closed subgroup is a G_delta-subgroup.
        #[arg(long)]
        gdelta: bool,
        /// The closed subgroup is proper.
        #[arg(long)]
        proper: bool,
        #[arg(long, value_enum, default_value_t = Query::Tchar)]
        query: Query,
    },
    /// Membership verdicts for element lines (text or file).
    Member {
        #[arg(long)]
        element: String,
        /// Character sequence line; defaults to the one described by each element line.
        #[arg(long)]
        sequence: Option<String>,
    },
    /// Run a witness construction and certify its budgets.
    Witness {
        #[arg(long, value_enum, default_value_t = FamilyArg::Auto)]
        family: FamilyArg,
        /// Group descriptor for `--family auto`.
        #[arg(long)]
        descriptor: Option<String>,
        #[arg(long, value_parser = rational_arg)]
        epsilon: Rational,
        /// `k_max` for families A and C, `r_max` for family B.
        #[arg(long, default_value_t = 40)]
        scale: usize,
        /// Circle bases for family A, cyclic orders for family C.
        #[arg(long, value_parser = base_arg)]
        bases: Option<BaseSequence>,
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, value_parser = index_arg, default_value = "squares")]
        nk: IndexRule,
        /// Write the report here instead of stdout; the summary line is still printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one character on one element.
    Pair {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_parser = base_arg)]
        bases: Option<BaseSequence>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long = "char")]
        character: String,
        /// A digit list such as `[1,1,0]` or a full element line.
        #[arg(long)]
        element: String,
    },
    /// Run a self-check suite.
    Verify {
        #[arg(long, value_enum, default_value_t = verify::Suite::All)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mixed-radix digits of a rational in [0, 1).
    Encode {
        #[arg(long, value_parser = base_arg)]
        bases: BaseSequence,
        #[arg(long, value_parser = rational_arg)]
        value: Rational,
    },
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn base_arg(s: &str) -> Result<BaseSequence, String> {
    s.parse().map_err(|e: tchar_core::Error| e.to_string())
}

fn index_arg(s: &str) -> Result<IndexRule, String> {
    s.parse().map_err(|e: tchar_core::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let mut out = stdout().lock();
    match &cli.command {
        Command::Decide { annihilator, gdelta, proper, query } => {
            let d = parse_descriptor(io::load(annihilator)?.trim())?;
            let (answer, mut rec) = match query {
                Query::Tchar => decided(tchar_core::tchar_decide(&d, *gdelta, *proper)?),
                Query::Minap => decided(minap_admissible(&d)),
                Query::Connected => torsion_free(connected_dual(&d), "the dual is connected"),
                Query::AllGdelta => torsion_free(all_gdelta_tchar(&d), "every closed G_delta-subgroup is T-characterized"),
            };
            rec["annihilator"] = d.to_string().into();
            io::emit(&mut out, cli.format, &[rec])?;
            Ok(if answer { 0 } else { 1 })
        }
        Command::Member { element, sequence } => member_cmd(cli, &mut out, element, sequence.as_deref()),
        Command::Witness { family, descriptor, epsilon, scale, bases, p, nk, out: path } => {
            let report = match family {
                FamilyArg::Auto => {
                    let text = descriptor.as_deref().ok_or_else(|| anyhow!("--family auto needs --descriptor"))?;
                    let d = parse_descriptor(io::load(text)?.trim())?;
                    let mut cfg = WitnessConfig { scale: *scale, padic_index: nk.clone(), ..WitnessConfig::default() };
                    if let Some(b) = bases {
                        cfg.torus_bases = b.clone();
                    }
                    run_theorem13(&d, epsilon, &cfg)?
                }
                FamilyArg::A => lemma31(bases.as_ref().unwrap_or(&WitnessConfig::default().torus_bases), epsilon, *scale)?,
                FamilyArg::B => lemma32(*p, nk, epsilon, *scale)?,
                FamilyArg::C => lemma33(bases.as_ref().unwrap_or(&BaseSequence::geom(2, 2)), epsilon, *scale)?,
            };
            let mut records: Vec<Value> = report.budget_checks.iter().map(io::budget_check).collect();
            let summary = io::witness_summary(&report);
            if cli.format != Format::Csv {
                records.push(summary.clone());
            }
            match path {
                Some(p) => {
                    let mut f = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
                    io::emit(&mut f, cli.format, &records)?;
                    f.flush()?;
                    let mut brief = summary;
                    brief.as_object_mut().expect("object").remove("witnesses");
                    io::emit(&mut out, Format::JsonLines, &[brief])?;
                }
                None => io::emit(&mut out, cli.format, &records)?,
            }
            Ok(if report.all_pass() { 0 } else { 1 })
        }
        Command::Pair { model, bases, p, character, element } => {
            let model = match model {
                ModelArg::Torus => Model::Torus { bases: bases.clone().ok_or_else(|| anyhow!("--model torus needs --bases"))? },
                ModelArg::Padic => Model::PAdic { p: p.ok_or_else(|| anyhow!("--model padic needs --p"))? },
                ModelArg::Product => Model::Product { bases: bases.clone().ok_or_else(|| anyhow!("--model product needs --bases"))? },
            };
            let chi = parse_character(&model, character)?;
            let text = io::load(element)?;
            let x = if text.trim_start().starts_with('[') {
                Element::new(model, parse_digits(text.trim())?, TailRule::Zero)?
            } else {
                let x = parse_element(text.trim())?;
                if *x.model() != model {
                    bail!("element model {} does not match --model", x.model().name());
                }
                x
            };
            let rec = match pair(&chi, &x, cli.horizon)? {
                Pairing::Exact(a) => json!({
                    "character": chi.to_string(),
                    "angle": a.to_string(),
                    "exact": true,
                    "norm": io::interval(&tchar_core::unit_norm(&a)),
                }),
                Pairing::Enclosed(r) => json!({
                    "character": chi.to_string(),
                    "angle_lo": r.start.to_string(),
                    "width": r.width.to_string(),
                    "exact": false,
                    "norm": io::interval(&r.unit_norm()),
                }),
            };
            io::emit(&mut out, cli.format, &[rec])?;
            Ok(0)
        }
        Command::Verify { suite, samples, seed } => {
            let results = verify::run(*suite, *samples, *seed, cli.horizon, cli.tolerance)?;
            let pass = results.iter().all(|r| r.pass);
            let records: Vec<Value> = results.into_iter().map(|r| r.record).collect();
            io::emit(&mut out, cli.format, &records)?;
            Ok(if pass { 0 } else { 1 })
        }
        Command::Encode { bases, value } => {
            let x = encode_torus(value, bases, cli.horizon)?;
            let rec = json!({
                "value": value.to_string(),
                "element": x.to_string(),
                "digits": x.prefix().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            });
            io::emit(&mut out, cli.format, &[rec])?;
            Ok(0)
        }
    }
}

fn decided(d: Decision) -> (bool, Value) {
    (d.answer, io::decision(&d))
}

fn torsion_free(answer: bool, claim: &str) -> (bool, Value) {
    let reason = if answer { "every factor is Z" } else { "some factor has torsion" };
    (answer, json!({ "answer": if answer { "yes" } else { "no" }, "claim": claim, "reason": reason }))
}

fn member_cmd(cli: &Cli, out: &mut dyn Write, element: &str, sequence: Option<&str>) -> Result<u8> {
    let text = io::load(element)?;
    let lines = io::lines(&text);
    if lines.is_empty() {
        bail!("no element lines in input");
    }
    let fixed: Option<CharSequence> = match sequence {
        Some(s) => Some(parse_char_sequence(io::lines(&io::load(s)?).first().copied().unwrap_or(""))?),
        None => None,
    };
    let mut records = Vec::new();
    let mut code = 0u8;
    for line in &lines {
        let x = parse_element(line)?;
        let u = match &fixed {
            Some(u) => u.clone(),
            None => parse_char_sequence(line).context("no --sequence given and the element line does not describe one")?,
        };
        let v = member(&u, &x, cli.horizon)?;
        let report = numeric_oracle(&u, &x, cli.horizon, cli.tolerance)?;
        let mut rec = io::verdict(&v);
        rec["trace_len"] = report.trace.len().into();
        rec["oracle"] = match &report.outcome {
            tchar_core::OracleOutcome::MemberConsistent => "MemberConsistent".into(),
            tchar_core::OracleOutcome::NonMemberConsistent { .. } => "NonMemberConsistent".into(),
            tchar_core::OracleOutcome::Undetermined => "Undetermined".into(),
        };
        rec["consistent"] = check_consistency(&u, &x, &v, &report).is_ok().into();
        rec["element"] = x.to_string().into();
        records.push(rec);
        // a batch reports its least settled verdict: Undetermined, then NonMember
        code = code.max(match v.outcome {
            Outcome::Member => 0,
            Outcome::NonMember { .. } => 1,
            Outcome::Undetermined { .. } => 3,
        });
    }
    io::emit(out, cli.format, &records)?;
    Ok(code)
}
