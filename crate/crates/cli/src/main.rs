//! `mops`: classification, inverse-problem verification and the worked
//! examples from the command line.
//!
//! Exit codes: 0 pass, 1 negative result, 2 input error, 3 internal
//! inconsistency.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mops_core::casebook::{self, CaseRow, ChainStatus, CSV_HEADER};
use mops_core::families::{self, JacobiParams};
use mops_core::relation23::{
    self, AbcConstants, CaseTag, FunctionalRelation, InverseVerdict, ReducedCoefficients,
};
use mops_core::scalar::{self, Scalar};
use mops_core::{Error, IndexedSeq, MomentFunctional, RecurrencePair, Relation23};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(name = "mops", version, about = "Exact checks for 2-3 type structure relations between MOPS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Largest index certified by "for every n" checks.
    #[arg(long, global = true, default_value_t = 20)]
    depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// `float` converts rationals in the output to floating point and adds
    /// floating-point diagnostics; all checks stay exact.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a relation file {"r":[...],"s":[...],"t":[...]}.
    Classify { relation: PathBuf },
    /// Decide whether the generated sequence is a MOPS, with both checkers.
    InverseCheck {
        /// {"beta":[...],"gamma":[...]} or {"moments":[...]}
        recurrence: PathBuf,
        relation: PathBuf,
    },
    /// Constants of lambda (x - c) u = (x^2 + a x + b) v.
    Constants { recurrence: PathBuf, relation: PathBuf },
    /// Run one of the worked examples.
    Example {
        #[command(subcommand)]
        name: ExampleName,
    },
}

#[derive(Subcommand, Debug)]
enum ExampleName {
    /// Chebyshev functionals of the third and fourth kind.
    Chebyshev,
    /// Jacobi functional, its Geronimus transform and the derived pair u, v.
    JacobiChain {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, allow_hyphen_values = true)]
        a1: String,
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

/// Process outcome: exit code plus an optional message for stderr.
struct Outcome {
    code: u8,
    message: Option<String>,
}

impl Outcome {
    fn pass() -> Self {
        Outcome { code: 0, message: None }
    }
    fn negative(msg: impl Into<String>) -> Self {
        Outcome { code: 1, message: Some(msg.into()) }
    }
    fn input(msg: impl Into<String>) -> Self {
        Outcome { code: 2, message: Some(msg.into()) }
    }
    fn internal(msg: impl Into<String>) -> Self {
        Outcome { code: 3, message: Some(msg.into()) }
    }
}

/// Library errors on user-supplied data are input errors.
fn input_err(e: Error) -> Outcome {
    Outcome::input(e.to_string())
}

/// Library errors inside a certified pipeline are internal.
fn internal_err(e: Error) -> Outcome {
    Outcome::internal(e.to_string())
}

struct Output {
    json: Value,
    csv: Option<(Vec<String>, Vec<Vec<String>>)>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Outcome> {
    let text = fs::read_to_string(path)
        .map_err(|e| Outcome::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Outcome::input(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RecurrenceInput {
    Recurrence {
        #[serde(with = "scalar::serde_scalar_vec")]
        beta: Vec<Scalar>,
        #[serde(with = "scalar::serde_scalar_vec")]
        gamma: Vec<Scalar>,
    },
    Moments {
        #[serde(with = "scalar::serde_scalar_vec")]
        moments: Vec<Scalar>,
    },
}

fn read_recurrence(path: &Path) -> Result<RecurrencePair, Outcome> {
    match read_json::<RecurrenceInput>(path)? {
        RecurrenceInput::Recurrence { beta, gamma } => {
            RecurrencePair::new(beta, gamma).map_err(input_err)
        }
        RecurrenceInput::Moments { moments } => {
            let f = MomentFunctional::new(moments)
                .and_then(|f| f.normalized())
                .map_err(input_err)?;
            let report = f.recurrence_from_moments();
            if let Some(k) = report.first_singular {
                return Err(Outcome::input(format!(
                    "moment functional is singular at Hankel order {k}"
                )));
            }
            Ok(report.recurrence)
        }
    }
}

fn cell(x: Option<&Scalar>, mode: Mode) -> String {
    match (x, mode) {
        (None, _) => String::new(),
        (Some(v), Mode::Exact) => scalar::format(v),
        (Some(v), Mode::Float) => format!("{}", scalar::to_f64(v)),
    }
}

fn case_csv(rows: &[CaseRow], mode: Mode) -> (Vec<String>, Vec<Vec<String>>) {
    let header = CSV_HEADER.iter().map(|s| s.to_string()).collect();
    let body = rows
        .iter()
        .map(|row| {
            std::iter::once(row.n.to_string())
                .chain(row.cells.iter().map(|c| cell(c.as_ref(), mode)))
                .collect()
        })
        .collect();
    (header, body)
}

fn to_json<T: Serialize>(value: &T) -> Result<Value, Outcome> {
    serde_json::to_value(value).map_err(|e| Outcome::internal(format!("serialization: {e}")))
}

fn cmd_classify(rel_path: &Path, mode: Mode) -> Result<(Output, Outcome), Outcome> {
    let rel: Relation23 = read_json(rel_path)?;
    let case = relation23::classify(&rel).map_err(input_err)?;
    let json = serde_json::json!({ "case": to_json(&case)? });

    let mut header = vec!["n".to_string(), "r".into(), "s".into(), "t".into()];
    let seqs: Vec<(&str, &IndexedSeq)> = match &case.reduced {
        ReducedCoefficients::Identity | ReducedCoefficients::None => vec![],
        ReducedCoefficients::OneTwo { a } => vec![("a", a)],
        ReducedCoefficients::OneThree { a, b } => vec![("a", a), ("b", b)],
        ReducedCoefficients::TwoOne { c } => vec![("c", c)],
        ReducedCoefficients::TwoTwo { c, d, .. } => vec![("c", c), ("d", d)],
    };
    header.extend(seqs.iter().map(|(name, _)| name.to_string()));
    let body = (0..rel.len())
        .map(|n| {
            let mut row = vec![
                n.to_string(),
                cell(rel.r(n).ok(), mode),
                cell(rel.s(n).ok(), mode),
                cell(rel.t(n).ok(), mode),
            ];
            row.extend(seqs.iter().map(|(_, s)| cell(s.get(n), mode)));
            row
        })
        .collect();
    Ok((
        Output {
            json,
            csv: Some((header, body)),
        },
        Outcome::pass(),
    ))
}

fn require_nondegenerate(rel: &Relation23) -> Result<(), Outcome> {
    let tag = relation23::classify(rel).map_err(input_err)?.tag;
    if tag != CaseTag::NonDegenerate23 {
        return Err(Outcome::input(format!(
            "relation is degenerate ({tag}); run `mops classify` for its reduced form"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct InverseReport {
    depth: usize,
    is_mops: bool,
    tilde: RecurrencePair,
    check_eqns: InverseVerdict,
    /// `None` when the data has `r_n = 0` or `t_{n+1} = 0`, which already
    /// rules out a MOPS.
    check_constant_sequences: Option<InverseVerdict>,
    #[serde(rename = "ABC")]
    abc: Option<AbcConstants>,
    functional_relation: Option<FunctionalRelation>,
}

fn cmd_inverse_check(
    rec_path: &Path,
    rel_path: &Path,
    depth: usize,
    mode: Mode,
) -> Result<(Output, Outcome), Outcome> {
    if depth < 5 {
        return Err(Outcome::input("inverse-check needs --depth >= 5"));
    }
    let rec = read_recurrence(rec_path)?;
    let rel: Relation23 = read_json(rel_path)?;
    require_nondegenerate(&rel)?;
    let by_eq = relation23::check_by_equations(&rec, &rel, depth).map_err(input_err)?;
    let by_const = match relation23::check_by_constants(&rec, &rel, depth) {
        Ok(v) => Some(v),
        Err(Error::Contract(msg)) => {
            if by_eq.is_mops {
                return Err(Outcome::internal(format!(
                    "checkers disagree: equations hold but constant sequences undefined ({msg})"
                )));
            }
            None
        }
        Err(e) => return Err(input_err(e)),
    };
    if let Some(v) = &by_const {
        if v.is_mops != by_eq.is_mops {
            return Err(Outcome::internal(format!(
                "checkers disagree: {} vs {}",
                by_eq.is_mops, v.is_mops
            )));
        }
    }
    let is_mops = by_eq.is_mops;
    let abc = by_const.as_ref().and_then(|v| v.constants.clone());
    let functional_relation = if is_mops {
        let fr = relation23::relation_constants(&rec, &by_eq.tilde, &rel).map_err(internal_err)?;
        let abc = abc.as_ref().ok_or_else(|| Outcome::internal("no constant A, B, C"))?;
        if (&abc.a, &abc.b, &abc.c) != (&fr.a, &fr.b, &fr.c) {
            return Err(Outcome::internal("constant sequences differ from closed-form constants"));
        }
        Some(fr)
    } else {
        None
    };

    let abcd = relation23::abcd_sequences(&rec, &by_eq.tilde, &rel, depth).map_err(internal_err)?;
    let seqs = by_const
        .as_ref()
        .map(|_| relation23::abc_sequences(&rec, &rel, depth))
        .transpose()
        .map_err(internal_err)?;
    let header: Vec<String> = CSV_HEADER.iter().map(|s| s.to_string()).collect();
    let body = (0..=depth)
        .map(|n| {
            let mut row = vec![
                n.to_string(),
                cell(abcd.a.get(n), mode),
                cell(abcd.b.get(n), mode),
                cell(abcd.c.get(n), mode),
                cell(rel.r(n).ok(), mode),
                cell(rel.s(n).ok(), mode),
                cell(rel.t(n).ok(), mode),
                cell(by_eq.tilde.beta(n).ok(), mode),
                cell(if n == 0 { None } else { by_eq.tilde.gamma(n).ok() }, mode),
            ];
            for seq in ["A", "B", "C"] {
                let v = seqs.as_ref().and_then(|s| match seq {
                    "A" => s.a.get(n),
                    "B" => s.b.get(n),
                    _ => s.c.get(n),
                });
                row.push(cell(v, mode));
            }
            row
        })
        .collect();

    let outcome = if is_mops {
        Outcome::pass()
    } else {
        let first = by_eq
            .failures
            .first()
            .map(|f| f.to_string())
            .unwrap_or_default();
        Outcome::negative(format!("not a MOPS: {first}"))
    };
    let report = InverseReport {
        depth,
        is_mops,
        tilde: by_eq.tilde.clone(),
        check_eqns: by_eq,
        check_constant_sequences: by_const,
        abc,
        functional_relation,
    };
    Ok((
        Output {
            json: to_json(&report)?,
            csv: Some((header, body)),
        },
        outcome,
    ))
}

fn cmd_constants(rec_path: &Path, rel_path: &Path, mode: Mode) -> Result<(Output, Outcome), Outcome> {
    let rec = read_recurrence(rec_path)?;
    let rel: Relation23 = read_json(rel_path)?;
    let tilde = relation23::candidate_tilde(&rec, &rel).map_err(input_err)?;
    let fr = relation23::relation_constants(&rec, &tilde, &rel).map_err(input_err)?;
    let header = ["lambda", "c", "a", "b"].iter().map(|s| s.to_string()).collect();
    let body = vec![[&fr.lambda, &fr.c, &fr.a, &fr.b]
        .iter()
        .map(|v| cell(Some(v), mode))
        .collect()];
    Ok((
        Output {
            json: to_json(&fr)?,
            csv: Some((header, body)),
        },
        Outcome::pass(),
    ))
}

fn parse_arg(name: &str, text: &str) -> Result<Scalar, Outcome> {
    scalar::parse(text).map_err(|e| Outcome::input(format!("--{name}: {e}")))
}

fn cmd_chebyshev(depth: usize, mode: Mode) -> Result<(Output, Outcome), Outcome> {
    if depth < 5 {
        return Err(Outcome::input("example chebyshev needs --depth >= 5"));
    }
    let rep = casebook::chebyshev_case(depth).map_err(internal_err)?;
    Ok((
        Output {
            json: to_json(&rep)?,
            csv: Some(case_csv(&rep.rows(), mode)),
        },
        Outcome::pass(),
    ))
}

#[derive(Serialize)]
struct FloatDiagnostics {
    /// Largest relative gap between the exact norm ratios and their
    /// Gamma-function closed form.
    norm_ratio_max_rel_error: f64,
    tolerance: f64,
}

fn cmd_jacobi_chain(
    depth: usize,
    mode: Mode,
    args: [(&str, &str); 4],
) -> Result<(Output, Outcome), Outcome> {
    if depth < 5 {
        return Err(Outcome::input("example jacobi-chain needs --depth >= 5"));
    }
    let [alpha, beta, a1, c1] = args.map(|(name, text)| parse_arg(name, text));
    let params = JacobiParams::new(alpha?, beta?).map_err(input_err)?;
    let (a1, c1) = (a1?, c1?);
    let rep = casebook::jacobi_chain(&params, &a1, &c1, depth).map_err(internal_err)?;
    let mut json = to_json(&rep)?;
    if mode == Mode::Float {
        let mut worst = 0.0f64;
        for n in 0..=depth {
            let (exact, approx) =
                families::jacobi_norm_ratio_checked(&params, n).map_err(internal_err)?;
            let e = scalar::to_f64(&exact);
            worst = worst.max(((approx - e) / e).abs());
        }
        let diag = FloatDiagnostics {
            norm_ratio_max_rel_error: worst,
            tolerance: families::FLOAT_RTOL,
        };
        json["float_diagnostics"] = to_json(&diag)?;
    }
    let outcome = match &rep.status {
        ChainStatus::Verified => Outcome::pass(),
        ChainStatus::Inadmissible { condition, n, message } => {
            Outcome::negative(format!("inadmissible: {message} ({condition}, n = {n})"))
        }
        ChainStatus::Degenerate { condition, n } => {
            Outcome::negative(format!("degenerate relation: {condition} at n = {n}"))
        }
    };
    Ok((
        Output {
            json,
            csv: Some(case_csv(&rep.rows(), mode)),
        },
        outcome,
    ))
}

/// Rational strings become numbers; everything else is kept.
fn floatify(value: Value) -> Value {
    match value {
        Value::String(s) => match scalar::parse(&s) {
            Ok(x) => serde_json::Number::from_f64(scalar::to_f64(&x))
                .map(Value::Number)
                .unwrap_or(Value::String(s)),
            Err(_) => Value::String(s),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(floatify).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, floatify(v))).collect()),
        other => other,
    }
}

fn render(output: Output, format: Format, mode: Mode) -> Result<Vec<u8>, Outcome> {
    match format {
        Format::Json => {
            let json = match mode {
                Mode::Exact => output.json,
                Mode::Float => floatify(output.json),
            };
            let mut bytes = serde_json::to_vec_pretty(&json)
                .map_err(|e| Outcome::internal(format!("serialization: {e}")))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let (header, body) = output
                .csv
                .ok_or_else(|| Outcome::input("no CSV form for this command"))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            let csv_err = |e: csv::Error| Outcome::internal(format!("csv: {e}"));
            w.write_record(&header).map_err(csv_err)?;
            for row in body {
                w.write_record(&row).map_err(csv_err)?;
            }
            w.into_inner().map_err(|e| Outcome::internal(format!("csv: {e}")))
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let result = match &cli.command {
        Command::Classify { relation } => cmd_classify(relation, cli.mode),
        Command::InverseCheck {
            recurrence,
            relation,
        } => cmd_inverse_check(recurrence, relation, cli.depth, cli.mode),
        Command::Constants {
            recurrence,
            relation,
        } => cmd_constants(recurrence, relation, cli.mode),
        Command::Example { name } => match name {
            ExampleName::Chebyshev => cmd_chebyshev(cli.depth, cli.mode),
            ExampleName::JacobiChain { alpha, beta, a1, c1 } => cmd_jacobi_chain(
                cli.depth,
                cli.mode,
                [("alpha", alpha), ("beta", beta), ("a1", a1), ("c1", c1)],
            ),
        },
    };
    let (output, outcome) = match result {
        Ok(pair) => pair,
        Err(outcome) => return outcome,
    };
    let bytes = match render(output, cli.format, cli.mode) {
        Ok(b) => b,
        Err(outcome) => return outcome,
    };
    let written = match &cli.out {
        Some(path) => fs::write(path, &bytes)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| format!("stdout: {e}")),
    };
    match written {
        Ok(()) => outcome,
        Err(msg) => Outcome::input(msg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli);
    if let Some(msg) = &outcome.message {
        eprintln!("mops: {msg}");
    }
    ExitCode::from(outcome.code)
}
