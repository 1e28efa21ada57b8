use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{PlanError, Result};
use crate::trace::{MetricsTrace, TraceSample};

use super::stats::{Estimate, SummaryRow};
use super::{Budget, RunTrace};

pub const TRACE_HEADER: [&str; 8] = [
    "scenario",
    "planner",
    "seed",
    "budget",
    "t",
    "best_length",
    "local_opt_count",
    "first_solution_time",
];

pub const SUMMARY_HEADER: [&str; 12] = [
    "scenario",
    "planner",
    "budget",
    "n_success",
    "n_total",
    "mean_length",
    "ci95_length",
    "mean_exec",
    "ci95_exec",
    "mean_cycle",
    "ci95_cycle",
    "mean_local_opts",
];

/// Nine significant digits in the style of C's `%.9g`; infinities are
/// written `inf` / `-inf`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn parse_float(field: &str, column: &str, line: u64) -> Result<f64> {
    match field {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => field.parse().map_err(|_| PlanError::Parse {
            line: line as usize,
            column: 0,
            message: format!("column {column}: `{field}` is not a number"),
        }),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn write_traces<W: Write>(out: W, runs: &[RunTrace]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in runs {
        let seed = r.seed.to_string();
        let budget = r.budget.to_string();
        let first = opt(r.first_solution_time);
        for s in &r.trace.samples {
            w.write_record([
                r.scenario.as_str(),
                r.planner.as_str(),
                &seed,
                &budget,
                &format_float(s.t),
                &format_float(s.best_length),
                &s.local_opt_count.to_string(),
                &first,
            ])?;
        }
    }
    w.flush()
        .map_err(|e| PlanError::Runtime(format!("writing traces: {e}")))?;
    Ok(())
}

pub fn write_traces_file(path: impl AsRef<Path>, runs: &[RunTrace]) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| PlanError::io(path, e))?;
    write_traces(f, runs).map_err(|e| with_path(path, e))
}

fn estimate_fields(e: Option<Estimate>) -> [String; 2] {
    match e {
        Some(e) => [format_float(e.mean), opt(e.ci95)],
        None => [String::new(), String::new()],
    }
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        let [ml, cl] = estimate_fields(r.length);
        let [me, ce] = estimate_fields(r.exec);
        let [mc, cc] = estimate_fields(r.cycle);
        w.write_record([
            r.scenario.clone(),
            r.planner.clone(),
            r.budget.to_string(),
            r.n_success.to_string(),
            r.n_total.to_string(),
            ml,
            cl,
            me,
            ce,
            mc,
            cc,
            opt(r.mean_local_opts),
        ])?;
    }
    w.flush()
        .map_err(|e| PlanError::Runtime(format!("writing summary: {e}")))?;
    Ok(())
}

pub fn write_summary_file(path: impl AsRef<Path>, rows: &[SummaryRow]) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| PlanError::io(path, e))?;
    write_summary(f, rows).map_err(|e| with_path(path, e))
}

fn with_path(path: &Path, e: PlanError) -> PlanError {
    match e {
        PlanError::Csv(c) => match c.into_kind() {
            csv::ErrorKind::Io(io) => PlanError::io(path, io),
            other => PlanError::Runtime(format!("{}: {other:?}", path.display())),
        },
        other => other,
    }
}

/// Parses a trace CSV back into runs. Consecutive rows sharing scenario,
/// planner, seed and budget form one run.
pub fn read_traces<R: Read>(input: R) -> Result<Vec<RunTrace>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(PlanError::Parse {
            line: 1,
            column: 0,
            message: format!("expected header {}", TRACE_HEADER.join(",")),
        });
    }
    let mut runs: Vec<RunTrace> = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |column: &str, msg: String| -> PlanError {
            PlanError::Parse {
                line: line as usize,
                column: 0,
                message: format!("column {column}: {msg}"),
            }
        };
        let seed: u64 = rec[2]
            .parse()
            .map_err(|_| bad("seed", format!("`{}` is not an integer", &rec[2])))?;
        let budget = rec[3]
            .parse::<Budget>()
            .map_err(|e| bad("budget", e.to_string()))?;
        let sample = TraceSample {
            t: parse_float(&rec[4], "t", line)?,
            iteration: 0,
            best_length: parse_float(&rec[5], "best_length", line)?,
            local_opt_count: rec[6].parse().map_err(|_| {
                bad(
                    "local_opt_count",
                    format!("`{}` is not an integer", &rec[6]),
                )
            })?,
        };
        let first = if rec[7].is_empty() {
            None
        } else {
            Some(parse_float(&rec[7], "first_solution_time", line)?)
        };
        let same_run = runs.last().is_some_and(|r| {
            r.scenario == rec[0] && r.planner == rec[1] && r.seed == seed && r.budget == budget
        });
        if !same_run {
            runs.push(RunTrace {
                scenario: rec[0].to_string(),
                planner: rec[1].to_string(),
                seed,
                budget,
                trace: MetricsTrace {
                    first_solution_time: first,
                    ..MetricsTrace::default()
                },
                first_solution_time: first,
            });
        }
        runs.last_mut()
            .expect("just pushed")
            .trace
            .samples
            .push(sample);
    }
    Ok(runs)
}
