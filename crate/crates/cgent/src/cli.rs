//! Command implementations behind the `cgent` binary.
//!
//! Output is deterministic: fixed row/column orderings, floats rounded to
//! 12 significant digits, exact values printed as reduced fractions.
//! Exit codes: 0 success or all-pass, 1 usage/domain error, 2 a verified
//! inequality violation or backend mismatch.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::cg::{clebsch_gordan, three_j, CouplingLabel};
use crate::entropy::{self, LogBase};
use crate::exact::HalfInt;
use crate::hahn;
use crate::prob;
use crate::{Error, Result};

/// q grid used by `verify` when none is given.
pub const DEFAULT_VERIFY_Q_GRID: [f64; 7] = [0.1, 0.5, 0.9, 1.0, 1.1, 2.0, 3.0];

#[derive(Parser, Debug)]
#[command(
    name = "cgent",
    version,
    about = "Exact Clebsch-Gordan coefficients, bistochastic tables, and entropic inequality checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Logarithm base for entropies.
    #[arg(long = "log-base", value_enum, default_value_t = LogBaseArg::E, global = true)]
    pub log_base: LogBaseArg,

    /// Output format; defaults to csv for table/sweep-tsallis, json otherwise.
    #[arg(long, value_enum, global = true)]
    pub format: Option<OutputFormat>,

    /// Write output to a file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse_half(s: &str) -> std::result::Result<HalfInt, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact Clebsch-Gordan coefficient <j1 m1 j2 m2|j m>.
    Cg {
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        j1: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        m1: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        j2: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        m2: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        j: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        m: HalfInt,
    },
    /// Exact Wigner 3-j symbol (j1 j2 j3; m1 m2 m3).
    Threej {
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        j1: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        j2: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        j3: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        m1: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        m2: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        m3: HalfInt,
    },
    /// Bistochastic matrix of squared coefficients for a (j1, j2) block.
    Table {
        #[arg(value_parser = parse_half)]
        j1: HalfInt,
        #[arg(value_parser = parse_half)]
        j2: HalfInt,
    },
    /// Subadditivity, Araki-Lieb, and Tsallis margins for every column.
    Verify {
        #[arg(value_parser = parse_half)]
        j1: HalfInt,
        #[arg(value_parser = parse_half)]
        j2: HalfInt,
        /// q grid: "min:max:step" or a comma-separated list.
        #[arg(long)]
        q: Option<String>,
    },
    /// Tsallis information I_q over a q grid for one (j, m) column.
    SweepTsallis {
        #[arg(value_parser = parse_half)]
        j1: HalfInt,
        #[arg(value_parser = parse_half)]
        j2: HalfInt,
        #[arg(value_parser = parse_half)]
        j: HalfInt,
        #[arg(value_parser = parse_half, allow_hyphen_values = true)]
        m: HalfInt,
        #[arg(long, default_value_t = 0.05)]
        q_min: f64,
        #[arg(long, default_value_t = 3.0)]
        q_max: f64,
        #[arg(long, default_value_t = 0.05)]
        q_step: f64,
    },
    /// Compare the Hahn-representation backend against the explicit sum.
    HahnCheck {
        #[arg(value_parser = parse_half)]
        j1: HalfInt,
        #[arg(value_parser = parse_half)]
        j2: HalfInt,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LogBaseArg {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
}

impl From<LogBaseArg> for LogBase {
    fn from(arg: LogBaseArg) -> LogBase {
        match arg {
            LogBaseArg::E => LogBase::Natural,
            LogBaseArg::Two => LogBase::Base2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Rendered command result plus the process exit code to use.
#[derive(Debug)]
pub struct CommandOutput {
    pub body: String,
    pub exit_code: i32,
}

pub fn execute(cli: &Cli) -> Result<CommandOutput> {
    let base: LogBase = cli.log_base.into();
    match &cli.command {
        Command::Cg {
            j1,
            m1,
            j2,
            m2,
            j,
            m,
        } => cmd_cg(
            *j1,
            *m1,
            *j2,
            *m2,
            *j,
            *m,
            cli.format.unwrap_or(OutputFormat::Json),
        ),
        Command::Threej {
            j1,
            j2,
            j3,
            m1,
            m2,
            m3,
        } => cmd_threej(
            *j1,
            *j2,
            *j3,
            *m1,
            *m2,
            *m3,
            cli.format.unwrap_or(OutputFormat::Json),
        ),
        Command::Table { j1, j2 } => cmd_table(*j1, *j2, cli.format.unwrap_or(OutputFormat::Csv)),
        Command::Verify { j1, j2, q } => {
            let grid = match q {
                Some(spec) => parse_q_grid(spec)?,
                None => DEFAULT_VERIFY_Q_GRID.to_vec(),
            };
            cmd_verify(*j1, *j2, &grid, base, cli.format.unwrap_or(OutputFormat::Json))
        }
        Command::SweepTsallis {
            j1,
            j2,
            j,
            m,
            q_min,
            q_max,
            q_step,
        } => cmd_sweep_tsallis(
            *j1,
            *j2,
            *j,
            *m,
            *q_min,
            *q_max,
            *q_step,
            cli.format.unwrap_or(OutputFormat::Csv),
        ),
        Command::HahnCheck { j1, j2 } => {
            cmd_hahn_check(*j1, *j2, cli.format.unwrap_or(OutputFormat::Json))
        }
    }
}

/// Rounds to 12 significant digits; the printed form is then the shortest
/// decimal that round-trips.
fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("scientific form reparses")
}

pub(crate) fn format_float(x: f64) -> String {
    let r = round_sig12(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let rounded = round_sig12(n.as_f64().unwrap());
            *v = serde_json::Number::from_f64(rounded)
                .map(Value::Number)
                .unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn render_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("command outputs serialize");
    round_floats(&mut v);
    let mut body = serde_json::to_string_pretty(&v).expect("valid json");
    body.push('\n');
    body
}

fn parse_q_grid(spec: &str) -> Result<Vec<f64>> {
    let invalid = |reason: String| Error::InvalidQGrid { reason };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(invalid(format!("expected min:max:step, got {spec:?}")));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("cannot parse {p:?} as a number")))
            })
            .collect::<Result<_>>()?;
        q_range_grid(nums[0], nums[1], nums[2])
    } else {
        let grid: Vec<f64> = spec
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("cannot parse {p:?} as a number")))
            })
            .collect::<Result<_>>()?;
        for &q in &grid {
            if !(q.is_finite() && q > 0.0) {
                return Err(invalid(format!("q values must be positive (got {q})")));
            }
        }
        if grid.is_empty() {
            return Err(invalid("empty q grid".into()));
        }
        Ok(grid)
    }
}

/// Closed grid min, min+step, ..., max. Grid points within 1e-9 of 1 are
/// snapped to exactly 1 so the Tsallis evaluation takes the Shannon limit
/// instead of the numerically hollow (q - 1) division.
pub fn q_range_grid(q_min: f64, q_max: f64, q_step: f64) -> Result<Vec<f64>> {
    let well_formed = q_min.is_finite()
        && q_max.is_finite()
        && q_step.is_finite()
        && q_min > 0.0
        && q_step > 0.0
        && q_min <= q_max;
    if !well_formed {
        return Err(Error::InvalidQGrid {
            reason: format!("need 0 < min <= max and step > 0 (got {q_min}:{q_max}:{q_step})"),
        });
    }
    let count = ((q_max - q_min) / q_step + 1e-9).floor() as usize;
    let mut grid = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let mut q = q_min + (i as f64) * q_step;
        if (q - 1.0).abs() <= 1e-9 {
            q = 1.0;
        }
        grid.push(q);
    }
    Ok(grid)
}

#[derive(Serialize)]
struct CoefficientOutput {
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
    sign: i8,
    radicand: String,
    value: f64,
}

fn cmd_cg(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
    format: OutputFormat,
) -> Result<CommandOutput> {
    let label = CouplingLabel::new(j1, m1, j2, m2, j, m)?;
    let value = clebsch_gordan(&label);
    let record = CoefficientOutput {
        j1,
        m1,
        j2,
        m2,
        j,
        m,
        sign: value.sign(),
        radicand: value.radicand().to_string(),
        value: value.to_f64(),
    };
    let body = match format {
        OutputFormat::Json => render_json(&record),
        OutputFormat::Csv => format!(
            "j1,m1,j2,m2,j,m,sign,radicand,value\n{},{},{},{},{},{},{},{},{}\n",
            j1,
            m1,
            j2,
            m2,
            j,
            m,
            record.sign,
            record.radicand,
            format_float(record.value)
        ),
    };
    Ok(CommandOutput { body, exit_code: 0 })
}

#[derive(Serialize)]
struct ThreeJOutput {
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
    sign: i8,
    radicand: String,
    value: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_threej(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
    format: OutputFormat,
) -> Result<CommandOutput> {
    let value = three_j(j1, j2, j3, m1, m2, m3)?;
    let record = ThreeJOutput {
        j1,
        j2,
        j3,
        m1,
        m2,
        m3,
        sign: value.sign(),
        radicand: value.radicand().to_string(),
        value: value.to_f64(),
    };
    let body = match format {
        OutputFormat::Json => render_json(&record),
        OutputFormat::Csv => format!(
            "j1,j2,j3,m1,m2,m3,sign,radicand,value\n{},{},{},{},{},{},{},{},{}\n",
            j1,
            j2,
            j3,
            m1,
            m2,
            m3,
            record.sign,
            record.radicand,
            format_float(record.value)
        ),
    };
    Ok(CommandOutput { body, exit_code: 0 })
}

#[derive(Serialize)]
struct TableOutput {
    j1: HalfInt,
    j2: HalfInt,
    n: usize,
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    entries: Vec<Vec<String>>,
}

fn cmd_table(j1: HalfInt, j2: HalfInt, format: OutputFormat) -> Result<CommandOutput> {
    let matrix = prob::build_bistochastic(j1, j2)?;
    let n = matrix.size();
    let row_labels: Vec<String> = matrix
        .row_labels()
        .iter()
        .map(|(m1, m2)| format!("{m1}:{m2}"))
        .collect();
    let col_labels: Vec<String> = matrix
        .col_labels()
        .iter()
        .map(|(j, m)| format!("{j}:{m}"))
        .collect();
    let entries: Vec<Vec<String>> = (0..n)
        .map(|r| (0..n).map(|s| matrix.entry(r, s).to_string()).collect())
        .collect();

    let body = match format {
        OutputFormat::Json => render_json(&TableOutput {
            j1,
            j2,
            n,
            row_labels,
            col_labels,
            entries,
        }),
        OutputFormat::Csv => {
            let mut lines = Vec::with_capacity(n + 1);
            lines.push(format!("m1:m2,{}", col_labels.join(",")));
            for (label, row) in row_labels.iter().zip(entries.iter()) {
                lines.push(format!("{label},{}", row.join(",")));
            }
            lines.join("\n") + "\n"
        }
    };
    Ok(CommandOutput { body, exit_code: 0 })
}

fn cmd_verify(
    j1: HalfInt,
    j2: HalfInt,
    q_grid: &[f64],
    base: LogBase,
    format: OutputFormat,
) -> Result<CommandOutput> {
    let report = entropy::verify_inequalities(j1, j2, q_grid, base)?;
    let exit_code = if report.pass { 0 } else { 2 };
    let body = match format {
        OutputFormat::Json => render_json(&report),
        OutputFormat::Csv => {
            let mut lines = vec![
                "j,m,mutual_information,subadditivity_margin,araki_lieb_margin,q,tsallis_margin"
                    .to_string(),
            ];
            for col in &report.columns {
                for tm in &col.tsallis_margins {
                    lines.push(format!(
                        "{},{},{},{},{},{},{}",
                        col.j,
                        col.m,
                        format_float(col.mutual_information),
                        format_float(col.subadditivity_margin),
                        format_float(col.araki_lieb_margin),
                        format_float(tm.q),
                        format_float(tm.margin)
                    ));
                }
            }
            lines.join("\n") + "\n"
        }
    };
    Ok(CommandOutput { body, exit_code })
}

#[derive(Serialize)]
struct SweepPoint {
    q: f64,
    i_q: f64,
}

#[derive(Serialize)]
struct SweepOutput {
    j1: HalfInt,
    j2: HalfInt,
    j: HalfInt,
    m: HalfInt,
    points: Vec<SweepPoint>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep_tsallis(
    j1: HalfInt,
    j2: HalfInt,
    j: HalfInt,
    m: HalfInt,
    q_min: f64,
    q_max: f64,
    q_step: f64,
    format: OutputFormat,
) -> Result<CommandOutput> {
    let grid = q_range_grid(q_min, q_max, q_step)?;
    let joint = prob::column_joint(j1, j2, j, m)?;
    let points: Vec<SweepPoint> = grid
        .iter()
        .map(|&q| {
            entropy::tsallis_information(&joint, q).map(|i_q| SweepPoint { q, i_q })
        })
        .collect::<Result<_>>()?;

    let body = match format {
        OutputFormat::Json => render_json(&SweepOutput {
            j1,
            j2,
            j,
            m,
            points,
        }),
        OutputFormat::Csv => {
            let mut lines = vec!["q,I_q".to_string()];
            for p in &points {
                lines.push(format!("{},{}", format_float(p.q), format_float(p.i_q)));
            }
            lines.join("\n") + "\n"
        }
    };
    Ok(CommandOutput { body, exit_code: 0 })
}

#[derive(Serialize)]
struct SkippedLabelOutput {
    m1: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
    alpha: String,
    beta: String,
}

#[derive(Serialize)]
struct MismatchOutput {
    m1: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
    direct: String,
    via_hahn: String,
}

#[derive(Serialize)]
struct HahnCheckOutput {
    j1: HalfInt,
    j2: HalfInt,
    labels_checked: usize,
    matched: usize,
    skipped: Vec<SkippedLabelOutput>,
    mismatches: Vec<MismatchOutput>,
    pass: bool,
}

fn cmd_hahn_check(j1: HalfInt, j2: HalfInt, format: OutputFormat) -> Result<CommandOutput> {
    let report = hahn::equivalence_report(j1, j2)?;
    let out = HahnCheckOutput {
        j1,
        j2,
        labels_checked: report.labels_checked,
        matched: report.matched,
        skipped: report
            .skipped
            .iter()
            .map(|s| SkippedLabelOutput {
                m1: s.label.m1(),
                m2: s.label.m2(),
                j: s.label.j(),
                m: s.label.m(),
                alpha: s.alpha.to_string(),
                beta: s.beta.to_string(),
            })
            .collect(),
        mismatches: report
            .mismatches
            .iter()
            .map(|mm| MismatchOutput {
                m1: mm.label.m1(),
                m2: mm.label.m2(),
                j: mm.label.j(),
                m: mm.label.m(),
                direct: mm.direct.to_string(),
                via_hahn: mm.via_hahn.to_string(),
            })
            .collect(),
        pass: report.pass,
    };
    let exit_code = if report.pass { 0 } else { 2 };
    let body = match format {
        OutputFormat::Json => render_json(&out),
        OutputFormat::Csv => {
            let mut lines = vec!["m1,m2,j,m,status,direct,via_hahn,alpha,beta".to_string()];
            for s in &out.skipped {
                lines.push(format!(
                    "{},{},{},{},skipped,,,{},{}",
                    s.m1, s.m2, s.j, s.m, s.alpha, s.beta
                ));
            }
            for mm in &out.mismatches {
                lines.push(format!(
                    "{},{},{},{},mismatch,{},{},,",
                    mm.m1, mm.m2, mm.j, mm.m, mm.direct, mm.via_hahn
                ));
            }
            lines.join("\n") + "\n"
        }
    };
    Ok(CommandOutput { body, exit_code })
}
