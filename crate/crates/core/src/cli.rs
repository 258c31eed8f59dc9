//! Command-line front end: load a system and candidate points, certify
//! every candidate, filter distinct zeros and report.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certify::{certify_candidate, Candidate, CertificateResult, Positivity, Reality, Status};
use crate::distinct::{group_overlaps_indexed, DistinctnessReport};
use crate::expr::{compile_with, parse_system, CompileOptions, CompiledSystem, ExprError};
use crate::interval::{default_ladder, BigFloat, Complex, RealInterval, Round};

#[derive(Debug, Parser)]
#[command(name = "certify", version, about = "Certify approximate zeros of a square polynomial system")]
pub struct Args {
    /// Polynomial system file.
    #[arg(long)]
    pub system: PathBuf,
    /// JSON array of candidate points, each a list of [re, im] pairs.
    #[arg(long)]
    pub solutions: PathBuf,
    /// Where to write the JSON certificate report.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Largest significand width tried when escalating precision.
    #[arg(long, env = "CERTIFY_MAX_BITS", default_value_t = 512, value_parser = clap::value_parser!(u32).range(53..))]
    pub max_bits: u32,
    /// Seed for the distinctness anchor.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Compile expressions as written instead of in Horner form.
    #[arg(long)]
    pub no_horner: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    System {
        path: PathBuf,
        #[source]
        source: ExprError,
    },
    #[error("solutions: invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("solutions: expected a JSON array of candidates")]
    NotAnArray,
    #[error("solutions row {row}: {message}")]
    MalformedRow { row: usize, message: String },
    #[error("solutions row {row}: expected {expected} coordinates, found {found}")]
    LengthMismatch { row: usize, expected: usize, found: usize },
    #[error("solutions row {row}: coordinate {coordinate} is not finite")]
    NonFinite { row: usize, coordinate: usize },
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub max_bits: u32,
    pub seed: u64,
    pub threads: Option<usize>,
    pub horner: bool,
    pub output: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_bits: 512,
            seed: 0,
            threads: None,
            horner: true,
            output: None,
        }
    }
}

impl From<&Args> for RunOptions {
    fn from(a: &Args) -> Self {
        RunOptions {
            max_bits: a.max_bits,
            seed: a.seed,
            threads: a.threads,
            horner: !a.no_horner,
            output: a.output.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub system: Option<PathBuf>,
    pub solutions: Option<PathBuf>,
    pub ladder: Vec<u32>,
    pub seed: u64,
    pub horner: bool,
}

#[derive(Clone, Debug)]
pub struct CertificationSummary {
    pub total_candidates: usize,
    pub certified_count: usize,
    pub distinct_count: usize,
    pub real_count: usize,
    pub positive_count: usize,
    pub variables: Vec<String>,
    pub results: Vec<CertificateResult>,
    pub distinctness: DistinctnessReport,
    pub config: RunConfig,
}

pub fn parse_solutions(text: &str, dim: usize) -> Result<Vec<Candidate>, CliError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let rows = value.as_array().ok_or(CliError::NotAnArray)?;
    rows.iter()
        .enumerate()
        .map(|(row, r)| {
            let malformed = |message: &str| CliError::MalformedRow {
                row,
                message: message.to_string(),
            };
            let coords = r.as_array().ok_or_else(|| malformed("expected a list of [re, im] pairs"))?;
            if coords.len() != dim {
                return Err(CliError::LengthMismatch {
                    row,
                    expected: dim,
                    found: coords.len(),
                });
            }
            let x = coords
                .iter()
                .enumerate()
                .map(|(coordinate, pair)| {
                    let pair = pair
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| malformed("each coordinate must be a [re, im] pair"))?;
                    let part = |v: &serde_json::Value| {
                        let x = v.as_f64().ok_or_else(|| malformed("coordinates must be numbers"))?;
                        if x.is_finite() {
                            Ok(x)
                        } else {
                            Err(CliError::NonFinite { row, coordinate })
                        }
                    };
                    Ok(Complex::new(part(&pair[0])?, part(&pair[1])?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Candidate { index: row, x })
        })
        .collect()
}

pub fn load_solutions(path: &Path, dim: usize) -> Result<Vec<Candidate>, CliError> {
    parse_solutions(&read(path)?, dim)
}

pub fn load_system(path: &Path, horner: bool) -> Result<CompiledSystem, CliError> {
    let sys = parse_system(&read(path)?).map_err(|source| CliError::System {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(compile_with(&sys, CompileOptions { horner }))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Certifies every candidate, groups the certified boxes and counts.
pub fn certify_all(
    system: &CompiledSystem,
    candidates: &[Candidate],
    options: &RunOptions,
) -> Result<CertificationSummary, CliError> {
    let ladder = default_ladder(options.max_bits);
    let work = || -> Vec<CertificateResult> {
        candidates
            .par_iter()
            .map(|c| certify_candidate(system, c, &ladder))
            .collect()
    };
    let results = match options.threads {
        Some(t) => rayon::ThreadPoolBuilder::new().num_threads(t).build()?.install(work),
        None => work(),
    };

    let certified: Vec<_> = results
        .iter()
        .filter(|r| r.is_certified())
        .filter_map(|r| r.box_f64().map(|b| (r.index, b)))
        .collect();
    let distinctness = group_overlaps_indexed(&certified, options.seed);
    let positions: HashMap<usize, usize> = results.iter().enumerate().map(|(k, r)| (r.index, k)).collect();
    let by_index = |i: usize| &results[positions[&i]];
    let count_groups = |pred: &dyn Fn(&CertificateResult) -> bool| {
        distinctness
            .groups
            .iter()
            .filter(|g| g.iter().any(|&i| pred(by_index(i))))
            .count()
    };
    let real_count = count_groups(&|r| r.reality == Reality::Real);
    let positive_count = count_groups(&|r| r.positive == Positivity::Yes);

    Ok(CertificationSummary {
        total_candidates: candidates.len(),
        certified_count: certified.len(),
        distinct_count: distinctness.distinct_count,
        real_count,
        positive_count,
        variables: system.source.variables.clone(),
        results,
        distinctness,
        config: RunConfig {
            system: None,
            solutions: None,
            ladder: ladder.iter().map(|l| l.significand_bits()).collect(),
            seed: options.seed,
            horner: options.horner,
        },
    })
}

/// Loads both files, certifies, and writes the report when an output path
/// is set.
pub fn run(system_path: &Path, solutions_path: &Path, options: &RunOptions) -> Result<CertificationSummary, CliError> {
    let system = load_system(system_path, options.horner)?;
    let candidates = load_solutions(solutions_path, system.dim())?;
    let mut summary = certify_all(&system, &candidates, options)?;
    summary.config.system = Some(system_path.to_path_buf());
    summary.config.solutions = Some(solutions_path.to_path_buf());
    if let Some(out) = &options.output {
        write_report(&summary, out)?;
    }
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub total_candidates: usize,
    pub certified: usize,
    pub distinct: usize,
    pub real: usize,
    pub positive: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub index: usize,
    pub status: Status,
    pub reason: Option<String>,
    pub precision_bits: u32,
    /// Per coordinate `[re_lo, re_hi, im_lo, im_hi]`, rounded outward.
    #[serde(rename = "box")]
    pub interval_box: Option<Vec<[String; 4]>>,
    pub contraction_norm: Option<f64>,
    pub reality: Reality,
    pub positive: Positivity,
    pub group: Option<usize>,
    pub representative: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistinctnessRecord {
    pub groups: Vec<Vec<usize>>,
    pub representatives: Vec<usize>,
    pub anchor: Vec<[f64; 2]>,
    pub comparisons: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub variables: Vec<String>,
    pub counts: Counts,
    pub results: Vec<ResultRecord>,
    pub distinctness: DistinctnessRecord,
}

pub fn build_report(s: &CertificationSummary) -> Report {
    let group_ids: HashMap<usize, usize> = s
        .distinctness
        .groups
        .iter()
        .enumerate()
        .flat_map(|(g, members)| members.iter().map(move |&i| (i, g)))
        .collect();
    let results = s
        .results
        .iter()
        .map(|r| {
            let group = group_ids.get(&r.index).copied();
            ResultRecord {
                index: r.index,
                status: r.status,
                reason: r.reason.clone(),
                precision_bits: r.precision_used.significand_bits(),
                interval_box: r.interval_box.as_ref().map(|b| {
                    b.iter()
                        .map(|c| {
                            let [a, b] = format_interval(&c.re);
                            let [c, d] = format_interval(&c.im);
                            [a, b, c, d]
                        })
                        .collect()
                }),
                contraction_norm: r.contraction_norm,
                reality: r.reality,
                positive: r.positive,
                group,
                representative: group.is_some_and(|g| s.distinctness.representatives[g] == r.index),
            }
        })
        .collect();
    Report {
        config: s.config.clone(),
        variables: s.variables.clone(),
        counts: Counts {
            total_candidates: s.total_candidates,
            certified: s.certified_count,
            distinct: s.distinct_count,
            real: s.real_count,
            positive: s.positive_count,
        },
        results,
        distinctness: DistinctnessRecord {
            groups: s.distinctness.groups.clone(),
            representatives: s.distinctness.representatives.clone(),
            anchor: s.distinctness.anchor.iter().map(|z| [z.re, z.im]).collect(),
            comparisons: s.distinctness.comparisons,
        },
    }
}

pub fn report_json(s: &CertificationSummary) -> String {
    serde_json::to_string_pretty(&build_report(s)).expect("report serializes")
}

pub fn write_report(s: &CertificationSummary, path: &Path) -> Result<(), CliError> {
    fs::write(path, report_json(s) + "\n").map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn summary_text(s: &CertificationSummary) -> String {
    let mut out = String::new();
    let ladder: Vec<String> = s.config.ladder.iter().map(u32::to_string).collect();
    let _ = writeln!(out, "candidates      {}", s.total_candidates);
    let _ = writeln!(out, "certified       {}", s.certified_count);
    let _ = writeln!(out, "distinct        {}", s.distinct_count);
    let _ = writeln!(out, "real            {}", s.real_count);
    let _ = writeln!(out, "positive        {}", s.positive_count);
    let _ = writeln!(out, "not certified   {}", s.total_candidates - s.certified_count);
    let _ = writeln!(out, "precision bits  {}", ladder.join(", "));
    let mut failures: Vec<(&str, usize)> = Vec::new();
    for r in &s.results {
        if let Some(reason) = r.reason.as_deref() {
            match failures.iter_mut().find(|(k, _)| *k == reason) {
                Some((_, n)) => *n += 1,
                None => failures.push((reason, 1)),
            }
        }
    }
    for (reason, n) in failures {
        let _ = writeln!(out, "  {reason}: {n}");
    }
    out
}

/// Entry point shared by the binary and tests. Returns the process exit
/// code.
pub fn main_with(args: &Args) -> i32 {
    match run(&args.system, &args.solutions, &RunOptions::from(args)) {
        Ok(summary) => {
            print!("{}", summary_text(&summary));
            0
        }
        Err(e) => {
            eprintln!("certify: {e}");
            2
        }
    }
}

/// Decimal strings `[lo, hi]` with `lo` rounded down and `hi` rounded up.
pub fn format_interval<S: crate::interval::Scalar>(r: &RealInterval<S>) -> [String; 2] {
    [
        format_bound(&r.lo().to_big(), Round::Down),
        format_bound(&r.hi().to_big(), Round::Up),
    ]
}

/// The shortest decimal rounded in direction `rnd` that still reads back to
/// `x` under round-to-nearest at the precision of `x`.
pub fn format_bound(x: &BigFloat, rnd: Round) -> String {
    let r = x.to_rational();
    if r.is_zero() {
        return "0".to_string();
    }
    let prec = x.precision();
    let max_digits = ((prec + 1) as f64 * std::f64::consts::LOG10_2).ceil() as u32 + 1;
    let reads_back = |s: &str| BigFloat::from_rational(&parse_decimal(s).expect("own output parses"), prec, Round::Nearest) == *x;
    let (mut lo, mut hi) = (1, max_digits);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if reads_back(&directed_decimal(&r, mid, rnd)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    directed_decimal(&r, lo, rnd)
}

/// `r` rounded in direction `rnd` to `digits` significant decimal digits,
/// in scientific notation.
pub fn directed_decimal(r: &BigRational, digits: u32, rnd: Round) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow10 = |e: i64| -> BigRational {
        let p = num_traits::pow(ten.clone(), e.unsigned_abs() as usize);
        if e >= 0 {
            p
        } else {
            p.recip()
        }
    };
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scaled = &a * pow10(digits as i64 - 1 - e);
    let toward_zero = matches!((rnd, neg), (Round::Down, false) | (Round::Up, true));
    let m = match rnd {
        Round::Nearest => scaled.round(),
        _ if toward_zero => scaled.floor(),
        _ => scaled.ceil(),
    }
    .to_integer();
    let ds = m.to_string();
    let exp = e - (digits as i64 - 1) + ds.len() as i64 - 1;
    let frac = ds[1..].trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{}e{exp}", &ds[..1])
    } else {
        format!("{sign}{}.{frac}e{exp}", &ds[..1])
    }
}

/// Exact value of a decimal literal such as `-1.25e-3`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mant, exp) = match body.find(['e', 'E']) {
        Some(k) => (&body[..k], body[k + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let p = num_traits::pow(ten, scale.unsigned_abs() as usize);
    let v = if scale >= 0 {
        BigRational::from_integer(digits * p)
    } else {
        BigRational::new(digits, p)
    };
    Some(if neg { -v } else { v })
}
