//! End-to-end nonvanishing search over a stored coefficient table.
//!
//! The chain: locate a nonzero primitive coefficient, represent an odd
//! prime by the attached form so a prime slice index appears, extract
//! that Fourier-Jacobi slice, project it to a half-integral q-series,
//! gate on the level shape and on theta degeneracy, scan for
//! square-free exponents, and map each hit back to a witness index.
//! Every search uses a fixed enumeration order, so the report is a
//! deterministic function of the table and the configuration.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use crate::bqf::{represent_prime, BqfError, PrimeRepresentation};
use crate::character::DirichletCharacter;
use crate::fourier::{fj_extract, FourierTable, QuadIndex};
use crate::halfint::{
    saha_conditions, skoruppa_map, squarefree_scan, theta_shape_detect, HalfIntError, QSeries,
    SahaVerdict, ThetaShape,
};
use crate::hecke::{find_primitive, PrimitiveReport};
use crate::mat::Mat2;
use num_traits::Zero;

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Character for the half-integral projection.
    pub chi: DirichletCharacter,
    /// Primes never offered to the representation search.
    pub exclusions: BTreeSet<i64>,
    /// Primes the final scan must avoid dividing.
    pub avoid: BTreeSet<i64>,
    /// Ring bound for the representation search.
    pub search_bound: i64,
    /// Distinct represented primes tried before giving up on a
    /// populated slice.
    pub slice_tries: usize,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            chi: DirichletCharacter::trivial(1).expect("modulus 1 is valid"),
            exclusions: BTreeSet::new(),
            avoid: BTreeSet::new(),
            search_bound: 50,
            slice_tries: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PipelineError {
    ZeroForm,
    Representation { tried: Vec<i64>, error: BqfError },
    EmptySlices { tried: Vec<i64> },
    HalfIntegral { q: i64, error: HalfIntError },
    ZeroImage { q: i64 },
    LevelShape { level_total: i64, verdict: SahaVerdict },
    ThetaDegenerate { shape: ThetaShape },
    NoSquarefree { support: Vec<i64> },
}

impl PipelineError {
    /// Stage number and label for the failing step.
    pub fn stage(&self) -> (u8, &'static str) {
        match self {
            PipelineError::ZeroForm => (1, "primitive"),
            PipelineError::Representation { .. } => (2, "representation"),
            PipelineError::EmptySlices { .. } => (3, "slice"),
            PipelineError::HalfIntegral { .. } | PipelineError::ZeroImage { .. } => {
                (4, "half-integral")
            }
            PipelineError::LevelShape { .. } | PipelineError::ThetaDegenerate { .. } => {
                (5, "gates")
            }
            PipelineError::NoSquarefree { .. } => (6, "scan"),
        }
    }
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (stage, label) = self.stage();
        write!(f, "stage {stage} ({label}): ")?;
        match self {
            PipelineError::ZeroForm => write!(f, "no nonzero certified coefficient"),
            PipelineError::Representation { tried, error } => {
                write!(f, "prime representation failed after tries {tried:?}: {error}")
            }
            PipelineError::EmptySlices { tried } => {
                write!(f, "every represented prime led to an empty stored slice: {tried:?}")
            }
            PipelineError::HalfIntegral { q, error } => {
                write!(f, "projection at q {q} failed: {error}")
            }
            PipelineError::ZeroImage { q } => {
                write!(f, "image at q {q} is identically zero")
            }
            PipelineError::LevelShape { level_total, verdict } => {
                match verdict.failing_prime() {
                    Some(p) => write!(f, "level {level_total} fails the shape conditions at p {p}"),
                    None => write!(f, "level {level_total} fails the shape conditions"),
                }
            }
            PipelineError::ThetaDegenerate { shape } => {
                write!(f, "image is a theta series with shift {} and conductor {}", shape.t, shape.r)
            }
            PipelineError::NoSquarefree { support } => {
                write!(f, "no admissible square-free exponent in support {support:?}")
            }
        }
    }
}

impl std::error::Error for PipelineError {}

/// Stage-labeled failure, with any stage 1 warning preserved so a run
/// that continued past an imprimitive minimum still reports it.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineFailure {
    pub warning: Option<String>,
    pub error: PipelineError,
}

impl fmt::Display for PipelineFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(w) = &self.warning {
            writeln!(f, "warning: {w}")?;
        }
        write!(f, "{}", self.error)
    }
}

impl std::error::Error for PipelineFailure {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceAttempt {
    pub q: i64,
    /// Stored keys in the slice at m = N q.
    pub stored: usize,
}

#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub level: i64,
    pub weight: i64,
    pub table_keys: usize,
    pub primitive: PrimitiveReport,
    pub warning: Option<String>,
    pub representation: PrimeRepresentation,
    pub attempts: Vec<SliceAttempt>,
    pub slice_index: i64,
    pub slice_keys: usize,
    pub half: QSeries,
    pub level_total: i64,
    pub saha: SahaVerdict,
    pub theta: Option<ThetaShape>,
    pub scan: Vec<i64>,
    pub witnesses: Vec<(i64, QuadIndex)>,
}

fn fail(warning: &Option<String>, error: PipelineError) -> PipelineFailure {
    PipelineFailure { warning: warning.clone(), error }
}

/// Runs the whole search.  Stage failures carry the stage label; the
/// report records what every stage produced.
pub fn run(table: &FourierTable, config: &PipelineConfig) -> Result<PipelineReport, PipelineFailure> {
    let warning = None;
    let primitive =
        find_primitive(table).map_err(|_| fail(&warning, PipelineError::ZeroForm))?;
    let mut warning = None;
    let target = if primitive.is_primitive {
        primitive.index
    } else {
        warning = Some(format!(
            "minimal coefficient at ({}, {}, {}) has content {}; dividing it out and continuing",
            primitive.index.n(),
            primitive.index.r(),
            primitive.index.mn(),
            primitive.content
        ));
        let g = primitive.content;
        QuadIndex::new(
            primitive.index.n() / g,
            primitive.index.r() / g,
            primitive.index.mn() / g,
            table.level(),
        )
        .unwrap_or(primitive.index)
    };

    let mut exclusions = config.exclusions.clone();
    let mut attempts: Vec<SliceAttempt> = Vec::new();
    let mut found = None;
    for _ in 0..config.slice_tries.max(1) {
        let rep = represent_prime(&target, &exclusions, config.search_bound).map_err(|error| {
            fail(
                &warning,
                PipelineError::Representation {
                    tried: attempts.iter().map(|a| a.q).collect(),
                    error,
                },
            )
        })?;
        let slice = fj_extract(table, rep.image.mn()).expect("slice index is positive");
        attempts.push(SliceAttempt { q: rep.q, stored: slice.coeffs.len() });
        if slice.is_zero() {
            exclusions.insert(rep.q);
            continue;
        }
        found = Some((rep, slice));
        break;
    }
    let Some((representation, slice)) = found else {
        let tried = attempts.iter().map(|a| a.q).collect();
        return Err(fail(&warning, PipelineError::EmptySlices { tried }));
    };

    let half = skoruppa_map(&slice, &config.chi, table.weight()).map_err(|error| {
        fail(&warning, PipelineError::HalfIntegral { q: representation.q, error })
    })?;
    if half.is_zero() {
        return Err(fail(&warning, PipelineError::ZeroImage { q: representation.q }));
    }

    let level_total = half.level();
    let saha = saha_conditions(level_total, &config.chi);
    if !saha.ok {
        return Err(fail(&warning, PipelineError::LevelShape { level_total, verdict: saha }));
    }
    let theta = theta_shape_detect(&half).expect("series is nonzero");
    if let Some(shape) = theta {
        return Err(fail(&warning, PipelineError::ThetaDegenerate { shape }));
    }

    let scan = squarefree_scan(&half, &config.avoid);
    if scan.is_empty() {
        let support = half.iter().map(|(d, _)| *d).collect();
        return Err(fail(&warning, PipelineError::NoSquarefree { support }));
    }

    let m = slice.index;
    let witnesses = scan.iter().map(|&d| (d, witness_index(table, m, d))).collect();
    Ok(PipelineReport {
        level: table.level(),
        weight: table.weight(),
        table_keys: table.len(),
        primitive,
        warning,
        representation,
        attempts,
        slice_index: m,
        slice_keys: slice.coeffs.len(),
        half,
        level_total,
        saha,
        theta: None,
        scan,
        witnesses,
    })
}

/// First residue whose stored coefficient backs the scanned exponent:
/// the scan only returns exponents of nonzero image coefficients, so a
/// nonzero stored term exists.
fn witness_index(table: &FourierTable, m: i64, d: i64) -> QuadIndex {
    for mu in 0..2 * m {
        if (d + mu * mu) % (4 * m) != 0 {
            continue;
        }
        let n = (d + mu * mu) / (4 * m);
        let Ok(idx) = QuadIndex::new(n, mu, m, table.level()) else {
            continue;
        };
        if !table.coeff(&idx).is_zero() {
            return idx;
        }
    }
    unreachable!("a scanned exponent always has a stored nonzero term")
}

fn fmt_idx(idx: &QuadIndex) -> String {
    format!("({}, {}, {})", idx.n(), idx.r(), idx.mn())
}

fn fmt_mat(m: &Mat2) -> String {
    format!(
        "[[{}, {}], [{}, {}]]",
        m.at(0, 0),
        m.at(0, 1),
        m.at(1, 0),
        m.at(1, 1)
    )
}

/// Renders the report as stable line-oriented text.
pub fn render_report(report: &PipelineReport) -> String {
    let mut out = String::new();
    writeln!(out, "nonvanishing search report").unwrap();
    writeln!(
        out,
        "level {} weight {} keys {}",
        report.level, report.weight, report.table_keys
    )
    .unwrap();
    writeln!(
        out,
        "stage 1 primitive: index {} value {} content {}",
        fmt_idx(&report.primitive.index),
        report.primitive.value,
        report.primitive.content
    )
    .unwrap();
    if let Some(w) = &report.warning {
        writeln!(out, "warning: {w}").unwrap();
    }
    writeln!(
        out,
        "stage 2 representation: q {} pair ({}, {}) completion {} image {}",
        report.representation.q,
        report.representation.c,
        report.representation.d,
        fmt_mat(&report.representation.matrix),
        fmt_idx(&report.representation.image)
    )
    .unwrap();
    let tried: Vec<i64> = report.attempts.iter().map(|a| a.q).collect();
    writeln!(
        out,
        "stage 3 slice: m {} stored {} tried {:?}",
        report.slice_index, report.slice_keys, tried
    )
    .unwrap();
    let (k, half) = report.half.weight();
    let weight_text = if half { format!("{}/2", 2 * k - 1) } else { format!("{k}") };
    let support: Vec<i64> = report.half.iter().map(|(d, _)| *d).collect();
    writeln!(
        out,
        "stage 4 half-integral: weight {} level {} chi mod {} support {:?}",
        weight_text,
        report.level_total,
        report.half.character().modulus(),
        support
    )
    .unwrap();
    let saha_text = match (report.saha.ok, report.saha.failing_prime()) {
        (true, _) => "pass".to_string(),
        (false, Some(p)) => format!("fail at p {p}"),
        (false, None) => "fail".to_string(),
    };
    let theta_text = match &report.theta {
        None => "none".to_string(),
        Some(shape) => format!("shift {} conductor {}", shape.t, shape.r),
    };
    writeln!(out, "stage 5 gates: saha {saha_text}, theta {theta_text}").unwrap();
    writeln!(out, "stage 6 scan: {:?}", report.scan).unwrap();
    for (d, idx) in &report.witnesses {
        writeln!(out, "stage 7 witness: D {} index {}", d, fmt_idx(idx)).unwrap();
    }
    out
}
