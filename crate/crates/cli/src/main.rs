//! Command line front end: file formats, operator checks, and the
//! end-to-end nonvanishing search.
//!
//! Exit codes: 0 success, 2 parse error, 3 invariant violation, 4
//! stage failure.  Unreadable input files report as parse errors;
//! verification subcommands report a failed verdict as a stage
//! failure so scripts can branch on it.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use paramodular::bqf::represent_prime;
use paramodular::fourier::{
    check_equivariance, fj_extract, fricke_eigen_check, FourierTable, QuadIndex,
};
use paramodular::gen::{random_symmetrized_table, symmetry_generators};
use paramodular::groups::{build_up_cosets, verify_up_cosets};
use paramodular::halfint::{skoruppa_map, squarefree_scan, theta_shape_detect};
use paramodular::hecke::{up_apply, up_oracle, up_oracle_float, compare_float_oracle, HeckeParams};
use paramodular::io::{
    parse_char_config, parse_qseries, parse_slice, parse_table, serialize_qseries,
    serialize_slice, serialize_table, IoError,
};
use paramodular::mat::Mat2;
use paramodular::pipeline::{render_report, run as run_pipeline, PipelineConfig};

const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "paramodular", about = "Exact coefficient tables for degree two forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the ramified-prime coset list and verify it.
    VerifyCosets {
        #[arg(long = "p")]
        p: i64,
        #[arg(long = "N")]
        level: i64,
    },
    /// Apply the ramified-prime operator to a table file.
    Apply {
        #[arg(long = "p")]
        p: i64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Compare the coset-sum route with the closed-form route.
    CheckOracle {
        #[arg(long = "p")]
        p: i64,
        #[arg(long = "in")]
        input: PathBuf,
        /// Also cross-check the float mode against the exact output.
        #[arg(long = "float-check")]
        float_check: bool,
    },
    /// Measure the level involution sign of a table.
    Fricke {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Audit stored coefficients under the shear generators.
    Equivariance {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Extract the Fourier-Jacobi slice at index N times p.
    Fj {
        #[arg(long = "p")]
        p: i64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Project a slice file to a half-integral q-series.
    Skoruppa {
        /// Integral weight; defaults to the weight stored in the slice.
        #[arg(long = "k")]
        k: Option<i64>,
        /// Character choice: `trivial`, `trivial:m`, `kron:m`, or a
        /// comma-separated product of `q:index` odd-prime picks.
        #[arg(long = "char", default_value = "trivial")]
        character: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Look for a unary theta shape in a q-series file.
    DetectTheta {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// List square-free exponents carrying nonzero coefficients.
    Scan {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Find an odd prime represented by the form attached to an index.
    RepresentPrime {
        n: i64,
        r: i64,
        mn: i64,
        #[arg(long = "N")]
        level: i64,
        /// Ring bound for the representation search.
        #[arg(long = "bound", default_value_t = 50)]
        bound: i64,
    },
    /// Run the whole nonvanishing search on a table file.
    Pipeline {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "char", default_value = "trivial")]
        character: String,
        #[arg(long = "bound", default_value_t = 50)]
        bound: i64,
    },
    /// Write a seeded random table symmetrized under the shear moves.
    GenRandom {
        #[arg(long = "N")]
        level: i64,
        #[arg(long = "k", default_value_t = 2)]
        weight: i64,
        #[arg(long = "bound", default_value_t = 400)]
        bound: i64,
        #[arg(long = "seed", default_value_t = 0)]
        seed: u64,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Parse(String),
    Invariant(String),
    Stage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Invariant(_) => 3,
            Failure::Stage(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Parse(m) | Failure::Invariant(m) | Failure::Stage(m) => m,
        }
    }
}

impl From<IoError> for Failure {
    fn from(err: IoError) -> Failure {
        match err {
            IoError::Parse { .. } => Failure::Parse(err.to_string()),
            IoError::Invariant { .. } => Failure::Invariant(err.to_string()),
        }
    }
}

fn stage(err: impl Display) -> Failure {
    Failure::Stage(err.to_string())
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|err| Failure::Parse(format!("{}: {err}", path.display())))
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|err| Failure::Stage(format!("{}: {err}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn fmt_mat(m: &Mat2) -> String {
    format!("[[{}, {}], [{}, {}]]", m.at(0, 0), m.at(0, 1), m.at(1, 0), m.at(1, 1))
}

fn load_table(path: &PathBuf) -> Result<FourierTable, Failure> {
    Ok(parse_table(&read_input(path)?)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::VerifyCosets { p, level } => verify_cosets(p, level),
        Command::Apply { p, input, output } => apply(p, &input, &output),
        Command::CheckOracle { p, input, float_check } => check_oracle(p, &input, float_check),
        Command::Fricke { input } => fricke(&input),
        Command::Equivariance { input } => equivariance(&input),
        Command::Fj { p, input, output } => fj(p, &input, &output),
        Command::Skoruppa { k, character, input, output } => {
            skoruppa(k, &character, &input, &output)
        }
        Command::DetectTheta { input } => detect_theta(&input),
        Command::Scan { input } => scan(&input),
        Command::RepresentPrime { n, r, mn, level, bound } => {
            represent(n, r, mn, level, bound)
        }
        Command::Pipeline { input, character, bound } => pipeline(&input, &character, bound),
        Command::GenRandom { level, weight, bound, seed, output } => {
            gen_random(level, weight, bound, seed, &output)
        }
    }
}

fn verify_cosets(p: i64, level: i64) -> Result<(), Failure> {
    let reps = build_up_cosets(p, level).map_err(stage)?;
    let v = verify_up_cosets(&reps, p, level);
    for (family, count) in &v.family_counts {
        println!("family {family}: {count}");
    }
    println!("total: {}", v.total);
    println!("multiplier: {}", verdict(v.multiplier_ok));
    println!("parabolic: {}", verdict(v.parabolic_ok));
    println!("left-equivalent: {}", verdict(v.left_equivalent_ok));
    println!("pairwise-distinct: {}", verdict(v.pairwise_distinct_ok));
    if v.all_ok() {
        Ok(())
    } else {
        Err(Failure::Stage("coset verification failed".into()))
    }
}

fn apply(p: i64, input: &PathBuf, output: &Option<PathBuf>) -> Result<(), Failure> {
    let table = load_table(input)?;
    let params = HeckeParams::up(p, table.level(), table.weight()).map_err(stage)?;
    let image = up_apply(&table, &params).map_err(stage)?;
    write_output(output, &serialize_table(&image))
}

fn check_oracle(p: i64, input: &PathBuf, float_check: bool) -> Result<(), Failure> {
    let table = load_table(input)?;
    let params = HeckeParams::up(p, table.level(), table.weight()).map_err(stage)?;
    let via_cosets = up_apply(&table, &params).map_err(stage)?;
    let via_relation = up_oracle(&table, &params).map_err(stage)?;
    let agree = via_cosets == via_relation;
    println!("exact routes: {} ({} stored outputs)", verdict(agree), via_relation.len());
    if float_check {
        let float = up_oracle_float(&table, &params).map_err(stage)?;
        let cmp = compare_float_oracle(&via_relation, &float, FLOAT_TOLERANCE);
        println!(
            "float route: {} (compared {}, max deviation {:.3e})",
            verdict(cmp.ok()),
            cmp.compared,
            cmp.max_deviation
        );
        if !cmp.ok() {
            return Err(Failure::Stage("float cross-check exceeded tolerance".into()));
        }
    }
    if agree {
        Ok(())
    } else {
        Err(Failure::Stage("exact routes disagree".into()))
    }
}

fn fricke(input: &PathBuf) -> Result<(), Failure> {
    let table = load_table(input)?;
    let check = fricke_eigen_check(&table);
    let sign = match check.eps() {
        Some(1) => "+1",
        Some(-1) => "-1",
        _ => "none",
    };
    println!("checked: {}", check.checked);
    println!("eps: {sign}");
    match (check.eps(), table.eps) {
        (None, _) => Err(Failure::Stage("no involution sign survives".into())),
        (Some(found), Some(declared)) if found != declared => Err(Failure::Stage(format!(
            "declared eps {declared:+} but stored values give {found:+}"
        ))),
        _ => Ok(()),
    }
}

fn equivariance(input: &PathBuf) -> Result<(), Failure> {
    let table = load_table(input)?;
    let mut all_ok = true;
    for a in symmetry_generators(table.level()) {
        let report = check_equivariance(&table, &a).map_err(stage)?;
        println!(
            "generator {}: pairs {} skipped {} mismatches {}",
            fmt_mat(&a),
            report.pairs_checked,
            report.skipped,
            report.mismatches.len()
        );
        all_ok &= report.ok();
    }
    if all_ok {
        Ok(())
    } else {
        Err(Failure::Stage("equivariance mismatches found".into()))
    }
}

fn fj(p: i64, input: &PathBuf, output: &Option<PathBuf>) -> Result<(), Failure> {
    let table = load_table(input)?;
    let slice = fj_extract(&table, table.level() * p).map_err(stage)?;
    write_output(output, &serialize_slice(&slice))
}

fn skoruppa(
    k: Option<i64>,
    character: &str,
    input: &PathBuf,
    output: &Option<PathBuf>,
) -> Result<(), Failure> {
    let slice = parse_slice(&read_input(input)?)?;
    let chi = parse_char_config(character)?;
    let series = skoruppa_map(&slice, &chi, k.unwrap_or(slice.weight)).map_err(stage)?;
    write_output(output, &serialize_qseries(&series))
}

fn detect_theta(input: &PathBuf) -> Result<(), Failure> {
    let series = parse_qseries(&read_input(input)?)?;
    match theta_shape_detect(&series).map_err(stage)? {
        Some(shape) => println!(
            "theta: shift {} conductor {} psi mod {} consistent to {}",
            shape.t,
            shape.r,
            shape.psi.modulus(),
            shape.consistent_to
        ),
        None => println!("theta: none"),
    }
    Ok(())
}

fn scan(input: &PathBuf) -> Result<(), Failure> {
    let series = parse_qseries(&read_input(input)?)?;
    let hits = squarefree_scan(&series, &BTreeSet::new());
    println!("square-free exponents: {hits:?}");
    Ok(())
}

fn represent(n: i64, r: i64, mn: i64, level: i64, bound: i64) -> Result<(), Failure> {
    let idx = QuadIndex::new(n, r, mn, level)
        .map_err(|err| Failure::Invariant(err.to_string()))?;
    let rep = represent_prime(&idx, &BTreeSet::new(), bound).map_err(stage)?;
    println!("q: {}", rep.q);
    println!("pair: ({}, {})", rep.c, rep.d);
    println!("completion: {}", fmt_mat(&rep.matrix));
    println!("image: ({}, {}, {})", rep.image.n(), rep.image.r(), rep.image.mn());
    Ok(())
}

fn pipeline(input: &PathBuf, character: &str, bound: i64) -> Result<(), Failure> {
    let table = load_table(input)?;
    let chi = parse_char_config(character)?;
    let config = PipelineConfig { chi, search_bound: bound, ..PipelineConfig::default() };
    match run_pipeline(&table, &config) {
        Ok(report) => {
            print!("{}", render_report(&report));
            Ok(())
        }
        Err(failure) => Err(Failure::Stage(failure.to_string())),
    }
}

fn gen_random(
    level: i64,
    weight: i64,
    bound: i64,
    seed: u64,
    output: &Option<PathBuf>,
) -> Result<(), Failure> {
    if level < 1 || weight < 2 || bound < 1 {
        return Err(Failure::Invariant(format!(
            "need level >= 1, weight >= 2, bound >= 1; got N={level} k={weight} B={bound}"
        )));
    }
    let table = random_symmetrized_table(level, weight, bound, bound, seed);
    write_output(output, &serialize_table(&table))
}
