//! Line-oriented text formats for tables, slices and q-series.
//!
//! Parsing is lenient: keys may come in any order, rationals may be
//! unreduced or bare integers, `#` starts a comment anywhere.  Emission
//! is strict: records sorted canonically, rationals reduced with an
//! explicit denominator, so one parse and serialize pass canonicalizes
//! a file and the formats stay diff-friendly.
//!
//! Headers: `PFES 1 N=.. k=.. B=.. CB=..` for coefficient tables with
//! optional `EPS` and `LAMBDA` metadata lines, `PFJS 1` for slices,
//! `PFQS 1` for q-series with `CHI` component lines.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use crate::character::{unit_group_generator, CharComponent, DirichletCharacter, UnityRoot};
use crate::fourier::{FourierTable, JacobiSlice, QuadIndex};
use crate::halfint::QSeries;
use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IoError {
    /// Malformed text, with 1-based line and column.
    Parse { line: usize, column: usize, message: String },
    /// Well-formed text describing an invalid object.
    Invariant { line: usize, rule: String },
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Parse { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            IoError::Invariant { line, rule } => {
                write!(f, "invariant violated at line {line}: {rule}")
            }
        }
    }
}

impl std::error::Error for IoError {}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> IoError {
    IoError::Parse { line, column, message: message.into() }
}

fn invariant_err(line: usize, rule: impl Into<String>) -> IoError {
    IoError::Invariant { line, rule: rule.into() }
}

/// Tokens of one line with their 1-based starting columns, comments
/// stripped.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &body[s..]));
    }
    out
}

fn parse_i64(lineno: usize, col: usize, text: &str) -> Result<i64, IoError> {
    text.parse::<i64>()
        .map_err(|_| parse_err(lineno, col, format!("expected an integer, got `{text}`")))
}

fn parse_rational(lineno: usize, col: usize, text: &str) -> Result<Rational, IoError> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let bad = |part: &str| parse_err(lineno, col, format!("expected a rational, got `{text}` ({part})"));
    let num: BigInt = num.parse().map_err(|_| bad("numerator"))?;
    let den: BigInt = den.parse().map_err(|_| bad("denominator"))?;
    if den.is_zero() {
        return Err(parse_err(lineno, col, "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Splits `key=value` and checks the key.
fn keyed<'a>(lineno: usize, col: usize, token: &'a str, key: &str) -> Result<&'a str, IoError> {
    match token.split_once('=') {
        Some((k, v)) if k == key => Ok(v),
        _ => Err(parse_err(lineno, col, format!("expected `{key}=...`, got `{token}`"))),
    }
}

fn format_rational(v: &Rational) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Parses the `PFES` coefficient table format.
pub fn parse_table(text: &str) -> Result<FourierTable, IoError> {
    let mut table: Option<FourierTable> = None;
    let mut seen: std::collections::BTreeSet<(i64, i64, i64)> = std::collections::BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let table = match (toks[0].1, &mut table) {
            ("PFES", Some(_)) => {
                return Err(parse_err(lineno, toks[0].0, "duplicate header"));
            }
            ("PFES", none) => {
                if toks.len() != 6 {
                    return Err(parse_err(
                        lineno,
                        toks[0].0,
                        "header needs `PFES 1 N=.. k=.. B=.. CB=..`",
                    ));
                }
                if toks[1].1 != "1" {
                    return Err(parse_err(lineno, toks[1].0, "unsupported format version"));
                }
                let mut fields: BTreeMap<&str, (usize, i64)> = BTreeMap::new();
                for &(col, tok) in &toks[2..] {
                    let (key, value) = tok
                        .split_once('=')
                        .ok_or_else(|| parse_err(lineno, col, format!("expected `key=value`, got `{tok}`")))?;
                    if !["N", "k", "B", "CB"].contains(&key) || fields.contains_key(key) {
                        return Err(parse_err(lineno, col, format!("unexpected header key `{key}`")));
                    }
                    fields.insert(key, (col, parse_i64(lineno, col, value)?));
                }
                let get = |key: &str| fields.get(key).copied().expect("all four keys present");
                if fields.len() != 4 {
                    return Err(parse_err(lineno, toks[0].0, "header is missing a key"));
                }
                let (_, level) = get("N");
                let (_, weight) = get("k");
                let (_, bound) = get("B");
                let (_, certified) = get("CB");
                if level < 1 {
                    return Err(invariant_err(lineno, format!("level {level} must be positive")));
                }
                if weight < 2 {
                    return Err(invariant_err(lineno, format!("weight {weight} must be at least 2")));
                }
                if bound < 1 || !(1..=bound).contains(&certified) {
                    return Err(invariant_err(
                        lineno,
                        format!("bounds B={bound}, CB={certified} must satisfy 1 <= CB <= B"),
                    ));
                }
                none.insert(FourierTable::new(level, weight, bound, certified))
            }
            (_, None) => {
                return Err(parse_err(lineno, toks[0].0, "missing `PFES 1 ...` header"));
            }
            (_, Some(t)) => t,
        };
        match toks[0].1 {
            "PFES" => {}
            s if s.starts_with("EPS=") => {
                if toks.len() != 1 {
                    return Err(parse_err(lineno, toks[0].0, "EPS line takes no extra tokens"));
                }
                let value = keyed(lineno, toks[0].0, toks[0].1, "EPS")?;
                let eps = match value {
                    "+1" | "1" => 1,
                    "-1" => -1,
                    _ => return Err(parse_err(lineno, toks[0].0, "EPS must be +1 or -1")),
                };
                if table.eps.replace(eps).is_some() {
                    return Err(invariant_err(lineno, "duplicate EPS line"));
                }
            }
            "LAMBDA" => {
                if toks.len() != 3 {
                    return Err(parse_err(lineno, toks[0].0, "expected `LAMBDA p=<prime> <rational>`"));
                }
                let p = parse_i64(lineno, toks[1].0, keyed(lineno, toks[1].0, toks[1].1, "p")?)?;
                let value = parse_rational(lineno, toks[2].0, toks[2].1)?;
                if table.eigenvalues.insert(p, value).is_some() {
                    return Err(invariant_err(lineno, format!("duplicate LAMBDA line for p={p}")));
                }
            }
            _ => {
                if toks.len() != 4 {
                    return Err(parse_err(lineno, toks[0].0, "record needs `n r mN num/den`"));
                }
                let n = parse_i64(lineno, toks[0].0, toks[0].1)?;
                let r = parse_i64(lineno, toks[1].0, toks[1].1)?;
                let mn = parse_i64(lineno, toks[2].0, toks[2].1)?;
                let value = parse_rational(lineno, toks[3].0, toks[3].1)?;
                if !seen.insert((n, r, mn)) {
                    return Err(invariant_err(lineno, format!("duplicate record ({n}, {r}, {mn})")));
                }
                let idx = QuadIndex::new(n, r, mn, table.level())
                    .map_err(|e| invariant_err(lineno, e.to_string()))?;
                table.insert(idx, value).map_err(|e| invariant_err(lineno, e.to_string()))?;
            }
        }
    }
    table.ok_or_else(|| parse_err(1, 1, "empty input"))
}

/// Emits the canonical `PFES` form: header, metadata, then records
/// sorted by (|disc|, n, r, mN).
pub fn serialize_table(table: &FourierTable) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "PFES 1 N={} k={} B={} CB={}",
        table.level(),
        table.weight(),
        table.disc_bound(),
        table.certified_bound()
    )
    .unwrap();
    if let Some(eps) = table.eps {
        writeln!(out, "EPS={}", if eps >= 0 { "+1" } else { "-1" }).unwrap();
    }
    for (p, value) in &table.eigenvalues {
        writeln!(out, "LAMBDA p={} {}", p, format_rational(value)).unwrap();
    }
    for (idx, value) in table.iter() {
        writeln!(out, "{} {} {} {}", idx.n(), idx.r(), idx.mn(), format_rational(value)).unwrap();
    }
    out
}

/// Parses the `PFJS` Fourier-Jacobi slice format.
pub fn parse_slice(text: &str) -> Result<JacobiSlice, IoError> {
    let mut slice: Option<JacobiSlice> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        match (toks[0].1, &mut slice) {
            ("PFJS", Some(_)) => return Err(parse_err(lineno, toks[0].0, "duplicate header")),
            ("PFJS", none) => {
                if toks.len() != 7 || toks[1].1 != "1" {
                    return Err(parse_err(
                        lineno,
                        toks[0].0,
                        "header needs `PFJS 1 m=.. k=.. N=.. B=.. Z=..`",
                    ));
                }
                let index = parse_i64(lineno, toks[2].0, keyed(lineno, toks[2].0, toks[2].1, "m")?)?;
                let weight = parse_i64(lineno, toks[3].0, keyed(lineno, toks[3].0, toks[3].1, "k")?)?;
                let level = parse_i64(lineno, toks[4].0, keyed(lineno, toks[4].0, toks[4].1, "N")?)?;
                let bound = parse_i64(lineno, toks[5].0, keyed(lineno, toks[5].0, toks[5].1, "B")?)?;
                let zero = match keyed(lineno, toks[6].0, toks[6].1, "Z")? {
                    "0" => false,
                    "1" => true,
                    _ => return Err(parse_err(lineno, toks[6].0, "Z must be 0 or 1")),
                };
                if index < 1 {
                    return Err(invariant_err(lineno, format!("slice index {index} must be positive")));
                }
                if level < 1 {
                    return Err(invariant_err(lineno, format!("level {level} must be positive")));
                }
                if bound < 1 {
                    return Err(invariant_err(lineno, format!("bound {bound} must be positive")));
                }
                *none = Some(JacobiSlice {
                    index,
                    weight,
                    level,
                    bound,
                    structurally_zero: zero,
                    coeffs: BTreeMap::new(),
                });
            }
            (_, None) => return Err(parse_err(lineno, toks[0].0, "missing `PFJS 1 ...` header")),
            (_, Some(slice)) => {
                if toks.len() != 3 {
                    return Err(parse_err(lineno, toks[0].0, "record needs `n r num/den`"));
                }
                let n = parse_i64(lineno, toks[0].0, toks[0].1)?;
                let r = parse_i64(lineno, toks[1].0, toks[1].1)?;
                let value = parse_rational(lineno, toks[2].0, toks[2].1)?;
                if slice.coeffs.contains_key(&(n, r)) {
                    return Err(invariant_err(lineno, format!("duplicate record ({n}, {r})")));
                }
                if slice.structurally_zero && !value.is_zero() {
                    return Err(invariant_err(lineno, "structurally zero slice with a nonzero record"));
                }
                if !value.is_zero() {
                    slice.coeffs.insert((n, r), value);
                }
            }
        }
    }
    slice.ok_or_else(|| parse_err(1, 1, "empty input"))
}

/// Emits the canonical `PFJS` form.
pub fn serialize_slice(slice: &JacobiSlice) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "PFJS 1 m={} k={} N={} B={} Z={}",
        slice.index,
        slice.weight,
        slice.level,
        slice.bound,
        if slice.structurally_zero { 1 } else { 0 }
    )
    .unwrap();
    for (&(n, r), value) in &slice.coeffs {
        writeln!(out, "{} {} {}", n, r, format_rational(value)).unwrap();
    }
    out
}

fn parse_unity_root(lineno: usize, col: usize, text: &str) -> Result<UnityRoot, IoError> {
    let (num, den) = text
        .split_once('/')
        .ok_or_else(|| parse_err(lineno, col, format!("expected `num/den`, got `{text}`")))?;
    let num = parse_i64(lineno, col, num)?;
    let den = parse_i64(lineno, col, den)?;
    if den < 1 {
        return Err(parse_err(lineno, col, "root order must be positive"));
    }
    Ok(UnityRoot::new(num, den))
}

fn format_unity_root(v: &UnityRoot) -> String {
    format!("{}/{}", v.numerator(), v.order())
}

/// Parses one `CHI` component line body (after the `CHI` token).
fn parse_chi_component(lineno: usize, toks: &[(usize, &str)]) -> Result<CharComponent, IoError> {
    if toks.len() < 2 {
        return Err(parse_err(lineno, 1, "CHI line needs `CHI <p> <e> <values...>`"));
    }
    let p = parse_i64(lineno, toks[0].0, toks[0].1)?;
    let e = parse_i64(lineno, toks[1].0, toks[1].1)?;
    if e < 1 || e > 62 {
        return Err(invariant_err(lineno, format!("component exponent {e} out of range")));
    }
    let e = e as u32;
    let component = if p == 2 {
        match toks.len() {
            2 if e == 1 => Ok(CharComponent::trivial(2, 1)),
            4 => {
                let m1 = parse_unity_root(lineno, toks[2].0, toks[2].1)?;
                let f5 = parse_unity_root(lineno, toks[3].0, toks[3].1)?;
                CharComponent::two_power(e, m1, f5)
                    .map_err(|err| invariant_err(lineno, err.to_string()))
            }
            _ => return Err(parse_err(lineno, toks[0].0, "CHI 2 line needs two root values")),
        }
    } else {
        if toks.len() != 3 {
            return Err(parse_err(lineno, toks[0].0, "CHI line needs one root value"));
        }
        let value = parse_unity_root(lineno, toks[2].0, toks[2].1)?;
        CharComponent::odd_prime_power(p, e, value).map_err(|err| invariant_err(lineno, err.to_string()))
    };
    component
}

fn serialize_chi_lines(chi: &DirichletCharacter, out: &mut String) {
    for c in chi.components() {
        if c.prime() == 2 {
            if c.power() == 1 {
                writeln!(out, "CHI 2 1").unwrap();
            } else {
                let at_minus_one = c.eval(c.modulus() - 1).expect("-1 is a unit");
                let at_five = if c.power() >= 3 {
                    c.eval(5).expect("5 is a unit")
                } else {
                    UnityRoot::one()
                };
                writeln!(
                    out,
                    "CHI 2 {} {} {}",
                    c.power(),
                    format_unity_root(&at_minus_one),
                    format_unity_root(&at_five)
                )
                .unwrap();
            }
        } else {
            let g = unit_group_generator(c.prime(), c.power());
            let value = c.eval(g).expect("the generator is a unit");
            writeln!(out, "CHI {} {} {}", c.prime(), c.power(), format_unity_root(&value)).unwrap();
        }
    }
}

/// Parses the `PFQS` q-series format.
pub fn parse_qseries(text: &str) -> Result<QSeries, IoError> {
    struct Pending {
        weight_k: i64,
        half: bool,
        level: i64,
        bound: i64,
        components: Vec<CharComponent>,
        records: Vec<(usize, i64, Rational)>,
        header_line: usize,
    }
    let mut pending: Option<Pending> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        match (toks[0].1, &mut pending) {
            ("PFQS", Some(_)) => return Err(parse_err(lineno, toks[0].0, "duplicate header")),
            ("PFQS", none) => {
                if toks.len() != 6 || toks[1].1 != "1" {
                    return Err(parse_err(
                        lineno,
                        toks[0].0,
                        "header needs `PFQS 1 k=.. half=.. level=.. B=..`",
                    ));
                }
                let weight_k = parse_i64(lineno, toks[2].0, keyed(lineno, toks[2].0, toks[2].1, "k")?)?;
                let half = match keyed(lineno, toks[3].0, toks[3].1, "half")? {
                    "0" => false,
                    "1" => true,
                    _ => return Err(parse_err(lineno, toks[3].0, "half must be 0 or 1")),
                };
                let level = parse_i64(lineno, toks[4].0, keyed(lineno, toks[4].0, toks[4].1, "level")?)?;
                let bound = parse_i64(lineno, toks[5].0, keyed(lineno, toks[5].0, toks[5].1, "B")?)?;
                if bound < 0 {
                    return Err(invariant_err(lineno, format!("bound {bound} must not be negative")));
                }
                *none = Some(Pending {
                    weight_k,
                    half,
                    level,
                    bound,
                    components: Vec::new(),
                    records: Vec::new(),
                    header_line: lineno,
                });
            }
            (_, None) => return Err(parse_err(lineno, toks[0].0, "missing `PFQS 1 ...` header")),
            ("CHI", Some(p)) => {
                p.components.push(parse_chi_component(lineno, &toks[1..])?);
            }
            (_, Some(p)) => {
                if toks.len() != 2 {
                    return Err(parse_err(lineno, toks[0].0, "record needs `D num/den`"));
                }
                let d = parse_i64(lineno, toks[0].0, toks[0].1)?;
                let value = parse_rational(lineno, toks[1].0, toks[1].1)?;
                if p.records.iter().any(|(_, seen, _)| *seen == d) {
                    return Err(invariant_err(lineno, format!("duplicate record D={d}")));
                }
                p.records.push((lineno, d, value));
            }
        }
    }
    let p = pending.ok_or_else(|| parse_err(1, 1, "empty input"))?;
    let chi = DirichletCharacter::from_components(p.components)
        .map_err(|err| invariant_err(p.header_line, err.to_string()))?;
    let mut series = QSeries::new(p.weight_k, p.half, p.level, chi, p.bound)
        .map_err(|err| invariant_err(p.header_line, err.to_string()))?;
    for (lineno, d, value) in p.records {
        series.insert(d, value).map_err(|err| invariant_err(lineno, err.to_string()))?;
    }
    Ok(series)
}

/// Emits the canonical `PFQS` form.
pub fn serialize_qseries(series: &QSeries) -> String {
    let (k, half) = series.weight();
    let mut out = String::new();
    writeln!(
        out,
        "PFQS 1 k={} half={} level={} B={}",
        k,
        if half { 1 } else { 0 },
        series.level(),
        series.bound()
    )
    .unwrap();
    serialize_chi_lines(series.character(), &mut out);
    for (d, value) in series.iter() {
        writeln!(out, "{} {}", d, format_rational(value)).unwrap();
    }
    out
}

/// Parses a character selection: `trivial`, `trivial:<mod>`, or a
/// comma-separated product of `q:<index>` odd-character picks and
/// `kron:<m>` Kronecker factors.
pub fn parse_char_config(text: &str) -> Result<DirichletCharacter, IoError> {
    let fail = |message: String| parse_err(1, 1, message);
    let invalid = |err: crate::character::CharError| invariant_err(1, err.to_string());
    let text = text.trim();
    if text.is_empty() || text == "trivial" {
        return DirichletCharacter::trivial(1).map_err(invalid);
    }
    let mut chi = DirichletCharacter::trivial(1).map_err(invalid)?;
    for part in text.split(',') {
        let part = part.trim();
        let (head, tail) = part
            .split_once(':')
            .ok_or_else(|| fail(format!("expected `q:index`, `kron:m` or `trivial:m`, got `{part}`")))?;
        let factor = match head {
            "trivial" => {
                let m: i64 = tail.parse().map_err(|_| fail(format!("bad modulus `{tail}`")))?;
                DirichletCharacter::trivial(m).map_err(invalid)?
            }
            "kron" => {
                let m: i64 = tail.parse().map_err(|_| fail(format!("bad Kronecker top `{tail}`")))?;
                DirichletCharacter::kronecker(m).map_err(invalid)?
            }
            _ => {
                let q: i64 = head.parse().map_err(|_| fail(format!("bad prime `{head}`")))?;
                let index: i64 = tail.parse().map_err(|_| fail(format!("bad index `{tail}`")))?;
                DirichletCharacter::odd_character_mod(q, index).map_err(invalid)?
            }
        };
        chi = chi.mul(&factor);
    }
    Ok(chi)
}
