//! Coefficient relations for the two operators acting on level-N tables:
//! the ramified-prime operator at an odd prime p dividing N exactly once,
//! and the good-prime operator at a prime p coprime to N.
//!
//! The ramified relation is implemented twice on purpose.  `up_apply`
//! evaluates the closed-form expression term by term; `up_oracle` slashes
//! every stored term by all p^3 + 2p^2 + p coset representatives from
//! `groups::build_up_cosets` and collects the root-of-unity sums exactly.
//! The two paths share no term-assembly code, so exact agreement between
//! them is a meaningful check of both.
//!
//! Reading conventions used throughout: a coefficient read at a matrix
//! that is not half-integral, not positive, or whose bottom-right entry
//! is not divisible by the level counts as zero.  Each family's
//! divisibility gate holds automatically at every integral argument, so
//! the implementation only checks integrality and level support.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};

pub use crate::arith::AlphaBeta;
use crate::arith::{crt, ext_gcd, factor, gcd_i64, is_prime};
use crate::fourier::{slash_term, FourierTable, QuadIndex};
use crate::groups::{build_up_cosets, check_level, GroupError};
use crate::rational::{pow_i64, rat, to_f64, to_i64, Rational};

#[derive(Debug, Clone, PartialEq)]
pub enum HeckeError {
    /// The prime does not fit the level in the way the mode requires.
    BadLevel { p: i64, level: i64 },
    /// Weights below 2 are outside every contract in this module.
    WeightTooSmall { weight: i64 },
    /// Table level does not match the parameter level.
    LevelMismatch { expected: i64, got: i64 },
    /// Table weight does not match the parameter weight.
    WeightMismatch { expected: i64, got: i64 },
    /// Parameters were built for the other operator.
    ModeMismatch { expected: HeckeMode, got: HeckeMode },
    /// A slash phase fell outside (1/p)Z, which the coset families never
    /// produce; signals corrupted representatives.
    PhaseDenominator { phase: Rational, p: i64 },
    /// No representative set available for the good-prime operator.
    EmptyReps,
    /// A supplied representative set is unusable.
    BadRep { reason: String },
    /// The table vanishes on its certified range.
    ZeroForm,
}

impl fmt::Display for HeckeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeckeError::BadLevel { p, level } => {
                write!(f, "prime {p} does not fit level {level} for this operator")
            }
            HeckeError::WeightTooSmall { weight } => write!(f, "weight {weight} is below 2"),
            HeckeError::LevelMismatch { expected, got } => {
                write!(f, "table level {got} does not match parameter level {expected}")
            }
            HeckeError::WeightMismatch { expected, got } => {
                write!(f, "table weight {got} does not match parameter weight {expected}")
            }
            HeckeError::ModeMismatch { expected, got } => {
                write!(f, "parameters are for {got:?}, operation needs {expected:?}")
            }
            HeckeError::PhaseDenominator { phase, p } => {
                write!(f, "slash phase {phase} is not a multiple of 1/{p}")
            }
            HeckeError::EmptyReps => write!(f, "no representative set for the good-prime sum"),
            HeckeError::BadRep { reason } => write!(f, "bad representative set: {reason}"),
            HeckeError::ZeroForm => write!(f, "table vanishes on its certified range"),
        }
    }
}

impl std::error::Error for HeckeError {}

impl From<GroupError> for HeckeError {
    fn from(e: GroupError) -> HeckeError {
        match e {
            GroupError::BadLevel { p, level } => HeckeError::BadLevel { p, level },
        }
    }
}

/// Which operator a parameter set drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeckeMode {
    /// Ramified prime, p divides the level exactly once.
    Up,
    /// Good prime, p coprime to the level.
    TpPlusTp2,
}

/// Validated parameters for one operator application.
#[derive(Debug, Clone)]
pub struct HeckeParams {
    p: i64,
    level: i64,
    weight: i64,
    mode: HeckeMode,
    reps: Vec<[[i64; 2]; 2]>,
}

impl HeckeParams {
    /// Parameters for the ramified-prime operator; requires an odd prime
    /// dividing the level exactly once and weight at least 2.
    pub fn up(p: i64, level: i64, weight: i64) -> Result<HeckeParams, HeckeError> {
        check_level(p, level)?;
        if weight < 2 {
            return Err(HeckeError::WeightTooSmall { weight });
        }
        Ok(HeckeParams { p, level, weight, mode: HeckeMode::Up, reps: Vec::new() })
    }

    /// Parameters for the good-prime operator with the default
    /// representative set.
    pub fn tp(p: i64, level: i64, weight: i64) -> Result<HeckeParams, HeckeError> {
        let reps = default_tp_reps(p, level)?;
        HeckeParams::tp_with_reps(p, level, weight, reps)
    }

    /// Parameters for the good-prime operator with a caller-chosen
    /// representative set: p + 1 integer matrices of determinant one
    /// whose bottom rows cover the projective line over Z/pZ.
    pub fn tp_with_reps(
        p: i64,
        level: i64,
        weight: i64,
        reps: Vec<[[i64; 2]; 2]>,
    ) -> Result<HeckeParams, HeckeError> {
        if p < 2 || !is_prime(p as u64) || level < 1 || level % p == 0 {
            return Err(HeckeError::BadLevel { p, level });
        }
        if weight < 2 {
            return Err(HeckeError::WeightTooSmall { weight });
        }
        if reps.is_empty() {
            return Err(HeckeError::EmptyReps);
        }
        if reps.len() != (p + 1) as usize {
            return Err(HeckeError::BadRep {
                reason: format!("expected {} representatives, got {}", p + 1, reps.len()),
            });
        }
        let mut classes = BTreeSet::new();
        for m in &reps {
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            if det != 1 {
                return Err(HeckeError::BadRep {
                    reason: format!("representative {m:?} has determinant {det}"),
                });
            }
            let (c, d) = (m[1][0].rem_euclid(p), m[1][1].rem_euclid(p));
            let class = if c == 0 { (0, 1) } else { (1, d * crate::arith::inv_mod(c, p) % p) };
            if !classes.insert(class) {
                return Err(HeckeError::BadRep {
                    reason: format!("representative {m:?} repeats a residue class"),
                });
            }
        }
        Ok(HeckeParams { p, level, weight, mode: HeckeMode::TpPlusTp2, reps })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn mode(&self) -> HeckeMode {
        self.mode
    }

    pub fn reps(&self) -> &[[[i64; 2]; 2]] {
        &self.reps
    }
}

/// The default representative set for the good-prime sum: the p shears
/// [[1,0],[j,1]] together with one matrix W of determinant one that is
/// [[0,-1],[1,0]] mod p and the identity mod the level.
pub fn default_tp_reps(p: i64, level: i64) -> Result<Vec<[[i64; 2]; 2]>, HeckeError> {
    if p < 2 || !is_prime(p as u64) || level < 1 || level % p == 0 {
        return Err(HeckeError::BadLevel { p, level });
    }
    let mut reps = Vec::with_capacity(p as usize + 1);
    for j in 0..p {
        reps.push([[1, 0], [j, 1]]);
    }
    let c = crt(1, p, 0, level);
    let mut d = crt(0, p, 1, level);
    while gcd_i64(c, d) != 1 {
        d += p * level;
    }
    let (g, x, y) = ext_gcd(d, c);
    debug_assert_eq!(g, 1);
    let (a0, b0) = (x, -y);
    debug_assert_eq!(a0 * d - b0 * c, 1);
    let s = crt((-a0).rem_euclid(p), p, (-b0).rem_euclid(level), level);
    let w = [[a0 + s * c, b0 + s * d], [c, d]];
    debug_assert_eq!(w[0][0] * w[1][1] - w[0][1] * w[1][0], 1);
    reps.push(w);
    Ok(reps)
}

/// Certified bound of an output table.  The relations read arguments at
/// p times the output index, so certainty shrinks by p^2, floored at the
/// table minimum of 1.
pub fn up_certified_bound(certified: i64, p: i64) -> i64 {
    (certified / (p * p)).max(1)
}

fn check_table(f: &FourierTable, params: &HeckeParams, mode: HeckeMode) -> Result<(), HeckeError> {
    if params.mode != mode {
        return Err(HeckeError::ModeMismatch { expected: mode, got: params.mode });
    }
    if f.level() != params.level {
        return Err(HeckeError::LevelMismatch { expected: params.level, got: f.level() });
    }
    if f.weight() != params.weight {
        return Err(HeckeError::WeightMismatch { expected: params.weight, got: f.weight() });
    }
    Ok(())
}

/// V * S * transpose(V) on (n, r, mn) triples, for an integer matrix V.
fn sandwich(v: [[i64; 2]; 2], n: i128, r: i128, mn: i128) -> (i128, i128, i128) {
    let (a, b) = (v[0][0] as i128, v[0][1] as i128);
    let (c, d) = (v[1][0] as i128, v[1][1] as i128);
    (
        a * a * n + a * b * r + b * b * mn,
        2 * a * c * n + (a * d + b * c) * r + 2 * b * d * mn,
        c * c * n + c * d * r + d * d * mn,
    )
}

fn triple(t: &QuadIndex) -> (i128, i128, i128) {
    (t.n() as i128, t.r() as i128, t.mn() as i128)
}

fn idx_from_i128(n: i128, r: i128, mn: i128, level: i64) -> Option<QuadIndex> {
    let n = i64::try_from(n).ok()?;
    let r = i64::try_from(r).ok()?;
    let mn = i64::try_from(mn).ok()?;
    QuadIndex::new(n, r, mn, level).ok()
}

/// The index of the triple divided by p, when the quotient is a valid
/// index of the level; `None` marks a convention-zero read.
fn quotient_idx(trip: (i128, i128, i128), p: i128, level: i64) -> Option<QuadIndex> {
    let (n, r, mn) = trip;
    if n % p != 0 || r % p != 0 || mn % p != 0 {
        return None;
    }
    idx_from_i128(n / p, r / p, mn / p, level)
}

fn read(f: &FourierTable, idx: Option<QuadIndex>) -> Rational {
    idx.map(|i| f.coeff(&i)).unwrap_or_else(Rational::zero)
}

/// The ramified relation evaluated at one output index.
fn up_value_at(f: &FourierTable, t: &QuadIndex, params: &HeckeParams, ab: &AlphaBeta) -> Rational {
    let (p, level, k) = (params.p, params.level, params.weight);
    let p_ = p as i128;
    let (n, r, mn) = triple(t);
    let d = t.disc();

    let mut acc = pow_i64(&rat(p), 3 - k) * read(f, idx_from_i128(n * p_, r * p_, mn * p_, level));
    acc += pow_i64(&rat(p), k) * read(f, quotient_idx((n, r, mn), p_, level));

    let m = [[ab.alpha * p, 1], [-level * ab.beta, p]];
    let marg = sandwich(m, n, r, mn);
    debug_assert_eq!(marg.1 * marg.1 - 4 * marg.0 * marg.2, p_ * p_ * d);
    let mcoef = if r % p_ == 0 { rat(p - 1) } else { rat(-1) };
    acc += mcoef * read(f, quotient_idx(marg, p_, level));

    let mut shear = Rational::zero();
    let mut flip = Rational::zero();
    for b in 0..p {
        let sarg = sandwich([[1, b], [0, p]], n, r, mn);
        debug_assert_eq!(sarg.1 * sarg.1 - 4 * sarg.0 * sarg.2, p_ * p_ * d);
        shear += read(f, quotient_idx(sarg, p_, level));
        let farg = sandwich([[p, 0], [-b * level, -1]], n, r, mn);
        debug_assert_eq!(farg.1 * farg.1 - 4 * farg.0 * farg.2, p_ * p_ * d);
        flip += read(f, quotient_idx(farg, p_, level));
    }
    acc += rat(p) * shear;
    let sign = if k % 2 == 0 { p } else { -p };
    acc + rat(sign) * flip
}

/// Applies the ramified-prime relation to every reachable output index.
pub fn up_apply(f: &FourierTable, params: &HeckeParams) -> Result<FourierTable, HeckeError> {
    check_table(f, params, HeckeMode::Up)?;
    let (p, level) = (params.p, params.level);
    let p_ = p as i128;
    let ab = AlphaBeta::for_level(p, level).ok_or(HeckeError::BadLevel { p, level })?;
    let bound = f.disc_bound() as i128;

    // Outputs that can read a stored coefficient: preimages of the five
    // term maps over the present keys.
    let inverse_maps: Vec<[[i64; 2]; 2]> = {
        let mut v = vec![[[p, -1], [level * ab.beta, ab.alpha * p]]];
        for b in 0..p {
            v.push([[p, -b], [0, 1]]);
            v.push([[1, 0], [-b * level, -p]]);
        }
        v
    };
    let mut candidates: BTreeSet<QuadIndex> = BTreeSet::new();
    for (s, _) in f.iter() {
        if let Some(t) = s.divided_by(p) {
            candidates.insert(t);
        }
        if p_ * p_ * s.abs_disc() <= bound {
            candidates.insert(s.scaled(p));
        }
        let (n, r, mn) = triple(s);
        for v in &inverse_maps {
            if let Some(t) = quotient_idx(sandwich(*v, n, r, mn), p_, level) {
                debug_assert_eq!(t.disc(), s.disc());
                candidates.insert(t);
            }
        }
    }

    let mut out = FourierTable::new(
        level,
        params.weight,
        f.disc_bound(),
        up_certified_bound(f.certified_bound(), p),
    );
    for t in candidates {
        let val = up_value_at(f, &t, params, &ab);
        out.insert(t, val).expect("candidate index stays inside the carrier bound");
    }
    Ok(out)
}

fn bucket_key(index: &crate::mat::Mat2) -> (Rational, Rational, Rational) {
    (
        index.at(0, 0).clone(),
        index.at(0, 1) * rat(2),
        index.at(1, 1).clone(),
    )
}

/// Applies the same operator by slashing every stored term with all
/// coset representatives and summing the resulting root-of-unity series.
/// A series sums to a rational exactly when all nonzero residue classes
/// mod p carry equal weight c, giving c_0 - c.
pub fn up_oracle(f: &FourierTable, params: &HeckeParams) -> Result<FourierTable, HeckeError> {
    check_table(f, params, HeckeMode::Up)?;
    let p = params.p;
    let reps = build_up_cosets(p, params.level)?;

    let mut buckets: BTreeMap<(Rational, Rational, Rational), Vec<Rational>> = BTreeMap::new();
    for (s, a_s) in f.iter() {
        let smat = s.matrix();
        for rep in &reps {
            let st = slash_term(&smat, &rep.final_rep, params.weight)
                .expect("coset representatives are block upper triangular");
            let ph = &st.phase * rat(p);
            let j = to_i64(&ph)
                .ok_or(HeckeError::PhaseDenominator { phase: st.phase.clone(), p })?;
            let slots = buckets
                .entry(bucket_key(&st.index))
                .or_insert_with(|| vec![Rational::zero(); p as usize]);
            slots[j.rem_euclid(p) as usize] += a_s * &st.scale;
        }
    }

    let mut out = FourierTable::new(
        params.level,
        params.weight,
        f.disc_bound(),
        up_certified_bound(f.certified_bound(), p),
    );
    for ((n, r, mn), slots) in buckets {
        for j in 2..slots.len() {
            assert_eq!(
                slots[j], slots[1],
                "residue classes must carry equal weight for a rational total"
            );
        }
        let value = &slots[0] - &slots[1];
        if value.is_zero() {
            continue;
        }
        let n = to_i64(&n).expect("nonzero total at a non-integral index");
        let r = to_i64(&r).expect("nonzero total at a non-integral index");
        let mn = to_i64(&mn).expect("nonzero total at a non-integral index");
        let idx = QuadIndex::new(n, r, mn, params.level)
            .expect("nonzero total at an index outside the level support");
        if idx.abs_disc() <= f.disc_bound() as i128 {
            out.insert(idx, value).expect("index checked against the carrier bound");
        }
    }
    Ok(out)
}

/// One coefficient of the floating-point coset sum.
#[derive(Debug, Clone, Copy)]
pub struct FloatCoeff {
    /// Real part of the accumulated sum.
    pub re: f64,
    /// Imaginary residue; should vanish up to rounding.
    pub im: f64,
    /// Largest single term magnitude, for scaling deviations.
    pub scale: f64,
}

/// The coset sum of `up_oracle` with literal complex phases in floating
/// point, keyed by the exact output triple (n, r, mn).
pub fn up_oracle_float(
    f: &FourierTable,
    params: &HeckeParams,
) -> Result<BTreeMap<(Rational, Rational, Rational), FloatCoeff>, HeckeError> {
    check_table(f, params, HeckeMode::Up)?;
    let reps = build_up_cosets(params.p, params.level)?;
    let mut out: BTreeMap<(Rational, Rational, Rational), FloatCoeff> = BTreeMap::new();
    for (s, a_s) in f.iter() {
        let smat = s.matrix();
        for rep in &reps {
            let st = slash_term(&smat, &rep.final_rep, params.weight)
                .expect("coset representatives are block upper triangular");
            let term = to_f64(&(a_s * &st.scale));
            let theta = 2.0 * std::f64::consts::PI * to_f64(&st.phase);
            let e = out
                .entry(bucket_key(&st.index))
                .or_insert(FloatCoeff { re: 0.0, im: 0.0, scale: 0.0 });
            e.re += term * theta.cos();
            e.im += term * theta.sin();
            e.scale = e.scale.max(term.abs());
        }
    }
    Ok(out)
}

/// Outcome of comparing the float coset sum with an exact output table.
#[derive(Debug, Clone, Copy)]
pub struct FloatComparison {
    pub compared: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl FloatComparison {
    pub fn ok(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

/// Compares the float-mode sum against the exact output.  Deviations are
/// divided by the largest contributing term (floored at 1), so sums that
/// cancel massively are judged against their working magnitude.  Float
/// buckets beyond the exact table's carrier bound are skipped, matching
/// the exact path's drop rule.
pub fn compare_float_oracle(
    exact: &FourierTable,
    float: &BTreeMap<(Rational, Rational, Rational), FloatCoeff>,
    tolerance: f64,
) -> FloatComparison {
    let bound = rat(exact.disc_bound());
    let mut compared = 0usize;
    let mut max_deviation = 0.0f64;
    let mut seen: BTreeSet<QuadIndex> = BTreeSet::new();
    for ((n, r, mn), fc) in float {
        let disc = r * r - rat(4) * n * mn;
        if disc.abs() > bound {
            continue;
        }
        let expected = match (to_i64(n), to_i64(r), to_i64(mn)) {
            (Some(n), Some(r), Some(mn)) => match QuadIndex::new(n, r, mn, exact.level()) {
                Ok(idx) => {
                    let v = exact.coeff(&idx);
                    seen.insert(idx);
                    v
                }
                Err(_) => Rational::zero(),
            },
            _ => Rational::zero(),
        };
        let dev = (fc.re - to_f64(&expected)).abs().max(fc.im.abs()) / fc.scale.max(1.0);
        compared += 1;
        max_deviation = max_deviation.max(dev);
    }
    for (idx, v) in exact.iter() {
        if !seen.contains(idx) {
            compared += 1;
            max_deviation = max_deviation.max(to_f64(v).abs());
        }
    }
    FloatComparison { compared, max_deviation, tolerance }
}

/// The good-prime relation evaluated at one output index.
fn tp_value_at(f: &FourierTable, t: &QuadIndex, params: &HeckeParams) -> Rational {
    let (p, level, k) = (params.p, params.level, params.weight);
    let p_ = p as i128;
    let (n, r, mn) = triple(t);

    let mut acc = read(f, idx_from_i128(n * p_, r * p_, mn * p_, level));
    acc += pow_i64(&rat(p), 2 * k - 3) * read(f, quotient_idx((n, r, mn), p_, level));
    let mut usum = Rational::zero();
    for u in &params.reps {
        let (n1, r1, m1) = sandwich(*u, n, r, mn);
        debug_assert_eq!(r1 * r1 - 4 * n1 * m1, t.disc());
        if n1 % p_ == 0 {
            usum += read(f, idx_from_i128(n1 / p_, r1, p_ * m1, level));
        }
    }
    acc + pow_i64(&rat(p), k - 2) * usum
}

/// Applies the good-prime relation to every reachable output index.
pub fn evdokimov_apply(f: &FourierTable, params: &HeckeParams) -> Result<FourierTable, HeckeError> {
    check_table(f, params, HeckeMode::TpPlusTp2)?;
    if params.reps.is_empty() {
        return Err(HeckeError::EmptyReps);
    }
    let (p, level) = (params.p, params.level);
    let p_ = p as i128;
    let bound = f.disc_bound() as i128;

    let mut candidates: BTreeSet<QuadIndex> = BTreeSet::new();
    for (s, _) in f.iter() {
        if let Some(t) = s.divided_by(p) {
            candidates.insert(t);
        }
        if p_ * p_ * s.abs_disc() <= bound {
            candidates.insert(s.scaled(p));
        }
        if (s.mn() as i128) % p_ == 0 {
            // The U-term reads (n1/p, r1, p m1); invert the scaling and
            // then each U.
            let (n1, r1, m1) = (p_ * s.n() as i128, s.r() as i128, s.mn() as i128 / p_);
            for u in &params.reps {
                let uinv = [[u[1][1], -u[0][1]], [-u[1][0], u[0][0]]];
                let trip = sandwich(uinv, n1, r1, m1);
                if let Some(t) = idx_from_i128(trip.0, trip.1, trip.2, level) {
                    debug_assert_eq!(t.disc(), s.disc());
                    candidates.insert(t);
                }
            }
        }
    }

    let mut out = FourierTable::new(
        level,
        params.weight,
        f.disc_bound(),
        up_certified_bound(f.certified_bound(), p),
    );
    for t in candidates {
        let val = tp_value_at(f, &t, params);
        out.insert(t, val).expect("candidate index stays inside the carrier bound");
    }
    Ok(out)
}

/// Result of solving G = lambda * F across certified coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum Eigenvalue {
    Scalar(Rational),
    Inconsistent { at: QuadIndex, expected: Rational, got: Rational },
}

/// Solves G(T) = lambda * F(T) over the intersection of certified
/// ranges; the pivot is the smallest index where F is nonzero.
pub fn eigenvalue_estimate(f: &FourierTable, g: &FourierTable) -> Result<Eigenvalue, HeckeError> {
    if f.level() != g.level() {
        return Err(HeckeError::LevelMismatch { expected: f.level(), got: g.level() });
    }
    if f.weight() != g.weight() {
        return Err(HeckeError::WeightMismatch { expected: f.weight(), got: g.weight() });
    }
    let cb = f.certified_bound().min(g.certified_bound()) as i128;
    let keys: BTreeSet<&QuadIndex> =
        f.keys().chain(g.keys()).filter(|t| t.abs_disc() <= cb).collect();
    let pivot = keys.iter().find(|t| !f.coeff(t).is_zero()).ok_or(HeckeError::ZeroForm)?;
    let lambda = g.coeff(pivot) / f.coeff(pivot);
    for t in &keys {
        let expected = &lambda * f.coeff(t);
        let got = g.coeff(t);
        if expected != got {
            return Ok(Eigenvalue::Inconsistent { at: (*t).clone(), expected, got });
        }
    }
    Ok(Eigenvalue::Scalar(lambda))
}

/// Which relation a descent step would use at its prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DescentRoute {
    /// p divides the level exactly once.
    Ramified,
    /// p is coprime to the level.
    Unramified,
    /// No single-prime relation applies, or S/p leaves the level support.
    Unavailable,
}

/// Diagnostic for one prime dividing the content of the minimal index.
#[derive(Debug, Clone)]
pub struct DescentStep {
    pub p: i64,
    pub route: DescentRoute,
    /// S/p when that stays a valid index of the level.
    pub quotient: Option<QuadIndex>,
    /// Nonzero stored coefficients among the relation terms at T = S/p,
    /// excluding the term that reads back a(S) itself.  Every such term
    /// sits at |disc| strictly below |disc S|, so a minimal S forces this
    /// list empty on any relation-consistent table.
    pub reads: Vec<(QuadIndex, Rational)>,
}

/// The minimal-|disc| nonzero certified coefficient and its content.
#[derive(Debug, Clone)]
pub struct PrimitiveReport {
    pub index: QuadIndex,
    pub value: Rational,
    pub content: i64,
    pub is_primitive: bool,
    pub descent: Vec<DescentStep>,
}

fn up_relation_reads(f: &FourierTable, t: &QuadIndex, p: i64) -> Vec<(QuadIndex, Rational)> {
    let level = f.level();
    let ab = match AlphaBeta::for_level(p, level) {
        Some(ab) => ab,
        None => return Vec::new(),
    };
    let p_ = p as i128;
    let (n, r, mn) = triple(t);
    let mut seen: BTreeMap<QuadIndex, Rational> = BTreeMap::new();
    let mut note = |idx: Option<QuadIndex>, f: &FourierTable| {
        if let Some(i) = idx {
            if let Some(v) = f.get(&i) {
                seen.insert(i, v.clone());
            }
        }
    };
    note(t.divided_by(p), f);
    let m = [[ab.alpha * p, 1], [-level * ab.beta, p]];
    note(quotient_idx(sandwich(m, n, r, mn), p_, level), f);
    for b in 0..p {
        note(quotient_idx(sandwich([[1, b], [0, p]], n, r, mn), p_, level), f);
        note(quotient_idx(sandwich([[p, 0], [-b * level, -1]], n, r, mn), p_, level), f);
    }
    seen.into_iter().collect()
}

fn tp_relation_reads(f: &FourierTable, t: &QuadIndex, params: &HeckeParams) -> Vec<(QuadIndex, Rational)> {
    let p_ = params.p as i128;
    let (n, r, mn) = triple(t);
    let mut seen: BTreeMap<QuadIndex, Rational> = BTreeMap::new();
    if let Some(i) = t.divided_by(params.p) {
        if let Some(v) = f.get(&i) {
            seen.insert(i, v.clone());
        }
    }
    for u in &params.reps {
        let (n1, r1, m1) = sandwich(*u, n, r, mn);
        if n1 % p_ == 0 {
            if let Some(i) = idx_from_i128(n1 / p_, r1, p_ * m1, f.level()) {
                if let Some(v) = f.get(&i) {
                    seen.insert(i, v.clone());
                }
            }
        }
    }
    seen.into_iter().collect()
}

fn descent_step(f: &FourierTable, s: &QuadIndex, p: i64) -> DescentStep {
    let level = f.level();
    let quotient = s.divided_by(p);
    let (route, reads) = match &quotient {
        None => (DescentRoute::Unavailable, Vec::new()),
        Some(t) => {
            if level % p != 0 {
                match HeckeParams::tp(p, level, f.weight()) {
                    Ok(params) => (DescentRoute::Unramified, tp_relation_reads(f, t, &params)),
                    Err(_) => (DescentRoute::Unavailable, Vec::new()),
                }
            } else if p >= 3 && (level / p) % p != 0 {
                (DescentRoute::Ramified, up_relation_reads(f, t, p))
            } else {
                (DescentRoute::Unavailable, Vec::new())
            }
        }
    };
    DescentStep { p, route, quotient, reads }
}

/// Finds the nonzero certified coefficient of smallest |disc| (ties by
/// (n, r, mn)) and reports its content with a per-prime descent
/// diagnostic.
pub fn find_primitive(f: &FourierTable) -> Result<PrimitiveReport, HeckeError> {
    let cb = f.certified_bound() as i128;
    let s = f.keys().find(|t| t.abs_disc() <= cb).ok_or(HeckeError::ZeroForm)?;
    let content = s.content();
    let mut descent = Vec::new();
    if content > 1 {
        for (q, _) in factor(content as u64) {
            descent.push(descent_step(f, s, q as i64));
        }
    }
    Ok(PrimitiveReport {
        index: s.clone(),
        value: f.coeff(s),
        content,
        is_primitive: content == 1,
        descent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn table(level: i64, weight: i64, bound: i64, entries: &[(i64, i64, i64, i64)]) -> FourierTable {
        let mut f = FourierTable::new(level, weight, bound, bound);
        for &(n, r, mn, v) in entries {
            f.insert(QuadIndex::new(n, r, mn, level).unwrap(), rat(v)).unwrap();
        }
        f
    }

    fn entries(f: &FourierTable) -> Vec<(i64, i64, i64, Rational)> {
        f.iter().map(|(t, v)| (t.n(), t.r(), t.mn(), v.clone())).collect()
    }

    #[test]
    fn params_validation() {
        assert!(HeckeParams::up(3, 3, 2).is_ok());
        assert!(HeckeParams::up(3, 15, 10).is_ok());
        assert!(matches!(HeckeParams::up(2, 6, 2), Err(HeckeError::BadLevel { .. })));
        assert!(matches!(HeckeParams::up(3, 9, 2), Err(HeckeError::BadLevel { .. })));
        assert!(matches!(HeckeParams::up(5, 3, 2), Err(HeckeError::BadLevel { .. })));
        assert!(matches!(HeckeParams::up(3, 3, 1), Err(HeckeError::WeightTooSmall { .. })));

        assert!(HeckeParams::tp(2, 3, 2).is_ok());
        assert!(HeckeParams::tp(5, 1, 2).is_ok());
        assert!(matches!(HeckeParams::tp(3, 3, 2), Err(HeckeError::BadLevel { .. })));
        assert!(matches!(HeckeParams::tp(4, 3, 2), Err(HeckeError::BadLevel { .. })));
        assert!(matches!(
            HeckeParams::tp_with_reps(2, 3, 2, vec![]),
            Err(HeckeError::EmptyReps)
        ));
        assert!(matches!(
            HeckeParams::tp_with_reps(2, 3, 2, vec![[[1, 0], [0, 1]]]),
            Err(HeckeError::BadRep { .. })
        ));
        assert!(matches!(
            HeckeParams::tp_with_reps(
                2,
                3,
                2,
                vec![[[1, 0], [0, 1]], [[1, 0], [1, 1]], [[2, 1], [1, 1]]]
            ),
            Err(HeckeError::BadRep { .. })
        ));
        // [[1,1],[2,3]] repeats the class of [[1,0],[0,1]] (bottom row (0,1) mod 2).
        assert!(matches!(
            HeckeParams::tp_with_reps(
                2,
                3,
                2,
                vec![[[1, 0], [0, 1]], [[1, 0], [1, 1]], [[1, 1], [2, 3]]]
            ),
            Err(HeckeError::BadRep { .. })
        ));
    }

    #[test]
    fn default_reps_structure() {
        let reps = default_tp_reps(2, 3).unwrap();
        assert_eq!(reps, vec![[[1, 0], [0, 1]], [[1, 0], [1, 1]], [[16, 21], [3, 4]]]);
        let reps = default_tp_reps(5, 1).unwrap();
        assert_eq!(*reps.last().unwrap(), [[0, -1], [1, 0]]);
        for (p, level) in [(2, 3), (3, 5), (5, 21), (7, 15), (11, 35)] {
            let reps = default_tp_reps(p, level).unwrap();
            assert_eq!(reps.len(), (p + 1) as usize);
            let w = reps.last().unwrap();
            for row in 0..2 {
                for col in 0..2 {
                    let id = [[1, 0], [0, 1]][row][col];
                    let flip = [[0, -1], [1, 0]][row][col];
                    assert_eq!((w[row][col] - id).rem_euclid(level), 0);
                    assert_eq!((w[row][col] - flip).rem_euclid(p), 0);
                }
            }
            // The full set passes the constructor checks.
            assert!(HeckeParams::tp_with_reps(p, level, 2, reps).is_ok());
        }
    }

    #[test]
    fn certified_bound_shrinks() {
        assert_eq!(up_certified_bound(400, 3), 44);
        assert_eq!(up_certified_bound(9, 3), 1);
        assert_eq!(up_certified_bound(5, 3), 1);
        assert_eq!(up_certified_bound(400, 5), 16);
    }

    #[test]
    fn up_apply_zero_table() {
        let f = table(3, 2, 400, &[]);
        let params = HeckeParams::up(3, 3, 2).unwrap();
        let g = up_apply(&f, &params).unwrap();
        assert!(g.is_empty());
        assert_eq!(g.certified_bound(), 44);
        let h = up_oracle(&f, &params).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn up_apply_delta_at_minimal_index() {
        let f = table(3, 2, 400, &[(1, 1, 3, 1)]);
        let params = HeckeParams::up(3, 3, 2).unwrap();
        let g = up_apply(&f, &params).unwrap();
        assert_eq!(
            entries(&g),
            vec![(3, 5, 3, rat(-1)), (3, 3, 9, rat(9))]
        );
        // The output at the input index itself is zero.
        assert!(g.coeff(&QuadIndex::new(1, 1, 3, 3).unwrap()).is_zero());
        let h = up_oracle(&f, &params).unwrap();
        assert_eq!(entries(&h), entries(&g));
    }

    #[test]
    fn up_apply_delta_with_ramified_scaling() {
        // The input (1,1,9) feeds the b-parameter family: three outputs
        // of the same discriminant plus the scaled pair.
        let f = table(3, 2, 400, &[(1, 1, 9, 1)]);
        let params = HeckeParams::up(3, 3, 2).unwrap();
        let g = up_apply(&f, &params).unwrap();
        assert_eq!(
            entries(&g),
            vec![
                (3, 1, 3, rat(3)),
                (5, -5, 3, rat(3)),
                (5, 5, 3, rat(-1)),
                (13, -11, 3, rat(3)),
                (3, 3, 27, rat(9)),
            ]
        );
        let h = up_oracle(&f, &params).unwrap();
        assert_eq!(entries(&h), entries(&g));
    }

    #[test]
    fn up_rejects_mismatched_tables() {
        let params = HeckeParams::up(3, 3, 2).unwrap();
        let f = table(15, 2, 400, &[]);
        assert!(matches!(up_apply(&f, &params), Err(HeckeError::LevelMismatch { .. })));
        let f = table(3, 4, 400, &[]);
        assert!(matches!(up_oracle(&f, &params), Err(HeckeError::WeightMismatch { .. })));
        let f = table(3, 2, 400, &[]);
        let tp = HeckeParams::tp(2, 3, 2).unwrap();
        assert!(matches!(up_apply(&f, &tp), Err(HeckeError::ModeMismatch { .. })));
        assert!(matches!(evdokimov_apply(&f, &params), Err(HeckeError::ModeMismatch { .. })));
    }

    fn lcg_table(level: i64, weight: i64, bound: i64, seed: u64) -> FourierTable {
        let mut f = FourierTable::new(level, weight, bound, bound);
        let mut x = seed;
        for n in 1..=bound {
            for mn in (level..=4 * bound).step_by(level as usize) {
                let rmax = crate::arith::isqrt((4 * n * mn) as u64) as i64;
                for r in -rmax..=rmax {
                    let disc = r * r - 4 * n * mn;
                    if disc >= 0 || -disc > bound {
                        continue;
                    }
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    if (x >> 40) % 3 != 0 {
                        continue;
                    }
                    let v = ((x >> 33) % 19) as i64 - 9;
                    if v != 0 {
                        f.insert(QuadIndex::new(n, r, mn, level).unwrap(), rat(v)).unwrap();
                    }
                }
            }
        }
        f
    }

    #[test]
    fn up_routes_agree_on_random_tables() {
        for (level, p) in [(3, 3), (15, 3), (15, 5), (35, 5), (35, 7)] {
            for weight in [2, 3] {
                for seed in [1u64, 2] {
                    let f = lcg_table(level, weight, 60, seed);
                    assert!(!f.is_empty());
                    let params = HeckeParams::up(p, level, weight).unwrap();
                    let a = up_apply(&f, &params).unwrap();
                    let b = up_oracle(&f, &params).unwrap();
                    assert_eq!(
                        entries(&a),
                        entries(&b),
                        "routes disagree at level {level}, p {p}, weight {weight}, seed {seed}"
                    );
                    assert_eq!(a.certified_bound(), b.certified_bound());
                }
            }
        }
    }

    #[test]
    fn up_apply_is_linear() {
        let f = lcg_table(15, 2, 60, 5);
        let g = lcg_table(15, 2, 60, 6);
        let mut comb = FourierTable::new(15, 2, 60, 60);
        for (t, v) in f.iter() {
            comb.insert(t.clone(), v * rat(2)).unwrap();
        }
        for (t, v) in g.iter() {
            let cur = comb.coeff(t);
            comb.insert(t.clone(), cur + v * rat(-7)).unwrap();
        }
        let params = HeckeParams::up(3, 15, 2).unwrap();
        let fa = up_apply(&f, &params).unwrap();
        let ga = up_apply(&g, &params).unwrap();
        let ca = up_apply(&comb, &params).unwrap();
        let mut expect: BTreeMap<QuadIndex, Rational> = BTreeMap::new();
        for (t, v) in fa.iter() {
            expect.insert(t.clone(), v * rat(2));
        }
        for (t, v) in ga.iter() {
            let e = expect.entry(t.clone()).or_insert_with(Rational::zero);
            *e += v * rat(-7);
        }
        expect.retain(|_, v| !v.is_zero());
        let got: BTreeMap<QuadIndex, Rational> =
            ca.iter().map(|(t, v)| (t.clone(), v.clone())).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn float_mode_tracks_exact_oracle() {
        for seed in [3u64, 9] {
            let f = lcg_table(15, 2, 60, seed);
            let params = HeckeParams::up(5, 15, 2).unwrap();
            let exact = up_oracle(&f, &params).unwrap();
            let float = up_oracle_float(&f, &params).unwrap();
            let cmp = compare_float_oracle(&exact, &float, 1e-9);
            assert!(cmp.compared > 0);
            assert!(cmp.ok(), "max deviation {}", cmp.max_deviation);
        }
    }

    #[test]
    fn evdokimov_delta_examples() {
        // Level 3, p = 2, weight 2: the shear/W sum reaches three indices
        // from the delta at (1,0,6).
        let f = table(3, 2, 100, &[(1, 0, 6, 1)]);
        let params = HeckeParams::tp(2, 3, 2).unwrap();
        let g = evdokimov_apply(&f, &params).unwrap();
        assert_eq!(
            entries(&g),
            vec![(2, 0, 3, rat(1)), (1355, -2064, 786, rat(1)), (2, 0, 12, rat(2))]
        );

        let f = table(3, 2, 100, &[(1, 1, 3, 1)]);
        let g = evdokimov_apply(&f, &params).unwrap();
        assert_eq!(entries(&g), vec![(2, 2, 6, rat(2))]);

        let zero = table(3, 2, 100, &[]);
        assert!(evdokimov_apply(&zero, &params).unwrap().is_empty());
    }

    #[test]
    fn evdokimov_preserves_discriminants_in_the_u_sum() {
        // det([[1,0],[0,p]] U) = p, so the inner index keeps disc T.
        let t = QuadIndex::new(1, 1, 3, 3).unwrap();
        for u in [[[1i64, 0], [1, 1]], [[1, 0], [0, 1]], [[16, 21], [3, 4]]] {
            let (n1, r1, m1) = sandwich(u, 1, 1, 3);
            assert_eq!(r1 * r1 - 4 * n1 * m1, t.disc());
        }
    }

    #[test]
    fn evdokimov_custom_reps_change_the_sum() {
        // Replacing W by another representative of its class shifts
        // which indices the U-sum reads on non-symmetrized tables.
        let f = table(3, 2, 100, &[(1, 0, 6, 1)]);
        let default = HeckeParams::tp(2, 3, 2).unwrap();
        let custom = HeckeParams::tp_with_reps(
            2,
            3,
            2,
            vec![[[1, 0], [0, 1]], [[1, 0], [1, 1]], [[0, -1], [1, 0]]],
        )
        .unwrap();
        let gd = evdokimov_apply(&f, &default).unwrap();
        let gc = evdokimov_apply(&f, &custom).unwrap();
        assert_eq!(gd.coeff(&QuadIndex::new(2, 0, 3, 3).unwrap()), rat(1));
        assert_eq!(gc.coeff(&QuadIndex::new(2, 0, 3, 3).unwrap()), rat(1));
        assert_ne!(entries(&gd), entries(&gc));
    }

    #[test]
    fn eigenvalue_estimate_cases() {
        let f = table(3, 2, 100, &[(1, 1, 3, 2), (2, 2, 6, 3)]);
        let mut g = FourierTable::new(3, 2, 100, 100);
        for (t, v) in f.iter() {
            g.insert(t.clone(), v * rat(7)).unwrap();
        }
        assert_eq!(eigenvalue_estimate(&f, &g).unwrap(), Eigenvalue::Scalar(rat(7)));

        let zero = table(3, 2, 100, &[]);
        assert_eq!(eigenvalue_estimate(&f, &zero).unwrap(), Eigenvalue::Scalar(rat(0)));
        assert!(matches!(eigenvalue_estimate(&zero, &f), Err(HeckeError::ZeroForm)));

        let mut bad = FourierTable::new(3, 2, 100, 100);
        bad.insert(QuadIndex::new(1, 1, 3, 3).unwrap(), rat(14)).unwrap();
        bad.insert(QuadIndex::new(2, 2, 6, 3).unwrap(), ratio(1, 2)).unwrap();
        match eigenvalue_estimate(&f, &bad).unwrap() {
            Eigenvalue::Inconsistent { at, expected, got } => {
                assert_eq!(at, QuadIndex::new(2, 2, 6, 3).unwrap());
                assert_eq!(expected, rat(21));
                assert_eq!(got, ratio(1, 2));
            }
            other => panic!("expected inconsistency, got {other:?}"),
        }

        let other_level = table(15, 2, 100, &[]);
        assert!(matches!(
            eigenvalue_estimate(&f, &other_level),
            Err(HeckeError::LevelMismatch { .. })
        ));
    }

    #[test]
    fn eigenvalue_estimate_ignores_uncertified_mismatch() {
        let mut f = FourierTable::new(3, 2, 400, 11);
        f.insert(QuadIndex::new(1, 1, 3, 3).unwrap(), rat(1)).unwrap();
        f.insert(QuadIndex::new(2, 2, 6, 3).unwrap(), rat(5)).unwrap();
        let mut g = FourierTable::new(3, 2, 400, 11);
        g.insert(QuadIndex::new(1, 1, 3, 3).unwrap(), rat(4)).unwrap();
        // Mismatched beyond the certified bound 11: ignored.
        g.insert(QuadIndex::new(2, 2, 6, 3).unwrap(), rat(100)).unwrap();
        assert_eq!(eigenvalue_estimate(&f, &g).unwrap(), Eigenvalue::Scalar(rat(4)));
    }

    #[test]
    fn find_primitive_cases() {
        let f = table(3, 2, 100, &[(1, 1, 3, 1), (2, 2, 6, 5)]);
        let rep = find_primitive(&f).unwrap();
        assert_eq!(rep.index, QuadIndex::new(1, 1, 3, 3).unwrap());
        assert!(rep.is_primitive);
        assert_eq!(rep.content, 1);
        assert!(rep.descent.is_empty());

        let f = table(3, 2, 100, &[(2, 2, 6, 5)]);
        let rep = find_primitive(&f).unwrap();
        assert_eq!(rep.index, QuadIndex::new(2, 2, 6, 3).unwrap());
        assert_eq!(rep.value, rat(5));
        assert!(!rep.is_primitive);
        assert_eq!(rep.content, 2);
        assert_eq!(rep.descent.len(), 1);
        let step = &rep.descent[0];
        assert_eq!(step.p, 2);
        assert_eq!(step.route, DescentRoute::Unramified);
        assert_eq!(step.quotient, Some(QuadIndex::new(1, 1, 3, 3).unwrap()));
        assert!(step.reads.is_empty());

        let empty = table(3, 2, 100, &[]);
        assert!(matches!(find_primitive(&empty), Err(HeckeError::ZeroForm)));
    }

    #[test]
    fn find_primitive_ramified_route() {
        // Content 3 at level 3: the descent step uses the ramified
        // relation; S/3 = (1,1,3) stays valid, reads stay empty.
        let f = table(3, 2, 400, &[(3, 3, 9, 2)]);
        let rep = find_primitive(&f).unwrap();
        assert_eq!(rep.content, 3);
        let step = &rep.descent[0];
        assert_eq!(step.route, DescentRoute::Ramified);
        assert_eq!(step.quotient, Some(QuadIndex::new(1, 1, 3, 3).unwrap()));
        assert!(step.reads.is_empty());
    }

    #[test]
    fn find_primitive_unavailable_route() {
        // Level 9 = 3^2: no single-prime relation at p = 3.
        let f = table(9, 2, 400, &[(3, 3, 9, 1)]);
        let rep = find_primitive(&f).unwrap();
        assert_eq!(rep.content, 3);
        assert_eq!(rep.descent[0].route, DescentRoute::Unavailable);
    }

    #[test]
    fn find_primitive_skips_uncertified_smaller_disc() {
        let mut f = FourierTable::new(3, 2, 400, 44);
        // |disc| 44: certified; |disc| 315 - 9*35: not.
        f.insert(QuadIndex::new(2, 2, 6, 3).unwrap(), rat(1)).unwrap();
        f.insert(QuadIndex::new(3, 3, 27, 3).unwrap(), rat(1)).unwrap();
        let rep = find_primitive(&f).unwrap();
        assert_eq!(rep.index, QuadIndex::new(2, 2, 6, 3).unwrap());
    }
}
