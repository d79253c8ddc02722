//! Fourier coefficient tables indexed by positive half-integral binary
//! forms, the slash action of block-upper-triangular similitudes on
//! single terms, and Fourier-Jacobi slicing with theta decomposition.
//!
//! An index stands for the symmetric matrix [[n, r/2], [r/2, mN]] with
//! n > 0, negative discriminant r^2 - 4 n mN, and level dividing mN.
//! Tables store only nonzero rational coefficients; an absent key inside
//! the certified range reads as zero.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::arith::gcd_i64;
use crate::groups::GroupPattern;
use crate::mat::{Mat2, MatError, SimilitudeMatrix};
use crate::rational::{frac, is_integer, pow_i64, rat, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FourierError {
    /// The triple does not describe a positive index of the level.
    BadIndex {
        n: i64,
        r: i64,
        mn: i64,
        level: i64,
        reason: &'static str,
    },
    /// Key level does not match the table level.
    LevelMismatch { expected: i64, got: i64 },
    /// Key discriminant falls outside the table carrier bound.
    BoundExceeded { abs_disc: i128, bound: i64 },
    /// The supplied 2x2 matrix is not in the expected group.
    NotInGroup,
    /// Fourier-Jacobi slice indices must be positive.
    BadSliceIndex { m: i64 },
}

impl fmt::Display for FourierError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FourierError::BadIndex { n, r, mn, level, reason } => {
                write!(f, "invalid index ({n}, {r}, {mn}) at level {level}: {reason}")
            }
            FourierError::LevelMismatch { expected, got } => {
                write!(f, "level mismatch: expected {expected}, got {got}")
            }
            FourierError::BoundExceeded { abs_disc, bound } => {
                write!(f, "|disc| = {abs_disc} exceeds bound {bound}")
            }
            FourierError::NotInGroup => write!(f, "matrix outside the expected group"),
            FourierError::BadSliceIndex { m } => write!(f, "slice index {m} must be positive"),
        }
    }
}

impl std::error::Error for FourierError {}

/// Index (n, r, mN) of a positive half-integral form at a fixed level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadIndex {
    n: i64,
    r: i64,
    mn: i64,
    level: i64,
}

impl QuadIndex {
    pub fn new(n: i64, r: i64, mn: i64, level: i64) -> Result<QuadIndex, FourierError> {
        let bad = |reason| FourierError::BadIndex { n, r, mn, level, reason };
        if level < 1 {
            return Err(bad("level must be positive"));
        }
        if n < 1 {
            return Err(bad("n must be positive"));
        }
        if mn < 1 {
            return Err(bad("mN must be positive"));
        }
        if mn % level != 0 {
            return Err(bad("mN must be divisible by the level"));
        }
        let idx = QuadIndex { n, r, mn, level };
        if idx.disc() >= 0 {
            return Err(bad("discriminant must be negative"));
        }
        Ok(idx)
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn mn(&self) -> i64 {
        self.mn
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// r^2 - 4 n mN, always negative.
    pub fn disc(&self) -> i128 {
        self.r as i128 * self.r as i128 - 4 * self.n as i128 * self.mn as i128
    }

    pub fn abs_disc(&self) -> i128 {
        -self.disc()
    }

    /// gcd of the triple entries.
    pub fn content(&self) -> i64 {
        gcd_i64(gcd_i64(self.n, self.r.abs()), self.mn)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// The symmetric matrix [[n, r/2], [r/2, mN]].
    pub fn matrix(&self) -> Mat2 {
        Mat2::new([
            rat(self.n),
            ratio(self.r, 2),
            ratio(self.r, 2),
            rat(self.mn),
        ])
    }

    /// Read an index back off a symmetric rational matrix.
    pub fn from_matrix(m: &Mat2, level: i64) -> Result<QuadIndex, FourierError> {
        let two_off = m.at(0, 1) * rat(2);
        if m.at(0, 1) != m.at(1, 0)
            || !is_integer(m.at(0, 0))
            || !is_integer(m.at(1, 1))
            || !is_integer(&two_off)
        {
            return Err(FourierError::BadIndex {
                n: 0,
                r: 0,
                mn: 0,
                level,
                reason: "matrix is not half-integral symmetric",
            });
        }
        let n = crate::rational::to_i64(m.at(0, 0)).ok_or(FourierError::BadIndex {
            n: 0,
            r: 0,
            mn: 0,
            level,
            reason: "entry overflow",
        })?;
        let r = crate::rational::to_i64(&two_off).ok_or(FourierError::BadIndex {
            n: 0,
            r: 0,
            mn: 0,
            level,
            reason: "entry overflow",
        })?;
        let mn = crate::rational::to_i64(m.at(1, 1)).ok_or(FourierError::BadIndex {
            n: 0,
            r: 0,
            mn: 0,
            level,
            reason: "entry overflow",
        })?;
        QuadIndex::new(n, r, mn, level)
    }

    /// The index of p times the matrix.
    pub fn scaled(&self, p: i64) -> QuadIndex {
        QuadIndex {
            n: self.n * p,
            r: self.r * p,
            mn: self.mn * p,
            level: self.level,
        }
    }

    /// The index of the matrix divided by p, when that stays a valid
    /// index of the same level.
    pub fn divided_by(&self, p: i64) -> Option<QuadIndex> {
        if self.n % p != 0 || self.r % p != 0 || self.mn % p != 0 {
            return None;
        }
        QuadIndex::new(self.n / p, self.r / p, self.mn / p, self.level).ok()
    }
}

impl Ord for QuadIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.abs_disc()
            .cmp(&other.abs_disc())
            .then(self.n.cmp(&other.n))
            .then(self.r.cmp(&other.r))
            .then(self.mn.cmp(&other.mn))
            .then(self.level.cmp(&other.level))
    }
}

impl PartialOrd for QuadIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for QuadIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n, self.r, self.mn)
    }
}

/// Sparse table of Fourier coefficients with a carrier bound on |disc|
/// and a certified bound up to which absent keys are known zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourierTable {
    level: i64,
    weight: i64,
    disc_bound: i64,
    certified_bound: i64,
    coeffs: BTreeMap<QuadIndex, Rational>,
    /// Sign of the level involution action when known.
    pub eps: Option<i8>,
    /// Recorded Hecke eigenvalues keyed by prime.
    pub eigenvalues: BTreeMap<i64, Rational>,
}

impl FourierTable {
    pub fn new(level: i64, weight: i64, disc_bound: i64, certified_bound: i64) -> FourierTable {
        assert!(level >= 1, "level must be positive");
        assert!(weight >= 2, "weight must be at least 2");
        assert!(disc_bound >= 1, "carrier bound must be positive");
        assert!(
            (1..=disc_bound).contains(&certified_bound),
            "certified bound must lie in 1..=disc_bound"
        );
        FourierTable {
            level,
            weight,
            disc_bound,
            certified_bound,
            coeffs: BTreeMap::new(),
            eps: None,
            eigenvalues: BTreeMap::new(),
        }
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn disc_bound(&self) -> i64 {
        self.disc_bound
    }

    pub fn certified_bound(&self) -> i64 {
        self.certified_bound
    }

    /// Stores a value, dropping the key when the value is zero.
    pub fn insert(&mut self, idx: QuadIndex, value: Rational) -> Result<(), FourierError> {
        if idx.level != self.level {
            return Err(FourierError::LevelMismatch {
                expected: self.level,
                got: idx.level,
            });
        }
        if idx.abs_disc() > self.disc_bound as i128 {
            return Err(FourierError::BoundExceeded {
                abs_disc: idx.abs_disc(),
                bound: self.disc_bound,
            });
        }
        if value.is_zero() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, value);
        }
        Ok(())
    }

    pub fn get(&self, idx: &QuadIndex) -> Option<&Rational> {
        self.coeffs.get(idx)
    }

    /// Stored value, or zero when absent.
    pub fn coeff(&self, idx: &QuadIndex) -> Rational {
        self.coeffs.get(idx).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_certified(&self, idx: &QuadIndex) -> bool {
        idx.abs_disc() <= self.certified_bound as i128
    }

    pub fn iter(&self) -> impl Iterator<Item = (&QuadIndex, &Rational)> {
        self.coeffs.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &QuadIndex> {
        self.coeffs.keys()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// One Fourier term slashed by a block-upper-triangular similitude:
/// the term at T maps to `scale * e(phase) * (term at index)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlashTerm {
    /// Transformed symmetric index matrix, possibly non half-integral.
    pub index: Mat2,
    /// mu^k det(D)^(-k).
    pub scale: Rational,
    /// Fractional part of tr(T B D^(-1)), in [0, 1).
    pub phase: Rational,
}

/// Action of a similitude with vanishing lower-left block on the single
/// Fourier term at the symmetric matrix `t`, for the given weight.
pub fn slash_term(t: &Mat2, g: &SimilitudeMatrix, weight: i64) -> Result<SlashTerm, MatError> {
    let (_, b, d) = crate::mat::block_parabolic_parts(g)?;
    let d_inv = d.inverse()?;
    let index = &(&d_inv * t) * &d_inv.transpose();
    let index = index.scale(g.multiplier());
    debug_assert!(index.is_symmetric());
    let scale = pow_i64(g.multiplier(), weight) * pow_i64(&d.det(), -weight);
    let phase = frac(&(&(t * &b) * &d_inv).trace());
    Ok(SlashTerm { index, scale, phase })
}

/// Index transform T -> transpose(A) T A for A with level-divisible
/// upper-right entry.  Preserves the discriminant and the level.
pub fn gamma0_transform(t: &QuadIndex, a: &Mat2) -> Result<QuadIndex, FourierError> {
    if !(GroupPattern::GammaUpper0 { level: t.level }).contains2(a) {
        return Err(FourierError::NotInGroup);
    }
    let e = |i, j| crate::rational::to_i64(a.at(i, j)).expect("integral entry") as i128;
    let (p, q, c, d) = (e(0, 0), e(0, 1), e(1, 0), e(1, 1));
    let (n, r, mn) = (t.n as i128, t.r as i128, t.mn as i128);
    let n2 = n * p * p + r * p * c + mn * c * c;
    let r2 = 2 * p * q * n + (p * d + q * c) * r + 2 * c * d * mn;
    let mn2 = q * q * n + q * d * r + d * d * mn;
    let idx = QuadIndex::new(n2 as i64, r2 as i64, mn2 as i64, t.level)
        .expect("unimodular transform preserves validity");
    debug_assert_eq!(idx.disc(), t.disc());
    Ok(idx)
}

/// One failed comparison from an equivariance audit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceMismatch {
    pub from: QuadIndex,
    pub to: QuadIndex,
    pub value_from: Rational,
    pub value_to: Rational,
}

/// Result of auditing a(T) = a(transpose(A) T A) over stored keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceReport {
    /// Pairs with both indices stored inside the certified range.
    pub pairs_checked: usize,
    /// Keys whose transform left the stored set or certified range.
    pub skipped: usize,
    pub mismatches: Vec<EquivarianceMismatch>,
}

impl EquivarianceReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Audits invariance of stored coefficients under one index transform.
///
/// Only pairs with both keys present and certified are compared; a table
/// covers finitely many indices of an infinite orbit, so an absent
/// counterpart is inconclusive rather than a mismatch.
pub fn check_equivariance(table: &FourierTable, a: &Mat2) -> Result<EquivarianceReport, FourierError> {
    let mut report = EquivarianceReport {
        pairs_checked: 0,
        skipped: 0,
        mismatches: Vec::new(),
    };
    let cb = table.certified_bound as i128;
    for (idx, value) in table.iter() {
        if idx.abs_disc() > cb {
            report.skipped += 1;
            continue;
        }
        let to = gamma0_transform(idx, a)?;
        if to.abs_disc() > cb || table.get(&to).is_none() {
            report.skipped += 1;
            continue;
        }
        let value_to = table.coeff(&to);
        report.pairs_checked += 1;
        if &value_to != value {
            report.mismatches.push(EquivarianceMismatch {
                from: *idx,
                to,
                value_from: value.clone(),
                value_to,
            });
        }
    }
    Ok(report)
}

/// Level involution on indices: (n, r, mN) -> (mN/N, -r, nN).
pub fn fricke_index(t: &QuadIndex) -> QuadIndex {
    QuadIndex {
        n: t.mn / t.level,
        r: -t.r,
        mn: t.n * t.level,
        level: t.level,
    }
}

/// Outcome of testing a(fricke T) = eps a(T) over stored keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrickeCheck {
    pub checked: usize,
    pub plus_ok: bool,
    pub minus_ok: bool,
}

impl FrickeCheck {
    /// Surviving sign, with +1 for a table where both signs hold.
    pub fn eps(&self) -> Option<i8> {
        match (self.plus_ok, self.minus_ok) {
            (true, _) => Some(1),
            (false, true) => Some(-1),
            (false, false) => None,
        }
    }
}

/// Tests both signs of the level involution against stored keys inside
/// the certified range.  An absent counterpart reads as zero here, since
/// the involution maps the certified block onto itself.
pub fn fricke_eigen_check(table: &FourierTable) -> FrickeCheck {
    let mut check = FrickeCheck {
        checked: 0,
        plus_ok: true,
        minus_ok: true,
    };
    let cb = table.certified_bound as i128;
    for (idx, value) in table.iter() {
        if idx.abs_disc() > cb {
            continue;
        }
        let to = fricke_index(idx);
        debug_assert_eq!(to.abs_disc(), idx.abs_disc());
        let value_to = table.coeff(&to);
        check.checked += 1;
        if &value_to != value {
            check.plus_ok = false;
        }
        if value_to != -value {
            check.minus_ok = false;
        }
    }
    check
}

/// Coefficients of one Fourier-Jacobi slice, keyed by (n, r).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobiSlice {
    pub index: i64,
    pub weight: i64,
    pub level: i64,
    /// Certified bound inherited from the sliced table.
    pub bound: i64,
    /// True when the slice index is outside the level lattice, which
    /// forces the slice to vanish identically.
    pub structurally_zero: bool,
    pub coeffs: BTreeMap<(i64, i64), Rational>,
}

impl JacobiSlice {
    pub fn coeff(&self, n: i64, r: i64) -> Rational {
        self.coeffs.get(&(n, r)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Extracts the slice of all stored keys with mN equal to `m`.
pub fn fj_extract(table: &FourierTable, m: i64) -> Result<JacobiSlice, FourierError> {
    if m < 1 {
        return Err(FourierError::BadSliceIndex { m });
    }
    let structurally_zero = m % table.level != 0;
    let mut coeffs = BTreeMap::new();
    for (idx, value) in table.iter() {
        if idx.mn == m {
            coeffs.insert((idx.n, idx.r), value.clone());
        }
    }
    debug_assert!(!structurally_zero || coeffs.is_empty());
    Ok(JacobiSlice {
        index: m,
        weight: table.weight,
        level: table.level,
        bound: table.certified_bound,
        structurally_zero,
        coeffs,
    })
}

/// Theta decomposition of a Jacobi slice: coefficients regrouped by
/// residue mu = r mod 2m and positive discriminant D = 4nm - r^2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaComponents {
    pub index: i64,
    pub weight: i64,
    pub components: BTreeMap<i64, BTreeMap<i64, Rational>>,
    /// Slots fed inconsistent values by distinct slice keys.
    pub conflicts: Vec<(i64, i64)>,
}

impl ThetaComponents {
    /// Component value h_mu(D), zero when absent.
    pub fn h(&self, mu: i64, d: i64) -> Rational {
        self.components
            .get(&mu.rem_euclid(2 * self.index))
            .and_then(|c| c.get(&d))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Slice coefficient reconstructed from the components.
    pub fn value(&self, n: i64, r: i64) -> Rational {
        let d = 4 * n * self.index - r * r;
        self.h(r, d)
    }

    pub fn is_coherent(&self) -> bool {
        self.conflicts.is_empty()
    }
}

/// Regroups a slice by (r mod 2m, 4nm - r^2).  When several keys land in
/// one slot the representative with r in [0, 2m) wins, then the smallest
/// (n, r); disagreeing slots are recorded as conflicts.
pub fn theta_components(slice: &JacobiSlice) -> ThetaComponents {
    let m = slice.index;
    let mut chosen: BTreeMap<(i64, i64), ((bool, i64, i64), Rational)> = BTreeMap::new();
    let mut conflicts = Vec::new();
    for (&(n, r), value) in &slice.coeffs {
        let mu = r.rem_euclid(2 * m);
        let d = 4 * n * m - r * r;
        let rank = (r != mu, n, r);
        match chosen.get_mut(&(mu, d)) {
            None => {
                chosen.insert((mu, d), (rank, value.clone()));
            }
            Some((best, v)) => {
                if v != value {
                    conflicts.push((mu, d));
                }
                if rank < *best {
                    *best = rank;
                    *v = value.clone();
                }
            }
        }
    }
    conflicts.sort_unstable();
    conflicts.dedup();
    let mut components: BTreeMap<i64, BTreeMap<i64, Rational>> = BTreeMap::new();
    for ((mu, d), (_, value)) in chosen {
        components.entry(mu).or_default().insert(d, value);
    }
    ThetaComponents {
        index: m,
        weight: slice.weight,
        components,
        conflicts,
    }
}
