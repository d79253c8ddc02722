//! Descent from Jacobi slices to half-integral weight q-series.
//!
//! A `QSeries` stores a truncated expansion Σ c(D) e(Dτ) with a weight
//! tag, a level and a character.  The maps here are the μ-summed slice
//! descent, the level and character hypothesis checks, unary theta
//! series and their shape detection, and the square-free support scan.
//! Character sums collapse through [`RootSum`], so an irrational value
//! is detected exactly rather than by tolerance.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use crate::arith::{factor, gcd_i64, is_squarefree, isqrt};
use crate::character::{CharComponent, DirichletCharacter, RootSum, UnityRoot};
use crate::fourier::JacobiSlice;
use crate::rational::{rat, Rational};
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HalfIntError {
    /// A half-integral weight tag needs a level divisible by 4.
    BadLevel { level: i64 },
    /// Exponent outside the series bound.
    BadKey { d: i64, bound: i64 },
    /// The slice index must be square-free for the descent.
    NotSquarefree { index: i64 },
    /// The character modulus must divide twice the slice index.
    BadModulus { modulus: i64, index: i64 },
    /// The character has the wrong sign at -1.
    ParityMismatch { parity: i8, expected: i8 },
    /// A coefficient came out irrational.
    NonRationalValue { d: i64 },
    /// The series vanishes within its bound.
    ZeroSeries,
    /// Theta shifts are positive.
    BadShift { t: i64 },
}

impl fmt::Display for HalfIntError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HalfIntError::BadLevel { level } => {
                write!(f, "half-integral level {level} is not divisible by 4")
            }
            HalfIntError::BadKey { d, bound } => {
                write!(f, "exponent {d} outside [0, {bound}]")
            }
            HalfIntError::NotSquarefree { index } => {
                write!(f, "slice index {index} is not square-free")
            }
            HalfIntError::BadModulus { modulus, index } => {
                write!(f, "character modulus {modulus} does not divide 2*{index}")
            }
            HalfIntError::ParityMismatch { parity, expected } => {
                write!(f, "character parity {parity}, the weight requires {expected}")
            }
            HalfIntError::NonRationalValue { d } => {
                write!(f, "irrational coefficient at exponent {d}")
            }
            HalfIntError::ZeroSeries => write!(f, "series vanishes within its bound"),
            HalfIntError::BadShift { t } => write!(f, "theta shift {t} must be positive"),
        }
    }
}

impl std::error::Error for HalfIntError {}

/// A truncated q-series of weight k or k - 1/2 with level and character.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    weight_k: i64,
    half: bool,
    level: i64,
    character: DirichletCharacter,
    coeffs: BTreeMap<i64, Rational>,
    bound: i64,
}

impl QSeries {
    pub fn new(
        weight_k: i64,
        half: bool,
        level: i64,
        character: DirichletCharacter,
        bound: i64,
    ) -> Result<QSeries, HalfIntError> {
        if level < 1 || (half && level % 4 != 0) {
            return Err(HalfIntError::BadLevel { level });
        }
        assert!(bound >= 0);
        Ok(QSeries { weight_k, half, level, character, coeffs: BTreeMap::new(), bound })
    }

    /// The weight as the pair (k, half): k - 1/2 when `half` is set.
    pub fn weight(&self) -> (i64, bool) {
        (self.weight_k, self.half)
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.character
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// Stores a coefficient; zero erases the key.
    pub fn insert(&mut self, d: i64, value: Rational) -> Result<(), HalfIntError> {
        if d < 0 || d > self.bound {
            return Err(HalfIntError::BadKey { d, bound: self.bound });
        }
        if value.is_zero() {
            self.coeffs.remove(&d);
        } else {
            self.coeffs.insert(d, value);
        }
        Ok(())
    }

    pub fn coeff(&self, d: i64) -> Rational {
        self.coeffs.get(&d).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &Rational)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Descends a Jacobi slice of square-free index m to a q-series of
/// weight k - 1/2: the coefficient at D is Σ_μ χ(μ) c((D + μ^2)/4m, μ)
/// over 0 <= μ < 2m with 4m dividing D + μ^2.  The output level is
/// 4 lcm(m, F^2) for F the character modulus.
pub fn skoruppa_map(
    phi: &JacobiSlice,
    chi: &DirichletCharacter,
    k: i64,
) -> Result<QSeries, HalfIntError> {
    let m = phi.index;
    if m < 1 || !is_squarefree(m as u64) {
        return Err(HalfIntError::NotSquarefree { index: m });
    }
    let f = chi.modulus();
    if (2 * m) % f != 0 {
        return Err(HalfIntError::BadModulus { modulus: f, index: m });
    }
    let expected: i8 = if k % 2 == 0 { 1 } else { -1 };
    if chi.parity() != expected {
        return Err(HalfIntError::ParityMismatch { parity: chi.parity(), expected });
    }
    let level = 4 * (m / gcd_i64(m, f * f)) * f * f;
    let mut out = QSeries::new(k, true, level, chi.clone(), phi.bound)?;
    for d in 0..=phi.bound {
        let mut sum = RootSum::new();
        for mu in 0..2 * m {
            if (d + mu * mu) % (4 * m) != 0 {
                continue;
            }
            let c = phi.coeff((d + mu * mu) / (4 * m), mu);
            if c.is_zero() {
                continue;
            }
            match chi.eval(mu) {
                Some(root) => sum.add(c, root),
                None => {}
            }
        }
        let value = sum
            .rational_value()
            .ok_or(HalfIntError::NonRationalValue { d })?;
        out.insert(d, value)?;
    }
    Ok(out)
}

/// Why the level and character hypotheses fail, if they do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SahaFailure {
    /// Some p^3 divides the level.
    CubeDivides { p: i64 },
    /// An odd p^2 divides the level but the p-component is trivial.
    TrivialOddComponent { p: i64 },
}

/// Verdict of the level and character hypothesis check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SahaVerdict {
    pub ok: bool,
    pub failure: Option<SahaFailure>,
}

impl SahaVerdict {
    pub fn failing_prime(&self) -> Option<i64> {
        match self.failure {
            Some(SahaFailure::CubeDivides { p }) => Some(p),
            Some(SahaFailure::TrivialOddComponent { p }) => Some(p),
            None => None,
        }
    }
}

/// Checks the nonvanishing hypotheses on the total level: cube-free,
/// and every odd prime whose square divides the level carries a
/// nontrivial character component.
pub fn saha_conditions(level_total: i64, chi: &DirichletCharacter) -> SahaVerdict {
    assert!(level_total >= 4 && level_total % 4 == 0, "total level must be divisible by 4");
    for (p, e) in factor(level_total as u64) {
        let p = p as i64;
        if e >= 3 {
            return SahaVerdict { ok: false, failure: Some(SahaFailure::CubeDivides { p }) };
        }
        if p > 2 && e == 2 {
            let trivial = chi.component_at(p).map_or(true, |c| c.is_trivial());
            if trivial {
                return SahaVerdict {
                    ok: false,
                    failure: Some(SahaFailure::TrivialOddComponent { p }),
                };
            }
        }
    }
    SahaVerdict { ok: true, failure: None }
}

/// The unary theta series Σ_{m >= 1} m ψ(m) e(m^2 t τ) of an odd real
/// character ψ mod r, truncated at `bound`.  Weight 3/2, level 4 r^2 t,
/// character the theta twist of ψ by t.
pub fn theta_series(
    psi: &DirichletCharacter,
    t: i64,
    bound: i64,
) -> Result<QSeries, HalfIntError> {
    if t < 1 {
        return Err(HalfIntError::BadShift { t });
    }
    if !psi.is_odd() {
        return Err(HalfIntError::ParityMismatch { parity: psi.parity(), expected: -1 });
    }
    let r = psi.modulus();
    let twisted = psi.theta_twist(t).expect("twist by a positive shift");
    let mut out = QSeries::new(2, true, 4 * r * r * t, twisted, bound)?;
    let mut m = 1;
    while t * m * m <= bound {
        let value = psi
            .rational_value(m)
            .ok_or(HalfIntError::NonRationalValue { d: t * m * m })?;
        out.insert(t * m * m, rat(m) * value)?;
        m += 1;
    }
    Ok(out)
}

/// A detected theta shape: the series is consistent with the theta of
/// `psi` shifted by `t` for all exponents up to `consistent_to`.  This
/// is evidence bounded by the truncation, not a proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaShape {
    pub t: i64,
    pub r: i64,
    pub psi: DirichletCharacter,
    pub consistent_to: i64,
}

/// Tests whether the support is {t m^2} for t the smallest nonzero
/// exponent and the values match m ψ(m) for an odd real character ψ.
/// The modulus of ψ is searched over divisors of the conductor bound
/// inferred from the level (falling back to the largest m seen).
pub fn theta_shape_detect(f: &QSeries) -> Result<Option<ThetaShape>, HalfIntError> {
    if f.is_zero() {
        return Err(HalfIntError::ZeroSeries);
    }
    if !f.coeff(0).is_zero() {
        return Ok(None);
    }
    let support: Vec<i64> = f.iter().map(|(d, _)| *d).collect();
    let t = support[0];
    let mut values = BTreeMap::new();
    for d in support {
        if d % t != 0 {
            return Ok(None);
        }
        let m = isqrt((d / t) as u64) as i64;
        if m * m != d / t {
            return Ok(None);
        }
        let v = f.coeff(d) / rat(m);
        if !v.is_integer() || v.abs() > rat(1) {
            return Ok(None);
        }
        values.insert(m, v);
    }
    let seen = isqrt((f.bound() / t) as u64) as i64;
    let conductor_bound = match exact_square_root(f.level() / (4 * t)) {
        Some(c) if f.level() % (4 * t) == 0 => c,
        _ => seen,
    };
    for r in 1..=conductor_bound {
        if conductor_bound % r != 0 {
            continue;
        }
        for psi in real_characters_mod(r) {
            if !psi.is_odd() {
                continue;
            }
            let matches = (1..=seen).all(|m| {
                let expect = psi.rational_value(m).expect("real character");
                values.get(&m).cloned().unwrap_or_else(Rational::zero) == expect
            });
            if matches {
                return Ok(Some(ThetaShape { t, r, psi, consistent_to: f.bound() }));
            }
        }
    }
    Ok(None)
}

fn exact_square_root(x: i64) -> Option<i64> {
    if x < 0 {
        return None;
    }
    let s = isqrt(x as u64) as i64;
    if s * s == x {
        Some(s)
    } else {
        None
    }
}

/// All real (quadratic or trivial) characters of the given modulus, as
/// products of per-prime-power component choices.
fn real_characters_mod(r: i64) -> Vec<DirichletCharacter> {
    let mut combos: Vec<Vec<CharComponent>> = vec![Vec::new()];
    for (p, e) in factor(r as u64) {
        let p = p as i64;
        let options: Vec<CharComponent> = if p == 2 {
            match e {
                1 => vec![CharComponent::trivial(2, 1)],
                2 => vec![
                    CharComponent::trivial(2, 2),
                    CharComponent::two_power(2, UnityRoot::minus_one(), UnityRoot::one()).unwrap(),
                ],
                _ => {
                    let signs = [UnityRoot::one(), UnityRoot::minus_one()];
                    signs
                        .iter()
                        .flat_map(|a| signs.iter().map(|b| CharComponent::two_power(e, *a, *b).unwrap()))
                        .collect()
                }
            }
        } else {
            vec![
                CharComponent::trivial(p, e),
                CharComponent::odd_prime_power(p, e, UnityRoot::minus_one()).unwrap(),
            ]
        };
        combos = combos
            .into_iter()
            .flat_map(|base| {
                options.iter().map(move |opt| {
                    let mut next = base.clone();
                    next.push(opt.clone());
                    next
                })
            })
            .collect();
    }
    combos
        .into_iter()
        .map(|c| DirichletCharacter::from_components(c).expect("distinct primes"))
        .collect()
}

/// Square-free exponents with nonzero coefficient that are coprime to
/// every prime in `avoid`, ascending.
pub fn squarefree_scan(f: &QSeries, avoid: &BTreeSet<i64>) -> Vec<i64> {
    f.iter()
        .filter(|&(&d, _)| d >= 1 && is_squarefree(d as u64))
        .filter(|&(&d, _)| avoid.iter().all(|&l| gcd_i64(d, l) == 1))
        .map(|(&d, _)| d)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::{fj_extract, FourierTable, QuadIndex};
    use crate::rational::ratio;

    fn slice(index: i64, bound: i64, entries: &[(i64, i64, i64)]) -> JacobiSlice {
        let mut coeffs = BTreeMap::new();
        for &(n, r, v) in entries {
            coeffs.insert((n, r), rat(v));
        }
        JacobiSlice {
            index,
            weight: 2,
            level: 1,
            bound,
            structurally_zero: false,
            coeffs,
        }
    }

    #[test]
    fn qseries_validation() {
        let chi = DirichletCharacter::trivial(1).unwrap();
        assert_eq!(
            QSeries::new(2, true, 10, chi.clone(), 50),
            Err(HalfIntError::BadLevel { level: 10 })
        );
        let mut f = QSeries::new(2, true, 12, chi, 50).unwrap();
        assert_eq!(f.insert(60, rat(1)), Err(HalfIntError::BadKey { d: 60, bound: 50 }));
        assert_eq!(f.insert(-1, rat(1)), Err(HalfIntError::BadKey { d: -1, bound: 50 }));
        f.insert(11, rat(3)).unwrap();
        assert_eq!(f.coeff(11), rat(3));
        f.insert(11, rat(0)).unwrap();
        assert!(f.is_zero());
        assert_eq!(f.weight(), (2, true));
    }

    #[test]
    fn skoruppa_delta_slice_example() {
        let phi = slice(3, 40, &[(1, 1, 1)]);
        let chi = DirichletCharacter::trivial(1).unwrap();
        let h = skoruppa_map(&phi, &chi, 2).unwrap();
        assert_eq!(h.coeff(11), rat(1));
        assert_eq!(h.len(), 1);
        assert_eq!(h.level(), 12);
        assert_eq!(h.weight(), (2, true));
    }

    #[test]
    fn skoruppa_zero_slice() {
        let phi = slice(3, 40, &[]);
        let chi = DirichletCharacter::trivial(1).unwrap();
        let h = skoruppa_map(&phi, &chi, 2).unwrap();
        assert!(h.is_zero());
    }

    #[test]
    fn skoruppa_rejections() {
        let chi3 = DirichletCharacter::legendre(3).unwrap();
        let phi = slice(3, 40, &[(1, 1, 1)]);
        assert_eq!(
            skoruppa_map(&phi, &chi3, 2),
            Err(HalfIntError::ParityMismatch { parity: -1, expected: 1 })
        );
        let chi5 = DirichletCharacter::legendre(5).unwrap();
        assert_eq!(
            skoruppa_map(&phi, &chi5, 2),
            Err(HalfIntError::BadModulus { modulus: 5, index: 3 })
        );
        let phi4 = slice(4, 40, &[(1, 1, 1)]);
        let chi = DirichletCharacter::trivial(1).unwrap();
        assert_eq!(skoruppa_map(&phi4, &chi, 2), Err(HalfIntError::NotSquarefree { index: 4 }));
    }

    #[test]
    fn skoruppa_reads_slices_of_tables() {
        let mut table = FourierTable::new(3, 2, 60, 60);
        table.insert(QuadIndex::new(1, 1, 3, 3).unwrap(), rat(1)).unwrap();
        let phi = fj_extract(&table, 3).unwrap();
        let chi = DirichletCharacter::trivial(1).unwrap();
        let h = skoruppa_map(&phi, &chi, 2).unwrap();
        assert_eq!(h.coeff(11), rat(1));
        assert_eq!(h.bound(), 60);
    }

    #[test]
    fn skoruppa_is_linear() {
        let chi = DirichletCharacter::legendre(3).unwrap();
        let phi1 = slice(3, 60, &[(1, 1, 2), (2, 2, 5), (1, 5, -3)]);
        let phi2 = slice(3, 60, &[(1, 1, -1), (3, 4, 7), (2, 2, 1)]);
        let mut combo = slice(3, 60, &[]);
        for (key, v) in &phi1.coeffs {
            combo.coeffs.insert(*key, rat(2) * v);
        }
        for (key, v) in &phi2.coeffs {
            let entry = combo.coeffs.entry(*key).or_insert_with(Rational::zero);
            *entry += v;
        }
        let h1 = skoruppa_map(&phi1, &chi, 3).unwrap();
        let h2 = skoruppa_map(&phi2, &chi, 3).unwrap();
        let hc = skoruppa_map(&combo, &chi, 3).unwrap();
        for d in 0..=60 {
            assert_eq!(hc.coeff(d), rat(2) * h1.coeff(d) + h2.coeff(d), "D = {d}");
        }
    }

    #[test]
    fn skoruppa_support_has_witnessing_residues() {
        let chi = DirichletCharacter::legendre(3).unwrap();
        let phi = slice(3, 80, &[(1, 1, 1), (2, 1, 4), (3, 2, -2), (4, 5, 3), (2, 3, 1)]);
        let h = skoruppa_map(&phi, &chi, 3).unwrap();
        assert!(!h.is_zero());
        for (&d, _) in h.iter() {
            let witness = (0..6).any(|mu| (d + mu * mu) % 12 == 0 && chi.eval(mu).is_some());
            assert!(witness, "D = {d}");
        }
    }

    #[test]
    fn skoruppa_collapses_or_rejects_complex_values() {
        let chi = DirichletCharacter::odd_character_mod(5, 0).unwrap();
        let phi = slice(5, 40, &[(1, 2, 1)]);
        assert_eq!(skoruppa_map(&phi, &chi, 3), Err(HalfIntError::NonRationalValue { d: 16 }));
        let phi = slice(5, 40, &[(1, 2, 1), (4, 8, 1)]);
        let h = skoruppa_map(&phi, &chi, 3).unwrap();
        assert_eq!(h.coeff(16), rat(0));
    }

    #[test]
    fn saha_examples() {
        let trivial = DirichletCharacter::trivial(1).unwrap();
        assert_eq!(saha_conditions(12, &trivial), SahaVerdict { ok: true, failure: None });
        let v108 = saha_conditions(108, &trivial);
        assert_eq!(v108.failure, Some(SahaFailure::CubeDivides { p: 3 }));
        assert_eq!(v108.failing_prime(), Some(3));
        let v36 = saha_conditions(36, &trivial);
        assert_eq!(v36.failure, Some(SahaFailure::TrivialOddComponent { p: 3 }));
        let chi3 = DirichletCharacter::legendre(3).unwrap();
        assert!(saha_conditions(36, &chi3).ok);
        assert!(!saha_conditions(32, &trivial).ok);
    }

    #[test]
    fn theta_series_frozen_values() {
        let psi = DirichletCharacter::legendre(3).unwrap();
        let theta = theta_series(&psi, 1, 30).unwrap();
        assert_eq!(theta.coeff(1), rat(1));
        assert_eq!(theta.coeff(4), rat(-2));
        assert_eq!(theta.coeff(9), rat(0));
        assert_eq!(theta.coeff(16), rat(4));
        assert_eq!(theta.coeff(25), rat(-5));
        assert_eq!(theta.level(), 36);
        assert_eq!(theta.weight(), (2, true));
        assert_eq!(theta.character().modulus(), 12);
        assert_eq!(theta.character().parity(), 1);
    }

    #[test]
    fn theta_series_rejections() {
        let even = DirichletCharacter::legendre(5).unwrap();
        assert_eq!(
            theta_series(&even, 1, 30),
            Err(HalfIntError::ParityMismatch { parity: 1, expected: -1 })
        );
        let complex = DirichletCharacter::odd_character_mod(5, 0).unwrap();
        assert_eq!(theta_series(&complex, 1, 30), Err(HalfIntError::NonRationalValue { d: 4 }));
        let psi = DirichletCharacter::legendre(3).unwrap();
        assert_eq!(theta_series(&psi, 0, 30), Err(HalfIntError::BadShift { t: 0 }));
    }

    #[test]
    fn theta_detect_example() {
        let psi = DirichletCharacter::legendre(3).unwrap();
        let theta = theta_series(&psi, 1, 30).unwrap();
        let shape = theta_shape_detect(&theta).unwrap().unwrap();
        assert_eq!((shape.t, shape.r), (1, 3));
        assert_eq!(shape.psi, psi);
        assert_eq!(shape.consistent_to, 30);
    }

    #[test]
    fn theta_detect_mixed_support_and_zero() {
        let chi = DirichletCharacter::trivial(1).unwrap();
        let mut f = QSeries::new(2, true, 12, chi.clone(), 30).unwrap();
        f.insert(2, rat(1)).unwrap();
        f.insert(3, rat(1)).unwrap();
        assert_eq!(theta_shape_detect(&f), Ok(None));
        let zero = QSeries::new(2, true, 12, chi, 30).unwrap();
        assert_eq!(theta_shape_detect(&zero), Err(HalfIntError::ZeroSeries));
    }

    #[test]
    fn theta_detect_rejects_wrong_values() {
        let psi = DirichletCharacter::legendre(3).unwrap();
        let mut theta = theta_series(&psi, 1, 30).unwrap();
        theta.insert(16, rat(5)).unwrap();
        assert_eq!(theta_shape_detect(&theta), Ok(None));
        let mut theta = theta_series(&psi, 1, 30).unwrap();
        theta.insert(0, ratio(1, 2)).unwrap();
        assert_eq!(theta_shape_detect(&theta), Ok(None));
    }

    #[test]
    fn theta_detect_recovers_constructor_parameters() {
        let chi4 = DirichletCharacter::from_components(vec![CharComponent::two_power(
            2,
            UnityRoot::minus_one(),
            UnityRoot::one(),
        )
        .unwrap()])
        .unwrap();
        let chi8 = DirichletCharacter::from_components(vec![CharComponent::two_power(
            3,
            UnityRoot::minus_one(),
            UnityRoot::minus_one(),
        )
        .unwrap()])
        .unwrap();
        let mut psis = vec![
            DirichletCharacter::legendre(3).unwrap(),
            DirichletCharacter::legendre(7).unwrap(),
            DirichletCharacter::legendre(11).unwrap(),
            chi4,
            chi8,
        ];
        psis.push(psis[0].mul(&DirichletCharacter::legendre(5).unwrap()));
        for psi in &psis {
            assert!(psi.is_odd() && psi.is_primitive(), "{psi}");
            assert!(psi.modulus() <= 15);
            for t in 1..=10 {
                let theta = theta_series(psi, t, 25 * t + 5).unwrap();
                let shape = theta_shape_detect(&theta).unwrap().unwrap_or_else(|| {
                    panic!("no shape for {psi} with t = {t}")
                });
                assert_eq!(shape.t, t, "{psi}");
                assert_eq!(shape.r, psi.modulus(), "{psi}");
                assert_eq!(&shape.psi, psi, "{psi}");
            }
        }
    }

    #[test]
    fn squarefree_scan_examples() {
        let chi = DirichletCharacter::trivial(1).unwrap();
        let mut f = QSeries::new(2, true, 12, chi.clone(), 60).unwrap();
        f.insert(11, rat(1)).unwrap();
        f.insert(44, rat(2)).unwrap();
        f.insert(45, rat(3)).unwrap();
        assert_eq!(squarefree_scan(&f, &BTreeSet::new()), vec![11]);
        assert_eq!(squarefree_scan(&f, &BTreeSet::from([11])), Vec::<i64>::new());
        let zero = QSeries::new(2, true, 12, chi, 60).unwrap();
        assert!(squarefree_scan(&zero, &BTreeSet::new()).is_empty());
    }

    #[test]
    fn squarefree_scan_ascending_and_coprime() {
        let chi = DirichletCharacter::trivial(1).unwrap();
        let mut f = QSeries::new(2, true, 12, chi, 120).unwrap();
        for d in [119, 5, 30, 49, 7, 22, 0] {
            f.insert(d, rat(1)).unwrap();
        }
        assert_eq!(squarefree_scan(&f, &BTreeSet::new()), vec![5, 7, 22, 30, 119]);
        assert_eq!(squarefree_scan(&f, &BTreeSet::from([2, 7])), vec![5]);
    }
}
