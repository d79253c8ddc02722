//! Membership patterns for the paramodular group and friends, and the
//! U(p) coset representatives with their parabolic rewrites.
//!
//! The paramodular group of level N consists of the rational symplectic
//! 4x4 matrices with the integrality pattern
//!
//! ```text
//! [  Z   NZ   Z    Z  ]
//! [  Z    Z   Z   Z/N ]
//! [  Z   NZ   Z    Z  ]
//! [ NZ   NZ  NZ    Z  ]
//! ```
//!
//! For a prime p dividing the level exactly once, the double coset of
//! diag(1, 1, p, p) decomposes into p^3 + 2p^2 + p left cosets grouped in
//! four parameter families.  Two of the families arrive in a form with a
//! nonzero lower-left block; `build_up_cosets` carries both the raw form
//! and a rewritten representative of the same left coset whose lower-left
//! block vanishes, which is what the slash action consumes.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{inv_mod, is_prime, AlphaBeta};
use crate::mat::{multiplier, Mat2, Mat4, SimilitudeMatrix};
use crate::rational::{rat, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    /// The requested (p, N) pair is not an odd prime exactly dividing N.
    BadLevel { p: i64, level: i64 },
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::BadLevel { p, level } => {
                write!(f, "p = {p} must be an odd prime dividing N = {level} exactly once")
            }
        }
    }
}

impl std::error::Error for GroupError {}

/// Arithmetic subgroup patterns.  The 4x4 kinds answer `contains4`, the
/// 2x2 kinds answer `contains2`; queries of the wrong size are false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupPattern {
    /// Paramodular group of the given level.
    Paramodular { level: i64 },
    /// Local analogue at p: p-adic valuation bounds with exponent n.
    LocalK { p: i64, n: u32 },
    /// 2x2 integral matrices of determinant 1 with upper-right entry
    /// divisible by the level.
    GammaUpper0 { level: i64 },
    /// 2x2 integral matrices of determinant 1 with lower-left entry
    /// divisible by the level.
    GammaLower0 { level: i64 },
    /// 2x2 integral matrices of determinant 1.
    Sl2Z,
}

fn is_int(x: &Rational) -> bool {
    x.denom().is_one()
}

fn int_div_by(x: &Rational, n: i64) -> bool {
    is_int(x) && (x.numer() % BigInt::from(n)).is_zero()
}

fn denom_divides(x: &Rational, n: i64) -> bool {
    is_int(&(x * rat(n)))
}

/// p-adic valuation of a nonzero rational; `None` encodes +infinity for 0.
fn val_p(x: &Rational, p: i64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let count = |mut v: BigInt| -> i64 {
        let mut c = 0;
        v = v.abs();
        while (&v % &p).is_zero() {
            v /= &p;
            c += 1;
        }
        c
    };
    Some(count(x.numer().clone()) - count(x.denom().clone()))
}

impl GroupPattern {
    pub fn contains4(&self, g: &Mat4) -> bool {
        match *self {
            GroupPattern::Paramodular { level } => {
                let n = level;
                let ok = is_int(g.at(0, 0))
                    && int_div_by(g.at(0, 1), n)
                    && is_int(g.at(0, 2))
                    && is_int(g.at(0, 3))
                    && is_int(g.at(1, 0))
                    && is_int(g.at(1, 1))
                    && is_int(g.at(1, 2))
                    && denom_divides(g.at(1, 3), n)
                    && is_int(g.at(2, 0))
                    && int_div_by(g.at(2, 1), n)
                    && is_int(g.at(2, 2))
                    && is_int(g.at(2, 3))
                    && int_div_by(g.at(3, 0), n)
                    && int_div_by(g.at(3, 1), n)
                    && int_div_by(g.at(3, 2), n)
                    && is_int(g.at(3, 3));
                ok && multiplier(g) == Ok(rat(1))
            }
            GroupPattern::LocalK { p, n } => {
                let n = n as i64;
                let bounds = [
                    [0, n, 0, 0],
                    [0, 0, 0, -n],
                    [0, n, 0, 0],
                    [n, n, n, 0],
                ];
                for i in 0..4 {
                    for j in 0..4 {
                        if let Some(v) = val_p(g.at(i, j), p) {
                            if v < bounds[i][j] {
                                return false;
                            }
                        }
                    }
                }
                multiplier(g) == Ok(rat(1))
            }
            _ => false,
        }
    }

    pub fn contains2(&self, g: &Mat2) -> bool {
        let integral =
            || (0..2).all(|i| (0..2).all(|j| is_int(g.at(i, j))));
        match *self {
            GroupPattern::GammaUpper0 { level } => {
                integral() && int_div_by(g.at(0, 1), level) && g.det() == rat(1)
            }
            GroupPattern::GammaLower0 { level } => {
                integral() && int_div_by(g.at(1, 0), level) && g.det() == rat(1)
            }
            GroupPattern::Sl2Z => integral() && g.det() == rat(1),
            _ => false,
        }
    }
}

/// True when `g1` and `g2` generate the same left coset of the
/// paramodular group of the given level.
pub fn same_left_coset(g1: &Mat4, g2: &Mat4, level: i64) -> bool {
    let inv = match g2.inverse() {
        Ok(m) => m,
        Err(_) => return false,
    };
    GroupPattern::Paramodular { level }.contains4(&(g1 * &inv))
}

/// The four parameter families of the U(p) left coset decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CosetFamily {
    /// Upper unipotent translations, parameters (a, b, c), p^3 cosets.
    BTranslation,
    /// Mixed diagonal with one shear parameter pair (a, c), p^2 cosets.
    MixedDiagonal,
    /// B-translations conjugated through the level involution,
    /// parameters (a, b), p^2 cosets.
    FrickeBTranslation,
    /// Diagonal family through the level involution, parameter (a),
    /// p cosets.
    FrickeDiagonal,
}

impl CosetFamily {
    pub fn all() -> [CosetFamily; 4] {
        [
            CosetFamily::BTranslation,
            CosetFamily::MixedDiagonal,
            CosetFamily::FrickeBTranslation,
            CosetFamily::FrickeDiagonal,
        ]
    }

    pub fn size(&self, p: i64) -> usize {
        let p = p as usize;
        match self {
            CosetFamily::BTranslation => p * p * p,
            CosetFamily::MixedDiagonal => p * p,
            CosetFamily::FrickeBTranslation => p * p,
            CosetFamily::FrickeDiagonal => p,
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            CosetFamily::BTranslation => 3,
            CosetFamily::MixedDiagonal => 2,
            CosetFamily::FrickeBTranslation => 2,
            CosetFamily::FrickeDiagonal => 1,
        }
    }
}

impl fmt::Display for CosetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CosetFamily::BTranslation => "b-translation",
            CosetFamily::MixedDiagonal => "mixed-diagonal",
            CosetFamily::FrickeBTranslation => "fricke-b-translation",
            CosetFamily::FrickeDiagonal => "fricke-diagonal",
        };
        write!(f, "{s}")
    }
}

/// One left coset representative: the raw form from the double coset
/// decomposition and the rewritten block-upper-triangular representative
/// of the same left coset.
#[derive(Debug, Clone)]
pub struct UpCosetRep {
    pub family: CosetFamily,
    /// Family parameters, unused slots zero.
    pub params: [i64; 3],
    pub original: Mat4,
    pub final_rep: SimilitudeMatrix,
}

/// The level involution used to produce the third and fourth families.
pub fn level_involution(level: i64) -> Mat4 {
    Mat4::from_rows([
        [rat(1), rat(0), rat(0), rat(0)],
        [rat(0), rat(0), rat(0), ratio(1, level)],
        [rat(0), rat(0), rat(1), rat(0)],
        [rat(0), rat(-level), rat(0), rat(0)],
    ])
}

/// Checks that `p` is an odd prime dividing `level` exactly once.
pub fn check_level(p: i64, level: i64) -> Result<(), GroupError> {
    let ok = p >= 3
        && is_prime(p as u64)
        && level >= 1
        && level % p == 0
        && (level / p) % p != 0;
    if ok {
        Ok(())
    } else {
        Err(GroupError::BadLevel { p, level })
    }
}

/// All p^3 + 2p^2 + p left coset representatives of the U(p) double
/// coset at level N, with p an odd prime dividing N exactly once.
///
/// Every returned final representative has vanishing lower-left block and
/// multiplier exactly p (both asserted).  Left equivalence with the raw
/// forms and pairwise distinctness are checked by `verify_up_cosets`.
pub fn build_up_cosets(p: i64, level: i64) -> Result<Vec<UpCosetRep>, GroupError> {
    check_level(p, level)?;
    let n = level;
    let ab = AlphaBeta::for_level(p, n).expect("checked by check_level");
    let (alpha, beta) = (ab.alpha, ab.beta);
    let mut out = Vec::with_capacity((p * p * p + 2 * p * p + p) as usize);

    let push = |out: &mut Vec<UpCosetRep>,
                family: CosetFamily,
                params: [i64; 3],
                original: Mat4,
                final_mat: Mat4| {
        let final_rep = SimilitudeMatrix::new(final_mat)
            .expect("coset representative must be a similitude");
        assert_eq!(final_rep.multiplier(), &rat(p), "{family} multiplier");
        assert!(
            final_rep.mat().block(1, 0).is_zero(),
            "{family} lower-left block"
        );
        out.push(UpCosetRep {
            family,
            params,
            original,
            final_rep,
        });
    };

    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                let m = Mat4::from_rows([
                    [rat(1), rat(0), rat(a), rat(b)],
                    [rat(0), rat(1), rat(b), ratio(c, p)],
                    [rat(0), rat(0), rat(p), rat(0)],
                    [rat(0), rat(0), rat(0), rat(p)],
                ]);
                push(&mut out, CosetFamily::BTranslation, [a, b, c], m.clone(), m);
            }
        }
    }

    for a in 0..p {
        for c in 0..p {
            let m = Mat4::from_rows([
                [rat(p), rat(0), rat(0), rat(0)],
                [rat(-a), rat(1), rat(0), ratio(c, p)],
                [rat(0), rat(0), rat(1), rat(a)],
                [rat(0), rat(0), rat(0), rat(p)],
            ]);
            push(&mut out, CosetFamily::MixedDiagonal, [a, c, 0], m.clone(), m);
        }
    }

    for a in 0..p {
        for b in 0..p {
            let original = Mat4::from_rows([
                [rat(1), rat(-b * n), rat(a), rat(0)],
                [rat(0), rat(0), rat(b), ratio(1, n)],
                [rat(0), rat(0), rat(p), rat(0)],
                [rat(0), rat(-p * n), rat(0), rat(0)],
            ]);
            let final_mat = Mat4::from_rows([
                [rat(1), rat(-b * n), rat(a), rat(0)],
                [rat(0), rat(-p), rat(0), rat(0)],
                [rat(0), rat(0), rat(p), rat(0)],
                [rat(0), rat(0), rat(-b * n), rat(-1)],
            ]);
            push(
                &mut out,
                CosetFamily::FrickeBTranslation,
                [a, b, 0],
                original,
                final_mat,
            );
        }
    }

    for a in 0..p {
        let original = Mat4::from_rows([
            [rat(p), rat(0), rat(0), rat(0)],
            [rat(-a), rat(0), rat(0), ratio(1, n)],
            [rat(0), rat(-a * n), rat(1), rat(0)],
            [rat(0), rat(-p * n), rat(0), rat(0)],
        ]);
        let final_mat = if a == 0 {
            Mat4::from_i64([[p, 0, 0, 0], [0, p, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        } else {
            let abar = inv_mod(a, p);
            Mat4::from_rows([
                [rat(p), rat(n * beta), rat(-beta * abar), rat(0)],
                [rat(-1), rat(alpha * p), rat(0), ratio(abar, n)],
                [rat(0), rat(0), rat(alpha * p), rat(1)],
                [rat(0), rat(0), rat(-n * beta), rat(p)],
            ])
        };
        push(
            &mut out,
            CosetFamily::FrickeDiagonal,
            [a, 0, 0],
            original,
            final_mat,
        );
    }

    Ok(out)
}

/// The paramodular element whose left action rewrites the fourth-family
/// raw form with unit parameter `a` into block-upper-triangular shape.
///
/// Asserts membership of the result in the paramodular group and that the
/// product with the raw form reproduces the rewritten representative.
pub fn construct_g(a: i64, p: i64, level: i64) -> Result<Mat4, GroupError> {
    check_level(p, level)?;
    if a.rem_euclid(p) == 0 {
        return Err(GroupError::BadLevel { p, level });
    }
    let n = level;
    let a = a.rem_euclid(p);
    let abar = inv_mod(a, p);
    let ab = AlphaBeta::for_level(p, n).expect("checked by check_level");
    let (alpha, beta) = (ab.alpha, ab.beta);
    let g = Mat4::from_rows([
        [
            rat(1),
            rat(0),
            rat(-beta * abar),
            rat(beta * (a * abar - 1) / p),
        ],
        [rat((a * abar - 1) / p), rat(abar), rat(0), ratio(-alpha, n)],
        [rat(a * n / p), rat(n), rat(alpha * p), rat(-alpha * a)],
        [rat(n * a), rat(n * p), rat(-n * beta), rat(n * beta * a / p)],
    ]);
    assert!(
        GroupPattern::Paramodular { level: n }.contains4(&g),
        "constructed matrix must lie in the level-{n} paramodular group"
    );
    let reps = fourth_family_pair(a, p, n);
    assert_eq!(&g * &reps.0, reps.1, "product must match the rewritten form");
    Ok(g)
}

/// Raw and rewritten fourth-family representative for unit parameter `a`.
fn fourth_family_pair(a: i64, p: i64, n: i64) -> (Mat4, Mat4) {
    let ab = AlphaBeta::for_level(p, n).expect("caller validated the level");
    let abar = inv_mod(a, p);
    let original = Mat4::from_rows([
        [rat(p), rat(0), rat(0), rat(0)],
        [rat(-a), rat(0), rat(0), ratio(1, n)],
        [rat(0), rat(-a * n), rat(1), rat(0)],
        [rat(0), rat(-p * n), rat(0), rat(0)],
    ]);
    let rewritten = Mat4::from_rows([
        [rat(p), rat(n * ab.beta), rat(-ab.beta * abar), rat(0)],
        [rat(-1), rat(ab.alpha * p), rat(0), ratio(abar, n)],
        [rat(0), rat(0), rat(ab.alpha * p), rat(1)],
        [rat(0), rat(0), rat(-n * ab.beta), rat(p)],
    ]);
    (original, rewritten)
}

/// Summary of the structural checks on a coset list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetVerification {
    pub family_counts: Vec<(CosetFamily, usize)>,
    pub total: usize,
    pub multiplier_ok: bool,
    pub parabolic_ok: bool,
    pub left_equivalent_ok: bool,
    pub pairwise_distinct_ok: bool,
}

impl CosetVerification {
    pub fn all_ok(&self) -> bool {
        self.multiplier_ok
            && self.parabolic_ok
            && self.left_equivalent_ok
            && self.pairwise_distinct_ok
    }
}

/// Full verification of a coset list: family counts, multiplier p,
/// vanishing lower-left blocks, left equivalence of raw and rewritten
/// forms, and pairwise distinctness of the left cosets.
pub fn verify_up_cosets(reps: &[UpCosetRep], p: i64, level: i64) -> CosetVerification {
    let family_counts = CosetFamily::all()
        .iter()
        .map(|&f| (f, reps.iter().filter(|r| r.family == f).count()))
        .collect();
    let multiplier_ok = reps.iter().all(|r| r.final_rep.multiplier() == &rat(p));
    let parabolic_ok = reps.iter().all(|r| r.final_rep.mat().block(1, 0).is_zero());
    let left_equivalent_ok = reps
        .par_iter()
        .all(|r| same_left_coset(&r.original, r.final_rep.mat(), level));
    let inverses: Vec<Mat4> = reps
        .par_iter()
        .map(|r| r.final_rep.mat().inverse().expect("similitude"))
        .collect();
    let pairwise_distinct_ok = (0..reps.len()).into_par_iter().all(|i| {
        let pattern = GroupPattern::Paramodular { level };
        ((i + 1)..reps.len()).all(|j| {
            !pattern.contains4(&(reps[i].final_rep.mat() * &inverses[j]))
        })
    });
    CosetVerification {
        family_counts,
        total: reps.len(),
        multiplier_ok,
        parabolic_ok,
        left_equivalent_ok,
        pairwise_distinct_ok,
    }
}
