//! Binary quadratic form utilities.
//!
//! An index (n, r, mN) is also the positive form n x^2 + r x y + mN y^2.
//! This module classifies fundamental discriminants, collects the
//! fundamental coefficients of a table, and finds primes represented by
//! the Fricke image of a primitive index together with the unimodular
//! change of variables that moves the prime into the corner entry.

use std::collections::BTreeSet;
use std::fmt;

use crate::arith::{ext_gcd, gcd_i64, is_prime, is_squarefree};
use crate::fourier::{fricke_index, gamma0_transform, FourierTable, QuadIndex};
use crate::mat::Mat2;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BqfError {
    /// The index has content > 1, so its form represents no prime.
    NotPrimitive { content: i64 },
    /// The coefficient search ran out of admissible (c, d) pairs.
    NotFound { search_bound: i64 },
}

impl fmt::Display for BqfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BqfError::NotPrimitive { content } => {
                write!(f, "index has content {content}, expected a primitive index")
            }
            BqfError::NotFound { search_bound } => {
                write!(f, "no admissible prime with coefficients up to {search_bound}")
            }
        }
    }
}

impl std::error::Error for BqfError {}

/// gcd of the three index entries.
pub fn content(t: &QuadIndex) -> i64 {
    t.content()
}

/// Tests whether `d` is a fundamental discriminant: square-free and
/// congruent to 1 mod 4, or four times a square-free number congruent
/// to 2 or 3 mod 4.
pub fn is_fundamental(d: i128) -> bool {
    let squarefree = |x: i128| {
        let a = u64::try_from(x.unsigned_abs()).expect("discriminant magnitude fits in u64");
        a != 0 && is_squarefree(a)
    };
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let d1 = d / 4;
            let m = d1.rem_euclid(4);
            (m == 2 || m == 3) && squarefree(d1)
        }
        _ => false,
    }
}

/// A prime represented by the Fricke image of an index, with the
/// change of variables that exhibits it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeRepresentation {
    pub c: i64,
    pub d: i64,
    /// The completion [[a, Nc], [b, d]] of (c, d) to determinant 1.
    pub matrix: Mat2,
    pub q: i64,
    /// The conjugated Fricke image, with bottom-right entry N q.
    pub image: QuadIndex,
}

/// Searches coprime (c, d) with 0 <= c, d <= `search_bound` such that
/// the Fricke image form of `t` takes the value q = c^2 Nm - c d r + d^2 n
/// at (Nc, d) with q an odd prime, q not dividing the level and not
/// excluded.  Pairs are visited in rings of growing maximum.
pub fn represent_prime(
    t: &QuadIndex,
    exclusions: &BTreeSet<i64>,
    search_bound: i64,
) -> Result<PrimeRepresentation, BqfError> {
    if !t.is_primitive() {
        return Err(BqfError::NotPrimitive { content: t.content() });
    }
    let level = t.level();
    let (n, r, m) = (t.n(), t.r(), t.mn() / level);
    let s_prime = fricke_index(t);
    for s in 1..=search_bound {
        let ring = (0..=s).map(|c| (c, s)).chain((0..s).map(|d| (s, d)));
        for (c, d) in ring {
            if gcd_i64(c, d) != 1 {
                continue;
            }
            let q = c * c * level * m - c * d * r + d * d * n;
            if q < 3 || q % 2 == 0 || !is_prime(q as u64) {
                continue;
            }
            if level % q == 0 || exclusions.contains(&q) {
                continue;
            }
            let matrix = complete_to_unimodular(c, d, level);
            let image = gamma0_transform(&s_prime, &matrix)
                .expect("completion lies in the upper congruence group");
            assert_eq!(image.mn(), level * q, "transformed corner entry");
            return Ok(PrimeRepresentation { c, d, matrix, q, image });
        }
    }
    Err(BqfError::NotFound { search_bound })
}

/// Completes coprime (c, d) to [[a, Nc], [b, d]] of determinant 1 with
/// a reduced into [0, |Nc|) when c is nonzero.
fn complete_to_unimodular(c: i64, d: i64, level: i64) -> Mat2 {
    let (g, x, y) = ext_gcd(d, level * c);
    assert_eq!(g.abs(), 1, "d and Nc are coprime once q passed the filters");
    let (mut a, mut b) = (g * x, -g * y);
    if c != 0 {
        let nc = level * c;
        let reduced = a.rem_euclid(nc.abs());
        let shift = (reduced - a) / nc;
        a += shift * nc;
        b += shift * d;
    }
    let matrix = Mat2::from_i64([[a, level * c], [b, d]]);
    debug_assert_eq!(matrix.det(), crate::rational::rat(1));
    matrix
}

/// All certified coefficients at indices with fundamental discriminant,
/// ordered by |disc|.
pub fn fundamental_search(table: &FourierTable) -> Vec<(QuadIndex, Rational)> {
    let cb = table.certified_bound() as i128;
    let mut out: Vec<(QuadIndex, Rational)> = table
        .iter()
        .filter(|(idx, _)| idx.abs_disc() <= cb && is_fundamental(idx.disc()))
        .map(|(idx, v)| (*idx, v.clone()))
        .collect();
    out.sort_by_key(|(idx, _)| *idx);
    for (idx, _) in &out {
        assert!(idx.is_primitive(), "a fundamental discriminant forces content 1");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn idx(n: i64, r: i64, mn: i64, level: i64) -> QuadIndex {
        QuadIndex::new(n, r, mn, level).unwrap()
    }

    #[test]
    fn content_examples() {
        assert_eq!(content(&idx(2, 2, 2, 1)), 2);
        assert_eq!(content(&idx(1, 1, 3, 3)), 1);
        assert_eq!(content(&idx(6, 3, 9, 1)), 3);
    }

    #[test]
    fn fundamental_examples() {
        assert!(is_fundamental(-3));
        assert!(!is_fundamental(-12));
        assert!(is_fundamental(-4));
        assert!(is_fundamental(-7));
        assert!(is_fundamental(-8));
        assert!(is_fundamental(-11));
        assert!(is_fundamental(-15));
        assert!(is_fundamental(5));
        assert!(is_fundamental(8));
        assert!(is_fundamental(12));
        assert!(!is_fundamental(9));
        assert!(!is_fundamental(16));
        assert!(!is_fundamental(20));
        assert!(!is_fundamental(0));
        assert!(!is_fundamental(2));
        assert!(!is_fundamental(3));
        assert!(!is_fundamental(-27));
    }

    #[test]
    fn fundamental_matches_brute_force() {
        fn squarefree_by_division(x: i64) -> bool {
            let mut n = x.abs();
            if n == 0 {
                return false;
            }
            let mut p = 2;
            while p * p <= n {
                if n % (p * p) == 0 {
                    return false;
                }
                while n % p == 0 {
                    n /= p;
                }
                p += 1;
            }
            true
        }
        fn brute(d: i64) -> bool {
            if d.rem_euclid(4) == 1 {
                squarefree_by_division(d)
            } else if d % 4 == 0 {
                let d1 = d / 4;
                let m = d1.rem_euclid(4);
                (m == 2 || m == 3) && squarefree_by_division(d1)
            } else {
                false
            }
        }
        for d in -10_000i64..=10_000 {
            assert_eq!(is_fundamental(d as i128), brute(d), "d = {d}");
        }
    }

    #[test]
    fn represent_prime_first_example() {
        let rep = represent_prime(&idx(1, 1, 3, 3), &BTreeSet::new(), 50).unwrap();
        assert_eq!((rep.c, rep.d, rep.q), (1, 2, 5));
        assert_eq!(rep.matrix, Mat2::from_i64([[2, 3], [1, 2]]));
        assert_eq!(rep.image, idx(5, 17, 15, 3));
    }

    #[test]
    fn represent_prime_respects_exclusions() {
        let rep = represent_prime(&idx(1, 1, 3, 3), &BTreeSet::from([5]), 50).unwrap();
        assert_eq!((rep.c, rep.d, rep.q), (2, 1, 11));
        assert_eq!(rep.image.mn(), 33);
        let rep = represent_prime(&idx(1, 1, 3, 3), &BTreeSet::from([5, 11]), 50).unwrap();
        assert!(rep.q != 5 && rep.q != 11);
    }

    #[test]
    fn represent_prime_rejects_imprimitive() {
        assert_eq!(
            represent_prime(&idx(2, 2, 6, 3), &BTreeSet::new(), 50),
            Err(BqfError::NotPrimitive { content: 2 })
        );
    }

    #[test]
    fn represent_prime_exhausts_tiny_bound() {
        assert_eq!(
            represent_prime(&idx(1, 1, 3, 3), &BTreeSet::new(), 1),
            Err(BqfError::NotFound { search_bound: 1 })
        );
    }

    #[test]
    fn represent_prime_output_contract() {
        let cases = [
            idx(1, 0, 1, 1),
            idx(2, 1, 3, 1),
            idx(1, 1, 3, 3),
            idx(3, 2, 6, 3),
            idx(1, 0, 5, 5),
            idx(2, 1, 15, 15),
            idx(4, 3, 21, 21),
        ];
        for t in cases {
            let level = t.level();
            let rep = represent_prime(&t, &BTreeSet::from([3, 7]), 80).unwrap();
            assert!(rep.q % 2 == 1 && is_prime(rep.q as u64));
            assert!(level % rep.q != 0);
            assert!(rep.q != 3 && rep.q != 7);
            assert_eq!(gcd_i64(rep.c, rep.d), 1);
            assert!(rep.c.max(rep.d) <= 80);
            assert_eq!(rep.matrix.det(), rat(1));
            assert_eq!(rep.matrix.at(0, 1), &rat(level * rep.c));
            assert_eq!(rep.image.mn(), level * rep.q);
            assert_eq!(rep.image.disc(), t.disc());
        }
    }

    #[test]
    fn fundamental_search_examples() {
        let mut table = FourierTable::new(3, 2, 100, 100);
        table.insert(idx(1, 1, 3, 3), rat(1)).unwrap();
        let found = fundamental_search(&table);
        assert_eq!(found, vec![(idx(1, 1, 3, 3), rat(1))]);

        let mut table = FourierTable::new(1, 2, 100, 100);
        table.insert(idx(1, 2, 4, 1), rat(1)).unwrap();
        assert!(fundamental_search(&table).is_empty());

        let empty = FourierTable::new(3, 2, 100, 100);
        assert!(fundamental_search(&empty).is_empty());
    }

    #[test]
    fn fundamental_search_orders_by_disc_and_respects_certification() {
        let mut table = FourierTable::new(1, 2, 100, 8);
        for (n, r, mn) in [(1, 1, 1), (1, 0, 1), (1, 0, 2), (1, 1, 2), (1, 0, 3), (1, 1, 3)] {
            table.insert(idx(n, r, mn, 1), rat(n + mn)).unwrap();
        }
        let found = fundamental_search(&table);
        let discs: Vec<i128> = found.iter().map(|(t, _)| t.disc()).collect();
        assert_eq!(discs, vec![-3, -4, -7, -8]);
    }
}
