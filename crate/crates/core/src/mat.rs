//! Exact 2x2 and 4x4 matrices over the rationals and symplectic
//! similitudes.
//!
//! A similitude is a 4x4 matrix `g` with `g^t J g = mu J` for a nonzero
//! rational `mu`, where `J` is the standard antisymmetric form with
//! identity blocks.  `SimilitudeMatrix` stores the matrix together with
//! its verified multiplier; the only constructor recomputes the
//! multiplier, so the pair can never go out of sync.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::rational::{rat, Rational};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatError {
    /// `g^t J g` is not a nonzero scalar multiple of `J`.
    NotSimilitude,
    /// The lower-left 2x2 block is nonzero.
    NotParabolic,
    /// The stored multiplier disagrees with the block identity
    /// `A D^t = mu I`.  Indicates a construction bug.
    BrokenSimilitude,
    /// The matrix is singular.
    Singular,
}

impl fmt::Display for MatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatError::NotSimilitude => write!(f, "matrix is not a symplectic similitude"),
            MatError::NotParabolic => write!(f, "lower-left block is nonzero"),
            MatError::BrokenSimilitude => write!(f, "block identity A D^t = mu I fails"),
            MatError::Singular => write!(f, "matrix is singular"),
        }
    }
}

impl std::error::Error for MatError {}

/// Dense 2x2 matrix over the rationals, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2 {
    e: [Rational; 4],
}

impl Mat2 {
    pub fn new(e: [Rational; 4]) -> Mat2 {
        Mat2 { e }
    }

    pub fn from_i64(rows: [[i64; 2]; 2]) -> Mat2 {
        Mat2::new([
            rat(rows[0][0]),
            rat(rows[0][1]),
            rat(rows[1][0]),
            rat(rows[1][1]),
        ])
    }

    pub fn identity() -> Mat2 {
        Mat2::from_i64([[1, 0], [0, 1]])
    }

    pub fn zero() -> Mat2 {
        Mat2::from_i64([[0, 0], [0, 0]])
    }

    pub fn at(&self, i: usize, j: usize) -> &Rational {
        &self.e[2 * i + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.e[2 * i + j] = v;
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new([
            self.e[0].clone(),
            self.e[2].clone(),
            self.e[1].clone(),
            self.e[3].clone(),
        ])
    }

    pub fn det(&self) -> Rational {
        &self.e[0] * &self.e[3] - &self.e[1] * &self.e[2]
    }

    pub fn trace(&self) -> Rational {
        &self.e[0] + &self.e[3]
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.e[1] == self.e[2]
    }

    pub fn scale(&self, c: &Rational) -> Mat2 {
        Mat2::new([
            c * &self.e[0],
            c * &self.e[1],
            c * &self.e[2],
            c * &self.e[3],
        ])
    }

    pub fn inverse(&self) -> Result<Mat2, MatError> {
        let d = self.det();
        if d.is_zero() {
            return Err(MatError::Singular);
        }
        Ok(Mat2::new([
            &self.e[3] / &d,
            -&self.e[1] / &d,
            -&self.e[2] / &d,
            &self.e[0] / &d,
        ]))
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = Rational::zero();
                for l in 0..2 {
                    acc += self.at(i, l) * rhs.at(l, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

impl Add for &Mat2 {
    type Output = Mat2;
    fn add(self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.set(i, j, self.at(i, j) + rhs.at(i, j));
            }
        }
        out
    }
}

impl Sub for &Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.set(i, j, self.at(i, j) - rhs.at(i, j));
            }
        }
        out
    }
}

impl Neg for &Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(&rat(-1))
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]",
            self.e[0], self.e[1], self.e[2], self.e[3]
        )
    }
}

/// Dense 4x4 matrix over the rationals, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat4 {
    e: Vec<Rational>,
}

impl Mat4 {
    pub fn new(e: Vec<Rational>) -> Mat4 {
        assert_eq!(e.len(), 16);
        Mat4 { e }
    }

    pub fn from_rows(rows: [[Rational; 4]; 4]) -> Mat4 {
        Mat4::new(rows.into_iter().flatten().collect())
    }

    pub fn from_i64(rows: [[i64; 4]; 4]) -> Mat4 {
        Mat4::new(rows.iter().flatten().map(|&v| rat(v)).collect())
    }

    pub fn identity() -> Mat4 {
        Mat4::from_i64([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    }

    pub fn zero() -> Mat4 {
        Mat4::new(vec![Rational::zero(); 16])
    }

    /// The standard antisymmetric form with identity off-diagonal blocks.
    pub fn j() -> Mat4 {
        Mat4::from_i64([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    }

    pub fn at(&self, i: usize, j: usize) -> &Rational {
        &self.e[4 * i + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.e[4 * i + j] = v;
    }

    pub fn transpose(&self) -> Mat4 {
        let mut out = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Mat4 {
        Mat4::new(self.e.iter().map(|v| c * v).collect())
    }

    /// 2x2 block with rows `2*bi..2*bi+2` and columns `2*bj..2*bj+2`.
    pub fn block(&self, bi: usize, bj: usize) -> Mat2 {
        Mat2::new([
            self.at(2 * bi, 2 * bj).clone(),
            self.at(2 * bi, 2 * bj + 1).clone(),
            self.at(2 * bi + 1, 2 * bj).clone(),
            self.at(2 * bi + 1, 2 * bj + 1).clone(),
        ])
    }

    pub fn det(&self) -> Rational {
        // Fraction-free enough at 4x4 scale: Laplace along the first row
        // with 3x3 cofactors.
        let minor3 = |r: [usize; 3], c: [usize; 3]| -> Rational {
            let a = |i: usize, j: usize| self.at(r[i], c[j]);
            a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
        };
        let rows = [1, 2, 3];
        let cols = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
        let mut acc = Rational::zero();
        for j in 0..4 {
            if self.at(0, j).is_zero() {
                continue;
            }
            let term = self.at(0, j) * &minor3(rows, cols[j]);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Mat4, MatError> {
        let mut a = self.e.clone();
        let mut b = Mat4::identity().e;
        for col in 0..4 {
            let pivot = (col..4)
                .find(|&r| !a[4 * r + col].is_zero())
                .ok_or(MatError::Singular)?;
            if pivot != col {
                for j in 0..4 {
                    a.swap(4 * pivot + j, 4 * col + j);
                    b.swap(4 * pivot + j, 4 * col + j);
                }
            }
            let inv = a[4 * col + col].clone().recip();
            for j in 0..4 {
                a[4 * col + j] = &a[4 * col + j] * &inv;
                b[4 * col + j] = &b[4 * col + j] * &inv;
            }
            for r in 0..4 {
                if r == col || a[4 * r + col].is_zero() {
                    continue;
                }
                let f = a[4 * r + col].clone();
                for j in 0..4 {
                    let av = &a[4 * col + j] * &f;
                    let bv = &b[4 * col + j] * &f;
                    a[4 * r + j] = &a[4 * r + j] - &av;
                    b[4 * r + j] = &b[4 * r + j] - &bv;
                }
            }
        }
        Ok(Mat4::new(b))
    }
}

impl Mul for &Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: &Mat4) -> Mat4 {
        let mut out = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Rational::zero();
                for l in 0..4 {
                    let x = self.at(i, l);
                    if x.is_zero() {
                        continue;
                    }
                    acc += x * rhs.at(l, j);
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

impl fmt::Display for Mat4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..4 {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(
                f,
                "[{},{},{},{}]",
                self.at(i, 0),
                self.at(i, 1),
                self.at(i, 2),
                self.at(i, 3)
            )?;
        }
        write!(f, "]")
    }
}

/// The multiplier of `g`: the scalar `mu != 0` with `g^t J g == mu J`.
pub fn multiplier(g: &Mat4) -> Result<Rational, MatError> {
    let j = Mat4::j();
    let s = &(&g.transpose() * &j) * g;
    let mu = s.at(0, 2).clone();
    if mu.is_zero() || s != j.scale(&mu) {
        return Err(MatError::NotSimilitude);
    }
    Ok(mu)
}

/// A 4x4 similitude with its verified multiplier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilitudeMatrix {
    mat: Mat4,
    mu: Rational,
}

impl SimilitudeMatrix {
    pub fn new(mat: Mat4) -> Result<SimilitudeMatrix, MatError> {
        let mu = multiplier(&mat)?;
        Ok(SimilitudeMatrix { mat, mu })
    }

    pub fn mat(&self) -> &Mat4 {
        &self.mat
    }

    pub fn multiplier(&self) -> &Rational {
        &self.mu
    }

    pub fn mul(&self, rhs: &SimilitudeMatrix) -> SimilitudeMatrix {
        let mat = &self.mat * &rhs.mat;
        let mu = &self.mu * &rhs.mu;
        debug_assert_eq!(multiplier(&mat).as_ref(), Ok(&mu));
        SimilitudeMatrix { mat, mu }
    }

    pub fn inverse(&self) -> SimilitudeMatrix {
        let mat = self.mat.inverse().expect("similitudes are invertible");
        let mu = self.mu.clone().recip();
        debug_assert_eq!(multiplier(&mat).as_ref(), Ok(&mu));
        SimilitudeMatrix { mat, mu }
    }
}

/// Upper blocks `(A, B, D)` of a similitude with vanishing lower-left
/// block, after checking the identity `A D^t == mu I`.
pub fn block_parabolic_parts(g: &SimilitudeMatrix) -> Result<(Mat2, Mat2, Mat2), MatError> {
    let c = g.mat().block(1, 0);
    if !c.is_zero() {
        return Err(MatError::NotParabolic);
    }
    let a = g.mat().block(0, 0);
    let b = g.mat().block(0, 1);
    let d = g.mat().block(1, 1);
    let lhs = &a * &d.transpose();
    if lhs != Mat2::identity().scale(g.multiplier()) {
        return Err(MatError::BrokenSimilitude);
    }
    Ok((a, b, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn identity_multiplier() {
        assert_eq!(multiplier(&Mat4::identity()), Ok(rat(1)));
    }

    #[test]
    fn diagonal_similitudes() {
        let g = Mat4::from_i64([[3, 0, 0, 0], [0, 3, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert_eq!(multiplier(&g), Ok(rat(3)));
        let g = Mat4::from_i64([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 5, 0], [0, 0, 0, 5]]);
        assert_eq!(multiplier(&g), Ok(rat(5)));
    }

    #[test]
    fn fricke_proxy_multiplier() {
        // The involution-like element of level N has multiplier N.
        for n in [3i64, 5, 7, 15] {
            let g = Mat4::from_rows([
                [rat(0), rat(n), rat(0), rat(0)],
                [rat(-1), rat(0), rat(0), rat(0)],
                [rat(0), rat(0), rat(0), rat(1)],
                [rat(0), rat(0), rat(-n), rat(0)],
            ]);
            assert_eq!(multiplier(&g), Ok(rat(n)));
            // Independent check of the defining relation.
            let j = Mat4::j();
            assert_eq!(&(&g.transpose() * &j) * &g, j.scale(&rat(n)));
        }
    }

    #[test]
    fn non_similitude_rejected() {
        let g = Mat4::from_i64([[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert_eq!(multiplier(&g), Err(MatError::NotSimilitude));
        assert_eq!(multiplier(&Mat4::zero()), Err(MatError::NotSimilitude));
    }

    #[test]
    fn block_parts_of_coset_product() {
        // Product matrix arising from the fourth coset family at
        // (a, p, N) = (3, 3, 3) with alpha = 0, beta = 1.
        let g = SimilitudeMatrix::new(Mat4::from_rows([
            [rat(3), rat(3), rat(-1), rat(0)],
            [rat(-1), rat(0), rat(0), ratio(1, 3)],
            [rat(0), rat(0), rat(0), rat(1)],
            [rat(0), rat(0), rat(-3), rat(3)],
        ]))
        .unwrap();
        assert_eq!(g.multiplier(), &rat(3));
        let (a, b, d) = block_parabolic_parts(&g).unwrap();
        assert_eq!(a, Mat2::from_i64([[3, 3], [-1, 0]]));
        assert_eq!(
            b,
            Mat2::new([rat(-1), rat(0), rat(0), ratio(1, 3)])
        );
        assert_eq!(d, Mat2::from_i64([[0, 1], [-3, 3]]));
        assert_eq!(&a * &d.transpose(), Mat2::identity().scale(&rat(3)));
    }

    #[test]
    fn non_parabolic_rejected() {
        let g = SimilitudeMatrix::new(Mat4::j()).unwrap();
        assert_eq!(block_parabolic_parts(&g), Err(MatError::NotParabolic));
    }

    #[test]
    fn inverse_4x4() {
        let g = Mat4::from_i64([[1, 0, 2, 1], [0, 1, 1, 0], [0, 0, 3, 0], [0, 0, 0, 3]]);
        let inv = g.inverse().unwrap();
        assert_eq!(&g * &inv, Mat4::identity());
        assert_eq!(&inv * &g, Mat4::identity());
    }

    #[test]
    fn det_4x4() {
        let g = Mat4::from_i64([[2, 0, 0, 0], [0, 3, 0, 0], [1, 1, 5, 0], [0, 2, 0, 7]]);
        assert_eq!(g.det(), rat(2 * 3 * 5 * 7));
        assert!(Mat4::zero().det().is_zero());
    }

    #[test]
    fn multiplier_multiplicative() {
        let g = SimilitudeMatrix::new(Mat4::from_i64([
            [3, 0, 0, 0],
            [0, 3, 0, 0],
            [0, 0, 1, 0],
            [0, 0, 0, 1],
        ]))
        .unwrap();
        let h = SimilitudeMatrix::new(Mat4::j()).unwrap();
        let gh = g.mul(&h);
        assert_eq!(gh.multiplier(), &rat(3));
        let ginv = g.inverse();
        assert_eq!(ginv.multiplier(), &ratio(1, 3));
        assert_eq!(g.mul(&ginv).mat(), &Mat4::identity());
    }
}
