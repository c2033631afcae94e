//! Exact vectors and square matrices over [`Rational`].

use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QVector(pub Vec<Rational>);

impl QVector {
    pub fn zeros(n: usize) -> Self {
        QVector(vec![Rational::zero(); n])
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        QVector(xs.iter().map(|&x| rational::int(x)).collect())
    }

    /// Builds a vector from `(numerator, denominator)` pairs.
    pub fn from_fracs(xs: &[(i64, i64)]) -> Self {
        QVector(xs.iter().map(|&(p, d)| rational::q(p, d)).collect())
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Rational::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn dot(&self, other: &QVector) -> Rational {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scale(&self, s: &Rational) -> QVector {
        QVector(self.0.iter().map(|x| x * s).collect())
    }

    pub fn norm_inf(&self) -> Rational {
        self.0
            .iter()
            .map(|x| x.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn norm_1(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, x| acc + x.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(rational::to_f64).collect()
    }
}

impl fmt::Debug for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

impl Index<usize> for QVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for QVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl Add for &QVector {
    type Output = QVector;
    fn add(self, rhs: &QVector) -> QVector {
        QVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &QVector {
    type Output = QVector;
    fn sub(self, rhs: &QVector) -> QVector {
        QVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &QVector {
    type Output = QVector;
    fn neg(self) -> QVector {
        QVector(self.0.iter().map(|a| -a).collect())
    }
}

/// Square `n x n` rational matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    n: usize,
    rows: Vec<QVector>,
}

impl QMatrix {
    pub fn from_rows(rows: Vec<QVector>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Degenerate("empty matrix".into()));
        }
        for row in &rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        Ok(QMatrix { n, rows })
    }

    /// Integer matrix literal; panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| QVector::from_ints(r)).collect())
            .expect("square integer matrix")
    }

    pub fn identity(n: usize) -> Self {
        QMatrix {
            n,
            rows: (0..n).map(|i| QVector::unit(n, i)).collect(),
        }
    }

    pub fn diag(d: &[Rational]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for (i, x) in d.iter().enumerate() {
            m.rows[i][i] = x.clone();
        }
        m
    }

    pub fn zeros(n: usize) -> Self {
        QMatrix {
            n,
            rows: vec![QVector::zeros(n); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[QVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &QVector {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        self.rows[i][j] = x;
    }

    pub fn column(&self, j: usize) -> QVector {
        QVector(self.rows.iter().map(|r| r[j].clone()).collect())
    }

    pub fn transpose(&self) -> QMatrix {
        QMatrix {
            n: self.n,
            rows: (0..self.n).map(|j| self.column(j)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &QVector) -> QVector {
        QVector(self.rows.iter().map(|r| r.dot(v)).collect())
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        let cols: Vec<QVector> = (0..other.n).map(|j| other.column(j)).collect();
        QMatrix {
            n: self.n,
            rows: self
                .rows
                .iter()
                .map(|r| QVector(cols.iter().map(|c| r.dot(c)).collect()))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Rational) -> QMatrix {
        QMatrix {
            n: self.n,
            rows: self.rows.iter().map(|r| r.scale(s)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    /// Determinant by fraction-exact Gaussian elimination.
    pub fn det(&self) -> Rational {
        let mut a: Vec<Vec<Rational>> = self.rows.iter().map(|r| r.0.clone()).collect();
        let n = self.n;
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let pivot = a[col][col].clone();
            det *= &pivot;
            let (top, rest) = a.split_at_mut(col + 1);
            let pivot_row = &top[col];
            for row in rest.iter_mut().filter(|row| !row[col].is_zero()) {
                let f = &row[col] / &pivot;
                for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= &f * y;
                }
            }
        }
        det
    }

    /// Exact inverse by Gauss-Jordan elimination with rational pivots.
    pub fn inverse(&self) -> Result<QMatrix> {
        let n = self.n;
        let mut a: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.0.clone();
                row.extend((0..n).map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                }));
                row
            })
            .collect();
        for col in 0..n {
            let p = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or(Error::SingularMatrix)?;
            a.swap(p, col);
            let inv = a[col][col].recip();
            for x in a[col].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = a[col].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        Ok(QMatrix {
            n,
            rows: a.into_iter().map(|r| QVector(r[n..].to_vec())).collect(),
        })
    }

    /// Solves `self * x = b` exactly.
    pub fn solve(&self, b: &QVector) -> Result<QVector> {
        Ok(self.inverse()?.mul_vec(b))
    }

    /// Row-major canonical `"p/q"` encoding; used as an exact identity key.
    pub fn canonical_key(&self) -> String {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(rational::to_canonical)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(QVector::to_f64).collect()
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{r:?}")?;
        }
        f.write_str("]")
    }
}

/// Inverse of a square matrix; see [`QMatrix::inverse`].
pub fn mat_inverse(m: &QMatrix) -> Result<QMatrix> {
    m.inverse()
}

/// 2D cross product `a x b`.
pub fn cross2(a: &QVector, b: &QVector) -> Rational {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Orientation of the triple: twice the signed area of `(a, b, c)`.
pub fn orient2d(a: &QVector, b: &QVector, c: &QVector) -> Rational {
    cross2(&(b - a), &(c - a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn base_nice() -> QMatrix {
        QMatrix::from_rows(vec![
            QVector::from_fracs(&[(1, 3), (-1, 1), (-1, 1)]),
            QVector::from_fracs(&[(-1, 1), (1, 3), (-1, 1)]),
            QVector::from_fracs(&[(-1, 1), (-1, 1), (1, 3)]),
        ])
        .unwrap()
    }

    /// Cofactor expansion, independent of the elimination path.
    fn cofactor_det(m: &[Vec<Rational>]) -> Rational {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, x)| x.clone())
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { rational::int(1) } else { rational::int(-1) };
                s * &m[0][j] * cofactor_det(&minor)
            })
            .fold(Rational::zero(), |a, b| a + b)
    }

    fn adjugate_inverse(m: &QMatrix) -> QMatrix {
        let n = m.n();
        let a: Vec<Vec<Rational>> = m.rows().iter().map(|r| r.0.clone()).collect();
        let det = cofactor_det(&a);
        let mut out = QMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<Rational>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| a[r][c].clone())
                            .collect()
                    })
                    .collect();
                let s = if (i + j) % 2 == 0 { rational::int(1) } else { rational::int(-1) };
                // adj(A)[j][i] = cofactor(i, j)
                out.set(j, i, s * cofactor_det(&minor) / &det);
            }
        }
        out
    }

    #[test]
    fn inverse_of_identity() {
        assert_eq!(mat_inverse(&QMatrix::identity(3)).unwrap(), QMatrix::identity(3));
    }

    #[test]
    fn inverse_2x2_closed_form() {
        let m = QMatrix::from_ints(&[&[1, 1], &[1, -1]]);
        let expected = QMatrix::from_rows(vec![
            QVector::from_fracs(&[(1, 2), (1, 2)]),
            QVector::from_fracs(&[(1, 2), (-1, 2)]),
        ])
        .unwrap();
        assert_eq!(mat_inverse(&m).unwrap(), expected);
    }

    #[test]
    fn inverse_of_nice_matrix_matches_adjugate() {
        let m = base_nice();
        let oracle = adjugate_inverse(&m);
        // Frozen from the adjugate oracle: 3/10 on the diagonal, -9/20 elsewhere.
        let frozen = QMatrix::from_rows(vec![
            QVector::from_fracs(&[(3, 10), (-9, 20), (-9, 20)]),
            QVector::from_fracs(&[(-9, 20), (3, 10), (-9, 20)]),
            QVector::from_fracs(&[(-9, 20), (-9, 20), (3, 10)]),
        ])
        .unwrap();
        assert_eq!(oracle, frozen);
        let inv = mat_inverse(&m).unwrap();
        assert_eq!(inv, frozen);
        assert!(m.mul(&inv).is_identity());
        assert_eq!(m.det(), cofactor_det(&m.rows().iter().map(|r| r.0.clone()).collect::<Vec<_>>()));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = QMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(mat_inverse(&m), Err(Error::SingularMatrix));
        assert_eq!(m.det(), Rational::zero());
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let r = QMatrix::from_rows(vec![QVector::from_ints(&[1, 2]), QVector::from_ints(&[1])]);
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn norms_and_key() {
        let v = QVector::from_fracs(&[(1, 3), (-2, 1), (1, 2)]);
        assert_eq!(v.norm_inf(), rational::int(2));
        assert_eq!(v.norm_1(), q(17, 6));
        assert_eq!(
            QMatrix::from_ints(&[&[1, 0], &[0, -1]]).canonical_key(),
            "1/1,0/1;0/1,-1/1"
        );
    }
}
