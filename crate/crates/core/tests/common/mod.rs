#![allow(dead_code)]

use bm_core::{QMatrix, QVector, Rational};
use rand::Rng;

pub fn small_rational<R: Rng>(rng: &mut R, num: i64, den: i64) -> Rational {
    Rational::new(rng.random_range(-num..=num).into(), rng.random_range(1..=den).into())
}

/// Uniformly drawn small-height rational matrix; may be singular.
pub fn random_matrix<R: Rng>(rng: &mut R, n: usize, num: i64, den: i64) -> QMatrix {
    let rows = (0..n)
        .map(|_| QVector((0..n).map(|_| small_rational(rng, num, den)).collect()))
        .collect();
    QMatrix::from_rows(rows).unwrap()
}

pub fn random_invertible<R: Rng>(rng: &mut R, n: usize, num: i64, den: i64) -> QMatrix {
    loop {
        let m = random_matrix(rng, n, num, den);
        if m.inverse().is_ok() {
            return m;
        }
    }
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize, num: i64, den: i64) -> QVector {
    QVector((0..n).map(|_| small_rational(rng, num, den)).collect())
}
