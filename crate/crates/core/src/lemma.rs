//! Executable forms of the corner-square lemma for planar parallelograms and
//! of the vertex-localization claim for three-dimensional sandwiches.
//!
//! The corner squares are the closed squares
//! `W(e1, e2) = {1/3 <= e1 x <= 1, 1/3 <= e2 y <= 1}`. When
//! `5/9 C_2 ⊆ P ⊆ C_2` for a 0-symmetric parallelogram `P`, each of the four
//! squares holds exactly one vertex of `P`; 5/9 is the smallest constant for
//! which this holds.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certify::{certify_sandwich, sign_pattern, OperatorT};
use crate::error::{Error, Result};
use crate::linalg::{cross2, QVector};
use crate::polytope::{cube, polygon_to_h, v_in_h, VPolytope};
use crate::rational::{self, Rational};

/// The 0-symmetric parallelogram `conv{+-p, +-q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parallelogram2D {
    p: QVector,
    q: QVector,
}

impl Parallelogram2D {
    pub fn new(p: QVector, q: QVector) -> Result<Self> {
        if p.len() != 2 || q.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: if p.len() != 2 { p.len() } else { q.len() },
            });
        }
        if cross2(&p, &q).is_zero() {
            return Err(Error::Degenerate("p and q are linearly dependent".into()));
        }
        Ok(Parallelogram2D { p, q })
    }

    pub fn p(&self) -> &QVector {
        &self.p
    }

    pub fn q(&self) -> &QVector {
        &self.q
    }

    /// Vertices in counterclockwise order.
    pub fn polygon(&self) -> VPolytope {
        let (p, q) = (&self.p, &self.q);
        let vs = if cross2(p, q).is_positive() {
            vec![p.clone(), q.clone(), -p, -q]
        } else {
            vec![p.clone(), -q, -p, q.clone()]
        };
        VPolytope::new(vs).expect("four planar vertices")
    }
}

/// Exact check of `r C_2 ⊆ P ⊆ C_2`.
///
/// `x = a p + b q` lies in `P` iff `|a| + |b| <= 1`, i.e.
/// `|x × q| + |p × x| <= |p × q|`; by symmetry only the corners `(r, ±r)`
/// need testing.
pub fn check_square_sandwich(p: &Parallelogram2D, r: &Rational) -> bool {
    let one = rational::int(1);
    if p.p.norm_inf() > one || p.q.norm_inf() > one {
        return false;
    }
    let area = cross2(&p.p, &p.q).abs();
    [QVector(vec![r.clone(), r.clone()]), QVector(vec![r.clone(), -r])]
        .iter()
        .all(|x| cross2(x, &p.q).abs() + cross2(&p.p, x).abs() <= area)
}

/// [`check_square_sandwich`] through the generic halfspace machinery.
pub fn check_square_sandwich_generic(p: &Parallelogram2D, r: &Rational) -> bool {
    let (square_v, square_h) = cube(2).expect("dimension 2");
    let poly = p.polygon();
    if !v_in_h(&poly, &square_h).expect("planar") {
        return false;
    }
    let h = polygon_to_h(&poly).expect("parallelogram is strictly convex");
    v_in_h(&square_v.scale(r), &h).expect("planar")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CornerCount {
    /// Vertices per corner square, keyed by sign pattern such as `"+-"`.
    pub counts: BTreeMap<String, usize>,
    /// Vertices lying in none of the four squares.
    pub outside: usize,
}

impl CornerCount {
    pub fn all_ones(&self) -> bool {
        self.counts.values().all(|&c| c == 1)
    }
}

fn in_corner_band(x: &Rational) -> bool {
    let a = x.abs();
    a >= rational::q(1, 3) && a <= rational::int(1)
}

/// Counts the vertices `+-p, +-q` inside each closed corner square.
pub fn corner_classify(p: &Parallelogram2D) -> CornerCount {
    let mut counts: BTreeMap<String, usize> =
        ["--", "-+", "+-", "++"].into_iter().map(|k| (k.to_string(), 0)).collect();
    let mut outside = 0;
    for v in p.polygon().vertices() {
        if in_corner_band(&v[0]) && in_corner_band(&v[1]) {
            *counts.get_mut(&pattern_label(&sign_pattern(v))).expect("all keys present") += 1;
        } else {
            outside += 1;
        }
    }
    CornerCount { counts, outside }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub max_attempts: usize,
    /// Coordinates are drawn as `k / denominator`.
    pub denominator: i64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            max_attempts: 100_000,
            denominator: 10_000,
        }
    }
}

/// A rational point with `r <= |x|_inf <= 1`; with `on_boundary` the sup-norm is exactly 1.
fn band_point(rng: &mut ChaCha8Rng, r: &Rational, den: i64, on_boundary: bool) -> QVector {
    let lo = (r * Rational::from_integer(BigInt::from(den))).ceil().to_integer();
    let lo: i64 = lo.try_into().unwrap_or(den).clamp(0, den);
    let k = if on_boundary { den } else { rng.random_range(lo..=den) };
    let sign = if rng.random_bool(0.5) { 1 } else { -1 };
    let other = rng.random_range(-k..=k);
    let (x, y) = if rng.random_bool(0.5) { (sign * k, other) } else { (other, sign * k) };
    QVector(vec![rational::q(x, den), rational::q(y, den)])
}

/// Rejection-samples a parallelogram with `r C_2 ⊆ P ⊆ C_2`; deterministic in `seed`.
pub fn sample_valid_parallelogram(
    seed: u64,
    r: &Rational,
    config: &SamplerConfig,
) -> Result<Parallelogram2D> {
    if !r.is_positive() || *r >= rational::int(1) {
        return Err(Error::PreconditionViolated("r must lie in (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..config.max_attempts {
        let p = band_point(&mut rng, r, config.denominator, false);
        let q = band_point(&mut rng, r, config.denominator, false);
        let Ok(par) = Parallelogram2D::new(p, q) else {
            continue;
        };
        if check_square_sandwich(&par, r) {
            return Ok(par);
        }
    }
    Err(Error::SamplingExhausted(config.max_attempts))
}

const BLOCK: usize = 4096;

/// Searches for `P` with `r C_2 ⊆ P ⊆ C_2` whose vertices are not one per
/// corner square. Half of the candidates have their vertices pushed onto the
/// boundary of `C_2`, where such counterexamples live.
///
/// Attempts run in parallel blocks, each on its own stream of the seeded
/// generator; the hit from the lowest block is returned.
pub fn find_lemma_counterexample(
    r: &Rational,
    seed: u64,
    config: &SamplerConfig,
) -> Result<Parallelogram2D> {
    if !r.is_positive() || *r > rational::int(1) {
        return Err(Error::PreconditionViolated("r must lie in (0, 1]".into()));
    }
    let blocks = config.max_attempts.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .find_map_first(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let attempts = BLOCK.min(config.max_attempts - b * BLOCK);
            (0..attempts).find_map(|_| {
                let boundary = rng.random_bool(0.5);
                let p = band_point(&mut rng, r, config.denominator, boundary);
                let q = band_point(&mut rng, r, config.denominator, boundary);
                let par = Parallelogram2D::new(p, q).ok()?;
                (!corner_classify(&par).all_ones() && check_square_sandwich(&par, r)).then_some(par)
            })
        })
        .ok_or(Error::NotFound(config.max_attempts))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Claim3dReport {
    /// Every vertex has all coordinates in `[1/3, 1]` in absolute value.
    pub all_in_v: bool,
    /// Vertices per corner cube, keyed by sign pattern such as `"+--"`.
    pub occupancy: BTreeMap<String, usize>,
    pub occupied_cubes: usize,
    pub max_per_cube: usize,
}

impl Claim3dReport {
    pub fn holds(&self) -> bool {
        self.all_in_v && self.max_per_cube <= 1
    }
}

/// Vertex localization for an operator certifying `5/9 C_3 ⊆ T(C_3*) ⊆ C_3`.
pub fn claim3d_check(t: &OperatorT) -> Result<Claim3dReport> {
    if t.n() != 3 {
        return Err(Error::PreconditionViolated("operator must be 3x3".into()));
    }
    if certify_sandwich(t, &rational::q(5, 9)).is_err() {
        return Err(Error::PreconditionViolated(
            "operator does not certify at r = 5/9".into(),
        ));
    }
    let mut occupancy: BTreeMap<String, usize> = BTreeMap::new();
    for signs in crate::polytope::sign_vectors(3) {
        occupancy.insert(pattern_label(&sign_pattern(&QVector(signs))), 0);
    }
    let mut all_in_v = true;
    for v in t.image_vertices().vertices() {
        if v.iter().all(in_corner_band) {
            *occupancy.entry(pattern_label(&sign_pattern(v))).or_default() += 1;
        } else {
            all_in_v = false;
        }
    }
    let occupied_cubes = occupancy.values().filter(|&&c| c > 0).count();
    let max_per_cube = occupancy.values().copied().max().unwrap_or(0);
    Ok(Claim3dReport {
        all_in_v,
        occupancy,
        occupied_cubes,
        max_per_cube,
    })
}

fn pattern_label(signs: &[i8]) -> String {
    signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{base_nice_matrix, enumerate_nice_octahedra};
    use crate::linalg::QMatrix;
    use crate::rational::q;

    fn par(p: &[(i64, i64)], qv: &[(i64, i64)]) -> Parallelogram2D {
        Parallelogram2D::new(QVector::from_fracs(p), QVector::from_fracs(qv)).unwrap()
    }

    #[test]
    fn rotated_square_through_corners() {
        let p = par(&[(1, 1), (1, 1)], &[(1, 1), (-1, 1)]);
        assert!(check_square_sandwich(&p, &q(5, 9)));
        let c = corner_classify(&p);
        assert!(c.all_ones());
        assert_eq!(c.outside, 0);
    }

    #[test]
    fn diamond_fails_at_five_ninths() {
        let p = par(&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]);
        assert!(!check_square_sandwich(&p, &q(5, 9)));
        assert!(check_square_sandwich(&p, &q(1, 2)));
        let c = corner_classify(&p);
        assert!(c.counts.values().all(|&n| n == 0));
        assert_eq!(c.outside, 4);
    }

    #[test]
    fn extreme_tilted_parallelogram() {
        // p = (1, 1/3), q = (-1/3, 1): the corner (5/9, 5/9) has
        // |alpha| + |beta| = (5/9)(1 + 1/3 + 1 - 1/3)/(1 + 1/9) = 1, so it is
        // contained with equality; both vertices sit on the band edge 1/3.
        let p = par(&[(1, 1), (1, 3)], &[(-1, 3), (1, 1)]);
        assert!(check_square_sandwich(&p, &q(5, 9)));
        assert!(!check_square_sandwich(&p, &(q(5, 9) + q(1, 1_000_000))));
        assert!(corner_classify(&p).all_ones());
    }

    #[test]
    fn direct_and_generic_checks_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2_000 {
            let r = q(rng.random_range(1..=9), 10);
            let boundary = rng.random_bool(0.3);
            let p = band_point(&mut rng, &q(1, 4), 12, boundary);
            let qv = band_point(&mut rng, &q(1, 4), 12, false);
            let Ok(par) = Parallelogram2D::new(p, qv) else { continue };
            assert_eq!(check_square_sandwich(&par, &r), check_square_sandwich_generic(&par, &r), "{par:?} at {r}");
        }
    }

    #[test]
    fn degenerate_parallelogram_rejected() {
        let r = Parallelogram2D::new(QVector::from_ints(&[1, 1]), QVector::from_ints(&[2, 2]));
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn sampler_outputs_satisfy_lemma() {
        for seed in [1, 2] {
            let p = sample_valid_parallelogram(seed, &q(5, 9), &SamplerConfig::default()).unwrap();
            assert!(check_square_sandwich(&p, &q(5, 9)));
            assert!(corner_classify(&p).all_ones());
        }
        let a = sample_valid_parallelogram(7, &q(5, 9), &SamplerConfig::default()).unwrap();
        let b = sample_valid_parallelogram(7, &q(5, 9), &SamplerConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampler_near_one_surfaces_exhaustion() {
        let cfg = SamplerConfig {
            max_attempts: 2_000,
            ..Default::default()
        };
        match sample_valid_parallelogram(3, &q(99, 100), &cfg) {
            Ok(p) => assert!(check_square_sandwich(&p, &q(99, 100))),
            Err(e) => assert_eq!(e, Error::SamplingExhausted(2_000)),
        }
        assert!(sample_valid_parallelogram(3, &q(1, 1), &cfg).is_err());
    }

    #[test]
    fn counterexamples_below_five_ninths() {
        let cfg = SamplerConfig::default();
        for r in [q(1, 2), q(11, 20)] {
            let p = find_lemma_counterexample(&r, 1, &cfg).unwrap();
            assert!(check_square_sandwich(&p, &r));
            assert!(!corner_classify(&p).all_ones());
        }
        let cfg = SamplerConfig {
            max_attempts: 20_000,
            ..Default::default()
        };
        assert_eq!(
            find_lemma_counterexample(&q(5, 9), 1, &cfg),
            Err(Error::NotFound(20_000))
        );
    }

    #[test]
    fn claim3d_on_nice_family() {
        for m in enumerate_nice_octahedra() {
            let rep = claim3d_check(&OperatorT::new(m).unwrap()).unwrap();
            assert!(rep.holds());
            assert_eq!(rep.occupied_cubes, 6);
        }
        let base = claim3d_check(&OperatorT::new(base_nice_matrix()).unwrap()).unwrap();
        assert_eq!(base.occupancy["+++"], 0);
        assert_eq!(base.occupancy["---"], 0);
        assert_eq!(base.occupancy["+--"], 1);
    }

    #[test]
    fn claim3d_requires_certification() {
        let r = claim3d_check(&OperatorT::new(QMatrix::identity(3)).unwrap());
        assert!(matches!(r, Err(Error::PreconditionViolated(_))));
    }
}
