//! Planar pentagons `K(r, k)` at the same Banach–Mazur distance `r` from every
//! centrally symmetric body, and per-body certificates of that distance.
//!
//! The construction is stated for an equilateral triple `u1, u2, u3` with
//! `u1 + u2 + u3 = 0`. Every object and certified quantity here is equivariant
//! under invertible linear maps, so the default basis is the rational triple
//! `(0, 2), (-3, -1), (3, -1)`, a linear image of the equilateral one. This
//! keeps all coordinates exact.
//!
//! Certification of `d(K, L) = r` for a symmetric `L` has two halves:
//! `as(K) = r` bounds the distance from below, and the affine copy `L0` of `L`
//! with `K ⊆ L0 ⊆ K'`, where `K'` is the image of `K` under the homothety of
//! ratio `-r` about the Minkowski center, bounds it from above.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::asymmetry::{asymmetry, AsymmetryResult};
use crate::error::{Error, Result};
use crate::linalg::{cross2, orient2d, QMatrix, QVector};
use crate::polytope::{convex_hull_2d, first_violation, polygon_to_h, HPolytope, VPolytope};
use crate::rational::{int, q, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UBasis {
    pub u1: QVector,
    pub u2: QVector,
    pub u3: QVector,
}

impl UBasis {
    pub fn new(u1: QVector, u2: QVector, u3: QVector) -> Result<Self> {
        if [&u1, &u2, &u3].iter().any(|u| u.len() != 2) {
            return Err(Error::InvalidParams("basis vectors must be planar".into()));
        }
        if !(&(&u1 + &u2) + &u3).is_zero() {
            return Err(Error::InvalidParams("u1 + u2 + u3 must vanish".into()));
        }
        if cross2(&u1, &u2).is_zero() {
            return Err(Error::InvalidParams("basis vectors are collinear".into()));
        }
        Ok(UBasis { u1, u2, u3 })
    }

    /// Linear reflection swapping `u2` and `u3` and fixing `u1`; its axis is
    /// the line `<x, u2> = <x, u3>` of the equilateral model.
    pub fn axis_reflection(&self) -> QMatrix {
        let from = columns(&self.u1, &self.u2);
        let to = columns(&self.u1, &self.u3);
        to.mul(&from.inverse().expect("basis is independent"))
    }

    pub fn triangle(&self) -> VPolytope {
        ccw_hull(&[self.u1.clone(), self.u2.clone(), self.u3.clone()])
    }
}

impl Default for UBasis {
    fn default() -> Self {
        UBasis {
            u1: QVector::from_ints(&[0, 2]),
            u2: QVector::from_ints(&[-3, -1]),
            u3: QVector::from_ints(&[3, -1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PentagonParams {
    r: Rational,
    k: Rational,
}

impl PentagonParams {
    pub fn new(r: Rational, k: Rational) -> Result<Self> {
        if r < q(7, 4) || r > int(2) {
            return Err(Error::InvalidParams(format!("r = {r} outside [7/4, 2]")));
        }
        let (lo, hi) = k_range(&r);
        if k < lo || k > hi {
            return Err(Error::InvalidParams(format!("k = {k} outside [{lo}, {hi}]")));
        }
        Ok(PentagonParams { r, k })
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn k(&self) -> &Rational {
        &self.k
    }

    /// `((r - 2) / (r + 1)) u1`.
    pub fn minkowski_center(&self, basis: &UBasis) -> QVector {
        let r = &self.r;
        basis.u1.scale(&((r - int(2)) / (r + int(1))))
    }

    /// Endpoints `y, x` of the boundary segment
    /// `[((r-3)/r + k) u1 + 2k u2, ((r-3)/r + k) u1 + 2k u3]`.
    pub fn segment(&self, basis: &UBasis) -> (QVector, QVector) {
        let c = (&self.r - int(3)) / &self.r + &self.k;
        let two_k = &self.k * int(2);
        let base = basis.u1.scale(&c);
        (
            &base + &basis.u2.scale(&two_k),
            &base + &basis.u3.scale(&two_k),
        )
    }
}

/// Admissible `k` for a given `r`: `[1/(2r), 2 - 3/r]`.
pub fn k_range(r: &Rational) -> (Rational, Rational) {
    ((r * int(2)).recip(), int(2) - int(3) / r)
}

/// `r` values of the standard parameter grid.
pub fn grid_r_values() -> Vec<Rational> {
    vec![q(7, 4), q(16, 9), q(9, 5), q(11, 6), q(15, 8)]
}

/// Lower end, midpoint and upper end of the admissible `k` interval. At
/// `r = 7/4` the interval is the single point `2/7`.
pub fn grid_k_values(r: &Rational) -> [Rational; 3] {
    let (lo, hi) = k_range(r);
    let mid = (&lo + &hi) / int(2);
    [lo, mid, hi]
}

/// The full `(r, k)` grid, in order.
pub fn parameter_grid() -> Vec<PentagonParams> {
    grid_r_values()
        .into_iter()
        .flat_map(|r| {
            grid_k_values(&r)
                .into_iter()
                .map(move |k| PentagonParams::new(r.clone(), k).expect("grid values are admissible"))
        })
        .collect()
}

/// `K(r, k) = conv{u1, u2, u3, y, x}` in counterclockwise order. Collinear
/// points are dropped, so at `r = 2` this is the triangle.
pub fn pentagon(params: &PentagonParams, basis: &UBasis) -> VPolytope {
    let (y, x) = params.segment(basis);
    ccw_hull(&[basis.u1.clone(), basis.u2.clone(), basis.u3.clone(), y, x])
}

/// Outcome of the three defining conditions for a constructed body.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionChecks {
    pub contains_triangle: bool,
    pub inside_quadrilateral: bool,
    pub segment_on_boundary: bool,
    pub axis_symmetric: bool,
}

impl ConstructionChecks {
    pub fn all(&self) -> bool {
        self.contains_triangle && self.inside_quadrilateral && self.segment_on_boundary && self.axis_symmetric
    }
}

pub fn construction_checks(params: &PentagonParams, basis: &UBasis, k: &VPolytope) -> Result<ConstructionChecks> {
    let k_h = polygon_to_h(k)?;
    let quad = ccw_hull(&[-&basis.u1, basis.u1.clone(), basis.u2.clone(), basis.u3.clone()]);
    let (y, x) = params.segment(basis);
    let reflection = basis.axis_reflection();
    let vset = k.vertex_set();
    Ok(ConstructionChecks {
        contains_triangle: first_violation(&basis.triangle(), &k_h)?.is_none(),
        inside_quadrilateral: first_violation(k, &polygon_to_h(&quad)?)?.is_none(),
        segment_on_boundary: k_h.halfspaces().iter().any(|h| h.is_tight(&y) && h.is_tight(&x)),
        axis_symmetric: k.vertices().iter().all(|v| vset.contains(&reflection.mul_vec(v))),
    })
}

/// `x -> linear * x + translation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub linear: QMatrix,
    pub translation: QVector,
}

impl AffineMap {
    pub fn apply(&self, x: &QVector) -> QVector {
        &self.linear.mul_vec(x) + &self.translation
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangle {
    /// Indices into the polygon's vertex list.
    pub indices: [usize; 3],
    pub vertices: [QVector; 3],
    /// Twice the area.
    pub area2: Rational,
}

/// Maximum-area triangle spanned by vertices of `l`, by exhaustive search.
/// Among maximizers, the lexicographically smallest index triple wins.
pub fn max_area_triangle(l: &VPolytope) -> Result<Triangle> {
    let vs = l.vertices();
    if l.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: l.n(),
        });
    }
    let mut best: Option<([usize; 3], Rational)> = None;
    for (i, j, k) in (0..vs.len()).tuple_combinations() {
        let a2 = orient2d(&vs[i], &vs[j], &vs[k]).abs();
        if best.as_ref().is_none_or(|(_, b)| a2 > *b) {
            best = Some(([i, j, k], a2));
        }
    }
    match best {
        Some((idx, area2)) if area2.is_positive() => Ok(Triangle {
            indices: idx,
            vertices: idx.map(|i| vs[i].clone()),
            area2,
        }),
        _ => Err(Error::Degenerate("no triangle of positive area".into())),
    }
}

/// Closed containment of `p` in the triangle `abc` of either orientation.
fn in_triangle(p: &QVector, a: &QVector, b: &QVector, c: &QVector) -> bool {
    let s = [orient2d(a, b, p), orient2d(b, c, p), orient2d(c, a, p)];
    s.iter().all(|x| !x.is_negative()) || s.iter().all(|x| !x.is_positive())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalization {
    /// Maximal triangle relabeled so the symmetry center lies in `conv{g, b, c}`.
    pub labeled: [QVector; 3],
    pub map: AffineMap,
    /// Image of `L` under `map`, counterclockwise.
    pub l0: VPolytope,
}

/// Relabels the maximal triangle cyclically so the symmetry center of `l`
/// lies in `conv{g, b, c}` (first of `gbc`, `gca`, `gab` that contains it)
/// and maps `a, b, c` to `u1, u2, u3`.
pub fn normalize_to_basis(l: &VPolytope, triangle: &Triangle, basis: &UBasis) -> Result<Normalization> {
    let s = l.symmetry_center().ok_or(Error::NotSymmetric)?;
    let [a, b, c] = &triangle.vertices;
    let g = (&(a + b) + c).scale(&q(1, 3));
    let labeled = [[a, b, c], [b, c, a], [c, a, b]]
        .into_iter()
        .find(|[_, b, c]| in_triangle(&s, &g, b, c))
        .ok_or(Error::NoContainingSubtriangle)?;
    let [a, b, c] = labeled.map(QVector::clone);

    let target = columns(&(&basis.u2 - &basis.u1), &(&basis.u3 - &basis.u1));
    let source = columns(&(&b - &a), &(&c - &a));
    let linear = target.mul(&source.inverse()?);
    let translation = &basis.u1 - &linear.mul_vec(&a);
    let map = AffineMap { linear, translation };
    let l0 = ccw_hull(&l.vertices().iter().map(|v| map.apply(v)).collect::<Vec<_>>());
    Ok(Normalization {
        labeled: [a, b, c],
        map,
        l0,
    })
}

/// Exact record of one verified polytope inclusion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InclusionRecord {
    pub which: String,
    pub vertices: usize,
    pub halfspaces: usize,
    /// `(vertex, halfspace)` pairs holding with equality.
    pub tight: Vec<(usize, usize)>,
}

fn verify_inclusion(which: &str, inner: &VPolytope, outer: &HPolytope) -> Result<InclusionRecord> {
    if let Some((vertex, halfspace)) = first_violation(inner, outer)? {
        return Err(Error::InclusionFailed {
            which: which.into(),
            vertex,
            halfspace,
        });
    }
    let tight = inner
        .vertices()
        .iter()
        .enumerate()
        .flat_map(|(i, v)| {
            outer
                .halfspaces()
                .iter()
                .enumerate()
                .filter(move |(_, h)| h.is_tight(v))
                .map(move |(j, _)| (i, j))
        })
        .collect();
    Ok(InclusionRecord {
        which: which.into(),
        vertices: inner.len(),
        halfspaces: outer.len(),
        tight,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquidistanceCertificate {
    pub params: PentagonParams,
    pub k: VPolytope,
    pub k_prime: VPolytope,
    pub l_input: VPolytope,
    pub triangle: Triangle,
    pub normalization: Normalization,
    /// `K ⊆ L0` then `L0 ⊆ K'`.
    pub inclusions: [InclusionRecord; 2],
    pub as_check: AsymmetryResult,
    /// Ratio of the homothety taking `K` to `K'`, in absolute value.
    pub sandwich_ratio: Rational,
}

/// Certifies `d(K(r, k), L) = r` for the symmetric polygon `L` (taken as the
/// convex hull of its listed points).
pub fn certify_equidistance(params: &PentagonParams, l: &VPolytope) -> Result<EquidistanceCertificate> {
    let basis = UBasis::default();
    let l = convex_hull_2d(l.vertices())?;
    if l.symmetry_center().is_none() {
        return Err(Error::NotSymmetric);
    }
    let k = pentagon(params, &basis);
    let center = params.minkowski_center(&basis);
    let k_prime = k.homothety(&center, &-params.r());

    let as_check = asymmetry(&k, &polygon_to_h(&k)?)?;
    if &as_check.as_value != params.r() || as_check.center != center {
        return Err(Error::AsymmetryMismatch {
            expected: format!("{} at {:?}", params.r(), center),
            got: format!("{} at {:?}", as_check.as_value, as_check.center),
        });
    }

    let triangle = max_area_triangle(&l)?;
    let normalization = normalize_to_basis(&l, &triangle, &basis)?;
    let inner = verify_inclusion("K ⊆ L0", &k, &polygon_to_h(&normalization.l0)?)?;
    let outer = verify_inclusion("L0 ⊆ K'", &normalization.l0, &polygon_to_h(&k_prime)?)?;

    Ok(EquidistanceCertificate {
        params: params.clone(),
        k,
        k_prime,
        l_input: l,
        triangle,
        normalization,
        inclusions: [inner, outer],
        as_check,
        sandwich_ratio: params.r().clone(),
    })
}

/// Squared length ratio `|side|^2 / |diagonal|^2` of the unique side of `p`
/// parallel to one of its diagonals. Ratios of parallel lengths are affine
/// invariants, so this separates affinely inequivalent pentagons.
pub fn parallel_pair_ratio(p: &VPolytope) -> Result<Rational> {
    let vs = p.vertices();
    let m = vs.len();
    let mut pairs = Vec::new();
    for i in 0..m {
        let side = &vs[(i + 1) % m] - &vs[i];
        for (a, b) in (0..m).tuple_combinations() {
            let consecutive = b == a + 1 || (a == 0 && b == m - 1);
            if consecutive {
                continue;
            }
            let diagonal = &vs[b] - &vs[a];
            if cross2(&side, &diagonal).is_zero() {
                pairs.push((side.clone(), diagonal));
            }
        }
    }
    match pairs.as_slice() {
        [] => Err(Error::NoParallelPair),
        [(side, diagonal)] => Ok(side.dot(side) / diagonal.dot(diagonal)),
        more => Err(Error::MultiplePairs(more.len())),
    }
}

/// Named symmetric polygons with rational vertices: a square, an affinely
/// regular hexagon and a symmetric octagon.
pub fn standard_symmetric_bodies() -> Vec<(&'static str, VPolytope)> {
    let sym = |pts: &[(i64, i64)]| {
        let all: Vec<QVector> = pts
            .iter()
            .flat_map(|&(x, y)| [QVector::from_ints(&[x, y]), QVector::from_ints(&[-x, -y])])
            .collect();
        ccw_hull(&all)
    };
    vec![
        ("square", sym(&[(1, 1), (1, -1)])),
        ("hexagon", sym(&[(1, 0), (0, 1), (1, 1)])),
        ("octagon", sym(&[(2, 1), (1, 2), (-1, 2), (-2, 1)])),
    ]
}

/// Hull of `±p_i` for a few random rational points, shifted by a random
/// rational vector. Always a symmetric polygon with at least four vertices.
pub fn random_symmetric_polygon<R: Rng>(rng: &mut R) -> VPolytope {
    let coord = |rng: &mut R| Rational::new(rng.random_range(-20i64..=20).into(), rng.random_range(1i64..=4).into());
    loop {
        let m = rng.random_range(2..=5);
        let shift = QVector(vec![coord(rng), coord(rng)]);
        let mut pts = Vec::with_capacity(2 * m);
        for _ in 0..m {
            let p = QVector(vec![coord(rng), coord(rng)]);
            pts.push(&shift + &p);
            pts.push(&shift - &p);
        }
        if let Ok(hull) = convex_hull_2d(&pts) {
            return hull;
        }
    }
}

fn columns(c0: &QVector, c1: &QVector) -> QMatrix {
    QMatrix::from_rows(vec![
        QVector(vec![c0[0].clone(), c1[0].clone()]),
        QVector(vec![c0[1].clone(), c1[1].clone()]),
    ])
    .expect("2x2")
}

fn ccw_hull(points: &[QVector]) -> VPolytope {
    convex_hull_2d(points).expect("points span the plane")
}

impl Triangle {
    pub fn area(&self) -> Rational {
        &self.area2 / int(2)
    }
}

impl Default for PentagonParams {
    fn default() -> Self {
        PentagonParams {
            r: q(9, 5),
            k: q(1, 3),
        }
    }
}

impl EquidistanceCertificate {
    /// The sandwich ratio meets the asymmetry lower bound.
    pub fn is_tight(&self) -> bool {
        self.sandwich_ratio == self.as_check.as_value
    }
}
