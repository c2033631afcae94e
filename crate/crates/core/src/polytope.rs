//! Vertex and halfspace representations of polytopes, the standard bodies,
//! and the exact containment primitive every sandwich check is built on.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{orient2d, QMatrix, QVector};
use crate::rational::Rational;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolytope {
    n: usize,
    vertices: Vec<QVector>,
}

impl VPolytope {
    pub fn new(vertices: Vec<QVector>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::Degenerate("polytope without vertices".into()))?;
        let n = first.len();
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
        Ok(VPolytope { n, vertices })
    }

    pub fn from_ints(points: &[&[i64]]) -> Result<Self> {
        Self::new(points.iter().map(|p| QVector::from_ints(p)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[QVector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn scale(&self, s: &Rational) -> VPolytope {
        self.map_points(|v| v.scale(s))
    }

    pub fn translate(&self, t: &QVector) -> VPolytope {
        self.map_points(|v| v + t)
    }

    /// Image under `x -> A x`.
    pub fn map_linear(&self, a: &QMatrix) -> VPolytope {
        self.map_points(|v| a.mul_vec(v))
    }

    /// Image under `x -> A x + t`.
    pub fn map_affine(&self, a: &QMatrix, t: &QVector) -> VPolytope {
        self.map_points(|v| &a.mul_vec(v) + t)
    }

    /// Image under the homothety `x -> c + ratio * (x - c)`.
    pub fn homothety(&self, center: &QVector, ratio: &Rational) -> VPolytope {
        self.map_points(|v| center + &(v - center).scale(ratio))
    }

    fn map_points(&self, f: impl Fn(&QVector) -> QVector) -> VPolytope {
        VPolytope {
            n: self.n,
            vertices: self.vertices.iter().map(f).collect(),
        }
    }

    pub fn centroid(&self) -> QVector {
        let sum = self
            .vertices
            .iter()
            .fold(QVector::zeros(self.n), |acc, v| &acc + v);
        sum.scale(&Rational::new(BigInt::one(), BigInt::from(self.vertices.len())))
    }

    pub fn vertex_set(&self) -> BTreeSet<QVector> {
        self.vertices.iter().cloned().collect()
    }

    /// Center of symmetry of the vertex set, if it is closed under
    /// `x -> 2s - x` for its vertex average `s`.
    pub fn symmetry_center(&self) -> Option<QVector> {
        let s = self.centroid();
        let set = self.vertex_set();
        let two_s = s.scale(&Rational::from_integer(BigInt::from(2)));
        set.iter()
            .all(|v| set.contains(&(&two_s - v)))
            .then_some(s)
    }

    /// Dimension of the affine hull of the vertices.
    pub fn affine_rank(&self) -> usize {
        let base = &self.vertices[0];
        let diffs: Vec<QVector> = self.vertices[1..].iter().map(|v| v - base).collect();
        rank(diffs)
    }
}

fn rank(mut rows: Vec<QVector>) -> usize {
    let Some(cols) = rows.first().map(QVector::len) else {
        return 0;
    };
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &pivot;
            let sub = rows[r].scale(&f);
            rows[i] = &rows[i] - &sub;
        }
        r += 1;
    }
    r
}

/// `<normal, x> <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: QVector,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: QVector, offset: Rational) -> Self {
        Halfspace { normal, offset }
    }

    /// `offset - <normal, x>`; nonnegative exactly when `x` satisfies it.
    pub fn slack(&self, x: &QVector) -> Rational {
        &self.offset - self.normal.dot(x)
    }

    pub fn contains(&self, x: &QVector) -> bool {
        self.normal.dot(x) <= self.offset
    }

    pub fn is_tight(&self, x: &QVector) -> bool {
        self.normal.dot(x) == self.offset
    }

    /// Rescales by a positive factor so normal and offset are coprime integers.
    pub fn primitive(&self) -> Halfspace {
        let coeffs: Vec<&Rational> = self.normal.iter().chain(std::iter::once(&self.offset)).collect();
        let lcm = coeffs
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = coeffs
            .iter()
            .map(|x| (*x * Rational::from_integer(lcm.clone())).to_integer())
            .collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if gcd.is_zero() {
            return self.clone();
        }
        let scale = Rational::new(lcm, gcd.abs());
        Halfspace {
            normal: self.normal.scale(&scale),
            offset: &self.offset * &scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    n: usize,
    halfspaces: Vec<Halfspace>,
}

impl HPolytope {
    pub fn new(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let first = halfspaces
            .first()
            .ok_or_else(|| Error::Degenerate("polytope without halfspaces".into()))?;
        let n = first.normal.len();
        for h in &halfspaces {
            if h.normal.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: h.normal.len(),
                });
            }
            if h.normal.is_zero() {
                return Err(Error::Degenerate("zero halfspace normal".into()));
            }
        }
        Ok(HPolytope { n, halfspaces })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn len(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.halfspaces.is_empty()
    }

    pub fn contains(&self, x: &QVector) -> bool {
        self.halfspaces.iter().all(|h| h.contains(x))
    }

    /// Image under `x -> A x + t` (A invertible).
    pub fn map_affine(&self, a: &QMatrix, t: &QVector) -> Result<HPolytope> {
        let a_inv_t = a.inverse()?.transpose();
        let halfspaces = self
            .halfspaces
            .iter()
            .map(|h| {
                let normal = a_inv_t.mul_vec(&h.normal);
                let offset = &h.offset + normal.dot(t);
                Halfspace { normal, offset }
            })
            .collect();
        HPolytope::new(halfspaces)
    }

    /// Image under `x -> s x` for `s > 0`.
    pub fn scale(&self, s: &Rational) -> HPolytope {
        assert!(s.is_positive(), "scale factor must be positive");
        HPolytope {
            n: self.n,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace::new(h.normal.clone(), &h.offset * s))
                .collect(),
        }
    }

    /// Vertices by intersecting every `n`-subset of bounding hyperplanes.
    ///
    /// Exponential in the facet count; only meant for validating small
    /// inputs (a few dozen halfspaces, `n <= 4`).
    pub fn vertices_bruteforce(&self) -> BTreeSet<QVector> {
        let mut out = BTreeSet::new();
        for subset in self.halfspaces.iter().combinations(self.n) {
            let Ok(m) = QMatrix::from_rows(subset.iter().map(|h| h.normal.clone()).collect())
            else {
                continue;
            };
            let rhs = QVector(subset.iter().map(|h| h.offset.clone()).collect());
            if let Ok(x) = m.solve(&rhs) {
                if self.contains(&x) {
                    out.insert(x);
                }
            }
        }
        out
    }
}

/// The cube `{|x|_inf <= 1}`: vertices `{+-1}^n` and facets `+-<e_i, x> <= 1`.
pub fn cube(n: usize) -> Result<(VPolytope, HPolytope)> {
    check_dim(n)?;
    let vertices = sign_vectors(n).into_iter().map(QVector).collect();
    let mut halfspaces = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1, -1] {
            let normal = QVector::unit(n, i).scale(&Rational::from_integer(BigInt::from(s)));
            halfspaces.push(Halfspace::new(normal, Rational::one()));
        }
    }
    Ok((VPolytope::new(vertices)?, HPolytope::new(halfspaces)?))
}

/// The cross-polytope `{|x|_1 <= 1}`: vertices `+-e_i` and facets
/// `<eps, x> <= 1` for every sign vector `eps`.
pub fn cross_polytope(n: usize) -> Result<(VPolytope, HPolytope)> {
    check_dim(n)?;
    let mut vertices = Vec::with_capacity(2 * n);
    for i in 0..n {
        vertices.push(QVector::unit(n, i));
        vertices.push(-&QVector::unit(n, i));
    }
    let halfspaces = sign_vectors(n)
        .into_iter()
        .map(|eps| Halfspace::new(QVector(eps), Rational::one()))
        .collect();
    Ok((VPolytope::new(vertices)?, HPolytope::new(halfspaces)?))
}

fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// All of `{-1, 1}^n` in lexicographic order (`-1` before `1`).
pub fn sign_vectors(n: usize) -> Vec<Vec<Rational>> {
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .map(|i| {
                    let bit = (mask >> (n - 1 - i)) & 1;
                    Rational::from_integer(BigInt::from(if bit == 1 { 1 } else { -1 }))
                })
                .collect()
        })
        .collect()
}

/// True iff every vertex of `inner` satisfies every halfspace of `outer`.
pub fn v_in_h(inner: &VPolytope, outer: &HPolytope) -> Result<bool> {
    Ok(first_violation(inner, outer)?.is_none())
}

/// Lexicographically first `(vertex, halfspace)` index pair violated exactly.
pub fn first_violation(inner: &VPolytope, outer: &HPolytope) -> Result<Option<(usize, usize)>> {
    if inner.n() != outer.n() {
        return Err(Error::DimensionMismatch {
            expected: outer.n(),
            got: inner.n(),
        });
    }
    for (vi, v) in inner.vertices().iter().enumerate() {
        if let Some(hi) = outer.halfspaces().iter().position(|h| !h.contains(v)) {
            return Ok(Some((vi, hi)));
        }
    }
    Ok(None)
}

/// Edge halfspaces of a strictly convex counterclockwise polygon.
///
/// Halfspace `i` supports the edge from vertex `i` to vertex `i + 1`, in
/// primitive integer form. Every vertex is tight on exactly its two incident
/// edges and strictly inside all others, otherwise [`Error::NotConvex`].
pub fn polygon_to_h(p: &VPolytope) -> Result<HPolytope> {
    if p.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.n(),
        });
    }
    let vs = p.vertices();
    let m = vs.len();
    if m < 3 {
        return Err(Error::Degenerate("polygon needs at least 3 vertices".into()));
    }
    let mut halfspaces = Vec::with_capacity(m);
    for i in 0..m {
        let a = &vs[i];
        let b = &vs[(i + 1) % m];
        let d = b - a;
        // Outward normal of a counterclockwise edge.
        let normal = QVector(vec![d[1].clone(), -d[0].clone()]);
        if normal.is_zero() {
            return Err(Error::NotConvex(i));
        }
        let offset = normal.dot(a);
        halfspaces.push(Halfspace::new(normal, offset).primitive());
    }
    for (j, v) in vs.iter().enumerate() {
        for (i, h) in halfspaces.iter().enumerate() {
            let incident = i == j || (i + 1) % m == j;
            let s = h.slack(v);
            if incident != s.is_zero() || s.is_negative() {
                return Err(Error::NotConvex(j));
            }
        }
    }
    HPolytope::new(halfspaces)
}

/// Counterclockwise convex hull of planar points (Andrew's monotone chain).
///
/// Interior, duplicate and collinear boundary points are dropped; the output
/// starts at the lexicographically smallest point.
pub fn convex_hull_2d(points: &[QVector]) -> Result<VPolytope> {
    if let Some(p) = points.iter().find(|p| p.len() != 2) {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.len(),
        });
    }
    let mut pts: Vec<QVector> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::Degenerate("fewer than 3 distinct points".into()));
    }
    let mut lower: Vec<QVector> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && !orient2d(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<QVector> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !orient2d(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::Degenerate("all points are collinear".into()));
    }
    VPolytope::new(lower)
}

/// Twice the signed area of a polygon given in order.
pub fn polygon_area2(p: &VPolytope) -> Rational {
    let vs = p.vertices();
    let m = vs.len();
    (0..m).fold(Rational::zero(), |acc, i| {
        acc + crate::linalg::cross2(&vs[i], &vs[(i + 1) % m])
    })
}
