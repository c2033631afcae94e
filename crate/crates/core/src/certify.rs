//! Exact sandwich certificates for the cube / cross-polytope pair.
//!
//! For an invertible `T` the image `T(C*)` of the cross-polytope has vertices
//! `+-T e_i` and facets `<(T^-1)^T eps, x> <= 1`. Hence
//!
//! * `T(C*) ⊆ rho C` iff every column of `T` has sup-norm at most `rho`;
//! * `r C ⊆ T(C*)` iff `|T^-1 v|_1 <= 1/r` for every cube vertex `v`.
//!
//! Both radii are computed by direct enumeration and every certificate is
//! re-checked vertex-against-halfspace with [`first_violation`].

use std::collections::BTreeMap;
use std::sync::OnceLock;

use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{QMatrix, QVector};
use crate::polytope::{cube, first_violation, sign_vectors, Halfspace, HPolytope, VPolytope};
use crate::rational::{self, Rational};

/// An invertible linear operator together with its exact inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorT {
    t: QMatrix,
    t_inv: QMatrix,
}

impl OperatorT {
    pub fn new(t: QMatrix) -> Result<Self> {
        let t_inv = t.inverse()?;
        debug_assert!(t.mul(&t_inv).is_identity());
        Ok(OperatorT { t, t_inv })
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.t
    }

    pub fn inverse(&self) -> &QMatrix {
        &self.t_inv
    }

    pub fn n(&self) -> usize {
        self.t.n()
    }

    /// Vertices `T e_1, -T e_1, ..., T e_n, -T e_n` of `T(C*)`.
    pub fn image_vertices(&self) -> VPolytope {
        let mut vs = Vec::with_capacity(2 * self.n());
        for j in 0..self.n() {
            let c = self.t.column(j);
            vs.push(-&c);
            vs.push(c);
        }
        VPolytope::new(vs).expect("nonempty")
    }

    /// The `2^n` facets `<(T^-1)^T eps, x> <= 1` of `T(C*)`, one per sign
    /// vector in lexicographic order. No redundancy removal.
    pub fn image_halfspaces(&self) -> HPolytope {
        let inv_t = self.t_inv.transpose();
        let hs = sign_vectors(self.n())
            .into_iter()
            .map(|eps| Halfspace::new(inv_t.mul_vec(&QVector(eps)), Rational::one()))
            .collect();
        HPolytope::new(hs).expect("nonzero normals of an invertible map")
    }
}

/// Smallest `rho` with `T(C*) ⊆ rho C`, and the column attaining it.
pub fn outer_radius_with_witness(t: &OperatorT) -> (Rational, usize) {
    (0..t.n())
        .map(|j| (t.matrix().column(j).norm_inf(), j))
        .fold(None, |best: Option<(Rational, usize)>, (v, j)| match best {
            Some((ref b, _)) if *b >= v => best,
            _ => Some((v, j)),
        })
        .expect("n >= 1")
}

pub fn outer_radius(t: &OperatorT) -> Rational {
    outer_radius_with_witness(t).0
}

/// Largest `r` with `r C ⊆ T(C*)`, and the cube vertex maximizing `|T^-1 v|_1`.
pub fn inner_radius_with_witness(t: &OperatorT) -> (Rational, QVector) {
    let (worst, v) = sign_vectors(t.n())
        .into_iter()
        .map(QVector)
        .map(|v| (t.inverse().mul_vec(&v).norm_1(), v))
        .fold(None, |best: Option<(Rational, QVector)>, (s, v)| match best {
            Some((ref b, _)) if *b >= s => best,
            _ => Some((s, v)),
        })
        .expect("at least one cube vertex");
    (worst.recip(), v)
}

pub fn inner_radius(t: &OperatorT) -> Rational {
    inner_radius_with_witness(t).0
}

/// Best sandwich ratio achievable with this particular `T`; an upper bound
/// on the Banach-Mazur distance between cube and cross-polytope.
pub fn ratio(t: &OperatorT) -> Rational {
    outer_radius(t) / inner_radius(t)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inclusion {
    /// `r C ⊆ T(C*)`
    Inner,
    /// `T(C*) ⊆ C`
    Outer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub inclusion: Inclusion,
    pub vertex_index: usize,
    pub vertex: QVector,
    pub halfspace_index: usize,
    pub halfspace: Halfspace,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificationFailure {
    NonPositiveRadius(Rational),
    Violation(Box<Violation>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichCertificate {
    pub operator: OperatorT,
    /// The radius that was requested and verified.
    pub r: Rational,
    pub r_inner: Rational,
    pub r_outer: Rational,
    pub ratio: Rational,
    pub inner_witness: QVector,
    pub outer_witness_column: usize,
}

/// Verifies `r C ⊆ T(C*) ⊆ C` exactly.
///
/// Inner inclusion is checked first; the reported violation is the
/// lexicographically first (vertex, halfspace) pair of the failing check.
pub fn certify_sandwich(
    t: &OperatorT,
    r: &Rational,
) -> Result<SandwichCertificate, CertificationFailure> {
    if !r.is_positive() {
        return Err(CertificationFailure::NonPositiveRadius(r.clone()));
    }
    let (cube_v, cube_h) = cube(t.n()).expect("operator dimension in range");
    let scaled_cube = cube_v.scale(r);
    let image_h = t.image_halfspaces();
    let image_v = t.image_vertices();

    let (r_inner, inner_witness) = inner_radius_with_witness(t);
    let (r_outer, outer_witness_column) = outer_radius_with_witness(t);

    let inner = first_violation(&scaled_cube, &image_h).expect("same dimension");
    let outer = first_violation(&image_v, &cube_h).expect("same dimension");
    debug_assert_eq!(inner.is_none(), *r <= r_inner);
    debug_assert_eq!(outer.is_none(), r_outer <= Rational::one());

    let violation = inner
        .map(|(vi, hi)| (Inclusion::Inner, &scaled_cube, &image_h, vi, hi))
        .or_else(|| outer.map(|(vi, hi)| (Inclusion::Outer, &image_v, &cube_h, vi, hi)));
    if let Some((inclusion, vs, hs, vi, hi)) = violation {
        return Err(CertificationFailure::Violation(Box::new(Violation {
            inclusion,
            vertex_index: vi,
            vertex: vs.vertices()[vi].clone(),
            halfspace_index: hi,
            halfspace: hs.halfspaces()[hi].clone(),
        })));
    }
    let ratio = &r_outer / &r_inner;
    Ok(SandwichCertificate {
        operator: t.clone(),
        r: r.clone(),
        r_inner,
        r_outer,
        ratio,
        inner_witness,
        outer_witness_column,
    })
}

/// The extremal 3x3 operator: `1/3` on the diagonal, `-1` elsewhere.
pub fn base_nice_matrix() -> QMatrix {
    let third = rational::q(1, 3);
    let mut m = QMatrix::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            m.set(i, j, if i == j { third.clone() } else { rational::int(-1) });
        }
    }
    m
}

/// Three inequivalent 4x4 operators with `1/2 C_4 ⊆ T(C_4*) ⊆ C_4`.
pub fn four_dim_examples() -> [QMatrix; 3] {
    [
        QMatrix::from_ints(&[&[1, 1, 1, 0], &[1, 1, -1, 0], &[1, -1, 0, 1], &[1, -1, 0, -1]]),
        QMatrix::from_ints(&[&[1, 1, 1, 0], &[1, -1, 0, 1], &[1, 0, -1, -1], &[0, 1, -1, 1]]),
        QMatrix::from_ints(&[&[1, 1, 1, -1], &[-1, 1, 1, 1], &[1, -1, 1, 1], &[1, 1, -1, 1]]),
    ]
}

/// `P M Q` where `P` and `Q` are signed permutation matrices: row `i` of the
/// result is `row_signs[i] * row row_perm[i]` of `m`, and likewise columns.
pub fn signed_permute(
    m: &QMatrix,
    row_perm: &[usize],
    row_signs: &[bool],
    col_perm: &[usize],
    col_signs: &[bool],
) -> QMatrix {
    let n = m.n();
    let mut out = QMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let x = m.get(row_perm[i], col_perm[j]);
            let flip = row_signs[i] ^ col_signs[j];
            out.set(i, j, if flip { -x } else { x.clone() });
        }
    }
    out
}

/// Every signed row/column permutation of `m`, deduplicated by canonical key.
pub fn symmetry_orbit(m: &QMatrix) -> Vec<QMatrix> {
    let n = m.n();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let signs: Vec<Vec<bool>> = (0..1usize << n)
        .map(|mask| (0..n).map(|i| (mask >> i) & 1 == 1).collect())
        .collect();
    let mut out = BTreeMap::new();
    for rp in &perms {
        for cp in &perms {
            for rs in &signs {
                for cs in &signs {
                    let g = signed_permute(m, rp, rs, cp, cs);
                    out.entry(g.canonical_key()).or_insert(g);
                }
            }
        }
    }
    out.into_values().collect()
}

/// All matrices of operators whose image of the cross-polytope is a nice
/// octahedron, sorted by canonical key. There are 192.
pub fn enumerate_nice_octahedra() -> Vec<QMatrix> {
    symmetry_orbit(&base_nice_matrix())
}

fn nice_keys() -> &'static BTreeMap<String, ()> {
    static KEYS: OnceLock<BTreeMap<String, ()>> = OnceLock::new();
    KEYS.get_or_init(|| {
        enumerate_nice_octahedra()
            .iter()
            .map(|m| (m.canonical_key(), ()))
            .collect()
    })
}

/// Membership of the matrix in [`enumerate_nice_octahedra`].
pub fn is_nice_by_membership(t: &OperatorT) -> bool {
    t.n() == 3 && nice_keys().contains_key(&t.matrix().canonical_key())
}

/// Whether the vertex set of `T(C_3*)` is `{+-(a/3 + 2 b_i/3)}` for a cube
/// vertex `a` and its three neighbours `b_i`.
///
/// `a/3 + 2 b_i/3` is `a` with its `i`-th coordinate multiplied by `-1/3`.
pub fn is_nice(t: &OperatorT) -> Result<bool> {
    if t.n() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: t.n(),
        });
    }
    let image = t.image_vertices().vertex_set();
    let minus_third = rational::q(-1, 3);
    Ok(sign_vectors(3).into_iter().any(|a| {
        let nice: std::collections::BTreeSet<QVector> = (0..3)
            .flat_map(|i| {
                let mut w = a.clone();
                w[i] = &w[i] * &minus_third;
                let w = QVector(w);
                [-&w, w]
            })
            .collect();
        nice == image
    }))
}

/// Scales every column to sup-norm exactly 1.
pub fn normalize_matrix_columns(m: &QMatrix) -> Result<QMatrix> {
    let mut out = m.clone();
    for j in 0..m.n() {
        let norm = m.column(j).norm_inf();
        if norm.is_zero() {
            return Err(Error::ZeroColumn(j));
        }
        let inv = norm.recip();
        for i in 0..m.n() {
            out.set(i, j, m.get(i, j) * &inv);
        }
    }
    Ok(out)
}

/// Column normalization; never increases [`ratio`].
pub fn normalize_columns(t: &OperatorT) -> Result<OperatorT> {
    OperatorT::new(normalize_matrix_columns(t.matrix())?)
}

/// Signs of the 8 octants as used to label the corner cubes.
pub(crate) fn sign_pattern(v: &QVector) -> Vec<i8> {
    v.iter().map(|x| if x.is_negative() { -1 } else { 1 }).collect()
}
