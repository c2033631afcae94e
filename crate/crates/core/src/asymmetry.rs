//! Asymmetry constant and Minkowski center of a polytope.
//!
//! `as(K)` is the least `r` such that `K - z ⊆ -r (K - z)` for some interior
//! `z`. With `lambda = 1/r` the containment reads
//! `<a_i, z - lambda (v_j - z)> <= b_i` for every facet `i` and vertex `j`;
//! substituting `w = (1 + lambda) z` makes it linear in `(w, lambda)`:
//!
//! ```text
//! maximize lambda  s.t.  <a_i, w> - lambda <a_i, v_j> <= b_i   for all i, j
//! ```
//!
//! so a single exact LP yields `as(K) = 1/lambda*` and `z = w* / (1 + lambda*)`.

use std::collections::BTreeSet;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::linalg::{QMatrix, QVector};
use crate::lp::{lp_max, LpResult};
use crate::polytope::{first_violation, polygon_to_h, HPolytope, Halfspace, VPolytope};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsymmetryResult {
    pub as_value: Rational,
    /// Minkowski center.
    pub center: QVector,
    /// `1 / as_value`.
    pub lambda: Rational,
    /// `(vertex, facet)` pairs with `z - lambda (v - z)` exactly on the facet.
    pub tight_pairs: Vec<(usize, usize)>,
    /// Whether the optimal center is the only one (checked by LP, not assumed).
    pub center_unique: bool,
}

/// Exact asymmetry constant of the polytope given in both representations.
pub fn asymmetry(k_v: &VPolytope, k_h: &HPolytope) -> Result<AsymmetryResult> {
    let n = k_v.n();
    if k_h.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: k_h.n(),
        });
    }
    if k_v.affine_rank() < n {
        return Err(Error::DegenerateBody);
    }
    cross_validate(k_v, k_h)?;

    let constraints = center_constraints(k_v, k_h);
    let mut objective = QVector::zeros(n + 1);
    objective[n] = Rational::one();
    let sol = match lp_max(&objective, &constraints) {
        LpResult::Optimal(s) => s,
        LpResult::Infeasible => {
            return Err(Error::InconsistentRepresentations("asymmetry LP infeasible".into()))
        }
        LpResult::Unbounded => return Err(Error::DegenerateBody),
    };
    let lambda = sol.objective.clone();
    if !lambda.is_positive() {
        return Err(Error::DegenerateBody);
    }
    let w = QVector(sol.witness.0[..n].to_vec());
    let center = w.scale(&(Rational::one() + &lambda).recip());

    let mut tight_pairs = Vec::new();
    for (j, v) in k_v.vertices().iter().enumerate() {
        let image = reflect_scaled(&center, v, &lambda);
        for (i, h) in k_h.halfspaces().iter().enumerate() {
            if !h.contains(&image) {
                return Err(Error::InclusionFailed {
                    which: "K - z ⊆ -as (K - z)".into(),
                    vertex: j,
                    halfspace: i,
                });
            }
            if h.is_tight(&image) {
                tight_pairs.push((j, i));
            }
        }
    }
    let center_unique = optimal_face_is_point(k_v, k_h, &lambda);

    Ok(AsymmetryResult {
        as_value: lambda.recip(),
        center,
        lambda,
        tight_pairs,
        center_unique,
    })
}

/// [`asymmetry`] for a counterclockwise convex polygon, with the halfspaces
/// derived from its edges.
pub fn polygon_asymmetry(k: &VPolytope) -> Result<AsymmetryResult> {
    asymmetry(k, &polygon_to_h(k)?)
}

/// Whether `z - lambda (v - z)` lies in `K` for every vertex `v`.
pub fn homothetic_containment(k_v: &VPolytope, k_h: &HPolytope, z: &QVector, lambda: &Rational) -> bool {
    k_v.vertices().iter().all(|v| k_h.contains(&reflect_scaled(z, v, lambda)))
}

/// `z - lambda (v - z)`: the image of `v` under the homothety of ratio
/// `-lambda` about `z`.
fn reflect_scaled(z: &QVector, v: &QVector, lambda: &Rational) -> QVector {
    z - &(v - z).scale(lambda)
}

fn center_constraints(k_v: &VPolytope, k_h: &HPolytope) -> Vec<Halfspace> {
    let mut out = Vec::with_capacity(k_v.len() * k_h.len());
    for h in k_h.halfspaces() {
        for v in k_v.vertices() {
            let mut normal = h.normal.0.clone();
            normal.push(-h.normal.dot(v));
            out.push(Halfspace::new(QVector(normal), h.offset.clone()));
        }
    }
    out
}

fn cross_validate(k_v: &VPolytope, k_h: &HPolytope) -> Result<()> {
    if let Some((vi, hi)) = first_violation(k_v, k_h)? {
        return Err(Error::InconsistentRepresentations(format!(
            "vertex {vi} violates halfspace {hi}"
        )));
    }
    let vset = k_v.vertex_set();
    if let Some(extra) = k_h.vertices_bruteforce().into_iter().find(|x| !vset.contains(x)) {
        return Err(Error::InconsistentRepresentations(format!(
            "halfspace vertex {extra:?} is not among the listed vertices"
        )));
    }
    Ok(())
}

/// At fixed `lambda*`, checks that the feasible `w` set is a single point by
/// maximizing and minimizing every coordinate.
fn optimal_face_is_point(k_v: &VPolytope, k_h: &HPolytope, lambda: &Rational) -> bool {
    let n = k_v.n();
    let mut fixed = Vec::with_capacity(k_v.len() * k_h.len());
    for h in k_h.halfspaces() {
        for v in k_v.vertices() {
            fixed.push(Halfspace::new(
                h.normal.clone(),
                &h.offset + lambda * h.normal.dot(v),
            ));
        }
    }
    (0..n).all(|k| {
        let e = QVector::unit(n, k);
        let hi = lp_max(&e, &fixed);
        let lo = lp_max(&-&e, &fixed);
        match (hi.optimal(), lo.optimal()) {
            (Some(hi), Some(lo)) => hi.objective == -lo.objective.clone(),
            _ => false,
        }
    })
}

/// Distinct boundary contact points between `K` and its homothetic copy
/// `K' = z - as (K - z)`: vertices of `K` on the boundary of `K'` and
/// vertices of `K'` on the boundary of `K`.
pub fn verify_contact_points(k_v: &VPolytope, k_h: &HPolytope, result: &AsymmetryResult) -> usize {
    let mut points: BTreeSet<QVector> = result
        .tight_pairs
        .iter()
        .map(|&(j, _)| k_v.vertices()[j].clone())
        .collect();
    let ratio = -&result.as_value;
    for v in k_v.vertices() {
        let image = &result.center + &(v - &result.center).scale(&ratio);
        if k_h.contains(&image) {
            points.insert(image);
        }
    }
    points.len()
}

/// Recomputes the asymmetry of `A K + t` and checks that the constant is
/// unchanged and the center moves to `A z + t`.
pub fn asymmetry_affine_invariance_check(
    k_v: &VPolytope,
    k_h: &HPolytope,
    a: &QMatrix,
    t: &QVector,
) -> Result<bool> {
    let before = asymmetry(k_v, k_h)?;
    let after = asymmetry(&k_v.map_affine(a, t), &k_h.map_affine(a, t)?)?;
    Ok(before.as_value == after.as_value && &a.mul_vec(&before.center) + t == after.center)
}

/// Whether the vertex set is invariant under some point reflection.
pub fn is_centrally_symmetric(k: &VPolytope) -> bool {
    k.symmetry_center().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{cross_polytope, cube};
    use crate::rational::int;

    fn poly(points: &[(i64, i64)]) -> VPolytope {
        VPolytope::new(points.iter().map(|&(x, y)| QVector::from_ints(&[x, y])).collect()).unwrap()
    }

    #[test]
    fn square_is_symmetric() {
        let sq = poly(&[(-1, -1), (1, -1), (1, 1), (-1, 1)]);
        let res = polygon_asymmetry(&sq).unwrap();
        assert_eq!(res.as_value, int(1));
        assert_eq!(res.center, QVector::from_ints(&[0, 0]));
        assert!(res.center_unique);
    }

    #[test]
    fn triangle_has_asymmetry_two() {
        let tri = poly(&[(0, 2), (-3, -1), (3, -1)]);
        let h = polygon_to_h(&tri).unwrap();
        let res = asymmetry(&tri, &h).unwrap();
        assert_eq!(res.as_value, int(2));
        assert_eq!(res.center, QVector::from_ints(&[0, 0]));
        assert!(res.center_unique);
        // Each vertex maps onto the midpoint of the opposite edge.
        assert_eq!(res.tight_pairs.len(), 3);
        assert_eq!(verify_contact_points(&tri, &h, &res), 3);
    }

    #[test]
    fn containment_is_tight_at_optimum() {
        let quad = poly(&[(0, 0), (4, 0), (3, 2), (0, 1)]);
        let h = polygon_to_h(&quad).unwrap();
        let res = asymmetry(&quad, &h).unwrap();
        assert!(homothetic_containment(&quad, &h, &res.center, &res.lambda));
        let bumped = &res.lambda + Rational::new(1.into(), 1_000_000.into());
        assert!(!homothetic_containment(&quad, &h, &res.center, &bumped));
    }

    #[test]
    fn off_origin_triangle() {
        let tri = poly(&[(1, 1), (7, 1), (1, 4)]);
        let res = polygon_asymmetry(&tri).unwrap();
        assert_eq!(res.as_value, int(2));
        assert_eq!(res.center, QVector::from_ints(&[3, 2]));
    }

    #[test]
    fn three_dimensional_bodies() {
        let (cv, ch) = cube(3).unwrap();
        assert_eq!(asymmetry(&cv, &ch).unwrap().as_value, int(1));
        let (xv, xh) = cross_polytope(3).unwrap();
        assert_eq!(asymmetry(&xv, &xh).unwrap().as_value, int(1));
        // Simplex conv{0, e1, e2, e3} has asymmetry 3.
        let simplex = VPolytope::from_ints(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]).unwrap();
        let h = HPolytope::new(vec![
            Halfspace::new(QVector::from_ints(&[-1, 0, 0]), int(0)),
            Halfspace::new(QVector::from_ints(&[0, -1, 0]), int(0)),
            Halfspace::new(QVector::from_ints(&[0, 0, -1]), int(0)),
            Halfspace::new(QVector::from_ints(&[1, 1, 1]), int(1)),
        ])
        .unwrap();
        let res = asymmetry(&simplex, &h).unwrap();
        assert_eq!(res.as_value, int(3));
        assert_eq!(res.center, QVector::from_fracs(&[(1, 4), (1, 4), (1, 4)]));
    }

    #[test]
    fn inconsistent_representations() {
        let tri = poly(&[(0, 2), (-3, -1), (3, -1)]);
        let (_, sq_h) = cube(2).unwrap();
        assert!(matches!(
            asymmetry(&tri, &sq_h),
            Err(Error::InconsistentRepresentations(_))
        ));
        let (sq_v, _) = cube(2).unwrap();
        let big = sq_h.scale(&int(2));
        assert!(matches!(
            asymmetry(&sq_v, &big),
            Err(Error::InconsistentRepresentations(_))
        ));
    }

    #[test]
    fn degenerate_body() {
        let seg = poly(&[(0, 0), (1, 1), (2, 2)]);
        let (_, h) = cube(2).unwrap();
        assert_eq!(asymmetry(&seg, &h), Err(Error::DegenerateBody));
    }

    #[test]
    fn shear_keeps_triangle_asymmetry() {
        let tri = poly(&[(0, 2), (-3, -1), (3, -1)]);
        let h = polygon_to_h(&tri).unwrap();
        let shear = QMatrix::from_ints(&[&[1, 1], &[0, 1]]);
        let t = QVector::from_fracs(&[(1, 3), (-2, 7)]);
        assert!(asymmetry_affine_invariance_check(&tri, &h, &shear, &t).unwrap());
    }

    #[test]
    fn asymmetric_quadrilateral_within_bounds() {
        let quad = poly(&[(0, 0), (4, 0), (3, 2), (0, 1)]);
        let res = polygon_asymmetry(&quad).unwrap();
        assert!(res.as_value > int(1) && res.as_value < int(2));
        assert!(res.center_unique);
        let h = polygon_to_h(&quad).unwrap();
        assert!(verify_contact_points(&quad, &h, &res) >= 3);
    }
}
