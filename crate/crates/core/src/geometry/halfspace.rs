use super::hull::quickhull_merged;
use super::linalg::dot;
use super::{Facet, GeometryError, Hyperplane, Point, Polytope, ToleranceConfig};

/// A halfspace intersection together with the provenance of its facets.
#[derive(Debug, Clone)]
pub struct IndexedIntersection {
    pub polytope: Polytope,
    /// `facet_sources[f]` is the index of the input halfspace supporting facet `f`.
    pub facet_sources: Vec<usize>,
}

/// Intersection of the halfspaces `⟨x, u_i⟩ ≤ c_i`.
///
/// The witness must satisfy every halfspace strictly. After translating it to
/// the origin each halfspace becomes the dual point `u_i / c_i`; the dual hull
/// contains the origin in its interior iff the intersection is bounded, and
/// every dual facet `(ν, c)` yields the primal vertex `ν / c`.
pub fn halfspace_intersection(
    halfspaces: &[Hyperplane],
    witness: &Point,
    tol: &ToleranceConfig,
) -> Result<Polytope, GeometryError> {
    halfspace_intersection_indexed(halfspaces, witness, tol).map(|r| r.polytope)
}

pub fn halfspace_intersection_indexed(
    halfspaces: &[Hyperplane],
    witness: &Point,
    tol: &ToleranceConfig,
) -> Result<IndexedIntersection, GeometryError> {
    let d = witness.dim();
    let mut dual = Vec::with_capacity(halfspaces.len() * d);
    for (i, h) in halfspaces.iter().enumerate() {
        if h.dim() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                got: h.dim(),
            });
        }
        let slack = h.offset() - dot(h.normal(), witness);
        if slack <= tol.geom {
            return Err(GeometryError::WitnessViolation { index: i, slack });
        }
        dual.extend(h.normal().iter().map(|x| x / slack));
    }
    if halfspaces.len() < d + 1 {
        return Err(GeometryError::Unbounded);
    }
    // Dual points live at scale 1/slack; use a tolerance relative to it.
    let dual_scale = dual.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let dtol = tol.geom * dual_scale;
    let hull = match quickhull_merged(&dual, d, dtol) {
        Ok(h) => h,
        // Affinely dependent dual points cannot surround the origin.
        Err(GeometryError::DegenerateInput(_)) => return Err(GeometryError::Unbounded),
        Err(e) => return Err(e),
    };
    if hull.facets.iter().any(|(plane, _)| plane.offset() <= dtol) {
        return Err(GeometryError::Unbounded);
    }

    let vertices: Vec<Point> = hull
        .facets
        .iter()
        .map(|(plane, _)| {
            let c = plane.offset();
            Point::new(
                plane
                    .normal()
                    .iter()
                    .zip(witness.iter())
                    .map(|(n, w)| n / c + w)
                    .collect(),
            )
        })
        .collect();

    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); halfspaces.len()];
    for (g, (_, verts)) in hull.facets.iter().enumerate() {
        for &v in verts {
            incident[v].push(g);
        }
    }
    let facet_sources = hull.vertices.clone();
    let facets = facet_sources
        .iter()
        .map(|&i| Facet {
            plane: halfspaces[i].clone(),
            vertices: incident[i].clone(),
        })
        .collect();
    let polytope = Polytope::from_parts(d, vertices, facets, Some(hull.adjacency.clone()));
    Ok(IndexedIntersection {
        polytope,
        facet_sources,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hs(n: &[f64], c: f64) -> Hyperplane {
        Hyperplane::from_unnormalized(n.to_vec(), c)
    }

    #[test]
    fn axis_box() {
        let h = vec![
            hs(&[1., 0.], 1.),
            hs(&[-1., 0.], 1.),
            hs(&[0., 1.], 1.),
            hs(&[0., -1.], 1.),
        ];
        let tol = ToleranceConfig::default();
        let p = halfspace_intersection(&h, &Point::origin(2), &tol).unwrap();
        assert_eq!(p.vertices().len(), 4);
        for v in p.vertices() {
            assert!((v[0].abs() - 1.0).abs() < 1e-12 && (v[1].abs() - 1.0).abs() < 1e-12);
        }
        p.validate(&tol).unwrap();
    }

    #[test]
    fn two_halfplanes_are_unbounded() {
        let h = vec![hs(&[1., 0.], 1.), hs(&[-1., 0.], 1.)];
        let r = halfspace_intersection(&h, &Point::origin(2), &ToleranceConfig::default());
        assert_eq!(r.unwrap_err(), GeometryError::Unbounded);
    }

    #[test]
    fn open_wedge_is_unbounded() {
        let h = vec![hs(&[1., 0.], 1.), hs(&[0., 1.], 1.), hs(&[1., 1.], 1.5)];
        let r = halfspace_intersection(&h, &Point::origin(2), &ToleranceConfig::default());
        assert_eq!(r.unwrap_err(), GeometryError::Unbounded);
    }

    #[test]
    fn witness_violation() {
        let h = vec![hs(&[1., 0.], 1.), hs(&[-1., 0.], 1.), hs(&[0., 1.], 1.), hs(&[0., -1.], 1.)];
        let r = halfspace_intersection(&h, &Point::from([2.0, 0.0]), &ToleranceConfig::default());
        assert!(matches!(r, Err(GeometryError::WitnessViolation { index: 0, .. })));
    }

    #[test]
    fn redundant_halfspace_is_dropped_and_sources_tracked() {
        let h = vec![
            hs(&[1., 0.], 1.),
            hs(&[1., 0.], 5.),
            hs(&[-1., 0.], 1.),
            hs(&[0., 1.], 1.),
            hs(&[0., -1.], 1.),
        ];
        let r = halfspace_intersection_indexed(&h, &Point::from([0.3, 0.1]), &ToleranceConfig::default())
            .unwrap();
        assert_eq!(r.facet_sources, vec![0, 2, 3, 4]);
        assert_eq!(r.polytope.facets().len(), 4);
    }
}
