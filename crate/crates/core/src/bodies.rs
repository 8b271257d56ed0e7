//! Reference bodies `K` with `o ∈ int K`, their support functions, the polar
//! machinery, and the point–hyperplane map `φ(ru) = H(u, 1/r)`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::sync::OnceLock;

use thiserror::Error;

use crate::geometry::linalg::{self, dot, norm};
use crate::geometry::{
    convex_hull, distance_to_hull, mean_width_estimate, mean_width_quadrature, volume,
    GeometryError, Hyperplane, Point, Polytope, ToleranceConfig,
};

/// Quadrature budget for the reference mean width of bodies in `d ≥ 4`.
pub const REFERENCE_WIDTH_BUDGET: usize = 1_000_000;

/// Bisection tolerance on the radial parameter of `K_1`.
pub const RADIAL_BISECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BodyError {
    #[error("the origin is not an interior point of the body (margin {margin:e})")]
    OriginNotInterior { margin: f64 },
    #[error("φ is undefined at the origin")]
    OriginArgument,
    #[error("hyperplane offset {0} is not positive")]
    NonpositiveOffset(f64),
    #[error("invalid body: {0}")]
    Invalid(String),
    #[error("vertex list: {0}")]
    Parse(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A polytopal body with its polar, computed at construction.
#[derive(Debug)]
pub struct PolyBody {
    polytope: Polytope,
    polar: Polytope,
    width: OnceLock<(f64, f64)>,
}

impl Clone for PolyBody {
    fn clone(&self) -> Self {
        let width = OnceLock::new();
        if let Some(w) = self.width.get() {
            let _ = width.set(*w);
        }
        Self {
            polytope: self.polytope.clone(),
            polar: self.polar.clone(),
            width,
        }
    }
}

impl PolyBody {
    fn new(polytope: Polytope) -> Result<Self, BodyError> {
        let polar = polar_polytope(&polytope, &ToleranceConfig::default())?;
        Ok(Self {
            polytope,
            polar,
            width: OnceLock::new(),
        })
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn polar(&self) -> &Polytope {
        &self.polar
    }
}

/// The reference convex body.
#[derive(Debug, Clone)]
pub enum Body {
    Ball { center: Point, radius: f64 },
    Poly(PolyBody),
    RegularPolygon {
        sides: usize,
        circumradius: f64,
        body: PolyBody,
    },
}

impl Body {
    pub fn ball(center: Point, radius: f64) -> Result<Self, BodyError> {
        if !(radius > 0.0) || center.dim() < 2 {
            return Err(BodyError::Invalid(format!(
                "ball needs radius > 0 and d ≥ 2 (radius {radius}, d {})",
                center.dim()
            )));
        }
        let margin = radius - center.norm();
        if margin <= ToleranceConfig::default().geom {
            return Err(BodyError::OriginNotInterior { margin });
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn unit_ball(d: usize) -> Self {
        Self::ball(Point::origin(d), 1.0).expect("unit ball is valid")
    }

    /// A polytopal body. The origin must be interior.
    pub fn polytope(p: Polytope) -> Result<Self, BodyError> {
        Ok(Self::Poly(PolyBody::new(p)?))
    }

    /// Translates `p` so its vertex centroid is the origin.
    pub fn polytope_centered(p: Polytope) -> Result<Self, BodyError> {
        let c = p.vertex_centroid();
        let shift: Vec<f64> = c.iter().map(|x| -x).collect();
        Self::polytope(p.translated(&shift))
    }

    /// Regular `k`-gon with the given circumradius, a vertex on the positive
    /// x-axis.
    pub fn regular_polygon(sides: usize, circumradius: f64) -> Result<Self, BodyError> {
        if sides < 3 || !(circumradius > 0.0) {
            return Err(BodyError::Invalid(format!(
                "polygon needs ≥ 3 sides and positive radius (got {sides}, {circumradius})"
            )));
        }
        let pts: Vec<Point> = (0..sides)
            .map(|j| {
                let a = 2.0 * PI * j as f64 / sides as f64;
                Point::new(vec![circumradius * a.cos(), circumradius * a.sin()])
            })
            .collect();
        let p = convex_hull(&pts, &ToleranceConfig::default())?;
        Ok(Self::RegularPolygon {
            sides,
            circumradius,
            body: PolyBody::new(p)?,
        })
    }

    /// Regular simplex inscribed in the unit sphere, centroid at the origin.
    pub fn regular_simplex(d: usize) -> Result<Self, BodyError> {
        if d < 2 {
            return Err(BodyError::Invalid("simplex needs d ≥ 2".into()));
        }
        let c = 1.0 / (d + 1) as f64;
        let lifted: Vec<Vec<f64>> = (0..=d)
            .map(|i| (0..=d).map(|k| if k == i { 1.0 - c } else { -c }).collect())
            .collect();
        let basis = linalg::orthonormal_basis(&lifted[..d], 1e-12);
        let r = ((d as f64) / (d + 1) as f64).sqrt();
        let pts: Vec<Point> = lifted
            .iter()
            .map(|v| Point::new(basis.iter().map(|b| dot(v, b) / r).collect()))
            .collect();
        Self::polytope(convex_hull(&pts, &ToleranceConfig::default())?)
    }

    /// The cube `[−a, a]^d`.
    pub fn cube(d: usize, half_side: f64) -> Result<Self, BodyError> {
        if d < 2 || !(half_side > 0.0) {
            return Err(BodyError::Invalid("cube needs d ≥ 2 and positive side".into()));
        }
        let pts: Vec<Point> = (0..1usize << d)
            .map(|i| {
                Point::new(
                    (0..d)
                        .map(|k| if (i >> k) & 1 == 1 { half_side } else { -half_side })
                        .collect(),
                )
            })
            .collect();
        Self::polytope(convex_hull(&pts, &ToleranceConfig::default())?)
    }

    /// Body from a vertex list, optionally recentered at its vertex centroid.
    pub fn from_vertices(points: &[Point], center: bool) -> Result<Self, BodyError> {
        let p = convex_hull(points, &ToleranceConfig::default())?;
        if center {
            Self::polytope_centered(p)
        } else {
            Self::polytope(p)
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::Ball { center, .. } => center.dim(),
            Body::Poly(b) | Body::RegularPolygon { body: b, .. } => b.polytope.dim(),
        }
    }

    pub fn as_poly(&self) -> Option<&PolyBody> {
        match self {
            Body::Ball { .. } => None,
            Body::Poly(b) | Body::RegularPolygon { body: b, .. } => Some(b),
        }
    }

    pub fn polytope_ref(&self) -> Option<&Polytope> {
        self.as_poly().map(|b| &b.polytope)
    }

    pub fn polar_ref(&self) -> Option<&Polytope> {
        self.as_poly().map(|b| &b.polar)
    }

    pub fn is_ball(&self) -> bool {
        matches!(self, Body::Ball { .. })
    }

    /// `h(K, u)` for a unit vector `u`.
    #[inline]
    pub fn support(&self, u: &[f64]) -> f64 {
        match self {
            Body::Ball { center, radius } => dot(center, u) + radius,
            Body::Poly(b) | Body::RegularPolygon { body: b, .. } => b.polytope.support(u),
        }
    }

    /// `h(K, x)` for any vector, using positive homogeneity.
    pub fn support_vec(&self, x: &[f64]) -> f64 {
        match self {
            Body::Ball { center, radius } => dot(center, x) + radius * norm(x),
            _ => self.support(x),
        }
    }

    /// `h(K_1, u) = h(K, u) + 1` for the parallel body `K_1 = K + B^d`.
    pub fn support_parallel(&self, u: &[f64]) -> f64 {
        self.support(u) + 1.0
    }

    /// Euclidean distance from `x` to `K`.
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Body::Ball { center, radius } => (linalg::dist(x, center) - radius).max(0.0),
            Body::Poly(b) | Body::RegularPolygon { body: b, .. } => {
                let p = &b.polytope;
                let mut worst = f64::NEG_INFINITY;
                for f in p.facets() {
                    worst = worst.max(f.plane.signed_distance(x));
                }
                if worst <= 0.0 {
                    return 0.0;
                }
                distance_to_hull(p.vertices(), x)
            }
        }
    }

    /// Mean width `W(K)` and its numerical error (zero unless `d ≥ 4`).
    pub fn mean_width(&self) -> (f64, f64) {
        match self {
            Body::Ball { radius, .. } => (2.0 * radius, 0.0),
            Body::Poly(b) | Body::RegularPolygon { body: b, .. } => *b.width.get_or_init(|| {
                if b.polytope.dim() <= 3 {
                    mean_width_estimate(&b.polytope)
                } else {
                    mean_width_quadrature(
                        |u| b.polytope.support(u),
                        b.polytope.dim(),
                        REFERENCE_WIDTH_BUDGET,
                        crate::geometry::DEFAULT_QUADRATURE_SEED,
                    )
                }
            }),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Body::Ball { center, radius } => {
                linalg::ball_volume(center.dim()) * radius.powi(center.dim() as i32)
            }
            Body::Poly(b) | Body::RegularPolygon { body: b, .. } => volume(&b.polytope),
        }
    }

    /// `x ∈ K_1^*`, i.e. `h(K, x) + ‖x‖ ≤ 1`.
    pub fn in_k1_star(&self, x: &[f64]) -> bool {
        self.support_vec(x) + norm(x) <= 1.0
    }

    /// `x ∈ X_K = cl(K^* ∖ K_1^*)`: inside `K^*` and not interior to `K_1^*`.
    pub fn in_x_k(&self, x: &[f64]) -> bool {
        let h = self.support_vec(x);
        h <= 1.0 && h + norm(x) >= 1.0
    }

    /// Radius of the largest ball about the origin inside `K`.
    pub fn inradius(&self) -> f64 {
        match self {
            Body::Ball { center, radius } => radius - center.norm(),
            Body::Poly(b) | Body::RegularPolygon { body: b, .. } => b
                .polytope
                .facets()
                .iter()
                .map(|f| f.plane.offset())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Radius of the smallest ball about the origin containing `K`.
    pub fn circumradius(&self) -> f64 {
        match self {
            Body::Ball { center, radius } => radius + center.norm(),
            Body::Poly(b) | Body::RegularPolygon { body: b, .. } => b
                .polytope
                .vertices()
                .iter()
                .map(|v| v.norm())
                .fold(0.0, f64::max),
        }
    }

    /// Largest `λ` (to within the bisection tolerance, from below) with
    /// `λν ∈ K_1`, for a unit vector `ν`.
    ///
    /// The search starts from the bracket `[ρ + 1, R + 1]` given by the in- and
    /// circumradius about the origin.
    pub fn radial_k1(&self, nu: &[f64]) -> f64 {
        let mut x = vec![0.0; nu.len()];
        let mut inside = |l: f64| {
            for (xi, ni) in x.iter_mut().zip(nu) {
                *xi = ni * l;
            }
            self.distance(&x) <= 1.0
        };
        let mut lo = self.inradius() + 1.0;
        let mut hi = self.circumradius() + 1.0 + RADIAL_BISECTION_TOL;
        if !inside(lo) {
            lo = 0.0;
        }
        while inside(hi) {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > RADIAL_BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// `h(K_1^*, ν) = 1/λ*` via [`Self::radial_k1`]. Rounds upward, so a
    /// containment test based on it never accepts wrongly.
    pub fn support_k1_star(&self, nu: &[f64]) -> f64 {
        1.0 / self.radial_k1(nu)
    }

    /// The body dilated by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self, BodyError> {
        match self {
            Body::Ball { center, radius } => Self::ball(
                Point::new(center.iter().map(|x| x * factor).collect()),
                radius * factor,
            ),
            Body::Poly(b) => Self::polytope(b.polytope.scaled(factor)),
            Body::RegularPolygon {
                sides,
                circumradius,
                ..
            } => Self::regular_polygon(*sides, circumradius * factor),
        }
    }

    /// Image under the linear map `m` (row-major); polytopal bodies only.
    pub fn linear_image(&self, m: &[f64]) -> Result<Self, BodyError> {
        match self.as_poly() {
            Some(b) => Self::polytope(b.polytope.linear_image(m)?),
            None => Err(BodyError::Invalid("linear images of balls are not supported".into())),
        }
    }

    /// `K` if it is a simplicial polytope: the number of facets `r`.
    pub fn simplicial_facet_count(&self) -> Option<usize> {
        let p = self.polytope_ref()?;
        p.facets()
            .iter()
            .all(|f| f.vertices.len() == p.dim())
            .then_some(p.facets().len())
    }
}

impl fmt::Display for Body {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Body::Ball { center, radius } => write!(f, "ball(d={}, r={radius})", center.dim()),
            Body::Poly(b) => write!(f, "polytope({})", b.polytope),
            Body::RegularPolygon {
                sides,
                circumradius,
                ..
            } => write!(f, "polygon(k={sides}, R={circumradius})"),
        }
    }
}

/// Polar `P^* = {y : ⟨x, y⟩ ≤ 1 ∀x ∈ P}`, whose vertices are `u_F / c_F`.
pub fn polar_polytope(p: &Polytope, tol: &ToleranceConfig) -> Result<Polytope, BodyError> {
    let margin = p
        .facets()
        .iter()
        .map(|f| f.plane.offset())
        .fold(f64::INFINITY, f64::min);
    if margin <= tol.geom {
        return Err(BodyError::OriginNotInterior { margin });
    }
    let pts: Vec<Point> = p
        .facets()
        .iter()
        .map(|f| {
            let c = f.plane.offset();
            Point::new(f.plane.normal().iter().map(|x| x / c).collect())
        })
        .collect();
    Ok(convex_hull(&pts, tol)?)
}

/// `φ(ru) = H(u, 1/r)`.
pub fn phi(x: &Point) -> Result<Hyperplane, BodyError> {
    let r = x.norm();
    if r == 0.0 {
        return Err(BodyError::OriginArgument);
    }
    Ok(Hyperplane::new_unchecked(
        x.iter().map(|v| v / r).collect(),
        1.0 / r,
    ))
}

/// `φ^{-1}(H(u, c)) = u / c`.
pub fn phi_inv(h: &Hyperplane) -> Result<Point, BodyError> {
    let c = h.offset();
    if !(c > 0.0) {
        return Err(BodyError::NonpositiveOffset(c));
    }
    Ok(Point::new(h.normal().iter().map(|v| v / c).collect()))
}

/// A polytope and its polar, with the incidence invariants checked.
#[derive(Debug, Clone)]
pub struct PolarPair {
    pub primal: Polytope,
    pub polar: Polytope,
}

impl PolarPair {
    pub fn new(primal: Polytope, tol: &ToleranceConfig) -> Result<Self, BodyError> {
        let polar = polar_polytope(&primal, tol)?;
        Ok(Self { primal, polar })
    }

    /// Checks `f_0(P^*) = f_{d-1}(P)`, `f_{d-1}(P^*) = f_0(P)`, and
    /// `⟨v, w⟩ ≤ 1` with equality exactly on incident pairs.
    pub fn validate(&self, eps: f64) -> Result<(), BodyError> {
        let (p, q) = (&self.primal, &self.polar);
        if p.vertices().len() != q.facets().len() || p.facets().len() != q.vertices().len() {
            return Err(BodyError::Invalid("face counts do not swap under polarity".into()));
        }
        for f in p.facets() {
            let dual_vertex: Vec<f64> =
                f.plane.normal().iter().map(|x| x / f.plane.offset()).collect();
            for (vi, v) in p.vertices().iter().enumerate() {
                let s = dot(v, &dual_vertex);
                if s > 1.0 + eps {
                    return Err(BodyError::Invalid(format!("⟨v, w⟩ = {s} > 1")));
                }
                if f.vertices.contains(&vi) != ((s - 1.0).abs() <= eps) {
                    return Err(BodyError::Invalid(format!(
                        "incidence mismatch: ⟨v, w⟩ = {s}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Parses the vertex-list format: a header line `d n`, then `n` lines of `d`
/// whitespace-separated decimals. Blank lines and `#` comments are skipped.
pub fn parse_vertex_list(text: &str) -> Result<Vec<Point>, BodyError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| BodyError::Parse("missing header line".into()))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| BodyError::Parse(format!("bad header {header:?}: {e}")))?;
    let [d, n] = nums[..] else {
        return Err(BodyError::Parse(format!("header must be `d n`, got {header:?}")));
    };
    let mut pts = Vec::with_capacity(n);
    for (k, line) in lines.enumerate() {
        let coords: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| BodyError::Parse(format!("line {}: {e}", k + 2)))?;
        if coords.len() != d {
            return Err(BodyError::Parse(format!(
                "line {}: expected {d} coordinates, got {}",
                k + 2,
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(BodyError::Parse(format!("line {}: non-finite coordinate", k + 2)));
        }
        pts.push(Point::new(coords));
    }
    if pts.len() != n {
        return Err(BodyError::Parse(format!("expected {n} vertices, got {}", pts.len())));
    }
    Ok(pts)
}

pub fn read_vertex_list(path: &Path) -> Result<Vec<Point>, BodyError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| BodyError::Parse(format!("{}: {e}", path.display())))?;
    parse_vertex_list(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square01() -> Body {
        // [0,1]² does not contain o in its interior; support is still defined
        // on the raw polytope.
        Body::cube(2, 0.5).unwrap()
    }

    #[test]
    fn support_values() {
        let ball = Body::unit_ball(3);
        assert_eq!(ball.support(&[0.0, 0.0, 1.0]), 1.0);
        assert_eq!(ball.support_parallel(&[0.0, 1.0, 0.0]), 2.0);
        // [0,1]² = [−½,½]² + (½,½).
        let shifted = square01().polytope_ref().unwrap().translated(&[0.5, 0.5]);
        assert_eq!(shifted.support(&[1.0, 0.0]), 1.0);
        let s = 0.5f64.sqrt();
        assert!((shifted.support(&[s, s]) - 2f64.sqrt()).abs() < 1e-15);
        let k = square01();
        for u in [[1.0, 0.0], [0.6, 0.8], [-s, s]] {
            assert!((k.support_parallel(&u) - k.support(&u) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn support_is_homogeneous() {
        let k = Body::regular_simplex(3).unwrap();
        let x = [0.3, -0.2, 0.9];
        for l in [0.5, 2.0, 7.0] {
            let y: Vec<f64> = x.iter().map(|v| v * l).collect();
            assert!((k.support_vec(&y) - l * k.support_vec(&x)).abs() < 1e-12);
        }
        let b = Body::ball(Point::from([0.1, 0.2]), 1.0).unwrap();
        assert!((b.support_vec(&[0.0, 3.0]) - 3.0 * b.support(&[0.0, 1.0])).abs() < 1e-12);
    }

    #[test]
    fn polar_of_square_is_cross_polytope() {
        let sq = Body::cube(2, 1.0).unwrap();
        let polar = sq.polar_ref().unwrap();
        let cross = convex_hull(
            &[
                Point::from([1.0, 0.0]),
                Point::from([-1.0, 0.0]),
                Point::from([0.0, 1.0]),
                Point::from([0.0, -1.0]),
            ],
            &ToleranceConfig::default(),
        )
        .unwrap();
        assert!(polar.same_vertex_set(&cross, 1e-12));
    }

    #[test]
    fn polar_of_regular_polygon_is_rotated_polygon() {
        for k in [3, 5, 8] {
            let body = Body::regular_polygon(k, 1.0).unwrap();
            let polar = body.polar_ref().unwrap();
            // Inradius 1 means circumradius 1/cos(π/k); vertices at angles (2j+1)π/k.
            let rc = 1.0 / (PI / k as f64).cos();
            let expected: Vec<Point> = (0..k)
                .map(|j| {
                    let a = (2 * j + 1) as f64 * PI / k as f64;
                    Point::from([rc * a.cos(), rc * a.sin()])
                })
                .collect();
            let e = convex_hull(&expected, &ToleranceConfig::default()).unwrap();
            assert!(polar.same_vertex_set(&e, 1e-9), "k={k}");
        }
    }

    #[test]
    fn polar_is_an_involution() {
        for d in 2..=4 {
            let mut pts: Vec<Point> = (0..d)
                .map(|i| {
                    let mut e = vec![0.0; d];
                    e[i] = 1.0;
                    Point::new(e)
                })
                .collect();
            pts.push(Point::new(vec![-1.0; d]));
            let tol = ToleranceConfig::default();
            let p = convex_hull(&pts, &tol).unwrap();
            let back = polar_polytope(&polar_polytope(&p, &tol).unwrap(), &tol).unwrap();
            assert!(back.same_vertex_set(&p, 1e-9), "d={d}");
            PolarPair::new(p, &tol).unwrap().validate(1e-9).unwrap();
        }
    }

    #[test]
    fn polar_requires_interior_origin() {
        let p = Body::cube(2, 0.5).unwrap().polytope_ref().unwrap().translated(&[0.5, 0.5]);
        assert!(matches!(
            polar_polytope(&p, &ToleranceConfig::default()),
            Err(BodyError::OriginNotInterior { .. })
        ));
        assert!(matches!(Body::polytope(p), Err(BodyError::OriginNotInterior { .. })));
    }

    #[test]
    fn phi_examples() {
        let h = phi(&Point::from([2.0, 0.0, 0.0])).unwrap();
        assert_eq!(h.normal(), &[1.0, 0.0, 0.0]);
        assert_eq!(h.offset(), 0.5);
        let h = Hyperplane::new(vec![0.0, 1.0], 4.0, &ToleranceConfig::default()).unwrap();
        assert_eq!(phi_inv(&h).unwrap().coords(), &[0.0, 0.25]);
        assert_eq!(phi(&Point::origin(2)), Err(BodyError::OriginArgument));
        let bad = Hyperplane::new(vec![1.0, 0.0], -1.0, &ToleranceConfig::default()).unwrap();
        assert_eq!(phi_inv(&bad), Err(BodyError::NonpositiveOffset(-1.0)));
    }

    #[test]
    fn k1_star_membership_for_the_ball() {
        let b = Body::unit_ball(3);
        assert!(b.in_k1_star(&[0.4, 0.0, 0.0]));
        assert!(!b.in_k1_star(&[0.0, 0.6, 0.0]));
        assert!(b.in_k1_star(&[0.0, 0.0, 0.0]));
        assert!(Body::regular_simplex(3).unwrap().in_k1_star(&[0.0; 3]));
        assert!(b.in_x_k(&[0.75, 0.0, 0.0]));
        assert!(!b.in_x_k(&[1.2, 0.0, 0.0]));
        assert!(!b.in_x_k(&[0.3, 0.0, 0.0]));
    }

    #[test]
    fn radial_function_of_parallel_body() {
        let b = Body::unit_ball(2);
        assert!((b.radial_k1(&[1.0, 0.0]) - 2.0).abs() <= RADIAL_BISECTION_TOL);
        assert!(b.support_k1_star(&[0.0, 1.0]) >= 0.5);
        let sq = Body::cube(2, 1.0).unwrap();
        let s = 0.5f64.sqrt();
        // Corner (1,1) plus a unit step along the diagonal.
        assert!((sq.radial_k1(&[s, s]) - (2f64.sqrt() + 1.0)).abs() < 1e-9);
        assert!((sq.radial_k1(&[1.0, 0.0]) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn reference_widths_and_volumes() {
        let sq = Body::cube(2, 0.5).unwrap();
        assert!((sq.mean_width().0 - 4.0 / PI).abs() < 1e-12);
        assert!((Body::cube(3, 0.5).unwrap().mean_width().0 - 1.5).abs() < 1e-12);
        assert!((Body::unit_ball(3).volume() - 4.0 * PI / 3.0).abs() < 1e-12);
        let tri = Body::regular_polygon(3, 1.0).unwrap();
        assert!((tri.volume() - 3.0 * 3f64.sqrt() / 4.0).abs() < 1e-12);
        assert_eq!(tri.simplicial_facet_count(), Some(3));
        assert_eq!(Body::regular_simplex(3).unwrap().simplicial_facet_count(), Some(4));
        assert_eq!(Body::cube(3, 1.0).unwrap().simplicial_facet_count(), None);
    }

    #[test]
    fn regular_simplex_is_inscribed_and_centered() {
        for d in 2..=4 {
            let s = Body::regular_simplex(d).unwrap();
            let p = s.polytope_ref().unwrap();
            assert_eq!(p.vertices().len(), d + 1);
            for v in p.vertices() {
                assert!((v.norm() - 1.0).abs() < 1e-12);
            }
            assert!(p.vertex_centroid().norm() < 1e-12);
        }
    }

    #[test]
    fn vertex_list_format() {
        let pts = parse_vertex_list("2 3\n0 0\n1 0\n0 1\n").unwrap();
        assert_eq!(pts.len(), 3);
        let body = Body::from_vertices(&pts, true).unwrap();
        assert!(body.polytope_ref().unwrap().vertex_centroid().norm() < 1e-12);
        assert!(matches!(
            Body::from_vertices(&pts, false),
            Err(BodyError::OriginNotInterior { .. })
        ));
        assert!(parse_vertex_list("2 3\n0 0\n1 0\n").is_err());
        assert!(parse_vertex_list("2 1\n0 0 0\n").is_err());
        assert!(parse_vertex_list("x\n").is_err());
    }
}
