//! Incremental quickhull in arbitrary dimension.
//!
//! The working hull is a simplicial complex: every facet holds exactly `d`
//! vertex indices, its oriented plane, and the neighbor across each ridge
//! (`neighbors[k]` is opposite `verts[k]`). Points are assigned to the first
//! facet they lie strictly above (by more than the tolerance); the furthest
//! outside point of a facet is added next. After the loop, neighboring
//! simplices lying in a common hyperplane are merged into one facet.

use std::collections::HashMap;

use super::linalg::{self, dot, norm};
use super::{Facet, GeometryError, Hyperplane, Point, Polytope, ToleranceConfig};

#[derive(Debug, Clone)]
struct Simplex {
    verts: Vec<usize>,
    normal: Vec<f64>,
    offset: f64,
    neighbors: Vec<usize>,
    outside: Vec<(usize, f64)>,
    alive: bool,
}

/// Result of a hull computation, indexed by input point.
#[derive(Debug, Clone)]
pub(crate) struct MergedHull {
    pub dim: usize,
    /// Input indices of the extreme points, ascending.
    pub vertices: Vec<usize>,
    /// Merged facets: plane plus input indices of incident extreme points.
    pub facets: Vec<(Hyperplane, Vec<usize>)>,
    /// Pairs of merged facets sharing a ridge.
    pub adjacency: Vec<(usize, usize)>,
    /// Boundary triangulation (input indices, `d` per simplex).
    pub simplices: Vec<Vec<usize>>,
    /// A point strictly inside the hull.
    pub interior: Vec<f64>,
}

struct Builder<'a> {
    pts: &'a [f64],
    d: usize,
    interior: Vec<f64>,
    facets: Vec<Simplex>,
}

impl Builder<'_> {
    fn point(&self, i: usize) -> &[f64] {
        &self.pts[i * self.d..(i + 1) * self.d]
    }

    fn make_simplex(&self, verts: Vec<usize>) -> Result<Simplex, GeometryError> {
        let refs: Vec<&[f64]> = verts.iter().map(|&i| self.point(i)).collect();
        let mut normal = linalg::generalized_normal(&refs);
        let n = norm(&normal);
        if !(n > 0.0) || !n.is_finite() {
            return Err(GeometryError::DegenerateInput(
                "zero-area facet during hull construction".into(),
            ));
        }
        for x in normal.iter_mut() {
            *x /= n;
        }
        let mut offset = dot(&normal, refs[0]);
        if dot(&normal, &self.interior) > offset {
            for x in normal.iter_mut() {
                *x = -*x;
            }
            offset = -offset;
        }
        Ok(Simplex {
            neighbors: vec![usize::MAX; verts.len()],
            verts,
            normal,
            offset,
            outside: Vec::new(),
            alive: true,
        })
    }

    fn height(&self, f: usize, p: usize) -> f64 {
        let s = &self.facets[f];
        dot(&s.normal, self.point(p)) - s.offset
    }
}

/// Picks `d + 1` affinely independent points, greedily maximizing the
/// distance to the current affine span.
fn initial_simplex(pts: &[f64], d: usize, n: usize, tol: f64) -> Result<Vec<usize>, GeometryError> {
    let p = |i: usize| &pts[i * d..(i + 1) * d];
    let (mut lo, mut hi) = (0, 0);
    for i in 1..n {
        if p(i)[0] < p(lo)[0] {
            lo = i;
        }
        if p(i)[0] > p(hi)[0] {
            hi = i;
        }
    }
    if lo == hi {
        // All share the first coordinate; fall back to the point farthest from p(0).
        hi = (0..n)
            .max_by(|&a, &b| linalg::dist(p(a), p(0)).total_cmp(&linalg::dist(p(b), p(0))))
            .unwrap();
        lo = 0;
    }
    if linalg::dist(p(lo), p(hi)) <= tol {
        return Err(GeometryError::DegenerateInput("points coincide".into()));
    }
    let mut chosen = vec![lo, hi];
    let mut dirs = vec![linalg::sub(p(hi), p(lo))];
    while chosen.len() < d + 1 {
        let basis = linalg::orthonormal_basis(&dirs, 1e-300);
        let (best, best_dist) = (0..n)
            .map(|i| (i, linalg::distance_to_flat(p(i), p(lo), &basis)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if best_dist <= tol {
            return Err(GeometryError::DegenerateInput(format!(
                "points span only {} dimensions",
                chosen.len() - 1
            )));
        }
        dirs.push(linalg::sub(p(best), p(lo)));
        chosen.push(best);
    }
    Ok(chosen)
}

fn quickhull(pts: &[f64], d: usize, tol: f64) -> Result<(Vec<Simplex>, Vec<f64>), GeometryError> {
    let n = pts.len() / d;
    if d < 2 {
        return Err(GeometryError::DegenerateInput("dimension below 2".into()));
    }
    if n < d + 1 {
        return Err(GeometryError::DegenerateInput(format!(
            "{n} points cannot span dimension {d}"
        )));
    }
    let start = initial_simplex(pts, d, n, tol)?;
    let mut interior = vec![0.0; d];
    for &i in &start {
        for (c, x) in interior.iter_mut().zip(&pts[i * d..(i + 1) * d]) {
            *c += x / (d + 1) as f64;
        }
    }
    let mut b = Builder {
        pts,
        d,
        interior,
        facets: Vec::new(),
    };
    for k in 0..=d {
        let verts: Vec<usize> = start
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .map(|(_, &v)| v)
            .collect();
        let mut s = b.make_simplex(verts)?;
        // Neighbor opposite start[j] within facet k is facet j.
        s.neighbors = (0..=d).filter(|&j| j != k).collect();
        b.facets.push(s);
    }
    let mut in_start = vec![false; n];
    for &i in &start {
        in_start[i] = true;
    }
    for i in 0..n {
        if in_start[i] {
            continue;
        }
        for f in 0..b.facets.len() {
            let h = b.height(f, i);
            if h > tol {
                b.facets[f].outside.push((i, h));
                break;
            }
        }
    }

    let mut pending: Vec<usize> = (0..b.facets.len())
        .filter(|&f| !b.facets[f].outside.is_empty())
        .collect();
    let mut mark: Vec<u32> = vec![0; b.facets.len()];
    let mut epoch: u32 = 0;
    // Unmatched ridges of the new cone: sorted vertex keys (stride d - 1)
    // with their owner. Horizons are small, so a linear scan beats hashing.
    let mut open_keys: Vec<usize> = Vec::new();
    let mut open_owner: Vec<(usize, usize)> = Vec::new();
    let mut key: Vec<usize> = Vec::with_capacity(d);

    while let Some(f0) = pending.pop() {
        if !b.facets[f0].alive || b.facets[f0].outside.is_empty() {
            continue;
        }
        let apex = b.facets[f0]
            .outside
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;

        epoch += 1;
        mark.resize(b.facets.len(), 0);
        let mut visible = vec![f0];
        mark[f0] = epoch;
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut qi = 0;
        while qi < visible.len() {
            let f = visible[qi];
            qi += 1;
            for k in 0..d {
                let nb = b.facets[f].neighbors[k];
                if mark[nb] == epoch {
                    continue;
                }
                if b.height(nb, apex) > tol {
                    mark[nb] = epoch;
                    visible.push(nb);
                } else {
                    horizon.push((f, k));
                }
            }
        }
        let mut orphans: Vec<usize> = Vec::new();
        for &f in &visible {
            b.facets[f].alive = false;
            for &(p, _) in &b.facets[f].outside {
                if p != apex {
                    orphans.push(p);
                }
            }
            b.facets[f].outside = Vec::new();
        }

        open_keys.clear();
        open_owner.clear();
        let first_new = b.facets.len();
        for &(f, k) in &horizon {
            let mut verts = b.facets[f].verts.clone();
            verts[k] = apex;
            let nb = b.facets[f].neighbors[k];
            let mut s = b.make_simplex(verts)?;
            s.neighbors[k] = nb;
            let id = b.facets.len();
            if let Some(slot) = b.facets[nb].neighbors.iter().position(|&x| x == f) {
                b.facets[nb].neighbors[slot] = id;
            }
            for j in 0..d {
                if j == k {
                    continue;
                }
                key.clear();
                key.extend(s.verts.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &v)| v));
                key.sort_unstable();
                let found = open_keys.chunks_exact(d - 1).position(|c| c == key.as_slice());
                match found {
                    Some(slot) => {
                        let (other, oj) = open_owner.swap_remove(slot);
                        let last = open_owner.len();
                        if slot != last {
                            let (a, b2) = (slot * (d - 1), last * (d - 1));
                            for c in 0..d - 1 {
                                open_keys[a + c] = open_keys[b2 + c];
                            }
                        }
                        open_keys.truncate(last * (d - 1));
                        s.neighbors[j] = other;
                        b.facets[other].neighbors[oj] = id;
                    }
                    None => {
                        open_keys.extend_from_slice(&key);
                        open_owner.push((id, j));
                    }
                }
            }
            b.facets.push(s);
        }
        if !open_owner.is_empty() {
            return Err(GeometryError::DegenerateInput(
                "horizon is not a closed ridge cycle".into(),
            ));
        }
        for p in orphans {
            for f in first_new..b.facets.len() {
                let h = b.height(f, p);
                if h > tol {
                    b.facets[f].outside.push((p, h));
                    break;
                }
            }
        }
        for f in first_new..b.facets.len() {
            if !b.facets[f].outside.is_empty() {
                pending.push(f);
            }
        }
    }
    let interior = b.interior;
    Ok((b.facets, interior))
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Runs quickhull and merges coplanar simplices into true facets.
pub(crate) fn quickhull_merged(pts: &[f64], d: usize, tol: f64) -> Result<MergedHull, GeometryError> {
    let (simplices, interior) = quickhull(pts, d, tol)?;
    let alive: Vec<usize> = (0..simplices.len()).filter(|&i| simplices[i].alive).collect();
    let mut local = vec![usize::MAX; simplices.len()];
    for (li, &gi) in alive.iter().enumerate() {
        local[gi] = li;
    }
    let p = |i: usize| &pts[i * d..(i + 1) * d];

    let m = alive.len();
    let mut parent: Vec<usize> = (0..m).collect();
    let mut merged_any = false;
    for (a, &ga) in alive.iter().enumerate() {
        let sa = &simplices[ga];
        for (k, &gb) in sa.neighbors.iter().enumerate() {
            let bidx = local[gb];
            if bidx <= a {
                continue;
            }
            let sb = &simplices[gb];
            let opp_b = sb.verts[sb.neighbors.iter().position(|&x| x == ga).unwrap()];
            let opp_a = sa.verts[k];
            let ha = dot(&sa.normal, p(opp_b)) - sa.offset;
            let hb = dot(&sb.normal, p(opp_a)) - sb.offset;
            if ha.abs() <= tol && hb.abs() <= tol {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, bidx));
                if ra != rb {
                    parent[ra] = rb;
                    merged_any = true;
                }
            }
        }
    }

    let mut group_of = vec![usize::MAX; m];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for a in 0..m {
        let r = find(&mut parent, a);
        if group_of[r] == usize::MAX {
            group_of[r] = groups.len();
            groups.push(Vec::new());
        }
        let g = group_of[r];
        group_of[a] = g;
        groups[g].push(a);
    }

    let mut facets: Vec<(Hyperplane, Vec<usize>)> = groups
        .iter()
        .map(|members| {
            let mut verts: Vec<usize> = members
                .iter()
                .flat_map(|&a| simplices[alive[a]].verts.iter().copied())
                .collect();
            verts.sort_unstable();
            verts.dedup();
            let plane = if members.len() == 1 {
                let s = &simplices[alive[members[0]]];
                Hyperplane::new_unchecked(s.normal.clone(), s.offset)
            } else {
                let mut nrm = vec![0.0; d];
                for &a in members {
                    for (x, y) in nrm.iter_mut().zip(&simplices[alive[a]].normal) {
                        *x += y;
                    }
                }
                let l = norm(&nrm);
                nrm.iter_mut().for_each(|x| *x /= l);
                let off = verts
                    .iter()
                    .map(|&v| dot(&nrm, p(v)))
                    .fold(f64::NEG_INFINITY, f64::max);
                Hyperplane::new_unchecked(nrm, off)
            };
            (plane, verts)
        })
        .collect();

    let mut adjacency = Vec::new();
    for (a, &ga) in alive.iter().enumerate() {
        for &gb in &simplices[ga].neighbors {
            let (x, y) = (group_of[a], group_of[local[gb]]);
            if x < y {
                adjacency.push((x, y));
            }
        }
    }
    adjacency.sort_unstable();
    adjacency.dedup();

    let mut vertices: Vec<usize> = facets.iter().flat_map(|f| f.1.iter().copied()).collect();
    vertices.sort_unstable();
    vertices.dedup();

    if merged_any {
        // Points inside a merged facet or on a merged ridge are not extreme:
        // the normals of their incident facets do not span R^d.
        let mut inc: HashMap<usize, Vec<usize>> = HashMap::new();
        for (fi, f) in facets.iter().enumerate() {
            for &v in &f.1 {
                inc.entry(v).or_default().push(fi);
            }
        }
        let extreme: Vec<usize> = vertices
            .iter()
            .copied()
            .filter(|v| {
                let normals: Vec<Vec<f64>> =
                    inc[v].iter().map(|&fi| facets[fi].0.normal().to_vec()).collect();
                linalg::orthonormal_basis(&normals, 1e-7).len() >= d
            })
            .collect();
        if extreme.len() != vertices.len() {
            let keep: std::collections::HashSet<usize> = extreme.iter().copied().collect();
            for f in facets.iter_mut() {
                f.1.retain(|v| keep.contains(v));
            }
            vertices = extreme;
        }
    }

    let simplices_out = alive.iter().map(|&g| simplices[g].verts.clone()).collect();
    Ok(MergedHull {
        dim: d,
        vertices,
        facets,
        adjacency,
        simplices: simplices_out,
        interior,
    })
}

/// Convex hull of a finite point set.
///
/// Returns the polytope whose vertices are the extreme input points. Fails
/// with `DegenerateInput` when fewer than `d + 1` points are given or the
/// points are not full-dimensional within `tol.geom`.
pub fn convex_hull(points: &[Point], tol: &ToleranceConfig) -> Result<Polytope, GeometryError> {
    let d = points
        .first()
        .map(|p| p.dim())
        .ok_or_else(|| GeometryError::DegenerateInput("empty point set".into()))?;
    let flat = super::flatten(points, d)?;
    let hull = quickhull_merged(&flat, d, tol.geom)?;
    Ok(hull_to_polytope(&hull, points))
}

/// [`convex_hull`] together with the input index of each returned vertex.
pub fn convex_hull_indexed(
    points: &[Point],
    tol: &ToleranceConfig,
) -> Result<(Polytope, Vec<usize>), GeometryError> {
    let d = points
        .first()
        .map(|p| p.dim())
        .ok_or_else(|| GeometryError::DegenerateInput("empty point set".into()))?;
    let flat = super::flatten(points, d)?;
    let hull = quickhull_merged(&flat, d, tol.geom)?;
    Ok((hull_to_polytope(&hull, points), hull.vertices))
}

pub(crate) fn hull_to_polytope(hull: &MergedHull, points: &[Point]) -> Polytope {
    let mut index = HashMap::new();
    for (k, &v) in hull.vertices.iter().enumerate() {
        index.insert(v, k);
    }
    let vertices = hull.vertices.iter().map(|&v| points[v].clone()).collect();
    let facets = hull
        .facets
        .iter()
        .map(|(plane, vs)| {
            let mut vertices: Vec<usize> = vs.iter().map(|v| index[v]).collect();
            vertices.sort_unstable();
            Facet {
                plane: plane.clone(),
                vertices,
            }
        })
        .collect();
    Polytope::from_parts(hull.dim, vertices, facets, None)
}
