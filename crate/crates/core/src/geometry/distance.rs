//! Euclidean distance from a point to the convex hull of finitely many
//! points, by Wolfe's nearest-point algorithm.

use super::linalg::{dot, solve};

const MAX_MAJOR: usize = 500;

/// Distance from `x` to `conv(vertices)`; zero when `x` lies inside.
pub fn distance_to_hull<V: AsRef<[f64]>>(vertices: &[V], x: &[f64]) -> f64 {
    let d = x.len();
    let pts: Vec<Vec<f64>> = vertices
        .iter()
        .map(|v| v.as_ref().iter().zip(x).map(|(a, b)| a - b).collect())
        .collect();
    if pts.is_empty() {
        return f64::INFINITY;
    }
    let max_sq = pts.iter().map(|p| dot(p, p)).fold(0.0f64, f64::max);
    let eps = 1e-13 * max_sq.max(1e-300);

    let first = (0..pts.len())
        .min_by(|&a, &b| dot(&pts[a], &pts[a]).total_cmp(&dot(&pts[b], &pts[b])))
        .unwrap();
    let mut set: Vec<usize> = vec![first];
    let mut w: Vec<f64> = vec![1.0];
    let mut cur = pts[first].clone();

    let combine = |set: &[usize], w: &[f64]| -> Vec<f64> {
        let mut y = vec![0.0; d];
        for (&i, &wi) in set.iter().zip(w) {
            for (yk, pk) in y.iter_mut().zip(&pts[i]) {
                *yk += wi * pk;
            }
        }
        y
    };

    for _ in 0..MAX_MAJOR {
        let cc = dot(&cur, &cur);
        if cc <= eps {
            return 0.0;
        }
        let (j, best) = (0..pts.len())
            .map(|i| (i, dot(&cur, &pts[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if cc - best <= eps || set.contains(&j) {
            break;
        }
        set.push(j);
        w.push(0.0);

        loop {
            // Affine minimizer over the corral: [G 1; 1ᵀ 0] [α; λ] = [0; 1].
            let k = set.len();
            let mut a = vec![0.0; (k + 1) * (k + 1)];
            for r in 0..k {
                for c in 0..k {
                    a[r * (k + 1) + c] = dot(&pts[set[r]], &pts[set[c]]);
                }
                a[r * (k + 1) + k] = 1.0;
                a[k * (k + 1) + r] = 1.0;
            }
            let mut rhs = vec![0.0; k + 1];
            rhs[k] = 1.0;
            let alpha = match solve(&a, &rhs, k + 1) {
                Some(s) => s[..k].to_vec(),
                None => {
                    // Affinely dependent corral; drop the newest point and stop.
                    set.pop();
                    w.pop();
                    return dot(&cur, &cur).sqrt();
                }
            };
            if alpha.iter().all(|&a| a > 1e-14) {
                w = alpha;
                cur = combine(&set, &w);
                break;
            }
            let mut theta = 1.0f64;
            for (wi, ai) in w.iter().zip(&alpha) {
                if *ai <= 1e-14 && wi - ai > 0.0 {
                    theta = theta.min(wi / (wi - ai));
                }
            }
            for (wi, ai) in w.iter_mut().zip(&alpha) {
                *wi = (1.0 - theta) * *wi + theta * ai;
            }
            let mut keep_set = Vec::with_capacity(k);
            let mut keep_w = Vec::with_capacity(k);
            for (&i, &wi) in set.iter().zip(&w) {
                if wi > 1e-14 {
                    keep_set.push(i);
                    keep_w.push(wi);
                }
            }
            let total: f64 = keep_w.iter().sum();
            keep_w.iter_mut().for_each(|x| *x /= total);
            set = keep_set;
            w = keep_w;
            cur = combine(&set, &w);
            if set.len() == 1 {
                break;
            }
        }
    }
    dot(&cur, &cur).sqrt()
}
