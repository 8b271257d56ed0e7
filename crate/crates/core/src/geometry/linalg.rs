//! Small dense linear algebra on slices. Dimensions here are tiny (d ≤ ~6),
//! so everything is row-major `Vec<f64>` with partial pivoting.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// Determinant of an `n × n` row-major matrix. The buffer is destroyed.
pub fn det_in_place(m: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(m.len(), n * n);
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for row in col + 1..n {
            let v = m[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for row in col + 1..n {
            let f = m[row * n + col] / p;
            if f != 0.0 {
                for k in col..n {
                    m[row * n + k] -= f * m[col * n + k];
                }
            }
        }
    }
    det
}

pub fn det(m: &[f64], n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => det_in_place(&mut m.to_vec(), n),
    }
}

/// Solves `a x = b` for square `a` (row-major, `n × n`). Returns `None` when
/// the matrix is numerically singular.
pub fn solve(a: &[f64], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for row in col + 1..n {
            let v = m[row * n + col].abs();
            if v > best {
                best = v;
                piv = row;
            }
        }
        if best <= 1e-14 * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        let p = m[col * n + col];
        for row in col + 1..n {
            let f = m[row * n + col] / p;
            if f != 0.0 {
                for k in col..n {
                    m[row * n + k] -= f * m[col * n + k];
                }
                x[row] -= f * x[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in col + 1..n {
            s -= m[col * n + k] * x[k];
        }
        x[col] = s / m[col * n + col];
    }
    Some(x)
}

/// Normal of the hyperplane through `d` points in `R^d`, via the generalized
/// cross product of the edge vectors. Not normalized; zero when the points
/// are affinely dependent.
pub fn generalized_normal(points: &[&[f64]]) -> Vec<f64> {
    let d = points.len();
    let p0 = points[0];
    match d {
        2 => {
            let (a, b) = (points[1][0] - p0[0], points[1][1] - p0[1]);
            vec![b, -a]
        }
        3 => {
            let u = [points[1][0] - p0[0], points[1][1] - p0[1], points[1][2] - p0[2]];
            let v = [points[2][0] - p0[0], points[2][1] - p0[1], points[2][2] - p0[2]];
            vec![
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ]
        }
        _ => {
            let rows: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, p0)).collect();
            let m = d - 1;
            let mut minor = vec![0.0; m * m];
            (0..d)
                .map(|skip| {
                    for (r, row) in rows.iter().enumerate() {
                        let mut c = 0;
                        for (k, v) in row.iter().enumerate() {
                            if k != skip {
                                minor[r * m + c] = *v;
                                c += 1;
                            }
                        }
                    }
                    let sign = if skip % 2 == 0 { 1.0 } else { -1.0 };
                    sign * det_in_place(&mut minor.clone(), m)
                })
                .collect()
        }
    }
}

/// Orthonormal basis (Gram–Schmidt) of the span of `vectors`, dropping any
/// vector whose residual norm falls below `eps`.
pub fn orthonormal_basis(vectors: &[Vec<f64>], eps: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = dot(&r, b);
                for (ri, bi) in r.iter_mut().zip(b) {
                    *ri -= p * bi;
                }
            }
        }
        let n = norm(&r);
        if n > eps {
            basis.push(r.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

/// Distance from `p` to the affine span of `origin + span(basis)` where
/// `basis` is orthonormal.
pub fn distance_to_flat(p: &[f64], origin: &[f64], basis: &[Vec<f64>]) -> f64 {
    let mut r = sub(p, origin);
    for b in basis {
        let s = dot(&r, b);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri -= s * bi;
        }
    }
    norm(&r)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Surface area of the unit sphere `S^{d-1}`: `2 π^{d/2} / Γ(d/2)`.
pub fn sphere_area(d: usize) -> f64 {
    use std::f64::consts::PI;
    // Γ(d/2) by the recurrence from Γ(1) = 1 or Γ(1/2) = √π.
    let gamma_half_d = if d % 2 == 0 {
        factorial(d / 2 - 1)
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < d as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    };
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half_d
}

/// Volume of the unit ball `B^d`.
pub fn ball_volume(d: usize) -> f64 {
    sphere_area(d) / d as f64
}
