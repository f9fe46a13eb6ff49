//! Small dense-vector helpers and incremental convex hulls in 2D/3D.
//!
//! Bodies are low-dimensional (n = 2, 3 for everything combinatorial), so
//! points are plain `Vec<f64>` and hulls are index-based.

/// Pairwise (cascade) summation. Deterministic for a fixed input order and
/// much better conditioned than a running sum on long quadrature vectors.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn cross2(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

/// Indices of the convex hull of 2D points, counter-clockwise, no
/// collinear interior points. Monotone chain.
pub fn hull2d(points: &[Vec<f64>]) -> Vec<usize> {
    let n = points.len();
    if n < 3 {
        return (0..n).collect();
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        points[a][0]
            .partial_cmp(&points[b][0])
            .unwrap()
            .then(points[a][1].partial_cmp(&points[b][1]).unwrap())
    });
    let scale = points
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0f64, f64::max);
    let eps = 1e-12 * scale * scale;
    let turn = |o: usize, a: usize, b: usize| -> f64 {
        cross2(&sub(&points[a], &points[o]), &sub(&points[b], &points[o]))
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], i) <= eps {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], i) <= eps {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Convex hull of angularly pre-sorted 2D points (strictly increasing
/// angle about the origin, full turn). O(n) Graham pass on the closed ring.
pub fn hull2d_sorted(points: &[Vec<f64>]) -> Vec<usize> {
    let n = points.len();
    if n < 3 {
        return (0..n).collect();
    }
    let scale = points
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0f64, f64::max);
    let eps = 1e-12 * scale * scale;
    let turn = |o: usize, a: usize, b: usize| -> f64 {
        cross2(&sub(&points[a], &points[o]), &sub(&points[b], &points[o]))
    };
    // Start from an extreme point (max x) which is guaranteed on the hull.
    let start = (0..n)
        .max_by(|&a, &b| points[a][0].partial_cmp(&points[b][0]).unwrap())
        .unwrap();
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    for k in 0..=n {
        let i = (start + k) % n;
        while stack.len() >= 2 && turn(stack[stack.len() - 2], stack[stack.len() - 1], i) <= eps {
            stack.pop();
        }
        stack.push(i);
    }
    // The wrap-around re-visits `start`; drop the duplicate.
    stack.pop();
    // The first few entries may have been kept only because the stack was
    // short; one more pass over the seam fixes them.
    while stack.len() >= 3
        && turn(stack[stack.len() - 2], stack[stack.len() - 1], stack[0]) <= eps
    {
        stack.pop();
    }
    stack
}

/// Triangular facets (outward-oriented) of the convex hull of 3D points.
/// Incremental insertion; O(n^2) which is fine at the sizes used here.
pub fn hull3d(points: &[Vec<f64>]) -> Option<Vec<[usize; 3]>> {
    let n = points.len();
    if n < 4 {
        return None;
    }
    let scale = points
        .iter()
        .map(|p| norm(p))
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let eps = 1e-10 * scale;

    // Initial simplex: two farthest-ish points, then max-area, then max-volume.
    let i0 = 0;
    let i1 = (1..n).max_by(|&a, &b| {
        dist(&points[a], &points[i0])
            .partial_cmp(&dist(&points[b], &points[i0]))
            .unwrap()
    })?;
    let e1 = sub(&points[i1], &points[i0]);
    let i2 = (0..n)
        .filter(|&i| i != i0 && i != i1)
        .max_by(|&a, &b| {
            let ca = norm(&cross3(&e1, &sub(&points[a], &points[i0])));
            let cb = norm(&cross3(&e1, &sub(&points[b], &points[i0])));
            ca.partial_cmp(&cb).unwrap()
        })?;
    let nrm = cross3(&e1, &sub(&points[i2], &points[i0]));
    if norm(&nrm) < eps * eps {
        return None;
    }
    let i3 = (0..n)
        .filter(|&i| i != i0 && i != i1 && i != i2)
        .max_by(|&a, &b| {
            let va = dot(&nrm, &sub(&points[a], &points[i0])).abs();
            let vb = dot(&nrm, &sub(&points[b], &points[i0])).abs();
            va.partial_cmp(&vb).unwrap()
        })?;
    if dot(&nrm, &sub(&points[i3], &points[i0])).abs() < eps * norm(&nrm) {
        return None;
    }

    let centroid_of = |f: &[usize; 3]| -> Vec<f64> {
        let mut c = vec![0.0; 3];
        for &v in f {
            c = add(&c, &points[v]);
        }
        scale_vec(&c, 1.0 / 3.0)
    };
    let outward = |f: [usize; 3], inner: &[f64]| -> [usize; 3] {
        let nv = cross3(
            &sub(&points[f[1]], &points[f[0]]),
            &sub(&points[f[2]], &points[f[0]]),
        );
        if dot(&nv, &sub(inner, &points[f[0]])) > 0.0 {
            [f[0], f[2], f[1]]
        } else {
            f
        }
    };
    let inner: Vec<f64> = scale_vec(
        &[i0, i1, i2, i3]
            .iter()
            .fold(vec![0.0; 3], |acc, &i| add(&acc, &points[i])),
        0.25,
    );
    let mut faces: Vec<[usize; 3]> = vec![
        outward([i0, i1, i2], &inner),
        outward([i0, i1, i3], &inner),
        outward([i0, i2, i3], &inner),
        outward([i1, i2, i3], &inner),
    ];

    let visible = |f: &[usize; 3], p: &[f64]| -> bool {
        let nv = cross3(
            &sub(&points[f[1]], &points[f[0]]),
            &sub(&points[f[2]], &points[f[0]]),
        );
        let nn = norm(&nv);
        if nn == 0.0 {
            return false;
        }
        dot(&nv, &sub(p, &points[f[0]])) / nn > eps
    };

    let used = [i0, i1, i2, i3];
    for p in 0..n {
        if used.contains(&p) {
            continue;
        }
        let vis: Vec<bool> = faces.iter().map(|f| visible(f, &points[p])).collect();
        if !vis.iter().any(|&v| v) {
            continue; // inside current hull
        }
        // Horizon = edges between a visible and a hidden face.
        use std::collections::HashMap;
        let mut edge_count: HashMap<(usize, usize), i32> = HashMap::new();
        for (f, &v) in faces.iter().zip(&vis) {
            if !v {
                continue;
            }
            for k in 0..3 {
                let a = f[k];
                let b = f[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                *edge_count.entry(key).or_insert(0) += if a < b { 1 } else { -1 };
            }
        }
        let mut new_faces: Vec<[usize; 3]> = Vec::new();
        for (f, &v) in faces.iter().zip(&vis) {
            if !v {
                continue;
            }
            for k in 0..3 {
                let a = f[k];
                let b = f[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                // Edge on the horizon appears once over all visible faces.
                if edge_count[&key].abs() == 1 {
                    new_faces.push([a, b, p]);
                }
            }
        }
        let kept: Vec<[usize; 3]> = faces
            .iter()
            .zip(&vis)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| *f)
            .collect();
        faces = kept;
        for f in new_faces {
            faces.push(outward(f, &inner));
        }
        let _ = centroid_of; // centroid helper kept for debugging only
    }
    Some(faces)
}

fn scale_vec(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-9);
    }

    #[test]
    fn hull2d_square_with_interior() {
        let pts = vec![
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![0.0, 0.0],
            vec![0.5, 0.5],
        ];
        let h = hull2d(&pts);
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&4) && !h.contains(&5));
    }

    #[test]
    fn hull3d_cube() {
        let mut pts = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    pts.push(vec![x, y, z]);
                }
            }
        }
        pts.push(vec![0.0, 0.0, 0.0]);
        let faces = hull3d(&pts).unwrap();
        // 6 quad facets triangulated into 12 triangles.
        assert_eq!(faces.len(), 12);
        // Fan volume from origin = 8.
        let vol: f64 = faces
            .iter()
            .map(|f| {
                let a = &pts[f[0]];
                let b = &pts[f[1]];
                let c = &pts[f[2]];
                dot(a, &cross3(b, c)) / 6.0
            })
            .sum();
        assert!((vol - 8.0).abs() < 1e-12, "vol = {vol}");
    }

    #[test]
    fn hull2d_sorted_matches_general() {
        let m = 64;
        let pts: Vec<Vec<f64>> = (0..m)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                let r = 1.0 + 0.3 * (3.0 * th).cos();
                vec![r * th.cos(), r * th.sin()]
            })
            .collect();
        let mut a = hull2d(&pts);
        let mut b = hull2d_sorted(&pts);
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }
}
