//! Body representations and their geometric algebra: support and radial
//! functions, polar duality, volume and volume radius, surface area
//! measures, and volume-preserving linear transforms.
//!
//! Convex bodies all contain the origin in their interior. Smooth bodies
//! are sampled on a [`SphereGrid`]; in the plane the samples are treated as
//! a trigonometric series, so interpolation and differentiation are exact
//! for band-limited profiles.

use crate::error::{Error, Result};
use crate::geom;
use crate::grid::{unit_ball_volume, SphereGrid};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A convex body with the origin in its interior.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConvexBody {
    #[serde(rename = "vpolytope")]
    VPolytope { vertices: Vec<Vec<f64>> },
    #[serde(rename = "hpolytope")]
    HPolytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    Ball { r: f64 },
    /// Image of the unit ball under the matrix (rows), body = A B^n.
    Ellipsoid { matrix: Vec<Vec<f64>> },
    Smooth {
        grid: SphereGrid,
        h: Vec<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        f: Option<Vec<f64>>,
    },
}

/// A star-shaped body given by positive radial samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StarBody {
    pub grid: SphereGrid,
    pub rho: Vec<f64>,
}

/// Surface area measure S(K, .): atoms at facet normals for polytopes,
/// a density (the curvature function) for smooth bodies.
#[derive(Debug, Clone)]
pub enum SurfaceAreaMeasure {
    Atomic { atoms: Vec<(Vec<f64>, f64)> },
    Density { grid: SphereGrid, f: Vec<f64> },
}

/// A volume-preserving linear transform (|det| = 1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SLTransform {
    pub matrix: Vec<Vec<f64>>,
}

// ---------------------------------------------------------------------------
// Trigonometric series on the equispaced circle grid.
// ---------------------------------------------------------------------------

/// Real trigonometric series fitted to equispaced samples at theta_j =
/// 2 pi j / m. Exact for profiles band-limited below the Nyquist frequency.
#[derive(Debug, Clone)]
pub struct TrigSeries {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl TrigSeries {
    pub fn fit(values: &[f64]) -> TrigSeries {
        let m = values.len();
        let half = m / 2;
        let mut a = vec![0.0; half + 1];
        let mut b = vec![0.0; half + 1];
        for k in 0..=half {
            let mut ca = 0.0;
            let mut cb = 0.0;
            for (j, &v) in values.iter().enumerate() {
                let th = 2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64;
                ca += v * th.cos();
                cb += v * th.sin();
            }
            let norm = if k == 0 || (k == half && m % 2 == 0) {
                1.0 / m as f64
            } else {
                2.0 / m as f64
            };
            a[k] = ca * norm;
            b[k] = cb * norm;
        }
        // Snap roundoff-level coefficients to zero: high frequencies get
        // amplified by k^2 under differentiation.
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for c in a.iter_mut().chain(b.iter_mut()) {
            if c.abs() < 1e-14 * scale {
                *c = 0.0;
            }
        }
        TrigSeries { a, b }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut s = 0.0;
        for k in 0..self.a.len() {
            let kt = k as f64 * theta;
            s += self.a[k] * kt.cos() + self.b[k] * kt.sin();
        }
        s
    }

    pub fn deriv(&self, theta: f64) -> f64 {
        let mut s = 0.0;
        for k in 1..self.a.len() {
            let kf = k as f64;
            let kt = kf * theta;
            s += kf * (-self.a[k] * kt.sin() + self.b[k] * kt.cos());
        }
        s
    }

    pub fn second_deriv(&self, theta: f64) -> f64 {
        let mut s = 0.0;
        for k in 1..self.a.len() {
            let kf = k as f64;
            let kt = kf * theta;
            s -= kf * kf * (self.a[k] * kt.cos() + self.b[k] * kt.sin());
        }
        s
    }

    /// Radial function of the convex body whose support function is this
    /// series. The boundary point at parameter theta is
    /// x(theta) = h u(theta) + h' u_perp(theta), whose polar angle
    /// alpha(theta) = theta + atan2(h', h) is monotone for convex profiles;
    /// Newton iteration solves alpha(theta) = target.
    pub fn radial(&self, target: f64) -> f64 {
        let wrap = |x: f64| {
            let mut y = x % (2.0 * std::f64::consts::PI);
            if y > std::f64::consts::PI {
                y -= 2.0 * std::f64::consts::PI;
            }
            if y < -std::f64::consts::PI {
                y += 2.0 * std::f64::consts::PI;
            }
            y
        };
        let mut th = target;
        for _ in 0..50 {
            let h = self.eval(th);
            let hp = self.deriv(th);
            let err = wrap(th + hp.atan2(h) - target);
            if err.abs() < 1e-14 {
                break;
            }
            let hpp = self.second_deriv(th);
            // d/dtheta [theta + atan2(h', h)] = 1 + (h'' h - h'^2)/(h^2+h'^2)
            let denom = h * h + hp * hp;
            let slope = 1.0 + (hpp * h - hp * hp) / denom;
            th -= err / slope.max(1e-6);
        }
        let h = self.eval(th);
        let hp = self.deriv(th);
        (h * h + hp * hp).sqrt()
    }

    /// Values of the series plus its second derivative at the sample nodes:
    /// the planar curvature identity f = h + h''.
    pub fn plus_second_deriv_at_nodes(&self, m: usize) -> Vec<f64> {
        (0..m)
            .map(|j| {
                let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let mut s = 0.0;
                for k in 0..self.a.len() {
                    let kf = k as f64;
                    let kt = kf * th;
                    s += (1.0 - kf * kf) * (self.a[k] * kt.cos() + self.b[k] * kt.sin());
                }
                s
            })
            .collect()
    }
}

/// Planar curvature function from equispaced support samples, f = h + h''
/// by spectral differentiation.
pub fn curvature_2d(h: &[f64]) -> Result<Vec<f64>> {
    let f = TrigSeries::fit(h).plus_second_deriv_at_nodes(h.len());
    if let Some(&bad) = f.iter().find(|&&v| v <= 0.0) {
        return Err(Error::NotConvexProfile(bad));
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Matrix helpers.
// ---------------------------------------------------------------------------

fn to_dmatrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

fn from_dmatrix(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn mat_vec(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| geom::dot(r, v)).collect()
}

fn mat_t_vec(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let n = rows.len();
    (0..n).map(|j| (0..n).map(|i| rows[i][j] * v[i]).sum()).collect()
}

impl SLTransform {
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<SLTransform> {
        let d = to_dmatrix(&matrix).determinant().abs();
        if (d - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnimodular(d));
        }
        Ok(SLTransform { matrix })
    }

    pub fn identity(dim: usize) -> SLTransform {
        SLTransform {
            matrix: from_dmatrix(&DMatrix::identity(dim, dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// Seeded well-conditioned random transform with |det| = 1.
    pub fn random(dim: usize, seed: u64) -> Result<SLTransform> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let m = DMatrix::from_fn(dim, dim, |_, _| gaussian(&mut rng));
            let det = m.determinant();
            if det.abs() < 1e-6 {
                continue;
            }
            let m = &m / det.abs().powf(1.0 / dim as f64);
            let svd = m.clone().svd(false, false);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.min();
            if smin > 0.0 && smax / smin <= 20.0 {
                return SLTransform::new(from_dmatrix(&m));
            }
        }
        Err(Error::DegenerateSample(100))
    }

    pub fn apply_point(&self, x: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, x)
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

// ---------------------------------------------------------------------------
// ConvexBody operations.
// ---------------------------------------------------------------------------

impl ConvexBody {
    pub fn ball(r: f64) -> ConvexBody {
        ConvexBody::Ball { r }
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::VPolytope { vertices } => vertices[0].len(),
            ConvexBody::HPolytope { normals, .. } => normals[0].len(),
            ConvexBody::Ball { .. } => 2, // dimension-free; see dim_hint
            ConvexBody::Ellipsoid { matrix } => matrix.len(),
            ConvexBody::Smooth { grid, .. } => grid.dim,
        }
    }

    /// Dimension with an explicit fallback for the ball, which is the only
    /// representation that does not carry one.
    pub fn dim_or(&self, fallback: usize) -> usize {
        match self {
            ConvexBody::Ball { .. } => fallback,
            _ => self.dim(),
        }
    }

    /// Structural invariants: positivity, vertex count, the discrete
    /// Minkowski condition for smooth bodies with curvature.
    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexBody::VPolytope { vertices } => {
                let n = vertices[0].len();
                if vertices.len() < n + 1 {
                    return Err(Error::DegenerateSample(vertices.len()));
                }
            }
            ConvexBody::HPolytope { normals, offsets } => {
                if normals.len() != offsets.len() {
                    return Err(Error::DimensionMismatch {
                        expected: normals.len(),
                        got: offsets.len(),
                    });
                }
                if let Some(&h) = offsets.iter().find(|&&h| h <= 0.0) {
                    return Err(Error::OriginNotInterior(h));
                }
            }
            ConvexBody::Ball { r } => {
                if *r <= 0.0 {
                    return Err(Error::OriginNotInterior(*r));
                }
            }
            ConvexBody::Ellipsoid { matrix } => {
                if to_dmatrix(matrix).determinant().abs() < 1e-300 {
                    return Err(Error::OriginNotInterior(0.0));
                }
            }
            ConvexBody::Smooth { grid, h, f } => {
                if h.len() != grid.len() {
                    return Err(Error::DimensionMismatch {
                        expected: grid.len(),
                        got: h.len(),
                    });
                }
                if let Some(&bad) = h.iter().find(|&&v| v <= 0.0) {
                    return Err(Error::OriginNotInterior(bad));
                }
                if let Some(f) = f {
                    if f.len() != grid.len() {
                        return Err(Error::DimensionMismatch {
                            expected: grid.len(),
                            got: f.len(),
                        });
                    }
                    if let Some(&bad) = f.iter().find(|&&v| v <= 0.0) {
                        return Err(Error::NotConvexProfile(bad));
                    }
                    // Discrete Minkowski condition: the f-weighted normals
                    // balance out on a closed surface.
                    let total: f64 = f.iter().zip(&grid.weights).map(|(v, w)| v * w).sum();
                    for d in 0..grid.dim {
                        let s: f64 = f
                            .iter()
                            .zip(&grid.nodes)
                            .zip(&grid.weights)
                            .map(|((v, u), w)| v * u[d] * w)
                            .sum();
                        if s.abs() > 1e-4 * total {
                            return Err(Error::NonFiniteIntegrand(d));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Support function h_K(u) = max over x in K of <x, u>.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        let nu = geom::norm(u);
        if (nu - 1.0).abs() > 1e-10 {
            return Err(Error::DomainError(nu));
        }
        let h = match self {
            ConvexBody::VPolytope { vertices } => vertices
                .iter()
                .map(|v| geom::dot(v, u))
                .fold(f64::MIN, f64::max),
            ConvexBody::HPolytope { .. } => {
                let verts = self.enumerate_vertices()?;
                verts
                    .iter()
                    .map(|v| geom::dot(v, u))
                    .fold(f64::MIN, f64::max)
            }
            ConvexBody::Ball { r } => *r,
            ConvexBody::Ellipsoid { matrix } => geom::norm(&mat_t_vec(matrix, u)),
            ConvexBody::Smooth { grid, h, .. } => interpolate_on_sphere(grid, h, u)?,
        };
        if h <= 0.0 {
            return Err(Error::OriginNotInterior(h));
        }
        Ok(h)
    }

    /// Radial function rho_K(u) = max lambda with lambda u in K.
    pub fn radial(&self, u: &[f64]) -> Result<f64> {
        match self {
            ConvexBody::Ball { r } => Ok(*r),
            ConvexBody::Ellipsoid { matrix } => {
                let inv = to_dmatrix(matrix)
                    .try_inverse()
                    .ok_or(Error::OriginNotInterior(0.0))?;
                let w = &inv * DVector::from_column_slice(u);
                Ok(1.0 / w.norm())
            }
            ConvexBody::HPolytope { normals, offsets } => radial_hform(normals, offsets, u),
            ConvexBody::VPolytope { .. } => {
                let (normals, offsets) = self.to_hform()?;
                radial_hform(&normals, &offsets, u)
            }
            ConvexBody::Smooth { grid, h, .. } => {
                if grid.dim == 2 {
                    Ok(TrigSeries::fit(h).radial(u[1].atan2(u[0])))
                } else {
                    // The sampled body is the intersection of node halfspaces.
                    radial_hform(&grid.nodes, h, u)
                }
            }
        }
    }

    /// Facet description (outer unit normals, positive offsets).
    pub fn to_hform(&self) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        match self {
            ConvexBody::HPolytope { normals, offsets } => Ok((normals.clone(), offsets.clone())),
            ConvexBody::VPolytope { vertices } => {
                let n = vertices[0].len();
                match n {
                    2 => {
                        let hull = geom::hull2d(vertices);
                        let k = hull.len();
                        let mut normals = Vec::with_capacity(k);
                        let mut offsets = Vec::with_capacity(k);
                        for i in 0..k {
                            let a = &vertices[hull[i]];
                            let b = &vertices[hull[(i + 1) % k]];
                            let e = geom::sub(b, a);
                            // Outward normal for a CCW ring.
                            let nv = geom::normalize(&[e[1], -e[0]]);
                            let off = geom::dot(&nv, a);
                            if off <= 0.0 {
                                return Err(Error::OriginNotInterior(off));
                            }
                            normals.push(nv);
                            offsets.push(off);
                        }
                        Ok((normals, offsets))
                    }
                    3 => {
                        let faces =
                            geom::hull3d(vertices).ok_or(Error::DegenerateSample(vertices.len()))?;
                        let mut normals: Vec<Vec<f64>> = Vec::new();
                        let mut offsets: Vec<f64> = Vec::new();
                        for f in &faces {
                            let a = &vertices[f[0]];
                            let nv = geom::cross3(
                                &geom::sub(&vertices[f[1]], a),
                                &geom::sub(&vertices[f[2]], a),
                            );
                            let nn = geom::norm(&nv);
                            if nn < 1e-14 {
                                continue;
                            }
                            let nv = geom::scale(&nv, 1.0 / nn);
                            let off = geom::dot(&nv, a);
                            if off <= 0.0 {
                                return Err(Error::OriginNotInterior(off));
                            }
                            // Coplanar triangles of one facet share (nv, off).
                            if !normals
                                .iter()
                                .zip(&offsets)
                                .any(|(m, &o)| geom::dist(m, &nv) < 1e-9 && (o - off).abs() < 1e-9)
                            {
                                normals.push(nv);
                                offsets.push(off);
                            }
                        }
                        Ok((normals, offsets))
                    }
                    d => Err(Error::UnsupportedDimension(d)),
                }
            }
            _ => Err(Error::UnsupportedDimension(self.dim())),
        }
    }

    /// Vertices of an H-polytope via the bipolar route: the polar is the
    /// hull of u_i / h_i, and each polar facet (normal nu, offset c) is the
    /// vertex nu / c of the original body.
    pub fn enumerate_vertices(&self) -> Result<Vec<Vec<f64>>> {
        match self {
            ConvexBody::VPolytope { vertices } => Ok(vertices.clone()),
            ConvexBody::HPolytope { normals, offsets } => {
                let pts: Vec<Vec<f64>> = normals
                    .iter()
                    .zip(offsets)
                    .map(|(u, &h)| geom::scale(u, 1.0 / h))
                    .collect();
                let polar = ConvexBody::VPolytope { vertices: pts };
                let (pn, po) = polar.to_hform()?;
                Ok(pn
                    .iter()
                    .zip(&po)
                    .map(|(nv, &c)| geom::scale(nv, 1.0 / c))
                    .collect())
            }
            _ => Err(Error::UnsupportedDimension(self.dim())),
        }
    }

    /// Polar body K째 = { y : <x, y> <= 1 for all x in K }.
    pub fn polar(&self) -> Result<ConvexBody> {
        match self {
            ConvexBody::Ball { r } => Ok(ConvexBody::Ball { r: 1.0 / r }),
            ConvexBody::Ellipsoid { matrix } => {
                let inv_t = to_dmatrix(matrix)
                    .try_inverse()
                    .ok_or(Error::OriginNotInterior(0.0))?
                    .transpose();
                Ok(ConvexBody::Ellipsoid {
                    matrix: from_dmatrix(&inv_t),
                })
            }
            ConvexBody::VPolytope { vertices } => {
                let hull: Vec<usize> = match vertices[0].len() {
                    2 => geom::hull2d(vertices),
                    3 => {
                        let faces =
                            geom::hull3d(vertices).ok_or(Error::DegenerateSample(vertices.len()))?;
                        let mut ids: Vec<usize> = faces.iter().flatten().cloned().collect();
                        ids.sort_unstable();
                        ids.dedup();
                        ids
                    }
                    d => return Err(Error::UnsupportedDimension(d)),
                };
                let mut normals = Vec::new();
                let mut offsets = Vec::new();
                for &i in &hull {
                    let v = &vertices[i];
                    let nn = geom::norm(v);
                    if nn < 1e-300 {
                        return Err(Error::OriginNotInterior(0.0));
                    }
                    normals.push(geom::scale(v, 1.0 / nn));
                    offsets.push(1.0 / nn);
                }
                Ok(ConvexBody::HPolytope { normals, offsets })
            }
            ConvexBody::HPolytope { normals, offsets } => {
                let pts: Vec<Vec<f64>> = normals
                    .iter()
                    .zip(offsets)
                    .map(|(u, &h)| geom::scale(u, 1.0 / h))
                    .collect();
                let keep: Vec<usize> = match pts[0].len() {
                    2 => geom::hull2d(&pts),
                    3 => {
                        let faces = geom::hull3d(&pts).ok_or(Error::DegenerateSample(pts.len()))?;
                        let mut ids: Vec<usize> = faces.iter().flatten().cloned().collect();
                        ids.sort_unstable();
                        ids.dedup();
                        ids
                    }
                    d => return Err(Error::UnsupportedDimension(d)),
                };
                Ok(ConvexBody::VPolytope {
                    vertices: keep.iter().map(|&i| pts[i].clone()).collect(),
                })
            }
            ConvexBody::Smooth { grid, h, .. } => {
                // Sample the polar support h_{K polar} = 1 / rho_K at nodes.
                let hp: Vec<f64> = if grid.dim == 2 {
                    let ts = TrigSeries::fit(h);
                    grid.nodes
                        .iter()
                        .map(|u| 1.0 / ts.radial(u[1].atan2(u[0])))
                        .collect()
                } else {
                    grid.nodes
                        .iter()
                        .map(|u| self.radial(u).map(|r| 1.0 / r))
                        .collect::<Result<_>>()?
                };
                Ok(ConvexBody::Smooth {
                    grid: grid.clone(),
                    h: hp,
                    f: None,
                })
            }
        }
    }

    /// Volume: exact fan decomposition for polytopes, closed form for ball
    /// and ellipsoid, quadrature for sampled bodies.
    pub fn volume(&self) -> Result<f64> {
        self.volume_dim(self.dim())
    }

    /// Volume with an explicit ambient dimension (needed for `Ball`).
    pub fn volume_dim(&self, dim: usize) -> Result<f64> {
        match self {
            ConvexBody::Ball { r } => Ok(unit_ball_volume(dim) * r.powi(dim as i32)),
            ConvexBody::Ellipsoid { matrix } => {
                Ok(unit_ball_volume(matrix.len()) * to_dmatrix(matrix).determinant().abs())
            }
            ConvexBody::VPolytope { vertices } => polytope_volume(vertices),
            ConvexBody::HPolytope { .. } => polytope_volume(&self.enumerate_vertices()?),
            ConvexBody::Smooth { grid, h, f } => {
                if let Some(f) = f {
                    // Volume identity (1/n) integral of h dS; exact for the
                    // sampled profile since f was built from h.
                    let vals: Vec<f64> = h.iter().zip(f).map(|(&a, &b)| a * b).collect();
                    Ok(grid.integrate(&vals)? / grid.dim as f64)
                } else {
                    let rho: Vec<f64> = grid
                        .nodes
                        .iter()
                        .map(|u| self.radial(u))
                        .collect::<Result<_>>()?;
                    let vals: Vec<f64> = rho.iter().map(|r| r.powi(grid.dim as i32)).collect();
                    Ok(grid.integrate(&vals)? / grid.dim as f64)
                }
            }
        }
    }

    /// Volume radius (|K| / omega_n)^{1/n}.
    pub fn vrad(&self) -> Result<f64> {
        self.vrad_dim(self.dim())
    }

    /// Volume radius with an explicit ambient dimension (needed for `Ball`).
    pub fn vrad_dim(&self, dim: usize) -> Result<f64> {
        Ok((self.volume_dim(dim)? / unit_ball_volume(dim)).powf(1.0 / dim as f64))
    }

    /// Surface area measure. Polytopes yield atoms; ball, ellipsoid, and
    /// smooth bodies yield a density. `grid` supplies the quadrature nodes
    /// for the closed-form densities and is ignored otherwise.
    pub fn surface_area_measure(&self, grid: Option<&SphereGrid>) -> Result<SurfaceAreaMeasure> {
        match self {
            ConvexBody::VPolytope { .. } | ConvexBody::HPolytope { .. } => {
                let (normals, offsets) = match self {
                    ConvexBody::VPolytope { .. } => self.to_hform()?,
                    _ => {
                        let v = ConvexBody::VPolytope {
                            vertices: self.enumerate_vertices()?,
                        };
                        v.to_hform()?
                    }
                };
                let verts = self.enumerate_vertices()?;
                let mut atoms: Vec<(Vec<f64>, f64)> = Vec::new();
                for (nv, &off) in normals.iter().zip(&offsets) {
                    let mass = facet_measure(&verts, nv, off)?;
                    atoms.push((nv.clone(), mass));
                }
                let total: f64 = atoms.iter().map(|(_, m)| m).sum();
                atoms.retain(|(_, m)| *m >= 1e-12 * total);
                // Closed-surface condition.
                let dim = atoms[0].0.len();
                for d in 0..dim {
                    let s: f64 = atoms.iter().map(|(u, m)| u[d] * m).sum();
                    if s.abs() > 1e-8 * total {
                        return Err(Error::NonFiniteIntegrand(d));
                    }
                }
                Ok(SurfaceAreaMeasure::Atomic { atoms })
            }
            ConvexBody::Ball { r } => {
                let grid = grid.ok_or(Error::MissingCurvature)?;
                let f = vec![r.powi(grid.dim as i32 - 1); grid.len()];
                Ok(SurfaceAreaMeasure::Density {
                    grid: grid.clone(),
                    f,
                })
            }
            ConvexBody::Ellipsoid { matrix } => {
                let grid = grid.ok_or(Error::MissingCurvature)?;
                let n = matrix.len();
                if grid.dim != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: grid.dim,
                    });
                }
                // f_E(u) = (det A)^2 / h_E(u)^{n+1}.
                let det2 = to_dmatrix(matrix).determinant().powi(2);
                let f: Vec<f64> = grid
                    .nodes
                    .iter()
                    .map(|u| det2 / geom::norm(&mat_t_vec(matrix, u)).powi(n as i32 + 1))
                    .collect();
                Ok(SurfaceAreaMeasure::Density {
                    grid: grid.clone(),
                    f,
                })
            }
            ConvexBody::Smooth { grid, f, .. } => match f {
                Some(f) => Ok(SurfaceAreaMeasure::Density {
                    grid: grid.clone(),
                    f: f.clone(),
                }),
                None => Err(Error::MissingCurvature),
            },
        }
    }

    /// Image under a volume-preserving linear transform.
    pub fn apply_sl(&self, t: &SLTransform) -> Result<ConvexBody> {
        let tm = to_dmatrix(&t.matrix);
        let d = tm.determinant().abs();
        if (d - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnimodular(d));
        }
        match self {
            ConvexBody::VPolytope { vertices } => Ok(ConvexBody::VPolytope {
                vertices: vertices.iter().map(|v| t.apply_point(v)).collect(),
            }),
            ConvexBody::HPolytope { normals, offsets } => {
                // <x, u> <= h becomes <y, T^{-T} u> <= h for y = Tx.
                let inv_t = tm
                    .clone()
                    .try_inverse()
                    .ok_or(Error::NotUnimodular(0.0))?
                    .transpose();
                let mut ns = Vec::new();
                let mut os = Vec::new();
                for (u, &h) in normals.iter().zip(offsets) {
                    let w = &inv_t * DVector::from_column_slice(u);
                    let nn = w.norm();
                    ns.push(w.iter().map(|x| x / nn).collect());
                    os.push(h / nn);
                }
                Ok(ConvexBody::HPolytope {
                    normals: ns,
                    offsets: os,
                })
            }
            ConvexBody::Ball { r } => Ok(ConvexBody::Ellipsoid {
                matrix: from_dmatrix(&(&tm * *r)),
            }),
            ConvexBody::Ellipsoid { matrix } => Ok(ConvexBody::Ellipsoid {
                matrix: from_dmatrix(&(&tm * to_dmatrix(matrix))),
            }),
            ConvexBody::Smooth { grid, h, f } => {
                // h_{TK}(v) = |T^t v| h_K(u), f_{TK}(v) = f_K(u) / |T^t v|^{n+1}
                // with u = T^t v normalized.
                let n = grid.dim;
                let h_series = if n == 2 { Some(TrigSeries::fit(h)) } else { None };
                let f_series = match (n, f) {
                    (2, Some(f)) => Some(TrigSeries::fit(f)),
                    _ => None,
                };
                let mut new_h = Vec::with_capacity(grid.len());
                let mut new_f = f.as_ref().map(|_| Vec::with_capacity(grid.len()));
                for v in &grid.nodes {
                    let w = mat_t_vec(&t.matrix, v);
                    let s = geom::norm(&w);
                    let u = geom::scale(&w, 1.0 / s);
                    let hu = match &h_series {
                        Some(ts) => ts.eval(u[1].atan2(u[0])),
                        None => interpolate_on_sphere(grid, h, &u)?,
                    };
                    new_h.push(s * hu);
                    if let Some(new_f) = new_f.as_mut() {
                        let fu = match &f_series {
                            Some(ts) => ts.eval(u[1].atan2(u[0])),
                            None => interpolate_on_sphere(grid, f.as_ref().unwrap(), &u)?,
                        };
                        new_f.push(fu / s.powi(n as i32 + 1));
                    }
                }
                Ok(ConvexBody::Smooth {
                    grid: grid.clone(),
                    h: new_h,
                    f: new_f,
                })
            }
        }
    }

    /// Dilate by a positive factor.
    pub fn scaled(&self, s: f64) -> ConvexBody {
        match self {
            ConvexBody::VPolytope { vertices } => ConvexBody::VPolytope {
                vertices: vertices.iter().map(|v| geom::scale(v, s)).collect(),
            },
            ConvexBody::HPolytope { normals, offsets } => ConvexBody::HPolytope {
                normals: normals.clone(),
                offsets: offsets.iter().map(|h| h * s).collect(),
            },
            ConvexBody::Ball { r } => ConvexBody::Ball { r: r * s },
            ConvexBody::Ellipsoid { matrix } => ConvexBody::Ellipsoid {
                matrix: matrix
                    .iter()
                    .map(|row| row.iter().map(|x| x * s).collect())
                    .collect(),
            },
            ConvexBody::Smooth { grid, h, f } => ConvexBody::Smooth {
                grid: grid.clone(),
                h: h.iter().map(|v| v * s).collect(),
                f: f.as_ref().map(|f| {
                    f.iter()
                        .map(|v| v * s.powi(grid.dim as i32 - 1))
                        .collect()
                }),
            },
        }
    }

    /// Centroid: exact moments for polytopes, boundary quadrature for
    /// smooth bodies with curvature, radial quadrature otherwise.
    pub fn centroid(&self) -> Result<Vec<f64>> {
        match self {
            ConvexBody::Ball { .. } | ConvexBody::Ellipsoid { .. } => Ok(vec![0.0; self.dim()]),
            ConvexBody::VPolytope { vertices } => polytope_centroid(vertices),
            ConvexBody::HPolytope { .. } => polytope_centroid(&self.enumerate_vertices()?),
            ConvexBody::Smooth { grid, h, f } => {
                if grid.dim == 2 {
                    if let Some(f) = f {
                        // Boundary parameterization x = h u + h' u_perp with
                        // arc-length density f: integral of x over K equals
                        // (1/3) integral of <x, u> x f dtheta.
                        let hs = TrigSeries::fit(h);
                        let m = grid.len();
                        let mut mx = Vec::with_capacity(m);
                        let mut my = Vec::with_capacity(m);
                        for (j, u) in grid.nodes.iter().enumerate() {
                            let th = u[1].atan2(u[0]);
                            let hp = hs.deriv(th);
                            let x = h[j] * u[0] - hp * u[1];
                            let y = h[j] * u[1] + hp * u[0];
                            mx.push(h[j] * x * f[j] / 3.0);
                            my.push(h[j] * y * f[j] / 3.0);
                        }
                        let vol = self.volume()?;
                        return Ok(vec![
                            grid.integrate(&mx)? / vol,
                            grid.integrate(&my)? / vol,
                        ]);
                    }
                }
                // Polar moment: integral of x over K = (1/(n+1)) integral of
                // rho^{n+1} u dsigma.
                let n = grid.dim;
                let rho: Vec<f64> = grid
                    .nodes
                    .iter()
                    .map(|u| self.radial(u))
                    .collect::<Result<_>>()?;
                let vol: f64 = {
                    let vals: Vec<f64> = rho.iter().map(|r| r.powi(n as i32)).collect();
                    grid.integrate(&vals)? / n as f64
                };
                let mut c = vec![0.0; n];
                for (d, cd) in c.iter_mut().enumerate() {
                    let vals: Vec<f64> = rho
                        .iter()
                        .zip(&grid.nodes)
                        .map(|(r, u)| r.powi(n as i32 + 1) * u[d])
                        .collect();
                    *cd = grid.integrate(&vals)? / ((n + 1) as f64 * vol);
                }
                Ok(c)
            }
        }
    }

    /// Translate by z; the origin must stay interior.
    pub fn translate(&self, z: &[f64]) -> Result<ConvexBody> {
        let out = match self {
            ConvexBody::VPolytope { vertices } => ConvexBody::VPolytope {
                vertices: vertices.iter().map(|v| geom::add(v, z)).collect(),
            },
            ConvexBody::HPolytope { normals, offsets } => ConvexBody::HPolytope {
                normals: normals.clone(),
                offsets: normals
                    .iter()
                    .zip(offsets)
                    .map(|(u, h)| h + geom::dot(u, z))
                    .collect(),
            },
            ConvexBody::Smooth { grid, h, f } => ConvexBody::Smooth {
                grid: grid.clone(),
                h: h
                    .iter()
                    .zip(&grid.nodes)
                    .map(|(v, u)| v + geom::dot(u, z))
                    .collect(),
                // The surface area measure is translation invariant.
                f: f.clone(),
            },
            ConvexBody::Ball { .. } | ConvexBody::Ellipsoid { .. } => {
                if geom::norm(z) == 0.0 {
                    self.clone()
                } else {
                    return Err(Error::UnsupportedDimension(self.dim()));
                }
            }
        };
        match &out {
            ConvexBody::HPolytope { offsets, .. } => {
                if let Some(&bad) = offsets.iter().find(|&&h| h <= 0.0) {
                    return Err(Error::OriginNotInterior(bad));
                }
            }
            ConvexBody::Smooth { h, .. } => {
                if let Some(&bad) = h.iter().find(|&&v| v <= 0.0) {
                    return Err(Error::OriginNotInterior(bad));
                }
            }
            _ => {}
        }
        Ok(out)
    }

    /// Support values at every grid node.
    pub fn support_profile(&self, grid: &SphereGrid) -> Result<Vec<f64>> {
        if let ConvexBody::Smooth { grid: own, h, .. } = self {
            if own.same_as(grid) {
                return Ok(h.clone());
            }
        }
        match self {
            ConvexBody::Smooth { grid: own, h, .. } if own.dim == 2 => {
                let ts = TrigSeries::fit(h);
                Ok(grid
                    .nodes
                    .iter()
                    .map(|u| ts.eval(u[1].atan2(u[0])))
                    .collect())
            }
            _ => grid.nodes.iter().map(|u| self.support(u)).collect(),
        }
    }

    /// Radial values at every grid node.
    pub fn radial_profile(&self, grid: &SphereGrid) -> Result<Vec<f64>> {
        match self {
            ConvexBody::VPolytope { .. } => {
                let (normals, offsets) = self.to_hform()?;
                grid.nodes
                    .iter()
                    .map(|u| radial_hform(&normals, &offsets, u))
                    .collect()
            }
            ConvexBody::Smooth { grid: own, h, .. } if own.dim == 2 => {
                let ts = TrigSeries::fit(h);
                Ok(grid
                    .nodes
                    .iter()
                    .map(|u| ts.radial(u[1].atan2(u[0])))
                    .collect())
            }
            _ => grid.nodes.iter().map(|u| self.radial(u)).collect(),
        }
    }
}

/// Radial function of an H-polytope: the first halfspace the ray exits.
fn radial_hform(normals: &[Vec<f64>], offsets: &[f64], u: &[f64]) -> Result<f64> {
    let mut best = f64::INFINITY;
    for (nv, &h) in normals.iter().zip(offsets) {
        let d = geom::dot(nv, u);
        if d > 1e-14 {
            best = best.min(h / d);
        }
    }
    if !best.is_finite() || best <= 0.0 {
        return Err(Error::OriginNotInterior(best));
    }
    Ok(best)
}

/// Exact polytope volume by fan decomposition from the origin.
fn polytope_volume(vertices: &[Vec<f64>]) -> Result<f64> {
    match vertices[0].len() {
        2 => {
            let hull = geom::hull2d(vertices);
            let k = hull.len();
            let mut area = 0.0;
            for i in 0..k {
                area += geom::cross2(&vertices[hull[i]], &vertices[hull[(i + 1) % k]]);
            }
            let v = area / 2.0;
            if v <= 0.0 {
                return Err(Error::OriginNotInterior(v));
            }
            Ok(v)
        }
        3 => {
            let faces = geom::hull3d(vertices).ok_or(Error::DegenerateSample(vertices.len()))?;
            let mut vol = 0.0;
            for f in &faces {
                vol += geom::dot(
                    &vertices[f[0]],
                    &geom::cross3(&vertices[f[1]], &vertices[f[2]]),
                ) / 6.0;
            }
            if vol <= 0.0 {
                return Err(Error::OriginNotInterior(vol));
            }
            Ok(vol)
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Exact polytope centroid via the fan decomposition.
fn polytope_centroid(vertices: &[Vec<f64>]) -> Result<Vec<f64>> {
    match vertices[0].len() {
        2 => {
            let hull = geom::hull2d(vertices);
            let k = hull.len();
            let mut area = 0.0;
            let mut cx = 0.0;
            let mut cy = 0.0;
            for i in 0..k {
                let a = &vertices[hull[i]];
                let b = &vertices[hull[(i + 1) % k]];
                let cr = geom::cross2(a, b);
                area += cr;
                cx += (a[0] + b[0]) * cr;
                cy += (a[1] + b[1]) * cr;
            }
            area /= 2.0;
            Ok(vec![cx / (6.0 * area), cy / (6.0 * area)])
        }
        3 => {
            let faces = geom::hull3d(vertices).ok_or(Error::DegenerateSample(vertices.len()))?;
            let mut vol = 0.0;
            let mut c = vec![0.0; 3];
            for f in &faces {
                let (a, b, d) = (&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
                let v = geom::dot(a, &geom::cross3(b, d)) / 6.0;
                vol += v;
                for k in 0..3 {
                    // Tet centroid (origin + a + b + d) / 4.
                    c[k] += v * (a[k] + b[k] + d[k]) / 4.0;
                }
            }
            Ok(geom::scale(&c, 1.0 / vol))
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// (n-1)-measure of the facet of the hull of `vertices` lying on the plane
/// <x, normal> = offset.
fn facet_measure(vertices: &[Vec<f64>], normal: &[f64], offset: f64) -> Result<f64> {
    let on: Vec<&Vec<f64>> = vertices
        .iter()
        .filter(|v| (geom::dot(v, normal) - offset).abs() < 1e-9 * (1.0 + offset.abs()))
        .collect();
    match normal.len() {
        2 => {
            if on.len() < 2 {
                return Ok(0.0);
            }
            // Edge length: spread along the tangent direction.
            let t = [-normal[1], normal[0]];
            let mut lo = f64::MAX;
            let mut hi = f64::MIN;
            for v in &on {
                let s = geom::dot(v, &t);
                lo = lo.min(s);
                hi = hi.max(s);
            }
            Ok(hi - lo)
        }
        3 => {
            if on.len() < 3 {
                return Ok(0.0);
            }
            // Project onto the plane and take the polygon area.
            let e1 = orthonormal_tangent(normal);
            let e2 = geom::cross3(normal, &e1);
            let pts: Vec<Vec<f64>> = on
                .iter()
                .map(|v| vec![geom::dot(v, &e1), geom::dot(v, &e2)])
                .collect();
            let hull = geom::hull2d(&pts);
            let k = hull.len();
            let mut area = 0.0;
            for i in 0..k {
                area += geom::cross2(&pts[hull[i]], &pts[hull[(i + 1) % k]]);
            }
            Ok(area.abs() / 2.0)
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

fn orthonormal_tangent(n: &[f64]) -> Vec<f64> {
    let pick = if n[0].abs() < 0.9 {
        vec![1.0, 0.0, 0.0]
    } else {
        vec![0.0, 1.0, 0.0]
    };
    let proj = geom::dot(&pick, n);
    geom::normalize(&geom::sub(&pick, &geom::scale(n, proj)))
}

/// First-order interpolation of node samples at an off-node direction. In
/// the plane this is exact (trigonometric series); on S^2 it solves for
/// conic (positively homogeneous) weights over the nearest nodes.
fn interpolate_on_sphere(grid: &SphereGrid, values: &[f64], u: &[f64]) -> Result<f64> {
    match grid.dim {
        2 => Ok(TrigSeries::fit(values).eval(u[1].atan2(u[0]))),
        3 => {
            // Nearest nodes by angle.
            let mut idx: Vec<usize> = (0..grid.len()).collect();
            idx.sort_by(|&a, &b| {
                geom::dot(&grid.nodes[b], u)
                    .partial_cmp(&geom::dot(&grid.nodes[a], u))
                    .unwrap()
            });
            if geom::dot(&grid.nodes[idx[0]], u) > 1.0 - 1e-12 {
                return Ok(values[idx[0]]);
            }
            // Solve u = x1 n1 + x2 n2 + x3 n3 over nearby triples; a
            // nonnegative solution gives the degree-1 homogeneous estimate
            // sum x_i values_i.
            let cap = idx.len().min(8);
            for a in 0..cap {
                for b in (a + 1)..cap {
                    for c in (b + 1)..cap {
                        let m = DMatrix::from_fn(3, 3, |i, j| {
                            grid.nodes[idx[[a, b, c][j]]][i]
                        });
                        if let Some(sol) = m.lu().solve(&DVector::from_column_slice(u)) {
                            if sol.iter().all(|&x| x >= -1e-12) {
                                let v = sol[0] * values[idx[a]]
                                    + sol[1] * values[idx[b]]
                                    + sol[2] * values[idx[c]];
                                return Ok(v);
                            }
                        }
                    }
                }
            }
            // Fallback: nearest node.
            Ok(values[idx[0]])
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}

// ---------------------------------------------------------------------------
// StarBody operations.
// ---------------------------------------------------------------------------

impl StarBody {
    pub fn new(grid: SphereGrid, rho: Vec<f64>) -> Result<StarBody> {
        if rho.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: rho.len(),
            });
        }
        if let Some(&bad) = rho.iter().find(|&&r| r <= 0.0) {
            return Err(Error::OriginNotInterior(bad));
        }
        Ok(StarBody { grid, rho })
    }

    pub fn unit_ball(grid: SphereGrid) -> StarBody {
        let m = grid.len();
        StarBody {
            grid,
            rho: vec![1.0; m],
        }
    }

    pub fn radial(&self, u: &[f64]) -> Result<f64> {
        interpolate_on_sphere(&self.grid, &self.rho, u)
    }

    /// Quadrature volume (1/n) integral of rho^n.
    pub fn volume(&self) -> Result<f64> {
        let n = self.grid.dim;
        let vals: Vec<f64> = self.rho.iter().map(|r| r.powi(n as i32)).collect();
        Ok(self.grid.integrate(&vals)? / n as f64)
    }

    pub fn vrad(&self) -> Result<f64> {
        let n = self.grid.dim;
        Ok((self.volume()? / unit_ball_volume(n)).powf(1.0 / n as f64))
    }

    pub fn scaled(&self, s: f64) -> StarBody {
        StarBody {
            grid: self.grid.clone(),
            rho: self.rho.iter().map(|r| r * s).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Random corpus generators.
// ---------------------------------------------------------------------------

/// Which family `random_body` draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyClass {
    Polytope,
    Smooth,
}

/// Seeded random body with centroid at the origin.
pub fn random_body(dim: usize, seed: u64, class: BodyClass) -> Result<ConvexBody> {
    if !(dim == 2 || dim == 3) {
        return Err(Error::UnsupportedDimension(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let candidate = match class {
            BodyClass::Polytope => random_polytope(dim, &mut rng),
            BodyClass::Smooth => random_smooth(dim, &mut rng),
        };
        if let Ok(body) = candidate {
            if let Ok(body) = recenter(body) {
                return Ok(body);
            }
        }
    }
    Err(Error::DegenerateSample(100))
}

fn random_polytope<R: Rng>(dim: usize, rng: &mut R) -> Result<ConvexBody> {
    let count = 3 * dim + rng.random_range(0..4);
    let vertices: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            let dir = geom::normalize(&(0..dim).map(|_| gaussian(rng)).collect::<Vec<f64>>());
            let r = 0.6 + 0.8 * rng.random::<f64>();
            geom::scale(&dir, r)
        })
        .collect();
    let body = ConvexBody::VPolytope { vertices };
    body.validate()?;
    // Reject flat samples: the origin must be well interior after centering.
    let c = body.centroid()?;
    let shifted = body.translate(&geom::scale(&c, -1.0))?;
    let (_, offsets) = shifted.to_hform()?;
    if offsets.iter().any(|&h| h < 0.05) {
        return Err(Error::DegenerateSample(0));
    }
    Ok(shifted)
}

/// Perturbed ellipse: a trigonometric support profile with positive
/// curvature, sampled on the equispaced circle grid.
fn random_smooth<R: Rng>(dim: usize, rng: &mut R) -> Result<ConvexBody> {
    if dim != 2 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let grid = SphereGrid::build(2, 256)?;
    let a = 0.8 + 0.6 * rng.random::<f64>();
    let b = 1.0 / a;
    let rot = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let mut h: Vec<f64> = grid
        .nodes
        .iter()
        .map(|u| {
            let th = u[1].atan2(u[0]) - rot;
            let (c, s) = (th.cos(), th.sin());
            (a * a * c * c + b * b * s * s).sqrt()
        })
        .collect();
    for k in 2..=5u32 {
        let amp = 0.03 / (k * k) as f64;
        let ck = amp * (2.0 * rng.random::<f64>() - 1.0);
        let sk = amp * (2.0 * rng.random::<f64>() - 1.0);
        for (j, u) in grid.nodes.iter().enumerate() {
            let th = u[1].atan2(u[0]);
            h[j] += ck * (k as f64 * th).cos() + sk * (k as f64 * th).sin();
        }
    }
    let f = curvature_2d(&h)?;
    let body = ConvexBody::Smooth {
        grid,
        h,
        f: Some(f),
    };
    body.validate()?;
    Ok(body)
}

/// Translate so the computed centroid vanishes; iterated because the
/// centroid estimator itself moves with the body.
pub fn recenter(mut body: ConvexBody) -> Result<ConvexBody> {
    for _ in 0..50 {
        let c = body.centroid()?;
        if geom::norm(&c) < 1e-12 {
            return Ok(body);
        }
        body = body.translate(&geom::scale(&c, -1.0))?;
    }
    let c = body.centroid()?;
    if geom::norm(&c) < 1e-8 {
        Ok(body)
    } else {
        Err(Error::DegenerateSample(50))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn square() -> ConvexBody {
        ConvexBody::VPolytope {
            vertices: vec![
                vec![-1.0, -1.0],
                vec![1.0, -1.0],
                vec![1.0, 1.0],
                vec![-1.0, 1.0],
            ],
        }
    }

    fn diag_ellipsoid(a: f64, b: f64) -> ConvexBody {
        ConvexBody::Ellipsoid {
            matrix: vec![vec![a, 0.0], vec![0.0, b]],
        }
    }

    #[test]
    fn support_examples() {
        assert!((square().support(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-14);
        assert!((diag_ellipsoid(2.0, 0.5).support(&[1.0, 0.0]).unwrap() - 2.0).abs() < 1e-14);
        assert!((ConvexBody::ball(3.0).support(&[0.0, 1.0]).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn radial_examples() {
        let d = 1.0 / 2.0f64.sqrt();
        assert!((square().radial(&[d, d]).unwrap() - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((ConvexBody::ball(2.5).radial(&[1.0, 0.0]).unwrap() - 2.5).abs() < 1e-14);
    }

    #[test]
    fn radial_support_polar_identity() {
        let grid = SphereGrid::build(2, 128).unwrap();
        let bodies = vec![
            square(),
            diag_ellipsoid(1.7, 0.4),
            ConvexBody::ball(2.0),
            random_body(2, 7, BodyClass::Smooth).unwrap(),
        ];
        for k in bodies {
            let kp = k.polar().unwrap();
            for u in &grid.nodes {
                let lhs = k.radial(u).unwrap() * kp.support(u).unwrap();
                assert!((lhs - 1.0).abs() < 1e-8, "rho * h_polar = {lhs}");
            }
        }
    }

    #[test]
    fn polar_examples() {
        // Square -> cross-polytope.
        let p = square().polar().unwrap();
        let verts = p.enumerate_vertices().unwrap();
        assert_eq!(verts.len(), 4);
        for v in &verts {
            assert!((geom::norm(v) - 1.0).abs() < 1e-12);
            assert!(v[0].abs() < 1e-12 || v[1].abs() < 1e-12);
        }
        match ConvexBody::ball(2.0).polar().unwrap() {
            ConvexBody::Ball { r } => assert!((r - 0.5).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        match diag_ellipsoid(4.0, 0.25).polar().unwrap() {
            ConvexBody::Ellipsoid { matrix } => {
                assert!((matrix[0][0] - 0.25).abs() < 1e-14);
                assert!((matrix[1][1] - 4.0).abs() < 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bipolar_round_trip() {
        let k = square();
        let kpp = k.polar().unwrap().polar().unwrap();
        let mut v1 = k.enumerate_vertices().unwrap();
        let mut v2 = kpp.enumerate_vertices().unwrap();
        let key = |v: &Vec<f64>| (v[1].atan2(v[0]) * 1e9) as i64;
        v1.sort_by_key(key);
        v2.sort_by_key(key);
        for (a, b) in v1.iter().zip(&v2) {
            assert!(geom::dist(a, b) < 1e-8);
        }
    }

    #[test]
    fn volume_examples() {
        assert!((square().volume().unwrap() - 4.0).abs() < 1e-12);
        assert!((square().polar().unwrap().volume().unwrap() - 2.0).abs() < 1e-12);
        assert!((diag_ellipsoid(3.0, 1.0 / 3.0).volume().unwrap() - PI).abs() < 1e-12);
        let k = random_body(2, 5, BodyClass::Polytope).unwrap();
        let grid = SphereGrid::build(2, 2048).unwrap();
        let rho = k.radial_profile(&grid).unwrap();
        let quad = StarBody::new(grid, rho).unwrap().volume().unwrap();
        let exact = k.volume().unwrap();
        assert!(((quad - exact) / exact).abs() < 1e-3, "{quad} vs {exact}");
    }

    #[test]
    fn vrad_examples() {
        assert!((ConvexBody::ball(1.5).vrad_dim(2).unwrap() - 1.5).abs() < 1e-12);
        assert!((square().vrad().unwrap() - (4.0 / PI).sqrt()).abs() < 1e-12);
        let t = SLTransform::random(2, 11).unwrap();
        let k = random_body(2, 3, BodyClass::Polytope).unwrap();
        let tk = k.apply_sl(&t).unwrap();
        assert!((tk.vrad().unwrap() - k.vrad().unwrap()).abs() < 1e-10);
    }

    #[test]
    fn surface_area_measure_square() {
        let sm = square().surface_area_measure(None).unwrap();
        match sm {
            SurfaceAreaMeasure::Atomic { atoms } => {
                assert_eq!(atoms.len(), 4);
                for (u, m) in &atoms {
                    assert!((m - 2.0).abs() < 1e-12);
                    assert!(u[0].abs() < 1e-12 || u[1].abs() < 1e-12);
                }
            }
            _ => panic!("expected atoms"),
        }
    }

    #[test]
    fn volume_identity() {
        // Atoms: exact for polytopes.
        let k = random_body(2, 13, BodyClass::Polytope).unwrap();
        if let SurfaceAreaMeasure::Atomic { atoms } = k.surface_area_measure(None).unwrap() {
            let s: f64 = atoms
                .iter()
                .map(|(u, m)| k.support(u).unwrap() * m)
                .sum();
            assert!((s / 2.0 - k.volume().unwrap()).abs() < 1e-10);
        } else {
            panic!("expected atoms");
        }
        // Density: ellipse within 1e-6.
        let grid = SphereGrid::build(2, 1024).unwrap();
        let e = diag_ellipsoid(1.8, 1.0 / 1.8);
        if let SurfaceAreaMeasure::Density { grid, f } = e.surface_area_measure(Some(&grid)).unwrap()
        {
            let vals: Vec<f64> = grid
                .nodes
                .iter()
                .zip(&f)
                .map(|(u, fv)| e.support(u).unwrap() * fv)
                .collect();
            let got = grid.integrate(&vals).unwrap() / 2.0;
            assert!(((got - PI) / PI).abs() < 1e-6, "{got}");
        } else {
            panic!("expected density");
        }
    }

    #[test]
    fn curvature_examples() {
        // Constant profile: ball of radius r has f = r.
        let h = vec![1.7; 128];
        let f = curvature_2d(&h).unwrap();
        assert!(f.iter().all(|&v| (v - 1.7).abs() < 1e-12));
        // Minkowski condition on a random smooth body.
        let k = random_body(2, 42, BodyClass::Smooth).unwrap();
        if let ConvexBody::Smooth { grid, f: Some(f), .. } = &k {
            let total: f64 = f.iter().zip(&grid.weights).map(|(v, w)| v * w).sum();
            for d in 0..2 {
                let s: f64 = f
                    .iter()
                    .zip(&grid.nodes)
                    .zip(&grid.weights)
                    .map(|((v, u), w)| v * u[d] * w)
                    .sum();
                assert!(s.abs() < 1e-6 * total);
            }
        } else {
            panic!("expected smooth body with curvature");
        }
    }

    #[test]
    fn apply_sl_examples() {
        let t = SLTransform::new(vec![vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let sheared = square().apply_sl(&t).unwrap();
        assert!((sheared.volume().unwrap() - 4.0).abs() < 1e-12);
        let t2 = SLTransform::new(vec![vec![2.0, 0.0], vec![0.0, 0.5]]).unwrap();
        match ConvexBody::ball(1.0).apply_sl(&t2).unwrap() {
            ConvexBody::Ellipsoid { matrix } => {
                assert!((matrix[0][0] - 2.0).abs() < 1e-14 && (matrix[1][1] - 0.5).abs() < 1e-14);
            }
            other => panic!("unexpected {other:?}"),
        }
        // Smooth bodies: volume preserved through resampling.
        let k = random_body(2, 8, BodyClass::Smooth).unwrap();
        let t3 = SLTransform::random(2, 21).unwrap();
        let tk = k.apply_sl(&t3).unwrap();
        let (v1, v2) = (k.volume().unwrap(), tk.volume().unwrap());
        assert!(((v1 - v2) / v1).abs() < 1e-8, "{v1} vs {v2}");
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(
            SLTransform::new(vec![vec![2.0, 0.0], vec![0.0, 1.0]]),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn random_bodies_deterministic_and_centered() {
        for class in [BodyClass::Polytope, BodyClass::Smooth] {
            let a = random_body(2, 99, class).unwrap();
            let b = random_body(2, 99, class).unwrap();
            assert!(geom::dist(&a.centroid().unwrap(), &vec![0.0, 0.0]) < 1e-8);
            let ha = a.support(&[1.0, 0.0]).unwrap();
            let hb = b.support(&[1.0, 0.0]).unwrap();
            assert_eq!(ha, hb);
        }
        let t = SLTransform::random(2, 4).unwrap();
        let d = to_dmatrix(&t.matrix).determinant().abs();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn centroid_and_translate() {
        let c = square().centroid().unwrap();
        assert!(geom::norm(&c) < 1e-14);
        let moved = square().translate(&[0.5, 0.0]).unwrap();
        let c = moved.centroid().unwrap();
        assert!((c[0] - 0.5).abs() < 1e-12 && c[1].abs() < 1e-12);
        // Linearity under linear maps.
        let t = SLTransform::new(vec![vec![1.0, 0.3], vec![0.0, 1.0]]).unwrap();
        let tk = moved.apply_sl(&t).unwrap();
        let expect = t.apply_point(&c);
        assert!(geom::dist(&tk.centroid().unwrap(), &expect) < 1e-8);
    }

    #[test]
    fn blaschke_santalo_sanity() {
        for seed in 0..5u64 {
            for class in [BodyClass::Polytope, BodyClass::Smooth] {
                let k = random_body(2, 100 + seed, class).unwrap();
                let prod = k.vrad().unwrap() * k.polar().unwrap().vrad().unwrap();
                assert!(prod <= 1.0 + 1e-6, "vrad product {prod}");
            }
        }
    }

    #[test]
    fn trig_series_exact_on_band_limited() {
        let m = 64;
        let vals: Vec<f64> = (0..m)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / m as f64;
                2.0 + 0.5 * (3.0 * th).cos() - 0.2 * (5.0 * th).sin()
            })
            .collect();
        let ts = TrigSeries::fit(&vals);
        for &th in &[0.123f64, 1.9, 4.4] {
            let expect = 2.0 + 0.5 * (3.0 * th).cos() - 0.2 * (5.0 * th).sin();
            assert!((ts.eval(th) - expect).abs() < 1e-12);
            let dexpect = -1.5 * (3.0 * th).sin() - (5.0 * 0.2) * (5.0 * th).cos();
            assert!((ts.deriv(th) - dexpect).abs() < 1e-11);
        }
    }

    #[test]
    fn json_round_trip() {
        let bodies = vec![square(), ConvexBody::ball(2.0), diag_ellipsoid(1.5, 0.5)];
        for k in bodies {
            let s = serde_json::to_string(&k).unwrap();
            let k2: ConvexBody = serde_json::from_str(&s).unwrap();
            let u = geom::normalize(&[0.3, -0.8]);
            assert!((k.support(&u).unwrap() - k2.support(&u).unwrap()).abs() < 1e-14);
        }
        let s = serde_json::to_string(&ConvexBody::ball(1.0)).unwrap();
        assert!(s.contains(r#""kind":"ball""#));
        let star = StarBody::unit_ball(SphereGrid::build(2, 16).unwrap());
        let s = serde_json::to_string(&star).unwrap();
        let star2: StarBody = serde_json::from_str(&s).unwrap();
        assert!(star.grid.same_as(&star2.grid));
    }
}
