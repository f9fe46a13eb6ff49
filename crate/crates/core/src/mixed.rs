//! Integral kernels: the Orlicz phi-mixed volume, its polar star-body
//! form, the classical p-mixed volume, the Orlicz surface area, and the
//! multi-body / i-th mixed kernels used by the composite functionals.
//!
//! Every kernel integrates against the surface area measure of the first
//! body: exactly over facet atoms for polytopes, by spherical quadrature
//! for bodies with a curvature density. Summation is pairwise throughout so
//! results are deterministic.

use crate::bodies::{ConvexBody, StarBody, SurfaceAreaMeasure, TrigSeries};
use crate::error::{Error, Result};
use crate::geom::pairwise_sum;
use crate::grid::SphereGrid;
use crate::orlicz::OrliczFunction;
use serde::{Deserialize, Serialize};

/// Where a kernel value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Exact facet sum over this many atoms.
    Atoms(usize),
    /// Quadrature over a grid with this many nodes.
    Grid(usize),
}

/// Kernel value plus integrand diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixedVolumeResult {
    pub value: f64,
    pub integrand_min: f64,
    pub integrand_max: f64,
    pub provenance: Provenance,
}

/// The second argument of a kernel: either a support-function comparison
/// phi(h_Q / h_K) or the polar form phi(1 / (rho_L h_K)).
#[derive(Debug, Clone, Copy)]
pub enum Target<'a> {
    Support(&'a ConvexBody),
    PolarConvex(&'a ConvexBody),
    PolarStar(&'a StarBody),
}

impl<'a> Target<'a> {
    /// The argument passed to phi at direction `u` with support value `hk`.
    fn phi_args(&self, dirs: &[Vec<f64>], hk: &[f64], dim: usize) -> Result<Vec<f64>> {
        match self {
            Target::Support(q) => {
                let hq = support_at_dirs(q, dirs, dim)?;
                Ok(hq.iter().zip(hk).map(|(q, k)| q / k).collect())
            }
            Target::PolarConvex(l) => {
                let rho = radial_at_dirs_convex(l, dirs)?;
                Ok(rho.iter().zip(hk).map(|(r, k)| 1.0 / (r * k)).collect())
            }
            Target::PolarStar(l) => {
                let rho = radial_at_dirs_star(l, dirs)?;
                Ok(rho.iter().zip(hk).map(|(r, k)| 1.0 / (r * k)).collect())
            }
        }
    }

    fn grid_of(&self) -> Option<&SphereGrid> {
        match self {
            Target::Support(ConvexBody::Smooth { grid, .. }) => Some(grid),
            Target::PolarStar(l) => Some(&l.grid),
            _ => None,
        }
    }
}

/// Support values at arbitrary directions, exact where possible.
fn support_at_dirs(q: &ConvexBody, dirs: &[Vec<f64>], dim: usize) -> Result<Vec<f64>> {
    match q {
        ConvexBody::Ball { r } => Ok(vec![*r; dirs.len()]),
        ConvexBody::Smooth { grid, h, .. } if grid.dim == 2 => {
            let ts = TrigSeries::fit(h);
            Ok(dirs.iter().map(|u| ts.eval(u[1].atan2(u[0]))).collect())
        }
        _ => {
            let _ = dim;
            dirs.iter().map(|u| q.support(u)).collect()
        }
    }
}

fn radial_at_dirs_convex(l: &ConvexBody, dirs: &[Vec<f64>]) -> Result<Vec<f64>> {
    match l {
        ConvexBody::Smooth { grid, h, .. } if grid.dim == 2 => {
            let ts = TrigSeries::fit(h);
            Ok(dirs.iter().map(|u| ts.radial(u[1].atan2(u[0]))).collect())
        }
        _ => dirs.iter().map(|u| l.radial(u)).collect(),
    }
}

/// Star-body radial samples at arbitrary directions: node values on the
/// body's own grid, angular-linear interpolation (positivity preserving)
/// off-grid in the plane.
fn radial_at_dirs_star(l: &StarBody, dirs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let m = l.grid.len();
    dirs.iter()
        .map(|u| {
            // Same-grid fast path.
            if l.grid.dim == 2 {
                let tau = 2.0 * std::f64::consts::PI;
                let theta = u[1].atan2(u[0]).rem_euclid(tau);
                let pos = theta / tau * m as f64;
                let j = pos.floor() as usize % m;
                let frac = pos - pos.floor();
                if frac < 1e-12 {
                    Ok(l.rho[j])
                } else {
                    Ok(l.rho[j] * (1.0 - frac) + l.rho[(j + 1) % m] * frac)
                }
            } else {
                l.radial(u)
            }
        })
        .collect()
}

/// Shared kernel: (1/n) sum of factor(u) * h_K(u) * dS(K, u), where
/// `factor` is phi evaluated on the target argument.
fn eval_kernel(
    k: &ConvexBody,
    target: Target,
    phi_of_args: impl Fn(&[f64]) -> Result<Vec<f64>>,
    grid: Option<&SphereGrid>,
    dim: usize,
) -> Result<MixedVolumeResult> {
    let measure = k.surface_area_measure(grid)?;
    let (dirs, masses, provenance): (Vec<Vec<f64>>, Vec<f64>, Provenance) = match measure {
        SurfaceAreaMeasure::Atomic { atoms } => {
            let n = atoms.len();
            let (d, m) = atoms.into_iter().unzip();
            (d, m, Provenance::Atoms(n))
        }
        SurfaceAreaMeasure::Density { grid: g, f } => {
            // Two densities must share a grid exactly.
            if let Some(qg) = target.grid_of() {
                if !g.same_as(qg) {
                    return Err(Error::IncompatibleGrids);
                }
            }
            let masses = f.iter().zip(&g.weights).map(|(fv, w)| fv * w).collect();
            let count = g.len();
            (g.nodes.clone(), masses, Provenance::Grid(count))
        }
    };
    let hk: Vec<f64> = match k {
        ConvexBody::Smooth { h, .. } => {
            if matches!(provenance, Provenance::Grid(_)) {
                h.clone()
            } else {
                support_at_dirs(k, &dirs, dim)?
            }
        }
        _ => support_at_dirs(k, &dirs, dim)?,
    };
    let args = target.phi_args(&dirs, &hk, dim)?;
    let factors = phi_of_args(&args)?;
    let mut integrand_min = f64::INFINITY;
    let mut integrand_max = f64::NEG_INFINITY;
    let terms: Vec<f64> = factors
        .iter()
        .zip(&hk)
        .zip(&masses)
        .map(|((fv, h), m)| {
            let integrand = fv * h;
            integrand_min = integrand_min.min(integrand);
            integrand_max = integrand_max.max(integrand);
            integrand * m
        })
        .collect();
    let value = pairwise_sum(&terms) / dim as f64;
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::RangeError(value));
    }
    Ok(MixedVolumeResult {
        value,
        integrand_min,
        integrand_max,
        provenance,
    })
}

fn map_phi(phi: &OrliczFunction) -> impl Fn(&[f64]) -> Result<Vec<f64>> + '_ {
    |args: &[f64]| args.iter().map(|&t| phi.eval(t)).collect()
}

/// Orlicz phi-mixed volume V_phi(K, Q) =
/// (1/n) integral of phi(h_Q / h_K) h_K dS(K, .).
pub fn v_phi(
    k: &ConvexBody,
    q: &ConvexBody,
    phi: &OrliczFunction,
    grid: Option<&SphereGrid>,
) -> Result<MixedVolumeResult> {
    eval_kernel(k, Target::Support(q), map_phi(phi), grid, phi.dim_hint)
}

/// Polar form V_phi(K, L polar) =
/// (1/n) integral of phi(1 / (rho_L h_K)) h_K dS(K, .).
pub fn v_phi_polar(
    k: &ConvexBody,
    l: Target,
    phi: &OrliczFunction,
    grid: Option<&SphereGrid>,
) -> Result<MixedVolumeResult> {
    let l = match l {
        Target::Support(b) => Target::PolarConvex(b),
        other => other,
    };
    eval_kernel(k, l, map_phi(phi), grid, phi.dim_hint)
}

/// Classical p-mixed volume: (1/n) integral of h_L^p h_K^{1-p} dS(K, .)
/// (with rho_L^{-p} h_K^{1-p} when `polar`). Defined for every real p.
pub fn v_p(
    k: &ConvexBody,
    l: Target,
    p: f64,
    polar: bool,
    grid: Option<&SphereGrid>,
    dim: usize,
) -> Result<f64> {
    let l = if polar {
        match l {
            Target::Support(b) => Target::PolarConvex(b),
            other => other,
        }
    } else {
        l
    };
    let res = eval_kernel(
        k,
        l,
        |args| Ok(args.iter().map(|t| t.powf(p)).collect()),
        grid,
        dim,
    )?;
    Ok(res.value)
}

/// Orlicz phi-surface area S_phi(K) = n V_phi(K, B^n_2).
pub fn s_phi(k: &ConvexBody, phi: &OrliczFunction, grid: Option<&SphereGrid>) -> Result<f64> {
    let ball = ConvexBody::ball(1.0);
    Ok(phi.dim_hint as f64 * v_phi(k, &ball, phi, grid)?.value)
}

/// Curvature density f_K on the given grid; polytopes are rejected.
fn density_of(k: &ConvexBody, grid: &SphereGrid) -> Result<Vec<f64>> {
    match k.surface_area_measure(Some(grid))? {
        SurfaceAreaMeasure::Density { grid: g, f } => {
            if !g.same_as(grid) {
                return Err(Error::IncompatibleGrids);
            }
            Ok(f)
        }
        SurfaceAreaMeasure::Atomic { .. } => Err(Error::MissingCurvature),
    }
}

/// One factor phi_i(arg_i) h_{K_i} f_{K_i} of the multi-body kernel,
/// sampled on the common grid.
fn multi_factor(
    k: &ConvexBody,
    target: Target,
    phi: &OrliczFunction,
    grid: &SphereGrid,
) -> Result<Vec<f64>> {
    let f = density_of(k, grid)?;
    let hk = support_at_dirs(k, &grid.nodes, grid.dim)?;
    let args = target.phi_args(&grid.nodes, &hk, grid.dim)?;
    args.iter()
        .zip(&hk)
        .zip(&f)
        .map(|((&a, &h), &fv)| Ok(phi.eval(a)? * h * fv))
        .collect()
}

/// Multi-body Orlicz mixed volume (n = 2):
/// (1/n) integral of prod_i [phi_i(arg_i) h_{K_i} f_{K_i}]^{1/n} dsigma.
pub fn v_phi_multi(
    ks: &[&ConvexBody],
    targets: &[Target],
    phis: &[&OrliczFunction],
    grid: &SphereGrid,
) -> Result<f64> {
    let n = grid.dim;
    if n != 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if ks.len() != n || targets.len() != n || phis.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: ks.len(),
        });
    }
    let mut product = vec![1.0; grid.len()];
    for i in 0..n {
        let factor = multi_factor(ks[i], targets[i], phis[i], grid)?;
        for (p, fv) in product.iter_mut().zip(&factor) {
            *p *= fv.powf(1.0 / n as f64);
        }
    }
    Ok(grid.integrate(&product)? / n as f64)
}

/// i-th mixed kernel (n = 2):
/// (1/n) integral of [phi1(arg1) h_K f_K]^{(n-i)/n} [phi2(arg2) h_L f_L]^{i/n}.
#[allow(clippy::too_many_arguments)]
pub fn v_phi_ith(
    k: &ConvexBody,
    l: &ConvexBody,
    q1: Target,
    q2: Target,
    phi1: &OrliczFunction,
    phi2: &OrliczFunction,
    i: f64,
    grid: &SphereGrid,
) -> Result<f64> {
    let n = grid.dim;
    if n != 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let fk = multi_factor(k, q1, phi1, grid)?;
    let fl = multi_factor(l, q2, phi2, grid)?;
    let ek = (n as f64 - i) / n as f64;
    let el = i / n as f64;
    let vals: Vec<f64> = fk
        .iter()
        .zip(&fl)
        .map(|(&a, &b)| a.powf(ek) * b.powf(el))
        .collect();
    if let Some(idx) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteIntegrand(idx));
    }
    Ok(grid.integrate(&vals)? / n as f64)
}
