//! Quadrature rules on the unit sphere `S^{n-1}`.
//!
//! Every integral against the spherical measure in this crate is a weighted
//! sum over one of these grids. Weights are equal by construction: positivity
//! and antipodal symmetry matter more here than high-order exactness, and the
//! node sets are post-processed (second-moment whitening) so that degree-2
//! polynomials still integrate exactly.

use crate::error::{Error, Result};
use crate::geom::pairwise_sum;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    // omega_n = omega_{n-2} * 2 pi / n, with omega_1 = 2, omega_2 = pi.
    let mut v = if dim % 2 == 1 { 2.0 } else { 1.0 };
    let mut k = if dim % 2 == 1 { 1 } else { 0 };
    while k < dim {
        k += 2;
        v *= 2.0 * std::f64::consts::PI / k as f64;
    }
    if dim == 0 {
        1.0
    } else {
        v
    }
}

/// Total measure of `S^{n-1}`, i.e. `n * omega_n`.
pub fn sphere_measure(dim: usize) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

/// Equal-weight quadrature nodes on `S^{n-1}`, antipodally symmetric.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereGrid {
    pub dim: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereGrid {
    /// Build a grid with `resolution` nodes.
    ///
    /// n=2: equispaced circle angles. n=3: antipodally symmetrized Fibonacci
    /// lattice. n>=4: antipodally symmetrized seeded directions. All weights
    /// equal `n omega_n / m`, and nodes are whitened so second moments are
    /// isotropic to machine precision.
    pub fn build(dim: usize, resolution: usize) -> Result<SphereGrid> {
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if resolution < 4 || resolution % 2 != 0 {
            return Err(Error::InvalidResolution(resolution));
        }
        let m = resolution;
        let total = sphere_measure(dim);
        let w = total / m as f64;
        let mut nodes: Vec<Vec<f64>> = Vec::with_capacity(m);
        match dim {
            2 => {
                for k in 0..m {
                    let th = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                    nodes.push(vec![th.cos(), th.sin()]);
                }
            }
            3 => {
                let half = m / 2;
                let golden = (5.0f64.sqrt() - 1.0) / 2.0;
                for i in 0..half {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / half as f64;
                    let phi = 2.0 * std::f64::consts::PI * (i as f64 * golden).fract();
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    nodes.push(vec![r * phi.cos(), r * phi.sin(), z]);
                }
                for i in 0..half {
                    let p = nodes[i].clone();
                    nodes.push(p.iter().map(|x| -x).collect());
                }
                whiten(&mut nodes);
            }
            _ => {
                let half = m / 2;
                let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (dim as u64) << 32 ^ m as u64);
                for _ in 0..half {
                    let mut v: Vec<f64>;
                    loop {
                        v = (0..dim).map(|_| gaussian(&mut rng)).collect();
                        let nn = crate::geom::norm(&v);
                        if nn > 1e-6 {
                            v = v.iter().map(|x| x / nn).collect();
                            break;
                        }
                    }
                    nodes.push(v);
                }
                for i in 0..half {
                    let p = nodes[i].clone();
                    nodes.push(p.iter().map(|x| -x).collect());
                }
                whiten(&mut nodes);
            }
        }
        Ok(SphereGrid {
            dim,
            nodes,
            weights: vec![w; m],
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate node-indexed values against the grid measure.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteIntegrand(i));
        }
        let terms: Vec<f64> = values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .collect();
        Ok(pairwise_sum(&terms))
    }

    /// Check the structural invariants (unit nodes, positive weights, total
    /// measure, zero first moment). Used by tests and after deserialization.
    pub fn validate(&self) -> Result<()> {
        for (i, u) in self.nodes.iter().enumerate() {
            if u.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: u.len(),
                });
            }
            if (crate::geom::norm(u) - 1.0).abs() > 1e-12 {
                return Err(Error::NonFiniteIntegrand(i));
            }
        }
        if self.weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidResolution(self.nodes.len()));
        }
        let total = pairwise_sum(&self.weights);
        let expect = sphere_measure(self.dim);
        if ((total - expect) / expect).abs() > 1e-9 {
            return Err(Error::InvalidResolution(self.nodes.len()));
        }
        for d in 0..self.dim {
            let moment: f64 = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(u, w)| u[d] * w)
                .sum();
            if moment.abs() > 1e-6 {
                return Err(Error::NonFiniteIntegrand(d));
            }
        }
        Ok(())
    }

    /// Structural equality cheap enough for kernel compatibility checks.
    pub fn same_as(&self, other: &SphereGrid) -> bool {
        self.dim == other.dim
            && self.len() == other.len()
            && self
                .nodes
                .iter()
                .zip(&other.nodes)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-14))
    }
}

/// Iteratively normalize second moments so that `sum u_d^2 = m/n` exactly and
/// cross moments vanish. A linear map preserves antipodal symmetry; the
/// renormalization to the sphere is why this needs a few iterations.
fn whiten(nodes: &mut [Vec<f64>]) {
    let dim = nodes[0].len();
    let m = nodes.len() as f64;
    for _ in 0..64 {
        let mut mat = nalgebra::DMatrix::<f64>::zeros(dim, dim);
        for u in nodes.iter() {
            for i in 0..dim {
                for j in 0..dim {
                    mat[(i, j)] += u[i] * u[j];
                }
            }
        }
        mat /= m / dim as f64;
        let dev = (&mat - nalgebra::DMatrix::<f64>::identity(dim, dim)).norm();
        if dev < 1e-14 {
            break;
        }
        // One step toward M^{-1/2}: A = (3I - M)/2 is the Newton-Schulz map.
        let a = (nalgebra::DMatrix::<f64>::identity(dim, dim) * 3.0 - mat) * 0.5;
        for u in nodes.iter_mut() {
            let v = nalgebra::DVector::from_column_slice(u);
            let w = &a * v;
            let nn = w.norm();
            for d in 0..dim {
                u[d] = w[d] / nn;
            }
        }
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; enough for direction sampling.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn omega_n_values() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((sphere_measure(2) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_measure(3) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn circle_grid_resolution_four() {
        let g = SphereGrid::build(2, 4).unwrap();
        let expect = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        for (u, e) in g.nodes.iter().zip(expect.iter()) {
            assert!((u[0] - e[0]).abs() < 1e-15 && (u[1] - e[1]).abs() < 1e-15);
        }
        for &w in &g.weights {
            assert!((w - PI / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_odd_or_tiny_resolution() {
        assert!(matches!(
            SphereGrid::build(2, 7),
            Err(Error::InvalidResolution(7))
        ));
        assert!(matches!(
            SphereGrid::build(2, 2),
            Err(Error::InvalidResolution(2))
        ));
    }

    #[test]
    fn total_measure_and_symmetry() {
        for (dim, m) in [(2usize, 1024usize), (3, 512), (4, 256)] {
            let g = SphereGrid::build(dim, m).unwrap();
            g.validate().unwrap();
            let total = g.integrate(&vec![1.0; m]).unwrap();
            let expect = sphere_measure(dim);
            assert!(
                ((total - expect) / expect).abs() < 1e-12,
                "dim {dim}: total {total} vs {expect}"
            );
        }
    }

    #[test]
    fn circle_cos_squared() {
        let g = SphereGrid::build(2, 1024).unwrap();
        let vals: Vec<f64> = g.nodes.iter().map(|u| u[0] * u[0]).collect();
        let got = g.integrate(&vals).unwrap();
        assert!((got - PI).abs() < 1e-9, "got {got}");
    }

    #[test]
    fn degree_two_exactness() {
        // Degree-2 spherical polynomials integrate to analytic values.
        for (dim, m) in [(2usize, 256usize), (3, 256), (3, 1024)] {
            let g = SphereGrid::build(dim, m).unwrap();
            let expect = sphere_measure(dim) / dim as f64;
            for d in 0..dim {
                let vals: Vec<f64> = g.nodes.iter().map(|u| u[d] * u[d]).collect();
                let got = g.integrate(&vals).unwrap();
                assert!(
                    ((got - expect) / expect).abs() < 1e-6,
                    "dim {dim} m {m} axis {d}: {got} vs {expect}"
                );
            }
            let vals: Vec<f64> = g.nodes.iter().map(|u| u[0] * u[1]).collect();
            let got = g.integrate(&vals).unwrap();
            assert!(got.abs() < 1e-6 * expect);
        }
    }

    #[test]
    fn refinement_reduces_error_on_smooth_integrand() {
        // exp(<u, e1>) on S^2; reference from a dense grid.
        let reference = {
            let g = SphereGrid::build(3, 16384).unwrap();
            let vals: Vec<f64> = g.nodes.iter().map(|u| u[2].exp()).collect();
            g.integrate(&vals).unwrap()
        };
        let mut errors = Vec::new();
        for m in [128usize, 512, 2048] {
            let g = SphereGrid::build(3, m).unwrap();
            let vals: Vec<f64> = g.nodes.iter().map(|u| u[2].exp()).collect();
            errors.push((g.integrate(&vals).unwrap() - reference).abs());
        }
        assert!(
            errors[0] > errors[1] && errors[1] > errors[2],
            "errors {errors:?}"
        );
    }

    #[test]
    fn json_round_trip() {
        let g = SphereGrid::build(3, 64).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        let g2: SphereGrid = serde_json::from_str(&s).unwrap();
        assert!(g.same_as(&g2));
    }
}
