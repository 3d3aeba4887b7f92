//! Scalar functionals of bodies: volume, central section area, shadow area,
//! parallel section function, fractional derivatives, radial moments,
//! perimeter, and an isotropic-constant estimator.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::body::{convexity_check, StarBody, SupportBody2D};
use crate::error::{GtomoError, Result};
use crate::special::{gamma, gauss_legendre, sphere_surface};
use crate::sphere::{
    orthonormal_complement, quadrature_grid, subsphere_grid, substream, QuadratureGrid,
    UnitVector,
};

/// Mean of a sphere function together with a standard-error estimate
/// (zero for deterministic grids).
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

/// Integration backend over the sphere: deterministic grids for n <= 3,
/// seeded Monte Carlo above.
#[derive(Debug, Clone)]
pub enum Integrator {
    Grid(QuadratureGrid),
    MonteCarlo { samples: usize, seed: u64 },
}

impl Integrator {
    /// Deterministic grid backend for n in {2, 3}.
    pub fn grid(n: usize, resolution: usize) -> Result<Integrator> {
        Ok(Integrator::Grid(quadrature_grid(n, resolution)?))
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Integrator {
        Integrator::MonteCarlo { samples, seed }
    }

    /// Haar mean of `f` on S^{n-1}.
    pub fn mean(&self, n: usize, mut f: impl FnMut(&UnitVector) -> f64) -> Result<Estimate> {
        match self {
            Integrator::Grid(g) => {
                if !g.nodes().is_empty() && g.nodes()[0].dim() != n {
                    return Err(GtomoError::InvalidParameter(format!(
                        "grid dimension {} does not match body dimension {n}",
                        g.nodes()[0].dim()
                    )));
                }
                Ok(Estimate {
                    value: g.mean(&mut f),
                    std_err: 0.0,
                })
            }
            Integrator::MonteCarlo { samples, seed } => {
                let pts = crate::sphere::sample_sphere(n, *samples, *seed)?;
                let mut sum = 0.0;
                let mut sum_sq = 0.0;
                for p in &pts {
                    let v = f(p);
                    sum += v;
                    sum_sq += v * v;
                }
                let count = *samples as f64;
                let mean = sum / count;
                let var = (sum_sq / count - mean * mean).max(0.0);
                Ok(Estimate {
                    value: mean,
                    std_err: (var / count).sqrt(),
                })
            }
        }
    }
}

/// Volume |K| = (|S^{n-1}| / n) E[rho^n].
pub fn volume(k: &StarBody, integrator: &Integrator) -> Result<Estimate> {
    let n = k.n();
    let scale = sphere_surface(n) / n as f64;
    let est = integrator.mean(n, |u| k.rho(u).powi(n as i32))?;
    Ok(Estimate {
        value: scale * est.value,
        std_err: scale * est.std_err,
    })
}

/// (n-1)-volume of the central section K /\ theta^perp, by quadrature of
/// rho^{n-1} over the great subsphere. In the plane the section is a chord
/// through the origin.
pub fn section_area(k: &StarBody, theta: &UnitVector, resolution: usize) -> Result<f64> {
    let n = k.n();
    if n == 2 {
        let perp = UnitVector::from_normalized_unchecked(vec![-theta[1], theta[0]]);
        return Ok(k.rho(&perp) + k.rho(&perp.negated()));
    }
    let grid = subsphere_grid(theta, resolution)?;
    let p = (n - 1) as i32;
    Ok(grid.integrate(|u| k.rho(u).powi(p)) / (n as f64 - 1.0))
}

/// k-volume of the central section K /\ H by polar integration inside the
/// subspace: (1/k) times the integral of rho^k over the unit sphere of H.
/// Supports k in {2, 3} in any ambient dimension.
pub fn subspace_section_area(
    k: &StarBody,
    h: &crate::sphere::Subspace,
    resolution: usize,
) -> Result<f64> {
    if h.n() != k.n() {
        return Err(GtomoError::InvalidParameter(format!(
            "subspace lives in dimension {}, body in {}",
            h.n(),
            k.n()
        )));
    }
    let frame = h.frame();
    let n = k.n();
    let mut point = vec![0.0; n];
    match h.k() {
        2 => {
            let m = resolution.max(8);
            let mut acc = 0.0;
            for j in 0..m {
                let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let (s, c) = t.sin_cos();
                for (p, (a, b)) in point.iter_mut().zip(frame[0].iter().zip(&frame[1])) {
                    *p = c * a + s * b;
                }
                acc += k.rho_coords(&point).powi(2);
            }
            Ok(acc * std::f64::consts::PI / m as f64)
        }
        3 => {
            let grid = quadrature_grid(3, resolution.max(16))?;
            let total = crate::special::sphere_surface(3);
            let mut acc = 0.0;
            for (node, w) in grid.nodes().iter().zip(grid.weights()) {
                for (i, p) in point.iter_mut().enumerate() {
                    *p = node[0] * frame[0][i] + node[1] * frame[1][i] + node[2] * frame[2][i];
                }
                acc += w * k.rho_coords(&point).powi(3);
            }
            Ok(acc * total / 3.0)
        }
        dim => Err(GtomoError::InvalidParameter(format!(
            "in-subspace section quadrature covers k in {{2, 3}}, got {dim}"
        ))),
    }
}

/// Radially generated triangle mesh of the boundary of a 3-dimensional
/// star body (UV-sphere topology), the backend for shadow areas.
#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    vertices: Vec<[f64; 3]>,
    triangles: Vec<[u32; 3]>,
    /// Outward area vectors: |a| equals the facet area.
    area_vectors: Vec<[f64; 3]>,
}

impl BoundaryMesh {
    /// Meshes the boundary with `n_phi` polar rows and `n_psi` azimuthal
    /// columns of vertices. Convexity is the caller's concern.
    pub fn build(k: &StarBody, n_phi: usize, n_psi: usize) -> Result<BoundaryMesh> {
        if k.n() != 3 {
            return Err(GtomoError::InvalidParameter(
                "boundary meshes are built for 3-dimensional bodies".into(),
            ));
        }
        if n_phi < 4 || n_psi < 8 {
            return Err(GtomoError::InvalidParameter(
                "mesh resolution too small".into(),
            ));
        }
        let mut vertices = Vec::with_capacity((n_phi - 1) * n_psi + 2);
        let at = |coords: [f64; 3], k: &StarBody| -> [f64; 3] {
            let r = k.rho_coords(&coords);
            [r * coords[0], r * coords[1], r * coords[2]]
        };
        let north = at([0.0, 0.0, 1.0], k);
        let south = at([0.0, 0.0, -1.0], k);
        vertices.push(north);
        for i in 1..n_phi {
            let phi = std::f64::consts::PI * i as f64 / n_phi as f64;
            let (sp, cp) = phi.sin_cos();
            for j in 0..n_psi {
                let psi = 2.0 * std::f64::consts::PI * j as f64 / n_psi as f64;
                let (s, c) = psi.sin_cos();
                vertices.push(at([sp * c, sp * s, cp], k));
            }
        }
        vertices.push(south);
        let south_idx = (vertices.len() - 1) as u32;
        let ring = |i: usize, j: usize| -> u32 { (1 + (i - 1) * n_psi + (j % n_psi)) as u32 };

        let mut triangles = Vec::with_capacity(2 * (n_phi - 1) * n_psi);
        for j in 0..n_psi {
            triangles.push([0, ring(1, j), ring(1, j + 1)]);
        }
        for i in 1..(n_phi - 1) {
            for j in 0..n_psi {
                let (a, b, c, d) = (ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        for j in 0..n_psi {
            triangles.push([south_idx, ring(n_phi - 1, j + 1), ring(n_phi - 1, j)]);
        }

        let mut area_vectors = Vec::with_capacity(triangles.len());
        for t in &triangles {
            let (v0, v1, v2) = (
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
            );
            let e1 = [v1[0] - v0[0], v1[1] - v0[1], v1[2] - v0[2]];
            let e2 = [v2[0] - v0[0], v2[1] - v0[1], v2[2] - v0[2]];
            let mut a = [
                0.5 * (e1[1] * e2[2] - e1[2] * e2[1]),
                0.5 * (e1[2] * e2[0] - e1[0] * e2[2]),
                0.5 * (e1[0] * e2[1] - e1[1] * e2[0]),
            ];
            // Orient outward relative to the origin.
            let centroid = [
                (v0[0] + v1[0] + v2[0]) / 3.0,
                (v0[1] + v1[1] + v2[1]) / 3.0,
                (v0[2] + v1[2] + v2[2]) / 3.0,
            ];
            if a[0] * centroid[0] + a[1] * centroid[1] + a[2] * centroid[2] < 0.0 {
                for x in &mut a {
                    *x = -*x;
                }
            }
            area_vectors.push(a);
        }
        Ok(BoundaryMesh {
            vertices,
            triangles,
            area_vectors,
        })
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn total_area(&self) -> f64 {
        self.area_vectors
            .iter()
            .map(|a| (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt())
            .sum()
    }

    /// Shadow area along theta: half the total absolute projected facet
    /// area, exact for convex polyhedra.
    pub fn shadow_area(&self, theta: &UnitVector) -> f64 {
        let t = [theta[0], theta[1], theta[2]];
        let mut acc = 0.0;
        for a in &self.area_vectors {
            acc += (a[0] * t[0] + a[1] * t[1] + a[2] * t[2]).abs();
        }
        0.5 * acc
    }
}

/// Area of the orthogonal projection (shadow) of a convex 3-dimensional
/// body. `resolution` counts polar rows; azimuth uses twice as many.
pub fn shadow_area(k: &StarBody, theta: &UnitVector, resolution: usize) -> Result<f64> {
    let report = convexity_check(k)?;
    if !report.convex {
        return Err(GtomoError::NotConvex {
            margin: report.min_margin,
            location: report.location,
        });
    }
    let mesh = BoundaryMesh::build(k, resolution, 2 * resolution)?;
    Ok(mesh.shadow_area(theta))
}

/// Richardson-extrapolated shadow area: removes the O(h^2) mesh bias using
/// nested resolutions.
pub fn shadow_area_extrapolated(
    mesh_fine: &BoundaryMesh,
    mesh_coarse: &BoundaryMesh,
    theta: &UnitVector,
) -> f64 {
    let f = mesh_fine.shadow_area(theta);
    let c = mesh_coarse.shadow_area(theta);
    (4.0 * f - c) / 3.0
}

/// Projection length of a planar origin-symmetric convex body:
/// |K | theta^perp| = 2 h_K(theta rotated by pi/2).
pub fn projection_length_2d(support: &SupportBody2D, theta: &UnitVector) -> f64 {
    let angle = theta.angle() + std::f64::consts::FRAC_PI_2;
    2.0 * support.h(angle)
}

/// Parallel section function A_{K,theta}(z): the (n-1)-volume of the slice
/// K /\ {theta^perp + z theta}, by polar integration about the slice center
/// with per-ray bisection of the membership test. Defined for slice centers
/// inside the body (z < rho(theta)); returns 0 otherwise.
pub fn parallel_section(
    k: &StarBody,
    theta: &UnitVector,
    z: f64,
    angular_resolution: usize,
) -> Result<f64> {
    let n = k.n();
    if z < 0.0 {
        return Err(GtomoError::InvalidParameter(format!(
            "z must be nonnegative, got {z}"
        )));
    }
    if z >= k.rho(theta) {
        return Ok(0.0);
    }
    let basis = orthonormal_complement(theta);
    let center: Vec<f64> = theta.coords().iter().map(|c| c * z).collect();
    let reach = 2.0 * (k.circumscribed_radius() + z);
    match n {
        2 => {
            let dir = &basis[0];
            let r_plus = ray_exit(k, &center, dir, reach)?;
            let neg: Vec<f64> = dir.iter().map(|c| -c).collect();
            let r_minus = ray_exit(k, &center, &neg, reach)?;
            Ok(r_plus + r_minus)
        }
        3 => {
            let (a, b) = (&basis[0], &basis[1]);
            let m = angular_resolution;
            let mut acc = 0.0;
            let mut dir = vec![0.0; 3];
            for j in 0..m {
                let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let (s, c) = t.sin_cos();
                for i in 0..3 {
                    dir[i] = c * a[i] + s * b[i];
                }
                let r = ray_exit(k, &center, &dir, reach)?;
                acc += r * r;
            }
            Ok(acc * std::f64::consts::PI / m as f64)
        }
        n => Err(GtomoError::InvalidParameter(format!(
            "parallel sections implemented for n in {{2, 3}}, got {n}"
        ))),
    }
}

/// Distance along `dir` from `center` (inside K) to the boundary, by
/// bisection of the membership test to 1e-10 in the radial parameter.
fn ray_exit(k: &StarBody, center: &[f64], dir: &[f64], reach: f64) -> Result<f64> {
    let point = |r: f64| -> Vec<f64> {
        center
            .iter()
            .zip(dir)
            .map(|(c, d)| c + r * d)
            .collect::<Vec<f64>>()
    };
    if k.contains(&point(reach)) {
        return Err(GtomoError::RayNeverExits);
    }
    let (mut lo, mut hi) = (0.0, reach);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if k.contains(&point(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Fractional derivative of the parallel section function at zero for
/// q in (-1, 1), q != 0:
///
///   A^{(q)}(0) = ( J + A(0) rho^{-q} / (-q) ) / Gamma(-q),
///   J = integral_0^rho t^{-1-q} (A(t) - A(0)) dt,
///
/// which realizes the regularized pairing with t_+^{-1-q}/Gamma(-q) in both
/// half-ranges (the tail beyond the support is integrated analytically).
pub fn frac_derivative(
    k: &StarBody,
    theta: &UnitVector,
    q: f64,
    angular_resolution: usize,
) -> Result<f64> {
    if !(-1.0..1.0).contains(&q) || q == 0.0 {
        return Err(GtomoError::OrderOutOfRange {
            q,
            lo: -1.0,
            hi: 1.0,
        });
    }
    let rho = k.rho(theta);
    let a0 = section_area(k, theta, angular_resolution.max(64))?;
    // Substitution t = rho u^2 tames the endpoint weight t^{-1-q}.
    let (x, w) = gauss_legendre(96)?;
    let mut j_int = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let u = 0.5 * (xi + 1.0);
        let t = rho * u * u;
        if t <= 0.0 {
            continue;
        }
        let a = parallel_section(k, theta, t, angular_resolution)?;
        j_int += 0.5 * wi * t.powf(-1.0 - q) * (a - a0) * 2.0 * rho * u;
    }
    Ok((j_int + a0 * rho.powf(-q) / (-q)) / gamma(-q))
}

/// Haar moment E[rho^{n+p}] of the radial function.
pub fn radial_moment(k: &StarBody, p: f64, integrator: &Integrator) -> Result<Estimate> {
    let n = k.n();
    if n as f64 + p <= 0.0 {
        return Err(GtomoError::InvalidParameter(format!(
            "n + p must be positive, got {}",
            n as f64 + p
        )));
    }
    integrator.mean(n, |u| k.rho(u).powf(n as f64 + p))
}

/// Perimeter of a planar convex body by the Cauchy formula: the integral
/// of the support function over the full circle.
pub fn perimeter_2d(support: &SupportBody2D, resolution: usize) -> f64 {
    let m = resolution;
    let mut acc = 0.0;
    for j in 0..m {
        let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        acc += support.h(t);
    }
    acc * 2.0 * std::f64::consts::PI / m as f64
}

/// Isotropic constant estimate L_K = det(Cov)^{1/(2n)} / |K|^{1/n} with the
/// covariance of the uniform measure on K estimated by rejection sampling
/// inside the circumscribed ball.
pub fn isotropic_constant_estimate(k: &StarBody, samples: usize, seed: u64) -> Result<f64> {
    let n = k.n();
    let radius = k.circumscribed_radius();
    let mut rng = substream(seed, 0x150c);
    let mut accepted = 0usize;
    let mut tried = 0usize;
    let mut mean = vec![0.0; n];
    let mut cov = vec![vec![0.0; n]; n];
    let mut point = vec![0.0; n];
    while accepted < samples {
        tried += 1;
        if tried > 10_000 * samples.max(1) {
            return Err(GtomoError::RejectionTooThin);
        }
        // Uniform point of the ball of the circumscribed radius.
        let mut norm_sq = 0.0;
        for p in point.iter_mut() {
            let g: f64 = rng.sample(StandardNormal);
            *p = g;
            norm_sq += g * g;
        }
        let norm = norm_sq.sqrt();
        if norm < 1e-12 {
            continue;
        }
        let u: f64 = rng.gen::<f64>();
        let r = radius * u.powf(1.0 / n as f64);
        for p in point.iter_mut() {
            *p *= r / norm;
        }
        if !k.contains(&point) {
            // Abort early once the acceptance rate is hopeless.
            if tried >= 100_000 && (accepted as f64) < 1e-4 * tried as f64 {
                return Err(GtomoError::RejectionTooThin);
            }
            continue;
        }
        accepted += 1;
        for i in 0..n {
            mean[i] += point[i];
            for j in 0..n {
                cov[i][j] += point[i] * point[j];
            }
        }
    }
    let count = accepted as f64;
    for m in &mut mean {
        *m /= count;
    }
    for i in 0..n {
        for j in 0..n {
            cov[i][j] = cov[i][j] / count - mean[i] * mean[j];
        }
    }
    let det = sym_determinant(&cov);
    let grid_res = if n <= 3 { 512 } else { 0 };
    let integrator = if n <= 3 {
        Integrator::grid(n, grid_res)?
    } else {
        Integrator::monte_carlo(200_000, seed ^ 0x9e37)
    };
    let vol = volume(k, &integrator)?.value;
    Ok(det.powf(1.0 / (2.0 * n as f64)) / vol.powf(1.0 / n as f64))
}

#[allow(clippy::needless_range_loop)]
fn sym_determinant(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-300 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}
