//! Sampling and quadrature on spheres, great subspheres, and Grassmannians,
//! plus the s/u/v split of the sphere against a distinguished 2-plane.
//!
//! All randomness flows from a single 64-bit master seed through ChaCha
//! streams (`substream`), so every operation is independently reproducible
//! and Monte Carlo loops can be partitioned without changing results.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GtomoError, Result};
use crate::special::{gauss_legendre, sphere_surface};

/// Norm tolerance enforced on unit vectors.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// A point of S^{n-1}, stored as its ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Wraps coordinates that must already have unit norm.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = norm(&coords);
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(GtomoError::InvalidParameter(format!(
                "unit vector has norm {norm}"
            )));
        }
        Ok(UnitVector(coords))
    }

    /// Normalizes arbitrary nonzero coordinates onto the sphere.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        let norm = norm(&coords);
        if norm < 1e-300 {
            return Err(GtomoError::InvalidParameter(
                "cannot normalize the zero vector".into(),
            ));
        }
        for c in &mut coords {
            *c /= norm;
        }
        Ok(UnitVector(coords))
    }

    /// Standard basis vector e_i in R^n.
    pub fn axis(n: usize, i: usize) -> Self {
        let mut c = vec![0.0; n];
        c[i] = 1.0;
        UnitVector(c)
    }

    /// Point of S^1 at the given angle against e_1.
    pub fn from_angle(angle: f64) -> Self {
        UnitVector(vec![angle.cos(), angle.sin()])
    }

    pub(crate) fn from_normalized_unchecked(coords: Vec<f64>) -> Self {
        UnitVector(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn negated(&self) -> UnitVector {
        UnitVector(self.0.iter().map(|c| -c).collect())
    }

    /// Angle against e_1 for a point of S^1, in [0, 2*pi).
    pub fn angle(&self) -> f64 {
        debug_assert_eq!(self.dim(), 2);
        let a = self.0[1].atan2(self.0[0]);
        if a < 0.0 {
            a + 2.0 * std::f64::consts::PI
        } else {
            a
        }
    }
}

impl std::ops::Deref for UnitVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Deterministic substream of a master seed; `tag` identifies the consumer.
pub fn substream(master_seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(tag);
    rng
}

/// Quadrature nodes and weights on a sphere (or subsphere).
///
/// `total_weight` is 1 for probability grids realizing the Haar measure and
/// the subsphere surface area |S^{n-2}| for great-subsphere grids.
/// `exact_degree` is the polynomial degree through which the rule is exact,
/// when the construction guarantees one.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    nodes: Vec<UnitVector>,
    weights: Vec<f64>,
    total_weight: f64,
    exact_degree: Option<usize>,
}

impl QuadratureGrid {
    pub fn nodes(&self) -> &[UnitVector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn exact_degree(&self) -> Option<usize> {
        self.exact_degree
    }

    /// Weighted sum of `f` over the nodes (not normalized).
    pub fn integrate(&self, mut f: impl FnMut(&UnitVector) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| w * f(u))
            .sum()
    }

    /// Average of `f` against the grid's probability normalization.
    pub fn mean(&self, f: impl FnMut(&UnitVector) -> f64) -> f64 {
        self.integrate(f) / self.total_weight
    }
}

/// An element of Gr(n, k): an orthonormal k-frame spanning the subspace.
#[derive(Debug, Clone)]
pub struct Subspace {
    frame: Vec<Vec<f64>>,
    n: usize,
    k: usize,
}

impl Subspace {
    pub fn new(frame: Vec<Vec<f64>>) -> Result<Self> {
        if frame.is_empty() {
            return Err(GtomoError::InvalidParameter("empty frame".into()));
        }
        let n = frame[0].len();
        let k = frame.len();
        let s = Subspace { frame, n, k };
        let gram_err = s.gram_error();
        if gram_err > 1e-10 {
            return Err(GtomoError::InvalidParameter(format!(
                "frame is not orthonormal (Gram error {gram_err:.3e})"
            )));
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn frame(&self) -> &[Vec<f64>] {
        &self.frame
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.k {
            for j in 0..self.k {
                let g = dot(&self.frame[i], &self.frame[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    /// Applies an n x n rotation matrix to every frame vector.
    pub fn rotated(&self, rot: &[Vec<f64>]) -> Subspace {
        let frame = self
            .frame
            .iter()
            .map(|v| rot.iter().map(|row| dot(row, v)).collect())
            .collect();
        Subspace {
            frame,
            n: self.n,
            k: self.k,
        }
    }
}

/// Decomposition theta = s*u + sqrt(1-s^2)*v against the plane span{e1, e2},
/// with u in the plane, v in the complement, and ubar the angle of u.
#[derive(Debug, Clone)]
pub struct SplitDecomposition {
    pub s: f64,
    pub u: UnitVector,
    pub v: UnitVector,
    pub ubar: f64,
}

impl SplitDecomposition {
    /// Rebuilds the ambient unit vector in R^n.
    pub fn reconstruct(&self, n: usize) -> UnitVector {
        let mut coords = vec![0.0; n];
        let c = (1.0 - self.s * self.s).max(0.0).sqrt();
        coords[0] = self.s * self.u[0];
        coords[1] = self.s * self.u[1];
        for (i, vi) in self.v.coords().iter().enumerate() {
            coords[2 + i] = c * vi;
        }
        UnitVector::from_normalized_unchecked(coords)
    }
}

/// I.i.d. Haar-uniform points of S^{n-1} from normalized Gaussians.
pub fn sample_sphere(n: usize, count: usize, seed: u64) -> Result<Vec<UnitVector>> {
    if n < 2 {
        return Err(GtomoError::DimensionTooSmall { min: 2, got: n });
    }
    let mut rng = substream(seed, 0x5f3e);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let coords: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = UnitVector::normalized(coords) {
            out.push(u);
        }
    }
    Ok(out)
}

/// Deterministic probability grid on S^{n-1}, n in {2, 3}.
///
/// n = 2: uniform angles with equal weights. n = 3: Gauss-Legendre in the
/// polar cosine times a uniform azimuth with twice as many points.
pub fn quadrature_grid(n: usize, resolution: usize) -> Result<QuadratureGrid> {
    if resolution < 8 {
        return Err(GtomoError::InvalidParameter(format!(
            "grid resolution must be at least 8, got {resolution}"
        )));
    }
    match n {
        2 => Ok(circle_grid(resolution)),
        3 => sphere_product_grid(resolution, 2 * resolution),
        n => Err(GtomoError::NoDeterministicGrid { n }),
    }
}

/// Uniform angular grid on S^1 with equal probability weights.
pub fn circle_grid(resolution: usize) -> QuadratureGrid {
    let m = resolution;
    let w = 1.0 / m as f64;
    let nodes = (0..m)
        .map(|j| UnitVector::from_angle(2.0 * std::f64::consts::PI * j as f64 / m as f64))
        .collect();
    QuadratureGrid {
        nodes,
        weights: vec![w; m],
        total_weight: 1.0,
        exact_degree: Some(m - 1),
    }
}

/// Product probability grid on S^2 with explicit polar and azimuth counts.
pub fn sphere_product_grid(polar: usize, azimuth: usize) -> Result<QuadratureGrid> {
    let (x, wx) = gauss_legendre(polar)?;
    let mut nodes = Vec::with_capacity(polar * azimuth);
    let mut weights = Vec::with_capacity(polar * azimuth);
    let wpsi = 1.0 / azimuth as f64;
    for (c, wc) in x.iter().zip(&wx) {
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..azimuth {
            let psi = 2.0 * std::f64::consts::PI * j as f64 / azimuth as f64;
            nodes.push(UnitVector::from_normalized_unchecked(vec![
                s * psi.cos(),
                s * psi.sin(),
                *c,
            ]));
            weights.push(0.5 * wc * wpsi);
        }
    }
    Ok(QuadratureGrid {
        nodes,
        weights,
        total_weight: 1.0,
        exact_degree: Some((2 * polar - 1).min(azimuth - 1)),
    })
}

/// Completes `theta` to an orthonormal basis of theta^perp.
///
/// Deterministic: seeds Gram-Schmidt with the standard basis vectors least
/// aligned with theta, then re-orthogonalizes once for 1e-14 residuals.
pub fn orthonormal_complement(theta: &UnitVector) -> Vec<Vec<f64>> {
    let n = theta.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| theta[a].abs().partial_cmp(&theta[b].abs()).unwrap());
    let mut basis: Vec<Vec<f64>> = vec![theta.coords().to_vec()];
    for &i in &order {
        if basis.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for _ in 0..2 {
            let coeffs: Vec<f64> = basis.iter().map(|b| dot(b, &v)).collect();
            for (b, c) in basis.iter().zip(&coeffs) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            for vi in &mut v {
                *vi /= nv;
            }
            basis.push(v);
        }
    }
    basis.remove(0);
    basis
}

/// Quadrature on the great subsphere S^{n-1} /\ theta^perp carrying the
/// unnormalized surface measure: weights sum to |S^{n-2}|.
pub fn subsphere_grid(theta: &UnitVector, resolution: usize) -> Result<QuadratureGrid> {
    let n = theta.dim();
    if n == 2 {
        return Err(GtomoError::SubsphereDegenerate);
    }
    if resolution < 8 {
        return Err(GtomoError::InvalidParameter(format!(
            "subsphere resolution must be at least 8, got {resolution}"
        )));
    }
    let basis = orthonormal_complement(theta);
    match n {
        3 => {
            let (a, b) = (&basis[0], &basis[1]);
            let m = resolution;
            let w = 2.0 * std::f64::consts::PI / m as f64;
            let mut nodes = Vec::with_capacity(m);
            for j in 0..m {
                let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                let (ct, st) = (t.cos(), t.sin());
                let coords = (0..3).map(|i| ct * a[i] + st * b[i]).collect();
                nodes.push(UnitVector::from_normalized_unchecked(coords));
            }
            Ok(QuadratureGrid {
                nodes,
                weights: vec![w; m],
                total_weight: 2.0 * std::f64::consts::PI,
                exact_degree: Some(m - 1),
            })
        }
        4 => {
            // The subsphere is an S^2 spanned by the complement basis.
            let inner = sphere_product_grid(resolution, 2 * resolution)?;
            let total = sphere_surface(3);
            let nodes = inner
                .nodes
                .iter()
                .map(|p| {
                    let coords = (0..4)
                        .map(|i| p[0] * basis[0][i] + p[1] * basis[1][i] + p[2] * basis[2][i])
                        .collect();
                    UnitVector::from_normalized_unchecked(coords)
                })
                .collect();
            let weights = inner.weights.iter().map(|w| w * total).collect();
            Ok(QuadratureGrid {
                nodes,
                weights,
                total_weight: total,
                exact_degree: inner.exact_degree,
            })
        }
        n => Err(GtomoError::SubsphereUnsupported { n }),
    }
}

/// Haar-distributed k-dimensional subspaces of R^n: Gram-Schmidt applied to
/// k i.i.d. Gaussian vectors.
pub fn sample_grassmannian(n: usize, k: usize, count: usize, seed: u64) -> Result<Vec<Subspace>> {
    if n < 2 {
        return Err(GtomoError::DimensionTooSmall { min: 2, got: n });
    }
    if k < 1 || k > n - 1 {
        return Err(GtomoError::SubspaceDimension { n, k, max: n - 1 });
    }
    let mut rng = substream(seed, 0x96a5);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        if let Some(frame) = gaussian_frame(n, k, &mut rng) {
            out.push(Subspace { frame, n, k });
        }
    }
    Ok(out)
}

fn gaussian_frame(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Option<Vec<Vec<f64>>> {
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            let coeffs: Vec<f64> = frame.iter().map(|b| dot(b, &v)).collect();
            for (b, c) in frame.iter().zip(&coeffs) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let nv = norm(&v);
        if nv < 1e-10 {
            return None;
        }
        for vi in &mut v {
            *vi /= nv;
        }
        frame.push(v);
    }
    Some(frame)
}

/// Haar-distributed rotation of R^n (Gram-Schmidt of a Gaussian matrix with
/// a determinant fix into SO(n)).
pub fn random_rotation(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = substream(seed, 0x0707);
    let frame = loop {
        if let Some(f) = gaussian_frame(n, n, &mut rng) {
            break f;
        }
    };
    let mut rot = frame;
    if determinant(&rot) < 0.0 {
        for x in &mut rot[0] {
            *x = -*x;
        }
    }
    // Rows act as the matrix: (R v)_i = <row_i, v>.
    rot
}

#[allow(clippy::needless_range_loop)]
fn determinant(m: &[Vec<f64>]) -> f64 {
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

/// Splits theta in S^{n-1}, n >= 3, against the distinguished plane
/// span{e1, e2}. Degenerate projections fall back to canonical axes: u = e1
/// when s = 0 and v = e3 (first complement axis) when s = 1.
pub fn split(theta: &UnitVector) -> Result<SplitDecomposition> {
    let n = theta.dim();
    if n < 3 {
        return Err(GtomoError::DimensionTooSmall { min: 3, got: n });
    }
    let sp = (theta[0] * theta[0] + theta[1] * theta[1]).sqrt();
    let comp = &theta[2..];
    let cn = norm(comp);
    let u = if sp > 0.0 {
        UnitVector::from_normalized_unchecked(vec![theta[0] / sp, theta[1] / sp])
    } else {
        UnitVector::axis(2, 0)
    };
    let v = if cn > 0.0 {
        UnitVector::from_normalized_unchecked(comp.iter().map(|c| c / cn).collect())
    } else {
        UnitVector::axis(n - 2, 0)
    };
    let ubar = u.angle();
    Ok(SplitDecomposition {
        s: sp.min(1.0),
        u,
        v,
        ubar,
    })
}

/// Density of the s-marginal of Haar measure under `split`:
/// g(s) = |S^1| |S^{n-3}| |S^{n-1}|^{-1} s (1 - s^2)^{(n-4)/2}, n >= 4.
///
/// For n = 3 the complement sphere degenerates to two points and the density
/// is singular at s = 1; sample s directly there instead.
pub fn split_density(n: usize, s: f64) -> Result<f64> {
    if n < 4 {
        return Err(GtomoError::DimensionTooSmall { min: 4, got: n });
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(GtomoError::InvalidParameter(format!(
            "s = {s} outside [0, 1]"
        )));
    }
    let c = sphere_surface(2) * sphere_surface(n - 2) / sphere_surface(n);
    Ok(c * s * (1.0 - s * s).powf((n as f64 - 4.0) / 2.0))
}

/// Distance data of a subspace to the plane span{e1, e2}: the pair
/// (s_H, u_H) entering the closed-form k-section formulas.
///
/// s_H is the sine of the largest principal angle between H and the plane;
/// u_H is the in-plane unit vector orthogonal to the in-plane direction
/// closest to H. For hyperplanes H = theta^perp this reduces to the split of
/// the normal: s_H = |P theta| and u_H parallel to P theta.
pub fn subspace_plane_distance(h: &Subspace) -> (f64, UnitVector) {
    // M = A A^T for the 2 x k matrix A of in-plane rows of the frame.
    let mut m = [[0.0_f64; 2]; 2];
    for v in h.frame() {
        m[0][0] += v[0] * v[0];
        m[0][1] += v[0] * v[1];
        m[1][1] += v[1] * v[1];
    }
    m[1][0] = m[0][1];
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let lam_min = (tr / 2.0 - disc).clamp(0.0, 1.0);
    let s = (1.0 - lam_min).clamp(0.0, 1.0).sqrt();
    // Eigenvector for the smaller eigenvalue; canonical e1 when M is scalar.
    let (ex, ey) = if m[0][1].abs() > 1e-14 {
        (m[0][1], lam_min - m[0][0])
    } else if m[0][0] <= m[1][1] {
        (1.0, 0.0)
    } else {
        (0.0, 1.0)
    };
    let u = UnitVector::normalized(vec![ex, ey]).unwrap_or_else(|_| UnitVector::axis(2, 0));
    (s, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sample_sphere_rejects_small_dimension() {
        assert!(sample_sphere(1, 10, 0).is_err());
    }

    #[test]
    fn sample_sphere_norms_and_symmetry() {
        let pts = sample_sphere(2, 1000, 11).unwrap();
        for p in &pts {
            assert!((norm(p.coords()) - 1.0).abs() <= 1e-12);
        }
        let pts = sample_sphere(3, 100_000, 7).unwrap();
        let count = pts.len() as f64;
        for i in 0..3 {
            let mean: f64 = pts.iter().map(|p| p[i]).sum::<f64>() / count;
            assert!(mean.abs() < 3.0 / count.sqrt(), "coordinate {i} mean {mean}");
        }
        let m2: f64 = pts.iter().map(|p| p[0] * p[0]).sum::<f64>() / count;
        assert!((m2 - 1.0 / 3.0).abs() < 0.005, "x1^2 mean {m2}");
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = sample_sphere(3, 10, 42).unwrap();
        let b = sample_sphere(3, 10, 42).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.coords(), y.coords());
        }
    }

    #[test]
    fn circle_grid_weights_and_moments() {
        let g = quadrature_grid(2, 256).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_relative_eq!(g.mean(|u| u[0] * u[0]), 0.5, epsilon = 1e-12);
        assert!(g.mean(|u| u[0]).abs() < 1e-12);
    }

    #[test]
    fn sphere_grid_moments() {
        let g = quadrature_grid(3, 64).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!((g.mean(|u| u[2] * u[2]) - 1.0 / 3.0).abs() < 1e-10);
        // Degree-2 harmonics have zero mean.
        assert!(g.mean(|u| crate::special::legendre_p(2, u[2])).abs() < 1e-10);
        assert!(g.mean(|u| u[0] * u[1] * u[2]).abs() < 1e-12);
    }

    #[test]
    fn unsupported_grid_dimension() {
        match quadrature_grid(4, 32) {
            Err(GtomoError::NoDeterministicGrid { n: 4 }) => {}
            other => panic!("expected NoDeterministicGrid, got {other:?}"),
        }
    }

    #[test]
    fn subsphere_equator() {
        let e3 = UnitVector::axis(3, 2);
        let g = subsphere_grid(&e3, 128).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 2.0 * std::f64::consts::PI).abs() < 1e-10);
        for node in g.nodes() {
            assert!(node[2].abs() < 1e-12);
        }
        // Constant function integrates to the circumference.
        assert_relative_eq!(
            g.integrate(|_| 1.0),
            2.0 * std::f64::consts::PI,
            epsilon = 1e-10
        );
    }

    #[test]
    fn subsphere_dimension_four() {
        let theta = UnitVector::normalized(vec![0.3, -0.2, 0.9, 0.4]).unwrap();
        let g = subsphere_grid(&theta, 32).unwrap();
        let total: f64 = g.weights().iter().sum();
        assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-10);
        for node in g.nodes() {
            assert!(dot(node.coords(), theta.coords()).abs() < 1e-12);
            assert!((norm(node.coords()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn subsphere_degenerate_and_unsupported() {
        let e1 = UnitVector::axis(2, 0);
        assert!(matches!(
            subsphere_grid(&e1, 64),
            Err(GtomoError::SubsphereDegenerate)
        ));
        let e1 = UnitVector::axis(5, 0);
        assert!(matches!(
            subsphere_grid(&e1, 64),
            Err(GtomoError::SubsphereUnsupported { n: 5 })
        ));
    }

    #[test]
    fn grassmannian_frames_are_orthonormal() {
        let subs = sample_grassmannian(4, 2, 2000, 1).unwrap();
        for s in &subs {
            assert!(s.gram_error() < 1e-10);
        }
        assert!(sample_grassmannian(4, 0, 1, 1).is_err());
        assert!(sample_grassmannian(4, 4, 1, 1).is_err());
    }

    #[test]
    fn hyperplanes_meet_the_plane_in_a_line() {
        // For k = n-1 the intersection with span{e1, e2} is one-dimensional
        // almost surely: the top principal cosine is 1, the second is not.
        let subs = sample_grassmannian(4, 3, 2000, 6).unwrap();
        let mut off_dimension = 0usize;
        for h in &subs {
            let mut m = [[0.0_f64; 2]; 2];
            for v in h.frame() {
                m[0][0] += v[0] * v[0];
                m[0][1] += v[0] * v[1];
                m[1][1] += v[1] * v[1];
            }
            let tr = m[0][0] + m[1][1];
            let det = m[0][0] * m[1][1] - m[0][1] * m[0][1];
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            let (top, second) = (tr / 2.0 + disc, tr / 2.0 - disc);
            if (top - 1.0).abs() > 1e-9 || second > 1.0 - 1e-9 {
                off_dimension += 1;
            }
        }
        assert_eq!(off_dimension, 0);
    }

    #[test]
    fn resolution_floors_are_enforced() {
        assert!(quadrature_grid(2, 4).is_err());
        assert!(quadrature_grid(3, 7).is_err());
        let e3 = UnitVector::axis(3, 2);
        assert!(subsphere_grid(&e3, 4).is_err());
    }

    #[test]
    fn split_examples() {
        let e1 = UnitVector::axis(3, 0);
        let d = split(&e1).unwrap();
        assert_relative_eq!(d.s, 1.0);
        assert_relative_eq!(d.u[0], 1.0);

        let e3 = UnitVector::axis(3, 2);
        let d = split(&e3).unwrap();
        assert_relative_eq!(d.s, 0.0);

        let theta = UnitVector::normalized(vec![1.0, 0.0, 1.0]).unwrap();
        let d = split(&theta).unwrap();
        assert_relative_eq!(d.s, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-14);
        assert_relative_eq!(d.ubar, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn split_reconstruction_identity() {
        for (i, theta) in sample_sphere(5, 10_000, 3).unwrap().iter().enumerate() {
            let d = split(theta).unwrap();
            let r = d.reconstruct(5);
            let err: f64 = r
                .coords()
                .iter()
                .zip(theta.coords())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-12, "sample {i}: reconstruction error {err}");
            assert!((norm(r.coords()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn split_density_closed_form() {
        // n = 4 reduces to g(s) = 2 s.
        assert_relative_eq!(split_density(4, 0.25).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(split_density(4, 1.0).unwrap(), 2.0, epsilon = 1e-12);
        assert!(split_density(4, 1.5).is_err());
        assert!(split_density(3, 0.5).is_err());
        // Integrates to one for each supported n. The substitution
        // s = sin(t) removes the half-integer endpoint singularity.
        let (x, w) = gauss_legendre(256).unwrap();
        for n in [4usize, 5, 6, 9] {
            let integral: f64 = x
                .iter()
                .zip(&w)
                .map(|(x, w)| {
                    let t = std::f64::consts::FRAC_PI_4 * (x + 1.0);
                    let s = t.sin();
                    std::f64::consts::FRAC_PI_4 * w * split_density(n, s).unwrap() * t.cos()
                })
                .sum();
            assert!(
                (integral - 1.0).abs() < 1e-10,
                "n = {n}: integral {integral}"
            );
        }
    }

    #[test]
    fn split_marginal_matches_density() {
        // Empirical CDF of s against the analytic CDF s^2 for n = 4.
        let pts = sample_sphere(4, 100_000, 19).unwrap();
        let mut s: Vec<f64> = pts.iter().map(|p| split(p).unwrap().s).collect();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = s.len() as f64;
        let mut ks: f64 = 0.0;
        for (i, si) in s.iter().enumerate() {
            let emp_hi = (i + 1) as f64 / n;
            let emp_lo = i as f64 / n;
            let model = si * si;
            ks = ks.max((emp_hi - model).abs()).max((emp_lo - model).abs());
        }
        assert!(ks < 0.02, "KS distance {ks}");
    }

    #[test]
    fn grassmannian_rotation_invariance() {
        let subs = sample_grassmannian(4, 2, 20_000, 5).unwrap();
        let rot = random_rotation(4, 77);
        let mut a: Vec<f64> = subs
            .iter()
            .map(|h| subspace_plane_distance(h).0)
            .collect();
        let mut b: Vec<f64> = subs
            .iter()
            .map(|h| subspace_plane_distance(&h.rotated(&rot)).0)
            .collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        // Two-sample KS over the merged jump set.
        let ks = two_sample_ks(&a, &b);
        assert!(ks < 0.02, "KS distance {ks}");
    }

    #[test]
    fn line_sampling_matches_sphere_sampling() {
        let lines = sample_grassmannian(3, 1, 10_000, 2).unwrap();
        let dirs = sample_sphere(3, 10_000, 23).unwrap();
        let mut a: Vec<f64> = lines.iter().map(|h| h.frame()[0][0].powi(2)).collect();
        let mut b: Vec<f64> = dirs.iter().map(|p| p[0] * p[0]).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let ks = two_sample_ks(&a, &b);
        assert!(ks < 0.02, "KS distance {ks}");
    }

    #[test]
    fn hyperplane_distance_reduces_to_normal_split() {
        for theta in sample_sphere(4, 200, 9).unwrap() {
            let basis = orthonormal_complement(&theta);
            let h = Subspace::new(basis).unwrap();
            let (s, u) = subspace_plane_distance(&h);
            let d = split(&theta).unwrap();
            assert!((s - d.s).abs() < 1e-10, "s {s} vs split {0}", d.s);
            if d.s > 1e-6 {
                // u_H is parallel to the in-plane part of the normal.
                let align = (u[0] * d.u[0] + u[1] * d.u[1]).abs();
                assert!(align > 1.0 - 1e-8, "alignment {align}");
            }
        }
    }

    fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
        let mut ks: f64 = 0.0;
        let (mut i, mut j) = (0usize, 0usize);
        let (na, nb) = (a.len() as f64, b.len() as f64);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            ks = ks.max((i as f64 / na - j as f64 / nb).abs());
        }
        ks
    }
}
