//! Empirical distribution functions of sectional and projection functionals
//! over Haar measure, with the survival convention S(t) = P(value >= t),
//! plus comparison primitives: Kolmogorov-Smirnov distance, dominance, and
//! moment sequences.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::body::{StarBody, SupportBody2D};
use crate::error::{GtomoError, Result};
use crate::functionals::{projection_length_2d, section_area, BoundaryMesh};
use crate::sphere::{
    quadrature_grid, sample_grassmannian, sample_sphere, subspace_plane_distance, QuadratureGrid,
    Subspace, UnitVector,
};

/// Provenance of an empirical distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CdfMeta {
    pub functional: String,
    pub body: String,
    pub sampler: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CdfMeta {
    pub fn new(functional: &str, body: &str, sampler: &str, seed: Option<u64>) -> Self {
        CdfMeta {
            functional: functional.into(),
            body: body.into(),
            sampler: sampler.into(),
            seed,
        }
    }
}

/// Weighted empirical distribution with survival-function evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    values: Vec<f64>,
    weights: Vec<f64>,
    /// suffix[i] = sum of weights[i..]; suffix[len] = 0.
    suffix: Vec<f64>,
    meta: CdfMeta,
}

impl EmpiricalCdf {
    pub fn from_weighted(values: Vec<f64>, weights: Vec<f64>, meta: CdfMeta) -> Result<Self> {
        if values.is_empty() || values.len() != weights.len() {
            return Err(GtomoError::EmptySamples);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GtomoError::InvalidParameter(
                "non-finite sample value".into(),
            ));
        }
        if weights.iter().any(|w| *w < 0.0) {
            return Err(GtomoError::InvalidParameter("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(GtomoError::InvalidParameter("zero total weight".into()));
        }
        // Already-normalized inputs pass through untouched so that a CSV
        // round trip reproduces the stored weights bit for bit.
        let renorm = (total - 1.0).abs() > 1e-12;
        let mut pairs: Vec<(f64, f64)> = values
            .into_iter()
            .zip(weights)
            .map(|(v, w)| (v, if renorm { w / total } else { w }))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let mut suffix = vec![0.0; values.len() + 1];
        for i in (0..values.len()).rev() {
            suffix[i] = suffix[i + 1] + weights[i];
        }
        // Pin survival(-inf) to exactly one against accumulation rounding.
        let grand = suffix[0];
        for s in &mut suffix {
            *s /= grand;
        }
        Ok(EmpiricalCdf {
            values,
            weights,
            suffix,
            meta,
        })
    }

    pub fn from_samples(values: Vec<f64>, meta: CdfMeta) -> Result<Self> {
        let w = 1.0 / values.len().max(1) as f64;
        let weights = vec![w; values.len()];
        EmpiricalCdf::from_weighted(values, weights, meta)
    }

    /// Distribution of `f` over the nodes of a probability grid.
    pub fn from_function_grid(
        f: impl FnMut(&UnitVector) -> f64,
        grid: &QuadratureGrid,
        meta: CdfMeta,
    ) -> Result<Self> {
        let values: Vec<f64> = grid.nodes().iter().map(f).collect();
        EmpiricalCdf::from_weighted(values, grid.weights().to_vec(), meta)
    }

    pub fn meta(&self) -> &CdfMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn support_width(&self) -> f64 {
        self.max() - self.min()
    }

    /// Survival S(t) = P(X >= t).
    pub fn survival(&self, t: f64) -> f64 {
        let idx = self.values.partition_point(|v| *v < t);
        self.suffix[idx]
    }

    /// Strict survival P(X > t).
    pub fn survival_above(&self, t: f64) -> f64 {
        let idx = self.values.partition_point(|v| *v <= t);
        self.suffix[idx]
    }

    /// Weighted mean of the samples.
    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum()
    }

    /// Moments integral_0^R t^m S(t) dt for m = 0..=m_max, by exact
    /// piecewise integration of the step survival function. Samples must
    /// not exceed R.
    pub fn moment_sequence(&self, m_max: usize, r: f64) -> Result<Vec<f64>> {
        if self.max() > r {
            return Err(GtomoError::SamplesExceedBound {
                bound: r,
                max: self.max(),
            });
        }
        let mut breaks: Vec<f64> = vec![0.0];
        for v in &self.values {
            if *v > 0.0 && *v < r && *breaks.last().unwrap() != *v {
                breaks.push(*v);
            }
        }
        breaks.push(r);
        let mut moments = vec![0.0; m_max + 1];
        for win in breaks.windows(2) {
            let (a, b) = (win[0], win[1]);
            if b <= a {
                continue;
            }
            let s = self.survival_above(a);
            if s == 0.0 {
                continue;
            }
            for (m, out) in moments.iter_mut().enumerate() {
                let p = (m + 1) as f64;
                *out += s * (b.powf(p) - a.powf(p)) / p;
            }
        }
        Ok(moments)
    }

    /// CSV serialization: a JSON metadata header line, then value,weight
    /// rows. Floating-point text is the shortest round-trip representation,
    /// so read-back is bit exact.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let meta = serde_json::to_string(&self.meta)
            .map_err(|e| GtomoError::Parse(format!("meta serialization: {e}")))?;
        writeln!(w, "# {meta}")?;
        writeln!(w, "value,weight")?;
        for (v, wt) in self.values.iter().zip(&self.weights) {
            writeln!(w, "{v},{wt}")?;
        }
        Ok(())
    }

    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let mut meta = CdfMeta::default();
        let mut values = Vec::new();
        let mut weights = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if i == 0 {
                let json = line
                    .strip_prefix("# ")
                    .ok_or_else(|| GtomoError::Parse("missing metadata header".into()))?;
                meta = serde_json::from_str(json)
                    .map_err(|e| GtomoError::Parse(format!("metadata: {e}")))?;
                continue;
            }
            if i == 1 {
                continue; // column header
            }
            if line.trim().is_empty() {
                continue;
            }
            let (v, w) = line
                .split_once(',')
                .ok_or_else(|| GtomoError::Parse(format!("bad CSV row '{line}'")))?;
            values.push(
                v.parse::<f64>()
                    .map_err(|e| GtomoError::Parse(format!("{e}")))?,
            );
            weights.push(
                w.parse::<f64>()
                    .map_err(|e| GtomoError::Parse(format!("{e}")))?,
            );
        }
        EmpiricalCdf::from_weighted(values, weights, meta)
    }

    /// Two-column plain text (t, survival) evaluated at the jump points,
    /// suitable for generic plotting tools.
    pub fn write_survival_curve(&self, mut w: impl Write) -> Result<()> {
        for v in &self.values {
            writeln!(w, "{v} {}", self.survival(*v))?;
        }
        Ok(())
    }
}

/// sup_t |S_F(t) - S_G(t)|, evaluated at the jump points of both CDFs from
/// both sides; equality of identical sample sets is exact.
pub fn ks_distance(f: &EmpiricalCdf, g: &EmpiricalCdf) -> f64 {
    let mut sup: f64 = 0.0;
    for v in f.values().iter().chain(g.values()) {
        sup = sup.max((f.survival(*v) - g.survival(*v)).abs());
        sup = sup.max((f.survival_above(*v) - g.survival_above(*v)).abs());
    }
    sup
}

/// True when S_F(t) <= S_G(t) + tol at every jump point of either CDF.
pub fn dominates(f: &EmpiricalCdf, g: &EmpiricalCdf, tol: f64) -> bool {
    for v in f.values().iter().chain(g.values()) {
        if f.survival(*v) > g.survival(*v) + tol {
            return false;
        }
        if f.survival_above(*v) > g.survival_above(*v) + tol {
            return false;
        }
    }
    true
}

/// Direction source for the distribution constructors: deterministic grids
/// wherever possible, otherwise seeded Haar Monte Carlo.
#[derive(Debug, Clone)]
pub enum DirectionSampler {
    Grid { resolution: usize },
    MonteCarlo { count: usize, seed: u64 },
}

impl DirectionSampler {
    pub fn describe(&self) -> String {
        match self {
            DirectionSampler::Grid { resolution } => format!("grid res={resolution}"),
            DirectionSampler::MonteCarlo { count, seed } => format!("mc count={count} seed={seed}"),
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            DirectionSampler::Grid { .. } => None,
            DirectionSampler::MonteCarlo { seed, .. } => Some(*seed),
        }
    }

    fn realize(&self, n: usize) -> Result<(Vec<UnitVector>, Vec<f64>)> {
        match self {
            DirectionSampler::Grid { resolution } => {
                let g = quadrature_grid(n, *resolution)?;
                Ok((g.nodes().to_vec(), g.weights().to_vec()))
            }
            DirectionSampler::MonteCarlo { count, seed } => {
                let pts = sample_sphere(n, *count, *seed)?;
                let w = 1.0 / *count as f64;
                let weights = vec![w; pts.len()];
                Ok((pts, weights))
            }
        }
    }
}

/// Distribution of an arbitrary directional functional over Haar measure.
pub fn distribution_of(
    n: usize,
    f: impl FnMut(&UnitVector) -> f64,
    sampler: &DirectionSampler,
    meta: CdfMeta,
) -> Result<EmpiricalCdf> {
    let (dirs, weights) = sampler.realize(n)?;
    let values = dirs.iter().map(f).collect();
    EmpiricalCdf::from_weighted(values, weights, meta)
}

/// Distribution of central hyperplane section areas, S_K.
pub fn section_distribution(
    k: &StarBody,
    sampler: &DirectionSampler,
    section_resolution: usize,
) -> Result<EmpiricalCdf> {
    let meta = CdfMeta::new(
        "section_area",
        k.label(),
        &sampler.describe(),
        sampler.seed(),
    );
    distribution_of(
        k.n(),
        |u| section_area(k, u, section_resolution).expect("section quadrature"),
        sampler,
        meta,
    )
}

/// Distribution of projection (shadow) areas, Pi_K. Planar bodies go
/// through the support function, 3-dimensional ones through a boundary
/// mesh built once per call.
pub fn projection_distribution(
    k: &StarBody,
    sampler: &DirectionSampler,
    mesh_resolution: usize,
) -> Result<EmpiricalCdf> {
    let meta = CdfMeta::new(
        "shadow_area",
        k.label(),
        &sampler.describe(),
        sampler.seed(),
    );
    match k.n() {
        2 => {
            let support = SupportBody2D::from_star_body(k, 4096)?;
            distribution_of(2, |u| projection_length_2d(&support, u), sampler, meta)
        }
        3 => {
            let report = crate::body::convexity_check(k)?;
            if !report.convex {
                return Err(GtomoError::NotConvex {
                    margin: report.min_margin,
                    location: report.location,
                });
            }
            let fine = BoundaryMesh::build(k, mesh_resolution, 2 * mesh_resolution)?;
            let coarse = BoundaryMesh::build(k, mesh_resolution / 2, mesh_resolution)?;
            distribution_of(
                3,
                |u| {
                    let f = fine.shadow_area(u);
                    let c = coarse.shadow_area(u);
                    (4.0 * f - c) / 3.0
                },
                sampler,
                meta,
            )
        }
        n => Err(GtomoError::InvalidParameter(format!(
            "projection distributions implemented for n in {{2, 3}}, got {n}"
        ))),
    }
}

/// Distribution of |K /\ H| over Haar k-dimensional subspaces. Hyperplane
/// sections (k = n - 1) go through the direction sampler and the great
/// subsphere quadrature; lower-dimensional sections with k in {2, 3} are
/// integrated inside Haar-sampled subspaces. The rotationally invariant
/// constructions additionally admit the closed form in
/// [`k_section_distribution_closed_form`].
pub fn k_section_distribution(
    k_body: &StarBody,
    k: usize,
    sampler: &DirectionSampler,
    section_resolution: usize,
) -> Result<EmpiricalCdf> {
    let n = k_body.n();
    if k < 2 || k > n - 1 {
        return Err(GtomoError::SubspaceDimension { n, k, max: n - 1 });
    }
    let meta = CdfMeta::new(
        &format!("k_section k={k}"),
        k_body.label(),
        &sampler.describe(),
        sampler.seed(),
    );
    if k == n - 1 {
        return distribution_of(
            n,
            |u| section_area(k_body, u, section_resolution).expect("section quadrature"),
            sampler,
            meta,
        );
    }
    let (count, seed) = match sampler {
        DirectionSampler::MonteCarlo { count, seed } => (*count, *seed),
        DirectionSampler::Grid { .. } => {
            return Err(GtomoError::InvalidParameter(format!(
                "k = {k} < n-1 sections have no deterministic subspace grid; \
                 use a Monte Carlo sampler"
            )))
        }
    };
    let subs = sample_grassmannian(n, k, count, seed)?;
    let values = subs
        .iter()
        .map(|h| crate::functionals::subspace_section_area(k_body, h, section_resolution))
        .collect::<Result<Vec<f64>>>()?;
    EmpiricalCdf::from_samples(values, meta)
}

/// Section value of the rotationally invariant construction seeded by a
/// planar body: |K /\ H| = (s_H^2 rho^{-2}(u_H) + 1 - s_H^2)^{-1/2} with
/// (s_H, u_H) the distance data of H to the distinguished plane.
pub fn rotinv_k_section_value(planar: &StarBody, h: &Subspace) -> f64 {
    let (s, u) = subspace_plane_distance(h);
    let r = planar.rho(&u);
    (s * s / (r * r) + 1.0 - s * s).sqrt().recip()
}

/// Distribution of the closed-form k-section values over Haar Gr(n, k).
pub fn k_section_distribution_closed_form(
    planar: &StarBody,
    n: usize,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<EmpiricalCdf> {
    if k < 2 || k > n - 1 {
        return Err(GtomoError::SubspaceDimension { n, k, max: n.saturating_sub(1) });
    }
    let subs = sample_grassmannian(n, k, count, seed)?;
    let values: Vec<f64> = subs.iter().map(|h| rotinv_k_section_value(planar, h)).collect();
    EmpiricalCdf::from_samples(
        values,
        CdfMeta::new(
            &format!("rotinv_k_section n={n} k={k}"),
            planar.label(),
            &format!("grassmannian mc count={count}"),
            Some(seed),
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{planar_seed, polar_2d, PlanarSeed};
    use approx::assert_relative_eq;

    const PI: f64 = std::f64::consts::PI;

    fn meta() -> CdfMeta {
        CdfMeta::new("test", "body", "sampler", None)
    }

    #[test]
    fn survival_invariants() {
        let cdf =
            EmpiricalCdf::from_samples(vec![2.0, 1.0, 1.0, 3.0], meta()).unwrap();
        assert_relative_eq!(cdf.survival(f64::NEG_INFINITY), 1.0);
        assert_relative_eq!(cdf.survival(0.5), 1.0);
        assert_relative_eq!(cdf.survival(1.0), 1.0);
        assert_relative_eq!(cdf.survival_above(1.0), 0.5);
        assert_relative_eq!(cdf.survival(2.5), 0.25);
        assert_relative_eq!(cdf.survival(10.0), 0.0);
        let total: f64 = cdf.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // Nonincreasing over a sweep.
        let mut last = f64::INFINITY;
        for i in 0..50 {
            let s = cdf.survival(i as f64 * 0.1);
            assert!(s <= last + 1e-15);
            last = s;
        }
    }

    #[test]
    fn ks_trivial_cases() {
        let f = EmpiricalCdf::from_samples(vec![1.0, 2.0, 3.0], meta()).unwrap();
        assert_eq!(ks_distance(&f, &f), 0.0);
        let p1 = EmpiricalCdf::from_samples(vec![1.0], meta()).unwrap();
        let p2 = EmpiricalCdf::from_samples(vec![2.0], meta()).unwrap();
        assert_relative_eq!(ks_distance(&p1, &p2), 1.0);
    }

    #[test]
    fn dominance_cases() {
        let f = EmpiricalCdf::from_samples(vec![1.0, 2.0], meta()).unwrap();
        assert!(dominates(&f, &f, 0.0));
        // Smaller ball sections are dominated by larger ones.
        let small = EmpiricalCdf::from_samples(vec![0.81 * PI], meta()).unwrap();
        let big = EmpiricalCdf::from_samples(vec![PI], meta()).unwrap();
        assert!(dominates(&small, &big, 0.0));
        assert!(!dominates(&big, &small, 0.0));
    }

    #[test]
    fn moments_of_point_mass() {
        let cdf = EmpiricalCdf::from_samples(vec![1.0], meta()).unwrap();
        let m = cdf.moment_sequence(5, 1.0).unwrap();
        for (i, v) in m.iter().enumerate() {
            assert_relative_eq!(*v, 1.0 / (i as f64 + 1.0), epsilon = 1e-14);
        }
        assert!(cdf.moment_sequence(2, 0.5).is_err());
    }

    #[test]
    fn moments_match_mean_power_identity() {
        // integral t^m S(t) dt = E[X^{m+1}]/(m+1) for nonnegative samples.
        let vals = vec![0.3, 0.7, 0.7, 1.1, 0.05];
        let cdf = EmpiricalCdf::from_samples(vals.clone(), meta()).unwrap();
        let m = cdf.moment_sequence(4, 2.0).unwrap();
        for (i, got) in m.iter().enumerate() {
            let p = (i + 1) as f64;
            let expect: f64 =
                vals.iter().map(|v| v.powf(p)).sum::<f64>() / vals.len() as f64 / p;
            assert_relative_eq!(*got, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn planar_pair_equal_distribution() {
        let e0 = planar_seed(PlanarSeed::E0, 0.1).unwrap();
        let k0 = planar_seed(PlanarSeed::K0, 0.1).unwrap();
        let sampler = DirectionSampler::Grid { resolution: 4096 };
        let de = distribution_of(2, |u| e0.rho(u), &sampler, meta()).unwrap();
        let dk = distribution_of(2, |u| k0.rho(u), &sampler, meta()).unwrap();
        let ks = ks_distance(&de, &dk);
        assert!(ks < 1e-3, "KS {ks}");
        // Equal distributions give equal moment sequences.
        let me = de.moment_sequence(10, 1.0).unwrap();
        let mk = dk.moment_sequence(10, 1.0).unwrap();
        for (a, b) in me.iter().zip(&mk) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
        // Dominance in both directions at the grid tolerance.
        assert!(dominates(&de, &dk, 1e-3));
        assert!(dominates(&dk, &de, 1e-3));
    }

    #[test]
    fn ball_section_distribution_is_a_step() {
        let ball = StarBody::ball(3, 1.0).unwrap();
        let cdf = section_distribution(
            &ball,
            &DirectionSampler::Grid { resolution: 32 },
            128,
        )
        .unwrap();
        assert!(cdf.support_width() < 1e-12);
        assert!((cdf.min() - PI).abs() < 1e-12);
    }

    #[test]
    fn planar_section_distribution_matches_radial() {
        // 1-dimensional sections are chords through the origin: rotating
        // the grid by a quarter turn maps one value multiset to the other.
        let k0 = planar_seed(PlanarSeed::K0, 0.1).unwrap();
        let sampler = DirectionSampler::Grid { resolution: 2048 };
        let sections = section_distribution(&k0, &sampler, 0).unwrap();
        let doubled = distribution_of(2, |u| 2.0 * k0.rho(u), &sampler, meta()).unwrap();
        for (a, b) in sections.values().iter().zip(doubled.values()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn projection_distribution_of_ball_and_polars() {
        let ball = StarBody::ball(3, 1.0).unwrap();
        let cdf = projection_distribution(
            &ball,
            &DirectionSampler::Grid { resolution: 16 },
            128,
        )
        .unwrap();
        assert!((cdf.mean() - PI).abs() < 1e-4, "mean {}", cdf.mean());
        assert!(cdf.support_width() < 1e-3, "width {}", cdf.support_width());

        // Polar pair: projection distributions coincide. The finer angular
        // grid keeps the tie-counting residual below the tolerance.
        let e0 = planar_seed(PlanarSeed::E0, 0.2).unwrap();
        let k0 = planar_seed(PlanarSeed::K0, 0.2).unwrap();
        let pe = polar_2d(&e0, 4096).unwrap();
        let pk = polar_2d(&k0, 4096).unwrap();
        let sampler = DirectionSampler::Grid { resolution: 8192 };
        let de = projection_distribution(&pe, &sampler, 0).unwrap();
        let dk = projection_distribution(&pk, &sampler, 0).unwrap();
        let ks = ks_distance(&de, &dk);
        assert!(ks < 1e-3, "KS {ks}");
    }

    #[test]
    fn scaling_covariance_of_sections() {
        let e = StarBody::ellipsoid(&[1.0, 0.8, 1.3]).unwrap();
        let scaled = e.scaled(1.5);
        let sampler = DirectionSampler::Grid { resolution: 24 };
        let base = section_distribution(&e, &sampler, 256).unwrap();
        let scl = section_distribution(&scaled, &sampler, 256).unwrap();
        let factor = 1.5_f64.powi(2);
        for (a, b) in base.values().iter().zip(scl.values()) {
            assert_relative_eq!(b, &(a * factor), max_relative = 1e-12);
        }
    }

    #[test]
    fn rotation_invariance_of_section_distribution() {
        // Generic orientations on both sides: a body whose section function
        // is constant along grid parallels would lump whole quadrature rows
        // onto single atoms and spoil the comparison artificially.
        let f = crate::body::SphereFunction::new(3, true, |u| {
            0.6 * 0.5 * (3.0 * u[2] * u[2] - 1.0) + 0.4 * (u[0] * u[0] - u[1] * u[1])
        });
        let base = crate::body::perturbation_body(&f, 0.08, 1.0).unwrap();
        let k = base.rotated(crate::sphere::random_rotation(3, 98));
        let kr = base.rotated(crate::sphere::random_rotation(3, 99));
        let grid = crate::sphere::sphere_product_grid(96, 4096).unwrap();
        let da = EmpiricalCdf::from_function_grid(
            |u| section_area(&k, u, 256).unwrap(),
            &grid,
            meta(),
        )
        .unwrap();
        let db = EmpiricalCdf::from_function_grid(
            |u| section_area(&kr, u, 256).unwrap(),
            &grid,
            meta(),
        )
        .unwrap();
        let ks = ks_distance(&da, &db);
        assert!(ks < 2e-3, "KS {ks}");
    }

    #[test]
    fn ball_k_sections_are_constant() {
        let ball = StarBody::ball(4, 1.0).unwrap();
        let mc = DirectionSampler::MonteCarlo {
            count: 200,
            seed: 3,
        };
        let cdf = k_section_distribution(&ball, 3, &mc, 64).unwrap();
        // 3-dimensional central sections of B^4 are unit balls.
        assert!(cdf.support_width() < 1e-10);
        assert_relative_eq!(cdf.min(), 4.0 * PI / 3.0, epsilon = 1e-9);

        // 2-plane sections are unit disks: a point mass at pi.
        let planes = k_section_distribution(&ball, 2, &mc, 128).unwrap();
        assert!(planes.support_width() < 1e-12);
        assert_relative_eq!(planes.min(), PI, epsilon = 1e-12);

        let closed = k_section_distribution_closed_form(
            &StarBody::ball(2, 1.0).unwrap(),
            4,
            2,
            500,
            9,
        )
        .unwrap();
        // Unit planar seed makes every closed-form value 1.
        assert!(closed.support_width() < 1e-12);
        assert_relative_eq!(closed.min(), 1.0, epsilon = 1e-12);

        // Low-dimensional sections need subspace sampling, not a grid.
        assert!(k_section_distribution(&ball, 2, &DirectionSampler::Grid { resolution: 8 }, 8)
            .is_err());
    }

    #[test]
    fn subspace_sections_match_hyperplane_route_in_3d() {
        // In dimension 3 a 2-plane is a hyperplane: both quadratures agree.
        let e = StarBody::ellipsoid(&[1.0, 0.8, 1.4]).unwrap();
        for theta in crate::sphere::sample_sphere(3, 16, 5).unwrap() {
            let basis = crate::sphere::orthonormal_complement(&theta);
            let h = crate::sphere::Subspace::new(basis).unwrap();
            let direct = crate::functionals::subspace_section_area(&e, &h, 512).unwrap();
            let hyper = section_area(&e, &theta, 512).unwrap();
            assert_relative_eq!(direct, hyper, max_relative = 1e-10);
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let e0 = planar_seed(PlanarSeed::E0, 0.17).unwrap();
        let cdf = distribution_of(
            2,
            |u| e0.rho(u),
            &DirectionSampler::Grid { resolution: 64 },
            CdfMeta::new("radial", "E0 eps=0.17", "grid res=64", Some(5)),
        )
        .unwrap();
        let mut buf = Vec::new();
        cdf.write_csv(&mut buf).unwrap();
        let back = EmpiricalCdf::read_csv(std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(cdf.meta(), back.meta());
        assert_eq!(cdf.values().len(), back.values().len());
        for (a, b) in cdf.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in cdf.weights().iter().zip(back.weights()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
