//! Spherical harmonic expansions on S^1 and S^2, Fourier multipliers of
//! homogeneous extensions, the spherical Radon transform (direct quadrature
//! and multiplier routes), and reconstruction of a body from a prescribed
//! intersection body.
//!
//! Multiplier normalization is anchored to the classical transforms of
//! |x|^{-q-1}: the degree-0 value reproduces R(1) = 2*pi on S^2 through the
//! Radon relation, and only magnitude ratios across degrees enter the
//! comparison arguments.

use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::body::{SphereFunction, StarBody};
use crate::error::{GtomoError, Result};
use crate::functionals::section_area;
use crate::special::{ln_gamma, normalized_assoc_legendre};
use crate::sphere::{subsphere_grid, QuadratureGrid, UnitVector};

/// Relative tolerance below which odd-degree content is treated as noise.
const ODD_CONTENT_TOL: f64 = 1e-8;

/// Degree-indexed coefficients of a sphere function over the real
/// orthonormal basis (with respect to the uniform probability measure).
///
/// n = 2 blocks: degree 0 holds `[c0]`; degree m holds `[cos, sin]`
/// coefficients of sqrt(2) cos(m u), sqrt(2) sin(m u).
/// n = 3 blocks: degree m holds 2m+1 entries ordered
/// `[j=0, cos 1, sin 1, cos 2, sin 2, ...]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicExpansion {
    n: usize,
    max_degree: usize,
    blocks: Vec<Vec<f64>>,
}

impl HarmonicExpansion {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn block_norm_sq(&self, m: usize) -> f64 {
        self.blocks[m].iter().map(|c| c * c).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        (0..=self.max_degree).map(|m| self.block_norm_sq(m)).sum()
    }

    /// Norm of the top two degree blocks; a proxy for the truncation error.
    pub fn tail_norm(&self) -> f64 {
        let mut acc = 0.0;
        for m in self.max_degree.saturating_sub(1)..=self.max_degree {
            acc += self.block_norm_sq(m);
        }
        acc.sqrt()
    }

    /// L2 norm of the odd-degree content.
    pub fn odd_norm(&self) -> f64 {
        (1..=self.max_degree)
            .step_by(2)
            .map(|m| self.block_norm_sq(m))
            .sum::<f64>()
            .sqrt()
    }

    /// Drops odd-degree blocks; errors when they carry material mass.
    pub fn into_even(mut self) -> Result<HarmonicExpansion> {
        let odd = self.odd_norm();
        let total = self.norm_sq().sqrt();
        if odd > ODD_CONTENT_TOL * total.max(1e-300) {
            return Err(GtomoError::OddContent { norm: odd });
        }
        for m in (1..=self.max_degree).step_by(2) {
            for c in &mut self.blocks[m] {
                *c = 0.0;
            }
        }
        Ok(self)
    }

    /// Applies a per-degree scalar multiplier.
    pub fn scale_degrees(&self, mut lambda: impl FnMut(usize) -> f64) -> HarmonicExpansion {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(m, b)| {
                let l = lambda(m);
                b.iter().map(|c| l * c).collect()
            })
            .collect();
        HarmonicExpansion {
            n: self.n,
            max_degree: self.max_degree,
            blocks,
        }
    }

    /// Point evaluation.
    pub fn evaluate(&self, u: &UnitVector) -> f64 {
        self.evaluate_coords(u.coords())
    }

    pub fn evaluate_coords(&self, coords: &[f64]) -> f64 {
        match self.n {
            2 => {
                let t = coords[1].atan2(coords[0]);
                let mut acc = self.blocks[0][0];
                let sqrt2 = std::f64::consts::SQRT_2;
                for m in 1..=self.max_degree {
                    let b = &self.blocks[m];
                    let (s, c) = (m as f64 * t).sin_cos();
                    acc += sqrt2 * (b[0] * c + b[1] * s);
                }
                acc
            }
            3 => {
                let cos_phi = coords[2].clamp(-1.0, 1.0);
                let psi = coords[1].atan2(coords[0]);
                let p = normalized_assoc_legendre(self.max_degree, cos_phi);
                let idx = |m: usize, j: usize| m * (m + 1) / 2 + j;
                let sqrt2 = std::f64::consts::SQRT_2;
                let mut acc = 0.0;
                for m in 0..=self.max_degree {
                    let b = &self.blocks[m];
                    acc += b[0] * p[idx(m, 0)];
                    for j in 1..=m {
                        let (s, c) = (j as f64 * psi).sin_cos();
                        let base = sqrt2 * p[idx(m, j)];
                        acc += base * (b[2 * j - 1] * c + b[2 * j] * s);
                    }
                }
                acc
            }
            _ => unreachable!("expansions exist only for n in {{2, 3}}"),
        }
    }

    /// Largest deviation from `f` over the grid nodes.
    pub fn residual_on(&self, f: &SphereFunction, grid: &QuadratureGrid) -> f64 {
        grid.nodes()
            .iter()
            .map(|u| (self.evaluate(u) - f.eval(u)).abs())
            .fold(0.0, f64::max)
    }

    /// CSV serialization: `degree,order,coefficient` with order 0 for the
    /// zonal/constant term, +j for cosine and -j for sine components.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "degree,order,coefficient")?;
        for (m, b) in self.blocks.iter().enumerate() {
            if self.n == 2 {
                if m == 0 {
                    writeln!(w, "0,0,{}", b[0])?;
                } else {
                    writeln!(w, "{m},{m},{}", b[0])?;
                    writeln!(w, "{m},-{m},{}", b[1])?;
                }
            } else {
                writeln!(w, "{m},0,{}", b[0])?;
                for j in 1..=m {
                    writeln!(w, "{m},{j},{}", b[2 * j - 1])?;
                    writeln!(w, "{m},-{j},{}", b[2 * j])?;
                }
            }
        }
        Ok(())
    }

    pub fn read_csv(n: usize, r: impl BufRead) -> Result<HarmonicExpansion> {
        let mut entries: Vec<(usize, i64, f64)> = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if i == 0 {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(GtomoError::Parse(format!("short CSV line '{line}'")));
            }
            let m: usize = fields[0]
                .parse()
                .map_err(|e| GtomoError::Parse(format!("{e}")))?;
            let j: i64 = fields[1]
                .parse()
                .map_err(|e| GtomoError::Parse(format!("{e}")))?;
            let c: f64 = fields[2]
                .parse()
                .map_err(|e| GtomoError::Parse(format!("{e}")))?;
            entries.push((m, j, c));
        }
        let max_degree = entries.iter().map(|e| e.0).max().unwrap_or(0);
        let mut exp = HarmonicExpansion::zero(n, max_degree);
        for (m, j, c) in entries {
            match n {
                2 => {
                    if m == 0 {
                        exp.blocks[0][0] = c;
                    } else if j > 0 {
                        exp.blocks[m][0] = c;
                    } else {
                        exp.blocks[m][1] = c;
                    }
                }
                _ => {
                    if j == 0 {
                        exp.blocks[m][0] = c;
                    } else if j > 0 {
                        exp.blocks[m][2 * j as usize - 1] = c;
                    } else {
                        exp.blocks[m][2 * (-j) as usize] = c;
                    }
                }
            }
        }
        Ok(exp)
    }

    fn zero(n: usize, max_degree: usize) -> HarmonicExpansion {
        let blocks = (0..=max_degree)
            .map(|m| match n {
                2 => vec![0.0; if m == 0 { 1 } else { 2 }],
                _ => vec![0.0; 2 * m + 1],
            })
            .collect();
        HarmonicExpansion {
            n,
            max_degree,
            blocks,
        }
    }
}

/// Expands `f` through degree `max_degree` by quadrature against the real
/// orthonormal harmonics. The grid must be exact through degree
/// 2*max_degree so that band-limited functions are reproduced exactly.
pub fn expand(
    f: &SphereFunction,
    max_degree: usize,
    grid: &QuadratureGrid,
) -> Result<HarmonicExpansion> {
    let n = f.n();
    if n != 2 && n != 3 {
        return Err(GtomoError::InvalidParameter(format!(
            "expansions exist only for n in {{2, 3}}, got {n}"
        )));
    }
    let need = 2 * max_degree;
    match grid.exact_degree() {
        Some(have) if have >= need => {}
        have => {
            return Err(GtomoError::GridTooCoarse {
                have: have.unwrap_or(0),
                need,
            })
        }
    }
    let mut exp = HarmonicExpansion::zero(n, max_degree);
    let sqrt2 = std::f64::consts::SQRT_2;
    match n {
        2 => {
            for (u, w) in grid.nodes().iter().zip(grid.weights()) {
                let v = w * f.eval(u);
                let t = u.angle();
                exp.blocks[0][0] += v;
                for m in 1..=max_degree {
                    let (s, c) = (m as f64 * t).sin_cos();
                    exp.blocks[m][0] += v * sqrt2 * c;
                    exp.blocks[m][1] += v * sqrt2 * s;
                }
            }
        }
        _ => {
            let idx = |m: usize, j: usize| m * (m + 1) / 2 + j;
            for (u, w) in grid.nodes().iter().zip(grid.weights()) {
                let v = w * f.eval(u);
                let cos_phi = u[2].clamp(-1.0, 1.0);
                let psi = u[1].atan2(u[0]);
                let p = normalized_assoc_legendre(max_degree, cos_phi);
                for m in 0..=max_degree {
                    exp.blocks[m][0] += v * p[idx(m, 0)];
                    for j in 1..=m {
                        let (s, c) = (j as f64 * psi).sin_cos();
                        let base = sqrt2 * p[idx(m, j)];
                        exp.blocks[m][2 * j - 1] += v * base * c;
                        exp.blocks[m][2 * j] += v * base * s;
                    }
                }
            }
        }
    }
    Ok(exp)
}

/// Multiplier lambda_m taking a degree-m harmonic, extended with homogeneity
/// -q-1, to its Fourier transform restricted to the sphere:
/// lambda_m = (-1)^{m/2} 2^{n-q-1} pi^{n/2}
///            Gamma((m+n-q-1)/2) / Gamma((m+q+1)/2).
pub fn fourier_multiplier(n: usize, q: f64, m: usize) -> Result<f64> {
    if !m.is_multiple_of(2) {
        return Err(GtomoError::InvalidParameter(format!(
            "multipliers act on even degrees, got m = {m}"
        )));
    }
    if !(q > -1.0 && q < n as f64 - 1.0) {
        return Err(GtomoError::OrderOutOfRange {
            q,
            lo: -1.0,
            hi: n as f64 - 1.0,
        });
    }
    let nf = n as f64;
    let mf = m as f64;
    let sign = if (m / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let ln_ratio = ln_gamma((mf + nf - q - 1.0) / 2.0) - ln_gamma((mf + q + 1.0) / 2.0);
    Ok(sign * 2.0_f64.powf(nf - q - 1.0) * std::f64::consts::PI.powf(nf / 2.0) * ln_ratio.exp())
}

/// Table of multipliers for even degrees 0, 2, ..., max_degree.
#[derive(Debug, Clone)]
pub struct MultiplierTable {
    pub n: usize,
    pub q: f64,
    /// Pairs (m, lambda_m) for even m.
    pub values: Vec<(usize, f64)>,
}

impl MultiplierTable {
    pub fn new(n: usize, q: f64, max_degree: usize) -> Result<Self> {
        let values = (0..=max_degree)
            .step_by(2)
            .map(|m| fourier_multiplier(n, q, m).map(|l| (m, l)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiplierTable { n, q, values })
    }

    pub fn magnitude(&self, m: usize) -> f64 {
        self.values
            .iter()
            .find(|(mm, _)| *mm == m)
            .map(|(_, l)| l.abs())
            .expect("degree present in table")
    }
}

/// How |lambda_m| for m > 2 compares against |lambda_2|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiplierVerdict {
    Deg2Smallest,
    AllEqual,
    Deg2Largest,
    Mixed,
}

#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub table: MultiplierTable,
    pub verdict: MultiplierVerdict,
}

/// Magnitude table with the comparison verdict against degree 2; the
/// crossover sits at q = n/2 - 1, where all magnitudes coincide.
pub fn multiplier_monotonicity_report(
    n: usize,
    q: f64,
    max_degree: usize,
) -> Result<MonotonicityReport> {
    let table = MultiplierTable::new(n, q, max_degree.max(2))?;
    let l2 = table.magnitude(2);
    let rel = 1e-12;
    let mut smaller = false;
    let mut larger = false;
    for (m, l) in &table.values {
        if *m <= 2 {
            continue;
        }
        let mag = l.abs();
        if mag > l2 * (1.0 + rel) {
            larger = true;
        } else if mag < l2 * (1.0 - rel) {
            smaller = true;
        }
    }
    let verdict = match (smaller, larger) {
        (false, true) => MultiplierVerdict::Deg2Smallest,
        (true, false) => MultiplierVerdict::Deg2Largest,
        (false, false) => MultiplierVerdict::AllEqual,
        (true, true) => MultiplierVerdict::Mixed,
    };
    Ok(MonotonicityReport { table, verdict })
}

/// Radon eigenvalue on degree-m harmonics of S^2, through the Fourier
/// relation R g = g_hat / pi for (-n+1)-homogeneous extensions.
pub fn radon_eigenvalue(n: usize, m: usize) -> Result<f64> {
    Ok(fourier_multiplier(n, n as f64 - 2.0, m)? / std::f64::consts::PI)
}

/// Direct spherical Radon transform: the integral of `f` over the great
/// subsphere orthogonal to `theta` (unnormalized measure).
pub fn radon_transform(f: &SphereFunction, theta: &UnitVector, resolution: usize) -> Result<f64> {
    let grid = subsphere_grid(theta, resolution)?;
    Ok(grid.integrate(|u| f.eval(u)))
}

/// Radon transform through the multiplier route; even expansions only.
pub fn radon_via_multipliers(expansion: &HarmonicExpansion) -> Result<HarmonicExpansion> {
    if expansion.n() != 3 {
        return Err(GtomoError::InvalidParameter(
            "multiplier Radon route runs on S^2 expansions".into(),
        ));
    }
    let even = expansion.clone().into_even()?;
    let eigens: Vec<f64> = (0..=even.max_degree())
        .map(|m| {
            if m % 2 == 0 {
                radon_eigenvalue(3, m).unwrap_or(0.0)
            } else {
                0.0
            }
        })
        .collect();
    Ok(even.scale_degrees(|m| eigens[m]))
}

/// Intersection body by direct section quadrature:
/// rho_IK(theta) = |K /\ theta^perp|. In the plane this is the rotation of
/// K by pi/2 dilated by 2.
pub fn intersection_body(k: &StarBody, resolution: usize) -> StarBody {
    let body = k.clone();
    let n = k.n();
    let label = format!("I({})", k.label());
    StarBody::new(n, true, label, move |u| {
        let theta = UnitVector::from_normalized_unchecked(u.to_vec());
        section_area(&body, &theta, resolution).expect("section quadrature")
    })
}

/// Intersection body of an even S^2 body through the multiplier route:
/// expand rho^2 and scale degree m by the Radon eigenvalue over 2.
pub fn intersection_body_multiplier(
    k: &StarBody,
    max_degree: usize,
    grid: &QuadratureGrid,
) -> Result<StarBody> {
    if k.n() != 3 {
        return Err(GtomoError::InvalidParameter(
            "multiplier intersection body runs on S^2 bodies".into(),
        ));
    }
    let body = k.clone();
    let rho_sq = SphereFunction::new(3, k.even(), move |u| body.rho_coords(u).powi(2));
    let exp = expand(&rho_sq, max_degree, grid)?;
    let radon = radon_via_multipliers(&exp)?;
    let scaled = radon.scale_degrees(|_| 0.5);
    let scaled = Arc::new(scaled);
    Ok(StarBody::new(
        3,
        true,
        format!("I_mult({})", k.label()),
        move |u| scaled.evaluate_coords(u),
    ))
}

/// Reconstructs the even star body K on S^2 whose intersection body is the
/// given target: degree-m coefficients of rho_target are scaled by the
/// q = 0 multipliers and rho_K = (2 pi)^{-1} sqrt of the result. Fails when
/// the inverted function is not strictly positive on the grid.
pub fn invert_intersection_body(
    target: &StarBody,
    max_degree: usize,
    grid: &QuadratureGrid,
) -> Result<StarBody> {
    if target.n() != 3 {
        return Err(GtomoError::InvalidParameter(
            "intersection-body inversion runs on S^2 bodies".into(),
        ));
    }
    let t = target.clone();
    let f = SphereFunction::new(3, target.even(), move |u| t.rho_coords(u));
    let exp = expand(&f, max_degree, grid)?.into_even()?;
    let lambdas: Vec<f64> = (0..=max_degree)
        .map(|m| {
            if m % 2 == 0 {
                fourier_multiplier(3, 0.0, m).unwrap_or(0.0)
            } else {
                0.0
            }
        })
        .collect();
    let g = exp.scale_degrees(|m| lambdas[m]);
    let mut min = f64::INFINITY;
    for u in grid.nodes() {
        min = min.min(g.evaluate(u));
    }
    if min <= 0.0 {
        return Err(GtomoError::NotAnIntersectionBody { min });
    }
    let g = Arc::new(g);
    let c2 = 1.0 / (2.0 * std::f64::consts::PI);
    Ok(StarBody::new(
        3,
        true,
        format!("I^-1({})", target.label()),
        move |u| c2 * g.evaluate_coords(u).max(0.0).sqrt(),
    ))
}

/// Fourier route to the fractional derivative of the parallel section
/// function at zero:
/// A^{(q)}(0) = cos(pi q / 2) / (pi (n - q - 1)) * (||.||_K^{-n+q+1})^(theta),
/// with the transform realized degree-by-degree on the expansion of
/// rho^{n-q-1} (even S^2 bodies).
pub fn fractional_derivative_fourier(
    k: &StarBody,
    theta: &UnitVector,
    q: f64,
    max_degree: usize,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let n = k.n();
    if n != 3 {
        return Err(GtomoError::InvalidParameter(
            "Fourier fractional-derivative route runs on S^2 bodies".into(),
        ));
    }
    // Odd integer orders annihilate the derivative in every direction.
    if q > 0.0 && q.fract() == 0.0 && (q as i64) % 2 == 1 {
        return Err(GtomoError::OddOrderExcluded { q });
    }
    let nf = n as f64;
    let body = k.clone();
    let power = nf - q - 1.0;
    let f = SphereFunction::new(3, k.even(), move |u| body.rho_coords(u).powf(power));
    let exp = expand(&f, max_degree, grid)?.into_even()?;
    let qstar = nf - q - 2.0;
    let lambdas: Vec<f64> = (0..=max_degree)
        .map(|m| {
            if m % 2 == 0 {
                fourier_multiplier(n, qstar, m).unwrap_or(0.0)
            } else {
                0.0
            }
        })
        .collect();
    let transformed = exp.scale_degrees(|m| lambdas[m]);
    let prefactor =
        (std::f64::consts::PI * q / 2.0).cos() / (std::f64::consts::PI * (nf - q - 1.0));
    Ok(prefactor * transformed.evaluate(theta))
}
