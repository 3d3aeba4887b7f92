//! Star and convex bodies given by radial evaluators: balls, ellipsoids,
//! the planar pair E0/K0, l2-sums, polars, perturbations of the ball, and
//! the equal-distributed pair built from a degree-2 harmonic.

use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use crate::error::{GtomoError, Result};
use crate::sphere::{circle_grid, sample_sphere, substream, UnitVector};

use rand::Rng;
use rand_distr::StandardNormal;

/// Curvature-numerator tolerance for radial convexity checks.
pub const CONVEXITY_TOL: f64 = -1e-6;
/// Tolerance for the support-function convexity test h + h'' >= 0.
pub const SUPPORT_CONVEXITY_TOL: f64 = -1e-8;
/// Central-difference step for radial derivatives on planar slices.
pub const DERIVATIVE_STEP: f64 = 2.0 * std::f64::consts::PI / 4096.0;

type RadialFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A star body about the origin, represented by its radial function on the
/// unit sphere. Immutable and cheap to clone; evaluation is pure.
#[derive(Clone)]
pub struct StarBody {
    n: usize,
    rho: Arc<RadialFn>,
    even: bool,
    label: String,
    /// Exact support function, set by constructions that know it (balls,
    /// ellipsoids, polars of convex bodies, their l2-sums and images).
    support: Option<Arc<RadialFn>>,
    /// Lazily computed circumscribed radius, shared across clones.
    circumradius: Arc<OnceLock<f64>>,
}

impl fmt::Debug for StarBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StarBody")
            .field("n", &self.n)
            .field("even", &self.even)
            .field("label", &self.label)
            .finish()
    }
}

impl StarBody {
    pub fn new(
        n: usize,
        even: bool,
        label: impl Into<String>,
        rho: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        StarBody {
            n,
            rho: Arc::new(rho),
            even,
            label: label.into(),
            support: None,
            circumradius: Arc::new(OnceLock::new()),
        }
    }

    fn with_support(mut self, h: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.support = Some(Arc::new(h));
        self
    }

    /// Exact support function at a unit vector, when the construction
    /// carries one.
    pub fn support_coords(&self, coords: &[f64]) -> Option<f64> {
        self.support.as_ref().map(|h| h(coords))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn even(&self) -> bool {
        self.even
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Radial function at a point of the sphere.
    pub fn rho(&self, u: &UnitVector) -> f64 {
        (self.rho)(u.coords())
    }

    /// Radial function from raw unit coordinates.
    pub fn rho_coords(&self, coords: &[f64]) -> f64 {
        (self.rho)(coords)
    }

    /// Minkowski functional ||x||_K = |x| / rho(x/|x|); 0 at the origin.
    pub fn minkowski_norm(&self, x: &[f64]) -> f64 {
        let r = crate::sphere::norm(x);
        if r == 0.0 {
            return 0.0;
        }
        let dir: Vec<f64> = x.iter().map(|c| c / r).collect();
        r / (self.rho)(&dir)
    }

    /// Membership test |x| <= rho(x/|x|).
    pub fn contains(&self, x: &[f64]) -> bool {
        self.minkowski_norm(x) <= 1.0
    }

    /// Euclidean ball of radius r. Dimension 1 (a segment) is allowed so
    /// that l2-sums can attach one-dimensional factors.
    pub fn ball(n: usize, r: f64) -> Result<StarBody> {
        if r <= 0.0 {
            return Err(GtomoError::InvalidParameter(format!(
                "ball radius must be positive, got {r}"
            )));
        }
        if n < 1 {
            return Err(GtomoError::DimensionTooSmall { min: 1, got: n });
        }
        Ok(StarBody::new(n, true, format!("ball n={n} r={r}"), move |_| r)
            .with_support(move |_| r))
    }

    /// Centered ellipsoid with the given semiaxes.
    pub fn ellipsoid(semiaxes: &[f64]) -> Result<StarBody> {
        let n = semiaxes.len();
        if n < 2 {
            return Err(GtomoError::DimensionTooSmall { min: 2, got: n });
        }
        if semiaxes.iter().any(|a| *a <= 0.0) {
            return Err(GtomoError::InvalidParameter(
                "ellipsoid semiaxes must be positive".into(),
            ));
        }
        let inv_sq: Vec<f64> = semiaxes.iter().map(|a| 1.0 / (a * a)).collect();
        let sq: Vec<f64> = semiaxes.iter().map(|a| a * a).collect();
        let label = format!(
            "ellipsoid a={}",
            semiaxes
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        Ok(StarBody::new(n, true, label, move |u| {
            let q: f64 = u.iter().zip(&inv_sq).map(|(x, c)| x * x * c).sum();
            q.sqrt().recip()
        })
        .with_support(move |u| {
            u.iter()
                .zip(&sq)
                .map(|(x, c)| x * x * c)
                .sum::<f64>()
                .sqrt()
        }))
    }

    /// l2-sum: the body in R^{n1+n2} whose Minkowski functional is the
    /// Euclidean combination of those of the parts.
    pub fn l2_sum(a: &StarBody, b: &StarBody) -> StarBody {
        let (na, nb) = (a.n, b.n);
        let _ = nb;
        let (fa, fb) = (a.rho.clone(), b.rho.clone());
        let label = format!("l2sum({}, {})", a.label, b.label);
        let even = a.even && b.even;
        let body = StarBody::new(na + nb, even, label, move |u| {
            let (x, y) = u.split_at(na);
            let sx = crate::sphere::norm(x);
            let sy = crate::sphere::norm(y);
            let mut q = 0.0;
            if sx > 0.0 {
                let dir: Vec<f64> = x.iter().map(|c| c / sx).collect();
                let r = fa(&dir);
                q += sx * sx / (r * r);
            }
            if sy > 0.0 {
                let dir: Vec<f64> = y.iter().map(|c| c / sy).collect();
                let r = fb(&dir);
                q += sy * sy / (r * r);
            }
            q.sqrt().recip()
        });
        // The dual of the Euclidean combination of two norms is the
        // Euclidean combination of the duals, so exact supports propagate.
        match (a.support.clone(), b.support.clone()) {
            (Some(ha), Some(hb)) => body.with_support(move |u| {
                let (x, y) = u.split_at(na);
                let sx = crate::sphere::norm(x);
                let sy = crate::sphere::norm(y);
                let mut q = 0.0;
                if sx > 0.0 {
                    let dir: Vec<f64> = x.iter().map(|c| c / sx).collect();
                    let h = ha(&dir);
                    q += sx * sx * h * h;
                }
                if sy > 0.0 {
                    let dir: Vec<f64> = y.iter().map(|c| c / sy).collect();
                    let h = hb(&dir);
                    q += sy * sy * h * h;
                }
                q.sqrt()
            }),
            _ => body,
        }
    }

    /// Body rotated by an n x n rotation matrix (rows act on vectors):
    /// rho_{RK}(u) = rho_K(R^T u).
    pub fn rotated(&self, rot: Vec<Vec<f64>>) -> StarBody {
        let n = self.n;
        let pull_back = move |rot: &[Vec<f64>], u: &[f64]| -> Vec<f64> {
            let mut back = vec![0.0; n];
            for (row, ui) in rot.iter().zip(u) {
                for (bi, rij) in back.iter_mut().zip(row) {
                    *bi += rij * ui;
                }
            }
            back
        };
        let f = self.rho.clone();
        let rot_rho = rot.clone();
        let support = self.support.clone().map(|h| {
            let rot = rot.clone();
            Arc::new(move |u: &[f64]| h(&pull_back(&rot, u))) as Arc<RadialFn>
        });
        StarBody {
            n,
            even: self.even,
            label: format!("rotated({})", self.label),
            rho: Arc::new(move |u: &[f64]| f(&pull_back(&rot_rho, u))),
            support,
            circumradius: Arc::new(OnceLock::new()),
        }
    }

    /// Same body under a different display label.
    pub fn relabeled(mut self, label: impl Into<String>) -> StarBody {
        self.label = label.into();
        self
    }

    /// Dilate by a positive factor.
    pub fn scaled(&self, factor: f64) -> StarBody {
        let f = self.rho.clone();
        let support = self.support.clone().map(|h| {
            Arc::new(move |u: &[f64]| factor * h(u)) as Arc<RadialFn>
        });
        StarBody {
            n: self.n,
            even: self.even,
            label: format!("scaled({}, {})", self.label, factor),
            rho: Arc::new(move |u| factor * f(u)),
            support,
            circumradius: Arc::new(OnceLock::new()),
        }
    }

    /// Largest radial value over a deterministic direction sample.
    pub fn max_rho_estimate(&self, samples: usize) -> f64 {
        if self.n == 1 {
            return self.rho_coords(&[1.0]).max(self.rho_coords(&[-1.0]));
        }
        let dirs = sample_sphere(self.n, samples, 0x7a11).expect("n >= 2");
        dirs.iter().map(|u| self.rho(u)).fold(f64::MIN, f64::max)
    }

    /// Radius of the circumscribed ball, estimated once over 4096 fixed
    /// direction samples and cached (shared across clones).
    pub fn circumscribed_radius(&self) -> f64 {
        *self
            .circumradius
            .get_or_init(|| self.max_rho_estimate(4096))
    }
}

/// Extends a 3-dimensional body that is even in its last coordinate to
/// dimension n by rotational invariance in the trailing block:
/// rho_K(x) = rho_Kbar(x1, x2, |(x3, ..., xn)|).
pub fn rotational_extension(bar: &StarBody, n: usize) -> Result<StarBody> {
    if bar.n() != 3 {
        return Err(GtomoError::InvalidParameter(format!(
            "rotational extension expects a 3-dimensional seed, got {}",
            bar.n()
        )));
    }
    if n < 3 {
        return Err(GtomoError::DimensionTooSmall { min: 3, got: n });
    }
    let inner = bar.clone();
    Ok(StarBody::new(
        n,
        bar.even(),
        format!("rot_ext n={n} of {}", bar.label()),
        move |u| {
            let tail = crate::sphere::norm(&u[2..]);
            inner.rho_coords(&[u[0], u[1], tail])
        },
    ))
}

/// The two planar seeds: an ellipse and its equal-distributed non-ellipse
/// partner, rho(u) = (1 + eps sin^2(ubar))^{-1/2} and
/// (1 + eps sin^2(2 ubar))^{-1/2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanarSeed {
    E0,
    K0,
}

impl PlanarSeed {
    fn frequency(self) -> f64 {
        match self {
            PlanarSeed::E0 => 1.0,
            PlanarSeed::K0 => 2.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PlanarSeed::E0 => "E0",
            PlanarSeed::K0 => "K0",
        }
    }
}

/// Planar seed body; rejects eps beyond the convex range.
pub fn planar_seed(kind: PlanarSeed, eps: f64) -> Result<StarBody> {
    if eps <= 0.0 {
        return Err(GtomoError::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )));
    }
    let body = planar_seed_unchecked(kind, eps);
    let report = convexity_check(&body)?;
    if !report.convex {
        return Err(GtomoError::EpsTooLarge {
            margin: report.min_margin,
            location: report.location,
        });
    }
    Ok(body)
}

fn planar_seed_unchecked(kind: PlanarSeed, eps: f64) -> StarBody {
    let k = kind.frequency();
    let body = StarBody::new(
        2,
        true,
        format!("{} eps={}", kind.name(), eps),
        move |u| {
            let ubar = u[1].atan2(u[0]);
            let s = (k * ubar).sin();
            (1.0 + eps * s * s).sqrt().recip()
        },
    );
    match kind {
        // The ellipse has semiaxes (1, (1+eps)^{-1/2}).
        PlanarSeed::E0 => body.with_support(move |u| {
            (u[0] * u[0] + u[1] * u[1] / (1.0 + eps)).sqrt()
        }),
        PlanarSeed::K0 => body,
    }
}

/// Largest eps for which the seed stays convex, by bisection on the
/// curvature check.
pub fn planar_eps_max(kind: PlanarSeed, tol: f64) -> f64 {
    let convex_at = |eps: f64| {
        let body = planar_seed_unchecked(kind, eps);
        convexity_check(&body).map(|r| r.convex).unwrap_or(false)
    };
    let mut lo = 0.0;
    let mut hi = 1.0;
    // Expand until failure or a generous cap (the ellipse never fails).
    while convex_at(hi) && hi < 64.0 {
        lo = hi;
        hi *= 2.0;
    }
    if hi >= 64.0 {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if convex_at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A scalar function on the sphere; no positivity requirement.
#[derive(Clone)]
pub struct SphereFunction {
    n: usize,
    f: Arc<RadialFn>,
    even: bool,
}

impl SphereFunction {
    pub fn new(
        n: usize,
        even: bool,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SphereFunction {
            n,
            f: Arc::new(f),
            even,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn even(&self) -> bool {
        self.even
    }

    pub fn eval(&self, u: &UnitVector) -> f64 {
        (self.f)(u.coords())
    }

    pub fn eval_coords(&self, coords: &[f64]) -> f64 {
        (self.f)(coords)
    }

    /// Legendre P2 of the last coordinate on S^2.
    pub fn p2_zonal() -> SphereFunction {
        SphereFunction::new(3, true, |u| 0.5 * (3.0 * u[2] * u[2] - 1.0))
    }

    /// The degree-2 harmonic x^2 - y^2 = sin^2(phi) cos(2 psi) on S^2.
    pub fn h2_sectoral() -> SphereFunction {
        SphereFunction::new(3, true, |u| u[0] * u[0] - u[1] * u[1])
    }
}

/// Body with radial function (1 + eps f)^p. Rejects nonpositive radial
/// values and convexity failures, reporting the failing direction.
pub fn perturbation_body(f: &SphereFunction, eps: f64, p: f64) -> Result<StarBody> {
    if p == 0.0 {
        return Err(GtomoError::InvalidParameter("p must be nonzero".into()));
    }
    let n = f.n();
    let g = f.clone();
    let body = StarBody::new(
        n,
        f.even(),
        format!("perturbation eps={eps} p={p}"),
        move |u| {
            let base = 1.0 + eps * g.eval_coords(u);
            base.powf(p)
        },
    );
    // Positivity of 1 + eps f over a dense deterministic sample.
    let sample = sample_sphere(n, 4096, 0x0bd7)?;
    for u in &sample {
        let base = 1.0 + eps * f.eval(u);
        if base <= 0.0 {
            return Err(GtomoError::NonPositiveRadial { value: base });
        }
    }
    let report = convexity_check(&body)?;
    if !report.convex {
        return Err(GtomoError::NotConvex {
            margin: report.min_margin,
            location: report.location,
        });
    }
    Ok(body)
}

/// Outcome of the planar-slice curvature test.
#[derive(Debug, Clone)]
pub struct ConvexityReport {
    pub convex: bool,
    /// Minimal value of rho^2 + 2 rho'^2 - rho rho'' over all sampled slices.
    pub min_margin: f64,
    /// Human-readable location of the minimum.
    pub location: String,
}

/// Convexity via the planar curvature numerator rho^2 + 2(rho')^2 - rho rho''
/// on central 2-plane slices: the single slice for n = 2, a fixed family of
/// random slices for n >= 3 (a body is convex iff every central planar
/// section is).
pub fn convexity_check(k: &StarBody) -> Result<ConvexityReport> {
    convexity_check_with(k, 64, 512)
}

pub fn convexity_check_with(
    k: &StarBody,
    slices: usize,
    angles: usize,
) -> Result<ConvexityReport> {
    let n = k.n();
    let h = DERIVATIVE_STEP;
    let mut min_margin = f64::INFINITY;
    let mut location = String::new();

    let mut scan_slice = |label: &str, eval: &dyn Fn(f64) -> f64| {
        for j in 0..angles {
            let t = 2.0 * std::f64::consts::PI * j as f64 / angles as f64;
            let r = eval(t);
            let rp = (eval(t + h) - eval(t - h)) / (2.0 * h);
            let rpp = (eval(t + h) - 2.0 * r + eval(t - h)) / (h * h);
            let numerator = r * r + 2.0 * rp * rp - r * rpp;
            if numerator < min_margin {
                min_margin = numerator;
                location = format!("{label} angle {t:.4}");
            }
        }
    };

    if n == 2 {
        let f = k.rho.clone();
        scan_slice("planar slice", &move |t: f64| f(&[t.cos(), t.sin()]));
    } else {
        let mut rng = substream(0xc0ffee, 0);
        for s in 0..slices {
            // Orthonormal pair spanning a random central 2-plane.
            let a: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let na = crate::sphere::norm(&a);
            let a: Vec<f64> = a.iter().map(|x| x / na).collect();
            let mut b: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let proj = crate::sphere::dot(&a, &b);
            for (bi, ai) in b.iter_mut().zip(&a) {
                *bi -= proj * ai;
            }
            let nb = crate::sphere::norm(&b);
            if nb < 1e-8 {
                continue;
            }
            let b: Vec<f64> = b.iter().map(|x| x / nb).collect();
            let f = k.rho.clone();
            let (aa, bb) = (a.clone(), b.clone());
            scan_slice(&format!("slice {s}"), &move |t: f64| {
                let (c, sn) = (t.cos(), t.sin());
                let coords: Vec<f64> =
                    aa.iter().zip(&bb).map(|(ai, bi)| c * ai + sn * bi).collect();
                f(&coords)
            });
        }
    }

    Ok(ConvexityReport {
        convex: min_margin >= CONVEXITY_TOL,
        min_margin,
        location,
    })
}

/// A planar convex body given by its support function as a 2*pi-periodic
/// function of the angle.
#[derive(Clone)]
pub struct SupportBody2D {
    h: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    label: String,
}

impl SupportBody2D {
    /// Wraps a support evaluator, verifying h + h'' >= 0 on a dense grid.
    pub fn new(
        label: impl Into<String>,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let body = SupportBody2D {
            h: Arc::new(h),
            label: label.into(),
        };
        let margin = body.support_convexity_margin(2048);
        if margin < SUPPORT_CONVEXITY_TOL {
            return Err(GtomoError::NotConvex {
                margin,
                location: format!("support function of {}", body.label),
            });
        }
        Ok(body)
    }

    /// Support function of a convex star body: the exact evaluator when the
    /// construction carries one, otherwise the maximum of rho(u) <u, theta>
    /// over an angular grid.
    pub fn from_star_body(k: &StarBody, resolution: usize) -> Result<Self> {
        debug_assert_eq!(k.n(), 2);
        if let Some(h) = k.support.clone() {
            let label = format!("support({})", k.label());
            return Ok(SupportBody2D {
                h: Arc::new(move |angle: f64| h(&[angle.cos(), angle.sin()])),
                label,
            });
        }
        let report = convexity_check(k)?;
        if !report.convex {
            return Err(GtomoError::NotConvex {
                margin: report.min_margin,
                location: report.location,
            });
        }
        let grid = circle_grid(resolution);
        let pts: Vec<(f64, f64)> = grid
            .nodes()
            .iter()
            .map(|u| {
                let r = k.rho(u);
                (r * u[0], r * u[1])
            })
            .collect();
        let label = format!("support({})", k.label());
        Ok(SupportBody2D {
            h: Arc::new(move |angle: f64| {
                let (c, s) = (angle.cos(), angle.sin());
                pts.iter()
                    .map(|(x, y)| c * x + s * y)
                    .fold(f64::MIN, f64::max)
            }),
            label,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn h(&self, angle: f64) -> f64 {
        (self.h)(angle)
    }

    /// Minimum of h + h'' over a grid (negative means nonconvex).
    pub fn support_convexity_margin(&self, angles: usize) -> f64 {
        let step = DERIVATIVE_STEP;
        let mut min = f64::INFINITY;
        for j in 0..angles {
            let t = 2.0 * std::f64::consts::PI * j as f64 / angles as f64;
            let h0 = self.h(t);
            let hpp = (self.h(t + step) - 2.0 * h0 + self.h(t - step)) / (step * step);
            min = min.min(h0 + hpp);
        }
        min
    }

    /// The convex body enveloped by the support function, as a star body
    /// with rho = 1/h of the polar (bipolar identity).
    pub fn polar_star_body(&self) -> StarBody {
        let h = self.h.clone();
        StarBody::new(
            2,
            true,
            format!("polar({})", self.label),
            move |u: &[f64]| {
                let angle = u[1].atan2(u[0]);
                1.0 / h(angle)
            },
        )
    }
}

/// Polar body of a planar convex body: rho_polar = 1/h with the support
/// taken as a maximum over the given grid resolution. Rejects nonconvex
/// input, where the formula would silently polar the convex hull.
pub fn polar_2d(k: &StarBody, resolution: usize) -> Result<StarBody> {
    let support = SupportBody2D::from_star_body(k, resolution)?;
    let label = format!("polar({})", k.label());
    let h = support.h.clone();
    // For convex K the support of the polar is the Minkowski gauge of K,
    // so the polar carries an exact support evaluator.
    let gauge = k.rho.clone();
    Ok(StarBody::new(2, k.even(), label, move |u: &[f64]| {
        let angle = u[1].atan2(u[0]);
        1.0 / h(angle)
    })
    .with_support(move |u| 1.0 / gauge(u)))
}

/// The pair (H2, F): a degree-2 harmonic with azimuthal dependence and a
/// smooth equal-distributed twin that differs from it on a band around the
/// equator. F composes H2 with the measure-preserving azimuth twist
/// psi -> psi + delta w(phi), where w is a smooth bump vanishing near the
/// poles, so the two functions have identical distribution functions while
/// F picks up harmonics of higher degree.
pub fn equal_distributed_harmonic_pair(delta: f64) -> (SphereFunction, SphereFunction) {
    let h2 = SphereFunction::h2_sectoral();
    let f = SphereFunction::new(3, true, move |u| {
        let cos_phi = u[2].clamp(-1.0, 1.0);
        let phi = cos_phi.acos();
        let psi = u[1].atan2(u[0]);
        let s2 = 1.0 - cos_phi * cos_phi;
        s2 * (2.0 * (psi + delta * twist_bump(phi))).cos()
    });
    (h2, f)
}

/// Smooth bump supported on |phi - pi/2| < 0.4.
fn twist_bump(phi: f64) -> f64 {
    let tau = (phi - std::f64::consts::FRAC_PI_2) / 0.4;
    if tau.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - tau * tau)).exp()
    }
}

/// Textual body descriptions: `ball n=3 r=1`, `ellipsoid a=1,1,2`,
/// `K0 eps=0.1`, `E0 eps=0.1`, `l2sum(<spec>, <spec>)`. Round-trips
/// losslessly through Display/FromStr.
#[derive(Debug, Clone, PartialEq)]
pub enum BodySpec {
    Ball { n: usize, r: f64 },
    Ellipsoid { semiaxes: Vec<f64> },
    PlanarSeed { kind: PlanarSeed, eps: f64 },
    L2Sum(Box<BodySpec>, Box<BodySpec>),
}

impl BodySpec {
    pub fn build(&self) -> Result<StarBody> {
        match self {
            BodySpec::Ball { n, r } => StarBody::ball(*n, *r),
            BodySpec::Ellipsoid { semiaxes } => StarBody::ellipsoid(semiaxes),
            BodySpec::PlanarSeed { kind, eps } => planar_seed(*kind, *eps),
            BodySpec::L2Sum(a, b) => Ok(StarBody::l2_sum(&a.build()?, &b.build()?)),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BodySpec::Ball { n, .. } => *n,
            BodySpec::Ellipsoid { semiaxes } => semiaxes.len(),
            BodySpec::PlanarSeed { .. } => 2,
            BodySpec::L2Sum(a, b) => a.dim() + b.dim(),
        }
    }
}

impl fmt::Display for BodySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BodySpec::Ball { n, r } => write!(f, "ball n={n} r={r}"),
            BodySpec::Ellipsoid { semiaxes } => {
                let list = semiaxes
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                write!(f, "ellipsoid a={list}")
            }
            BodySpec::PlanarSeed { kind, eps } => write!(f, "{} eps={eps}", kind.name()),
            BodySpec::L2Sum(a, b) => write!(f, "l2sum({a}, {b})"),
        }
    }
}

impl FromStr for BodySpec {
    type Err = GtomoError;

    fn from_str(s: &str) -> Result<Self> {
        parse_body_spec(s.trim())
    }
}

fn parse_body_spec(s: &str) -> Result<BodySpec> {
    let bad = |msg: &str| GtomoError::Parse(format!("{msg} in body spec '{s}'"));
    if let Some(rest) = s.strip_prefix("l2sum(") {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| bad("missing closing parenthesis"))?;
        // Split at the top-level comma.
        let mut depth = 0usize;
        let mut split_at = None;
        for (i, c) in inner.char_indices() {
            match c {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                ',' if depth == 0 => {
                    split_at = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let at = split_at.ok_or_else(|| bad("l2sum needs two arguments"))?;
        let a = parse_body_spec(inner[..at].trim())?;
        let b = parse_body_spec(inner[at + 1..].trim())?;
        return Ok(BodySpec::L2Sum(Box::new(a), Box::new(b)));
    }
    let mut parts = s.split_whitespace();
    let kind = parts.next().ok_or_else(|| bad("empty spec"))?;
    let mut kv = std::collections::HashMap::new();
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        kv.insert(k.to_string(), v.to_string());
    }
    let getf = |kv: &std::collections::HashMap<String, String>, key: &str| -> Result<f64> {
        kv.get(key)
            .ok_or_else(|| bad(&format!("missing {key}")))?
            .parse::<f64>()
            .map_err(|e| bad(&format!("bad {key}: {e}")))
    };
    match kind {
        "ball" => {
            let n = kv
                .get("n")
                .ok_or_else(|| bad("missing n"))?
                .parse::<usize>()
                .map_err(|e| bad(&format!("bad n: {e}")))?;
            Ok(BodySpec::Ball {
                n,
                r: getf(&kv, "r")?,
            })
        }
        "ellipsoid" => {
            let list = kv.get("a").ok_or_else(|| bad("missing a"))?;
            let semiaxes = list
                .split(',')
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(&format!("bad semiaxis: {e}")))?;
            Ok(BodySpec::Ellipsoid { semiaxes })
        }
        "E0" => Ok(BodySpec::PlanarSeed {
            kind: PlanarSeed::E0,
            eps: getf(&kv, "eps")?,
        }),
        "K0" => Ok(BodySpec::PlanarSeed {
            kind: PlanarSeed::K0,
            eps: getf(&kv, "eps")?,
        }),
        other => Err(bad(&format!("unknown body kind '{other}'"))),
    }
}
