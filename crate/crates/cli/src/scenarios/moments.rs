//! Moment scenarios: the parallel-section moment identity and the Fourier
//! multiplier dichotomy at q = n/2 - 1.

use gtomo::body::{perturbation_body, SphereFunction, StarBody};
use gtomo::dist::{ks_distance, CdfMeta, EmpiricalCdf};
use gtomo::functionals::{frac_derivative, parallel_section, radial_moment, Integrator};
use gtomo::harmonic::{
    fractional_derivative_fourier, multiplier_monotonicity_report, MultiplierTable,
    MultiplierVerdict,
};
use gtomo::sphere::{quadrature_grid, random_rotation, sample_sphere, UnitVector};

use super::require;
use crate::{Artifacts, Outcome, Params};

const PI: f64 = std::f64::consts::PI;

/// Directional average of z^p-weighted slice integrals,
/// integral_0^infinity z^p E_theta[A_{K,theta}(z)] dz, with the z-quadrature
/// stopping at the slice support rho(theta).
fn z_moment(k: &StarBody, powers: &[i32], dir_polar: usize, z_nodes: usize) -> Vec<f64> {
    let grid = quadrature_grid(3, dir_polar).expect("direction grid");
    let (zx, zw) = gtomo::special::gauss_legendre(z_nodes).expect("z rule");
    let mut acc = vec![0.0; powers.len()];
    for (theta, w) in grid.nodes().iter().zip(grid.weights()) {
        let rho = k.rho(theta);
        for (x, wz) in zx.iter().zip(&zw) {
            let z = 0.5 * rho * (x + 1.0);
            let a = parallel_section(k, theta, z, 128).expect("slice quadrature");
            for (out, p) in acc.iter_mut().zip(powers) {
                *out += w * 0.5 * rho * wz * z.powi(*p) * a;
            }
        }
    }
    acc
}

pub fn moment_identity(p: &Params, _artifacts: &mut Artifacts) -> gtomo::Result<Outcome> {
    require(p.samples >= 128, "samples (direction count) must be at least 128")?;
    require(p.grid >= 8, "grid (z-grid size) must be at least 8")?;
    let mut out = Outcome::default();
    let powers = [0, 1, 2];
    let dir_polar = 16;
    let z_nodes = 24;

    // Calibrate c(n, p) on the unit ball, where every radial moment is 1.
    let ball = StarBody::ball(3, 1.0)?;
    let c = z_moment(&ball, &powers, dir_polar, z_nodes);

    let p2 = SphereFunction::p2_zonal();
    let h2 = SphereFunction::h2_sectoral();
    let bodies = vec![
        StarBody::ball(3, 1.2)?,
        perturbation_body(&p2, 0.05, 1.0)?,
        perturbation_body(&h2, 0.05, -0.5)?,
    ];
    let integrator = Integrator::grid(3, 64)?;
    let mut worst: f64 = 0.0;
    for body in &bodies {
        let lhs = z_moment(body, &powers, dir_polar, z_nodes);
        for (i, &power) in powers.iter().enumerate() {
            let rhs = c[i] * radial_moment(body, power as f64, &integrator)?.value;
            let rel = (lhs[i] - rhs).abs() / rhs.abs();
            worst = worst.max(rel);
        }
    }
    out.check_below("moment_identity_max_rel_err", worst, 1e-3);

    // Matched slice distributions on a z-grid imply matched radial moment
    // sequences: exercised on a body and its rotated copy.
    let body = perturbation_body(&p2, 0.06, 1.0)?;
    let rotated = body.rotated(random_rotation(3, p.seed ^ 0x51));
    let dirs = sample_sphere(3, p.samples, p.seed)?;
    let rho_min = dirs
        .iter()
        .map(|u| body.rho(u).min(rotated.rho(u)))
        .fold(f64::INFINITY, f64::min);
    let mut premise_ks: f64 = 0.0;
    for i in 0..p.grid {
        let z = 0.9 * rho_min * i as f64 / p.grid as f64;
        let slice = |k: &StarBody| -> gtomo::Result<EmpiricalCdf> {
            let vals: Vec<f64> = dirs
                .iter()
                .map(|u| parallel_section(k, u, z, 128).expect("slice quadrature"))
                .collect();
            EmpiricalCdf::from_samples(vals, CdfMeta::default())
        };
        let ks = ks_distance(&slice(&body)?, &slice(&rotated)?);
        premise_ks = premise_ks.max(ks);
    }
    out.check_below("slice_premise_max_ks", premise_ks, 0.05);

    let radial_grid = quadrature_grid(3, 96)?;
    let moments = |k: &StarBody| -> gtomo::Result<Vec<f64>> {
        let cdf = EmpiricalCdf::from_function_grid(|u| k.rho(u), &radial_grid, CdfMeta::default())?;
        cdf.moment_sequence(10, 1.5)
    };
    let ma = moments(&body)?;
    let mb = moments(&rotated)?;
    let max_diff = ma
        .iter()
        .zip(&mb)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    out.check_below("radial_moment_max_diff", max_diff, 1e-4);
    Ok(out)
}

pub fn multiplier_dichotomy(p: &Params, artifacts: &mut Artifacts) -> gtomo::Result<Outcome> {
    require(p.n >= 3, "dimension must be at least 3")?;
    require(
        p.harmonic_degree >= 8 && p.harmonic_degree.is_multiple_of(2),
        "harmonic degree must be an even integer >= 8",
    )?;
    let mut out = Outcome::default();
    let n = p.n;
    let critical = n as f64 / 2.0 - 1.0;

    // Constant magnitudes at the critical order.
    let table = MultiplierTable::new(n, critical, p.harmonic_degree)?;
    let base = table.magnitude(0);
    let spread = table
        .values
        .iter()
        .map(|(_, l)| (l.abs() - base).abs() / base)
        .fold(0.0, f64::max);
    out.check_below("critical_magnitude_spread", spread, 1e-12);

    let mut table_text = String::from("q,m,lambda\n");
    for (m, l) in &table.values {
        table_text.push_str(&format!("{critical},{m},{l}\n"));
    }

    // Ordered magnitudes on either side of the critical order.
    let below = multiplier_monotonicity_report(n, critical - 0.5, p.harmonic_degree)?;
    let above = multiplier_monotonicity_report(n, critical + 0.5, p.harmonic_degree)?;
    out.check_above(
        "deg2_smallest_below_critical",
        if below.verdict == MultiplierVerdict::Deg2Smallest {
            1.0
        } else {
            0.0
        },
        0.5,
    );
    out.check_above(
        "deg2_largest_above_critical",
        if above.verdict == MultiplierVerdict::Deg2Largest {
            1.0
        } else {
            0.0
        },
        0.5,
    );
    artifacts.text("multiplier_table", "csv", &table_text)?;

    // Ball fractional derivative, quadrature route against the closed value
    // and the Fourier route.
    let ball = StarBody::ball(3, 1.0)?;
    let theta = UnitVector::axis(3, 2);
    let quad = frac_derivative(&ball, &theta, -0.5, 256)?;
    out.check_below("ball_frac_error", (quad - 1.6 * PI.sqrt()).abs(), 1e-4);
    let grid = quadrature_grid(3, 48)?;
    let fourier = fractional_derivative_fourier(&ball, &theta, -0.5, 16, &grid)?;
    out.check_below("frac_route_difference", (quad - fourier).abs(), 1e-3);
    Ok(out)
}
