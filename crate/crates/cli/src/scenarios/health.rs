//! Harmonic engine health: route agreement for the Radon transform,
//! intersection-body round trips, and the quadrature moment checks every
//! other scenario relies on.

use gtomo::body::{equal_distributed_harmonic_pair, SphereFunction, StarBody};
use gtomo::harmonic::{
    expand, intersection_body_multiplier, invert_intersection_body, radon_transform,
    radon_via_multipliers,
};
use gtomo::special::legendre_p;
use gtomo::sphere::{quadrature_grid, sample_sphere, subsphere_grid, UnitVector};

use super::{ell2_targets, require};
use crate::{Artifacts, Outcome, Params};

const PI: f64 = std::f64::consts::PI;

pub fn harmonic_health(p: &Params, _artifacts: &mut Artifacts) -> gtomo::Result<Outcome> {
    require(p.grid >= 48, "grid must be at least 48")?;
    require(
        (16..=40).contains(&p.harmonic_degree),
        "harmonic degree must lie in 16..=40",
    )?;
    let mut out = Outcome::default();
    let grid = quadrature_grid(3, p.grid)?;

    // Radon transform: direct subsphere quadrature against the multiplier
    // route at degree 16.
    let f = SphereFunction::new(3, true, |u| 1.0 + 0.3 * legendre_p(2, u[2]));
    let exp = expand(&f, 16, &grid)?;
    let radon = radon_via_multipliers(&exp)?;
    let mut radon_sup: f64 = 0.0;
    for theta in sample_sphere(3, 200, p.seed ^ 0x11)? {
        let direct = radon_transform(&f, &theta, 512)?;
        radon_sup = radon_sup.max((direct - radon.evaluate(&theta)).abs());
    }
    out.check_below("radon_route_sup", radon_sup, 1e-6);

    // Intersection-body round trips at the working degree. The tail norm
    // of the target expansion is the declared truncation error.
    let (target_k, _) = ell2_targets(0.1)?;
    let tk = target_k.clone();
    let target_fn = SphereFunction::new(3, true, move |u| tk.rho_coords(u));
    let target_exp = expand(&target_fn, p.harmonic_degree, &grid)?;
    out.metric("expansion_tail_norm", target_exp.tail_norm());
    let k = invert_intersection_body(&target_k, p.harmonic_degree, &grid)?;
    let ik = intersection_body_multiplier(&k, p.harmonic_degree, &grid)?;
    let mut rt: f64 = 0.0;
    for u in grid.nodes() {
        rt = rt.max((ik.rho(u) - target_k.rho(u)).abs());
    }
    out.check_below("round_trip_sup_ell2", rt, 1e-3);

    let (h2, _) = equal_distributed_harmonic_pair(0.5);
    let zonal_target = StarBody::new(3, true, "1+0.05 H2", move |u| {
        1.0 + 0.05 * h2.eval_coords(u)
    });
    let kz = invert_intersection_body(&zonal_target, p.harmonic_degree, &grid)?;
    let ikz = intersection_body_multiplier(&kz, p.harmonic_degree, &grid)?;
    let mut rtz: f64 = 0.0;
    for u in grid.nodes() {
        rtz = rtz.max((ikz.rho(u) - zonal_target.rho(u)).abs());
    }
    out.check_below("round_trip_sup_harmonic", rtz, 1e-4);

    // Grid moment checks.
    let weight_err = (grid.weights().iter().sum::<f64>() - 1.0).abs();
    let coord_moment = (grid.mean(|u| u[0] * u[0]) - 1.0 / 3.0).abs();
    let odd_moment = grid.mean(|u| u[0] * u[1] * u[2]).abs();
    let circle = quadrature_grid(2, 4096)?;
    let circle_weight_err = (circle.weights().iter().sum::<f64>() - 1.0).abs();
    let circle_moment = (circle.mean(|u| u[0] * u[0]) - 0.5).abs();
    let equator = subsphere_grid(&UnitVector::axis(3, 2), 512)?;
    let equator_err = (equator.total_weight() - 2.0 * PI).abs()
        .max((equator.weights().iter().sum::<f64>() - 2.0 * PI).abs());
    out.check_below("grid_weight_error", weight_err, 1e-10);
    out.check_below("grid_moment_error", coord_moment, 1e-10);
    out.check_below("grid_odd_moment", odd_moment, 1e-10);
    out.check_below("circle_weight_error", circle_weight_err, 1e-10);
    out.check_below("circle_moment_error", circle_moment, 1e-10);
    out.check_below("subsphere_weight_error", equator_err, 1e-10);
    Ok(out)
}
