//! Volume-comparison scenarios in dimension three: the l2-sum and harmonic
//! pairs with equal section distributions, the projection pair, and
//! ellipsoid dominance.

use gtomo::body::{equal_distributed_harmonic_pair, perturbation_body, SphereFunction, StarBody};
use gtomo::dist::{dominates, ks_distance, CdfMeta, EmpiricalCdf};
use gtomo::functionals::{section_area, volume, Integrator};
use gtomo::harmonic::{intersection_body_multiplier, invert_intersection_body};
use gtomo::inequality::{
    busemann_intersection_with, petty_projection_with, BusemannOptions, PettyOptions,
};
use gtomo::sphere::{quadrature_grid, sphere_product_grid, substream, UnitVector};

use rand::{Rng, RngCore};

use super::{ell2_targets, require};
use crate::{Artifacts, Outcome, Params};

/// Distribution of a directional functional over the product grid used for
/// all S^2 distribution comparisons (128 polar rows, `azimuth` columns).
fn s2_distribution(
    f: impl FnMut(&UnitVector) -> f64,
    azimuth: usize,
    meta: CdfMeta,
) -> gtomo::Result<EmpiricalCdf> {
    let grid = sphere_product_grid(128, azimuth)?;
    let mut f = f;
    EmpiricalCdf::from_function_grid(|u| f(u), &grid, meta)
}

pub fn ell2_pair(p: &Params, artifacts: &mut Artifacts) -> gtomo::Result<Outcome> {
    require(p.eps > 0.0 && p.eps < 1.0 / 3.0, "eps must lie in (0, 1/3)")?;
    require(p.n == 3, "the l2-sum pair scenario runs in dimension 3")?;
    require(p.grid >= 1024, "grid (azimuth) must be at least 1024")?;
    require(
        (8..=40).contains(&p.harmonic_degree),
        "harmonic degree must lie in 8..=40",
    )?;
    let mut out = Outcome::default();
    let (target_k, target_l) = ell2_targets(p.eps)?;
    // The prescribed intersection bodies in the parseable text form.
    artifacts.text(
        "bodies",
        "txt",
        &format!("IK = {}\nIL = {}\n", target_k.label(), target_l.label()),
    )?;

    // Prescribed section-area distributions coincide.
    let dk = s2_distribution(
        |u| target_k.rho(u),
        p.grid,
        CdfMeta::new("section_area", target_k.label(), "s2 grid", None),
    )?;
    let dl = s2_distribution(
        |u| target_l.rho(u),
        p.grid,
        CdfMeta::new("section_area", target_l.label(), "s2 grid", None),
    )?;
    artifacts.survival_curve("sections_k", &dk)?;
    artifacts.survival_curve("sections_l", &dl)?;
    out.check_below("ks_sections", ks_distance(&dk, &dl), 2e-3);

    // Intersection bodies share their volume.
    let integrator = Integrator::grid(3, 64)?;
    let vik = volume(&target_k, &integrator)?.value;
    let vil = volume(&target_l, &integrator)?.value;
    out.check_below("ik_volume_gap", (vik - vil).abs(), 1e-6);

    // Reconstruct the bodies as existence witnesses.
    let exp_grid = quadrature_grid(3, 64)?;
    let k = invert_intersection_body(&target_k, p.harmonic_degree, &exp_grid)?;
    let l = invert_intersection_body(&target_l, p.harmonic_degree, &exp_grid)?;
    let ik = intersection_body_multiplier(&k, p.harmonic_degree, &exp_grid)?;
    let mut round_trip: f64 = 0.0;
    for u in exp_grid.nodes() {
        round_trip = round_trip.max((ik.rho(u) - target_k.rho(u)).abs());
    }
    out.check_below("round_trip_sup", round_trip, 1e-3);

    // Volumes differ beyond the quadrature error.
    let vk = volume(&k, &integrator)?.value;
    let vl = volume(&l, &integrator)?.value;
    let coarse = Integrator::grid(3, 32)?;
    let vol_err = (vk - volume(&k, &coarse)?.value).abs()
        + (vl - volume(&l, &coarse)?.value).abs()
        + 1e-12;
    out.metric("volume_k", vk);
    out.metric("volume_l", vl);
    out.metric("volume_error", vol_err);
    out.check_above("volume_gap", (vk - vl).abs(), 3.0 * vol_err);

    // Strict Busemann slack for the non-ellipsoid, equality for the
    // ellipsoid.
    let bk = busemann_intersection_with(&k, BusemannOptions::default())?;
    let bl = busemann_intersection_with(
        &l,
        BusemannOptions {
            equality_expected: Some(true),
            ..BusemannOptions::default()
        },
    )?;
    out.metric("busemann_error_k", bk.numerical_error);
    out.metric("busemann_error_l", bl.numerical_error);
    out.check_above("busemann_slack_k", bk.slack, 3.0 * bk.numerical_error);
    out.check_below("busemann_slack_l", bl.slack.abs(), bl.numerical_error);
    Ok(out)
}

pub fn harmonic_pair(p: &Params, _artifacts: &mut Artifacts) -> gtomo::Result<Outcome> {
    require(
        p.eps > 0.0 && p.eps <= 0.05,
        "eps must lie in (0, 0.05]: the scenario runs eps and 2*eps",
    )?;
    require(
        (8..=40).contains(&p.harmonic_degree),
        "harmonic degree must lie in 8..=40",
    )?;
    let mut out = Outcome::default();
    let (h2, f) = equal_distributed_harmonic_pair(0.75);
    let exp_grid = quadrature_grid(3, 64)?;
    let integrator = Integrator::grid(3, 64)?;

    let mut gaps = Vec::new();
    for (i, eps) in [p.eps, 2.0 * p.eps].into_iter().enumerate() {
        let h2c = h2.clone();
        let fc = f.clone();
        let target_k = StarBody::new(3, true, format!("1+{eps}*H2"), move |u| {
            1.0 + eps * h2c.eval_coords(u)
        });
        let target_l = StarBody::new(3, true, format!("1+{eps}*F"), move |u| {
            1.0 + eps * fc.eval_coords(u)
        });
        let k = invert_intersection_body(&target_k, p.harmonic_degree, &exp_grid)?;
        let l = invert_intersection_body(&target_l, p.harmonic_degree, &exp_grid)?;
        let vk = volume(&k, &integrator)?.value;
        let vl = volume(&l, &integrator)?.value;
        let gap = vl - vk;
        out.check_above(&format!("volume_gap_{i}"), gap, 1e-9);
        gaps.push(gap);

        if i == 0 {
            // The prescribed intersection bodies are equal-distributed.
            let ks = {
                let dk = s2_distribution(|u| target_k.rho(u), 4096, CdfMeta::default())?;
                let dl = s2_distribution(|u| target_l.rho(u), 4096, CdfMeta::default())?;
                ks_distance(&dk, &dl)
            };
            out.check_below("ks_prescribed_sections", ks, 2e-3);
        }
    }
    let ratio = gaps[1] / gaps[0];
    out.metric("gap_small", gaps[0]);
    out.metric("gap_large", gaps[1]);
    out.check_above("gap_ratio_low", ratio, 3.2);
    out.check_below("gap_ratio_high", ratio, 4.8);
    Ok(out)
}

pub fn projection_pair(p: &Params, artifacts: &mut Artifacts) -> gtomo::Result<Outcome> {
    require(p.eps > 0.0 && p.eps < 1.0 / 3.0, "eps must lie in (0, 1/3)")?;
    require(p.n == 3, "the projection pair scenario runs in dimension 3")?;
    require(p.grid >= 1024, "grid (azimuth) must be at least 1024")?;
    let mut out = Outcome::default();
    // Polar projection bodies of the pair; shadow areas are the reciprocal
    // radial functions.
    let (k1, l1) = ell2_targets(p.eps)?;

    let dk = s2_distribution(
        |u| k1.rho(u).recip(),
        p.grid,
        CdfMeta::new("shadow_area", k1.label(), "s2 grid", None),
    )?;
    let dl = s2_distribution(
        |u| l1.rho(u).recip(),
        p.grid,
        CdfMeta::new("shadow_area", l1.label(), "s2 grid", None),
    )?;
    artifacts.survival_curve("projections_k", &dk)?;
    artifacts.survival_curve("projections_l", &dl)?;
    out.check_below("ks_projections", ks_distance(&dk, &dl), 2e-3);

    // Polar projection bodies share their volume.
    let integrator = Integrator::grid(3, 64)?;
    let v1 = volume(&k1, &integrator)?.value;
    let v2 = volume(&l1, &integrator)?.value;
    out.check_below("polar_projection_volume_gap", (v1 - v2).abs(), 1e-6);

    // Petty products: strict slack for the non-ellipsoidal polar projection
    // body, equality for the ellipsoid. A strictly positive slack certifies
    // that (Pi K)^o is not an ellipsoid, hence neither is K, which is the
    // equality-case certificate forcing |K| != |L|.
    let pk = petty_projection_with(&k1, PettyOptions::default())?;
    let pl = petty_projection_with(
        &l1,
        PettyOptions {
            equality_expected: Some(true),
            ..PettyOptions::default()
        },
    )?;
    out.metric("petty_product_k", pk.lhs);
    out.metric("petty_product_l", pl.lhs);
    out.metric("petty_error_k", pk.numerical_error);
    out.metric("petty_error_l", pl.numerical_error);
    out.check_above("petty_slack_k", pk.slack, 3.0 * pk.numerical_error);
    out.check_below("petty_slack_l", pl.slack.abs(), pl.numerical_error);
    out.check_above(
        "petty_products_differ",
        (pk.lhs - pl.lhs).abs(),
        3.0 * (pk.numerical_error + pl.numerical_error),
    );
    let volumes_differ = pk.slack > 3.0 * pk.numerical_error
        && pl.slack.abs() <= pl.numerical_error
        && (v1 - v2).abs() < 1e-6;
    out.check_above(
        "volume_conclusion",
        if volumes_differ { 1.0 } else { 0.0 },
        0.5,
    );
    Ok(out)
}

/// Random convex perturbation body in dimension three: a traceless
/// quadratic-form perturbation of the ball.
#[allow(clippy::needless_range_loop)]
pub(crate) fn random_convex_body_3d(rng: &mut impl RngCore, tag: usize) -> StarBody {
    loop {
        let mut a = [[0.0_f64; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let v = rng.gen_range(-1.0..1.0);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let tr = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
        for (i, row) in a.iter_mut().enumerate() {
            row[i] -= tr;
        }
        let eps = rng.gen_range(0.03..0.1);
        let power = if rng.gen_bool(0.5) { 1.0 } else { -0.5 };
        let f = SphereFunction::new(3, true, move |u| {
            let mut q = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    q += a[i][j] * u[i] * u[j];
                }
            }
            q
        });
        if let Ok(body) = perturbation_body(&f, eps, power) {
            return body.relabeled(format!("random convex 3d {tag}"));
        }
    }
}

pub fn ellipsoid_dominance(p: &Params, _artifacts: &mut Artifacts) -> gtomo::Result<Outcome> {
    require(p.samples >= 4, "samples (pair count) must be at least 4")?;
    require(p.grid >= 16, "grid (direction polar count) must be at least 16")?;
    let mut out = Outcome::default();
    let mut rng = substream(p.seed, 0x4304);
    let dir_grid = quadrature_grid(3, p.grid)?;
    let integrator = Integrator::grid(3, 48)?;

    let mut verified = 0usize;
    let mut violations = 0usize;
    // Report-only companion: the isomorphic bound max |E| / (L_E^{n/(n-1)} |K|)
    // over the verified dominated pairs.
    let mut max_iso_ratio: f64 = 0.0;
    for i in 0..p.samples {
        let k = random_convex_body_3d(&mut rng, i);
        let semiaxes: Vec<f64> = (0..3).map(|_| rng.gen_range(0.75..1.3)).collect();
        let (a, b, c) = (semiaxes[0], semiaxes[1], semiaxes[2]);

        // Section areas: quadrature for the random body, the closed form
        // for the ellipsoid.
        let k_sections: Vec<f64> = dir_grid
            .nodes()
            .iter()
            .map(|u| section_area(&k, u, 256).expect("section quadrature"))
            .collect();
        let e_sections: Vec<f64> = dir_grid
            .nodes()
            .iter()
            .map(|u| {
                let norm =
                    ((a * u[0]).powi(2) + (b * u[1]).powi(2) + (c * u[2]).powi(2)).sqrt();
                std::f64::consts::PI * a * b * c / norm
            })
            .collect();
        let weights = dir_grid.weights().to_vec();
        let dk = EmpiricalCdf::from_weighted(k_sections, weights.clone(), CdfMeta::default())?;

        // Largest dilation of E whose section distribution stays dominated.
        let dominated_at = |lambda: f64| -> bool {
            let scaled: Vec<f64> = e_sections.iter().map(|s| lambda * lambda * s).collect();
            let de =
                EmpiricalCdf::from_weighted(scaled, weights.clone(), CdfMeta::default()).unwrap();
            dominates(&de, &dk, 0.0)
        };
        let (mut lo, mut hi) = (0.05, 3.0);
        if !dominated_at(lo) {
            continue;
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if dominated_at(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 0.97 * lo;
        if !dominated_at(lambda) {
            continue;
        }
        verified += 1;
        let ve = lambda.powi(3) * 4.0 * std::f64::consts::PI / 3.0 * a * b * c;
        let vk = volume(&k, &integrator)?.value;
        if ve > vk + 1e-6 {
            violations += 1;
        }
        let scaled = StarBody::ellipsoid(&[lambda * a, lambda * b, lambda * c])?;
        let l_e = gtomo::functionals::isotropic_constant_estimate(
            &scaled,
            20_000,
            p.seed ^ (i as u64),
        )?;
        max_iso_ratio = max_iso_ratio.max(ve / (l_e.powf(1.5) * vk));
    }
    out.metric("pairs", p.samples as f64);
    out.metric("isomorphic_bound_max_ratio", max_iso_ratio);
    out.check_above("verified_dominated", verified as f64, p.samples as f64 * 0.9);
    out.check_below("volume_violations", violations as f64, 0.5);
    Ok(out)
}
