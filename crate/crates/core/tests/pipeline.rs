//! Cross-module pipeline checks: constructing bodies from prescribed
//! intersection bodies and verifying the section machinery against the
//! closed forms they came from.

use gtomo::body::{planar_seed, PlanarSeed, StarBody};
use gtomo::dist::{distribution_of, ks_distance, CdfMeta, DirectionSampler};
use gtomo::functionals::{section_area, volume, Integrator};
use gtomo::harmonic::{intersection_body_multiplier, invert_intersection_body};
use gtomo::sphere::{quadrature_grid, sample_sphere, split};

const PI: f64 = std::f64::consts::PI;

fn ell2_targets(eps: f64) -> (StarBody, StarBody) {
    let k0 = planar_seed(PlanarSeed::K0, eps).unwrap();
    let e0 = planar_seed(PlanarSeed::E0, eps).unwrap();
    let b1 = StarBody::ball(1, 1.0).unwrap();
    (StarBody::l2_sum(&k0, &b1), StarBody::l2_sum(&e0, &b1))
}

#[test]
fn l2_sum_target_matches_split_form() {
    let eps = 0.1;
    let (target_k, _) = ell2_targets(eps);
    for theta in sample_sphere(3, 200, 4).unwrap() {
        let d = split(&theta).unwrap();
        let expect = (1.0 + eps * (d.s * (2.0 * d.ubar).sin()).powi(2))
            .sqrt()
            .recip();
        assert!((target_k.rho(&theta) - expect).abs() < 1e-12);
    }
}

#[test]
fn inversion_reconstructs_section_function() {
    // Reconstruct K from its prescribed intersection body and check that
    // direct section quadrature recovers the closed form.
    let eps = 0.1;
    let (target_k, target_l) = ell2_targets(eps);
    let grid = quadrature_grid(3, 64).unwrap();
    let k = invert_intersection_body(&target_k, 24, &grid).unwrap();
    let l = invert_intersection_body(&target_l, 24, &grid).unwrap();

    let mut sup: f64 = 0.0;
    for theta in sample_sphere(3, 100, 12).unwrap() {
        let s = section_area(&k, &theta, 512).unwrap();
        sup = sup.max((s - target_k.rho(&theta)).abs());
    }
    assert!(sup < 2e-3, "section vs closed form sup {sup}");

    // Round trip through the multiplier route.
    let ik = intersection_body_multiplier(&k, 24, &grid).unwrap();
    let il = intersection_body_multiplier(&l, 24, &grid).unwrap();
    let mut rt: f64 = 0.0;
    for u in grid.nodes() {
        rt = rt.max((ik.rho(u) - target_k.rho(u)).abs());
        rt = rt.max((il.rho(u) - target_l.rho(u)).abs());
    }
    assert!(rt < 1e-3, "round-trip sup {rt}");
}

#[test]
fn prescribed_section_distributions_agree() {
    // The theorem pair has equal section-area distributions; with the
    // azimuth grid the residual is pure tie counting, 2/resolution.
    let (target_k, target_l) = ell2_targets(0.1);
    let grid = gtomo::sphere::sphere_product_grid(128, 4096).unwrap();
    let meta = CdfMeta::default();
    let dk = gtomo::dist::EmpiricalCdf::from_function_grid(|u| target_k.rho(u), &grid, meta.clone())
        .unwrap();
    let dl =
        gtomo::dist::EmpiricalCdf::from_function_grid(|u| target_l.rho(u), &grid, meta).unwrap();
    let ks = ks_distance(&dk, &dl);
    assert!(ks < 2e-3, "KS {ks}");
}

#[test]
fn reconstructed_volumes_differ_but_intersection_volumes_match() {
    let (target_k, target_l) = ell2_targets(0.1);
    let grid = quadrature_grid(3, 64).unwrap();
    let k = invert_intersection_body(&target_k, 24, &grid).unwrap();
    let l = invert_intersection_body(&target_l, 24, &grid).unwrap();
    let integ = Integrator::grid(3, 64).unwrap();
    // Prescribed intersection bodies have identical volumes.
    let vik = volume(&target_k, &integ).unwrap().value;
    let vil = volume(&target_l, &integ).unwrap().value;
    assert!((vik - vil).abs() < 1e-6, "|IK|-|IL| = {}", (vik - vil).abs());
    // The bodies themselves do not.
    let vk = volume(&k, &integ).unwrap().value;
    let vl = volume(&l, &integ).unwrap().value;
    assert!(
        (vl - vk).abs() > 1e-5,
        "volume gap {} unexpectedly small",
        (vl - vk).abs()
    );
}

#[test]
fn planar_intersection_body_distribution() {
    // In the plane, S_K determines the radial distribution: sections are
    // chords, so the K0/E0 pair transfers verbatim.
    let k0 = planar_seed(PlanarSeed::K0, 0.1).unwrap();
    let e0 = planar_seed(PlanarSeed::E0, 0.1).unwrap();
    let sampler = DirectionSampler::Grid { resolution: 4096 };
    let meta = CdfMeta::default();
    let dk = distribution_of(
        2,
        |u| section_area(&k0, u, 0).unwrap(),
        &sampler,
        meta.clone(),
    )
    .unwrap();
    let de = distribution_of(2, |u| section_area(&e0, u, 0).unwrap(), &sampler, meta).unwrap();
    let ks = ks_distance(&dk, &de);
    assert!(ks < 1e-3, "KS {ks}");
}

#[test]
fn fractional_derivative_routes_agree_off_the_ball() {
    // Slice quadrature with the regularized pairing against the harmonic
    // multiplier route, on a genuinely aspherical body and both signs of q.
    let p2 = gtomo::body::SphereFunction::p2_zonal();
    let body = gtomo::body::perturbation_body(&p2, 0.05, 1.0).unwrap();
    let grid = quadrature_grid(3, 48).unwrap();
    let dirs = [
        gtomo::sphere::UnitVector::axis(3, 2),
        gtomo::sphere::UnitVector::normalized(vec![1.0, 0.5, 0.8]).unwrap(),
    ];
    for q in [-0.5, 0.3, 0.5] {
        for theta in &dirs {
            let quad = gtomo::functionals::frac_derivative(&body, theta, q, 512).unwrap();
            let fourier =
                gtomo::harmonic::fractional_derivative_fourier(&body, theta, q, 16, &grid)
                    .unwrap();
            assert!(
                (quad - fourier).abs() < 1e-4,
                "q = {q}: {quad} vs {fourier}"
            );
        }
    }
}

#[test]
fn honest_plane_sections_of_an_ellipsoid_match_the_exact_law() {
    // For E = diag(a, b, a, a) with pi a^2 = (1+eps)^{-1/2} and
    // b = a sqrt(1+eps), the area of E /\ H over a 2-plane H is exactly
    // (1 + eps (1 - |P_H e2|^2))^{-1/2}; the in-plane polar quadrature
    // must reproduce it to rounding.
    let eps = 0.1;
    let a = (1.0_f64 + eps).powf(-0.25) / PI.sqrt();
    let b = (1.0_f64 + eps).powf(0.25) / PI.sqrt();
    let e4 = StarBody::ellipsoid(&[a, b, a, a]).unwrap();
    let subs = gtomo::sphere::sample_grassmannian(4, 2, 500, 99).unwrap();
    for h in &subs {
        let quad = gtomo::functionals::subspace_section_area(&e4, h, 96).unwrap();
        let c2: f64 = h.frame().iter().map(|v| v[1] * v[1]).sum();
        let law = (1.0 + eps * (1.0 - c2)).powf(-0.5);
        assert!((quad - law).abs() < 1e-12, "{quad} vs {law}");
    }
}

#[test]
fn ball_step_distributions() {
    let r: f64 = 1.0;
    let ball = StarBody::ball(3, r).unwrap();
    let sections = gtomo::dist::section_distribution(
        &ball,
        &DirectionSampler::Grid { resolution: 32 },
        256,
    )
    .unwrap();
    assert!((sections.min() - PI * r * r).abs() < 1e-10);
    assert!(sections.support_width() < 1e-12);
    let s = |t: f64| sections.survival(t);
    assert!((s(PI * r * r - 1e-6) - 1.0).abs() < 1e-12);
    assert_eq!(s(PI * r * r + 1e-6), 0.0);
}
