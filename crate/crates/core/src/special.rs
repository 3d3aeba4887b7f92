//! Special functions and quadrature primitives: Lanczos gamma, Legendre
//! polynomials, Gauss-Legendre rules, and sphere surface areas.

use crate::error::{GtomoError, Result};

/// Lanczos coefficients (g = 7, 9 terms), relative accuracy ~1e-13.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the Gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    if x < 0.5 {
        // Reflection keeps the series argument away from zero.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Gamma function on the real line away from the poles at 0, -1, -2, ...
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 {
        if x < 0.5 {
            let pi = std::f64::consts::PI;
            pi / ((pi * x).sin() * gamma(1.0 - x))
        } else {
            ln_gamma(x).exp()
        }
    } else {
        assert!(
            x.fract() != 0.0,
            "gamma evaluated at a non-positive integer {x}"
        );
        // Recurrence walks the argument into the positive half-line.
        gamma(x + 1.0) / x
    }
}

/// Surface area of the unit sphere S^{n-1} in R^n.
pub fn sphere_surface(n: usize) -> f64 {
    assert!(n >= 1);
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

/// Volume of the unit ball B^n in R^n.
pub fn ball_volume(n: usize) -> f64 {
    sphere_surface(n) / n as f64
}

/// Legendre polynomial P_m(x) by the three-term recurrence.
pub fn legendre_p(m: usize, x: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => x,
        _ => {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// Nodes and weights of the k-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration from the Chebyshev initial guess; symmetric pairs are
/// filled from one half.
pub fn gauss_legendre(k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if k == 0 {
        return Err(GtomoError::InvalidParameter(
            "Gauss-Legendre rule needs at least one node".into(),
        ));
    }
    let n = k;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Fully normalized associated Legendre values Pbar_m^j(cos phi) for all
/// 0 <= j <= m <= max_degree, packed row by row (degree m at offset
/// m*(m+1)/2). Normalized so that the real spherical harmonics built from
/// them are orthonormal with respect to the uniform probability measure.
pub fn normalized_assoc_legendre(max_degree: usize, cos_phi: f64) -> Vec<f64> {
    let s = (1.0 - cos_phi * cos_phi).max(0.0).sqrt();
    let c = cos_phi;
    let len = (max_degree + 1) * (max_degree + 2) / 2;
    let mut p = vec![0.0; len];
    let idx = |m: usize, j: usize| m * (m + 1) / 2 + j;
    p[idx(0, 0)] = 1.0;
    if max_degree == 0 {
        return p;
    }
    // Diagonal, then first off-diagonal, then the general recurrence.
    for m in 1..=max_degree {
        let mf = m as f64;
        p[idx(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[idx(m - 1, m - 1)];
    }
    for m in 1..=max_degree {
        let mf = m as f64;
        p[idx(m, m - 1)] = (2.0 * mf + 1.0).sqrt() * c * p[idx(m - 1, m - 1)];
    }
    for m in 2..=max_degree {
        let mf = m as f64;
        for j in 0..=(m - 2) {
            let jf = j as f64;
            let a = ((4.0 * mf * mf - 1.0) / (mf * mf - jf * jf)).sqrt();
            let b = (((2.0 * mf + 1.0) * (mf - 1.0 + jf) * (mf - 1.0 - jf))
                / ((2.0 * mf - 3.0) * (mf * mf - jf * jf)))
                .sqrt();
            p[idx(m, j)] = a * c * p[idx(m - 1, j)] - b * p[idx(m - 2, j)];
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_matches_known_values() {
        assert_relative_eq!(gamma(0.5), std::f64::consts::PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(1.0), 1.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(2.25), 1.133_003_096_319_346_3, max_relative = 1e-12);
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-13);
        // Quarter-integer pair used by the fractional-derivative identities.
        assert_relative_eq!(gamma(0.25) / gamma(1.25), 4.0, max_relative = 1e-12);
        // Negative argument through the recurrence.
        assert_relative_eq!(
            gamma(-0.5),
            -2.0 * std::f64::consts::PI.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn sphere_surfaces() {
        let pi = std::f64::consts::PI;
        assert_relative_eq!(sphere_surface(1), 2.0, max_relative = 1e-13);
        assert_relative_eq!(sphere_surface(2), 2.0 * pi, max_relative = 1e-13);
        assert_relative_eq!(sphere_surface(3), 4.0 * pi, max_relative = 1e-13);
        assert_relative_eq!(sphere_surface(4), 2.0 * pi * pi, max_relative = 1e-13);
        assert_relative_eq!(ball_volume(3), 4.0 * pi / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16).unwrap();
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-14);
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert_relative_eq!(m2, 2.0 / 3.0, max_relative = 1e-13);
        let m6: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert_relative_eq!(m6, 2.0 / 7.0, max_relative = 1e-12);
        let odd: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(5)).sum();
        assert!(odd.abs() < 1e-14);
    }

    #[test]
    fn legendre_values() {
        assert_relative_eq!(legendre_p(2, 0.0), -0.5);
        assert_relative_eq!(legendre_p(4, 0.0), 3.0 / 8.0);
        assert_relative_eq!(legendre_p(3, 0.5), 0.5 * (5.0 * 0.125 - 3.0 * 0.5));
    }

    #[test]
    fn normalized_legendre_orthonormal_on_gl_grid() {
        // Columns of fixed order j are orthonormal against the polar weight.
        let l = 8;
        let (x, w) = gauss_legendre(2 * l).unwrap();
        for j in 0..=l {
            for m1 in j..=l {
                for m2 in j..=l {
                    let mut acc = 0.0;
                    for (xi, wi) in x.iter().zip(&w) {
                        let p = normalized_assoc_legendre(l, *xi);
                        let idx = |m: usize, j: usize| m * (m + 1) / 2 + j;
                        acc += 0.5 * wi * p[idx(m1, j)] * p[idx(m2, j)];
                    }
                    let expect = if m1 == m2 { 1.0 } else { 0.0 };
                    assert!(
                        (acc - expect).abs() < 1e-12,
                        "j={j} m1={m1} m2={m2} got {acc}"
                    );
                }
            }
        }
    }
}
