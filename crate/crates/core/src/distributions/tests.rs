use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use super::*;
use crate::linalg::{sym_vec, SymMatrix};
use crate::manifolds::pd_log_riemannian_density_wrt_entries;

fn pd(n: usize, data: Vec<f64>) -> PdMatrix {
    PdMatrix::from_row_major(n, data).unwrap()
}

fn random_spd(rng: &mut SymRng, d: usize, lo: f64, hi: f64) -> SymMatrix {
    // Q diag(λ) Qᵀ with eigenvalues uniform in [lo, hi] and a random rotation.
    let a = SymMatrix::from_fn(d, |_, _| rng.normal()).unwrap();
    let q = crate::linalg::sym_eig(&a).unwrap();
    let lambdas: Vec<f64> = (0..d).map(|_| lo + (hi - lo) * rng.uniform()).collect();
    SymMatrix::from_fn(d, |i, j| {
        (0..d).map(|k| q.vector_entry(i, k) * lambdas[k] * q.vector_entry(j, k)).sum()
    })
    .unwrap()
}

#[test]
fn standard_normal_at_zero() {
    let g = GaussianParams::standard(1);
    assert_abs_diff_eq!(g.log_density(&[0.0]).unwrap(), -0.918939, epsilon = 1e-6);
}

#[test]
fn bivariate_normal_value() {
    let g = GaussianParams::standard(2);
    assert_abs_diff_eq!(g.log_density(&[1.0, 0.0]).unwrap().exp(), 0.096532, epsilon = 1e-6);
}

#[test]
fn correlated_gaussian_matches_closed_form() {
    let (s1, s2, rho) = (1.5f64, 0.7f64, 0.6f64);
    let cov = SymMatrix::from_row_major(2, vec![s1 * s1, rho * s1 * s2, rho * s1 * s2, s2 * s2]).unwrap();
    let g = GaussianParams::new(vec![0.3, -0.2], cov).unwrap();
    let (x, y) = ((1.0 - 0.3) / s1, (0.5 + 0.2) / s2);
    let q = (x * x - 2.0 * rho * x * y + y * y) / (1.0 - rho * rho);
    let want = -(2.0 * PI * s1 * s2 * (1.0 - rho * rho).sqrt()).ln() - 0.5 * q;
    assert_abs_diff_eq!(g.log_density(&[1.0, 0.5]).unwrap(), want, epsilon = 1e-12);
}

#[test]
fn gaussian_rejects_singular_and_mismatched() {
    let singular = SymMatrix::from_row_major(2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
    assert!(GaussianParams::new(vec![0.0, 0.0], singular).is_err());
    assert!(GaussianParams::new(vec![0.0], SymMatrix::identity(2)).is_err());
}

#[test]
fn poincare_density_example() {
    let p = LogGaussianParams::new(Manifold::PoincareBall(2), vec![0.0, 0.0], SymMatrix::identity(2)).unwrap();
    let f = p.log_density(&ManifoldPoint::Vector(vec![0.5, 0.0])).unwrap().exp();
    assert_abs_diff_eq!(f, 0.071720, epsilon = 1e-6);
    let r = 3.0f64.ln();
    let hand = (-0.5 * r * r).exp() / (2.0 * PI) * r / r.sinh();
    assert_abs_diff_eq!(f, hand, epsilon = 1e-14);
}

#[test]
fn density_at_base_point() {
    let mut rng = SymRng::new(Seed(1));
    for m in [Manifold::Pd(2), Manifold::PoincareBall(3), Manifold::SiegelDisk(1)] {
        let sigma = random_spd(&mut rng, m.dim(), 0.3, 2.0);
        let det = crate::linalg::Cholesky::factor(&sigma).unwrap().log_det();
        let p = LogGaussianParams::new(m, vec![0.0; m.dim()], sigma).unwrap();
        let want = -0.5 * (m.dim() as f64 * (2.0 * PI).ln() + det);
        assert_abs_diff_eq!(p.log_density(&m.base_point()).unwrap(), want, epsilon = 1e-12);
    }
}

#[test]
fn euclidean_reduces_to_gaussian_exactly() {
    let mut rng = SymRng::new(Seed(2));
    let sigma = random_spd(&mut rng, 3, 0.5, 2.0);
    let mu = vec![0.1, -0.4, 2.0];
    let g = GaussianParams::new(mu.clone(), sigma.clone()).unwrap();
    let lg = LogGaussianParams::new(Manifold::Euclidean(3), mu, sigma).unwrap();
    for _ in 0..20 {
        let x = rng.normal_vec(3);
        assert_eq!(lg.log_density(&ManifoldPoint::Vector(x.clone())).unwrap(), g.log_density(&x).unwrap());
    }
}

/// Midpoint quadrature of `f · 4/(1−ρ²)²` over the disk `ρ ≤ 0.999`.
fn poincare_mass(p: &LogGaussianParams, radial: usize, angular: usize) -> f64 {
    let r_max = 0.999;
    let dr = r_max / radial as f64;
    let dt = 2.0 * PI / angular as f64;
    let mut total = 0.0;
    for i in 0..radial {
        let rho = (i as f64 + 0.5) * dr;
        let metric = 4.0 / ((1.0 - rho * rho) * (1.0 - rho * rho));
        let mut ring = 0.0;
        for k in 0..angular {
            let t = (k as f64 + 0.5) * dt;
            let x = ManifoldPoint::Vector(vec![rho * t.cos(), rho * t.sin()]);
            ring += p.log_density(&x).unwrap().exp();
        }
        total += ring * metric * rho * dr * dt;
    }
    total
}

#[test]
fn log_gaussian_integrates_to_one_on_poincare_disk() {
    let mut rng = SymRng::new(Seed(3));
    for _ in 0..5 {
        let dir = rng.normal_vec(2);
        let n = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
        let len = rng.uniform();
        let mu = vec![dir[0] / n * len, dir[1] / n * len];
        let sigma = random_spd(&mut rng, 2, 0.25, 1.0);
        let p = LogGaussianParams::new(Manifold::PoincareBall(2), mu, sigma).unwrap();
        let mass = poincare_mass(&p, 500, 360);
        assert!((mass - 1.0).abs() <= 1e-3, "mass {mass}");
    }
}

#[test]
fn inverted_jacobian_would_not_normalize() {
    // Dividing by J instead of multiplying visibly breaks normalization.
    let p = LogGaussianParams::new(Manifold::PoincareBall(2), vec![0.5, 0.0], SymMatrix::identity(2)).unwrap();
    let ball = Manifold::PoincareBall(2);
    let (radial, angular, r_max) = (400, 180, 0.999);
    let dr = r_max / radial as f64;
    let dt = 2.0 * PI / angular as f64;
    let mut total = 0.0;
    for i in 0..radial {
        let rho = (i as f64 + 0.5) * dr;
        let metric = 4.0 / ((1.0 - rho * rho) * (1.0 - rho * rho));
        for k in 0..angular {
            let t = (k as f64 + 0.5) * dt;
            let x = ManifoldPoint::Vector(vec![rho * t.cos(), rho * t.sin()]);
            let (v, lj) = ball.log_map_with_volume(&x).unwrap();
            let wrong = p.tangent().log_density(&v).unwrap() - lj;
            total += wrong.exp() * metric * rho * dr * dt;
        }
    }
    assert!(total > 1.5, "{total}");
}

#[test]
fn degenerate_covariance_collapses_to_mean() {
    let m = Manifold::Pd(2);
    let mu = vec![0.3, -0.1, 0.2];
    let p = LogGaussianParams::new(m, mu.clone(), SymMatrix::identity(3).scale(1e-12)).unwrap();
    let centre = m.exp_map(&mu).unwrap();
    for x in p.sample(50, Seed(4)).unwrap() {
        let d = m.geodesic_distance(&x, &centre).unwrap();
        assert!(d < 1e-5, "{d}");
    }
}

#[test]
fn sampling_is_deterministic() {
    let p = LogGaussianParams::new(Manifold::SiegelDisk(2), vec![0.1; 6], SymMatrix::identity(6)).unwrap();
    assert_eq!(p.sample(30, Seed(5)).unwrap(), p.sample(30, Seed(5)).unwrap());
    assert_ne!(p.sample(30, Seed(5)).unwrap(), p.sample(30, Seed(6)).unwrap());
}

#[test]
fn sample_size_zero_is_rejected() {
    let p = LogGaussianParams::new(Manifold::Pd(2), vec![0.0; 3], SymMatrix::identity(3)).unwrap();
    assert!(p.sample(0, Seed(1)).is_err());
}

#[test]
fn overflowing_draws_are_resampled() {
    // Tangent radius above ~57 leaves the representable ball; σ = 25 hits that often.
    let p = LogGaussianParams::new(Manifold::PoincareBall(1), vec![0.0], SymMatrix::identity(1).scale(625.0)).unwrap();
    let s = p.sample_with(2000, &mut SymRng::new(Seed(7))).unwrap();
    assert_eq!(s.points.len(), 2000);
    assert!(s.resampled > 0);
    let hopeless =
        LogGaussianParams::new(Manifold::PoincareBall(1), vec![500.0], SymMatrix::identity(1)).unwrap();
    assert!(matches!(hopeless.sample(1, Seed(1)), Err(Error::TangentTooLarge(_))));
}

#[test]
fn pushforward_moments_match() {
    let n = 100_000;
    let mut rng = SymRng::new(Seed(8));
    let m = Manifold::Pd(2);
    let mu = vec![0.5, -0.3, 0.2];
    let sigma = random_spd(&mut rng, 3, 0.25, 1.0);
    let p = LogGaussianParams::new(m, mu.clone(), sigma.clone()).unwrap();
    let logs: Vec<Vec<f64>> = p
        .sample(n, Seed(9))
        .unwrap()
        .iter()
        .map(|x| m.log_map(x).unwrap().into_vec())
        .collect();
    let nf = n as f64;
    let mean: Vec<f64> = (0..3).map(|j| logs.iter().map(|v| v[j]).sum::<f64>() / nf).collect();
    for j in 0..3 {
        let se = (sigma.get(j, j) / nf).sqrt();
        assert!((mean[j] - mu[j]).abs() <= 3.0 * se, "mean {j}");
    }
    for a in 0..3 {
        for b in 0..3 {
            let cov = logs.iter().map(|v| (v[a] - mean[a]) * (v[b] - mean[b])).sum::<f64>() / nf;
            // Var of a product of jointly normal coordinates: Σaa Σbb + Σab².
            let var = sigma.get(a, a) * sigma.get(b, b) + sigma.get(a, b).powi(2);
            assert!((cov - sigma.get(a, b)).abs() <= 3.0 * (var / nf).sqrt(), "cov {a}{b}");
        }
    }
}

#[test]
fn standard_pd_sample_mean_near_zero() {
    let n = 100_000;
    let m = Manifold::Pd(2);
    let p = LogGaussianParams::new(m, vec![0.0; 3], SymMatrix::identity(3)).unwrap();
    let mut sums = [0.0; 3];
    for x in p.sample(n, Seed(10)).unwrap() {
        let v = m.log_map(&x).unwrap();
        for j in 0..3 {
            sums[j] += v[j];
        }
    }
    for s in sums {
        assert!((s / n as f64).abs() <= 3.0 * (1.0 / n as f64).sqrt());
    }
}

#[test]
fn gaussian_sample_mean() {
    let g = GaussianParams::new(vec![1.0, -2.0], SymMatrix::diagonal(&[4.0, 0.25])).unwrap();
    let n = 50_000;
    let xs = g.sample(n, Seed(11));
    for (j, sd) in [(0, 2.0), (1, 0.5)] {
        let mean = xs.iter().map(|x| x[j]).sum::<f64>() / n as f64;
        assert!((mean - g.mu()[j]).abs() <= 3.0 * sd / (n as f64).sqrt());
    }
}

#[test]
fn multivariate_gamma_values() {
    assert_abs_diff_eq!(log_multivariate_gamma(2, 1.0), PI.ln(), epsilon = 1e-14);
    assert_abs_diff_eq!(log_multivariate_gamma(1, 4.0), 6.0f64.ln(), epsilon = 1e-14);
    // Large arguments stay finite.
    assert!(log_multivariate_gamma(3, 500.0).is_finite());
}

#[test]
fn wishart_example() {
    let w = WishartParams::new(PdMatrix::identity(2), 2.0).unwrap();
    let f = w.log_density(&PdMatrix::identity(2)).unwrap().exp();
    assert_abs_diff_eq!(f, 0.029275, epsilon = 1e-6);
    assert_abs_diff_eq!(f, (-1.0f64).exp() / (4.0 * PI), epsilon = 1e-15);
}

#[test]
fn wishart_rejects_low_dof() {
    assert!(WishartParams::new(PdMatrix::identity(3), 2.0).is_err());
    assert!(InvWishartParams::new(PdMatrix::identity(2), 0.5).is_err());
    assert!(InvWishartParams::new(PdMatrix::identity(2), 2.5).unwrap().mean().is_err());
}

#[test]
fn wishart_scale_consistency() {
    let v = pd(2, vec![1.3, 0.2, 0.2, 0.6]);
    let x = pd(2, vec![2.0, -0.4, -0.4, 1.1]);
    for c in [0.3, 2.0, 7.5] {
        let a = WishartParams::new(v.clone(), 4.5).unwrap().log_density(&x).unwrap();
        let b = WishartParams::new(PdMatrix::new(v.scale(c)).unwrap(), 4.5)
            .unwrap()
            .log_density(&PdMatrix::new(x.scale(c)).unwrap())
            .unwrap();
        assert_abs_diff_eq!(a, b + 3.0 * c.ln(), epsilon = 1e-12);
    }
}

#[test]
fn inverse_wishart_duality() {
    // Inversion on PD(m) has Jacobian |X|^{−(m+1)} on the entries.
    let v = pd(2, vec![1.3, 0.2, 0.2, 0.6]);
    let v_inv = Cholesky::factor(&v).unwrap().inverse();
    let mut rng = SymRng::new(Seed(12));
    for _ in 0..20 {
        let x = PdMatrix::new(random_spd(&mut rng, 2, 0.2, 3.0)).unwrap();
        let cx = Cholesky::factor(&x).unwrap();
        let x_inv = cx.inverse();
        let iw = InvWishartParams::new(v.clone(), 5.0).unwrap().log_density(&x).unwrap();
        let w = WishartParams::new(v_inv.clone(), 5.0).unwrap().log_density(&x_inv).unwrap();
        assert_abs_diff_eq!(iw, w - 3.0 * cx.log_det(), epsilon = 1e-10);
    }
}

#[test]
fn inverse_wishart_orthogonal_invariance() {
    let (s, c) = 0.7f64.sin_cos();
    let r = SymMatrix::from_row_major(2, vec![c, s, s, -c]).unwrap();
    let v = pd(2, vec![1.3, 0.2, 0.2, 0.6]);
    let x = pd(2, vec![0.4, 0.1, 0.1, 0.9]);
    let rv = PdMatrix::new(v.sandwich(&r)).unwrap();
    let rx = PdMatrix::new(x.sandwich(&r)).unwrap();
    let a = InvWishartParams::new(v, 6.0).unwrap().log_density(&x).unwrap();
    let b = InvWishartParams::new(rv, 6.0).unwrap().log_density(&rx).unwrap();
    assert_abs_diff_eq!(a, b, epsilon = 1e-12);
}

#[test]
fn kernels_are_centred() {
    let x = pd(2, vec![2.0, 0.3, 0.3, 0.5]);
    let w = WishartParams::kernel(&x, 9.0).unwrap();
    assert!(w.mean().sub(&x).frobenius_norm() < 1e-14);
    let iw = InvWishartParams::kernel(&x, 9.0).unwrap();
    assert_eq!(iw.dof(), 12.0);
    assert!(iw.mean().unwrap().sub(&x).frobenius_norm() < 1e-14);
}

#[test]
fn wishart_sample_mean() {
    let v = pd(2, vec![2.0, 0.5, 0.5, 1.0]);
    let nu = 5.0;
    let w = WishartParams::new(v.clone(), nu).unwrap();
    let mut rng = SymRng::new(Seed(13));
    let n = 20_000;
    let mut acc = SymMatrix::zeros(2);
    for _ in 0..n {
        acc = acc.add(&w.draw(&mut rng));
    }
    let mean = acc.scale(1.0 / n as f64);
    for i in 0..2 {
        for j in 0..2 {
            let var = nu * (v.get(i, j).powi(2) + v.get(i, i) * v.get(j, j));
            let tol = 4.0 * (var / n as f64).sqrt();
            assert!((mean.get(i, j) - nu * v.get(i, j)).abs() <= tol, "{i}{j}");
        }
    }
}

#[test]
fn inverse_wishart_sample_mean() {
    let iw = InvWishartParams::new(PdMatrix::identity(2), 6.0).unwrap();
    let mut rng = SymRng::new(Seed(14));
    let n = 40_000;
    let mut acc = SymMatrix::zeros(2);
    for _ in 0..n {
        acc = acc.add(&iw.draw(&mut rng));
    }
    let mean = acc.scale(1.0 / n as f64);
    let third = SymMatrix::identity(2).scale(1.0 / 3.0);
    assert!(mean.sub(&third).frobenius_norm() < 0.02, "{mean:?}");
}

/// `∫ w dX` by importance sampling from a wide log-Gaussian on PD(2).
fn wishart_mass(log_w: impl Fn(&PdMatrix) -> f64, centre: &[f64], spread: f64, n: usize, seed: u64) -> f64 {
    let m = Manifold::Pd(2);
    let q = LogGaussianParams::new(m, centre.to_vec(), SymMatrix::identity(3).scale(spread * spread)).unwrap();
    let mut total = 0.0;
    for x in q.sample(n, Seed(seed)).unwrap() {
        let p = x.as_pd().unwrap();
        // q is a Riemannian density; convert the entry density w to it.
        let log_ratio = log_w(p) - pd_log_riemannian_density_wrt_entries(p).unwrap() - q.log_density(&x).unwrap();
        total += log_ratio.exp();
    }
    total / n as f64
}

#[test]
fn wishart_normalizes_by_monte_carlo() {
    let v = pd(2, vec![1.0, 0.3, 0.3, 0.8]);
    let w = WishartParams::new(v.clone(), 6.0).unwrap();
    let centre = sym_vec(&crate::linalg::mat_log(&PdMatrix::new(v.scale(6.0)).unwrap()).unwrap()).into_vec();
    let mass = wishart_mass(|x| w.log_density(x).unwrap(), &centre, 1.0, 200_000, 15);
    assert!((mass - 1.0).abs() <= 0.02, "{mass}");

    let iw = InvWishartParams::new(v.clone(), 7.0).unwrap();
    let centre = sym_vec(&crate::linalg::mat_log(&PdMatrix::new(v.scale(0.25)).unwrap()).unwrap()).into_vec();
    let mass = wishart_mass(|x| iw.log_density(x).unwrap(), &centre, 1.0, 200_000, 16);
    assert!((mass - 1.0).abs() <= 0.02, "{mass}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn log_density_tangent_agrees(seed in any::<u64>()) {
        let mut rng = SymRng::new(Seed(seed));
        for m in [Manifold::Pd(2), Manifold::PoincareBall(3), Manifold::SiegelDisk(2)] {
            let d = m.dim();
            let mu = rng.normal_vec(d);
            let p = LogGaussianParams::new(m, mu, random_spd(&mut rng, d, 0.2, 1.5)).unwrap();
            let v: Vec<f64> = rng.normal_vec(d);
            let x = m.exp_map(&v).unwrap();
            let a = p.log_density(&x).unwrap();
            let b = p.log_density_tangent(&v).unwrap();
            prop_assert!((a - b).abs() <= 1e-8 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn log_density_is_below_tangent_density(seed in any::<u64>()) {
        // J ≤ 1 so the manifold density never exceeds the tangent Gaussian.
        let mut rng = SymRng::new(Seed(seed));
        let m = Manifold::Pd(3);
        let p = LogGaussianParams::new(m, rng.normal_vec(6), SymMatrix::identity(6)).unwrap();
        let v = rng.normal_vec(6);
        prop_assert!(p.log_density_tangent(&v).unwrap() <= p.tangent().log_density(&v).unwrap() + 1e-15);
    }
}
