use alloc::vec;
use alloc::vec::Vec;

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use proptest::prelude::*;

use super::*;
use crate::linalg::{sym_vec, SymMatrix};
use crate::rng::{Seed, SymRng};

const ORACLE_STEP: f64 = 1e-5;
const ORACLE_TOL: f64 = 1e-4;

fn pd_diag(d: &[f64]) -> ManifoldPoint {
    ManifoldPoint::Pd(PdMatrix::new(SymMatrix::diagonal(d)).unwrap())
}

fn random_tangent(rng: &mut SymRng, m: &Manifold, scale: f64) -> Vec<f64> {
    rng.normal_vec(m.dim()).into_iter().map(|c| c * scale).collect()
}

#[test]
fn pd2_volume_example() {
    let e2 = 2.0f64.exp();
    let j = Manifold::Pd(2).volume_factor(&pd_diag(&[e2, 1.0])).unwrap();
    assert_abs_diff_eq!(j, 0.850918, epsilon = 1e-6);
    assert_abs_diff_eq!(j, 1.0 / 1.0f64.sinh(), epsilon = 1e-12);
}

#[test]
fn pd3_volume_example() {
    let e = 1.0f64.exp();
    let j = Manifold::Pd(3).volume_factor(&pd_diag(&[e * e, e, 1.0])).unwrap();
    let product = (0.5 / 0.5f64.sinh()).powi(2) / 1.0f64.sinh();
    assert_abs_diff_eq!(j, product, epsilon = 1e-12);
    assert_abs_diff_eq!(j, 0.783418, epsilon = 1e-6);
}

#[test]
fn poincare_log_example() {
    let ball = Manifold::PoincareBall(2);
    let x = ManifoldPoint::Vector(vec![0.5, 0.0]);
    let (v, lj) = ball.log_map_with_volume(&x).unwrap();
    assert_abs_diff_eq!(v[0], 1.098612, epsilon = 1e-6);
    assert_abs_diff_eq!(v[1], 0.0);
    assert_abs_diff_eq!(lj.exp(), 0.823959, epsilon = 1e-6);
}

#[test]
fn siegel_order_one_example() {
    let z = siegel_point(1, &[(0.5, 0.0)]).unwrap();
    let j = Manifold::SiegelDisk(1).volume_factor(&ManifoldPoint::Siegel(z)).unwrap();
    assert_abs_diff_eq!(j, 0.823959, epsilon = 1e-6);
}

#[test]
fn volume_factor_is_one_at_base_point() {
    for m in [Manifold::Pd(3), Manifold::PoincareBall(4), Manifold::SiegelDisk(2), Manifold::Euclidean(2)] {
        assert_eq!(m.volume_factor(&m.base_point()).unwrap(), 1.0);
    }
}

#[test]
fn log_x_over_sinh_branches_agree() {
    for a in [1e-3 - 1e-12, 1e-3, 0.5, 3.0f64] {
        let direct = (a / a.sinh()).ln();
        assert_abs_diff_eq!(log_x_over_sinh(a), direct, epsilon = 1e-13);
        assert_eq!(log_x_over_sinh(-a), log_x_over_sinh(a));
    }
    assert_eq!(log_x_over_sinh(0.0), 0.0);
    // Large arguments stay finite where sinh overflows.
    assert_abs_diff_eq!(log_x_over_sinh(800.0), 800f64.ln() - 800.0 + core::f64::consts::LN_2, epsilon = 1e-9);
}

fn oracle_agreement(m: Manifold, scale: f64, seed: u64) {
    let mut rng = SymRng::new(Seed(seed));
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let v = random_tangent(&mut rng, &m, scale);
        let closed = m.log_volume_factor_tangent(&v).unwrap().exp();
        let numeric = numeric_volume_factor(&m, &v, ORACLE_STEP).unwrap();
        worst = worst.max((closed - numeric).abs() / closed.max(1e-300));
        let via_point = m.volume_factor(&m.exp_map(&v).unwrap()).unwrap();
        assert!((via_point - closed).abs() <= 1e-8 * closed.max(1.0), "{m}: {via_point} vs {closed}");
    }
    assert!(worst <= ORACLE_TOL, "{m}: worst relative deviation {worst}");
}

#[test]
fn oracle_matches_pd() {
    oracle_agreement(Manifold::Pd(2), 0.8, 1);
    oracle_agreement(Manifold::Pd(3), 0.6, 2);
}

#[test]
fn oracle_matches_poincare() {
    oracle_agreement(Manifold::PoincareBall(2), 1.0, 3);
    oracle_agreement(Manifold::PoincareBall(5), 0.5, 4);
}

#[test]
fn oracle_matches_siegel() {
    oracle_agreement(Manifold::SiegelDisk(1), 1.0, 5);
    oracle_agreement(Manifold::SiegelDisk(2), 0.6, 6);
}

#[test]
fn oracle_on_euclidean_is_one() {
    let m = Manifold::Euclidean(3);
    assert_abs_diff_eq!(numeric_volume_factor(&m, &[1.0, -2.0, 0.5], 1e-4).unwrap(), 1.0, epsilon = 1e-9);
}

#[test]
fn oracle_rejects_bad_step() {
    let m = Manifold::PoincareBall(2);
    assert!(numeric_volume_factor(&m, &[0.1, 0.1], 1e-2).is_err());
    assert!(numeric_volume_factor(&m, &[0.1, 0.1], 1e-8).is_err());
}

#[test]
fn siegel_one_equals_poincare_two() {
    let mut rng = SymRng::new(Seed(7));
    let s = Manifold::SiegelDisk(1);
    let p = Manifold::PoincareBall(2);
    for _ in 0..200 {
        let v = random_tangent(&mut rng, &p, 1.5);
        let z = s.exp_map(&v).unwrap();
        let x = p.exp_map(&v).unwrap();
        let zc = z.as_siegel().unwrap().get(0, 0);
        let xv = x.as_vector().unwrap();
        assert_abs_diff_eq!(zc.re, xv[0], epsilon = 1e-12);
        assert_abs_diff_eq!(zc.im, xv[1], epsilon = 1e-12);
        let js = s.log_volume_factor(&z).unwrap();
        let jp = p.log_volume_factor(&x).unwrap();
        assert!((js.exp() - jp.exp()).abs() <= 1e-10);
    }
}

#[test]
fn siegel_distance_matches_poincare() {
    let a = siegel_point(1, &[(0.3, -0.2)]).unwrap();
    let b = siegel_point(1, &[(-0.6, 0.1)]).unwrap();
    let ds = Manifold::SiegelDisk(1)
        .geodesic_distance(&ManifoldPoint::Siegel(a), &ManifoldPoint::Siegel(b))
        .unwrap();
    let dp = Manifold::PoincareBall(2)
        .geodesic_distance(&ManifoldPoint::Vector(vec![0.3, -0.2]), &ManifoldPoint::Vector(vec![-0.6, 0.1]))
        .unwrap();
    assert_abs_diff_eq!(ds, dp, epsilon = 1e-12);
}

#[test]
fn siegel_distance_needs_order_one() {
    let m = Manifold::SiegelDisk(2);
    let e = m.base_point();
    assert!(matches!(m.geodesic_distance(&e, &e), Err(Error::Unsupported(_))));
}

#[test]
fn siegel_rejects_large_order_and_outside_points() {
    assert!(matches!(
        Manifold::SiegelDisk(3).exp_map(&[0.0; 12]),
        Err(Error::Unsupported(_))
    ));
    assert!(siegel_point(1, &[(0.8, 0.7)]).is_err());
    assert!(siegel_point(2, &[(0.1, 0.0), (0.2, 0.0), (0.0, 0.0), (0.1, 0.0)]).is_err());
}

#[test]
fn poincare_rejects_boundary() {
    let ball = Manifold::PoincareBall(2);
    assert!(ball.validate(&ManifoldPoint::Vector(vec![1.0, 0.0])).is_err());
    assert!(ball.validate(&ManifoldPoint::Vector(vec![0.6, 0.79])).is_ok());
    assert!(matches!(ball.exp_map(&[80.0, 0.0]), Err(Error::TangentTooLarge(_))));
}

#[test]
fn poincare_distance_forms_agree() {
    let mut rng = SymRng::new(Seed(8));
    let ball = Manifold::PoincareBall(3);
    for _ in 0..100 {
        let x = ball.exp_map(&random_tangent(&mut rng, &ball, 1.5)).unwrap();
        let y = ball.exp_map(&random_tangent(&mut rng, &ball, 1.5)).unwrap();
        let (a, b) = (x.as_vector().unwrap(), y.as_vector().unwrap());
        let n2 = |v: &[f64]| v.iter().map(|c| c * c).sum::<f64>();
        let diff: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
        let acosh_form = (1.0 + 2.0 * diff / ((1.0 - n2(a)) * (1.0 - n2(b)))).acosh();
        let d = ball.geodesic_distance(&x, &y).unwrap();
        assert!((d - acosh_form).abs() <= 1e-9 * (1.0 + d));
    }
}

#[test]
fn distance_to_base_is_tangent_norm() {
    let mut rng = SymRng::new(Seed(9));
    for m in [Manifold::Pd(3), Manifold::PoincareBall(3), Manifold::SiegelDisk(1)] {
        for _ in 0..50 {
            let v = random_tangent(&mut rng, &m, 1.0);
            let x = m.exp_map(&v).unwrap();
            let d = m.geodesic_distance(&m.base_point(), &x).unwrap();
            let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((d - norm).abs() <= 1e-9 * (1.0 + norm), "{m}: {d} vs {norm}");
        }
    }
}

#[test]
fn pd_distance_known_value() {
    let a = pd_diag(&[1.0, 1.0]);
    let b = pd_diag(&[2.0f64.exp(), (-1.0f64).exp()]);
    let d = Manifold::Pd(2).geodesic_distance(&a, &b).unwrap();
    assert_abs_diff_eq!(d, 5.0f64.sqrt(), epsilon = 1e-12);
    let le = log_euclidean_distance(a.as_pd().unwrap(), b.as_pd().unwrap()).unwrap();
    assert_abs_diff_eq!(le, 5.0f64.sqrt(), epsilon = 1e-12);
}

#[test]
fn triangle_inequality() {
    let mut rng = SymRng::new(Seed(10));
    for m in [Manifold::Pd(2), Manifold::Pd(3), Manifold::PoincareBall(2), Manifold::SiegelDisk(1)] {
        for _ in 0..100 {
            let pts: Vec<ManifoldPoint> = (0..3)
                .map(|_| m.exp_map(&random_tangent(&mut rng, &m, 1.2)).unwrap())
                .collect();
            let d = |i: usize, j: usize| m.geodesic_distance(&pts[i], &pts[j]).unwrap();
            assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9, "{m}");
            assert!((d(0, 1) - d(1, 0)).abs() <= 1e-9 * (1.0 + d(0, 1)));
        }
    }
}

#[test]
fn pd_distance_is_congruence_invariant() {
    let a = PdMatrix::from_row_major(2, vec![2.0, 0.3, 0.3, 1.0]).unwrap();
    let b = PdMatrix::from_row_major(2, vec![0.5, -0.1, -0.1, 1.5]).unwrap();
    let g = SymMatrix::from_row_major(2, vec![1.3, 0.2, 0.2, 0.7]).unwrap();
    let ga = PdMatrix::new(a.sandwich(&g)).unwrap();
    let gb = PdMatrix::new(b.sandwich(&g)).unwrap();
    let m = Manifold::Pd(2);
    let d1 = m.geodesic_distance(&ManifoldPoint::Pd(a), &ManifoldPoint::Pd(b)).unwrap();
    let d2 = m.geodesic_distance(&ManifoldPoint::Pd(ga), &ManifoldPoint::Pd(gb)).unwrap();
    assert_abs_diff_eq!(d1, d2, epsilon = 1e-10);
}

#[test]
fn round_trips() {
    let mut rng = SymRng::new(Seed(11));
    for m in [
        Manifold::Euclidean(3),
        Manifold::Pd(2),
        Manifold::Pd(4),
        Manifold::PoincareBall(3),
        Manifold::SiegelDisk(1),
        Manifold::SiegelDisk(2),
    ] {
        for _ in 0..100 {
            let v = random_tangent(&mut rng, &m, 1.0);
            let back = m.log_map(&m.exp_map(&v).unwrap()).unwrap();
            let norm: f64 = v.iter().map(|c| c * c).sum::<f64>().sqrt();
            let err: f64 = v.iter().zip(back.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            assert!(err <= 1e-9 * (1.0 + norm), "{m}: {err}");
        }
    }
}

#[test]
fn siegel_exp_is_symmetric_and_inside() {
    let mut rng = SymRng::new(Seed(12));
    let m = Manifold::SiegelDisk(2);
    for _ in 0..50 {
        let v = random_tangent(&mut rng, &m, 2.0);
        let z = m.exp_map(&v).unwrap();
        assert!(m.validate(&z).is_ok());
        assert_eq!(z.as_siegel().unwrap().asymmetry(), 0.0);
    }
}

#[test]
fn siegel_diagonal_is_product_of_disks() {
    // Diagonal tangent vectors stay diagonal, each entry on its own disk.
    let m = Manifold::SiegelDisk(2);
    let v = [0.7, -0.2, 1.1, 0.4, 0.0, 0.0];
    let z = m.exp_map(&v).unwrap();
    let z = z.as_siegel().unwrap();
    for (i, (re, im)) in [(0.7, -0.2), (1.1, 0.4)].into_iter().enumerate() {
        let c = Complex64::new(re, im);
        let expect = c * (0.5 * c.norm()).tanh() / c.norm();
        assert_abs_diff_eq!((z.get(i, i) - expect).norm(), 0.0, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(z.get(0, 1).norm(), 0.0, epsilon = 1e-15);
}

#[test]
fn chart_coords_shapes() {
    let m = Manifold::Pd(3);
    assert_eq!(m.chart_coords(&pd_diag(&[1.0, 2.0, 3.0])).unwrap(), vec![1.0, 2.0, 3.0, 0.0, 0.0, 0.0]);
    let s = Manifold::SiegelDisk(2);
    let z = siegel_point(2, &[(0.1, 0.2), (0.05, 0.0), (0.05, 0.0), (0.0, -0.1)]).unwrap();
    let c = s.chart_coords(&ManifoldPoint::Siegel(z)).unwrap();
    assert_eq!(c.len(), 6);
    assert_abs_diff_eq!(c[4], 0.05 * core::f64::consts::SQRT_2, epsilon = 1e-15);
}

#[test]
fn parse_and_display() {
    for s in ["pd:3", "poincare:2", "siegel:1", "euclidean:4"] {
        let m: Manifold = s.parse().unwrap();
        assert_eq!(alloc::format!("{m}"), s);
    }
    assert_eq!("SPD:2".parse::<Manifold>().unwrap(), Manifold::Pd(2));
    assert!("pd:0".parse::<Manifold>().is_err());
    assert!("torus:2".parse::<Manifold>().is_err());
    assert!("pd".parse::<Manifold>().is_err());
}

#[test]
fn dims() {
    assert_eq!(Manifold::Pd(3).dim(), 6);
    assert_eq!(Manifold::SiegelDisk(2).dim(), 6);
    assert_eq!(Manifold::PoincareBall(5).dim(), 5);
}

#[test]
fn wrong_point_kind_is_rejected() {
    let m = Manifold::Pd(2);
    assert!(m.validate(&ManifoldPoint::Vector(vec![1.0, 2.0, 3.0])).is_err());
    assert!(matches!(
        m.validate(&pd_diag(&[1.0, 2.0, 3.0])),
        Err(Error::DimensionMismatch { expected: 2, found: 3 })
    ));
}

#[test]
fn riemannian_vs_entry_measure() {
    let x = PdMatrix::new(SymMatrix::diagonal(&[2.0, 3.0])).unwrap();
    let got = pd_log_riemannian_density_wrt_entries(&x).unwrap();
    let want = -1.5 * 6.0f64.ln() + 0.5 * core::f64::consts::LN_2;
    assert_abs_diff_eq!(got, want, epsilon = 1e-12);
}

#[test]
fn pd_tangent_is_vec_of_log() {
    let x = PdMatrix::from_row_major(2, vec![2.0, 0.5, 0.5, 1.0]).unwrap();
    let v = Manifold::Pd(2).log_map(&ManifoldPoint::Pd(x.clone())).unwrap();
    let want = sym_vec(&crate::linalg::mat_log(&x).unwrap());
    assert_eq!(v, want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn volume_factor_in_unit_interval(seed in any::<u64>(), scale in 0.0f64..3.0) {
        let mut rng = SymRng::new(Seed(seed));
        for m in [Manifold::Pd(3), Manifold::PoincareBall(3), Manifold::SiegelDisk(2)] {
            let v = random_tangent(&mut rng, &m, scale);
            let lj = m.log_volume_factor_tangent(&v).unwrap();
            prop_assert!(lj <= 0.0 && lj.is_finite());
        }
    }

    #[test]
    fn volume_factor_decreases_along_rays(seed in any::<u64>()) {
        let mut rng = SymRng::new(Seed(seed));
        for m in [Manifold::Pd(3), Manifold::PoincareBall(4), Manifold::SiegelDisk(2)] {
            let dir = random_tangent(&mut rng, &m, 1.0);
            let mut prev = 0.0f64;
            for k in 1..=20 {
                let t = 0.15 * k as f64;
                let v: Vec<f64> = dir.iter().map(|c| c * t).collect();
                let lj = m.log_volume_factor_tangent(&v).unwrap();
                prop_assert!(lj <= prev + 1e-14, "{m} t={t}: {lj} > {prev}");
                prev = lj;
            }
        }
    }

    #[test]
    fn pd_volume_is_congruence_invariant_under_rotation(theta in -3.0f64..3.0, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let (s, c) = theta.sin_cos();
        let r = SymMatrix::from_row_major(2, vec![c, s, s, -c]).unwrap();
        let d = SymMatrix::diagonal(&[a.exp(), b.exp()]);
        let rotated = PdMatrix::new(d.sandwich(&r)).unwrap();
        let m = Manifold::Pd(2);
        let j1 = m.log_volume_factor(&ManifoldPoint::Pd(PdMatrix::new(d).unwrap())).unwrap();
        let j2 = m.log_volume_factor(&ManifoldPoint::Pd(rotated)).unwrap();
        prop_assert!((j1 - j2).abs() <= 1e-9);
    }
}
