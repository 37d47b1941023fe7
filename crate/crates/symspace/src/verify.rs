//! Self-checks of the volume factor, the exponential chart and density
//! normalization for one manifold.

use serde::Serialize;

use symspace_core::distributions::LogGaussianParams;
use symspace_core::linalg::SymMatrix;
use symspace_core::manifolds::{numeric_volume_factor, Manifold, ManifoldPoint};
use symspace_core::metrics::{disk_mass, PolarGrid};
use symspace_core::rng::{Seed, SymRng};

use crate::error::CliResult;

/// Relative tolerance between the closed-form and finite-difference `J`.
pub const ORACLE_TOLERANCE: f64 = 1e-4;
pub const ORACLE_STEP: f64 = 1e-5;
/// Tangent vectors are drawn with norm up to this radius.
pub const ORACLE_RADIUS: f64 = 3.0;
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-9;
pub const NORMALIZATION_TOLERANCE: f64 = 1e-3;
pub const SIEGEL_POINCARE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    /// Largest observed error.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub manifold: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

fn check(name: &'static str, errors: &[f64], tolerance: f64) -> Check {
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Check {
        name,
        cases: errors.len(),
        worst,
        tolerance,
        // NaN errors fail.
        passed: errors.iter().all(|e| *e <= tolerance),
    }
}

/// Direction uniform on the sphere, radius uniform in `[0, r_max]`.
pub fn random_tangent(rng: &mut SymRng, d: usize, r_max: f64) -> Vec<f64> {
    let z = rng.normal_vec(d);
    let norm = z.iter().map(|c| c * c).sum::<f64>().sqrt();
    let r = r_max * rng.uniform();
    z.iter().map(|c| c * r / norm).collect()
}

pub fn run_verify(manifold: Manifold, cases: usize, seed: u64) -> CliResult<VerifyReport> {
    let d = manifold.dim();
    let mut rng = SymRng::new(Seed(seed));
    let mut oracle = Vec::with_capacity(cases);
    let mut round_trip = Vec::with_capacity(cases);
    for _ in 0..cases {
        let v = random_tangent(&mut rng, d, ORACLE_RADIUS);
        let j = manifold.volume_factor(&manifold.exp_map(&v)?)?;
        let num = numeric_volume_factor(&manifold, &v, ORACLE_STEP)?;
        oracle.push((j - num).abs() / j);
        let back = manifold.log_map(&manifold.exp_map(&v)?)?;
        let err = back.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        round_trip.push(err / (1.0 + norm));
    }
    let mut checks = vec![
        check("volume-factor-oracle", &oracle, ORACLE_TOLERANCE),
        check("exp-log-round-trip", &round_trip, ROUND_TRIP_TOLERANCE),
    ];

    if manifold == Manifold::PoincareBall(2) {
        let mut errs = Vec::new();
        for _ in 0..3 {
            let mu: Vec<f64> = rng.normal_vec(2).iter().map(|c| 0.5 * c).collect();
            let var = [0.3 + 0.7 * rng.uniform(), 0.3 + 0.7 * rng.uniform()];
            let lg = LogGaussianParams::new(manifold, mu, SymMatrix::diagonal(&var))?;
            errs.push((disk_mass(&lg, &PolarGrid::default())? - 1.0).abs());
        }
        checks.push(check("log-gaussian-normalization", &errs, NORMALIZATION_TOLERANCE));
    }

    if manifold == Manifold::SiegelDisk(1) {
        let ball = Manifold::PoincareBall(2);
        let mut errs = Vec::with_capacity(cases);
        for _ in 0..cases.max(1) {
            let v = random_tangent(&mut rng, 2, ORACLE_RADIUS);
            let (zs, zb) = (manifold.exp_map(&v)?, ball.exp_map(&v)?);
            let (ManifoldPoint::Siegel(z), ManifoldPoint::Vector(b)) = (&zs, &zb) else {
                unreachable!("exp returns the manifold's point kind")
            };
            let c = z.get(0, 0);
            let point_err = (c.re - b[0]).abs().max((c.im - b[1]).abs());
            let j_err = (manifold.volume_factor(&zs)? - ball.volume_factor(&zb)?).abs();
            errs.push(point_err.max(j_err));
        }
        checks.push(check("siegel-matches-poincare", &errs, SIEGEL_POINCARE_TOLERANCE));
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        manifold: manifold.to_string(),
        seed,
        checks,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_manifolds_pass() {
        for m in ["pd:2", "poincare:2", "siegel:1", "euclidean:3"] {
            let r = run_verify(m.parse().unwrap(), 20, 1).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let r = run_verify("siegel:1".parse().unwrap(), 5, 1).unwrap();
        assert_eq!(r.checks.len(), 3);
    }

    #[test]
    fn random_tangent_respects_radius() {
        let mut rng = SymRng::new(Seed(1));
        for _ in 0..100 {
            let v = random_tangent(&mut rng, 6, 3.0);
            assert!(v.iter().map(|c| c * c).sum::<f64>().sqrt() <= 3.0);
        }
    }

    #[test]
    fn nan_errors_fail() {
        assert!(!check("x", &[0.0, f64::NAN], 1.0).passed);
    }
}
