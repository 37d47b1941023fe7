use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::dist2_sq;
use crate::manifolds::{Manifold, ManifoldPoint};

pub const MAX_TRANSPORT_POINTS: usize = 512;

/// Ground cost for [`wasserstein_empirical`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportCost {
    /// Geodesic distance on the manifold.
    Geodesic,
    /// Euclidean distance between tangent coordinates at `e`.
    Tangent,
}

/// Minimum-cost perfect matching on an `n × n` row-major cost matrix
/// (Hungarian method with potentials, `O(n³)`). Entry `i` of the result is
/// the column matched to row `i`.
pub fn assignment(n: usize, cost: &[f64]) -> Result<Vec<usize>> {
    if cost.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: cost.len(),
        });
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite);
    }
    // 1-based: row 0 and column 0 are sentinels.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        while j0 != 0 {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        out[owner[j] - 1] = j - 1;
    }
    Ok(out)
}

/// `W_p` between two empirical measures with equally many atoms:
/// `(min_σ (1/n) Σ d(xᵢ, y_σ(i))ᵖ)^{1/p}`.
pub fn wasserstein_empirical(
    manifold: Manifold,
    xs: &[ManifoldPoint],
    ys: &[ManifoldPoint],
    p: f64,
    cost: TransportCost,
) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    let n = xs.len();
    if n == 0 || n > MAX_TRANSPORT_POINTS {
        return Err(invalid(alloc::format!(
            "empirical Wasserstein needs between 1 and {MAX_TRANSPORT_POINTS} points per side"
        )));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid("Wasserstein order must be >= 1"));
    }
    let mut c = Vec::with_capacity(n * n);
    match cost {
        TransportCost::Geodesic => {
            for x in xs {
                for y in ys {
                    c.push(manifold.geodesic_distance(x, y)?.powf(p));
                }
            }
        }
        TransportCost::Tangent => {
            let lx = xs.iter().map(|x| manifold.log_map(x)).collect::<Result<Vec<_>>>()?;
            let ly = ys.iter().map(|y| manifold.log_map(y)).collect::<Result<Vec<_>>>()?;
            for a in &lx {
                for b in &ly {
                    c.push(dist2_sq(a, b).sqrt().powf(p));
                }
            }
        }
    }
    let perm = assignment(n, &c)?;
    let total: f64 = perm.iter().enumerate().map(|(i, &j)| c[i * n + j]).sum();
    Ok((total / n as f64).powf(1.0 / p))
}
