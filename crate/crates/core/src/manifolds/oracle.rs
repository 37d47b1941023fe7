use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::{Manifold, ManifoldPoint};
use crate::error::{invalid, Error, Result};
use crate::linalg::{Cholesky, CMatrix, PdMatrix, SymMatrix};

/// Chart-side tangent vector of `exp` at `v`.
enum Differential {
    Vector(Vec<f64>),
    Pd(SymMatrix),
    Siegel(CMatrix),
}

/// `J(exp v)` from central differences of `exp` and the chart metric:
/// `J = 1/√det G` with `Gⱼₖ = g(∂ⱼ exp, ∂ₖ exp)`.
///
/// `step` must lie in `[1e-6, 1e-3]`.
pub fn numeric_volume_factor(manifold: &Manifold, v: &[f64], step: f64) -> Result<f64> {
    if !(1e-6..=1e-3).contains(&step) {
        return Err(invalid("finite-difference step must lie in [1e-6, 1e-3]"));
    }
    let d = manifold.dim();
    if v.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.len(),
        });
    }
    let x = manifold.exp_map(v)?;
    let mut partials = Vec::with_capacity(d);
    let mut probe = v.to_vec();
    for j in 0..d {
        probe[j] = v[j] + step;
        let plus = manifold.exp_map(&probe)?;
        probe[j] = v[j] - step;
        let minus = manifold.exp_map(&probe)?;
        probe[j] = v[j];
        partials.push(difference(&plus, &minus, 0.5 / step));
    }

    let pd_inverse = match &x {
        ManifoldPoint::Pd(p) => Some(Cholesky::factor(p.as_sym())?.inverse()),
        _ => None,
    };
    let siegel_weights = match &x {
        ManifoldPoint::Siegel(z) => {
            let id = CMatrix::identity(z.order());
            let left = id.sub(&z.mul(&z.adjoint())).inverse()?;
            let right = id.sub(&z.adjoint().mul(z)).inverse()?;
            Some((left, right))
        }
        _ => None,
    };

    let mut gram = Vec::with_capacity(d * d);
    for a in &partials {
        for b in &partials {
            let g = match (a, b) {
                (Differential::Vector(a), Differential::Vector(b)) => {
                    let dot: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum();
                    match (manifold, &x) {
                        (Manifold::PoincareBall(_), ManifoldPoint::Vector(p)) => {
                            let conf = 1.0 - p.iter().map(|c| c * c).sum::<f64>();
                            4.0 * dot / (conf * conf)
                        }
                        _ => dot,
                    }
                }
                (Differential::Pd(a), Differential::Pd(b)) => {
                    let inv: &PdMatrix = pd_inverse.as_ref().expect("pd point");
                    pd_metric(inv, a, b)
                }
                (Differential::Siegel(a), Differential::Siegel(b)) => {
                    let (left, right) = siegel_weights.as_ref().expect("siegel point");
                    let prod = left.mul(a).mul(right).mul(&b.adjoint());
                    let tr: Complex64 = (0..prod.order()).map(|i| prod.get(i, i)).sum();
                    4.0 * tr.re
                }
                _ => unreachable!("one manifold kind per call"),
            };
            gram.push(g);
        }
    }
    let gram = SymMatrix::from_row_major(d, gram)?;
    let chol = Cholesky::factor(&gram).map_err(|_| Error::DegenerateMetric(0.0))?;
    let log_det = chol.log_det();
    if !log_det.is_finite() {
        return Err(Error::DegenerateMetric(log_det));
    }
    Ok((-0.5 * log_det).exp())
}

fn pd_metric(inv: &PdMatrix, a: &SymMatrix, b: &SymMatrix) -> f64 {
    let n = inv.order();
    let ia = crate::linalg::matmul(n, inv.as_slice(), a.as_slice());
    let ib = crate::linalg::matmul(n, inv.as_slice(), b.as_slice());
    // tr(P Q) = Σ Pᵢⱼ Qⱼᵢ
    let mut tr = 0.0;
    for i in 0..n {
        for j in 0..n {
            tr += ia[i * n + j] * ib[j * n + i];
        }
    }
    tr
}

fn difference(plus: &ManifoldPoint, minus: &ManifoldPoint, scale: f64) -> Differential {
    match (plus, minus) {
        (ManifoldPoint::Vector(p), ManifoldPoint::Vector(m)) => {
            Differential::Vector(p.iter().zip(m).map(|(a, b)| (a - b) * scale).collect())
        }
        (ManifoldPoint::Pd(p), ManifoldPoint::Pd(m)) => Differential::Pd(p.sub(m).scale(scale)),
        (ManifoldPoint::Siegel(p), ManifoldPoint::Siegel(m)) => Differential::Siegel(p.sub(m).scale(scale)),
        _ => unreachable!("exp returns one point kind per manifold"),
    }
}
