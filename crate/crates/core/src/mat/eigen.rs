use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::mat::matrix::ComplexMatrix;

/// Maximum number of full Jacobi sweeps before giving up.
const MAX_SWEEPS: usize = 100;

/// Off-diagonal magnitudes at or below this relative level stop the iteration.
const SWEEP_TOL: f64 = 1e-15;

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching unitary of column
/// eigenvectors. Jacobi is quadratically convergent and, unlike tridiagonal QR,
/// computes small eigenvalues of positive definite matrices with high relative
/// accuracy, which the divergence code depends on.
pub(crate) fn jacobi_eigh(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    debug_assert!(h.is_square());
    let n = h.rows();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);

    if n == 1 {
        return Ok((alloc::vec![a.get(0, 0).re], v));
    }

    let scale = a.frobenius_norm().max(1e-300);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let b = a.get(p, q);
                let babs = b.norm();
                if babs <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                // Relative threshold keeps graded positive matrices accurate;
                // the absolute fallback handles zero diagonals (indefinite H).
                let rel_floor = SWEEP_TOL * (app.abs() * aqq.abs()).sqrt();
                let abs_floor = SWEEP_TOL * SWEEP_TOL * scale;
                if babs <= rel_floor.max(abs_floor) {
                    continue;
                }
                rotated = true;

                let phase = b / babs;
                let zeta = (aqq - app) / (2.0 * babs);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = -sign / (zeta.abs() + (zeta * zeta + 1.0).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // A <- J* A J with J embedding [[c, -s p], [s conj(p), c]].
                let jpq = -s * phase;
                let jqp = s * phase.conj();
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c + akq * jqp);
                    a.set(k, q, akp * jpq + akq * c);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c + aqk * jqp.conj());
                    a.set(q, k, apk * jpq.conj() + aqk * c);
                }
                // Clean the rotated pair: the (p,q) entry is zero by
                // construction and the diagonal is real.
                a.set(p, q, Complex64::ZERO);
                a.set(q, p, Complex64::ZERO);
                let dp = a.get(p, p).re;
                let dq = a.get(q, q).re;
                a.set(p, p, Complex64::new(dp, 0.0));
                a.set(q, q, Complex64::new(dq, 0.0));

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * c + vkq * jqp);
                    v.set(k, q, vkp * jpq + vkq * c);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }

    if !converged {
        // Accept if the residual off-diagonal mass is still tiny in the
        // absolute sense; otherwise report the failure with scale info.
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a.get(i, j).norm_sqr();
                }
            }
        }
        let off = off.sqrt();
        if off > 1e-12 * scale {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver stalled: off-diagonal norm {off:.3e} on matrix of norm {scale:.3e}"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok((values, vectors))
}
