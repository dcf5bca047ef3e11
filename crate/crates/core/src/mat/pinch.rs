use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::mat::matrix::ComplexMatrix;
use crate::mat::spectral::{eigh, HermitianOperator};

/// Relative gap under which neighbouring eigenvalues are treated as one
/// degenerate cluster when forming pinching projectors.
pub const PINCH_GROUP_TOL: f64 = 1e-8;

/// The pinching map of `H` applied to `L`: sums `P L P` over the spectral
/// projectors `P` of `H`, with eigenvalues clustered by relative gap.
///
/// The result commutes with `H`, has the same trace as `L`, and the map is
/// unital, self-adjoint, and idempotent.
pub fn pinching(h: &HermitianOperator, l: &ComplexMatrix) -> Result<ComplexMatrix> {
    if l.rows() != h.dim() || l.cols() != h.dim() {
        return Err(Error::Shape(format!(
            "pinching needs matching dimensions, H is {} and L is {}x{}",
            h.dim(),
            l.rows(),
            l.cols()
        )));
    }
    let spec = eigh(h)?;
    let values = spec.eigenvalues();
    let n = values.len();

    // Cluster ascending eigenvalues by relative gap.
    let mut clusters: Vec<(usize, usize)> = Vec::new(); // [start, end)
    let mut start = 0usize;
    for i in 1..n {
        let scale = values[i].abs().max(values[i - 1].abs()).max(1.0);
        if values[i] - values[i - 1] > PINCH_GROUP_TOL * scale {
            clusters.push((start, i));
            start = i;
        }
    }
    clusters.push((start, n));

    let u = spec.eigenvectors();
    let mut out = ComplexMatrix::zeros(n, n);
    for &(lo, hi) in &clusters {
        // P = sum_{j in cluster} |u_j><u_j|; accumulate P L P.
        let mut p = ComplexMatrix::zeros(n, n);
        for j in lo..hi {
            for r in 0..n {
                let ur = u.get(r, j);
                for c in 0..n {
                    let cur = p.get(r, c);
                    p.set(r, c, cur + ur * u.get(c, j).conj());
                }
            }
        }
        let plp = &(&p * l) * &p;
        out = &out + &plp;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::spectral::commutator_norm;
    use alloc::vec;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_hamiltonian_leaves_input_unchanged() {
        let h = HermitianOperator::new(ComplexMatrix::identity(2)).unwrap();
        let l = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(2.0, 1.0), c(0.5, 0.0), c(0.0, 0.0)])
            .unwrap();
        let p = pinching(&h, &l).unwrap();
        assert!(p.distance(&l) < 1e-12);
    }

    #[test]
    fn nondegenerate_diagonal_pinches_to_diagonal() {
        let h = HermitianOperator::new(ComplexMatrix::diag(&[1.0, 2.0])).unwrap();
        let l = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(5.0, 3.0), c(5.0, -3.0), c(2.0, 0.0)])
            .unwrap();
        let p = pinching(&h, &l).unwrap();
        assert!(p.distance(&ComplexMatrix::diag(&[1.0, 2.0])) < 1e-12);
    }

    #[test]
    fn result_commutes_and_preserves_trace() {
        let hm = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.3, 0.4), c(0.3, -0.4), c(-0.5, 0.0)],
        )
        .unwrap();
        let h = HermitianOperator::new(hm.clone()).unwrap();
        let l = ComplexMatrix::new(2, 2, vec![c(0.9, 0.0), c(0.2, 0.7), c(0.1, -0.2), c(0.4, 0.0)])
            .unwrap();
        let p = pinching(&h, &l).unwrap();
        assert!(commutator_norm(&p, &hm) < 1e-10);
        assert!((p.trace() - l.trace()).norm() < 1e-12);
        // Idempotence.
        let pp = pinching(&h, &p).unwrap();
        assert!(pp.distance(&p) < 1e-12);
    }

    #[test]
    fn degenerate_cluster_is_not_split() {
        // Eigenvalues {1, 1 + 1e-12} must act as a single projector.
        let h = HermitianOperator::new(ComplexMatrix::diag(&[1.0, 1.0 + 1e-12, 3.0])).unwrap();
        let mut l = ComplexMatrix::zeros(3, 3);
        l.set(0, 1, c(1.0, 0.0));
        l.set(1, 0, c(1.0, 0.0));
        let p = pinching(&h, &l).unwrap();
        // The off-diagonal inside the degenerate block survives.
        assert!((p.get(0, 1) - c(1.0, 0.0)).norm() < 1e-12);
    }
}
