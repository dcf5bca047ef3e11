use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::mat::matrix::ComplexMatrix;
use crate::mat::spectral::DensityOperator;

/// Ordered list of subsystem dimensions for a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionProfile {
    dims: Vec<usize>,
}

impl DimensionProfile {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Shape("dimension profile cannot be empty".into()));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Shape(format!(
                "all subsystem dimensions must be >= 1, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Product of all subsystem dimensions.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Checks that the profile matches an operator dimension.
    pub fn check_matches(&self, dim: usize) -> Result<()> {
        if self.total() != dim {
            return Err(Error::Shape(format!(
                "dimension profile {:?} (total {}) does not match operator dimension {}",
                self.dims,
                self.total(),
                dim
            )));
        }
        Ok(())
    }

    /// Decomposes a flat index into per-subsystem indices.
    fn split(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            out[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        out
    }
}

/// Kronecker product `A (x) B`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows(), a.cols());
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(ra * rb, ca * cb, |i, j| {
        let (i1, i2) = (i / rb, i % rb);
        let (j1, j2) = (j / cb, j % cb);
        a.get(i1, j1) * b.get(i2, j2)
    })
}

/// Partial trace keeping the listed subsystems (0-based, ascending output
/// order follows the profile order of the kept subsystems).
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: &DimensionProfile,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Shape("partial trace needs a square matrix".into()));
    }
    dims.check_matches(m.rows())?;
    let k = dims.subsystems();
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.iter().any(|&s| s >= k) {
        return Err(Error::Shape(format!(
            "keep set {keep:?} references a subsystem outside 0..{k}"
        )));
    }
    if keep_sorted.is_empty() {
        return Err(Error::Shape(
            "partial trace must keep at least one subsystem (use trace for a scalar)".into(),
        ));
    }

    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&s| dims.dims[s]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    let mut is_kept = vec![false; k];
    for &s in &keep_sorted {
        is_kept[s] = true;
    }

    let n = m.rows();
    for row in 0..n {
        let ri = dims.split(row);
        for col in 0..n {
            let ci = dims.split(col);
            // Traced subsystems must match between row and column.
            let diagonal_on_traced = (0..k).all(|s| is_kept[s] || ri[s] == ci[s]);
            if !diagonal_on_traced {
                continue;
            }
            let mut orow = 0usize;
            let mut ocol = 0usize;
            for (pos, &s) in keep_sorted.iter().enumerate() {
                let d = kept_dims[pos];
                orow = orow * d + ri[s];
                ocol = ocol * d + ci[s];
            }
            let cur = out.get(orow, ocol);
            out.set(orow, ocol, cur + m.get(row, col));
        }
    }
    Ok(out)
}

/// Canonical purification `(sqrt(rho) (x) id) |Omega>` with
/// `|Omega> = sum_k |k>|k>`; the result lives on `[d, d]` and tracing out the
/// second factor recovers `rho`.
pub fn canonical_purification(rho: &DensityOperator) -> (Vec<Complex64>, DimensionProfile) {
    let d = rho.dim();
    let sqrt = rho.spectrum().apply(true, |x| if x > 0.0 { x.sqrt() } else { 0.0 });
    let mut psi = vec![Complex64::ZERO; d * d];
    for i in 0..d {
        for k in 0..d {
            // (sqrt(rho) |k>) (x) |k> contributes at index i*d + k.
            psi[i * d + k] = sqrt.get(i, k);
        }
    }
    (
        psi,
        DimensionProfile::new(vec![d, d]).expect("d >= 1 by construction"),
    )
}

/// Rank-one matrix `|a><b|`.
pub fn outer(a: &[Complex64], b: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::spectral::PositiveOperator;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_of_identities() {
        let t = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert!(t.distance(&ComplexMatrix::identity(6)) < 1e-15);
    }

    #[test]
    fn tensor_of_diagonals() {
        let t = tensor(&ComplexMatrix::diag(&[1.0, 2.0]), &ComplexMatrix::diag(&[3.0, 4.0]));
        assert!(t.distance(&ComplexMatrix::diag(&[3.0, 4.0, 6.0, 8.0])) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let a = ComplexMatrix::new(2, 2, vec![c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)])
            .unwrap();
        let b = ComplexMatrix::diag(&[0.4, 0.6]);
        let ab = tensor(&a, &b);
        let dims = DimensionProfile::new(vec![2, 2]).unwrap();
        let ta = partial_trace(&ab, &dims, &[0]).unwrap();
        // tr_B(A (x) B) = A tr(B) = A.
        assert!(ta.distance(&a) < 1e-14);
        let tb = partial_trace(&ab, &dims, &[1]).unwrap();
        assert!(tb.distance(&b) < 1e-14);
    }

    #[test]
    fn partial_trace_composes_to_full_trace() {
        let dims = DimensionProfile::new(vec![2, 2]).unwrap();
        let m = ComplexMatrix::from_fn(4, 4, |i, j| c((i * 4 + j) as f64, (i as f64) - (j as f64)))
            .hermitian_part();
        let ta = partial_trace(&m, &dims, &[0]).unwrap();
        let full = ta.trace();
        assert!((full - m.trace()).norm() < 1e-12);
    }

    #[test]
    fn purification_of_maximally_mixed_is_bell_state() {
        let rho = DensityOperator::from_matrix(ComplexMatrix::diag(&[0.5, 0.5])).unwrap();
        let (psi, dims) = canonical_purification(&rho);
        assert_eq!(dims.dims(), &[2, 2]);
        let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        assert!((psi[0].norm() - inv_sqrt2).abs() < 1e-12);
        assert!(psi[1].norm() < 1e-12);
        assert!(psi[2].norm() < 1e-12);
        assert!((psi[3].norm() - inv_sqrt2).abs() < 1e-12);
    }

    #[test]
    fn purification_recovers_state() {
        let m = ComplexMatrix::new(2, 2, vec![c(0.8, 0.0), c(0.2, 0.1), c(0.2, -0.1), c(0.2, 0.0)])
            .unwrap();
        let rho = DensityOperator::from_matrix(m).unwrap();
        let (psi, dims) = canonical_purification(&rho);
        let proj = outer(&psi, &psi);
        let back = partial_trace(&proj, &dims, &[0]).unwrap();
        assert!(back.distance(rho.matrix()) < 1e-10);
        // The purification of a pure state is a product state.
        let pure = DensityOperator::from_matrix(
            PositiveOperator::from_matrix(ComplexMatrix::diag(&[1.0, 0.0]))
                .unwrap()
                .matrix()
                .clone(),
        )
        .unwrap();
        let (phi, _) = canonical_purification(&pure);
        assert!((phi[0].norm() - 1.0).abs() < 1e-12);
        assert!(phi[1].norm() + phi[2].norm() + phi[3].norm() < 1e-12);
    }
}
