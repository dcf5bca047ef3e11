use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::mat::eigen::jacobi_eigh;
use crate::mat::matrix::ComplexMatrix;
use crate::mat::scaled::{gram_log_spectrum, LogSpectrum, ScaledColumn};

/// Relative Hermiticity tolerance for accepting a matrix as Hermitian.
pub const HERM_TOL_REL: f64 = 1e-10;

/// Eigenvalues at or below `SUPPORT_CUT_REL * lambda_max` count as exact zeros
/// wherever a support-restricted function (inverse, log, fractional power)
/// is evaluated.
pub const SUPPORT_CUT_REL: f64 = 1e-12;

/// Construction floor for positive operators: eigenvalues may dip this far
/// (relative) below zero from roundoff and are clipped to zero; anything
/// lower is rejected.
pub const EIG_FLOOR_REL: f64 = 1e-9;

/// Trace tolerance for density operators.
pub const DENSITY_TRACE_TOL: f64 = 1e-9;

/// Eigendecomposition of a Hermitian operator with support bookkeeping.
///
/// Eigenvalues are ascending; eigenvectors are the columns of a unitary.
/// The support mask flags eigenvalues whose magnitude exceeds the relative
/// support cut, which is where every "evaluated on the support only"
/// convention in the crate is decided.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    values: Vec<f64>,
    vectors: ComplexMatrix,
    support_cut: f64,
    support: Vec<bool>,
}

impl SpectralDecomposition {
    fn compute(h: &ComplexMatrix) -> Result<Self> {
        let (values, vectors) = jacobi_eigh(h)?;
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let support_cut = SUPPORT_CUT_REL * scale;
        let support = values.iter().map(|v| v.abs() > support_cut).collect();
        let out = Self {
            values,
            vectors,
            support_cut,
            support,
        };
        let err = out.reconstruct().distance(h);
        if err > 1e-9 * h.frobenius_norm().max(1.0) {
            return Err(Error::Numerical(format!(
                "eigendecomposition reconstruction error {err:.3e} on matrix of norm {:.3e}",
                h.frobenius_norm()
            )));
        }
        Ok(out)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Unitary whose columns are the eigenvectors, ordered like the values.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    /// Which eigenvalues are above the support cut.
    pub fn support_mask(&self) -> &[bool] {
        &self.support
    }

    /// The absolute threshold under which eigenvalues count as zero.
    pub fn support_cut(&self) -> f64 {
        self.support_cut
    }

    /// Number of eigenvalues above the support cut.
    pub fn rank(&self) -> usize {
        self.support.iter().filter(|&&s| s).count()
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `U f(Lambda) U*`. With `support_only`, eigenvalues outside the support
    /// map to zero instead of `f(0)`.
    pub fn apply(&self, support_only: bool, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mapped: Vec<f64> = self
            .values
            .iter()
            .zip(&self.support)
            .map(|(&v, &in_support)| {
                if in_support {
                    f(v)
                } else if support_only {
                    0.0
                } else {
                    f(0.0)
                }
            })
            .collect();
        let mut scaled = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let w = Complex64::new(mapped[j], 0.0);
            for i in 0..n {
                scaled.set(i, j, self.vectors.get(i, j) * w);
            }
        }
        (&scaled * &self.vectors.adjoint()).hermitian_part()
    }

    /// Projector onto the support.
    pub fn support_projector(&self) -> ComplexMatrix {
        self.apply(true, |_| 1.0)
    }

    /// `U Lambda U*`, the operator itself up to roundoff.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(false, |x| x)
    }

    /// Applies `sqrt` of the operator to a vector, support-restricted.
    /// The operator must be positive semidefinite (negative eigenvalues have
    /// been clipped by the caller).
    pub(crate) fn sqrt_apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.values.len();
        debug_assert_eq!(v.len(), n);
        // w = U* v, then scale by sqrt(lambda) on support, then back.
        let mut w = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = Complex64::ZERO;
            for i in 0..n {
                acc += self.vectors.get(i, j).conj() * v[i];
            }
            let s = if self.support[j] && self.values[j] > 0.0 {
                self.values[j].sqrt()
            } else {
                0.0
            };
            w.push(acc * s);
        }
        let mut out = alloc::vec![Complex64::ZERO; n];
        for i in 0..n {
            let mut acc = Complex64::ZERO;
            for j in 0..n {
                acc += self.vectors.get(i, j) * w[j];
            }
            out[i] = acc;
        }
        out
    }
}

/// A validated Hermitian operator.
#[derive(Clone, Debug)]
pub struct HermitianOperator {
    mat: ComplexMatrix,
}

impl HermitianOperator {
    /// Accepts a square matrix that is Hermitian within `HERM_TOL_REL`
    /// relative to its largest entry, then symmetrizes it exactly.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::Shape(format!(
                "Hermitian operator needs a square matrix, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let defect = mat.hermiticity_defect();
        let scale = mat.max_abs_entry();
        if defect > HERM_TOL_REL * scale.max(1e-300) && defect > 0.0 {
            return Err(Error::Domain(format!(
                "matrix is not Hermitian: defect {defect:.3e} vs scale {scale:.3e}"
            )));
        }
        Ok(Self {
            mat: mat.hermitian_part(),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }
}

/// Eigendecomposition entry point for Hermitian operators.
pub fn eigh(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    SpectralDecomposition::compute(h.matrix())
}

/// A positive semidefinite operator with its spectrum attached.
///
/// Construction clips tiny negative eigenvalues (roundoff from operator
/// products) to zero and rejects anything below the relative floor.
#[derive(Clone, Debug)]
pub struct PositiveOperator {
    mat: ComplexMatrix,
    spectrum: SpectralDecomposition,
}

impl PositiveOperator {
    pub fn new(herm: HermitianOperator) -> Result<Self> {
        let spec = SpectralDecomposition::compute(herm.matrix())?;
        let lambda_max = spec.values.last().copied().unwrap_or(0.0);
        let floor = -EIG_FLOOR_REL * lambda_max.max(1.0);
        if let Some(&min) = spec.values.first() {
            if min < floor {
                return Err(Error::Domain(format!(
                    "operator is not positive semidefinite: min eigenvalue {min:.3e}"
                )));
            }
        }
        if spec.values.iter().all(|&v| v <= 0.0) && lambda_max <= 0.0 {
            // The zero operator is fine as a PositiveOperator; divergence
            // entry points reject zero rho separately.
        }
        let clipped: Vec<f64> = spec.values.iter().map(|&v| v.max(0.0)).collect();
        let vectors = spec.vectors.clone();
        let scale = clipped.iter().fold(0.0f64, |m, &v| m.max(v));
        let support_cut = SUPPORT_CUT_REL * scale;
        let support: Vec<bool> = clipped.iter().map(|&v| v > support_cut).collect();
        let spectrum = SpectralDecomposition {
            values: clipped,
            vectors,
            support_cut,
            support,
        };
        let mat = spectrum.reconstruct();
        Ok(Self { mat, spectrum })
    }

    /// Convenience constructor straight from a raw matrix.
    pub fn from_matrix(mat: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(mat)?)
    }

    /// Builds from an eigenbasis and nonnegative eigenvalues (used by random
    /// generation and internal reassembly; trusts but verifies shapes).
    pub(crate) fn from_eigen(values: Vec<f64>, vectors: ComplexMatrix) -> Self {
        let scale = values.iter().fold(0.0f64, |m, &v| m.max(v));
        let support_cut = SUPPORT_CUT_REL * scale;
        let support = values.iter().map(|&v| v > support_cut).collect();
        let spectrum = SpectralDecomposition {
            values,
            vectors,
            support_cut,
            support,
        };
        let mat = spectrum.reconstruct();
        Self { mat, spectrum }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn trace(&self) -> f64 {
        self.spectrum.values.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.spectrum.rank() == 0
    }

    /// Scales by a positive factor.
    pub fn scale(&self, factor: f64) -> PositiveOperator {
        debug_assert!(factor >= 0.0);
        let values = self.spectrum.values.iter().map(|v| v * factor).collect();
        Self::from_eigen(values, self.spectrum.vectors.clone())
    }
}

/// A positive operator with unit trace.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    pos: PositiveOperator,
}

impl DensityOperator {
    pub fn new(pos: PositiveOperator) -> Result<Self> {
        let tr = pos.trace();
        if (tr - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::Domain(format!(
                "density operator trace {tr} is not 1 within {DENSITY_TRACE_TOL:e}"
            )));
        }
        Ok(Self { pos })
    }

    pub fn from_matrix(mat: ComplexMatrix) -> Result<Self> {
        Self::new(PositiveOperator::from_matrix(mat)?)
    }

    /// Normalizes a nonzero positive operator to unit trace.
    pub fn normalized(pos: &PositiveOperator) -> Result<Self> {
        let tr = pos.trace();
        if tr <= 0.0 {
            return Err(Error::Domain(String::from(
                "cannot normalize the zero operator to a density operator",
            )));
        }
        Ok(Self {
            pos: pos.scale(1.0 / tr),
        })
    }

    pub fn dim(&self) -> usize {
        self.pos.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.pos.matrix()
    }

    pub fn positive(&self) -> &PositiveOperator {
        &self.pos
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        self.pos.spectrum()
    }

    /// Purity `tr rho^2`.
    pub fn purity(&self) -> f64 {
        self.spectrum().eigenvalues().iter().map(|v| v * v).sum()
    }
}

/// Scalar functions liftable to positive operators through the spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MatrixFunction {
    /// `x^t` for real `t` (negative powers are support-restricted inverses).
    Power(f64),
    Log,
    Exp,
    Sqrt,
}

/// Applies a scalar function to a positive operator through its spectrum.
///
/// With `support_only` set, zero eigenvalues map to zero rather than `f(0)`;
/// log and negative powers require it whenever the operator is singular.
pub fn matrix_function(
    p: &PositiveOperator,
    f: MatrixFunction,
    support_only: bool,
) -> Result<HermitianOperator> {
    let singular = p.spectrum().rank() < p.dim();
    let needs_support = match f {
        MatrixFunction::Log => true,
        MatrixFunction::Power(t) => t < 0.0,
        _ => false,
    };
    if needs_support && singular && !support_only {
        return Err(Error::Domain(format!(
            "{:?} of a singular operator requires support restriction",
            f
        )));
    }
    let out = p.spectrum().apply(support_only, |x| match f {
        MatrixFunction::Power(t) => {
            if x <= 0.0 {
                if t == 0.0 {
                    1.0
                } else if t > 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                x.powf(t)
            }
        }
        MatrixFunction::Log => {
            if x <= 0.0 {
                f64::NEG_INFINITY
            } else {
                x.ln()
            }
        }
        MatrixFunction::Exp => x.exp(),
        MatrixFunction::Sqrt => {
            if x <= 0.0 {
                0.0
            } else {
                x.sqrt()
            }
        }
    });
    if out.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain(format!(
            "matrix function {f:?} overflowed or hit a singular eigenvalue"
        )));
    }
    HermitianOperator::new(out)
}

/// Singular values of a general matrix, descending.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    // Via the spectrum of M*M; values are clipped at zero before the sqrt.
    let gram = (&m.adjoint() * m).hermitian_part();
    let (vals, _) = jacobi_eigh(&gram)?;
    let mut s: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    s.reverse();
    Ok(s)
}

/// Schatten p-norm. `p = inf` gives the operator norm, `p = 1` the trace
/// norm, `p = 2` the Frobenius norm. Values `0 < p < 1` are the usual
/// quasi-norms. Errors on `p <= 0`.
pub fn schatten_norm(m: &ComplexMatrix, p: f64) -> Result<f64> {
    if p <= 0.0 {
        return Err(Error::Domain(format!("Schatten norm needs p > 0, got {p}")));
    }
    let s = singular_values(m)?;
    if p.is_infinite() {
        return Ok(s.first().copied().unwrap_or(0.0));
    }
    // (sum s^p)^{1/p} computed in log space so large p and quasi-norm p both
    // stay in range.
    let lse = crate::mat::scaled::log_sum_exp(
        s.iter().filter(|&&x| x > 0.0).map(|&x| p * x.ln()),
    );
    if lse == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok((lse / p).exp())
}

/// Positive square root of `M* M`.
pub fn operator_abs(m: &ComplexMatrix) -> Result<PositiveOperator> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "operator absolute value needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let gram = (&m.adjoint() * m).hermitian_part();
    let (vals, vecs) = jacobi_eigh(&gram)?;
    let roots: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    Ok(PositiveOperator::from_eigen(roots, vecs))
}

/// Frobenius norm of the commutator `AB - BA`.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(
        (a.rows(), a.cols()),
        (b.rows(), b.cols()),
        "commutator needs matching dimensions"
    );
    (&(a * b) - &(b * a)).frobenius_norm()
}

/// Whether the support of `big` contains the support of `small`, tested as
/// `|| (id - P_big) small (id - P_big) ||_F <= 1e-9`.
pub fn support_dominates(big: &PositiveOperator, small: &PositiveOperator) -> bool {
    let n = big.dim();
    debug_assert_eq!(n, small.dim());
    let proj = big.spectrum().support_projector();
    let comp = &ComplexMatrix::identity(n) - &proj;
    let inside = &(&comp * small.matrix()) * &comp;
    inside.frobenius_norm() <= 1e-9
}

/// Natural-log spectrum of `B^s A B^s` computed entirely in the log domain.
///
/// `A` and `B` are positive semidefinite (given by spectra); `s` may be huge.
/// Eigenvalues of `B` outside its support contribute exact zeros regardless
/// of the sign of `s` (support-restricted powers).
pub(crate) fn sandwich_log_spectrum(
    a: &SpectralDecomposition,
    b: &SpectralDecomposition,
    s: f64,
) -> Result<LogSpectrum> {
    let n = a.dim();
    debug_assert_eq!(n, b.dim());
    // B^s A B^s is isospectral to A^{1/2} B^{2s} A^{1/2} = C C* with
    // C = A^{1/2} V_B D, whose columns are exp(s ln b_j) * A^{1/2} v_j.
    let mut cols = Vec::new();
    for j in 0..n {
        if !b.support_mask()[j] || b.eigenvalues()[j] <= 0.0 {
            continue; // support-restricted power: exact zero column
        }
        let vj = b.eigenvectors().column(j);
        let col = a.sqrt_apply(&vj);
        let extra = if s == 0.0 { 0.0 } else { s * b.eigenvalues()[j].ln() };
        cols.push(ScaledColumn::from_vector(col, extra));
    }
    gram_log_spectrum(cols, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pos_diag(d: &[f64]) -> PositiveOperator {
        PositiveOperator::from_matrix(ComplexMatrix::diag(d)).unwrap()
    }

    #[test]
    fn hermitian_rejects_asymmetric() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert!(HermitianOperator::new(m).is_err());
    }

    #[test]
    fn positive_clips_roundoff_negatives() {
        let p = pos_diag(&[1.0, -1e-12]);
        assert_eq!(p.spectrum().eigenvalues()[0], 0.0);
        assert!(PositiveOperator::from_matrix(ComplexMatrix::diag(&[1.0, -1e-3])).is_err());
    }

    #[test]
    fn density_trace_enforced() {
        assert!(DensityOperator::from_matrix(ComplexMatrix::diag(&[0.5, 0.5])).is_ok());
        assert!(DensityOperator::from_matrix(ComplexMatrix::diag(&[0.6, 0.5])).is_err());
    }

    #[test]
    fn power_half_of_diagonal() {
        let p = pos_diag(&[4.0, 9.0]);
        let r = matrix_function(&p, MatrixFunction::Power(0.5), false).unwrap();
        assert!(r.matrix().distance(&ComplexMatrix::diag(&[2.0, 3.0])) < 1e-12);
    }

    #[test]
    fn support_restricted_inverse() {
        let p = pos_diag(&[2.0, 0.0]);
        let r = matrix_function(&p, MatrixFunction::Power(-1.0), true).unwrap();
        assert!(r.matrix().distance(&ComplexMatrix::diag(&[0.5, 0.0])) < 1e-12);
        // Without the support flag the inverse of a singular operator is a
        // domain error.
        assert!(matrix_function(&p, MatrixFunction::Power(-1.0), false).is_err());
        assert!(matrix_function(&p, MatrixFunction::Log, false).is_err());
    }

    #[test]
    fn log_exp_roundtrip() {
        // A positive definite matrix with an off-diagonal coupling.
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(2.0, 0.0), c(0.4, 0.3), c(0.4, -0.3), c(1.0, 0.0)],
        )
        .unwrap();
        let p = PositiveOperator::from_matrix(m.clone()).unwrap();
        let lg = matrix_function(&p, MatrixFunction::Log, false).unwrap();
        // exp(log m) must reconstruct m.
        let spec = eigh(&lg).unwrap();
        let reb = spec.apply(false, |x| x.exp());
        assert!(reb.distance(&m) < 1e-9);
    }

    #[test]
    fn schatten_examples() {
        let id3 = ComplexMatrix::identity(3);
        assert!((schatten_norm(&id3, 2.0).unwrap() - 3.0f64.sqrt()).abs() < 1e-12);
        let d = ComplexMatrix::diag(&[3.0, -4.0]);
        assert!((schatten_norm(&d, 1.0).unwrap() - 7.0).abs() < 1e-12);
        assert!((schatten_norm(&d, f64::INFINITY).unwrap() - 4.0).abs() < 1e-12);
        assert!(schatten_norm(&d, 0.0).is_err());
        assert!(schatten_norm(&d, -1.0).is_err());
    }

    #[test]
    fn operator_abs_examples() {
        let d = ComplexMatrix::diag(&[-2.0, 5.0]);
        let a = operator_abs(&d).unwrap();
        assert!(a.matrix().distance(&ComplexMatrix::diag(&[2.0, 5.0])) < 1e-12);
        // A unitary has |U| = id.
        let inv_sqrt2 = core::f64::consts::FRAC_1_SQRT_2;
        let u = ComplexMatrix::new(
            2,
            2,
            vec![
                c(inv_sqrt2, 0.0),
                c(inv_sqrt2, 0.0),
                c(inv_sqrt2, 0.0),
                c(-inv_sqrt2, 0.0),
            ],
        )
        .unwrap();
        assert!(operator_abs(&u)
            .unwrap()
            .matrix()
            .distance(&ComplexMatrix::identity(2))
            < 1e-12);
    }

    #[test]
    fn support_dominance_detects_kernels() {
        let sigma = pos_diag(&[0.5, 0.5, 0.0]);
        let rho_in = pos_diag(&[0.3, 0.7, 0.0]);
        let rho_out = pos_diag(&[0.3, 0.3, 0.4]);
        assert!(support_dominates(&sigma, &rho_in));
        assert!(!support_dominates(&sigma, &rho_out));
    }

    #[test]
    fn sandwich_log_spectrum_matches_direct_for_mild_inputs() {
        // rho = |+><+|, sigma = diag(3/4, 1/4), s = -1/4 (the minimal family
        // at alpha = 2): eigenvalues of sigma^s rho sigma^s.
        let rho = PositiveOperator::from_matrix(
            ComplexMatrix::new(2, 2, vec![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)])
                .unwrap(),
        )
        .unwrap();
        let sigma = pos_diag(&[0.75, 0.25]);
        let spec = sandwich_log_spectrum(rho.spectrum(), sigma.spectrum(), -0.25).unwrap();
        // Direct: M = S rho S with S = diag(0.75^-0.25, 0.25^-0.25).
        let s0 = 0.75f64.powf(-0.25);
        let s1 = 0.25f64.powf(-0.25);
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                c(0.5 * s0 * s0, 0.0),
                c(0.5 * s0 * s1, 0.0),
                c(0.5 * s1 * s0, 0.0),
                c(0.5 * s1 * s1, 0.0),
            ],
        )
        .unwrap();
        let direct = eigh(&HermitianOperator::new(m).unwrap()).unwrap();
        // rho is rank one, so exactly one nonzero eigenvalue.
        assert_eq!(spec.zeros, 1);
        let top = direct.eigenvalues()[1];
        assert!((spec.log_values[0] - top.ln()).abs() < 1e-12);
    }

    #[test]
    fn sandwich_log_spectrum_handles_huge_exponents() {
        // Commuting case with s = 5e5: exact answer in closed form.
        let a = pos_diag(&[2.0, 3.0]);
        let b = pos_diag(&[0.5, 1.25]);
        let s = 5.0e5;
        let spec = sandwich_log_spectrum(a.spectrum(), b.spectrum(), s).unwrap();
        let mut expect = [
            2.0 * s * 0.5f64.ln() + 2.0f64.ln(),
            2.0 * s * 1.25f64.ln() + 3.0f64.ln(),
        ];
        expect.sort_by(|x, y| y.partial_cmp(x).unwrap());
        assert!((spec.log_values[0] - expect[0]).abs() < 1e-9 * expect[0].abs());
        assert!((spec.log_values[1] - expect[1]).abs() < 1e-9 * expect[1].abs());
    }
}
