//! Finite-dimensional complex linear algebra tuned for spectral accuracy.
//!
//! Everything downstream (divergences, entropies, measurement bounds) reduces
//! to eigendecompositions of Hermitian matrices, often with spectra spanning
//! hundreds of orders of magnitude once fractional powers with exponents near
//! `1/alpha` are involved. The routines here therefore favour one-sided and
//! two-sided Jacobi iterations, which preserve the relative accuracy of tiny
//! eigenvalues, over faster tridiagonalization approaches that would be
//! accurate only in an absolute sense.
//!
//! The public surface is organized around a few wrapper types that encode
//! checked preconditions in the type system:
//!
//! * [`ComplexMatrix`]: a dense row-major complex matrix.
//! * [`HermitianOperator`]: a matrix validated and symmetrized to be exactly
//!   Hermitian.
//! * [`PositiveOperator`]: Hermitian with spectrum clipped to `[0, inf)`,
//!   rejecting inputs with materially negative eigenvalues.
//! * [`DensityOperator`]: positive with unit trace.
//! * [`DimensionProfile`]: a tensor factorization of an ambient dimension,
//!   used by [`partial_trace`] and friends.

mod eigen;
mod matrix;
mod pinch;
mod random;
mod scaled;
mod spectral;
mod tensor;

pub use matrix::ComplexMatrix;
/// Complex scalar type appearing throughout the matrix interfaces.
pub use num_complex::Complex64;
pub use pinch::{pinching, PINCH_GROUP_TOL};
pub use random::{
    ginibre_with, random_density, random_density_with, random_hermitian_with, random_psd,
    random_psd_with, random_pure_with, random_unitary, random_unitary_with, seeded_rng,
    standard_normal,
};
pub use spectral::{
    commutator_norm, eigh, matrix_function, operator_abs, schatten_norm, singular_values,
    support_dominates, DensityOperator, HermitianOperator, MatrixFunction, PositiveOperator,
    SpectralDecomposition, DENSITY_TRACE_TOL, EIG_FLOOR_REL, HERM_TOL_REL, SUPPORT_CUT_REL,
};
pub use tensor::{canonical_purification, outer, partial_trace, tensor, DimensionProfile};

pub(crate) use scaled::log_sum_exp;
pub(crate) use spectral::sandwich_log_spectrum;
