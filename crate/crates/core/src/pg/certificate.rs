//! A semidefinite dual certificate for optimized conditioned fidelity.
//!
//! `sup_sigma F(tau_AC, id (x) sigma_C)^2` is the optimal value of a
//! semidefinite program. Its dual asks for `(mu, Z_AC)` with
//! `Z (x) id >= tau_pure` (the canonical purification of `tau`) and
//! `tr_A Z <= mu id_C`; any feasible pair bounds the primal from above by
//! `mu`. This module builds the explicit candidate pair derived from the
//! pretty-good optimizer,
//!
//! ```text
//! sigma* = argmax_sigma tr sqrt(tau) sqrt(id (x) sigma),
//! t      = tr sqrt(tau) sqrt(id (x) sigma*),
//! mu*    = t^2,
//! Z*     = t tau^(1/2) (id (x) sigma*)^(-1/2)   (inverse on support),
//! ```
//!
//! and reports the measured feasibility margins. When `tau` commutes with
//! `id (x) sigma*` the pair is genuinely feasible and `mu*` equals the
//! optimum, certifying that the pretty-good optimizer is exactly optimal
//! for the fidelity as well. Away from commutation, `mu*` drops below the
//! primal optimum, so the candidate cannot stay feasible; the reported
//! margins quantify by how much it fails.

use alloc::format;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::ent::{petz_optimizer_sigma_star, BipartiteState};
use crate::error::{Error, Result};
use crate::mat::{
    canonical_purification, commutator_norm, eigh, outer, partial_trace, tensor, ComplexMatrix,
    HermitianOperator, PositiveOperator,
};

/// Margin below which a measured eigenvalue still counts as feasible.
pub const SDP_FEASIBILITY_TOL: f64 = 1e-8;

/// The explicit dual candidate with its measured margins.
#[derive(Clone, Copy, Debug)]
pub struct SdpCertificate {
    /// The dual objective `mu* = (tr sqrt(tau) sqrt(id (x) sigma*))^2`.
    pub mu: f64,
    /// True when both dual constraints hold within [`SDP_FEASIBILITY_TOL`].
    pub feasible: bool,
    /// Disagreement between the two evaluation routes for `mu*`.
    pub value_gap: f64,
    /// Smallest eigenvalue of `Z* (x) id - tau_pure`.
    pub feasibility_margin: f64,
    /// Smallest eigenvalue of `mu* id_C - tr_A Z*`.
    pub marginal_margin: f64,
    /// `||[tau, id (x) sigma*]||_F`; near zero exactly when the
    /// certificate applies.
    pub commutator_norm: f64,
}

fn min_eigenvalue(m: ComplexMatrix) -> Result<f64> {
    let spec = eigh(&HermitianOperator::new(m.hermitian_part())?)?;
    Ok(spec.eigenvalues()[0])
}

/// Builds the explicit dual candidate for a bipartite state and measures
/// every constraint.
pub fn sdp_certificate(tau: &BipartiteState) -> Result<SdpCertificate> {
    let dims = tau.dims().dims();
    if dims.len() != 2 {
        return Err(Error::Shape(format!(
            "the certificate needs a two-part state, got {} subsystems",
            dims.len()
        )));
    }
    let (dim_a, dim_c) = (dims[0], dims[1]);
    let dim = dim_a * dim_c;

    let sigma_star = petz_optimizer_sigma_star(tau, 0.5)?;
    let w = PositiveOperator::from_matrix(tensor(
        &ComplexMatrix::identity(dim_a),
        sigma_star.matrix(),
    ))?;
    let sqrt_tau = tau.state().spectrum().apply(true, |x| x.sqrt());
    let sqrt_w = w.spectrum().apply(true, |x| x.sqrt());

    let t = (&sqrt_tau * &sqrt_w).trace_re();
    let mu = t * t;

    // Independent route: tr(sqrt(tau) sqrt(W)) as the Frobenius inner
    // product of the two Hermitian square roots.
    let mut overlap = Complex64::ZERO;
    for r in 0..dim {
        for c in 0..dim {
            overlap += sqrt_tau.get(r, c).conj() * sqrt_w.get(r, c);
        }
    }
    let value_gap = (mu - overlap.re * overlap.re).abs();

    let w_inv_half = w.spectrum().apply(true, |x| 1.0 / x.sqrt());
    let z = (&sqrt_tau * &w_inv_half).scale_re(t).hermitian_part();

    let (psi, _) = canonical_purification(tau.state());
    let tau_pure = outer(&psi, &psi);
    let feasibility_margin =
        min_eigenvalue(&tensor(&z, &ComplexMatrix::identity(dim)) - &tau_pure)?;

    let reduced = partial_trace(&z, tau.dims(), &[1])?;
    let marginal_margin =
        min_eigenvalue(&ComplexMatrix::identity(dim_c).scale_re(mu) - &reduced)?;

    Ok(SdpCertificate {
        mu,
        feasible: feasibility_margin >= -SDP_FEASIBILITY_TOL
            && marginal_margin >= -SDP_FEASIBILITY_TOL,
        value_gap,
        feasibility_margin,
        marginal_margin,
        commutator_norm: commutator_norm(tau.state().matrix(), w.matrix()),
    })
}
