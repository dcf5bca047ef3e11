//! Fidelities, the pretty good measurement, and guessing probabilities.
//!
//! The fidelity `F = ||sqrt(rho) sqrt(sigma)||_1` and the pretty good
//! fidelity `F_pg = tr sqrt(rho) sqrt(sigma)` are the order-1/2 sandwiched
//! and Petz functionals. They sandwich each other (`F_pg <= F <=
//! sqrt(F_pg)`), agree exactly when the states commute, and both obey
//! Fuchs-van de Graaf style trace-distance bounds.
//!
//! For classical-quantum ensembles the same pattern appears one level up:
//! the pretty good measurement's success probability `p_pg` and the optimal
//! guessing probability `p_opt` satisfy `p_pg <= p_opt <= sqrt(p_pg)`, with
//! both quantities tied to conditional Rényi entropies of order 2 and
//! infinity. The Gram-matrix commutation criterion decides exactly when the
//! pretty good measurement is optimal, and an explicit semidefinite dual
//! certificate witnesses the analogous optimality for fidelity (see
//! [`sdp_certificate`]).
//!
//! All guessing-probability identities in this module fix base-2 logarithms
//! when converting to and from entropies.

mod certificate;

pub use certificate::{sdp_certificate, SdpCertificate};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::div::{AlphaValue, DivergenceFamily};
use crate::ent::{conditional_entropy, cq_state, optimize_sigma, BipartiteState, EntropyVariant};
use crate::error::{Error, Result};
use crate::mat::{
    commutator_norm, eigh, schatten_norm, tensor, ComplexMatrix, DensityOperator,
    DimensionProfile, HermitianOperator, PositiveOperator,
};

/// Completeness tolerance for POVMs.
pub const POVM_COMPLETENESS_TOL: f64 = 1e-9;

/// Commutator threshold for the measurement optimality criterion.
pub const PGM_OPTIMALITY_TOL: f64 = 1e-8;

/// An ensemble of states with prior probabilities, i.e. a cq source.
#[derive(Clone, Debug)]
pub struct CqEnsemble {
    priors: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl CqEnsemble {
    /// Validates priors (a distribution within 1e-10) and states (at least
    /// one, all on the same system).
    pub fn new(priors: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if states.is_empty() || priors.len() != states.len() {
            return Err(Error::Shape(format!(
                "need matching nonempty priors and states, got {} and {}",
                priors.len(),
                states.len()
            )));
        }
        if priors.iter().any(|&p| p < 0.0) {
            return Err(Error::Domain("priors must be nonnegative".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!(
                "priors must sum to 1, got {total}"
            )));
        }
        let dim = states[0].dim();
        if states.iter().any(|s| s.dim() != dim) {
            return Err(Error::Shape("states must share a dimension".into()));
        }
        Ok(CqEnsemble { priors, states })
    }

    /// The prior distribution.
    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// The conditional states.
    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    /// Number of symbols.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    /// True when the ensemble has a single symbol.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Dimension of the common system.
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// The prior-weighted average state.
    pub fn average(&self) -> Result<DensityOperator> {
        let dim = self.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (p, s) in self.priors.iter().zip(self.states.iter()) {
            acc = &acc + &s.matrix().scale_re(*p);
        }
        DensityOperator::from_matrix(acc)
    }

    /// The joint cq state `sum_x p_x |x><x| (x) rho_x` over `X (x) B`.
    pub fn joint_state(&self) -> Result<BipartiteState> {
        cq_state(&self.priors, &self.states)
    }
}

/// A positive operator valued measure: elements summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    elements: Vec<PositiveOperator>,
}

impl Povm {
    /// Validates completeness within [`POVM_COMPLETENESS_TOL`].
    pub fn new(elements: Vec<PositiveOperator>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Shape("a POVM needs at least one element".into()));
        }
        let dim = elements[0].dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for e in &elements {
            if e.dim() != dim {
                return Err(Error::Shape("POVM elements must share a dimension".into()));
            }
            acc = &acc + e.matrix();
        }
        let defect = acc.distance(&ComplexMatrix::identity(dim));
        if defect > POVM_COMPLETENESS_TOL {
            return Err(Error::Domain(format!(
                "POVM elements sum to identity only within {defect:e}"
            )));
        }
        Ok(Povm { elements })
    }

    /// The measurement operators.
    pub fn elements(&self) -> &[PositiveOperator] {
        &self.elements
    }
}

/// A generalized Gram matrix of an ensemble, living on `X' (x) B'`.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    base: PositiveOperator,
    dims: DimensionProfile,
}

impl GramMatrix {
    /// The underlying positive operator.
    pub fn base(&self) -> &PositiveOperator {
        &self.base
    }

    /// The `X' (x) B'` factorization.
    pub fn dims(&self) -> &DimensionProfile {
        &self.dims
    }
}

fn sqrt_of(rho: &DensityOperator) -> ComplexMatrix {
    rho.spectrum().apply(true, |x| x.sqrt())
}

/// The fidelity `F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1`, in [0, 1].
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let product = &sqrt_of(rho) * &sqrt_of(sigma);
    Ok(schatten_norm(&product, 1.0)?.clamp(0.0, 1.0))
}

/// The pretty good fidelity `F_pg(rho, sigma) = tr sqrt(rho) sqrt(sigma)`,
/// in [0, 1]. Equals the overlap of the canonical purifications, and agrees
/// with [`fidelity`] exactly when the states commute.
pub fn pretty_good_fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!(
            "state dimensions differ: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let product = &sqrt_of(rho) * &sqrt_of(sigma);
    Ok(product.trace_re().clamp(0.0, 1.0))
}

/// The trace distance `delta(rho, sigma) = ||rho - sigma||_1 / 2`, in [0, 1].
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let diff = rho.matrix() - sigma.matrix();
    Ok((0.5 * schatten_norm(&diff, 1.0)?).clamp(0.0, 1.0))
}

/// The pretty good measurement of an ensemble:
/// `Lambda_x = p_x rhohat^(-1/2) rho_x rhohat^(-1/2)` with `rhohat` the
/// average state. The projector onto the kernel of `rhohat` is appended to
/// the last element so the POVM is complete on the whole space (the states
/// never weight that kernel, so guessing probabilities are unaffected).
pub fn pgm(ensemble: &CqEnsemble) -> Result<Povm> {
    let avg = ensemble.average()?;
    let inv_half = avg.spectrum().apply(true, |x| 1.0 / x.sqrt());
    let mut elements = Vec::with_capacity(ensemble.len());
    for (p, s) in ensemble.priors().iter().zip(ensemble.states().iter()) {
        let lambda = (&(&inv_half * s.matrix()) * &inv_half)
            .hermitian_part()
            .scale_re(*p);
        elements.push(PositiveOperator::from_matrix(lambda)?);
    }
    let kernel = &ComplexMatrix::identity(avg.dim()) - &avg.spectrum().support_projector();
    if kernel.frobenius_norm() > 0.0 {
        let last = elements.len() - 1;
        let patched = (elements[last].matrix() + &kernel).hermitian_part();
        elements[last] = PositiveOperator::from_matrix(patched)?;
    }
    Povm::new(elements)
}

/// The success probability of the pretty good measurement,
/// `sum_x p_x tr(Lambda_x rho_x)`.
pub fn p_guess_pg(ensemble: &CqEnsemble) -> Result<f64> {
    let povm = pgm(ensemble)?;
    let mut total = 0.0;
    for ((p, s), lambda) in ensemble
        .priors()
        .iter()
        .zip(ensemble.states().iter())
        .zip(povm.elements().iter())
    {
        total += p * (lambda.matrix() * s.matrix()).trace_re();
    }
    Ok(total.clamp(0.0, 1.0))
}

/// How an optimal guessing probability was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuessMethod {
    /// Exact closed form for one- and two-state ensembles.
    Helstrom,
    /// Numeric min-entropy optimization over the conditioning marginal.
    MinEntropy,
}

/// An optimal guessing probability with its provenance.
#[derive(Clone, Copy, Debug)]
pub struct OptimalGuess {
    /// The achieved probability.
    pub value: f64,
    /// Exact branch or numeric optimization.
    pub method: GuessMethod,
}

/// The largest eigenvalue of `(id (x) sigma)^(-1/2) rho (id (x) sigma)^(-1/2)`
/// for a full-rank conditioning marginal.
fn conditioned_lambda_max(rho: &BipartiteState, sigma: &DensityOperator) -> Result<f64> {
    let dim_a = rho.dims().dims()[0];
    let w = PositiveOperator::from_matrix(tensor(
        &ComplexMatrix::identity(dim_a),
        sigma.matrix(),
    ))?;
    let w_nhalf = w.spectrum().apply(true, |x| 1.0 / x.sqrt());
    let m = (&(&w_nhalf * rho.state().matrix()) * &w_nhalf).hermitian_part();
    let spec = eigh(&HermitianOperator::new(m)?)?;
    Ok(*spec.eigenvalues().last().expect("nonempty spectrum"))
}

/// The optimal guessing probability of an ensemble.
///
/// Binary (and trivial single-state) ensembles use the exact Helstrom form
/// `(1 + || p_0 rho_0 - p_1 rho_1 ||_1) / 2`. Larger ensembles minimize the
/// conditioned largest eigenvalue over marginals with the entropy
/// optimizer, then evaluate that eigenvalue exactly at the optimizer. If
/// the optimizer fails, the error carries the pretty-good lower bound.
pub fn p_guess_optimal(ensemble: &CqEnsemble) -> Result<OptimalGuess> {
    match ensemble.len() {
        1 => Ok(OptimalGuess { value: 1.0, method: GuessMethod::Helstrom }),
        2 => {
            let gap = &ensemble.states()[0].matrix().scale_re(ensemble.priors()[0])
                - &ensemble.states()[1].matrix().scale_re(ensemble.priors()[1]);
            let value = 0.5 * (1.0 + schatten_norm(&gap, 1.0)?);
            Ok(OptimalGuess { value: value.clamp(0.0, 1.0), method: GuessMethod::Helstrom })
        }
        _ => {
            let joint = ensemble.joint_state()?;
            let optimized =
                optimize_sigma(DivergenceFamily::Minimal, AlphaValue::Infinity, &joint);
            let sigma = match optimized {
                Ok(out) => out.sigma,
                Err(Error::IterationLimit { context, .. }) => {
                    return Err(Error::IterationLimit {
                        context,
                        best_value: p_guess_pg(ensemble)?,
                    })
                }
                Err(e) => return Err(e),
            };
            let value = conditioned_lambda_max(&joint, &sigma)?;
            Ok(OptimalGuess { value: value.clamp(0.0, 1.0), method: GuessMethod::MinEntropy })
        }
    }
}

/// The generalized Gram matrix
/// `G = sum_{x,x'} sqrt(p_x p_x') |x><x'| (x) tr_B |xi_x><xi_x'|` built from
/// canonical purifications `|xi_x>` of the conditional states. Positive
/// semidefinite with unit trace; its spectrum does not depend on the
/// purification choice.
pub fn gram_matrix(ensemble: &CqEnsemble) -> Result<GramMatrix> {
    let n = ensemble.len();
    let b = ensemble.dim();
    // Block (x, x') of G is sqrt(p_x p_x') (sqrt rho_x)^T conj(sqrt rho_x'),
    // the B'-marginal of the purification overlap.
    let sqrts: Vec<ComplexMatrix> = ensemble.states().iter().map(sqrt_of).collect();
    let mut g = ComplexMatrix::zeros(n * b, n * b);
    for x in 0..n {
        for xp in 0..n {
            let weight = (ensemble.priors()[x] * ensemble.priors()[xp]).sqrt();
            if weight == 0.0 {
                continue;
            }
            let block = &sqrts[x].transpose() * &sqrts[xp].conjugate();
            for r in 0..b {
                for c in 0..b {
                    g.set(x * b + r, xp * b + c, block.get(r, c).scale(weight));
                }
            }
        }
    }
    Ok(GramMatrix {
        base: PositiveOperator::from_matrix(g.hermitian_part())?,
        dims: DimensionProfile::new(vec![n, b])?,
    })
}

/// Verdict of the measurement optimality criterion.
#[derive(Clone, Copy, Debug)]
pub struct OptimalityReport {
    /// True when the pretty good measurement achieves the optimum.
    pub optimal: bool,
    /// `|| [G, blockdiag(sqrt G)] ||_F`.
    pub commutator_norm: f64,
}

/// Tests whether the pretty good measurement is optimal for the ensemble:
/// it is if and only if the Gram matrix commutes with the block-diagonal
/// restriction of its square root.
pub fn pgm_optimality(ensemble: &CqEnsemble) -> Result<OptimalityReport> {
    let gram = gram_matrix(ensemble)?;
    let n = ensemble.len();
    let b = ensemble.dim();
    // Support-restricted square root: the spectral clip keeps kernel noise
    // out of the commutator, which the 1e-8 threshold needs.
    let root = gram.base().spectrum().apply(true, |x| x.sqrt());
    let mut blockdiag = ComplexMatrix::zeros(n * b, n * b);
    for x in 0..n {
        for r in 0..b {
            for c in 0..b {
                blockdiag.set(x * b + r, x * b + c, root.get(x * b + r, x * b + c));
            }
        }
    }
    let norm = commutator_norm(gram.base().matrix(), &blockdiag);
    Ok(OptimalityReport { optimal: norm <= PGM_OPTIMALITY_TOL, commutator_norm: norm })
}

/// Singlet fractions recoverable from a bipartite state.
#[derive(Clone, Copy, Debug)]
pub struct SingletFractions {
    /// Via the pretty good recovery: `2^(-H2down) / |A|` with the order-2
    /// sandwiched entropy in base 2.
    pub r_pg: f64,
    /// Via the optimal recovery: `2^(-Hinf_up) / |A|`.
    pub r_opt: f64,
}

/// Computes both singlet fractions of a bipartite state through the entropy
/// identities (base-2 logarithms). If the min-entropy optimizer fails, the
/// error carries the pretty-good fraction as its best value.
pub fn singlet_fractions(rho: &BipartiteState) -> Result<SingletFractions> {
    let dim_a = rho.dims().dims()[0] as f64;
    let h2 = conditional_entropy(EntropyVariant::MINIMAL_DOWN, AlphaValue::Finite(2.0), rho)?;
    let r_pg = (-h2).exp() / dim_a;
    let optimized = optimize_sigma(DivergenceFamily::Minimal, AlphaValue::Infinity, rho);
    let sigma = match optimized {
        Ok(out) => out.sigma,
        Err(Error::IterationLimit { context, .. }) => {
            return Err(Error::IterationLimit { context, best_value: r_pg })
        }
        Err(e) => return Err(e),
    };
    let r_opt = conditioned_lambda_max(rho, &sigma)? / dim_a;
    Ok(SingletFractions { r_pg, r_opt })
}

/// `sup_sigma F(tau_AC, id_A (x) sigma_C)` via the order-1/2 Up entropy.
///
/// The second fidelity argument is unnormalized (trace `|A|`), so the value
/// lives in `[0, sqrt(|A|)]` rather than `[0, 1]`.
pub fn sup_conditioned_fidelity(tau: &BipartiteState) -> Result<f64> {
    let out = optimize_sigma(DivergenceFamily::Minimal, AlphaValue::Finite(0.5), tau)?;
    // H_up = sup 2 log F, so sup F = exp(H_up / 2) in nats.
    Ok((0.5 * out.value).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{random_density, random_pure_with, seeded_rng};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pure_state(v: &[Complex64]) -> DensityOperator {
        let d = v.len();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, v[i] * v[j].conj());
            }
        }
        DensityOperator::from_matrix(m).unwrap()
    }

    fn diag_density(d: &[f64]) -> DensityOperator {
        DensityOperator::from_matrix(ComplexMatrix::diag(d)).unwrap()
    }

    fn ket0() -> DensityOperator {
        diag_density(&[1.0, 0.0])
    }

    fn ket_plus() -> DensityOperator {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        pure_state(&[c(s, 0.0), c(s, 0.0)])
    }

    #[test]
    fn fidelity_of_identical_states_is_one() {
        let rho = random_density(3, 3, 101).unwrap();
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
        assert!((pretty_good_fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn pure_state_fidelity_is_the_overlap() {
        let f = fidelity(&ket0(), &ket_plus()).unwrap();
        assert!((f - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn commuting_fidelities_agree_with_bhattacharyya() {
        let p = diag_density(&[0.7, 0.3]);
        let q = diag_density(&[0.4, 0.6]);
        let expect = (0.7f64 * 0.4).sqrt() + (0.3f64 * 0.6).sqrt();
        assert!((fidelity(&p, &q).unwrap() - expect).abs() < 1e-12);
        assert!((pretty_good_fidelity(&p, &q).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn noncommuting_pair_separates_the_fidelities() {
        let rho = diag_density(&[0.8, 0.2]);
        let sigma = pure_state(&[c(0.6, 0.0), c(0.8, 0.0)]);
        let f = fidelity(&rho, &sigma).unwrap();
        let fpg = pretty_good_fidelity(&rho, &sigma).unwrap();
        assert!(fpg < f - 1e-6, "F_pg {fpg} vs F {f}");
        assert!(f <= fpg.sqrt() + 1e-9);
    }

    #[test]
    fn trace_distance_examples() {
        let rho = random_density(2, 2, 102).unwrap();
        assert!(trace_distance(&rho, &rho).unwrap() < 1e-12);
        let d = trace_distance(&ket0(), &diag_density(&[0.0, 1.0])).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        let d = trace_distance(&diag_density(&[0.7, 0.3]), &diag_density(&[0.4, 0.6])).unwrap();
        assert!((d - 0.3).abs() < 1e-12);
    }

    #[test]
    fn fuchs_van_de_graaf_bounds() {
        let mut rng = seeded_rng(103);
        for _ in 0..20 {
            let rho = crate::mat::random_density_with(3, 3, &mut rng).unwrap();
            let sigma = crate::mat::random_density_with(3, 2, &mut rng).unwrap();
            let f = fidelity(&rho, &sigma).unwrap();
            let fpg = pretty_good_fidelity(&rho, &sigma).unwrap();
            let d = trace_distance(&rho, &sigma).unwrap();
            assert!(1.0 - f <= d + 1e-9);
            assert!(d <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
            assert!(1.0 - fpg <= d + 1e-9);
            assert!(d <= (1.0 - fpg * fpg).max(0.0).sqrt() + 1e-9);
            assert!(fpg <= f + 1e-12 && f <= fpg.sqrt() + 1e-9);
        }
    }

    #[test]
    fn pgm_on_orthogonal_states_is_projective() {
        let e = CqEnsemble::new(vec![0.5, 0.5], vec![ket0(), diag_density(&[0.0, 1.0])]).unwrap();
        let povm = pgm(&e).unwrap();
        assert!(povm.elements()[0]
            .matrix()
            .distance(&ComplexMatrix::diag(&[1.0, 0.0]))
            < 1e-10);
        assert!((p_guess_pg(&e).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_state_ensemble_measures_trivially() {
        let e = CqEnsemble::new(vec![1.0], vec![diag_density(&[0.5, 0.5])]).unwrap();
        let povm = pgm(&e).unwrap();
        assert_eq!(povm.elements().len(), 1);
        assert!((p_guess_pg(&e).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(p_guess_optimal(&e).unwrap().value, 1.0);
    }

    #[test]
    fn pgm_completeness_with_rank_deficient_average() {
        // Both states live in a 2-dim subspace of a qutrit; the kernel
        // projector lands on the last element.
        let s0 = diag_density(&[1.0, 0.0, 0.0]);
        let s1 = diag_density(&[0.0, 1.0, 0.0]);
        let e = CqEnsemble::new(vec![0.6, 0.4], vec![s0, s1]).unwrap();
        let povm = pgm(&e).unwrap();
        assert!((povm.elements()[1].matrix().get(2, 2).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_ensemble_povm_is_complete() {
        let mut rng = seeded_rng(104);
        let states: Vec<DensityOperator> = (0..3)
            .map(|_| crate::mat::random_density_with(2, 2, &mut rng).unwrap())
            .collect();
        let e = CqEnsemble::new(vec![0.2, 0.5, 0.3], states).unwrap();
        let povm = pgm(&e).unwrap();
        let mut acc = ComplexMatrix::zeros(2, 2);
        for el in povm.elements() {
            acc = &acc + el.matrix();
        }
        assert!(acc.distance(&ComplexMatrix::identity(2)) < 1e-9);
    }

    #[test]
    fn identical_states_guess_by_prior() {
        let s = diag_density(&[0.5, 0.5]);
        let e = CqEnsemble::new(vec![0.7, 0.3], vec![s.clone(), s]).unwrap();
        let p = p_guess_pg(&e).unwrap();
        assert!((p - 0.58).abs() < 1e-10);
        let opt = p_guess_optimal(&e).unwrap();
        assert!((opt.value - 0.7).abs() < 1e-10);
    }

    #[test]
    fn equiprobable_pure_pair_matches_helstrom_for_pgm() {
        // For two equiprobable pure states with overlap cos(theta), the PGM
        // is optimal: p = (1 + sqrt(1 - c^2)) / 2.
        let overlap = 0.6f64;
        let a = overlap.acos();
        let v0 = [c(a.cos(), 0.0), c(a.sin(), 0.0)];
        let e = CqEnsemble::new(vec![0.5, 0.5], vec![pure_state(&v0), ket0()]).unwrap();
        let helstrom = 0.5 * (1.0 + (1.0 - overlap * overlap).sqrt());
        assert!((p_guess_pg(&e).unwrap() - helstrom).abs() < 1e-9);
        assert!((p_guess_optimal(&e).unwrap().value - helstrom).abs() < 1e-12);
        let report = pgm_optimality(&e).unwrap();
        assert!(report.optimal, "norm {}", report.commutator_norm);
    }

    #[test]
    fn pgm_entropy_identity_order_two() {
        let mut rng = seeded_rng(105);
        let states: Vec<DensityOperator> = (0..2)
            .map(|_| crate::mat::random_density_with(2, 2, &mut rng).unwrap())
            .collect();
        let e = CqEnsemble::new(vec![0.45, 0.55], states).unwrap();
        let p = p_guess_pg(&e).unwrap();
        let h2 = conditional_entropy(
            EntropyVariant::MINIMAL_DOWN,
            AlphaValue::Finite(2.0),
            &e.joint_state().unwrap(),
        )
        .unwrap();
        assert!((p - (-h2).exp()).abs() < 1e-8, "{p} vs {}", (-h2).exp());
    }

    #[test]
    fn guessing_bound_chain_binary() {
        let mut rng = seeded_rng(106);
        for _ in 0..10 {
            let states: Vec<DensityOperator> = (0..2)
                .map(|_| crate::mat::random_density_with(2, 2, &mut rng).unwrap())
                .collect();
            let e = CqEnsemble::new(vec![0.35, 0.65], states).unwrap();
            let ppg = p_guess_pg(&e).unwrap();
            let popt = p_guess_optimal(&e).unwrap().value;
            assert!(ppg <= popt + 1e-8);
            assert!(popt <= ppg.sqrt() + 1e-8);
        }
    }

    #[test]
    fn three_state_optimizer_stays_in_the_bound_chain() {
        let mut rng = seeded_rng(107);
        let states: Vec<DensityOperator> = (0..3)
            .map(|_| crate::mat::random_density_with(2, 1, &mut rng).unwrap())
            .collect();
        let e = CqEnsemble::new(vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], states).unwrap();
        let ppg = p_guess_pg(&e).unwrap();
        let opt = p_guess_optimal(&e).unwrap();
        assert_eq!(opt.method, GuessMethod::MinEntropy);
        assert!(ppg <= opt.value + 1e-6, "{ppg} vs {}", opt.value);
        assert!(opt.value <= ppg.sqrt() + 1e-6);
    }

    #[test]
    fn gram_matrix_of_orthogonal_pures_is_the_prior_diagonal() {
        let e = CqEnsemble::new(vec![0.3, 0.7], vec![ket0(), diag_density(&[0.0, 1.0])]).unwrap();
        let g = gram_matrix(&e).unwrap();
        assert!((g.base().trace() - 1.0).abs() < 1e-10);
        let evs = g.base().spectrum().eigenvalues();
        // Nonzero spectrum is exactly the priors.
        assert!((evs[3] - 0.7).abs() < 1e-10);
        assert!((evs[2] - 0.3).abs() < 1e-10);
    }

    #[test]
    fn gram_matrix_of_identical_pures_is_rank_one() {
        let e = CqEnsemble::new(vec![0.3, 0.7], vec![ket0(), ket0()]).unwrap();
        let g = gram_matrix(&e).unwrap();
        let evs = g.base().spectrum().eigenvalues();
        assert!((evs[3] - 1.0).abs() < 1e-10);
        assert!(evs[2].abs() < 1e-10);
    }

    #[test]
    fn optimality_flag_agrees_with_the_guessing_gap() {
        // Disjoint supports: PGM discriminates perfectly, flag must agree.
        let e = CqEnsemble::new(
            vec![0.4, 0.6],
            vec![
                diag_density(&[0.9, 0.1, 0.0, 0.0]),
                diag_density(&[0.0, 0.0, 0.3, 0.7]),
            ],
        )
        .unwrap();
        let report = pgm_optimality(&e).unwrap();
        assert!(report.optimal, "norm {}", report.commutator_norm);
        let ppg = p_guess_pg(&e).unwrap();
        let popt = p_guess_optimal(&e).unwrap().value;
        assert!((ppg - 1.0).abs() <= 1e-10);
        assert!((ppg - popt).abs() <= 1e-6);

        // Squaring the posteriors is not the maximum-likelihood rule, so
        // the PGM is suboptimal even for generic commuting states.
        let f = CqEnsemble::new(
            vec![0.4, 0.6],
            vec![diag_density(&[0.9, 0.1]), diag_density(&[0.2, 0.8])],
        )
        .unwrap();
        let report = pgm_optimality(&f).unwrap();
        assert!(!report.optimal, "norm {}", report.commutator_norm);
        let ppg = p_guess_pg(&f).unwrap();
        let popt = p_guess_optimal(&f).unwrap().value;
        assert!(ppg < popt - 1e-6, "{ppg} vs {popt}");

        // Unequal priors, noncommuting mixed states: not optimal either.
        let g = CqEnsemble::new(
            vec![0.25, 0.75],
            vec![
                diag_density(&[0.8, 0.2]),
                pure_state(&[c(0.6, 0.0), c(0.8, 0.0)]),
            ],
        )
        .unwrap();
        let report = pgm_optimality(&g).unwrap();
        assert!(!report.optimal);
        assert!(report.commutator_norm > 1e-3);
        let ppg = p_guess_pg(&g).unwrap();
        let popt = p_guess_optimal(&g).unwrap().value;
        assert!(ppg < popt - 1e-6, "{ppg} vs {popt}");
    }

    #[test]
    fn singlet_fraction_of_maximally_entangled_state_is_one() {
        let mut m = ComplexMatrix::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                m.set(i, j, c(0.5, 0.0));
            }
        }
        let rho = BipartiteState::new(
            DensityOperator::from_matrix(m).unwrap(),
            DimensionProfile::new(vec![2, 2]).unwrap(),
        )
        .unwrap();
        let fr = singlet_fractions(&rho).unwrap();
        assert!((fr.r_pg - 1.0).abs() < 1e-8, "r_pg {}", fr.r_pg);
        assert!((fr.r_opt - 1.0).abs() < 1e-3, "r_opt {}", fr.r_opt);
    }

    #[test]
    fn singlet_fraction_of_product_state_is_inverse_dim_squared() {
        // A maximally mixed A side carries no correlation: the best overlap
        // with a maximally entangled target is 1 / |A|^2.
        let rho_b = random_density(2, 2, 108).unwrap();
        let joint = DensityOperator::from_matrix(tensor(
            &ComplexMatrix::identity(2).scale_re(0.5),
            rho_b.matrix(),
        ))
        .unwrap();
        let rho = BipartiteState::new(joint, DimensionProfile::new(vec![2, 2]).unwrap()).unwrap();
        let fr = singlet_fractions(&rho).unwrap();
        assert!((fr.r_pg - 0.25).abs() < 1e-6, "r_pg {}", fr.r_pg);
        assert!((fr.r_opt - 0.25).abs() < 1e-3, "r_opt {}", fr.r_opt);
        assert!(fr.r_pg <= fr.r_opt + 1e-6);
    }

    #[test]
    fn pure_entangled_state_has_matching_fractions() {
        let mut rng = seeded_rng(109);
        let v = random_pure_with(4, &mut rng);
        let rho = BipartiteState::new(pure_state(&v), DimensionProfile::new(vec![2, 2]).unwrap())
            .unwrap();
        let fr = singlet_fractions(&rho).unwrap();
        assert!(
            (fr.r_pg - fr.r_opt).abs() <= 1e-5,
            "r_pg {} vs r_opt {}",
            fr.r_pg,
            fr.r_opt
        );
        assert!(fr.r_pg <= fr.r_opt + 1e-9);
    }
}
