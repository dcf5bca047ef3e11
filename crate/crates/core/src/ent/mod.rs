//! Conditional Rényi entropies on bipartite states.
//!
//! For a state on `A (x) B`, each divergence family yields two conditional
//! entropies: the Down variant conditions on the actual marginal,
//! `H_down = -D(rho_AB || id_A (x) rho_B)`, and the Up variant takes the
//! supremum `H_up = sup_sigma -D(rho_AB || id_A (x) sigma_B)` over marginal
//! densities. The Petz Up variant has a closed-form optimizer below order 1;
//! the others are found numerically (see [`optimize_sigma`]).
//!
//! Duality ties the variants together on pure tripartite states: the Petz
//! Down entropies of `A|B` and `A|C` cancel when the orders sum to 2, the
//! sandwiched Up entropies cancel when the inverse orders sum to 2, and a
//! mixed relation pairs Petz Up with sandwiched Down at reciprocal orders.
//! [`duality_defect`] measures how far a state is from satisfying these
//! identities; [`maxlike_equality_check`] tests the commutation criterion
//! deciding when the Petz and sandwiched Up entropies coincide.

mod opt;

pub use opt::{ASCENT_IMPROVE_TOL, ASCENT_MAX_ITERS, ASCENT_STALL_WINDOW};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::div::{divergence, kl_divergence, AlphaValue, DivergenceFamily, ExtendedReal};
use crate::error::{Error, Result};
use crate::mat::{
    commutator_norm, partial_trace, tensor, ComplexMatrix, DensityOperator, DimensionProfile,
    PositiveOperator,
};

/// Commutator threshold for the max-like equality criterion.
pub const EQUALITY_TOL: f64 = 1e-8;

/// Purity threshold (largest eigenvalue) for duality inputs.
pub const PURITY_TOL: f64 = 1e-9;

/// Tolerance on the order constraint of a duality relation.
pub const DUALITY_CONSTRAINT_TOL: f64 = 1e-12;

/// A density operator together with a tensor factorization of its space.
#[derive(Clone, Debug)]
pub struct BipartiteState {
    state: DensityOperator,
    dims: DimensionProfile,
}

impl BipartiteState {
    /// Wraps a state, checking that the subsystem dimensions multiply to
    /// its ambient dimension and that there are at least two of them.
    pub fn new(state: DensityOperator, dims: DimensionProfile) -> Result<Self> {
        if dims.subsystems() < 2 {
            return Err(Error::Shape(
                "a composite state needs at least two subsystems".into(),
            ));
        }
        dims.check_matches(state.dim())?;
        Ok(BipartiteState { state, dims })
    }

    /// The underlying density operator.
    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    /// The tensor factorization.
    pub fn dims(&self) -> &DimensionProfile {
        &self.dims
    }

    /// The reduced state on the listed subsystems.
    pub fn marginal(&self, keep: &[usize]) -> Result<DensityOperator> {
        let reduced = partial_trace(self.state.matrix(), &self.dims, keep)?;
        DensityOperator::from_matrix(reduced)
    }

    fn require_two_parts(&self) -> Result<(usize, usize)> {
        if self.dims.subsystems() != 2 {
            return Err(Error::Shape(format!(
                "conditional entropies need exactly two subsystems, got {}",
                self.dims.subsystems()
            )));
        }
        Ok((self.dims.dims()[0], self.dims.dims()[1]))
    }
}

/// The divergence family underlying a conditional entropy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EntropyFamily {
    /// Built on the Petz divergence.
    Petz,
    /// Built on the sandwiched (minimal) divergence.
    Minimal,
}

impl EntropyFamily {
    /// The corresponding divergence family.
    pub fn divergence_family(self) -> DivergenceFamily {
        match self {
            EntropyFamily::Petz => DivergenceFamily::Petz,
            EntropyFamily::Minimal => DivergenceFamily::Minimal,
        }
    }
}

/// Whether the entropy conditions on the actual marginal or optimizes it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arrow {
    /// `-D(rho_AB || id (x) rho_B)`.
    Down,
    /// `sup_sigma -D(rho_AB || id (x) sigma_B)`.
    Up,
}

/// One of the four conditional Rényi entropies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EntropyVariant {
    /// Divergence family.
    pub family: EntropyFamily,
    /// Marginal handling.
    pub arrow: Arrow,
}

impl EntropyVariant {
    /// Petz family, fixed marginal.
    pub const PETZ_DOWN: Self = EntropyVariant { family: EntropyFamily::Petz, arrow: Arrow::Down };
    /// Petz family, optimized marginal.
    pub const PETZ_UP: Self = EntropyVariant { family: EntropyFamily::Petz, arrow: Arrow::Up };
    /// Sandwiched family, fixed marginal.
    pub const MINIMAL_DOWN: Self =
        EntropyVariant { family: EntropyFamily::Minimal, arrow: Arrow::Down };
    /// Sandwiched family, optimized marginal.
    pub const MINIMAL_UP: Self =
        EntropyVariant { family: EntropyFamily::Minimal, arrow: Arrow::Up };

    /// A stable lowercase name for reports and CLI output.
    pub fn name(self) -> &'static str {
        match (self.family, self.arrow) {
            (EntropyFamily::Petz, Arrow::Down) => "petz-down",
            (EntropyFamily::Petz, Arrow::Up) => "petz-up",
            (EntropyFamily::Minimal, Arrow::Down) => "minimal-down",
            (EntropyFamily::Minimal, Arrow::Up) => "minimal-up",
        }
    }

    /// Parses the stable name produced by [`Self::name`].
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "petz-down" => Self::PETZ_DOWN,
            "petz-up" => Self::PETZ_UP,
            "minimal-down" => Self::MINIMAL_DOWN,
            "minimal-up" => Self::MINIMAL_UP,
            other => {
                return Err(Error::Config(format!(
                    "unknown entropy variant '{other}' (expected petz-down, petz-up, \
                     minimal-down, or minimal-up)"
                )))
            }
        })
    }
}

impl core::fmt::Display for EntropyVariant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// `id_A (x) sigma` as a positive operator.
fn id_tensor(dim_a: usize, sigma: &ComplexMatrix) -> Result<PositiveOperator> {
    PositiveOperator::from_matrix(tensor(&ComplexMatrix::identity(dim_a), sigma))
}

/// `-D(rho_AB || id_A (x) sigma_B)` in nats; `-inf` if the divergence is
/// infinite (possible only for badly mismatched supports).
fn down_value(
    family: DivergenceFamily,
    alpha: AlphaValue,
    rho: &BipartiteState,
    sigma: &ComplexMatrix,
) -> Result<f64> {
    let (dim_a, _) = rho.require_two_parts()?;
    let reference = id_tensor(dim_a, sigma)?;
    match divergence(family, alpha, rho.state().positive(), &reference)? {
        ExtendedReal::Finite(d) => Ok(-d),
        ExtendedReal::Infinity => Ok(f64::NEG_INFINITY),
    }
}

/// The conditional Rényi entropy `H(A|B)` of the chosen variant, in nats.
///
/// Down variants evaluate `-D(rho_AB || id (x) rho_B)` directly; Up variants
/// maximize over the conditioning marginal via [`optimize_sigma`].
pub fn conditional_entropy(
    variant: EntropyVariant,
    alpha: AlphaValue,
    rho: &BipartiteState,
) -> Result<f64> {
    match variant.arrow {
        Arrow::Down => {
            let rho_b = rho.marginal(&[1])?;
            down_value(variant.family.divergence_family(), alpha, rho, rho_b.matrix())
        }
        Arrow::Up => Ok(optimize_sigma(variant.family.divergence_family(), alpha, rho)?.value),
    }
}

/// The closed-form optimizer of the Petz Up entropy below order 1:
/// `sigma* = (tr_A rho^alpha)^(1/alpha)`, normalized.
pub fn petz_optimizer_sigma_star(rho: &BipartiteState, alpha: f64) -> Result<DensityOperator> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "the closed-form optimizer needs an order in (0,1), got {alpha}"
        )));
    }
    let hat = hat_sigma_star(rho, alpha)?;
    let root = hat.spectrum().apply(true, |x| x.powf(1.0 / alpha));
    let trace = root.trace_re();
    if !(trace.is_finite() && trace > 0.0) {
        return Err(Error::Numerical(
            "optimizer candidate has vanishing trace".into(),
        ));
    }
    DensityOperator::from_matrix(root.scale_re(1.0 / trace))
}

/// The unnormalized marginal power `tr_A rho_AB^alpha` for orders in (0,1).
pub fn hat_sigma_star(rho: &BipartiteState, alpha: f64) -> Result<PositiveOperator> {
    if !(0.0 < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "the marginal power is used for orders in (0,1), got {alpha}"
        )));
    }
    rho.require_two_parts()?;
    let powered = rho.state().spectrum().apply(true, |x| x.powf(alpha));
    let reduced = partial_trace(&powered, rho.dims(), &[1])?;
    PositiveOperator::from_matrix(reduced)
}

/// Result of the max-like equality criterion.
#[derive(Clone, Copy, Debug)]
pub struct EqualityReport {
    /// True when the commutator norm is within [`EQUALITY_TOL`].
    pub equal: bool,
    /// `|| [rho_AB, id (x) sigma_hat] ||_F`.
    pub commutator_norm: f64,
}

/// Tests the commutation criterion `[rho_AB, id_A (x) tr_A rho^alpha] = 0`
/// deciding equality of the Petz and sandwiched Up entropies for orders in
/// `[1/2, 1)`.
pub fn maxlike_equality_check(rho: &BipartiteState, alpha: f64) -> Result<EqualityReport> {
    if !(0.5..1.0).contains(&alpha) {
        return Err(Error::Domain(format!(
            "the equality criterion applies for orders in [1/2, 1), got {alpha}"
        )));
    }
    let (dim_a, _) = rho.require_two_parts()?;
    let hat = hat_sigma_star(rho, alpha)?;
    let embedded = tensor(&ComplexMatrix::identity(dim_a), hat.matrix());
    let norm = commutator_norm(rho.state().matrix(), &embedded);
    Ok(EqualityReport { equal: norm <= EQUALITY_TOL, commutator_norm: norm })
}

/// A duality relation on pure tripartite states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DualityRelation {
    /// Petz Down on `A|B` and `A|C` cancel when `alpha + beta = 2`.
    PetzDown,
    /// Sandwiched Up entropies cancel when `1/alpha + 1/beta = 2`.
    MinimalUp,
    /// Petz Up on `A|B` and sandwiched Down on `A|C` cancel when
    /// `alpha * beta = 1`.
    Mixed,
}

impl DualityRelation {
    /// A stable lowercase name for reports and CLI output.
    pub fn name(self) -> &'static str {
        match self {
            DualityRelation::PetzDown => "petz-down",
            DualityRelation::MinimalUp => "minimal-up",
            DualityRelation::Mixed => "mixed",
        }
    }

    fn check_orders(self, alpha: f64, beta: f64) -> Result<()> {
        let (holds, constraint) = match self {
            DualityRelation::PetzDown => (
                (alpha + beta - 2.0).abs() <= DUALITY_CONSTRAINT_TOL
                    && (0.0..2.0).contains(&alpha)
                    && (0.0..2.0).contains(&beta),
                "alpha + beta = 2 with both in [0, 2)",
            ),
            DualityRelation::MinimalUp => (
                alpha > 0.5
                    && beta > 0.5
                    && (1.0 / alpha + 1.0 / beta - 2.0).abs() <= DUALITY_CONSTRAINT_TOL,
                "1/alpha + 1/beta = 2 with both above 1/2",
            ),
            DualityRelation::Mixed => (
                alpha > 0.0
                    && alpha <= 2.0
                    && beta > 0.0
                    && (alpha * beta - 1.0).abs() <= DUALITY_CONSTRAINT_TOL,
                "alpha * beta = 1 with alpha in (0, 2]",
            ),
        };
        if holds {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "orders ({alpha}, {beta}) violate the duality constraint {constraint}"
            )))
        }
    }
}

/// The absolute defect `|H1 + H2|` of a duality relation on a pure state
/// over three subsystems `A (x) B (x) C`.
///
/// The first entropy is evaluated on `A|B` at order `alpha`, the second on
/// `A|C` at order `beta`. Inputs must be pure (largest eigenvalue within
/// [`PURITY_TOL`] of 1) and the orders must satisfy the relation's
/// constraint exactly.
pub fn duality_defect(
    relation: DualityRelation,
    alpha: f64,
    beta: f64,
    rho_abc: &BipartiteState,
) -> Result<f64> {
    if rho_abc.dims().subsystems() != 3 {
        return Err(Error::Shape(format!(
            "duality needs three subsystems, got {}",
            rho_abc.dims().subsystems()
        )));
    }
    let top = rho_abc
        .state()
        .spectrum()
        .eigenvalues()
        .last()
        .copied()
        .unwrap_or(0.0);
    if top < 1.0 - PURITY_TOL {
        return Err(Error::Domain(format!(
            "duality holds for pure states only (largest eigenvalue {top})"
        )));
    }
    relation.check_orders(alpha, beta)?;

    let d = rho_abc.dims().dims();
    let ab = BipartiteState::new(
        rho_abc.marginal(&[0, 1])?,
        DimensionProfile::new(vec![d[0], d[1]])?,
    )?;
    let ac = BipartiteState::new(
        rho_abc.marginal(&[0, 2])?,
        DimensionProfile::new(vec![d[0], d[2]])?,
    )?;
    let (first, second) = match relation {
        DualityRelation::PetzDown => (EntropyVariant::PETZ_DOWN, EntropyVariant::PETZ_DOWN),
        DualityRelation::MinimalUp => (EntropyVariant::MINIMAL_UP, EntropyVariant::MINIMAL_UP),
        DualityRelation::Mixed => (EntropyVariant::PETZ_UP, EntropyVariant::MINIMAL_DOWN),
    };
    let h1 = conditional_entropy(first, AlphaValue::new(alpha)?, &ab)?;
    let h2 = conditional_entropy(second, AlphaValue::new(beta)?, &ac)?;
    Ok((h1 + h2).abs())
}

/// An optimized conditioning marginal and the entropy it achieves.
#[derive(Clone, Debug)]
pub struct OptimizedSigma {
    /// The best marginal found.
    pub sigma: DensityOperator,
    /// The achieved entropy `-D(rho_AB || id (x) sigma)` in nats.
    pub value: f64,
}

/// Maximizes `-D(rho_AB || id_A (x) sigma)` over marginal densities.
///
/// The Petz family below order 1 uses its closed-form optimizer. All other
/// cases run a deterministic mirror ascent (see the module docs of
/// [`opt`](self)) started from the actual marginal and the maximally mixed
/// state; for the Petz family the closed-form marginal power is seeded as a
/// third start. The order-one limit is exact: the optimum of the relative
/// entropy is the actual marginal.
pub fn optimize_sigma(
    family: DivergenceFamily,
    alpha: AlphaValue,
    rho: &BipartiteState,
) -> Result<OptimizedSigma> {
    let (dim_a, dim_b) = rho.require_two_parts()?;
    let rho_b = rho.marginal(&[1])?;

    if alpha == AlphaValue::One
        && matches!(family, DivergenceFamily::Petz | DivergenceFamily::Minimal)
    {
        // D(rho || id (x) sigma) = D(rho || id (x) rho_B) + D(rho_B || sigma),
        // so the actual marginal is exactly optimal at order one.
        let reference = id_tensor(dim_a, rho_b.matrix())?;
        let value = match kl_divergence(rho.state().positive(), &reference)? {
            ExtendedReal::Finite(d) => -d,
            ExtendedReal::Infinity => f64::NEG_INFINITY,
        };
        return Ok(OptimizedSigma { sigma: rho_b, value });
    }

    let order = alpha.evaluation_order();
    if family == DivergenceFamily::Petz {
        if let Some(a) = order.filter(|&a| a < 1.0) {
            let sigma = petz_optimizer_sigma_star(rho, a)?;
            let value = down_value(family, alpha, rho, sigma.matrix())?;
            return Ok(OptimizedSigma { sigma, value });
        }
    }

    let mut starts = vec![
        rho_b,
        DensityOperator::from_matrix(
            ComplexMatrix::identity(dim_b).scale_re(1.0 / dim_b as f64),
        )?,
    ];
    if family == DivergenceFamily::Petz {
        // The marginal-power candidate solves the problem in closed form
        // above order 1 as well; seeding it lets the ascent merely polish.
        if let Some(a) = order {
            let powered = rho.state().spectrum().apply(true, |x| x.powf(a));
            let reduced = partial_trace(&powered, rho.dims(), &[1])?;
            let hat = PositiveOperator::from_matrix(reduced)?;
            let root = hat.spectrum().apply(true, |x| x.powf(1.0 / a));
            let trace = root.trace_re();
            if trace.is_finite() && trace > 0.0 {
                starts.push(DensityOperator::from_matrix(root.scale_re(1.0 / trace))?);
            }
        }
    }
    // Above this order the trace power concentrates on the top eigenvalue,
    // the objective turns effectively nonsmooth, and a plain ascent zigzags
    // below its stall threshold without converging. A continuation schedule
    // climbs smooth low-order surrogates first, then polishes at the target
    // order from a warm start that is already near the optimum.
    const LADDER_THRESHOLD: f64 = 64.0;
    let mut schedule: Vec<AlphaValue> = Vec::new();
    if let Some(a) = order.filter(|&a| a > LADDER_THRESHOLD) {
        let mut rung = 2.0f64;
        while rung < a {
            schedule.push(AlphaValue::Finite(rung));
            rung *= 16.0;
        }
    }
    schedule.push(alpha);

    let mut warm: Option<opt::AscentOutcome> = None;
    let mut settled = true;
    for stage_alpha in schedule {
        let stage_objective = |sigma: &DensityOperator| -> Result<f64> {
            down_value(family, stage_alpha, rho, sigma.matrix())
        };
        let stage_starts = match &warm {
            None => starts.clone(),
            Some(w) => vec![w.sigma.clone()],
        };
        let stage = opt::mirror_ascent_stage(dim_b, &stage_starts, &stage_objective)?;
        settled = stage.converged;
        warm = Some(stage.outcome);
    }
    let outcome = warm.expect("the schedule always has at least one stage");
    if !settled {
        return Err(opt::iteration_limit(outcome.value));
    }
    Ok(OptimizedSigma { sigma: outcome.sigma, value: outcome.value })
}

/// Builds a classically coherent state `|psi> = sum_x sqrt(p_x) |x>|x>|xi_x>`
/// over `X (x) X' (x) B` from a distribution and per-symbol pure states.
///
/// These states make the sandwiched and Petz entropies comparable in ways
/// generic states are not; the verification suite samples them heavily.
pub fn classically_coherent_state(
    probabilities: &[f64],
    vectors: &[Vec<num_complex::Complex64>],
) -> Result<BipartiteState> {
    if probabilities.is_empty() || probabilities.len() != vectors.len() {
        return Err(Error::Shape(
            "need one state vector per probability".into(),
        ));
    }
    let x = probabilities.len();
    let b = vectors[0].len();
    if b == 0 || vectors.iter().any(|v| v.len() != b) {
        return Err(Error::Shape("state vectors must share a dimension".into()));
    }
    let total: f64 = probabilities.iter().sum();
    if probabilities.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(
            "probabilities must form a distribution".into(),
        ));
    }
    let dim = x * x * b;
    let mut psi = vec![num_complex::Complex64::new(0.0, 0.0); dim];
    for (sym, (p, v)) in probabilities.iter().zip(vectors.iter()).enumerate() {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "state vector {sym} is not normalized (norm^2 = {norm})"
            )));
        }
        let amp = p.sqrt();
        for (k, &z) in v.iter().enumerate() {
            psi[(sym * x + sym) * b + k] = z * amp;
        }
    }
    let mut mat = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            mat.set(i, j, psi[i] * psi[j].conj());
        }
    }
    BipartiteState::new(
        DensityOperator::from_matrix(mat)?,
        DimensionProfile::new(vec![x, x, b])?,
    )
}

/// Builds a classical-quantum state `sum_x p_x |x><x| (x) rho_x` over
/// `X (x) B`.
pub fn cq_state(probabilities: &[f64], states: &[DensityOperator]) -> Result<BipartiteState> {
    if probabilities.is_empty() || probabilities.len() != states.len() {
        return Err(Error::Shape("need one state per probability".into()));
    }
    let x = probabilities.len();
    let b = states[0].dim();
    if states.iter().any(|s| s.dim() != b) {
        return Err(Error::Shape("conditional states must share a dimension".into()));
    }
    let total: f64 = probabilities.iter().sum();
    if probabilities.iter().any(|&p| p < 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain(
            "probabilities must form a distribution".into(),
        ));
    }
    let mut mat = ComplexMatrix::zeros(x * b, x * b);
    for (sym, (p, s)) in probabilities.iter().zip(states.iter()).enumerate() {
        for r in 0..b {
            for c in 0..b {
                mat.set(sym * b + r, sym * b + c, s.matrix().get(r, c).scale(*p));
            }
        }
    }
    BipartiteState::new(
        DensityOperator::from_matrix(mat)?,
        DimensionProfile::new(vec![x, b])?,
    )
}

/// The von Neumann entropy `-tr rho log rho` of a density operator, in nats.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.spectrum()
        .eigenvalues()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// Purifies a bipartite state into a pure state over `A (x) B (x) R` with
/// `R` a copy of the joint space, returning the tripartite wrapper.
pub fn purify_to_tripartite(rho: &BipartiteState) -> Result<BipartiteState> {
    let (dim_a, dim_b) = rho.require_two_parts()?;
    let (psi, _) = crate::mat::canonical_purification(rho.state());
    let dim = dim_a * dim_b;
    let mut mat = ComplexMatrix::zeros(dim * dim, dim * dim);
    for i in 0..dim * dim {
        for j in 0..dim * dim {
            mat.set(i, j, psi[i] * psi[j].conj());
        }
    }
    BipartiteState::new(
        DensityOperator::from_matrix(mat)?,
        DimensionProfile::new(vec![dim_a, dim_b, dim])?,
    )
}

/// Verifies purity of a tripartite wrapper, used by duality preconditions.
pub fn is_pure(rho: &BipartiteState) -> bool {
    rho.state()
        .spectrum()
        .eigenvalues()
        .last()
        .is_some_and(|&top| top >= 1.0 - PURITY_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{random_density, random_pure_with, seeded_rng};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bipartite(state: DensityOperator, dims: &[usize]) -> BipartiteState {
        BipartiteState::new(state, DimensionProfile::new(dims.to_vec()).unwrap()).unwrap()
    }

    fn random_bipartite(dim_a: usize, dim_b: usize, seed: u64) -> BipartiteState {
        bipartite(
            random_density(dim_a * dim_b, dim_a * dim_b, seed).unwrap(),
            &[dim_a, dim_b],
        )
    }

    /// |Phi+> on two qubits.
    fn maximally_entangled() -> BipartiteState {
        let mut mat = ComplexMatrix::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                mat.set(i, j, c(0.5, 0.0));
            }
        }
        bipartite(DensityOperator::from_matrix(mat).unwrap(), &[2, 2])
    }

    #[test]
    fn product_with_mixed_a_gives_log_dim_a() {
        let rho_b = random_density(3, 3, 81).unwrap();
        let id_a = ComplexMatrix::identity(2).scale_re(0.5);
        let joint = DensityOperator::from_matrix(tensor(&id_a, rho_b.matrix())).unwrap();
        let rho = bipartite(joint, &[2, 3]);
        for variant in [
            EntropyVariant::PETZ_DOWN,
            EntropyVariant::PETZ_UP,
            EntropyVariant::MINIMAL_DOWN,
            EntropyVariant::MINIMAL_UP,
        ] {
            let h = conditional_entropy(variant, AlphaValue::Finite(0.7), &rho).unwrap();
            assert!((h - 2.0f64.ln()).abs() < 1e-8, "{variant}: {h}");
        }
    }

    #[test]
    fn perfectly_correlated_classical_state_has_zero_min_entropy() {
        let basis0 = DensityOperator::from_matrix(ComplexMatrix::diag(&[1.0, 0.0])).unwrap();
        let basis1 = DensityOperator::from_matrix(ComplexMatrix::diag(&[0.0, 1.0])).unwrap();
        let rho = cq_state(&[0.5, 0.5], &[basis0, basis1]).unwrap();
        let h = conditional_entropy(
            EntropyVariant::MINIMAL_UP,
            AlphaValue::Infinity,
            &rho,
        )
        .unwrap();
        assert!(h.abs() < 1e-3, "H = {h}");
    }

    #[test]
    fn maximally_entangled_min_entropy_at_order_two() {
        // Direct formula: Q = tr (sigma^(-1/4) rho sigma^(-1/4))^2 with
        // sigma = id (x) id/2 gives Q = 2, so H = -log 2.
        let rho = maximally_entangled();
        let h = conditional_entropy(EntropyVariant::MINIMAL_DOWN, AlphaValue::Finite(2.0), &rho)
            .unwrap();
        assert!((h + 2.0f64.ln()).abs() < 1e-10, "H = {h}");
    }

    #[test]
    fn petz_optimizer_on_product_input_returns_marginal() {
        let rho_a = random_density(2, 2, 82).unwrap();
        let rho_b = random_density(3, 3, 83).unwrap();
        let joint =
            DensityOperator::from_matrix(tensor(rho_a.matrix(), rho_b.matrix())).unwrap();
        let rho = bipartite(joint, &[2, 3]);
        let sigma = petz_optimizer_sigma_star(&rho, 0.5).unwrap();
        assert!(sigma.matrix().distance(rho_b.matrix()) < 1e-10);
    }

    #[test]
    fn petz_optimizer_matches_marginal_power_normalization() {
        let rho = random_bipartite(2, 2, 84);
        let alpha = 0.6;
        let sigma = petz_optimizer_sigma_star(&rho, alpha).unwrap();
        let hat = hat_sigma_star(&rho, alpha).unwrap();
        let root = hat.spectrum().apply(true, |x| x.powf(1.0 / alpha));
        let expect = root.scale_re(1.0 / root.trace_re());
        assert!(sigma.matrix().distance(&expect) < 1e-10);
    }

    #[test]
    fn petz_optimizer_beats_challengers() {
        let rho = random_bipartite(2, 2, 85);
        let alpha = AlphaValue::Finite(0.5);
        let sigma = petz_optimizer_sigma_star(&rho, 0.5).unwrap();
        let best = down_value(DivergenceFamily::Petz, alpha, &rho, sigma.matrix()).unwrap();
        let mut rng = seeded_rng(86);
        for _ in 0..100 {
            let challenger = crate::mat::random_density_with(2, 2, &mut rng).unwrap();
            let v = down_value(DivergenceFamily::Petz, alpha, &rho, challenger.matrix()).unwrap();
            assert!(best >= v - 1e-7, "challenger won: {v} vs {best}");
        }
    }

    #[test]
    fn hat_sigma_star_of_pure_product_is_the_b_factor() {
        let mut rng = seeded_rng(87);
        let v = random_pure_with(3, &mut rng);
        let mut b = ComplexMatrix::zeros(3, 3);
        for i in 0..3 {
            for j in 0..3 {
                b.set(i, j, v[i] * v[j].conj());
            }
        }
        let a = ComplexMatrix::diag(&[1.0, 0.0]);
        let joint = DensityOperator::from_matrix(tensor(&a, &b)).unwrap();
        let rho = bipartite(joint, &[2, 3]);
        let hat = hat_sigma_star(&rho, 0.5).unwrap();
        assert!(hat.matrix().distance(&b) < 1e-10);
    }

    #[test]
    fn equality_criterion_separates_classical_from_generic() {
        let states = [
            random_density(2, 2, 88).unwrap(),
            random_density(2, 2, 89).unwrap(),
        ];
        let classical = cq_state(&[0.4, 0.6], &states).unwrap();
        // cq states commute with id (x) sigma_hat only when the sigma_hat
        // blocks commute with each conditional state; build a diagonal one.
        let diag = [
            DensityOperator::from_matrix(ComplexMatrix::diag(&[0.7, 0.3])).unwrap(),
            DensityOperator::from_matrix(ComplexMatrix::diag(&[0.2, 0.8])).unwrap(),
        ];
        let commuting = cq_state(&[0.5, 0.5], &diag).unwrap();
        let report = maxlike_equality_check(&commuting, 0.5).unwrap();
        assert!(report.equal, "norm {}", report.commutator_norm);

        let generic = random_bipartite(2, 2, 90);
        let report = maxlike_equality_check(&generic, 0.5).unwrap();
        assert!(!report.equal);
        assert!(report.commutator_norm > 1e-4);
        let _ = classical;
    }

    #[test]
    fn product_pure_state_dualities_are_tight() {
        let mut rng = seeded_rng(91);
        let parts: Vec<Vec<Complex64>> =
            vec![random_pure_with(2, &mut rng), random_pure_with(2, &mut rng),
                 random_pure_with(2, &mut rng)];
        let mut psi = Vec::with_capacity(8);
        for a in &parts[0] {
            for b in &parts[1] {
                for r in &parts[2] {
                    psi.push(a * b * r);
                }
            }
        }
        let mut mat = ComplexMatrix::zeros(8, 8);
        for i in 0..8 {
            for j in 0..8 {
                mat.set(i, j, psi[i] * psi[j].conj());
            }
        }
        let rho = bipartite(DensityOperator::from_matrix(mat).unwrap(), &[2, 2, 2]);
        let defect = duality_defect(DualityRelation::PetzDown, 0.5, 1.5, &rho).unwrap();
        assert!(defect <= 1e-9, "defect {defect:e}");
    }

    #[test]
    fn petz_down_duality_on_random_pure_state() {
        let mut rng = seeded_rng(92);
        let v = random_pure_with(8, &mut rng);
        let mut mat = ComplexMatrix::zeros(8, 8);
        for i in 0..8 {
            for j in 0..8 {
                mat.set(i, j, v[i] * v[j].conj());
            }
        }
        let rho = bipartite(DensityOperator::from_matrix(mat).unwrap(), &[2, 2, 2]);
        let defect = duality_defect(DualityRelation::PetzDown, 0.5, 1.5, &rho).unwrap();
        assert!(defect <= 1e-6, "defect {defect:e}");
    }

    #[test]
    fn duality_rejects_mixed_inputs_and_bad_orders() {
        let rho = bipartite(
            DensityOperator::from_matrix(ComplexMatrix::identity(8).scale_re(1.0 / 8.0)).unwrap(),
            &[2, 2, 2],
        );
        assert!(matches!(
            duality_defect(DualityRelation::PetzDown, 0.5, 1.5, &rho),
            Err(Error::Domain(_))
        ));
        let pure = {
            let mut mat = ComplexMatrix::zeros(8, 8);
            mat.set(0, 0, c(1.0, 0.0));
            bipartite(DensityOperator::from_matrix(mat).unwrap(), &[2, 2, 2])
        };
        assert!(duality_defect(DualityRelation::PetzDown, 0.5, 1.4, &pure).is_err());
        assert!(duality_defect(DualityRelation::MinimalUp, 0.4, 2.0, &pure).is_err());
        assert!(duality_defect(DualityRelation::Mixed, 3.0, 1.0 / 3.0, &pure).is_err());
    }

    #[test]
    fn optimize_sigma_matches_closed_form_for_petz() {
        let rho = random_bipartite(2, 2, 93);
        let out = optimize_sigma(DivergenceFamily::Petz, AlphaValue::Finite(0.5), &rho).unwrap();
        let sigma = petz_optimizer_sigma_star(&rho, 0.5).unwrap();
        let direct =
            down_value(DivergenceFamily::Petz, AlphaValue::Finite(0.5), &rho, sigma.matrix())
                .unwrap();
        assert!((out.value - direct).abs() < 1e-9);
    }

    #[test]
    fn one_dimensional_b_system_returns_unconditioned_entropy() {
        let rho_a = random_density(3, 3, 94).unwrap();
        let joint = DensityOperator::from_matrix(tensor(
            rho_a.matrix(),
            &ComplexMatrix::identity(1),
        ))
        .unwrap();
        let rho = bipartite(joint, &[3, 1]);
        let out = optimize_sigma(DivergenceFamily::Minimal, AlphaValue::Finite(2.0), &rho).unwrap();
        assert_eq!(out.sigma.dim(), 1);
        // H = -D(rho_A || id) at order 2 for the sandwiched family.
        let q: f64 = rho_a
            .spectrum()
            .eigenvalues()
            .iter()
            .map(|&x| x * x)
            .sum();
        let expect = -q.ln();
        assert!((out.value - expect).abs() < 1e-6, "{} vs {expect}", out.value);
    }

    #[test]
    fn minimal_up_is_at_least_minimal_down() {
        let rho = random_bipartite(2, 2, 95);
        for alpha in [0.6, 1.5, 2.0] {
            let down =
                conditional_entropy(EntropyVariant::MINIMAL_DOWN, AlphaValue::Finite(alpha), &rho)
                    .unwrap();
            let up =
                conditional_entropy(EntropyVariant::MINIMAL_UP, AlphaValue::Finite(alpha), &rho)
                    .unwrap();
            assert!(up >= down - 1e-9, "alpha {alpha}: up {up} < down {down}");
        }
    }

    #[test]
    fn classically_coherent_state_shape() {
        let mut rng = seeded_rng(96);
        let vectors = vec![random_pure_with(2, &mut rng), random_pure_with(2, &mut rng)];
        let rho = classically_coherent_state(&[0.3, 0.7], &vectors).unwrap();
        assert_eq!(rho.dims().dims(), &[2, 2, 2]);
        assert!(is_pure(&rho));
        // Marginal on X is the distribution.
        let mx = rho.marginal(&[0]).unwrap();
        assert!((mx.matrix().get(0, 0).re - 0.3).abs() < 1e-12);
        assert!((mx.matrix().get(1, 1).re - 0.7).abs() < 1e-12);
    }

    #[test]
    fn purification_wrapper_is_pure_and_consistent() {
        let rho = random_bipartite(2, 2, 97);
        let pure = purify_to_tripartite(&rho).unwrap();
        assert!(is_pure(&pure));
        let back = pure.marginal(&[0, 1]).unwrap();
        assert!(back.matrix().distance(rho.state().matrix()) < 1e-9);
    }

    #[test]
    fn von_neumann_entropy_of_uniform_is_log_dim() {
        let rho =
            DensityOperator::from_matrix(ComplexMatrix::identity(4).scale_re(0.25)).unwrap();
        assert!((von_neumann_entropy(&rho) - 4.0f64.ln()).abs() < 1e-12);
    }
}
