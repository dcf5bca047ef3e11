//! Quantum Rényi divergence families and their limits.
//!
//! Four one-parameter families are implemented, each reducing to the
//! classical Rényi divergence on commuting inputs but ordered strictly on
//! noncommuting ones:
//!
//! * [`DivergenceFamily::Petz`]: `Q = tr rho^a sigma^(1-a)`.
//! * [`DivergenceFamily::Minimal`]: the sandwiched form
//!   `Q = tr (sigma^((1-a)/2a) rho sigma^((1-a)/2a))^a`, the smallest family
//!   satisfying the data-processing inequality for `a > 1`.
//! * [`DivergenceFamily::ReverseMinimal`]: the reverse sandwiched form
//!   `Q = tr (rho^(a/2(1-a)) sigma rho^(a/2(1-a)))^(1-a)`, defined for
//!   `a < 1` only.
//! * [`DivergenceFamily::Maximal`]: `Q = tr sigma (sigma^(-1/2) rho
//!   sigma^(-1/2))^a`, the trace of the weighted matrix geometric mean.
//!
//! The divergence itself is `D = log(Q / tr rho) / (a - 1)` with natural
//! logarithms. All Q functionals are evaluated in the log domain so the
//! numeric proxies for the endpoint orders `a -> 0` and `a -> infinity`
//! (evaluated at `1e-6` and `1e6`) neither underflow nor overflow even
//! though the intermediate matrix powers span thousands of orders of
//! magnitude.

mod means;

pub use means::{karcher_mean, geometric_mean_weighted, KARCHER_MAX_ITERS, KARCHER_RESIDUAL_TOL};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::mat::{
    eigh, log_sum_exp, support_dominates, ComplexMatrix, HermitianOperator, PositiveOperator,
    SpectralDecomposition,
};

/// Orders with `|a - 1|` below this are routed to the `a -> 1` limit, where
/// the `1/(a-1)` prefactor would otherwise amplify roundoff.
pub const ALPHA_ONE_TOL: f64 = 1e-6;

/// Numeric proxy order used for the `a -> 0` limit.
pub const ALPHA_ZERO_PROXY: f64 = 1e-6;

/// Numeric proxy order used for the `a -> infinity` limit.
pub const ALPHA_INFINITY_PROXY: f64 = 1e6;

/// A Rényi order: a nonnegative real, with the singular points kept symbolic
/// so callers can request exact limit formulas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaValue {
    /// The order-zero limit.
    Zero,
    /// A finite positive order away from 1.
    Finite(f64),
    /// The order-one limit (relative entropy).
    One,
    /// The max-divergence limit.
    Infinity,
}

impl AlphaValue {
    /// Classifies a raw order, routing values within [`ALPHA_ONE_TOL`] of 1
    /// to the limit branch.
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha < 0.0 {
            return Err(Error::Domain(format!(
                "Rényi order must be a nonnegative real, got {alpha}"
            )));
        }
        Ok(if alpha == 0.0 {
            AlphaValue::Zero
        } else if alpha.is_infinite() {
            AlphaValue::Infinity
        } else if (alpha - 1.0).abs() < ALPHA_ONE_TOL {
            AlphaValue::One
        } else {
            AlphaValue::Finite(alpha)
        })
    }

    /// The finite order at which to evaluate Q, substituting documented
    /// numeric proxies for the symbolic endpoints. `None` for the order-one
    /// limit, which has its own closed forms.
    pub fn evaluation_order(self) -> Option<f64> {
        match self {
            AlphaValue::Zero => Some(ALPHA_ZERO_PROXY),
            AlphaValue::Finite(a) => Some(a),
            AlphaValue::One => None,
            AlphaValue::Infinity => Some(ALPHA_INFINITY_PROXY),
        }
    }
}

impl core::fmt::Display for AlphaValue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            AlphaValue::Zero => write!(f, "0"),
            AlphaValue::Finite(a) => write!(f, "{a}"),
            AlphaValue::One => write!(f, "1"),
            AlphaValue::Infinity => write!(f, "inf"),
        }
    }
}

/// The divergence family to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DivergenceFamily {
    /// `tr rho^a sigma^(1-a)`.
    Petz,
    /// Sandwiched: `tr (sigma^((1-a)/2a) rho sigma^((1-a)/2a))^a`.
    Minimal,
    /// Reverse sandwiched, `a < 1` only.
    ReverseMinimal,
    /// Geometric-mean based: `tr sigma (sigma^(-1/2) rho sigma^(-1/2))^a`.
    Maximal,
    /// Classical Rényi divergence of the standard-basis diagonals.
    Classical,
}

impl DivergenceFamily {
    /// All quantum families, in increasing order of the divergences they
    /// induce.
    pub const QUANTUM: [DivergenceFamily; 4] = [
        DivergenceFamily::Minimal,
        DivergenceFamily::ReverseMinimal,
        DivergenceFamily::Petz,
        DivergenceFamily::Maximal,
    ];

    /// A stable lowercase name for reports and CLI output.
    pub fn name(self) -> &'static str {
        match self {
            DivergenceFamily::Petz => "petz",
            DivergenceFamily::Minimal => "minimal",
            DivergenceFamily::ReverseMinimal => "reverse-minimal",
            DivergenceFamily::Maximal => "maximal",
            DivergenceFamily::Classical => "classical",
        }
    }

    /// Parses the stable name produced by [`Self::name`].
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "petz" => DivergenceFamily::Petz,
            "minimal" => DivergenceFamily::Minimal,
            "reverse-minimal" => DivergenceFamily::ReverseMinimal,
            "maximal" => DivergenceFamily::Maximal,
            "classical" => DivergenceFamily::Classical,
            other => {
                return Err(Error::Config(format!(
                    "unknown divergence family '{other}' (expected petz, minimal, \
                     reverse-minimal, maximal, or classical)"
                )))
            }
        })
    }
}

impl core::fmt::Display for DivergenceFamily {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// A finite real or positive infinity, the codomain of every divergence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    /// A finite value.
    Finite(f64),
    /// The divergence diverges (support violation or `-log 0`).
    Infinity,
}

impl ExtendedReal {
    /// The finite value, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::Infinity => None,
        }
    }

    /// Collapses to a plain float, mapping the infinite case to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(x) => x,
            ExtendedReal::Infinity => f64::INFINITY,
        }
    }

    /// True when the value is finite.
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        if x.is_infinite() && x > 0.0 {
            ExtendedReal::Infinity
        } else {
            ExtendedReal::Finite(x)
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl core::fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::Infinity => write!(f, "inf"),
        }
    }
}

fn check_nonzero(rho: &PositiveOperator) -> Result<()> {
    if rho.is_zero() {
        return Err(Error::Domain(
            "divergences need a nonzero first argument".into(),
        ));
    }
    Ok(())
}

fn check_same_dim(rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!(
            "state dimensions differ: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// Natural log of the Petz functional `tr rho^a sigma^(1-a)`, all powers
/// support-restricted. `f64::NEG_INFINITY` encodes `Q = 0`.
fn log_q_petz(alpha: f64, rho: &SpectralDecomposition, sigma: &SpectralDecomposition) -> f64 {
    // Overlap weights w_ij = |<u_i|v_j>|^2 from one matrix product.
    let overlaps = &rho.eigenvectors().adjoint() * sigma.eigenvectors();
    let n = rho.dim();
    let mut terms = Vec::new();
    for i in 0..n {
        if !rho.support_mask()[i] {
            continue;
        }
        let la = rho.eigenvalues()[i].ln();
        for j in 0..n {
            if !sigma.support_mask()[j] {
                continue;
            }
            let w = overlaps.get(i, j).norm_sqr();
            if w <= 0.0 {
                continue;
            }
            let lb = sigma.eigenvalues()[j].ln();
            terms.push(alpha * la + (1.0 - alpha) * lb + w.ln());
        }
    }
    log_sum_exp(terms)
}

/// Natural log of the maximal functional, via the support-restricted identity
/// `Q = tr rho K^(a-1)` with `K = rho^(1/2) sigma^(-1) rho^(1/2)`.
///
/// Callers must have verified `sigma >> rho`; under that condition `K` and
/// `rho` share a support and the identity holds for every order.
fn log_q_maximal(
    alpha: f64,
    rho: &PositiveOperator,
    sigma: &SpectralDecomposition,
) -> Result<f64> {
    let k = maximal_kernel(rho, sigma)?;
    let spec = eigh(&HermitianOperator::new(k)?)?;
    let mut terms = Vec::new();
    for m in 0..spec.dim() {
        if !spec.support_mask()[m] {
            continue;
        }
        let w = spec.eigenvectors().column(m);
        let rho_w = rho.matrix().mul_vec(&w);
        let weight: f64 = w
            .iter()
            .zip(rho_w.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        if weight <= 0.0 {
            continue; // roundoff in the kernel of rho
        }
        terms.push((alpha - 1.0) * spec.eigenvalues()[m].ln() + weight.ln());
    }
    Ok(log_sum_exp(terms))
}

/// `K = rho^(1/2) sigma^(-1) rho^(1/2)` with the inverse support-restricted.
fn maximal_kernel(rho: &PositiveOperator, sigma: &SpectralDecomposition) -> Result<ComplexMatrix> {
    let sigma_inv = sigma.apply(true, |x| 1.0 / x);
    let rho_half = rho.spectrum().apply(true, |x| x.sqrt());
    Ok((&(&rho_half * &sigma_inv) * &rho_half).hermitian_part())
}

fn diag_re(m: &ComplexMatrix) -> Vec<f64> {
    (0..m.rows()).map(|i| m.get(i, i).re.max(0.0)).collect()
}

/// The Q functional of the chosen family at a finite order `alpha > 0`,
/// `alpha != 1`, with every matrix power support-restricted.
///
/// Support violations that the divergence-level case split maps to infinity
/// are *not* errors here; the support-restricted value is returned (the
/// classical convention `0^x = 0` applied spectrally). The two hard domain
/// walls are `ReverseMinimal` at `alpha >= 1` (domain error) and `Maximal`
/// without `sigma >> rho` (support error).
pub fn q_value(
    family: DivergenceFamily,
    alpha: f64,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<f64> {
    Ok(log_q_value(family, alpha, rho, sigma)?.exp())
}

/// Natural log of [`q_value`]; `f64::NEG_INFINITY` encodes `Q = 0`. Exact
/// even at the endpoint proxy orders where Q itself over- or underflows.
pub fn log_q_value(
    family: DivergenceFamily,
    alpha: f64,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<f64> {
    check_nonzero(rho)?;
    check_same_dim(rho, sigma)?;
    if !(alpha.is_finite() && alpha > 0.0) || alpha == 1.0 {
        return Err(Error::Domain(format!(
            "Q functionals need a finite order in (0,1) or (1,inf), got {alpha}"
        )));
    }
    match family {
        DivergenceFamily::Petz => Ok(log_q_petz(alpha, rho.spectrum(), sigma.spectrum())),
        DivergenceFamily::Minimal => {
            let s = (1.0 - alpha) / (2.0 * alpha);
            let ls = crate::mat::sandwich_log_spectrum(rho.spectrum(), sigma.spectrum(), s)?;
            Ok(ls.log_trace_power(alpha))
        }
        DivergenceFamily::ReverseMinimal => {
            if alpha >= 1.0 {
                return Err(Error::Domain(format!(
                    "the reverse sandwiched divergence is defined for orders below 1, got {alpha}"
                )));
            }
            let s = alpha / (2.0 * (1.0 - alpha));
            let ls = crate::mat::sandwich_log_spectrum(sigma.spectrum(), rho.spectrum(), s)?;
            Ok(ls.log_trace_power(1.0 - alpha))
        }
        DivergenceFamily::Maximal => {
            if !support_dominates(sigma, rho) {
                return Err(Error::Support(
                    "the maximal family needs supp(rho) inside supp(sigma)".into(),
                ));
            }
            log_q_maximal(alpha, rho, sigma.spectrum())
        }
        DivergenceFamily::Classical => {
            let p = diag_re(rho.matrix());
            let q = diag_re(sigma.matrix());
            Ok(classical_log_q(alpha, &p, &q))
        }
    }
}

/// Log of the classical functional `sum_i p_i^a q_i^(1-a)` under the
/// conventions `0 log 0 = 0` and `0/0 = 1` (indices with `p_i = 0` drop out;
/// `q_i = 0` with `p_i > 0` contributes 0 for `a < 1` and `+inf` for
/// `a > 1`, encoded as `f64::INFINITY`).
fn classical_log_q(alpha: f64, p: &[f64], q: &[f64]) -> f64 {
    let mut terms = Vec::new();
    for (&pi, &qi) in p.iter().zip(q.iter()) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            if alpha > 1.0 {
                return f64::INFINITY;
            }
            continue;
        }
        terms.push(alpha * pi.ln() + (1.0 - alpha) * qi.ln());
    }
    log_sum_exp(terms)
}

/// The Rényi divergence `D = log(Q / tr rho) / (a - 1)` of the chosen
/// family, in nats.
///
/// The symbolic orders route to their limits: `One` to [`kl_divergence`]
/// (or [`belavkin_staszewski`] for the maximal family), `Zero` and
/// `Infinity` to evaluation at the documented proxy orders
/// [`ALPHA_ZERO_PROXY`] and [`ALPHA_INFINITY_PROXY`]. Support violations
/// yield `+inf` per the definitions' case splits rather than errors; the
/// only order-domain error is the reverse sandwiched family at orders >= 1.
pub fn divergence(
    family: DivergenceFamily,
    alpha: AlphaValue,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<ExtendedReal> {
    check_nonzero(rho)?;
    check_same_dim(rho, sigma)?;
    let order = match alpha {
        AlphaValue::One => {
            return match family {
                DivergenceFamily::Petz | DivergenceFamily::Minimal => kl_divergence(rho, sigma),
                DivergenceFamily::Maximal => belavkin_staszewski(rho, sigma),
                DivergenceFamily::Classical => {
                    classical_divergence(&diag_re(rho.matrix()), &diag_re(sigma.matrix()), alpha)
                }
                DivergenceFamily::ReverseMinimal => Err(Error::Domain(
                    "the reverse sandwiched divergence has no order-1 limit \
                     (defined for orders below 1 only)"
                        .into(),
                )),
            }
        }
        AlphaValue::Infinity if family == DivergenceFamily::ReverseMinimal => {
            return Err(Error::Domain(
                "the reverse sandwiched divergence is defined for orders below 1 only".into(),
            ));
        }
        _ => alpha.evaluation_order().expect("One handled above"),
    };

    // Case splits of the definitions: above order 1 every family needs
    // supp(rho) inside supp(sigma); the maximal family needs it always.
    let needs_support = family == DivergenceFamily::Maximal || order > 1.0;
    if needs_support && family != DivergenceFamily::Classical && !support_dominates(sigma, rho) {
        return Ok(ExtendedReal::Infinity);
    }

    let log_q = log_q_value(family, order, rho, sigma)?;
    if log_q == f64::INFINITY {
        // Classical family with a kernel violation above order 1.
        return Ok(ExtendedReal::Infinity);
    }
    let log_ratio = log_q - rho.trace().ln();
    if log_ratio == f64::NEG_INFINITY {
        // Q = 0: orthogonal states below order 1.
        return Ok(ExtendedReal::Infinity);
    }
    Ok(ExtendedReal::Finite(log_ratio / (order - 1.0)))
}

fn validate_distribution(name: &str, v: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(v.len());
    for &x in v {
        if x.is_nan() || x < -1e-12 {
            return Err(Error::Domain(format!(
                "{name} must have nonnegative entries, got {x}"
            )));
        }
        out.push(x.max(0.0));
    }
    Ok(out)
}

/// The classical Rényi divergence
/// `D = log(sum_i p_i^a q_i^(1-a) / sum_i p_i) / (a - 1)` in nats, under the
/// conventions `0 log 0 = 0` and `0/0 = 1`.
///
/// `p` must be a nonzero nonnegative vector; `q` any nonnegative vector of
/// the same length. The symbolic orders use the same limit routing as
/// [`divergence`].
pub fn classical_divergence(p: &[f64], q: &[f64], alpha: AlphaValue) -> Result<ExtendedReal> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "distribution lengths differ: {} vs {}",
            p.len(),
            q.len()
        )));
    }
    let p = validate_distribution("p", p)?;
    let q = validate_distribution("q", q)?;
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return Err(Error::Domain("p must not be the zero vector".into()));
    }

    let order = match alpha.evaluation_order() {
        Some(a) => a,
        None => {
            // Order-one limit: classical relative entropy.
            let mut acc = 0.0;
            for (&pi, &qi) in p.iter().zip(q.iter()) {
                if pi <= 0.0 {
                    continue;
                }
                if qi <= 0.0 {
                    return Ok(ExtendedReal::Infinity);
                }
                acc += pi * (pi.ln() - qi.ln());
            }
            return Ok(ExtendedReal::Finite(acc / total));
        }
    };

    let log_q = classical_log_q(order, &p, &q);
    if log_q == f64::INFINITY {
        return Ok(ExtendedReal::Infinity);
    }
    let log_ratio = log_q - total.ln();
    if log_ratio == f64::NEG_INFINITY {
        return Ok(ExtendedReal::Infinity);
    }
    Ok(ExtendedReal::Finite(log_ratio / (order - 1.0)))
}

/// The quantum relative entropy `tr rho (log rho - log sigma) / tr rho` in
/// nats, the shared order-one limit of the Petz and sandwiched families.
///
/// Returns `+inf` when `sigma` does not dominate the support of `rho`.
pub fn kl_divergence(rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<ExtendedReal> {
    check_nonzero(rho)?;
    check_same_dim(rho, sigma)?;
    if !support_dominates(sigma, rho) {
        return Ok(ExtendedReal::Infinity);
    }
    let rs = rho.spectrum();
    let ss = sigma.spectrum();
    let overlaps = &rs.eigenvectors().adjoint() * ss.eigenvectors();
    let mut acc = 0.0;
    for i in 0..rs.dim() {
        if !rs.support_mask()[i] {
            continue;
        }
        let a = rs.eigenvalues()[i];
        let mut cross = 0.0;
        for j in 0..ss.dim() {
            if !ss.support_mask()[j] {
                continue; // weight there is roundoff: support is dominated
            }
            let w = overlaps.get(i, j).norm_sqr();
            if w > 0.0 {
                cross += w * ss.eigenvalues()[j].ln();
            }
        }
        acc += a * (a.ln() - cross);
    }
    Ok(ExtendedReal::Finite(acc / rho.trace()))
}

/// The Belavkin-Staszewski relative entropy
/// `tr rho log(rho^(1/2) sigma^(-1) rho^(1/2)) / tr rho` in nats, the
/// order-one limit of the maximal family.
///
/// Returns `+inf` when `sigma` does not dominate the support of `rho`.
pub fn belavkin_staszewski(
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<ExtendedReal> {
    check_nonzero(rho)?;
    check_same_dim(rho, sigma)?;
    if !support_dominates(sigma, rho) {
        return Ok(ExtendedReal::Infinity);
    }
    let k = maximal_kernel(rho, sigma.spectrum())?;
    let spec = eigh(&HermitianOperator::new(k)?)?;
    let mut acc = 0.0;
    for m in 0..spec.dim() {
        if !spec.support_mask()[m] {
            continue;
        }
        let w = spec.eigenvectors().column(m);
        let rho_w = rho.matrix().mul_vec(&w);
        let weight: f64 = w
            .iter()
            .zip(rho_w.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        acc += weight * spec.eigenvalues()[m].ln();
    }
    Ok(ExtendedReal::Finite(acc / rho.trace()))
}

/// Formats an extended real for error messages and reports.
pub fn format_extended(value: ExtendedReal) -> String {
    format!("{value}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::{random_density, DensityOperator};
    use alloc::vec;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pos_diag(d: &[f64]) -> PositiveOperator {
        PositiveOperator::from_matrix(ComplexMatrix::diag(d)).unwrap()
    }

    fn plus_state() -> PositiveOperator {
        let h = 0.5;
        PositiveOperator::from_matrix(
            ComplexMatrix::new(2, 2, vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(h, 0.0)]).unwrap(),
        )
        .unwrap()
    }

    const QUANTUM: [DivergenceFamily; 4] = DivergenceFamily::QUANTUM;

    #[test]
    fn identical_states_give_q_one_and_divergence_zero() {
        let rho = pos_diag(&[0.5, 0.5]);
        for family in QUANTUM {
            let q = q_value(family, 0.5, &rho, &rho).unwrap();
            assert!((q - 1.0).abs() < 1e-12, "{family}: {q}");
            let d = divergence(family, AlphaValue::Finite(0.5), &rho, &rho).unwrap();
            assert!(d.finite().unwrap().abs() < 1e-10, "{family}");
        }
    }

    #[test]
    fn commuting_case_matches_classical_formula() {
        let rho = pos_diag(&[1.0, 0.0]);
        let sigma = pos_diag(&[0.5, 0.5]);
        let q = q_value(DivergenceFamily::Petz, 0.5, &rho, &sigma).unwrap();
        assert!((q - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pure_plus_state_against_diagonal_at_order_two() {
        // Independent closed forms for rho = |+><+|, sigma = diag(3/4, 1/4):
        // Petz Q = <+|sigma^(-1)|+> = 8/3; sandwiched
        // Q = <+|sigma^(-1/2)|+>^2 = (4 + 2*sqrt(3))/3.
        let rho = plus_state();
        let sigma = pos_diag(&[0.75, 0.25]);
        let petz = q_value(DivergenceFamily::Petz, 2.0, &rho, &sigma).unwrap();
        let minimal = q_value(DivergenceFamily::Minimal, 2.0, &rho, &sigma).unwrap();
        assert!((petz - 8.0 / 3.0).abs() < 1e-10, "petz {petz}");
        let expected = (4.0 + 2.0 * 3.0f64.sqrt()) / 3.0;
        assert!((minimal - expected).abs() < 1e-10, "minimal {minimal}");
        assert!(minimal <= petz);
    }

    #[test]
    fn normalization_axiom_one_dimensional() {
        let rho = pos_diag(&[1.0]);
        let sigma = pos_diag(&[0.5]);
        for family in QUANTUM {
            for alpha in [
                AlphaValue::Zero,
                AlphaValue::Finite(0.3),
                AlphaValue::One,
                AlphaValue::Finite(2.5),
                AlphaValue::Infinity,
            ] {
                if family == DivergenceFamily::ReverseMinimal
                    && !matches!(alpha, AlphaValue::Zero | AlphaValue::Finite(0.3))
                {
                    continue;
                }
                let d = divergence(family, alpha, &rho, &sigma).unwrap();
                let expect = 2.0f64.ln();
                assert!(
                    (d.finite().unwrap() - expect).abs() < 1e-6,
                    "{family} at {alpha}: {d}"
                );
            }
        }
    }

    #[test]
    fn support_violation_above_order_one_is_infinite() {
        let rho = pos_diag(&[0.5, 0.5]);
        let sigma = pos_diag(&[1.0, 0.0]);
        for family in [
            DivergenceFamily::Petz,
            DivergenceFamily::Minimal,
            DivergenceFamily::Maximal,
        ] {
            let d = divergence(family, AlphaValue::Finite(1.5), &rho, &sigma).unwrap();
            assert_eq!(d, ExtendedReal::Infinity, "{family}");
        }
    }

    #[test]
    fn orthogonal_states_below_order_one_are_infinite() {
        let rho = pos_diag(&[1.0, 0.0]);
        let sigma = pos_diag(&[0.0, 1.0]);
        let d = divergence(DivergenceFamily::Petz, AlphaValue::Finite(0.5), &rho, &sigma).unwrap();
        assert_eq!(d, ExtendedReal::Infinity);
    }

    #[test]
    fn maximal_requires_dominating_support_at_q_level() {
        let rho = pos_diag(&[0.5, 0.5]);
        let sigma = pos_diag(&[1.0, 0.0]);
        let err = q_value(DivergenceFamily::Maximal, 0.5, &rho, &sigma).unwrap_err();
        assert!(matches!(err, Error::Support(_)));
        // At the divergence level the case split maps it to infinity instead.
        let d =
            divergence(DivergenceFamily::Maximal, AlphaValue::Finite(0.5), &rho, &sigma).unwrap();
        assert_eq!(d, ExtendedReal::Infinity);
    }

    #[test]
    fn reverse_minimal_rejects_orders_at_or_above_one() {
        let rho = pos_diag(&[0.5, 0.5]);
        assert!(q_value(DivergenceFamily::ReverseMinimal, 1.5, &rho, &rho).is_err());
        assert!(divergence(DivergenceFamily::ReverseMinimal, AlphaValue::One, &rho, &rho).is_err());
        assert!(divergence(
            DivergenceFamily::ReverseMinimal,
            AlphaValue::Infinity,
            &rho,
            &rho
        )
        .is_err());
    }

    #[test]
    fn alpha_routing_near_one() {
        assert_eq!(AlphaValue::new(1.0 + 1e-9).unwrap(), AlphaValue::One);
        assert_eq!(AlphaValue::new(0.0).unwrap(), AlphaValue::Zero);
        assert_eq!(
            AlphaValue::new(f64::INFINITY).unwrap(),
            AlphaValue::Infinity
        );
        assert!(matches!(
            AlphaValue::new(0.5).unwrap(),
            AlphaValue::Finite(_)
        ));
        assert!(AlphaValue::new(-0.1).is_err());
        assert!(AlphaValue::new(f64::NAN).is_err());
    }

    #[test]
    fn classical_two_point_examples() {
        let d = classical_divergence(&[1.0, 0.0], &[0.5, 0.5], AlphaValue::Finite(0.5)).unwrap();
        assert!((d.finite().unwrap() - 2.0f64.ln()).abs() < 1e-12);
        let same = classical_divergence(&[0.3, 0.7], &[0.3, 0.7], AlphaValue::Finite(2.0)).unwrap();
        assert!(same.finite().unwrap().abs() < 1e-12);
        // Kernel violation above order 1.
        let inf = classical_divergence(&[0.5, 0.5], &[1.0, 0.0], AlphaValue::Finite(2.0)).unwrap();
        assert_eq!(inf, ExtendedReal::Infinity);
    }

    #[test]
    fn quantum_families_reduce_to_classical_on_diagonals() {
        let p = [0.6, 0.3, 0.1];
        let q = [0.2, 0.5, 0.3];
        let rho = pos_diag(&p);
        let sigma = pos_diag(&q);
        for family in QUANTUM {
            for alpha in [0.3, 0.7, 1.8, 3.0] {
                if family == DivergenceFamily::ReverseMinimal && alpha >= 1.0 {
                    continue;
                }
                let dq = divergence(family, AlphaValue::Finite(alpha), &rho, &sigma)
                    .unwrap()
                    .finite()
                    .unwrap();
                let dc = classical_divergence(&p, &q, AlphaValue::Finite(alpha))
                    .unwrap()
                    .finite()
                    .unwrap();
                assert!((dq - dc).abs() < 1e-10, "{family} at {alpha}: {dq} vs {dc}");
            }
        }
    }

    #[test]
    fn kl_examples_and_petz_limit() {
        let rho = pos_diag(&[1.0, 0.0]);
        let sigma = pos_diag(&[0.5, 0.5]);
        let d = kl_divergence(&rho, &sigma).unwrap().finite().unwrap();
        assert!((d - 2.0f64.ln()).abs() < 1e-12);

        let a = random_density(3, 3, 11).unwrap();
        let b = random_density(3, 3, 12).unwrap();
        let kl = kl_divergence(a.positive(), b.positive())
            .unwrap()
            .finite()
            .unwrap();
        for eps in [1e-4, -1e-4] {
            let near = q_value(DivergenceFamily::Petz, 1.0 + eps, a.positive(), b.positive())
                .unwrap()
                .ln()
                / eps;
            assert!((near - kl).abs() < 1e-3, "eps {eps}: {near} vs {kl}");
        }
    }

    #[test]
    fn belavkin_staszewski_commuting_and_limit() {
        let rho = pos_diag(&[0.7, 0.3]);
        let sigma = pos_diag(&[0.4, 0.6]);
        let bs = belavkin_staszewski(&rho, &sigma).unwrap().finite().unwrap();
        let kl = kl_divergence(&rho, &sigma).unwrap().finite().unwrap();
        assert!((bs - kl).abs() < 1e-10);

        let a = random_density(3, 3, 21).unwrap();
        let b = random_density(3, 3, 22).unwrap();
        let bs = belavkin_staszewski(a.positive(), b.positive())
            .unwrap()
            .finite()
            .unwrap();
        let eps = 1e-4;
        let near = divergence(
            DivergenceFamily::Maximal,
            AlphaValue::Finite(1.0 + eps),
            a.positive(),
            b.positive(),
        )
        .unwrap()
        .finite()
        .unwrap();
        assert!((near - bs).abs() < 1e-3, "{near} vs {bs}");
    }

    #[test]
    fn ordering_chain_on_a_fixed_noncommuting_pair() {
        let rho = DensityOperator::from_matrix(plus_state().matrix().clone()).unwrap();
        let sigma = pos_diag(&[0.75, 0.25]);
        for alpha in [0.2, 0.5, 0.8, 1.3, 2.0] {
            let minimal = divergence(
                DivergenceFamily::Minimal,
                AlphaValue::Finite(alpha),
                rho.positive(),
                &sigma,
            )
            .unwrap()
            .to_f64();
            let petz = divergence(
                DivergenceFamily::Petz,
                AlphaValue::Finite(alpha),
                rho.positive(),
                &sigma,
            )
            .unwrap()
            .to_f64();
            let maximal = divergence(
                DivergenceFamily::Maximal,
                AlphaValue::Finite(alpha),
                rho.positive(),
                &sigma,
            )
            .unwrap()
            .to_f64();
            assert!(minimal <= petz + 1e-10, "alpha {alpha}");
            assert!(petz <= maximal + 1e-10, "alpha {alpha}");
            if alpha < 1.0 {
                let reverse = divergence(
                    DivergenceFamily::ReverseMinimal,
                    AlphaValue::Finite(alpha),
                    rho.positive(),
                    &sigma,
                )
                .unwrap()
                .to_f64();
                assert!(reverse <= petz + 1e-10, "alpha {alpha}");
            }
        }
    }

    #[test]
    fn symmetry_between_sandwiched_and_reverse() {
        let rho = random_density(3, 3, 31).unwrap();
        let sigma = random_density(3, 3, 32).unwrap();
        for alpha in [0.2, 0.4, 0.6, 0.8] {
            let reverse = divergence(
                DivergenceFamily::ReverseMinimal,
                AlphaValue::Finite(alpha),
                rho.positive(),
                sigma.positive(),
            )
            .unwrap()
            .finite()
            .unwrap();
            let swapped = divergence(
                DivergenceFamily::Minimal,
                AlphaValue::Finite(1.0 - alpha),
                sigma.positive(),
                rho.positive(),
            )
            .unwrap()
            .finite()
            .unwrap();
            let expect = alpha / (1.0 - alpha) * swapped;
            assert!(
                (reverse - expect).abs() < 1e-9,
                "alpha {alpha}: {reverse} vs {expect}"
            );
        }
    }

    #[test]
    fn reverse_equals_sandwiched_at_one_half() {
        let rho = random_density(4, 4, 41).unwrap();
        let sigma = random_density(4, 4, 42).unwrap();
        let reverse = divergence(
            DivergenceFamily::ReverseMinimal,
            AlphaValue::Finite(0.5),
            rho.positive(),
            sigma.positive(),
        )
        .unwrap()
        .finite()
        .unwrap();
        let minimal = divergence(
            DivergenceFamily::Minimal,
            AlphaValue::Finite(0.5),
            rho.positive(),
            sigma.positive(),
        )
        .unwrap()
        .finite()
        .unwrap();
        assert!((reverse - minimal).abs() < 1e-9);
    }

    #[test]
    fn endpoint_proxies_bound_the_finite_orders() {
        // Monotonicity in the order pins the proxies: D_0 <= D_0.5 and
        // D_2 <= D_inf for each family.
        let rho = random_density(3, 3, 51).unwrap();
        let sigma = random_density(3, 3, 52).unwrap();
        for family in [DivergenceFamily::Petz, DivergenceFamily::Minimal] {
            let d0 = divergence(family, AlphaValue::Zero, rho.positive(), sigma.positive())
                .unwrap()
                .finite()
                .unwrap();
            let dh = divergence(
                family,
                AlphaValue::Finite(0.5),
                rho.positive(),
                sigma.positive(),
            )
            .unwrap()
            .finite()
            .unwrap();
            let d2 = divergence(
                family,
                AlphaValue::Finite(2.0),
                rho.positive(),
                sigma.positive(),
            )
            .unwrap()
            .finite()
            .unwrap();
            let dinf = divergence(
                family,
                AlphaValue::Infinity,
                rho.positive(),
                sigma.positive(),
            )
            .unwrap()
            .finite()
            .unwrap();
            assert!(d0 <= dh + 1e-9, "{family}");
            assert!(d2 <= dinf + 1e-9, "{family}");
            assert!(d0.is_finite() && dinf.is_finite());
        }
    }

    #[test]
    fn family_names_round_trip() {
        for family in [
            DivergenceFamily::Petz,
            DivergenceFamily::Minimal,
            DivergenceFamily::ReverseMinimal,
            DivergenceFamily::Maximal,
            DivergenceFamily::Classical,
        ] {
            assert_eq!(DivergenceFamily::parse(family.name()).unwrap(), family);
        }
        assert!(DivergenceFamily::parse("renyi").is_err());
    }
}
