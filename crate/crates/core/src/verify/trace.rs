//! Trace inequality checks: split-versus-joint trace powers, the reverse
//! bound with its norm corrections, Schatten-norm Hoelder, and the
//! exponential trace bounds with their geometric-mean reversals.
//!
//! Margins for multiplicative inequalities are taken between logarithms, so
//! scale drops out and exact-equality cases (commuting inputs, the trivial
//! exponent line) land within machine precision of zero.

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use alloc::format;
use alloc::vec::Vec;

use crate::div::{geometric_mean_weighted, karcher_mean};
use crate::error::{Error, Result};
use crate::mat::{
    commutator_norm, eigh, ginibre_with, log_sum_exp, random_hermitian_with, random_psd_with,
    random_unitary_with, schatten_norm, ComplexMatrix, HermitianOperator, PositiveOperator,
};

use super::{Cell, Witness};

/// `log tr M^p` from the spectrum, zero eigenvalues skipped (exact for
/// `p > 0` since they contribute nothing to the trace power).
pub(super) fn log_trace_power(op: &PositiveOperator, p: f64) -> f64 {
    let spec = op.spectrum();
    log_sum_exp(
        spec.eigenvalues()
            .iter()
            .zip(spec.support_mask())
            .filter(|&(_, &kept)| kept)
            .map(|(&l, _)| p * l.ln()),
    )
}

/// `log || M^t ||_a` for positive `M`, any `a > 0` including infinity.
fn log_schatten_power(op: &PositiveOperator, t: f64, inv_a: f64) -> f64 {
    let spec = op.spectrum();
    let logs: Vec<f64> = spec
        .eigenvalues()
        .iter()
        .zip(spec.support_mask())
        .filter(|&(_, &kept)| kept)
        .map(|(&l, _)| t * l.ln())
        .collect();
    if inv_a == 0.0 {
        // Operator norm: the largest singular value of M^t.
        logs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        let a = 1.0 / inv_a;
        inv_a * log_sum_exp(logs.iter().map(|&x| a * x))
    }
}

/// Fractional power of a positive operator, restricted to its support.
fn power(op: &PositiveOperator, t: f64) -> ComplexMatrix {
    op.spectrum().apply(true, |x| x.powf(t))
}

/// `B^{s} A^{t} B^{s}` rewrapped as a positive operator.
fn conjugated_power(a: &PositiveOperator, t: f64, b: &PositiveOperator, s: f64) -> Result<PositiveOperator> {
    let bs = power(b, s);
    let at = power(a, t);
    PositiveOperator::from_matrix((&(&bs * &at) * &bs).hermitian_part())
}

/// `e^{K}` of the Hermitian part of `k`.
fn herm_exp(k: &ComplexMatrix) -> Result<PositiveOperator> {
    let spec = eigh(&HermitianOperator::new(k.hermitian_part())?)?;
    PositiveOperator::from_matrix(spec.apply(false, |x| x.exp()))
}

/// `log tr e^{K}` straight from the eigenvalues of the Hermitian part.
fn log_trace_exp(k: &ComplexMatrix) -> Result<f64> {
    let spec = eigh(&HermitianOperator::new(k.hermitian_part())?)?;
    Ok(log_sum_exp(spec.eigenvalues().iter().copied()))
}

/// Draws a pair of Hermitians sharing an eigenbasis.
fn commuting_hermitian_pair(dim: usize, rng: &mut ChaCha8Rng) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let u = random_unitary_with(dim, rng)?;
    let mut d1 = Vec::with_capacity(dim);
    let mut d2 = Vec::with_capacity(dim);
    for _ in 0..dim {
        d1.push(crate::mat::standard_normal(rng));
        d2.push(crate::mat::standard_normal(rng));
    }
    let conj = |d: &[f64]| {
        let lam = ComplexMatrix::diag(d);
        (&(&u * &lam) * &u.adjoint()).hermitian_part()
    };
    Ok((conj(&d1), conj(&d2)))
}

pub(super) fn gen_alt(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("alt");
    w.put_matrix("a", random_psd_with(dim, rng)?.matrix().clone());
    w.put_matrix("b", random_psd_with(dim, rng)?.matrix().clone());
    w.put_scalar("r", cell.params[0]);
    w.put_scalar("q", cell.params[1]);
    Ok(w)
}

pub(super) fn eval_alt(w: &Witness) -> Result<f64> {
    let a = PositiveOperator::from_matrix(w.matrix("a")?.clone())?;
    let b = PositiveOperator::from_matrix(w.matrix("b")?.clone())?;
    let r = w.scalar("r")?;
    let q = w.scalar("q")?;
    let split = log_trace_power(&conjugated_power(&a, r, &b, r / 2.0)?, q);
    let joint = log_trace_power(&conjugated_power(&a, 1.0, &b, 0.5)?, r * q);
    // The split form is the smaller trace for r <= 1 and the larger for
    // r >= 1; the margin is oriented so that positive means the claim holds.
    Ok(if r <= 1.0 { joint - split } else { split - joint })
}

pub(super) fn gen_reverse_alt(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let r = cell.params[0];
    let q = cell.params[1];
    // The norm exponents must satisfy the scaling identity
    // 1/(2 min(r,1) q) = 1/(2 max(r,1) q) + 1/a + 1/b, so the total budget
    // c = |1 - r| / (2 r q) is split between 1/a and 1/b at a dyadic
    // fraction; the endpoints put everything on one norm (the other goes to
    // the operator norm).
    let budget = (1.0 - r).abs() / (2.0 * r * q);
    let fractions = [0.0, 0.25, 0.5, 0.75, 1.0];
    let f = fractions[rng.random_range(0..fractions.len())];
    let mut w = Witness::new("reverse_alt");
    w.put_matrix("a", random_psd_with(dim, rng)?.matrix().clone());
    w.put_matrix("b", random_psd_with(dim, rng)?.matrix().clone());
    w.put_scalar("r", r);
    w.put_scalar("q", q);
    w.put_scalar("inv_a", f * budget);
    w.put_scalar("inv_b", (1.0 - f) * budget);
    Ok(w)
}

/// Log of the right-hand side of the reverse bound: the split trace power
/// raised to `r` times the two norm corrections.
fn reverse_alt_rhs_log(
    a: &PositiveOperator,
    b: &PositiveOperator,
    r: f64,
    q: f64,
    inv_a: f64,
    inv_b: f64,
) -> Result<f64> {
    let split = log_trace_power(&conjugated_power(a, r, b, r / 2.0)?, q);
    let t = (1.0 - r).abs() / 2.0;
    let corr_a = log_schatten_power(a, t, inv_a);
    let corr_b = log_schatten_power(b, t, inv_b);
    Ok(if r <= 1.0 {
        r * split + 2.0 * r * q * (corr_a + corr_b)
    } else {
        r * split - 2.0 * r * q * (corr_a + corr_b)
    })
}

pub(super) fn eval_reverse_alt(w: &Witness) -> Result<f64> {
    let a = PositiveOperator::from_matrix(w.matrix("a")?.clone())?;
    let b = PositiveOperator::from_matrix(w.matrix("b")?.clone())?;
    let r = w.scalar("r")?;
    let q = w.scalar("q")?;
    let inv_a = w.scalar("inv_a")?;
    let inv_b = w.scalar("inv_b")?;
    let joint = log_trace_power(&conjugated_power(&a, 1.0, &b, 0.5)?, r * q);
    let rhs = reverse_alt_rhs_log(&a, &b, r, q, inv_a, inv_b)?;
    // Below r = 1 the corrected split form dominates the joint trace; above
    // it the domination flips.
    Ok(if r <= 1.0 { rhs - joint } else { joint - rhs })
}

pub(super) fn gen_audenaert(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("reverse_alt_audenaert");
    w.put_matrix("a", random_psd_with(dim, rng)?.matrix().clone());
    w.put_matrix("b", random_psd_with(dim, rng)?.matrix().clone());
    w.put_scalar("r", cell.params[0]);
    w.put_scalar("q", cell.params[1]);
    Ok(w)
}

pub(super) fn eval_audenaert(w: &Witness) -> Result<f64> {
    let a = PositiveOperator::from_matrix(w.matrix("a")?.clone())?;
    let b = PositiveOperator::from_matrix(w.matrix("b")?.clone())?;
    let r = w.scalar("r")?;
    let q = w.scalar("q")?;
    // Committing the whole exponent budget to the first norm collapses the
    // correction to (tr A^{rq})^{1-r} times the operator norm of the second
    // factor's power. Both the specialization identity and the inequality
    // itself are required to hold.
    let inv_a = (1.0 - r) / (2.0 * r * q);
    let general = reverse_alt_rhs_log(&a, &b, r, q, inv_a, 0.0)?;
    let split = log_trace_power(&conjugated_power(&a, r, &b, r / 2.0)?, q);
    let direct = r * split
        + (1.0 - r) * log_trace_power(&a, r * q)
        + r * q * (1.0 - r) * log_schatten_power(&b, 1.0, 0.0);
    let joint = log_trace_power(&conjugated_power(&a, 1.0, &b, 0.5)?, r * q);
    Ok((general - joint).min(-(general - direct).abs()))
}

pub(super) fn gen_hoelder(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let factors = cell.params[0] as usize;
    let mut w = Witness::new("hoelder");
    let choices = [0.25, 0.5, 1.0, 2.0];
    for k in 0..factors {
        w.put_matrix(&format!("m{k}"), ginibre_with(dim, dim, rng));
        w.put_scalar(
            &format!("inv{k}"),
            choices[rng.random_range(0..choices.len())],
        );
    }
    Ok(w)
}

pub(super) fn eval_hoelder(w: &Witness) -> Result<f64> {
    let factors = w.matrices_with_prefix("m");
    let mut inv_total = 0.0;
    let mut rhs = 0.0;
    let mut product: Option<ComplexMatrix> = None;
    for (k, m) in factors.iter().enumerate() {
        let inv = w.scalar(&format!("inv{k}"))?;
        inv_total += inv;
        rhs += schatten_norm(m, 1.0 / inv)?.ln();
        product = Some(match product {
            Some(p) => &p * *m,
            None => (*m).clone(),
        });
    }
    let product = product.ok_or_else(|| Error::Config("hoelder witness has no factors".into()))?;
    let lhs = schatten_norm(&product, 1.0 / inv_total)?.ln();
    Ok(rhs - lhs)
}

pub(super) fn gen_gt(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    // Every fourth draw shares an eigenbasis so the equality case is
    // exercised alongside the generic strict one.
    let commuting = rng.random_range(0..4usize) == 0;
    let (h1, h2) = if commuting {
        commuting_hermitian_pair(dim, rng)?
    } else {
        (random_hermitian_with(dim, rng), random_hermitian_with(dim, rng))
    };
    let flagged = commutator_norm(&h1, &h2) <= 1e-10;
    let mut w = Witness::new("gt");
    w.put_matrix("h1", h1);
    w.put_matrix("h2", h2);
    w.put_scalar("flagged", if flagged { 1.0 } else { 0.0 });
    Ok(w)
}

pub(super) fn eval_gt(w: &Witness) -> Result<f64> {
    let h1 = w.matrix("h1")?;
    let h2 = w.matrix("h2")?;
    let coupled = log_trace_exp(&(h1 + h2))?;
    let product = (herm_exp(h1)?.matrix() * herm_exp(h2)?.matrix()).trace_re();
    let gap = product.ln() - coupled;
    // Commuting pairs must sit on the equality line; otherwise the product
    // trace dominates.
    Ok(if w.scalar("flagged")? != 0.0 { -gap.abs() } else { gap })
}

pub(super) fn gen_reverse_gt(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let alpha = cell
        .alpha
        .ok_or_else(|| Error::Config("reverse_gt needs an order grid".into()))?;
    let mut w = Witness::new("reverse_gt");
    w.put_matrix("h1", random_hermitian_with(dim, rng));
    w.put_matrix("h2", random_hermitian_with(dim, rng));
    w.put_scalar("p", cell.params[0]);
    w.put_scalar("alpha", super::encode_alpha(alpha));
    Ok(w)
}

pub(super) fn eval_reverse_gt(w: &Witness) -> Result<f64> {
    let h1 = w.matrix("h1")?;
    let h2 = w.matrix("h2")?;
    let p = w.scalar("p")?;
    let alpha = match w.alpha("alpha")? {
        crate::div::AlphaValue::Zero => 0.0,
        crate::div::AlphaValue::One => 1.0,
        crate::div::AlphaValue::Finite(a) => a,
        crate::div::AlphaValue::Infinity => {
            return Err(Error::Config("reverse_gt weight must be finite".into()))
        }
    };
    let e1 = herm_exp(&h1.scale_re(p))?;
    let e2 = herm_exp(&h2.scale_re(p))?;
    let mean = geometric_mean_weighted(&e1, &e2, alpha)?;
    let lhs = log_trace_power(&mean, 1.0 / p);
    let rhs = log_trace_exp(&(&h1.scale_re(1.0 - alpha) + &h2.scale_re(alpha)))?;
    Ok(rhs - lhs)
}

pub(super) fn gen_reverse_gt_log(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("reverse_gt_log");
    w.put_matrix("a", random_psd_with(dim, rng)?.matrix().clone());
    w.put_matrix("b", random_psd_with(dim, rng)?.matrix().clone());
    w.put_scalar("p", cell.params[0]);
    Ok(w)
}

pub(super) fn eval_reverse_gt_log(w: &Witness) -> Result<f64> {
    let a = PositiveOperator::from_matrix(w.matrix("a")?.clone())?;
    let b = PositiveOperator::from_matrix(w.matrix("b")?.clone())?;
    let p = w.scalar("p")?;
    let inner = conjugated_power(&b, p, &a, p / 2.0)?;
    let log_inner = inner.spectrum().apply(true, |x| x.ln());
    let lhs = (a.matrix() * &log_inner).trace_re() / p;
    let log_a = a.spectrum().apply(true, |x| x.ln());
    let log_b = b.spectrum().apply(true, |x| x.ln());
    let rhs = (a.matrix() * &(&log_a + &log_b)).trace_re();
    Ok(lhs - rhs)
}

pub(super) fn gen_reverse_gt_multi(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let n = cell.params[0] as usize;
    let p = cell.params[1];
    let mut w = Witness::new("reverse_gt_multi");
    // Moderate norms keep the iterative mean well inside its convergence
    // region without restricting which directions get exercised.
    for j in 0..n {
        w.put_matrix(&format!("h{j}"), random_hermitian_with(dim, rng).scale_re(0.5));
    }
    let uniform = rng.random_range(0..2usize) == 0;
    let mut weights = Vec::with_capacity(n);
    if uniform {
        weights.resize(n, 1.0 / n as f64);
    } else {
        let mut total = 0.0;
        for _ in 0..n {
            let u: f64 = rng.random_range(1e-3..1.0);
            let e = -u.ln();
            weights.push(e);
            total += e;
        }
        for v in &mut weights {
            *v /= total;
        }
    }
    for (j, &wj) in weights.iter().enumerate() {
        w.put_scalar(&format!("w{j}"), wj);
    }
    w.put_scalar("p", p);
    Ok(w)
}

pub(super) fn eval_reverse_gt_multi(w: &Witness) -> Result<f64> {
    let hs = w.matrices_with_prefix("h");
    let p = w.scalar("p")?;
    let mut weights = Vec::with_capacity(hs.len());
    let mut exps = Vec::with_capacity(hs.len());
    let mut coupled = ComplexMatrix::zeros(hs[0].rows(), hs[0].cols());
    for (j, h) in hs.iter().enumerate() {
        let wj = w.scalar(&format!("w{j}"))?;
        weights.push(wj);
        exps.push(herm_exp(&h.scale_re(p))?);
        coupled = &coupled + &h.scale_re(wj);
    }
    let mean = karcher_mean(&weights, &exps)?;
    let lhs = log_trace_power(&mean, 1.0 / p);
    let rhs = log_trace_exp(&coupled)?;
    Ok(rhs - lhs)
}
