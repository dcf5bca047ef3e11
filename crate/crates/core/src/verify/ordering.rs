//! Divergence-level checks: the ordering of the four families, the symmetry
//! tying the reverse sandwiched family to the sandwiched one, the defining
//! axioms (unitary invariance, additivity, order), data processing under
//! three channel classes, the asymptotic pinching lower bound, and the
//! two-sided bound linking the Petz and sandwiched families below order one
//! together with its commutative equality condition.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use alloc::vec;
use alloc::vec::Vec;

use crate::div::{classical_divergence, divergence, log_q_value, q_value, AlphaValue, DivergenceFamily};
use crate::error::{Error, Result};
use crate::mat::{
    eigh, partial_trace, pinching, random_density_with, random_psd_with, random_unitary_with,
    standard_normal, tensor, ComplexMatrix, DimensionProfile, HermitianOperator, PositiveOperator,
};

use super::{encode_alpha, Cell, Witness};

/// Orders at which each family's data processing inequality is exercised,
/// kept inside the range where the family is known monotone.
const DPI_ORDERS: &[(DivergenceFamily, &[f64])] = &[
    (DivergenceFamily::Petz, &[0.3, 0.7, 1.5, 2.0]),
    (DivergenceFamily::Minimal, &[0.5, 0.8, 1.5, 3.0]),
    (DivergenceFamily::ReverseMinimal, &[0.2, 0.5]),
    (DivergenceFamily::Maximal, &[0.3, 0.7, 1.5, 2.0]),
];

fn pos(w: &Witness, name: &str) -> Result<PositiveOperator> {
    PositiveOperator::from_matrix(w.matrix(name)?.clone())
}

fn finite_divergence(
    family: DivergenceFamily,
    alpha: AlphaValue,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<f64> {
    Ok(divergence(family, alpha, rho, sigma)?.to_f64())
}

/// Draws a full-rank density pair and stores it under the given names.
fn put_density_pair(w: &mut Witness, dim: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    w.put_matrix("rho", random_density_with(dim, dim, rng)?.matrix().clone());
    w.put_matrix("sigma", random_density_with(dim, dim, rng)?.matrix().clone());
    Ok(())
}

pub(super) fn gen_ordering_chain(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let mut w = Witness::new("ordering_chain");
    put_density_pair(&mut w, cell.dims[0], rng)?;
    w.put_scalar(
        "alpha",
        encode_alpha(cell.alpha.ok_or_else(|| Error::Config("ordering_chain needs an order".into()))?),
    );
    Ok(w)
}

pub(super) fn eval_ordering_chain(w: &Witness) -> Result<f64> {
    let rho = pos(w, "rho")?;
    let sigma = pos(w, "sigma")?;
    let alpha = w.alpha("alpha")?;
    let order = alpha.evaluation_order().unwrap_or(1.0);
    let minimal = finite_divergence(DivergenceFamily::Minimal, alpha, &rho, &sigma)?;
    let petz = finite_divergence(DivergenceFamily::Petz, alpha, &rho, &sigma)?;
    let mut margin = petz - minimal;
    // The geometric-mean family caps the chain where its monotonicity is
    // established, and the reverse sandwiched family undercuts Petz below
    // order one.
    if order <= 2.0 {
        let maximal = finite_divergence(DivergenceFamily::Maximal, alpha, &rho, &sigma)?;
        margin = margin.min(maximal - petz);
    }
    if order < 1.0 {
        let reverse = finite_divergence(DivergenceFamily::ReverseMinimal, alpha, &rho, &sigma)?;
        margin = margin.min(petz - reverse);
    }
    Ok(margin)
}

pub(super) fn gen_symmetry_relation(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let mut w = Witness::new("symmetry_relation");
    put_density_pair(&mut w, cell.dims[0], rng)?;
    w.put_scalar(
        "alpha",
        encode_alpha(cell.alpha.ok_or_else(|| Error::Config("symmetry_relation needs an order".into()))?),
    );
    Ok(w)
}

pub(super) fn eval_symmetry_relation(w: &Witness) -> Result<f64> {
    let rho = pos(w, "rho")?;
    let sigma = pos(w, "sigma")?;
    let alpha = match w.alpha("alpha")? {
        AlphaValue::Finite(a) if a < 1.0 => a,
        other => {
            return Err(Error::Config(alloc::format!(
                "symmetry_relation needs a finite order below 1, got {other}"
            )))
        }
    };
    let lhs = finite_divergence(
        DivergenceFamily::ReverseMinimal,
        AlphaValue::Finite(alpha),
        &rho,
        &sigma,
    )?;
    let rhs = alpha / (1.0 - alpha)
        * finite_divergence(
            DivergenceFamily::Minimal,
            AlphaValue::Finite(1.0 - alpha),
            &sigma,
            &rho,
        )?;
    Ok(-(lhs - rhs).abs())
}

pub(super) fn gen_axiom_unitary(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("axiom_unitary");
    put_density_pair(&mut w, dim, rng)?;
    w.put_matrix("u", random_unitary_with(dim, rng)?);
    w.put_scalar(
        "alpha",
        encode_alpha(cell.alpha.ok_or_else(|| Error::Config("axiom_unitary needs an order".into()))?),
    );
    Ok(w)
}

pub(super) fn eval_axiom_unitary(w: &Witness) -> Result<f64> {
    let rho = pos(w, "rho")?;
    let sigma = pos(w, "sigma")?;
    let u = w.matrix("u")?;
    let alpha = w.alpha("alpha")?;
    let order = alpha.evaluation_order().unwrap_or(1.0);
    let conj = |m: &PositiveOperator| {
        PositiveOperator::from_matrix((&(u * m.matrix()) * &u.adjoint()).hermitian_part())
    };
    let rho_u = conj(&rho)?;
    let sigma_u = conj(&sigma)?;
    let mut worst: f64 = 0.0;
    for family in DivergenceFamily::QUANTUM {
        if family == DivergenceFamily::ReverseMinimal && order >= 1.0 {
            continue;
        }
        let before = finite_divergence(family, alpha, &rho, &sigma)?;
        let after = finite_divergence(family, alpha, &rho_u, &sigma_u)?;
        worst = worst.max((before - after).abs());
    }
    Ok(-worst)
}

pub(super) fn gen_axiom_additivity(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let (d1, d2) = (cell.dims[0], cell.dims[1]);
    let mut w = Witness::new("axiom_additivity");
    w.put_matrix("rho1", random_density_with(d1, d1, rng)?.matrix().clone());
    w.put_matrix("sigma1", random_density_with(d1, d1, rng)?.matrix().clone());
    w.put_matrix("rho2", random_density_with(d2, d2, rng)?.matrix().clone());
    w.put_matrix("sigma2", random_density_with(d2, d2, rng)?.matrix().clone());
    w.put_scalar(
        "alpha",
        encode_alpha(cell.alpha.ok_or_else(|| Error::Config("axiom_additivity needs an order".into()))?),
    );
    Ok(w)
}

pub(super) fn eval_axiom_additivity(w: &Witness) -> Result<f64> {
    let rho1 = pos(w, "rho1")?;
    let sigma1 = pos(w, "sigma1")?;
    let rho2 = pos(w, "rho2")?;
    let sigma2 = pos(w, "sigma2")?;
    let order = match w.alpha("alpha")? {
        AlphaValue::Finite(a) => a,
        other => {
            return Err(Error::Config(alloc::format!(
                "axiom_additivity needs a finite order, got {other}"
            )))
        }
    };
    let rho = PositiveOperator::from_matrix(tensor(rho1.matrix(), rho2.matrix()))?;
    let sigma = PositiveOperator::from_matrix(tensor(sigma1.matrix(), sigma2.matrix()))?;
    let mut worst: f64 = 0.0;
    for family in DivergenceFamily::QUANTUM {
        if family == DivergenceFamily::ReverseMinimal && order >= 1.0 {
            continue;
        }
        let joint = log_q_value(family, order, &rho, &sigma)?;
        let split = log_q_value(family, order, &rho1, &sigma1)?
            + log_q_value(family, order, &rho2, &sigma2)?;
        worst = worst.max((joint - split).abs() / split.abs().max(1.0));
    }
    Ok(-worst)
}

fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = (a.rows(), b.rows());
    ComplexMatrix::from_fn(n + m, n + m, |i, j| {
        if i < n && j < n {
            a.get(i, j)
        } else if i >= n && j >= n {
            b.get(i - n, j - n)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub(super) fn gen_axiom_direct_sum(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let (d1, d2) = (cell.dims[0], cell.dims[1]);
    let mut w = Witness::new("axiom_direct_sum");
    let t: f64 = rng.random_range(0.1..0.9);
    let scale = |m: &ComplexMatrix, f: f64| m.scale_re(f);
    w.put_matrix("rho1", scale(random_density_with(d1, d1, rng)?.matrix(), t));
    w.put_matrix("sigma1", scale(random_density_with(d1, d1, rng)?.matrix(), 1.0 - t));
    w.put_matrix("rho2", scale(random_density_with(d2, d2, rng)?.matrix(), 1.0 - t));
    w.put_matrix("sigma2", scale(random_density_with(d2, d2, rng)?.matrix(), t));
    w.put_scalar(
        "alpha",
        encode_alpha(cell.alpha.ok_or_else(|| Error::Config("axiom_direct_sum needs an order".into()))?),
    );
    Ok(w)
}

pub(super) fn eval_axiom_direct_sum(w: &Witness) -> Result<f64> {
    let rho1 = pos(w, "rho1")?;
    let sigma1 = pos(w, "sigma1")?;
    let rho2 = pos(w, "rho2")?;
    let sigma2 = pos(w, "sigma2")?;
    let order = match w.alpha("alpha")? {
        AlphaValue::Finite(a) => a,
        other => {
            return Err(Error::Config(alloc::format!(
                "axiom_direct_sum needs a finite order, got {other}"
            )))
        }
    };
    let rho = PositiveOperator::from_matrix(direct_sum(rho1.matrix(), rho2.matrix()))?;
    let sigma = PositiveOperator::from_matrix(direct_sum(sigma1.matrix(), sigma2.matrix()))?;
    let mut worst: f64 = 0.0;
    for family in DivergenceFamily::QUANTUM {
        if family == DivergenceFamily::ReverseMinimal && order >= 1.0 {
            continue;
        }
        let whole = q_value(family, order, &rho, &sigma)?;
        let parts = q_value(family, order, &rho1, &sigma1)? + q_value(family, order, &rho2, &sigma2)?;
        worst = worst.max((whole - parts).abs() / whole.max(1e-300));
    }
    Ok(-worst)
}

pub(super) fn gen_axiom_order(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("axiom_order");
    let sigma = random_density_with(dim, dim, rng)?;
    let bump = random_psd_with(dim, rng)?;
    let lift: f64 = rng.random_range(0.05..0.5);
    let rho = (sigma.matrix() + &bump.matrix().scale_re(lift / bump.trace().max(1e-12))).hermitian_part();
    w.put_matrix("rho", rho);
    w.put_matrix("sigma", sigma.matrix().clone());
    w.put_scalar(
        "alpha",
        encode_alpha(cell.alpha.ok_or_else(|| Error::Config("axiom_order needs an order".into()))?),
    );
    Ok(w)
}

pub(super) fn eval_axiom_order(w: &Witness) -> Result<f64> {
    let rho = pos(w, "rho")?;
    let sigma = pos(w, "sigma")?;
    let alpha = w.alpha("alpha")?;
    let order = alpha.evaluation_order().unwrap_or(1.0);
    let mut margin = f64::INFINITY;
    for family in DivergenceFamily::QUANTUM {
        if family == DivergenceFamily::ReverseMinimal && order >= 1.0 {
            continue;
        }
        margin = margin.min(finite_divergence(family, alpha, &rho, &sigma)?);
    }
    Ok(margin)
}

/// Worst data-processing slack across all families at their monotone orders.
fn dpi_margin(
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
    rho_out: &PositiveOperator,
    sigma_out: &PositiveOperator,
) -> Result<f64> {
    let mut margin = f64::INFINITY;
    for (family, orders) in DPI_ORDERS {
        for &a in *orders {
            let before = finite_divergence(*family, AlphaValue::Finite(a), rho, sigma)?;
            let after = finite_divergence(*family, AlphaValue::Finite(a), rho_out, sigma_out)?;
            margin = margin.min(before - after);
        }
    }
    Ok(margin)
}

pub(super) fn gen_dpi_pinching(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("dpi_pinching");
    put_density_pair(&mut w, dim, rng)?;
    w.put_matrix("h", crate::mat::random_hermitian_with(dim, rng));
    Ok(w)
}

pub(super) fn eval_dpi_pinching(w: &Witness) -> Result<f64> {
    let rho = pos(w, "rho")?;
    let sigma = pos(w, "sigma")?;
    let h = HermitianOperator::new(w.matrix("h")?.hermitian_part())?;
    let rho_p = PositiveOperator::from_matrix(pinching(&h, rho.matrix())?.hermitian_part())?;
    let sigma_p = PositiveOperator::from_matrix(pinching(&h, sigma.matrix())?.hermitian_part())?;
    dpi_margin(&rho, &sigma, &rho_p, &sigma_p)
}

pub(super) fn gen_dpi_partial_trace(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let total = cell.dims[0] * cell.dims[1];
    let mut w = Witness::new("dpi_partial_trace");
    put_density_pair(&mut w, total, rng)?;
    w.put_scalar("d1", cell.dims[0] as f64);
    w.put_scalar("d2", cell.dims[1] as f64);
    Ok(w)
}

pub(super) fn eval_dpi_partial_trace(w: &Witness) -> Result<f64> {
    let rho = pos(w, "rho")?;
    let sigma = pos(w, "sigma")?;
    let profile = DimensionProfile::new(vec![w.scalar("d1")? as usize, w.scalar("d2")? as usize])?;
    let rho_a = PositiveOperator::from_matrix(partial_trace(rho.matrix(), &profile, &[0])?)?;
    let sigma_a = PositiveOperator::from_matrix(partial_trace(sigma.matrix(), &profile, &[0])?)?;
    dpi_margin(&rho, &sigma, &rho_a, &sigma_a)
}

pub(super) fn gen_dpi_isometry(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("dpi_isometry");
    put_density_pair(&mut w, dim, rng)?;
    w.put_matrix("u", random_unitary_with(2 * dim, rng)?);
    Ok(w)
}

pub(super) fn eval_dpi_isometry(w: &Witness) -> Result<f64> {
    let rho = pos(w, "rho")?;
    let sigma = pos(w, "sigma")?;
    let u = w.matrix("u")?;
    let dim = rho.dim();
    // The first `dim` columns of the unitary embed the input space; the
    // enlarged state is then reduced over the fresh qubit factor.
    let v = ComplexMatrix::from_fn(2 * dim, dim, |i, j| u.get(i, j));
    let profile = DimensionProfile::new(vec![2, dim])?;
    let push = |m: &PositiveOperator| -> Result<PositiveOperator> {
        let big = (&(&v * m.matrix()) * &v.adjoint()).hermitian_part();
        PositiveOperator::from_matrix(partial_trace(&big, &profile, &[1])?)
    };
    let rho_out = push(&rho)?;
    let sigma_out = push(&sigma)?;
    dpi_margin(&rho, &sigma, &rho_out, &sigma_out)
}

/// Indices of the composite basis grouped by the multiset of their local
/// digits. Two basis vectors land in one group exactly when the eigenvalue
/// products of any diagonal tensor power agree, so these groups are the
/// degeneracy blocks of `sigma^(tensor n)` for generic spectra (accidental
/// extra degeneracy only refines the pinching, which keeps the bound valid).
fn multiset_blocks(dim: usize, copies: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let total = dim.pow(copies as u32);
    let mut groups: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for idx in 0..total {
        let mut digits = Vec::with_capacity(copies);
        let mut rest = idx;
        for _ in 0..copies {
            digits.push(rest % dim);
            rest /= dim;
        }
        digits.sort_unstable();
        match groups.iter_mut().find(|(key, _)| *key == digits) {
            Some((_, members)) => members.push(idx),
            None => groups.push((digits, vec![idx])),
        }
    }
    groups
}

pub(super) fn gen_pinching_bound(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let mut w = Witness::new("pinching_bound");
    put_density_pair(&mut w, cell.dims[0], rng)?;
    w.put_scalar(
        "alpha",
        encode_alpha(cell.alpha.ok_or_else(|| Error::Config("pinching_bound needs an order".into()))?),
    );
    Ok(w)
}

pub(super) fn eval_pinching_bound(w: &Witness) -> Result<f64> {
    let rho = pos(w, "rho")?;
    let sigma = pos(w, "sigma")?;
    let alpha = w.alpha("alpha")?;
    let dim = rho.dim();
    let bound = finite_divergence(DivergenceFamily::Minimal, alpha, &rho, &sigma)?;

    // Work in the eigenbasis of sigma so its tensor powers stay diagonal.
    let spec = sigma.spectrum();
    let basis = spec.eigenvectors();
    let log_s: Vec<f64> = spec.eigenvalues().iter().map(|&x| x.max(1e-300).ln()).collect();
    let rho_t = (&(&basis.adjoint() * rho.matrix()) * basis).hermitian_part();

    let mut margin = f64::INFINITY;
    let mut power = rho_t.clone();
    for copies in 1..=3usize {
        if copies > 1 {
            power = tensor(&power, &rho_t);
        }
        if dim.pow(copies as u32) > 64 {
            break;
        }
        // Pinch onto the degeneracy blocks, then read off the joint
        // classical pair: block eigenvalues of the pinched state against the
        // constant eigenvalue of sigma's power on that block.
        let mut p = Vec::new();
        let mut q = Vec::new();
        for (digits, members) in multiset_blocks(dim, copies) {
            let block = ComplexMatrix::from_fn(members.len(), members.len(), |i, j| {
                power.get(members[i], members[j])
            });
            let vals = eigh(&HermitianOperator::new(block.hermitian_part())?)?;
            let sigma_val = digits.iter().map(|&d| log_s[d]).sum::<f64>().exp();
            for &v in vals.eigenvalues() {
                p.push(v.max(0.0));
                q.push(sigma_val);
            }
        }
        let classical = classical_divergence(&p, &q, alpha)?.to_f64();
        margin = margin.min(bound - classical / copies as f64);
    }
    Ok(margin)
}

pub(super) fn gen_cor41(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("cor41");
    // Alternate between density pairs and freely scaled positive pairs: the
    // bound is stated for arbitrary nonzero positive operators and its
    // correction term only bites when the traces differ.
    if rng.random_range(0..2usize) == 0 {
        put_density_pair(&mut w, dim, rng)?;
    } else {
        w.put_matrix("rho", random_psd_with(dim, rng)?.matrix().clone());
        w.put_matrix("sigma", random_psd_with(dim, rng)?.matrix().clone());
    }
    w.put_scalar(
        "alpha",
        encode_alpha(cell.alpha.ok_or_else(|| Error::Config("cor41 needs an order".into()))?),
    );
    Ok(w)
}

pub(super) fn eval_cor41(w: &Witness) -> Result<f64> {
    let rho = pos(w, "rho")?;
    let sigma = pos(w, "sigma")?;
    let alpha = w.alpha("alpha")?;
    let minimal = finite_divergence(DivergenceFamily::Minimal, alpha, &rho, &sigma)?;
    let petz = finite_divergence(DivergenceFamily::Petz, alpha, &rho, &sigma)?;
    let a = match alpha {
        AlphaValue::One => 1.0,
        other => other.evaluation_order().unwrap_or(1.0),
    };
    let trace_term = (1.0 - a) * (rho.trace().ln() - sigma.trace().ln());
    let upper = petz - minimal;
    let lower = minimal - (a * petz + trace_term);
    let mut margin = upper.min(lower);
    // The multiplicative form of the same bound, checked directly on the
    // trace functionals away from the order-one limit.
    if let Some(order) = alpha.evaluation_order() {
        let log_qt = log_q_value(DivergenceFamily::Minimal, order, &rho, &sigma)?;
        let log_qp = log_q_value(DivergenceFamily::Petz, order, &rho, &sigma)?;
        let rhs = order * log_qp
            + order * (1.0 - order) * rho.trace().ln()
            + (1.0 - order) * (1.0 - order) * sigma.trace().ln();
        margin = margin.min(rhs - log_qt);
    }
    Ok(margin)
}

pub(super) fn gen_equality_condition(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("equality_condition");
    let commuting = rng.random_range(0..2usize) == 0;
    if commuting {
        // A shared eigenbasis with independent spectra: equality territory.
        let u = random_unitary_with(dim, rng)?;
        let draw = |rng: &mut ChaCha8Rng| -> ComplexMatrix {
            let mut d: Vec<f64> = (0..dim).map(|_| standard_normal(rng).exp()).collect();
            let total: f64 = d.iter().sum();
            for x in &mut d {
                *x /= total;
            }
            (&(&u * &ComplexMatrix::diag(&d)) * &u.adjoint()).hermitian_part()
        };
        let rho = draw(rng);
        let sigma = draw(rng);
        w.put_matrix("rho", rho);
        w.put_matrix("sigma", sigma);
    } else {
        put_density_pair(&mut w, dim, rng)?;
    }
    w.put_scalar("commuting", if commuting { 1.0 } else { 0.0 });
    w.put_scalar(
        "alpha",
        encode_alpha(cell.alpha.ok_or_else(|| Error::Config("equality_condition needs an order".into()))?),
    );
    Ok(w)
}

/// Strict-gap threshold for generic noncommuting draws.
const EQUALITY_GAP_FLOOR: f64 = 1e-6;

pub(super) fn eval_equality_condition(w: &Witness) -> Result<f64> {
    let rho = pos(w, "rho")?;
    let sigma = pos(w, "sigma")?;
    let alpha = w.alpha("alpha")?;
    let gap = finite_divergence(DivergenceFamily::Petz, alpha, &rho, &sigma)?
        - finite_divergence(DivergenceFamily::Minimal, alpha, &rho, &sigma)?;
    Ok(if w.scalar("commuting")? != 0.0 {
        -gap.abs()
    } else {
        gap - EQUALITY_GAP_FLOOR
    })
}
