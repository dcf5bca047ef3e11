//! Measurement and recovery checks: the two-sided bracket between fidelity
//! and its square-root-overlap relaxation with both trace-distance chains,
//! the analogous brackets for guessing probabilities and singlet fractions,
//! the Gram-matrix optimality criterion for the square-root measurement,
//! and the explicit dual certificate for the optimized-fidelity program.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use alloc::vec;
use alloc::vec::Vec;

use crate::ent::BipartiteState;
use crate::error::Result;
use crate::mat::{
    outer, random_density_with, random_pure_with, random_unitary_with, schatten_norm, tensor,
    ComplexMatrix, DensityOperator, DimensionProfile, PositiveOperator,
};
use crate::pg::{
    fidelity, p_guess_optimal, p_guess_pg, pgm_optimality, pretty_good_fidelity, sdp_certificate,
    singlet_fractions, trace_distance, CqEnsemble,
};

use super::{Cell, Witness};

fn density(w: &Witness, name: &str) -> Result<DensityOperator> {
    DensityOperator::from_matrix(w.matrix(name)?.clone())
}

fn simplex(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -rng.random_range(1e-12..1.0f64).ln()).collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    v
}

/// A density commuting partner pair: shared eigenbasis, independent spectra.
fn commuting_densities(dim: usize, rng: &mut ChaCha8Rng) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let u = random_unitary_with(dim, rng)?;
    let draw = |rng: &mut ChaCha8Rng| {
        let d = simplex(dim, rng);
        (&(&u * &ComplexMatrix::diag(&d)) * &u.adjoint()).hermitian_part()
    };
    let a = draw(rng);
    let b = draw(rng);
    Ok((a, b))
}

pub(super) fn gen_fidelity_bounds(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("fidelity_bounds");
    let commuting = rng.random_range(0..3usize) == 0;
    let (rho, sigma) = if commuting {
        commuting_densities(dim, rng)?
    } else {
        (
            random_density_with(dim, dim, rng)?.matrix().clone(),
            random_density_with(dim, dim, rng)?.matrix().clone(),
        )
    };
    w.put_matrix("rho", rho);
    w.put_matrix("sigma", sigma);
    w.put_scalar("commuting", if commuting { 1.0 } else { 0.0 });
    Ok(w)
}

pub(super) fn eval_fidelity_bounds(w: &Witness) -> Result<f64> {
    let rho = density(w, "rho")?;
    let sigma = density(w, "sigma")?;
    let f = fidelity(&rho, &sigma)?;
    let f_pg = pretty_good_fidelity(&rho, &sigma)?;
    let dist = trace_distance(&rho, &sigma)?;
    let mut margin = (f - f_pg).min(f_pg.sqrt() - f);
    // Both distance chains: the classic one through the fidelity and its
    // sharpening through the square-root overlap.
    margin = margin.min(dist - (1.0 - f));
    margin = margin.min((1.0 - f * f).max(0.0).sqrt() - dist);
    margin = margin.min(dist - (1.0 - f_pg));
    margin = margin.min((1.0 - f_pg * f_pg).max(0.0).sqrt() - dist);
    if w.scalar("commuting")? != 0.0 {
        // Commuting pairs collapse the bracket.
        margin = margin.min(-(f - f_pg).abs());
    }
    Ok(margin)
}

/// Random binary ensemble with varied ranks.
fn put_binary_ensemble(w: &mut Witness, dim: usize, rng: &mut ChaCha8Rng) -> Result<()> {
    let t: f64 = rng.random_range(0.1..0.9);
    let rank = |rng: &mut ChaCha8Rng| 1 + rng.random_range(0..dim);
    let r0 = rank(rng);
    let r1 = rank(rng);
    w.put_matrix("s0", random_density_with(dim, r0, rng)?.matrix().clone());
    w.put_matrix("s1", random_density_with(dim, r1, rng)?.matrix().clone());
    w.put_scalar("p0", t);
    w.put_scalar("p1", 1.0 - t);
    Ok(())
}

fn ensemble_from(w: &Witness) -> Result<CqEnsemble> {
    CqEnsemble::new(
        vec![w.scalar("p0")?, w.scalar("p1")?],
        vec![density(w, "s0")?, density(w, "s1")?],
    )
}

pub(super) fn gen_pgm_chain(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let mut w = Witness::new("pgm_chain");
    put_binary_ensemble(&mut w, cell.dims[0], rng)?;
    Ok(w)
}

pub(super) fn eval_pgm_chain(w: &Witness) -> Result<f64> {
    let ensemble = ensemble_from(w)?;
    let pg = p_guess_pg(&ensemble)?;
    let opt = p_guess_optimal(&ensemble)?.value;
    Ok((opt - pg).min(pg.sqrt() - opt))
}

/// Measured-gap threshold that the optimality flag is judged against.
const FLAG_GAP_TOL: f64 = 1e-6;

pub(super) fn gen_pgm_flag(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let dim = cell.dims[0];
    let mut w = Witness::new("pgm_optimality_flag");
    // A corpus covering both sides of the criterion: orthogonal pairs and
    // equiprobable pure pairs sit exactly on the optimal side, classical
    // and generic mixed draws generically do not.
    match rng.random_range(0..4usize) {
        0 => {
            let u = random_unitary_with(dim, rng)?;
            let col = |j: usize| -> Vec<Complex64> { (0..dim).map(|i| u.get(i, j)).collect() };
            let t: f64 = rng.random_range(0.1..0.9);
            w.put_matrix("s0", outer(&col(0), &col(0)));
            w.put_matrix("s1", outer(&col(1), &col(1)));
            w.put_scalar("p0", t);
            w.put_scalar("p1", 1.0 - t);
        }
        1 => {
            let v0 = random_pure_with(dim, rng);
            let v1 = random_pure_with(dim, rng);
            w.put_matrix("s0", outer(&v0, &v0));
            w.put_matrix("s1", outer(&v1, &v1));
            w.put_scalar("p0", 0.5);
            w.put_scalar("p1", 0.5);
        }
        2 => {
            let t: f64 = rng.random_range(0.1..0.9);
            w.put_matrix("s0", ComplexMatrix::diag(&simplex(dim, rng)));
            w.put_matrix("s1", ComplexMatrix::diag(&simplex(dim, rng)));
            w.put_scalar("p0", t);
            w.put_scalar("p1", 1.0 - t);
        }
        _ => {
            put_binary_ensemble(&mut w, dim, rng)?;
        }
    }
    Ok(w)
}

pub(super) fn eval_pgm_flag(w: &Witness) -> Result<f64> {
    let ensemble = ensemble_from(w)?;
    let report = pgm_optimality(&ensemble)?;
    let gap = p_guess_optimal(&ensemble)?.value - p_guess_pg(&ensemble)?;
    // The commutation verdict must agree with the measured gap on which
    // side of the threshold it falls.
    Ok(if report.optimal { FLAG_GAP_TOL - gap } else { gap - FLAG_GAP_TOL })
}

/// Builds `sum_y q_y |psi_y><psi_y| (x) |y><y|` over `A (x) B (x) Y` with the
/// conditioning side flattened to `B (x) Y`.
fn pure_mixture(dim_a: usize, dim_b: usize, copies: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let q = simplex(copies, rng);
    let ab = dim_a * dim_b;
    let total = ab * copies;
    let mut mat = ComplexMatrix::zeros(total, total);
    for (y, &weight) in q.iter().enumerate() {
        let psi = random_pure_with(ab, rng);
        let block = outer(&psi, &psi);
        for r in 0..ab {
            for c in 0..ab {
                // Composite index a * (dim_b * copies) + b * copies + y.
                let (ra, rb) = (r / dim_b, r % dim_b);
                let (ca, cb) = (c / dim_b, c % dim_b);
                mat.set(
                    ra * dim_b * copies + rb * copies + y,
                    ca * dim_b * copies + cb * copies + y,
                    block.get(r, c).scale(weight),
                );
            }
        }
    }
    mat
}

pub(super) fn gen_singlet(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let (da, db) = (cell.dims[0], cell.dims[1]);
    let mut w = Witness::new("singlet_fraction");
    // Pure states and classical mixtures of pure states make the square-root
    // recovery exactly optimal; generic mixed states only obey the bracket.
    let branch = rng.random_range(0..3usize);
    match branch {
        0 => {
            let psi = random_pure_with(da * db, rng);
            w.put_matrix("rho", outer(&psi, &psi));
            w.put_scalar("da", da as f64);
            w.put_scalar("db", db as f64);
        }
        1 => {
            w.put_matrix("rho", pure_mixture(da, db, 2, rng));
            w.put_scalar("da", da as f64);
            w.put_scalar("db", (db * 2) as f64);
        }
        _ => {
            let total = da * db;
            w.put_matrix("rho", random_density_with(total, total, rng)?.matrix().clone());
            w.put_scalar("da", da as f64);
            w.put_scalar("db", db as f64);
        }
    }
    w.put_scalar("exact", if branch < 2 { 1.0 } else { 0.0 });
    Ok(w)
}

pub(super) fn eval_singlet(w: &Witness) -> Result<f64> {
    let dims = DimensionProfile::new(vec![w.scalar("da")? as usize, w.scalar("db")? as usize])?;
    let rho = BipartiteState::new(density(w, "rho")?, dims)?;
    let fractions = singlet_fractions(&rho)?;
    let (pg, opt) = (fractions.r_pg, fractions.r_opt);
    let mut margin = (opt - pg).min(pg.sqrt() - opt);
    if w.scalar("exact")? != 0.0 {
        margin = margin.min(-(opt - pg).abs());
    }
    Ok(margin)
}

/// Squared fidelity between a state and an unnormalized positive reference.
fn overlap_fidelity_sq(tau: &PositiveOperator, reference: &PositiveOperator) -> Result<f64> {
    let a = tau.spectrum().apply(true, |x| x.sqrt());
    let b = reference.spectrum().apply(true, |x| x.sqrt());
    let f = schatten_norm(&(&a * &b), 1.0)?;
    Ok(f * f)
}

/// Best squared fidelity `F(tau, id (x) sigma)^2` over a fixed deterministic
/// family of conditioning states: every probe is primal-feasible, so on
/// states where the dual value is genuinely optimal none may exceed it.
fn grid_primal_bound(tau: &BipartiteState) -> Result<f64> {
    let dims = tau.dims().dims();
    let (dim_a, dim_c) = (dims[0], dims[1]);
    let state = tau.state().positive();
    let mut best = f64::NEG_INFINITY;
    let mut probe = |sigma: &ComplexMatrix| -> Result<()> {
        let reference =
            PositiveOperator::from_matrix(tensor(&ComplexMatrix::identity(dim_a), sigma))?;
        best = best.max(overlap_fidelity_sq(state, &reference)?);
        Ok(())
    };
    if dim_c == 2 {
        // Bloch-ball grid: several radii along every sign direction.
        for &r in &[0.0, 0.25, 0.5, 0.75, 0.95] {
            for dx in -1i32..=1 {
                for dy in -1i32..=1 {
                    for dz in -1i32..=1 {
                        if r == 0.0 && (dx, dy, dz) != (0, 0, 0) {
                            continue;
                        }
                        let norm = (((dx * dx + dy * dy + dz * dz) as f64).sqrt()).max(1.0);
                        let (x, y, z) = (
                            r * dx as f64 / norm,
                            r * dy as f64 / norm,
                            r * dz as f64 / norm,
                        );
                        let sigma = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
                            (0, 0) => Complex64::new(0.5 * (1.0 + z), 0.0),
                            (1, 1) => Complex64::new(0.5 * (1.0 - z), 0.0),
                            (0, 1) => Complex64::new(0.5 * x, -0.5 * y),
                            _ => Complex64::new(0.5 * x, 0.5 * y),
                        });
                        probe(&sigma)?;
                    }
                }
            }
        }
    } else {
        // Higher conditioning dimensions: mixtures of the maximally mixed
        // state with computational projectors.
        probe(&ComplexMatrix::diag(&vec![1.0 / dim_c as f64; dim_c]))?;
        for j in 0..dim_c {
            for &s in &[0.3, 0.6, 0.9] {
                let mut d = vec![(1.0 - s) / dim_c as f64; dim_c];
                d[j] += s;
                probe(&ComplexMatrix::diag(&d))?;
            }
        }
    }
    Ok(best)
}

/// Commutator size below which a draw no longer separates the candidate
/// certificate from a genuinely optimal one.
const SDP_COMMUTATOR_FLOOR: f64 = 0.05;

pub(super) fn gen_sdp(cell: &Cell<'_>, rng: &mut ChaCha8Rng) -> Result<Witness> {
    let (da, dc) = (cell.dims[0], cell.dims[1]);
    let total = da * dc;
    let dims = DimensionProfile::new(vec![da, dc])?;
    let mut w = Witness::new("sdp_check");
    // Commuting corpora (classical and product states) are where the dual
    // pair is genuinely feasible and tight; generic draws refute it.
    let branch = rng.random_range(0..3usize);
    match branch {
        0 => w.put_matrix("tau", ComplexMatrix::diag(&simplex(total, rng))),
        1 => {
            let a = random_density_with(da, da, rng)?;
            let c = random_density_with(dc, dc, rng)?;
            w.put_matrix("tau", tensor(a.matrix(), c.matrix()));
        }
        _ => {
            // Keep the refuting corpus away from the near-commuting regime,
            // where the candidate's infeasibility sinks into roundoff.
            let mut tau = random_density_with(total, total, rng)?;
            for _ in 0..16 {
                let probe = BipartiteState::new(tau.clone(), dims.clone())?;
                if sdp_certificate(&probe)?.commutator_norm >= SDP_COMMUTATOR_FLOOR {
                    break;
                }
                tau = random_density_with(total, total, rng)?;
            }
            w.put_matrix("tau", tau.matrix().clone());
        }
    }
    w.put_scalar("da", da as f64);
    w.put_scalar("dc", dc as f64);
    w.put_scalar("commuting", if branch < 2 { 1.0 } else { 0.0 });
    Ok(w)
}

/// Slack allowed between the candidate objective and the primal probes on
/// states where the certificate is claimed tight.
const SDP_TIGHT_TOL: f64 = 1e-6;

pub(super) fn eval_sdp(w: &Witness) -> Result<f64> {
    let dims = DimensionProfile::new(vec![w.scalar("da")? as usize, w.scalar("dc")? as usize])?;
    let tau = BipartiteState::new(density(w, "tau")?, dims)?;
    let certificate = sdp_certificate(&tau)?;
    // The partial-trace constraint is saturated by construction and the two
    // evaluation routes for the objective must agree everywhere.
    let mut margin = certificate
        .marginal_margin
        .min(1e-9 - certificate.value_gap);
    if w.scalar("commuting")? != 0.0 {
        // Genuine feasibility, plus weak duality against every primal probe.
        let primal = grid_primal_bound(&tau)?;
        margin = margin.min(certificate.feasibility_margin);
        margin = margin.min(certificate.mu + SDP_TIGHT_TOL - primal);
    } else {
        // Away from commuting states the candidate multiplier must fail its
        // operator constraint outright.
        margin = margin.min(-1e-8 - certificate.feasibility_margin);
    }
    Ok(margin)
}
