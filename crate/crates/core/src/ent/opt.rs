//! Numeric maximization over the density simplex.
//!
//! The Up-variant conditional entropies are suprema over marginal states
//! `sigma`. The optimizer parametrizes `sigma = exp(G) / tr exp(G)` with `G`
//! Hermitian, which keeps every iterate strictly inside the simplex (no
//! boundary or support bookkeeping), and ascends a numerically estimated
//! gradient with an adaptive step.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::mat::{eigh, ComplexMatrix, DensityOperator, HermitianOperator, PositiveOperator};

/// Hard cap on ascent iterations per start.
pub const ASCENT_MAX_ITERS: usize = 5000;

/// The ascent stops once the incumbent has not improved by more than this
/// over [`ASCENT_STALL_WINDOW`] consecutive iterations.
pub const ASCENT_IMPROVE_TOL: f64 = 1e-9;

/// Length of the no-improvement window that ends the ascent.
pub const ASCENT_STALL_WINDOW: usize = 50;

/// Central-difference step for the numeric gradient.
const GRADIENT_STEP: f64 = 1e-5;

/// Maps a Hermitian log-parameter to a strictly positive density operator.
///
/// The largest eigenvalue is subtracted before exponentiating so the map
/// never overflows, no matter how far the ascent wanders.
pub(crate) fn density_from_log_param(g: &ComplexMatrix) -> Result<DensityOperator> {
    let spec = eigh(&HermitianOperator::new(g.hermitian_part())?)?;
    let top = *spec.eigenvalues().last().expect("nonempty spectrum");
    let raw = spec.apply(false, |x| (x - top).exp());
    let trace = raw.trace_re();
    let pos = PositiveOperator::from_matrix(raw.scale_re(1.0 / trace))?;
    DensityOperator::normalized(&pos)
}

/// The Hermitian logarithm of a density operator, with the spectrum clamped
/// away from zero so rank-deficient starting points stay usable.
pub(crate) fn log_param_of(sigma: &DensityOperator) -> ComplexMatrix {
    let spec = sigma.spectrum();
    let top = spec.eigenvalues().last().copied().unwrap_or(1.0).max(1e-300);
    spec.apply(false, |x| (x.max(1e-12 * top)).ln())
}

/// One real coordinate of the Hermitian parameter space.
#[derive(Clone, Copy)]
enum Coordinate {
    Diagonal(usize),
    OffDiagonal { row: usize, col: usize, imaginary: bool },
}

fn coordinates(dim: usize) -> Vec<Coordinate> {
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        out.push(Coordinate::Diagonal(i));
    }
    for i in 0..dim {
        for j in i + 1..dim {
            out.push(Coordinate::OffDiagonal { row: i, col: j, imaginary: false });
            out.push(Coordinate::OffDiagonal { row: i, col: j, imaginary: true });
        }
    }
    out
}

fn displaced(g: &ComplexMatrix, coord: Coordinate, h: f64) -> ComplexMatrix {
    let mut out = g.clone();
    match coord {
        Coordinate::Diagonal(i) => {
            out.set(i, i, g.get(i, i) + Complex64::new(h, 0.0));
        }
        Coordinate::OffDiagonal { row, col, imaginary } => {
            let delta = if imaginary {
                Complex64::new(0.0, h)
            } else {
                Complex64::new(h, 0.0)
            };
            out.set(row, col, g.get(row, col) + delta);
            out.set(col, row, g.get(col, row) + delta.conj());
        }
    }
    out
}

/// Assembles the gradient coordinates back into a Hermitian direction.
fn gradient_matrix(dim: usize, coords: &[Coordinate], partials: &[f64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (coord, &p) in coords.iter().zip(partials.iter()) {
        match *coord {
            Coordinate::Diagonal(i) => {
                out.set(i, i, out.get(i, i) + Complex64::new(p, 0.0));
            }
            Coordinate::OffDiagonal { row, col, imaginary } => {
                let delta = if imaginary {
                    Complex64::new(0.0, p)
                } else {
                    Complex64::new(p, 0.0)
                };
                out.set(row, col, out.get(row, col) + delta);
                out.set(col, row, out.get(col, row) + delta.conj());
            }
        }
    }
    out
}

/// The best point found by one or more ascents.
pub(crate) struct AscentOutcome {
    pub sigma: DensityOperator,
    pub value: f64,
}

/// Result of one optimization stage: the best endpoint over all starts and
/// whether at least one ascent settled before the iteration cap.
pub(crate) struct StageOutcome {
    pub outcome: AscentOutcome,
    pub converged: bool,
}

/// The error raised when every ascent is still moving at the iteration cap.
pub(crate) fn iteration_limit(best_value: f64) -> Error {
    Error::IterationLimit {
        context: format!(
            "marginal optimization still improving after {ASCENT_MAX_ITERS} iterations"
        ),
        best_value,
    }
}

/// Maximizes `objective` over densities of the given dimension, one ascent
/// per starting point, returning the best endpoint over all starts. Cap
/// exhaustion is reported as a flag instead of an error so callers running a
/// continuation schedule can carry the best point into the next stage,
/// deciding for themselves when exhaustion is fatal. Fully deterministic.
pub(crate) fn mirror_ascent_stage(
    dim: usize,
    starts: &[DensityOperator],
    objective: &dyn Fn(&DensityOperator) -> Result<f64>,
) -> Result<StageOutcome> {
    let coords = coordinates(dim);
    let mut best: Option<AscentOutcome> = None;
    let mut converged = false;
    for start in starts {
        let (outcome, settled) = ascend_from(dim, start, &coords, objective)?;
        converged |= settled;
        let replace = best.as_ref().map_or(true, |b| outcome.value > b.value);
        if replace {
            best = Some(outcome);
        }
    }
    let outcome =
        best.ok_or_else(|| Error::Config("optimizer needs at least one starting point".into()))?;
    Ok(StageOutcome { outcome, converged })
}

fn ascend_from(
    dim: usize,
    start: &DensityOperator,
    coords: &[Coordinate],
    objective: &dyn Fn(&DensityOperator) -> Result<f64>,
) -> Result<(AscentOutcome, bool)> {
    let mut g = log_param_of(start);
    let mut sigma = density_from_log_param(&g)?;
    let mut value = objective(&sigma)?;
    let mut best_value = value;
    let mut best_sigma = sigma.clone();
    let mut step = 0.5f64;
    let mut since_improvement = 0usize;

    for _ in 0..ASCENT_MAX_ITERS {
        if since_improvement >= ASCENT_STALL_WINDOW {
            return Ok((AscentOutcome { sigma: best_sigma, value: best_value }, true));
        }
        let mut partials = Vec::with_capacity(coords.len());
        for &coord in coords {
            let plus = objective(&density_from_log_param(&displaced(&g, coord, GRADIENT_STEP))?)?;
            let minus = objective(&density_from_log_param(&displaced(&g, coord, -GRADIENT_STEP))?)?;
            partials.push((plus - minus) / (2.0 * GRADIENT_STEP));
        }
        let direction = gradient_matrix(dim, coords, &partials);
        let trial_g = &g + &direction.scale_re(step);
        let trial_sigma = density_from_log_param(&trial_g)?;
        let trial_value = objective(&trial_sigma)?;
        if trial_value > value {
            g = trial_g;
            sigma = trial_sigma;
            value = trial_value;
            step = (step * 1.3).min(100.0);
        } else {
            step = (step * 0.4).max(1e-8);
        }
        if value > best_value + ASCENT_IMPROVE_TOL {
            best_value = value;
            best_sigma = sigma.clone();
            since_improvement = 0;
        } else {
            if value > best_value {
                best_value = value;
                best_sigma = sigma.clone();
            }
            since_improvement += 1;
        }
    }
    Ok((AscentOutcome { sigma: best_sigma, value: best_value }, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::random_density;

    #[test]
    fn log_param_round_trips() {
        let rho = random_density(3, 3, 71).unwrap();
        let g = log_param_of(&rho);
        let back = density_from_log_param(&g).unwrap();
        assert!(back.matrix().distance(rho.matrix()) < 1e-10);
    }

    #[test]
    fn maximizes_overlap_with_a_target() {
        // f(sigma) = -||sigma - target||_F^2 has its unique maximum at the
        // target density.
        let target = random_density(2, 2, 72).unwrap();
        let start = DensityOperator::from_matrix(ComplexMatrix::identity(2).scale_re(0.5)).unwrap();
        let objective = |s: &DensityOperator| -> Result<f64> {
            Ok(-s.matrix().distance(target.matrix()).powi(2))
        };
        let stage = mirror_ascent_stage(2, &[start], &objective).unwrap();
        assert!(stage.converged);
        assert!(stage.outcome.value > -1e-8, "value {}", stage.outcome.value);
        assert!(stage.outcome.sigma.matrix().distance(target.matrix()) < 1e-3);
    }
}
