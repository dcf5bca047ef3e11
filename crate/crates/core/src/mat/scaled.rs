//! Log-scaled one-sided Jacobi orthogonalization.
//!
//! The divergence formulas need eigenvalues of products like
//! `B^s A B^s` where `s` can be as large as 5e5 (endpoint proxies) or the
//! spectra of `A` and `B` are strongly graded. Forming such a product in
//! floating point either overflows outright or destroys the small eigenvalues,
//! which the fractional powers downstream still weight noticeably.
//!
//! The cure is to never leave the log domain: the product is written as
//! `C C*` with factor columns carried as a unit direction plus a separate
//! log-magnitude. One-sided Jacobi rotations on such columns only ever combine
//! quantities of comparable size (the mixing coefficients are computed through
//! scale differences in closed form), so the squared column norms converge to
//! the eigenvalues of `C C*` with high relative accuracy at any grading.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::mat::matrix::{vec_inner, vec_norm};

/// A column vector stored as `exp(log_scale) * direction` with a unit-norm
/// direction. `log_scale == -inf` marks an exact zero column.
#[derive(Clone, Debug)]
pub(crate) struct ScaledColumn {
    pub direction: Vec<Complex64>,
    pub log_scale: f64,
}

impl ScaledColumn {
    /// Normalizes a raw vector into scaled form, attaching `extra_log` to the
    /// scale (the caller's way of injecting huge exponents without overflow).
    pub fn from_vector(mut v: Vec<Complex64>, extra_log: f64) -> Self {
        let n = vec_norm(&v);
        if n == 0.0 || extra_log == f64::NEG_INFINITY {
            for z in &mut v {
                *z = Complex64::ZERO;
            }
            return Self {
                direction: v,
                log_scale: f64::NEG_INFINITY,
            };
        }
        let inv = 1.0 / n;
        for z in &mut v {
            *z *= inv;
        }
        Self {
            direction: v,
            log_scale: n.ln() + extra_log,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_scale == f64::NEG_INFINITY
    }
}

/// Log-domain spectrum of a positive semidefinite matrix: natural logs of the
/// nonzero eigenvalues (descending) plus the count of exact zeros.
#[derive(Clone, Debug)]
pub(crate) struct LogSpectrum {
    pub log_values: Vec<f64>,
    /// Rank bookkeeping consumed by assertions; trace powers ignore it.
    #[cfg_attr(not(test), allow(dead_code))]
    pub zeros: usize,
}

impl LogSpectrum {
    /// Sum of `exp(power * log_value)` over the nonzero spectrum, evaluated by
    /// log-sum-exp so enormous and tiny eigenvalues both survive. Returns the
    /// natural log of that sum, or `-inf` for an empty spectrum.
    pub fn log_trace_power(&self, power: f64) -> f64 {
        log_sum_exp(self.log_values.iter().map(|&lv| power * lv))
    }
}

/// Stable `ln(sum exp(x_i))`; empty input gives `-inf`.
pub(crate) fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = terms
        .into_iter()
        .filter(|x| *x != f64::NEG_INFINITY)
        .collect();
    if xs.is_empty() {
        return f64::NEG_INFINITY;
    }
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = xs.iter().map(|x| (x - m).exp()).sum();
    m + sum.ln()
}

const MAX_SWEEPS: usize = 60;
const ORTHO_TOL: f64 = 1e-15;
/// A column whose norm collapses this far below its initial scale has been
/// annihilated by cancellation (numerical rank deficiency) and is treated as
/// an exact zero from then on. Input spectra are support-clipped at 1e-12
/// relative, so genuine eigendirections can never shrink anywhere near this.
const COLLAPSE_LOG: f64 = -32.2; // ln(1e-14)

/// Orthogonalizes the columns and returns the log-eigenvalues of `C C*`
/// (equivalently the squared singular values of the column matrix `C`).
///
/// `ambient`: the row dimension of `C`, which is the dimension of `C C*`;
/// zero eigenvalues are padded up to it.
pub(crate) fn gram_log_spectrum(
    mut cols: Vec<ScaledColumn>,
    ambient: usize,
) -> Result<LogSpectrum> {
    let m = cols.len();
    for col in &cols {
        debug_assert_eq!(col.direction.len(), ambient);
    }
    // Descending initial scale ordering speeds up graded convergence.
    cols.sort_by(|a, b| {
        b.log_scale
            .partial_cmp(&a.log_scale)
            .expect("log scales never NaN")
    });
    let initial: Vec<f64> = cols.iter().map(|c| c.log_scale).collect();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut worst = 0.0f64;
        for p in 0..m {
            for q in (p + 1)..m {
                if cols[p].is_zero() || cols[q].is_zero() {
                    continue;
                }
                let gamma = vec_inner(&cols[p].direction, &cols[q].direction);
                let g = gamma.norm();
                if g <= ORTHO_TOL {
                    continue;
                }
                worst = worst.max(g);
                rotate_pair(&mut cols, p, q, gamma, g);
                for k in [p, q] {
                    if !cols[k].is_zero() && cols[k].log_scale - initial[k] < COLLAPSE_LOG {
                        cols[k] = ScaledColumn::from_vector(
                            alloc::vec![Complex64::ZERO; ambient],
                            f64::NEG_INFINITY,
                        );
                    }
                }
            }
        }
        if worst <= ORTHO_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        // One final pass to measure how bad it is.
        let mut worst = 0.0f64;
        for p in 0..m {
            for q in (p + 1)..m {
                if cols[p].is_zero() || cols[q].is_zero() {
                    continue;
                }
                worst = worst.max(vec_inner(&cols[p].direction, &cols[q].direction).norm());
            }
        }
        if worst > 1e-10 {
            return Err(Error::Numerical(format!(
                "one-sided Jacobi stalled with residual column overlap {worst:.3e}"
            )));
        }
    }

    let mut log_values: Vec<f64> = cols
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| 2.0 * c.log_scale)
        .collect();
    log_values.sort_by(|a, b| b.partial_cmp(a).expect("finite log eigenvalues"));
    if log_values.len() > ambient {
        // More columns than ambient dimension: the surplus must have collapsed;
        // if not, the factorization was inconsistent.
        return Err(Error::Numerical(format!(
            "{} nonzero singular values exceed ambient dimension {ambient}",
            log_values.len()
        )));
    }
    let zeros = ambient - log_values.len();
    Ok(LogSpectrum { log_values, zeros })
}

/// Applies the scale-safe Jacobi rotation that orthogonalizes columns p and q.
fn rotate_pair(cols: &mut [ScaledColumn], p: usize, q: usize, gamma: Complex64, g: f64) {
    let delta = cols[q].log_scale - cols[p].log_scale;
    let ad = delta.abs();
    // zeta = sinh(delta)/g in a form that never overflows:
    // zeta_hat = zeta * exp(-|delta|).
    let sgn_d = if delta >= 0.0 { 1.0 } else { -1.0 };
    let zeta_hat = sgn_d * (1.0 - (-2.0 * ad).exp()) / (2.0 * g);
    let dhat = zeta_hat.abs() + (zeta_hat * zeta_hat + (-2.0 * ad).exp()).sqrt();
    // Small-angle root of t^2 - 2 zeta t - 1 = 0, namely
    // t = -sign(zeta) / (|zeta| + sqrt(zeta^2 + 1)), written scale-free.
    // sign(zeta) follows sign(delta), with +1 at delta == 0.
    let sgn_z = if delta == 0.0 { 1.0 } else { sgn_d };
    let t = -sgn_z * (-ad).exp() / dhat;
    let c = 1.0 / (1.0 + t * t).sqrt();
    // tau_plus = t * exp(delta), tau_minus = t * exp(-delta), each computed
    // without forming exp(|delta|).
    let tau_plus = if delta >= 0.0 {
        -sgn_z / dhat
    } else {
        -sgn_z * (-2.0 * ad).exp() / dhat
    };
    let tau_minus = if delta <= 0.0 {
        -sgn_z / dhat
    } else {
        -sgn_z * (-2.0 * ad).exp() / dhat
    };

    let phase = gamma / g; // e^{i beta}
    let n = cols[p].direction.len();
    let mut new_p = Vec::with_capacity(n);
    let mut new_q = Vec::with_capacity(n);
    let wp = phase.conj() * tau_plus;
    let wq = phase * tau_minus;
    for k in 0..n {
        let vp = cols[p].direction[k];
        let vq = cols[q].direction[k];
        new_p.push(vp + wp * vq);
        new_q.push(vq - wq * vp);
    }
    let np = vec_norm(&new_p);
    let nq = vec_norm(&new_q);
    let lc = c.ln();
    let lp = cols[p].log_scale;
    let lq = cols[q].log_scale;
    cols[p] = if np == 0.0 {
        ScaledColumn::from_vector(new_p, f64::NEG_INFINITY)
    } else {
        let inv = 1.0 / np;
        for z in &mut new_p {
            *z *= inv;
        }
        ScaledColumn {
            direction: new_p,
            log_scale: lp + lc + np.ln(),
        }
    };
    cols[q] = if nq == 0.0 {
        ScaledColumn::from_vector(new_q, f64::NEG_INFINITY)
    } else {
        let inv = 1.0 / nq;
        for z in &mut new_q {
            *z *= inv;
        }
        ScaledColumn {
            direction: new_q,
            log_scale: lq + lc + nq.ln(),
        }
    };
}
