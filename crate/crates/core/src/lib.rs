//! Numerics for quantum Renyi divergences and the trace inequalities behind them.
//!
//! The crate is organised bottom-up:
//!
//! - [`mat`]: dense complex Hermitian linear algebra. Jacobi eigensolvers (chosen
//!   for their high relative accuracy on graded matrices), support-restricted
//!   matrix functions, Schatten norms, tensor-product plumbing, pinching maps,
//!   purifications, and seeded random instance generation.
//! - [`div`]: the four quantum Renyi divergence families (Petz, minimal a.k.a.
//!   sandwiched, reverse sandwiched, and maximal), their classical reduction,
//!   the alpha -> 1 limits (relative entropy and Belavkin-Staszewski), weighted
//!   geometric means, and the Karcher mean.
//! - [`ent`]: conditional Renyi entropies in their down/up variants, the
//!   closed-form optimizer for the Petz up-variant, a mirror-ascent optimizer
//!   for the rest, duality relations on pure tripartite states, and the
//!   commutation criterion for equality of the max-like entropies.
//! - [`pg`]: fidelity and pretty-good fidelity, trace distance, the pretty good
//!   measurement with its guessing probabilities, Gram-matrix optimality
//!   condition, singlet fractions, and an explicit dual certificate for the
//!   fidelity-optimization SDP.
//! - [`verify`]: a seeded, registry-driven verification harness that samples
//!   random instances and reports signed margins and reproducible witnesses for
//!   every inequality the crate claims.
//!
//! Everything is `no_std`-compatible (with `alloc`); the default `std` feature
//! only loosens dependency features. All logarithms are natural; callers that
//! want bits convert at the presentation layer.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod div;
pub mod ent;
mod error;
pub mod mat;
pub mod pg;
pub mod verify;

pub use error::{Error, Result};
pub use mat::{
    ComplexMatrix, DensityOperator, DimensionProfile, HermitianOperator, PositiveOperator,
    SpectralDecomposition,
};
