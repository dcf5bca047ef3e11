//! Seeded randomized verification campaigns.
//!
//! Every inequality, axiom, duality, and equality condition implemented by
//! the library is mirrored here as a named *check*: a predicate over randomly
//! sampled instances that returns a signed margin. The convention is uniform,
//! for an inequality `LHS <= RHS` the margin is `RHS - LHS`, so a check
//! passes exactly when its margin stays above minus the tolerance. Equalities
//! report the negated absolute defect and one-sided claims report their
//! natural slack.
//!
//! A [`CheckSpec`] names a registry entry and fixes dimensions, an order
//! grid, a trial count, a tolerance, and a seed. [`run_campaign`] walks the
//! specs serially, derives one RNG stream per trial from the campaign seed,
//! the check name, and the trial index, and collects per-check pass/fail
//! counts together with the worst margin and a [`Witness`] reproducing it.
//! Failures are recorded, never fatal: a campaign always runs to completion
//! and reports what it saw.
//!
//! Witnesses hold the sampled inputs (matrices and scalars) by name. Feeding
//! a witness back through [`evaluate_witness`] recomputes the margin through
//! the same code path, which is how reports stay auditable after the fact.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::div::AlphaValue;
use crate::error::{Error, Result};
use crate::mat::{seeded_rng, ComplexMatrix};

mod entropy;
mod guessing;
mod ordering;
mod trace;

/// Serialized inputs of a single trial, sufficient to replay its margin.
///
/// Matrices and scalars are stored as named slots; the names are part of the
/// replay contract for the owning check. Auxiliary diagnostics (commutator
/// norms, equality flags) may ride along as extra scalars, the evaluator
/// ignores slots it does not read.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    /// Registry key of the check that produced this witness.
    pub check: String,
    /// Named matrix inputs in insertion order.
    pub matrices: Vec<(String, ComplexMatrix)>,
    /// Named scalar inputs and diagnostics in insertion order.
    pub scalars: Vec<(String, f64)>,
}

impl Witness {
    fn new(check: &str) -> Self {
        Witness { check: check.to_string(), matrices: Vec::new(), scalars: Vec::new() }
    }

    fn put_matrix(&mut self, name: &str, m: ComplexMatrix) {
        self.matrices.push((name.to_string(), m));
    }

    fn put_scalar(&mut self, name: &str, v: f64) {
        self.scalars.push((name.to_string(), v));
    }

    /// Looks up a matrix slot by name.
    pub fn matrix(&self, name: &str) -> Result<&ComplexMatrix> {
        self.matrices
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, m)| m)
            .ok_or_else(|| Error::Config(format!("witness for '{}' lacks matrix '{name}'", self.check)))
    }

    /// All matrices whose names start with `prefix`, in insertion order.
    pub fn matrices_with_prefix(&self, prefix: &str) -> Vec<&ComplexMatrix> {
        self.matrices
            .iter()
            .filter(|(n, _)| n.starts_with(prefix))
            .map(|(_, m)| m)
            .collect()
    }

    /// Looks up a scalar slot by name.
    pub fn scalar(&self, name: &str) -> Result<f64> {
        self.scalars
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Config(format!("witness for '{}' lacks scalar '{name}'", self.check)))
    }

    /// Decodes the order stored under `name` back into an [`AlphaValue`].
    pub fn alpha(&self, name: &str) -> Result<AlphaValue> {
        AlphaValue::new(self.scalar(name)?)
    }
}

/// Encodes an order as a plain scalar for witness storage. The symbolic
/// endpoints map to `0`, `1`, and positive infinity; [`AlphaValue::new`]
/// inverts the encoding.
fn encode_alpha(alpha: AlphaValue) -> f64 {
    match alpha {
        AlphaValue::Zero => 0.0,
        AlphaValue::One => 1.0,
        AlphaValue::Infinity => f64::INFINITY,
        AlphaValue::Finite(a) => a,
    }
}

/// Configuration of one registry check inside a campaign.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckSpec {
    /// Registry key; see [`registry_names`].
    pub name: String,
    /// Dimension tuples to sample at. Empty means the registry default. Each
    /// tuple's arity must match the check (single system, bipartite factor
    /// dims, or tripartite factor dims).
    pub dims: Vec<Vec<usize>>,
    /// Order grid. Empty means the registry default; must stay empty for
    /// checks that are not order-parameterized.
    pub alpha_grid: Vec<AlphaValue>,
    /// Trials per (dimension, order, parameter) cell; at least 1.
    pub trials: usize,
    /// Pass threshold: a trial fails when its margin drops below `-tolerance`.
    pub tolerance: f64,
    /// Campaign seed feeding the per-trial RNG streams.
    pub seed: u64,
}

impl CheckSpec {
    /// A spec for `name` with the registry's default dimensions, grid, and
    /// tolerance, running `trials` trials per cell under `seed`.
    pub fn with_defaults(name: &str, trials: usize, seed: u64) -> Result<Self> {
        let def = lookup(name)?;
        Ok(CheckSpec {
            name: def.name.to_string(),
            dims: Vec::new(),
            alpha_grid: Vec::new(),
            trials,
            tolerance: def.tolerance,
            seed,
        })
    }
}

/// Outcome of one check inside a [`CampaignReport`].
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    /// Registry key.
    pub name: String,
    /// Total trials evaluated across all cells.
    pub trials: usize,
    /// Trials whose margin fell below `-tolerance`, plus trials that errored.
    pub failures: usize,
    /// Smallest signed margin seen. Negative infinity marks a trial that
    /// errored outright or produced an unordered margin.
    pub worst_margin: f64,
    /// The tolerance the margins were judged against.
    pub tolerance: f64,
    /// Inputs reproducing the worst evaluable margin, which equals
    /// [`Self::worst_margin`] whenever no trial errored. Absent only when
    /// every trial errored before producing a witness.
    pub witness: Option<Witness>,
}

/// Deterministic result of [`run_campaign`]. Wall-clock timing and file
/// emission live with the command-line front end; everything here is a pure
/// function of the specs.
#[derive(Clone, Debug)]
pub struct CampaignReport {
    /// Seed of the first spec, echoed for reproducibility (0 when empty).
    pub seed: u64,
    /// One outcome per spec, in spec order.
    pub outcomes: Vec<CheckOutcome>,
}

impl CampaignReport {
    /// Total failures across all checks.
    pub fn failures(&self) -> usize {
        self.outcomes.iter().map(|o| o.failures).sum()
    }
}

/// Named tolerance classes from the registry defaults.
const CLOSED_FORM_TOL: f64 = 1e-8;
const OPTIMIZER_TOL: f64 = 1e-5;

/// Static description of one registry entry.
#[derive(Debug)]
pub(crate) struct CheckDef {
    pub name: &'static str,
    /// Default pass tolerance.
    pub tolerance: f64,
    /// Subsystem count each dimension tuple must carry.
    pub arity: usize,
    /// Default dimension tuples.
    pub dims: &'static [&'static [usize]],
    /// Default order grid; empty for checks without an order parameter.
    pub alphas: &'static [AlphaValue],
    /// Built-in parameter tuples (exponents and the like); `&[&[]]` when the
    /// check has none.
    pub params: &'static [&'static [f64]],
    /// One-line description for listings.
    pub about: &'static str,
}

const NO_PARAMS: &[&[f64]] = &[&[]];
const NO_ALPHAS: &[AlphaValue] = &[];

macro_rules! finite_grid {
    ($($a:expr),* $(,)?) => { &[ $( AlphaValue::Finite($a) ),* ] };
}

/// Cross product of the Araki-Lieb-Thirring exponents `r` and `q`.
const ALT_PARAMS: &[&[f64]] = &[
    &[0.2, 0.5],
    &[0.2, 1.0],
    &[0.2, 2.0],
    &[0.3, 0.5],
    &[0.3, 1.0],
    &[0.3, 2.0],
    &[0.4, 1.0],
    &[0.5, 0.5],
    &[0.5, 1.0],
    &[0.5, 2.0],
    &[0.6, 1.0],
    &[0.7, 0.5],
    &[0.7, 1.0],
    &[0.7, 2.0],
    &[0.8, 1.0],
    &[0.9, 0.5],
    &[0.9, 1.0],
    &[0.9, 2.0],
    &[1.5, 0.5],
    &[1.5, 1.0],
    &[1.5, 2.0],
    &[2.0, 0.5],
    &[2.0, 1.0],
    &[2.0, 2.0],
    &[3.0, 0.5],
    &[3.0, 1.0],
    &[3.0, 2.0],
];

/// Exponent pairs for the reverse bound, including the trivial `r = 1` line.
const REVERSE_ALT_PARAMS: &[&[f64]] = &[
    &[0.3, 0.5],
    &[0.3, 1.0],
    &[0.3, 2.0],
    &[0.5, 0.5],
    &[0.5, 1.0],
    &[0.5, 2.0],
    &[0.7, 1.0],
    &[0.9, 0.5],
    &[0.9, 1.0],
    &[0.9, 2.0],
    &[1.0, 1.0],
    &[1.5, 0.5],
    &[1.5, 1.0],
    &[1.5, 2.0],
    &[2.0, 0.5],
    &[2.0, 1.0],
    &[2.0, 2.0],
];

const AUDENAERT_PARAMS: &[&[f64]] = &[
    &[0.25, 0.5],
    &[0.25, 1.0],
    &[0.5, 1.0],
    &[0.5, 2.0],
    &[0.75, 1.0],
    &[0.9, 2.0],
];

/// Factor counts for the Hoelder check.
const HOELDER_PARAMS: &[&[f64]] = &[&[2.0], &[3.0]];

/// Scale exponents `p` for the Golden-Thompson reversals.
const GT_P_PARAMS: &[&[f64]] = &[&[0.5], &[1.0], &[2.0]];

/// `(n, p)` pairs for the multivariate reversal.
const GT_MULTI_PARAMS: &[&[f64]] = &[
    &[2.0, 0.5],
    &[2.0, 1.0],
    &[2.0, 2.0],
    &[3.0, 0.5],
    &[3.0, 1.0],
    &[3.0, 2.0],
];

const DIMS_SINGLE: &[&[usize]] = &[&[2], &[4], &[8]];
const DIMS_SINGLE_SMALL: &[&[usize]] = &[&[2], &[3], &[5]];
const DIMS_MULTI: &[&[usize]] = &[&[2], &[4], &[6]];
const DIMS_PAIR: &[&[usize]] = &[&[2, 2], &[2, 3]];
const DIMS_PAIR_WIDE: &[&[usize]] = &[&[2, 2], &[2, 4], &[3, 2]];
const DIMS_TRIPLE: &[&[usize]] = &[&[2, 2, 2], &[2, 2, 4]];
const DIMS_QUBIT: &[&[usize]] = &[&[2]];
const DIMS_ENSEMBLE: &[&[usize]] = &[&[2], &[3], &[4]];

static REGISTRY: &[CheckDef] = &[
    CheckDef {
        name: "alt",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: NO_ALPHAS,
        params: ALT_PARAMS,
        about: "trace power inequality between split and joint exponents, both regimes",
    },
    CheckDef {
        name: "reverse_alt",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE_SMALL,
        alphas: NO_ALPHAS,
        params: REVERSE_ALT_PARAMS,
        about: "reverse trace power bound with exactly solved norm exponents",
    },
    CheckDef {
        name: "reverse_alt_audenaert",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE_SMALL,
        alphas: NO_ALPHAS,
        params: AUDENAERT_PARAMS,
        about: "operator norm specialization recovered from the general reverse bound",
    },
    CheckDef {
        name: "hoelder",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: NO_ALPHAS,
        params: HOELDER_PARAMS,
        about: "generalized Hoelder inequality for Schatten norms",
    },
    CheckDef {
        name: "gt",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: NO_ALPHAS,
        params: NO_PARAMS,
        about: "product trace dominates the coupled exponential, equality when commuting",
    },
    CheckDef {
        name: "reverse_gt",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: &[
            AlphaValue::Zero,
            AlphaValue::Finite(0.3),
            AlphaValue::Finite(0.5),
            AlphaValue::One,
        ],
        params: GT_P_PARAMS,
        about: "weighted geometric mean reversal of the exponential trace bound",
    },
    CheckDef {
        name: "reverse_gt_log",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: NO_ALPHAS,
        params: GT_P_PARAMS,
        about: "logarithmic reversal on positive definite pairs",
    },
    CheckDef {
        name: "reverse_gt_multi",
        tolerance: 1e-7,
        arity: 1,
        dims: DIMS_MULTI,
        alphas: NO_ALPHAS,
        params: GT_MULTI_PARAMS,
        about: "Karcher mean reversal for two and three exponentials",
    },
    CheckDef {
        name: "ordering_chain",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: finite_grid![0.1, 0.3, 0.5, 0.7, 0.9, 1.1, 1.5, 2.0, 3.0],
        params: NO_PARAMS,
        about: "family ordering: minimal below Petz below maximal on their ranges",
    },
    CheckDef {
        name: "symmetry_relation",
        tolerance: 1e-9,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: finite_grid![0.2, 0.4, 0.6, 0.8],
        params: NO_PARAMS,
        about: "reverse family at alpha equals rescaled swapped minimal at 1 - alpha",
    },
    CheckDef {
        name: "axiom_unitary",
        tolerance: 1e-10,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: finite_grid![0.3, 0.5, 0.8, 1.5, 2.0],
        params: NO_PARAMS,
        about: "divergences are invariant under joint unitary conjugation",
    },
    CheckDef {
        name: "axiom_additivity",
        tolerance: 1e-9,
        arity: 2,
        dims: DIMS_PAIR_WIDE,
        alphas: finite_grid![0.3, 0.5, 0.8, 1.5, 2.0],
        params: NO_PARAMS,
        about: "log Q adds over tensor products",
    },
    CheckDef {
        name: "axiom_direct_sum",
        tolerance: 1e-9,
        arity: 2,
        dims: DIMS_PAIR_WIDE,
        alphas: finite_grid![0.3, 0.5, 0.8, 1.5, 2.0],
        params: NO_PARAMS,
        about: "Q adds over direct sums",
    },
    CheckDef {
        name: "axiom_order",
        tolerance: 1e-9,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: finite_grid![0.3, 0.5, 0.8, 1.5, 2.0],
        params: NO_PARAMS,
        about: "a dominating first argument keeps the divergence nonnegative",
    },
    CheckDef {
        name: "dpi_pinching",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: NO_ALPHAS,
        params: NO_PARAMS,
        about: "data processing under pinching by a random Hermitian",
    },
    CheckDef {
        name: "dpi_partial_trace",
        tolerance: CLOSED_FORM_TOL,
        arity: 2,
        dims: DIMS_PAIR,
        alphas: NO_ALPHAS,
        params: NO_PARAMS,
        about: "data processing under discarding a subsystem",
    },
    CheckDef {
        name: "dpi_isometry",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: &[&[2], &[3], &[4]],
        alphas: NO_ALPHAS,
        params: NO_PARAMS,
        about: "data processing under a random isometry followed by partial trace",
    },
    CheckDef {
        name: "pinching_bound",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_QUBIT,
        alphas: finite_grid![0.5, 0.75, 1.5, 2.5],
        params: NO_PARAMS,
        about: "normalized pinched classical divergence stays below the minimal family",
    },
    CheckDef {
        name: "cor41",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: &[
            AlphaValue::Zero,
            AlphaValue::Finite(0.25),
            AlphaValue::Finite(0.5),
            AlphaValue::Finite(0.75),
            AlphaValue::Finite(0.9),
            AlphaValue::One,
        ],
        params: NO_PARAMS,
        about: "two-sided bound tying Petz to minimal below order one, with Q form",
    },
    CheckDef {
        name: "equality_condition",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_SINGLE,
        alphas: finite_grid![0.3, 0.5, 0.8],
        params: NO_PARAMS,
        about: "Petz equals minimal exactly on commuting pairs, strict gap otherwise",
    },
    CheckDef {
        name: "entropy_corollary_down",
        tolerance: 1e-7,
        arity: 2,
        dims: DIMS_PAIR_WIDE,
        alphas: finite_grid![0.3, 0.5, 0.7],
        params: NO_PARAMS,
        about: "down-arrow entropy sandwich with the dimension correction",
    },
    CheckDef {
        name: "entropy_corollary_up",
        tolerance: OPTIMIZER_TOL,
        arity: 2,
        dims: DIMS_PAIR,
        alphas: finite_grid![0.3, 0.5, 0.7],
        params: NO_PARAMS,
        about: "up-arrow entropy sandwich with the dimension correction",
    },
    CheckDef {
        name: "entropy_classically_coherent_down",
        tolerance: 1e-7,
        arity: 2,
        dims: &[&[2, 2], &[3, 2]],
        alphas: finite_grid![0.3, 0.6, 0.9],
        params: NO_PARAMS,
        about: "down-arrow sandwich loses the dimension term on coherent classical states",
    },
    CheckDef {
        name: "entropy_classically_coherent_up",
        tolerance: OPTIMIZER_TOL,
        arity: 2,
        dims: &[&[2, 2]],
        alphas: finite_grid![0.5, 0.7, 0.9],
        params: NO_PARAMS,
        about: "up-arrow sandwich loses the dimension term on coherent classical states",
    },
    CheckDef {
        name: "entropy_min_like",
        tolerance: OPTIMIZER_TOL,
        arity: 2,
        dims: DIMS_PAIR,
        alphas: finite_grid![1.2, 1.5, 2.0],
        params: NO_PARAMS,
        about: "min-like entropies bounded through the dual order 1/(2 - alpha)",
    },
    CheckDef {
        name: "entropy_cq_bounds",
        tolerance: OPTIMIZER_TOL,
        arity: 2,
        dims: DIMS_PAIR,
        alphas: finite_grid![1.2, 1.5, 2.0],
        params: NO_PARAMS,
        about: "classical-quantum states drop the dimension term in the min-like bounds",
    },
    CheckDef {
        name: "entropy_equality",
        tolerance: OPTIMIZER_TOL,
        arity: 2,
        dims: DIMS_PAIR,
        alphas: finite_grid![0.5, 0.75],
        params: NO_PARAMS,
        about: "up-arrow entropies agree exactly when the marginal power commutes",
    },
    CheckDef {
        name: "duality_petz",
        tolerance: 1e-6,
        arity: 3,
        dims: DIMS_TRIPLE,
        alphas: finite_grid![0.3, 0.7, 1.2, 1.8],
        params: NO_PARAMS,
        about: "closed-form duality of the Petz down entropies at complementary orders",
    },
    CheckDef {
        name: "duality_minimal",
        tolerance: OPTIMIZER_TOL,
        arity: 3,
        dims: DIMS_TRIPLE,
        alphas: finite_grid![0.6, 0.8, 1.5, 3.0],
        params: NO_PARAMS,
        about: "duality of the sandwiched up entropies at reciprocal-conjugate orders",
    },
    CheckDef {
        name: "duality_mixed",
        tolerance: OPTIMIZER_TOL,
        arity: 3,
        dims: DIMS_TRIPLE,
        alphas: finite_grid![0.5, 0.8, 1.6],
        params: NO_PARAMS,
        about: "duality pairing the Petz up entropy with the sandwiched down entropy",
    },
    CheckDef {
        name: "cq_dominance",
        tolerance: 1e-9,
        arity: 2,
        dims: &[&[2, 2], &[3, 2]],
        alphas: finite_grid![0.5, 0.7, 0.9],
        params: NO_PARAMS,
        about: "dephasing the conditioning register never hurts coherent classical states",
    },
    CheckDef {
        name: "gradient_check",
        tolerance: OPTIMIZER_TOL,
        arity: 1,
        dims: &[&[2], &[3], &[4]],
        alphas: finite_grid![0.5, 0.75],
        params: NO_PARAMS,
        about: "analytic derivative along commuting paths matches central differences",
    },
    CheckDef {
        name: "fidelity_bounds",
        tolerance: 1e-9,
        arity: 1,
        dims: DIMS_ENSEMBLE,
        alphas: NO_ALPHAS,
        params: NO_PARAMS,
        about: "overlap sandwich and both distance chains for the relaxed fidelity",
    },
    CheckDef {
        name: "pgm_chain",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_ENSEMBLE,
        alphas: NO_ALPHAS,
        params: NO_PARAMS,
        about: "square-root measurement brackets the optimal binary guessing probability",
    },
    CheckDef {
        name: "pgm_optimality_flag",
        tolerance: CLOSED_FORM_TOL,
        arity: 1,
        dims: DIMS_ENSEMBLE,
        alphas: NO_ALPHAS,
        params: NO_PARAMS,
        about: "the commutation criterion agrees with the measured guessing gap",
    },
    CheckDef {
        name: "singlet_fraction",
        tolerance: OPTIMIZER_TOL,
        arity: 2,
        dims: &[&[2, 2]],
        alphas: NO_ALPHAS,
        params: NO_PARAMS,
        about: "square-root recovery matches the optimum on mixtures of pure states",
    },
    CheckDef {
        name: "sdp_check",
        tolerance: CLOSED_FORM_TOL,
        arity: 2,
        dims: &[&[2, 2]],
        alphas: NO_ALPHAS,
        params: NO_PARAMS,
        about: "dual certificate is tight on commuting states and refuted otherwise",
    },
];

/// All registry keys in listing order.
pub fn registry_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|d| d.name).collect()
}

/// One-line description of a registry check.
pub fn describe(name: &str) -> Result<&'static str> {
    Ok(lookup(name)?.about)
}

pub(crate) fn lookup(name: &str) -> Result<&'static CheckDef> {
    REGISTRY.iter().find(|d| d.name == name).ok_or_else(|| Error::UnknownCheck {
        name: name.to_string(),
        registry: registry_names().join(", "),
    })
}

/// A fully resolved sampling cell: one dimension tuple, one optional order,
/// one built-in parameter tuple.
pub(crate) struct Cell<'a> {
    pub dims: &'a [usize],
    pub alpha: Option<AlphaValue>,
    pub params: &'static [f64],
}

/// FNV-1a over the campaign seed, the check name, and the trial index.
/// Collisions are harmless (trials would merely share a stream); what
/// matters is that the derivation is stable across platforms and runs.
pub fn trial_seed(campaign_seed: u64, check: &str, trial_index: u64) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |byte: u8| h = (h ^ u64::from(byte)).wrapping_mul(PRIME);
    for b in campaign_seed.to_le_bytes() {
        eat(b);
    }
    for &b in check.as_bytes() {
        eat(b);
    }
    for b in trial_index.to_le_bytes() {
        eat(b);
    }
    h
}

/// Samples one trial for `name` in `cell` and returns its witness. The
/// witness captures every input the margin depends on.
fn generate(name: &str, cell: &Cell<'_>, rng: &mut rand_chacha::ChaCha8Rng) -> Result<Witness> {
    match name {
        "alt" => trace::gen_alt(cell, rng),
        "reverse_alt" => trace::gen_reverse_alt(cell, rng),
        "reverse_alt_audenaert" => trace::gen_audenaert(cell, rng),
        "hoelder" => trace::gen_hoelder(cell, rng),
        "gt" => trace::gen_gt(cell, rng),
        "reverse_gt" => trace::gen_reverse_gt(cell, rng),
        "reverse_gt_log" => trace::gen_reverse_gt_log(cell, rng),
        "reverse_gt_multi" => trace::gen_reverse_gt_multi(cell, rng),
        "ordering_chain" => ordering::gen_ordering_chain(cell, rng),
        "symmetry_relation" => ordering::gen_symmetry_relation(cell, rng),
        "axiom_unitary" => ordering::gen_axiom_unitary(cell, rng),
        "axiom_additivity" => ordering::gen_axiom_additivity(cell, rng),
        "axiom_direct_sum" => ordering::gen_axiom_direct_sum(cell, rng),
        "axiom_order" => ordering::gen_axiom_order(cell, rng),
        "dpi_pinching" => ordering::gen_dpi_pinching(cell, rng),
        "dpi_partial_trace" => ordering::gen_dpi_partial_trace(cell, rng),
        "dpi_isometry" => ordering::gen_dpi_isometry(cell, rng),
        "pinching_bound" => ordering::gen_pinching_bound(cell, rng),
        "cor41" => ordering::gen_cor41(cell, rng),
        "equality_condition" => ordering::gen_equality_condition(cell, rng),
        "entropy_corollary_down" => entropy::gen_corollary(cell, rng, false),
        "entropy_corollary_up" => entropy::gen_corollary(cell, rng, true),
        "entropy_classically_coherent_down" => entropy::gen_coherent(cell, rng, false),
        "entropy_classically_coherent_up" => entropy::gen_coherent(cell, rng, true),
        "entropy_min_like" => entropy::gen_min_like(cell, rng),
        "entropy_cq_bounds" => entropy::gen_cq_bounds(cell, rng),
        "entropy_equality" => entropy::gen_entropy_equality(cell, rng),
        "duality_petz" | "duality_minimal" | "duality_mixed" => {
            entropy::gen_duality(name, cell, rng)
        }
        "cq_dominance" => entropy::gen_cq_dominance(cell, rng),
        "gradient_check" => entropy::gen_gradient(cell, rng),
        "fidelity_bounds" => guessing::gen_fidelity_bounds(cell, rng),
        "pgm_chain" => guessing::gen_pgm_chain(cell, rng),
        "pgm_optimality_flag" => guessing::gen_pgm_flag(cell, rng),
        "singlet_fraction" => guessing::gen_singlet(cell, rng),
        "sdp_check" => guessing::gen_sdp(cell, rng),
        other => Err(Error::UnknownCheck {
            name: other.to_string(),
            registry: registry_names().join(", "),
        }),
    }
}

/// Recomputes the signed margin of a witness through the owning check's
/// evaluator. Campaign margins are produced by this same function, so a
/// stored witness replays to the reported value.
pub fn evaluate_witness(w: &Witness) -> Result<f64> {
    match w.check.as_str() {
        "alt" => trace::eval_alt(w),
        "reverse_alt" => trace::eval_reverse_alt(w),
        "reverse_alt_audenaert" => trace::eval_audenaert(w),
        "hoelder" => trace::eval_hoelder(w),
        "gt" => trace::eval_gt(w),
        "reverse_gt" => trace::eval_reverse_gt(w),
        "reverse_gt_log" => trace::eval_reverse_gt_log(w),
        "reverse_gt_multi" => trace::eval_reverse_gt_multi(w),
        "ordering_chain" => ordering::eval_ordering_chain(w),
        "symmetry_relation" => ordering::eval_symmetry_relation(w),
        "axiom_unitary" => ordering::eval_axiom_unitary(w),
        "axiom_additivity" => ordering::eval_axiom_additivity(w),
        "axiom_direct_sum" => ordering::eval_axiom_direct_sum(w),
        "axiom_order" => ordering::eval_axiom_order(w),
        "dpi_pinching" => ordering::eval_dpi_pinching(w),
        "dpi_partial_trace" => ordering::eval_dpi_partial_trace(w),
        "dpi_isometry" => ordering::eval_dpi_isometry(w),
        "pinching_bound" => ordering::eval_pinching_bound(w),
        "cor41" => ordering::eval_cor41(w),
        "equality_condition" => ordering::eval_equality_condition(w),
        "entropy_corollary_down" => entropy::eval_corollary(w, false),
        "entropy_corollary_up" => entropy::eval_corollary(w, true),
        "entropy_classically_coherent_down" => entropy::eval_coherent(w, false),
        "entropy_classically_coherent_up" => entropy::eval_coherent(w, true),
        "entropy_min_like" => entropy::eval_min_like(w),
        "entropy_cq_bounds" => entropy::eval_cq_bounds(w),
        "entropy_equality" => entropy::eval_entropy_equality(w),
        "duality_petz" | "duality_minimal" | "duality_mixed" => entropy::eval_duality(w),
        "cq_dominance" => entropy::eval_cq_dominance(w),
        "gradient_check" => entropy::eval_gradient(w),
        "fidelity_bounds" => guessing::eval_fidelity_bounds(w),
        "pgm_chain" => guessing::eval_pgm_chain(w),
        "pgm_optimality_flag" => guessing::eval_pgm_flag(w),
        "singlet_fraction" => guessing::eval_singlet(w),
        "sdp_check" => guessing::eval_sdp(w),
        other => Err(Error::UnknownCheck {
            name: other.to_string(),
            registry: registry_names().join(", "),
        }),
    }
}

fn validate(spec: &CheckSpec, def: &CheckDef) -> Result<()> {
    if spec.trials == 0 {
        return Err(Error::Config(format!(
            "check '{}' asks for zero trials; at least one is required",
            spec.name
        )));
    }
    if !(spec.tolerance > 0.0) {
        return Err(Error::Config(format!(
            "check '{}' needs a positive tolerance, got {}",
            spec.name, spec.tolerance
        )));
    }
    for tuple in &spec.dims {
        if tuple.len() != def.arity {
            return Err(Error::Config(format!(
                "check '{}' samples {}-part systems, got dimension tuple of arity {}",
                spec.name,
                def.arity,
                tuple.len()
            )));
        }
        if tuple.iter().any(|&d| d == 0) {
            return Err(Error::Config(format!(
                "check '{}' received a zero dimension",
                spec.name
            )));
        }
    }
    if def.alphas.is_empty() && !spec.alpha_grid.is_empty() {
        return Err(Error::Config(format!(
            "check '{}' is not order-parameterized; leave alphaGrid empty",
            spec.name
        )));
    }
    Ok(())
}

fn run_check(spec: &CheckSpec) -> Result<CheckOutcome> {
    let def = lookup(&spec.name)?;
    validate(spec, def)?;

    let dims: Vec<Vec<usize>> = if spec.dims.is_empty() {
        def.dims.iter().map(|d| d.to_vec()).collect()
    } else {
        spec.dims.clone()
    };
    let alphas: Vec<Option<AlphaValue>> = if def.alphas.is_empty() {
        vec![None]
    } else if spec.alpha_grid.is_empty() {
        def.alphas.iter().copied().map(Some).collect()
    } else {
        spec.alpha_grid.iter().copied().map(Some).collect()
    };

    let mut trials = 0usize;
    let mut failures = 0usize;
    let mut worst = f64::INFINITY;
    let mut worst_witnessed = f64::INFINITY;
    let mut witness: Option<Witness> = None;
    let mut trial_index = 0u64;

    for tuple in &dims {
        for &alpha in &alphas {
            for params in def.params {
                let cell = Cell { dims: tuple, alpha, params };
                for _ in 0..spec.trials {
                    let mut rng = seeded_rng(trial_seed(spec.seed, &spec.name, trial_index));
                    trial_index += 1;
                    trials += 1;
                    let outcome = generate(&spec.name, &cell, &mut rng)
                        .and_then(|w| evaluate_witness(&w).map(|m| (w, m)));
                    match outcome {
                        Ok((w, margin)) => {
                            if !(margin >= -spec.tolerance) {
                                failures += 1;
                            }
                            // A margin that is not a number sorts below every
                            // real one: it is a failure and its inputs are
                            // worth keeping.
                            let key = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
                            worst = worst.min(key);
                            if witness.is_none() || key < worst_witnessed {
                                worst_witnessed = key;
                                witness = Some(w);
                            }
                        }
                        Err(_) => {
                            // A trial that cannot even be evaluated counts as
                            // a failure; the campaign moves on.
                            failures += 1;
                            worst = f64::NEG_INFINITY;
                        }
                    }
                }
            }
        }
    }

    Ok(CheckOutcome {
        name: spec.name.clone(),
        trials,
        failures,
        worst_margin: worst,
        tolerance: spec.tolerance,
        witness,
    })
}

/// Runs every spec serially and collects the outcomes.
///
/// Configuration problems (unknown names, zero trials, bad tuples) surface
/// as errors before any sampling happens; margin failures never abort.
pub fn run_campaign(specs: &[CheckSpec]) -> Result<CampaignReport> {
    for spec in specs {
        let def = lookup(&spec.name)?;
        validate(spec, def)?;
    }
    let mut outcomes = Vec::with_capacity(specs.len());
    for spec in specs {
        outcomes.push(run_check(spec)?);
    }
    Ok(CampaignReport { seed: specs.first().map(|s| s.seed).unwrap_or(0), outcomes })
}

/// The full campaign: every registry check at its defaults, `trials` trials
/// per cell, all derived from one seed.
pub fn default_campaign(trials: usize, seed: u64) -> Vec<CheckSpec> {
    REGISTRY
        .iter()
        .map(|def| CheckSpec {
            name: def.name.to_string(),
            dims: Vec::new(),
            alpha_grid: Vec::new(),
            trials,
            tolerance: def.tolerance,
            seed,
        })
        .collect()
}

/// Trials per cell used by the default campaign.
pub const DEFAULT_TRIALS: usize = 200;

#[cfg(test)]
mod tests;
