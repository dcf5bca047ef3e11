use super::*;
use crate::div::AlphaValue;
use crate::error::Error;
use crate::mat::ComplexMatrix;
use num_complex::Complex64;

fn spec(name: &str, trials: usize, seed: u64) -> CheckSpec {
    CheckSpec::with_defaults(name, trials, seed).unwrap()
}

fn specs(names: &[&str], trials: usize, seed: u64) -> Vec<CheckSpec> {
    names.iter().map(|n| spec(n, trials, seed)).collect()
}

fn failing_names(report: &CampaignReport) -> String {
    report
        .outcomes
        .iter()
        .filter(|o| o.failures > 0)
        .map(|o| format!("{} ({} of {}, worst {:.3e})", o.name, o.failures, o.trials, o.worst_margin))
        .collect::<Vec<_>>()
        .join("; ")
}

#[test]
fn registry_is_well_formed() {
    let names = registry_names();
    assert!(!names.is_empty());
    for (i, name) in names.iter().enumerate() {
        assert!(!names[..i].contains(name), "duplicate registry key {name}");
        let def = lookup(name).unwrap();
        assert!(def.tolerance > 0.0);
        assert!(def.arity >= 1);
        assert!(!def.dims.is_empty());
        assert!(def.dims.iter().all(|t| t.len() == def.arity), "{name} dims mismatch arity");
        assert!(!def.params.is_empty());
        assert!(!describe(name).unwrap().is_empty());
    }
}

#[test]
fn unknown_names_are_rejected_with_the_registry_listed() {
    let err = lookup("no_such_check").unwrap_err();
    match err {
        Error::UnknownCheck { name, registry } => {
            assert_eq!(name, "no_such_check");
            assert!(registry.contains("alt"));
            assert!(registry.contains("sdp_check"));
        }
        other => panic!("expected UnknownCheck, got {other:?}"),
    }
    let w = Witness::new("no_such_check");
    assert!(matches!(evaluate_witness(&w), Err(Error::UnknownCheck { .. })));
}

#[test]
fn default_specs_copy_the_registry_tolerance() {
    let s = spec("gradient_check", 7, 42);
    assert_eq!(s.trials, 7);
    assert_eq!(s.seed, 42);
    assert!(s.dims.is_empty() && s.alpha_grid.is_empty());
    assert_eq!(s.tolerance, lookup("gradient_check").unwrap().tolerance);
}

#[test]
fn invalid_configurations_fail_before_sampling() {
    let mut zero_trials = spec("alt", 1, 0);
    zero_trials.trials = 0;
    assert!(matches!(run_campaign(&[zero_trials]), Err(Error::Config(_))));

    let mut bad_tol = spec("alt", 1, 0);
    bad_tol.tolerance = 0.0;
    assert!(matches!(run_campaign(&[bad_tol]), Err(Error::Config(_))));

    let mut bad_arity = spec("alt", 1, 0);
    bad_arity.dims = vec![vec![2, 2]];
    assert!(matches!(run_campaign(&[bad_arity]), Err(Error::Config(_))));

    let mut zero_dim = spec("alt", 1, 0);
    zero_dim.dims = vec![vec![0]];
    assert!(matches!(run_campaign(&[zero_dim]), Err(Error::Config(_))));

    let mut stray_grid = spec("gt", 1, 0);
    stray_grid.alpha_grid = vec![AlphaValue::Finite(0.5)];
    assert!(matches!(run_campaign(&[stray_grid]), Err(Error::Config(_))));

    let unknown = CheckSpec {
        name: "nope".into(),
        dims: Vec::new(),
        alpha_grid: Vec::new(),
        trials: 1,
        tolerance: 1e-8,
        seed: 0,
    };
    assert!(matches!(run_campaign(&[unknown]), Err(Error::UnknownCheck { .. })));

    // One bad spec poisons the whole campaign up front.
    let mut tail = spec("gt", 1, 0);
    tail.trials = 0;
    assert!(run_campaign(&[spec("gt", 1, 0), tail]).is_err());
}

#[test]
fn empty_campaigns_are_empty_reports() {
    let report = run_campaign(&[]).unwrap();
    assert!(report.outcomes.is_empty());
    assert_eq!(report.failures(), 0);
    assert_eq!(report.seed, 0);
}

#[test]
fn trial_seeds_separate_streams() {
    assert_eq!(trial_seed(1, "alt", 0), trial_seed(1, "alt", 0));
    assert_ne!(trial_seed(1, "alt", 0), trial_seed(1, "alt", 1));
    assert_ne!(trial_seed(1, "alt", 0), trial_seed(1, "gt", 0));
    assert_ne!(trial_seed(1, "alt", 0), trial_seed(2, "alt", 0));
}

#[test]
fn alpha_and_dimension_overrides_control_the_cell_count() {
    let mut s = spec("ordering_chain", 1, 3);
    s.dims = vec![vec![2]];
    s.alpha_grid = vec![AlphaValue::Finite(0.5)];
    let report = run_campaign(&[s]).unwrap();
    assert_eq!(report.outcomes[0].trials, 1);

    let report = run_campaign(&[spec("ordering_chain", 1, 3)]).unwrap();
    // Three default dimensions, nine default orders.
    assert_eq!(report.outcomes[0].trials, 27);
}

#[test]
fn witness_lookups_report_missing_slots() {
    let mut w = Witness::new("alt");
    assert!(matches!(w.matrix("a"), Err(Error::Config(_))));
    assert!(matches!(w.scalar("r"), Err(Error::Config(_))));
    w.put_matrix("m0", ComplexMatrix::identity(2));
    w.put_matrix("m1", ComplexMatrix::identity(3));
    w.put_matrix("other", ComplexMatrix::identity(4));
    let ms = w.matrices_with_prefix("m");
    assert_eq!(ms.len(), 2);
    assert_eq!(ms[0].rows(), 2);
    assert_eq!(ms[1].rows(), 3);
}

#[test]
fn alpha_encoding_round_trips() {
    for alpha in [
        AlphaValue::Zero,
        AlphaValue::One,
        AlphaValue::Infinity,
        AlphaValue::Finite(0.37),
        AlphaValue::Finite(2.5),
    ] {
        let mut w = Witness::new("gt");
        w.put_scalar("alpha", encode_alpha(alpha));
        assert_eq!(w.alpha("alpha").unwrap(), alpha);
    }
}

#[test]
fn margins_replay_bitwise_from_stored_witnesses() {
    let names = ["alt", "gt", "cor41", "fidelity_bounds", "sdp_check", "pgm_chain"];
    let report = run_campaign(&specs(&names, 2, 11)).unwrap();
    assert_eq!(report.failures(), 0, "failures: {}", failing_names(&report));
    for outcome in &report.outcomes {
        let w = outcome.witness.as_ref().expect("worst witness present");
        let replayed = evaluate_witness(w).unwrap();
        assert_eq!(
            replayed.to_bits(),
            outcome.worst_margin.to_bits(),
            "{} replayed {replayed} vs reported {}",
            outcome.name,
            outcome.worst_margin
        );
    }
}

#[test]
fn campaigns_are_deterministic() {
    let names = ["reverse_alt", "pgm_chain", "equality_condition"];
    let a = run_campaign(&specs(&names, 2, 5)).unwrap();
    let b = run_campaign(&specs(&names, 2, 5)).unwrap();
    assert_eq!(a.seed, b.seed);
    assert_eq!(a.outcomes.len(), b.outcomes.len());
    for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
        assert_eq!(x.name, y.name);
        assert_eq!(x.trials, y.trials);
        assert_eq!(x.failures, y.failures);
        assert_eq!(x.worst_margin.to_bits(), y.worst_margin.to_bits());
        assert_eq!(x.witness, y.witness);
    }
}

#[test]
fn different_seeds_sample_different_instances() {
    let a = run_campaign(&specs(&["gt"], 1, 1)).unwrap();
    let b = run_campaign(&specs(&["gt"], 1, 2)).unwrap();
    assert_ne!(a.outcomes[0].witness, b.outcomes[0].witness);
}

#[test]
fn commuting_exponentials_sit_on_the_equality_line() {
    let mut w = Witness::new("gt");
    w.put_matrix("h1", ComplexMatrix::diag(&[0.3, -0.7, 1.1]));
    w.put_matrix("h2", ComplexMatrix::diag(&[0.9, 0.2, -0.4]));
    w.put_scalar("flagged", 1.0);
    let margin = evaluate_witness(&w).unwrap();
    assert!(margin.abs() < 1e-12, "margin {margin}");
}

#[test]
fn noncommuting_exponentials_split_strictly() {
    // Pauli X against Pauli Z: the product trace is 2 cosh(1)^2, the coupled
    // one is 2 cosh(sqrt 2), about nine percent apart in the log.
    let x = ComplexMatrix::from_fn(2, 2, |i, j| {
        if i != j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
    });
    let z = ComplexMatrix::diag(&[1.0, -1.0]);
    let mut w = Witness::new("gt");
    w.put_matrix("h1", x);
    w.put_matrix("h2", z);
    w.put_scalar("flagged", 0.0);
    let margin = evaluate_witness(&w).unwrap();
    let expected = (2.0 * 1.0f64.cosh().powi(2)).ln() - (2.0 * 2.0f64.sqrt().cosh()).ln();
    assert!((margin - expected).abs() < 1e-12, "margin {margin} vs {expected}");
    assert!(margin > 1e-2);
}

#[test]
fn trivial_exponent_line_collapses_the_trace_power_bound() {
    let mut w = Witness::new("alt");
    let a = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => Complex64::new(1.0, 0.0),
        (1, 1) => Complex64::new(0.8, 0.0),
        (0, 1) => Complex64::new(0.3, 0.1),
        _ => Complex64::new(0.3, -0.1),
    });
    w.put_matrix("a", a);
    w.put_matrix("b", ComplexMatrix::diag(&[0.5, 1.5]));
    w.put_scalar("r", 1.0);
    w.put_scalar("q", 1.7);
    let margin = evaluate_witness(&w).unwrap();
    assert!(margin.abs() < 1e-13, "margin {margin}");
}

#[test]
fn commuting_states_collapse_the_fidelity_bracket() {
    let mut w = Witness::new("fidelity_bounds");
    w.put_matrix("rho", ComplexMatrix::diag(&[1.0, 0.0]));
    w.put_matrix("sigma", ComplexMatrix::diag(&[0.5, 0.5]));
    w.put_scalar("commuting", 1.0);
    let margin = evaluate_witness(&w).unwrap();
    assert!(margin.abs() < 1e-12, "margin {margin}");
}

#[test]
fn maximally_entangled_recovery_is_exact() {
    let half = Complex64::new(0.5, 0.0);
    let mut rho = ComplexMatrix::zeros(4, 4);
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            rho.set(i, j, half);
        }
    }
    let mut w = Witness::new("singlet_fraction");
    w.put_matrix("rho", rho);
    w.put_scalar("da", 2.0);
    w.put_scalar("db", 2.0);
    w.put_scalar("exact", 1.0);
    let margin = evaluate_witness(&w).unwrap();
    assert!(margin.abs() < 1e-6, "margin {margin}");
}

#[test]
fn classical_states_carry_a_tight_certificate() {
    let mut w = Witness::new("sdp_check");
    w.put_matrix("tau", ComplexMatrix::diag(&[0.4, 0.3, 0.2, 0.1]));
    w.put_scalar("da", 2.0);
    w.put_scalar("dc", 2.0);
    w.put_scalar("commuting", 1.0);
    let margin = evaluate_witness(&w).unwrap();
    assert!(margin > -1e-8, "margin {margin}");
}

#[test]
fn reduced_campaign_passes_every_check() {
    let report = run_campaign(&default_campaign(2, 20240815)).unwrap();
    assert_eq!(report.failures(), 0, "failures: {}", failing_names(&report));
    assert_eq!(report.outcomes.len(), registry_names().len());
    for outcome in &report.outcomes {
        assert!(outcome.trials >= 2, "{} ran {} trials", outcome.name, outcome.trials);
        assert!(outcome.witness.is_some(), "{} kept no witness", outcome.name);
        assert!(outcome.worst_margin.is_finite(), "{} margin not finite", outcome.name);
    }
}

#[test]
#[ignore = "full-depth campaign, several minutes; run explicitly"]
fn full_default_campaign_is_green() {
    let report = run_campaign(&default_campaign(DEFAULT_TRIALS, 1)).unwrap();
    assert_eq!(report.failures(), 0, "failures: {}", failing_names(&report));
}
