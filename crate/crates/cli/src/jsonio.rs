//! File formats and full-precision JSON emission.
//!
//! States travel as `{"dims": [d1, ...], "matrix": [[{"re": x, "im": y}, ...], ...]}`
//! where `dims` lists the tensor factors (their product is the matrix size)
//! and `matrix` is the full square array in row-major order. Ensembles are
//! `{"priors": [p, ...], "states": [<matrix>, ...]}`.
//!
//! Parsing goes through serde so malformed files report the offending field.
//! Emission is hand-rolled: every numeric field carries 17 significant digits
//! (enough to round-trip any double exactly), and non-finite scalars, which
//! JSON numbers cannot express, are emitted as the strings `"inf"`, `"-inf"`,
//! and `"nan"`.

use std::fs;
use std::path::Path;

use qrdiv::ent::BipartiteState;
use qrdiv::pg::CqEnsemble;
use qrdiv::{ComplexMatrix, DensityOperator, DimensionProfile, PositiveOperator};
use serde::Deserialize;

use crate::fail::Failure;

/// One complex entry of a serialized matrix.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    /// Real part.
    pub re: f64,
    /// Imaginary part.
    pub im: f64,
}

/// A serialized operator together with its tensor factorization.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    /// Subsystem dimensions; their product is the ambient dimension.
    pub dims: Vec<usize>,
    /// Row-major square array of complex entries.
    pub matrix: Vec<Vec<ComplexJson>>,
}

/// A serialized guessing ensemble.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleJson {
    /// Prior probabilities, summing to 1.
    pub priors: Vec<f64>,
    /// Conditional states, all on the same system.
    pub states: Vec<MatrixJson>,
}

impl MatrixJson {
    /// Validates the shape and converts to a dense matrix plus factorization.
    pub fn build(&self, origin: &str) -> Result<(ComplexMatrix, DimensionProfile), Failure> {
        let profile = DimensionProfile::new(self.dims.clone())
            .map_err(|e| Failure::Input(format!("{origin}: field 'dims': {e}")))?;
        let n = profile.total();
        if self.matrix.len() != n {
            return Err(Failure::Input(format!(
                "{origin}: field 'matrix' has {} rows but 'dims' multiply to {n}",
                self.matrix.len()
            )));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Failure::Input(format!(
                    "{origin}: field 'matrix' row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            data.extend(row.iter().map(|z| num_complex(z.re, z.im)));
        }
        let m = ComplexMatrix::new(n, n, data)
            .map_err(|e| Failure::Input(format!("{origin}: field 'matrix': {e}")))?;
        Ok((m, profile))
    }
}

fn num_complex(re: f64, im: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(re, im)
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::in_file(path, e))
}

/// Reads and shape-checks a matrix file without interpreting it as a state.
pub fn load_matrix(path: &Path) -> Result<(ComplexMatrix, DimensionProfile), Failure> {
    let raw: MatrixJson = serde_json::from_str(&read_text(path)?)
        .map_err(|e| Failure::in_file(path, e))?;
    raw.build(&path.display().to_string())
}

/// Loads a positive semidefinite operator; the trace is free.
pub fn load_positive(path: &Path) -> Result<(PositiveOperator, DimensionProfile), Failure> {
    let (m, profile) = load_matrix(path)?;
    let op = PositiveOperator::from_matrix(m).map_err(|e| Failure::in_file(path, e))?;
    Ok((op, profile))
}

/// Loads a density operator (positive semidefinite, unit trace).
pub fn load_density(path: &Path) -> Result<(DensityOperator, DimensionProfile), Failure> {
    let (m, profile) = load_matrix(path)?;
    let op = DensityOperator::from_matrix(m).map_err(|e| Failure::in_file(path, e))?;
    Ok((op, profile))
}

/// Loads a density operator whose `dims` field factors it into subsystems.
pub fn load_bipartite(path: &Path) -> Result<BipartiteState, Failure> {
    let (state, profile) = load_density(path)?;
    if profile.subsystems() < 2 {
        return Err(Failure::in_file(
            path,
            "field 'dims' must list at least two subsystem dimensions for a composite state",
        ));
    }
    BipartiteState::new(state, profile).map_err(|e| Failure::in_file(path, e))
}

/// Loads a guessing ensemble, validating priors and state shapes.
pub fn load_ensemble(path: &Path) -> Result<CqEnsemble, Failure> {
    let raw: EnsembleJson = serde_json::from_str(&read_text(path)?)
        .map_err(|e| Failure::in_file(path, e))?;
    let mut states = Vec::with_capacity(raw.states.len());
    for (i, entry) in raw.states.iter().enumerate() {
        let (m, _) = entry.build(&format!("{}: field 'states[{i}]'", path.display()))?;
        let state = DensityOperator::from_matrix(m)
            .map_err(|e| Failure::in_file(path, format!("field 'states[{i}]': {e}")))?;
        states.push(state);
    }
    CqEnsemble::new(raw.priors, states).map_err(|e| Failure::in_file(path, e))
}

/// Formats a finite double with 17 significant digits, exact under round-trip.
pub fn float17(x: f64) -> String {
    debug_assert!(x.is_finite(), "float17 is for finite values, got {x}");
    format!("{x:.16e}")
}

/// A JSON scalar: a 17-digit number when finite, a quoted string otherwise.
pub fn json_scalar(x: f64) -> String {
    if x.is_finite() {
        float17(x)
    } else if x.is_nan() {
        "\"nan\"".into()
    } else if x > 0.0 {
        "\"inf\"".into()
    } else {
        "\"-inf\"".into()
    }
}

/// Escapes a string for embedding in emitted JSON.
pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Serializes a matrix in the state-file format at full precision.
pub fn matrix_json(m: &ComplexMatrix, dims: &[usize]) -> String {
    let n = m.rows();
    let dims_text: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let cells: Vec<String> = (0..n)
            .map(|j| {
                let z = m.get(i, j);
                format!("{{\"re\":{},\"im\":{}}}", float17(z.re), float17(z.im))
            })
            .collect();
        rows.push(format!("[{}]", cells.join(",")));
    }
    format!(
        "{{\"dims\":[{}],\"matrix\":[{}]}}",
        dims_text.join(","),
        rows.join(",")
    )
}

/// Writes `content` to `out` when given, otherwise to standard output.
pub fn deliver(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| Failure::in_file(path, e)),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matrix_serialization_round_trips() {
        let m = ComplexMatrix::from_fn(2, 2, |i, j| {
            num_complex(0.1 + i as f64, (j as f64) / 3.0 - 0.7)
        });
        let text = matrix_json(&m, &[2]);
        let parsed: MatrixJson = serde_json::from_str(&text).unwrap();
        let (back, profile) = parsed.build("test").unwrap();
        assert_eq!(profile.dims(), &[2]);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(back.get(i, j), m.get(i, j));
            }
        }
    }

    #[test]
    fn shape_mismatches_name_the_field() {
        let bad: MatrixJson = serde_json::from_str(
            "{\"dims\":[3],\"matrix\":[[{\"re\":1,\"im\":0}]]}",
        )
        .unwrap();
        let err = bad.build("here").unwrap_err();
        assert!(err.to_string().contains("'matrix'"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let r: Result<MatrixJson, _> =
            serde_json::from_str("{\"dims\":[1],\"matrix\":[[{\"re\":1,\"im\":0}]],\"x\":1}");
        assert!(r.unwrap_err().to_string().contains('x'));
    }

    #[test]
    fn non_finite_scalars_become_strings() {
        assert_eq!(json_scalar(f64::INFINITY), "\"inf\"");
        assert_eq!(json_scalar(f64::NEG_INFINITY), "\"-inf\"");
        assert_eq!(json_scalar(f64::NAN), "\"nan\"");
    }

    proptest! {
        #[test]
        fn seventeen_digits_round_trip_exactly(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = float17(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
