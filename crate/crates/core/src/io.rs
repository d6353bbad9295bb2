//! JSON file formats.
//!
//! A matrix is `{"dim": d, "re": [[...]], "im": [[...]]}` with row-major
//! `d x d` arrays. A model file is
//! `{"H_I": <matrix>, "H_0": <matrix or null>, "lambda": x, "eta": y}`, where
//! a null `H_0` means the model has no disturbance.

use serde::{Deserialize, Serialize, Serializer};

use crate::format::to_json_string;
use crate::linalg::{ComplexMatrix, C64};
use crate::model::{validate_density, validate_hermitian, DensityMatrix, DisturbedModel, HermitianOperator};

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    /// The text does not follow the schema.
    #[error("schema error: {0}")]
    Schema(String),
    /// The text parses but the operator or state is invalid.
    #[error("validation error in {field}: {source}")]
    Invalid {
        field: String,
        #[source]
        source: crate::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let part = |f: fn(&C64) -> f64| (0..d).map(|i| m.row(i).iter().map(f).collect()).collect();
        Self {
            dim: d,
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }

    /// Checks the declared shape and assembles the matrix. `field` names the
    /// value in diagnostics.
    pub fn to_matrix(&self, field: &str) -> Result<ComplexMatrix, LoadError> {
        let d = self.dim;
        if d == 0 {
            return Err(LoadError::Schema(format!("{field}.dim: must be at least 1")));
        }
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != d {
                return Err(LoadError::Schema(format!(
                    "{field}.{name}: expected {d} rows, found {}",
                    part.len()
                )));
            }
            if let Some((i, row)) = part.iter().enumerate().find(|(_, r)| r.len() != d) {
                return Err(LoadError::Schema(format!(
                    "{field}.{name}[{i}]: expected {d} entries, found {}",
                    row.len()
                )));
            }
        }
        Ok(ComplexMatrix::from_fn(d, |i, j| C64::new(self.re[i][j], self.im[i][j])))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelJson {
    #[serde(rename = "H_I")]
    pub h_i: MatrixJson,
    #[serde(rename = "H_0", default)]
    pub h_0: Option<MatrixJson>,
    pub lambda: f64,
    pub eta: f64,
}

impl ModelJson {
    pub fn from_model(model: &DisturbedModel) -> Self {
        Self {
            h_i: MatrixJson::from_matrix(model.h_i.matrix()),
            h_0: Some(MatrixJson::from_matrix(model.h_0.matrix())),
            lambda: model.lambda,
            eta: model.eta,
        }
    }
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, LoadError> {
    serde_json::from_str(text).map_err(|e| LoadError::Schema(e.to_string()))
}

fn invalid(field: &str) -> impl FnOnce(crate::Error) -> LoadError + '_ {
    move |source| LoadError::Invalid {
        field: field.to_string(),
        source,
    }
}

pub fn parse_hermitian(text: &str) -> Result<HermitianOperator, LoadError> {
    let m: MatrixJson = parse(text)?;
    validate_hermitian(m.to_matrix("matrix")?).map_err(invalid("matrix"))
}

pub fn parse_density(text: &str) -> Result<DensityMatrix, LoadError> {
    let m: MatrixJson = parse(text)?;
    validate_density(m.to_matrix("rho")?).map_err(invalid("rho"))
}

pub fn parse_model(text: &str) -> Result<DisturbedModel, LoadError> {
    let m: ModelJson = parse(text)?;
    let h_i = validate_hermitian(m.h_i.to_matrix("H_I")?).map_err(invalid("H_I"))?;
    let h_0 = match &m.h_0 {
        Some(h0) => validate_hermitian(h0.to_matrix("H_0")?).map_err(invalid("H_0"))?,
        None => HermitianOperator::zero(h_i.dim()),
    };
    if h_0.dim() != h_i.dim() {
        return Err(LoadError::Schema(format!(
            "H_0.dim: expected {} to match H_I, found {}",
            h_i.dim(),
            h_0.dim()
        )));
    }
    DisturbedModel::new(h_i, h_0, m.lambda, m.eta).map_err(|e| LoadError::Schema(e.to_string()))
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    to_json_string(&MatrixJson::from_matrix(m)).expect("matrix serializes")
}

pub fn model_to_json(model: &DisturbedModel) -> String {
    to_json_string(&ModelJson::from_model(model)).expect("model serializes")
}

pub(crate) fn serialize_bound<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_infinite() => s.serialize_str("inf"),
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_none(),
    }
}

pub(crate) fn serialize_optional_state<S: Serializer>(v: &Option<DensityMatrix>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(rho) => MatrixJson::from_matrix(rho.matrix()).serialize(s),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_hermitian, rng};
    use proptest::prelude::*;

    #[test]
    fn parses_model_with_null_disturbance() {
        let text = r#"{"H_I": {"dim": 2, "re": [[1,0],[0,-1]], "im": [[0,0],[0,0]]},
                       "H_0": null, "lambda": 0.5, "eta": 2.0}"#;
        let m = parse_model(text).unwrap();
        assert_eq!(m.h_0, HermitianOperator::zero(2));
        assert_eq!(m.lambda, 0.5);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let text = r#"{"H_I": {"dim": 2, "re": [[1,0],[0,-1],[0,0]], "im": [[0,0],[0,0]]},
                       "H_0": null, "lambda": 0, "eta": 0}"#;
        match parse_model(text) {
            Err(LoadError::Schema(msg)) => assert!(msg.contains("H_I.re"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        match parse_model(r#"{"H_I": {"dim": 1, "re": [[1]], "im": [[0]]}}"#) {
            Err(LoadError::Schema(msg)) => assert!(msg.contains("lambda") && msg.contains("line"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_errors_are_separate() {
        let text = r#"{"H_I": {"dim": 2, "re": [[0,1],[0,0]], "im": [[0,0],[0,0]]},
                       "H_0": null, "lambda": 0, "eta": 0}"#;
        assert!(matches!(parse_model(text), Err(LoadError::Invalid { .. })));
        let rho = r#"{"dim": 2, "re": [[0.7,0],[0,0.4]], "im": [[0,0],[0,0]]}"#;
        assert!(matches!(parse_density(rho), Err(LoadError::Invalid { .. })));
    }

    #[test]
    fn model_round_trip() {
        let mut r = rng(2);
        let model = DisturbedModel::new(
            random_hermitian(&mut r, 3, 1.0),
            random_hermitian(&mut r, 3, 1.0),
            0.25,
            -1.5,
        )
        .unwrap();
        let back = parse_model(&model_to_json(&model)).unwrap();
        assert_eq!(back, model);
    }

    proptest! {
        #[test]
        fn density_round_trip(seed in 0u64..10_000, dim in 1usize..6) {
            let mut r = rng(seed);
            let rank = 1 + (seed as usize) % dim;
            let rho = random_density(&mut r, dim, rank);
            let back = parse_density(&matrix_to_json(rho.matrix())).unwrap();
            prop_assert!(back.matrix().max_abs_diff(rho.matrix()) <= 1e-12);
        }
    }
}
