//! JSON forms of states and decompositions.
//!
//! A state is `{"dim": d, "entries": [[re, im], ...]}` with the `d²` entries in
//! row-major order. A decomposition is `{"weights": [...], "vectors": [[[re, im], ...], ...]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use subent_core::{
    validate_density, CMatrix, Decomposition, DensityMatrix, ExtremalDecomposition, C64,
};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    State(#[from] subent_core::Error),
}

impl FormatError {
    pub fn name(&self) -> &'static str {
        match self {
            FormatError::Read { .. } => "ReadError",
            FormatError::Json(_) => "MalformedJson",
            FormatError::State(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl StateJson {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        StateJson {
            dim: rho.dim(),
            entries: rho
                .matrix()
                .as_slice()
                .iter()
                .map(|z| [z.re, z.im])
                .collect(),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix, FormatError> {
        let data = self
            .entries
            .iter()
            .map(|&[re, im]| C64::new(re, im))
            .collect();
        let m = CMatrix::from_row_major(self.dim, self.dim, data)?;
        Ok(validate_density(m)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub weights: Vec<f64>,
    pub vectors: Vec<Vec<[f64; 2]>>,
}

impl From<&ExtremalDecomposition> for DecompositionJson {
    fn from(dec: &ExtremalDecomposition) -> Self {
        DecompositionJson {
            weights: dec.weights().to_vec(),
            vectors: dec
                .decomposers()
                .iter()
                .map(|v| v.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

pub fn parse_state(text: &str) -> Result<DensityMatrix, FormatError> {
    serde_json::from_str::<StateJson>(text)?.to_density()
}

pub fn read_state(path: &Path) -> Result<DensityMatrix, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_state(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use subent_core::perm_symmetric_state;

    #[test]
    fn state_round_trip() {
        let rho = perm_symmetric_state(3, 0.7).unwrap();
        let text = serde_json::to_string(&StateJson::from_density(&rho)).unwrap();
        let back = parse_state(&text).unwrap();
        assert_eq!(back.matrix().as_slice(), rho.matrix().as_slice());
    }

    #[test]
    fn invalid_states_are_named() {
        let err =
            parse_state(r#"{"dim": 2, "entries": [[1.5,0],[0,0],[0,0],[-0.5,0]]}"#).unwrap_err();
        assert_eq!(err.name(), "NotPositive");
        let err = parse_state(r#"{"dim": 2, "entries": [[1,0],[0,0],[0,0]]}"#).unwrap_err();
        assert_eq!(err.name(), "DimensionMismatch");
        let err =
            parse_state(r#"{"dim": 2, "entries": [[0.5,0],[0.1,0],[0.2,0],[0.5,0]]}"#).unwrap_err();
        assert_eq!(err.name(), "NotHermitian");
        assert_eq!(parse_state("{").unwrap_err().name(), "MalformedJson");
    }

    #[test]
    fn decomposition_layout() {
        let dec = ExtremalDecomposition::from_unnormalized(&[
            vec![C64::new(0.5, 0.0), C64::new(0.0, 0.5)],
            vec![C64::new(0.5, 0.0), C64::new(0.0, -0.5)],
        ])
        .unwrap();
        let json = DecompositionJson::from(&dec);
        assert_eq!(json.weights, dec.weights());
        assert_eq!(json.vectors.len(), 2);
        assert!((json.vectors[0][1][1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }
}
