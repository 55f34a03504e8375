//! JSON matrix exchange format and file loading.
//!
//! A matrix is `{"dim": d, "re": [[...]], "im": [[...]]}` with row-major
//! d x d arrays. Floats are written in shortest round-trip form, so a value
//! re-parses to the same bits.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use skewcoh_core::channels::KrausChannel;
use skewcoh_core::linalg::{ComplexMatrix, C64};
use skewcoh_core::state::{DensityMatrix, Observable};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.rows())
                .map(|r| m.row(r).iter().map(f).collect())
                .collect()
        };
        MatrixJson {
            dim: m.rows(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    /// Shape check; errors name the offending key and row.
    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        let d = self.dim;
        if d == 0 {
            return Err("dim: must be at least 1".into());
        }
        for (key, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != d {
                return Err(format!("{key}: has {} rows, expected {d}", part.len()));
            }
            for (r, row) in part.iter().enumerate() {
                if row.len() != d {
                    return Err(format!(
                        "{key}[{r}]: has {} entries, expected {d}",
                        row.len()
                    ));
                }
                if let Some(c) = row.iter().position(|x| !x.is_finite()) {
                    return Err(format!("{key}[{r}][{c}]: not a finite number"));
                }
            }
        }
        let data = (0..d)
            .flat_map(|r| (0..d).map(move |c| (r, c)))
            .map(|(r, c)| C64::new(self.re[r][c], self.im[r][c]))
            .collect();
        ComplexMatrix::from_vec(d, d, data).map_err(|e| e.to_string())
    }
}

/// Contents of an input file together with its SHA-256.
#[derive(Clone, Debug)]
pub struct Loaded<T> {
    pub value: T,
    pub path: PathBuf,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read(path: &Path) -> Result<(String, String), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::input(path, e.to_string()))?;
    let hash = sha256_hex(&bytes);
    let text = String::from_utf8(bytes).map_err(|_| CliError::input(path, "file is not UTF-8"))?;
    Ok((text, hash))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, String> {
    let m: MatrixJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
    m.to_matrix()
}

pub fn load_matrix(path: &Path) -> Result<Loaded<ComplexMatrix>, CliError> {
    let (text, sha256) = read(path)?;
    let value = parse_matrix(&text).map_err(|e| CliError::input(path, e))?;
    Ok(Loaded {
        value,
        path: path.to_path_buf(),
        sha256,
    })
}

pub fn load_state(path: &Path) -> Result<Loaded<DensityMatrix>, CliError> {
    let m = load_matrix(path)?;
    let value = DensityMatrix::new(m.value).map_err(|e| CliError::input(path, e.to_string()))?;
    Ok(Loaded {
        value,
        path: m.path,
        sha256: m.sha256,
    })
}

pub fn load_observable(path: &Path) -> Result<Loaded<Observable>, CliError> {
    let m = load_matrix(path)?;
    let value = Observable::new(m.value).map_err(|e| CliError::input(path, e.to_string()))?;
    Ok(Loaded {
        value,
        path: m.path,
        sha256: m.sha256,
    })
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(&MatrixJson::from_matrix(m)).expect("matrix serializes")
}

/// A Kraus set is a JSON array of matrices.
pub fn kraus_to_json(channel: &KrausChannel) -> String {
    let ms: Vec<MatrixJson> = channel
        .kraus()
        .iter()
        .map(MatrixJson::from_matrix)
        .collect();
    serde_json::to_string_pretty(&ms).expect("Kraus set serializes")
}

pub fn parse_kraus(text: &str) -> Result<KrausChannel, String> {
    let ms: Vec<MatrixJson> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let kraus = ms
        .iter()
        .enumerate()
        .map(|(i, m)| m.to_matrix().map_err(|e| format!("[{i}].{e}")))
        .collect::<Result<Vec<_>, _>>()?;
    KrausChannel::new(kraus).map_err(|e| e.to_string())
}

pub fn load_kraus(path: &Path) -> Result<Loaded<KrausChannel>, CliError> {
    let (text, sha256) = read(path)?;
    let value = parse_kraus(&text).map_err(|e| CliError::input(path, e))?;
    Ok(Loaded {
        value,
        path: path.to_path_buf(),
        sha256,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_errors_name_the_key() {
        let e = parse_matrix(r#"{"dim": 2, "re": [[1, 0]], "im": [[0, 0], [0, 0]]}"#).unwrap_err();
        assert!(e.starts_with("re:"), "{e}");
        let e =
            parse_matrix(r#"{"dim": 2, "re": [[1, 0], [0]], "im": [[0, 0], [0, 0]]}"#).unwrap_err();
        assert!(e.starts_with("re[1]:"), "{e}");
        let e = parse_matrix(r#"{"dim": 2, "re": [[1, 0], [0, 0]]}"#).unwrap_err();
        assert!(e.contains("`im`"), "{e}");
        let e = parse_matrix(r#"{"dim": 1, "re": [[1]], "im": [[0]], "scale": 2}"#).unwrap_err();
        assert!(e.contains("`scale`"), "{e}");
    }

    #[test]
    fn hash_is_sha256() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
