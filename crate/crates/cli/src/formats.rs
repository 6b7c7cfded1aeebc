//! File formats: coefficient matrices as plain CSV, measurement settings
//! as JSON pairs, and complex matrices (density matrices, observables) as
//! a `{dim, re, im}` JSON object in row-major order.

use std::fs;
use std::path::Path;

use bellkit_core::linalg::{ComplexMatrix, RealMatrix, UnitVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Reads a coefficient matrix from CSV: one row per line, decimal reals
/// separated by commas, every row the same length. Blank lines and
/// surrounding whitespace are ignored.
pub fn read_matrix_csv(path: &Path) -> Result<RealMatrix, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row = trimmed
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    CliError::Usage(format!(
                        "{}:{}: '{}' is not a decimal real",
                        path.display(),
                        line_no + 1,
                        cell.trim()
                    ))
                })
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(CliError::Usage(format!(
                    "{}:{}: row has {} entries, expected {}",
                    path.display(),
                    line_no + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: no matrix rows found",
            path.display()
        )));
    }
    RealMatrix::from_rows(&rows).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
struct SettingsPairIn {
    a: Vec<f64>,
    b: Vec<f64>,
}

/// One normalization warning from settings ingestion.
pub struct NormWarning {
    pub pair: usize,
    pub side: char,
    pub deviation: f64,
}

/// Parsed settings: the normalized pairs plus any norm warnings.
pub type SettingsFile = (Vec<(UnitVector, UnitVector)>, Vec<NormWarning>);

/// Reads a settings file: a JSON list of `{a: [...], b: [...]}` pairs.
/// Vectors are normalized on load; a deviation above 1e-6 from unit norm
/// is reported back as a warning (the caller decides where to print it).
/// All vectors must share one dimension, and `expected_dim`, when given,
/// pins what that dimension must be.
pub fn read_settings(path: &Path, expected_dim: Option<usize>) -> Result<SettingsFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let raw: Vec<SettingsPairIn> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    if raw.is_empty() {
        return Err(CliError::Usage(format!(
            "{}: settings list is empty",
            path.display()
        )));
    }
    let dim = raw[0].a.len();
    if let Some(expected) = expected_dim {
        if dim != expected {
            return Err(CliError::Usage(format!(
                "{}: settings have dimension {dim}, the model needs {expected}",
                path.display()
            )));
        }
    }
    let mut pairs = Vec::with_capacity(raw.len());
    let mut warnings = Vec::new();
    for (k, entry) in raw.into_iter().enumerate() {
        let mut load = |components: Vec<f64>, side: char| -> Result<UnitVector, CliError> {
            if components.len() != dim {
                return Err(CliError::Usage(format!(
                    "{}: pair {k} side {side} has dimension {}, expected {dim}",
                    path.display(),
                    components.len()
                )));
            }
            let norm = components.iter().map(|x| x * x).sum::<f64>().sqrt();
            let deviation = (norm - 1.0).abs();
            if deviation > 1e-6 {
                warnings.push(NormWarning {
                    pair: k,
                    side,
                    deviation,
                });
            }
            UnitVector::new(components).map_err(|e| {
                CliError::Usage(format!("{}: pair {k} side {side}: {e}", path.display()))
            })
        };
        let a = load(entry.a, 'a')?;
        let b = load(entry.b, 'b')?;
        pairs.push((a, b));
    }
    Ok((pairs, warnings))
}

/// Row-major JSON form of a complex square matrix.
#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct ComplexMatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

pub fn complex_matrix_to_json(matrix: &ComplexMatrix) -> ComplexMatrixJson {
    ComplexMatrixJson {
        dim: matrix.dim(),
        re: matrix.entries().iter().map(|z| z.re).collect(),
        im: matrix.entries().iter().map(|z| z.im).collect(),
    }
}

pub fn complex_matrix_from_json(json: &ComplexMatrixJson) -> Result<ComplexMatrix, CliError> {
    let expected = json.dim * json.dim;
    if json.re.len() != expected || json.im.len() != expected {
        return Err(CliError::Usage(format!(
            "complex matrix of dim {} needs {expected} re and im entries, got {} and {}",
            json.dim,
            json.re.len(),
            json.im.len()
        )));
    }
    let entries = json
        .re
        .iter()
        .zip(&json.im)
        .map(|(re, im)| Complex64::new(*re, *im))
        .collect();
    ComplexMatrix::new(json.dim, entries).map_err(|e| CliError::Usage(format!("{e}")))
}
