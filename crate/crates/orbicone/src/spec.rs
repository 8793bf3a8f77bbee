//! Input files: action specs and finite group specs.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use orbicone_core::actions::DEFAULT_GROUP_TOL;
use orbicone_core::{ExtendedAction, FiniteOrthGroup, IntMatrix, TorusAction};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Cap on the order of groups generated from spec files.
pub const MAX_GROUP_ORDER: usize = 10_000;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpecFile {
    pub k: usize,
    pub n: usize,
    pub f: usize,
    #[serde(rename = "W")]
    pub w: Vec<Vec<i64>>,
    #[serde(default)]
    pub finite_generators: Option<Vec<Vec<Vec<f64>>>>,
    #[serde(default)]
    pub scan: Option<ScanSection>,
    #[serde(default)]
    pub pairs: Option<PairsSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub direction: Vec<f64>,
    pub radii: Vec<f64>,
    pub seed: u64,
    #[serde(default = "default_planes")]
    pub planes_per_point: usize,
}

fn default_planes() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairsSection {
    pub count: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpecFile {
    pub dim: usize,
    pub generators: Vec<Vec<Vec<f64>>>,
    /// Seed for chamber representatives.
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Raw bytes of an input file together with their SHA-256.
pub struct Input {
    pub bytes: Vec<u8>,
    pub sha256: String,
}

impl Input {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::SpecInvalid(format!("cannot read {}: {e}", path.display())))?;
        let sha256 = hex(&Sha256::digest(&bytes));
        Ok(Input { bytes, sha256 })
    }

    pub fn parse<T: for<'de> Deserialize<'de>>(&self) -> Result<T, CliError> {
        serde_json::from_slice(&self.bytes).map_err(|e| CliError::SpecInvalid(e.to_string()))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

impl ActionSpecFile {
    pub fn ambient_dim(&self) -> usize {
        2 * self.n + self.f
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::SpecInvalid(msg));
        if self.w.len() != self.k {
            return bad(format!("W has {} rows but k = {}", self.w.len(), self.k));
        }
        if let Some(row) = self.w.iter().position(|r| r.len() != self.n) {
            return bad(format!("row {row} of W has length {} but n = {}", self.w[row].len(), self.n));
        }
        let m = self.ambient_dim();
        if let Some(gens) = &self.finite_generators {
            for (i, g) in gens.iter().enumerate() {
                if g.len() != m || g.iter().any(|r| r.len() != m) {
                    return bad(format!("finite generator {i} is not {m}×{m}"));
                }
            }
        }
        if let Some(scan) = &self.scan {
            if scan.direction.len() != m {
                return bad(format!("scan direction has length {} but m = {m}", scan.direction.len()));
            }
            if scan.radii.is_empty() || scan.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                return bad("scan radii must be positive and finite".into());
            }
            if scan.planes_per_point == 0 {
                return bad("scan planes_per_point must be positive".into());
            }
        }
        Ok(())
    }

    pub fn torus(&self) -> Result<TorusAction, CliError> {
        self.validate()?;
        let weights = if self.k == 0 {
            IntMatrix::zeros(0, self.n)
        } else {
            IntMatrix::from_rows(&self.w)
        };
        Ok(TorusAction::new(weights, self.f)?)
    }

    pub fn finite_group(&self, tol: f64) -> Result<FiniteOrthGroup, CliError> {
        let m = self.ambient_dim();
        match &self.finite_generators {
            None => Ok(FiniteOrthGroup::trivial(m)),
            Some(gens) => {
                let gens: Vec<DMatrix<f64>> = gens.iter().map(|g| matrix(m, g)).collect();
                Ok(FiniteOrthGroup::close(m, &gens, tol, MAX_GROUP_ORDER)?)
            }
        }
    }

    pub fn extended(&self, tol: f64) -> Result<ExtendedAction, CliError> {
        Ok(ExtendedAction::new(self.torus()?, self.finite_group(tol)?)?)
    }
}

impl GroupSpecFile {
    pub fn group(&self, tol: f64) -> Result<FiniteOrthGroup, CliError> {
        for (i, g) in self.generators.iter().enumerate() {
            if g.len() != self.dim || g.iter().any(|r| r.len() != self.dim) {
                return Err(CliError::SpecInvalid(format!("generator {i} is not {0}×{0}", self.dim)));
            }
        }
        let gens: Vec<DMatrix<f64>> = self.generators.iter().map(|g| matrix(self.dim, g)).collect();
        Ok(FiniteOrthGroup::close(self.dim, &gens, tol, MAX_GROUP_ORDER)?)
    }
}

fn matrix(m: usize, rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |r, c| rows[r][c])
}

/// Parses a comma-separated point.
pub fn parse_point(text: &str, m: usize) -> Result<DVector<f64>, CliError> {
    let values: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let values = values.map_err(|e| CliError::SpecInvalid(format!("bad point {text:?}: {e}")))?;
    if values.len() != m {
        return Err(CliError::SpecInvalid(format!(
            "point {text:?} has {} coordinates, expected {m}",
            values.len()
        )));
    }
    Ok(DVector::from_vec(values))
}

pub fn default_tol() -> f64 {
    DEFAULT_GROUP_TOL
}
