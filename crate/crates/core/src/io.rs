//! JSON formats for states and subspace bases.
//!
//! State: `{"dims": [d1, …], "matrix": [[[re, im], …], …]}`, dense row-major.
//! Basis: `{"rows": [[[re, im], …], …], "dims": [d1, …]}` with `dims` optional.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grassmann::SubspaceBasis;
use crate::tensor::{CMat, MultiState, C64};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub rows: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

fn to_matrix(rows: &[Vec<[f64; 2]>], what: &str) -> Result<CMat> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != n_cols) {
        return Err(Error::Parse(format!("{what} rows have unequal lengths")));
    }
    for (i, r) in rows.iter().enumerate() {
        for (j, z) in r.iter().enumerate() {
            if !z[0].is_finite() || !z[1].is_finite() {
                return Err(Error::NonFinite(i, j));
            }
        }
    }
    Ok(CMat::from_fn(n_rows, n_cols, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

fn from_matrix(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

impl StateFile {
    pub fn from_state(state: &MultiState) -> Self {
        StateFile { dims: state.dims().to_vec(), matrix: from_matrix(state.matrix()) }
    }

    pub fn into_state(self, cfg: ToleranceConfig) -> Result<MultiState> {
        let m = to_matrix(&self.matrix, "matrix")?;
        MultiState::new(m, self.dims, cfg)
    }
}

impl BasisFile {
    pub fn from_basis(basis: &SubspaceBasis) -> Self {
        BasisFile { rows: from_matrix(basis.rows()), dims: Some(basis.dims().to_vec()) }
    }

    /// Builds the basis, taking `dims` from the file or else from `default_dims`.
    pub fn into_basis(self, default_dims: Option<&[usize]>, tol_rank: f64) -> Result<SubspaceBasis> {
        let rows = to_matrix(&self.rows, "basis")?;
        let dims = match (self.dims, default_dims) {
            (Some(d), _) => d,
            (None, Some(d)) => d.to_vec(),
            (None, None) => vec![rows.ncols()],
        };
        SubspaceBasis::new(rows, dims, tol_rank)
    }
}

pub fn parse_state(text: &str, cfg: ToleranceConfig) -> Result<MultiState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_state(cfg)
}

pub fn state_to_json(state: &MultiState) -> String {
    serde_json::to_string(&StateFile::from_state(state)).expect("plain data serializes")
}

pub fn parse_basis(text: &str, default_dims: Option<&[usize]>, tol_rank: f64) -> Result<SubspaceBasis> {
    let file: BasisFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_basis(default_dims, tol_rank)
}
