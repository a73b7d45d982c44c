//! Operator sources: builtins and JSON matrix files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use enorm_core::{
    oscillator_pair, ComplexMatrix, HermitianMatrix, KrausMap, OperatorPair, OscillatorOp, C64,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    /// Oscillator position `q`, constrained by `N`.
    Q,
    /// Oscillator momentum `p`, constrained by `N`.
    P,
    /// Number operator `N`, constrained by itself.
    #[value(name = "N")]
    #[serde(rename = "N")]
    N,
    /// `A = I` with `G = diag(0, 1, …, d−1)`.
    Identity,
    /// Seeded Gaussian `A` with `G = B†B − λ_min`.
    Random,
}

impl Builtin {
    pub fn oscillator(self) -> Option<OscillatorOp> {
        match self {
            Builtin::Q => Some(OscillatorOp::Position),
            Builtin::P => Some(OscillatorOp::Momentum),
            Builtin::N => Some(OscillatorOp::Number),
            _ => None,
        }
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct OperatorArgs {
    /// Builtin operator pair; ignored when --matrix-a is given.
    #[arg(long, value_enum, default_value = "q")]
    pub builtin: Builtin,
    /// Oscillator frequency.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Truncation dimension of builtins.
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    /// JSON matrix file for `A`.
    #[arg(long, requires = "matrix_g")]
    pub matrix_a: Option<PathBuf>,
    /// JSON matrix file for `G`.
    #[arg(long)]
    pub matrix_g: Option<PathBuf>,
}

impl OperatorArgs {
    pub fn uses_files(&self) -> bool {
        self.matrix_a.is_some()
    }

    /// Oscillator operator when the source is a q/p/N builtin.
    pub fn oscillator(&self) -> Option<OscillatorOp> {
        if self.uses_files() {
            None
        } else {
            self.builtin.oscillator()
        }
    }

    pub fn load(&self, seed: u64) -> Result<OperatorPair, CliError> {
        if let (Some(a), Some(g)) = (&self.matrix_a, &self.matrix_g) {
            let a = read_matrix(a)?;
            let g = HermitianMatrix::new(read_matrix(g)?)?;
            return Ok(OperatorPair::new(a, g)?);
        }
        if !(self.omega > 0.0) {
            return Err(CliError::Config(format!(
                "--omega must be positive, got {}",
                self.omega
            )));
        }
        let pair = match self.builtin {
            Builtin::Identity => {
                OperatorPair::new(ComplexMatrix::identity(self.dim), number_operator(self.dim))?
            }
            Builtin::Random => OperatorPair::random(self.dim, seed)?,
            b => oscillator_pair(b.oscillator().unwrap(), self.omega, self.dim)?,
        };
        Ok(pair)
    }

    /// Constraint operator alone, for commands that take no `A`.
    pub fn load_g(&self, seed: u64) -> Result<HermitianMatrix, CliError> {
        match &self.matrix_g {
            Some(g) => Ok(HermitianMatrix::new(read_matrix(g)?)?),
            None => Ok(self.load(seed)?.g().clone()),
        }
    }
}

fn number_operator(dim: usize) -> HermitianMatrix {
    HermitianMatrix::from_real_diagonal(&(0..dim).map(|k| k as f64).collect::<Vec<_>>())
}

/// On-disk matrix: row-major `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn into_matrix(self) -> Result<ComplexMatrix, CliError> {
        let entries = self
            .entries
            .iter()
            .map(|[re, im]| C64::new(*re, *im))
            .collect();
        Ok(ComplexMatrix::new(self.dim, self.dim, entries)?)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    read_json::<MatrixFile>(path)?.into_matrix()
}

/// Kraus file: JSON list of matrices.
pub fn read_kraus(path: &Path) -> Result<KrausMap, CliError> {
    let files: Vec<MatrixFile> = read_json(path)?;
    let ops = files
        .into_iter()
        .map(MatrixFile::into_matrix)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(KrausMap::new(ops)?)
}
