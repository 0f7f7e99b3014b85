use std::path::PathBuf;

use pattern_spectra::pattern::{parse_pattern_spec, PatternInput};
use pattern_spectra::spectral::GridSpec;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
}

/// Everything one command needs, validated.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub pattern: String,
    #[serde(skip)]
    pub input: PatternInput,
    pub n_max: usize,
    pub grid: usize,
    pub top: usize,
    pub krylov: usize,
    pub tol: f64,
    pub seed: u64,
    #[serde(skip)]
    pub format: Format,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

pub const MIN_GRID: usize = 4;
pub const MAX_GRID: usize = 4096;

impl RunConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        pattern: &str,
        n_max: usize,
        grid: usize,
        top: usize,
        krylov: usize,
        tol: f64,
        seed: u64,
        format: Format,
        out: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let input = parse_pattern_spec(pattern)?;
        let m = input.set.m();
        if n_max < m {
            return Err(CliError::Usage(format!("--n-max {n_max} is below the window order {m}")));
        }
        if !grid.is_power_of_two() || !(MIN_GRID..=MAX_GRID).contains(&grid) {
            return Err(CliError::Usage(format!(
                "--grid must be a power of two in {MIN_GRID}..={MAX_GRID}, got {grid}"
            )));
        }
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
        }
        if top == 0 || krylov <= top {
            return Err(CliError::Usage(format!("need 1 <= --top < --krylov, got {top} and {krylov}")));
        }
        Ok(RunConfig { pattern: pattern.to_string(), input, n_max, grid, top, krylov, tol, seed, format, out })
    }

    pub fn grid_spec(&self) -> Result<GridSpec, CliError> {
        Ok(GridSpec::new(self.input.set.m(), self.grid)?)
    }
}
