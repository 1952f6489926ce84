pub mod baseline;
pub mod benchmark;
pub mod evaluate;
pub mod fit;
pub mod simulate;

use std::path::Path;

use rgm::io::{matrix_from_csv, stats_from_json};
use rgm::mcmc::{Hyperparameters, InstrumentMode, McmcConfig};
use rgm::model::{Mask, Matrix, RawDataSet, SummaryStatistics};
use rgm::simulation::{Case, SimulationTruth};
use rgm::summary::Thresholds;
use rgm::RgmError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::output::Inputs;
use crate::Mode;

impl From<Mode> for InstrumentMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Rgm => InstrumentMode::FixedMap,
            Mode::RgmPlus => InstrumentMode::Selection,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleFormat {
    #[default]
    Csv,
    /// Little-endian `f64` rows; column names go to a sidecar text file.
    Binary,
}

/// Run configuration file: the sampler settings plus summary thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub adapt_proposals: bool,
    pub adapt_target: f64,
    pub hyper: Hyperparameters,
    pub thresholds: Thresholds,
    pub sample_format: SampleFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        let m = McmcConfig::default();
        RunConfig {
            iterations: m.iterations,
            burn_in: m.burn_in,
            thin: m.thin,
            seed: m.seed,
            adapt_proposals: m.adapt_proposals,
            adapt_target: m.adapt_target,
            hyper: m.hyper,
            thresholds: Thresholds::default(),
            sample_format: SampleFormat::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>, inputs: &mut Inputs) -> CliResult<Self> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = inputs.read(p)?;
                serde_json::from_str(&text)
                    .map_err(|e| CliError::Usage(format!("invalid configuration {}: {e}", p.display())))
            }
        }
    }

    pub fn mcmc(&self, fixed_b_support: Option<Mask>) -> McmcConfig {
        McmcConfig {
            iterations: self.iterations,
            burn_in: self.burn_in,
            thin: self.thin,
            seed: self.seed,
            hyper: self.hyper.clone(),
            fixed_b_support,
            adapt_proposals: self.adapt_proposals,
            adapt_target: self.adapt_target,
        }
    }
}

/// Scalars describing a simulated dataset, stored as `truth.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthInfo {
    pub case: Case,
    pub p: usize,
    pub k: usize,
    pub t: usize,
    pub n: usize,
    pub seed: u64,
}

pub fn read_json<T: DeserializeOwned>(path: &Path, inputs: &mut Inputs) -> CliResult<T> {
    let text = inputs.read(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::json(path, e))
}

pub fn read_matrix(path: &Path, inputs: &mut Inputs) -> CliResult<Matrix> {
    let text = inputs.read(path)?;
    Ok(matrix_from_csv(&text, path)?.0)
}

pub fn read_mask(path: &Path, inputs: &mut Inputs) -> CliResult<Mask> {
    let m = read_matrix(path, inputs)?;
    if m.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(RgmError::Format {
            path: path.display().to_string(),
            reason: "mask entries must be 0 or 1".into(),
        }
        .into());
    }
    Ok(m.map(|v| v == 1.0))
}

pub fn read_stats(path: &Path, inputs: &mut Inputs) -> CliResult<SummaryStatistics> {
    let text = inputs.read(path)?;
    Ok(stats_from_json(&text, path)?)
}

pub fn read_data(dir: &Path, inputs: &mut Inputs) -> CliResult<RawDataSet> {
    let y = read_matrix(&dir.join("Y.csv"), inputs)?;
    let x = read_matrix(&dir.join("X.csv"), inputs)?;
    let u = read_matrix(&dir.join("U.csv"), inputs)?;
    Ok(RawDataSet::new(y, x, u)?)
}

pub fn read_truth(dir: &Path, inputs: &mut Inputs) -> CliResult<SimulationTruth> {
    let info: TruthInfo = read_json(&dir.join("truth.json"), inputs)?;
    let truth = SimulationTruth {
        case: info.case,
        a_true: read_matrix(&dir.join("A_true.csv"), inputs)?,
        b_support: read_mask(&dir.join("B_support.csv"), inputs)?,
        b_true: read_matrix(&dir.join("B_true.csv"), inputs)?,
        d: read_matrix(&dir.join("D.csv"), inputs)?,
        sigma_noise: read_matrix(&dir.join("Sigma_noise.csv"), inputs)?,
        graph_truth: read_mask(&dir.join("graph_truth.csv"), inputs)?,
        confounding_truth: read_mask(&dir.join("confounding_truth.csv"), inputs)?,
        baseline_map: read_mask(&dir.join("baseline_map.csv"), inputs)?,
    };
    let (p, k) = (info.p, info.k);
    let shapes = [
        ("A_true", truth.a_true.shape(), (p, p)),
        ("B_support", truth.b_support.shape(), (p, k)),
        ("B_true", truth.b_true.shape(), (p, k)),
        ("D", truth.d.shape(), (p, info.t)),
        ("Sigma_noise", truth.sigma_noise.shape(), (p, p)),
        ("graph_truth", truth.graph_truth.shape(), (p, p)),
        ("confounding_truth", truth.confounding_truth.shape(), (p, p)),
        ("baseline_map", truth.baseline_map.shape(), (p, k)),
    ];
    for (name, found, expected) in shapes {
        if found != expected {
            return Err(RgmError::Dimension {
                block: name.into(),
                expected: format!("{}x{}", expected.0, expected.1),
                found: format!("{}x{}", found.0, found.1),
            }
            .into());
        }
    }
    Ok(truth)
}

/// `--jobs` limited by the `RGM_THREADS` environment variable.
pub fn capped_jobs(jobs: usize) -> CliResult<usize> {
    match std::env::var("RGM_THREADS") {
        Ok(v) => {
            let cap: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("RGM_THREADS must be a positive integer, got '{v}'")))?;
            if cap == 0 {
                return Err(CliError::Usage(
                    "RGM_THREADS must be a positive integer, got '0'".into(),
                ));
            }
            Ok(jobs.min(cap))
        }
        Err(_) => Ok(jobs),
    }
}

pub fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("configuration serializes")
}
