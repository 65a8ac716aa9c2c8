// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tsmeta::accuracy::{Measure, OriginConfig};
use tsmeta::exec::Execution;
use tsmeta::learners::{CvSpec, LearnerKind};
use tsmeta::pipeline::{ExperimentConfig, PoolId, Reduction, ReductionConfig};
use tsmeta::series::DataFormat;

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "TSMETA_OUT";
pub const DEFAULT_OUT: &str = "tsmeta-out";

/// Every run setting. Loaded from a TOML file, then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub format: DataFormat,
    pub horizon: usize,
    pub origins: usize,
    pub step: Option<usize>,
    pub season: usize,
    pub secondary_season: Option<usize>,
    pub test_ratio: f64,
    /// Seed of the train/test split.
    pub seed: u64,
    pub cv_seed: u64,
    pub folds: usize,
    pub repeats: usize,
    pub pools: Vec<PoolId>,
    pub measures: Vec<Measure>,
    pub reductions: Vec<Reduction>,
    pub learners: Vec<LearnerKind>,
    pub reduction: ReductionConfig,
    pub out: Option<PathBuf>,
    pub sequential: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let e = ExperimentConfig::default();
        RunConfig {
            data: None,
            format: DataFormat::LongCsv,
            horizon: e.origins.horizon,
            origins: e.origins.n_origins,
            step: None,
            season: 7,
            secondary_season: None,
            test_ratio: e.test_ratio,
            seed: e.seed,
            cv_seed: e.cv.seed,
            folds: e.cv.folds,
            repeats: e.cv.repeats,
            pools: e.pools,
            measures: e.measures,
            reductions: e.reductions,
            learners: e.learners,
            reduction: e.reduction,
            out: None,
            sequential: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("horizon", self.horizon),
            ("origins", self.origins),
            ("step", self.step.unwrap_or(1)),
            ("season", self.season),
            ("secondary_season", self.secondary_season.unwrap_or(1)),
            ("folds", self.folds),
            ("repeats", self.repeats),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(CliError::config(format!("{name} must be positive")));
        }
        if !(self.test_ratio > 0.0 && self.test_ratio < 1.0) {
            return Err(CliError::config(format!(
                "test_ratio must lie in (0, 1), got {}",
                self.test_ratio
            )));
        }
        if self.folds < 2 {
            return Err(CliError::config("folds must be at least 2"));
        }
        self.experiment()
            .validate()
            .map_err(|e| CliError::config(e.to_string()))
    }

    pub fn data_path(&self) -> Result<&Path, CliError> {
        self.data
            .as_deref()
            .ok_or_else(|| CliError::config("no data file given (use --data or `data` in the config)"))
    }

    /// Flag, then config file, then `TSMETA_OUT`, then `tsmeta-out`.
    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| {
            std::env::var_os(OUT_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
        })
    }

    pub fn exec(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            origins: OriginConfig {
                horizon: self.horizon,
                n_origins: self.origins,
                step: self.step,
            },
            test_ratio: self.test_ratio,
            seed: self.seed,
            pools: self.pools.clone(),
            measures: self.measures.clone(),
            reductions: self.reductions.clone(),
            learners: self.learners.clone(),
            cv: CvSpec {
                folds: self.folds,
                repeats: self.repeats,
                seed: self.cv_seed,
                exec: self.exec(),
            },
            reduction: self.reduction.clone(),
            exec: self.exec(),
            ..ExperimentConfig::default()
        }
    }
}
