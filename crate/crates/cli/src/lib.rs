// SPDX-License-Identifier: MIT OR Apache-2.0

//! `tsmeta` command line: evaluation, feature extraction, the full
//! meta-learning run and table regeneration.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use tsmeta::learners::LearnerKind;
use tsmeta::pipeline::{PoolId, Reduction};
use tsmeta::series::DataFormat;

pub use commands::{cmd_evaluate, cmd_features, cmd_report, cmd_run};
pub use config::{RunConfig, OUT_ENV};
pub use error::{CliError, ErrorKind};

#[derive(Debug, Parser)]
#[command(name = "tsmeta", version, about = "Per-series forecaster recommendation by meta-learning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rolling-origin evaluation of every forecaster; writes records and rankings.
    Evaluate(Flags),
    /// Meta-feature extraction; writes the feature matrix and constant columns.
    Features(Flags),
    /// All phases; writes report.json and the table CSVs.
    Run(Flags),
    /// Regenerates the table CSVs from an existing report.json.
    Report(Flags),
}

#[derive(Debug, Args, Default)]
pub struct Flags {
    /// TOML file with any `RunConfig` field; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// long-csv (series_id,t,value) or wide-csv (one column per series).
    #[arg(long, value_parser = parse_with::<DataFormat>)]
    pub format: Option<DataFormat>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub origins: Option<usize>,
    #[arg(long)]
    pub step: Option<usize>,
    #[arg(long)]
    pub season: Option<usize>,
    #[arg(long)]
    pub test_ratio: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub cv_seed: Option<u64>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Comma-separated: top4, top6, top6_snaive, basic.
    #[arg(long, value_delimiter = ',', value_parser = parse_with::<PoolId>)]
    pub pools: Option<Vec<PoolId>>,
    /// Comma-separated: raw, feature_selection (fs), pca.
    #[arg(long, value_delimiter = ',', value_parser = parse_with::<Reduction>)]
    pub reductions: Option<Vec<Reduction>>,
    /// Comma-separated: decision_tree, random_forest, treebag, gbt, mlp, svm.
    #[arg(long, value_delimiter = ',', value_parser = parse_with::<LearnerKind>)]
    pub learners: Option<Vec<LearnerKind>>,
    /// Output directory; defaults to $TSMETA_OUT, then ./tsmeta-out.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run every loop on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

fn parse_with<T>(s: &str) -> Result<T, String>
where
    T: std::str::FromStr<Err = tsmeta::Error>,
{
    s.parse::<T>().map_err(|e| e.to_string())
}

impl Flags {
    /// Config file (if any) with the flags applied on top.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::from_toml_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    c.$field = v.clone();
                }
            )*};
        }
        set!(format, horizon, origins, season, test_ratio, seed, cv_seed, folds, repeats, pools, reductions, learners);
        if self.data.is_some() {
            c.data = self.data.clone();
        }
        if self.step.is_some() {
            c.step = self.step;
        }
        if self.out.is_some() {
            c.out = self.out.clone();
        }
        c.sequential |= self.sequential;
        c.validate()?;
        Ok(c)
    }
}

/// Runs one parsed command and returns what to print on stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let listing = |paths: Vec<PathBuf>| {
        paths
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join("\n")
    };
    match &cli.command {
        Command::Evaluate(f) => cmd_evaluate(&f.resolve()?).map(listing),
        Command::Features(f) => cmd_features(&f.resolve()?).map(listing),
        Command::Run(f) => cmd_run(&f.resolve()?).map(listing),
        Command::Report(f) => cmd_report(&f.resolve()?).map(|(_, summary)| summary),
    }
}
