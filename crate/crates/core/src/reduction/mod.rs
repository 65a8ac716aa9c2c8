// SPDX-License-Identifier: MIT OR Apache-2.0

//! Feature weighting, feature selection and principal components.

pub mod oner;
pub mod pca;

pub use oner::{oner_weights, select_features, FeatureWeights, SelectionMode, DEFAULT_BINS, PAPER12};
pub use pca::{fit_pca, pca_transform, PcaModel, DEFAULT_CUMVAR};
