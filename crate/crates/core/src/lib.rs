// SPDX-License-Identifier: MIT OR Apache-2.0

pub mod accuracy;
pub mod decomposition;
pub mod error;
pub mod exec;
pub mod features;
pub mod forecast;
pub mod learners;
pub mod pipeline;
pub mod reduction;
pub mod series;
pub mod stats;
pub mod synthetic;

pub use error::{Error, Result};
