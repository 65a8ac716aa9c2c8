// SPDX-License-Identifier: MIT OR Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::accuracy::RankingTable;
use crate::error::{Error, Result};
use crate::forecast::MethodId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolId {
    Top4,
    Top6,
    Top6Snaive,
    Basic,
}

impl PoolId {
    pub const ALL: [PoolId; 4] = [PoolId::Top4, PoolId::Top6, PoolId::Top6Snaive, PoolId::Basic];
    /// Pools that get every reduction.
    pub const MAIN: [PoolId; 3] = [PoolId::Top4, PoolId::Top6, PoolId::Top6Snaive];

    pub fn name(self) -> &'static str {
        match self {
            PoolId::Top4 => "top4",
            PoolId::Top6 => "top6",
            PoolId::Top6Snaive => "top6_snaive",
            PoolId::Basic => "basic",
        }
    }
}

impl fmt::Display for PoolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PoolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PoolId::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown pool `{s}`")))
    }
}

pub const BASIC_POOL: [MethodId; 4] = [
    MethodId::EtsAnn,
    MethodId::EtsAna,
    MethodId::EtsAan,
    MethodId::EtsAaa,
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolSpec {
    pub id: PoolId,
    /// Rank order for the top pools, registry order for `basic`.
    pub members: Vec<MethodId>,
}

/// The four pools for one ranking. Top pools skip the benchmark methods.
pub fn build_pools(ranking: &RankingTable) -> Result<Vec<PoolSpec>> {
    let advanced: Vec<MethodId> = ranking
        .rows
        .iter()
        .filter(|r| !r.method.is_benchmark() && r.mean_error.is_finite())
        .map(|r| r.method)
        .collect();
    if advanced.len() < 6 {
        return Err(Error::InvalidArgument(format!(
            "top pools need 6 ranked advanced methods, got {}",
            advanced.len()
        )));
    }
    let top6: Vec<MethodId> = advanced[..6].to_vec();
    let mut with_snaive = top6.clone();
    with_snaive.push(MethodId::Snaive);
    Ok(vec![
        PoolSpec {
            id: PoolId::Top4,
            members: advanced[..4].to_vec(),
        },
        PoolSpec {
            id: PoolId::Top6,
            members: top6,
        },
        PoolSpec {
            id: PoolId::Top6Snaive,
            members: with_snaive,
        },
        PoolSpec {
            id: PoolId::Basic,
            members: BASIC_POOL.to_vec(),
        },
    ])
}
