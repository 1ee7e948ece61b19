//! Mean-weight cycles: the feature-aware Karp table over symbolic
//! components, classic Karp for single products, and a brute-force oracle.
//!
//! Minimisation runs the maximising algorithms on negated weights; see
//! [`Mode::orient`].

mod classic;
mod partition;
mod symbolic;

pub use classic::{brute_force_mean_cycle, classic_karp, classic_karp_table, witness_cycle, OracleError};
pub use partition::{Bound, CellSet, PartitionedValue};
pub use symbolic::{karp_table, mean_cycle_scc, KarpTable};
pub(crate) use symbolic::oriented_mean_cycle;
#[doc(hidden)]
pub use symbolic::oriented_mean_cycle_sets;

use serde::Serialize;

use crate::model::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Max,
    Min,
}

impl Mode {
    /// Maps a weight into the space where larger is better.
    pub fn orient(self, w: Weight) -> Weight {
        match self {
            Mode::Max => w,
            Mode::Min => -w,
        }
    }

    /// Whether `a` is strictly better than `b`.
    pub fn better(self, a: Weight, b: Weight) -> bool {
        match self {
            Mode::Max => a > b,
            Mode::Min => a < b,
        }
    }

    /// The better of two optional values; `None` loses.
    pub fn best(self, a: Option<Weight>, b: Option<Weight>) -> Option<Weight> {
        match (a, b) {
            (Some(x), Some(y)) => Some(if self.better(y, x) { y } else { x }),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "max" => Ok(Mode::Max),
            "min" => Ok(Mode::Min),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Max => "max",
            Mode::Min => "min",
        })
    }
}
