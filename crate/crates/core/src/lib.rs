//! Limit-average analysis of weighted featured transition systems.
//!
//! A [`Wfts`] describes a whole product line: transitions carry a weight and
//! a feature guard. [`analyze_family`] computes, for every valid product, the
//! best long-run mean weight reachable from an initial state, working on all
//! products at once. [`analyze_product_based`] computes the same values one
//! product at a time with classic algorithms.

pub mod analysis;
pub mod bench;
pub mod feature;
pub mod graph;
pub mod io;
pub mod mean_cycle;
pub mod model;
pub mod random;
pub mod scc;
pub mod search;
pub mod validate;

pub use analysis::{
    analyze_family, analyze_product_based, AnalysisOptions, LimitAverageReport, Strategy, Timing,
};
pub use feature::{FeatureError, FeatureExpr, FeatureModel, Product, ProductSet};
pub use io::generators::Generator;
pub use io::{parse, serialize, ParseError};
pub use mean_cycle::{Bound, Mode, PartitionedValue};
pub use model::{ModelError, ProjectedWts, StateId, Transition, Weight, Wfts, WftsBuilder};
pub use scc::{SymbolicScc, SymbolicSccTree, TransposeGraph};
pub use search::{DfsOrder, FinishingTimesTree};

/// Any error the library reports.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Reads and parses a `.wfts` file.
pub fn load(path: impl AsRef<std::path::Path>) -> Result<Wfts, Error> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse(&text)?)
}
