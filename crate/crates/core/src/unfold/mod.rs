//! Enumeration of generalized diagonals and saddle connections by unfolding.

mod billiard;
mod engine;
mod lengths;
mod surface;

use serde::{Deserialize, Serialize};

use crate::geom::PrecisionConfig;

pub use billiard::{
    diagonal_histogram, enumerate_diagonals, Boundary, DiagonalConventions, DiagonalHistogram, GeneralizedDiagonal,
    LengthRule, Orientation,
};
pub use engine::EnumStats;
pub use lengths::{coarse_bound_k, three_lengths, CoarseBound};
pub use surface::{enumerate_saddle_connections, saddle_connections_within, SaddleConnection, SurfaceLimits};

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumConfig {
    pub precision: PrecisionConfig,
    pub node_budget: u64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            precision: PrecisionConfig::default(),
            node_budget: DEFAULT_NODE_BUDGET,
            threads: None,
        }
    }
}

impl EnumConfig {
    pub fn with_threads(mut self, t: usize) -> Self {
        self.threads = Some(t);
        self
    }
}
