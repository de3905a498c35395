//! Geometric, combinatorial and regularized lengths of saddle connections.

use serde::{Deserialize, Serialize};

use super::SaddleConnection;
use crate::error::EnumError;
use crate::geom::{wedge, PlanarVec};
use crate::surface::SurfaceSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThreeLengths {
    pub geometric: f64,
    pub combinatorial: u32,
    pub regularized: f64,
}

/// Lengths of a connection with native holonomy `z` and the given crossing
/// counts; `ℓ_G` and `ℓ_R` use the area-one normalization.
pub fn three_lengths(z: &PlanarVec, crossings_per_class: &[u32], s: &SurfaceSpec) -> ThreeLengths {
    let area = s.area();
    let regularized = s
        .filling_system()
        .iter()
        .map(|c| wedge(z, &c.holonomy).abs())
        .sum::<f64>()
        / area;
    ThreeLengths {
        geometric: z.norm() / area.sqrt(),
        combinatorial: crossings_per_class.iter().sum(),
        regularized,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoarseBound {
    pub k: f64,
    /// Connections entering the maximum.
    pub considered: usize,
    /// Connections with `ℓ_C = 0` (filling edges and chords inside one copy),
    /// for which no finite constant can bound `ℓ_G / ℓ_C`.
    pub zero_combinatorial: usize,
}

/// Smallest `K ≥ 1` with `ℓ_G/K ≤ ℓ_C, ℓ_R ≤ K ℓ_G` over `(ℓ_G, ℓ_C, ℓ_R)` triples.
/// Triples with `ℓ_C = 0` are skipped and counted.
pub fn coarse_k_of(triples: impl IntoIterator<Item = (f64, f64, f64)>) -> Result<CoarseBound, EnumError> {
    let mut k = 1.0f64;
    let mut considered = 0;
    let mut zero = 0;
    for (g, c, r) in triples {
        if c == 0.0 {
            zero += 1;
            continue;
        }
        considered += 1;
        k = k.max(c / g).max(r / g).max(g / c).max(g / r);
    }
    if considered + zero == 0 {
        return Err(EnumError::EmptySample);
    }
    Ok(CoarseBound {
        k,
        considered,
        zero_combinatorial: zero,
    })
}

pub fn coarse_bound_k(sample: &[SaddleConnection]) -> Result<CoarseBound, EnumError> {
    coarse_k_of(
        sample
            .iter()
            .map(|s| (s.length_geometric, s.length_combinatorial as f64, s.length_regularized)),
    )
}
