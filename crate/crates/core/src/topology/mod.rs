//! Vietoris-Rips persistent homology over Z/2.
//!
//! [`build_rips`] enumerates every simplex of dimension `<= max_dim + 1`
//! with diameter `<= max_scale` and sorts them into filtration order
//! (value, then dimension, then vertex list). [`compute_persistence`]
//! reduces the boundary matrix and reads off the diagram.

mod reduce;
mod rips;

use serde::{Deserialize, Serialize};

pub use reduce::{reduce, Pairing};
pub use rips::{
    build_rips, build_rips_with_budget, FilteredSimplex, RipsFiltration, DEFAULT_SIMPLEX_BUDGET,
};

use crate::cloud::PointCloud;

/// Default `max_scale` as a fraction of the cloud diameter.
pub const DEFAULT_SCALE_FRACTION: f64 = 0.4;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("simplex budget exceeded: {count} simplices > budget {budget}")]
    Budget { count: usize, budget: usize },
}

/// `0.4 * diameter`, or 1 for a cloud with no extent.
pub fn default_max_scale(cloud: &PointCloud) -> f64 {
    let d = cloud.diameter();
    if d > 0.0 {
        DEFAULT_SCALE_FRACTION * d
    } else {
        1.0
    }
}

/// One bar; `death == None` means it never dies within the filtration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bar {
    pub birth: f64,
    pub death: Option<f64>,
}

impl Bar {
    pub fn is_infinite(&self) -> bool {
        self.death.is_none()
    }

    /// `death - birth`, with an infinite death replaced by `max_scale`.
    pub fn persistence(&self, max_scale: f64) -> f64 {
        self.death.unwrap_or(max_scale) - self.birth
    }

    pub fn alive_at(&self, scale: f64) -> bool {
        self.birth <= scale && self.death.is_none_or(|d| scale < d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub max_dim: usize,
    pub max_scale: f64,
    /// `bars[k]` holds the dimension-`k` bars sorted by (birth, death),
    /// zero-length bars included.
    #[serde(rename = "pairs", with = "bar_arrays")]
    pub bars: Vec<Vec<Bar>>,
}

/// Writes each dimension as an array of `[birth, death]`, `null` for infinity.
mod bar_arrays {
    use super::Bar;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(bars: &[Vec<Bar>], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<Vec<(f64, Option<f64>)>> = bars
            .iter()
            .map(|dim| dim.iter().map(|b| (b.birth, b.death)).collect())
            .collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Bar>>, D::Error> {
        let raw: Vec<Vec<(f64, Option<f64>)>> = Vec::deserialize(d)?;
        Ok(raw
            .into_iter()
            .map(|dim| {
                dim.into_iter()
                    .map(|(birth, death)| Bar { birth, death })
                    .collect()
            })
            .collect())
    }
}

impl PersistenceDiagram {
    pub fn dimension(&self, k: usize) -> &[Bar] {
        self.bars.get(k).map_or(&[], Vec::as_slice)
    }

    /// Bars with positive length only.
    pub fn nontrivial(&self, k: usize) -> impl Iterator<Item = &Bar> + '_ {
        self.dimension(k)
            .iter()
            .filter(|b| b.death.is_none_or(|d| d > b.birth))
    }
}

pub fn compute_persistence(filt: &RipsFiltration) -> PersistenceDiagram {
    let pairing = reduce(filt);
    diagram_from_pairing(filt, &pairing)
}

pub fn diagram_from_pairing(filt: &RipsFiltration, pairing: &Pairing) -> PersistenceDiagram {
    let simplices = filt.simplices();
    let mut bars = vec![Vec::new(); filt.max_dim + 1];
    for &(birth, death) in &pairing.pairs {
        let k = simplices[birth].dim();
        if k <= filt.max_dim {
            bars[k].push(Bar {
                birth: simplices[birth].value,
                death: Some(simplices[death].value),
            });
        }
    }
    for &idx in &pairing.essential {
        let k = simplices[idx].dim();
        if k <= filt.max_dim {
            bars[k].push(Bar {
                birth: simplices[idx].value,
                death: None,
            });
        }
    }
    for dim in &mut bars {
        dim.sort_by(|a, b| {
            a.birth.total_cmp(&b.birth).then(match (a.death, b.death) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            })
        });
    }
    PersistenceDiagram {
        max_dim: filt.max_dim,
        max_scale: filt.max_scale,
        bars,
    }
}

/// Betti numbers at `scale`: bars with `birth <= scale < death`.
pub fn betti_at(diag: &PersistenceDiagram, scale: f64) -> Vec<usize> {
    diag.bars
        .iter()
        .map(|dim| dim.iter().filter(|b| b.alive_at(scale)).count())
        .collect()
}

/// Per dimension, the number of bars whose persistence (infinite bars
/// truncated at `max_scale`) exceeds `persistence_ratio * max_scale`.
pub fn persistent_betti_summary(diag: &PersistenceDiagram, persistence_ratio: f64) -> Vec<usize> {
    let threshold = persistence_ratio * diag.max_scale;
    diag.bars
        .iter()
        .map(|dim| {
            dim.iter()
                .filter(|b| b.persistence(diag.max_scale) > threshold)
                .count()
        })
        .collect()
}
