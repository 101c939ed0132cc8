use std::cmp::Ordering;

use crate::cloud::PointCloud;

use super::TopologyError;

/// Simplex budget used by [`build_rips`].
pub const DEFAULT_SIMPLEX_BUDGET: usize = 5_000_000;

/// A simplex with at most four vertices, stored sorted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilteredSimplex {
    vertices: [u32; 4],
    len: u8,
    /// Largest pairwise distance among the vertices.
    pub value: f64,
}

impl FilteredSimplex {
    fn new(vs: &[u32], value: f64) -> Self {
        let mut vertices = [0u32; 4];
        vertices[..vs.len()].copy_from_slice(vs);
        Self {
            vertices,
            len: vs.len() as u8,
            value,
        }
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices[..self.len as usize]
    }

    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    /// Filtration order: value, then dimension, then vertex list.
    pub fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.len.cmp(&other.len))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

pub(crate) fn simplex_key(vs: &[u32]) -> u128 {
    vs.iter()
        .fold(vs.len() as u128, |acc, &v| (acc << 32) | (v as u128 + 1))
}

/// Vietoris-Rips filtration truncated at `max_scale`, holding every simplex
/// of dimension `<= max_dim + 1`.
#[derive(Debug, Clone)]
pub struct RipsFiltration {
    pub max_dim: usize,
    pub max_scale: f64,
    pub num_points: usize,
    simplices: Vec<FilteredSimplex>,
}

impl RipsFiltration {
    pub fn simplices(&self) -> &[FilteredSimplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Number of simplices of each dimension `0..=max_dim + 1`.
    pub fn counts_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dim + 2];
        for s in &self.simplices {
            counts[s.dim()] += 1;
        }
        counts
    }
}

pub fn build_rips(
    cloud: &PointCloud,
    max_dim: usize,
    max_scale: f64,
) -> Result<RipsFiltration, TopologyError> {
    build_rips_with_budget(cloud, max_dim, max_scale, DEFAULT_SIMPLEX_BUDGET)
}

pub fn build_rips_with_budget(
    cloud: &PointCloud,
    max_dim: usize,
    max_scale: f64,
    budget: usize,
) -> Result<RipsFiltration, TopologyError> {
    if max_dim > 2 {
        return Err(TopologyError::InvalidParameter(format!(
            "max_dim must be 0, 1 or 2, got {max_dim}"
        )));
    }
    if !(max_scale.is_finite() && max_scale > 0.0) {
        return Err(TopologyError::InvalidParameter(format!(
            "max_scale must be > 0, got {max_scale}"
        )));
    }
    let n = cloud.len();
    if n == 0 {
        return Err(TopologyError::EmptyCloud);
    }
    if n > u32::MAX as usize {
        return Err(TopologyError::Budget { count: n, budget });
    }

    let dist = DistanceMatrix::new(cloud);
    // neighbors with a larger index, ascending
    let upper: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            (i + 1..n)
                .filter(|&j| dist.get(i, j) <= max_scale)
                .map(|j| j as u32)
                .collect()
        })
        .collect();

    let mut simplices = Vec::new();
    let push = |s: FilteredSimplex, simplices: &mut Vec<FilteredSimplex>| {
        simplices.push(s);
        if simplices.len() > budget {
            return Err(TopologyError::Budget {
                count: simplices.len(),
                budget,
            });
        }
        Ok(())
    };

    let top = max_dim + 1;
    for i in 0..n {
        push(FilteredSimplex::new(&[i as u32], 0.0), &mut simplices)?;
    }
    let mut common_ij = Vec::new();
    let mut common_ijk = Vec::new();
    for i in 0..n {
        let ui = i as u32;
        for (a, &j) in upper[i].iter().enumerate() {
            let dij = dist.get(i, j as usize);
            push(FilteredSimplex::new(&[ui, j], dij), &mut simplices)?;
            if top < 2 {
                continue;
            }
            intersect_sorted(&upper[i][a + 1..], &upper[j as usize], &mut common_ij);
            for (b, &k) in common_ij.iter().enumerate() {
                let dijk = dij
                    .max(dist.get(i, k as usize))
                    .max(dist.get(j as usize, k as usize));
                push(FilteredSimplex::new(&[ui, j, k], dijk), &mut simplices)?;
                if top < 3 {
                    continue;
                }
                intersect_sorted(&common_ij[b + 1..], &upper[k as usize], &mut common_ijk);
                for &l in &common_ijk {
                    let l_us = l as usize;
                    let d = dijk
                        .max(dist.get(i, l_us))
                        .max(dist.get(j as usize, l_us))
                        .max(dist.get(k as usize, l_us));
                    push(FilteredSimplex::new(&[ui, j, k, l], d), &mut simplices)?;
                }
            }
        }
    }
    simplices.sort_unstable_by(FilteredSimplex::filtration_cmp);
    Ok(RipsFiltration {
        max_dim,
        max_scale,
        num_points: n,
        simplices,
    })
}

fn intersect_sorted(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    fn new(cloud: &PointCloud) -> Self {
        let n = cloud.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = cloud.euclidean(i, j);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self { n, data }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}
