//! Boundary matrix reduction over Z/2.
//!
//! Columns are sparse sorted index lists; adding one column to another is a
//! symmetric difference. Dimensions are processed from the top down so that
//! every pivot row found in dimension `d + 1` clears the corresponding
//! column of dimension `d` (it would reduce to zero anyway).

use rustc_hash::FxHashMap;

use super::rips::{simplex_key, RipsFiltration};

const NONE: u32 = u32::MAX;

/// Index-level persistence pairing of a filtration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Pairing {
    /// `(creator, destroyer)` simplex indices.
    pub pairs: Vec<(usize, usize)>,
    /// Creators never destroyed, in filtration order.
    pub essential: Vec<usize>,
}

pub fn reduce(filt: &RipsFiltration) -> Pairing {
    let simplices = filt.simplices();
    let m = simplices.len();
    let top = filt.max_dim + 1;

    let mut faces = FaceIndex::new(filt.num_points, top);
    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
    for (idx, s) in simplices.iter().enumerate() {
        let d = s.dim();
        if d < top {
            faces.insert(s.vertices(), idx as u32);
        }
        by_dim[d].push(idx as u32);
    }

    let mut pivot_owner = vec![NONE; m];
    let mut reduced: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    let mut cleared = vec![false; m];
    let mut is_destroyer = vec![false; m];
    let mut pairs = Vec::new();

    let mut column = Vec::new();
    let mut scratch = Vec::new();
    let mut face = [0u32; 3];
    for d in (1..=top).rev() {
        for &j in &by_dim[d] {
            if cleared[j as usize] {
                continue;
            }
            let vs = simplices[j as usize].vertices();
            column.clear();
            for skip in 0..vs.len() {
                let mut w = 0;
                for (t, &v) in vs.iter().enumerate() {
                    if t != skip {
                        face[w] = v;
                        w += 1;
                    }
                }
                column.push(faces.get(&face[..w]));
            }
            column.sort_unstable();

            while let Some(&pivot) = column.last() {
                let owner = pivot_owner[pivot as usize];
                if owner == NONE {
                    break;
                }
                symmetric_difference(&column, &reduced[&owner], &mut scratch);
                std::mem::swap(&mut column, &mut scratch);
            }
            if let Some(&pivot) = column.last() {
                pivot_owner[pivot as usize] = j;
                cleared[pivot as usize] = true;
                is_destroyer[j as usize] = true;
                pairs.push((pivot as usize, j as usize));
                reduced.insert(j, column.clone());
            }
        }
    }

    let mut essential = Vec::new();
    for idx in 0..m {
        let creator = !is_destroyer[idx];
        if creator && pivot_owner[idx] == NONE && simplices[idx].dim() < top {
            essential.push(idx);
        }
    }
    pairs.sort_unstable();
    Pairing { pairs, essential }
}

/// Simplex index lookup by vertex list. Vertices and (for small clouds)
/// edges use dense tables, everything else a hash map.
struct FaceIndex {
    n: usize,
    edges: Vec<u32>,
    edge_map: FxHashMap<u128, u32>,
    higher: FxHashMap<u128, u32>,
}

const DENSE_EDGE_LIMIT: usize = 8192;

impl FaceIndex {
    fn new(n: usize, top: usize) -> Self {
        let dense = top >= 2 && n <= DENSE_EDGE_LIMIT;
        Self {
            n,
            edges: if dense { vec![NONE; n * n] } else { Vec::new() },
            edge_map: FxHashMap::default(),
            higher: FxHashMap::default(),
        }
    }

    fn insert(&mut self, vs: &[u32], idx: u32) {
        match vs.len() {
            1 => {}
            2 if !self.edges.is_empty() => {
                self.edges[vs[0] as usize * self.n + vs[1] as usize] = idx
            }
            2 => {
                self.edge_map.insert(simplex_key(vs), idx);
            }
            _ => {
                self.higher.insert(simplex_key(vs), idx);
            }
        }
    }

    /// Vertices come first in filtration order, so vertex `v` has index `v`.
    fn get(&self, vs: &[u32]) -> u32 {
        let found = match vs.len() {
            1 => Some(vs[0]),
            2 if !self.edges.is_empty() => {
                Some(self.edges[vs[0] as usize * self.n + vs[1] as usize])
            }
            2 => self.edge_map.get(&simplex_key(vs)).copied(),
            _ => self.higher.get(&simplex_key(vs)).copied(),
        };
        match found {
            Some(idx) if idx != NONE => idx,
            _ => panic!("faces of a Rips simplex are in the filtration"),
        }
    }
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}
