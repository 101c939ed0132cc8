//! Simplicial homology over Z/2 of Rips complexes by dense Gaussian elimination.

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Every vertex subset of size `1..=max_size` with diameter `<= scale`,
/// found by enumerating all subsets.
pub fn rips_subsets(points: &[Vec<f64>], scale: f64, max_size: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        points: &[Vec<f64>],
        scale: f64,
        max_size: usize,
        start: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        for v in start..points.len() {
            if current
                .iter()
                .all(|&u| dist(&points[u], &points[v]) <= scale)
            {
                current.push(v);
                out.push(current.clone());
                if current.len() < max_size {
                    rec(points, scale, max_size, v + 1, current, out);
                }
                current.pop();
            }
        }
    }
    if n > 0 && max_size > 0 {
        rec(points, scale, max_size, 0, &mut current, &mut out);
    }
    out
}

/// Rank over Z/2 of a matrix given as rows of bits.
pub fn rank_z2(mut rows: Vec<Vec<bool>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[col] {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= *y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Boundary matrix from `k`-simplices to `(k-1)`-simplices, one row per face.
fn boundary(faces: &[Vec<usize>], cells: &[Vec<usize>]) -> Vec<Vec<bool>> {
    let mut rows = vec![vec![false; cells.len()]; faces.len()];
    for (j, cell) in cells.iter().enumerate() {
        for skip in 0..cell.len() {
            let face: Vec<usize> = cell
                .iter()
                .enumerate()
                .filter(|&(t, _)| t != skip)
                .map(|(_, &v)| v)
                .collect();
            let i = faces
                .iter()
                .position(|f| *f == face)
                .expect("closed complex");
            rows[i][j] = true;
        }
    }
    rows
}

/// Betti numbers `b_0..=b_max_dim` of the Rips complex at `scale`,
/// computed as `dim C_k - rank d_k - rank d_{k+1}`.
pub fn rips_betti(points: &[Vec<f64>], scale: f64, max_dim: usize) -> Vec<usize> {
    let all = rips_subsets(points, scale, max_dim + 2);
    let by_dim: Vec<Vec<Vec<usize>>> = (0..=max_dim + 1)
        .map(|k| all.iter().filter(|s| s.len() == k + 1).cloned().collect())
        .collect();
    let ranks: Vec<usize> = (0..=max_dim + 1)
        .map(|k| {
            if k == 0 || by_dim[k].is_empty() {
                0
            } else {
                rank_z2(boundary(&by_dim[k - 1], &by_dim[k]))
            }
        })
        .collect();
    (0..=max_dim)
        .map(|k| by_dim[k].len() - ranks[k] - ranks[k + 1])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_homology() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        assert_eq!(rips_betti(&pts, 0.5, 1), vec![4, 0]);
        assert_eq!(rips_betti(&pts, 1.0, 1), vec![1, 1]);
        assert_eq!(rips_betti(&pts, 1.5, 1), vec![1, 0]);
    }

    #[test]
    fn octahedron_is_a_sphere() {
        let mut pts = Vec::new();
        for axis in 0..3 {
            for s in [-1.0, 1.0] {
                let mut p = vec![0.0; 3];
                p[axis] = s;
                pts.push(p);
            }
        }
        assert_eq!(rips_betti(&pts, 1.5, 2), vec![1, 0, 1]);
    }

    #[test]
    fn subset_count() {
        let pts: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64]).collect();
        // 5 vertices, 4 unit edges, no triangles at scale 1
        assert_eq!(rips_subsets(&pts, 1.0, 3).len(), 9);
        // all 5 + 10 + 10 at scale 10
        assert_eq!(rips_subsets(&pts, 10.0, 3).len(), 25);
    }
}
