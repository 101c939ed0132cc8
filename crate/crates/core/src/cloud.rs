//! Point clouds and their CSV/JSON file formats.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum CloudError {
    #[error("point cloud needs dimension >= 1")]
    ZeroDimension,
    #[error("point {index} has {found} coordinates, expected {expected}")]
    Ragged {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("point cloud is empty")]
    Empty,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: bad coordinate `{text}`")]
    BadValue { line: usize, text: String },
    #[error("header must be x1,...,xn; found `{0}`")]
    BadHeader(String),
}

/// Where a cloud came from. Written next to the CSV as JSON.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    /// Variety name or input file.
    pub source: String,
    pub sampler: String,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    pub provenance: Provenance,
}

impl PointCloud {
    pub fn new(dim: usize) -> Result<Self, CloudError> {
        if dim == 0 {
            return Err(CloudError::ZeroDimension);
        }
        Ok(Self {
            dim,
            coords: Vec::new(),
            provenance: Provenance::default(),
        })
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self, CloudError> {
        let mut cloud = Self::new(dim)?;
        for (index, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(CloudError::Ragged {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
            cloud.coords.extend_from_slice(p);
        }
        Ok(cloud)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub(crate) fn push(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.dim);
        self.coords.extend_from_slice(p);
    }

    /// Applies `f` to every point. `f` must preserve the dimension.
    pub fn map_points<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let mut out = Self {
            dim: self.dim,
            coords: Vec::with_capacity(self.coords.len()),
            provenance: self.provenance.clone(),
        };
        for p in self.points() {
            let q = f(p);
            assert_eq!(q.len(), self.dim, "map_points changed the dimension");
            out.coords.extend_from_slice(&q);
        }
        out
    }

    pub fn euclidean(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest pairwise distance, 0 for fewer than two points.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                d = d.max(self.euclidean(i, j));
            }
        }
        d
    }

    /// CSV with header `x1,...,xn` and one point per row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), CloudError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record((1..=self.dim).map(|i| format!("x{i}")))?;
        for p in self.points() {
            out.write_record(p.iter().map(|v| format!("{v:?}")))?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, CloudError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(r);
        let headers = reader.headers()?.clone();
        let dim = headers.len();
        let expected: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
        if dim == 0 || headers.iter().ne(expected.iter().map(String::as_str)) {
            return Err(CloudError::BadHeader(
                headers.iter().collect::<Vec<_>>().join(","),
            ));
        }
        let mut cloud = Self::new(dim)?;
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            for field in record.iter() {
                let v: f64 = field.parse().map_err(|_| CloudError::BadValue {
                    line: row + 2,
                    text: field.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(CloudError::BadValue {
                        line: row + 2,
                        text: field.to_string(),
                    });
                }
                cloud.coords.push(v);
            }
        }
        if cloud.is_empty() {
            return Err(CloudError::Empty);
        }
        Ok(cloud)
    }
}
