pub mod cloud;
pub mod fit;
pub mod linalg;
pub mod measure;
pub mod poly;
pub mod rng;
pub mod stats;
pub mod topology;
pub mod variety;

pub use cloud::{PointCloud, Provenance};
pub use fit::{DegreeSelection, FitResult};
pub use measure::{BoundingBox, DensityFn, ProbabilisticPair, QuadratureSpec, ValidationReport};
pub use poly::{BernsteinPoly, MultiPoly, SeriesFamily, SeriesSpec};
pub use stats::CovarianceReport;
pub use topology::{Bar, PersistenceDiagram, RipsFiltration};
pub use variety::{BuiltinVariety, ImplicitVariety};
