//! Numerical laboratory for distance functions, closest-point maps, medial
//! axes and inner (geodesic) metrics of closed subsets of ℝⁿ.
//!
//! The crate is organised bottom-up:
//!
//! * [`shapes`]: analytic test sets (circle, cusp, helices, cone, ...) and
//!   point-cloud ingestion, with samplers and exact closest-point oracles.
//! * [`nearfield`]: an exact k-d tree over a sample cloud, ε-near sets,
//!   the distance gradient `(x - m(x)) / d(x)` and finite-difference
//!   derivatives of the closest-point map along lines.
//! * [`medial`]: medial-axis detection by near-set spread on grids and by
//!   bisection on jumps of the closest-point map.
//! * [`innermetric`]: ε-neighbourhood graphs, shortest-path estimates of the
//!   inner metric, and projection paths `m([x, y])`.
//! * [`probes`]: experiment harnesses (Lipschitz quotients of `m`, local LNE
//!   constants, the medial-approach verdict and the witness-pair probe).
//! * [`runner`]: the JSON-configured experiment runner behind the CLI.

pub mod error;
pub mod geom;
pub mod innermetric;
pub mod medial;
pub mod nearfield;
pub mod probes;
pub mod runner;
pub mod shapes;

pub use error::{Error, Result};
pub use innermetric::{GeodesicGraph, PathEstimate, PathKind};
pub use medial::{GridSpec, MedialMethod, MedialSample, MedialScanReport, ScanParams};
pub use nearfield::{ClosestPointMap, NearSet, SpatialIndex, Thresholds};
pub use probes::Lab;
pub use shapes::{SampleCloud, Shape, ShapeKind, ShapeSpec};
