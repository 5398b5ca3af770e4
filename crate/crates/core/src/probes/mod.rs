//! Experiment harnesses: Lipschitz quotients of the closest-point map,
//! local LNE constants, the medial-approach verdict and the witness-pair
//! probe.

mod conjecture;
mod lipschitz;
mod lne;
mod theorem;

use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::innermetric::GeodesicGraph;
use crate::nearfield::{SpatialIndex, Thresholds};
use crate::shapes::{SampleCloud, Shape, ShapeSpec};

pub use conjecture::{conjecture_at, conjecture_probe, ConjectureOptions, ConjectureTrace};
pub use lipschitz::{lipschitz_quotient, on_set_quotient, LipschitzReport, OnSetReport, ProbeRegion};
pub(crate) use lne::lne_report;
pub use lne::{classify, estimate_lne_verdict, local_lne_constant, LNEReport, LocalConstant, Verdict};
pub use theorem::{verify_theorem, RectifiabilityCheck, TheoremOptions, TheoremVerdict};

/// A shape with its sample cloud, exact index, thresholds and (lazily) its
/// geodesic graph.
#[derive(Debug)]
pub struct Lab {
    pub shape: Shape,
    pub cloud: SampleCloud,
    pub index: SpatialIndex,
    pub thresholds: Thresholds,
    graph: OnceLock<GeodesicGraph>,
}

impl Lab {
    pub fn new(spec: &ShapeSpec, count: usize, seed: u64) -> Result<Self> {
        Self::from_shape(Shape::new(spec)?, count, seed)
    }

    pub fn from_shape(shape: Shape, count: usize, seed: u64) -> Result<Self> {
        let cloud = shape.sample(count, seed)?;
        let index = SpatialIndex::build(&cloud)?;
        let thresholds = Thresholds::new(cloud.fill_distance, shape.scale());
        Ok(Lab {
            shape,
            cloud,
            index,
            thresholds,
            graph: OnceLock::new(),
        })
    }

    pub fn with_thresholds(mut self, thresholds: Thresholds) -> Self {
        self.thresholds = thresholds;
        self
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn fill_distance(&self) -> f64 {
        self.cloud.fill_distance
    }

    /// Builds the graph now at an explicit connect radius.
    pub fn with_connect_radius(self, radius: f64) -> Result<Self> {
        let graph = GeodesicGraph::build(&self.cloud, radius)?;
        Ok(Lab {
            graph: OnceLock::from(graph),
            ..self
        })
    }

    pub fn connect_radius(&self) -> f64 {
        match self.graph.get() {
            Some(g) => g.connect_radius(),
            None => GeodesicGraph::default_radius(&self.cloud, self.shape.scale()),
        }
    }

    /// The ε-neighbourhood graph, built on first use at the default connect
    /// radius unless one was set.
    pub fn graph(&self) -> &GeodesicGraph {
        self.graph.get_or_init(|| {
            GeodesicGraph::build(&self.cloud, self.connect_radius())
                .expect("default connect radius satisfies the floor")
        })
    }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Uniform point in the closed ball `B(center, radius)`, by rejection.
pub(crate) fn uniform_in_ball(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    loop {
        let u: Vec<f64> = center.iter().map(|_| rng.gen_range(-1.0..=1.0)).collect();
        if u.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return center.iter().zip(&u).map(|(c, x)| c + radius * x).collect();
        }
    }
}
