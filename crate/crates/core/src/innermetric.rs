//! Inner (geodesic) metric estimates.
//!
//! Graph geodesics on an ε-neighbourhood graph bound `d_inn` from above up
//! to O(fill distance). Projection paths `m([x, y])` give a second,
//! independent upper bound for the inner distance between `m(x)` and `m(y)`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom;
use crate::nearfield::{near_set_auto, ClosestPointMap, SpatialIndex, Thresholds, LAMBDA_FLOOR};
use crate::shapes::SampleCloud;

/// Default projection-path resolution.
pub const DEFAULT_STEPS: usize = 200;
/// Relative length change at which step doubling stops.
pub const STEP_CONVERGENCE: f64 = 1e-3;
const MAX_DOUBLINGS: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    GraphGeodesic,
    ProjectionPath,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEstimate {
    pub length: f64,
    pub vertices: Vec<Vec<f64>>,
    pub kind: PathKind,
    pub endpoints: (Vec<f64>, Vec<f64>),
}

impl PathEstimate {
    fn new(vertices: Vec<Vec<f64>>, kind: PathKind, x: &[f64], y: &[f64]) -> Self {
        PathEstimate {
            length: geom::polyline_length(&vertices),
            vertices,
            kind,
            endpoints: (x.to_vec(), y.to_vec()),
        }
    }

    /// CSV polyline with columns `step,x0..x{n-1}`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let dim = self.endpoints.0.len();
        let mut w = csv::Writer::from_path(path)?;
        let mut header = vec!["step".to_string()];
        header.extend((0..dim).map(|i| format!("x{i}")));
        w.write_record(&header)?;
        for (i, v) in self.vertices.iter().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(v.iter().map(|x| x.to_string()));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Graph on the cloud with an edge between every pair closer than
/// `connect_radius`, weighted by Euclidean length. Adjacency is stored in
/// compressed rows.
#[derive(Debug, Clone)]
pub struct GeodesicGraph {
    cloud_ref: String,
    connect_radius: f64,
    fill_distance: f64,
    index: SpatialIndex,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    component: Vec<usize>,
    component_count: usize,
}

/// Serializable summary of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub cloud_ref: String,
    pub connect_radius: f64,
    pub fill_distance: f64,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub component_count: usize,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl GeodesicGraph {
    /// Smallest admissible connect radius for a cloud: `4 h`.
    pub fn radius_floor(cloud: &SampleCloud) -> f64 {
        4.0 * cloud.fill_distance
    }

    /// Default radius: the floor, raised to `LAMBDA_FLOOR · scale` for exact
    /// (zero fill distance) clouds.
    pub fn default_radius(cloud: &SampleCloud, scale: f64) -> f64 {
        Self::radius_floor(cloud).max(LAMBDA_FLOOR * scale)
    }

    pub fn build(cloud: &SampleCloud, connect_radius: f64) -> Result<Self> {
        let floor = Self::radius_floor(cloud);
        if !(connect_radius > 0.0 && connect_radius >= floor) {
            return Err(Error::RadiusTooSmall {
                radius: connect_radius,
                floor,
            });
        }
        let index = SpatialIndex::build(cloud)?;
        let n = index.len();
        let rows: Vec<Vec<(usize, f64)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let p = index.point(i);
                let mut row: Vec<(usize, f64)> = index
                    .within(p, connect_radius)
                    .into_iter()
                    .filter(|&j| j != i)
                    .map(|j| (j, geom::dist(p, index.point(j))))
                    .filter(|&(_, w)| w > 0.0)
                    .collect();
                row.sort_unstable_by_key(|&(j, _)| j);
                row
            })
            .collect();
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        let mut weights = Vec::new();
        for row in rows {
            for (j, w) in row {
                targets.push(j);
                weights.push(w);
            }
            offsets.push(targets.len());
        }
        let mut graph = GeodesicGraph {
            cloud_ref: index.cloud_ref().to_string(),
            connect_radius,
            fill_distance: cloud.fill_distance,
            index,
            offsets,
            targets,
            weights,
            component: Vec::new(),
            component_count: 0,
        };
        graph.label_components();
        Ok(graph)
    }

    fn label_components(&mut self) {
        let n = self.index.len();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in self.neighbours(u).0 {
                    if comp[v] == usize::MAX {
                        comp[v] = count;
                        queue.push_back(v);
                    }
                }
            }
            count += 1;
        }
        self.component = comp;
        self.component_count = count;
    }

    fn neighbours(&self, u: usize) -> (&[usize], &[f64]) {
        let r = self.offsets[u]..self.offsets[u + 1];
        (&self.targets[r.clone()], &self.weights[r])
    }

    pub fn cloud_ref(&self) -> &str {
        &self.cloud_ref
    }

    pub fn connect_radius(&self) -> f64 {
        self.connect_radius
    }

    pub fn fill_distance(&self) -> f64 {
        self.fill_distance
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn component_of(&self, id: usize) -> usize {
        self.component[id]
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn index(&self) -> &SpatialIndex {
        &self.index
    }

    pub fn point(&self, id: usize) -> &[f64] {
        self.index.point(id)
    }

    pub fn summary(&self) -> GraphSummary {
        GraphSummary {
            cloud_ref: self.cloud_ref.clone(),
            connect_radius: self.connect_radius,
            fill_distance: self.fill_distance,
            vertex_count: self.index.len(),
            edge_count: self.edge_count(),
            component_count: self.component_count,
        }
    }

    /// Nearest cloud point to `x` (ties lexicographic), which must lie
    /// within the fill distance.
    pub fn snap(&self, x: &[f64]) -> Result<usize> {
        let (id, d) = self.index.nearest(x);
        let tolerance = self.fill_distance + 1e-12 * (1.0 + geom::norm(x));
        if d > tolerance {
            return Err(Error::EndpointOffCloud {
                point: x.to_vec(),
                distance: d,
                tolerance,
            });
        }
        Ok(id)
    }

    /// Graph-geodesic estimate of `d_inn(x, y)` between snapped endpoints.
    pub fn inner_distance(&self, x: &[f64], y: &[f64]) -> Result<PathEstimate> {
        let s = self.snap(x)?;
        let t = self.snap(y)?;
        let path = self.shortest_path(s, t)?;
        let vertices = path.into_iter().map(|i| self.point(i).to_vec()).collect();
        Ok(PathEstimate::new(vertices, PathKind::GraphGeodesic, x, y))
    }

    /// Vertex ids of a shortest path from `s` to `t`.
    pub fn shortest_path(&self, s: usize, t: usize) -> Result<Vec<usize>> {
        if self.component[s] != self.component[t] {
            return Err(Error::NoPath(self.component[s], self.component[t]));
        }
        let n = self.index.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[s] = 0.0;
        heap.push(Entry { dist: 0.0, node: s });
        while let Some(Entry { dist: d, node: u }) = heap.pop() {
            if u == t {
                break;
            }
            if d > dist[u] {
                continue;
            }
            let (nb, w) = self.neighbours(u);
            for (&v, &wv) in nb.iter().zip(w) {
                let nd = d + wv;
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = u;
                    heap.push(Entry { dist: nd, node: v });
                }
            }
        }
        let mut path = vec![t];
        let mut cur = t;
        while cur != s {
            cur = pred[cur];
            path.push(cur);
        }
        path.reverse();
        Ok(path)
    }

    /// Graph distances from `source` to each of `targets` (infinite across
    /// components). Stops once every reachable target is settled.
    pub fn distances_to(&self, source: usize, targets: &[usize]) -> Vec<f64> {
        let n = self.index.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut is_target = vec![false; n];
        let mut remaining = 0usize;
        for &t in targets {
            if !is_target[t] && self.component[t] == self.component[source] {
                is_target[t] = true;
                remaining += 1;
            }
        }
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Entry {
            dist: 0.0,
            node: source,
        });
        while let Some(Entry { dist: d, node: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            if is_target[u] {
                is_target[u] = false;
                remaining -= 1;
                if remaining == 0 {
                    break;
                }
            }
            let (nb, w) = self.neighbours(u);
            for (&v, &wv) in nb.iter().zip(w) {
                let nd = d + wv;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Entry { dist: nd, node: v });
                }
            }
        }
        targets.iter().map(|&t| dist[t]).collect()
    }
}

/// Image of the segment `[x, y]` under the closest-point map, as the
/// polyline through near-set centroids at `steps + 1` equally spaced points.
///
/// Fails with the first segment point whose near set is flagged medial.
pub fn project_segment<M: ClosestPointMap + ?Sized>(
    map: &M,
    x: &[f64],
    y: &[f64],
    steps: usize,
    th: &Thresholds,
) -> Result<PathEstimate> {
    assert!(steps >= 1, "project_segment needs at least one step");
    let lambda = th.lambda();
    let reps: Vec<std::result::Result<Vec<f64>, (Vec<f64>, f64)>> = (0..=steps)
        .into_par_iter()
        .map(|i| {
            let a = geom::lerp(x, y, i as f64 / steps as f64);
            let ns = near_set_auto(map, &a, th);
            if ns.spread >= lambda {
                Err((a, ns.spread))
            } else {
                Ok(ns.representative())
            }
        })
        .collect();
    let mut vertices = Vec::with_capacity(reps.len());
    for r in reps {
        match r {
            Ok(v) => vertices.push(v),
            Err((point, spread)) => return Err(Error::MedialCrossing { point, spread }),
        }
    }
    Ok(PathEstimate::new(vertices, PathKind::ProjectionPath, x, y))
}

/// [`project_segment`] starting at `steps` and doubling until the length
/// changes by less than [`STEP_CONVERGENCE`] relative.
pub fn project_segment_adaptive<M: ClosestPointMap + ?Sized>(
    map: &M,
    x: &[f64],
    y: &[f64],
    steps: usize,
    th: &Thresholds,
) -> Result<PathEstimate> {
    let mut steps = steps.max(1);
    let mut prev = project_segment(map, x, y, steps, th)?;
    for _ in 0..MAX_DOUBLINGS {
        steps *= 2;
        let next = project_segment(map, x, y, steps, th)?;
        let change = (next.length - prev.length).abs();
        prev = next;
        if change <= STEP_CONVERGENCE * prev.length.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(prev)
}
