//! Medial-axis detection.
//!
//! Two detectors are provided. The grid detector flags nodes whose near set
//! has spread at least λ. The jump detector brackets discontinuities of a
//! single-valued selection of the closest-point map along segments and
//! bisects them down to a tolerance.
//!
//! Both report medial *samples*: points within a known tolerance of the
//! medial set, never certified members of it.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom;
use crate::nearfield::{near_set_auto, ClosestPointMap, Thresholds};

/// Bisection budget for jump refinement.
pub const MAX_BISECTIONS: u32 = 200;
/// Recursion depth when a scanned grid edge carries several jumps.
/// Share of a segment's selection change that one half must carry for the
/// segment to be split further.
const JUMP_DOMINANCE: f64 = 0.75;
const MAX_SPLIT_DEPTH: u32 = 8;

/// Axis-aligned box sampled by a tensor grid.
///
/// Nodes along axis `k` are `lo[k] + (hi[k] - lo[k]) i / (res[k] - 1)`,
/// evaluated so that the centre node of an odd grid over a box symmetric
/// about 0 is exactly 0. A lattice grid instead places nodes at exact
/// integer multiples of `lattice`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<f64>,
}

impl GridSpec {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        let g = GridSpec {
            lo,
            hi,
            resolution,
            lattice: None,
        };
        g.validate()?;
        Ok(g)
    }

    /// Same resolution along every axis.
    pub fn uniform(lo: Vec<f64>, hi: Vec<f64>, resolution: usize) -> Result<Self> {
        let n = lo.len();
        Self::new(lo, hi, vec![resolution; n])
    }

    /// Smallest lattice-aligned grid with spacing `step` covering the cube
    /// of half-width `half_width` around `center`.
    pub fn lattice(center: &[f64], half_width: f64, step: f64) -> Result<Self> {
        if !(step > 0.0 && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "lattice step {step} and half-width {half_width} must be positive"
            )));
        }
        let mut lo = Vec::with_capacity(center.len());
        let mut hi = Vec::with_capacity(center.len());
        let mut res = Vec::with_capacity(center.len());
        for &c in center {
            let k0 = ((c - half_width) / step).floor();
            let k1 = ((c + half_width) / step).ceil();
            lo.push(k0 * step);
            hi.push(k1 * step);
            res.push((k1 - k0) as usize + 1);
        }
        let g = GridSpec {
            lo,
            hi,
            resolution: res,
            lattice: Some(step),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.lo.len();
        if n == 0 || self.hi.len() != n || self.resolution.len() != n {
            return Err(Error::InvalidGrid(format!(
                "box corners and resolution must share one nonzero dimension (lo {}, hi {}, resolution {})",
                n,
                self.hi.len(),
                self.resolution.len()
            )));
        }
        for k in 0..n {
            if !(self.lo[k].is_finite() && self.hi[k].is_finite() && self.lo[k] < self.hi[k]) {
                return Err(Error::InvalidGrid(format!(
                    "axis {k}: need lo < hi, got [{}, {}]",
                    self.lo[k], self.hi[k]
                )));
            }
            if self.resolution[k] < 2 {
                return Err(Error::InvalidGrid(format!(
                    "axis {k}: resolution {} < 2",
                    self.resolution[k]
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn node_count(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn step(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]) / (self.resolution[axis] - 1) as f64
    }

    pub fn max_step(&self) -> f64 {
        (0..self.dim()).map(|k| self.step(k)).fold(0.0, f64::max)
    }

    /// Length of a grid cell diagonal.
    pub fn cell_diagonal(&self) -> f64 {
        (0..self.dim()).map(|k| self.step(k).powi(2)).sum::<f64>().sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && (0..self.dim()).all(|k| x[k] >= self.lo[k] && x[k] <= self.hi[k])
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        let n = self.resolution[axis] - 1;
        match self.lattice {
            Some(s) => ((self.lo[axis] / s).round() + i as f64) * s,
            None => (self.lo[axis] * (n - i) as f64 + self.hi[axis] * i as f64) / n as f64,
        }
    }

    /// Multi-index of node `flat` (axis 0 varies fastest).
    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        self.resolution
            .iter()
            .map(|&r| {
                let i = flat % r;
                flat /= r;
                i
            })
            .collect()
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .enumerate()
            .map(|(k, i)| self.coord(k, i))
            .collect()
    }

    /// Flat index of the neighbour one step up along `axis`, if any.
    fn up_neighbour(&self, flat: usize, axis: usize) -> Option<usize> {
        let idx = self.multi_index(flat);
        if idx[axis] + 1 >= self.resolution[axis] {
            return None;
        }
        let stride: usize = self.resolution[..axis].iter().product();
        Some(flat + stride)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MedialMethod {
    GridSpread,
    JumpBisection,
}

impl MedialMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MedialMethod::GridSpread => "grid_spread",
            MedialMethod::JumpBisection => "jump_bisection",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedialSample {
    pub location: Vec<f64>,
    pub spread: f64,
    pub witnesses: [Vec<f64>; 2],
    pub method: MedialMethod,
    /// Final bracket length (0 for grid samples and exact medial midpoints).
    pub bracket: f64,
    pub iterations: u32,
}

/// Outcome of a single medial test.
#[derive(Debug, Clone, PartialEq)]
pub struct MedialFlag {
    pub flag: bool,
    pub spread: f64,
    pub witnesses: [Vec<f64>; 2],
}

/// `spread(near_set(a, ε)) ≥ λ`, with the farthest member pair as witnesses.
pub fn is_medial<M: ClosestPointMap + ?Sized>(map: &M, a: &[f64], epsilon: f64, lambda: f64) -> MedialFlag {
    flag_of(map.near_set(a, epsilon), lambda)
}

/// [`is_medial`] with the adaptive slack and threshold of `th`.
pub fn is_medial_auto<M: ClosestPointMap + ?Sized>(map: &M, a: &[f64], th: &Thresholds) -> MedialFlag {
    flag_of(near_set_auto(map, a, th), th.lambda())
}

fn flag_of(ns: crate::nearfield::NearSet, lambda: f64) -> MedialFlag {
    let (p, q) = ns.witness_pair();
    MedialFlag {
        flag: ns.spread >= lambda,
        spread: ns.spread,
        witnesses: [p.to_vec(), q.to_vec()],
    }
}

/// Scan configuration. `epsilon` and `lambda` override the adaptive values
/// of `thresholds` when set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub thresholds: Thresholds,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Also bisect grid edges across which the selection of `m` jumps.
    #[serde(default)]
    pub jumps: bool,
    #[serde(default = "default_jump_tol")]
    pub jump_tol: f64,
    /// Named points whose distance to the nearest medial sample is reported.
    #[serde(default)]
    pub probes: BTreeMap<String, Vec<f64>>,
}

fn default_jump_tol() -> f64 {
    1e-6
}

impl ScanParams {
    pub fn new(thresholds: Thresholds) -> Self {
        ScanParams {
            thresholds,
            epsilon: None,
            lambda: None,
            jumps: false,
            jump_tol: default_jump_tol(),
            probes: BTreeMap::new(),
        }
    }

    pub fn with_jumps(mut self, tol: f64) -> Self {
        self.jumps = true;
        self.jump_tol = tol;
        self
    }

    pub fn with_probe(mut self, name: &str, point: Vec<f64>) -> Self {
        self.probes.insert(name.to_string(), point);
        self
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or_else(|| self.thresholds.lambda())
    }

    fn flag<M: ClosestPointMap + ?Sized>(&self, map: &M, a: &[f64]) -> MedialFlag {
        let lambda = self.lambda();
        match self.epsilon {
            Some(eps) => is_medial(map, a, eps, lambda),
            None => flag_of(near_set_auto(map, a, &self.thresholds), lambda),
        }
    }
}

/// Per-node scan record.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub location: Vec<f64>,
    pub spread: f64,
    pub flag: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedialScanReport {
    pub grid_spec: GridSpec,
    pub lambda: f64,
    pub epsilon: Option<f64>,
    pub thresholds: Thresholds,
    pub samples: Vec<MedialSample>,
    /// Probe name to distance of the nearest medial sample (`None` if no samples).
    pub min_distance_to: BTreeMap<String, Option<f64>>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub nodes: Vec<NodeRecord>,
}

impl MedialScanReport {
    pub fn flagged_count(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.method == MedialMethod::GridSpread)
            .count()
    }

    /// Distance from `x` to the nearest medial sample.
    pub fn distance_to_medial(&self, x: &[f64]) -> Option<f64> {
        self.samples
            .iter()
            .map(|s| geom::dist(&s.location, x))
            .min_by(f64::total_cmp)
    }

    /// CSV with columns `x0..x{n-1},spread,flag,method`: one row per grid
    /// node, then one row per jump sample.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let dim = self.grid_spec.dim();
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
        header.extend(["spread", "flag", "method"].map(String::from));
        w.write_record(&header)?;
        let mut row = |loc: &[f64], spread: f64, flag: bool, method: MedialMethod| -> Result<()> {
            let mut r: Vec<String> = loc.iter().map(|x| x.to_string()).collect();
            r.push(spread.to_string());
            r.push(u8::from(flag).to_string());
            r.push(method.as_str().to_string());
            w.write_record(&r)?;
            Ok(())
        };
        for n in &self.nodes {
            row(&n.location, n.spread, n.flag, MedialMethod::GridSpread)?;
        }
        for s in self.samples.iter().filter(|s| s.method == MedialMethod::JumpBisection) {
            row(&s.location, s.spread, true, s.method)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Evaluates the medial test at every grid node and, if requested, bisects
/// every grid edge across which the selection of `m` jumps by at least λ.
pub fn scan_medial<M: ClosestPointMap + ?Sized>(
    map: &M,
    grid: &GridSpec,
    params: &ScanParams,
) -> Result<MedialScanReport> {
    grid.validate()?;
    if grid.dim() != map.dim() {
        return Err(Error::Dimension {
            expected: map.dim(),
            got: grid.dim(),
        });
    }
    let lambda = params.lambda();
    let mut warnings = Vec::new();
    let h = params.thresholds.fill_distance;
    if grid.max_step() > lambda && h > 0.0 {
        let msg = format!(
            "grid step {:.3e} exceeds the medial threshold {:.3e}; medial features thinner than a step may be missed",
            grid.max_step(),
            lambda
        );
        log::debug!("{msg}");
        warnings.push(msg);
    }

    let nodes: Vec<(NodeRecord, [Vec<f64>; 2])> = (0..grid.node_count())
        .into_par_iter()
        .map(|i| {
            let x = grid.node(i);
            let f = params.flag(map, &x);
            (
                NodeRecord {
                    location: x,
                    spread: f.spread,
                    flag: f.flag,
                },
                f.witnesses,
            )
        })
        .collect();

    let mut samples: Vec<MedialSample> = nodes
        .iter()
        .filter(|(n, _)| n.flag)
        .map(|(n, w)| MedialSample {
            location: n.location.clone(),
            spread: n.spread,
            witnesses: w.clone(),
            method: MedialMethod::GridSpread,
            bracket: 0.0,
            iterations: 0,
        })
        .collect();

    if params.jumps {
        let selections: Vec<Vec<f64>> = nodes
            .par_iter()
            .map(|(n, _)| map.select(&n.location))
            .collect();
        let edges: Vec<(usize, usize)> = (0..grid.node_count())
            .flat_map(|i| (0..grid.dim()).filter_map(move |k| grid.up_neighbour(i, k).map(|j| (i, j))))
            .filter(|&(i, j)| {
                !nodes[i].0.flag
                    && !nodes[j].0.flag
                    && geom::dist(&selections[i], &selections[j]) >= lambda
            })
            .collect();
        let found: Vec<Vec<MedialSample>> = edges
            .par_iter()
            .map(|&(i, j)| {
                let mut out = Vec::new();
                refine_edge(map, &nodes[i].0.location, &nodes[j].0.location, params.jump_tol, lambda, 0, &mut out);
                out
            })
            .collect();
        samples.extend(found.into_iter().flatten());
    }

    let min_distance_to = params
        .probes
        .iter()
        .map(|(name, p)| {
            let d = samples
                .iter()
                .map(|s| geom::dist(&s.location, p))
                .min_by(f64::total_cmp);
            (name.clone(), d)
        })
        .collect();

    Ok(MedialScanReport {
        grid_spec: grid.clone(),
        lambda,
        epsilon: params.epsilon,
        thresholds: params.thresholds,
        samples,
        min_distance_to,
        warnings,
        nodes: nodes.into_iter().map(|(n, _)| n).collect(),
    })
}

fn refine_edge<M: ClosestPointMap + ?Sized>(
    map: &M,
    u: &[f64],
    v: &[f64],
    tol: f64,
    lambda: f64,
    depth: u32,
    out: &mut Vec<MedialSample>,
) {
    match refine_jump(map, u, v, tol, lambda) {
        Ok(s) => out.push(s),
        Err(Error::MultipleJumps { u: a, v: b }) if depth < MAX_SPLIT_DEPTH => {
            let mid = geom::lerp(&a, &b, 0.5);
            for (x, y) in [(&a, &mid), (&mid, &b)] {
                if jump_like(map, x, y, lambda) {
                    refine_edge(map, x, y, tol, lambda, depth + 1, out);
                }
            }
        }
        Err(_) => {}
    }
}

/// A discontinuity of `m` in `[u, v]` keeps most of the selection change in
/// one half of the segment; a continuous `m` splits it roughly evenly.
fn jump_like<M: ClosestPointMap + ?Sized>(map: &M, u: &[f64], v: &[f64], lambda: f64) -> bool {
    let (mu, mv) = (map.select(u), map.select(v));
    let total = geom::dist(&mu, &mv);
    if total < lambda {
        return false;
    }
    let mm = map.select(&geom::lerp(u, v, 0.5));
    geom::dist(&mu, &mm).max(geom::dist(&mm, &mv)) >= JUMP_DOMINANCE * total
}

/// Bisects `[u, v]` keeping a jump of the selection of `m` bracketed until
/// the bracket is no longer than `tol`.
///
/// The selection is [`ClosestPointMap::select`]. A midpoint where both
/// halves carry a jump and whose near set is itself multi-valued is
/// returned directly as an exact medial point. Otherwise a double jump is an
/// error: the segment meets the medial set more than once.
pub fn refine_jump<M: ClosestPointMap + ?Sized>(
    map: &M,
    u: &[f64],
    v: &[f64],
    tol: f64,
    lambda: f64,
) -> Result<MedialSample> {
    assert!(tol > 0.0, "bisection tolerance must be positive");
    let mut a = u.to_vec();
    let mut b = v.to_vec();
    let mut ma = map.select(&a);
    let mut mb = map.select(&b);
    let jump = geom::dist(&ma, &mb);
    if jump < lambda {
        return Err(Error::NoJump { jump, lambda });
    }
    let mut iterations = 0;
    while geom::dist(&a, &b) > tol {
        if iterations >= MAX_BISECTIONS {
            break;
        }
        iterations += 1;
        let mid = geom::lerp(&a, &b, 0.5);
        let mm = map.select(&mid);
        let left = geom::dist(&ma, &mm);
        let right = geom::dist(&mm, &mb);
        match (left >= lambda, right >= lambda) {
            (true, true) => {
                let ns = map.near_set(&mid, 0.0);
                if ns.spread >= lambda {
                    let (p, q) = ns.witness_pair();
                    return Ok(MedialSample {
                        location: mid,
                        spread: ns.spread,
                        witnesses: [p.to_vec(), q.to_vec()],
                        method: MedialMethod::JumpBisection,
                        bracket: 0.0,
                        iterations,
                    });
                }
                return Err(Error::MultipleJumps { u: a, v: b });
            }
            (true, false) => {
                b = mid;
                mb = mm;
            }
            (false, true) => {
                a = mid;
                ma = mm;
            }
            (false, false) => {
                return Err(Error::NoJump {
                    jump: left.max(right),
                    lambda,
                })
            }
        }
    }
    Ok(MedialSample {
        location: geom::lerp(&a, &b, 0.5),
        spread: geom::dist(&ma, &mb),
        bracket: geom::dist(&a, &b),
        witnesses: [ma, mb],
        method: MedialMethod::JumpBisection,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nearfield::SpatialIndex;
    use crate::shapes::{Shape, ShapeSpec};

    fn setup(spec: ShapeSpec, n: usize) -> (SpatialIndex, Thresholds) {
        let shape = Shape::new(&spec).unwrap();
        let cloud = shape.sample(n, 3).unwrap();
        let th = Thresholds::new(cloud.fill_distance, shape.scale());
        (SpatialIndex::build(&cloud).unwrap(), th)
    }

    #[test]
    fn grid_nodes_are_symmetric() {
        let g = GridSpec::uniform(vec![-0.5, -0.5], vec![0.5, 0.5], 101).unwrap();
        assert_eq!(g.node(50 + 101 * 50), vec![0.0, 0.0]);
        assert_eq!(g.node(0), vec![-0.5, -0.5]);
        assert_eq!(g.node(g.node_count() - 1), vec![0.5, 0.5]);
        let l = GridSpec::lattice(&[0.37, -0.2], 0.1, 0.05).unwrap();
        assert_eq!(l.resolution[0], 6);
        assert!((0..l.node_count()).all(|i| l.node(i).iter().all(|x| (x / 0.05 - (x / 0.05).round()).abs() < 1e-9)));
        let z = GridSpec::lattice(&[0.01, 0.0], 0.1, 0.03).unwrap();
        assert!((0..z.node_count()).any(|i| z.node(i) == vec![0.0, 0.0]));
    }

    #[test]
    fn invalid_grids_are_rejected() {
        assert!(GridSpec::uniform(vec![0.0], vec![0.0], 3).is_err());
        assert!(GridSpec::uniform(vec![0.0], vec![1.0], 1).is_err());
        assert!(GridSpec::new(vec![0.0, 0.0], vec![1.0], vec![3, 3]).is_err());
    }

    #[test]
    fn is_medial_examples() {
        let (tp, _) = setup(ShapeSpec::two_points([-1.0, 0.0], [1.0, 0.0]), 2);
        let f = is_medial(&tp, &[0.0, 0.5], 1e-12, 1e-9);
        assert!(f.flag);
        assert_eq!(f.spread, 2.0);
        assert_eq!(f.witnesses, [vec![-1.0, 0.0], vec![1.0, 0.0]]);

        let (circle, th) = setup(ShapeSpec::circle(1.0), 1000);
        assert!(!is_medial_auto(&circle, &[0.5, 0.0], &th).flag);

        let (cone, th) = setup(ShapeSpec::cone(2.0), 40_000);
        let f = is_medial_auto(&cone, &[0.0, 0.0, 1.0], &th);
        assert!(f.flag && (f.spread - 1.0).abs() < 4.0 * th.fill_distance);
    }

    #[test]
    fn two_points_scan_hugs_bisector() {
        let (index, th) = setup(ShapeSpec::two_points([-1.0, 0.0], [1.0, 0.0]), 2);
        let g = GridSpec::uniform(vec![-1.0, -1.0], vec![1.0, 1.0], 101).unwrap();
        let params = ScanParams::new(th).with_probe("origin", vec![0.0, 0.0]);
        let r = scan_medial(&index, &g, &params).unwrap();
        assert_eq!(r.flagged_count(), 101);
        assert!(r.samples.iter().all(|s| s.location[0].abs() <= g.step(0)));
        assert_eq!(r.min_distance_to["origin"], Some(0.0));
    }

    #[test]
    fn refine_jump_examples() {
        let (tp, th) = setup(ShapeSpec::two_points([-1.0, 0.0], [1.0, 0.0]), 2);
        let s = refine_jump(&tp, &[-0.7, 0.3], &[0.8, 0.3], 1e-6, th.lambda()).unwrap();
        assert!(geom::dist(&s.location, &[0.0, 0.3]) <= 1e-6);
        assert!(s.bracket <= 1e-6);
        assert!(s.iterations <= (1.5f64 / 1e-6).log2().ceil() as u32);

        let (circle, th) = setup(ShapeSpec::circle(1.0), 1000);
        let s = refine_jump(&circle, &[-0.5, -0.2], &[0.5, 0.2], 1e-6, th.lambda()).unwrap();
        assert!(geom::norm(&s.location) <= 1e-6);

        let (cusp, th) = setup(ShapeSpec::cusp(1.0), 2001);
        let s = refine_jump(&cusp, &[0.3, 0.25], &[0.3, -0.25], 1e-6, th.lambda()).unwrap();
        assert!(geom::dist(&s.location, &[0.3, 0.0]) <= 1e-6);
    }

    #[test]
    fn refine_jump_errors() {
        let (tp, th) = setup(ShapeSpec::two_points([-1.0, 0.0], [1.0, 0.0]), 2);
        assert!(matches!(
            refine_jump(&tp, &[0.2, 0.0], &[0.9, 1.0], 1e-6, th.lambda()),
            Err(Error::NoJump { .. })
        ));
        // Three points on a line: a segment crossing both bisectors.
        let idx = SpatialIndex::from_points(&[vec![-1.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            refine_jump(&idx, &[-0.9, 1.0], &[0.8, 1.0], 1e-6, 1e-9),
            Err(Error::MultipleJumps { .. })
        ));
    }

    #[test]
    fn jump_scan_finds_bisector_between_nodes() {
        let (index, th) = setup(ShapeSpec::two_points([-1.0, 0.0], [1.0, 0.0]), 2);
        // Even resolution: no node lies on x = 0.
        let g = GridSpec::uniform(vec![-1.0, -1.0], vec![1.0, 1.0], 20).unwrap();
        let r = scan_medial(&index, &g, &ScanParams::new(th).with_jumps(1e-6)).unwrap();
        assert_eq!(r.flagged_count(), 0);
        assert_eq!(r.samples.len(), 20);
        assert!(r.samples.iter().all(|s| s.location[0].abs() <= 1e-6));
    }

    #[test]
    fn scan_csv_columns() {
        let (index, th) = setup(ShapeSpec::circle(1.0), 500);
        let g = GridSpec::uniform(vec![-0.5, -0.5], vec![0.5, 0.5], 5).unwrap();
        let r = scan_medial(&index, &g, &ScanParams::new(th)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("scan.csv");
        r.write_csv(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("x0,x1,spread,flag,method\n"));
        assert_eq!(text.lines().count(), 26);
    }
}
