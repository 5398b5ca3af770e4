//! Distance function, closest-point multifunction and distance gradient.
//!
//! The closest-point map `m` is evaluated numerically as an ε-near set: all
//! cloud points within `d(a) + ε` of the query. The set is treated as a
//! single closest point when its spread (diameter) stays below the medial
//! threshold λ, in which case its centroid represents `m(a)`.

mod kdtree;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom;
use crate::shapes::Shape;

pub use kdtree::SpatialIndex;

/// Relative floor on ε (times the shape scale); absorbs float roundoff in ties.
pub const EPSILON_FLOOR: f64 = 1e-12;
/// Relative floor on λ (times the shape scale), used when the fill distance is 0.
pub const LAMBDA_FLOOR: f64 = 1e-9;

/// Sampling-resolution-derived tolerances for near sets and medial flags.
///
/// The near-set slack is `ε(a) = min(cap · h, c · h² / d(a))`, floored at
/// `EPSILON_FLOOR · scale`, where `h` is the fill distance. The curvature
/// term is the largest excess distance a sample within `h` of a true
/// minimiser can carry, scaled by `c`; it keeps the near set of a regular
/// point tight while still catching mirror-symmetric minimisers exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub fill_distance: f64,
    pub scale: f64,
    pub epsilon_cap_factor: f64,
    pub epsilon_curvature: f64,
    pub lambda_factor: f64,
}

impl Thresholds {
    pub fn new(fill_distance: f64, scale: f64) -> Self {
        Thresholds {
            fill_distance,
            scale,
            epsilon_cap_factor: 2.0,
            epsilon_curvature: 0.125,
            lambda_factor: 10.0,
        }
    }

    /// Thresholds for exact oracles (zero fill distance).
    pub fn exact(scale: f64) -> Self {
        Self::new(0.0, scale)
    }

    pub fn lambda(&self) -> f64 {
        (self.lambda_factor * self.fill_distance).max(LAMBDA_FLOOR * self.scale)
    }

    pub fn epsilon_cap(&self) -> f64 {
        self.epsilon_cap_factor * self.fill_distance
    }

    /// Near-set slack at a query whose distance to the set is `d`.
    pub fn epsilon_at(&self, d: f64) -> f64 {
        let h = self.fill_distance;
        let curv = if d > 0.0 {
            self.epsilon_curvature * h * h / d
        } else {
            f64::INFINITY
        };
        curv.min(self.epsilon_cap()).max(EPSILON_FLOOR * self.scale)
    }

    /// Floor on pair separations for quotient estimates: `4 h`.
    pub fn pair_floor(&self) -> f64 {
        4.0 * self.fill_distance
    }
}

/// Result of a closest-point query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearSet {
    /// `d(a, X)`.
    pub distance: f64,
    pub epsilon: f64,
    /// Lexicographically sorted.
    pub members: Vec<Vec<f64>>,
    /// Maximum pairwise distance among members.
    pub spread: f64,
    /// Indices into `members` of a pair achieving `spread`.
    pub witnesses: (usize, usize),
    /// Members are a finite representation of a continuum of minimisers.
    #[serde(default)]
    pub continuum: bool,
}

impl NearSet {
    pub fn new(distance: f64, epsilon: f64, mut members: Vec<Vec<f64>>, continuum: bool) -> Self {
        members.sort_by(|a, b| geom::lex_cmp(a, b));
        let (i, j, spread) = geom::farthest_pair(&members).unwrap_or((0, 0, 0.0));
        let witnesses = if i <= j { (i, j) } else { (j, i) };
        NearSet {
            distance,
            epsilon,
            members,
            spread,
            witnesses,
            continuum,
        }
    }

    pub(crate) fn exact(distance: f64, members: Vec<Vec<f64>>, continuum: bool) -> Self {
        Self::new(distance, 0.0, members, continuum)
    }

    /// Centroid of the members.
    pub fn representative(&self) -> Vec<f64> {
        let dim = self.members.first().map_or(0, Vec::len);
        geom::centroid(self.members.iter().map(Vec::as_slice), dim)
    }

    pub fn witness_pair(&self) -> (&[f64], &[f64]) {
        (&self.members[self.witnesses.0], &self.members[self.witnesses.1])
    }
}

/// Anything that can answer closest-point queries: a cloud index or an
/// exact shape oracle.
pub trait ClosestPointMap: Sync {
    fn dim(&self) -> usize;

    fn distance(&self, a: &[f64]) -> f64;

    /// All (approximate) minimisers within `distance(a) + epsilon`.
    fn near_set(&self, a: &[f64], epsilon: f64) -> NearSet;

    /// A single-valued selection of `m`.
    fn select(&self, a: &[f64]) -> Vec<f64>;
}

impl ClosestPointMap for SpatialIndex {
    fn dim(&self) -> usize {
        SpatialIndex::dim(self)
    }

    fn distance(&self, a: &[f64]) -> f64 {
        self.nearest_dist2(a).sqrt()
    }

    fn near_set(&self, a: &[f64], epsilon: f64) -> NearSet {
        let d2 = self.nearest_dist2(a);
        let d = d2.sqrt();
        // Squared radius; the exact minimum is always admitted.
        let r2 = if epsilon > 0.0 { (d + epsilon).powi(2).max(d2) } else { d2 };
        let members = self
            .within_sq(a, r2)
            .into_iter()
            .map(|id| self.point(id).to_vec())
            .collect();
        NearSet::new(d, epsilon, members, false)
    }

    /// Nearest cloud point, ties broken lexicographically.
    fn select(&self, a: &[f64]) -> Vec<f64> {
        self.point(self.nearest(a).0).to_vec()
    }
}

/// Exact closest-point oracle of an analytic shape.
#[derive(Debug, Clone, Copy)]
pub struct ExactField<'a> {
    shape: &'a Shape,
}

impl<'a> ExactField<'a> {
    pub fn new(shape: &'a Shape) -> Result<Self> {
        if shape.geometry_points().is_some() {
            return Err(Error::OracleUnavailable("point_cloud"));
        }
        Ok(ExactField { shape })
    }

    pub fn shape(&self) -> &Shape {
        self.shape
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds::exact(self.shape.scale())
    }
}

impl ClosestPointMap for ExactField<'_> {
    fn dim(&self) -> usize {
        self.shape.dim()
    }

    fn distance(&self, a: &[f64]) -> f64 {
        self.near_set(a, 0.0).distance
    }

    fn near_set(&self, a: &[f64], _epsilon: f64) -> NearSet {
        self.shape
            .exact_nearest(a)
            .expect("exact oracle availability checked at construction")
    }

    fn select(&self, a: &[f64]) -> Vec<f64> {
        self.near_set(a, 0.0).members.swap_remove(0)
    }
}

pub fn distance<M: ClosestPointMap + ?Sized>(map: &M, a: &[f64]) -> f64 {
    map.distance(a)
}

pub fn near_set<M: ClosestPointMap + ?Sized>(map: &M, a: &[f64], epsilon: f64) -> NearSet {
    map.near_set(a, epsilon)
}

/// Near set with the resolution-adaptive slack of `th`.
pub fn near_set_auto<M: ClosestPointMap + ?Sized>(map: &M, a: &[f64], th: &Thresholds) -> NearSet {
    let d = map.distance(a);
    map.near_set(a, th.epsilon_at(d))
}

/// `∇d(a) = (a - m(a)) / ‖a - m(a)‖` with `m(a)` the centroid of the near set.
pub fn grad_distance<M: ClosestPointMap + ?Sized>(
    map: &M,
    a: &[f64],
    epsilon: f64,
    lambda: f64,
) -> Result<Vec<f64>> {
    let ns = map.near_set(a, epsilon);
    gradient_from(a, &ns, lambda)
}

pub fn grad_distance_auto<M: ClosestPointMap + ?Sized>(
    map: &M,
    a: &[f64],
    th: &Thresholds,
) -> Result<Vec<f64>> {
    let ns = near_set_auto(map, a, th);
    gradient_from(a, &ns, th.lambda())
}

fn gradient_from(a: &[f64], ns: &NearSet, lambda: f64) -> Result<Vec<f64>> {
    if ns.distance <= ns.epsilon || ns.distance == 0.0 {
        return Err(Error::OnSet {
            distance: ns.distance,
        });
    }
    if ns.spread >= lambda {
        return Err(Error::MedialPoint {
            point: a.to_vec(),
            spread: ns.spread,
            lambda,
        });
    }
    let v = geom::sub(a, &ns.representative());
    geom::normalized(&v).ok_or(Error::OnSet {
        distance: ns.distance,
    })
}

/// Central difference `(m(x_{t+h}) - m(x_{t-h})) / 2h` of the closest-point
/// map restricted to the line `base + t · direction`.
pub fn jacobian_along_line<M: ClosestPointMap + ?Sized>(
    map: &M,
    base: &[f64],
    direction: &[f64],
    t: f64,
    h: f64,
    th: &Thresholds,
) -> Result<Vec<f64>> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let dir = geom::normalized(direction).expect("nonzero line direction");
    let lambda = th.lambda();
    let mut reps = Vec::with_capacity(2);
    for s in [t - h, t, t + h] {
        let x = geom::along(base, &dir, s);
        let ns = near_set_auto(map, &x, th);
        if ns.spread >= lambda {
            return Err(Error::MedialCrossing {
                point: x,
                spread: ns.spread,
            });
        }
        if s != t {
            reps.push(ns.representative());
        }
    }
    Ok(geom::scale(&geom::sub(&reps[1], &reps[0]), 0.5 / h))
}

/// Writes a query trace with columns `x0..x{n-1},distance,spread,members`.
pub fn write_trace_csv<M: ClosestPointMap + ?Sized>(
    path: &Path,
    map: &M,
    queries: &[Vec<f64>],
    th: &Thresholds,
) -> Result<()> {
    let dim = map.dim();
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    header.extend(["distance", "spread", "members"].map(String::from));
    w.write_record(&header)?;
    for q in queries {
        let ns = near_set_auto(map, q, th);
        let mut row: Vec<String> = q.iter().map(|x| x.to_string()).collect();
        row.push(ns.distance.to_string());
        row.push(ns.spread.to_string());
        row.push(ns.members.len().to_string());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::ShapeSpec;
    use std::f64::consts::PI;

    fn cloud_index(spec: ShapeSpec, n: usize, seed: u64) -> (Shape, SpatialIndex, Thresholds) {
        let shape = Shape::new(&spec).unwrap();
        let cloud = shape.sample(n, seed).unwrap();
        let index = SpatialIndex::build(&cloud).unwrap();
        let th = Thresholds::new(cloud.fill_distance, shape.scale());
        (shape, index, th)
    }

    #[test]
    fn two_points_near_set_on_bisector() {
        let (_, index, _) = cloud_index(ShapeSpec::two_points([-1.0, 0.0], [1.0, 0.0]), 2, 0);
        let ns = index.near_set(&[0.0, 0.5], 0.0);
        assert_eq!(ns.members, vec![vec![-1.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(ns.spread, 2.0);
        assert!(matches!(
            grad_distance(&index, &[0.0, 0.5], 0.0, 1e-9),
            Err(Error::MedialPoint { .. })
        ));
    }

    #[test]
    fn circle_distance_and_gradient() {
        let (_, index, th) = cloud_index(ShapeSpec::circle(1.0), 1000, 7);
        assert!((index.distance(&[0.0, 0.0]) - 1.0).abs() < 1e-12);
        let g = grad_distance_auto(&index, &[2.0, 0.0], &th).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-5 && g[1].abs() < 2.0 * th.fill_distance);
        for p in index_points(&index) {
            assert_eq!(index.distance(&p), 0.0);
        }
    }

    fn index_points(index: &SpatialIndex) -> Vec<Vec<f64>> {
        (0..index.len()).map(|i| index.point(i).to_vec()).collect()
    }

    // Oracle: the radial projection (1, 0) is the unique nearest point of
    // (0.5, 0); with slack ε the members subtend |θ| ≤ sqrt(2 ε d / ρ).
    #[test]
    fn circle_near_set_clusters_around_radial_projection() {
        let (_, index, th) = cloud_index(ShapeSpec::circle(1.0), 1000, 7);
        let h = th.fill_distance;
        let ns = index.near_set(&[0.5, 0.0], h);
        let bound = (2.0 * h * 0.5 / 0.5f64).sqrt() + 2.0 * h;
        assert!(ns.members.iter().all(|p| p[1].atan2(p[0]).abs() <= bound));
        let auto = near_set_auto(&index, &[0.5, 0.0], &th);
        assert!(auto.spread <= 2.0 * h, "spread {} vs 2h {}", auto.spread, 2.0 * h);
    }

    #[test]
    fn cone_axis_near_set_spans_the_minimiser_circle() {
        let (_, index, th) = cloud_index(ShapeSpec::cone(2.0), 40_000, 5);
        let ns = near_set_auto(&index, &[0.0, 0.0, 1.0], &th);
        assert!((ns.spread - 1.0).abs() < 4.0 * th.fill_distance, "spread {}", ns.spread);
        // A flat 2h slack admits neighbouring rings along the generators.
        let wide = index.near_set(&[0.0, 0.0, 1.0], 2.0 * th.fill_distance);
        assert!(wide.spread > ns.spread);
        // Oracle: minimise r² + (r - 1)², minimum 1/2 at r = 1/2.
        assert!((index.distance(&[0.0, 0.0, 1.0]) - 0.5f64.sqrt()).abs() <= th.fill_distance);
    }

    #[test]
    fn cusp_cloud_nearest_is_close_to_analytic_pair() {
        let (shape, index, th) = cloud_index(ShapeSpec::cusp(1.0), 2000, 1);
        let exact = shape.exact_nearest(&[0.5, 0.0]).unwrap();
        let ns = near_set_auto(&index, &[0.5, 0.0], &th);
        for m in &ns.members {
            let gap = exact
                .members
                .iter()
                .map(|e| geom::dist(e, m))
                .fold(f64::INFINITY, f64::min);
            assert!(gap <= 2.0 * th.fill_distance);
        }
        assert!(ns.spread > 0.3);
    }

    #[test]
    fn half_helix_gradient_matches_closed_form() {
        let shape = Shape::new(&ShapeSpec::half_helix(2.0 * PI)).unwrap();
        let exact = ExactField::new(&shape).unwrap();
        let a = [0.0, 0.0, 1.0];
        let g = grad_distance_auto(&exact, &a, &exact.thresholds()).unwrap();
        let want = [-(1f64.cos()), -(1f64.sin()), 0.0];
        for k in 0..3 {
            assert!((g[k] - want[k]).abs() < 1e-9);
        }
        // Central differences of the distance with step 1e-5.
        let step = 1e-5;
        for k in 0..3 {
            let mut p = a.to_vec();
            let mut q = a.to_vec();
            p[k] += step;
            q[k] -= step;
            let fd = (exact.distance(&p) - exact.distance(&q)) / (2.0 * step);
            assert!((fd - want[k]).abs() < 1e-6, "axis {k}: {fd}");
        }
    }

    #[test]
    fn gradient_on_set_is_undefined() {
        let (_, index, th) = cloud_index(ShapeSpec::circle(1.0), 100, 0);
        let p = index.point(3).to_vec();
        assert!(matches!(grad_distance_auto(&index, &p, &th), Err(Error::OnSet { .. })));
    }

    #[test]
    fn jacobian_on_half_helix_axis_matches_closed_form() {
        let shape = Shape::new(&ShapeSpec::half_helix(2.0 * PI)).unwrap();
        let exact = ExactField::new(&shape).unwrap();
        let th = exact.thresholds();
        let j = jacobian_along_line(&exact, &[0.0; 3], &[0.0, 0.0, 1.0], 1.0, 1e-4, &th).unwrap();
        let want = [-(1f64.sin()) / 2.0, 1f64.cos() / 2.0, 1.0];
        for k in 0..3 {
            assert!((j[k] - want[k]).abs() < 1e-6, "{j:?}");
        }
        let j = jacobian_along_line(&exact, &[0.0; 3], &[0.0, 0.0, 1.0], 0.01, 1e-5, &th).unwrap();
        assert!((geom::norm(&j) - 26f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn jacobian_along_circle_ray_vanishes() {
        let (_, index, th) = cloud_index(ShapeSpec::circle(1.0), 1000, 7);
        let j = jacobian_along_line(&index, &[0.0, 0.0], &[1.0, 0.0], 2.0, 1e-4, &th).unwrap();
        assert_eq!(j, vec![0.0, 0.0]);
    }

    #[test]
    fn jacobian_refuses_medial_stencil() {
        let shape = Shape::new(&ShapeSpec::full_helix(2.0 * PI)).unwrap();
        let exact = ExactField::new(&shape).unwrap();
        let r = jacobian_along_line(&exact, &[0.0; 3], &[0.0, 0.0, 1.0], 1.0, 1e-4, &exact.thresholds());
        assert!(matches!(r, Err(Error::MedialCrossing { .. })));
    }

    #[test]
    fn trace_csv_has_frozen_columns() {
        let (_, index, th) = cloud_index(ShapeSpec::circle(1.0), 200, 1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        write_trace_csv(&path, &index, &[vec![0.0, 0.0], vec![2.0, 0.0]], &th).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x0,x1,distance,spread,members"));
        assert_eq!(lines.count(), 2);
    }
}
