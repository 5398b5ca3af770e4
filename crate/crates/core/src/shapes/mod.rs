//! Catalog of analytic test sets plus generic point-cloud ingestion.
//!
//! Every catalog shape is compact: unbounded sets (helices, cone, cusp) are
//! truncated to a parameter box. A [`Shape`] exposes a membership test, a
//! deterministic sampler producing a [`SampleCloud`], and exact closest-point
//! oracles where a closed form or a one-dimensional minimisation exists.

mod ingest;
mod minimize;
mod sample;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom;
use crate::nearfield::NearSet;

pub use ingest::{read_point_cloud_csv, write_point_cloud_csv};
pub use minimize::{global_minima, Minimum};
pub use sample::SampleCloud;

/// Absolute tolerance (relative to `max(1, scale)`) for membership tests.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Number of representative points returned for a continuum of minimisers.
const CONTINUUM_REPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    HalfHelix,
    FullHelix,
    Circle,
    TwoPoints,
    Cusp,
    Cone,
    PointCloud,
    SegmentList,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 8] = [
        ShapeKind::HalfHelix,
        ShapeKind::FullHelix,
        ShapeKind::Circle,
        ShapeKind::TwoPoints,
        ShapeKind::Cusp,
        ShapeKind::Cone,
        ShapeKind::PointCloud,
        ShapeKind::SegmentList,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ShapeKind::HalfHelix => "half_helix",
            ShapeKind::FullHelix => "full_helix",
            ShapeKind::Circle => "circle",
            ShapeKind::TwoPoints => "two_points",
            ShapeKind::Cusp => "cusp",
            ShapeKind::Cone => "cone",
            ShapeKind::PointCloud => "point_cloud",
            ShapeKind::SegmentList => "segment_list",
        }
    }

    /// Ambient dimension fixed by the kind, if any.
    pub fn fixed_dim(self) -> Option<usize> {
        match self {
            ShapeKind::Circle | ShapeKind::TwoPoints | ShapeKind::Cusp => Some(2),
            ShapeKind::HalfHelix | ShapeKind::FullHelix | ShapeKind::Cone => Some(3),
            ShapeKind::PointCloud | ShapeKind::SegmentList => None,
        }
    }

    fn allowed_params(self) -> &'static [&'static str] {
        match self {
            ShapeKind::Circle => &["radius", "cx", "cy"],
            ShapeKind::TwoPoints => &["ax", "ay", "bx", "by"],
            ShapeKind::Cusp => &["t_max", "scale", "exponent"],
            ShapeKind::HalfHelix | ShapeKind::FullHelix => &["u_max", "scale"],
            ShapeKind::Cone => &["r_max", "scale"],
            ShapeKind::PointCloud | ShapeKind::SegmentList => &[],
        }
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ShapeKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// Declarative description of a closed set `X ⊂ ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ambient_dim: Option<usize>,
    /// Inline points for `point_cloud`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    /// CSV file with header `x0,...,x{n-1}` for `point_cloud`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Segment endpoints for `segment_list`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segments: Option<Vec<[Vec<f64>; 2]>>,
}

impl ShapeSpec {
    pub fn new(kind: ShapeKind) -> Self {
        ShapeSpec {
            kind,
            params: BTreeMap::new(),
            ambient_dim: kind.fixed_dim(),
            points: None,
            csv: None,
            segments: None,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn circle(radius: f64) -> Self {
        Self::new(ShapeKind::Circle).with("radius", radius)
    }

    pub fn two_points(a: [f64; 2], b: [f64; 2]) -> Self {
        Self::new(ShapeKind::TwoPoints)
            .with("ax", a[0])
            .with("ay", a[1])
            .with("bx", b[0])
            .with("by", b[1])
    }

    pub fn cusp(t_max: f64) -> Self {
        Self::new(ShapeKind::Cusp).with("t_max", t_max)
    }

    pub fn half_helix(u_max: f64) -> Self {
        Self::new(ShapeKind::HalfHelix).with("u_max", u_max)
    }

    pub fn full_helix(u_max: f64) -> Self {
        Self::new(ShapeKind::FullHelix).with("u_max", u_max)
    }

    pub fn cone(r_max: f64) -> Self {
        Self::new(ShapeKind::Cone).with("r_max", r_max)
    }

    pub fn point_cloud(points: Vec<Vec<f64>>) -> Self {
        let mut s = Self::new(ShapeKind::PointCloud);
        s.ambient_dim = points.first().map(Vec::len);
        s.points = Some(points);
        s
    }

    pub fn segment_list(segments: Vec<[Vec<f64>; 2]>) -> Self {
        let mut s = Self::new(ShapeKind::SegmentList);
        s.ambient_dim = segments.first().map(|sg| sg[0].len());
        s.segments = Some(segments);
        s
    }

    /// Short identifier used as `shape_ref` in clouds and reports.
    pub fn label(&self) -> String {
        let mut s = self.kind.as_str().to_string();
        if !self.params.is_empty() {
            let ps: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            s.push('{');
            s.push_str(&ps.join(","));
            s.push('}');
        }
        s
    }

    fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }
}

/// Analytic description of a medial locus, used as a test oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum MedialLocus {
    Point(Vec<f64>),
    Hyperplane { normal: Vec<f64>, offset: f64 },
    Ray { origin: Vec<f64>, direction: Vec<f64> },
    /// Piecewise-linear curve through the vertices, for loci traced numerically.
    Polyline(Vec<Vec<f64>>),
    Union(Vec<MedialLocus>),
}

impl MedialLocus {
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            MedialLocus::Point(p) => geom::dist(p, x),
            MedialLocus::Hyperplane { normal, offset } => (geom::dot(normal, x) - offset).abs(),
            MedialLocus::Ray { origin, direction } => {
                let v = geom::sub(x, origin);
                let t = geom::dot(&v, direction).max(0.0);
                geom::dist(x, &geom::along(origin, direction, t))
            }
            MedialLocus::Polyline(v) => match v.len() {
                0 => f64::INFINITY,
                1 => geom::dist(&v[0], x),
                _ => v
                    .windows(2)
                    .map(|w| geom::dist(x, &closest_on_segment(&w[0], &w[1], x)))
                    .fold(f64::INFINITY, f64::min),
            },
            MedialLocus::Union(parts) => parts.iter().map(|p| p.distance(x)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Image under `x ↦ s x`.
    pub fn scaled(&self, s: f64) -> MedialLocus {
        match self {
            MedialLocus::Point(p) => MedialLocus::Point(geom::scale(p, s)),
            MedialLocus::Hyperplane { normal, offset } => MedialLocus::Hyperplane {
                normal: normal.clone(),
                offset: offset * s,
            },
            MedialLocus::Ray { origin, direction } => MedialLocus::Ray {
                origin: geom::scale(origin, s),
                direction: direction.clone(),
            },
            MedialLocus::Polyline(v) => MedialLocus::Polyline(v.iter().map(|p| geom::scale(p, s)).collect()),
            MedialLocus::Union(parts) => MedialLocus::Union(parts.iter().map(|p| p.scaled(s)).collect()),
        }
    }
}

#[derive(Debug, Clone)]
enum Geometry {
    Circle { center: [f64; 2], radius: f64 },
    TwoPoints { a: [f64; 2], b: [f64; 2] },
    /// `scale * (t, ±t^{3/2})`, `t ∈ [0, t_max]`.
    Cusp { t_max: f64, scale: f64 },
    /// `scale * (cos u, sin u, u²)`, `u ∈ [u_lo, u_hi]`.
    Helix { u_lo: f64, u_hi: f64, scale: f64 },
    /// `scale * {z = sqrt(x² + y²), sqrt(x² + y²) ≤ r_max}`.
    Cone { r_max: f64, scale: f64 },
    Segments(Vec<[Vec<f64>; 2]>),
    Cloud(Vec<Vec<f64>>),
}

/// A validated, immutable closed set.
#[derive(Debug, Clone)]
pub struct Shape {
    spec: ShapeSpec,
    dim: usize,
    geometry: Geometry,
    bbox: (Vec<f64>, Vec<f64>),
}

/// Builds a [`Shape`] from its spec, validating parameters.
pub fn make_shape(spec: &ShapeSpec) -> Result<Shape> {
    Shape::new(spec)
}

impl Shape {
    pub fn new(spec: &ShapeSpec) -> Result<Self> {
        let kind = spec.kind;
        let allowed = kind.allowed_params();
        if let Some(bad) = spec.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InconsistentParams(format!(
                "parameter `{bad}` is not valid for {kind} (allowed: {allowed:?})"
            )));
        }
        if let Some((k, v)) = spec.params.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InconsistentParams(format!("parameter `{k}` = {v} is not finite")));
        }
        let positive = |key: &str, default: f64| -> Result<f64> {
            let v = spec.param(key, default);
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::InconsistentParams(format!("`{key}` must be positive, got {v}")))
            }
        };

        let geometry = match kind {
            ShapeKind::Circle => Geometry::Circle {
                center: [spec.param("cx", 0.0), spec.param("cy", 0.0)],
                radius: positive("radius", 1.0)?,
            },
            ShapeKind::TwoPoints => {
                let a = [spec.param("ax", -1.0), spec.param("ay", 0.0)];
                let b = [spec.param("bx", 1.0), spec.param("by", 0.0)];
                if a == b {
                    return Err(Error::InconsistentParams("two_points needs distinct points".into()));
                }
                Geometry::TwoPoints { a, b }
            }
            ShapeKind::Cusp => {
                let e = spec.param("exponent", 1.5);
                if e != 1.5 {
                    return Err(Error::InconsistentParams(format!(
                        "cusp exponent is fixed at 3/2, got {e}"
                    )));
                }
                Geometry::Cusp {
                    t_max: positive("t_max", 1.0)?,
                    scale: positive("scale", 1.0)?,
                }
            }
            ShapeKind::HalfHelix => Geometry::Helix {
                u_lo: 0.0,
                u_hi: positive("u_max", 2.0 * PI)?,
                scale: positive("scale", 1.0)?,
            },
            ShapeKind::FullHelix => {
                let u = positive("u_max", 2.0 * PI)?;
                Geometry::Helix {
                    u_lo: -u,
                    u_hi: u,
                    scale: positive("scale", 1.0)?,
                }
            }
            ShapeKind::Cone => Geometry::Cone {
                r_max: positive("r_max", 2.0)?,
                scale: positive("scale", 1.0)?,
            },
            ShapeKind::PointCloud => {
                let pts = match (&spec.points, &spec.csv) {
                    (Some(p), None) => p.clone(),
                    (None, Some(path)) => read_point_cloud_csv(path)?,
                    (Some(_), Some(_)) => {
                        return Err(Error::InconsistentParams(
                            "point_cloud takes either `points` or `csv`, not both".into(),
                        ))
                    }
                    (None, None) => {
                        return Err(Error::InconsistentParams(
                            "point_cloud needs `points` or `csv`".into(),
                        ))
                    }
                };
                if pts.is_empty() {
                    return Err(Error::EmptyCloud);
                }
                let n = pts[0].len();
                if n == 0 || pts.iter().any(|p| p.len() != n || p.iter().any(|x| !x.is_finite())) {
                    return Err(Error::InconsistentParams(
                        "point_cloud rows must be finite and share one dimension".into(),
                    ));
                }
                Geometry::Cloud(pts)
            }
            ShapeKind::SegmentList => {
                let segs = spec.segments.clone().ok_or_else(|| {
                    Error::InconsistentParams("segment_list needs `segments`".into())
                })?;
                if segs.is_empty() {
                    return Err(Error::InconsistentParams("segment_list is empty".into()));
                }
                let n = segs[0][0].len();
                if n == 0 || segs.iter().flatten().any(|p| p.len() != n || p.iter().any(|x| !x.is_finite())) {
                    return Err(Error::InconsistentParams(
                        "segment endpoints must be finite and share one dimension".into(),
                    ));
                }
                Geometry::Segments(segs)
            }
        };

        let natural_dim = match &geometry {
            Geometry::Cloud(p) => p[0].len(),
            Geometry::Segments(s) => s[0][0].len(),
            _ => kind.fixed_dim().expect("analytic kinds have a fixed dimension"),
        };
        if let Some(d) = spec.ambient_dim {
            if d != natural_dim {
                return Err(Error::InconsistentParams(format!(
                    "ambient_dim {d} does not match {kind} (dimension {natural_dim})"
                )));
            }
        }

        let bbox = bounding_box(&geometry, natural_dim);
        let mut spec = spec.clone();
        spec.ambient_dim = Some(natural_dim);
        Ok(Shape {
            spec,
            dim: natural_dim,
            geometry,
            bbox,
        })
    }

    pub fn spec(&self) -> &ShapeSpec {
        &self.spec
    }

    pub fn kind(&self) -> ShapeKind {
        self.spec.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bounding_box(&self) -> (&[f64], &[f64]) {
        (&self.bbox.0, &self.bbox.1)
    }

    /// Characteristic length: diagonal of the bounding box.
    pub fn scale(&self) -> f64 {
        let d = geom::dist(&self.bbox.0, &self.bbox.1);
        if d > 0.0 {
            d
        } else {
            1.0
        }
    }

    /// Membership up to [`MEMBERSHIP_TOL`] by the defining equations.
    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let tol = MEMBERSHIP_TOL * self.scale().max(1.0);
        match &self.geometry {
            Geometry::Circle { center, radius } => {
                (geom::dist(x, center) - radius).abs() <= tol
            }
            Geometry::TwoPoints { a, b } => geom::dist(x, a) <= tol || geom::dist(x, b) <= tol,
            Geometry::Cusp { t_max, scale } => {
                let t = x[0] / scale;
                t >= -tol && t <= t_max + tol && (x[1].abs() - scale * t.max(0.0).powf(1.5)).abs() <= tol
            }
            Geometry::Helix { u_lo, u_hi, scale } => {
                let w = x[2] / scale;
                if w < -tol {
                    return false;
                }
                let r = w.max(0.0).sqrt();
                [r, -r].into_iter().any(|u| {
                    u >= u_lo - tol
                        && u <= u_hi + tol
                        && (x[0] - scale * u.cos()).abs() <= tol
                        && (x[1] - scale * u.sin()).abs() <= tol
                })
            }
            Geometry::Cone { r_max, scale } => {
                let rho = x[0].hypot(x[1]);
                (x[2] - rho).abs() <= tol && rho <= r_max * scale + tol
            }
            Geometry::Segments(segs) => segs
                .iter()
                .any(|s| geom::dist(x, &closest_on_segment(&s[0], &s[1], x)) <= tol),
            Geometry::Cloud(pts) => pts.iter().any(|p| geom::dist(p, x) <= tol),
        }
    }

    /// Medial locus where one is known.
    ///
    /// For the cusp this is the positive x-axis together with two curves in
    /// `x < 0`, near `x = -y²/2`, where the tip ties with a branch point. The
    /// curves have no closed form; they are traced for `|y|` up to twice the
    /// bounding-box diagonal, so the locus is truncated beyond that.
    pub fn exact_medial(&self) -> Option<MedialLocus> {
        match &self.geometry {
            Geometry::Circle { center, .. } => Some(MedialLocus::Point(center.to_vec())),
            Geometry::TwoPoints { a, b } => {
                let normal = geom::normalized(&geom::sub(b, a))?;
                let mid = geom::lerp(a, b, 0.5);
                let offset = geom::dot(&normal, &mid);
                Some(MedialLocus::Hyperplane { normal, offset })
            }
            Geometry::Cusp { t_max, scale } => {
                let upper = cusp_tip_ties(*t_max, *scale, 2.0 * self.scale());
                let lower = upper.iter().map(|p| vec![p[0], -p[1]]).collect();
                Some(MedialLocus::Union(vec![
                    MedialLocus::Ray {
                        origin: vec![0.0, 0.0],
                        direction: vec![1.0, 0.0],
                    },
                    MedialLocus::Polyline(upper),
                    MedialLocus::Polyline(lower),
                ]))
            }
            Geometry::Helix { u_lo, u_hi, .. } if *u_lo == -*u_hi => Some(MedialLocus::Ray {
                origin: vec![0.0; 3],
                direction: vec![0.0, 0.0, 1.0],
            }),
            Geometry::Cone { .. } => Some(MedialLocus::Ray {
                origin: vec![0.0; 3],
                direction: vec![0.0, 0.0, 1.0],
            }),
            _ => None,
        }
    }

    /// Exact closest-point set `m(a)` with distance `d(a, X)`.
    ///
    /// Continua of minimisers (circle centre, cone axis) are returned as a
    /// finite representative set with `continuum = true`.
    pub fn exact_nearest(&self, a: &[f64]) -> Result<NearSet> {
        if a.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: a.len(),
            });
        }
        let scale = self.scale();
        // Tie tolerance on squared distances.
        let tie = 1e-12 * scale * scale;
        let near = match &self.geometry {
            Geometry::Circle { center, radius } => {
                let v = geom::sub(a, center);
                let rho = geom::norm(&v);
                if rho <= 1e-14 * radius {
                    let reps = ring_points(center, *radius, CONTINUUM_REPS);
                    NearSet::exact(*radius, reps, true)
                } else {
                    let m = geom::add(center, &geom::scale(&v, radius / rho));
                    NearSet::exact((rho - radius).abs(), vec![m], false)
                }
            }
            Geometry::TwoPoints { a: p, b: q } => {
                let (dp, dq) = (geom::dist2(a, p), geom::dist2(a, q));
                let members = if (dp - dq).abs() <= tie {
                    vec![p.to_vec(), q.to_vec()]
                } else if dp < dq {
                    vec![p.to_vec()]
                } else {
                    vec![q.to_vec()]
                };
                NearSet::exact(dp.min(dq).sqrt(), members, false)
            }
            Geometry::Cusp { t_max, scale: k } => {
                let (x, y) = (a[0], a[1]);
                let s_max = t_max.sqrt();
                let mut cands = Vec::new();
                for sign in [1.0, -1.0] {
                    let f = |s: f64| {
                        let (px, py) = (k * s * s, sign * k * s * s * s);
                        (px - x).powi(2) + (py - y).powi(2)
                    };
                    let df = |s: f64| {
                        let (px, py) = (k * s * s, sign * k * s * s * s);
                        2.0 * (px - x) * (2.0 * k * s) + 2.0 * (py - y) * (sign * 3.0 * k * s * s)
                    };
                    for m in global_minima(f, df, 0.0, s_max, tie) {
                        let s = m.arg;
                        cands.push((m.value, vec![k * s * s, sign * k * s * s * s]));
                    }
                }
                collect_ties(cands, tie, scale)
            }
            Geometry::Helix { u_lo, u_hi, scale: k } => {
                let (x, y, z) = (a[0], a[1], a[2]);
                let f = |u: f64| {
                    (x - k * u.cos()).powi(2) + (y - k * u.sin()).powi(2) + (z - k * u * u).powi(2)
                };
                let df = |u: f64| {
                    2.0 * (x - k * u.cos()) * (k * u.sin())
                        - 2.0 * (y - k * u.sin()) * (k * u.cos())
                        - 2.0 * (z - k * u * u) * (2.0 * k * u)
                };
                let cands = global_minima(f, df, *u_lo, *u_hi, tie)
                    .into_iter()
                    .map(|m| (m.value, helix_point(m.arg, *k)))
                    .collect();
                collect_ties(cands, tie, scale)
            }
            Geometry::Cone { r_max, scale: k } => {
                let rmax = r_max * k;
                let rho = a[0].hypot(a[1]);
                let z = a[2];
                let r = (0.5 * (rho + z)).clamp(0.0, rmax);
                let d = ((rho - r).powi(2) + (z - r).powi(2)).sqrt();
                if rho <= 1e-14 * scale && r > 0.0 {
                    let reps = ring_points(&[0.0, 0.0], r, CONTINUUM_REPS)
                        .into_iter()
                        .map(|mut p| {
                            p.push(r);
                            p
                        })
                        .collect();
                    NearSet::exact(d, reps, true)
                } else if r == 0.0 {
                    NearSet::exact(d, vec![vec![0.0; 3]], false)
                } else {
                    let m = vec![r * a[0] / rho, r * a[1] / rho, r];
                    NearSet::exact(d, vec![m], false)
                }
            }
            Geometry::Segments(segs) => {
                let cands = segs
                    .iter()
                    .map(|s| {
                        let c = closest_on_segment(&s[0], &s[1], a);
                        (geom::dist2(&c, a), c)
                    })
                    .collect();
                collect_ties(cands, tie, scale)
            }
            Geometry::Cloud(_) => return Err(Error::OracleUnavailable("point_cloud")),
        };
        Ok(near)
    }

    pub(crate) fn geometry_points(&self) -> Option<&[Vec<f64>]> {
        match &self.geometry {
            Geometry::Cloud(p) => Some(p),
            _ => None,
        }
    }
}

fn helix_point(u: f64, k: f64) -> Vec<f64> {
    vec![k * u.cos(), k * u.sin(), k * u * u]
}

fn ring_points(center: &[f64], radius: f64, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            vec![center[0] + radius * a.cos(), center[1] + radius * a.sin()]
        })
        .collect()
}

/// Points `(x, y)`, `y ≥ 0`, equidistant from the cusp tip and from the
/// nearest point of the upper branch `k (s², s³)`, starting at the origin.
fn cusp_tip_ties(t_max: f64, k: f64, y_max: f64) -> Vec<Vec<f64>> {
    const VERTICES: usize = 200;
    const GRID: usize = 400;
    let s_max = t_max.sqrt();
    let f = |s: f64, x: f64, y: f64| (k * s * s - x).powi(2) + (k * s * s * s - y).powi(2);
    // Sign of f' / (2ks); a − to + change marks a local minimum of f.
    let h = |s: f64, x: f64, y: f64| 2.0 * (k * s * s - x) + 3.0 * s * (k * s * s * s - y);
    // Lowest branch value over local minima in (0, s_max], the endpoint included.
    let branch_min = |x: f64, y: f64| {
        let mut best = f64::INFINITY;
        // Log-spaced so minima at `s ~ |y|` are bracketed for small `y`.
        let node = |i: usize| s_max * 1e-9f64.powf(1.0 - i as f64 / GRID as f64);
        for i in 1..=GRID {
            let (a, b) = (node(i - 1), node(i));
            if h(a, x, y) < 0.0 && h(b, x, y) >= 0.0 {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..60 {
                    let m = 0.5 * (lo + hi);
                    if h(m, x, y) < 0.0 {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                best = best.min(f(0.5 * (lo + hi), x, y));
            }
        }
        if h(s_max, x, y) < 0.0 {
            best = best.min(f(s_max, x, y));
        }
        best
    };
    // Positive when a branch point is strictly nearer than the tip.
    let gap = |x: f64, y: f64| x * x + y * y - branch_min(x, y);
    let mut out = vec![vec![0.0, 0.0]];
    for i in 1..=VERTICES {
        let y = y_max * (i as f64 / VERTICES as f64).powi(2);
        if gap(0.0, y) <= 0.0 {
            break;
        }
        let mut lo = -y;
        while gap(lo, y) > 0.0 && lo > -1e6 * y_max {
            lo *= 2.0;
        }
        let mut hi = 0.0;
        for _ in 0..80 {
            let m = 0.5 * (lo + hi);
            if gap(m, y) > 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        out.push(vec![0.5 * (lo + hi), y]);
    }
    out
}

pub(crate) fn closest_on_segment(p: &[f64], q: &[f64], x: &[f64]) -> Vec<f64> {
    let d = geom::sub(q, p);
    let l2 = geom::dot(&d, &d);
    if l2 == 0.0 {
        return p.to_vec();
    }
    let t = (geom::dot(&geom::sub(x, p), &d) / l2).clamp(0.0, 1.0);
    geom::along(p, &d, t)
}

// Keep candidates tying the best squared distance; merge coincident points.
fn collect_ties(cands: Vec<(f64, Vec<f64>)>, tie: f64, scale: f64) -> NearSet {
    let best = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let mut members: Vec<Vec<f64>> = Vec::new();
    for (v, p) in cands {
        if v <= best + tie && !members.iter().any(|m| geom::dist(m, &p) <= 1e-9 * scale) {
            members.push(p);
        }
    }
    NearSet::exact(best.max(0.0).sqrt(), members, false)
}

fn bounding_box(g: &Geometry, dim: usize) -> (Vec<f64>, Vec<f64>) {
    match g {
        Geometry::Circle { center, radius } => (
            vec![center[0] - radius, center[1] - radius],
            vec![center[0] + radius, center[1] + radius],
        ),
        Geometry::TwoPoints { a, b } => (
            vec![a[0].min(b[0]), a[1].min(b[1])],
            vec![a[0].max(b[0]), a[1].max(b[1])],
        ),
        Geometry::Cusp { t_max, scale } => {
            let h = scale * t_max.powf(1.5);
            (vec![0.0, -h], vec![scale * t_max, h])
        }
        Geometry::Helix { u_lo, u_hi, scale } => {
            let zmin = if *u_lo <= 0.0 && *u_hi >= 0.0 {
                0.0
            } else {
                scale * (u_lo * u_lo).min(u_hi * u_hi)
            };
            let zmax = scale * (u_lo * u_lo).max(u_hi * u_hi);
            (vec![-scale, -scale, zmin], vec![*scale, *scale, zmax])
        }
        Geometry::Cone { r_max, scale } => {
            let r = r_max * scale;
            (vec![-r, -r, 0.0], vec![r, r, r])
        }
        Geometry::Segments(segs) => {
            bbox_of(segs.iter().flat_map(|s| s.iter().map(Vec::as_slice)), dim)
        }
        Geometry::Cloud(pts) => bbox_of(pts.iter().map(Vec::as_slice), dim),
    }
}

pub(crate) fn bbox_of<'a>(pts: impl Iterator<Item = &'a [f64]>, dim: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in pts {
        for k in 0..dim {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    (lo, hi)
}
