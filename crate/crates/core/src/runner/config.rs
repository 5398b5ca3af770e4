use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probes::Verdict;
use crate::shapes::{Shape, ShapeSpec};

/// A run: one shape, one seeded sample cloud, and a list of experiments
/// against it. Parsed from a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub shape: ShapeSpec,
    pub sample_count: usize,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default, skip_serializing_if = "ThresholdOverrides::is_empty")]
    pub thresholds: ThresholdOverrides,
    /// Edge length of the neighbourhood graph; default `max(4 h, 1e-9 scale)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connect_radius: Option<f64>,
    pub experiments: Vec<Experiment>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("lnelab-out")
}

/// Overrides of the threshold factors; unset fields keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_cap_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_curvature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_factor: Option<f64>,
}

impl ThresholdOverrides {
    fn is_empty(&self) -> bool {
        self == &ThresholdOverrides::default()
    }
}

/// Plane `x[axis] = value` for plotting 3-d data; points within
/// `thickness` of it are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceSpec {
    pub axis: usize,
    #[serde(default)]
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thickness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Experiment {
    ScanMedial(ScanMedialSpec),
    LneField(LneFieldSpec),
    Lipschitz(LipschitzSpec),
    VerifyTheorem(VerifyTheoremSpec),
    Conjecture(ConjectureSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanMedialSpec {
    pub name: String,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Nodes per axis.
    pub resolution: usize,
    #[serde(default = "yes")]
    pub jumps: bool,
    #[serde(default = "default_jump_tol")]
    pub jump_tol: f64,
    /// When set, every sample must lie within this many grid steps of the
    /// analytic medial locus of the shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_steps: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub probes: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LneFieldSpec {
    pub name: String,
    /// Explicit probe points on the shape.
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    /// Additional probe points drawn from the cloud.
    #[serde(default)]
    pub random_points: usize,
    pub radii: Vec<f64>,
    #[serde(default = "default_sources")]
    pub sources: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipschitzSpec {
    pub name: String,
    pub center: Vec<f64>,
    pub radius: f64,
    pub grid_step: f64,
    pub search_margin: f64,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyTheoremSpec {
    pub name: String,
    pub point: Vec<f64>,
    pub radii: Vec<f64>,
    #[serde(default = "default_sources")]
    pub sources: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_resolution: Option<usize>,
    #[serde(default = "default_path_pairs")]
    pub path_pairs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_medial_approach: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjectureSpec {
    pub name: String,
    pub point: Vec<f64>,
    /// Explicit medial points; otherwise they are found by scans.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medial_points: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_distance: Option<f64>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_diverges: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<SliceSpec>,
}

fn yes() -> bool {
    true
}
fn default_jump_tol() -> f64 {
    1e-6
}
fn default_sources() -> usize {
    32
}
fn default_pairs() -> usize {
    10_000
}
fn default_path_pairs() -> usize {
    8
}
fn default_count() -> usize {
    4
}
fn default_ratio() -> f64 {
    0.5
}

impl Experiment {
    pub fn name(&self) -> &str {
        match self {
            Experiment::ScanMedial(s) => &s.name,
            Experiment::LneField(s) => &s.name,
            Experiment::Lipschitz(s) => &s.name,
            Experiment::VerifyTheorem(s) => &s.name,
            Experiment::Conjecture(s) => &s.name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::ScanMedial(_) => "scan-medial",
            Experiment::LneField(_) => "lne-field",
            Experiment::Lipschitz(_) => "lipschitz",
            Experiment::VerifyTheorem(_) => "verify-theorem",
            Experiment::Conjecture(_) => "conjecture",
        }
    }

    pub fn slice(&self) -> Option<&SliceSpec> {
        match self {
            Experiment::ScanMedial(s) => s.slice.as_ref(),
            Experiment::LneField(s) => s.slice.as_ref(),
            Experiment::Lipschitz(s) => s.slice.as_ref(),
            Experiment::VerifyTheorem(s) => s.slice.as_ref(),
            Experiment::Conjecture(s) => s.slice.as_ref(),
        }
    }

    /// Explicit seed, if the experiment carries one.
    pub(crate) fn seed(&self) -> Option<u64> {
        match self {
            Experiment::LneField(s) => s.seed,
            Experiment::Lipschitz(s) => s.seed,
            Experiment::VerifyTheorem(s) => s.seed,
            _ => None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            e => e,
        })
    }

    /// Checks every field against the shape and its module operation. The
    /// error message starts with the offending field path.
    pub fn validate(&self) -> Result<()> {
        let shape = Shape::new(&self.shape).map_err(|e| Error::Config(format!("shape: {e}")))?;
        let dim = shape.dim();
        if self.sample_count == 0 {
            return bad("sample_count", "must be positive");
        }
        for (field, v) in [
            ("thresholds.epsilon_cap_factor", self.thresholds.epsilon_cap_factor),
            ("thresholds.epsilon_curvature", self.thresholds.epsilon_curvature),
            ("thresholds.lambda_factor", self.thresholds.lambda_factor),
            ("connect_radius", self.connect_radius),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return bad(field, format!("must be positive and finite, got {v}"));
                }
            }
        }
        let mut names = BTreeSet::new();
        for (i, exp) in self.experiments.iter().enumerate() {
            let at = |field: &str| format!("experiments[{i}].{field}");
            let name = exp.name();
            if name.is_empty()
                || !name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.')
                || name.starts_with('.')
            {
                return bad(at("name"), format!("`{name}` must be non-empty and use only [A-Za-z0-9._-]"));
            }
            if name == "manifest" || name == "summary" || !names.insert(name) {
                return bad(at("name"), format!("`{name}` is reserved or duplicated"));
            }
            match exp.slice() {
                Some(s) if s.axis >= dim => {
                    return bad(at("slice.axis"), format!("axis {} out of range for dimension {dim}", s.axis))
                }
                Some(s) if s.thickness.is_some_and(|t| !(t > 0.0)) => {
                    return bad(at("slice.thickness"), "must be positive")
                }
                None if dim == 3 => return bad(at("slice"), "required to plot 3-d data"),
                _ => {}
            }
            match exp {
                Experiment::ScanMedial(s) => {
                    vector(&at("lo"), &s.lo, dim)?;
                    vector(&at("hi"), &s.hi, dim)?;
                    if s.lo.iter().zip(&s.hi).any(|(a, b)| a >= b) {
                        return bad(at("hi"), "every coordinate must exceed `lo`");
                    }
                    if s.resolution < 2 {
                        return bad(at("resolution"), "needs at least 2 nodes per axis");
                    }
                    positive(&at("jump_tol"), s.jump_tol)?;
                    if let Some(k) = s.oracle_steps {
                        positive(&at("oracle_steps"), k)?;
                        if shape.exact_medial().is_none() {
                            return bad(at("oracle_steps"), format!("{} has no analytic medial locus", shape.kind()));
                        }
                    }
                    for (k, p) in &s.probes {
                        vector(&at(&format!("probes.{k}")), p, dim)?;
                    }
                }
                Experiment::LneField(s) => {
                    if s.points.is_empty() && s.random_points == 0 {
                        return bad(at("points"), "give `points` or a positive `random_points`");
                    }
                    for (j, p) in s.points.iter().enumerate() {
                        on_shape(&at(&format!("points[{j}]")), &shape, p, dim)?;
                    }
                    radii(&at("radii"), &s.radii)?;
                    count(&at("sources"), s.sources)?;
                }
                Experiment::Lipschitz(s) => {
                    vector(&at("center"), &s.center, dim)?;
                    positive(&at("radius"), s.radius)?;
                    positive(&at("grid_step"), s.grid_step)?;
                    positive(&at("search_margin"), s.search_margin)?;
                    count(&at("pairs"), s.pairs)?;
                }
                Experiment::VerifyTheorem(s) => {
                    on_shape(&at("point"), &shape, &s.point, dim)?;
                    radii(&at("radii"), &s.radii)?;
                    count(&at("sources"), s.sources)?;
                    if s.scan_resolution.is_some_and(|r| r < 3) {
                        return bad(at("scan_resolution"), "needs at least 3 nodes per axis");
                    }
                }
                Experiment::Conjecture(s) => {
                    on_shape(&at("point"), &shape, &s.point, dim)?;
                    match (&s.medial_points, s.initial_distance) {
                        (Some(xs), _) => {
                            for (j, x) in xs.iter().enumerate() {
                                vector(&at(&format!("medial_points[{j}]")), x, dim)?;
                            }
                        }
                        (None, Some(r0)) => positive(&at("initial_distance"), r0)?,
                        (None, None) => return bad(at("initial_distance"), "required without `medial_points`"),
                    }
                    count(&at("count"), s.count)?;
                    if !(s.ratio > 0.0 && s.ratio < 1.0) {
                        return bad(at("ratio"), format!("must lie in (0, 1), got {}", s.ratio));
                    }
                    if s.scan_resolution.is_some_and(|r| r < 3) {
                        return bad(at("scan_resolution"), "needs at least 3 nodes per axis");
                    }
                }
            }
        }
        Ok(())
    }
}

fn bad<T>(field: impl AsRef<str>, msg: impl AsRef<str>) -> Result<T> {
    Err(Error::Config(format!("{}: {}", field.as_ref(), msg.as_ref())))
}

fn vector(field: &str, v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return bad(field, format!("expected {dim} coordinates, got {}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return bad(field, "coordinates must be finite");
    }
    Ok(())
}

fn on_shape(field: &str, shape: &Shape, p: &[f64], dim: usize) -> Result<()> {
    vector(field, p, dim)?;
    if !shape.contains(p) {
        return bad(field, format!("{p:?} does not lie on the shape"));
    }
    Ok(())
}

fn positive(field: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return bad(field, format!("must be positive and finite, got {v}"));
    }
    Ok(())
}

fn count(field: &str, n: usize) -> Result<()> {
    if n == 0 {
        return bad(field, "must be positive");
    }
    Ok(())
}

fn radii(field: &str, r: &[f64]) -> Result<()> {
    if r.is_empty() || r.iter().any(|x| !(x.is_finite() && *x > 0.0)) || r.windows(2).any(|w| w[1] >= w[0]) {
        return bad(field, "must be a non-empty, strictly decreasing list of positive radii");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = r#"{
        "shape": {"kind": "circle", "params": {"radius": 1.0}},
        "sample_count": 1000,
        "seed": 7,
        "experiments": [
            {"type": "scan-medial", "name": "center", "lo": [-0.5, -0.5], "hi": [0.5, 0.5], "resolution": 11}
        ]
    }"#;

    fn message(text: &str) -> String {
        match ExperimentConfig::from_json(text) {
            Err(Error::Config(m)) => m,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_with_defaults() {
        let c = ExperimentConfig::from_json(CIRCLE).unwrap();
        assert_eq!(c.output_dir, PathBuf::from("lnelab-out"));
        match &c.experiments[0] {
            Experiment::ScanMedial(s) => assert!(s.jumps && s.jump_tol == 1e-6),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_named() {
        let m = message(&CIRCLE.replace("\"resolution\"", "\"resolutoin\""));
        assert!(m.contains("resolutoin"), "{m}");
        let m = message(&CIRCLE.replace("\"seed\": 7", "\"seed\": 7, \"colour\": 1"));
        assert!(m.contains("colour"), "{m}");
        let m = message(&CIRCLE.replace("scan-medial", "scan-medials"));
        assert!(m.contains("scan-medials"), "{m}");
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let m = message(&CIRCLE.replace("\"lo\": [-0.5, -0.5]", "\"lo\": [-0.5]"));
        assert!(m.starts_with("experiments[0].lo:"), "{m}");
        let m = message(&CIRCLE.replace("\"resolution\": 11", "\"resolution\": 1"));
        assert!(m.starts_with("experiments[0].resolution:"), "{m}");
        let m = message(&CIRCLE.replace("\"radius\": 1.0", "\"radius\": -1.0"));
        assert!(m.starts_with("shape:"), "{m}");
        let m = message(&CIRCLE.replace("\"name\": \"center\"", "\"name\": \"../x\""));
        assert!(m.starts_with("experiments[0].name:"), "{m}");
    }

    #[test]
    fn theorem_point_must_lie_on_shape() {
        let text = CIRCLE.replace(
            r#"{"type": "scan-medial", "name": "center", "lo": [-0.5, -0.5], "hi": [0.5, 0.5], "resolution": 11}"#,
            r#"{"type": "verify-theorem", "name": "t", "point": [0.5, 0.0], "radii": [0.5, 0.25]}"#,
        );
        assert!(message(&text).starts_with("experiments[0].point:"));
    }

    #[test]
    fn three_d_experiments_need_a_slice() {
        let text = r#"{
            "shape": {"kind": "cone", "params": {"r_max": 1.0}},
            "sample_count": 1000, "seed": 1,
            "experiments": [{"type": "verify-theorem", "name": "apex", "point": [0, 0, 0], "radii": [0.5]}]
        }"#;
        assert!(message(text).starts_with("experiments[0].slice:"));
        let ok = text.replace("\"radii\": [0.5]", "\"radii\": [0.5], \"slice\": {\"axis\": 1}");
        ExperimentConfig::from_json(&ok).unwrap();
    }

    #[test]
    fn round_trips_through_json() {
        let c = ExperimentConfig::from_json(CIRCLE).unwrap();
        let again = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(c, again);
    }
}
