use serde::{Deserialize, Serialize};

use super::Lab;
use crate::error::{Error, Result};
use crate::geom;
use crate::innermetric::PathEstimate;
use crate::medial::{scan_medial, GridSpec, MedialSample, ScanParams};
use crate::nearfield::near_set_auto;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureTrace {
    pub point: Vec<f64>,
    pub medial_points: Vec<Vec<f64>>,
    pub witness_pairs: Vec<[Vec<f64>; 2]>,
    pub outer: Vec<f64>,
    pub inner: Vec<f64>,
    pub ratios: Vec<f64>,
    pub diverges: bool,
    /// No medial samples approach the point.
    pub vacuous: bool,
    #[serde(skip)]
    pub paths: Vec<PathEstimate>,
}

impl ConjectureTrace {
    fn vacuous(p: &[f64]) -> Self {
        ConjectureTrace {
            point: p.to_vec(),
            medial_points: Vec::new(),
            witness_pairs: Vec::new(),
            outer: Vec::new(),
            inner: Vec::new(),
            ratios: Vec::new(),
            diverges: false,
            vacuous: true,
            paths: Vec::new(),
        }
    }
}

/// Ratios grow past twice their initial value and are nondecreasing over
/// the last half of the trace.
fn diverges(ratios: &[f64]) -> bool {
    let n = ratios.len();
    if n < 2 {
        return false;
    }
    let tail = &ratios[(n - 1) / 2..];
    ratios[n - 1] >= 2.0 * ratios[0] && tail.windows(2).all(|w| w[1] >= w[0])
}

/// Witness-pair ratios at explicit medial points `xis`. Points whose near
/// set is not multi-valued are skipped.
pub fn conjecture_at(lab: &Lab, p: &[f64], xis: &[Vec<f64>]) -> Result<ConjectureTrace> {
    let candidates: Vec<(Vec<f64>, Option<[Vec<f64>; 2]>)> = xis.iter().map(|x| (x.clone(), None)).collect();
    trace_from(lab, p, candidates)
}

fn trace_from(lab: &Lab, p: &[f64], candidates: Vec<(Vec<f64>, Option<[Vec<f64>; 2]>)>) -> Result<ConjectureTrace> {
    let graph = lab.graph();
    let lambda = lab.thresholds.lambda();
    let mut t = ConjectureTrace::vacuous(p);
    for (xi, fallback) in candidates {
        let ns = near_set_auto(&lab.index, &xi, &lab.thresholds);
        let pair = if ns.spread >= lambda {
            let (a, b) = ns.witness_pair();
            [a.to_vec(), b.to_vec()]
        } else if let Some(w) = fallback {
            w
        } else {
            continue;
        };
        let outer = geom::dist(&pair[0], &pair[1]);
        if outer == 0.0 {
            continue;
        }
        let path = match graph.inner_distance(&pair[0], &pair[1]) {
            Ok(path) => path,
            Err(Error::NoPath(..)) => continue,
            Err(e) => return Err(e),
        };
        t.ratios.push(path.length / outer);
        t.inner.push(path.length);
        t.outer.push(outer);
        t.medial_points.push(xi);
        t.witness_pairs.push(pair);
        t.paths.push(path);
    }
    t.vacuous = t.ratios.is_empty();
    t.diverges = diverges(&t.ratios);
    Ok(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureOptions {
    pub count: usize,
    /// Target distance of the first medial point from `p`.
    pub initial_distance: f64,
    /// Ratio between consecutive target distances, in (0, 1).
    pub ratio: f64,
    /// Nodes per axis of each scan (forced odd).
    pub scan_resolution: usize,
}

impl ConjectureOptions {
    pub fn for_dim(dim: usize, initial_distance: f64) -> Self {
        ConjectureOptions {
            count: 4,
            initial_distance,
            ratio: 0.5,
            scan_resolution: if dim <= 2 { 81 } else { 25 },
        }
    }
}

/// Selects medial samples `ξ_k` at target distances `r0 qᵏ` from `p`,
/// strictly approaching `p`, by scanning a box of half-width `2 r0 qᵏ`
/// around `p` at each scale. Returns a vacuous trace if none are found.
pub fn conjecture_probe(lab: &Lab, p: &[f64], opts: &ConjectureOptions) -> Result<ConjectureTrace> {
    if !(opts.ratio > 0.0 && opts.ratio < 1.0 && opts.initial_distance > 0.0) {
        return Err(Error::InconsistentParams(format!(
            "conjecture probe needs 0 < ratio < 1 and a positive initial distance, got {} and {}",
            opts.ratio, opts.initial_distance
        )));
    }
    let res = opts.scan_resolution.max(3) | 1;
    let mut chosen: Vec<(Vec<f64>, Option<[Vec<f64>; 2]>)> = Vec::new();
    let mut last = f64::INFINITY;
    for k in 0..opts.count {
        let target = opts.initial_distance * opts.ratio.powi(k as i32);
        let half = 2.0 * target;
        let lo: Vec<f64> = p.iter().map(|x| x - half).collect();
        let hi: Vec<f64> = p.iter().map(|x| x + half).collect();
        let grid = GridSpec::uniform(lo, hi, res)?;
        let params = ScanParams::new(lab.thresholds).with_jumps(half * 1e-6);
        let report = scan_medial(&lab.index, &grid, &params)?;
        let best: Option<&MedialSample> = report
            .samples
            .iter()
            .filter(|s| {
                let d = geom::dist(&s.location, p);
                d > 0.0 && d < last
            })
            .min_by(|a, b| {
                let da = (geom::dist(&a.location, p) - target).abs();
                let db = (geom::dist(&b.location, p) - target).abs();
                da.total_cmp(&db).then_with(|| geom::lex_cmp(&a.location, &b.location))
            });
        if let Some(s) = best {
            last = geom::dist(&s.location, p);
            chosen.push((s.location.clone(), Some(s.witnesses.clone())));
        }
    }
    if chosen.is_empty() {
        return Ok(ConjectureTrace::vacuous(p));
    }
    trace_from(lab, p, chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::ShapeSpec;

    #[test]
    fn divergence_rule() {
        assert!(diverges(&[5.0, 10.0, 20.0]));
        assert!(!diverges(&[1.27, 1.26, 1.27]));
        assert!(!diverges(&[5.0, 12.0, 11.0]));
        assert!(!diverges(&[5.0]));
    }

    #[test]
    fn circle_trace_near_the_set_is_vacuous() {
        let lab = Lab::new(&ShapeSpec::circle(1.0), 2000, 7).unwrap();
        let t = conjecture_probe(&lab, &[1.0, 0.0], &ConjectureOptions::for_dim(2, 0.2)).unwrap();
        assert!(t.vacuous && !t.diverges);
    }

    #[test]
    fn two_points_witnesses_are_the_points() {
        let lab = Lab::new(&ShapeSpec::two_points([-1.0, 0.0], [1.0, 0.0]), 2, 0).unwrap();
        // The pair lies in different components: no inner distance, empty trace.
        let t = conjecture_at(&lab, &[-1.0, 0.0], &[vec![0.0, 0.0]]).unwrap();
        assert!(t.vacuous);
    }
}
