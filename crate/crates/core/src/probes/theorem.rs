use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lne::{lne_report, LNEReport, Verdict};
use super::{rng, Lab};
use crate::error::{Error, Result};
use crate::geom;
use crate::innermetric::project_segment;
use crate::medial::{scan_medial, GridSpec, MedialSample, ScanParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremOptions {
    /// Source points per local constant.
    pub sources: usize,
    /// Nodes per axis of each ball scan; forced odd so the centre is a node.
    pub scan_resolution: usize,
    /// Pairs per medial-free ball for the projection-path check.
    pub path_pairs: usize,
    pub path_steps: usize,
    pub seed: u64,
}

impl TheoremOptions {
    pub fn for_dim(dim: usize, seed: u64) -> Self {
        TheoremOptions {
            sources: 32,
            scan_resolution: if dim <= 2 { 41 } else { 21 },
            path_pairs: 8,
            path_steps: 64,
            seed,
        }
    }
}

/// Projection paths between on-set pairs of a medial-free ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectifiabilityCheck {
    pub radius: f64,
    pub pairs: usize,
    pub succeeded: usize,
    /// Largest path length over chord among successful pairs.
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub point: Vec<f64>,
    pub radii: Vec<f64>,
    pub lne_verdict: Verdict,
    pub lne: LNEReport,
    /// A medial sample was found in every tested ball.
    pub medial_approach: bool,
    /// Per radius: distance from the point to the nearest medial sample in the ball.
    pub medial_distances: Vec<Option<f64>>,
    pub medial_samples: Vec<MedialSample>,
    pub rectifiability: Vec<RectifiabilityCheck>,
    /// `NOT (diverging AND NOT medial_approach)`.
    pub consistent: bool,
}

impl TheoremVerdict {
    pub fn rectifiable(&self) -> bool {
        self.rectifiability.iter().all(|c| c.succeeded == c.pairs)
    }
}

/// Either a medial sample lies in every ball `B(p, r_k)`, or the local LNE
/// constants do not diverge.
pub fn verify_theorem(lab: &Lab, p: &[f64], radii: &[f64], opts: &TheoremOptions) -> Result<TheoremVerdict> {
    if !lab.shape.contains(p) {
        return Err(Error::NotOnShape(p.to_vec()));
    }
    let graph = lab.graph();
    let lne = lne_report(graph, p, radii, opts.sources, opts.seed, true)?;
    let res = opts.scan_resolution.max(3) | 1;
    let th = &lab.thresholds;

    let mut medial_distances = Vec::with_capacity(radii.len());
    let mut medial_samples = Vec::new();
    let mut rectifiability = Vec::new();
    for (k, &r) in radii.iter().enumerate() {
        let lo: Vec<f64> = p.iter().map(|x| x - r).collect();
        let hi: Vec<f64> = p.iter().map(|x| x + r).collect();
        let grid = GridSpec::uniform(lo, hi, res)?;
        let params = ScanParams::new(*th).with_jumps(r * 1e-6);
        let report = scan_medial(&lab.index, &grid, &params)?;
        let mut inside: Vec<MedialSample> = report
            .samples
            .into_iter()
            .filter(|s| geom::dist(&s.location, p) <= r)
            .collect();
        let nearest = inside
            .iter()
            .map(|s| geom::dist(&s.location, p))
            .min_by(f64::total_cmp);
        medial_distances.push(nearest);
        medial_samples.append(&mut inside);
        if nearest.is_none() {
            rectifiability.push(rectifiability_check(lab, p, r, opts, opts.seed.wrapping_add(k as u64)));
        }
    }
    let medial_approach = medial_distances.iter().all(Option::is_some);
    let consistent = !(lne.verdict == Verdict::Diverging && !medial_approach);
    Ok(TheoremVerdict {
        point: p.to_vec(),
        radii: radii.to_vec(),
        lne_verdict: lne.verdict,
        lne,
        medial_approach,
        medial_distances,
        medial_samples,
        rectifiability,
        consistent,
    })
}

fn rectifiability_check(lab: &Lab, p: &[f64], r: f64, opts: &TheoremOptions, seed: u64) -> RectifiabilityCheck {
    let mut ids = lab.index.within(p, r);
    ids.sort_unstable();
    let mut check = RectifiabilityCheck {
        radius: r,
        pairs: 0,
        succeeded: 0,
        max_ratio: 0.0,
    };
    if ids.len() < 2 {
        return check;
    }
    let mut rng = rng(seed);
    for _ in 0..opts.path_pairs {
        let x = lab.index.point(ids[rng.gen_range(0..ids.len())]);
        let y = lab.index.point(ids[rng.gen_range(0..ids.len())]);
        let chord = geom::dist(x, y);
        if chord == 0.0 {
            continue;
        }
        check.pairs += 1;
        if let Ok(path) = project_segment(&lab.index, x, y, opts.path_steps, &lab.thresholds) {
            if path.length.is_finite() {
                check.succeeded += 1;
                check.max_ratio = check.max_ratio.max(path.length / chord);
            }
        }
    }
    check
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::ShapeSpec;

    #[test]
    fn circle_point_is_bounded_without_medial_approach() {
        let lab = Lab::new(&ShapeSpec::circle(1.0), 10_000, 7).unwrap();
        let v = verify_theorem(&lab, &[1.0, 0.0], &[0.5, 0.25, 0.125], &TheoremOptions::for_dim(2, 3)).unwrap();
        assert_eq!(v.lne_verdict, Verdict::Bounded);
        assert!(!v.medial_approach);
        assert!(v.consistent);
        assert!(v.rectifiable());
        assert_eq!(v.rectifiability.len(), 3);
    }

    #[test]
    fn off_shape_point_is_rejected() {
        let lab = Lab::new(&ShapeSpec::circle(1.0), 1000, 7).unwrap();
        assert!(matches!(
            verify_theorem(&lab, &[0.5, 0.0], &[0.1], &TheoremOptions::for_dim(2, 0)),
            Err(Error::NotOnShape(_))
        ));
    }
}
