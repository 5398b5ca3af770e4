use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng;
use crate::error::{Error, Result};
use crate::geom;
use crate::innermetric::GeodesicGraph;

/// Verdict growth factor and stability band.
const DIVERGENCE_FACTOR: f64 = 2.0;
const STABLE_BAND: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Diverging,
    Inconclusive,
}

/// Inner/outer ratio estimate at one radius.
///
/// Pairs are drawn from the shell `r/2 ≤ ‖x − p‖ ≤ r` of the ball, so the
/// estimate at radius `r` sees pairs at scale `r` rather than the
/// resolution-limited pairs arbitrarily close to `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalConstant {
    pub radius: f64,
    pub constant: f64,
    pub pair_count: usize,
    pub shell_points: usize,
    pub sources: usize,
    /// The ball held fewer than two connected points; `constant` is 1.
    #[serde(default)]
    pub vacuous: bool,
    pub worst_pair: Option<[Vec<f64>; 2]>,
}

/// Max of graph distance / chord over pairs in the shell of `B(p, radius)`
/// with chord at least `4 h`, using up to `sources` seeded source points.
pub fn local_lne_constant(
    graph: &GeodesicGraph,
    p: &[f64],
    radius: f64,
    sources: usize,
    seed: u64,
) -> Result<LocalConstant> {
    graph.snap(p)?;
    let too_few = || Error::TooFewPoints {
        center: p.to_vec(),
        radius,
    };
    let mut shell: Vec<usize> = graph
        .index()
        .within(p, radius)
        .into_iter()
        .filter(|&i| geom::dist(graph.point(i), p) >= 0.5 * radius)
        .collect();
    shell.sort_unstable();
    if shell.len() < 2 {
        return Err(too_few());
    }
    let mut rng = rng(seed);
    let chosen: Vec<usize> = if shell.len() <= sources {
        shell.clone()
    } else {
        let mut idx = sample(&mut rng, shell.len(), sources).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|k| shell[k]).collect()
    };
    let floor = (4.0 * graph.fill_distance()).max(f64::MIN_POSITIVE);
    let per_source: Vec<(f64, usize, Option<(usize, usize)>)> = chosen
        .par_iter()
        .map(|&s| {
            let d = graph.distances_to(s, &shell);
            let mut best = (0.0f64, 0usize, None);
            for (&t, &g) in shell.iter().zip(&d) {
                let chord = geom::dist(graph.point(s), graph.point(t));
                if t == s || !g.is_finite() || chord < floor {
                    continue;
                }
                best.1 += 1;
                let ratio = g / chord;
                if ratio > best.0 {
                    best.0 = ratio;
                    best.2 = Some((s, t));
                }
            }
            best
        })
        .collect();
    let pair_count: usize = per_source.iter().map(|b| b.1).sum();
    if pair_count == 0 {
        return Err(too_few());
    }
    let (constant, worst) = per_source
        .iter()
        .fold((0.0f64, None), |acc, b| if b.0 > acc.0 { (b.0, b.2) } else { acc });
    Ok(LocalConstant {
        radius,
        constant,
        pair_count,
        shell_points: shell.len(),
        sources: chosen.len(),
        vacuous: false,
        worst_pair: worst.map(|(s, t)| [graph.point(s).to_vec(), graph.point(t).to_vec()]),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LNEReport {
    pub point: Vec<f64>,
    pub radii: Vec<f64>,
    pub constants: Vec<f64>,
    pub details: Vec<LocalConstant>,
    pub verdict: Verdict,
    pub fill_distance: f64,
    pub connect_radius: f64,
    pub sources: usize,
    pub seed: u64,
}

/// Diverging when the constants increase monotonically and grow at least
/// 2x from first to last; otherwise bounded when the last two agree within
/// 20%; otherwise inconclusive.
pub fn classify(constants: &[f64]) -> Verdict {
    let n = constants.len();
    if n < 2 {
        return Verdict::Inconclusive;
    }
    let monotone = constants.windows(2).all(|w| w[1] >= w[0]);
    if monotone && constants[n - 1] >= DIVERGENCE_FACTOR * constants[0] {
        return Verdict::Diverging;
    }
    let (a, b) = (constants[n - 2], constants[n - 1]);
    if (b - a).abs() <= STABLE_BAND * a.min(b) {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    }
}

/// Local LNE constants over strictly decreasing `radii`, with a verdict.
pub fn estimate_lne_verdict(
    graph: &GeodesicGraph,
    p: &[f64],
    radii: &[f64],
    sources: usize,
    seed: u64,
) -> Result<LNEReport> {
    lne_report(graph, p, radii, sources, seed, false)
}

/// As [`estimate_lne_verdict`], but a ball with fewer than two connected
/// points (an isolated point of the set) contributes the constant 1.
pub(crate) fn lne_report(
    graph: &GeodesicGraph,
    p: &[f64],
    radii: &[f64],
    sources: usize,
    seed: u64,
    isolated_is_one: bool,
) -> Result<LNEReport> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::RadiiNotDecreasing);
    }
    let mut details = Vec::with_capacity(radii.len());
    for (k, &r) in radii.iter().enumerate() {
        match local_lne_constant(graph, p, r, sources, seed.wrapping_add(k as u64)) {
            Ok(c) => details.push(c),
            Err(Error::TooFewPoints { .. }) if isolated_is_one => details.push(LocalConstant {
                radius: r,
                constant: 1.0,
                pair_count: 0,
                shell_points: 0,
                sources: 0,
                vacuous: true,
                worst_pair: None,
            }),
            Err(e) => return Err(e),
        }
    }
    let constants: Vec<f64> = details.iter().map(|d| d.constant).collect();
    Ok(LNEReport {
        point: p.to_vec(),
        radii: radii.to_vec(),
        verdict: classify(&constants),
        constants,
        details,
        fill_distance: graph.fill_distance(),
        connect_radius: graph.connect_radius(),
        sources,
        seed,
    })
}
