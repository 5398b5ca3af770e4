use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{rng, uniform_in_ball};
use crate::error::{Error, Result};
use crate::geom;
use crate::medial::{scan_medial, GridSpec, ScanParams};
use crate::nearfield::{near_set_auto, ClosestPointMap, Thresholds};

/// Attempts per requested pair before sampling gives up.
const MAX_ATTEMPTS_PER_PAIR: usize = 1000;

/// A ball `V` certified free of medial samples.
///
/// `delta` is half the distance from `V` to the nearest medial sample found
/// by a scan of `V` inflated by `search_margin`, less one grid step. With no
/// sample in range the margin itself is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRegion {
    pub center: Vec<f64>,
    pub radius: f64,
    pub delta: f64,
    pub sup_dist: f64,
    pub grid_step: f64,
    pub search_margin: f64,
    /// Distance from the ball to the nearest medial sample, if one was found.
    pub medial_distance: Option<f64>,
}

impl ProbeRegion {
    pub fn certify<M: ClosestPointMap + ?Sized>(
        map: &M,
        th: &Thresholds,
        center: &[f64],
        radius: f64,
        step: f64,
        search_margin: f64,
    ) -> Result<Self> {
        if !(radius > 0.0 && search_margin > 0.0) {
            return Err(Error::InvalidRegion {
                center: center.to_vec(),
                delta: 0.0,
            });
        }
        let grid = GridSpec::lattice(center, radius + search_margin, step)?;
        let params = ScanParams::new(*th).with_jumps(step * 1e-3);
        let report = scan_medial(map, &grid, &params)?;
        let medial_distance = report
            .samples
            .iter()
            .map(|s| (geom::dist(&s.location, center) - radius).max(0.0))
            .min_by(f64::total_cmp);
        let reach = medial_distance.unwrap_or(search_margin).min(search_margin);
        let delta = 0.5 * (reach - step);
        if delta <= 0.0 {
            return Err(Error::InvalidRegion {
                center: center.to_vec(),
                delta,
            });
        }
        let inside: Vec<Vec<f64>> = report
            .nodes
            .iter()
            .filter(|n| geom::dist(&n.location, center) <= radius)
            .map(|n| n.location.clone())
            .collect();
        let lipschitz_cap = map.distance(center) + radius;
        let grid_sup = inside
            .par_iter()
            .map(|x| map.distance(x))
            .reduce(|| f64::NEG_INFINITY, f64::max)
            + 0.5 * grid.cell_diagonal();
        Ok(ProbeRegion {
            center: center.to_vec(),
            radius,
            delta,
            sup_dist: grid_sup.min(lipschitz_cap),
            grid_step: step,
            search_margin,
            medial_distance,
        })
    }

    /// `C = 2 (δ + sup_V d) / δ`.
    pub fn bound(&self) -> f64 {
        2.0 * (self.delta + self.sup_dist) / self.delta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub region: ProbeRegion,
    pub empirical_quotient: f64,
    pub explicit_bound: f64,
    pub pair_count: usize,
    pub min_pair_distance: f64,
    pub worst_pair: Option<[Vec<f64>; 2]>,
    pub on_set_quotient: f64,
    pub on_set_pair_count: usize,
    /// `2 + 4 h / (smallest on-set pair distance)`.
    pub on_set_bound: f64,
    pub fill_distance: f64,
    pub lambda: f64,
    pub seed: u64,
}

impl LipschitzReport {
    pub fn within_bound(&self) -> bool {
        self.empirical_quotient <= self.explicit_bound
    }

    pub fn on_set_within_bound(&self) -> bool {
        self.on_set_quotient <= self.on_set_bound
    }
}

/// Empirical Lipschitz quotient `‖m(p) − m(q)‖ / ‖p − q‖` over pairs drawn
/// uniformly from the region with `4 h ≤ ‖p − q‖ < δ`, plus the on-set
/// quotient with `p` replaced by its nearest point on the set.
pub fn lipschitz_quotient<M: ClosestPointMap + ?Sized>(
    map: &M,
    th: &Thresholds,
    region: &ProbeRegion,
    pair_count: usize,
    seed: u64,
) -> Result<LipschitzReport> {
    let invalid = || Error::InvalidRegion {
        center: region.center.clone(),
        delta: region.delta,
    };
    if region.delta <= 0.0 {
        return Err(invalid());
    }
    let floor = th.pair_floor();
    let mut rng = rng(seed);
    let mut pairs = Vec::with_capacity(pair_count);
    let mut attempts = 0usize;
    while pairs.len() < pair_count {
        attempts += 1;
        if attempts > MAX_ATTEMPTS_PER_PAIR * pair_count.max(1) {
            return Err(invalid());
        }
        let p = uniform_in_ball(&mut rng, &region.center, region.radius);
        let q = uniform_in_ball(&mut rng, &region.center, region.radius);
        let s = geom::dist(&p, &q);
        if s >= floor && s > 0.0 && s < region.delta {
            pairs.push((p, q));
        }
    }

    let lambda = th.lambda();
    let rep = |x: &[f64]| -> Result<Vec<f64>> {
        let ns = near_set_auto(map, x, th);
        if ns.spread >= lambda {
            return Err(Error::MedialPoint {
                point: x.to_vec(),
                spread: ns.spread,
                lambda,
            });
        }
        Ok(ns.representative())
    };

    struct PairOut {
        quotient: f64,
        on_set: Option<(f64, f64)>,
    }
    let outs: Vec<PairOut> = pairs
        .par_iter()
        .map(|(p, q)| -> Result<PairOut> {
            let s = geom::dist(p, q);
            let quotient = geom::dist(&rep(p)?, &rep(q)?) / s;
            let pp = map.select(p);
            let s_on = geom::dist(&pp, q);
            let on_set = (s_on >= floor && s_on > 0.0).then(|| {
                let ns = near_set_auto(map, q, th);
                let far = ns
                    .members
                    .iter()
                    .map(|xi| geom::dist(&pp, xi))
                    .fold(0.0, f64::max);
                (far / s_on, s_on)
            });
            Ok(PairOut { quotient, on_set })
        })
        .collect::<Result<_>>()?;

    let mut empirical = 0.0f64;
    let mut worst = None;
    for (o, (p, q)) in outs.iter().zip(&pairs) {
        if o.quotient > empirical || worst.is_none() {
            empirical = o.quotient.max(empirical);
            worst = Some([p.clone(), q.clone()]);
        }
    }
    let min_pair_distance = pairs
        .iter()
        .map(|(p, q)| geom::dist(p, q))
        .fold(f64::INFINITY, f64::min);
    let on: Vec<(f64, f64)> = outs.iter().filter_map(|o| o.on_set).collect();
    let on_set_quotient = on.iter().map(|o| o.0).fold(0.0, f64::max);
    let on_min = on.iter().map(|o| o.1).fold(f64::INFINITY, f64::min);
    Ok(LipschitzReport {
        region: region.clone(),
        empirical_quotient: empirical,
        explicit_bound: region.bound(),
        pair_count: pairs.len(),
        min_pair_distance,
        worst_pair: worst,
        on_set_quotient,
        on_set_pair_count: on.len(),
        on_set_bound: 2.0 + 4.0 * th.fill_distance / on_min,
        fill_distance: th.fill_distance,
        lambda,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnSetReport {
    /// `max over pairs of max_{ξ ∈ m(q)} ‖p − ξ‖ / ‖p − q‖`.
    pub quotient: f64,
    pub pair_count: usize,
    pub reach: f64,
    pub min_pair_distance: f64,
    pub fill_distance: f64,
    pub seed: u64,
}

/// On-set quotient with `p` drawn from `on_set` points and `q` uniform in
/// `B(p, reach)`, keeping `‖p − q‖ ≥ 4 h`.
pub fn on_set_quotient<M: ClosestPointMap + ?Sized>(
    map: &M,
    th: &Thresholds,
    on_set: &[Vec<f64>],
    reach: f64,
    pair_count: usize,
    seed: u64,
) -> Result<OnSetReport> {
    let floor = th.pair_floor();
    if on_set.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if !(reach > floor) {
        return Err(Error::InconsistentParams(format!(
            "reach {reach} must exceed the pair floor {floor}"
        )));
    }
    let mut rng = rng(seed);
    let mut pairs = Vec::with_capacity(pair_count);
    while pairs.len() < pair_count {
        let p = &on_set[rand::Rng::gen_range(&mut rng, 0..on_set.len())];
        let q = uniform_in_ball(&mut rng, p, reach);
        let s = geom::dist(p, &q);
        if s >= floor && s > 0.0 {
            pairs.push((p.clone(), q));
        }
    }
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|(p, q)| {
            let ns = near_set_auto(map, q, th);
            let far = ns.members.iter().map(|xi| geom::dist(p, xi)).fold(0.0, f64::max);
            far / geom::dist(p, q)
        })
        .collect();
    Ok(OnSetReport {
        quotient: ratios.iter().copied().fold(0.0, f64::max),
        pair_count: pairs.len(),
        reach,
        min_pair_distance: pairs
            .iter()
            .map(|(p, q)| geom::dist(p, q))
            .fold(f64::INFINITY, f64::min),
        fill_distance: th.fill_distance,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probes::Lab;
    use crate::shapes::ShapeSpec;

    #[test]
    fn two_points_region_has_zero_quotient() {
        let lab = Lab::new(&ShapeSpec::two_points([-1.0, 0.0], [1.0, 0.0]), 2, 0).unwrap();
        let region = ProbeRegion::certify(&lab.index, &lab.thresholds, &[2.0, 0.0], 0.4, 0.05, 1.0).unwrap();
        // Nearest bisector point is at distance 1.6 from the ball.
        assert!((region.delta - 0.5 * (1.0 - 0.05)).abs() < 1e-12);
        let r = lipschitz_quotient(&lab.index, &lab.thresholds, &region, 2000, 1).unwrap();
        assert_eq!(r.empirical_quotient, 0.0);
        assert!(r.within_bound() && r.on_set_within_bound());
    }

    #[test]
    fn region_touching_the_medial_axis_is_rejected() {
        let lab = Lab::new(&ShapeSpec::two_points([-1.0, 0.0], [1.0, 0.0]), 2, 0).unwrap();
        assert!(matches!(
            ProbeRegion::certify(&lab.index, &lab.thresholds, &[0.1, 0.0], 0.2, 0.02, 0.5),
            Err(Error::InvalidRegion { .. })
        ));
    }

    #[test]
    fn circle_region_bound_and_sup() {
        let lab = Lab::new(&ShapeSpec::circle(1.0), 10_000, 7).unwrap();
        let region = ProbeRegion::certify(&lab.index, &lab.thresholds, &[2.5, 0.0], 0.5, 0.02, 2.5).unwrap();
        assert!((region.delta - 1.0).abs() < 0.03, "{region:?}");
        assert!((region.sup_dist - 2.0).abs() < 0.03);
        assert!((region.bound() - 6.0).abs() < 0.2);
    }

    #[test]
    fn on_set_quotient_is_at_most_two() {
        let lab = Lab::new(&ShapeSpec::cusp(1.0), 5001, 4).unwrap();
        let r = on_set_quotient(&lab.index, &lab.thresholds, &lab.cloud.points, 0.5, 2000, 9).unwrap();
        assert!(r.quotient <= 2.0 * 1.01, "{}", r.quotient);
        assert!(r.quotient > 1.0);
    }
}
