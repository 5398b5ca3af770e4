use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{helix_point, Geometry, Shape};
use crate::error::{Error, Result};
use crate::geom;
use crate::nearfield::SpatialIndex;

/// Finite sample of a shape with its estimated fill distance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleCloud {
    pub points: Vec<Vec<f64>>,
    /// Estimated `sup_{x ∈ X} min_i ‖x - p_i‖`.
    pub fill_distance: f64,
    pub seed: u64,
    pub shape_ref: String,
}

impl SampleCloud {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Shape {
    /// Default refinement ceiling: a quarter of the bounding-box diagonal.
    pub fn default_fill_ceiling(&self) -> f64 {
        0.25 * self.scale()
    }

    /// Deterministic sample of roughly `count` points.
    ///
    /// One-parameter shapes are sampled equispaced in arc length (the circle
    /// with a seeded phase); the cusp and the full helix use an odd count so
    /// that the sample is mirror-symmetric; the cone is sampled on rings with
    /// seeded phases and returns at most `count` points; `two_points` always
    /// returns its two points.
    pub fn sample(&self, count: usize, seed: u64) -> Result<SampleCloud> {
        self.sample_with_ceiling(count, seed, self.default_fill_ceiling())
    }

    pub fn sample_with_ceiling(&self, count: usize, seed: u64, ceiling: f64) -> Result<SampleCloud> {
        if count < 2 {
            return Err(Error::TooFewSamples { count, min: 2 });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (points, probes) = match &self.geometry {
            Geometry::Circle { center, radius } => {
                let phase = rng.gen::<f64>() * 2.0 * PI / count as f64;
                let at = |a: f64| vec![center[0] + radius * a.cos(), center[1] + radius * a.sin()];
                let step = 2.0 * PI / count as f64;
                let pts = (0..count).map(|i| at(phase + step * i as f64)).collect();
                let probes = (0..count).map(|i| at(phase + step * (i as f64 + 0.5))).collect();
                (pts, probes)
            }
            Geometry::TwoPoints { a, b } => (vec![a.to_vec(), b.to_vec()], Vec::new()),
            Geometry::Cusp { t_max, scale } => {
                let per_branch = (count - 1) / 2;
                if per_branch == 0 {
                    return Err(Error::TooFewSamples { count, min: 3 });
                }
                // Unit-scale arc length of (t, t^{3/2}) and its inverse.
                let arc = |t: f64| 8.0 / 27.0 * ((1.0 + 2.25 * t).powf(1.5) - 1.0);
                let inv = |s: f64| 4.0 / 9.0 * ((27.0 * s / 8.0 + 1.0).powf(2.0 / 3.0) - 1.0);
                let total = arc(*t_max);
                let at = |s: f64, sign: f64| {
                    let t = if s >= total { *t_max } else { inv(s).min(*t_max) };
                    vec![scale * t, sign * scale * t.powf(1.5)]
                };
                let step = total / per_branch as f64;
                let mut pts = vec![vec![0.0, 0.0]];
                let mut probes = Vec::new();
                for sign in [1.0, -1.0] {
                    for j in 1..=per_branch {
                        pts.push(at(step * j as f64, sign));
                        probes.push(at(step * (j as f64 - 0.5), sign));
                    }
                }
                (pts, probes)
            }
            Geometry::Helix { u_lo, u_hi, scale } => {
                let arc = |u: f64| 0.5 * u * (1.0 + 4.0 * u * u).sqrt() + 0.25 * (2.0 * u).asinh();
                let inv = |s: f64, hi: f64| {
                    let (mut a, mut b) = (0.0, hi);
                    for _ in 0..200 {
                        let m = 0.5 * (a + b);
                        if arc(m) < s {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    0.5 * (a + b)
                };
                if *u_lo < 0.0 {
                    // Symmetric u ∈ [-U, U]: origin plus mirrored pairs.
                    let per_side = (count - 1) / 2;
                    if per_side == 0 {
                        return Err(Error::TooFewSamples { count, min: 3 });
                    }
                    let total = arc(*u_hi);
                    let step = total / per_side as f64;
                    let mut pts = vec![helix_point(0.0, *scale)];
                    let mut probes = Vec::new();
                    for j in 1..=per_side {
                        let u = if j == per_side { *u_hi } else { inv(step * j as f64, *u_hi) };
                        let um = inv(step * (j as f64 - 0.5), *u_hi);
                        let p = helix_point(u, *scale);
                        let pm = helix_point(um, *scale);
                        pts.push(p.clone());
                        pts.push(vec![p[0], -p[1], p[2]]);
                        probes.push(pm.clone());
                        probes.push(vec![pm[0], -pm[1], pm[2]]);
                    }
                    (pts, probes)
                } else {
                    let total = arc(*u_hi) - arc(*u_lo);
                    let base = arc(*u_lo);
                    let step = total / (count - 1) as f64;
                    let pts = (0..count)
                        .map(|j| {
                            let u = match j {
                                0 => *u_lo,
                                j if j == count - 1 => *u_hi,
                                j => inv(base + step * j as f64, *u_hi),
                            };
                            helix_point(u, *scale)
                        })
                        .collect();
                    let probes = (0..count - 1)
                        .map(|j| helix_point(inv(base + step * (j as f64 + 0.5), *u_hi), *scale))
                        .collect();
                    (pts, probes)
                }
            }
            Geometry::Cone { r_max, scale } => cone_rings(*r_max * scale, count, &mut rng)?,
            Geometry::Segments(segs) => {
                let lens: Vec<f64> = segs.iter().map(|s| geom::dist(&s[0], &s[1])).collect();
                let total: f64 = lens.iter().sum();
                let mut pts = Vec::new();
                let mut probes = Vec::new();
                for (s, len) in segs.iter().zip(&lens) {
                    let share = if total > 0.0 { len / total } else { 1.0 / segs.len() as f64 };
                    let n = ((count as f64 * share).round() as usize).max(2);
                    for i in 0..n {
                        pts.push(geom::lerp(&s[0], &s[1], i as f64 / (n - 1) as f64));
                        if i + 1 < n {
                            probes.push(geom::lerp(&s[0], &s[1], (i as f64 + 0.5) / (n - 1) as f64));
                        }
                    }
                }
                (pts, probes)
            }
            Geometry::Cloud(pts) => (pts.clone(), Vec::new()),
        };

        let fill = match &self.geometry {
            Geometry::TwoPoints { .. } => 0.0,
            Geometry::Cloud(_) => cloud_fill_proxy(&points),
            _ => {
                let index = SpatialIndex::from_points(&points)?;
                probes
                    .iter()
                    .map(|p| index.nearest(p).1)
                    .fold(0.0, f64::max)
            }
        };
        if fill > ceiling {
            return Err(Error::Refinement { fill, ceiling });
        }
        Ok(SampleCloud {
            points,
            fill_distance: fill,
            seed,
            shape_ref: self.spec.label(),
        })
    }
}

// Rings of constant radius on the cone surface, spaced evenly in slant
// length; ring j carries an even number of points close to √2 π j so that
// the in-surface spacing is isotropic and antipodal pairs exist.
type Sampled = (Vec<Vec<f64>>, Vec<Vec<f64>>);

fn cone_rings(r_max: f64, count: usize, rng: &mut ChaCha8Rng) -> Result<Sampled> {
    let ring_size = |j: usize| -> usize {
        let m = (2f64.sqrt() * PI * j as f64).round() as usize;
        (m + m % 2).max(4)
    };
    let mut rings = 0usize;
    let mut total = 1usize;
    while total + ring_size(rings + 1) <= count {
        rings += 1;
        total += ring_size(rings);
    }
    if rings == 0 {
        return Err(Error::TooFewSamples { count, min: 1 + ring_size(1) });
    }
    let dr = r_max / rings as f64;
    let at = |r: f64, a: f64| vec![r * a.cos(), r * a.sin(), r];
    let mut pts = vec![vec![0.0; 3]];
    let mut probes = Vec::new();
    for j in 1..=rings {
        let m = ring_size(j);
        let r = dr * j as f64;
        let step = 2.0 * PI / m as f64;
        let phase = rng.gen::<f64>() * step;
        for i in 0..m {
            pts.push(at(r, phase + step * i as f64));
            probes.push(at(r, phase + step * (i as f64 + 0.5)));
        }
        // Probes between ring j-1 and ring j at four times the ring density.
        let rm = r - 0.5 * dr;
        for i in 0..4 * m {
            probes.push(at(rm, 2.0 * PI * i as f64 / (4 * m) as f64));
        }
    }
    Ok((pts, probes))
}

// No parametrisation is known for raw clouds: half the largest
// nearest-neighbour gap is used as the covering-radius proxy.
fn cloud_fill_proxy(points: &[Vec<f64>]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let Ok(index) = SpatialIndex::from_points(points) else {
        return 0.0;
    };
    (0..points.len())
        .map(|i| index.nearest_other(i))
        .fold(0.0, f64::max)
        * 0.5
}
