//! Small dense-vector helpers. Points are plain `[f64]` slices of the
//! ambient dimension.

use std::cmp::Ordering;

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

/// `a + t (b - a)`.
pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// `base + t * dir`.
pub fn along(base: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    base.iter().zip(dir).map(|(b, d)| b + t * d).collect()
}

pub fn normalized(a: &[f64]) -> Option<Vec<f64>> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| scale(a, 1.0 / n))
}

pub fn centroid<'a, I>(points: I, dim: usize) -> Vec<f64>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut acc = vec![0.0; dim];
    let mut n = 0usize;
    for p in points {
        for (a, x) in acc.iter_mut().zip(p) {
            *a += x;
        }
        n += 1;
    }
    if n > 0 {
        for a in &mut acc {
            *a /= n as f64;
        }
    }
    acc
}

/// Lexicographic order on coordinates, NaN-free inputs assumed.
pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Length of the polyline through `vertices`.
pub fn polyline_length(vertices: &[Vec<f64>]) -> f64 {
    vertices.windows(2).map(|w| dist(&w[0], &w[1])).sum()
}

/// Farthest pair among `points`. Exact for small sets; for large sets the
/// search is restricted to extreme points along a fixed family of directions,
/// which is exact for centrally symmetric and convex-position sets such as
/// sampled circles and rings.
pub fn farthest_pair(points: &[Vec<f64>]) -> Option<(usize, usize, f64)> {
    const EXACT_LIMIT: usize = 2048;
    match points.len() {
        0 => None,
        1 => Some((0, 0, 0.0)),
        n if n <= EXACT_LIMIT => Some(brute_farthest(points, &(0..n).collect::<Vec<_>>())),
        _ => {
            let dim = points[0].len();
            let dirs = extreme_directions(dim);
            let mut cand: Vec<usize> = Vec::with_capacity(2 * dirs.len());
            for d in &dirs {
                let (mut lo, mut hi) = (0usize, 0usize);
                let (mut lo_v, mut hi_v) = (f64::INFINITY, f64::NEG_INFINITY);
                for (i, p) in points.iter().enumerate() {
                    let v = dot(p, d);
                    if v < lo_v {
                        lo_v = v;
                        lo = i;
                    }
                    if v > hi_v {
                        hi_v = v;
                        hi = i;
                    }
                }
                cand.push(lo);
                cand.push(hi);
            }
            cand.sort_unstable();
            cand.dedup();
            Some(brute_farthest(points, &cand))
        }
    }
}

fn brute_farthest(points: &[Vec<f64>], ids: &[usize]) -> (usize, usize, f64) {
    let mut best = (ids[0], ids[0], 0.0f64);
    for (k, &i) in ids.iter().enumerate() {
        for &j in &ids[k + 1..] {
            let d2 = dist2(&points[i], &points[j]);
            if d2 > best.2 {
                best = (i, j, d2);
            }
        }
    }
    (best.0, best.1, best.2.sqrt())
}

// Deterministic spread of unit directions: coordinate axes plus points of a
// golden-angle sequence on the sphere (or circle).
fn extreme_directions(dim: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        dirs.push(e);
    }
    let count = 180;
    match dim {
        1 => {}
        2 => {
            for k in 0..count {
                let a = std::f64::consts::PI * k as f64 / count as f64;
                dirs.push(vec![a.cos(), a.sin()]);
            }
        }
        _ => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            for k in 0..count {
                let z = 1.0 - (k as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let a = golden * k as f64;
                let mut v = vec![0.0; dim];
                v[0] = r * a.cos();
                v[1] = r * a.sin();
                v[2] = z;
                dirs.push(v);
            }
        }
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn farthest_pair_on_large_ring_matches_diameter() {
        let n = 5000;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64 + 0.1;
                vec![a.cos(), a.sin()]
            })
            .collect();
        let (_, _, d) = farthest_pair(&pts).unwrap();
        assert!((d - 2.0).abs() < 1e-6);
    }

    #[test]
    fn lex_order_breaks_ties_by_later_coordinates() {
        assert_eq!(lex_cmp(&[1.0, 0.0], &[1.0, 1.0]), Ordering::Less);
        assert_eq!(lex_cmp(&[-1.0, 5.0], &[1.0, 0.0]), Ordering::Less);
    }

    #[test]
    fn single_point_has_zero_spread() {
        assert_eq!(farthest_pair(&[vec![1.0, 2.0]]), Some((0, 0, 0.0)));
    }
}
