use crate::error::{Error, Result};
use crate::geom;
use crate::shapes::SampleCloud;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf { start: usize, end: usize },
    Split { left: usize, right: usize },
}

/// Exact k-d tree over a point cloud, split at coordinate medians along the
/// axis of widest extent. Every node keeps the bounding box of its points,
/// which is what prunes queries far from thin sets such as curves.
///
/// Nearest-neighbour ties are broken towards the lexicographically smallest
/// point, so every query answer is independent of the tree layout.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    dim: usize,
    /// Coordinates in tree order, flattened.
    coords: Vec<f64>,
    /// Tree position -> original point id.
    ids: Vec<usize>,
    /// Original point id -> tree position.
    slot: Vec<usize>,
    nodes: Vec<Node>,
    /// Per node: `lo` then `hi` corner, `2 * dim` values.
    boxes: Vec<f64>,
    bounds: (Vec<f64>, Vec<f64>),
    cloud_ref: String,
    fill_distance: f64,
}

impl SpatialIndex {
    /// Builds the index over a sample cloud.
    pub fn build(cloud: &SampleCloud) -> Result<Self> {
        let mut index = Self::from_points(&cloud.points)?;
        index.cloud_ref = format!("{}#seed={}", cloud.shape_ref, cloud.seed);
        index.fill_distance = cloud.fill_distance;
        Ok(index)
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map(Vec::len).ok_or(Error::EmptyCloud)?;
        if dim == 0 {
            return Err(Error::EmptyCloud);
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                got: p.len(),
            });
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::new();
        let mut boxes = Vec::new();
        build_node(points, &mut order, 0, dim, &mut nodes, &mut boxes);

        let mut coords = Vec::with_capacity(points.len() * dim);
        for &i in &order {
            coords.extend_from_slice(&points[i]);
        }
        let mut slot = vec![0; points.len()];
        for (pos, &i) in order.iter().enumerate() {
            slot[i] = pos;
        }
        let bounds = crate::shapes::bbox_of(points.iter().map(Vec::as_slice), dim);
        Ok(SpatialIndex {
            dim,
            coords,
            ids: order,
            slot,
            nodes,
            boxes,
            bounds,
            cloud_ref: String::new(),
            fill_distance: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        (&self.bounds.0, &self.bounds.1)
    }

    pub fn cloud_ref(&self) -> &str {
        &self.cloud_ref
    }

    /// Fill distance of the cloud the index was built from (0 for raw points).
    pub fn fill_distance(&self) -> f64 {
        self.fill_distance
    }

    /// Coordinates of the point with original id `id`.
    pub fn point(&self, id: usize) -> &[f64] {
        self.at(self.slot[id])
    }

    #[inline]
    fn at(&self, pos: usize) -> &[f64] {
        &self.coords[pos * self.dim..(pos + 1) * self.dim]
    }

    /// Nearest point id and its Euclidean distance.
    pub fn nearest(&self, a: &[f64]) -> (usize, f64) {
        let (pos, d2) = self.nearest_pos(a, usize::MAX);
        (self.ids[pos], d2.sqrt())
    }

    /// Distance from point `id` to its nearest other cloud point.
    pub fn nearest_other(&self, id: usize) -> f64 {
        if self.len() < 2 {
            return 0.0;
        }
        let pos = self.slot[id];
        self.nearest_pos(self.at(pos), pos).1.sqrt()
    }

    fn nearest_pos(&self, a: &[f64], exclude: usize) -> (usize, f64) {
        assert_eq!(a.len(), self.dim, "query dimension");
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_rec(0, a, exclude, &mut best);
        best
    }

    fn nearest_rec(&self, node: usize, a: &[f64], exclude: usize, best: &mut (usize, f64)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for pos in start..end {
                    if pos == exclude {
                        continue;
                    }
                    let d2 = geom::dist2(self.at(pos), a);
                    let better = d2 < best.1
                        || (d2 == best.1
                            && best.0 != usize::MAX
                            && geom::lex_cmp(self.at(pos), self.at(best.0)).is_lt());
                    if better {
                        *best = (pos, d2);
                    }
                }
            }
            Node::Split { left, right } => {
                let (dl, dr) = (self.box_dist2(left, a), self.box_dist2(right, a));
                let ((near, dn), (far, df)) = if dl <= dr {
                    ((left, dl), (right, dr))
                } else {
                    ((right, dr), (left, dl))
                };
                if dn <= best.1 {
                    self.nearest_rec(near, a, exclude, best);
                }
                if df <= best.1 {
                    self.nearest_rec(far, a, exclude, best);
                }
            }
        }
    }

    /// Ids of all points with `‖p - a‖² ≤ r2`, in unspecified order.
    pub fn within_sq(&self, a: &[f64], r2: f64) -> Vec<usize> {
        assert_eq!(a.len(), self.dim, "query dimension");
        let mut out = Vec::new();
        self.within_rec(0, a, r2, &mut out);
        out
    }

    /// Ids of all points with `‖p - a‖ ≤ r`, in unspecified order.
    pub fn within(&self, a: &[f64], r: f64) -> Vec<usize> {
        self.within_sq(a, r * r)
    }

    fn within_rec(&self, node: usize, a: &[f64], r2: f64, out: &mut Vec<usize>) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                out.extend((start..end).filter(|&pos| geom::dist2(self.at(pos), a) <= r2).map(|pos| self.ids[pos]));
            }
            Node::Split { left, right } => {
                for child in [left, right] {
                    if self.box_dist2(child, a) <= r2 {
                        self.within_rec(child, a, r2, out);
                    }
                }
            }
        }
    }

    /// Squared distance from `a` to the bounding box of `node`.
    #[inline]
    fn box_dist2(&self, node: usize, a: &[f64]) -> f64 {
        let b = &self.boxes[2 * self.dim * node..2 * self.dim * (node + 1)];
        let (lo, hi) = b.split_at(self.dim);
        let mut d2 = 0.0;
        for k in 0..self.dim {
            let e = (lo[k] - a[k]).max(a[k] - hi[k]).max(0.0);
            d2 += e * e;
        }
        d2
    }

    /// Squared distance to the nearest point (no tie-breaking needed).
    pub(crate) fn nearest_dist2(&self, a: &[f64]) -> f64 {
        self.nearest_pos(a, usize::MAX).1
    }
}

fn build_node(
    points: &[Vec<f64>],
    order: &mut [usize],
    offset: usize,
    dim: usize,
    nodes: &mut Vec<Node>,
    boxes: &mut Vec<f64>,
) -> usize {
    let id = nodes.len();
    let (lo, hi) = crate::shapes::bbox_of(order.iter().map(|&i| points[i].as_slice()), dim);
    boxes.extend_from_slice(&lo);
    boxes.extend_from_slice(&hi);
    if order.len() <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            start: offset,
            end: offset + order.len(),
        });
        return id;
    }
    let axis = (0..dim)
        .map(|k| (k, hi[k] - lo[k]))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0;
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&i, &j| {
        points[i][axis]
            .total_cmp(&points[j][axis])
            .then(i.cmp(&j))
    });
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (l, r) = order.split_at_mut(mid);
    let left = build_node(points, l, offset, dim, nodes, boxes);
    let right = build_node(points, r, offset + mid, dim, nodes, boxes);
    nodes[id] = Node::Split { left, right };
    id
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn linear_nearest(points: &[Vec<f64>], a: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, p) in points.iter().enumerate() {
            let d2 = geom::dist2(p, a);
            if d2 < best.1 || (d2 == best.1 && geom::lex_cmp(p, &points[best.0]).is_lt()) {
                best = (i, d2);
            }
        }
        (best.0, best.1.sqrt())
    }

    #[test]
    fn empty_cloud_is_rejected() {
        assert!(matches!(SpatialIndex::from_points(&[]), Err(Error::EmptyCloud)));
    }

    #[test]
    fn circle_queries_agree_with_linear_scan() {
        let shape = crate::shapes::Shape::new(&crate::shapes::ShapeSpec::circle(1.0)).unwrap();
        let cloud = shape.sample(1000, 7).unwrap();
        let index = SpatialIndex::build(&cloud).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            assert_eq!(index.nearest(&a), linear_nearest(&cloud.points, &a));
        }
    }

    #[test]
    fn ties_resolve_lexicographically() {
        let pts = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let index = SpatialIndex::from_points(&pts).unwrap();
        assert_eq!(index.nearest(&[0.0, 0.0]).0, 1);
    }

    proptest! {
        #[test]
        fn nearest_and_ball_queries_are_exact(
            pts in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 3), 1..300),
            q in prop::collection::vec(-12.0f64..12.0, 3),
            r in 0.0f64..8.0,
        ) {
            let index = SpatialIndex::from_points(&pts).unwrap();
            let (id, d) = index.nearest(&q);
            let (lid, ld) = linear_nearest(&pts, &q);
            prop_assert_eq!(d, ld);
            prop_assert_eq!(&pts[id], &pts[lid]);

            let mut got = index.within(&q, r);
            got.sort_unstable();
            let want: Vec<usize> = (0..pts.len()).filter(|&i| geom::dist2(&pts[i], &q) <= r * r).collect();
            prop_assert_eq!(got, want);
        }
    }
}
