//! Static k-d tree over points of R^S for ball and nearest-neighbour queries.

const LEAF_SIZE: usize = 12;

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

#[derive(Clone, Debug)]
pub struct KdTree {
    dim: usize,
    coords: Vec<f64>,
    order: Vec<usize>,
    root: Node,
}

impl KdTree {
    /// `points` yields coordinate slices of equal length.
    pub fn build<'a, I>(dim: usize, points: I) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut coords = Vec::new();
        for p in points {
            debug_assert_eq!(p.len(), dim);
            coords.extend_from_slice(p);
        }
        let n = coords.len() / dim.max(1);
        let mut order: Vec<usize> = (0..n).collect();
        let root = build_node(dim, &coords, &mut order, 0, n);
        Self {
            dim,
            coords,
            order,
            root,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    #[inline]
    fn point(&self, idx: usize) -> &[f64] {
        &self.coords[idx * self.dim..(idx + 1) * self.dim]
    }

    /// Indices of points with `|p - center| < radius` (open ball), sorted.
    pub fn within(&self, center: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        let r2 = radius * radius;
        self.within_node(&self.root, center, radius, r2, &mut out);
        out.sort_unstable();
        out
    }

    fn within_node(&self, node: &Node, c: &[f64], r: f64, r2: f64, out: &mut Vec<usize>) {
        match node {
            Node::Leaf { start, end } => {
                for &idx in &self.order[*start..*end] {
                    if dist2(self.point(idx), c) < r2 {
                        out.push(idx);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let d = c[*axis] - value;
                if d < r {
                    self.within_node(left, c, r, r2, out);
                }
                if d > -r {
                    self.within_node(right, c, r, r2, out);
                }
            }
        }
    }

    /// Nearest point to `center` among those farther than `min_dist`
    /// (use 0 to allow coincident points). Returns `(index, distance)`.
    pub fn nearest_beyond(&self, center: &[f64], min_dist: f64) -> Option<(usize, f64)> {
        let mut best = (usize::MAX, f64::INFINITY);
        let min2 = if min_dist < 0.0 { -1.0 } else { min_dist * min_dist };
        self.nearest_node(&self.root, center, min2, &mut best);
        (best.0 != usize::MAX).then(|| (best.0, best.1.sqrt()))
    }

    pub fn nearest(&self, center: &[f64]) -> Option<(usize, f64)> {
        self.nearest_beyond(center, -1.0)
    }

    fn nearest_node(&self, node: &Node, c: &[f64], min2: f64, best: &mut (usize, f64)) {
        match node {
            Node::Leaf { start, end } => {
                for &idx in &self.order[*start..*end] {
                    let d2 = dist2(self.point(idx), c);
                    if d2 > min2 && (d2 < best.1 || (d2 == best.1 && idx < best.0)) {
                        *best = (idx, d2);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let d = c[*axis] - value;
                let (near, far) = if d < 0.0 { (left, right) } else { (right, left) };
                self.nearest_node(near, c, min2, best);
                if d * d <= best.1 {
                    self.nearest_node(far, c, min2, best);
                }
            }
        }
    }
}

fn build_node(dim: usize, coords: &[f64], order: &mut [usize], start: usize, end: usize) -> Node {
    if end - start <= LEAF_SIZE || dim == 0 {
        return Node::Leaf { start, end };
    }
    let slice = &mut order[start..end];
    let mut axis = 0;
    let mut widest = -1.0;
    for a in 0..dim {
        let (lo, hi) = slice.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
            let v = coords[i * dim + a];
            (lo.min(v), hi.max(v))
        });
        if hi - lo > widest {
            widest = hi - lo;
            axis = a;
        }
    }
    if widest <= 0.0 {
        return Node::Leaf { start, end };
    }
    let mid = slice.len() / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| coords[a * dim + axis].total_cmp(&coords[b * dim + axis]));
    let value = coords[slice[mid] * dim + axis];
    let left = build_node(dim, coords, order, start, start + mid);
    let right = build_node(dim, coords, order, start + mid, end);
    Node::Split {
        axis,
        value,
        left: Box::new(left),
        right: Box::new(right),
    }
}

#[inline]
fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(n: usize, dim: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect()
    }

    #[test]
    fn ball_query_matches_brute_force() {
        for dim in [1, 2, 3, 5] {
            let pts = cloud(500, dim, dim as u64);
            let tree = KdTree::build(dim, pts.iter().map(|p| p.as_slice()));
            for (qi, q) in pts.iter().enumerate().take(40) {
                let r = 0.1 + 0.02 * qi as f64;
                let brute: Vec<usize> = (0..pts.len()).filter(|&i| dist2(&pts[i], q) < r * r).collect();
                assert_eq!(tree.within(q, r), brute);
            }
        }
    }

    #[test]
    fn nearest_matches_brute_force() {
        let pts = cloud(300, 3, 9);
        let tree = KdTree::build(3, pts.iter().map(|p| p.as_slice()));
        for q in cloud(50, 3, 10) {
            let (i, d) = tree.nearest(&q).unwrap();
            let best = pts.iter().map(|p| dist2(p, &q)).fold(f64::INFINITY, f64::min).sqrt();
            assert!((d - best).abs() < 1e-14);
            assert!((dist2(&pts[i], &q).sqrt() - best).abs() < 1e-14);
        }
    }

    #[test]
    fn nearest_beyond_skips_coincident() {
        let pts = [vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]];
        let tree = KdTree::build(2, pts.iter().map(|p| p.as_slice()));
        let (i, d) = tree.nearest_beyond(&[0.0, 0.0], 1e-12).unwrap();
        assert_eq!(i, 2);
        assert_eq!(d, 1.0);
    }
}
