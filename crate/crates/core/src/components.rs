//! Connected components: union-find labeling, ordered sizes `L1 ≥ L2 ≥ …`,
//! Euclidean diameters and the giant-fraction statistic.

use crate::error::{param_err, Result};
use crate::geometry::Point;
use crate::graph::{keep_pair, CellIndex, ConnectionFunction, Graph, ModelParams};
use crate::points::PointSet;
use crate::rng::SeedSpec;

/// Disjoint-set forest with union by size and path compression.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] as usize != root {
            root = self.parent[root] as usize;
        }
        let mut cur = x;
        while self.parent[cur] as usize != root {
            let next = self.parent[cur] as usize;
            self.parent[cur] = root as u32;
            cur = next;
        }
        root
    }

    /// Returns `false` when `a` and `b` were already connected.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn connected(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn component_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r] as usize
    }
}

/// Component partition with canonical labels: the label of a vertex is the
/// smallest vertex index in its component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    labels: Vec<u32>,
    /// `(size, label)` sorted by size descending, then label ascending.
    order: Vec<(usize, u32)>,
}

impl ComponentLabeling {
    pub fn from_union_find(uf: &mut UnionFind) -> Self {
        let n = uf.len();
        let mut canon = vec![u32::MAX; n];
        let mut labels = vec![0u32; n];
        let mut sizes = vec![0usize; n];
        for v in 0..n {
            let r = uf.find(v);
            if canon[r] == u32::MAX {
                canon[r] = v as u32;
            }
            labels[v] = canon[r];
            sizes[canon[r] as usize] += 1;
        }
        let mut order: Vec<(usize, u32)> =
            sizes.iter().enumerate().filter(|(_, &s)| s > 0).map(|(l, &s)| (s, l as u32)).collect();
        order.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        ComponentLabeling { labels, order }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> u32 {
        self.labels[v]
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_components(&self) -> usize {
        self.order.len()
    }

    /// Component sizes, largest first.
    pub fn sizes(&self) -> Vec<usize> {
        self.order.iter().map(|o| o.0).collect()
    }

    /// Size of the `k`-th largest component (0-based), 0 if absent.
    pub fn kth_size(&self, k: usize) -> usize {
        self.order.get(k).map_or(0, |o| o.0)
    }

    /// Label of the `k`-th largest component (ties broken by label).
    pub fn kth_label(&self, k: usize) -> Option<u32> {
        self.order.get(k).map(|o| o.1)
    }

    /// Vertex lists, in the same order as [`sizes`](Self::sizes).
    pub fn members_by_component(&self) -> Vec<Vec<usize>> {
        let mut slot = vec![usize::MAX; self.labels.len()];
        for (k, &(_, l)) in self.order.iter().enumerate() {
            slot[l as usize] = k;
        }
        let mut out: Vec<Vec<usize>> = self.order.iter().map(|o| Vec::with_capacity(o.0)).collect();
        for (v, &l) in self.labels.iter().enumerate() {
            out[slot[l as usize]].push(v);
        }
        out
    }

    pub fn members(&self, label: u32) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] == label).collect()
    }
}

pub fn label_components(g: &Graph) -> ComponentLabeling {
    let mut uf = UnionFind::new(g.num_vertices());
    for &(a, b) in g.edges() {
        uf.union(a as usize, b as usize);
    }
    ComponentLabeling::from_union_find(&mut uf)
}

/// Components of the percolated random geometric graph on `points`, without
/// materializing the graph. Same edge rule as
/// [`build_percolated`](crate::graph::build_percolated).
pub fn label_percolated(points: &PointSet, cf: &ConnectionFunction, seed: &SeedSpec) -> ComponentLabeling {
    let key = seed.key();
    let mut uf = UnionFind::new(points.len());
    let idx = CellIndex::new(&points.points, &points.rect, 1.0);
    idx.for_each_pair_within(1.0, |a, b| {
        if keep_pair(points, cf, key, a, b) {
            uf.union(a, b);
        }
    });
    ComponentLabeling::from_union_find(&mut uf)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GiantStats {
    pub l1: usize,
    pub l2: usize,
    /// `L1 / (λ n)`; `None` when `λ n = 0`.
    pub theta_hat: Option<f64>,
    pub n: f64,
    pub num_components: usize,
    /// Euclidean diameter of each component, largest component first.
    pub diameters: Vec<f64>,
}

impl GiantStats {
    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().copied().fold(0.0, f64::max)
    }
}

/// Components at or above this size use the convex hull for their diameter.
pub const HULL_DIAMETER_THRESHOLD: usize = 10_000;

pub fn giant_stats(cl: &ComponentLabeling, g: &Graph, params: &ModelParams, n: f64) -> Result<GiantStats> {
    if cl.num_vertices() != g.num_vertices() {
        return param_err("labeling does not match graph");
    }
    let denom = params.lambda * n;
    let l1 = cl.kth_size(0);
    let diameters = cl
        .members_by_component()
        .iter()
        .map(|m| {
            let pts: Vec<Point> = m.iter().map(|&v| g.point(v)).collect();
            if pts.len() < HULL_DIAMETER_THRESHOLD {
                diameter_exact(&pts)
            } else {
                diameter_hull(&pts)
            }
        })
        .collect();
    Ok(GiantStats {
        l1,
        l2: cl.kth_size(1),
        theta_hat: (denom > 0.0).then(|| l1 as f64 / denom),
        n,
        num_components: cl.num_components(),
        diameters,
    })
}

/// Maximum pairwise distance by direct scan.
pub fn diameter_exact(pts: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            best = best.max(pts[i].dist2(&pts[j]));
        }
    }
    best.sqrt()
}

fn cross(o: &Point, a: &Point, b: &Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull, counter-clockwise, without collinear points (monotone chain).
pub fn convex_hull(pts: &[Point]) -> Vec<Point> {
    let mut p: Vec<Point> = pts.to_vec();
    p.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * p.len());
    // lower chain left to right, then upper chain right to left
    for q in &p {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], q) <= 0.0 {
            hull.pop();
        }
        hull.push(*q);
    }
    let lower = hull.len() + 1;
    for q in p.iter().rev().skip(1) {
        while hull.len() >= lower && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], q) <= 0.0 {
            hull.pop();
        }
        hull.push(*q);
    }
    hull.pop();
    hull
}

/// Diameter via rotating calipers on the convex hull.
pub fn diameter_hull(pts: &[Point]) -> f64 {
    let h = convex_hull(pts);
    match h.len() {
        0 | 1 => return 0.0,
        2 => return h[0].dist(&h[1]),
        _ => {}
    }
    let m = h.len();
    let mut best = 0.0f64;
    let mut j = 1;
    for i in 0..m {
        let ni = (i + 1) % m;
        while cross(&h[i], &h[ni], &h[(j + 1) % m]).abs() > cross(&h[i], &h[ni], &h[j]).abs() {
            j = (j + 1) % m;
        }
        best = best.max(h[i].dist2(&h[j])).max(h[ni].dist2(&h[j]));
    }
    best.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::graph::{build_percolated, build_rgg};
    use crate::points::sample_ppp;
    use std::collections::VecDeque;

    fn line_points(n: usize) -> PointSet {
        let rect = Rect::new(-1.0, n as f64, -1.0, 1.0).unwrap();
        PointSet::new((0..n).map(|i| Point::new(i as f64, 0.0)).collect(), rect, 1.0).unwrap()
    }

    fn bfs_partition(g: &Graph) -> Vec<usize> {
        let mut comp = vec![usize::MAX; g.num_vertices()];
        for s in 0..g.num_vertices() {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = s;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &w in g.neighbors(v) {
                    if comp[w as usize] == usize::MAX {
                        comp[w as usize] = s;
                        q.push_back(w as usize);
                    }
                }
            }
        }
        comp
    }

    #[test]
    fn trivial_examples() {
        let edgeless = Graph::from_edges(line_points(5), []).unwrap();
        assert_eq!(label_components(&edgeless).sizes(), vec![1; 5]);
        let path = build_rgg(line_points(5));
        assert_eq!(label_components(&path).sizes(), vec![5]);
    }

    #[test]
    fn matches_bfs_oracle() {
        let rect = Rect::square(10.0).unwrap();
        for s in 0..20 {
            let pts = sample_ppp(3.0, &rect, &SeedSpec::new(s)).unwrap();
            let g = build_percolated(pts, &ConnectionFunction::Constant(0.5), &SeedSpec::new(100 + s));
            let cl = label_components(&g);
            // BFS roots are smallest indices, so the partitions must agree label for label
            let bfs = bfs_partition(&g);
            assert_eq!(cl.labels().iter().map(|&l| l as usize).collect::<Vec<_>>(), bfs);
            assert_eq!(cl.sizes().iter().sum::<usize>(), g.num_vertices());
            for &(a, b) in g.edges() {
                assert_eq!(cl.label(a as usize), cl.label(b as usize));
            }
            let fused = label_percolated(g.points(), &ConnectionFunction::Constant(0.5), &SeedSpec::new(100 + s));
            assert_eq!(fused, cl);
        }
    }

    #[test]
    fn giant_stats_examples() {
        let g = build_rgg(line_points(7));
        let cl = label_components(&g);
        let st = giant_stats(&cl, &g, &ModelParams::new(1.0, 1.0).unwrap(), 7.0).unwrap();
        assert_eq!(st.theta_hat, Some(1.0));
        assert_eq!((st.l1, st.l2), (7, 0));
        assert!((st.max_diameter() - 6.0).abs() < 1e-12);

        let empty = Graph::from_edges(PointSet::empty(Rect::square(1.0).unwrap(), 1.0), []).unwrap();
        let st = giant_stats(&label_components(&empty), &empty, &ModelParams::new(1.0, 1.0).unwrap(), 1.0).unwrap();
        assert_eq!((st.l1, st.l2), (0, 0));

        let st = giant_stats(&cl, &g, &ModelParams::new(0.0, 1.0).unwrap(), 7.0).unwrap();
        assert_eq!(st.theta_hat, None);
    }

    #[test]
    fn diameter_bound_and_monotone_l1() {
        let rect = Rect::square(25.0).unwrap();
        let pts = sample_ppp(2.0, &rect, &SeedSpec::new(77)).unwrap();
        let mut prev_l1 = 0;
        for p in [0.2, 0.4, 0.6, 0.8, 1.0] {
            let g = build_percolated(pts.clone(), &ConnectionFunction::Constant(p), &SeedSpec::new(78));
            let cl = label_components(&g);
            let st = giant_stats(&cl, &g, &ModelParams::new(2.0, p).unwrap(), rect.area()).unwrap();
            for (d, s) in st.diameters.iter().zip(cl.sizes()) {
                assert!(*d <= (s - 1) as f64 + 1e-12);
            }
            assert!(st.l1 >= prev_l1);
            prev_l1 = st.l1;
        }
    }

    #[test]
    fn hull_diameter_matches_exact() {
        let rect = Rect::new(-3.0, 5.0, 1.0, 2.0).unwrap();
        for s in 0..30 {
            let pts = sample_ppp(4.0, &rect, &SeedSpec::new(s)).unwrap();
            let a = diameter_exact(&pts.points);
            let b = diameter_hull(&pts.points);
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let collinear: Vec<Point> = (0..5).map(|i| Point::new(i as f64, 2.0 * i as f64)).collect();
        assert!((diameter_hull(&collinear) - diameter_exact(&collinear)).abs() < 1e-12);
    }

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(6);
        assert!(uf.union(0, 1));
        assert!(uf.union(2, 3));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 3));
        assert!(uf.connected(0, 2));
        assert!(!uf.connected(0, 5));
        assert_eq!(uf.component_size(3), 4);
        let cl = ComponentLabeling::from_union_find(&mut uf);
        assert_eq!(cl.sizes(), vec![4, 1, 1]);
        assert_eq!(cl.kth_label(1), Some(4));
        assert_eq!(cl.members(0), vec![0, 1, 2, 3]);
    }
}
