//! Construction of the random geometric graph `G(λ, 1)`, bond percolation on
//! top of it, and the vertex-level transforms (rooted point, sprinkling,
//! degree truncation, thinning).
//!
//! Every random edge decision is `u < p` where `u` is the pair uniform of the
//! two endpoint ids under the percolation stream. Two graphs percolated with
//! the same stream are therefore coupled: raising `p`, or enlarging the
//! vertex set, can only add edges.

mod cells;
mod connection;

pub use cells::CellIndex;
pub use connection::{ConnectionFunction, PolarTable};

use serde::{Deserialize, Serialize};

use crate::error::{param_err, Result};
use crate::geometry::Point;
use crate::points::PointSet;
use crate::rng::{item_uniform, pair_uniform, SeedSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub lambda: f64,
    pub p: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, p: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return param_err(format!("intensity must be non-negative, got {lambda}"));
        }
        if !(0.0..=1.0).contains(&p) {
            return param_err(format!("bond probability must lie in [0,1], got {p}"));
        }
        Ok(ModelParams { lambda, p })
    }
}

/// Undirected simple graph on an embedded point set, stored as a sorted edge
/// list `(i, j)` with `i < j` plus CSR adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    points: PointSet,
    edges: Vec<(u32, u32)>,
    offsets: Vec<u32>,
    adj: Vec<u32>,
}

impl Graph {
    /// Normalizes, sorts and deduplicates `edges`. Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(points: PointSet, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = points.len();
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return param_err(format!("invalid edge ({a}, {b}) for {n} vertices"));
            }
            list.push((a.min(b) as u32, a.max(b) as u32));
        }
        list.sort_unstable();
        list.dedup();
        Ok(Graph::from_sorted(points, list))
    }

    fn from_sorted(points: PointSet, edges: Vec<(u32, u32)>) -> Self {
        let n = points.len();
        let mut offsets = vec![0u32; n + 1];
        for &(a, b) in &edges {
            offsets[a as usize + 1] += 1;
            offsets[b as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut adj = vec![0u32; 2 * edges.len()];
        for &(a, b) in &edges {
            adj[fill[a as usize] as usize] = b;
            fill[a as usize] += 1;
            adj[fill[b as usize] as usize] = a;
            fill[b as usize] += 1;
        }
        Graph { points, edges, offsets, adj }
    }

    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn point(&self, v: usize) -> Point {
        self.points.points[v]
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn degree(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b) as u32, a.max(b) as u32);
        self.edges.binary_search(&key).is_ok()
    }

    /// Subgraph induced by the vertices with `keep[v]`, re-indexed in order.
    /// Returns the graph and the original index of each new vertex.
    pub fn induced(&self, keep: &[bool]) -> (Graph, Vec<usize>) {
        let mut new_index = vec![u32::MAX; self.num_vertices()];
        let mut back = Vec::new();
        for (v, &k) in keep.iter().enumerate() {
            if k {
                new_index[v] = back.len() as u32;
                back.push(v);
            }
        }
        let points = self.points.retain_indices(|v| keep[v]);
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| keep[*a as usize] && keep[*b as usize])
            .map(|&(a, b)| (new_index[a as usize], new_index[b as usize]))
            .collect();
        (Graph::from_sorted(points, edges), back)
    }

    /// Subgraph induced by `vertices` (sorted, distinct), in that order.
    /// Costs time proportional to their total degree rather than to the
    /// whole graph.
    pub fn induced_by_list(&self, vertices: &[usize]) -> Graph {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let mut edges = Vec::new();
        for (a, &v) in vertices.iter().enumerate() {
            for &w in self.neighbors(v) {
                if (w as usize) > v {
                    if let Ok(b) = vertices.binary_search(&(w as usize)) {
                        edges.push((a as u32, b as u32));
                    }
                }
            }
        }
        edges.sort_unstable();
        let points = PointSet {
            points: vertices.iter().map(|&v| self.points.points[v]).collect(),
            ids: vertices.iter().map(|&v| self.points.ids[v]).collect(),
            rect: self.points.rect,
            lambda: self.points.lambda,
            seed: self.points.seed.clone(),
        };
        Graph::from_sorted(points, edges)
    }

    pub fn to_dump(&self, params: serde_json::Value) -> GraphDump {
        GraphDump {
            points: self.points.points.iter().map(|p| [p.x, p.y]).collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            params,
        }
    }
}

/// JSON form of a graph, for debugging and cross-checking against external
/// tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDump {
    pub points: Vec<[f64; 2]>,
    pub edges: Vec<[u32; 2]>,
    pub params: serde_json::Value,
}

fn check_rgg_edge(points: &PointSet, a: usize, b: usize) -> bool {
    points.points[a].dist2(&points.points[b]) <= 1.0
}

/// All pairs at Euclidean distance ≤ 1.
pub fn build_rgg(points: PointSet) -> Graph {
    let mut edges = Vec::new();
    let idx = CellIndex::new(&points.points, &points.rect, 1.0);
    idx.for_each_pair_within(1.0, |a, b| edges.push((a as u32, b as u32)));
    edges.sort_unstable();
    Graph::from_sorted(points, edges)
}

/// Fused `percolate_bonds(build_rgg(points))` that never materializes the
/// unpercolated edge list.
pub fn build_percolated(points: PointSet, cf: &ConnectionFunction, seed: &SeedSpec) -> Graph {
    let key = seed.key();
    let mut edges = Vec::new();
    let idx = CellIndex::new(&points.points, &points.rect, 1.0);
    idx.for_each_pair_within(1.0, |a, b| {
        if keep_pair(&points, cf, key, a, b) {
            edges.push((a as u32, b as u32));
        }
    });
    edges.sort_unstable();
    Graph::from_sorted(points, edges)
}

#[inline]
pub(crate) fn keep_pair(points: &PointSet, cf: &ConnectionFunction, key: u64, a: usize, b: usize) -> bool {
    let (pa, pb) = (points.points[a], points.points[b]);
    let prob = match cf {
        ConnectionFunction::Constant(p) => *p,
        _ => cf.prob(pb.x - pa.x, pb.y - pa.y),
    };
    pair_uniform(key, points.ids[a], points.ids[b]) < prob
}

/// Keeps each edge independently with probability `cf(x_j - x_i)`.
pub fn percolate_bonds(g: &Graph, cf: &ConnectionFunction, seed: &SeedSpec) -> Graph {
    let key = seed.key();
    let edges = g
        .edges
        .iter()
        .copied()
        .filter(|&(a, b)| keep_pair(&g.points, cf, key, a as usize, b as usize))
        .collect();
    Graph::from_sorted(g.points.clone(), edges)
}

/// Appends `x` as a new vertex (id one past the current maximum) and joins it
/// to every vertex within distance 1 with probability `cf`.
pub fn add_rooted_point(g: &Graph, x: Point, cf: &ConnectionFunction, seed: &SeedSpec) -> Result<Graph> {
    if !g.points.rect.contains(&x) {
        return param_err(format!("rooted point ({}, {}) lies outside the window", x.x, x.y));
    }
    let key = seed.key();
    let new_id = g.points.max_id().map_or(0, |m| m + 1);
    let v = g.num_vertices() as u32;
    let mut points = g.points.clone();
    let mut edges = g.edges.clone();
    for (j, q) in g.points.points.iter().enumerate() {
        if x.dist2(q) <= 1.0 && pair_uniform(key, new_id, points.ids[j]) < cf.prob(q.x - x.x, q.y - x.y) {
            edges.push((j as u32, v));
        }
    }
    points.points.push(x);
    points.ids.push(new_id);
    edges.sort_unstable();
    Ok(Graph::from_sorted(points, edges))
}

/// Superimposes an independent layer `extra` on `g1`: the union vertex set,
/// `g1`'s edges unchanged, and every within-`extra` or cross pair at distance
/// ≤ 1 retained with probability `cf`. `extra`'s ids are shifted past `g1`'s.
pub fn sprinkle_union(g1: &Graph, extra: &PointSet, cf: &ConnectionFunction, seed: &SeedSpec) -> Result<Graph> {
    if g1.points.rect != extra.rect {
        return param_err("sprinkled layer must share the base graph's window");
    }
    let base = g1.num_vertices();
    let shift = g1.points.max_id().map_or(0, |m| m + 1);
    let mut points = g1.points.clone();
    points.points.extend_from_slice(&extra.points);
    points.ids.extend(extra.ids.iter().map(|id| id + shift));
    points.lambda = g1.points.lambda + extra.lambda;
    let key = seed.key();
    let mut edges = g1.edges.clone();
    let idx = CellIndex::new(&points.points, &points.rect, 1.0);
    idx.for_each_pair_within(1.0, |a, b| {
        // a < b, so the pair is new exactly when b is in the extra layer
        if b >= base && keep_pair(&points, cf, key, a, b) {
            edges.push((a as u32, b as u32));
        }
    });
    edges.sort_unstable();
    Ok(Graph::from_sorted(points, edges))
}

/// Removes, in one simultaneous pass, every vertex whose degree in `g`
/// exceeds `k`, together with its edges.
pub fn transform_degree_truncate(g: &Graph, k: usize) -> Graph {
    let keep: Vec<bool> = (0..g.num_vertices()).map(|v| g.degree(v) <= k).collect();
    g.induced(&keep).0
}

/// Removes every point that has another point within distance `eps`, judged
/// on the original configuration.
pub fn transform_distance_thin(ps: &PointSet, eps: f64) -> Result<PointSet> {
    if !(eps > 0.0 && eps.is_finite()) {
        return param_err(format!("thinning radius must be positive, got {eps}"));
    }
    let mut crowded = vec![false; ps.len()];
    let idx = CellIndex::new(&ps.points, &ps.rect, eps);
    idx.for_each_pair_within(eps, |a, b| {
        crowded[a] = true;
        crowded[b] = true;
    });
    Ok(ps.retain_indices(|i| !crowded[i]))
}

/// Independent site thinning: each point survives with probability `s`.
pub fn transform_site_thin(ps: &PointSet, s: f64, seed: &SeedSpec) -> Result<PointSet> {
    if !(0.0..=1.0).contains(&s) {
        return param_err(format!("retention probability must lie in [0,1], got {s}"));
    }
    let key = seed.key();
    let mut out = ps.retain_indices(|i| item_uniform(key, ps.ids[i]) < s);
    out.lambda = ps.lambda * s;
    Ok(out)
}

/// Checks the structural invariants: unit edge length, no duplicates,
/// adjacency consistent with the edge list.
pub fn validate_graph(g: &Graph) -> bool {
    let sorted = g.edges.windows(2).all(|w| w[0] < w[1]);
    let short = g.edges.iter().all(|&(a, b)| a < b && check_rgg_edge(&g.points, a as usize, b as usize));
    let adj_ok = (0..g.num_vertices()).all(|v| g.neighbors(v).iter().all(|&w| g.has_edge(v, w as usize)));
    let deg_sum: usize = (0..g.num_vertices()).map(|v| g.degree(v)).sum();
    sorted && short && adj_ok && deg_sum == 2 * g.num_edges()
}
