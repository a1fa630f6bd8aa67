//! Planar events on embedded graphs: rectangle crossings, cycles inside
//! square annuli and circuits surrounding an annulus' center.
//!
//! A horizontal crossing of `[a,b] × [c,d]` is a path whose first edge meets
//! the left side segment, whose last edge meets the right side segment, and
//! whose remaining edges have both endpoints in the closed rectangle. A single
//! edge meeting both sides qualifies.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::components::UnionFind;
use crate::error::{param_err, Result};
use crate::geometry::{segment_intersects, Point, Rect, SquareAnnulus};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingSpec {
    pub rect: Rect,
    pub orientation: Orientation,
}

impl CrossingSpec {
    pub fn horizontal(rect: Rect) -> Self {
        CrossingSpec { rect, orientation: Orientation::Horizontal }
    }

    pub fn vertical(rect: Rect) -> Self {
        CrossingSpec { rect, orientation: Orientation::Vertical }
    }

    /// (near side, far side) as segments.
    pub fn sides(&self) -> ((Point, Point), (Point, Point)) {
        let r = &self.rect;
        match self.orientation {
            Orientation::Horizontal => (
                (Point::new(r.x0, r.y0), Point::new(r.x0, r.y1)),
                (Point::new(r.x1, r.y0), Point::new(r.x1, r.y1)),
            ),
            Orientation::Vertical => (
                (Point::new(r.x0, r.y0), Point::new(r.x1, r.y0)),
                (Point::new(r.x0, r.y1), Point::new(r.x1, r.y1)),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingResult {
    pub exists: bool,
    /// Vertex indices of a crossing path, when one exists.
    pub witness: Option<Vec<usize>>,
}

fn meets(g: &Graph, a: usize, b: usize, side: &(Point, Point)) -> bool {
    let (pa, pb) = (g.point(a), g.point(b));
    // cheap bounding-box reject before the exact predicate
    let (s0, s1) = side;
    if pa.x.max(pb.x) < s0.x.min(s1.x)
        || pa.x.min(pb.x) > s0.x.max(s1.x)
        || pa.y.max(pb.y) < s0.y.min(s1.y)
        || pa.y.min(pb.y) > s0.y.max(s1.y)
    {
        return false;
    }
    segment_intersects(pa, pb, *s0, *s1)
}

/// Multi-source BFS from both endpoints of every edge meeting the near side,
/// through edges with both endpoints in the rectangle; succeeds when a far-
/// side edge has a reached endpoint. The witness uses the reached far-edge
/// endpoint of least BFS depth, which makes it a simple path.
pub fn has_crossing(g: &Graph, spec: &CrossingSpec) -> CrossingResult {
    let (near, far) = spec.sides();
    let n = g.num_vertices();
    const UNSEEN: u32 = u32::MAX;
    let mut depth = vec![UNSEEN; n];
    let mut parent = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    let mut far_edges = Vec::new();
    for &(a, b) in g.edges() {
        let (a, b) = (a as usize, b as usize);
        if meets(g, a, b, &near) {
            for (s, partner) in [(a, b), (b, a)] {
                if depth[s] == UNSEEN {
                    depth[s] = 0;
                    parent[s] = partner as u32;
                }
            }
        }
        if meets(g, a, b, &far) {
            far_edges.push((a, b));
        }
    }
    if far_edges.is_empty() {
        return CrossingResult { exists: false, witness: None };
    }
    queue.extend((0..n).filter(|&v| depth[v] == 0));
    let inside: Vec<bool> = (0..n).map(|v| spec.rect.contains(&g.point(v))).collect();
    while let Some(v) = queue.pop_front() {
        if !inside[v] {
            continue;
        }
        for &w in g.neighbors(v) {
            let w = w as usize;
            if inside[w] && depth[w] == UNSEEN {
                depth[w] = depth[v] + 1;
                parent[w] = v as u32;
                queue.push_back(w);
            }
        }
    }
    let best = far_edges
        .iter()
        .flat_map(|&(a, b)| [(a, b), (b, a)])
        .filter(|&(u, _)| depth[u] != UNSEEN)
        .min_by_key(|&(u, w)| (depth[u], u, w));
    let Some((u, w)) = best else {
        return CrossingResult { exists: false, witness: None };
    };
    let mut path = vec![w, u];
    let mut v = u;
    while depth[v] > 0 {
        v = parent[v] as usize;
        path.push(v);
    }
    let start = parent[v] as usize;
    if start == w {
        // the near edge itself meets the far side
        path = vec![w, v];
    } else {
        path.push(start);
        path.reverse();
    }
    CrossingResult { exists: true, witness: Some(path) }
}

/// Checks that `path` is a simple path of `g` satisfying the three crossing
/// clauses for `spec`.
pub fn verify_crossing(g: &Graph, spec: &CrossingSpec, path: &[usize]) -> bool {
    if path.len() < 2 || path.iter().any(|&v| v >= g.num_vertices()) {
        return false;
    }
    let mut seen = path.to_vec();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return false;
    }
    if path.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
        return false;
    }
    let (near, far) = spec.sides();
    let m = path.len() - 1;
    if !meets(g, path[0], path[1], &near) || !meets(g, path[m - 1], path[m], &far) {
        return false;
    }
    // edges 2..m-1 (1-based) must lie in the rectangle
    (1..m.saturating_sub(1)).all(|e| spec.rect.contains(&g.point(path[e])) && spec.rect.contains(&g.point(path[e + 1])))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitMode {
    AnyCycle,
    Surrounding,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub annulus: SquareAnnulus,
    pub mode: CircuitMode,
}

pub fn has_circuit(g: &Graph, spec: &CircuitSpec) -> Result<bool> {
    match spec.mode {
        CircuitMode::AnyCycle => Ok(has_annulus_cycle(g, &spec.annulus)),
        CircuitMode::Surrounding => has_surrounding_circuit(g, &spec.annulus),
    }
}

/// Whether the subgraph induced by the vertices inside the annulus has a
/// cycle.
pub fn has_annulus_cycle(g: &Graph, annulus: &SquareAnnulus) -> bool {
    let inside: Vec<bool> = (0..g.num_vertices()).map(|v| annulus.contains(&g.point(v))).collect();
    let mut uf = UnionFind::new(g.num_vertices());
    g.edges()
        .iter()
        .filter(|&&(a, b)| inside[a as usize] && inside[b as usize])
        .any(|&(a, b)| !uf.union(a as usize, b as usize))
}

/// Signed crossing of the directed edge `a → b` with the horizontal ray from
/// `c` towards `+x`: `+1` upward, `-1` downward, `0` otherwise. Points on the
/// ray's line count as above it.
fn ray_crossing(a: &Point, b: &Point, c: &Point) -> i32 {
    let a_up = a.y >= c.y;
    let b_up = b.y >= c.y;
    if a_up == b_up {
        return 0;
    }
    let o = robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    );
    if b_up && o > 0.0 {
        1
    } else if !b_up && o < 0.0 {
        -1
    } else {
        0
    }
}

/// Whether the induced annulus subgraph contains a cycle winding around the
/// center.
///
/// BFS assigns each vertex an integer sheet index on the cover obtained by
/// cutting along the `+x` ray from the center; an edge whose endpoints'
/// indices disagree with its ray crossing closes a cycle of non-zero winding
/// number. Requires `r_in ≥ 1`, so no edge of length ≤ 1 passes through the
/// center.
pub fn has_surrounding_circuit(g: &Graph, annulus: &SquareAnnulus) -> Result<bool> {
    if annulus.r_in < 1.0 {
        return param_err(format!("surrounding mode needs r_in >= 1, got {}", annulus.r_in));
    }
    let n = g.num_vertices();
    let inside: Vec<bool> = (0..n).map(|v| annulus.contains(&g.point(v))).collect();
    let c = annulus.center;
    let mut level: Vec<Option<i64>> = vec![None; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        if !inside[s] || level[s].is_some() {
            continue;
        }
        level[s] = Some(0);
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            let lu = level[u].expect("queued vertices are labeled");
            let pu = g.point(u);
            for &w in g.neighbors(u) {
                let w = w as usize;
                if !inside[w] {
                    continue;
                }
                let expect = lu + ray_crossing(&pu, &g.point(w), &c) as i64;
                match level[w] {
                    None => {
                        level[w] = Some(expect);
                        queue.push_back(w);
                    }
                    Some(lw) if lw != expect => return Ok(true),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(false)
}

/// Number of annuli in `annuli` whose induced subgraph has a surrounding
/// circuit. The annuli must be pairwise disjoint.
pub fn count_disjoint_surrounding_circuits(g: &Graph, annuli: &[SquareAnnulus]) -> Result<usize> {
    for (i, a) in annuli.iter().enumerate() {
        if annuli[i + 1..].iter().any(|b| !a.is_disjoint_from(b)) {
            return param_err("annuli must be pairwise disjoint");
        }
    }
    let mut count = 0;
    for a in annuli {
        count += has_surrounding_circuit(g, a)? as usize;
    }
    Ok(count)
}

/// Concentric annuli `A(r, 3r)` with `r = r0 · 4^k`, `k = 0, 1, …`, as long as
/// the outer radius stays ≤ `max_outer`.
pub fn geometric_annuli(center: Point, r0: f64, max_outer: f64) -> Vec<SquareAnnulus> {
    let mut out = Vec::new();
    let mut r = r0;
    while 3.0 * r <= max_outer {
        out.push(SquareAnnulus { center, r_in: r, r_out: 3.0 * r });
        r *= 4.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_rgg;
    use crate::points::PointSet;

    fn graph(coords: &[(f64, f64)], window: Rect) -> Graph {
        build_rgg(PointSet::new(coords.iter().map(|&(x, y)| Point::new(x, y)).collect(), window, 1.0).unwrap())
    }

    fn big() -> Rect {
        Rect::new(-10.0, 10.0, -10.0, 10.0).unwrap()
    }

    #[test]
    fn single_edge_crossing() {
        let g = graph(&[(-0.1, 1.0), (0.55, 1.0)], big());
        let spec = CrossingSpec::horizontal(Rect::new(0.0, 0.5, 0.0, 2.0).unwrap());
        let r = has_crossing(&g, &spec);
        assert!(r.exists);
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 2);
        assert!(verify_crossing(&g, &spec, &w));
    }

    #[test]
    fn empty_graph_has_no_crossing() {
        let g = graph(&[], big());
        let spec = CrossingSpec::horizontal(Rect::new(0.0, 3.0, 0.0, 1.0).unwrap());
        assert_eq!(has_crossing(&g, &spec), CrossingResult { exists: false, witness: None });
    }

    #[test]
    fn chain_crossing_and_blocked_chain() {
        let rect = Rect::new(0.0, 3.0, 0.0, 1.0).unwrap();
        let spec = CrossingSpec::horizontal(rect);
        let chain: Vec<(f64, f64)> = (0..5).map(|i| (-0.4 + 0.9 * i as f64, 0.5)).collect();
        let g = graph(&chain, big());
        let r = has_crossing(&g, &spec);
        assert!(r.exists);
        assert!(verify_crossing(&g, &spec, r.witness.as_ref().unwrap()));
        // lift the middle vertex out of the rectangle: its edges are no longer interior
        let mut bent = chain.clone();
        bent[2].1 = 1.3;
        let g = graph(&bent, big());
        assert!(!has_crossing(&g, &spec).exists);
        // vertical crossing of a tall rectangle from the same chain rotated
        let col: Vec<(f64, f64)> = chain.iter().map(|&(x, y)| (y, x)).collect();
        let g = graph(&col, big());
        let vspec = CrossingSpec::vertical(Rect::new(0.0, 1.0, 0.0, 3.0).unwrap());
        assert!(has_crossing(&g, &vspec).exists);
    }

    #[test]
    fn two_edge_path_may_leave_rectangle() {
        // first edge meets the left side, last edge meets the right side,
        // middle vertex above the rectangle: allowed with no interior edges
        let rect = Rect::new(0.0, 1.2, 0.0, 0.4).unwrap();
        let g = graph(&[(-0.1, 0.1), (0.6, 0.8), (1.3, 0.1)], big());
        let r = has_crossing(&g, &CrossingSpec::horizontal(rect));
        assert!(r.exists);
        assert_eq!(r.witness.unwrap().len(), 3);
    }

    #[test]
    fn annulus_cycle_examples() {
        let a = SquareAnnulus::new(Point::new(0.0, 0.0), 1.0, 3.0).unwrap();
        let tri = graph(&[(2.0, 0.0), (2.5, 0.5), (2.0, 0.6)], big());
        assert!(has_annulus_cycle(&tri, &a));
        let path = graph(&[(2.0, 0.0), (2.0, 0.8), (2.0, 1.6)], big());
        assert!(!has_annulus_cycle(&path, &a));
        // a triangle closed through a vertex inside the hole is not induced
        let hole = graph(&[(1.5, 0.0), (1.5, 0.9), (0.8, 0.4)], big());
        assert!(!has_annulus_cycle(&hole, &a));
    }

    /// `n` points equally spaced by arc length along the sup-norm circle of
    /// the given radius; consecutive chords are at most `8 r / n`.
    fn ring(n: usize, radius: f64) -> Vec<(f64, f64)> {
        let side = 2.0 * radius;
        (0..n)
            .map(|i| {
                let s = 4.0 * side * (i as f64 + 0.3) / n as f64;
                let (k, t) = ((s / side).floor(), s % side);
                match k as usize {
                    0 => (-radius + t, -radius),
                    1 => (radius, -radius + t),
                    2 => (radius - t, radius),
                    _ => (-radius, radius - t),
                }
            })
            .collect()
    }

    #[test]
    fn ring_surrounds_center() {
        // any closed curve around the unit box is longer than 8, so ten
        // vertices are the fewest that can close a ring of unit-length edges
        let pts = ring(10, 1.1);
        let g = graph(&pts, big());
        for w in 0..10 {
            assert!(g.point(w).dist(&g.point((w + 1) % 10)) <= 1.0);
        }
        let a = SquareAnnulus::new(Point::new(0.0, 0.0), 1.0, 1.5).unwrap();
        assert!(has_surrounding_circuit(&g, &a).unwrap());
        assert!(has_annulus_cycle(&g, &a));
        // delete one ring edge: only a path remains
        let (a0, b0) = (0usize, 1usize);
        let cut = Graph::from_edges(
            g.points().clone(),
            g.edges().iter().map(|&(x, y)| (x as usize, y as usize)).filter(|&e| e != (a0, b0)),
        )
        .unwrap();
        assert!(!has_surrounding_circuit(&cut, &a).unwrap());
        let bad = SquareAnnulus::new(Point::new(0.0, 0.0), 0.5, 1.5).unwrap();
        assert!(has_surrounding_circuit(&g, &bad).is_err());
    }

    #[test]
    fn local_cycle_does_not_surround() {
        let a = SquareAnnulus::new(Point::new(0.0, 0.0), 1.0, 3.0).unwrap();
        // a triangle straddling the +x ray
        let g = graph(&[(2.0, -0.3), (2.5, 0.4), (1.8, 0.5)], big());
        assert!(has_annulus_cycle(&g, &a));
        assert!(!has_surrounding_circuit(&g, &a).unwrap());
    }

    #[test]
    fn counting_rings() {
        let c = Point::new(0.0, 0.0);
        let annuli = geometric_annuli(c, 1.0, 200.0);
        assert_eq!(annuli.len(), 4);
        let empty = graph(&[], Rect::new(-200.0, 200.0, -200.0, 200.0).unwrap());
        let five: Vec<SquareAnnulus> = (0..5).map(|k| SquareAnnulus { center: c, r_in: 1.0 + 3.0 * k as f64, r_out: 3.0 + 3.0 * k as f64 }).collect();
        assert_eq!(count_disjoint_surrounding_circuits(&empty, &five).unwrap(), 0);
        let mut pts = Vec::new();
        for k in [0usize, 2, 4] {
            let radius = 2.0 + 3.0 * k as f64;
            let n = (8.0 * radius / 0.9).ceil() as usize;
            pts.extend(ring(n, radius));
        }
        let g = graph(&pts, Rect::new(-20.0, 20.0, -20.0, 20.0).unwrap());
        assert_eq!(count_disjoint_surrounding_circuits(&g, &five).unwrap(), 3);
        let overlapping = [five[0], SquareAnnulus { center: c, r_in: 2.0, r_out: 5.0 }];
        assert!(count_disjoint_surrounding_circuits(&g, &overlapping).is_err());
    }
}
