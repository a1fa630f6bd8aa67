//! Brute-force reference implementations used by the integration tests and
//! by the acceptance harness. Everything here is deliberately naive.

#![allow(dead_code)]

use std::collections::VecDeque;

use contperc::components::ComponentLabeling;
use contperc::geometry::{Point, Rect, SquareAnnulus};
use contperc::graph::Graph;
use contperc::lattice::{BondConfig, LatticeBox};
use contperc::points::PointSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` uniform points in `window`.
pub fn uniform_points(rng: &mut ChaCha8Rng, n: usize, window: Rect) -> PointSet {
    let pts = (0..n)
        .map(|_| Point::new(rng.random_range(window.x0..window.x1), rng.random_range(window.y0..window.y1)))
        .collect();
    PointSet::new(pts, window, n as f64 / window.area()).unwrap()
}

/// All index pairs at distance ≤ 1, by the O(n²) scan.
pub fn rgg_edges(pts: &[Point]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (dx, dy) = (pts[i].x - pts[j].x, pts[i].y - pts[j].y);
            if dx * dx + dy * dy <= 1.0 {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

pub fn graph_edges(g: &Graph) -> Vec<(usize, usize)> {
    g.edges().iter().map(|&(a, b)| (a as usize, b as usize)).collect()
}

/// Smallest vertex of each vertex's component, by BFS.
pub fn bfs_partition(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let adj = adjacency(n, edges);
    let mut rep = vec![usize::MAX; n];
    for s in 0..n {
        if rep[s] != usize::MAX {
            continue;
        }
        rep[s] = s;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if rep[w] == usize::MAX {
                    rep[w] = s;
                    q.push_back(w);
                }
            }
        }
    }
    rep
}

/// Smallest vertex of each vertex's component, read off a labeling.
pub fn labeling_partition(cl: &ComponentLabeling) -> Vec<usize> {
    let n = cl.num_vertices();
    let mut first = std::collections::HashMap::new();
    (0..n).map(|v| *first.entry(cl.label(v)).or_insert(v)).collect()
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segments `[a1,a2]` and `[b1,b2]` share a point.
pub fn segments_meet(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    let d1 = cross(b1, b2, a1);
    let d2 = cross(b1, b2, a2);
    let d3 = cross(a1, a2, b1);
    let d4 = cross(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(a1, b1, b2))
        || (d2 == 0.0 && on_segment(a2, b1, b2))
        || (d3 == 0.0 && on_segment(b1, a1, a2))
        || (d4 == 0.0 && on_segment(b2, a1, a2))
}

/// Left-right crossing of `rect` by exhaustive enumeration of simple paths.
/// A path `v0..vm` qualifies when `v0v1` meets the left side, `v(m-1)vm`
/// meets the right side and `v1..v(m-1)` lie in the rectangle (`m ≥ 3`).
pub fn crossing_exhaustive(pts: &[Point], edges: &[(usize, usize)], rect: &Rect) -> bool {
    let left = (Point::new(rect.x0, rect.y0), Point::new(rect.x0, rect.y1));
    let right = (Point::new(rect.x1, rect.y0), Point::new(rect.x1, rect.y1));
    let meets = |a: usize, b: usize, s: (Point, Point)| segments_meet(pts[a], pts[b], s.0, s.1);
    let inside = |v: usize| rect.contains(&pts[v]);
    let adj = adjacency(pts.len(), edges);

    fn extend(
        path: &mut Vec<usize>,
        on: &mut [bool],
        adj: &[Vec<usize>],
        done: &dyn Fn(&[usize]) -> bool,
        inside: &dyn Fn(usize) -> bool,
    ) -> bool {
        if done(path) {
            return true;
        }
        // once v(m-1) is fixed as an interior vertex it must be inside
        let m = path.len() - 1;
        if m >= 2 && !inside(path[m - 1]) {
            return false;
        }
        let u = path[m];
        for &w in &adj[u] {
            if !on[w] {
                on[w] = true;
                path.push(w);
                let hit = extend(path, on, adj, done, inside);
                path.pop();
                on[w] = false;
                if hit {
                    return true;
                }
            }
        }
        false
    }

    let done = |p: &[usize]| {
        let m = p.len() - 1;
        m >= 1 && meets(p[m - 1], p[m], right) && (1..m).all(|i| m < 3 || inside(p[i]))
    };
    for &(a, b) in edges {
        for (s, t) in [(a, b), (b, a)] {
            if !meets(s, t, left) {
                continue;
            }
            let mut on = vec![false; pts.len()];
            on[s] = true;
            on[t] = true;
            let mut path = vec![s, t];
            if extend(&mut path, &mut on, &adj, &done, &inside) {
                return true;
            }
        }
    }
    false
}

/// Winding number of the closed polygon `cycle` around `c`, from summed
/// `atan2` angle increments.
pub fn winding(pts: &[Point], cycle: &[usize], c: Point) -> i64 {
    let mut total = 0.0;
    for i in 0..cycle.len() {
        let (a, b) = (pts[cycle[i]], pts[cycle[(i + 1) % cycle.len()]]);
        let ta = (a.y - c.y).atan2(a.x - c.x);
        let tb = (b.y - c.y).atan2(b.x - c.x);
        let mut d = tb - ta;
        while d > std::f64::consts::PI {
            d -= 2.0 * std::f64::consts::PI;
        }
        while d <= -std::f64::consts::PI {
            d += 2.0 * std::f64::consts::PI;
        }
        total += d;
    }
    (total / (2.0 * std::f64::consts::PI)).round() as i64
}

/// Vertex order of an edge set that forms a single simple cycle.
fn as_simple_cycle(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    if edges.len() < 3 {
        return None;
    }
    let adj = adjacency(n, edges);
    let verts: Vec<usize> = (0..n).filter(|&v| !adj[v].is_empty()).collect();
    if verts.iter().any(|&v| adj[v].len() != 2) {
        return None;
    }
    let start = verts[0];
    let mut order = vec![start];
    let (mut prev, mut cur) = (start, adj[start][0]);
    while cur != start {
        order.push(cur);
        let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
        prev = cur;
        cur = next;
    }
    (order.len() == verts.len()).then_some(order)
}

/// Whether the annulus-induced subgraph has a simple cycle of non-zero
/// winding around the center.
///
/// Cycles are enumerated as XOR-combinations of the fundamental cycles of a
/// spanning forest. When there are more than `max_exhaustive` fundamental
/// cycles only the basis itself is tested; winding is additive over the
/// integer cycle space, so every cycle has winding zero iff every basis cycle
/// has.
pub fn surrounding_oracle(g: &Graph, ann: &SquareAnnulus, max_exhaustive: usize) -> bool {
    let n = g.num_vertices();
    let pts: Vec<Point> = (0..n).map(|v| g.point(v)).collect();
    let inside: Vec<bool> = pts.iter().map(|p| ann.contains(p)).collect();
    let edges: Vec<(usize, usize)> = graph_edges(g).into_iter().filter(|&(a, b)| inside[a] && inside[b]).collect();
    // spanning forest by BFS
    let adj = adjacency(n, &edges);
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![0usize; n];
    let mut seen = vec![false; n];
    let mut tree = std::collections::HashSet::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    tree.insert((v.min(w), v.max(w)));
                    q.push_back(w);
                }
            }
        }
    }
    let index: std::collections::HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut basis: Vec<Vec<bool>> = Vec::new();
    for &(a, b) in &edges {
        if tree.contains(&(a, b)) {
            continue;
        }
        let mut set = vec![false; edges.len()];
        set[index[&(a, b)]] = true;
        let (mut x, mut y) = (a, b);
        while x != y {
            if depth[x] < depth[y] {
                std::mem::swap(&mut x, &mut y);
            }
            let p = parent[x];
            let i = index[&(x.min(p), x.max(p))];
            set[i] = !set[i];
            x = p;
        }
        basis.push(set);
    }
    let check = |set: &[bool]| {
        let es: Vec<(usize, usize)> = edges.iter().zip(set).filter(|(_, &on)| on).map(|(&e, _)| e).collect();
        as_simple_cycle(n, &es).is_some_and(|cyc| winding(&pts, &cyc, ann.center) != 0)
    };
    if basis.len() > max_exhaustive {
        return basis.iter().any(|b| check(b));
    }
    (1u64..1 << basis.len()).any(|mask| {
        let mut set = vec![false; edges.len()];
        for (i, b) in basis.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (s, &x) in set.iter_mut().zip(b) {
                    *s ^= x;
                }
            }
        }
        check(&set)
    })
}

/// Lattice edges as `(u, v, open)` in the library's edge order.
pub fn lattice_edges(c: &BondConfig) -> Vec<(usize, usize, bool)> {
    let b = c.lbox;
    let mut out = Vec::new();
    for j in 0..=b.height {
        for i in 0..b.width {
            out.push((b.vertex(i, j), b.vertex(i + 1, j), c.horizontal[b.h_edge(i, j)]));
        }
    }
    for j in 0..b.height {
        for i in 0..=b.width {
            out.push((b.vertex(i, j), b.vertex(i, j + 1), c.vertical[b.v_edge(i, j)]));
        }
    }
    out
}

pub fn random_config(rng: &mut ChaCha8Rng, w: usize, h: usize, q: f64) -> BondConfig {
    let lbox = LatticeBox::new(w, h).unwrap();
    let hz = (0..lbox.num_horizontal()).map(|_| rng.random::<f64>() < q).collect();
    let vt = (0..lbox.num_vertical()).map(|_| rng.random::<f64>() < q).collect();
    BondConfig::from_flags(lbox, hz, vt, q).unwrap()
}

fn for_each_subset(n: usize, size: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if left == 0 {
            return f(cur);
        }
        for i in start..n {
            cur.push(i);
            let stop = rec(i + 1, n, left - 1, cur, f);
            cur.pop();
            if stop {
                return true;
            }
        }
        false
    }
    rec(0, n, size, &mut Vec::new(), f)
}

fn reach(n: usize, edges: &[(usize, usize)], from: &[usize]) -> Vec<bool> {
    let adj = adjacency(n, edges);
    let mut seen = vec![false; n];
    let mut q = VecDeque::new();
    for &s in from {
        if !seen[s] {
            seen[s] = true;
            q.push_back(s);
        }
    }
    while let Some(v) = q.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                q.push_back(w);
            }
        }
    }
    seen
}

/// `C_k(x)`: union over all sets of at most `k - 1` closed edges of the open
/// cluster of `x` after opening that set.
pub fn k_component_exhaustive(c: &BondConfig, x: usize, k: usize) -> Vec<usize> {
    let n = c.lbox.num_vertices();
    let all = lattice_edges(c);
    let open: Vec<(usize, usize)> = all.iter().filter(|e| e.2).map(|e| (e.0, e.1)).collect();
    let closed: Vec<(usize, usize)> = all.iter().filter(|e| !e.2).map(|e| (e.0, e.1)).collect();
    let mut hit = vec![false; n];
    for size in 0..k.min(closed.len() + 1) {
        for_each_subset(closed.len(), size, &mut |s| {
            let mut es = open.clone();
            es.extend(s.iter().map(|&i| closed[i]));
            for (h, r) in hit.iter_mut().zip(reach(n, &es, &[x])) {
                *h |= r;
            }
            false
        });
    }
    (0..n).filter(|&v| hit[v]).collect()
}

fn left_right_connected(c: &BondConfig, edges: &[(usize, usize)], removed_vertex: &[bool]) -> bool {
    let b = c.lbox;
    let n = b.num_vertices();
    let es: Vec<(usize, usize)> = edges.iter().copied().filter(|&(u, v)| !removed_vertex[u] && !removed_vertex[v]).collect();
    let sources: Vec<usize> = (0..=b.height).map(|j| b.vertex(0, j)).filter(|&v| !removed_vertex[v]).collect();
    let seen = reach(n, &es, &sources);
    (0..=b.height).any(|j| {
        let v = b.vertex(b.width, j);
        !removed_vertex[v] && seen[v]
    })
}

/// Minimum number of open edges whose removal leaves no open left-right
/// path (equal to the maximum number of edge-disjoint crossings by Menger).
pub fn min_edge_cut(c: &BondConfig) -> usize {
    let n = c.lbox.num_vertices();
    let open: Vec<(usize, usize)> = lattice_edges(c).into_iter().filter(|e| e.2).map(|e| (e.0, e.1)).collect();
    let none = vec![false; n];
    for size in 0..=open.len() {
        let found = for_each_subset(open.len(), size, &mut |s| {
            let es: Vec<(usize, usize)> = open.iter().enumerate().filter(|(i, _)| !s.contains(i)).map(|(_, &e)| e).collect();
            !left_right_connected(c, &es, &none)
        });
        if found {
            return size;
        }
    }
    unreachable!("removing every open edge disconnects the sides")
}

/// Minimum number of vertices whose removal leaves no open left-right path.
pub fn min_vertex_cut(c: &BondConfig) -> usize {
    let n = c.lbox.num_vertices();
    let open: Vec<(usize, usize)> = lattice_edges(c).into_iter().filter(|e| e.2).map(|e| (e.0, e.1)).collect();
    for size in 0..=n {
        let found = for_each_subset(n, size, &mut |s| {
            let mut removed = vec![false; n];
            for &v in s {
                removed[v] = true;
            }
            !left_right_connected(c, &open, &removed)
        });
        if found {
            return size;
        }
    }
    unreachable!()
}

/// Result of one oracle sweep.
#[derive(Debug, Default, Clone, Copy)]
pub struct Tally {
    pub cases: usize,
    pub positives: usize,
    pub mismatches: usize,
}

impl Tally {
    fn record(&mut self, positive: bool, agree: bool) {
        self.cases += 1;
        self.positives += positive as usize;
        self.mismatches += !agree as usize;
    }
}

/// RGG edge sets against the quadratic scan, percolated edge sets against
/// the per-pair rule, and component partitions against BFS.
pub fn check_rgg_and_components(seeds: u64) -> (Tally, Tally) {
    use contperc::components::label_components;
    use contperc::graph::{build_percolated, build_rgg, ConnectionFunction};
    use contperc::rng::{pair_uniform, SeedSpec};
    let (mut edges_t, mut comp_t) = (Tally::default(), Tally::default());
    for seed in 0..seeds {
        let mut r = rng(seed);
        let n = r.random_range(50..=500);
        let lambda = r.random_range(0.5..3.0);
        let side = (n as f64 / lambda).sqrt();
        let ps = uniform_points(&mut r, n, Rect::new(0.0, side, 0.0, 1.3 * side).unwrap());
        let g = build_rgg(ps.clone());
        let expect = rgg_edges(&ps.points);
        edges_t.record(!expect.is_empty(), graph_edges(&g) == expect);

        let p = r.random_range(0.2..1.0);
        let spec = SeedSpec::new(seed).named("bonds");
        let gp = build_percolated(ps.clone(), &ConnectionFunction::constant(p).unwrap(), &spec);
        let kept: Vec<(usize, usize)> =
            expect.iter().copied().filter(|&(a, b)| pair_uniform(spec.key(), ps.ids[a], ps.ids[b]) < p).collect();
        edges_t.record(!kept.is_empty(), graph_edges(&gp) == kept);

        let cl = label_components(&gp);
        comp_t.record(cl.num_components() < n, labeling_partition(&cl) == bfs_partition(n, &kept));
    }
    (edges_t, comp_t)
}

fn transpose(ps: &PointSet) -> PointSet {
    let r = ps.rect;
    let pts = ps.points.iter().map(|p| Point::new(p.y, p.x)).collect();
    PointSet::new(pts, Rect::new(r.y0, r.y1, r.x0, r.x1).unwrap(), ps.lambda).unwrap()
}

/// `has_crossing` in both orientations against exhaustive path enumeration;
/// returned witnesses are re-checked with `verify_crossing`.
pub fn check_crossing(seeds: u64) -> Tally {
    use contperc::graph::build_rgg;
    use contperc::planar::{has_crossing, verify_crossing, CrossingSpec};
    let mut t = Tally::default();
    let rect = Rect::new(0.0, 2.0, 0.0, 1.0).unwrap();
    let window = Rect::new(-0.3, 2.3, -0.3, 1.3).unwrap();
    for seed in 0..seeds {
        let mut r = rng(1_000 + seed);
        let n = r.random_range(4..=12);
        let ps = uniform_points(&mut r, n, window);
        let g = build_rgg(ps.clone());
        let spec = CrossingSpec::horizontal(rect);
        let got = has_crossing(&g, &spec);
        let expect = crossing_exhaustive(&ps.points, &graph_edges(&g), &rect);
        let witness_ok = got.witness.as_ref().is_none_or(|w| verify_crossing(&g, &spec, w));
        t.record(expect, got.exists == expect && witness_ok);

        // vertical crossing of the transposed picture
        let gt = build_rgg(transpose(&ps));
        let tr = Rect::new(rect.y0, rect.y1, rect.x0, rect.x1).unwrap();
        let vspec = CrossingSpec::vertical(tr);
        let got = has_crossing(&gt, &vspec);
        let witness_ok = got.witness.as_ref().is_none_or(|w| verify_crossing(&gt, &vspec, w));
        t.record(expect, got.exists == expect && witness_ok);
    }
    t
}

/// `has_surrounding_circuit` against the cycle-space winding oracle.
pub fn check_surrounding(seeds: u64) -> Tally {
    use contperc::graph::{build_percolated, ConnectionFunction};
    use contperc::planar::has_surrounding_circuit;
    use contperc::rng::SeedSpec;
    let mut t = Tally::default();
    let ann = SquareAnnulus::new(Point::new(0.0, 0.0), 1.0, 1.75).unwrap();
    for seed in 0..seeds {
        let mut r = rng(2_000 + seed);
        let n = r.random_range(25..=60);
        let ps = uniform_points(&mut r, n, ann.outer_box());
        let p = r.random_range(0.6..=1.0);
        let g = build_percolated(ps, &ConnectionFunction::constant(p).unwrap(), &SeedSpec::new(seed));
        let expect = surrounding_oracle(&g, &ann, 14);
        t.record(expect, has_surrounding_circuit(&g, &ann).unwrap() == expect);
    }
    t
}

/// `k_component` against opening every set of at most `k - 1` closed edges.
pub fn check_k_component(configs: u64) -> Tally {
    use contperc::lattice::k_component;
    let mut t = Tally::default();
    let mut r = rng(3_000);
    for _ in 0..configs {
        let (w, h) = (r.random_range(1..=6), r.random_range(1..=6));
        let q = r.random_range(0.2..0.8);
        let c = random_config(&mut r, w, h, q);
        let (i, j) = (r.random_range(0..=w), r.random_range(0..=h));
        let k = r.random_range(1..=3);
        let got = k_component(&c, (i, j), k).unwrap();
        let expect = k_component_exhaustive(&c, c.lbox.vertex(i, j), k);
        t.record(expect.len() > 1, got == expect);
    }
    t
}

/// `max_disjoint_crossings` in both modes against exhaustive minimum cuts.
pub fn check_disjoint_crossings(configs: u64) -> Tally {
    use contperc::lattice::{max_disjoint_crossings, Disjointness};
    let mut t = Tally::default();
    let mut r = rng(4_000);
    for _ in 0..configs {
        let (w, h) = (r.random_range(1..=4), r.random_range(1..=3));
        let q = r.random_range(0.3..0.9);
        let c = random_config(&mut r, w, h, q);
        let e = min_edge_cut(&c);
        t.record(e > 0, max_disjoint_crossings(&c, Disjointness::Edge) == e);
        let (w, h) = (r.random_range(1..=3), r.random_range(1..=3));
        let q = r.random_range(0.3..0.9);
        let c = random_config(&mut r, w, h, q);
        let v = min_vertex_cut(&c);
        t.record(v > 0, max_disjoint_crossings(&c, Disjointness::Vertex) == v);
    }
    t
}

/// Planar duality on `[0,2N]×[0,N]` boxes: exactly one of the primal
/// left-right and dual top-bottom crossings, and fewer than `k` edge-disjoint
/// crossings forcing the dual `C_k` across, for `k = 1, 2, 3`.
pub fn check_planar_duality(configs: u64) -> (Tally, Tally) {
    use contperc::lattice::{dual_config, max_disjoint_crossings, Disjointness};
    let (mut one, mut ck) = (Tally::default(), Tally::default());
    let mut r = rng(5_000);
    for i in 0..configs {
        let n = r.random_range(1..=20);
        let q = [0.3, 0.5, 0.7][i as usize % 3];
        let c = random_config(&mut r, 2 * n, n, q);
        let d = dual_config(&c);
        let primal = c.has_lr_crossing();
        one.record(primal, primal != d.has_tb_crossing());
        let flow = max_disjoint_crossings(&c, Disjointness::Edge);
        for k in 1..=3 {
            if flow < k {
                ck.record(true, d.k_component_reaches_top(k));
            }
        }
    }
    (one, ck)
}
