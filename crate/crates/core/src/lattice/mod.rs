//! Bond percolation on boxes of `Z²`: sampling, the planar dual,
//! `k`-th order components, maximum numbers of disjoint crossings,
//! connection-probability decay, and the coarse-grained domino lattice built
//! from a continuum sample.

mod decay;
mod flow;
mod haux;
mod rle;

pub use decay::{estimate_connect_decay, DecayFit, DecayRow};
pub use flow::FlowNetwork;
pub use haux::{build_h_aux, Domino, DominoOrientation, HAuxConfig, HAuxEdge, HAuxResult};
pub use rle::{read_lattice_dump, write_lattice_dump, LatticeHeader};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::components::{ComponentLabeling, UnionFind};
use crate::error::{param_err, Result};
use crate::rng::{item_uniform, SeedSpec};

/// Vertices `(i, j)` with `0 ≤ i ≤ width`, `0 ≤ j ≤ height`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBox {
    pub width: usize,
    pub height: usize,
}

impl LatticeBox {
    pub fn new(width: usize, height: usize) -> Result<Self> {
        if width == 0 || height == 0 {
            return param_err("lattice box needs width and height >= 1");
        }
        Ok(LatticeBox { width, height })
    }

    pub fn num_vertices(&self) -> usize {
        (self.width + 1) * (self.height + 1)
    }

    #[inline]
    pub fn vertex(&self, i: usize, j: usize) -> usize {
        j * (self.width + 1) + i
    }

    #[inline]
    pub fn coords(&self, v: usize) -> (usize, usize) {
        (v % (self.width + 1), v / (self.width + 1))
    }

    /// Number of edges `(i, j) – (i+1, j)`.
    pub fn num_horizontal(&self) -> usize {
        self.width * (self.height + 1)
    }

    /// Number of edges `(i, j) – (i, j+1)`.
    pub fn num_vertical(&self) -> usize {
        (self.width + 1) * self.height
    }

    #[inline]
    pub fn h_edge(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    #[inline]
    pub fn v_edge(&self, i: usize, j: usize) -> usize {
        j * (self.width + 1) + i
    }

    /// Calls `f(neighbour, is_horizontal, edge_index)` for each lattice
    /// neighbour of `v`.
    #[inline]
    pub fn for_each_incident(&self, v: usize, mut f: impl FnMut(usize, bool, usize)) {
        let (i, j) = self.coords(v);
        if i < self.width {
            f(v + 1, true, self.h_edge(i, j));
        }
        if i > 0 {
            f(v - 1, true, self.h_edge(i - 1, j));
        }
        if j < self.height {
            f(v + self.width + 1, false, self.v_edge(i, j));
        }
        if j > 0 {
            f(v - self.width - 1, false, self.v_edge(i, j - 1));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondConfig {
    pub lbox: LatticeBox,
    pub horizontal: Vec<bool>,
    pub vertical: Vec<bool>,
    pub q: f64,
}

impl BondConfig {
    pub fn uniform(lbox: LatticeBox, open: bool) -> Self {
        BondConfig {
            lbox,
            horizontal: vec![open; lbox.num_horizontal()],
            vertical: vec![open; lbox.num_vertical()],
            q: if open { 1.0 } else { 0.0 },
        }
    }

    pub fn from_flags(lbox: LatticeBox, horizontal: Vec<bool>, vertical: Vec<bool>, q: f64) -> Result<Self> {
        if horizontal.len() != lbox.num_horizontal() || vertical.len() != lbox.num_vertical() {
            return param_err("bond flag arrays do not match the box");
        }
        Ok(BondConfig { lbox, horizontal, vertical, q })
    }

    #[inline]
    pub fn is_open(&self, horizontal: bool, e: usize) -> bool {
        if horizontal {
            self.horizontal[e]
        } else {
            self.vertical[e]
        }
    }

    pub fn num_edges(&self) -> usize {
        self.horizontal.len() + self.vertical.len()
    }

    pub fn open_fraction(&self) -> f64 {
        let open = self.horizontal.iter().chain(&self.vertical).filter(|&&o| o).count();
        open as f64 / self.num_edges() as f64
    }

    pub fn open_clusters(&self) -> ComponentLabeling {
        let b = self.lbox;
        let mut uf = UnionFind::new(b.num_vertices());
        for j in 0..=b.height {
            for i in 0..=b.width {
                let v = b.vertex(i, j);
                if i < b.width && self.horizontal[b.h_edge(i, j)] {
                    uf.union(v, v + 1);
                }
                if j < b.height && self.vertical[b.v_edge(i, j)] {
                    uf.union(v, v + b.width + 1);
                }
            }
        }
        ComponentLabeling::from_union_find(&mut uf)
    }

    /// Open path from the column `i = 0` to the column `i = width`.
    pub fn has_lr_crossing(&self) -> bool {
        let b = self.lbox;
        let sources: Vec<usize> = (0..=b.height).map(|j| b.vertex(0, j)).collect();
        let cost = zero_one_bfs(b.num_vertices(), &sources, 0, |v, f| {
            b.for_each_incident(v, |w, h, e| f(w, self.is_open(h, e)))
        });
        (0..=b.height).any(|j| cost[b.vertex(b.width, j)] == 0)
    }
}

/// Each edge open independently with probability `q`, decided by `u_e < q`
/// with one uniform per edge, so configurations are monotone in `q`.
pub fn sample_lattice_bonds(lbox: LatticeBox, q: f64, seed: &SeedSpec) -> Result<BondConfig> {
    if !(0.0..=1.0).contains(&q) {
        return param_err(format!("bond probability must lie in [0,1], got {q}"));
    }
    let key = seed.key();
    let nh = lbox.num_horizontal();
    let horizontal = (0..nh).map(|e| item_uniform(key, e as u64) < q).collect();
    let vertical = (0..lbox.num_vertical()).map(|e| item_uniform(key, (nh + e) as u64) < q).collect();
    Ok(BondConfig { lbox, horizontal, vertical, q })
}

/// 0-1 BFS where traversing an open edge costs 0 and a closed edge costs 1;
/// returns the cheapest cost from `sources` (`u32::MAX` when unreachable)
/// exploring only costs ≤ `budget`.
fn zero_one_bfs(
    n: usize,
    sources: &[usize],
    budget: u32,
    incident: impl Fn(usize, &mut dyn FnMut(usize, bool)),
) -> Vec<u32> {
    let mut cost = vec![u32::MAX; n];
    let mut dq = VecDeque::new();
    for &s in sources {
        cost[s] = 0;
        dq.push_back(s);
    }
    while let Some(v) = dq.pop_front() {
        let cv = cost[v];
        incident(v, &mut |w, open| {
            let c = cv + (!open) as u32;
            if c <= budget && c < cost[w] {
                cost[w] = c;
                if open {
                    dq.push_front(w);
                } else {
                    dq.push_back(w);
                }
            }
        });
    }
    cost
}

/// Vertices joined to `x` by a path with any number of open edges and at
/// most `k - 1` closed ones, sorted by vertex index.
pub fn k_component(c: &BondConfig, x: (usize, usize), k: usize) -> Result<Vec<usize>> {
    let b = c.lbox;
    if x.0 > b.width || x.1 > b.height {
        return param_err(format!("vertex {x:?} outside the box"));
    }
    if k == 0 {
        return param_err("component order k must be >= 1");
    }
    let cost = zero_one_bfs(b.num_vertices(), &[b.vertex(x.0, x.1)], (k - 1) as u32, |v, f| {
        b.for_each_incident(v, |w, h, e| f(w, c.is_open(h, e)))
    });
    Ok((0..b.num_vertices()).filter(|&v| cost[v] != u32::MAX).collect())
}

/// Planar dual of a box configuration.
///
/// Dual vertex `(a, b)`, `0 ≤ a < width`, `0 ≤ b ≤ height + 1`, is the
/// square centred at `(a + 1/2, b - 1/2)`; rows `b = 0` and `b = height + 1`
/// are the faces just below and above the box. Each primal edge that
/// separates two of these squares has a dual edge, open iff the primal edge
/// is closed. Flags are stored per primal edge, so taking the dual twice is
/// the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DualConfig {
    pub primal_box: LatticeBox,
    /// Dual-open flag of the edge crossing each primal horizontal edge.
    pub horizontal: Vec<bool>,
    /// Dual-open flag of the edge crossing each primal vertical edge.
    pub vertical: Vec<bool>,
}

pub fn dual_config(c: &BondConfig) -> DualConfig {
    DualConfig {
        primal_box: c.lbox,
        horizontal: c.horizontal.iter().map(|o| !o).collect(),
        vertical: c.vertical.iter().map(|o| !o).collect(),
    }
}

impl DualConfig {
    /// The primal configuration again.
    pub fn dual(&self) -> BondConfig {
        BondConfig {
            lbox: self.primal_box,
            horizontal: self.horizontal.iter().map(|o| !o).collect(),
            vertical: self.vertical.iter().map(|o| !o).collect(),
            q: f64::NAN,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.primal_box.width * (self.primal_box.height + 2)
    }

    #[inline]
    pub fn vertex(&self, a: usize, b: usize) -> usize {
        b * self.primal_box.width + a
    }

    /// Centre of dual vertex `(a, b)` in primal coordinates.
    pub fn center(&self, a: usize, b: usize) -> (f64, f64) {
        (a as f64 + 0.5, b as f64 - 0.5)
    }

    /// Calls `f(neighbour, dual_open)` for each dual neighbour of `v`.
    pub fn for_each_incident(&self, v: usize, mut f: impl FnMut(usize, bool)) {
        let pb = self.primal_box;
        let w = pb.width;
        let (a, b) = (v % w, v / w);
        // vertical dual edges cross primal horizontal edges (a, j) at j = b - 1 and j = b
        if b >= 1 {
            f(v - w, self.horizontal[pb.h_edge(a, b - 1)]);
        }
        if b <= pb.height {
            f(v + w, self.horizontal[pb.h_edge(a, b)]);
        }
        // horizontal dual edges cross interior primal vertical edges (i, b - 1)
        if (1..=pb.height).contains(&b) {
            if a + 1 < w {
                f(v + 1, self.vertical[pb.v_edge(a + 1, b - 1)]);
            }
            if a >= 1 {
                f(v - 1, self.vertical[pb.v_edge(a, b - 1)]);
            }
        }
    }

    fn bottom_to_top_cost(&self, budget: u32) -> bool {
        let w = self.primal_box.width;
        let top = self.primal_box.height + 1;
        let sources: Vec<usize> = (0..w).map(|a| self.vertex(a, 0)).collect();
        let cost = zero_one_bfs(self.num_vertices(), &sources, budget, |v, f| self.for_each_incident(v, &mut *f));
        (0..w).any(|a| cost[self.vertex(a, top)] != u32::MAX)
    }

    /// Open dual path from the row below the box to the row above it.
    pub fn has_tb_crossing(&self) -> bool {
        self.bottom_to_top_cost(0)
    }

    /// Whether the `k`-th order dual component of some square of the bottom
    /// row reaches the top row.
    pub fn k_component_reaches_top(&self, k: usize) -> bool {
        k >= 1 && self.bottom_to_top_cost((k - 1) as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disjointness {
    Edge,
    Vertex,
}

/// Maximum number of disjoint open left-right crossings (paths from column
/// `0` to column `width`), by unit-capacity max-flow between side terminals.
pub fn max_disjoint_crossings(c: &BondConfig, mode: Disjointness) -> usize {
    let b = c.lbox;
    let n = b.num_vertices();
    let inf = u32::MAX / 4;
    match mode {
        Disjointness::Edge => {
            let (s, t) = (n, n + 1);
            let mut net = FlowNetwork::new(n + 2);
            for v in 0..n {
                b.for_each_incident(v, |w, h, e| {
                    if w > v && c.is_open(h, e) {
                        net.add_edge(v, w, 1);
                    }
                });
            }
            for j in 0..=b.height {
                net.add_arc(s, b.vertex(0, j), inf);
                net.add_arc(b.vertex(b.width, j), t, inf);
            }
            net.max_flow(s, t) as usize
        }
        Disjointness::Vertex => {
            // v_in = 2v, v_out = 2v + 1
            let (s, t) = (2 * n, 2 * n + 1);
            let mut net = FlowNetwork::new(2 * n + 2);
            for v in 0..n {
                net.add_arc(2 * v, 2 * v + 1, 1);
                b.for_each_incident(v, |w, h, e| {
                    if c.is_open(h, e) {
                        net.add_arc(2 * v + 1, 2 * w, 1);
                    }
                });
            }
            for j in 0..=b.height {
                net.add_arc(s, 2 * b.vertex(0, j), 1);
                net.add_arc(2 * b.vertex(b.width, j) + 1, t, 1);
            }
            net.max_flow(s, t) as usize
        }
    }
}
