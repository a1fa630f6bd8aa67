//! Coarse-graining of a continuum sample onto the domino lattice.
//!
//! The window is cut into `R × R` squares `(i, j)`. The horizontal domino
//! `H(i, j)` covers squares `(i, j)` and `(i+1, j)`, the vertical domino
//! `V(i, j)` covers `(i, j)` and `(i, j+1)`. A domino is admissible when a
//! thin inner rectangle along its middle is crossed lengthwise in the base
//! sample. Two dominos are adjacent when they are orthogonal and share a
//! square; the adjacency graph is a rotated copy of `Z²`, which is how the
//! result is embedded into a [`BondConfig`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BondConfig, LatticeBox};
use crate::components::{label_components, UnionFind};
use crate::error::{param_err, Result};
use crate::geometry::{exact_multiple, Point, Rect};
use crate::graph::{build_percolated, sprinkle_union, ConnectionFunction, Graph};
use crate::planar::{count_disjoint_surrounding_circuits, geometric_annuli, has_crossing, CrossingSpec};
use crate::points::sample_ppp;
use crate::rng::SeedSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HAuxConfig {
    /// Intensity of the base sample that decides admissibility.
    pub lambda_prime: f64,
    /// Intensity after sprinkling.
    pub lambda: f64,
    pub p: f64,
    /// Side of the tessellation squares.
    pub r: usize,
    pub window: Rect,
    /// Inner rectangles have relative height `2 / n_inner`.
    pub n_inner: usize,
    /// Surrounding circuits required around each junction; `0` disables the
    /// filter.
    pub k_circuits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominoOrientation {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domino {
    pub orientation: DominoOrientation,
    /// Index of its lower-left square.
    pub square: (usize, usize),
    pub rect: Rect,
    pub inner: Rect,
    /// Vertex of the embedding lattice.
    pub site: (usize, usize),
    pub admissible: bool,
    /// Crossing of the inner rectangle, as vertex indices of the base graph
    /// (which are also valid in the sprinkled graph).
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HAuxEdge {
    pub horizontal: usize,
    pub vertical: usize,
    pub square: (usize, usize),
    pub open: bool,
    /// Surrounding circuits counted at the junction (only when filtering).
    pub circuits: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct HAuxResult {
    pub lattice: BondConfig,
    pub dominos: Vec<Domino>,
    pub edges: Vec<HAuxEdge>,
    pub admissible_fraction: f64,
    pub open_fraction: f64,
    pub r: usize,
    pub k_circuits: usize,
    /// The sprinkled graph `G(λ, p)`.
    pub graph: Graph,
}

/// Vertices of a graph bucketed by tessellation square.
struct Buckets {
    origin: Point,
    side: f64,
    mx: usize,
    my: usize,
    cells: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(g: &Graph, window: &Rect, side: f64, mx: usize, my: usize) -> Self {
        let mut cells = vec![Vec::new(); mx * my];
        let origin = Point::new(window.x0, window.y0);
        let mut b = Buckets { origin, side, mx, my, cells: Vec::new() };
        for v in 0..g.num_vertices() {
            let (i, j) = b.cell(&g.point(v));
            cells[j * mx + i].push(v);
        }
        b.cells = cells;
        b
    }

    fn cell(&self, p: &Point) -> (usize, usize) {
        let i = ((p.x - self.origin.x) / self.side).floor().max(0.0) as usize;
        let j = ((p.y - self.origin.y) / self.side).floor().max(0.0) as usize;
        (i.min(self.mx - 1), j.min(self.my - 1))
    }

    /// Sorted vertices of `g` inside `rect`.
    fn query(&self, g: &Graph, rect: &Rect) -> Vec<usize> {
        let (i0, j0) = self.cell(&Point::new(rect.x0, rect.y0));
        let (i1, j1) = self.cell(&Point::new(rect.x1, rect.y1));
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                out.extend(self.cells[j * self.mx + i].iter().copied().filter(|&v| rect.contains(&g.point(v))));
            }
        }
        out.sort_unstable();
        out
    }
}

fn validate(cfg: &HAuxConfig) -> Result<(usize, usize)> {
    if !(cfg.lambda_prime >= 0.0 && cfg.lambda_prime.is_finite()) {
        return param_err(format!("base intensity must be non-negative, got {}", cfg.lambda_prime));
    }
    if !(cfg.lambda_prime <= cfg.lambda && cfg.lambda.is_finite()) {
        return param_err(format!(
            "sprinkled intensity {} must be at least the base intensity {}",
            cfg.lambda, cfg.lambda_prime
        ));
    }
    if !(0.0..=1.0).contains(&cfg.p) {
        return param_err(format!("bond probability must lie in [0,1], got {}", cfg.p));
    }
    if cfg.r < 2 {
        return param_err("domino scale must be >= 2");
    }
    if cfg.n_inner < 3 {
        return param_err("inner thinning parameter must be >= 3");
    }
    let r = cfg.r as f64;
    let (Some(mx), Some(my)) = (exact_multiple(cfg.window.width(), r), exact_multiple(cfg.window.height(), r)) else {
        return param_err(format!("window {:?} is not tiled by squares of side {r}", cfg.window));
    };
    if mx < 2 || my < 2 {
        return param_err("window must hold at least 2 × 2 squares");
    }
    Ok((mx, my))
}

fn make_dominos(cfg: &HAuxConfig, mx: usize, my: usize) -> Result<Vec<Domino>> {
    let r = cfg.r as f64;
    let alpha = 0.5 - 1.0 / cfg.n_inner as f64;
    let beta = 0.5 + 1.0 / cfg.n_inner as f64;
    let (x0, y0) = (cfg.window.x0, cfg.window.y0);
    let mut out = Vec::new();
    for j in 0..my {
        for i in 0..mx - 1 {
            let (bx, by) = (x0 + i as f64 * r, y0 + j as f64 * r);
            out.push(Domino {
                orientation: DominoOrientation::Horizontal,
                square: (i, j),
                rect: Rect::new(bx, bx + 2.0 * r, by, by + r)?,
                inner: Rect::new(bx + 1.0, bx + 2.0 * r - 1.0, by + alpha * r, by + beta * r)?,
                site: (i + j, i + 1 + my - 2 - j),
                admissible: false,
                witness: None,
            });
        }
    }
    for j in 0..my - 1 {
        for i in 0..mx {
            let (bx, by) = (x0 + i as f64 * r, y0 + j as f64 * r);
            out.push(Domino {
                orientation: DominoOrientation::Vertical,
                square: (i, j),
                rect: Rect::new(bx, bx + r, by, by + 2.0 * r)?,
                inner: Rect::new(bx + alpha * r, bx + beta * r, by + 1.0, by + 2.0 * r - 1.0)?,
                site: (i + j, i + my - 2 - j),
                admissible: false,
                witness: None,
            });
        }
    }
    Ok(out)
}

/// Samples `G(λ', p)`, marks admissible dominos, sprinkles up to `G(λ, p)`
/// and opens each adjacency whose two witnesses are joined inside the shared
/// square.
pub fn build_h_aux(cfg: &HAuxConfig, seed: &SeedSpec) -> Result<HAuxResult> {
    let (mx, my) = validate(cfg)?;
    let cf = ConnectionFunction::constant(cfg.p)?;
    let bonds = seed.clone().named("bonds");
    let base_points = sample_ppp(cfg.lambda_prime, &cfg.window, &seed.clone().named("base"))?;
    let base = build_percolated(base_points, &cf, &bonds);
    let r = cfg.r as f64;
    let buckets = Buckets::new(&base, &cfg.window, r, mx, my);

    let mut dominos = make_dominos(cfg, mx, my)?;
    let witnesses: Vec<Option<Vec<usize>>> = dominos
        .par_iter()
        .map(|d| {
            let local = buckets.query(&base, &d.inner.expand(1.0));
            let sub = base.induced_by_list(&local);
            let spec = match d.orientation {
                DominoOrientation::Horizontal => CrossingSpec::horizontal(d.inner),
                DominoOrientation::Vertical => CrossingSpec::vertical(d.inner),
            };
            has_crossing(&sub, &spec).witness.map(|w| w.into_iter().map(|v| local[v]).collect())
        })
        .collect();
    for (d, w) in dominos.iter_mut().zip(witnesses) {
        d.admissible = w.is_some();
        d.witness = w;
    }

    let graph = if cfg.lambda > cfg.lambda_prime {
        let extra = sample_ppp(cfg.lambda - cfg.lambda_prime, &cfg.window, &seed.clone().named("sprinkle"))?;
        sprinkle_union(&base, &extra, &cf, &bonds)?
    } else {
        base
    };
    let buckets = Buckets::new(&graph, &cfg.window, r, mx, my);

    let annuli_template = if cfg.k_circuits > 0 {
        let r0 = (r / cfg.n_inner as f64).max(1.0);
        let n = geometric_annuli(Point::new(0.0, 0.0), r0, r / 2.0).len();
        if n < cfg.k_circuits {
            return param_err(format!(
                "only {n} disjoint annuli fit in a square of side {r}, cannot require {}",
                cfg.k_circuits
            ));
        }
        Some(r0)
    } else {
        None
    };

    let n_h = (mx - 1) * my;
    let h_index = |i: usize, j: usize| j * (mx - 1) + i;
    let v_index = |i: usize, j: usize| n_h + j * mx + i;
    let mut pairs = Vec::new();
    for j in 0..my {
        for i in 0..mx {
            for hi in [i.checked_sub(1), (i + 1 < mx).then_some(i)].into_iter().flatten() {
                for vj in [j.checked_sub(1), (j + 1 < my).then_some(j)].into_iter().flatten() {
                    pairs.push((h_index(hi, j), v_index(i, vj), (i, j)));
                }
            }
        }
    }
    let edges: Vec<HAuxEdge> = pairs
        .par_iter()
        .map(|&(h, v, (i, j))| -> Result<HAuxEdge> {
            let (dh, dv) = (&dominos[h], &dominos[v]);
            let mut edge = HAuxEdge { horizontal: h, vertical: v, square: (i, j), open: false, circuits: None };
            let (Some(wh), Some(wv)) = (&dh.witness, &dv.witness) else {
                return Ok(edge);
            };
            let (sx, sy) = (cfg.window.x0 + i as f64 * r, cfg.window.y0 + j as f64 * r);
            let square = Rect::new(sx, sx + r, sy, sy + r)?;
            let local = buckets.query(&graph, &square);
            let sub = graph.induced_by_list(&local);
            let mut uf = UnionFind::new(local.len());
            for &(a, b) in sub.edges() {
                uf.union(a as usize, b as usize);
            }
            let roots = |w: &[usize], uf: &mut UnionFind| -> Vec<usize> {
                let mut out: Vec<usize> = w
                    .iter()
                    .filter_map(|v| local.binary_search(v).ok())
                    .map(|x| uf.find(x))
                    .collect();
                out.sort_unstable();
                out.dedup();
                out
            };
            let rh = roots(wh, &mut uf);
            let rv = roots(wv, &mut uf);
            let joined = rh.iter().any(|x| rv.binary_search(x).is_ok());
            edge.open = joined;
            if let (true, Some(r0)) = (joined, annuli_template) {
                let annuli = geometric_annuli(square.center(), r0, r / 2.0);
                let count = count_disjoint_surrounding_circuits(&sub, &annuli)?;
                edge.circuits = Some(count);
                edge.open = count >= cfg.k_circuits;
            }
            Ok(edge)
        })
        .collect::<Result<_>>()?;

    let side = mx + my - 3;
    let lbox = LatticeBox::new(side, side)?;
    let mut lattice = BondConfig::uniform(lbox, false);
    lattice.q = f64::NAN;
    for e in edges.iter().filter(|e| e.open) {
        let (a, b) = (dominos[e.horizontal].site, dominos[e.vertical].site);
        if a.1 == b.1 {
            lattice.horizontal[lbox.h_edge(a.0.min(b.0), a.1)] = true;
        } else {
            lattice.vertical[lbox.v_edge(a.0, a.1.min(b.1))] = true;
        }
    }
    let admissible_fraction = dominos.iter().filter(|d| d.admissible).count() as f64 / dominos.len() as f64;
    let open_fraction = if edges.is_empty() {
        0.0
    } else {
        edges.iter().filter(|e| e.open).count() as f64 / edges.len() as f64
    };
    Ok(HAuxResult {
        lattice,
        dominos,
        edges,
        admissible_fraction,
        open_fraction,
        r: cfg.r,
        k_circuits: cfg.k_circuits,
        graph,
    })
}

impl HAuxResult {
    /// Dominos of the largest cluster of open adjacencies (ties go to the
    /// cluster containing the lowest domino index); empty when no edge is
    /// open.
    pub fn giant_dominos(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.dominos.len());
        let mut touched = vec![false; self.dominos.len()];
        for e in self.edges.iter().filter(|e| e.open) {
            uf.union(e.horizontal, e.vertical);
            touched[e.horizontal] = true;
            touched[e.vertical] = true;
        }
        let mut best: Option<(usize, usize)> = None;
        for d in (0..self.dominos.len()).filter(|&d| touched[d]) {
            let root = uf.find(d);
            let size = uf.component_size(root);
            if best.is_none_or(|(s, _)| size > s) {
                best = Some((size, root));
            }
        }
        let Some((_, root)) = best else {
            return Vec::new();
        };
        (0..self.dominos.len()).filter(|&d| touched[d] && uf.find(d) == root).collect()
    }

    /// Whether every witness vertex of the giant domino cluster lies in one
    /// component of the sprinkled graph.
    pub fn giant_maps_to_one_component(&self) -> bool {
        let giant = self.giant_dominos();
        let cl = label_components(&self.graph);
        let mut labels = giant
            .iter()
            .flat_map(|&d| self.dominos[d].witness.iter().flatten())
            .map(|&v| cl.label(v));
        match labels.next() {
            None => true,
            Some(first) => labels.all(|l| l == first),
        }
    }

    /// Every open edge joins two admissible dominos.
    pub fn open_edges_admissible(&self) -> bool {
        self.edges
            .iter()
            .filter(|e| e.open)
            .all(|e| self.dominos[e.horizontal].admissible && self.dominos[e.vertical].admissible)
    }

    /// Graph distance in the embedding lattice between the closest
    /// endpoints of two adjacencies.
    pub fn edge_distance(&self, e1: usize, e2: usize) -> usize {
        let ends = |e: &HAuxEdge| [self.dominos[e.horizontal].site, self.dominos[e.vertical].site];
        let (a, b) = (ends(&self.edges[e1]), ends(&self.edges[e2]));
        a.iter()
            .flat_map(|x| b.iter().map(move |y| x.0.abs_diff(y.0) + x.1.abs_diff(y.1)))
            .min()
            .expect("two endpoints each")
    }
}
