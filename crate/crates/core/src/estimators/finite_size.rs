//! The finite-size event `A_Q` on squares of area `m` and its pair version
//! `A_{Q,Q'}` for adjacent squares.

use serde::{Deserialize, Serialize};

use super::{run_replicates, EventEstimate, MCConfig};
use crate::components::{label_components, ComponentLabeling};
use crate::error::{param_err, Result};
use crate::geometry::Rect;
use crate::graph::{build_percolated, ConnectionFunction, Graph};
use crate::points::sample_ppp;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteSizeCriterion {
    pub m: f64,
    pub theta_hat: f64,
    pub lambda: f64,
    pub p: f64,
    /// `λ θ̂ m / 10`.
    pub second_max: f64,
    /// `λ θ̂ m / 8`.
    pub quarter_min: f64,
}

impl FiniteSizeCriterion {
    pub fn new(m: f64, theta_hat: f64, lambda: f64, p: f64) -> Result<Self> {
        if !(theta_hat > 0.0 && theta_hat <= 1.0) {
            return param_err(format!("reference density must lie in (0,1], got {theta_hat}"));
        }
        if !(m > 0.0 && m.is_finite() && lambda > 0.0 && lambda.is_finite()) {
            return param_err("area and intensity must be positive");
        }
        if !(0.0..=1.0).contains(&p) {
            return param_err(format!("bond probability must lie in [0,1], got {p}"));
        }
        let scale = lambda * theta_hat * m;
        Ok(FiniteSizeCriterion { m, theta_hat, lambda, p, second_max: scale / 10.0, quarter_min: scale / 8.0 })
    }

    pub fn side(&self) -> f64 {
        self.m.sqrt()
    }

    /// Components of the subgraph induced by the vertices in `q`, with the
    /// original index of each vertex.
    fn restricted(g: &Graph, q: &Rect) -> (ComponentLabeling, Vec<usize>) {
        let inside: Vec<usize> = (0..g.num_vertices()).filter(|&v| q.contains(&g.point(v))).collect();
        (label_components(&g.induced_by_list(&inside)), inside)
    }

    /// `A_Q`: the second-largest component of `G[Q]` is small and each
    /// quarter of `Q` has a large component of its own.
    pub fn a_q(&self, g: &Graph, q: &Rect) -> bool {
        let (cl, _) = Self::restricted(g, q);
        if cl.kth_size(1) as f64 > self.second_max {
            return false;
        }
        let (cx, cy) = (0.5 * (q.x0 + q.x1), 0.5 * (q.y0 + q.y1));
        [(q.x0, cx, q.y0, cy), (cx, q.x1, q.y0, cy), (q.x0, cx, cy, q.y1), (cx, q.x1, cy, q.y1)]
            .into_iter()
            .all(|(x0, x1, y0, y1)| {
                let quarter = Rect { x0, x1, y0, y1 };
                Self::restricted(g, &quarter).0.kth_size(0) as f64 >= self.quarter_min
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub a_q: bool,
    pub a_q2: bool,
    pub a_mid: bool,
    /// Whether the largest components of `G[Q]` and `G[Q']` lie in one
    /// component of `g`; evaluated only when all three events hold.
    pub connected: Option<bool>,
}

impl PairOutcome {
    pub fn holds(&self) -> bool {
        self.a_q && self.a_q2 && self.a_mid
    }
}

/// Evaluates `A_{Q,Q'}` for `Q = [x0, x0+s] × [y0, y0+s]` and its right
/// neighbour `Q'`; `Q''` is the square of the same size centred on their
/// common side. `g` must contain the sample on `Q ∪ Q'`.
pub fn evaluate_pair(crit: &FiniteSizeCriterion, g: &Graph, x0: f64, y0: f64) -> PairOutcome {
    let s = crit.side();
    let q = Rect { x0, x1: x0 + s, y0, y1: y0 + s };
    let q2 = Rect { x0: x0 + s, x1: x0 + 2.0 * s, y0, y1: y0 + s };
    let mid = Rect { x0: x0 + 0.5 * s, x1: x0 + 1.5 * s, y0, y1: y0 + s };
    let mut out = PairOutcome { a_q: crit.a_q(g, &q), a_q2: crit.a_q(g, &q2), a_mid: crit.a_q(g, &mid), connected: None };
    if out.holds() {
        let largest = |r: &Rect| {
            let (cl, back) = FiniteSizeCriterion::restricted(g, r);
            cl.kth_label(0).map(|l| back[cl.members(l)[0]])
        };
        let whole = label_components(g);
        out.connected = Some(match (largest(&q), largest(&q2)) {
            (Some(a), Some(b)) => whole.label(a) == whole.label(b),
            _ => false,
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteSizeReport {
    pub criterion: FiniteSizeCriterion,
    pub a_q: EventEstimate,
    pub a_pair: EventEstimate,
    /// Samples where `A_{Q,Q'}` held but the two largest components were
    /// not connected.
    pub violations: u64,
}

/// Samples `G(λ, p)` on two adjacent squares of area `m` per replicate.
pub fn finite_size_experiment(crit: &FiniteSizeCriterion, mc: &MCConfig) -> Result<FiniteSizeReport> {
    let s = crit.side();
    let window = Rect::new(0.0, 2.0 * s, 0.0, s)?;
    let cf = ConnectionFunction::constant(crit.p)?;
    let outcomes = run_replicates(mc, "finite-size", |_, seed| {
        let points = sample_ppp(crit.lambda, &window, &seed.named("points"))?;
        let g = build_percolated(points, &cf, &seed.named("bonds"));
        Ok(evaluate_pair(crit, &g, 0.0, 0.0))
    })?;
    let count = |f: &dyn Fn(&PairOutcome) -> bool| outcomes.iter().filter(|o| f(o)).count() as u64;
    Ok(FiniteSizeReport {
        criterion: *crit,
        a_q: EventEstimate::from_counts(count(&|o| o.a_q), mc.replicates, mc.confidence),
        a_pair: EventEstimate::from_counts(count(&|o| o.holds()), mc.replicates, mc.confidence),
        violations: count(&|o| o.connected == Some(false)),
    })
}
