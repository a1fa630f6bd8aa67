use serde::{Deserialize, Serialize};

use super::{estimate_event_prob, EventEstimate, MCConfig};
use crate::error::{param_err, Result};
use crate::geometry::{Rect, SquareAnnulus};
use crate::graph::{
    build_percolated, build_rgg, percolate_bonds, transform_degree_truncate, transform_distance_thin,
    transform_site_thin, ConnectionFunction, Graph,
};
use crate::planar::{has_circuit, has_crossing, CircuitMode, CircuitSpec, CrossingSpec, Orientation};
use crate::points::sample_ppp;
use crate::rng::SeedSpec;

/// Modification of the sample applied before bond percolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Transform {
    None,
    /// Drop vertices of degree `> k` in `G(λ, 1)`.
    DegreeTruncate(usize),
    /// Drop points having another point within distance `ε`.
    DistanceThin(f64),
    /// Keep each point independently with probability `s`.
    SiteThin(f64),
}

impl Transform {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Transform::DistanceThin(e) if !(e > 0.0 && e.is_finite()) => param_err("thinning radius must be positive"),
            Transform::SiteThin(s) if !(0.0..=1.0).contains(&s) => param_err("retention probability must lie in [0,1]"),
            _ => Ok(()),
        }
    }

    /// Samples `Po(λ)` on `window`, applies the transform and percolates
    /// with the stream's `"bonds"` child.
    pub fn sample(&self, lambda: f64, p: f64, window: &Rect, seed: &SeedSpec) -> Result<Graph> {
        let cf = ConnectionFunction::constant(p)?;
        let points = sample_ppp(lambda, window, &seed.named("points"))?;
        let bonds = seed.named("bonds");
        Ok(match *self {
            Transform::None => build_percolated(points, &cf, &bonds),
            Transform::DegreeTruncate(k) => percolate_bonds(&transform_degree_truncate(&build_rgg(points), k), &cf, &bonds),
            Transform::DistanceThin(e) => build_percolated(transform_distance_thin(&points, e)?, &cf, &bonds),
            Transform::SiteThin(s) => build_percolated(transform_site_thin(&points, s, &seed.named("thin"))?, &cf, &bonds),
        })
    }
}

/// One replicate of a crossing event: points sampled on the rectangle
/// enlarged by 1, so that first and last edges may leave it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingTrial {
    pub lambda: f64,
    pub p: f64,
    pub rect: Rect,
    pub orientation: Orientation,
    pub transform: Transform,
}

impl CrossingTrial {
    pub fn horizontal(lambda: f64, p: f64, rect: Rect) -> Self {
        CrossingTrial { lambda, p, rect, orientation: Orientation::Horizontal, transform: Transform::None }
    }

    pub fn run(&self, seed: &SeedSpec) -> Result<bool> {
        let g = self.transform.sample(self.lambda, self.p, &self.rect.expand(1.0), seed)?;
        Ok(has_crossing(&g, &CrossingSpec { rect: self.rect, orientation: self.orientation }).exists)
    }

    pub fn estimate(&self, mc: &MCConfig, tag: &str) -> Result<EventEstimate> {
        self.transform.validate()?;
        estimate_event_prob(mc, tag, |s| self.run(s))
    }
}

/// One replicate of a circuit event in an annulus, sampled on its outer box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitTrial {
    pub lambda: f64,
    pub p: f64,
    pub annulus: SquareAnnulus,
    pub mode: CircuitMode,
}

impl CircuitTrial {
    pub fn run(&self, seed: &SeedSpec) -> Result<bool> {
        let g = Transform::None.sample(self.lambda, self.p, &self.annulus.outer_box(), seed)?;
        has_circuit(&g, &CircuitSpec { annulus: self.annulus, mode: self.mode })
    }

    pub fn estimate(&self, mc: &MCConfig, tag: &str) -> Result<EventEstimate> {
        estimate_event_prob(mc, tag, |s| self.run(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingCurveRow {
    pub r: f64,
    pub estimate: EventEstimate,
}

/// Probability of a horizontal crossing of `[0, κR] × [0, R]` for each `R`.
pub fn crossing_curve(lambda: f64, p: f64, kappa: f64, r_list: &[f64], mc: &MCConfig) -> Result<Vec<CrossingCurveRow>> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return param_err(format!("aspect ratio must be positive, got {kappa}"));
    }
    r_list
        .iter()
        .map(|&r| {
            let rect = Rect::new(0.0, kappa * r, 0.0, r)?;
            let estimate = CrossingTrial::horizontal(lambda, p, rect).estimate(mc, &format!("crossing-{r}"))?;
            Ok(CrossingCurveRow { r, estimate })
        })
        .collect()
}
