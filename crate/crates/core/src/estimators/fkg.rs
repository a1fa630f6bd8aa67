//! Empirical positive-correlation checks for increasing events and the
//! Poisson count tail bound.

use serde::{Deserialize, Serialize};

use super::crossing::Transform;
use super::{run_replicates, EventEstimate, MCConfig};
use crate::error::{param_err, Result};
use crate::geometry::Rect;
use crate::planar::{has_crossing, CrossingSpec};
use crate::points::sample_ppp;
use crate::rng::SeedSpec;
use crate::stats::{mean_sd, z_value};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkgReport {
    pub replicates: u64,
    pub p_a: f64,
    pub p_b: f64,
    pub p_ab: f64,
    /// `P(A ∩ B) − P(A) P(B)`.
    pub diff: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// The whole interval lies below zero.
    pub violation: bool,
}

/// Estimates the covariance of two indicator events evaluated on the same
/// sample; the interval uses the delta-method standard error.
pub fn fkg_check<F>(mc: &MCConfig, tag: &str, events: F) -> Result<FkgReport>
where
    F: Fn(&SeedSpec) -> Result<(bool, bool)> + Sync + Send,
{
    let outcomes = run_replicates(mc, tag, |_, s| events(s))?;
    let n = outcomes.len() as f64;
    let pa = outcomes.iter().filter(|o| o.0).count() as f64 / n;
    let pb = outcomes.iter().filter(|o| o.1).count() as f64 / n;
    let pab = outcomes.iter().filter(|o| o.0 && o.1).count() as f64 / n;
    let diff = pab - pa * pb;
    // influence of one replicate on the plug-in covariance
    let infl: Vec<f64> = outcomes
        .iter()
        .map(|&(a, b)| {
            let (a, b) = (a as u8 as f64, b as u8 as f64);
            (a - pa) * (b - pb)
        })
        .collect();
    let (_, sd) = mean_sd(&infl);
    let half = z_value(mc.confidence) * sd / n.sqrt();
    Ok(FkgReport {
        replicates: mc.replicates,
        p_a: pa,
        p_b: pb,
        p_ab: pab,
        diff,
        ci_lo: diff - half,
        ci_hi: diff + half,
        violation: diff + half < 0.0,
    })
}

/// Built-in pairs of increasing events on `G(λ, p)` in a square of side `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FkgPair {
    /// `A = B =` horizontal crossing of the square.
    Same,
    /// Horizontal crossings of the lower and the upper half.
    ParallelCrossings,
    /// Horizontal crossing of the square, and at least the median Poisson
    /// number of points in it.
    CrossingAndCount,
}

/// Median of a Poisson distribution with the given mean.
fn poisson_median(mean: f64) -> u64 {
    let mut k = 0u64;
    let mut pmf = (-mean).exp();
    let mut cdf = pmf;
    while cdf < 0.5 {
        k += 1;
        pmf *= mean / k as f64;
        cdf += pmf;
    }
    k
}

pub fn fkg_pair_check(pair: FkgPair, lambda: f64, p: f64, side: f64, mc: &MCConfig) -> Result<FkgReport> {
    if !(side > 0.0 && side.is_finite()) {
        return param_err("square side must be positive");
    }
    let square = Rect::square(side)?;
    let window = square.expand(1.0);
    let lower = Rect::new(0.0, side, 0.0, side / 2.0)?;
    let upper = Rect::new(0.0, side, side / 2.0, side)?;
    let median = poisson_median(lambda * square.area());
    let tag = format!("fkg-{pair:?}");
    fkg_check(mc, &tag, |s| {
        let g = Transform::None.sample(lambda, p, &window, s)?;
        let cross = |r: Rect| has_crossing(&g, &CrossingSpec::horizontal(r)).exists;
        Ok(match pair {
            FkgPair::Same => {
                let a = cross(square);
                (a, a)
            }
            FkgPair::ParallelCrossings => (cross(lower), cross(upper)),
            FkgPair::CrossingAndCount => {
                let count = (0..g.num_vertices()).filter(|&v| square.contains(&g.point(v))).count() as u64;
                (cross(square), count >= median)
            }
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonTailRow {
    pub eps: f64,
    /// Frequency of `|N − λA| ≥ ε`.
    pub tail: EventEstimate,
    /// `2 exp(−ε² / (2(λA + ε)))`.
    pub bound: f64,
    /// The bound is not contradicted: the interval's lower end is ≤ bound.
    pub respected: bool,
}

/// Counts of the point sampler on a square of area `area`, against the
/// Chernoff-type bound for each deviation.
pub fn poisson_tail_check(lambda: f64, area: f64, eps_list: &[f64], mc: &MCConfig) -> Result<Vec<PoissonTailRow>> {
    if !(area > 0.0 && lambda >= 0.0) {
        return param_err("area must be positive and intensity non-negative");
    }
    let window = Rect::square(area.sqrt())?;
    let counts = run_replicates(mc, "poisson-tail", |_, s| Ok(sample_ppp(lambda, &window, s)?.len() as f64))?;
    let mean = lambda * area;
    Ok(eps_list
        .iter()
        .map(|&eps| {
            let hits = counts.iter().filter(|&&c| (c - mean).abs() >= eps).count() as u64;
            let tail = EventEstimate::from_counts(hits, mc.replicates, mc.confidence);
            let bound = 2.0 * (-eps * eps / (2.0 * (mean + eps))).exp();
            PoissonTailRow { eps, tail, bound, respected: tail.ci_lo <= bound }
        })
        .collect())
}
