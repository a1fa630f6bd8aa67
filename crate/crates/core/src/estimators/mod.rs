//! Monte Carlo orchestration and the experiments built on it.
//!
//! Replicate `r` of an experiment tagged `tag` always draws from the stream
//! `SeedSpec::new(master).named(tag).child(r)`, so results depend only on the
//! configuration and never on scheduling. Experiments that compare
//! parameter values reuse the same tag (common random numbers); with the
//! coupled samplers of this crate the per-replicate outcomes are then
//! monotone in λ and p.

mod crossing;
mod finite_size;
mod fkg;
mod haux_stats;
mod theta;
mod threshold;

pub use crossing::{crossing_curve, CircuitTrial, CrossingCurveRow, CrossingTrial, Transform};
pub use finite_size::{finite_size_experiment, FiniteSizeCriterion, FiniteSizeReport, PairOutcome};
pub use fkg::{fkg_check, fkg_pair_check, poisson_tail_check, FkgPair, FkgReport, PoissonTailRow};
pub use haux_stats::{haux_experiment, CovarianceTest, HAuxReport};
pub use theta::{
    estimate_theta, isolated_square_probe, second_largest_scaling, IsolatedSquareOptions, IsolatedSquareReport,
    ScalingFit, ScalingRow, ThetaRow, ThetaTable,
};
pub use threshold::{
    check_duality, estimate_lambda_c, estimate_p_c, locality_curve, Boundary, Criterion, DualityReport,
    LocalityRow, LocalityTable, Probe, RDoubling, SearchRange, ThresholdResult,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::rng::SeedSpec;
use crate::stats::wilson;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub replicates: u64,
    pub seed: u64,
    pub confidence: f64,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub parallel: Option<usize>,
}

impl MCConfig {
    pub fn new(replicates: u64, seed: u64) -> Self {
        MCConfig { replicates, seed, confidence: 0.95, parallel: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return param_err("replicates must be >= 1");
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return param_err(format!("confidence must lie in (0,1), got {}", self.confidence));
        }
        if self.parallel == Some(0) {
            return param_err("parallel width must be >= 1");
        }
        Ok(())
    }

    pub fn with_replicates(&self, replicates: u64) -> Self {
        MCConfig { replicates, ..self.clone() }
    }

    /// Stream of replicate `r` under `tag`.
    pub fn replicate_seed(&self, tag: &str, r: u64) -> SeedSpec {
        SeedSpec::new(self.seed).named(tag).child(r)
    }
}

/// Runs `f(r, seed_r)` for every replicate and returns the results in
/// replicate order.
pub fn run_replicates<T, F>(mc: &MCConfig, tag: &str, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &SeedSpec) -> Result<T> + Sync + Send,
{
    mc.validate()?;
    let base = SeedSpec::new(mc.seed).named(tag);
    let work = || (0..mc.replicates).into_par_iter().map(|r| f(r, &base.child(r))).collect::<Result<Vec<T>>>();
    match mc.parallel {
        None => work(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Parameter(format!("cannot build worker pool: {e}")))?
            .install(work),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventEstimate {
    pub successes: u64,
    pub replicates: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl EventEstimate {
    pub fn from_counts(successes: u64, replicates: u64, confidence: f64) -> Self {
        let (ci_lo, ci_hi) = wilson(successes, replicates, confidence);
        EventEstimate { successes, replicates, p_hat: successes as f64 / replicates as f64, ci_lo, ci_hi }
    }

    pub fn overlaps(&self, other: &EventEstimate) -> bool {
        self.ci_lo <= other.ci_hi && other.ci_lo <= self.ci_hi
    }
}

/// Probability of an event evaluated once per replicate, with a Wilson
/// interval.
pub fn estimate_event_prob<F>(mc: &MCConfig, tag: &str, event: F) -> Result<EventEstimate>
where
    F: Fn(&SeedSpec) -> Result<bool> + Sync + Send,
{
    let hits = run_replicates(mc, tag, |_, s| event(s))?;
    let successes = hits.iter().filter(|&&h| h).count() as u64;
    Ok(EventEstimate::from_counts(successes, mc.replicates, mc.confidence))
}
