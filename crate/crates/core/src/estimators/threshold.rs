//! Critical-parameter estimation by bisection against a finite-size
//! supercriticality criterion.
//!
//! The criterion at `(λ, p)` is that a `aspect·R × R` rectangle is crossed
//! the long way with probability at least `level`. All probes of one search
//! share the replicate streams, so the estimated probability is exactly
//! non-decreasing in the probed parameter and the bisection is consistent.

use serde::{Deserialize, Serialize};

use super::crossing::{CrossingTrial, Transform};
use super::{EventEstimate, MCConfig};
use crate::error::{param_err, Error, Result};
use crate::geometry::Rect;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub r: f64,
    pub aspect: f64,
    pub level: f64,
    pub transform: Transform,
    /// Repeat the search at `R/2` and require the estimate to move by less
    /// than the bracket width.
    pub doubling: bool,
}

impl Criterion {
    pub fn crossing(r: f64) -> Self {
        Criterion { r, aspect: 2.0, level: 0.5, transform: Transform::None, doubling: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite() && self.aspect > 0.0 && self.aspect.is_finite()) {
            return param_err("criterion scale and aspect must be positive");
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return param_err(format!("criterion level must lie in (0,1), got {}", self.level));
        }
        self.transform.validate()
    }

    pub fn describe(&self) -> String {
        format!(
            "P(horizontal crossing of [0,{a}R]x[0,R]) >= {l} at R={r}, transform={t}",
            a = self.aspect,
            l = self.level,
            r = self.r,
            t = serde_json::to_string(&self.transform).unwrap_or_default()
        )
    }

    fn probe(&self, lambda: f64, p: f64, param: f64, mc: &MCConfig) -> Result<Probe> {
        let rect = Rect::new(0.0, self.aspect * self.r, 0.0, self.r)?;
        let trial = CrossingTrial { transform: self.transform, ..CrossingTrial::horizontal(lambda, p, rect) };
        let estimate = trial.estimate(mc, &format!("criterion-{}", self.r))?;
        Ok(Probe { param, estimate, passes: estimate.p_hat >= self.level })
    }

    fn half(&self) -> Criterion {
        Criterion { r: self.r / 2.0, doubling: false, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRange {
    pub lo: f64,
    pub hi: f64,
    pub resolution: f64,
}

impl SearchRange {
    pub fn new(lo: f64, hi: f64, resolution: f64) -> Result<Self> {
        if !(lo < hi && resolution > 0.0 && lo.is_finite() && hi.is_finite()) {
            return param_err(format!("invalid search range [{lo}, {hi}] at resolution {resolution}"));
        }
        Ok(SearchRange { lo, hi, resolution })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub param: f64,
    pub estimate: EventEstimate,
    pub passes: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// The criterion already holds at the bottom of the range.
    Below,
    /// The criterion fails even at the top of the range.
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RDoubling {
    pub r_half: f64,
    pub estimate_half: f64,
    pub bracket_half: (f64, f64),
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// `"lambda"` or `"p"`.
    pub parameter: String,
    /// Value of the other parameter.
    pub fixed: f64,
    /// Level crossing interpolated linearly between the final bracket ends.
    pub estimate: f64,
    pub bracket: (f64, f64),
    /// Probed values whose Wilson interval lies entirely below / above the
    /// level, closest to the threshold.
    pub ci: (f64, f64),
    pub criterion: String,
    pub probes: Vec<Probe>,
    pub boundary: Option<Boundary>,
    pub r_doubling: Option<RDoubling>,
}

impl ThresholdResult {
    pub fn width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }

    pub fn brackets_disjoint(&self, other: &ThresholdResult) -> bool {
        self.bracket.1 < other.bracket.0 || other.bracket.1 < self.bracket.0
    }
}

fn bisect(
    parameter: &str,
    fixed: f64,
    range: &SearchRange,
    criterion: &Criterion,
    mut eval: impl FnMut(f64) -> Result<Probe>,
) -> Result<ThresholdResult> {
    let mut probes = Vec::new();
    let top = eval(range.hi)?;
    probes.push(top);
    let result = |estimate: f64, bracket: (f64, f64), boundary, probes: Vec<Probe>| {
        let mut sorted = probes.clone();
        sorted.sort_by(|a, b| a.param.total_cmp(&b.param));
        for (i, a) in sorted.iter().enumerate() {
            if let Some(b) = sorted[i + 1..].iter().find(|b| a.estimate.ci_lo > b.estimate.ci_hi) {
                return Err(Error::Diagnostic(format!(
                    "criterion not monotone in {parameter}: {} at {} but {} at {}",
                    a.estimate.p_hat, a.param, b.estimate.p_hat, b.param
                )));
            }
        }
        let ci_lo = sorted
            .iter()
            .filter(|p| p.estimate.ci_hi < criterion.level)
            .map(|p| p.param)
            .fold(range.lo, f64::max);
        let ci_hi = sorted
            .iter()
            .filter(|p| p.estimate.ci_lo > criterion.level)
            .map(|p| p.param)
            .fold(range.hi, f64::min);
        Ok(ThresholdResult {
            parameter: parameter.to_string(),
            fixed,
            estimate,
            bracket,
            ci: (ci_lo.min(bracket.0), ci_hi.max(bracket.1)),
            criterion: criterion.describe(),
            probes: sorted,
            boundary,
            r_doubling: None,
        })
    };
    if !top.passes {
        return result(range.hi, (range.hi, range.hi), Some(Boundary::Above), probes);
    }
    let bottom = eval(range.lo)?;
    probes.push(bottom);
    if bottom.passes {
        return result(range.lo, (range.lo, range.lo), Some(Boundary::Below), probes);
    }
    let (mut lo, mut hi) = (bottom, top);
    // relative slack so that e.g. 6.4 / 64 counts as 0.1
    while hi.param - lo.param > range.resolution * (1.0 + 1e-9) {
        let mid = eval(0.5 * (lo.param + hi.param))?;
        probes.push(mid);
        if mid.passes {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    assert!(!lo.passes && hi.passes, "bisection bracket must straddle the level");
    let (ylo, yhi) = (lo.estimate.p_hat, hi.estimate.p_hat);
    let estimate = lo.param + (hi.param - lo.param) * (criterion.level - ylo) / (yhi - ylo);
    result(estimate, (lo.param, hi.param), None, probes)
}

fn with_doubling(
    criterion: &Criterion,
    run: impl Fn(&Criterion) -> Result<ThresholdResult>,
) -> Result<ThresholdResult> {
    criterion.validate()?;
    let mut res = run(criterion)?;
    if criterion.doubling {
        let half = run(&criterion.half())?;
        res.r_doubling = Some(RDoubling {
            r_half: criterion.r / 2.0,
            estimate_half: half.estimate,
            bracket_half: half.bracket,
            stable: (res.estimate - half.estimate).abs() < res.width(),
        });
    }
    Ok(res)
}

/// Bisection on λ at fixed `p`.
pub fn estimate_lambda_c(p: f64, criterion: &Criterion, range: &SearchRange, mc: &MCConfig) -> Result<ThresholdResult> {
    if !(p > 0.0 && p <= 1.0) {
        return param_err(format!("bond probability must lie in (0,1], got {p}"));
    }
    if range.lo < 0.0 {
        return param_err("intensity range must be non-negative");
    }
    with_doubling(criterion, |c| bisect("lambda", p, range, c, |l| c.probe(l, p, l, mc)))
}

/// Bisection on p at fixed λ. When the criterion fails at `p = 1` the
/// result is the boundary value 1, flagged [`Boundary::Above`].
pub fn estimate_p_c(lambda: f64, criterion: &Criterion, range: &SearchRange, mc: &MCConfig) -> Result<ThresholdResult> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return param_err(format!("intensity must be positive, got {lambda}"));
    }
    if range.lo < 0.0 || range.hi > 1.0 {
        return param_err("bond probability range must lie in [0,1]");
    }
    with_doubling(criterion, |c| bisect("p", lambda, range, c, |p| c.probe(lambda, p, p, mc)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub lambda: f64,
    pub p_c: ThresholdResult,
    /// `λ̂_c` at `p̂_c` and at the two ends of its bracket.
    pub lambda_c: Option<ThresholdResult>,
    pub lambda_c_at_p_lo: Option<ThresholdResult>,
    pub lambda_c_at_p_hi: Option<ThresholdResult>,
    pub relative_error: Option<f64>,
    /// Whether `λ` lies between the brackets obtained at the ends of the
    /// `p̂_c` bracket.
    pub brackets_overlap: Option<bool>,
    /// Set when `p̂_c` hit the boundary and the round trip was not run.
    pub skipped: bool,
}

/// Round trip `λ → p̂_c(λ) → λ̂_c(p̂_c(λ))`.
pub fn check_duality(
    lambda: f64,
    criterion: &Criterion,
    p_range: &SearchRange,
    lambda_range: &SearchRange,
    mc: &MCConfig,
) -> Result<DualityReport> {
    let p_c = estimate_p_c(lambda, criterion, p_range, mc)?;
    if p_c.boundary.is_some() {
        return Ok(DualityReport {
            lambda,
            p_c,
            lambda_c: None,
            lambda_c_at_p_lo: None,
            lambda_c_at_p_hi: None,
            relative_error: None,
            brackets_overlap: None,
            skipped: true,
        });
    }
    let back = estimate_lambda_c(p_c.estimate, criterion, lambda_range, mc)?;
    let plain = Criterion { doubling: false, ..*criterion };
    let at_lo = estimate_lambda_c(p_c.bracket.0.max(f64::MIN_POSITIVE), &plain, lambda_range, mc)?;
    let at_hi = estimate_lambda_c(p_c.bracket.1, &plain, lambda_range, mc)?;
    let overlap = at_hi.bracket.0 <= lambda && lambda <= at_lo.bracket.1;
    Ok(DualityReport {
        lambda,
        relative_error: Some((back.estimate - lambda).abs() / lambda),
        lambda_c: Some(back),
        lambda_c_at_p_lo: Some(at_lo),
        lambda_c_at_p_hi: Some(at_hi),
        brackets_overlap: Some(overlap),
        skipped: false,
        p_c,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityRow {
    pub transform: Transform,
    pub result: ThresholdResult,
    /// `p̂_c(transformed) − p̂_c(untransformed)`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityTable {
    pub lambda: f64,
    pub base: ThresholdResult,
    pub rows: Vec<LocalityRow>,
    /// `p̂_c` moves monotonically towards the base value along the levels
    /// (non-increasing in `k`, non-decreasing in `ε`); `None` for mixed or
    /// unordered levels.
    pub monotone: Option<bool>,
    /// Every level's estimate is at least the lower end of the base CI.
    pub above_base: bool,
    pub final_gap: Option<f64>,
}

/// `p̂_c` of transformed samples for each level, against the untransformed
/// value. Transformed graphs are subgraphs of the original, so their
/// thresholds can only be larger.
pub fn locality_curve(
    lambda: f64,
    criterion: &Criterion,
    levels: &[Transform],
    p_range: &SearchRange,
    mc: &MCConfig,
) -> Result<LocalityTable> {
    let base_criterion = Criterion { transform: Transform::None, ..*criterion };
    let base = estimate_p_c(lambda, &base_criterion, p_range, mc)?;
    let mut rows = Vec::with_capacity(levels.len());
    for &t in levels {
        let result = estimate_p_c(lambda, &Criterion { transform: t, ..*criterion }, p_range, mc)?;
        rows.push(LocalityRow { transform: t, gap: result.estimate - base.estimate, result });
    }
    let est: Vec<f64> = rows.iter().map(|r| r.result.estimate).collect();
    let monotone = if rows.iter().all(|r| matches!(r.transform, Transform::DegreeTruncate(_))) {
        let ks: Vec<usize> = rows
            .iter()
            .map(|r| match r.transform {
                Transform::DegreeTruncate(k) => k,
                _ => unreachable!(),
            })
            .collect();
        ks.windows(2).all(|w| w[0] < w[1]).then(|| est.windows(2).all(|w| w[1] <= w[0]))
    } else if rows.iter().all(|r| matches!(r.transform, Transform::DistanceThin(_))) {
        let es: Vec<f64> = rows
            .iter()
            .map(|r| match r.transform {
                Transform::DistanceThin(e) => e,
                _ => unreachable!(),
            })
            .collect();
        es.windows(2).all(|w| w[0] < w[1]).then(|| est.windows(2).all(|w| w[1] >= w[0]))
    } else {
        None
    };
    let above_base = est.iter().all(|&e| e >= base.ci.0);
    Ok(LocalityTable {
        lambda,
        final_gap: rows.last().map(|r| r.gap),
        monotone,
        above_base,
        base,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (Criterion, MCConfig) {
        (Criterion::crossing(4.0), MCConfig::new(60, 11))
    }

    #[test]
    fn bracket_contains_estimate_and_sign_change() {
        let (c, mc) = small();
        let res = estimate_lambda_c(1.0, &c, &SearchRange::new(0.0, 8.0, 0.25).unwrap(), &mc).unwrap();
        assert!(res.boundary.is_none());
        assert!(res.bracket.0 <= res.estimate && res.estimate <= res.bracket.1);
        assert!(res.width() <= 0.25);
        let at = |x: f64| res.probes.iter().find(|p| p.param == x).unwrap().passes;
        assert!(!at(res.bracket.0) && at(res.bracket.1));
        // probes are exactly monotone under common random numbers
        assert!(res.probes.windows(2).all(|w| w[0].estimate.p_hat <= w[1].estimate.p_hat));
        assert!(res.ci.0 <= res.bracket.0 && res.bracket.1 <= res.ci.1);
    }

    #[test]
    fn far_from_threshold() {
        let (c, mc) = small();
        let below = c.probe(0.3, 1.0, 0.3, &mc).unwrap();
        let above = c.probe(6.0, 1.0, 6.0, &mc).unwrap();
        assert!(below.estimate.p_hat < 0.05 && above.estimate.p_hat > 0.95);
    }

    #[test]
    fn subcritical_intensity_gives_boundary() {
        let (c, mc) = small();
        let res = estimate_p_c(0.5, &c, &SearchRange::new(0.0, 1.0, 0.05).unwrap(), &mc).unwrap();
        assert_eq!(res.boundary, Some(Boundary::Above));
        assert_eq!(res.estimate, 1.0);
        let d = check_duality(
            0.5,
            &c,
            &SearchRange::new(0.0, 1.0, 0.05).unwrap(),
            &SearchRange::new(0.0, 8.0, 0.25).unwrap(),
            &mc,
        )
        .unwrap();
        assert!(d.skipped && d.relative_error.is_none());
    }

    #[test]
    fn dense_graph_needs_few_bonds() {
        let (c, mc) = small();
        let res = estimate_p_c(50.0, &c, &SearchRange::new(0.0, 1.0, 0.01).unwrap(), &mc.with_replicates(20)).unwrap();
        assert!(res.estimate < 0.1, "{}", res.estimate);
    }

    #[test]
    fn doubling_report() {
        let (mut c, mc) = small();
        c.doubling = true;
        let res = estimate_lambda_c(1.0, &c, &SearchRange::new(0.0, 8.0, 0.5).unwrap(), &mc).unwrap();
        let d = res.r_doubling.unwrap();
        assert_eq!(d.r_half, 2.0);
        assert_eq!(d.stable, (res.estimate - d.estimate_half).abs() < res.width());
    }
}
