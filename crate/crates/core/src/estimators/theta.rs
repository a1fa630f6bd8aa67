//! Giant-component density, second-largest component scaling, and the
//! isolated-square probe.

use serde::{Deserialize, Serialize};

use super::{run_replicates, EventEstimate, MCConfig};
use crate::components::label_percolated;
use crate::error::{param_err, Result};
use crate::geometry::{Point, Rect};
use crate::graph::ConnectionFunction;
use crate::points::{sample_ppp, PointSet};
use crate::rng::SeedSpec;
use crate::stats::{linear_fit, mean_sd, t_value};

/// Mean largest-component density below which a run is flagged subcritical.
pub const SUBCRITICAL_THETA: f64 = 0.05;

fn check_model(lambda: f64, p: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return param_err(format!("intensity must be positive, got {lambda}"));
    }
    if !(0.0..=1.0).contains(&p) {
        return param_err(format!("bond probability must lie in [0,1], got {p}"));
    }
    Ok(())
}

/// Largest and second-largest component sizes of `G(λ, p)` on `[0, √n]²`.
fn giant_pair(lambda: f64, p: f64, n: f64, seed: &SeedSpec) -> Result<(usize, usize)> {
    let window = Rect::square(n.sqrt())?;
    let points = sample_ppp(lambda, &window, &seed.named("points"))?;
    let cl = label_percolated(&points, &ConnectionFunction::constant(p)?, &seed.named("bonds"));
    Ok((cl.kth_size(0), cl.kth_size(1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaRow {
    pub n: f64,
    pub replicates: u64,
    pub mean: f64,
    pub sd: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaTable {
    pub lambda: f64,
    pub p: f64,
    pub rows: Vec<ThetaRow>,
    pub sd_decreasing: bool,
    /// Successive means have overlapping confidence intervals.
    pub means_consistent: bool,
    pub subcritical: bool,
}

fn check_schedule(ns: &[f64]) -> Result<()> {
    if ns.is_empty() || ns.iter().any(|&n| !(n > 0.0 && n.is_finite())) {
        return param_err("window sizes must be positive");
    }
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return param_err("window sizes must be strictly increasing");
    }
    Ok(())
}

/// Per window size, mean and SD of `L1 / (λ n)` over replicates.
pub fn estimate_theta(lambda: f64, p: f64, ns: &[f64], mc: &MCConfig) -> Result<ThetaTable> {
    check_model(lambda, p)?;
    check_schedule(ns)?;
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let l1 = run_replicates(mc, &format!("theta-{n}"), |_, s| Ok(giant_pair(lambda, p, n, s)?.0))?;
        let xs: Vec<f64> = l1.iter().map(|&l| l as f64 / (lambda * n)).collect();
        let (mean, sd) = mean_sd(&xs);
        let half = if xs.len() > 1 {
            t_value(mc.confidence, (xs.len() - 1) as f64) * sd / (xs.len() as f64).sqrt()
        } else {
            f64::INFINITY
        };
        rows.push(ThetaRow { n, replicates: mc.replicates, mean, sd, ci_lo: mean - half, ci_hi: mean + half });
    }
    Ok(ThetaTable {
        lambda,
        p,
        sd_decreasing: rows.windows(2).all(|w| w[1].sd < w[0].sd),
        means_consistent: rows.windows(2).all(|w| w[0].ci_lo <= w[1].ci_hi && w[1].ci_lo <= w[0].ci_hi),
        subcritical: rows.last().is_some_and(|r| r.mean <= SUBCRITICAL_THETA),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: f64,
    pub replicates: u64,
    pub mean_l2: f64,
    pub sd_l2: f64,
    pub mean_theta: f64,
    /// `mean_l2 / (ln n)²`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub lambda: f64,
    pub p: f64,
    pub rows: Vec<ScalingRow>,
    /// Regression of mean `L2` on `(ln n)²`; `None` when the schedule has
    /// fewer than four sizes or spans less than two decades.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    pub slope_ci: Option<(f64, f64)>,
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub ratio_spread: f64,
    /// The largest component is not macroscopic; the `(ln n)²` law does not
    /// apply and the fit, if any, is reported only for inspection.
    pub subcritical: bool,
}

/// Mean second-largest component size against `(ln n)²`.
pub fn second_largest_scaling(lambda: f64, p: f64, ns: &[f64], mc: &MCConfig) -> Result<ScalingFit> {
    check_model(lambda, p)?;
    check_schedule(ns)?;
    if ns[0] <= 1.0 {
        return param_err("window sizes must exceed 1");
    }
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let pairs = run_replicates(mc, &format!("scaling-{n}"), |_, s| giant_pair(lambda, p, n, s))?;
        let l2: Vec<f64> = pairs.iter().map(|&(_, b)| b as f64).collect();
        let theta: Vec<f64> = pairs.iter().map(|&(a, _)| a as f64 / (lambda * n)).collect();
        let (mean_l2, sd_l2) = mean_sd(&l2);
        let log2 = n.ln().powi(2);
        rows.push(ScalingRow {
            n,
            replicates: mc.replicates,
            mean_l2,
            sd_l2,
            mean_theta: mean_sd(&theta).0,
            ratio: mean_l2 / log2,
        });
    }
    let ratio_min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    let ratio_max = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let fit_allowed = ns.len() >= 4 && ns[ns.len() - 1] / ns[0] >= 100.0;
    let fit = if fit_allowed {
        let xs: Vec<f64> = rows.iter().map(|r| r.n.ln().powi(2)).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.mean_l2).collect();
        linear_fit(&xs, &ys)
    } else {
        None
    };
    let slope_ci = fit.map(|f| {
        let h = t_value(mc.confidence, (f.n - 2) as f64) * f.slope_se;
        (f.slope - h, f.slope + h)
    });
    Ok(ScalingFit {
        lambda,
        p,
        slope: fit.map(|f| f.slope),
        intercept: fit.map(|f| f.intercept),
        r_squared: fit.map(|f| f.r_squared),
        slope_ci,
        ratio_min,
        ratio_max,
        ratio_spread: ratio_max / ratio_min,
        subcritical: rows.last().is_some_and(|r| r.mean_theta <= SUBCRITICAL_THETA),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolatedSquareOptions {
    /// Largest components of at least `c (ln n)²` points qualify.
    pub c: f64,
    /// Replaces the default side `ln n / (5λ)`.
    pub side: Option<f64>,
    pub confidence: f64,
}

impl Default for IsolatedSquareOptions {
    fn default() -> Self {
        IsolatedSquareOptions { c: 1.0, side: None, confidence: 0.95 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsolatedSquareReport {
    pub lambda: f64,
    pub p: f64,
    pub n: f64,
    pub side: f64,
    pub squares: u64,
    /// Squares with no point within distance 1 of their boundary.
    pub collar_empty: EventEstimate,
    /// Collar-empty squares whose largest inner component has at least
    /// `c (ln n)²` points.
    pub qualifying: u64,
    /// `n^{-4/5}`.
    pub predicted_lower: f64,
    /// `exp(-λ · collar area)`, the exact collar-empty probability.
    pub collar_exact: f64,
}

/// Tessellates `[0, √n]²` (from the origin, dropping the partial last row and
/// column) into squares and looks for those whose collar is empty while the
/// interior still holds a large component.
pub fn isolated_square_probe(
    lambda: f64,
    p: f64,
    n: f64,
    seed: &SeedSpec,
    opts: &IsolatedSquareOptions,
) -> Result<IsolatedSquareReport> {
    check_model(lambda, p)?;
    if !(n > 1.0 && n.is_finite()) {
        return param_err("window size must exceed 1");
    }
    let side = opts.side.unwrap_or(n.ln() / (5.0 * lambda));
    if !(side >= 3.0) {
        return param_err(format!("square side {side:.3} < 3 leaves no interior beyond the collar"));
    }
    let l = n.sqrt();
    let per_row = (l / side).floor() as usize;
    if per_row == 0 {
        return param_err("square side exceeds the window");
    }
    let window = Rect::square(l)?;
    let points = sample_ppp(lambda, &window, &seed.named("points"))?;
    let cf = ConnectionFunction::constant(p)?;
    let bonds = seed.named("bonds");
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); per_row * per_row];
    for (v, q) in points.points.iter().enumerate() {
        let i = (q.x / side).floor() as usize;
        let j = (q.y / side).floor() as usize;
        if i < per_row && j < per_row {
            members[j * per_row + i].push(v);
        }
    }
    let threshold = opts.c * n.ln().powi(2);
    let (mut empty, mut qualifying) = (0u64, 0u64);
    for (cell, vs) in members.iter().enumerate() {
        let (i, j) = (cell % per_row, cell / per_row);
        let sq = Rect::new(i as f64 * side, (i + 1) as f64 * side, j as f64 * side, (j + 1) as f64 * side)?;
        let core = Rect::new(sq.x0 + 1.0, sq.x1 - 1.0, sq.y0 + 1.0, sq.y1 - 1.0)?;
        let in_core = |q: &Point| q.x > core.x0 && q.x < core.x1 && q.y > core.y0 && q.y < core.y1;
        if !vs.iter().all(|&v| in_core(&points.points[v])) {
            continue;
        }
        empty += 1;
        let sub = PointSet {
            points: vs.iter().map(|&v| points.points[v]).collect(),
            ids: vs.iter().map(|&v| points.ids[v]).collect(),
            rect: sq,
            lambda,
            seed: None,
        };
        let cl = label_percolated(&sub, &cf, &bonds);
        if cl.kth_size(0) as f64 >= threshold {
            qualifying += 1;
        }
    }
    let squares = (per_row * per_row) as u64;
    let collar_area = side * side - (side - 2.0) * (side - 2.0);
    Ok(IsolatedSquareReport {
        lambda,
        p,
        n,
        side,
        squares,
        collar_empty: EventEstimate::from_counts(empty, squares, opts.confidence),
        qualifying,
        predicted_lower: n.powf(-0.8),
        collar_exact: (-lambda * collar_area).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_bonds_means_singletons() {
        let mc = MCConfig::new(5, 1);
        let t = estimate_theta(2.0, 0.0, &[100.0, 400.0], &mc).unwrap();
        for r in &t.rows {
            assert!((r.mean - 1.0 / (2.0 * r.n)).abs() < 1e-12);
        }
        assert!(t.subcritical);
        let s = second_largest_scaling(2.0, 0.0, &[100.0, 1000.0, 4000.0, 10_000.0], &mc).unwrap();
        assert!(s.rows.iter().all(|r| r.mean_l2 == 1.0));
        assert!(s.slope.unwrap().abs() < 1e-12);
        assert!(s.subcritical);
    }

    #[test]
    fn deep_supercritical_theta() {
        let t = estimate_theta(4.0, 1.0, &[10_000.0], &MCConfig::new(5, 2)).unwrap();
        assert!(t.rows[0].mean >= 0.9, "{}", t.rows[0].mean);
        assert!(!t.subcritical);
    }

    #[test]
    fn short_schedule_skips_fit() {
        let s = second_largest_scaling(2.0, 1.0, &[4096.0, 16384.0], &MCConfig::new(3, 3)).unwrap();
        assert!(s.slope.is_none() && s.ratio_spread >= 1.0);
        assert!(second_largest_scaling(2.0, 1.0, &[16384.0, 4096.0], &MCConfig::new(3, 3)).is_err());
    }

    #[test]
    fn probe_side_limits() {
        let opts = IsolatedSquareOptions::default();
        // ln(10⁶)/10 ≈ 1.38
        assert!(isolated_square_probe(2.0, 1.0, 1e6, &SeedSpec::new(1), &opts).is_err());
        let wide = IsolatedSquareOptions { side: Some(4.0), ..opts };
        let r = isolated_square_probe(2.0, 1.0, 1e4, &SeedSpec::new(1), &wide).unwrap();
        assert_eq!(r.squares, 625);
        // collar area 12, exp(-24) — essentially never empty
        assert!(r.collar_empty.successes <= 1);
        let sparse = IsolatedSquareOptions { side: Some(4.0), c: 0.0, ..opts };
        let r = isolated_square_probe(0.05, 1.0, 1e4, &SeedSpec::new(2), &sparse).unwrap();
        // exp(-0.6) ≈ 0.55
        assert!((r.collar_empty.p_hat - r.collar_exact).abs() < 0.08);
        assert_eq!(r.qualifying, r.collar_empty.successes);
    }
}
