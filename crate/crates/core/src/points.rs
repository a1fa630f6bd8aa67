//! Poisson point samples and their on-disk form.

use std::io::{BufRead, Write};

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{param_err, Error, Result};
use crate::geometry::{Point, Rect};
use crate::rng::SeedSpec;

/// Points in a window, in generation order.
///
/// `ids` are stable labels used to key per-point and per-pair randomness; a
/// freshly sampled set has `ids[i] == i`, and subsets produced by thinning
/// keep the labels of the surviving points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub ids: Vec<u64>,
    pub rect: Rect,
    pub lambda: f64,
    pub seed: Option<SeedSpec>,
}

impl PointSet {
    pub fn new(points: Vec<Point>, rect: Rect, lambda: f64) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !rect.contains(p)) {
            return param_err(format!("point ({}, {}) outside window", p.x, p.y));
        }
        let ids = (0..points.len() as u64).collect();
        Ok(PointSet { points, ids, rect, lambda, seed: None })
    }

    pub fn empty(rect: Rect, lambda: f64) -> Self {
        PointSet { points: Vec::new(), ids: Vec::new(), rect, lambda, seed: None }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_id(&self) -> Option<u64> {
        self.ids.iter().copied().max()
    }

    /// Keep the points whose index satisfies `keep`, preserving order and ids.
    pub fn retain_indices(&self, keep: impl Fn(usize) -> bool) -> PointSet {
        let mut points = Vec::new();
        let mut ids = Vec::new();
        for i in 0..self.len() {
            if keep(i) {
                points.push(self.points[i]);
                ids.push(self.ids[i]);
            }
        }
        PointSet { points, ids, rect: self.rect, lambda: self.lambda, seed: self.seed.clone() }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y")?;
        for p in &self.points {
            writeln!(w, "{},{}", fmt17(p.x), fmt17(p.y))?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R, rect: Rect, lambda: f64) -> Result<PointSet> {
        let mut lines = r.lines();
        let header = lines.next().transpose()?;
        if header.as_deref().map(str::trim) != Some("x,y") {
            return Err(Error::Parse("expected header `x,y`".into()));
        }
        let mut points = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let mut field = || -> Result<f64> {
                it.next()
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::Parse(format!("bad point on line {}", n + 2)))
            };
            let x = field()?;
            let y = field()?;
            points.push(Point::new(x, y));
        }
        PointSet::new(points, rect, lambda)
    }

    pub fn sidecar(&self) -> PointSetSidecar {
        PointSetSidecar { lambda: self.lambda, rect: self.rect, seed: self.seed.clone() }
    }
}

/// JSON companion of a points CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetSidecar {
    pub lambda: f64,
    pub rect: Rect,
    pub seed: Option<SeedSpec>,
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Poisson process of intensity `lambda` restricted to `rect`.
///
/// Points are the arrivals of a unit-rate process in "intensity time", each
/// placed uniformly in `rect`; the count up to `lambda` is exactly
/// Poisson(λ·area). Consequently the sample at λ₁ is a prefix of the sample
/// at λ₂ > λ₁ for the same seed, which couples intensity sweeps monotonely.
pub fn sample_ppp(lambda: f64, rect: &Rect, seed: &SeedSpec) -> Result<PointSet> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return param_err(format!("intensity must be finite and non-negative, got {lambda}"));
    }
    let area = rect.area();
    let mut rng = seed.rng();
    let mut points = Vec::with_capacity((lambda * area * 1.05 + 16.0) as usize);
    let mut t = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        t += gap / area;
        if t > lambda {
            break;
        }
        let x = rect.x0 + rect.width() * rng.random::<f64>();
        let y = rect.y0 + rect.height() * rng.random::<f64>();
        points.push(Point::new(x, y));
    }
    let ids = (0..points.len() as u64).collect();
    Ok(PointSet { points, ids, rect: *rect, lambda, seed: Some(seed.clone()) })
}
