use std::f64::consts::{PI, TAU};

use crate::error::{param_err, Error, Result};

/// Edge-retention probability as a function of the displacement between two
/// vertices at distance at most one.
#[derive(Debug, Clone, PartialEq)]
pub enum ConnectionFunction {
    /// Plain Bernoulli bond percolation.
    Constant(f64),
    /// An even function tabulated on the unit disk.
    Tabulated(PolarTable),
}

impl ConnectionFunction {
    pub fn constant(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return param_err(format!("bond probability must lie in [0,1], got {p}"));
        }
        Ok(ConnectionFunction::Constant(p))
    }

    /// Retention probability for displacement `(dx, dy)`; zero beyond unit
    /// distance.
    #[inline]
    pub fn prob(&self, dx: f64, dy: f64) -> f64 {
        if dx * dx + dy * dy > 1.0 {
            return 0.0;
        }
        match self {
            ConnectionFunction::Constant(p) => *p,
            ConnectionFunction::Tabulated(t) => t.eval(dx, dy),
        }
    }
}

/// Values on a polar grid: radii `k / (n_r - 1)` for `k < n_r` and angles
/// `2π t / n_theta` for `t < n_theta`, bilinear in `(r, θ)` with periodic θ.
///
/// The table is made even at construction by averaging each entry with its
/// antipode, which is why `n_theta` must be even.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarTable {
    n_r: usize,
    n_theta: usize,
    values: Vec<f64>,
}

impl PolarTable {
    pub fn new(n_r: usize, n_theta: usize, mut values: Vec<f64>) -> Result<Self> {
        if n_r < 2 || n_theta < 2 || !n_theta.is_multiple_of(2) {
            return param_err("polar table needs n_r >= 2 and an even n_theta >= 2");
        }
        if values.len() != n_r * n_theta {
            return param_err(format!("expected {} table values, got {}", n_r * n_theta, values.len()));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v <= 1.0)) {
            return param_err(format!("connection function values must lie in (0,1], got {v}"));
        }
        let half = n_theta / 2;
        for k in 0..n_r {
            for t in 0..half {
                let (a, b) = (k * n_theta + t, k * n_theta + t + half);
                let avg = 0.5 * (values[a] + values[b]);
                values[a] = avg;
                values[b] = avg;
            }
        }
        Ok(PolarTable { n_r, n_theta, values })
    }

    pub fn from_fn(n_r: usize, n_theta: usize, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(n_r * n_theta);
        for k in 0..n_r {
            let r = k as f64 / (n_r - 1) as f64;
            for t in 0..n_theta {
                let th = TAU * t as f64 / n_theta as f64;
                values.push(g(r * th.cos(), r * th.sin()));
            }
        }
        PolarTable::new(n_r, n_theta, values)
    }

    /// Whitespace-separated text: `n_r n_theta` then `n_r` rows of `n_theta`
    /// values (one row per radius).
    pub fn parse(text: &str) -> Result<Self> {
        let mut nums = text.split_whitespace();
        let mut next_usize = || -> Result<usize> {
            nums.next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse("polar table header must be `n_r n_theta`".into()))
        };
        let n_r = next_usize()?;
        let n_theta = next_usize()?;
        let values = nums
            .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad table value `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        PolarTable::new(n_r, n_theta, values)
    }

    fn at(&self, k: usize, t: usize) -> f64 {
        self.values[k * self.n_theta + (t % self.n_theta)]
    }

    pub fn eval(&self, dx: f64, dy: f64) -> f64 {
        let r = (dx * dx + dy * dy).sqrt().min(1.0);
        let mut th = dy.atan2(dx);
        if th < 0.0 {
            th += 2.0 * PI;
        }
        let fr = r * (self.n_r - 1) as f64;
        let k = (fr.floor() as usize).min(self.n_r - 2);
        let wr = fr - k as f64;
        let ft = th / TAU * self.n_theta as f64;
        let t = (ft.floor() as usize).min(self.n_theta - 1);
        let wt = ft - t as f64;
        let lo = self.at(k, t) * (1.0 - wt) + self.at(k, t + 1) * wt;
        let hi = self.at(k + 1, t) * (1.0 - wt) + self.at(k + 1, t + 1) * wt;
        lo * (1.0 - wr) + hi * wr
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_validated() {
        assert!(ConnectionFunction::constant(1.2).is_err());
        let c = ConnectionFunction::constant(0.3).unwrap();
        assert_eq!(c.prob(0.5, 0.5), 0.3);
        assert_eq!(c.prob(1.0, 0.5), 0.0);
    }

    #[test]
    fn table_is_even_after_load() {
        // deliberately odd input: larger for dx > 0
        let t = PolarTable::from_fn(5, 16, |dx, _| if dx > 0.0 { 0.9 } else { 0.3 }).unwrap();
        for &(dx, dy) in &[(0.3, 0.1), (0.7, -0.2), (0.05, 0.6), (0.9, 0.0)] {
            let a = t.eval(dx, dy);
            let b = t.eval(-dx, -dy);
            assert!((a - b).abs() < 1e-12, "g({dx},{dy})={a} vs {b}");
        }
    }

    #[test]
    fn table_reproduces_smooth_radial_function() {
        let t = PolarTable::from_fn(33, 8, |dx, dy| 1.0 - 0.5 * (dx * dx + dy * dy).sqrt()).unwrap();
        assert!((t.eval(0.4, 0.3) - 0.75).abs() < 1e-12);
        assert!((t.eval(0.0, 0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_parse_and_validation() {
        let t = PolarTable::parse("2 2\n0.5 0.5\n0.25 0.25\n").unwrap();
        assert!((t.eval(1.0, 0.0) - 0.25).abs() < 1e-12);
        assert!(PolarTable::parse("2 3\n1 1 1 1 1 1").is_err());
        assert!(PolarTable::parse("2 2\n0 1 1 1").is_err());
        assert!(PolarTable::parse("2 2\n1 1 1").is_err());
    }
}
