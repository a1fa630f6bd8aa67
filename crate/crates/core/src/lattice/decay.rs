use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LatticeBox;
use crate::error::{param_err, Result};
use crate::rng::{item_uniform, SeedSpec};
use crate::stats::linear_fit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub distance: usize,
    pub replicates: u64,
    pub successes: u64,
    pub p_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub q: f64,
    pub rows: Vec<DecayRow>,
    /// `-slope` of `ln p̂` against distance, clamped at zero; `None` when
    /// fewer than two distances had at least five successes.
    pub rate: Option<f64>,
    pub r_squared: Option<f64>,
    pub fitted_points: usize,
}

const MIN_SUCCESSES: u64 = 5;

/// Whether `(2d, 2d)` is joined to `(3d, 2d)` inside `[0, 5d] × [0, 4d]`,
/// exploring the cluster lazily so that only edges it touches are sampled.
fn connects(d: usize, q: f64, key: u64, stamp: &mut [u32], tag: u32, stack: &mut Vec<usize>) -> bool {
    let b = LatticeBox { width: 5 * d, height: 4 * d };
    let nh = b.num_horizontal();
    let start = b.vertex(2 * d, 2 * d);
    let target = b.vertex(3 * d, 2 * d);
    stack.clear();
    stack.push(start);
    stamp[start] = tag;
    while let Some(v) = stack.pop() {
        if v == target {
            return true;
        }
        let mut found = false;
        b.for_each_incident(v, |w, horizontal, e| {
            let global = if horizontal { e } else { nh + e };
            if stamp[w] != tag && item_uniform(key, global as u64) < q {
                stamp[w] = tag;
                found |= w == target;
                stack.push(w);
            }
        });
        if found {
            return true;
        }
    }
    false
}

/// Monte Carlo estimate of the point-to-point connection probability at
/// each distance for subcritical bond percolation, with an exponential fit.
pub fn estimate_connect_decay(q: f64, distances: &[usize], replicates: u64, seed: &SeedSpec) -> Result<DecayFit> {
    if !(0.0..0.5).contains(&q) {
        return param_err(format!("decay estimation needs 0 <= q < 1/2, got {q}"));
    }
    if distances.is_empty() || distances.contains(&0) {
        return param_err("distances must be non-empty and positive");
    }
    if replicates == 0 {
        return param_err("replicates must be >= 1");
    }
    let mut rows = Vec::with_capacity(distances.len());
    for &d in distances {
        let nv = (5 * d + 1) * (4 * d + 1);
        let base = seed.clone().child(d as u64);
        let successes: u64 = (0..replicates)
            .into_par_iter()
            .map_init(
                || (vec![0u32; nv], Vec::new(), 0u32),
                |(stamp, stack, tag), r| {
                    *tag += 1;
                    let key = base.clone().child(r).key();
                    connects(d, q, key, stamp, *tag, stack) as u64
                },
            )
            .sum();
        rows.push(DecayRow { distance: d, replicates, successes, p_hat: successes as f64 / replicates as f64 });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.successes >= MIN_SUCCESSES)
        .map(|r| (r.distance as f64, r.p_hat.ln()))
        .unzip();
    let fit = linear_fit(&xs, &ys);
    Ok(DecayFit {
        q,
        rows,
        rate: fit.map(|f| (-f.slope).max(0.0)),
        r_squared: fit.map(|f| f.r_squared),
        fitted_points: xs.len(),
    })
}
