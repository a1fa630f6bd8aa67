use serde::{Deserialize, Serialize};

use super::{run_replicates, EventEstimate, MCConfig};
use crate::error::Result;
use crate::lattice::{build_h_aux, HAuxConfig};
use crate::stats::mean_sd;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceTest {
    pub min_distance: usize,
    /// `None` means unbounded.
    pub max_distance: Option<usize>,
    pub pairs: usize,
    /// Covariance of edge states averaged over the pairs.
    pub cov: f64,
    pub se: f64,
    pub within_3sigma: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HAuxReport {
    pub config: HAuxConfig,
    /// Pooled over dominos and replicates.
    pub admissible: EventEstimate,
    pub edge_open: EventEstimate,
    /// Replicates with an open edge between non-admissible dominos.
    pub inconsistent: u64,
    /// Replicates whose giant domino cluster spans several continuum
    /// components.
    pub giant_split: u64,
    pub covariance: Vec<CovarianceTest>,
}

struct Rep {
    admissible: u64,
    dominos: u64,
    states: Vec<bool>,
    consistent: bool,
    giant_ok: bool,
    distances: Option<Vec<Vec<usize>>>,
}

/// Repeated H_aux constructions: admissibility and edge marginals, the two
/// exact consistency properties, and covariances of edge states at lattice
/// distance ≥ 3 (exactly 3, and any).
pub fn haux_experiment(cfg: &HAuxConfig, mc: &MCConfig) -> Result<HAuxReport> {
    let reps = run_replicates(mc, &format!("haux-{}", cfg.r), |r, s| {
        let res = build_h_aux(cfg, s)?;
        let ne = res.edges.len();
        let distances = (r == 0).then(|| (0..ne).map(|a| (0..ne).map(|b| res.edge_distance(a, b)).collect()).collect());
        Ok(Rep {
            admissible: res.dominos.iter().filter(|d| d.admissible).count() as u64,
            dominos: res.dominos.len() as u64,
            states: res.edges.iter().map(|e| e.open).collect(),
            consistent: res.open_edges_admissible(),
            giant_ok: res.giant_maps_to_one_component(),
            distances,
        })
    })?;
    let dist = reps[0].distances.clone().unwrap_or_default();
    let ne = reps[0].states.len();
    let n = reps.len() as f64;
    let mu: Vec<f64> = (0..ne).map(|e| reps.iter().filter(|r| r.states[e]).count() as f64 / n).collect();
    let mut covariance = Vec::new();
    for (lo, hi) in [(3, Some(3)), (3, None)] {
        let pairs: Vec<(usize, usize)> = (0..ne)
            .flat_map(|a| (a + 1..ne).map(move |b| (a, b)))
            .filter(|&(a, b)| dist[a][b] >= lo && hi.is_none_or(|h| dist[a][b] <= h))
            .collect();
        if pairs.is_empty() {
            continue;
        }
        let psi: Vec<f64> = reps
            .iter()
            .map(|r| {
                let x = |e: usize| r.states[e] as u8 as f64 - mu[e];
                pairs.iter().map(|&(a, b)| x(a) * x(b)).sum::<f64>() / pairs.len() as f64
            })
            .collect();
        let (cov, sd) = mean_sd(&psi);
        let se = sd / n.sqrt();
        covariance.push(CovarianceTest {
            min_distance: lo,
            max_distance: hi,
            pairs: pairs.len(),
            cov,
            se,
            within_3sigma: cov.abs() <= 3.0 * se,
        });
    }
    let adm: u64 = reps.iter().map(|r| r.admissible).sum();
    let tot: u64 = reps.iter().map(|r| r.dominos).sum();
    let open: u64 = reps.iter().map(|r| r.states.iter().filter(|&&s| s).count() as u64).sum();
    Ok(HAuxReport {
        config: cfg.clone(),
        admissible: EventEstimate::from_counts(adm, tot, mc.confidence),
        edge_open: EventEstimate::from_counts(open, (ne * reps.len()) as u64, mc.confidence),
        inconsistent: reps.iter().filter(|r| !r.consistent).count() as u64,
        giant_split: reps.iter().filter(|r| !r.giant_ok).count() as u64,
        covariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    #[test]
    fn small_experiment() {
        let cfg = HAuxConfig {
            lambda_prime: 2.5,
            lambda: 3.0,
            p: 1.0,
            r: 6,
            window: Rect::square(30.0).unwrap(),
            n_inner: 8,
            k_circuits: 0,
        };
        let rep = haux_experiment(&cfg, &MCConfig::new(20, 5)).unwrap();
        assert_eq!(rep.inconsistent, 0);
        assert_eq!(rep.giant_split, 0);
        assert_eq!(rep.covariance.len(), 2);
        assert!(rep.admissible.p_hat > 0.0);
    }
}
