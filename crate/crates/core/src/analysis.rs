//! Evaluation statistics: empirical p-values of encoded walks against
//! restart walks, cluster-size statistics of forests, and surrogate forests.

use rayon::prelude::*;

use crate::encoding::Forest;
use crate::rng;
use crate::search::restart_walk_direct;
use crate::spinglass::SpinGlassInstance;
use crate::{Error, Result};

/// Fraction of restart walks reaching an energy `≤ eta_min`.
#[derive(Clone, Debug, PartialEq)]
pub struct PValueReport {
    pub eta_min: f64,
    pub n_samples: usize,
    pub n_leq: usize,
    pub p: f64,
    pub t: u64,
    pub tau: u64,
}

/// Counts the sample minima at or below `eta_min`.
pub fn pvalue_from_minima(minima: &[f64], eta_min: f64) -> (usize, f64) {
    let n_leq = minima.iter().filter(|&&m| m <= eta_min).count();
    let p = if minima.is_empty() {
        0.0
    } else {
        n_leq as f64 / minima.len() as f64
    };
    (n_leq, p)
}

/// Best energies of `n_samples` restart walks of total length `t` and period
/// `tau`. Sample `k` is seeded with `task_seed(seed, k)`; sampling runs in
/// parallel and the result is in sample order.
pub fn restart_minima(
    inst: &SpinGlassInstance,
    t: u64,
    tau: u64,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter(
            "n_samples must be at least 1".into(),
        ));
    }
    // Validate once up front so every sample fails the same way.
    if tau == 0 || t == 0 || !t.is_multiple_of(tau) {
        return Err(Error::InvalidParameter(format!(
            "restart period tau = {tau} must be positive and divide t = {t}"
        )));
    }
    (0..n_samples as u64)
        .into_par_iter()
        .map(|k| {
            restart_walk_direct(inst, t, tau, rng::task_seed(seed, k)).map(|s| s.eta_min_overall)
        })
        .collect()
}

pub fn empirical_pvalue(
    inst: &SpinGlassInstance,
    eta_min: f64,
    t: u64,
    tau: u64,
    n_samples: usize,
    seed: u64,
) -> Result<PValueReport> {
    let minima = restart_minima(inst, t, tau, n_samples, seed)?;
    let (n_leq, p) = pvalue_from_minima(&minima, eta_min);
    Ok(PValueReport {
        eta_min,
        n_samples,
        n_leq,
        p,
        t,
        tau,
    })
}

/// Component sizes of a forest.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterStats {
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
    /// `(s, fraction of components with size ≥ s)` for every distinct size,
    /// ascending in `s`.
    pub cumulative: Vec<(usize, f64)>,
    pub largest: usize,
    /// Zero when the forest has a single component.
    pub second_largest: usize,
}

impl ClusterStats {
    /// `second_largest / largest`.
    pub fn ratio(&self) -> f64 {
        if self.largest == 0 {
            0.0
        } else {
            self.second_largest as f64 / self.largest as f64
        }
    }

    /// Fraction of components with size at least `s`.
    pub fn fraction_at_least(&self, s: usize) -> f64 {
        cumulative_fraction(&self.sizes, s)
    }
}

fn cumulative_fraction(sizes_desc: &[usize], s: usize) -> f64 {
    if sizes_desc.is_empty() {
        return 0.0;
    }
    let count = sizes_desc.iter().take_while(|&&k| k >= s).count();
    count as f64 / sizes_desc.len() as f64
}

/// Cumulative size distribution of a pooled list of component sizes.
pub fn cumulative_distribution(sizes: &[usize]) -> Vec<(usize, f64)> {
    let mut desc = sizes.to_vec();
    desc.sort_unstable_by(|a, b| b.cmp(a));
    let mut distinct = desc.clone();
    distinct.sort_unstable();
    distinct.dedup();
    distinct
        .into_iter()
        .map(|s| (s, cumulative_fraction(&desc, s)))
        .collect()
}

pub fn cluster_stats(y: &Forest) -> ClusterStats {
    let mut sizes = y.partition().sizes();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let largest = sizes.first().copied().unwrap_or(0);
    let second_largest = sizes.get(1).copied().unwrap_or(0);
    ClusterStats {
        cumulative: cumulative_distribution(&sizes),
        sizes,
        largest,
        second_largest,
    }
}

/// Random forest with the given node and edge counts: uniform site pairs are
/// drawn and kept iff they join two components. Not uniform over forests.
pub fn surrogate_forest(n_sites: usize, n_edges: usize, seed: u64) -> Result<Forest> {
    Forest::random(n_sites, n_edges, &mut rng::generator(seed))
}

/// Mean and sample standard deviation (zero for fewer than two values).
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Median of a non-empty slice (mean of the two middle values for even length).
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinglass::{brute_force_ground_state, gen_grid_instance};

    #[test]
    fn pvalue_counting() {
        assert_eq!(pvalue_from_minima(&[1.0, 2.0, 3.0], 2.0), (2, 2.0 / 3.0));
        assert_eq!(pvalue_from_minima(&[1.0, 2.0, 3.0], f64::INFINITY).1, 1.0);
        assert_eq!(pvalue_from_minima(&[1.0, 2.0, 3.0], 0.5).1, 0.0);
    }

    #[test]
    fn pvalue_bounds_on_instance() {
        let inst = gen_grid_instance(3, 21).unwrap();
        let (_, ground) = brute_force_ground_state(&inst).unwrap();
        let below = empirical_pvalue(&inst, ground - 1e-6, 100, 10, 50, 4).unwrap();
        assert_eq!(below.p, 0.0);
        assert_eq!(below.n_leq, 0);
        let above = empirical_pvalue(&inst, f64::INFINITY, 100, 10, 50, 4).unwrap();
        assert_eq!(above.p, 1.0);
        assert_eq!(above.n_samples, 50);

        let mid = empirical_pvalue(&inst, ground + 0.5, 100, 10, 40, 9).unwrap();
        let minima = restart_minima(&inst, 100, 10, 40, 9).unwrap();
        let naive = minima.iter().filter(|&&m| m <= ground + 0.5).count();
        assert_eq!(mid.n_leq, naive);
        assert!((0.0..=1.0).contains(&mid.p));

        assert!(empirical_pvalue(&inst, 0.0, 100, 30, 10, 1).is_err());
        assert!(empirical_pvalue(&inst, 0.0, 100, 10, 0, 1).is_err());
    }

    #[test]
    fn cluster_stats_examples() {
        let empty = cluster_stats(&Forest::empty(9));
        assert_eq!(empty.sizes, vec![1; 9]);
        assert_eq!((empty.largest, empty.second_largest), (1, 1));

        let tree = Forest::from_edges(9, (1..9).map(|i| (i - 1, i))).unwrap();
        let one = cluster_stats(&tree);
        assert_eq!((one.largest, one.second_largest), (9, 0));

        // Components of sizes 5, 3, 1.
        let y = Forest::from_edges(9, [(0, 1), (1, 2), (2, 3), (3, 4), (5, 6), (6, 7)]).unwrap();
        let stats = cluster_stats(&y);
        assert_eq!(stats.sizes, vec![5, 3, 1]);
        assert_eq!((stats.largest, stats.second_largest), (5, 3));
        assert_eq!(stats.fraction_at_least(3), 2.0 / 3.0);
        assert_eq!(
            stats.cumulative,
            vec![(1, 1.0), (3, 2.0 / 3.0), (5, 1.0 / 3.0)]
        );
        assert_eq!(stats.sizes.iter().sum::<usize>(), 9);
    }

    #[test]
    fn surrogate_examples() {
        assert_eq!(surrogate_forest(10, 0, 1).unwrap(), Forest::empty(10));
        let tree = surrogate_forest(10, 9, 1).unwrap();
        assert_eq!(tree.n_components(), 1);
        assert!(surrogate_forest(10, 10, 1).is_err());
        assert_eq!(
            surrogate_forest(50, 20, 8).unwrap(),
            surrogate_forest(50, 20, 8).unwrap()
        );
    }

    #[test]
    fn surrogates_are_forests_over_many_seeds() {
        for seed in 0..1000 {
            let y = surrogate_forest(100, 60, seed).unwrap();
            assert_eq!(y.n_edges(), 60);
            let rebuilt = Forest::from_edges(100, y.edges().iter().copied()).unwrap();
            assert_eq!(rebuilt.n_components(), 40);
            assert_eq!(cluster_stats(&y).sizes.iter().sum::<usize>(), 100);
        }
    }

    #[test]
    fn summary_statistics() {
        let (m, s) = mean_and_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
        assert_eq!(mean_and_std(&[4.0]), (4.0, 0.0));
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
