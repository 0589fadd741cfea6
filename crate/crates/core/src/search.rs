//! Adaptive walks on the encoded landscape `(forests, G)` and on the direct
//! single-spin-flip landscape `(configurations, f)`.
//!
//! Both walks accept a proposal iff it does not increase the objective, and
//! every proposal (accepted, rejected or null) advances the step counter.

use rand::Rng;

use crate::encoding::{heuristic_g, propose_forest_move, Forest};
use crate::rng::{self, Generator};
use crate::spinglass::{SpinConfig, SpinGlassInstance};
use crate::{Error, Result};

/// Objective values recorded along a walk.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkTrace<S> {
    /// `(t, value after t steps)` for every requested step `t ≤ t_max`, and
    /// always for `t_max` itself.
    pub samples: Vec<(u64, f64)>,
    pub final_state: S,
    /// Lowest value visited; the final value, since walks never go uphill.
    pub best_value: f64,
    pub best_state: S,
    pub seed: u64,
}

impl<S> WalkTrace<S> {
    pub fn is_monotone(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn final_value(&self) -> f64 {
        self.samples.last().map_or(self.best_value, |s| s.1)
    }
}

/// Summary of a direct walk restarted from a uniform configuration every
/// `tau` steps.
#[derive(Clone, Debug, PartialEq)]
pub struct RestartSummary {
    pub t_total: u64,
    pub tau: u64,
    /// Best energy of each restart segment.
    pub minima: Vec<f64>,
    pub eta_min_overall: f64,
}

/// Sorted, deduplicated recording schedule restricted to `0..=t_max`, with
/// `t_max` appended.
fn schedule(record_at: &[u64], t_max: u64) -> Vec<u64> {
    let mut steps: Vec<u64> = record_at.iter().copied().filter(|&t| t <= t_max).collect();
    steps.push(t_max);
    steps.sort_unstable();
    steps.dedup();
    steps
}

fn require_steps(t_max: u64) -> Result<()> {
    if t_max == 0 {
        return Err(Error::InvalidParameter("a walk needs t_max ≥ 1".into()));
    }
    Ok(())
}

/// Records `value` for every scheduled step equal to `t`.
struct Recorder {
    steps: Vec<u64>,
    next: usize,
    samples: Vec<(u64, f64)>,
}

impl Recorder {
    fn new(record_at: &[u64], t_max: u64) -> Self {
        let steps = schedule(record_at, t_max);
        Self {
            samples: Vec::with_capacity(steps.len()),
            steps,
            next: 0,
        }
    }

    #[inline]
    fn observe(&mut self, t: u64, value: f64) {
        if self.steps.get(self.next) == Some(&t) {
            self.samples.push((t, value));
            self.next += 1;
        }
    }
}

/// Adaptive walk over spanning forests, starting from the empty forest and
/// accepting a neighbor iff its heuristic value `G` does not increase.
pub fn adaptive_walk_encoded(
    inst: &SpinGlassInstance,
    t_max: u64,
    seed: u64,
    record_at: &[u64],
) -> Result<WalkTrace<Forest>> {
    require_steps(t_max)?;
    let mut rng = rng::generator(seed);
    let mut recorder = Recorder::new(record_at, t_max);
    let mut forest = Forest::empty(inst.n_sites());
    let mut value = heuristic_g(inst, &forest)?.0;
    recorder.observe(0, value);
    for t in 1..=t_max {
        let proposal = propose_forest_move(&forest, &mut rng);
        if proposal.n_edges() != forest.n_edges() {
            let candidate = heuristic_g(inst, &proposal)?.0;
            if candidate <= value {
                forest = proposal;
                value = candidate;
            }
        }
        recorder.observe(t, value);
    }
    Ok(WalkTrace {
        samples: recorder.samples,
        best_state: forest.clone(),
        final_state: forest,
        best_value: value,
        seed,
    })
}

/// Runs `steps` single-flip descent steps in place; returns the tracked energy.
fn descend<F: FnMut(u64, f64)>(
    inst: &SpinGlassInstance,
    spins: &mut [i8],
    mut energy: f64,
    steps: u64,
    rng: &mut Generator,
    mut observe: F,
) -> f64 {
    let n = inst.n_sites();
    for t in 1..=steps {
        let i = rng.random_range(0..n);
        let delta = inst.flip_delta(spins, i);
        if delta <= 0.0 {
            spins[i] = -spins[i];
            energy += delta;
        }
        observe(t, energy);
    }
    energy
}

/// Single-spin-flip adaptive walk from a uniformly drawn configuration.
///
/// The energy is tracked through incremental deltas; recorded values are the
/// tracked energies.
pub fn adaptive_walk_direct(
    inst: &SpinGlassInstance,
    t_max: u64,
    seed: u64,
    record_at: &[u64],
) -> Result<WalkTrace<SpinConfig>> {
    require_steps(t_max)?;
    let mut rng = rng::generator(seed);
    let mut recorder = Recorder::new(record_at, t_max);
    let start = SpinConfig::random(inst.n_sites(), &mut rng);
    let mut spins = start.into_inner();
    let initial = inst.energy_of(&spins);
    recorder.observe(0, initial);
    let value = descend(inst, &mut spins, initial, t_max, &mut rng, |t, e| {
        recorder.observe(t, e)
    });
    let state = SpinConfig::new(spins).expect("flips keep spins ±1");
    Ok(WalkTrace {
        samples: recorder.samples,
        best_state: state.clone(),
        final_state: state,
        best_value: value,
        seed,
    })
}

/// Direct walk restarted from a fresh uniform configuration every `tau`
/// steps, i.e. `t_total / tau` independent walks of length `tau` drawn from
/// one generator.
///
/// Each segment's minimum is the exact energy of its final configuration,
/// evaluated with the same summation as [`crate::spinglass::energy`], so it
/// compares bit-for-bit with energies of other walks reaching that state.
pub fn restart_walk_direct(
    inst: &SpinGlassInstance,
    t_total: u64,
    tau: u64,
    seed: u64,
) -> Result<RestartSummary> {
    if tau == 0 || t_total == 0 || !t_total.is_multiple_of(tau) {
        return Err(Error::InvalidParameter(format!(
            "restart period tau = {tau} must be positive and divide t = {t_total}"
        )));
    }
    let mut rng = rng::generator(seed);
    let n = inst.n_sites();
    let restarts = t_total / tau;
    let mut minima = Vec::with_capacity(restarts as usize);
    for _ in 0..restarts {
        let mut spins = SpinConfig::random(n, &mut rng).into_inner();
        let start = inst.energy_of(&spins);
        descend(inst, &mut spins, start, tau, &mut rng, |_, _| {});
        minima.push(inst.energy_of(&spins));
    }
    let eta_min_overall = minima.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(RestartSummary {
        t_total,
        tau,
        minima,
        eta_min_overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinglass::{brute_force_ground_state, energy, gen_grid_instance};

    #[test]
    fn zero_couplings_give_constant_traces() {
        let inst =
            SpinGlassInstance::without_fields(4, [(0, 1, 0.0), (1, 2, 0.0), (2, 3, 0.0)]).unwrap();
        let enc = adaptive_walk_encoded(&inst, 200, 1, &[0, 10, 100]).unwrap();
        assert!(enc.samples.iter().all(|&(_, v)| v == 0.0));
        let dir = adaptive_walk_direct(&inst, 200, 1, &[0, 10, 100]).unwrap();
        assert!(dir.samples.iter().all(|&(_, v)| v == 0.0));
        assert_eq!(
            enc.samples.iter().map(|s| s.0).collect::<Vec<_>>(),
            vec![0, 10, 100, 200]
        );
    }

    #[test]
    fn traces_are_monotone_and_deterministic() {
        let inst = gen_grid_instance(5, 31).unwrap();
        let record: Vec<u64> = (0..=2000).step_by(50).collect();
        for seed in 0..5 {
            let a = adaptive_walk_encoded(&inst, 2000, seed, &record).unwrap();
            assert!(a.is_monotone());
            assert_eq!(a.best_value, a.final_value());
            assert_eq!(
                a,
                adaptive_walk_encoded(&inst, 2000, seed, &record).unwrap()
            );
            let (g, _) = heuristic_g(&inst, &a.final_state).unwrap();
            assert_eq!(g, a.best_value);

            let d = adaptive_walk_direct(&inst, 2000, seed, &record).unwrap();
            assert!(d.is_monotone());
            assert_eq!(d, adaptive_walk_direct(&inst, 2000, seed, &record).unwrap());
            let exact = energy(&inst, &d.final_state).unwrap();
            assert!((exact - d.best_value).abs() <= 1e-9);
        }
    }

    #[test]
    fn direct_walk_satisfies_single_bond() {
        for a in [-0.7, 0.4] {
            let inst = SpinGlassInstance::without_fields(2, [(0, 1, a)]).unwrap();
            for seed in 0..20 {
                let trace = adaptive_walk_direct(&inst, 50, seed, &[]).unwrap();
                assert_eq!(trace.best_value, -f64::abs(a));
            }
        }
    }

    #[test]
    fn restart_with_single_segment_matches_direct_walk() {
        let inst = gen_grid_instance(4, 5).unwrap();
        let walk = adaptive_walk_direct(&inst, 500, 77, &[]).unwrap();
        let summary = restart_walk_direct(&inst, 500, 500, 77).unwrap();
        assert_eq!(summary.minima.len(), 1);
        assert_eq!(
            summary.eta_min_overall,
            energy(&inst, &walk.final_state).unwrap()
        );
    }

    #[test]
    fn restart_summary_shape() {
        let inst = gen_grid_instance(4, 6).unwrap();
        let summary = restart_walk_direct(&inst, 1000, 100, 3).unwrap();
        assert_eq!(summary.minima.len(), 10);
        assert!(summary.minima.iter().all(|&m| summary.eta_min_overall <= m));
        let (_, ground) = brute_force_ground_state(&inst).unwrap();
        assert!(summary.eta_min_overall >= ground - 1e-12);
        assert!(restart_walk_direct(&inst, 1000, 300, 3).is_err());
        assert!(restart_walk_direct(&inst, 1000, 0, 3).is_err());
    }

    #[test]
    fn zero_length_walks_are_rejected() {
        let inst = gen_grid_instance(3, 1).unwrap();
        assert!(adaptive_walk_encoded(&inst, 0, 1, &[]).is_err());
        assert!(adaptive_walk_direct(&inst, 0, 1, &[]).is_err());
    }
}
