use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qubo::Qubo;

use super::{words_for, SampleSet};

/// Geometric cooling from `t_initial` to `t_final` over `sweeps` sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub t_initial: f64,
    pub t_final: f64,
    pub sweeps: usize,
}

impl AnnealSchedule {
    pub const DEFAULT_SWEEPS: usize = 1000;

    /// `T0` equal to the largest coefficient magnitude, `T1 = 1e-3 T0`.
    pub fn default_for(qubo: &Qubo) -> Self {
        let scale = qubo.max_abs_coefficient();
        let t_initial = if scale > 0.0 { scale } else { 1.0 };
        Self {
            t_initial,
            t_final: 1e-3 * t_initial,
            sweeps: Self::DEFAULT_SWEEPS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_initial.is_finite() && self.t_initial > 0.0) {
            return Err(Error::Config("initial temperature must be positive".into()));
        }
        if !(self.t_final > 0.0 && self.t_final < self.t_initial) {
            return Err(Error::Config(
                "final temperature must lie strictly between 0 and the initial temperature".into(),
            ));
        }
        if self.sweeps == 0 {
            return Err(Error::Config("at least one sweep is required".into()));
        }
        Ok(())
    }

    /// Temperature used during sweep `s`.
    pub fn temperature(&self, s: usize) -> f64 {
        if self.sweeps == 1 {
            return self.t_final;
        }
        let frac = s as f64 / (self.sweeps - 1) as f64;
        self.t_initial * (self.t_final / self.t_initial).powf(frac)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub num_reads: u64,
    pub seed: u64,
    pub schedule: AnnealSchedule,
    /// Index of the first read. Read `r` draws from RNG stream `r`, so
    /// batches with adjacent offsets merge into one larger batch.
    pub first_read: u64,
}

impl SamplerConfig {
    pub fn new(num_reads: u64, seed: u64, schedule: AnnealSchedule) -> Self {
        Self {
            num_reads,
            seed,
            schedule,
            first_read: 0,
        }
    }
}

/// Independent single-flip Metropolis annealing chains, one per read.
///
/// Each read starts from a uniformly random state and visits the variables
/// in index order once per sweep. The result depends only on `qubo` and
/// `cfg`, not on how reads are scheduled across threads.
pub fn sample_annealing(qubo: &Qubo, cfg: &SamplerConfig) -> Result<SampleSet> {
    cfg.schedule.validate()?;
    if cfg.num_reads == 0 {
        return Err(Error::Config("num_reads must be positive".into()));
    }
    let temperatures: Vec<f64> = (0..cfg.schedule.sweeps)
        .map(|s| cfg.schedule.temperature(s))
        .collect();

    let finals: Vec<Vec<u64>> = (cfg.first_read..cfg.first_read + cfg.num_reads)
        .into_par_iter()
        .map(|read| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(read);
            anneal_once(qubo, &temperatures, &mut rng)
        })
        .collect();

    let mut counts: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for state in finals {
        *counts.entry(state).or_insert(0) += 1;
    }
    Ok(SampleSet::from_packed_counts(qubo, counts))
}

fn anneal_once(qubo: &Qubo, temperatures: &[f64], rng: &mut ChaCha8Rng) -> Vec<u64> {
    let m = qubo.num_vars();
    let mut state: Vec<bool> = (0..m).map(|_| rng.gen::<bool>()).collect();
    let mut fields: Vec<f64> = (0..m)
        .map(|k| {
            qubo.linear()[k]
                + qubo
                    .neighbors(k)
                    .iter()
                    .filter(|&&(j, _)| state[j])
                    .map(|&(_, w)| w)
                    .sum::<f64>()
        })
        .collect();

    for &t in temperatures {
        for k in 0..m {
            let delta = if state[k] { -fields[k] } else { fields[k] };
            let accept = delta <= 0.0 || rng.gen::<f64>() < (-delta / t).exp();
            if accept {
                let sign = if state[k] { -1.0 } else { 1.0 };
                state[k] = !state[k];
                for &(j, w) in qubo.neighbors(k) {
                    fields[j] += sign * w;
                }
            }
        }
    }

    let mut packed = vec![0u64; words_for(m)];
    for (j, &bit) in state.iter().enumerate() {
        if bit {
            packed[j / 64] |= 1 << (63 - j % 64);
        }
    }
    packed
}
