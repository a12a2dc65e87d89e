//! Reproducible random instance generation.
//!
//! Every job visits every machine exactly once, in an independently drawn
//! random order, with durations uniform in `[dur_min, dur_max]`. Generation
//! is a pure function of the spec, so a (size, seed) pair identifies an
//! instance across runs and machines.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{JsspInstance, Operation};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("num_jobs must be at least 1")]
    NoJobs,
    #[error("num_machines must be at least 1")]
    NoMachines,
    #[error("duration range [{dur_min}, {dur_max}] is empty or starts at zero")]
    BadDurationRange { dur_min: u32, dur_max: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenSpec {
    pub num_jobs: usize,
    pub num_machines: usize,
    pub dur_min: u32,
    pub dur_max: u32,
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenError> {
        if self.num_jobs == 0 {
            return Err(GenError::NoJobs);
        }
        if self.num_machines == 0 {
            return Err(GenError::NoMachines);
        }
        if self.dur_min == 0 || self.dur_min > self.dur_max {
            return Err(GenError::BadDurationRange {
                dur_min: self.dur_min,
                dur_max: self.dur_max,
            });
        }
        Ok(())
    }
}

pub fn generate_instance(spec: &GenSpec) -> Result<JsspInstance, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut jobs = Vec::with_capacity(spec.num_jobs);
    for _ in 0..spec.num_jobs {
        let mut machines: Vec<usize> = (0..spec.num_machines).collect();
        machines.shuffle(&mut rng);
        let ops = machines
            .into_iter()
            .map(|machine| Operation {
                machine,
                duration: rng.random_range(spec.dur_min..=spec.dur_max),
            })
            .collect();
        jobs.push(ops);
    }
    Ok(JsspInstance::new(spec.num_machines, jobs).expect("generated instance is well-formed"))
}

/// Per-instance seed for position `index` of a batch: the SplitMix64
/// finalizer applied to the master seed offset by the index. Instances can
/// therefore be (re)generated independently and in any order.
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generate `count_per_size` instances for each `(num_jobs, num_machines)`
/// size, in size-major order. Batch index k gets seed
/// `derive_seed(master_seed, k)`.
pub fn generate_batch(
    sizes: &[(usize, usize)],
    count_per_size: usize,
    dur_min: u32,
    dur_max: u32,
    master_seed: u64,
) -> Result<Vec<JsspInstance>, GenError> {
    let mut out = Vec::with_capacity(sizes.len() * count_per_size);
    for (i, &(num_jobs, num_machines)) in sizes.iter().enumerate() {
        for c in 0..count_per_size {
            let index = (i * count_per_size + c) as u64;
            let spec = GenSpec {
                num_jobs,
                num_machines,
                dur_min,
                dur_max,
                seed: derive_seed(master_seed, index),
            };
            out.push(generate_instance(&spec)?);
        }
    }
    Ok(out)
}
