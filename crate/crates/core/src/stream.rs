//! Reproducible parallel random streams.
//!
//! Trials are partitioned into fixed-size chunks. Each chunk draws from an
//! independent ChaCha12 stream derived statelessly from `(seed, stream id)`,
//! so the set of random numbers consumed by chunk `i` never depends on which
//! worker ran it or how many workers exist. Per-chunk results are collected
//! in chunk order and merged sequentially, which makes every reduction
//! bit-identical across worker counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ga::UnitVector3;

#[derive(Debug, Error, PartialEq)]
pub enum StreamError {
    #[error("empty experiment: at least one trial is required")]
    EmptyExperiment,
    #[error("chunk size must be at least 1")]
    ZeroChunkSize,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stateless stream constructor: the ChaCha key is a splitmix64 expansion of
/// `seed` and the 64-bit ChaCha stream id is the chunk counter.
pub fn chunk_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut key = [0u8; 32];
    let mut state = seed;
    for word in key.chunks_exact_mut(8) {
        word.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha12Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Layout of one chunked run: how many trials, how they are partitioned,
/// and which stream ids the chunks occupy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChunkPlan {
    pub trials: u64,
    pub chunk_size: u64,
    pub seed: u64,
    /// First stream id used by this run; lets a harness give disjoint
    /// streams to each grid point of a larger experiment.
    pub stream_offset: u64,
}

impl ChunkPlan {
    pub fn new(trials: u64, chunk_size: u64, seed: u64) -> Result<Self, StreamError> {
        Self::with_offset(trials, chunk_size, seed, 0)
    }

    pub fn with_offset(
        trials: u64,
        chunk_size: u64,
        seed: u64,
        stream_offset: u64,
    ) -> Result<Self, StreamError> {
        if trials == 0 {
            return Err(StreamError::EmptyExperiment);
        }
        if chunk_size == 0 {
            return Err(StreamError::ZeroChunkSize);
        }
        Ok(Self { trials, chunk_size, seed, stream_offset })
    }

    pub fn chunk_count(&self) -> u64 {
        self.trials.div_ceil(self.chunk_size)
    }

    fn chunk_len(&self, index: u64) -> u64 {
        let start = index * self.chunk_size;
        self.chunk_size.min(self.trials - start)
    }
}

/// Runs `body` once per chunk (in parallel) and returns the per-chunk
/// results in chunk order. Callers fold the vector sequentially so that
/// floating-point reductions are order-stable.
pub fn run_chunked<T, F>(plan: &ChunkPlan, body: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha12Rng, u64) -> T + Sync,
{
    (0..plan.chunk_count())
        .into_par_iter()
        .map(|index| {
            let mut rng = chunk_rng(plan.seed, plan.stream_offset + index);
            body(&mut rng, plan.chunk_len(index))
        })
        .collect()
}

/// Area-correct uniform point on the unit sphere from two uniforms:
/// `cos(theta) = 2u - 1`, `phi = 2 pi v`.
pub fn sample_unit_vector<R: Rng>(rng: &mut R) -> UnitVector3 {
    let z = 2.0 * rng.gen::<f64>() - 1.0;
    let phi = std::f64::consts::TAU * rng.gen::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    let (sin_phi, cos_phi) = phi.sin_cos();
    UnitVector3::from_unit_unchecked(s * cos_phi, s * sin_phi, z)
}
