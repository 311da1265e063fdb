use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::stats::Accumulator;
use crate::error::{Error, Result};

/// Sample budget and its split into independent generator streams.
///
/// Results are reproducible for a fixed `(seed, n_streams)` regardless of
/// how many threads actually run the streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    pub seed: u64,
    pub n_samples: u64,
    pub n_streams: u32,
}

impl SampleSpec {
    pub fn new(seed: u64, n_samples: u64, n_streams: u32) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::config("sample count must be positive"));
        }
        if n_streams == 0 {
            return Err(Error::config("stream count must be positive"));
        }
        Ok(SampleSpec {
            seed,
            n_samples,
            n_streams,
        })
    }

    /// Draws per stream; the total is rounded up to a multiple of the stream count.
    pub fn per_stream(&self) -> u64 {
        self.n_samples.div_ceil(self.n_streams as u64)
    }

    pub fn total_samples(&self) -> u64 {
        self.per_stream() * self.n_streams as u64
    }

    /// Seed of stream `i`: `seed XOR splitmix64(i)`.
    pub fn stream_seed(&self, stream: u32) -> u64 {
        self.seed ^ splitmix64(stream as u64)
    }

    pub fn stream_rng(&self, stream: u32) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.stream_seed(stream))
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs a fresh sampler from `make_sampler` on every stream, one call per
/// draw filling `width` output values, and returns for each output slot the
/// per-stream accumulators in stream order.
pub(crate) fn run_streams<M, S>(
    spec: &SampleSpec,
    width: usize,
    make_sampler: M,
) -> Result<Vec<Vec<Accumulator>>>
where
    M: Fn() -> S + Sync,
    S: FnMut(&mut ChaCha8Rng, &mut [f64]) -> Result<()>,
{
    let per_stream = spec.per_stream();
    let per_stream_accs: Vec<Vec<Accumulator>> = (0..spec.n_streams)
        .into_par_iter()
        .map(|stream| {
            let mut rng = spec.stream_rng(stream);
            let mut sample = make_sampler();
            let mut values = vec![0.0; width];
            let mut accs = vec![Accumulator::new(); width];
            for _ in 0..per_stream {
                sample(&mut rng, &mut values)?;
                for (acc, &v) in accs.iter_mut().zip(&values) {
                    acc.push(v);
                }
            }
            Ok(accs)
        })
        .collect::<Result<_>>()?;

    Ok((0..width)
        .map(|slot| per_stream_accs.iter().map(|accs| accs[slot]).collect())
        .collect())
}
