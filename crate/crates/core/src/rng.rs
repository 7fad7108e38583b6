//! Deterministic RNG streams. Every stochastic phase draws from its own
//! ChaCha stream keyed by (seed, phase tag), so phases can run in any
//! order - or in parallel - without perturbing each other.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stable phase tags; the numeric gap leaves room for per-level offsets.
#[derive(Debug, Clone, Copy)]
pub enum Stream {
    Generator,
    Hierarchy,
    /// Per-level partition stream.
    Partition(usize),
    /// Per-level GAN training stream.
    GanTrain(usize),
    /// Per-level regeneration stream.
    Regenerate(usize),
    Sampler(usize),
    Ensemble(usize),
    Other(u64),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Generator => 1,
            Stream::Hierarchy => 2,
            Stream::Partition(l) => 1_000 + l as u64,
            Stream::GanTrain(l) => 2_000 + l as u64,
            Stream::Regenerate(l) => 3_000 + l as u64,
            Stream::Sampler(i) => 4_000 + i as u64,
            Stream::Ensemble(i) => 5_000 + i as u64,
            Stream::Other(v) => 9_000 + v,
        }
    }
}

pub fn rng_for(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}
