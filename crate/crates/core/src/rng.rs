//! Counter-based random sub-streams.
//!
//! Every stream is a ChaCha8 generator keyed by the 64-bit master seed
//! (expanded with `seed_from_u64`) and positioned on the ChaCha stream
//! number equal to the stream index. Streams for distinct indices never
//! overlap, and the same `(seed, index)` pair always yields the same
//! sequence, whichever thread draws from it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Stream `index` of the family keyed by `seed`.
pub fn substream(seed: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
