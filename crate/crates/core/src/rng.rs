//! Seed derivation for independent random substreams.
//!
//! Every consumer of randomness (graph generation, initial states, history
//! prefill, confidence bounds, adversaries) gets its own stream derived from
//! `(base seed, purpose, index)`. Streams never share state, so changing how
//! much one consumer draws cannot shift another consumer's values.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Graph sampling; index is the retry attempt.
    Graph,
    InitialState,
    /// Index is the agent whose pre-run history is synthesized.
    Prefill,
    /// Index is the agent drawing its confidence bounds.
    Confidence,
    /// Index is the adversarial agent.
    Adversary,
}

impl Stream {
    fn tag(self) -> u64 {
        match self {
            Stream::Graph => 0x6772_6170_6800_0001,
            Stream::InitialState => 0x696e_6974_0000_0002,
            Stream::Prefill => 0x7072_6566_696c_0003,
            Stream::Confidence => 0x636f_6e66_0000_0004,
            Stream::Adversary => 0x6164_7665_7273_0005,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based derivation of a substream seed.
pub fn derive_seed(base: u64, stream: Stream, index: u64) -> u64 {
    let a = splitmix64(base ^ stream.tag());
    splitmix64(a ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

pub fn substream(base: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, stream, index))
}
