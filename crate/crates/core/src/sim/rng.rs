use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words reserved per (node, round) block of the stream.
const ROUND_STRIDE: u128 = 1 << 40;

/// Deterministic generator for one node in one round, keyed by the master
/// seed, the node index (stream) and the round (position in the stream).
pub fn node_rng(seed: u64, node: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(node);
    rng.set_word_pos(round as u128 * ROUND_STRIDE);
    rng
}
