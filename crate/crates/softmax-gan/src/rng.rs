//! Seed derivation for independent random streams.
//!
//! Every run key (data sampling, latent draws, weight init, metric draws)
//! gets its own generator seeded from `(base_seed, stream_tag)`, so adding
//! or removing consumers of one stream never perturbs the others. The
//! mixer is the splitmix64 finalizer, which spreads low-entropy tags over
//! the whole 64-bit space.

use rand_chacha::ChaCha8Rng;

pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_distinct_and_reproducible() {
        assert_eq!(derive_seed(42, 1), derive_seed(42, 1));
        assert_ne!(derive_seed(42, 1), derive_seed(42, 2));
        assert_ne!(derive_seed(42, 1), derive_seed(43, 1));

        let a: Vec<u64> = (0..4).map(|_| seeded_rng(derive_seed(7, 0)).next_u64()).collect();
        let b: Vec<u64> = (0..4).map(|_| seeded_rng(derive_seed(7, 0)).next_u64()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn nearby_bases_decorrelate() {
        // Consecutive seeds should not produce near-identical outputs.
        let x = derive_seed(100, 3);
        let y = derive_seed(101, 3);
        assert!((x ^ y).count_ones() > 10);
    }
}
