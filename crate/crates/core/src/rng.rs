//! Seed derivation.
//!
//! Every random purpose (weight init, minibatch order, spike encoding, subset
//! sampling) draws from its own ChaCha8 generator seeded with
//! `splitmix64(master ^ fnv1a64(purpose))`. Per-image encoders additionally
//! select ChaCha stream `image_index`, so images can be processed in any order
//! or in parallel with identical spikes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, purpose: &str) -> u64 {
    splitmix64(master ^ fnv1a64(purpose.as_bytes()))
}

pub fn purpose_rng(master: u64, purpose: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, purpose))
}

pub fn stream_rng(master: u64, purpose: &str, stream: u64) -> ChaCha8Rng {
    let mut rng = purpose_rng(master, purpose);
    rng.set_stream(stream);
    rng
}
