//! Counter-based seed derivation.
//!
//! A replica's stream depends only on `(master, replica, attempt)`, never on
//! which thread ran it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ReplicaRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one attempt of one replica. Attempt 0 is the first draw.
pub fn replica_seed(master: u64, replica: u64, attempt: u32) -> u64 {
    let h = splitmix64(master);
    let h = splitmix64(h ^ replica.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(h ^ u64::from(attempt).wrapping_mul(0xA076_1D64_78BD_642F))
}

pub fn rng_from_seed(seed: u64) -> ReplicaRng {
    ChaCha8Rng::seed_from_u64(seed)
}
