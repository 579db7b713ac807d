//! Counter-based seeded draws.
//!
//! Several pieces of the artifact (random-walk scenario steps, error
//! injection sites) need values that are a pure function of a key tuple,
//! so that results do not depend on iteration order. A splitmix64-style
//! finalizer over the key provides that.

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a seed with a key tuple into a single well-distributed word.
pub(crate) fn mix(seed: u64, parts: &[u64]) -> u64 {
    let mut h = splitmix64(seed);
    for &p in parts {
        h = splitmix64(h ^ p);
    }
    h
}

/// Maps a mixed word to the unit interval `[0, 1)`.
pub(crate) fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Maps a mixed word to a symmetric interval `[−r, r]`.
pub(crate) fn symmetric(h: u64, r: f64) -> f64 {
    (2.0 * unit(h) - 1.0) * r
}
