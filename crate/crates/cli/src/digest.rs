//! Stable content fingerprints for configs and scenarios.
//!
//! FNV-1a over the canonical JSON encoding. Not cryptographic; only used
//! to tie manifests and trajectories back to the exact inputs.

pub fn fnv1a_hex(bytes: &[u8]) -> String {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(PRIME);
    }
    format!("{hash:016x}")
}

/// Digest of a JSON value via its canonical (sorted-key) encoding.
pub fn json_digest(value: &serde_json::Value) -> String {
    fnv1a_hex(value.to_string().as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_stable_and_input_sensitive() {
        let a = fnv1a_hex(b"abc");
        assert_eq!(a, fnv1a_hex(b"abc"));
        assert_ne!(a, fnv1a_hex(b"abd"));
        assert_eq!(a.len(), 16);
    }
}
