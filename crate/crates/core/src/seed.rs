//! Deterministic sub-seed derivation.
//!
//! Every stochastic stage takes its own seed derived from a master seed and a
//! stable textual tag, so adding or reordering stages never shifts the random
//! stream of another stage.

/// FNV-1a hash; stable across platforms and releases, unlike `DefaultHasher`.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Derive a stage seed from a master seed and a tag.
pub fn derive_seed(master: u64, tag: &str) -> u64 {
    fnv1a(tag.as_bytes()) ^ master.wrapping_mul(0x9e3779b97f4a7c15)
}
