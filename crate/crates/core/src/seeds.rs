//! Stable seed derivation.
//!
//! A derived seed is the first eight bytes (little endian) of
//! `SHA-256(tag ‖ 0x00 ‖ master ‖ parts…)` with every integer encoded as
//! 8 little-endian bytes. The result depends only on its inputs, never on
//! scheduling order.

use sha2::{Digest, Sha256};

pub fn derive_seed(tag: &str, master: u64, parts: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(tag.as_bytes());
    h.update([0u8]);
    h.update(master.to_le_bytes());
    for p in parts {
        h.update(p.to_le_bytes());
    }
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
