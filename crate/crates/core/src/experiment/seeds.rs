//! Named sub-streams of one root seed. Each subsystem draws from its own
//! stream, so switching one off leaves the others unchanged.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

fn digest(root: u64, name: &str) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(root.to_le_bytes());
    h.update(name.as_bytes());
    h.finalize().into()
}

pub fn named_rng(root: u64, name: &str) -> ChaCha20Rng {
    ChaCha20Rng::from_seed(digest(root, name))
}

pub fn named_seed(root: u64, name: &str) -> u64 {
    let d = digest(root, name);
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}
