/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive 64-bit digest of a word sequence.
pub fn fold_digest(words: &[u64]) -> u64 {
    words.iter().fold(mix(words.len() as u64), |h, &w| mix(h ^ mix(w)))
}

/// Pseudo-random integer code for a color, separated by `tag`. Sums of such codes
/// identify the summed multiset unless a collision is detected.
pub fn embed_color(color: u64, tag: u64) -> u64 {
    mix(mix(tag ^ 0xA076_1D64_78BD_642F) ^ color)
}
