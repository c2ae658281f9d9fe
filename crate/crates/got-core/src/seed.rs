//! Derivation of independent RNG seeds from a base seed and an index.

/// SplitMix64 finalizer over `base + (index + 1) * golden-ratio`, giving
/// stream `index` of a seed family rooted at `base`.  Distinct indices
/// produce distinct, decorrelated seeds while the family stays
/// reproducible from `base` alone; optimizer restarts, benchmark sweeps,
/// and pairwise jobs all branch their streams this way.
pub fn derive(base: u64, index: u64) -> u64 {
    let mut z = base
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
