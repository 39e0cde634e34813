//! Per-run seeds. Scheme 1: three rounds of SplitMix64 over the base seed,
//! the instance index and the run index. The strategy never enters, so every
//! strategy starts run `r` of an instance from the same generator state.

pub const SEED_SCHEME: u32 = 1;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(base_seed: u64, instance: usize, run: usize) -> u64 {
    let a = splitmix64(base_seed);
    let b = splitmix64(a ^ instance as u64);
    splitmix64(b ^ (run as u64).rotate_left(32))
}

/// Seed for generating instance `index` of a set.
pub fn instance_seed(set_seed: u64, index: usize) -> u64 {
    derive_seed(set_seed ^ 0x1e57_a11c_e5ee_d5e7, index, usize::MAX)
}
