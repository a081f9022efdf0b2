//! Counter-based randomness.
//!
//! Every random variate is a pure function of `(seed, sample_index, stream,
//! coordinates)`, so configurations do not depend on iteration order or on
//! the number of worker threads, and cells can be evaluated lazily.

/// Stream tags separating the variates used by different models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    BondEast = 1,
    BondNorth = 2,
    Site = 3,
    Voronoi = 4,
    Sign = 5,
    Aux = 6,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit hash of a cell key.
#[inline]
pub fn hash_cell(seed: u64, index: u64, stream: Stream, x: i64, y: i64) -> u64 {
    let mut h = mix64(seed ^ GOLDEN);
    h = mix64(
        h ^ index
            .wrapping_mul(GOLDEN)
            .wrapping_add(0x632b_e59b_d9b4_e019),
    );
    h = mix64(h ^ (stream as u64).wrapping_mul(0xd1b5_4a32_d192_ed03));
    h = mix64(h ^ (x as u64).wrapping_mul(0xaef1_7502_108e_f2d9));
    mix64(h ^ (y as u64).wrapping_mul(0x8cb9_2ba7_2f3d_8dd7))
}

/// Uniform variate in `[0, 1)` with 53 bits of resolution.
#[inline]
pub fn to_unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
pub fn uniform(seed: u64, index: u64, stream: Stream, x: i64, y: i64) -> f64 {
    to_unit(hash_cell(seed, index, stream, x, y))
}

/// Threshold convention shared by every model: a cell with variate `u` is
/// open at parameter `p` iff `u < p`.
#[inline]
pub fn is_open(u: f64, p: f64) -> bool {
    u < p
}

/// Small sequential generator for auxiliary randomness (random trees,
/// perturbation tests), seeded through the same mixer.
#[derive(Debug, Clone)]
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix {
            state: mix64(seed ^ 0x5851_f42d_4c95_7f2d),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    pub fn next_f64(&mut self) -> f64 {
        to_unit(self.next_u64())
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_keyed() {
        let a = hash_cell(7, 3, Stream::Site, -4, 9);
        assert_eq!(a, hash_cell(7, 3, Stream::Site, -4, 9));
        assert_ne!(a, hash_cell(7, 4, Stream::Site, -4, 9));
        assert_ne!(a, hash_cell(7, 3, Stream::Site, 9, -4));
        assert_ne!(a, hash_cell(7, 3, Stream::BondEast, -4, 9));
    }

    #[test]
    fn extremes_of_threshold() {
        for i in 0..1000 {
            let u = uniform(1, 0, Stream::Site, i, 0);
            assert!((0.0..1.0).contains(&u));
            assert!(is_open(u, 1.0));
            assert!(!is_open(u, 0.0));
        }
    }

    #[test]
    fn unit_mean_close_to_half() {
        let n = 200_000;
        let s: f64 = (0..n).map(|i| uniform(11, 2, Stream::Aux, i, 1)).sum();
        let mean = s / n as f64;
        // sd of the mean is sqrt(1/12 / n) ~ 6.5e-4
        assert!((mean - 0.5).abs() < 4.0 * (1.0f64 / 12.0 / n as f64).sqrt());
    }

    #[test]
    fn below_is_in_range() {
        let mut r = SplitMix::new(3);
        for _ in 0..1000 {
            assert!(r.below(7) < 7);
        }
    }
}
