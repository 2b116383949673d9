//! Seed derivation and counter-addressable Gaussian noise.

use core::f64::consts::PI;

use libm::{cos, log, sin, sqrt};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Purpose tags mixed into derived seeds.
pub mod tag {
    pub const NOISE: u64 = 0x6e_6f69_7365;
    pub const WALK: u64 = 0x7761_6c6b;
    pub const DRAW: u64 = 0x6472_6177;
    pub const MC: u64 = 0x6d63;
    pub const EXACT: u64 = 0x65_7861_6374;
    pub const RETRY: u64 = 0x72_6574_7279;
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent stream seed for `(master, index, tag)`.
pub fn derive_seed(master: u64, index: u64, tag: u64) -> u64 {
    mix64(mix64(mix64(master) ^ tag) ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on `(0, 1]` with 53 random bits.
#[inline]
pub fn uniform_open0<R: RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// One standard normal (Box–Muller, cosine branch).
pub fn standard_normal<R: RngCore>(rng: &mut R) -> f64 {
    let u1 = uniform_open0(rng);
    let u2 = uniform_open0(rng);
    sqrt(-2.0 * log(u1)) * cos(2.0 * PI * u2)
}

/// Standard Gaussian sequence `ε_t`, `t ∈ ℤ`, addressable by index so any
/// window can be regenerated without replaying the prefix.
#[derive(Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
}

/// Index shift so that negative times map to valid counter positions.
const ORIGIN: i128 = 1 << 60;

impl NoiseStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: stream(derive_seed(seed, 0, tag::NOISE)),
        }
    }

    /// Writes `ε_start, ..., ε_{start + out.len() - 1}` into `out`.
    pub fn fill(&mut self, start: i64, out: &mut [f64]) {
        if out.is_empty() {
            return;
        }
        let k0 = start as i128 + ORIGIN;
        let pair0 = k0 >> 1;
        // each pair consumes two u64 = four 32-bit words
        self.rng.set_word_pos((pair0 as u128) * 4);
        let mut i = 0;
        let mut k = k0;
        while i < out.len() {
            let u1 = uniform_open0(&mut self.rng);
            let u2 = uniform_open0(&mut self.rng);
            let r = sqrt(-2.0 * log(u1));
            let (s, c) = (sin(2.0 * PI * u2), cos(2.0 * PI * u2));
            if k & 1 == 0 {
                out[i] = r * c;
                i += 1;
                k += 1;
                if i < out.len() {
                    out[i] = r * s;
                    i += 1;
                    k += 1;
                }
            } else {
                out[i] = r * s;
                i += 1;
                k += 1;
            }
        }
    }

    pub fn at(&mut self, t: i64) -> f64 {
        let mut v = [0.0];
        self.fill(t, &mut v);
        v[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, 0, tag::WALK);
        assert_ne!(a, derive_seed(1, 1, tag::WALK));
        assert_ne!(a, derive_seed(1, 0, tag::NOISE));
        assert_ne!(a, derive_seed(2, 0, tag::WALK));
        assert_eq!(a, derive_seed(1, 0, tag::WALK));
    }

    #[test]
    fn random_access_matches_sequential() {
        let mut s = NoiseStream::new(42);
        let mut all = [0.0; 40];
        s.fill(-7, &mut all);
        for start in -7..30i64 {
            for len in [1usize, 2, 3] {
                let mut w = [0.0; 3];
                s.fill(start, &mut w[..len]);
                for (j, v) in w[..len].iter().enumerate() {
                    let idx = (start + 7) as usize + j;
                    if idx < 40 {
                        assert_eq!(*v, all[idx]);
                    }
                }
            }
        }
    }

    #[test]
    fn noise_moments() {
        let mut s = NoiseStream::new(7);
        let mut v = alloc::vec![0.0; 200_000];
        s.fill(0, &mut v);
        let (m, sd) = crate::math::mean_sd(&v);
        assert!(m.abs() < 0.01 && (sd - 1.0).abs() < 0.01);
        let lag1: f64 = v.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / v.len() as f64;
        assert!(lag1.abs() < 0.01);
    }
}
