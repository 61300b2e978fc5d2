//! Seed derivation.
//!
//! Every random stream in the crate is a [`Xoshiro256PlusPlus`] seeded from a
//! 64-bit value produced by [`derive`]. A stream is addressed by a parent seed
//! plus a stream index, so independent work items (one edge weight, one
//! annealing run, one reference point) each own a generator and the output does
//! not depend on scheduling order.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Rng = Xoshiro256PlusPlus;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `stream` under `seed`.
pub fn derive(seed: u64, stream: u64) -> u64 {
    mix(mix(seed.wrapping_add(GOLDEN)) ^ stream.wrapping_add(1).wrapping_mul(GOLDEN))
}

/// Folds [`derive`] over a path of stream indices.
pub fn derive_path(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(seed, |s, &p| derive(s, p))
}

pub fn stream(seed: u64, index: u64) -> Rng {
    Rng::seed_from_u64(derive(seed, index))
}

pub fn from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Draw from Beta(a, b) with Jöhnk's rejection method, evaluated in log space
/// so tiny shape parameters do not underflow. Intended for a, b < 1.
pub fn beta_johnk<R: rand::Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    loop {
        // (0, 1]
        let u = 1.0 - rng.random::<f64>();
        let v = 1.0 - rng.random::<f64>();
        let lx = u.ln() / a;
        let ly = v.ln() / b;
        let hi = lx.max(ly);
        let lsum = hi + ((lx - hi).exp() + (ly - hi).exp()).ln();
        if lsum <= 0.0 {
            return (lx - lsum).exp();
        }
    }
}

/// Entropy seed for commands that were not given one.
pub fn entropy_seed() -> u64 {
    rand::random()
}
