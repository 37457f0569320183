//! Seed streams and random geometric samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{norm, orthonormalize, Frame, Vector};

pub type SeededRng = ChaCha8Rng;

/// One step of the splitmix64 generator.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th shard derived from a master seed.
pub fn stream_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(0x5EED)))
}

pub fn rng_for(master: u64, index: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, index))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    loop {
        let g = gaussian_vector(rng, n);
        let s = norm(&g);
        if s > 1e-8 {
            return g.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Uniformly random k-frame in ℝⁿ (orthonormalized Gaussian columns).
pub fn random_frame<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Frame {
    loop {
        let cols: Vec<Vector> = (0..k).map(|_| gaussian_vector(rng, n)).collect();
        if let Ok(f) = orthonormalize(&cols) {
            return f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        assert_eq!(stream_seed(7, 3), stream_seed(7, 3));
        assert_ne!(stream_seed(7, 3), stream_seed(7, 4));
        assert_ne!(stream_seed(7, 3), stream_seed(8, 3));
        let a: Vec<f64> = gaussian_vector(&mut rng_for(1, 2), 4);
        let b: Vec<f64> = gaussian_vector(&mut rng_for(1, 2), 4);
        assert_eq!(a, b);
    }

    #[test]
    fn random_frame_is_orthonormal() {
        let mut rng = rng_for(0, 0);
        let f = random_frame(&mut rng, 5, 3);
        assert!(f.orthonormality_error() < 1e-12);
    }
}
