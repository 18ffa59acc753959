//! Seeded sampling for instance generation.
//!
//! The stream is ChaCha8, which is counter based and platform independent;
//! each class draws from its own stream of the same seed so adding a class
//! never perturbs another. Normals use the inverse CDF of one uniform so a
//! draw consumes a fixed amount of the stream.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

pub struct Sampler {
    rng: ChaCha8Rng,
    std_normal: Normal,
}

impl Sampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Sampler { rng, std_normal: Normal::new(0.0, 1.0).unwrap() }
    }

    /// Uniform on the open interval (0, 1).
    fn open01(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.gen();
            if u > 0.0 {
                return u;
            }
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.gen::<f64>()
    }

    pub fn normal(&mut self, mean: f64, std: f64) -> f64 {
        let u = self.open01();
        mean + std * self.std_normal.inverse_cdf(u)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.rng.gen::<f64>() < p
    }

    pub fn shuffle<T>(&mut self, v: &mut [T]) {
        v.shuffle(&mut self.rng);
    }
}
