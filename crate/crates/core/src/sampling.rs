//! Seeded random streams and the random objects the experiments draw.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Mat3;
use crate::scalar::Real;
use crate::so3::RotationMatrix;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A deterministic random stream, owned by one caller at a time.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Stream for one sample, a pure function of the key path. Sample `i`
    /// of sub-experiment `j` under master seed `s` uses `[s, j, i]`.
    pub fn for_key(key: &[u64]) -> Self {
        let seed = key.iter().fold(0x6A09_E667_F3BC_C908u64, |acc, &k| mix64(acc ^ mix64(k)));
        Self::from_seed(seed)
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Matrix of nine i.i.d. standard normals, drawn in row-major order.
    pub fn gaussian_matrix<T: Real>(&mut self) -> Mat3<T> {
        Mat3::from_fn(|_, _| T::lit(self.standard_normal()))
    }
}

/// Haar-uniform rotation: a normalized 4-vector of standard normals read
/// as a unit quaternion.
pub fn random_rotation<T: Real>(stream: &mut RngStream) -> RotationMatrix<T> {
    loop {
        let q =
            [stream.standard_normal(), stream.standard_normal(), stream.standard_normal(), stream.standard_normal()];
        let n2: f64 = q.iter().map(|c| c * c).sum();
        if n2 > 1e-24 {
            return RotationMatrix::from_quaternion(q.map(T::lit));
        }
    }
}

/// `r_star + sigma · N` with `N` drawn from the stream.
pub fn perturbed_matrix<T: Real>(r_star: &RotationMatrix<T>, sigma: T, stream: &mut RngStream) -> Mat3<T> {
    let n = stream.gaussian_matrix::<T>();
    *r_star.matrix() + n.scale(sigma)
}
