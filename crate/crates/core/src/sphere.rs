//! Seedable sampling of the rotation-invariant measure on the unit sphere
//! of `C^r`, by normalizing standard complex Gaussian vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hermitian::{ComplexMatrix, C64};

pub type SampleRng = ChaCha8Rng;

/// RNG for block `block` of a seed-split computation.
pub fn block_rng(seed: u64, block: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(block))
}

/// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    (0..dim).map(|_| complex_gaussian(rng)).collect()
}

pub fn normalize(v: &mut [C64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
}

/// Matrix with i.i.d. standard complex Gaussian entries (invertible almost surely).
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_row_major(dim, gaussian_vector(rng, dim * dim)).expect("dim x dim")
}

/// A uniformly distributed unit vector in `C^dim`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<C64> {
    loop {
        let mut v = gaussian_vector(rng, dim);
        let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if n2 > 1e-300 {
            normalize(&mut v);
            return v;
        }
    }
}

/// Split `total` samples into `(block_index, count)` chunks of `block_size`.
pub(crate) fn blocks(total: usize, block_size: usize) -> Vec<(u64, usize)> {
    let n = total.div_ceil(block_size);
    (0..n)
        .map(|b| {
            let start = b * block_size;
            (b as u64, block_size.min(total - start))
        })
        .collect()
}
