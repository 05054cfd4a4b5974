//! Shared helpers for the crate's own tests: seeded random systems and data.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::{GaussInt, GaussMatrix, GaussVector, HermitianMatrix};

pub(crate) fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, bound: i64) -> HermitianMatrix {
    let mut m = GaussMatrix::zeros(dim);
    for r in 0..dim {
        m.set(r, r, GaussInt::of(rng.gen_range(-bound..=bound), 0));
        for c in r + 1..dim {
            let g = GaussInt::of(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
            m.set(r, c, g.clone());
            m.set(c, r, g.conj());
        }
    }
    HermitianMatrix::new(m).unwrap()
}

pub(crate) fn random_vector(rng: &mut ChaCha8Rng, dim: usize, bound: i64) -> GaussVector {
    GaussVector::new(
        (0..dim)
            .map(|_| GaussInt::of(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound)))
            .collect(),
    )
}
