//! Seeded generators of random states, operators and displacements.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::fock::{C64, CMatrix, CVector, Operator, Space, StateVector};

fn normal_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Gaussian amplitudes on basis states with total occupation at most
/// `support`; all other amplitudes are zero.
pub fn state<R: Rng + ?Sized>(space: &Space, rng: &mut R, support: usize) -> StateVector {
    loop {
        let z = CVector::from_fn(space.dim(), |k, _| {
            if space.occupation(k) <= support {
                normal_c64(rng)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        if let Ok(s) = StateVector::new(space, z) {
            return s;
        }
    }
}

/// Gaussian complex displacement over every amplitude.
pub fn displacement<R: Rng + ?Sized>(space: &Space, rng: &mut R) -> CVector {
    CVector::from_fn(space.dim(), |_, _| normal_c64(rng))
}

/// Random matrix with independent complex Gaussian entries.
pub fn operator<R: Rng + ?Sized>(space: &Space, rng: &mut R) -> Operator {
    let m = CMatrix::from_fn(space.dim(), space.dim(), |_, _| normal_c64(rng));
    Operator::new(space, m).expect("dimension matches by construction")
}

/// Random Hermitian matrix `(M + M^dagger) / 2` with Gaussian `M`.
pub fn hermitian<R: Rng + ?Sized>(space: &Space, rng: &mut R) -> Operator {
    let m = CMatrix::from_fn(space.dim(), space.dim(), |_, _| normal_c64(rng));
    let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Operator::hermitian(space, h).expect("symmetrised matrix is Hermitian")
}
