//! Seeded random constructions: Haar-like unitaries, states, subspace samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, CMatrix, CVector, StateVector, Subspace};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    CVector::from_fn(dim, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `diag(R)` moved into `Q`.
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = gaussian_matrix(dim, dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    loop {
        let v = gaussian_vector(dim, rng);
        let n = v.norm();
        if n > 1e-12 {
            return v.unscale(n);
        }
    }
}

pub fn state<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> StateVector {
    StateVector::normalized(dim_a, dim_b, unit_vector(dim_a * dim_b, rng))
        .expect("nonzero gaussian sample")
}

pub fn product_state<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> StateVector {
    let a = unit_vector(dim_a, rng);
    let b = unit_vector(dim_b, rng);
    StateVector::product(&a, &b).expect("unit factors")
}

/// Unit vector drawn as a unit-Gaussian combination of the basis; `None` for
/// the zero subspace.
pub fn unit_in<R: Rng + ?Sized>(space: &Subspace, rng: &mut R) -> Option<CVector> {
    if space.is_zero() {
        return None;
    }
    let coeffs = unit_vector(space.dim(), rng);
    let v = space.basis() * coeffs;
    let n = v.norm();
    Some(v.unscale(n))
}

/// Splits `0..dim` into `parts` consecutive blocks with random sizes
/// (possibly empty).
pub fn random_partition<R: Rng + ?Sized>(dim: usize, parts: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); parts];
    if parts == 0 {
        return blocks;
    }
    for i in 0..dim {
        blocks[rng.random_range(0..parts)].push(i);
    }
    blocks
}
