use proptest::prelude::*;
use qmrg::linalg::{
    hermiticity_residual, idempotency_residual, intersect, kron, schmidt, Subspace, Tolerance,
};
use qmrg::random::{gaussian_matrix, rng, state};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn random_subspace(ambient: usize, dim: usize, seed: u64) -> Subspace {
    Subspace::span(&gaussian_matrix(ambient, dim, &mut rng(seed)), tol())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn subspace_projectors_are_projectors(ambient in 1usize..9, frac in 0.0f64..1.0, seed: u64) {
        let dim = ((ambient as f64) * frac) as usize;
        let s = random_subspace(ambient, dim, seed);
        let p = s.projector();
        let bound = 10.0 * tol().eps();
        prop_assert!(idempotency_residual(&p) <= bound);
        prop_assert!(hermiticity_residual(&p) <= bound);
        prop_assert!(s.orthonormality_residual() <= bound);
        prop_assert_eq!(s.dim(), dim);
    }

    #[test]
    fn intersection_dimension_bound(ambient in 2usize..9, a in 0usize..9, b in 0usize..9, seed: u64) {
        let (a, b) = (a.min(ambient), b.min(ambient));
        let s1 = random_subspace(ambient, a, seed);
        let s2 = random_subspace(ambient, b, seed.wrapping_add(1));
        let i = intersect(&[s1.clone(), s2.clone()], tol()).unwrap();
        prop_assert!(i.dim() + ambient >= a + b);
        for k in 0..i.dim() {
            let v = i.basis_vector(k);
            prop_assert!(s1.contains(&v, tol().scaled(10.0)) && s2.contains(&v, tol().scaled(10.0)));
        }
    }

    #[test]
    fn schmidt_reconstructs_state(da in 1usize..6, db in 1usize..6, seed: u64) {
        let psi = state(da, db, &mut rng(seed));
        let sd = schmidt(&psi, tol());
        prop_assert!((sd.reconstruct() - psi.amplitudes()).norm() <= 10.0 * tol().eps());
        let norm: f64 = sd.values.iter().map(|s| s * s).sum();
        prop_assert!((norm - 1.0).abs() <= 10.0 * tol().eps());
    }

    #[test]
    fn kron_is_associative_and_multiplicative(d1 in 1usize..4, d2 in 1usize..4, d3 in 1usize..4, seed: u64) {
        let mut r = rng(seed);
        let (a, b, cc) = (gaussian_matrix(d1, d1, &mut r), gaussian_matrix(d2, d2, &mut r), gaussian_matrix(d3, d3, &mut r));
        let (c2, d) = (gaussian_matrix(d1, d1, &mut r), gaussian_matrix(d2, d2, &mut r));
        let scale = a.norm() * b.norm() * cc.norm() + 1.0;
        prop_assert!((kron(&kron(&a, &b), &cc) - kron(&a, &kron(&b, &cc))).norm() <= 10.0 * tol().eps() * scale);
        let lhs = kron(&a, &b) * kron(&c2, &d);
        let rhs = kron(&(&a * &c2), &(&b * &d));
        prop_assert!((lhs - rhs).norm() <= 10.0 * tol().eps() * (a.norm() * b.norm() * c2.norm() * d.norm() + 1.0));
    }
}
