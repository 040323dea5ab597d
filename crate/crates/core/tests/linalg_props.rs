//! Property tests for the matrix kernel.

use cptni::linalg::{hermitian_eig, hermitian_eigvals, hs_distance, kron, partial_trace, reshuffle, Subsystem};
use cptni::sampling::Sampler;
use cptni::states::{coherence_vector, state_from_coherence};
use cptni::ComplexMatrix;
use proptest::prelude::*;

fn random_hermitian(s: &mut Sampler, n: usize) -> ComplexMatrix {
    s.ginibre(n, n).hermitian_part()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reshuffle_is_an_involution(seed in any::<u64>(), n in 1usize..=4) {
        let mut s = Sampler::new(seed, 0);
        let x = s.ginibre(n * n, n * n);
        let back = reshuffle(&reshuffle(&x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn partial_trace_keeps_trace_and_positivity(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=3) {
        let mut s = Sampler::new(seed, 1);
        let rho = s.density_induced(da * db, da * db).unwrap();
        for which in [Subsystem::A, Subsystem::B] {
            let r = partial_trace(&rho, da, db, which).unwrap();
            prop_assert!((r.trace().re - 1.0).abs() < 1e-12);
            prop_assert!(r.trace().im.abs() < 1e-12);
            let min = *hermitian_eigvals(&r.hermitian_part()).unwrap().last().unwrap();
            prop_assert!(min > -1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product_is_factor(seed in any::<u64>(), da in 1usize..=3, db in 1usize..=3) {
        let mut s = Sampler::new(seed, 2);
        let a = s.density_induced(da, da).unwrap();
        let b = s.density_induced(db, db).unwrap();
        let ab = kron(&a, &b);
        prop_assert!(partial_trace(&ab, da, db, Subsystem::A).unwrap().max_abs_diff(&b) < 1e-12);
        prop_assert!(partial_trace(&ab, da, db, Subsystem::B).unwrap().max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn hs_distance_triangle_inequality(seed in any::<u64>(), n in 1usize..=5) {
        let mut s = Sampler::new(seed, 3);
        let a = random_hermitian(&mut s, n);
        let b = random_hermitian(&mut s, n);
        let c = random_hermitian(&mut s, n);
        let ab = hs_distance(&a, &b).unwrap();
        let bc = hs_distance(&b, &c).unwrap();
        let ac = hs_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!(hs_distance(&a, &a).unwrap() == 0.0);
    }

    #[test]
    fn coherence_vector_round_trip(seed in any::<u64>(), n in 2usize..=4) {
        let mut s = Sampler::new(seed, 4);
        let rho = s.density_induced(n, n + 1).unwrap();
        let xi = coherence_vector(&rho).unwrap();
        prop_assert_eq!(xi.components.len(), n * n - 1);
        let back = state_from_coherence(&xi).unwrap();
        prop_assert!(back.max_abs_diff(&rho) < 1e-12);
    }
}

#[test]
fn eigendecomposition_residuals() {
    for (idx, n) in [2usize, 3, 4, 9, 16].into_iter().enumerate() {
        let mut s = Sampler::new(99, idx as u64);
        let mut worst_residual: f64 = 0.0;
        let mut worst_unitarity: f64 = 0.0;
        for _ in 0..1000 {
            let h = random_hermitian(&mut s, n);
            let e = hermitian_eig(&h).unwrap();
            let scale = h.frobenius_norm().max(1.0);
            worst_residual = worst_residual.max(e.reconstruct().max_abs_diff(&h) / scale);
            let v = &e.eigenvectors;
            let vv = v.adjoint().try_mul(v).unwrap();
            worst_unitarity = worst_unitarity.max(vv.max_abs_diff(&ComplexMatrix::identity(n)));
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
        assert!(worst_residual < 1e-10, "N={n}: residual {worst_residual:e}");
        assert!(worst_unitarity < 1e-10, "N={n}: unitarity {worst_unitarity:e}");
    }
}
