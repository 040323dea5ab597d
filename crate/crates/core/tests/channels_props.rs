//! Structural properties of sampled maps.

use cptni::channels::{choi_from_kraus, is_tni, is_tp, kraus_from_choi, QuantumMap, DEFAULT_RANK_TOL};
use cptni::sampling::{Sampler, DEFAULT_REJECTION_BUDGET};
use cptni::states::classify;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tni_maps_do_not_increase_trace(seed in any::<u64>(), n in 1usize..=3) {
        let mut s = Sampler::new(seed, 0);
        let choi = s.scaled_tni_choi(n).unwrap();
        prop_assert!(is_tni(&choi, 1e-12));
        for _ in 0..5 {
            let rho = s.density_induced(n, n).unwrap();
            let out = choi.apply(&rho).unwrap();
            prop_assert!(out.trace().re <= 1.0 + 1e-10);
            prop_assert!(out.hermiticity_defect() < 1e-12);
            prop_assert!(classify(&out.hermitian_part(), 1e-10).unwrap().is_subnormalized());
        }
    }

    #[test]
    fn trace_preserving_maps_keep_trace(seed in any::<u64>(), n in 1usize..=3) {
        let mut s = Sampler::new(seed, 1);
        let choi = s.tp_choi(n).unwrap();
        prop_assert!(is_tp(&choi, 1e-9));
        let rho = s.density_induced(n, n).unwrap();
        prop_assert!((choi.apply(&rho).unwrap().trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn kraus_round_trip(seed in any::<u64>(), n in 1usize..=3) {
        let mut s = Sampler::new(seed, 2);
        let choi = s.scaled_tni_choi(n).unwrap();
        let kraus = kraus_from_choi(&choi, DEFAULT_RANK_TOL).unwrap();
        prop_assert!(kraus.len() <= n * n);
        let back = choi_from_kraus(&kraus).unwrap();
        prop_assert!(back.sigma().max_abs_diff(choi.sigma()) < 1e-10);
        let rho = s.density_induced(n, n).unwrap();
        prop_assert!(kraus.apply(&rho).unwrap().max_abs_diff(&choi.apply(&rho).unwrap()) < 1e-10);
    }
}

#[test]
fn rejection_sampler_returns_tni_maps() {
    let mut s = Sampler::new(12, 0);
    for n in 1..=2 {
        for _ in 0..20 {
            let choi = s.tni_choi(n, DEFAULT_REJECTION_BUDGET).unwrap();
            assert!(is_tni(&choi, 0.0));
        }
    }
}
