//! Statistical and structural properties of sampled states.

use cptni::linalg::{hermitian_eigvals, ComplexMatrix};
use cptni::measures::density_eigs;
use cptni::quadrature::adaptive;
use cptni::sampling::Sampler;
use cptni::states::{classify, coherence_radius, coherence_vector, purity, StateKind};
use cptni::stats::{ks_one_sample, ks_two_sample};
use cptni::C64;

/// Fixed unitary built from the eigenvectors of a seeded Hermitian matrix.
fn fixed_unitary(n: usize) -> ComplexMatrix {
    let mut s = Sampler::new(4242, 0);
    let h = s.ginibre(n, n).hermitian_part();
    cptni::linalg::hermitian_eig(&h).unwrap().eigenvectors
}

#[test]
fn maximally_mixed_state_is_the_only_subtracial_density() {
    for n in 2..=4 {
        let mixed = ComplexMatrix::identity(n).scale(1.0 / n as f64);
        assert_eq!(classify(&mixed, 1e-12).unwrap(), StateKind::SubtracialDensity);
        assert!(coherence_vector(&mixed).unwrap().norm() < 1e-15);
        assert!((purity(&mixed) - 1.0 / n as f64).abs() < 1e-15);
        let mut s = Sampler::new(5, n as u64);
        for _ in 0..200 {
            let rho = s.density_induced(n, n).unwrap();
            assert!(purity(&rho) > 1.0 / n as f64);
            assert_eq!(classify(&rho, 1e-12).unwrap(), StateKind::Density);
            assert!(coherence_vector(&rho).unwrap().norm() > 0.0);
        }
    }
}

#[test]
fn sampled_states_stay_inside_the_coherence_ball() {
    for n in 2..=4 {
        let mut s = Sampler::new(6, n as u64);
        let bound = coherence_radius(n);
        for _ in 0..500 {
            let rho = s.density_induced(n, n).unwrap();
            assert!(coherence_vector(&rho).unwrap().norm() <= bound + 1e-12);
        }
    }
}

#[test]
fn induced_measure_is_unitarily_invariant() {
    let n = 3;
    let u = fixed_unitary(n);
    let samples = 20_000;
    let mut a = Sampler::new(7, 0);
    let mut b = Sampler::new(7, 1);
    let mut plain = Vec::with_capacity(samples);
    let mut rotated = Vec::with_capacity(samples);
    for _ in 0..samples {
        plain.push(a.density_induced(n, 4).unwrap()[(0, 1)].re);
        let rho = b.density_induced(n, 4).unwrap();
        let r = u.try_mul(&rho).unwrap().try_mul(&u.adjoint()).unwrap();
        rotated.push(r[(0, 1)].re);
    }
    let d = ks_two_sample(&plain, &rotated);
    let critical = 1.63 * (2.0 / samples as f64).sqrt();
    assert!(d < critical, "KS {d} >= {critical}");
}

#[test]
fn reduced_states_match_the_induced_measure() {
    let (n, k) = (2, 2);
    let samples = 100_000;
    let mut a = Sampler::new(8, 0);
    let mut b = Sampler::new(8, 1);
    let reduced: Vec<f64> = (0..samples).map(|_| a.reduced_spectrum(n, k).unwrap()[0]).collect();
    let induced: Vec<f64> = (0..samples)
        .map(|_| hermitian_eigvals(&b.density_induced(n, n * k * k).unwrap()).unwrap()[0])
        .collect();
    let d = ks_two_sample(&reduced, &induced);
    assert!(d < 0.01, "KS {d}");
}

#[test]
fn subnormalized_trace_has_power_law_cdf() {
    let (n, k) = (2, 2);
    let samples = 1_000_000;
    let mut s = Sampler::new(9, 0);
    let traces: Vec<f64> = (0..samples).map(|_| s.subnormalized(n, k).unwrap().trace()).collect();
    let d = ks_one_sample(&traces, |t| t.clamp(0.0, 1.0).powi((n * k) as i32));
    assert!(d < 0.005, "KS {d}");
}

#[test]
fn largest_eigenvalue_mean_matches_quadrature() {
    let (n, k) = (2, 8);
    let f = |l: f64| density_eigs(n, k, &[l, 1.0 - l]).unwrap();
    let mass = adaptive(f, 0.0, 1.0, 1e-12);
    let first = adaptive(|l| l.max(1.0 - l) * f(l), 0.0, 1.0, 1e-12) / mass;
    let samples = 200_000;
    let mut s = Sampler::new(10, 0);
    let mean = (0..samples)
        .map(|_| hermitian_eigvals(&s.density_induced(n, k).unwrap()).unwrap()[0])
        .sum::<f64>()
        / samples as f64;
    assert!(((mean - first) / first).abs() < 0.01, "sampled {mean}, quadrature {first}");
}

#[test]
fn sampler_streams_are_reproducible() {
    let mut a = Sampler::new(11, 3);
    let mut b = Sampler::new(11, 3);
    let mut c = Sampler::new(11, 4);
    let x: Vec<C64> = a.ginibre(3, 3).into_data();
    assert_eq!(x, b.ginibre(3, 3).into_data());
    assert_ne!(x, c.ginibre(3, 3).into_data());
}
