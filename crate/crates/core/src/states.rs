//! Classification of (sub)normalized states and the two parametrizations
//! used for them: the real coherence vector in the generalized Gell-Mann
//! basis, and the polar eigenvalue coordinates for qubits and qutrits.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigvals, ComplexMatrix, C64};

/// Absolute tolerance on eigenvalues and trace used when none is given.
pub const DEFAULT_TOL: f64 = 1e-9;

pub const THIRD_TURN: f64 = 2.0 * PI / 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Density,
    Subnormalized,
    Subtracial,
    SubtracialDensity,
    NotAState,
}

impl StateKind {
    pub fn is_subnormalized(self) -> bool {
        !matches!(self, StateKind::NotAState)
    }

    pub fn is_density(self) -> bool {
        matches!(self, StateKind::Density | StateKind::SubtracialDensity)
    }

    pub fn is_subtracial(self) -> bool {
        matches!(self, StateKind::Subtracial | StateKind::SubtracialDensity)
    }
}

/// Classifies a Hermitian matrix. Sub-tracial means every eigenvalue is at
/// most `1/N`; the only sub-tracial density matrix is `I/N`.
pub fn classify(sigma: &ComplexMatrix, tol: f64) -> Result<StateKind> {
    let eigs = hermitian_eigvals(sigma)?;
    let n = sigma.rows() as f64;
    let trace: f64 = eigs.iter().sum();
    let min = *eigs.last().unwrap();
    let max = eigs[0];
    if min < -tol || trace > 1.0 + tol {
        return Ok(StateKind::NotAState);
    }
    let density = (trace - 1.0).abs() <= tol;
    let subtracial = max <= 1.0 / n + tol;
    Ok(match (density, subtracial) {
        (true, true) => StateKind::SubtracialDensity,
        (true, false) => StateKind::Density,
        (false, true) => StateKind::Subtracial,
        (false, false) => StateKind::Subnormalized,
    })
}

/// Hermitian, positive, trace at most one.
#[derive(Clone, Debug, Serialize)]
pub struct SubnormalizedState {
    #[serde(flatten)]
    matrix: ComplexMatrix,
    trace: f64,
    min_eigenvalue: f64,
}

impl SubnormalizedState {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let eigs = hermitian_eigvals(&matrix)?;
        let trace: f64 = matrix.trace().re;
        let min_eigenvalue = *eigs.last().unwrap();
        if min_eigenvalue < -1e-10 {
            return Err(Error::NotAState(format!("negative eigenvalue {min_eigenvalue:e}")));
        }
        if !(-1e-12..=1.0 + 1e-12).contains(&trace) {
            return Err(Error::NotAState(format!("trace {trace} outside [0, 1]")));
        }
        Ok(Self {
            matrix,
            trace,
            min_eigenvalue,
        })
    }

    pub(crate) fn from_parts(matrix: ComplexMatrix, trace: f64, min_eigenvalue: f64) -> Self {
        Self {
            matrix,
            trace,
            min_eigenvalue,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// `Tr(sigma^2)`; equals the squared Frobenius norm for Hermitian input.
pub fn purity(sigma: &ComplexMatrix) -> f64 {
    sigma.data().iter().map(|z| z.norm_sqr()).sum()
}

/// Upper bound `sqrt((N-1)/N)` on the coherence-vector length of a density matrix.
pub fn coherence_radius(n: usize) -> f64 {
    ((n as f64 - 1.0) / n as f64).sqrt()
}

/// Real coordinates of `rho - I/N` in the generalized Gell-Mann basis,
/// normalized to `Tr(X_i X_j) = delta_ij`.
///
/// Ordering: symmetric generators for each pair `i < j` (row-major pair
/// order), then the antisymmetric ones in the same pair order, then the
/// `N - 1` diagonal generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceVector {
    pub dim: usize,
    pub components: Vec<f64>,
}

impl CoherenceVector {
    pub fn norm(&self) -> f64 {
        self.components.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

pub fn coherence_vector(rho: &ComplexMatrix) -> Result<CoherenceVector> {
    rho.check_hermitian()?;
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotNormalized(tr));
    }
    let n = rho.rows();
    let s2 = std::f64::consts::SQRT_2;
    let mut components = Vec::with_capacity(n * n - 1);
    // symmetric (|i><j| + |j><i|)/sqrt2
    components.extend(pairs(n).map(|(i, j)| s2 * rho[(i, j)].re));
    // antisymmetric (-i|i><j| + i|j><i|)/sqrt2
    components.extend(pairs(n).map(|(i, j)| -s2 * rho[(i, j)].im));
    // diagonal (sum_{k<l} |k><k| - l|l><l|)/sqrt(l(l+1))
    for l in 1..n {
        let head: f64 = (0..l).map(|k| rho[(k, k)].re).sum();
        let lf = l as f64;
        components.push((head - lf * rho[(l, l)].re) / (lf * (lf + 1.0)).sqrt());
    }
    Ok(CoherenceVector { dim: n, components })
}

pub fn state_from_coherence(xi: &CoherenceVector) -> Result<ComplexMatrix> {
    let n = xi.dim;
    if n == 0 || xi.components.len() != n * n - 1 {
        return Err(Error::DimensionMismatch(format!(
            "coherence vector of dimension {n} needs {} components, got {}",
            (n * n).saturating_sub(1),
            xi.components.len()
        )));
    }
    let npairs = n * (n - 1) / 2;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut rho = ComplexMatrix::identity(n).scale(1.0 / n as f64);
    for (k, (i, j)) in pairs(n).enumerate() {
        let sym = xi.components[k];
        let anti = xi.components[npairs + k];
        let z = C64::new(sym * h, -anti * h);
        rho[(i, j)] += z;
        rho[(j, i)] += z.conj();
    }
    for l in 1..n {
        let x = xi.components[2 * npairs + l - 1];
        let lf = l as f64;
        let w = x / (lf * (lf + 1.0)).sqrt();
        for k in 0..l {
            rho[(k, k)] += C64::new(w, 0.0);
        }
        rho[(l, l)] -= C64::new(lf * w, 0.0);
    }
    Ok(rho)
}

/// Polar eigenvalue coordinates.
///
/// Qubit: `(1/2 + r, 1/2 - r)`. Qutrit: `L_k = 1/3 + r cos(phi + 2pi/3 * s_k)`
/// with `s = (+1, 0, -1)` for `(L_1, L_2, L_3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "n")]
pub enum PolarSpectrum {
    #[serde(rename = "2")]
    Qubit { r: f64 },
    #[serde(rename = "3")]
    Qutrit { r: f64, phi: f64 },
}

impl PolarSpectrum {
    pub fn dim(&self) -> usize {
        match self {
            PolarSpectrum::Qubit { .. } => 2,
            PolarSpectrum::Qutrit { .. } => 3,
        }
    }
}

pub fn qutrit_eigenvalues(r: f64, phi: f64) -> [f64; 3] {
    let third = 1.0 / 3.0;
    [
        third + r * (phi + THIRD_TURN).cos(),
        third + r * phi.cos(),
        third + r * (phi - THIRD_TURN).cos(),
    ]
}

pub fn polar_to_spectrum(n: usize, point: &PolarSpectrum) -> Result<Vec<f64>> {
    if point.dim() != n {
        return Err(Error::UnsupportedDimension(n));
    }
    Ok(match *point {
        PolarSpectrum::Qubit { r } => vec![0.5 + r, 0.5 - r],
        PolarSpectrum::Qutrit { r, phi } => qutrit_eigenvalues(r, phi).to_vec(),
    })
}

/// Canonical polar point of a spectrum: `r >= 0` for qubits, and for qutrits
/// `phi` in `[0, pi/3]` (where `L_2 >= L_3 >= L_1`).
pub fn spectrum_to_polar(eigenvalues: &[f64]) -> Result<PolarSpectrum> {
    let mut sorted = eigenvalues.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    match sorted.len() {
        2 => Ok(PolarSpectrum::Qubit {
            r: 0.5 * (sorted[0] - sorted[1]),
        }),
        3 => {
            let (r, phi) = qutrit_polar_labelled([sorted[2], sorted[0], sorted[1]]);
            Ok(PolarSpectrum::Qutrit { r, phi })
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// Inverts [`qutrit_eigenvalues`] for an already-labelled triple, giving
/// `phi` in `[0, 2pi)`. The triple is assumed to sum to one.
pub fn qutrit_polar_labelled(l: [f64; 3]) -> (f64, f64) {
    let x = l[1] - 1.0 / 3.0;
    let y = (l[2] - l[0]) / 3f64.sqrt();
    let r = x.hypot(y);
    if r == 0.0 {
        return (0.0, 0.0);
    }
    let phi = y.atan2(x).rem_euclid(2.0 * PI);
    (r, phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hs_distance;

    #[test]
    fn classify_examples() {
        for n in 1..5 {
            let m = ComplexMatrix::identity(n).scale(1.0 / n as f64);
            assert_eq!(classify(&m, DEFAULT_TOL).unwrap(), StateKind::SubtracialDensity);
        }
        let pure = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
        assert_eq!(classify(&pure, DEFAULT_TOL).unwrap(), StateKind::Density);
        let sub = ComplexMatrix::from_real_diag(&[0.4, 0.4]);
        assert_eq!(classify(&sub, DEFAULT_TOL).unwrap(), StateKind::Subtracial);
        let plain_sub = ComplexMatrix::from_real_diag(&[0.7, 0.1]);
        assert_eq!(classify(&plain_sub, DEFAULT_TOL).unwrap(), StateKind::Subnormalized);
        let neg = ComplexMatrix::from_real_diag(&[1.1, -0.1]);
        assert_eq!(classify(&neg, DEFAULT_TOL).unwrap(), StateKind::NotAState);
        let heavy = ComplexMatrix::from_real_diag(&[0.6, 0.6]);
        assert_eq!(classify(&heavy, DEFAULT_TOL).unwrap(), StateKind::NotAState);
        let bad = ComplexMatrix::from_real_rows(&[&[0.5, 1.0], &[0.0, 0.5]]);
        assert!(matches!(classify(&bad, DEFAULT_TOL), Err(Error::NonHermitianInput { .. })));
    }

    #[test]
    fn subnormalized_state_validation() {
        let s = SubnormalizedState::new(ComplexMatrix::from_real_diag(&[0.2, 0.3])).unwrap();
        assert!((s.trace() - 0.5).abs() < 1e-15);
        assert_eq!(s.min_eigenvalue(), 0.2);
        assert!(SubnormalizedState::new(ComplexMatrix::from_real_diag(&[0.9, 0.3])).is_err());
        assert!(SubnormalizedState::new(ComplexMatrix::from_real_diag(&[0.5, -0.01])).is_err());
    }

    #[test]
    fn coherence_of_maximally_mixed_is_zero() {
        for n in 1..5 {
            let xi = coherence_vector(&ComplexMatrix::identity(n).scale(1.0 / n as f64)).unwrap();
            assert_eq!(xi.components.len(), n * n - 1);
            assert!(xi.norm() < 1e-15);
        }
    }

    #[test]
    fn qubit_pure_state_sits_on_bloch_sphere() {
        let xi = coherence_vector(&ComplexMatrix::from_real_diag(&[1.0, 0.0])).unwrap();
        assert!((xi.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((xi.norm() - coherence_radius(2)).abs() < 1e-15);
        // N=2 ordering is (sigma_x, sigma_y, sigma_z)/sqrt2
        assert!((xi.components[2] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn qutrit_pure_state_norm() {
        let v = [C64::new(0.6, 0.0), C64::new(0.0, 0.48), C64::new(0.64, 0.0)];
        let rho = ComplexMatrix::outer(&v, &v);
        let xi = coherence_vector(&rho).unwrap();
        assert!((xi.norm() - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        let back = state_from_coherence(&xi).unwrap();
        assert!(back.max_abs_diff(&rho) < 1e-14);
    }

    #[test]
    fn coherence_distance_matches_hs_distance() {
        let a = ComplexMatrix::new(2, 2, vec![C64::new(0.6, 0.0), C64::new(0.1, 0.3), C64::new(0.1, -0.3), C64::new(0.4, 0.0)]).unwrap();
        let b = ComplexMatrix::from_real_diag(&[0.25, 0.75]);
        let xa = coherence_vector(&a).unwrap();
        let xb = coherence_vector(&b).unwrap();
        let d: f64 = xa.components.iter().zip(&xb.components).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!((d - hs_distance(&a, &b).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn coherence_errors() {
        assert!(matches!(
            coherence_vector(&ComplexMatrix::from_real_diag(&[0.4, 0.4])),
            Err(Error::NotNormalized(_))
        ));
        let bad = CoherenceVector { dim: 2, components: vec![0.0; 2] };
        assert!(state_from_coherence(&bad).is_err());
    }

    #[test]
    fn polar_centres() {
        assert_eq!(polar_to_spectrum(2, &PolarSpectrum::Qubit { r: 0.0 }).unwrap(), vec![0.5, 0.5]);
        let s = polar_to_spectrum(3, &PolarSpectrum::Qutrit { r: 0.0, phi: 1.0 }).unwrap();
        assert!(s.iter().all(|&x| x == 1.0 / 3.0));
        assert!(matches!(
            polar_to_spectrum(4, &PolarSpectrum::Qubit { r: 0.0 }),
            Err(Error::UnsupportedDimension(4))
        ));
        assert!(matches!(spectrum_to_polar(&[0.25; 4]), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn qutrit_purity_relation_and_canonical_domain() {
        let (r, phi) = (0.2, 2.5);
        let l = polar_to_spectrum(3, &PolarSpectrum::Qutrit { r, phi }).unwrap();
        assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let purity: f64 = l.iter().map(|x| x * x).sum();
        assert!((1.5 * r * r - (purity - 1.0 / 3.0)).abs() < 1e-12);
        match spectrum_to_polar(&l).unwrap() {
            PolarSpectrum::Qutrit { r: r2, phi: p2 } => {
                assert!((r2 - r).abs() < 1e-14);
                assert!((0.0..=PI / 3.0 + 1e-15).contains(&p2));
                // 2.5 folds to 2pi/3*... : 2.5 - 2pi/3 = 0.405..., inside [0, pi/3]
                assert!((p2 - (phi - THIRD_TURN)).abs() < 1e-13);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn labelled_inverse_recovers_angle() {
        for &phi in &[0.1, 1.7, 3.3, 5.9] {
            let l = qutrit_eigenvalues(0.15, phi);
            let (r, p) = qutrit_polar_labelled(l);
            assert!((r - 0.15).abs() < 1e-14);
            assert!((p - phi).abs() < 1e-13);
        }
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&ComplexMatrix::identity(4).scale(0.25)) - 0.25).abs() < 1e-15);
        assert_eq!(purity(&ComplexMatrix::from_real_diag(&[0.0, 1.0])), 1.0);
        assert!((purity(&ComplexMatrix::from_real_diag(&[0.7, 0.3])) - 0.58).abs() < 1e-15);
    }
}
