//! Linear maps on `M_N` in three representations: superoperator, rescaled
//! dynamical (Choi) matrix and Kraus operators. Includes the complete
//! positivity / trace checks and the k-extremal family of trace-nonincreasing
//! maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, hermitian_eigvals, kron, partial_trace, perfect_square_root, reshuffle, ComplexMatrix, Subsystem, C64};
use crate::sampling::Sampler;
use crate::states::{classify, StateKind};

pub const DEFAULT_CP_TOL: f64 = 1e-9;
pub const DEFAULT_TP_TOL: f64 = 1e-9;
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Yes,
    No,
    Unchecked,
}

impl From<bool> for Check {
    fn from(b: bool) -> Self {
        if b {
            Check::Yes
        } else {
            Check::No
        }
    }
}

pub trait QuantumMap {
    fn dim(&self) -> usize;
    fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix>;
}

fn check_input(n: usize, rho: &ComplexMatrix) -> Result<()> {
    if rho.rows() != n || rho.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "map acts on {n}x{n} matrices, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

fn side_root(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", m.rows(), m.cols())));
    }
    perfect_square_root(m.rows()).ok_or(Error::NotPerfectSquareSide(m.rows()))
}

/// Matrix acting on row-major vectorized inputs: `rho'_{m mu} = Phi_{m mu, n nu} rho_{n nu}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    n: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let n = side_root(&matrix)?;
        Ok(Self { n, matrix })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            matrix: ComplexMatrix::identity(n * n),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Whether the map sends Hermitian matrices to Hermitian matrices.
    pub fn preserves_hermiticity(&self, tol: f64) -> bool {
        reshuffle(&self.matrix).map(|d| d.hermiticity_defect() <= tol).unwrap_or(false)
    }
}

impl QuantumMap for Superoperator {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_input(self.n, rho)?;
        let v = ComplexMatrix::new(self.n * self.n, 1, rho.data().to_vec())?;
        let out = self.matrix.try_mul(&v)?;
        ComplexMatrix::new(self.n, self.n, out.into_data())
    }
}

/// Rescaled dynamical matrix `sigma = D/N` with cached status flags.
#[derive(Clone, Debug, Serialize)]
pub struct ChoiForm {
    n: usize,
    sigma: ComplexMatrix,
    pub is_cp: Check,
    pub is_tp: Check,
    pub is_tni: Check,
}

impl ChoiForm {
    pub fn new(sigma: ComplexMatrix) -> Result<Self> {
        let n = side_root(&sigma)?;
        sigma.check_hermitian()?;
        Ok(Self {
            n,
            sigma,
            is_cp: Check::Unchecked,
            is_tp: Check::Unchecked,
            is_tni: Check::Unchecked,
        })
    }

    /// Fills in all three flags with the default tolerances.
    pub fn checked(mut self) -> Self {
        self.is_cp = is_cp(&self, DEFAULT_CP_TOL).into();
        self.is_tp = is_tp(&self, DEFAULT_TP_TOL).into();
        self.is_tni = is_tni(&self, DEFAULT_TP_TOL).into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> &ComplexMatrix {
        &self.sigma
    }

    pub fn dynamical(&self) -> ComplexMatrix {
        self.sigma.scale(self.n as f64)
    }

    pub fn trace(&self) -> f64 {
        self.sigma.trace().re
    }
}

impl QuantumMap for ChoiForm {
    fn dim(&self) -> usize {
        self.n
    }

    /// `rho'_{ik} = N sum_{jl} sigma_{ij,kl} rho_{jl}`
    fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_input(self.n, rho)?;
        let n = self.n;
        let scale = n as f64;
        Ok(ComplexMatrix::from_fn(n, n, |i, k| {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                for l in 0..n {
                    acc += self.sigma[(i * n + j, k * n + l)] * rho[(j, l)];
                }
            }
            acc * scale
        }))
    }
}

/// Operators `A_mu` with `Phi(rho) = sum A rho A^dagger`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KrausSet {
    n: usize,
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(n: usize, operators: Vec<ComplexMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch("dimension must be positive".into()));
        }
        if operators.len() > n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} operators exceed the maximum of {} for N={n}",
                operators.len(),
                n * n
            )));
        }
        if let Some(a) = operators.iter().find(|a| a.rows() != n || a.cols() != n) {
            return Err(Error::DimensionMismatch(format!("operator is {}x{}, expected {n}x{n}", a.rows(), a.cols())));
        }
        Ok(Self { n, operators })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// `sum A^dagger A`
    pub fn gram_sum(&self) -> ComplexMatrix {
        self.operators.iter().fold(ComplexMatrix::zeros(self.n, self.n), |acc, a| &acc + &(&a.adjoint() * a))
    }
}

impl QuantumMap for KrausSet {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_input(self.n, rho)?;
        Ok(self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(self.n, self.n), |acc, a| &acc + &(&(a * rho) * &a.adjoint())))
    }
}

pub fn choi_from_superop(phi: &Superoperator) -> Result<ChoiForm> {
    let d = reshuffle(&phi.matrix)?;
    let sigma = d.scale(1.0 / phi.n as f64);
    ChoiForm::new(sigma)
}

pub fn superop_from_choi(choi: &ChoiForm) -> Superoperator {
    let m = reshuffle(&choi.dynamical()).expect("Choi side is a perfect square");
    Superoperator { n: choi.n, matrix: m }
}

/// Completely positive iff the smallest eigenvalue of sigma is at least
/// `-tol * max(1, |sigma|_F)`.
pub fn is_cp(choi: &ChoiForm, tol: f64) -> bool {
    let eigs = hermitian_eigvals(&choi.sigma).expect("ChoiForm holds a Hermitian matrix");
    let floor = -tol * choi.sigma.frobenius_norm().max(1.0);
    eigs.last().is_none_or(|&m| m >= floor)
}

pub fn is_tp(choi: &ChoiForm, tol: f64) -> bool {
    let reduced = reduced_rescaled(choi).scale(choi.n as f64);
    let defect = (&reduced - &ComplexMatrix::identity(choi.n)).frobenius_norm();
    defect <= tol
}

pub fn is_tni(choi: &ChoiForm, tol: f64) -> bool {
    let reduced = reduced_rescaled(choi);
    let max = hermitian_eigvals(&reduced).expect("partial trace of a Hermitian matrix")[0];
    max <= 1.0 / choi.n as f64 + tol
}

/// `Tr_A sigma`, which equals `(1/N) Tr_A D`.
pub fn reduced_rescaled(choi: &ChoiForm) -> ComplexMatrix {
    partial_trace(&choi.sigma, choi.n, choi.n, Subsystem::A).expect("Choi side is N^2").hermitian_part()
}

/// Kraus operators from the spectral decomposition of the dynamical matrix.
/// Eigenpairs below `rank_tol * Tr D` are dropped.
pub fn kraus_from_choi(choi: &ChoiForm, rank_tol: f64) -> Result<KrausSet> {
    let d = choi.dynamical();
    let eig = hermitian_eig(&d)?;
    let floor = -DEFAULT_CP_TOL * d.frobenius_norm().max(1.0);
    if let Some(&min) = eig.eigenvalues.last() {
        if min < floor {
            return Err(Error::NotCompletelyPositive(min));
        }
    }
    let n = choi.n;
    let cut = rank_tol * d.trace().re;
    let mut operators = Vec::new();
    for (k, &m) in eig.eigenvalues.iter().enumerate() {
        if m <= cut || m <= 0.0 {
            continue;
        }
        let v = eig.eigenvector(k);
        let s = m.sqrt();
        operators.push(ComplexMatrix::new(n, n, v.into_iter().map(|z| z * s).collect())?);
    }
    KrausSet::new(n, operators)
}

/// `D = sum |A><A|` with `|A>_{i N + j} = A_{ij}`; fails if the map would
/// increase the trace of some state.
pub fn choi_from_kraus(kraus: &KrausSet) -> Result<ChoiForm> {
    let n = kraus.n;
    let bound = 1.0 / n as f64;
    let gram = kraus.gram_sum().hermitian_part().scale(bound);
    let max = hermitian_eigvals(&gram)?[0];
    if max > bound + DEFAULT_TP_TOL {
        return Err(Error::GramConditionViolated { max, bound });
    }
    let mut d = ComplexMatrix::zeros(n * n, n * n);
    for a in &kraus.operators {
        let v = a.data();
        d = &d + &ComplexMatrix::outer(v, v);
    }
    let mut choi = ChoiForm::new(d.scale(bound))?;
    choi.is_cp = Check::Yes;
    choi.is_tni = Check::Yes;
    choi.is_tp = is_tp(&choi, DEFAULT_TP_TOL).into();
    Ok(choi)
}

/// Subset `zeta` of `{1..N}` selecting a k-extremal map, with an optional
/// output state for the product construction `Phi(rho) = omega Tr(P rho)`.
#[derive(Clone, Debug)]
pub struct ExtremalSpec {
    n: usize,
    zeta: Vec<usize>,
    omega: Option<ComplexMatrix>,
}

impl ExtremalSpec {
    pub fn new(n: usize, zeta: Vec<usize>, omega: Option<ComplexMatrix>) -> Result<Self> {
        if n == 0 {
            return Err(Error::BadSubset("dimension must be positive".into()));
        }
        if zeta.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::BadSubset(format!("{zeta:?} is not strictly increasing")));
        }
        if zeta.iter().any(|&z| z == 0 || z > n) {
            return Err(Error::BadSubset(format!("{zeta:?} has elements outside 1..={n}")));
        }
        if let Some(w) = &omega {
            if w.rows() != n || w.cols() != n {
                return Err(Error::DimensionMismatch(format!("omega must be {n}x{n}")));
            }
            if !classify(w, 1e-9)?.is_density() {
                return Err(Error::NotAState("omega is not a density matrix".into()));
            }
        }
        Ok(Self { n, zeta, omega })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn zeta(&self) -> &[usize] {
        &self.zeta
    }

    pub fn k(&self) -> usize {
        self.zeta.len()
    }

    pub fn omega(&self) -> ComplexMatrix {
        self.omega
            .clone()
            .unwrap_or_else(|| ComplexMatrix::identity(self.n).scale(1.0 / self.n as f64))
    }

    /// Diagonal projector onto the basis vectors listed in `zeta`.
    pub fn projector(&self) -> ComplexMatrix {
        let diag: Vec<f64> = (1..=self.n).map(|i| if self.zeta.contains(&i) { 1.0 } else { 0.0 }).collect();
        ComplexMatrix::from_real_diag(&diag)
    }
}

/// `sigma = omega (x) P_zeta / N`.
pub fn make_k_extremal(spec: &ExtremalSpec) -> Result<ChoiForm> {
    let reduced = spec.projector().scale(1.0 / spec.n as f64);
    let mut choi = ChoiForm::new(kron(&spec.omega(), &reduced))?;
    choi.is_cp = Check::Yes;
    choi.is_tni = Check::Yes;
    choi.is_tp = (spec.k() == spec.n).into();
    Ok(choi)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalReport {
    pub k: usize,
    pub max_subspace_trace_error: f64,
    pub trace_at_maximally_mixed: f64,
    pub expected_trace: f64,
    pub scaled_output_is_density: bool,
    pub product_form_error: f64,
    pub pass: bool,
}

/// Checks that the map is trace preserving on states supported on `zeta`,
/// that `Tr Phi(I/N) = k/N`, and that `Phi(I/N) = (k/N) omega`.
pub fn verify_extremal_properties(choi: &ChoiForm, spec: &ExtremalSpec, n_random: usize, sampler: &mut Sampler) -> Result<ExtremalReport> {
    let n = spec.n;
    if choi.n != n {
        return Err(Error::DimensionMismatch(format!("map has N={}, spec has N={n}", choi.n)));
    }
    let p = spec.projector();
    let mut max_err = 0.0f64;
    for _ in 0..n_random {
        let x = sampler.density_induced(n, n)?;
        let y = &(&p * &x) * &p;
        let out = choi.apply(&y)?;
        max_err = max_err.max((out.trace().re - y.trace().re).abs());
    }
    let k = spec.k();
    let mixed = ComplexMatrix::identity(n).scale(1.0 / n as f64);
    let out = choi.apply(&mixed)?;
    let tr = out.trace().re;
    let expected = k as f64 / n as f64;
    let scaled_ok = if k == 0 {
        out.frobenius_norm() <= 1e-12
    } else {
        classify(&out.hermitian_part().scale(1.0 / expected), 1e-9)?.is_density()
    };
    let product_err = (&out - &spec.omega().scale(expected)).frobenius_norm();
    let pass = max_err <= 1e-9 && (tr - expected).abs() <= 1e-12 && scaled_ok;
    Ok(ExtremalReport {
        k,
        max_subspace_trace_error: max_err,
        trace_at_maximally_mixed: tr,
        expected_trace: expected,
        scaled_output_is_density: scaled_ok,
        product_form_error: product_err,
        pass,
    })
}

/// Map whose Kraus set is `{A}` for a single operator.
pub fn single_kraus(a: ComplexMatrix) -> Result<KrausSet> {
    let n = a.rows();
    KrausSet::new(n, vec![a])
}

/// Transposition `rho -> rho^T`, which is positive but not completely positive.
pub fn transpose_choi(n: usize) -> ChoiForm {
    let swap = ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        let (m, nn) = (r / n, r % n);
        let (mu, nu) = (c / n, c % n);
        if m == nu && nn == mu {
            C64::new(1.0 / n as f64, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    ChoiForm::new(swap).expect("swap is Hermitian")
}

/// Output trace is at most the input trace for every sampled state.
pub fn is_trace_nonincreasing_on(choi: &ChoiForm, rho: &ComplexMatrix) -> Result<bool> {
    let out = choi.apply(rho)?;
    Ok(out.trace().re <= rho.trace().re + 1e-9)
}

pub fn reduced_state_kind(choi: &ChoiForm) -> Result<StateKind> {
    classify(&reduced_rescaled(choi), 1e-9)
}
