//! Seeded random states and maps.
//!
//! Every [`Sampler`] owns a ChaCha20 stream chosen by `(seed, stream_id)`.
//! Monte-Carlo workers split a stream into chunks with [`Sampler::substream`],
//! each starting at its own fixed word offset, so results do not depend on
//! how chunks are scheduled across threads.

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::channels::{is_tni, Check, ChoiForm};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigvals, partial_trace, ComplexMatrix, Subsystem, C64};
use crate::states::SubnormalizedState;

pub const DEFAULT_REJECTION_BUDGET: u64 = 10_000_000;

/// Words of keystream reserved for each substream chunk.
const CHUNK_WORDS: u32 = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    pub seed: u64,
    pub stream_id: u64,
    pub n: usize,
    pub k: usize,
}

impl SamplerConfig {
    pub fn new(seed: u64, stream_id: u64, n: usize, k: usize) -> Result<Self> {
        check_dims(n, k)?;
        Ok(Self { seed, stream_id, n, k })
    }

    pub fn sampler(&self) -> Sampler {
        Sampler::new(self.seed, self.stream_id)
    }
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if n == 0 || k < n {
        return Err(Error::BadDimensions(format!("need K >= N >= 1, got N={n}, K={k}")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha20Rng,
    spare_normal: Option<f64>,
}

impl Sampler {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { rng, spare_normal: None }
    }

    /// Chunk `chunk` of stream `(seed, stream_id)`.
    pub fn substream(seed: u64, stream_id: u64, chunk: u64) -> Self {
        let mut s = Self::new(seed, stream_id);
        s.rng.set_word_pos((chunk as u128) << CHUNK_WORDS);
        s
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Standard normal via the Box–Muller transform.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Complex Gaussian with independent standard normal parts.
    pub fn complex_normal(&mut self) -> C64 {
        let re = self.normal();
        let im = self.normal();
        C64::new(re, im)
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        xs.shuffle(&mut self.rng);
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    /// Haar-random unit vector.
    pub fn haar_vector(&mut self, n: usize) -> Vec<C64> {
        let v: Vec<C64> = (0..n).map(|_| self.complex_normal()).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / norm).collect()
    }

    /// `G G^dagger / Tr` for an `N x K` Ginibre matrix `G`.
    pub fn density_induced(&mut self, n: usize, k: usize) -> Result<ComplexMatrix> {
        check_dims(n, k)?;
        let w = self.ginibre(n, k).gram();
        let tr = w.trace().re;
        Ok(w.scale(1.0 / tr))
    }

    /// Trace weight `a = u^{1/(NK)}` of a subnormalized state.
    pub fn trace_weight(&mut self, n: usize, k: usize) -> f64 {
        let u = 1.0 - self.uniform();
        u.powf(1.0 / (n * k) as f64)
    }

    /// `a * rho` with `rho` induced and `a` the trace weight.
    pub fn subnormalized(&mut self, n: usize, k: usize) -> Result<SubnormalizedState> {
        let rho = self.density_induced(n, k)?;
        let a = self.trace_weight(n, k);
        let sigma = rho.scale(a);
        let min = *hermitian_eigvals(&sigma)?.last().unwrap();
        Ok(SubnormalizedState::from_parts(sigma, a, min))
    }

    /// Eigenvalues (descending) of a subnormalized induced state.
    pub fn subnormalized_spectrum(&mut self, n: usize, k: usize) -> Result<Vec<f64>> {
        let rho = self.density_induced(n, k)?;
        let a = self.trace_weight(n, k);
        Ok(hermitian_eigvals(&rho)?.into_iter().map(|x| a * x).collect())
    }

    /// Spectrum of `Tr_A rho_AB` for `rho_AB` Hilbert–Schmidt random on
    /// `C^K (x) C^N`.
    pub fn reduced_spectrum(&mut self, n: usize, k: usize) -> Result<Vec<f64>> {
        hermitian_eigvals(&self.reduced_state(n, k)?)
    }

    /// `Tr_A rho_AB` itself, for the same construction as [`Self::reduced_spectrum`].
    pub fn reduced_state(&mut self, n: usize, k: usize) -> Result<ComplexMatrix> {
        if n == 0 || k == 0 {
            return Err(Error::BadDimensions(format!("need N, K >= 1, got N={n}, K={k}")));
        }
        let d = n * k;
        let rho = self.density_induced(d, d)?;
        Ok(partial_trace(&rho, k, n, Subsystem::A)?.hermitian_part())
    }

    /// Draws `G` (N^2 x N^2 Ginibre) and the trace weight `a` of one
    /// subnormalized proposal.
    fn tni_draw(&mut self, n: usize) -> (ComplexMatrix, f64) {
        let d = n * n;
        let g = self.ginibre(d, d);
        let a = self.trace_weight(d, d);
        (g, a)
    }

    /// Whether a fresh proposal passes the trace-nonincreasing test. Only the
    /// reduced matrix `Tr_A sigma` is formed.
    pub fn tni_accepts(&mut self, n: usize) -> Result<bool> {
        let (g, a) = self.tni_draw(n);
        let d = n * n;
        let total: f64 = g.data().iter().map(|z| z.norm_sqr()).sum();
        let reduced = ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..n {
                let (ri, rj) = (m * n + i, m * n + j);
                for c in 0..d {
                    acc += g[(ri, c)] * g[(rj, c)].conj();
                }
            }
            acc * (a / total)
        })
        .hermitian_part();
        Ok(hermitian_eigvals(&reduced)?[0] <= 1.0 / n as f64)
    }

    /// Hilbert–Schmidt random subnormalized `N^2 x N^2` matrix conditioned
    /// on `Tr_A sigma <= I/N`, by rejection.
    pub fn tni_choi(&mut self, n: usize, budget: u64) -> Result<ChoiForm> {
        if n == 0 || n > 4 {
            return Err(Error::BadDimensions(format!("TNI sampling supports 1 <= N <= 4, got {n}")));
        }
        for _ in 0..budget {
            let (g, a) = self.tni_draw(n);
            let w = g.gram();
            let sigma = w.scale(a / w.trace().re);
            let mut choi = ChoiForm::new(sigma)?;
            if is_tni(&choi, 0.0) {
                choi.is_cp = Check::Yes;
                choi.is_tni = Check::Yes;
                return Ok(choi);
            }
        }
        Err(Error::RejectionBudgetExceeded(budget))
    }

    /// Random CP trace-nonincreasing map: a Wishart Choi matrix rescaled so the
    /// largest reduced eigenvalue is `u/N` with `u` uniform in `(0, 1]`.
    pub fn scaled_tni_choi(&mut self, n: usize) -> Result<ChoiForm> {
        let d = n * n;
        let rank = 1 + (self.uniform() * d as f64) as usize;
        let w = self.ginibre(d, rank.min(d)).gram();
        let reduced = partial_trace(&w, n, n, Subsystem::A)?;
        let top = hermitian_eigvals(&reduced)?[0];
        let u = 1.0 - self.uniform();
        ChoiForm::new(w.scale(u / (n as f64 * top)))
    }

    /// Random trace-preserving map: `(I (x) Z) W (I (x) Z^dagger)` with
    /// `Z = (Tr_A W)^{-1/2}`, rescaled by `1/N`.
    pub fn tp_choi(&mut self, n: usize) -> Result<ChoiForm> {
        let d = n * n;
        let w = self.ginibre(d, d).gram();
        let y = partial_trace(&w, n, n, Subsystem::A)?;
        let eig = crate::linalg::hermitian_eig(&y)?;
        let inv_sqrt: Vec<f64> = eig.eigenvalues.iter().map(|&l| 1.0 / l.sqrt()).collect();
        let v = &eig.eigenvectors;
        let z = &(v * &ComplexMatrix::from_real_diag(&inv_sqrt)) * &v.adjoint();
        let lift = crate::linalg::kron(&ComplexMatrix::identity(n), &z);
        let sigma = (&(&lift * &w) * &lift.adjoint()).hermitian_part().scale(1.0 / n as f64);
        ChoiForm::new(sigma)
    }
}
