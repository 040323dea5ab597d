//! Monte-Carlo checks of the closed forms: Bernoulli estimates of volume
//! ratios, goodness-of-fit tests of the eigenvalue densities, and the trace
//! scaling law of the subnormalized measure.
//!
//! Work is split into fixed chunks of [`CHUNK`] samples; chunk `c` always
//! draws from `Sampler::substream(seed, stream_id, c)`, and partial results
//! are combined in chunk order.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::hs_distance;
use crate::measures::{box_sub_ratio, cdf_radial_2, density_polar_3, rational_to_f64, vol_sub, vol_tni, vol_tni_restricted};
use crate::quadrature::legendre_rule;
use crate::sampling::Sampler;
use crate::states::{purity, qutrit_polar_labelled, spectrum_to_polar, PolarSpectrum, THIRD_TURN};
use crate::stats::{chi_square_p_value, ks_one_sample, ks_two_sample, pooled_chi_square};
use crate::ComplexMatrix;

pub const CHUNK: u64 = 10_000;
pub const Z_MAX: f64 = 4.0;
pub const KS_THRESHOLD: f64 = 0.01;
pub const CHI_SQUARE_P_MIN: f64 = 1e-4;
pub const SCALING_SIGMAS: f64 = 5.0;
pub const SCALING_GRID: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

const POLAR_R_BINS: usize = 25;
const POLAR_PHI_BINS: usize = 6;
const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub seed: u64,
    pub stream_id: u64,
}

impl McConfig {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }
}

impl Default for McConfig {
    fn default() -> Self {
        Self::new(0, 0)
    }
}

fn par_chunks<T: Send>(samples: u64, cfg: &McConfig, f: impl Fn(&mut Sampler, u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut s = Sampler::substream(cfg.seed, cfg.stream_id, c);
            let size = CHUNK.min(samples - c * CHUNK);
            f(&mut s, size)
        })
        .collect()
}

fn count_hits(samples: u64, cfg: &McConfig, hit: impl Fn(&mut Sampler) -> Result<bool> + Sync) -> Result<u64> {
    let parts = par_chunks(samples, cfg, |s, size| {
        let mut h = 0u64;
        for _ in 0..size {
            h += hit(s)? as u64;
        }
        Ok(h)
    })?;
    Ok(parts.into_iter().sum())
}

fn collect<T: Send>(samples: u64, cfg: &McConfig, draw: impl Fn(&mut Sampler) -> Result<T> + Sync) -> Result<Vec<T>> {
    let parts = par_chunks(samples, cfg, |s, size| (0..size).map(|_| draw(s)).collect::<Result<Vec<T>>>())?;
    Ok(parts.into_iter().flatten().collect())
}

/// Bernoulli estimate compared against an exact target.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub estimate: f64,
    pub stderr: f64,
    pub n_samples: u64,
    pub target: f64,
    pub z_score: f64,
    pub pass: bool,
}

impl McReport {
    /// `stderr = sqrt(p(1-p)/n)` from the estimate; when that vanishes the
    /// target's binomial error is used instead.
    pub fn from_counts(hits: u64, n: u64, target: f64, z_max: f64) -> Self {
        let p = hits as f64 / n as f64;
        let stderr = (p * (1.0 - p) / n as f64).sqrt();
        let sigma = if stderr > 0.0 { stderr } else { (target * (1.0 - target) / n as f64).max(0.0).sqrt() };
        Self::assemble(p, stderr, sigma, n, target, z_max)
    }

    /// Uses the binomial error implied by the target probability.
    pub fn against_target_sigma(hits: u64, n: u64, target: f64, z_max: f64) -> Self {
        let p = hits as f64 / n as f64;
        let stderr = (p * (1.0 - p) / n as f64).sqrt();
        let sigma = (target * (1.0 - target) / n as f64).max(0.0).sqrt();
        Self::assemble(p, stderr, sigma, n, target, z_max)
    }

    fn assemble(p: f64, stderr: f64, sigma: f64, n: u64, target: f64, z_max: f64) -> Self {
        let z = if sigma > 0.0 {
            (p - target) / sigma
        } else if p == target {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            estimate: p,
            stderr,
            n_samples: n,
            target,
            z_score: z,
            pass: z.abs() <= z_max,
        }
    }
}

/// Fraction of subnormalized induced states whose eigenvalues all lie in
/// `[0, 1/N]`, against the exact box-to-cone ratio.
pub fn estimate_box_fraction(n: usize, k: usize, samples: u64, cfg: &McConfig) -> Result<McReport> {
    let target = rational_to_f64(&box_sub_ratio(n, k)?);
    let bound = 1.0 / n as f64;
    let hits = count_hits(samples, cfg, |s| Ok(s.subnormalized_spectrum(n, k)?[0] <= bound))?;
    Ok(McReport::from_counts(hits, samples, target, Z_MAX))
}

/// Which closed form the TNI acceptance rate is compared with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TniTarget {
    /// `vol_tni(N) / vol_sub(N^2, N^2)`
    ClosedForm,
    /// `vol_tni_restricted(N) / vol_sub(N^2, N^2)`, the sub-tracial probability
    /// of the reduced matrix.
    Restricted,
}

pub fn tni_target(n: usize, which: TniTarget) -> Result<f64> {
    let num = match which {
        TniTarget::ClosedForm => vol_tni(n)?,
        TniTarget::Restricted => vol_tni_restricted(n)?,
    };
    let ratio = num.checked_div(&vol_sub(n * n, n * n)?).expect("matching powers of pi");
    Ok(ratio.to_f64())
}

/// Acceptance rate of the rejection sampler for trace-nonincreasing Choi matrices.
pub fn estimate_tni_acceptance(n: usize, proposals: u64, cfg: &McConfig, which: TniTarget) -> Result<McReport> {
    let target = tni_target(n, which)?;
    let hits = count_hits(proposals, cfg, |s| s.tni_accepts(n))?;
    Ok(McReport::from_counts(hits, proposals, target, Z_MAX))
}

/// Source of sampled spectra for the density tests. `HilbertSchmidt` draws the
/// spectrum of an unconditioned random state and serves as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    Reduced,
    HilbertSchmidt,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramTest {
    pub bins: usize,
    pub ks_statistic: f64,
    pub threshold: f64,
    /// Two-sample distance between the samples of `r` and of `-r`.
    pub symmetry_ks: f64,
    pub pass: bool,
}

/// KS test of `r = (L_1 - L_2)/2` (eigenvalues randomly labelled) for
/// qubits obtained from random pure states on `C^2 (x) C^8`.
pub fn test_radial_density_2(samples: u64, cfg: &McConfig, source: SpectrumSource) -> Result<HistogramTest> {
    let rs = collect(samples, cfg, |s| {
        let l = match source {
            SpectrumSource::Reduced => s.reduced_spectrum(2, 2)?,
            SpectrumSource::HilbertSchmidt => crate::linalg::hermitian_eigvals(&s.density_induced(2, 2)?)?,
        };
        let r = 0.5 * (l[0] - l[1]);
        Ok(if s.uniform() < 0.5 { r } else { -r })
    })?;
    let ks = ks_one_sample(&rs, cdf_radial_2);
    let mirrored: Vec<f64> = rs.iter().map(|r| -r).collect();
    Ok(HistogramTest {
        bins: rs.len(),
        ks_statistic: ks,
        threshold: KS_THRESHOLD,
        symmetry_ks: ks_two_sample(&rs, &mirrored),
        pass: ks < KS_THRESHOLD,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarTest {
    pub cells: usize,
    pub chi_square: f64,
    pub p_value: f64,
    pub expected_total: f64,
    pub sector_counts: [u64; 3],
    pub sector_max_z: f64,
    pub purity_max_error: f64,
    pub pass: bool,
}

/// Largest `r` with all three eigenvalues non-negative at folded angle `psi`.
fn polar_r_max(psi: f64) -> f64 {
    -1.0 / (3.0 * (psi + THIRD_TURN).cos())
}

/// Expected fraction of samples in each (r, psi) cell of the fundamental
/// domain `psi in [0, pi/3]`, `r in [0, 2/3]`, row-major in r.
pub fn polar_cell_probabilities(r_bins: usize, phi_bins: usize) -> Vec<f64> {
    let (x, w) = legendre_rule(16);
    let r_top = 2.0 / 3.0;
    let psi_top = std::f64::consts::PI / 3.0;
    let jac = 6.0 * 3f64.sqrt() / 2.0;
    let mut out = Vec::with_capacity(r_bins * phi_bins);
    for i in 0..r_bins {
        let (r0, r1) = (r_top * i as f64 / r_bins as f64, r_top * (i + 1) as f64 / r_bins as f64);
        for j in 0..phi_bins {
            let (p0, p1) = (psi_top * j as f64 / phi_bins as f64, psi_top * (j + 1) as f64 / phi_bins as f64);
            let (ph, pc) = (0.5 * (p1 - p0), 0.5 * (p1 + p0));
            let mut cell = 0.0;
            for (&xp, &wp) in x.iter().zip(&w) {
                let psi = pc + ph * xp;
                let hi = r1.min(polar_r_max(psi));
                if hi <= r0 {
                    continue;
                }
                let (rh, rc) = (0.5 * (hi - r0), 0.5 * (hi + r0));
                let inner: f64 = x.iter().zip(&w).map(|(&xr, &wr)| {
                    let r = rc + rh * xr;
                    wr * density_polar_3(r, psi) * r
                }).sum::<f64>() * rh;
                cell += wp * inner;
            }
            out.push(cell * ph * jac);
        }
    }
    out
}

/// Chi-square test of the qutrit polar density for reduced states of random
/// pure states on `C^3 (x) C^9`, plus three-fold symmetry of the unfolded
/// angle and the purity relation `3/2 r^2 + 1/3 = Tr rho^2`.
pub fn test_polar_density_3(samples: u64, cfg: &McConfig, source: SpectrumSource) -> Result<PolarTest> {
    let points = collect(samples, cfg, |s| {
        let rho = match source {
            SpectrumSource::Reduced => s.reduced_state(3, 3)?,
            SpectrumSource::HilbertSchmidt => s.density_induced(3, 3)?,
        };
        let mut l = crate::linalg::hermitian_eigvals(&rho)?;
        let canonical = spectrum_to_polar(&l)?;
        s.shuffle(&mut l);
        let (r, phi) = qutrit_polar_labelled([l[0], l[1], l[2]]);
        let purity_err = (1.5 * r * r + 1.0 / 3.0 - purity(&rho)).abs();
        let (cr, cpsi) = match canonical {
            PolarSpectrum::Qutrit { r, phi } => (r, phi),
            PolarSpectrum::Qubit { .. } => unreachable!("three eigenvalues"),
        };
        Ok((cr, cpsi, phi, purity_err))
    })?;

    let r_top = 2.0 / 3.0;
    let psi_top = std::f64::consts::PI / 3.0;
    let mut observed = vec![0u64; POLAR_R_BINS * POLAR_PHI_BINS];
    let mut sectors = [0u64; 3];
    let mut purity_max = 0.0f64;
    for &(r, psi, phi, err) in &points {
        let i = ((r / r_top * POLAR_R_BINS as f64) as usize).min(POLAR_R_BINS - 1);
        let j = ((psi / psi_top * POLAR_PHI_BINS as f64) as usize).min(POLAR_PHI_BINS - 1);
        observed[i * POLAR_PHI_BINS + j] += 1;
        sectors[((phi / THIRD_TURN) as usize).min(2)] += 1;
        purity_max = purity_max.max(err);
    }
    let n = points.len() as f64;
    let expected: Vec<f64> = polar_cell_probabilities(POLAR_R_BINS, POLAR_PHI_BINS).into_iter().map(|p| p * n).collect();
    let (chi, cells) = pooled_chi_square(&observed, &expected, MIN_EXPECTED);
    let p_value = chi_square_p_value(chi, cells.saturating_sub(1));
    let sigma = (n * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
    let sector_max_z = sectors.iter().map(|&c| (c as f64 - n / 3.0).abs() / sigma).fold(0.0, f64::max);
    Ok(PolarTest {
        cells,
        chi_square: chi,
        p_value,
        expected_total: expected.iter().sum(),
        sector_counts: sectors,
        sector_max_z,
        purity_max_error: purity_max,
        pass: p_value > CHI_SQUARE_P_MIN && sector_max_z <= Z_MAX && purity_max <= 1e-10,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub n: usize,
    pub k: usize,
    pub points: Vec<(f64, McReport)>,
    pub pass: bool,
}

/// Mass of `{Tr sigma <= t}` under the subnormalized sampler against `t^{NK}`,
/// each grid point within [`SCALING_SIGMAS`] binomial standard deviations.
pub fn test_scaling_lemma1(n: usize, k: usize, samples: u64, cfg: &McConfig) -> Result<ScalingReport> {
    let parts = par_chunks(samples, cfg, |s, size| {
        let mut counts = [0u64; SCALING_GRID.len()];
        for _ in 0..size {
            let t = s.subnormalized(n, k)?.trace();
            for (c, &g) in counts.iter_mut().zip(&SCALING_GRID) {
                *c += (t <= g) as u64;
            }
        }
        Ok(counts)
    })?;
    let mut totals = [0u64; SCALING_GRID.len()];
    for p in parts {
        for (t, c) in totals.iter_mut().zip(p) {
            *t += c;
        }
    }
    let exponent = (n * k) as i32;
    let points: Vec<(f64, McReport)> = SCALING_GRID
        .iter()
        .zip(totals)
        .map(|(&t, hits)| (t, McReport::against_target_sigma(hits, samples, t.powi(exponent), SCALING_SIGMAS)))
        .collect();
    let pass = points.iter().all(|(_, r)| r.pass);
    Ok(ScalingReport { n, k, points, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeHeightReport {
    pub min_distance: f64,
    pub floor: f64,
    pub n_samples: u64,
    pub pass: bool,
}

/// Smallest HS distance from the origin over sampled density matrices; never
/// below `1/sqrt(N)`, the distance of `I/N`.
pub fn test_cone_height(n: usize, samples: u64, cfg: &McConfig) -> Result<ConeHeightReport> {
    let zero = ComplexMatrix::zeros(n, n);
    let parts = par_chunks(samples, cfg, |s, size| {
        let mut m = f64::INFINITY;
        for _ in 0..size {
            m = m.min(hs_distance(&s.density_induced(n, n)?, &zero)?);
        }
        Ok(m)
    })?;
    let min = parts.into_iter().fold(f64::INFINITY, f64::min);
    let floor = 1.0 / (n as f64).sqrt();
    Ok(ConeHeightReport {
        min_distance: min,
        floor,
        n_samples: samples,
        pass: min >= floor - 1e-12,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelAlgebraReport {
    pub n: usize,
    pub maps: usize,
    pub trace_preserving_maps: usize,
    pub max_kraus_round_trip: f64,
    pub max_gram_defect: f64,
    pub max_apply_disagreement: f64,
    pub max_output_trace: f64,
    pub tp_without_tni: usize,
    pub pass: bool,
}

/// Representation round trips on random CP trace-nonincreasing maps: a third
/// trace preserving, a third rescaled Wishart, a third from the rejection
/// sampler (N = 2) or rescaled Wishart (larger N).
pub fn check_channel_algebra(n: usize, maps: usize, cfg: &McConfig) -> Result<ChannelAlgebraReport> {
    use crate::channels::{choi_from_kraus, is_tni, is_tp, kraus_from_choi, reduced_rescaled, superop_from_choi, QuantumMap, DEFAULT_RANK_TOL, DEFAULT_TP_TOL};
    use crate::sampling::DEFAULT_REJECTION_BUDGET;

    let mut s = Sampler::new(cfg.seed, cfg.stream_id);
    let mut report = ChannelAlgebraReport {
        n,
        maps,
        trace_preserving_maps: 0,
        max_kraus_round_trip: 0.0,
        max_gram_defect: 0.0,
        max_apply_disagreement: 0.0,
        max_output_trace: 0.0,
        tp_without_tni: 0,
        pass: false,
    };
    for i in 0..maps {
        let choi = match i % 3 {
            0 => s.tp_choi(n)?,
            1 => s.scaled_tni_choi(n)?,
            _ if n <= 2 => s.tni_choi(n, DEFAULT_REJECTION_BUDGET)?,
            _ => s.scaled_tni_choi(n)?,
        };
        let kraus = kraus_from_choi(&choi, DEFAULT_RANK_TOL)?;
        let back = choi_from_kraus(&kraus)?;
        report.max_kraus_round_trip = report.max_kraus_round_trip.max((back.sigma() - choi.sigma()).frobenius_norm());
        let gram_target = reduced_rescaled(&choi).transpose().scale(n as f64);
        report.max_gram_defect = report.max_gram_defect.max((&kraus.gram_sum() - &gram_target).frobenius_norm());
        let rho = s.density_induced(n, n)?;
        let via_superop = superop_from_choi(&choi).apply(&rho)?;
        let via_kraus = kraus.apply(&rho)?;
        report.max_apply_disagreement = report.max_apply_disagreement.max(via_superop.max_abs_diff(&via_kraus));
        report.max_output_trace = report.max_output_trace.max(via_kraus.trace().re);
        if is_tp(&choi, DEFAULT_TP_TOL) {
            report.trace_preserving_maps += 1;
            if !is_tni(&choi, DEFAULT_TP_TOL) {
                report.tp_without_tni += 1;
            }
        }
    }
    report.pass = report.max_kraus_round_trip <= 1e-8
        && report.max_gram_defect <= 1e-8
        && report.max_apply_disagreement <= 1e-9
        && report.max_output_trace <= 1.0 + 1e-9
        && report.tp_without_tni == 0;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalFamilyReport {
    pub n: usize,
    pub subsets: usize,
    pub max_trace_error: f64,
    pub max_subspace_trace_error: f64,
    pub max_product_form_error: f64,
    pub all_scaled_outputs_density: bool,
    pub pass: bool,
}

/// Properties of the k-extremal product maps for every subset of `{1..N}`,
/// with the maximally mixed output state and with a random one.
pub fn check_extremal_family(n: usize, n_random: usize, cfg: &McConfig) -> Result<ExtremalFamilyReport> {
    use crate::channels::{make_k_extremal, verify_extremal_properties, ExtremalSpec};

    let mut s = Sampler::new(cfg.seed, cfg.stream_id);
    let mut rep = ExtremalFamilyReport {
        n,
        subsets: 0,
        max_trace_error: 0.0,
        max_subspace_trace_error: 0.0,
        max_product_form_error: 0.0,
        all_scaled_outputs_density: true,
        pass: false,
    };
    for mask in 0u32..(1 << n) {
        let zeta: Vec<usize> = (1..=n).filter(|&i| mask & (1 << (i - 1)) != 0).collect();
        for random_omega in [false, true] {
            let omega = if random_omega { Some(s.density_induced(n, n)?) } else { None };
            let spec = ExtremalSpec::new(n, zeta.clone(), omega)?;
            let choi = make_k_extremal(&spec)?;
            let r = verify_extremal_properties(&choi, &spec, n_random, &mut s)?;
            rep.max_trace_error = rep.max_trace_error.max((r.trace_at_maximally_mixed - r.expected_trace).abs());
            rep.max_subspace_trace_error = rep.max_subspace_trace_error.max(r.max_subspace_trace_error);
            rep.max_product_form_error = rep.max_product_form_error.max(r.product_form_error);
            rep.all_scaled_outputs_density &= r.scaled_output_is_density;
        }
        rep.subsets += 1;
    }
    rep.pass = rep.max_trace_error <= 1e-12
        && rep.max_subspace_trace_error <= 1e-9
        && rep.max_product_form_error <= 1e-10
        && rep.all_scaled_outputs_density;
    Ok(rep)
}
