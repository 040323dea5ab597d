//! Exact normalization constants, volumes and eigenvalue densities.
//!
//! Every Γ-function argument that appears is a positive integer, so all
//! constants are evaluated as big rationals. Volumes carry their π power and
//! square root symbolically in [`ExactVolume`].

use std::fmt;
use std::ops::Mul;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const PI_DIGITS: &str = "31415926535897932384626433832795028841971693993751058209749445923078164062862089986280348253421170679";

/// Digits carried internally by decimal rendering.
const WORK_DIGITS: usize = 90;

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Γ(n) for a positive integer argument.
pub fn gamma(n: u64) -> BigInt {
    assert!(n >= 1, "gamma of non-positive integer");
    factorial(n - 1)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn pow_int(base: u64, exp: u64) -> BigInt {
    Pow::pow(BigInt::from(base), exp)
}

/// `(N, K)` pair of an induced measure. `alpha = K - N + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasureParams {
    pub n: usize,
    pub k: usize,
}

impl MeasureParams {
    pub const BETA: u32 = 2;

    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k < n {
            return Err(Error::BadParams(format!("need K >= N >= 1, got N={n}, K={k}")));
        }
        Ok(Self { n, k })
    }

    pub fn alpha(&self) -> usize {
        self.k - self.n + 1
    }
}

/// Normalization constant `C_N^(alpha)` of the eigenvalue law
/// `C * prod L_i^(alpha-1) * prod_{i<j} (L_i - L_j)^2` on the simplex.
pub fn c_norm(n: usize, alpha: usize) -> Result<BigRational> {
    if n == 0 || alpha == 0 {
        return Err(Error::BadParams(format!("need N >= 1 and alpha >= 1, got N={n}, alpha={alpha}")));
    }
    let (n, a) = (n as u64, alpha as u64);
    let den = (1..=n).fold(BigInt::one(), |acc, j| acc * gamma(1 + j) * gamma(j + a - 1));
    Ok(ratio(gamma(n * n + (a - 1) * n), den))
}

/// Normalization `B_{N,K}` of the induced eigenvalue density.
pub fn b_norm(n: usize, k: usize) -> Result<BigRational> {
    let p = MeasureParams::new(n, k)?;
    let (n, k) = (p.n as u64, p.k as u64);
    let den = (0..n).fold(BigInt::one(), |acc, j| acc * gamma(k - j) * gamma(n - j + 1));
    Ok(ratio(gamma(k * n), den))
}

/// Probability mass of the eigenvalue region `{L_i >= 0, sum L_i <= 1}`
/// under the unnormalized induced law, in units of the simplex constant.
pub fn ch_measure(n: usize, k: usize) -> Result<BigRational> {
    let p = MeasureParams::new(n, k)?;
    let c = c_norm(p.n, p.alpha())?;
    Ok((c * int((p.n * p.k) as u64)).recip())
}

/// Selberg integral `I(K-N+1, 1, 1, N)` over the unit cube.
pub fn selberg_i(n: usize, k: usize) -> Result<BigRational> {
    let p = MeasureParams::new(n, k)?;
    let (n, k) = (p.n as u64, p.k as u64);
    let mut acc = BigRational::one();
    for j in 1..=n {
        let num = gamma(1 + j) * gamma(k - n + j) * gamma(j);
        let den = gamma(2) * gamma(k + j);
        acc *= ratio(num, den);
    }
    Ok(acc)
}

/// Cube integral rescaled to the cube of side `1/N`.
pub fn cube_measure(n: usize, k: usize) -> Result<BigRational> {
    let s = selberg_i(n, k)?;
    Ok(s / int(pow_int(n as u64, (k * n) as u64)))
}

/// Probability that a subnormalized induced state is sub-tracial:
/// `(NK)!/N^{NK} * prod Γ(j)/Γ(K+j)`.
pub fn box_sub_ratio(n: usize, k: usize) -> Result<BigRational> {
    let p = MeasureParams::new(n, k)?;
    let (n, k) = (p.n as u64, p.k as u64);
    let mut acc = ratio(factorial(n * k), pow_int(n, n * k));
    for j in 1..=n {
        acc *= ratio(gamma(j), gamma(k + j));
    }
    Ok(acc)
}

/// The same ratio assembled from the simplex constant and the cube measure.
pub fn box_sub_ratio_via_cube(n: usize, k: usize) -> Result<BigRational> {
    let p = MeasureParams::new(n, k)?;
    let c = c_norm(p.n, p.alpha())?;
    Ok(int((p.n * p.k) as u64) * c * cube_measure(n, k)?)
}

/// Exact number `q * pi^pi_power * sqrt(sqrt_arg)` with `sqrt_arg` square-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactVolume {
    q: BigRational,
    pi_power: u32,
    sqrt_arg: u64,
}

fn square_free_split(mut s: u64) -> (u64, u64) {
    // s = outer^2 * inner
    let mut outer = 1u64;
    let mut d = 2u64;
    while d * d <= s {
        while s.is_multiple_of(d * d) {
            s /= d * d;
            outer *= d;
        }
        d += 1;
    }
    (outer, s)
}

impl ExactVolume {
    pub fn new(q: BigRational, pi_power: u32, sqrt_arg: u64) -> Self {
        assert!(sqrt_arg >= 1, "sqrt argument must be positive");
        let (outer, inner) = square_free_split(sqrt_arg);
        Self {
            q: q * int(outer),
            pi_power,
            sqrt_arg: inner,
        }
    }

    pub fn rational(q: BigRational) -> Self {
        Self::new(q, 0, 1)
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn pi_power(&self) -> u32 {
        self.pi_power
    }

    pub fn sqrt_arg(&self) -> u64 {
        self.sqrt_arg
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        Self {
            q: &self.q * r,
            ..self.clone()
        }
    }

    /// Quotient, defined when the π power of the divisor does not exceed ours.
    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.q.is_zero() || rhs.pi_power > self.pi_power {
            return None;
        }
        // 1/sqrt(s) = sqrt(s)/s
        let q = &self.q / &rhs.q / int(rhs.sqrt_arg);
        Some(Self::new(q, self.pi_power - rhs.pi_power, self.sqrt_arg * rhs.sqrt_arg))
    }

    /// Significant-digit decimal in scientific notation, truncated.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.clamp(1, WORK_DIGITS - 20);
        if self.q.is_zero() {
            return "0".to_string();
        }
        let scale = pow_int(10, WORK_DIGITS as u64);
        // pi and sqrt factors as integers scaled by 10^WORK_DIGITS
        let pi_scaled = BigInt::parse_bytes(&PI_DIGITS.as_bytes()[..=WORK_DIGITS], 10).unwrap();
        let mut x = scale.clone();
        for _ in 0..self.pi_power {
            x = x * &pi_scaled / &scale;
        }
        let root = (BigInt::from(self.sqrt_arg) * &scale * &scale).sqrt();
        x = x * root / &scale;

        let negative = self.q.is_negative();
        let num = self.q.numer().abs() * x;
        let den = self.q.denom().clone() * scale;
        // bring num/den to at least WORK_DIGITS integer digits
        let est = num.bits() as i64 - den.bits() as i64;
        let want_bits = (WORK_DIGITS as f64 * std::f64::consts::LOG2_10) as i64;
        let shift10 = (((want_bits - est) as f64) / std::f64::consts::LOG2_10).ceil().max(0.0) as u64;
        let scaled = num * pow_int(10, shift10) / den;
        let text = scaled.to_string();
        let exponent = text.len() as i64 - 1 - shift10 as i64;
        let mantissa = &text[..digits.min(text.len())];
        let mut out = String::new();
        if negative {
            out.push('-');
        }
        out.push_str(&mantissa[..1]);
        if mantissa.len() > 1 {
            out.push('.');
            out.push_str(&mantissa[1..]);
        }
        out.push_str(&format!("e{exponent}"));
        out
    }

    pub fn to_f64(&self) -> f64 {
        self.to_decimal(30).parse().unwrap()
    }
}

impl fmt::Display for ExactVolume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * pi^{} * sqrt({})", self.q, self.pi_power, self.sqrt_arg)
    }
}

impl Mul for &ExactVolume {
    type Output = ExactVolume;
    fn mul(self, rhs: &ExactVolume) -> ExactVolume {
        ExactVolume::new(&self.q * &rhs.q, self.pi_power + rhs.pi_power, self.sqrt_arg * rhs.sqrt_arg)
    }
}

/// Float value of a big rational, correct to double precision.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 9.0e15 && d < 9.0e15 {
            return n / d;
        }
    }
    ExactVolume::rational(q.clone()).to_f64()
}

/// `(2 pi)^{N(N-1)/2} / prod_{k<N} k!`
pub fn vol_flag(n: usize) -> ExactVolume {
    let n = n as u64;
    let e = n * n.saturating_sub(1) / 2;
    let den = (1..n).fold(BigInt::one(), |acc, k| acc * factorial(k));
    ExactVolume::new(ratio(pow_int(2, e), den), e as u32, 1)
}

/// Volume of the density matrices of size N under the induced measure
/// with environment K (the Hilbert–Schmidt volume when `K = N`).
pub fn vol_states(n: usize, k: usize) -> Result<ExactVolume> {
    let p = MeasureParams::new(n, k)?;
    let c = c_norm(p.n, p.alpha())?;
    let r = int(1u64) / (int(factorial(p.n as u64)) * c);
    Ok(&vol_flag(p.n).scale(&r) * &ExactVolume::new(int(1u64), 0, p.n as u64))
}

/// Volume of the subnormalized states of size N under the induced measure.
pub fn vol_sub(n: usize, k: usize) -> Result<ExactVolume> {
    let p = MeasureParams::new(n, k)?;
    let c = c_norm(p.n, p.alpha())?;
    let r = int(1u64) / (int(factorial(p.n as u64)) * int((p.n * p.k) as u64) * c);
    Ok(vol_flag(p.n).scale(&r))
}

/// Closed form for the volume of CP trace-nonincreasing maps on `M_N`,
/// `vol_flag(N^2)/(N^2)! * cube_measure(N, N^3)`, assembled term by term.
pub fn vol_tni(n: usize) -> Result<ExactVolume> {
    if n == 0 {
        return Err(Error::BadParams("N must be positive".into()));
    }
    let n = n as u64;
    let d = n * n;
    let e = d * (d - 1) / 2;
    let superfactorial = (1..=d).fold(BigInt::one(), |acc, k| acc * factorial(k));
    let mut q = ratio(pow_int(2, e), superfactorial);
    let k = n * n * n;
    for j in 1..=n {
        let num = gamma(1 + j) * gamma(k - n + j) * gamma(j);
        let den = pow_int(n, k) * gamma(k + j);
        q *= ratio(num, den);
    }
    Ok(ExactVolume::new(q, e as u32, 1))
}

/// Volume of the sub-tracial-reduced Choi matrices as the HS mass of
/// `M_{N^2}^sub` times the probability that the reduced state is sub-tracial.
pub fn vol_tni_restricted(n: usize) -> Result<ExactVolume> {
    let d = n * n;
    Ok(vol_sub(d, d)?.scale(&box_sub_ratio(n, n * n * n)?))
}

/// Float value of `B_{N,K}`, cached for the densities used repeatedly.
fn b_norm_f64(n: usize, k: usize) -> Result<f64> {
    Ok(rational_to_f64(&b_norm(n, k)?))
}

/// Induced-measure density of an eigenvalue vector on the simplex.
pub fn density_eigs(n: usize, k: usize, lambda: &[f64]) -> Result<f64> {
    MeasureParams::new(n, k)?;
    if lambda.len() != n {
        return Err(Error::DimensionMismatch(format!("expected {n} eigenvalues, got {}", lambda.len())));
    }
    let sum: f64 = lambda.iter().sum();
    if (sum - 1.0).abs() > 1e-12 || lambda.iter().any(|&l| l.is_nan() || l < 0.0) {
        return Err(Error::NotOnSimplex(format!("{lambda:?}")));
    }
    let mut v = b_norm_f64(n, k)?;
    for &l in lambda {
        v *= l.powi((k - n) as i32);
    }
    for i in 0..n {
        for j in i + 1..n {
            v *= (lambda[i] - lambda[j]).powi(2);
        }
    }
    Ok(v)
}

/// Density of `r = (L_1 - L_2)/2` for qubit reduced states of a random pure
/// state on `C^2 (x) C^8`.
pub fn density_radial_2(r: f64) -> f64 {
    if !(-0.5..=0.5).contains(&r) {
        return 0.0;
    }
    720720.0 * (0.25 - r * r).powi(6) * r * r
}

fn radial_coefficients() -> [(f64, i32); 7] {
    // 720720 * (1/4 - r^2)^6 r^2 = sum c_i r^(2i+2), integrated term by term
    let binom = [1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0];
    let mut out = [(0.0, 0); 7];
    for i in 0..7 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let c = 720720.0 * binom[i] * 0.25f64.powi(6 - i as i32) * sign;
        let p = 2 * i as i32 + 3;
        out[i] = (c / p as f64, p);
    }
    out
}

/// Exact cumulative distribution of [`density_radial_2`].
pub fn cdf_radial_2(r: f64) -> f64 {
    let r = r.clamp(-0.5, 0.5);
    let f = |x: f64| radial_coefficients().iter().map(|&(c, p)| c * x.powi(p)).sum::<f64>();
    (f(r) + f(0.5)).clamp(0.0, 1.0)
}

/// Exact integral of the radial density over `[-1/2, 1/2]`.
pub fn radial_2_total_mass() -> BigRational {
    let mut total = BigRational::zero();
    let half = ratio(BigInt::one(), BigInt::from(2));
    for i in 0..7u32 {
        let binom = BigInt::from([1, 6, 15, 20, 15, 6, 1][i as usize]);
        let quarter_pow = ratio(BigInt::one(), pow_int(4, (6 - i) as u64));
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let p = 2 * i + 3;
        let term = int(binom * sign) * quarter_pow * Pow::pow(&half, p) / int(p);
        total += term;
    }
    total * int(2 * 720720u64)
}

fn polar_prefactor() -> f64 {
    static CELL: OnceLock<f64> = OnceLock::new();
    *CELL.get_or_init(|| {
        let q = ratio(factorial(80), factorial(24) * factorial(25) * factorial(26)) * ratio(9.into(), 64.into());
        rational_to_f64(&q)
    })
}

/// Qutrit reduced-state eigenvalue density (environment 9) in polar
/// coordinates, with respect to `dL_1 dL_2`. Zero outside the simplex.
///
/// The angle is first folded into `[0, pi/3]`, so the value depends on `phi`
/// only through its class under `phi -> -phi` and `phi -> phi + 2pi/3`.
pub fn density_polar_3(r: f64, phi: f64) -> f64 {
    let r = r.abs();
    let t = crate::states::THIRD_TURN;
    let psi = phi.abs().rem_euclid(t);
    let psi = psi.min(t - psi);
    let l = crate::states::qutrit_eigenvalues(r, psi);
    if l.iter().any(|&x| x < 0.0) {
        return 0.0;
    }
    let c3 = (3.0 * psi).cos();
    let s3 = (3.0 * psi).sin();
    let base = (1.0 / 27.0 - r * r / 4.0 + r * r * r * c3 / 4.0).max(0.0);
    polar_prefactor() * r.powi(6) * s3 * s3 * base.powi(24)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        ratio(n.into(), d.into())
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(1), BigInt::one());
        assert_eq!(gamma(5), BigInt::from(24));
        assert_eq!(factorial(0), BigInt::one());
    }

    #[test]
    fn c_norm_examples() {
        assert_eq!(c_norm(1, 1).unwrap(), q(1, 1));
        assert_eq!(c_norm(2, 1).unwrap(), q(3, 1));
        let inv = ratio(gamma(2) * gamma(7) * gamma(3) * gamma(8), gamma(16));
        assert_eq!(c_norm(2, 7).unwrap(), inv.recip());
        assert!(c_norm(0, 1).is_err());
        assert!(c_norm(2, 0).is_err());
    }

    #[test]
    fn b_norm_examples() {
        assert_eq!(b_norm(2, 8).unwrap(), q(180180, 1));
        let expect = ratio(factorial(80), BigInt::from(12) * factorial(24) * factorial(25) * factorial(26));
        assert_eq!(b_norm(3, 27).unwrap(), expect);
        for k in 1..6 {
            assert_eq!(b_norm(1, k).unwrap(), q(1, 1));
        }
        assert!(matches!(b_norm(3, 2), Err(Error::BadParams(_))));
    }

    #[test]
    fn b_norm_equals_c_norm() {
        for n in 1..5 {
            for k in n..n + 6 {
                assert_eq!(b_norm(n, k).unwrap(), c_norm(n, k - n + 1).unwrap());
            }
        }
    }

    #[test]
    fn flag_volumes() {
        assert_eq!(vol_flag(1), ExactVolume::rational(q(1, 1)));
        assert_eq!(vol_flag(2), ExactVolume::new(q(2, 1), 1, 1));
        assert_eq!(vol_flag(3), ExactVolume::new(q(4, 1), 3, 1));
    }

    #[test]
    fn state_volumes() {
        assert_eq!(vol_states(2, 2).unwrap(), ExactVolume::new(q(1, 3), 1, 2));
        assert_eq!(vol_states(1, 1).unwrap(), ExactVolume::rational(q(1, 1)));
        // sqrt3 (2pi)^3 * 2 / 8!
        assert_eq!(vol_states(3, 3).unwrap(), ExactVolume::new(q(16, 40320), 3, 3));
        let ball = 4.0 / 3.0 * std::f64::consts::PI * std::f64::consts::FRAC_1_SQRT_2.powi(3);
        assert!((vol_states(2, 2).unwrap().to_f64() - ball).abs() < 1e-12);
    }

    #[test]
    fn state_volume_general_k_closed_form() {
        for n in 1..5usize {
            for k in n..n + 4 {
                let e = n * (n - 1) / 2;
                let num = (1..=n as u64).fold(BigInt::one(), |a, j| a * gamma((k - n) as u64 + j));
                let qv = ratio(pow_int(2, e as u64) * num, gamma((n * k) as u64));
                let expect = ExactVolume::new(qv, e as u32, n as u64);
                assert_eq!(vol_states(n, k).unwrap(), expect, "N={n} K={k}");
            }
        }
    }

    #[test]
    fn subnormalized_volumes() {
        assert_eq!(vol_sub(2, 2).unwrap(), ExactVolume::new(q(1, 12), 1, 1));
        assert_eq!(vol_sub(1, 1).unwrap(), ExactVolume::rational(q(1, 1)));
        assert!((vol_sub(2, 2).unwrap().to_f64() - std::f64::consts::PI / 12.0).abs() < 1e-15);
        for n in 1..6usize {
            let n52 = ExactVolume::new(int(pow_int(n as u64, 2)), 0, n as u64);
            assert_eq!(&vol_sub(n, n).unwrap() * &n52, vol_states(n, n).unwrap());
        }
    }

    #[test]
    fn ch_measure_examples() {
        assert_eq!(ch_measure(1, 1).unwrap(), q(1, 1));
        assert_eq!(ch_measure(2, 2).unwrap(), q(1, 12));
        assert_eq!(ch_measure(2, 8).unwrap(), (int(16u64) * c_norm(2, 7).unwrap()).recip());
    }

    #[test]
    fn selberg_examples() {
        for k in 1..8 {
            assert_eq!(selberg_i(1, k).unwrap(), q(1, k as i64));
        }
        assert_eq!(selberg_i(2, 8).unwrap(), q(1, 56 * 36));
        assert_eq!(selberg_i(2, 2).unwrap(), q(1, 6));
    }

    #[test]
    fn selberg_two_by_two_by_quadrature() {
        let f = |x: f64| crate::quadrature::gauss_legendre(|y: f64| (x - y).powi(2), 0.0, 1.0, 8);
        let v = crate::quadrature::gauss_legendre(f, 0.0, 1.0, 8);
        assert!((v - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn box_ratio_examples_and_routes() {
        assert_eq!(box_sub_ratio(1, 1).unwrap(), q(1, 1));
        assert_eq!(box_sub_ratio(2, 2).unwrap(), q(1, 8));
        let e = ratio(factorial(16), pow_int(2, 16) * gamma(9) * gamma(10));
        assert_eq!(box_sub_ratio(2, 8).unwrap(), e);
        assert!((rational_to_f64(&e) - 0.0218).abs() < 1e-4);
        for (n, k) in [(1, 1), (2, 2), (2, 8), (3, 3), (3, 27), (4, 4), (4, 64)] {
            let a = box_sub_ratio(n, k).unwrap();
            assert_eq!(a, box_sub_ratio_via_cube(n, k).unwrap());
            assert!(a > BigRational::zero() && a <= BigRational::one());
        }
    }

    #[test]
    fn tni_volume_structure() {
        assert_eq!(vol_tni(1).unwrap(), ExactVolume::rational(q(1, 1)));
        assert_eq!(vol_tni(1).unwrap(), vol_sub(1, 1).unwrap());
        let expect = ExactVolume::new(ratio(pow_int(2, 6), BigInt::from(288 * 2016) * pow_int(2, 16)), 6, 1);
        assert_eq!(vol_tni(2).unwrap(), expect);
        for n in 1..5 {
            let d = n * n;
            let r = cube_measure(n, n * n * n).unwrap() / int(factorial(d as u64));
            assert_eq!(vol_tni(n).unwrap(), vol_flag(d).scale(&r));
        }
    }

    #[test]
    fn restricted_tni_volume_is_a_fraction_of_the_cone() {
        let r = vol_tni_restricted(2).unwrap().checked_div(&vol_sub(4, 4).unwrap()).unwrap();
        assert_eq!(r, ExactVolume::rational(box_sub_ratio(2, 8).unwrap()));
        assert_eq!(vol_tni_restricted(1).unwrap(), vol_tni(1).unwrap());
    }

    #[test]
    fn exact_volume_canonical_form_and_display() {
        let v = ExactVolume::new(q(1, 3), 2, 12);
        assert_eq!(v.sqrt_arg(), 3);
        assert_eq!(v.q(), &q(2, 3));
        assert_eq!(v.to_string(), "2/3 * pi^2 * sqrt(3)");
        let w = ExactVolume::new(q(1, 1), 0, 2);
        let sq = &w * &w;
        assert_eq!(sq, ExactVolume::rational(q(2, 1)));
        assert!(v.checked_div(&ExactVolume::new(q(1, 1), 3, 1)).is_none());
    }

    #[test]
    fn decimal_rendering() {
        let pi = ExactVolume::new(q(1, 1), 1, 1);
        assert_eq!(pi.to_decimal(50), "3.1415926535897932384626433832795028841971693993751e0");
        let s2 = ExactVolume::new(q(1, 1), 0, 2);
        assert_eq!(s2.to_decimal(20), "1.4142135623730950488e0");
        assert_eq!(ExactVolume::rational(q(1, 8)).to_decimal(5), "1.2500e-1");
        assert_eq!(ExactVolume::rational(q(-3, 1)).to_decimal(3), "-3.00e0");
        let tiny = vol_tni(3).unwrap();
        assert!(tiny.to_f64() > 0.0);
        let a = ExactVolume::rational(q(1, 7)).to_decimal(50);
        let b = ExactVolume::rational(q(1, 6)).to_decimal(50);
        assert!(a.parse::<f64>().unwrap() < b.parse::<f64>().unwrap());
    }

    #[test]
    fn density_eigs_examples() {
        assert_eq!(density_eigs(2, 8, &[0.5, 0.5]).unwrap(), 0.0);
        let v = density_eigs(2, 8, &[0.75, 0.25]).unwrap();
        let expect = 180180.0 * (3.0f64 / 16.0).powi(6) * 0.25;
        assert!((v - expect).abs() < 1e-12 * expect);
        assert!(matches!(density_eigs(2, 8, &[0.7, 0.2]), Err(Error::NotOnSimplex(_))));
        assert!(matches!(density_eigs(2, 8, &[1.1, -0.1]), Err(Error::NotOnSimplex(_))));
        let mass = crate::quadrature::adaptive(|x| density_eigs(2, 8, &[x, 1.0 - x]).unwrap(), 0.0, 1.0, 1e-8);
        assert!((mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn density_eigs_hs_case_matches_vandermonde_form() {
        let l = [0.5, 0.3, 0.2];
        let vdm: f64 = (0.2f64 * 0.3 * 0.1).powi(2);
        let b = rational_to_f64(&b_norm(3, 3).unwrap());
        assert!((density_eigs(3, 3, &l).unwrap() / vdm - b).abs() < 1e-9 * b);
    }

    #[test]
    fn radial_density() {
        assert_eq!(density_radial_2(0.0), 0.0);
        assert_eq!(density_radial_2(0.5), 0.0);
        assert_eq!(density_radial_2(-0.5), 0.0);
        assert_eq!(density_radial_2(0.7), 0.0);
        assert_eq!(radial_2_total_mass(), q(1, 1));
        assert!((cdf_radial_2(0.5) - 1.0).abs() < 1e-12);
        assert!(cdf_radial_2(-0.5).abs() < 1e-12);
        assert!((cdf_radial_2(0.0) - 0.5).abs() < 1e-12);
        let mass = crate::quadrature::adaptive(density_radial_2, -0.5, 0.5, 1e-12);
        assert!((mass - 1.0).abs() < 1e-10);
        let part = crate::quadrature::adaptive(density_radial_2, -0.5, 0.1, 1e-12);
        assert!((part - cdf_radial_2(0.1)).abs() < 1e-10);
    }

    #[test]
    fn radial_density_is_the_eigenvalue_density() {
        for &r in &[0.05, 0.2, 0.37] {
            let v = density_eigs(2, 8, &[0.5 + r, 0.5 - r]).unwrap();
            assert!((v - density_radial_2(r)).abs() < 1e-10 * v);
        }
    }

    #[test]
    fn polar_density_matches_eigenvalue_density() {
        for &(r, phi) in &[(0.1, 0.3), (0.2, 2.0), (0.05, 4.4)] {
            let l = crate::states::qutrit_eigenvalues(r, phi);
            let direct = density_eigs(3, 27, &l).unwrap();
            let polar = density_polar_3(r, phi);
            assert!((direct - polar).abs() < 1e-9 * direct, "{direct} vs {polar}");
        }
        assert_eq!(density_polar_3(0.0, 1.0), 0.0);
        assert_eq!(density_polar_3(0.7, 0.0), 0.0);
    }

    #[test]
    fn polar_density_normalized() {
        let t = crate::states::THIRD_TURN;
        let inner = |psi: f64| {
            let rmax = -1.0 / (3.0 * (psi + t).cos());
            crate::quadrature::adaptive(|r| density_polar_3(r, psi) * r, 0.0, rmax, 1e-10)
        };
        let half_sector = crate::quadrature::adaptive(inner, 0.0, std::f64::consts::PI / 3.0, 1e-9);
        let total = 6.0 * half_sector * 3f64.sqrt() / 2.0;
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn polar_density_symmetry_on_dyadic_angles() {
        let t = crate::states::THIRD_TURN;
        for i in 0..10_000u64 {
            let r = (i % 97) as f64 / 97.0 * 0.4;
            let phi = ((i * 2_654_435_761) % (1 << 50)) as f64 * 2f64.powi(-50);
            let a = density_polar_3(r, phi);
            assert_eq!(a.to_bits(), density_polar_3(r, -phi).to_bits());
            if (phi + t) - t == phi {
                assert_eq!(a.to_bits(), density_polar_3(r, phi + t).to_bits());
            }
        }
    }

    #[test]
    fn polar_density_symmetry_within_rounding() {
        let t = crate::states::THIRD_TURN;
        for i in 0..2000 {
            let r = (i % 41) as f64 / 41.0 * 0.5;
            let phi = i as f64 * 0.731;
            let a = density_polar_3(r, phi);
            let b = density_polar_3(r, phi + t);
            let c = density_polar_3(r, -phi);
            assert!((a - b).abs() <= 1e-9 * (1.0 + a));
            assert!((a - c).abs() <= 1e-9 * (1.0 + a));
        }
    }
}
