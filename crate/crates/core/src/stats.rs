//! Goodness-of-fit statistics.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        let hi = (i + 1) as f64 / n - f;
        let lo = f - i as f64 / n;
        d.max(hi).max(lo)
    })
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Upper-tail probability of the chi-square law with `dof` degrees of freedom.
pub fn chi_square_p_value(statistic: f64, dof: usize) -> f64 {
    ChiSquared::new(dof.max(1) as f64).expect("positive degrees of freedom").sf(statistic)
}

/// Pearson statistic after pooling consecutive cells until each pooled cell
/// expects at least `min_expected` counts. Returns `(statistic, cells)`.
pub fn pooled_chi_square(observed: &[u64], expected: &[f64], min_expected: f64) -> (f64, usize) {
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&ob, &ex) in observed.iter().zip(expected) {
        o += ob as f64;
        e += ex;
        if e >= min_expected {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    let stat = cells.iter().map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else { 0.0 }).sum();
    (stat, cells.len())
}
