//! Gauss–Legendre quadrature, fixed order and adaptive.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x = 0.0;
            dp = 1.0;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = legendre_rule(n);
    rule_sum(&f, a, b, &x, &w)
}

fn rule_sum(f: &impl Fn(f64) -> f64, a: f64, b: f64, x: &[f64], w: &[f64]) -> f64 {
    let h = 0.5 * (b - a);
    let c = 0.5 * (b + a);
    h * x.iter().zip(w).map(|(&xi, &wi)| wi * f(c + h * xi)).sum::<f64>()
}

const ADAPTIVE_ORDER: usize = 15;
const MAX_DEPTH: u32 = 40;

/// Recursive bisection until the whole-interval and split estimates agree
/// to `rel_tol` relative to the running total.
pub fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let (x, w) = legendre_rule(ADAPTIVE_ORDER);
    let whole = rule_sum(&f, a, b, &x, &w);
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    refine(&f, a, b, whole, rel_tol * scale, &x, &w, 0)
}

#[allow(clippy::too_many_arguments)]
fn refine(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, abs_tol: f64, x: &[f64], w: &[f64], depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let left = rule_sum(f, a, m, x, w);
    let right = rule_sum(f, m, b, x, w);
    let split = left + right;
    if (split - whole).abs() <= abs_tol || depth >= MAX_DEPTH {
        return split;
    }
    refine(f, a, m, left, 0.5 * abs_tol, x, w, depth + 1) + refine(f, m, b, right, 0.5 * abs_tol, x, w, depth + 1)
}
