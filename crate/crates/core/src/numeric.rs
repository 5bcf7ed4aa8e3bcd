//! Small numeric utilities shared across the model modules.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use statrs::function::gamma::ln_gamma;

/// log C(n, k) via log-gamma, stable for large n.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// x·log(y) with the limit convention 0·log 0 = 0.
pub fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// log(eᵃ + eᵇ) without overflow. NEG_INFINITY inputs behave as zero terms.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// log Σ eˣ over a slice, shifted by the maximum.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + xs.iter().map(|x| (x - hi).exp()).sum::<f64>().ln()
}

/// Pairwise (cascade) summation; error grows like log n rather than n,
/// and the result is independent of how the caller produced the slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Gauss-Legendre nodes and weights on [-1, 1], memoized per order.
///
/// Newton iteration on P_m from the Chebyshev-like initial guess; the
/// iteration is quadratically convergent and hits machine precision in
/// a handful of steps for every order used here.
pub fn gauss_legendre(m: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&m) {
        return Arc::clone(hit);
    }
    let fresh = Arc::new(gauss_legendre_uncached(m));
    cache.lock().unwrap().insert(m, Arc::clone(&fresh));
    fresh
}

fn gauss_legendre_uncached(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 2);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    // Roots come in +/- pairs; solve the upper half.
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// P_m(x) and P_m'(x) by the three-term recurrence.
fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Real roots of a·x³ + b·x² + c·x + d = 0, ascending. Returns the roots in
/// the front of the array and their count. Requires a ≠ 0.
pub fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> ([f64; 3], usize) {
    debug_assert!(a != 0.0);
    // Depressed form t^3 + p t + q with x = t - b/(3a).
    let shift = b / (3.0 * a);
    let p = c / a - shift * shift * 3.0;
    let q = 2.0 * shift.powi(3) - shift * c / a + d / a;
    let mut roots = [0.0; 3];
    let count;
    let disc = (q / 2.0) * (q / 2.0) + (p / 3.0).powi(3);
    if disc > 0.0 {
        // One real root: Cardano with the larger-magnitude cube root taken
        // first so the second factor comes from u·v = -p/3, not subtraction.
        let sd = disc.sqrt();
        let u3 = if q <= 0.0 { -q / 2.0 + sd } else { -q / 2.0 - sd };
        let u = u3.cbrt();
        roots[0] = u - p / (3.0 * u) - shift;
        count = 1;
    } else {
        // Three real roots (possibly repeated): trigonometric form.
        let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
        let arg = if m == 0.0 {
            0.0
        } else {
            (3.0 * q / (p * m)).clamp(-1.0, 1.0)
        };
        let theta = arg.acos() / 3.0;
        for (k, slot) in roots.iter_mut().enumerate() {
            let angle = theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            *slot = m * angle.cos() - shift;
        }
        roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
        count = 3;
    }
    // Polish with a couple of Newton steps on the original polynomial.
    for r in roots.iter_mut().take(count) {
        for _ in 0..2 {
            let f = ((a * *r + b) * *r + c) * *r + d;
            let df = (3.0 * a * *r + 2.0 * b) * *r + c;
            if df != 0.0 {
                *r -= f / df;
            }
        }
    }
    (roots, count)
}

/// Result of a Nelder-Mead run.
pub struct SimplexFit {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Derivative-free Nelder-Mead simplex minimization.
///
/// Classic reflection/expansion/contraction/shrink coefficients; terminates
/// when both the simplex value spread and coordinate spread are below the
/// tolerances, or after `max_iter` iterations.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: &[f64],
    f_tol: f64,
    x_tol: f64,
    max_iter: usize,
) -> SimplexFit {
    let dim = x0.len();
    assert_eq!(step.len(), dim);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += step[i];
        let fv = f(&v);
        simplex.push((v, fv));
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let spread_f = simplex[dim].1 - simplex[0].1;
        let spread_x = (0..dim)
            .map(|i| {
                simplex
                    .iter()
                    .map(|(v, _)| (v[i] - simplex[0].0[i]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread_f.abs() <= f_tol && spread_x <= x_tol {
            converged = true;
            break;
        }
        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for (v, _) in simplex.iter().take(dim) {
            for (c, vi) in centroid.iter_mut().zip(v) {
                *c += vi / dim as f64;
            }
        }
        let worst = simplex[dim].clone();
        let point = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };
        let reflected = point(1.0);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = point(2.0);
            let fe = f(&expanded);
            simplex[dim] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (reflected, fr);
        } else {
            let contracted = if fr < worst.1 { point(0.5) } else { point(-0.5) };
            let fc = f(&contracted);
            if fc < worst.1.min(fr) {
                simplex[dim] = (contracted, fc);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    for (vi, bi) in entry.0.iter_mut().zip(&best) {
                        *vi = bi + 0.5 * (*vi - *bi);
                    }
                    entry.1 = f(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    SimplexFit {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        iterations,
        converged,
    }
}

/// Central finite-difference gradient; steps scale with the coordinate.
pub fn fd_gradient(mut f: impl FnMut(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let h = 1e-5 * x[i].abs().max(1.0);
        probe[i] = x[i] + h;
        let fp = f(&probe);
        probe[i] = x[i] - h;
        let fm = f(&probe);
        probe[i] = x[i];
        grad.push((fp - fm) / (2.0 * h));
    }
    grad
}
