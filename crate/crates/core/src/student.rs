//! Central and noncentral Student-t densities.
//!
//! The noncentral density is evaluated by Gauss-Legendre quadrature of its
//! integral representation over a window centered on the integrand's mode.
//! The integrand is a unimodal bump with Gaussian-scale tails, so a fixed
//! 128-node rule over mode ± 20 widths carries near-full double precision;
//! a narrower window leaves measurable tail mass behind at small nu.

use std::sync::{Arc, OnceLock};

use statrs::function::gamma::ln_gamma;

use crate::numeric::gauss_legendre;

/// Log density of the central Student-t with `nu` degrees of freedom.
/// Requires nu > 0.
pub fn log_central_t_pdf(t: f64, nu: f64) -> f64 {
    debug_assert!(nu > 0.0);
    ln_gamma((nu + 1.0) / 2.0)
        - ln_gamma(nu / 2.0)
        - 0.5 * (nu * std::f64::consts::PI).ln()
        - (nu + 1.0) / 2.0 * (t * t / nu).ln_1p()
}

/// Log density of the noncentral Student-t at `t` with `nu` degrees of
/// freedom and noncentrality `a`. Requires nu > 0.
pub fn log_noncentral_t_pdf(t: f64, nu: f64, a: f64) -> f64 {
    debug_assert!(nu > 0.0);
    let beta = t * t + nu;
    let at = a * t;
    // Mode of g(u) = nu·ln u - beta·u²/2 + at·u and the curvature there.
    let mode = (at + (at * at + 4.0 * nu * beta).sqrt()) / (2.0 * beta);
    let width = 1.0 / (beta + nu / (mode * mode)).sqrt();
    let lo = (mode - 20.0 * width).max(0.0);
    let hi = mode + 20.0 * width;
    let log_k = std::f64::consts::LN_2 + (nu / 2.0) * (nu / 2.0).ln()
        - 0.5 * (2.0 * std::f64::consts::PI).ln()
        - ln_gamma(nu / 2.0);
    // Evaluated millions of times under the simulation harness; hold the
    // node table locally instead of taking the cache lock every call.
    static RULE: OnceLock<Arc<(Vec<f64>, Vec<f64>)>> = OnceLock::new();
    let (nodes, weights) = &**RULE.get_or_init(|| gauss_legendre(128));
    let half = (hi - lo) / 2.0;
    let mid = (hi + lo) / 2.0;
    let mut log_f = [0.0; 128];
    for (slot, x) in log_f.iter_mut().zip(nodes) {
        let u = mid + half * x;
        *slot = nu * u.ln() - beta * u * u / 2.0 + at * u - a * a / 2.0 + log_k;
    }
    let shift = log_f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = log_f
        .iter()
        .zip(weights)
        .map(|(lf, w)| w * (lf - shift).exp())
        .sum();
    shift + sum.ln() + half.ln()
}

/// Density of the noncentral Student-t; underflows cleanly to zero when the
/// noncentrality is wildly incompatible with `t`.
pub fn noncentral_t_pdf(t: f64, nu: f64, a: f64) -> f64 {
    log_noncentral_t_pdf(t, nu, a).exp()
}
