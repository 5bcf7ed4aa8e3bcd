//! An MML two-sample t-test.
//!
//! Both hypotheses are coded as full messages. The null asserts one normal
//! population (parameters mu, sigma); the alternative splits the means by a
//! standardized effect delta with group means mu ± sigma·delta/2 and puts a
//! heavy-tailed prior on delta. The test reports both codelengths; a shorter
//! alternative message is evidence of an effect. A Bayes factor over the
//! same prior is provided for comparison.

use statrs::function::gamma::ln_gamma;

use crate::codelength::{kappa, Codelength, PriorRange};
use crate::error::{Error, Result};
use crate::numeric::{cubic_real_roots, fd_gradient, gauss_legendre, nelder_mead};
use crate::student::{log_central_t_pdf, noncentral_t_pdf};

/// Raw two-sample input.
#[derive(Clone, Debug, Default)]
pub struct TwoSampleData {
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
}

/// Everything the test needs from the data.
///
/// `s1_sq`/`s2_sq` are the usual n-1 sample variances (zero for a singleton
/// group, whose weight in the pooled variance is zero anyway); `sum1`,
/// `sum2`, `sum_sq` are the raw Σy₁, Σy₂ and Σy² over both groups.
#[derive(Clone, Copy, Debug)]
pub struct TTestSufficientStats {
    pub n1: usize,
    pub n2: usize,
    pub mean1: f64,
    pub mean2: f64,
    pub s1_sq: f64,
    pub s2_sq: f64,
    pub t: f64,
    pub nu: f64,
    pub n_delta: f64,
    pub sum1: f64,
    pub sum2: f64,
    pub sum_sq: f64,
}

impl TTestSufficientStats {
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    fn nf(&self) -> f64 {
        (self.n1 + self.n2) as f64
    }

    pub fn grand_mean(&self) -> f64 {
        (self.n1 as f64 * self.mean1 + self.n2 as f64 * self.mean2) / self.nf()
    }

    /// Σ of squared deviations from the group means, both groups.
    pub fn ss_within(&self) -> f64 {
        (self.n1 as f64 - 1.0) * self.s1_sq + (self.n2 as f64 - 1.0) * self.s2_sq
    }

    /// Σ of squared deviations from the grand mean; exceeds `ss_within` by
    /// n_delta·(mean1 - mean2)².
    pub fn ss_total(&self) -> f64 {
        let d = self.mean1 - self.mean2;
        self.ss_within() + self.n_delta * d * d
    }
}

/// Null-model parameter estimates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NullParams {
    pub mu: f64,
    pub sigma: f64,
}

/// Alternative-model parameters: common location, scale, standardized
/// effect size. Group means are mu + sigma·delta/2 and mu - sigma·delta/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AltParams {
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
}

/// Student-t prior on the standardized effect size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectSizePrior {
    pub df: f64,
    pub location: f64,
    pub scale: f64,
}

impl Default for EffectSizePrior {
    /// Cauchy(0, 1).
    fn default() -> Self {
        EffectSizePrior { df: 1.0, location: 0.0, scale: 1.0 }
    }
}

impl EffectSizePrior {
    pub fn new(df: f64, location: f64, scale: f64) -> Result<Self> {
        if !(df > 0.0 && df.is_finite()) {
            return Err(Error::Domain(format!("prior df must be positive, got {df}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!("prior scale must be positive, got {scale}")));
        }
        if !location.is_finite() {
            return Err(Error::Domain("prior location must be finite".into()));
        }
        Ok(EffectSizePrior { df, location, scale })
    }

    /// Log prior density at `delta`.
    pub fn log_density(&self, delta: f64) -> f64 {
        let z = (delta - self.location) / self.scale;
        self.log_density_standard(z) - self.scale.ln()
    }

    /// Log density of the standardized (location 0, scale 1) form.
    fn log_density_standard(&self, z: f64) -> f64 {
        let k = self.df;
        ln_gamma((k + 1.0) / 2.0)
            - ln_gamma(k / 2.0)
            - 0.5 * (k * std::f64::consts::PI).ln()
            - (k + 1.0) / 2.0 * (z * z / k).ln_1p()
    }
}

/// Reduce two samples to sufficient statistics.
///
/// Needs at least three observations in total (so the pooled variance has a
/// degree of freedom) and nonzero spread within at least one group.
pub fn ttest_stats(data: &TwoSampleData) -> Result<TTestSufficientStats> {
    let (n1, n2) = (data.y1.len(), data.y2.len());
    if n1 == 0 || n2 == 0 {
        return Err(Error::Domain("both groups need at least one observation".into()));
    }
    if n1 + n2 < 3 {
        return Err(Error::Domain("need at least three observations in total".into()));
    }
    if data.y1.iter().chain(&data.y2).any(|v| !v.is_finite()) {
        return Err(Error::Domain("observations must be finite".into()));
    }
    let mean = |ys: &[f64]| ys.iter().sum::<f64>() / ys.len() as f64;
    let (mean1, mean2) = (mean(&data.y1), mean(&data.y2));
    let var = |ys: &[f64], m: f64| {
        if ys.len() < 2 {
            return 0.0;
        }
        ys.iter().map(|y| (y - m) * (y - m)).sum::<f64>() / (ys.len() - 1) as f64
    };
    let (s1_sq, s2_sq) = (var(&data.y1, mean1), var(&data.y2, mean2));
    let nu = (n1 + n2 - 2) as f64;
    let pooled = ((n1 as f64 - 1.0) * s1_sq + (n2 as f64 - 1.0) * s2_sq) / nu;
    if pooled <= 0.0 {
        return Err(Error::DegenerateData(
            "no spread within groups; the pooled variance is zero".into(),
        ));
    }
    let n_delta = (n1 as f64) * (n2 as f64) / (n1 + n2) as f64;
    let t = n_delta.sqrt() * (mean1 - mean2) / pooled.sqrt();
    Ok(TTestSufficientStats {
        n1,
        n2,
        mean1,
        mean2,
        s1_sq,
        s2_sq,
        t,
        nu,
        n_delta,
        sum1: data.y1.iter().sum(),
        sum2: data.y2.iter().sum(),
        sum_sq: data.y1.iter().chain(&data.y2).map(|y| y * y).sum(),
    })
}

/// Null-model estimates: the grand mean, and the scale whose square is
/// SS_total/(n-1), which minimizes the null codelength.
pub fn mml_null_estimates(stats: &TTestSufficientStats) -> NullParams {
    NullParams {
        mu: stats.grand_mean(),
        sigma: (stats.ss_total() / (stats.nf() - 1.0)).sqrt(),
    }
}

/// Codelength of the one-population message, minimized over (mu, sigma):
///
///   (n-1)/2·(1 + ln σ̂²) + 1/2·ln(2^(n+1) π^n (n e κ₂ Ω)²),
///
/// with σ̂² = SS_total/(n-1).
pub fn null_codelength(stats: &TTestSufficientStats, range: &PriorRange) -> Result<Codelength> {
    let n = stats.nf();
    let ss_total = stats.ss_total();
    if ss_total <= 0.0 {
        return Err(Error::DegenerateData("all observations are identical".into()));
    }
    let sig_sq = ss_total / (n - 1.0);
    let kappa2 = kappa(2)?;
    let nats = (n - 1.0) / 2.0 * (1.0 + sig_sq.ln())
        + (n + 1.0) / 2.0 * std::f64::consts::LN_2
        + n / 2.0 * std::f64::consts::PI.ln()
        + n.ln()
        + 1.0
        + kappa2.ln()
        + range.log_omega;
    Ok(Codelength::from_nats(nats))
}

/// Negative log likelihood of the two-group model at arbitrary parameters,
/// from sufficient statistics. Returns +∞ for sigma ≤ 0.
pub fn alt_neg_log_likelihood(stats: &TTestSufficientStats, params: &AltParams) -> f64 {
    if params.sigma <= 0.0 {
        return f64::INFINITY;
    }
    let (n1, n2) = (stats.n1 as f64, stats.n2 as f64);
    let offset = params.sigma * params.delta / 2.0;
    let (c1, c2) = (params.mu + offset, params.mu - offset);
    let rss = (n1 - 1.0) * stats.s1_sq
        + n1 * (stats.mean1 - c1) * (stats.mean1 - c1)
        + (n2 - 1.0) * stats.s2_sq
        + n2 * (stats.mean2 - c2) * (stats.mean2 - c2);
    let sigma_sq = params.sigma * params.sigma;
    stats.nf() / 2.0 * (2.0 * std::f64::consts::PI * sigma_sq).ln() + rss / (2.0 * sigma_sq)
}

/// Maximum-likelihood estimates of the alternative's parameters.
pub fn ml_alt_estimates(stats: &TTestSufficientStats) -> AltParams {
    let sigma = (stats.ss_within() / stats.nf()).sqrt();
    AltParams {
        mu: (stats.mean1 + stats.mean2) / 2.0,
        sigma,
        delta: (stats.mean1 - stats.mean2) / sigma,
    }
}

/// Codelength of the two-group message at arbitrary parameters.
pub fn alt_codelength(
    stats: &TTestSufficientStats,
    params: &AltParams,
    prior: &EffectSizePrior,
    range: &PriorRange,
) -> Result<Codelength> {
    if !(params.sigma > 0.0) {
        return Err(Error::Domain(format!("sigma must be positive, got {}", params.sigma)));
    }
    let (n1, n2, n) = (stats.n1 as f64, stats.n2 as f64, stats.nf());
    let kappa3 = kappa(3)?;
    let nats = alt_neg_log_likelihood(stats, params)
        + 0.5 * (2.0 * n1 * n2 * n / params.sigma.powi(4)).ln()
        + range.log_omega
        + params.sigma.ln()
        - prior.log_density(params.delta)
        + 1.5 * kappa3.ln()
        + 1.5;
    Ok(Codelength::from_nats(nats))
}

/// The codelength as a function of (sigma, delta) with mu profiled out, and
/// its exact coordinate updates.
struct ProfiledAlt {
    n1: f64,
    n2: f64,
    n: f64,
    n_delta: f64,
    d: f64,
    ss_within: f64,
    grand_mean: f64,
    prior: EffectSizePrior,
    log_omega: f64,
    log_kappa3: f64,
}

impl ProfiledAlt {
    fn new(stats: &TTestSufficientStats, prior: &EffectSizePrior, range: &PriorRange) -> Self {
        ProfiledAlt {
            n1: stats.n1 as f64,
            n2: stats.n2 as f64,
            n: stats.nf(),
            n_delta: stats.n_delta,
            d: stats.mean1 - stats.mean2,
            ss_within: stats.ss_within(),
            grand_mean: stats.grand_mean(),
            prior: *prior,
            log_omega: range.log_omega,
            log_kappa3: kappa(3).expect("three-parameter constant").ln(),
        }
    }

    /// The mu minimizing the residual sum at fixed (sigma, delta).
    fn mu_hat(&self, sigma: f64, delta: f64) -> f64 {
        self.grand_mean - (self.n1 - self.n2) / self.n * sigma * delta / 2.0
    }

    /// Codelength at (sigma, delta, mu_hat(sigma, delta)); the residual sum
    /// collapses to SS_within + n_delta·(d - sigma·delta)² there.
    fn codelength(&self, sigma: f64, delta: f64) -> f64 {
        let gap = self.d - sigma * delta;
        let rss = self.ss_within + self.n_delta * gap * gap;
        let sigma_sq = sigma * sigma;
        self.n / 2.0 * (2.0 * std::f64::consts::PI * sigma_sq).ln()
            + rss / (2.0 * sigma_sq)
            + 0.5 * (2.0 * self.n1 * self.n2 * self.n).ln()
            - sigma.ln()
            + self.log_omega
            - self.prior.log_density(delta)
            + 1.5 * self.log_kappa3
            + 1.5
    }

    /// Exact minimizer over sigma at fixed delta: the positive root of
    /// (n-1)σ² + n_delta·d·delta·σ - (SS_within + n_delta·d²) = 0.
    fn sigma_given_delta(&self, delta: f64) -> f64 {
        let a = self.n - 1.0;
        let b = self.n_delta * self.d * delta;
        let c = -(self.ss_within + self.n_delta * self.d * self.d);
        (-b + (b * b - 4.0 * a * c).sqrt()) / (2.0 * a)
    }

    /// Exact minimizer over delta at fixed sigma. Stationary points are the
    /// real roots of a cubic; the section need not be unimodal (a tight
    /// prior against a strong effect gives three stationary points), so
    /// every root is scored and the best kept.
    fn delta_given_sigma(&self, sigma: f64) -> f64 {
        let e = self.d / sigma;
        let m = self.prior.location;
        let k = self.prior.df;
        let g = k * self.prior.scale * self.prior.scale;
        let nd = self.n_delta;
        let (roots, count) = cubic_real_roots(
            nd,
            -nd * (2.0 * m + e),
            nd * (m * m + g + 2.0 * m * e) + k + 1.0,
            -(nd * e * (m * m + g) + (k + 1.0) * m),
        );
        let section = |delta: f64| {
            let gap = delta - e;
            let z = delta - m;
            nd * gap * gap / 2.0 + (k + 1.0) / 2.0 * (z * z / g).ln_1p()
        };
        roots[..count]
            .iter()
            .copied()
            .min_by(|a, b| section(*a).partial_cmp(&section(*b)).unwrap())
            .unwrap()
    }

    fn alternate(&self, mut sigma: f64, mut delta: f64) -> (f64, f64) {
        for _ in 0..300 {
            let delta_next = self.delta_given_sigma(sigma);
            let sigma_next = self.sigma_given_delta(delta_next);
            let moved = (delta_next - delta).abs() / (1.0 + delta.abs())
                + (sigma_next - sigma).abs() / sigma;
            delta = delta_next;
            sigma = sigma_next;
            if moved < 1e-14 {
                break;
            }
        }
        (sigma, delta)
    }
}

/// Fast coordinate-descent fit of the alternative. Each coordinate update
/// is exact, and the search runs from two starts (the ML point and a
/// null-like point at the prior's center) because a tight effect-size prior
/// can split the surface into two local minima.
pub(crate) fn fit_alt_profiled(
    stats: &TTestSufficientStats,
    prior: &EffectSizePrior,
    range: &PriorRange,
) -> (AltParams, Codelength) {
    let prof = ProfiledAlt::new(stats, prior, range);
    let ml = ml_alt_estimates(stats);
    let null_sigma = (stats.ss_total() / stats.nf()).sqrt();
    let starts = [(ml.sigma, ml.delta), (null_sigma, prior.location)];
    let (mut best_sigma, mut best_delta, mut best_code) = (f64::NAN, f64::NAN, f64::INFINITY);
    for (s0, d0) in starts {
        let (sigma, delta) = prof.alternate(s0, d0);
        let code = prof.codelength(sigma, delta);
        if code < best_code {
            (best_sigma, best_delta, best_code) = (sigma, delta, code);
        }
    }
    let params = AltParams {
        mu: prof.mu_hat(best_sigma, best_delta),
        sigma: best_sigma,
        delta: best_delta,
    };
    let code = alt_codelength(stats, &params, prior, range)
        .expect("positive sigma from the quadratic update");
    (params, code)
}

/// Minimize the alternative's codelength over (mu, sigma, delta).
///
/// The profiled coordinate descent supplies the solution; a simplex pass
/// over (mu, ln sigma, delta) then polishes it, and a finite-difference
/// gradient check certifies stationarity. A gradient norm above 1e-6
/// reports `NonConvergence` carrying the best point found.
pub fn fit_alt(
    stats: &TTestSufficientStats,
    prior: &EffectSizePrior,
    range: &PriorRange,
) -> Result<(AltParams, Codelength)> {
    let (warm, warm_code) = fit_alt_profiled(stats, prior, range);
    let objective = |x: &[f64]| {
        let params = AltParams { mu: x[0], sigma: x[1].exp(), delta: x[2] };
        alt_codelength(stats, &params, prior, range)
            .map(|c| c.nats)
            .unwrap_or(f64::INFINITY)
    };
    let x0 = [warm.mu, warm.sigma.ln(), warm.delta];
    let fit = nelder_mead(objective, &x0, &[0.02, 0.02, 0.02], 1e-13, 1e-10, 4000);
    // The coordinate-descent point is stationary by construction; accept the
    // simplex point only when it wins by more than evaluation noise, so a
    // sub-noise wander cannot displace an exact optimum.
    let x = if fit.value < warm_code.nats - 1e-10 { fit.x.clone() } else { x0.to_vec() };
    let grad = fd_gradient(objective, &x);
    let gradient_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    let params = AltParams { mu: x[0], sigma: x[1].exp(), delta: x[2] };
    if gradient_norm > 1e-6 {
        return Err(Error::NonConvergence {
            context: "two-group codelength minimization".into(),
            best: vec![params.mu, params.sigma, params.delta],
            gradient_norm,
        });
    }
    let code = alt_codelength(stats, &params, prior, range)?;
    Ok((params, code))
}

/// Bayes factor in favor of an effect: the prior-mixed noncentral-t density
/// of the observed t divided by its central density.
///
/// The mixture is integrated by mapping delta through the prior's own
/// location-scale tangent substitution, which turns the Student weight into
/// a bounded smooth factor. Node counts double from 201 until two
/// consecutive rules agree to a relative 1e-8 (a wide prior squeezes the
/// likelihood into a narrow patch of the chart and needs the refinement);
/// disagreement at the cap is an error, never a silent answer.
pub fn bayes_factor(stats: &TTestSufficientStats, prior: &EffectSizePrior) -> Result<f64> {
    let with_nodes = |m: usize| -> f64 {
        let (nodes, weights) = &*gauss_legendre(m);
        let sqrt_nd = stats.n_delta.sqrt();
        let numerator: f64 = nodes
            .iter()
            .zip(weights)
            .map(|(x, w)| {
                let u = x * std::f64::consts::FRAC_PI_2;
                let z = u.tan();
                let delta = prior.location + prior.scale * z;
                let log_weight = prior.log_density_standard(z) - 2.0 * u.cos().ln();
                w * std::f64::consts::FRAC_PI_2
                    * log_weight.exp()
                    * noncentral_t_pdf(stats.t, stats.nu, sqrt_nd * delta)
            })
            .sum();
        numerator / log_central_t_pdf(stats.t, stats.nu).exp()
    };
    let mut m = 201;
    let mut coarse = with_nodes(m);
    for _ in 0..8 {
        m *= 2;
        let fine = with_nodes(m);
        let disagreement = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
        if disagreement <= 1e-8 {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(Error::Quadrature(format!(
        "Bayes factor rules still disagree at {m} nodes"
    )))
}
