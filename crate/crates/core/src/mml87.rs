//! MML87 codelengths for a binomial observation under a uniform prior.
//!
//! Where the exact partition approach quantizes the data space, the MML87
//! approximation quantizes parameter space locally: each estimate owns an
//! uncertainty region whose volume is set by the Fisher information, and the
//! message length follows from the prior mass of that region plus the data
//! detail. For the binomial the pieces are closed-form.

use crate::codelength::Codelength;
use crate::error::{Error, Result};
use crate::numeric::log_binomial;
use crate::smml::marginal;

fn check_observation(n: u32, y: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    if y > n {
        return Err(Error::Domain(format!("y = {y} exceeds n = {n}")));
    }
    Ok(())
}

/// The MML87 estimate (y + 1/2)/(n + 1): the success frequency shrunk
/// toward 1/2, never reaching 0 or 1.
pub fn mml87_binomial_estimate(n: u32, y: u32) -> Result<f64> {
    check_observation(n, y)?;
    Ok((f64::from(y) + 0.5) / (f64::from(n) + 1.0))
}

/// Message length of (estimate, data) at an arbitrary θ ∈ (0, 1), in nats:
///
///   -(y + 1/2) ln θ - (n - y + 1/2) ln(1 - θ)
///     + (1 + ln(n / (12 C(n,y)^2))) / 2.
///
/// Exposed at the module level so tests can probe stationarity in θ.
pub(crate) fn codelength_at(n: u32, y: u32, theta: f64) -> f64 {
    let nf = f64::from(n);
    let yf = f64::from(y);
    -(yf + 0.5) * theta.ln() - (nf - yf + 0.5) * (1.0 - theta).ln()
        + 0.5 * (1.0 + (nf / 12.0).ln())
        - log_binomial(u64::from(n), u64::from(y))
}

/// MML87 codelength of the observation, evaluated at the MML87 estimate.
/// Finite for every y including 0 and n, since the estimate never touches
/// the boundary.
pub fn mml87_binomial_codelength(n: u32, y: u32) -> Result<Codelength> {
    let theta = mml87_binomial_estimate(n, y)?;
    Ok(Codelength::from_nats(codelength_at(n, y, theta)))
}

/// Expected MML87 codelength over the data space, weighting each y by its
/// marginal 1/(n+1). Directly comparable to the exact partition optimum.
pub fn expected_mml87_codelength(n: u32) -> Result<Codelength> {
    if n == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let r = marginal(n);
    let mut nats = 0.0;
    for y in 0..=n {
        nats += r * mml87_binomial_codelength(n, y)?.nats;
    }
    Ok(Codelength::from_nats(nats))
}
