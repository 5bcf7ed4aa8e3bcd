//! Normalized maximum likelihood for binomial and multinomial data.
//!
//! The NML distribution divides each maximized likelihood by the sum of
//! maximized likelihoods over the whole data space, so a codelength splits
//! into a fit term and a log-complexity term that depends only on the model
//! class and sample size.

use crate::codelength::Codelength;
use crate::error::{Error, Result};
use crate::numeric::{log_add_exp, log_binomial, log_sum_exp, xlogy};

/// Two-part NML codelength: fit plus parametric complexity, in nats.
#[derive(Clone, Copy, Debug)]
pub struct NmlResult {
    pub fit_nats: f64,
    pub log_complexity_nats: f64,
    pub total: Codelength,
}

fn log_binomial_complexity(n: u32) -> f64 {
    let nf = f64::from(n);
    let terms: Vec<f64> = (0..=n)
        .map(|x| {
            let xf = f64::from(x);
            log_binomial(u64::from(n), u64::from(x))
                + xlogy(xf, xf / nf)
                + xlogy(nf - xf, (nf - xf) / nf)
        })
        .collect();
    log_sum_exp(&terms)
}

/// The binomial complexity Σ_x C(n,x) (x/n)^x ((n-x)/n)^(n-x), computed in
/// log space. Grows like √n, so the value itself is always representable.
pub fn binomial_complexity(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    Ok(log_binomial_complexity(n).exp())
}

/// Complexity of the k-category multinomial with n trials, via the
/// recurrence C_k = C_{k-1} + (n/(k-2))·C_{k-2} grounded at C_1 = 1 and
/// C_2 = the binomial complexity. Runs in log space.
pub fn multinomial_complexity(n: u32, k: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    if k == 0 {
        return Err(Error::Domain("need at least one category".into()));
    }
    let mut prev = 0.0; // log C_1
    if k == 1 {
        return Ok(1.0);
    }
    let mut cur = log_binomial_complexity(n); // log C_2
    for j in 3..=k {
        let next = log_add_exp(cur, (f64::from(n) / f64::from(j - 2)).ln() + prev);
        prev = cur;
        cur = next;
    }
    Ok(cur.exp())
}

/// NML codelength of y successes in n trials.
pub fn nml_binomial_codelength(n: u32, y: u32) -> Result<NmlResult> {
    if n == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    if y > n {
        return Err(Error::Domain(format!("y = {y} exceeds n = {n}")));
    }
    let nf = f64::from(n);
    let yf = f64::from(y);
    let fit_nats = -(log_binomial(u64::from(n), u64::from(y))
        + xlogy(yf, yf / nf)
        + xlogy(nf - yf, (nf - yf) / nf));
    let log_complexity_nats = log_binomial_complexity(n);
    Ok(NmlResult {
        fit_nats,
        log_complexity_nats,
        total: Codelength::from_nats(fit_nats + log_complexity_nats),
    })
}

/// Large-n approximation to the binomial log-complexity:
/// (1/2) ln(n/2π) + ln π nats. Overshoots from below; the exact value
/// approaches it as n grows.
pub fn nml_asymptotic_binomial(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let nf = f64::from(n);
    Ok(0.5 * (nf / (2.0 * std::f64::consts::PI)).ln() + std::f64::consts::PI.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    #[test]
    fn single_trial_complexity_is_two() {
        assert_abs_diff_eq!(binomial_complexity(1).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn ten_trial_complexity() {
        let log2_c = binomial_complexity(10).unwrap().log2();
        assert_abs_diff_eq!(log2_c, 2.2204, epsilon = 0.0005);
    }

    #[test]
    fn worked_example_ten_trials_three_successes() {
        let r = nml_binomial_codelength(10, 3).unwrap();
        assert_abs_diff_eq!(r.fit_nats / LN_2, 1.9060, epsilon = 0.0005);
        assert_abs_diff_eq!(r.total.bits(), 4.1264, epsilon = 0.0005);
        assert_abs_diff_eq!(
            r.fit_nats + r.log_complexity_nats,
            r.total.nats,
            epsilon = 1e-15
        );
    }

    #[test]
    fn three_category_complexity_matches_direct_enumeration() {
        // k=3, n=2: six count vectors, complexity 9/2 exactly.
        let mut direct = 0.0;
        let n = 2.0;
        for a in 0..=2u32 {
            for b in 0..=(2 - a) {
                let c = 2 - a - b;
                let coeff = 2.0
                    / ((1..=a).map(f64::from).product::<f64>()
                        * (1..=b).map(f64::from).product::<f64>()
                        * (1..=c).map(f64::from).product::<f64>());
                let log_p = xlogy(f64::from(a), f64::from(a) / n)
                    + xlogy(f64::from(b), f64::from(b) / n)
                    + xlogy(f64::from(c), f64::from(c) / n);
                direct += coeff * log_p.exp();
            }
        }
        assert_abs_diff_eq!(direct, 4.5, epsilon = 1e-14);
        assert_abs_diff_eq!(multinomial_complexity(2, 3).unwrap(), 4.5, epsilon = 1e-12);
    }

    #[test]
    fn two_category_case_reduces_to_binomial() {
        for n in [1u32, 7, 33, 150] {
            assert_abs_diff_eq!(
                multinomial_complexity(n, 2).unwrap(),
                binomial_complexity(n).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn complexity_increases_in_categories_and_trials() {
        for n in [2u32, 10, 40] {
            let mut prev = multinomial_complexity(n, 1).unwrap();
            for k in 2..=8 {
                let c = multinomial_complexity(n, k).unwrap();
                assert!(c > prev, "n={n}: C_{k} not above C_{}", k - 1);
                prev = c;
            }
        }
        for k in [2u32, 3, 5] {
            let mut prev = multinomial_complexity(1, k).unwrap();
            for n in 2..=60 {
                let c = multinomial_complexity(n, k).unwrap();
                assert!(c > prev, "k={k}: complexity not increasing at n={n}");
                prev = c;
            }
        }
    }

    #[test]
    fn asymptotic_approaches_exact_from_below() {
        let mut prev_gap = f64::INFINITY;
        for n in [10u32, 100, 1000] {
            let exact_bits = binomial_complexity(n).unwrap().log2();
            let approx_bits = nml_asymptotic_binomial(n).unwrap() / LN_2;
            let gap = exact_bits - approx_bits;
            assert!(gap > 0.0, "asymptotic overshot at n={n}");
            assert!(gap < prev_gap, "gap widened at n={n}");
            prev_gap = gap;
        }
        let gap10 = binomial_complexity(10).unwrap().log2()
            - nml_asymptotic_binomial(10).unwrap() / LN_2;
        assert_abs_diff_eq!(gap10, 0.2337, epsilon = 0.0005);
        assert_abs_diff_eq!(
            nml_asymptotic_binomial(10).unwrap() / LN_2,
            1.9867,
            epsilon = 0.0005
        );
    }

    #[test]
    fn codelengths_normalize_over_the_data_space() {
        for n in (1u32..=60).chain([100, 150, 200]) {
            let mass: f64 = (0..=n)
                .map(|y| (-nml_binomial_codelength(n, y).unwrap().total.nats).exp())
                .sum();
            assert_abs_diff_eq!(mass, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(binomial_complexity(0).is_err());
        assert!(multinomial_complexity(0, 3).is_err());
        assert!(multinomial_complexity(5, 0).is_err());
        assert!(nml_binomial_codelength(10, 11).is_err());
        assert!(nml_asymptotic_binomial(0).is_err());
    }
}
