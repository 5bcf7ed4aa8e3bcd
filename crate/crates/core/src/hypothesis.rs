//! Model selection between a null and an alternative codelength.

use crate::codelength::Codelength;

/// A codelength difference of about 2.3 nats corresponds to posterior odds
/// of 10:1, the conventional bar for "substantial" support.
pub const SUBSTANTIAL_NATS: f64 = 2.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Null,
    Alternative,
}

/// Outcome of a codelength-based test.
#[derive(Clone, Debug)]
pub struct HypothesisResult {
    pub null_codelength: Codelength,
    pub alt_codelength: Codelength,
    /// null - alternative, in nats; positive favours the alternative.
    pub diff_nats: f64,
    pub selected: Hypothesis,
    /// BF_10 where a Bayes-factor competitor was evaluated.
    pub bayes_factor: Option<f64>,
}

impl HypothesisResult {
    pub fn new(
        i0: Codelength,
        i1: Codelength,
        threshold_nats: f64,
        bayes_factor: Option<f64>,
    ) -> Self {
        HypothesisResult {
            null_codelength: i0,
            alt_codelength: i1,
            diff_nats: i0.nats - i1.nats,
            selected: decide(i0, i1, threshold_nats),
            bayes_factor,
        }
    }
}

/// Prefer the model with the shorter codelength, demanding the alternative
/// beat the null by at least `threshold_nats` before switching away from it.
pub fn decide(i0: Codelength, i1: Codelength, threshold_nats: f64) -> Hypothesis {
    if i1.nats + threshold_nats < i0.nats {
        Hypothesis::Alternative
    } else {
        Hypothesis::Null
    }
}
