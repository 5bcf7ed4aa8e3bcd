//! Minimum message length (MML) inference.
//!
//! The library computes two-part codelengths for several model classes and
//! uses them for estimation and hypothesis testing:
//!
//! - [`smml`]: exact Strict MML partitions of the binomial data space,
//!   found by dynamic programming.
//! - [`mml87`]: the MML87 codelength approximation for the binomial model.
//! - [`nml`]: normalized maximum likelihood codelengths for binomial and
//!   multinomial models, for comparison with the MML codes.
//! - [`ttest`]: an MML87 two-sample t-test plus a Bayes-factor competitor.
//! - [`corr`]: MML87 testing and estimation for the bivariate-normal
//!   correlation coefficient.
//! - [`sim`]: deterministic Monte Carlo experiments measuring estimator
//!   risk and error rates of the tests above.
//!
//! All codelengths are carried in nats internally; convert to bits only for
//! display via [`Codelength::bits`].

pub mod codelength;
pub mod corr;
pub mod error;
pub mod hypothesis;
pub mod mml87;
pub mod nml;
pub mod numeric;
pub mod sim;
pub mod smml;
pub mod student;
pub mod ttest;

pub use codelength::{Codelength, Mml87Inputs, PriorRange};
pub use error::{Error, Result};
pub use hypothesis::{decide, Hypothesis, HypothesisResult};
