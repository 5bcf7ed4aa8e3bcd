//! Monte Carlo risk experiments for the effect-size and correlation tests.
//!
//! Four experiments: normalized squared error of the two effect-size
//! estimates, squared-error risk of three correlation estimates, null
//! rejection rates of the two-sample test across prior scales, and rejection
//! rates plus fitted-model divergence for the correlation test over a grid
//! of null and generating correlations.
//!
//! Every replicate runs on its own counter-indexed random stream and the
//! aggregation is pairwise, so the tables are byte-identical for a given
//! configuration no matter the execution order or thread count.

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::codelength::PriorRange;
use crate::corr::{
    corr_alt_codelength, corr_ml_null_estimates, corr_mml_alt_estimates, corr_null_codelength,
    corr_stats, kl_bivariate_normal, olkin_pratt, BivNormalParams, BivariateSample,
};
use crate::error::{Error, Result};
use crate::hypothesis::{decide, Hypothesis, SUBSTANTIAL_NATS};
use crate::numeric::pairwise_sum;
use crate::ttest::{
    bayes_factor, fit_alt_profiled, ml_alt_estimates, null_codelength, ttest_stats,
    EffectSizePrior, TwoSampleData,
};

/// Null correlations swept by the rejection-rate experiment, chosen to sit
/// below, at, and well above zero.
pub const TABLE_NULLS: [f64; 3] = [-0.30, 0.00, 0.70];

/// Decision threshold calibrated so the correlation test holds its null
/// rejection rate near 0.05 at n = 15: ln(1.65) nats of codelength advantage.
pub fn calibrated_table_threshold() -> f64 {
    1.65_f64.ln()
}

/// What one experiment runs: a seed, a replicate budget, the parameter grid
/// (true effects, true correlations, or prior scales, depending on the
/// experiment), the per-group or per-sample sizes, the rejection threshold
/// in nats, and the effect-size prior.
#[derive(Clone, Debug)]
pub struct SimConfig {
    pub seed: u64,
    pub replicates: usize,
    pub grid: Vec<f64>,
    pub n_values: Vec<usize>,
    pub threshold_nats: f64,
    pub prior: EffectSizePrior,
}

impl SimConfig {
    fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Domain("need at least one replicate".into()));
        }
        if self.replicates > u32::MAX as usize {
            return Err(Error::Domain(
                "replicate streams are indexed by a 32-bit counter".into(),
            ));
        }
        if self.grid.is_empty() {
            return Err(Error::Domain("parameter grid is empty".into()));
        }
        if self.n_values.is_empty() {
            return Err(Error::Domain("no sample sizes given".into()));
        }
        if self.threshold_nats.is_nan() {
            return Err(Error::Domain("threshold must not be NaN".into()));
        }
        Ok(())
    }
}

/// One aggregated metric: `name` labels the estimator or decision rule,
/// `n` and `parameter` locate the cell, `value` is the Monte Carlo mean and
/// `stderr` its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct RiskRow {
    pub name: String,
    pub n: usize,
    pub parameter: f64,
    pub value: f64,
    pub stderr: f64,
}

/// An experiment's rows, tagged with enough to rerun it exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct RiskTable {
    pub rows: Vec<RiskRow>,
    pub replicates: usize,
    pub seed: u64,
    /// Degenerate replicate datasets redrawn along the way.
    pub redrawn: usize,
}

impl RiskTable {
    /// Renders `name,n,parameter,value,stderr,replicates,seed` lines.
    /// Shortest-round-trip float formatting keeps reruns byte-identical.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,n,parameter,value,stderr,replicates,seed\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.name, row.n, row.parameter, row.value, row.stderr, self.replicates, self.seed
            ));
        }
        out
    }

    fn new(cfg: &SimConfig) -> Self {
        RiskTable { rows: Vec::new(), replicates: cfg.replicates, seed: cfg.seed, redrawn: 0 }
    }
}

/// Redraw budget for one replicate before its cell gives up.
const MAX_REDRAWS: usize = 100;

/// Runs `replicate` once per replicate index, each on a dedicated stream of
/// the cell's generator so outputs land in replicate order regardless of
/// scheduling. A degenerate dataset is redrawn from the same stream and
/// counted; any other error aborts the cell.
fn run_cell<T: Send>(
    cfg: &SimConfig,
    cell: u64,
    replicate: impl Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
) -> Result<(Vec<T>, usize)> {
    let redrawn = AtomicUsize::new(0);
    let values = (0..cfg.replicates)
        .into_par_iter()
        .with_min_len(64)
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(cell << 32 | rep as u64);
            for _ in 0..=MAX_REDRAWS {
                match replicate(&mut rng) {
                    Err(Error::DegenerateData(_)) => {
                        redrawn.fetch_add(1, Ordering::Relaxed);
                    }
                    other => return other,
                }
            }
            Err(Error::DegenerateData(format!(
                "cell {cell}, replicate {rep}: still degenerate after {MAX_REDRAWS} redraws"
            )))
        })
        .collect::<Result<Vec<T>>>()?;
    Ok((values, redrawn.load(Ordering::Relaxed)))
}

/// Monte Carlo mean and standard error of the mean, both order-independent.
fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    (mean, (pairwise_sum(&dev) / (n * (n - 1.0))).sqrt())
}

/// Binomial standard error with a one-count smooth, so boundary frequencies
/// keep a positive uncertainty.
fn frequency_and_se(hits: usize, replicates: usize) -> (f64, f64) {
    let r = replicates as f64;
    let smoothed = (hits as f64 + 1.0) / (r + 2.0);
    (hits as f64 / r, (smoothed * (1.0 - smoothed) / r).sqrt())
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Two groups of size n at means ±δ/2 and unit scale.
fn draw_groups(rng: &mut ChaCha8Rng, n: usize, delta: f64) -> TwoSampleData {
    let mut shifted =
        |offset: f64| (0..n).map(|_| offset + standard_normal(rng)).collect::<Vec<f64>>();
    TwoSampleData { y1: shifted(0.5 * delta), y2: shifted(-0.5 * delta) }
}

/// n pairs from the unit-variance bivariate normal with correlation ρ, via
/// the Cholesky factor of its covariance.
fn draw_pairs(rng: &mut ChaCha8Rng, n: usize, rho: f64) -> BivariateSample {
    let root = (1.0 - rho * rho).sqrt();
    let pairs = (0..n)
        .map(|_| {
            let z1 = standard_normal(rng);
            let z2 = standard_normal(rng);
            (z1, rho * z1 + root * z2)
        })
        .collect();
    BivariateSample { pairs }
}

/// Codelength differences and the fitted estimates are invariant to the
/// prior's parameter range, so the harness pins a conventional one.
fn harness_range() -> PriorRange {
    PriorRange::from_log_omega(100.0_f64.ln())
}

/// Risk of the two effect-size estimates over a grid of true effects.
///
/// Each replicate draws two groups of size n at means ±δ/2 and unit scale,
/// fits the maximum-likelihood and minimum-codelength alternatives, and
/// records the normalized squared error (δ − δ̂)²/δ and the signed error
/// δ̂ − δ of each, as rows `nmse-{ml,mml87}` and `bias-{ml,mml87}`.
pub fn simulate_delta_nmse(cfg: &SimConfig) -> Result<RiskTable> {
    cfg.validate()?;
    for &delta in &cfg.grid {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::Domain(format!(
                "true effect must be positive and finite, got {delta}"
            )));
        }
    }
    for &n in &cfg.n_values {
        if n < 2 {
            return Err(Error::Domain(format!(
                "need at least two observations per group, got {n}"
            )));
        }
    }
    let range = harness_range();
    let mut table = RiskTable::new(cfg);
    let mut cell = 0u64;
    for &n in &cfg.n_values {
        for &delta in &cfg.grid {
            let (fits, redrawn) = run_cell(cfg, cell, |rng| {
                let stats = ttest_stats(&draw_groups(rng, n, delta))?;
                let ml = ml_alt_estimates(&stats);
                let (mml, _) = fit_alt_profiled(&stats, &cfg.prior, &range);
                Ok((ml.delta, mml.delta))
            })?;
            table.redrawn += redrawn;
            cell += 1;
            let errors: [(&str, Vec<f64>); 2] = [
                ("ml", fits.iter().map(|&(ml, _)| ml - delta).collect()),
                ("mml87", fits.iter().map(|&(_, mml)| mml - delta).collect()),
            ];
            for (label, errs) in errors {
                let sq: Vec<f64> = errs.iter().map(|e| e * e / delta).collect();
                let (value, stderr) = mean_and_se(&sq);
                table.rows.push(RiskRow {
                    name: format!("nmse-{label}"),
                    n,
                    parameter: delta,
                    value,
                    stderr,
                });
                let (value, stderr) = mean_and_se(&errs);
                table.rows.push(RiskRow {
                    name: format!("bias-{label}"),
                    n,
                    parameter: delta,
                    value,
                    stderr,
                });
            }
        }
    }
    Ok(table)
}

/// Squared-error risk of three correlation estimates over a ρ grid: the
/// minimum-codelength estimate, the sample correlation, and the unbiased
/// hypergeometric adjustment, as rows `mse-{mml,ml,olkin-pratt}`.
pub fn simulate_rho_mse(cfg: &SimConfig) -> Result<RiskTable> {
    cfg.validate()?;
    for &rho in &cfg.grid {
        if !rho.is_finite() || rho.abs() >= 1.0 {
            return Err(Error::Domain(format!(
                "true correlation must lie inside (-1, 1), got {rho}"
            )));
        }
    }
    for &n in &cfg.n_values {
        if n < 5 {
            return Err(Error::Domain(format!(
                "the unbiased estimate needs at least five pairs, got {n}"
            )));
        }
    }
    let mut table = RiskTable::new(cfg);
    let mut cell = 0u64;
    for &n in &cfg.n_values {
        for &rho in &cfg.grid {
            let (estimates, redrawn) = run_cell(cfg, cell, |rng| {
                let stats = corr_stats(&draw_pairs(rng, n, rho))?;
                let mml = corr_mml_alt_estimates(&stats).rho;
                let unbiased = olkin_pratt(stats.r, n)?;
                Ok((mml, stats.r, unbiased))
            })?;
            table.redrawn += redrawn;
            cell += 1;
            let columns: [(&str, fn(&(f64, f64, f64)) -> f64); 3] =
                [("mml", |e| e.0), ("ml", |e| e.1), ("olkin-pratt", |e| e.2)];
            for (label, pick) in columns {
                let sq: Vec<f64> =
                    estimates.iter().map(|e| (pick(e) - rho) * (pick(e) - rho)).collect();
                let (value, stderr) = mean_and_se(&sq);
                table.rows.push(RiskRow {
                    name: format!("mse-{label}"),
                    n,
                    parameter: rho,
                    value,
                    stderr,
                });
            }
        }
    }
    Ok(table)
}

/// Null rejection rates of the two-sample test across prior scales.
///
/// Grid entries are prior scales. Each replicate draws both groups from the
/// same unit normal and applies three rules: the codelength criterion at the
/// configured threshold (`reject-mml`) and the Bayes-factor cutoffs 1 and
/// 1.87 (`reject-bf-1`, `reject-bf-1.87`).
pub fn simulate_type1(cfg: &SimConfig) -> Result<RiskTable> {
    cfg.validate()?;
    for &scale in &cfg.grid {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::Domain(format!(
                "prior scale must be positive and finite, got {scale}"
            )));
        }
    }
    for &n in &cfg.n_values {
        if n < 2 {
            return Err(Error::Domain(format!(
                "need at least two observations per group, got {n}"
            )));
        }
    }
    let range = harness_range();
    let mut table = RiskTable::new(cfg);
    let mut cell = 0u64;
    for &n in &cfg.n_values {
        for &scale in &cfg.grid {
            let prior = EffectSizePrior::new(cfg.prior.df, cfg.prior.location, scale)?;
            let (decisions, redrawn) = run_cell(cfg, cell, |rng| {
                let stats = ttest_stats(&draw_groups(rng, n, 0.0))?;
                let i0 = null_codelength(&stats, &range)?;
                let (_, i1) = fit_alt_profiled(&stats, &prior, &range);
                let bf = bayes_factor(&stats, &prior)?;
                Ok((
                    decide(i0, i1, cfg.threshold_nats) == Hypothesis::Alternative,
                    bf > 1.0,
                    bf > 1.87,
                ))
            })?;
            table.redrawn += redrawn;
            cell += 1;
            let rules: [(&str, fn(&(bool, bool, bool)) -> bool); 3] = [
                ("reject-mml", |d| d.0),
                ("reject-bf-1", |d| d.1),
                ("reject-bf-1.87", |d| d.2),
            ];
            for (name, rule) in rules {
                let hits = decisions.iter().filter(|d| rule(d)).count();
                let (value, stderr) = frequency_and_se(hits, cfg.replicates);
                table.rows.push(RiskRow {
                    name: name.into(),
                    n,
                    parameter: scale,
                    value,
                    stderr,
                });
            }
        }
    }
    Ok(table)
}

/// Rejection rate and fitted-model divergence for the correlation test.
///
/// Cells combine each null in [`TABLE_NULLS`] with every grid correlation
/// and sample size, walked in that order. Each replicate draws n
/// unit-variance pairs at ρ, tests ρ0 at the configured threshold (rows
/// `reject`, plus `reject-at-0` and `reject-at-2.3` variants), keeps the
/// fitted alternative on rejection and the fitted null otherwise, and
/// records each kept fit's divergence from the generating model (`kl-ml`,
/// `kl-mml`). Both fit families share the rejection event, so those two
/// rows differ only in the estimates.
pub fn simulate_corr_table(cfg: &SimConfig) -> Result<RiskTable> {
    cfg.validate()?;
    for &rho in &cfg.grid {
        if !rho.is_finite() || rho.abs() >= 1.0 {
            return Err(Error::Domain(format!(
                "true correlation must lie inside (-1, 1), got {rho}"
            )));
        }
    }
    for &n in &cfg.n_values {
        if n < 3 {
            return Err(Error::Domain(format!("need at least three pairs, got {n}")));
        }
    }
    let range = harness_range();
    let mut table = RiskTable::new(cfg);
    let mut cell = 0u64;
    for &rho0 in &TABLE_NULLS {
        for &n in &cfg.n_values {
            for &rho in &cfg.grid {
                let truth = BivNormalParams {
                    mu1: 0.0,
                    mu2: 0.0,
                    sigma1: 1.0,
                    sigma2: 1.0,
                    rho,
                };
                let (outcomes, redrawn) = run_cell(cfg, cell, |rng| {
                    let stats = corr_stats(&draw_pairs(rng, n, rho))?;
                    // A collinear draw has no usable alternative fit.
                    if stats.r.abs() >= 1.0 - 1e-12 {
                        return Err(Error::DegenerateData("collinear sample".into()));
                    }
                    let (i0, null_fit) = corr_null_codelength(&stats, rho0, &range)?;
                    let alt_fit = corr_mml_alt_estimates(&stats);
                    let i1 = corr_alt_codelength(&stats, &alt_fit, &range)?;
                    let reject = decide(i0, i1, cfg.threshold_nats) == Hypothesis::Alternative;
                    let (ml_fit, mml_fit) = if reject {
                        let ml_alt = BivNormalParams {
                            mu1: stats.mean1,
                            mu2: stats.mean2,
                            sigma1: stats.s1_sq.sqrt(),
                            sigma2: stats.s2_sq.sqrt(),
                            rho: stats.r,
                        };
                        (ml_alt, alt_fit)
                    } else {
                        (corr_ml_null_estimates(&stats, rho0)?, null_fit)
                    };
                    Ok((
                        reject,
                        decide(i0, i1, 0.0) == Hypothesis::Alternative,
                        decide(i0, i1, SUBSTANTIAL_NATS) == Hypothesis::Alternative,
                        kl_bivariate_normal(&truth, &ml_fit)?,
                        kl_bivariate_normal(&truth, &mml_fit)?,
                    ))
                })?;
                table.redrawn += redrawn;
                cell += 1;
                let prefix = format!("rho0={rho0:.2}");
                let rules: [(&str, fn(&(bool, bool, bool, f64, f64)) -> bool); 3] = [
                    ("reject", |o| o.0),
                    ("reject-at-0", |o| o.1),
                    ("reject-at-2.3", |o| o.2),
                ];
                for (name, rule) in rules {
                    let hits = outcomes.iter().filter(|o| rule(o)).count();
                    let (value, stderr) = frequency_and_se(hits, cfg.replicates);
                    table.rows.push(RiskRow {
                        name: format!("{prefix}/{name}"),
                        n,
                        parameter: rho,
                        value,
                        stderr,
                    });
                }
                let divergences: [(&str, fn(&(bool, bool, bool, f64, f64)) -> f64); 2] =
                    [("kl-ml", |o| o.3), ("kl-mml", |o| o.4)];
                for (name, pick) in divergences {
                    let kls: Vec<f64> = outcomes.iter().map(pick).collect();
                    let (value, stderr) = mean_and_se(&kls);
                    table.rows.push(RiskRow {
                        name: format!("{prefix}/{name}"),
                        n,
                        parameter: rho,
                        value,
                        stderr,
                    });
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    use super::*;

    fn base(seed: u64, replicates: usize, grid: Vec<f64>, n_values: Vec<usize>) -> SimConfig {
        SimConfig {
            seed,
            replicates,
            grid,
            n_values,
            threshold_nats: 0.0,
            prior: EffectSizePrior::default(),
        }
    }

    fn row<'t>(table: &'t RiskTable, name: &str, n: usize, parameter: f64) -> &'t RiskRow {
        table
            .rows
            .iter()
            .find(|r| r.name == name && r.n == n && r.parameter == parameter)
            .unwrap_or_else(|| panic!("missing row {name} at n={n}, parameter={parameter}"))
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let ok = base(1, 10, vec![1.0], vec![5]);
        assert!(simulate_delta_nmse(&ok).is_ok());

        let mut bad = ok.clone();
        bad.replicates = 0;
        assert!(matches!(simulate_delta_nmse(&bad), Err(Error::Domain(_))));

        let mut bad = ok.clone();
        bad.grid.clear();
        assert!(matches!(simulate_delta_nmse(&bad), Err(Error::Domain(_))));

        let mut bad = ok.clone();
        bad.n_values.clear();
        assert!(matches!(simulate_delta_nmse(&bad), Err(Error::Domain(_))));

        let mut bad = ok.clone();
        bad.threshold_nats = f64::NAN;
        assert!(matches!(simulate_delta_nmse(&bad), Err(Error::Domain(_))));

        // Experiment-specific grids and sample-size floors.
        let zero_effect = base(1, 10, vec![0.0], vec![5]);
        assert!(matches!(simulate_delta_nmse(&zero_effect), Err(Error::Domain(_))));
        let unit_rho = base(1, 10, vec![1.0], vec![20]);
        assert!(matches!(simulate_rho_mse(&unit_rho), Err(Error::Domain(_))));
        let four_pairs = base(1, 10, vec![0.3], vec![4]);
        assert!(matches!(simulate_rho_mse(&four_pairs), Err(Error::Domain(_))));
        let zero_scale = base(1, 10, vec![0.0], vec![20]);
        assert!(matches!(simulate_type1(&zero_scale), Err(Error::Domain(_))));
        let two_pairs = base(1, 10, vec![0.3], vec![2]);
        assert!(matches!(simulate_corr_table(&two_pairs), Err(Error::Domain(_))));
    }

    #[test]
    fn replicate_streams_ignore_execution_count() {
        let five = base(77, 5, vec![1.0], vec![5]);
        let three = base(77, 3, vec![1.0], vec![5]);
        let (long, redrawn) = run_cell(&five, 2, |rng| Ok(rng.random::<f64>())).unwrap();
        let (short, _) = run_cell(&three, 2, |rng| Ok(rng.random::<f64>())).unwrap();
        assert_eq!(redrawn, 0);
        assert_eq!(&long[..3], &short[..]);
    }

    #[test]
    fn degenerate_draws_are_redrawn_and_counted() {
        let cfg = base(5, 64, vec![1.0], vec![5]);
        let flaky = |rng: &mut ChaCha8Rng| {
            let u = rng.random::<f64>();
            if u < 0.4 {
                Err(Error::DegenerateData("forced".into()))
            } else {
                Ok(u)
            }
        };
        let (values, redrawn) = run_cell(&cfg, 0, flaky).unwrap();
        assert!(values.iter().all(|&u| u >= 0.4));
        assert!(redrawn > 0);
        let (again, redrawn_again) = run_cell(&cfg, 0, flaky).unwrap();
        assert_eq!(values, again);
        assert_eq!(redrawn, redrawn_again);
    }

    #[test]
    fn csv_is_byte_identical_across_runs() {
        let cfg = base(9, 25, vec![1.0, 2.0], vec![5]);
        let a = simulate_delta_nmse(&cfg).unwrap();
        let b = simulate_delta_nmse(&cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());

        let mut corr = base(11, 10, vec![0.3], vec![15]);
        corr.threshold_nats = calibrated_table_threshold();
        let a = simulate_corr_table(&corr).unwrap();
        let b = simulate_corr_table(&corr).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn csv_has_one_row_per_cell_and_metric() {
        let cfg = base(3, 8, vec![-0.3, 0.5], vec![15]);
        let table = simulate_corr_table(&cfg).unwrap();
        // 3 nulls x 2 correlations x 1 sample size x 5 metrics.
        assert_eq!(table.rows.len(), 30);
        let csv = table.to_csv();
        assert_eq!(csv.lines().count(), 31);
        assert!(csv.starts_with("name,n,parameter,value,stderr,replicates,seed\n"));
        for line in csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 7);
            assert!(fields[4].parse::<f64>().unwrap() > 0.0, "zero stderr in {line}");
            assert_eq!(fields[5], "8");
            assert_eq!(fields[6], "3");
        }
        for name in ["reject", "reject-at-0", "reject-at-2.3", "kl-ml", "kl-mml"] {
            assert!(table.rows.iter().any(|r| r.name == format!("rho0=0.00/{name}")));
        }
    }

    #[test]
    fn nmse_matches_its_definition() {
        let cfg = base(21, 1, vec![2.0], vec![20]);
        let table = simulate_delta_nmse(&cfg).unwrap();
        for label in ["ml", "mml87"] {
            let bias = row(&table, &format!("bias-{label}"), 20, 2.0).value;
            let nmse = row(&table, &format!("nmse-{label}"), 20, 2.0).value;
            assert_relative_eq!(nmse, bias * bias / 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn effect_estimates_err_in_opposite_directions_at_small_n() {
        let cfg = base(13, 1500, vec![1.0], vec![5]);
        let table = simulate_delta_nmse(&cfg).unwrap();
        let ml = row(&table, "bias-ml", 5, 1.0);
        let mml = row(&table, "bias-mml87", 5, 1.0);
        assert!(ml.value > 2.0 * ml.stderr, "ml bias {} +- {}", ml.value, ml.stderr);
        assert!(mml.value < -2.0 * mml.stderr, "mml bias {} +- {}", mml.value, mml.stderr);
    }

    #[test]
    fn null_rejection_rates_are_sane() {
        let cfg = base(17, 400, vec![1.0], vec![20]);
        let table = simulate_type1(&cfg).unwrap();
        let mml = row(&table, "reject-mml", 20, 1.0).value;
        let bf1 = row(&table, "reject-bf-1", 20, 1.0).value;
        let bf187 = row(&table, "reject-bf-1.87", 20, 1.0).value;
        assert!((0.02..0.13).contains(&mml), "threshold-0 rate {mml}");
        assert!((0.02..0.16).contains(&bf1), "odds-1 rate {bf1}");
        assert!(bf1 >= bf187);
    }

    #[test]
    fn infinite_threshold_never_rejects() {
        let mut cfg = base(19, 50, vec![1.0], vec![5]);
        cfg.threshold_nats = f64::INFINITY;
        let table = simulate_type1(&cfg).unwrap();
        assert_eq!(row(&table, "reject-mml", 5, 1.0).value, 0.0);
    }

    #[test]
    fn correlation_mse_ranks_estimators_near_zero() {
        let cfg = base(23, 2000, vec![0.0], vec![20]);
        let table = simulate_rho_mse(&cfg).unwrap();
        let mml = row(&table, "mse-mml", 20, 0.0).value;
        let ml = row(&table, "mse-ml", 20, 0.0).value;
        assert!(row(&table, "mse-olkin-pratt", 20, 0.0).value > 0.0);
        // The sample correlation's variance at rho = 0 is about 1/(n - 1).
        assert!((0.04..0.07).contains(&ml), "ml mse {ml}");
        assert!(mml < ml);
    }

    #[test]
    fn selection_follows_the_threshold() {
        let mut cfg = base(29, 50, vec![0.0], vec![15]);
        cfg.threshold_nats = f64::NEG_INFINITY;
        let always = simulate_corr_table(&cfg).unwrap();
        assert_eq!(row(&always, "rho0=0.00/reject", 15, 0.0).value, 1.0);
        cfg.threshold_nats = f64::INFINITY;
        let never = simulate_corr_table(&cfg).unwrap();
        assert_eq!(row(&never, "rho0=0.00/reject", 15, 0.0).value, 0.0);
        for table in [&always, &never] {
            assert!(row(table, "rho0=0.00/kl-ml", 15, 0.0).value > 0.0);
            assert!(row(table, "rho0=0.00/kl-mml", 15, 0.0).value > 0.0);
        }
    }

    #[test]
    fn rejection_rates_order_by_threshold_and_detect_distant_nulls() {
        let mut cfg = base(31, 300, vec![0.0], vec![15]);
        cfg.threshold_nats = calibrated_table_threshold();
        let table = simulate_corr_table(&cfg).unwrap();
        for prefix in ["rho0=-0.30", "rho0=0.00", "rho0=0.70"] {
            let lenient = row(&table, &format!("{prefix}/reject-at-0"), 15, 0.0).value;
            let headline = row(&table, &format!("{prefix}/reject"), 15, 0.0).value;
            let strict = row(&table, &format!("{prefix}/reject-at-2.3"), 15, 0.0).value;
            assert!(lenient >= headline && headline >= strict);
        }
        // A true null should rarely be rejected, a distant one usually.
        assert!(row(&table, "rho0=0.00/reject", 15, 0.0).value < 0.15);
        assert!(row(&table, "rho0=0.70/reject", 15, 0.0).value > 0.7);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn tables_are_deterministic_and_carry_uncertainty(
            seed in 0u64..1_000_000,
            replicates in 2usize..6,
            rho in -0.8f64..0.8,
        ) {
            let mut cfg = base(seed, replicates, vec![rho], vec![15]);
            cfg.threshold_nats = calibrated_table_threshold();
            let a = simulate_corr_table(&cfg).unwrap();
            let b = simulate_corr_table(&cfg).unwrap();
            prop_assert_eq!(&a.rows, &b.rows);
            prop_assert_eq!(a.redrawn, b.redrawn);
            for row in &a.rows {
                prop_assert!(row.stderr > 0.0);
                if row.name.ends_with("reject") || row.name.contains("reject-at") {
                    prop_assert!((0.0..=1.0).contains(&row.value));
                }
            }
        }
    }
}
