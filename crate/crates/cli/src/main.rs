//! Command-line front end: binomial codelength tables, the two hypothesis
//! tests on CSV data, and the Monte Carlo risk experiments.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 for data that
//! parses but is too degenerate to analyze.

mod ingest;
mod manifest;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use mml::codelength::uncertainty_volume;
use mml::corr::{corr_mml_alt_estimates, corr_stats, corr_test, olkin_pratt};
use mml::mml87::{mml87_binomial_codelength, mml87_binomial_estimate};
use mml::nml::nml_binomial_codelength;
use mml::sim::{
    calibrated_table_threshold, simulate_corr_table, simulate_delta_nmse, simulate_rho_mse,
    simulate_type1, RiskTable, SimConfig,
};
use mml::smml::{smml_estimate, solve_smml, BinomialObservation};
use mml::ttest::{
    bayes_factor, fit_alt, mml_null_estimates, null_codelength, ttest_stats, EffectSizePrior,
};
use mml::{Codelength, Hypothesis, HypothesisResult, PriorRange};

use crate::manifest::RunManifest;

/// Width of the location and log-scale prior ranges. Absolute codelengths
/// depend on it; differences, decisions, and estimates do not.
const OMEGA: f64 = 100.0;

#[derive(Parser)]
#[command(name = "mml", version, about = "Minimum message length inference tools")]
struct Cli {
    /// Random seed for simulation commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Unit for displayed codelengths.
    #[arg(long, global = true, value_enum, default_value_t = Units::Bits)]
    units: Units,
    /// Write the result here instead of stdout; a JSON manifest lands next
    /// to it.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal binomial partitions with their estimates and expected
    /// codelengths, one row per sample size.
    SmmlTable {
        /// Largest sample size to tabulate.
        #[arg(long, default_value_t = 30)]
        n_max: u32,
    },
    /// Codelengths of a single binomial observation under the exact
    /// partition scheme, the Fisher-information approximation, and the
    /// normalized maximum likelihood code.
    Codelengths {
        /// Number of trials.
        n: u32,
        /// Number of successes.
        y: u32,
    },
    /// Two-sample codelength test. The CSV holds either group,value rows
    /// (numeric labels need that header) or one column of values per group.
    Ttest {
        input: PathBuf,
        /// Degrees of freedom of the effect-size prior.
        #[arg(long, default_value_t = 1.0)]
        prior_df: f64,
        /// Location of the effect-size prior.
        #[arg(long, default_value_t = 0.0)]
        prior_location: f64,
        /// Scale of the effect-size prior.
        #[arg(long, default_value_t = 1.0)]
        prior_scale: f64,
        /// Codelength advantage (nats) the alternative must earn.
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        /// Also integrate the Bayes factor BF10.
        #[arg(long)]
        with_bayes_factor: bool,
    },
    /// Correlation codelength test on a two-column CSV of pairs.
    Corrtest {
        input: PathBuf,
        /// Null correlation to test.
        #[arg(long, default_value_t = 0.0)]
        rho0: f64,
        /// Codelength advantage (nats) the alternative must earn.
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
    },
    /// Monte Carlo risk experiment; writes a CSV risk table plus manifest.
    Simulate {
        #[arg(value_enum)]
        experiment: Experiment,
        /// Replicates per cell.
        #[arg(long, default_value_t = 10_000)]
        reps: usize,
        /// Parameter grid override (true effects, correlations, or prior
        /// scales, depending on the experiment).
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        /// Sample size override.
        #[arg(long = "n", value_delimiter = ',')]
        n_values: Option<Vec<usize>>,
        /// Decision threshold in nats (default depends on the experiment).
        #[arg(long)]
        threshold: Option<f64>,
        /// Degrees of freedom of the effect-size prior.
        #[arg(long, default_value_t = 1.0)]
        prior_df: f64,
        /// Location of the effect-size prior.
        #[arg(long, default_value_t = 0.0)]
        prior_location: f64,
        /// Scale of the effect-size prior.
        #[arg(long, default_value_t = 1.0)]
        prior_scale: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Units {
    Bits,
    Nats,
}

impl Units {
    fn show(self, code: Codelength) -> String {
        match self {
            Units::Bits => format!("{:.3} bits", code.bits()),
            Units::Nats => format!("{:.3} nats", code.nats),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Experiment {
    DeltaNmse,
    RhoMse,
    Type1,
    CorrTable,
}

impl Experiment {
    fn name(self) -> &'static str {
        match self {
            Experiment::DeltaNmse => "delta-nmse",
            Experiment::RhoMse => "rho-mse",
            Experiment::Type1 => "type1",
            Experiment::CorrTable => "corr-table",
        }
    }
}

/// A diagnostic plus the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<mml::Error> for Failure {
    fn from(err: mml::Error) -> Self {
        let code = match err {
            mml::Error::DegenerateData(_) => 3,
            _ => 2,
        };
        Failure { code, message: err.to_string() }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let seed = cli.seed;
    let units = cli.units;
    let output = cli.output.as_deref();
    match cli.command {
        Command::SmmlTable { n_max } => cmd_smml_table(n_max, units, seed, output),
        Command::Codelengths { n, y } => cmd_codelengths(n, y, units, seed, output),
        Command::Ttest {
            input,
            prior_df,
            prior_location,
            prior_scale,
            threshold,
            with_bayes_factor,
        } => {
            let prior = EffectSizePrior::new(prior_df, prior_location, prior_scale)?;
            cmd_ttest(&input, &prior, threshold, with_bayes_factor, units, seed, output)
        }
        Command::Corrtest { input, rho0, threshold } => {
            cmd_corrtest(&input, rho0, threshold, units, seed, output)
        }
        Command::Simulate {
            experiment,
            reps,
            grid,
            n_values,
            threshold,
            prior_df,
            prior_location,
            prior_scale,
        } => {
            let prior = EffectSizePrior::new(prior_df, prior_location, prior_scale)?;
            cmd_simulate(experiment, reps, grid, n_values, threshold, &prior, seed, output)
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn manifest_path(path: &Path) -> PathBuf {
    PathBuf::from(format!("{}.manifest.json", path.display()))
}

/// Writes the report and its manifest next to `output` when given,
/// otherwise prints the report with the manifest line appended.
fn deliver(report: &str, manifest: &RunManifest, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => {
            write_file(path, report)?;
            write_file(&manifest_path(path), &manifest.to_json())?;
            println!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{report}");
            println!("{}", manifest.summary_line());
            Ok(())
        }
    }
}

fn decision_name(selected: Hypothesis) -> &'static str {
    match selected {
        Hypothesis::Null => "null",
        Hypothesis::Alternative => "alternative",
    }
}

fn cmd_smml_table(
    n_max: u32,
    units: Units,
    seed: u64,
    output: Option<&Path>,
) -> Result<(), Failure> {
    if n_max == 0 {
        return Err(Failure::usage("n-max must be at least 1"));
    }
    let unit_name = match units {
        Units::Bits => "bits",
        Units::Nats => "nats",
    };
    let mut rows = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let partition = solve_smml(n)?;
        let estimates: Vec<String> =
            partition.estimates.iter().map(|t| format!("{t:.3}")).collect();
        let code = match units {
            Units::Bits => partition.expected_codelength.bits(),
            Units::Nats => partition.expected_codelength.nats,
        };
        rows.push((n, partition.format_segments(), estimates.join(", "), format!("{code:.3}")));
    }
    let manifest = RunManifest::new("smml-table", seed)
        .flag("n-max", n_max)
        .flag("units", unit_name);
    match output {
        Some(path) => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer
                .write_record(["n", "partition", "estimates", "codelength", "units"])
                .and_then(|()| {
                    rows.iter().try_for_each(|(n, segments, estimates, code)| {
                        writer.write_record([
                            n.to_string().as_str(),
                            segments,
                            estimates,
                            code,
                            unit_name,
                        ])
                    })
                })
                .map_err(|e| Failure::usage(format!("CSV encoding failed: {e}")))?;
            let bytes = writer.into_inner().expect("vec writer never fails");
            let text = String::from_utf8(bytes).expect("CSV output is UTF-8");
            write_file(path, &text)?;
            write_file(&manifest_path(path), &manifest.to_json())?;
            println!("wrote {}", path.display());
        }
        None => {
            let seg_width = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
            let est_width = rows.iter().map(|r| r.2.len()).max().unwrap_or(0);
            println!("{:>3}  {:<seg_width$}  {:<est_width$}  codelength ({unit_name})", "n", "partition", "estimates");
            for (n, segments, estimates, code) in &rows {
                println!("{n:>3}  {segments:<seg_width$}  {estimates:<est_width$}  {code}");
            }
            println!("{}", manifest.summary_line());
        }
    }
    Ok(())
}

fn cmd_codelengths(
    n: u32,
    y: u32,
    units: Units,
    seed: u64,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let obs = BinomialObservation::new(n, y)?;
    let partition = solve_smml(n)?;
    let smml_theta = smml_estimate(obs, &partition)?;
    let mml87_theta = mml87_binomial_estimate(n, y)?;
    let mml87_code = mml87_binomial_codelength(n, y)?;
    // Per-parameter Fisher information of the binomial, n / (theta (1 - theta)).
    let fisher = f64::from(n) / (mml87_theta * (1.0 - mml87_theta));
    let volume = uncertainty_volume(fisher, 1)?;
    let nml = nml_binomial_codelength(n, y)?;
    let divisor = gcd(2 * u64::from(y) + 1, 2 * u64::from(n) + 2);

    let mut report = String::new();
    let _ = writeln!(report, "codelengths for y = {y} of n = {n}");
    let _ = writeln!(
        report,
        "  smml:   estimate {:.3}, expected codelength {}",
        smml_theta,
        units.show(partition.expected_codelength),
    );
    let _ = writeln!(
        report,
        "  mml87:  estimate {:.3} (= {}/{}), codelength {}, uncertainty volume {:.3}",
        mml87_theta,
        (2 * u64::from(y) + 1) / divisor,
        (2 * u64::from(n) + 2) / divisor,
        units.show(mml87_code),
        volume,
    );
    let _ = writeln!(
        report,
        "  nml:    codelength {} = fit {} + complexity {}",
        units.show(nml.total),
        units.show(Codelength::from_nats(nml.fit_nats)),
        units.show(Codelength::from_nats(nml.log_complexity_nats)),
    );
    let manifest = RunManifest::new("codelengths", seed).flag("n", n).flag("y", y);
    deliver(&report, &manifest, output)
}

fn cmd_ttest(
    input: &Path,
    prior: &EffectSizePrior,
    threshold: f64,
    with_bayes_factor: bool,
    units: Units,
    seed: u64,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let bytes = read_input(input)?;
    let data = ingest::two_groups(&bytes)?;
    let stats = ttest_stats(&data)?;
    let range = PriorRange::from_omega(OMEGA).expect("positive range");
    let i0 = null_codelength(&stats, &range)?;
    let (alt, i1) = fit_alt(&stats, prior, &range)?;
    let bf = if with_bayes_factor {
        Some(bayes_factor(&stats, prior)?)
    } else {
        None
    };
    let result = HypothesisResult::new(i0, i1, threshold, bf);
    let null = mml_null_estimates(&stats);

    let mut report = String::new();
    let _ = writeln!(report, "two-sample codelength test");
    let _ = writeln!(
        report,
        "  n1 = {}, n2 = {}, t = {:.3}",
        stats.n1, stats.n2, stats.t
    );
    let _ = writeln!(
        report,
        "  null:        I0 = {}   mu = {:.3}, sigma = {:.3}",
        units.show(result.null_codelength),
        null.mu,
        null.sigma,
    );
    let _ = writeln!(
        report,
        "  alternative: I1 = {}   mu = {:.3}, sigma = {:.3}, delta = {:.3}",
        units.show(result.alt_codelength),
        alt.mu,
        alt.sigma,
        alt.delta,
    );
    let _ = writeln!(
        report,
        "  difference:  I0 - I1 = {:.3} nats = {:.3} bits",
        result.diff_nats,
        Codelength::from_nats(result.diff_nats).bits(),
    );
    let _ = writeln!(
        report,
        "  decision:    {} (threshold {:.3} nats, prior range omega = {OMEGA})",
        decision_name(result.selected),
        threshold,
    );
    if let Some(bf) = result.bayes_factor {
        let _ = writeln!(report, "  bayes factor: BF10 = {bf:.3}");
    }
    let manifest = RunManifest::new("ttest", seed)
        .flag("prior-df", prior.df)
        .flag("prior-location", prior.location)
        .flag("prior-scale", prior.scale)
        .flag("threshold", threshold)
        .flag("with-bayes-factor", with_bayes_factor)
        .digest(&bytes);
    deliver(&report, &manifest, output)
}

fn cmd_corrtest(
    input: &Path,
    rho0: f64,
    threshold: f64,
    units: Units,
    seed: u64,
    output: Option<&Path>,
) -> Result<(), Failure> {
    if !rho0.is_finite() || rho0.abs() >= 1.0 {
        return Err(Failure::usage(format!("rho0 must lie inside (-1, 1), got {rho0}")));
    }
    let bytes = read_input(input)?;
    let sample = ingest::pairs(&bytes)?;
    let stats = corr_stats(&sample)?;
    let range = PriorRange::from_omega(OMEGA).expect("positive range");
    let result = corr_test(&stats, rho0, &range, threshold)?;
    let alt = corr_mml_alt_estimates(&stats);
    let unbiased = if stats.n >= 5 {
        format!("{:.3}", olkin_pratt(stats.r, stats.n)?)
    } else {
        "unavailable (needs at least five pairs)".into()
    };

    let mut report = String::new();
    let _ = writeln!(report, "correlation codelength test of rho0 = {rho0:.3}");
    let _ = writeln!(report, "  n = {}, r = {:.3}", stats.n, stats.r);
    let _ = writeln!(report, "  null:        I0 = {}", units.show(result.null_codelength));
    let _ = writeln!(
        report,
        "  alternative: I1 = {}   rho = {:.3}",
        units.show(result.alt_codelength),
        alt.rho,
    );
    let _ = writeln!(
        report,
        "  difference:  I0 - I1 = {:.3} nats = {:.3} bits",
        result.diff_nats,
        Codelength::from_nats(result.diff_nats).bits(),
    );
    let _ = writeln!(
        report,
        "  decision:    {} (threshold {:.3} nats, prior range omega = {OMEGA})",
        decision_name(result.selected),
        threshold,
    );
    let _ = writeln!(
        report,
        "  estimates:   r = {:.3}, rho-mml = {:.3}, olkin-pratt = {unbiased}",
        stats.r, alt.rho,
    );
    let manifest = RunManifest::new("corrtest", seed)
        .flag("rho0", rho0)
        .flag("threshold", threshold)
        .digest(&bytes);
    deliver(&report, &manifest, output)
}

fn evenly_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|i| lo + step * i as f64).collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    experiment: Experiment,
    reps: usize,
    grid: Option<Vec<f64>>,
    n_values: Option<Vec<usize>>,
    threshold: Option<f64>,
    prior: &EffectSizePrior,
    seed: u64,
    output: Option<&Path>,
) -> Result<(), Failure> {
    let (default_grid, default_n, default_threshold): (Vec<f64>, Vec<usize>, f64) =
        match experiment {
            Experiment::DeltaNmse => (evenly_spaced(0.1, 5.0, 25), vec![5, 50], 0.0),
            Experiment::RhoMse => ((0..20).map(|i| 0.05 * i as f64).collect(), vec![20, 50], 0.0),
            Experiment::Type1 => {
                (vec![0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0], vec![20], 0.0)
            }
            Experiment::CorrTable => (
                vec![-0.75, -0.30, 0.00, 0.50],
                vec![15, 30],
                calibrated_table_threshold(),
            ),
        };
    let cfg = SimConfig {
        seed,
        replicates: reps,
        grid: grid.unwrap_or(default_grid),
        n_values: n_values.unwrap_or(default_n),
        threshold_nats: threshold.unwrap_or(default_threshold),
        prior: *prior,
    };
    let table: RiskTable = match experiment {
        Experiment::DeltaNmse => simulate_delta_nmse(&cfg)?,
        Experiment::RhoMse => simulate_rho_mse(&cfg)?,
        Experiment::Type1 => simulate_type1(&cfg)?,
        Experiment::CorrTable => simulate_corr_table(&cfg)?,
    };
    let grid_text: Vec<String> = cfg.grid.iter().map(f64::to_string).collect();
    let n_text: Vec<String> = cfg.n_values.iter().map(usize::to_string).collect();
    let manifest = RunManifest::new(experiment.name(), seed)
        .flag("reps", cfg.replicates)
        .flag("grid", grid_text.join(","))
        .flag("n", n_text.join(","))
        .flag("threshold", cfg.threshold_nats)
        .flag("prior-df", cfg.prior.df)
        .flag("prior-location", cfg.prior.location)
        .flag("prior-scale", cfg.prior.scale);
    let path = match output {
        Some(path) => path.to_path_buf(),
        None => PathBuf::from(format!("{}.csv", experiment.name())),
    };
    write_file(&path, &table.to_csv())?;
    write_file(&manifest_path(&path), &manifest.to_json())?;
    println!(
        "wrote {} ({} rows, {} replicates per cell, seed {}, {} degenerate redraws)",
        path.display(),
        table.rows.len(),
        table.replicates,
        table.seed,
        table.redrawn,
    );
    Ok(())
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
