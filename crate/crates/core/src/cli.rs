//! Command-line front end.
//!
//! Configuration is resolved as defaults, then `--config <file>`, then any
//! explicit flags. Every command that writes files also writes the resolved
//! configuration to `config.json`, which can be fed back through `--config`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::harness::{
    exponential_tail_fit, Experiment, ExperimentConfig, FidelityCurve, Histogram, RotatedPoint,
    StrategyName,
};
use crate::verify::{run_checks, VerifyOptions};

/// Environment variable capping the worker count (0 = automatic).
pub const THREADS_ENV: &str = "SYMEST_THREADS";

const DEFAULT_SNAPSHOT_STEPS: [usize; 3] = [1, 5, 20];

#[derive(Debug, Parser)]
#[command(
    name = "symest",
    version,
    about = "Adaptive qubit estimation by symmetry measurements"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one strategy and write fidelity_curve.csv.
    Run(CommonArgs),
    /// Simulate both strategies on the same trial seeds and write comparison.csv.
    Compare(CommonArgs),
    /// Write rotated-frame estimate/reference distributions and histograms.
    Snapshot(CommonArgs),
    /// Run the oracle checks and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Default)]
pub struct CommonArgs {
    /// Reference-selection strategy [default: adaptive].
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyName>,
    /// Measurements per trial [default: 20].
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Independent trials [default: 10000].
    #[arg(long)]
    pub trials: Option<usize>,
    /// Master seed; trial i uses stream i [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Points in the estimator's starting grid [default: 1024].
    #[arg(long)]
    pub mle_grid: Option<usize>,
    /// Candidate references for the adaptive strategy [default: 512].
    #[arg(long)]
    pub search_grid: Option<usize>,
    /// Grid for the hypothetical estimates inside the objective [default: 256].
    #[arg(long)]
    pub hyp_grid: Option<usize>,
    /// Comma-separated steps, e.g. `1,5,20`.
    #[arg(long, value_delimiter = ',')]
    pub snapshot_steps: Option<Vec<usize>>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// JSON configuration, as written to config.json by a previous run.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Flip the sign of the closed-form lookahead objective (mutation test;
    /// the objective checks must then fail).
    #[arg(long, hide = true)]
    pub inject_sign_error: bool,
}

impl CommonArgs {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let (mut cfg, mut steps_given) = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                let invalid =
                    |e: serde_json::Error| Error::InvalidInput(format!("{}: {e}", path.display()));
                let value: serde_json::Value = serde_json::from_str(&text).map_err(invalid)?;
                let given = value.get("snapshot_steps").is_some();
                (serde_json::from_value(value).map_err(invalid)?, given)
            }
            None => (ExperimentConfig::default(), false),
        };
        if let Some(v) = self.strategy {
            cfg.strategy = v;
        }
        if let Some(v) = self.n_max {
            cfg.n_max = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.mle_grid {
            cfg.mle_grid = v;
        }
        if let Some(v) = self.search_grid {
            cfg.search_grid = v;
        }
        if let Some(v) = self.hyp_grid {
            cfg.hyp_grid = v;
        }
        if let Some(v) = &self.snapshot_steps {
            cfg.snapshot_steps = v.clone();
            steps_given = true;
        }
        if !steps_given {
            cfg.snapshot_steps = DEFAULT_SNAPSHOT_STEPS
                .iter()
                .copied()
                .filter(|&s| s <= cfg.n_max)
                .collect();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Formats a value with 12 significant digits, positional when the decimal
/// exponent is in `[-5, 12)` and scientific otherwise.
pub fn format_sig12(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    // The scientific rendering fixes the rounded exponent.
    let sci = format!("{x:.11e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

fn curve_csv(curve: &FidelityCurve) -> String {
    let mut s = String::from("N,mean_fidelity,std_error,optimal_bound\n");
    for r in &curve.rows {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.n,
            format_sig12(r.mean_fidelity),
            format_sig12(r.std_error),
            format_sig12(r.optimal_bound)
        );
    }
    s
}

fn comparison_csv(adaptive: &FidelityCurve, random: &FidelityCurve) -> String {
    let mut s = String::from("N,adaptive_mean,adaptive_se,random_mean,random_se,optimal_bound\n");
    for (a, r) in adaptive.rows.iter().zip(&random.rows) {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            a.n,
            format_sig12(a.mean_fidelity),
            format_sig12(a.std_error),
            format_sig12(r.mean_fidelity),
            format_sig12(r.std_error),
            format_sig12(a.optimal_bound)
        );
    }
    s
}

fn points_csv(points: &[RotatedPoint]) -> String {
    let mut s = String::from("cos_theta_rot,phi_rot\n");
    for p in points {
        let _ = writeln!(s, "{},{}", format_sig12(p.cos_theta), format_sig12(p.phi));
    }
    s
}

fn histogram_csv(h: &Histogram) -> String {
    let mut s = String::from("bin_left,bin_right,count\n");
    for (i, c) in h.counts.iter().enumerate() {
        let (l, r) = h.bin_edges(i);
        let _ = writeln!(s, "{},{},{}", format_sig12(l), format_sig12(r), c);
    }
    s
}

fn config_json(cfg: &ExperimentConfig) -> String {
    let mut s = serde_json::to_string_pretty(cfg).expect("config serializes");
    s.push('\n');
    s
}

struct OutputDir(PathBuf);

impl OutputDir {
    fn create(path: &Path) -> Result<Self> {
        fs::create_dir_all(path)?;
        Ok(OutputDir(path.to_path_buf()))
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.0.join(name), contents)?;
        Ok(())
    }
}

fn build_experiment(cfg: ExperimentConfig) -> Result<Experiment> {
    Experiment::new(cfg)
}

pub fn cmd_run(args: &CommonArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let out = OutputDir::create(&args.out)?;
    let result = build_experiment(cfg.clone())?.run()?;
    out.write("fidelity_curve.csv", &curve_csv(&result.curve))?;
    out.write("config.json", &config_json(&cfg))?;
    for r in &result.curve.rows {
        println!(
            "N={:>3}  <F>={:.4} ± {:.4}  optimal={:.4}",
            r.n, r.mean_fidelity, r.std_error, r.optimal_bound
        );
    }
    Ok(())
}

pub fn cmd_compare(args: &CommonArgs) -> Result<()> {
    let cfg = args.resolve()?;
    let out = OutputDir::create(&args.out)?;
    let curve_for = |strategy| -> Result<FidelityCurve> {
        let exp = build_experiment(ExperimentConfig {
            strategy,
            ..cfg.clone()
        })?;
        Ok(FidelityCurve::from_trials(&exp.run_trials()))
    };
    let adaptive = curve_for(StrategyName::Adaptive)?;
    let random = curve_for(StrategyName::Random)?;
    out.write("comparison.csv", &comparison_csv(&adaptive, &random))?;
    out.write("config.json", &config_json(&cfg))?;
    for (a, r) in adaptive.rows.iter().zip(&random.rows) {
        println!(
            "N={:>3}  adaptive={:.4} ± {:.4}  random={:.4} ± {:.4}  gap={:+.4}",
            a.n,
            a.mean_fidelity,
            a.std_error,
            r.mean_fidelity,
            r.std_error,
            a.mean_fidelity - r.mean_fidelity
        );
    }
    Ok(())
}

pub fn cmd_snapshot(args: &CommonArgs) -> Result<()> {
    let cfg = args.resolve()?;
    if cfg.snapshot_steps.is_empty() {
        return Err(Error::InvalidInput("no snapshot steps".into()));
    }
    let out = OutputDir::create(&args.out)?;
    let result = build_experiment(cfg.clone())?.run()?;
    for snap in &result.snapshots {
        let n = snap.step;
        out.write(&format!("estimates_N{n}.csv"), &points_csv(&snap.estimates))?;
        out.write(
            &format!("references_N{n}.csv"),
            &points_csv(&snap.references),
        )?;
        out.write(
            &format!("hist_estimates_N{n}.csv"),
            &histogram_csv(&snap.estimate_histogram),
        )?;
        out.write(
            &format!("hist_references_N{n}.csv"),
            &histogram_csv(&snap.reference_histogram),
        )?;
        let fit = exponential_tail_fit(&snap.estimates)
            .map(|f| format!("exp rate {:.3} (KS D={:.4})", f.rate, f.ks.statistic))
            .unwrap_or_else(|| "no exp fit".into());
        println!(
            "N={n:>3}  P(cosθ>0.9)={:.4}  {fit}",
            snap.estimate_fraction_above(0.9)
        );
    }
    out.write("config.json", &config_json(&cfg))?;
    Ok(())
}

/// Returns whether every check passed.
pub fn cmd_verify(args: &VerifyArgs) -> bool {
    let checks = run_checks(&VerifyOptions {
        seed: args.seed,
        inject_sign_error: args.inject_sign_error,
    });
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &checks {
        println!(
            "{}  {:width$}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    checks.iter().all(|c| c.passed)
}

fn thread_pool() -> std::result::Result<rayon::ThreadPool, String> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("{THREADS_ENV}={v:?} is not a non-negative integer"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| e.to_string())
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    pool.install(|| {
        let result = match &cli.command {
            Command::Run(a) => cmd_run(a),
            Command::Compare(a) => cmd_compare(a),
            Command::Snapshot(a) => cmd_snapshot(a),
            Command::Verify(a) => return if cmd_verify(a) { 0 } else { 1 },
        };
        match result {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: {e}");
                2
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(7.0 / 12.0), "0.583333333333");
        assert_eq!(format_sig12(2.0 / 3.0), "0.666666666667");
        assert_eq!(format_sig12(-1.0), "-1.00000000000");
        assert_eq!(format_sig12(0.0), "0.00000000000");
        assert_eq!(format_sig12(0.95), "0.950000000000");
        assert_eq!(format_sig12(12.5), "12.5000000000");
        assert_eq!(format_sig12(0.0027), "0.00270000000000");
        assert_eq!(format_sig12(1.5e-7), "1.50000000000e-7");
        // Rounding that carries into the next decade.
        assert_eq!(format_sig12(0.9999999999999), "1.00000000000");
    }

    #[test]
    fn snapshot_defaults_follow_n_max() {
        let args = CommonArgs {
            n_max: Some(7),
            ..Default::default()
        };
        assert_eq!(args.resolve().unwrap().snapshot_steps, vec![1, 5]);
        let args = CommonArgs::default();
        assert_eq!(args.resolve().unwrap().snapshot_steps, vec![1, 5, 20]);
        let args = CommonArgs {
            n_max: Some(7),
            snapshot_steps: Some(vec![9]),
            ..Default::default()
        };
        assert!(args.resolve().is_err());
    }

    #[test]
    fn histogram_csv_has_forty_rows() {
        let h = Histogram::new(-1.0, 1.0, 40, [0.99]);
        let csv = histogram_csv(&h);
        assert_eq!(csv.lines().count(), 41);
        assert_eq!(
            csv.lines().last().unwrap(),
            "0.950000000000,1.00000000000,1"
        );
    }
}
