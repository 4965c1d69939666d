//! Command-line interface over the simulation library.
//!
//! Exit codes: 0 success; 2 malformed invocation, config file, or input
//! file; 3 precondition violation (legal invocation refused by the library,
//! including too few qualifying events); 1 internal invariant breach or
//! panic. The effective configuration of simulation commands is echoed as
//! one JSON line on stderr unless `--quiet` is given; primary output goes to
//! stdout or to `--out`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use softplex::config::RunConfig;
use softplex::{formats, runner, CliError, CliResult};
use softplex_core::complex::{build_cech, build_rips, thin, SimplicialComplex};
use softplex_core::experiments::{mu_integral, Model};
use softplex_core::geometry::{build_graph, sample_binomial, sample_poisson, PointCloud};
use softplex_core::homology::betti;
use softplex_core::morse::{build_gradient_field, verify_gradient};
use softplex_core::rng::{derive, STREAM_TRIAL};

#[derive(Parser)]
#[command(
    name = "softplex",
    version,
    about = "Soft random geometric simplicial complexes: simulation, homology, and census statistics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Flat-key JSON config file; explicit flags take precedence over it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for trial-parallel commands (output is identical for
    /// any thread count).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write primary output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Suppress the effective-config echo on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample one trial's point cloud and print it as JSON.
    Sample(SampleArgs),
    /// Build one trial's (thinned) complex and print its face list.
    Dump(SampleArgs),
    /// Betti numbers of a complex loaded from a face-list file.
    Betti(BettiArgs),
    /// Component census of a complex loaded from a face-list file.
    Census(CensusArgs),
    /// Discrete gradient field of a loaded complex over a loaded cloud.
    Morse(MorseArgs),
    /// Monte Carlo estimate of a trial statistic or a pattern density.
    Estimate(EstimateArgs),
    /// Radius-scaling ladder over a list of sizes; prints CSV.
    Sweep(SweepArgs),
    /// Monte Carlo value of a pattern's limiting density integral.
    Mu(MuArgs),
}

/// Model and process options shared by the simulation commands.
#[derive(Args, Default)]
struct CommonArgs {
    /// Ambient dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Connection radius (or derive it from --regime).
    #[arg(long)]
    r: Option<f64>,
    /// Survival probabilities per dimension, comma separated (e.g. 0.8,0.5).
    #[arg(long, value_delimiter = ',')]
    rho: Option<Vec<f64>>,
    /// Complex model: rips or cech.
    #[arg(long)]
    model: Option<String>,
    /// Point process: binomial or poisson.
    #[arg(long)]
    process: Option<String>,
    /// Poisson intensity (defaults to n).
    #[arg(long)]
    lambda: Option<f64>,
    /// Sampling domain: cube or ball.
    #[arg(long)]
    domain: Option<String>,
    /// Analysis dimension.
    #[arg(long)]
    k: Option<usize>,
    /// Truncation dimension of the complex (default k + 1).
    #[arg(long)]
    k_max: Option<usize>,
    /// Large-component threshold: rips, cech, or an integer.
    #[arg(long)]
    census_m: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Radius regime: subcritical, critical, supercritical, or connected.
    #[arg(long)]
    regime: Option<String>,
    /// Scaling constant for non-critical regimes.
    #[arg(long)]
    c: Option<f64>,
    /// Extra exponent of the subcritical regime.
    #[arg(long)]
    eps: Option<f64>,
    /// Degree parameter of the critical regime.
    #[arg(long)]
    regime_lambda: Option<f64>,
}

impl CommonArgs {
    fn to_config(&self, n: Option<u64>, n_values: Option<Vec<u64>>) -> RunConfig {
        RunConfig {
            model: self.model.clone(),
            process: self.process.clone(),
            n,
            lambda: self.lambda,
            d: self.d,
            domain: self.domain.clone(),
            r: self.r,
            rho: self.rho.clone(),
            k: self.k,
            k_max: self.k_max,
            census_m: self.census_m.clone(),
            seed: self.seed,
            trials: self.trials,
            regime: self.regime.clone(),
            c: self.c,
            eps: self.eps,
            regime_lambda: self.regime_lambda,
            n_values,
            statistic: None,
            pattern: None,
            scaling: None,
            samples: None,
            threads: None,
        }
    }
}

#[derive(Args)]
struct SampleArgs {
    /// Number of points (binomial) or mean (poisson).
    #[arg(long)]
    n: Option<u64>,
    /// Which trial substream to draw (default 0).
    #[arg(long, default_value_t = 0)]
    trial: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct BettiArgs {
    /// Complex face-list file.
    #[arg(long, value_name = "FILE")]
    load: PathBuf,
    /// Highest homology dimension to report (default k_max - 1).
    #[arg(long)]
    up_to: Option<usize>,
}

#[derive(Args)]
struct CensusArgs {
    /// Complex face-list file.
    #[arg(long, value_name = "FILE")]
    load: PathBuf,
    /// Pattern dimensions, comma separated (default 1).
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Large-component threshold: rips, cech, or an integer.
    #[arg(long)]
    census_m: Option<String>,
}

#[derive(Args)]
struct MorseArgs {
    /// Complex face-list file.
    #[arg(long, value_name = "FILE")]
    load: PathBuf,
    /// Point cloud JSON file providing the vertex ordering.
    #[arg(long, value_name = "FILE")]
    cloud: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    n: Option<u64>,
    /// Statistic name: beta<k>, nonzero<k>, empty<k>, cross<k>, flarge<k>,
    /// crit<k>, f<dim>, points.
    #[arg(long, conflicts_with = "pattern")]
    statistic: Option<String>,
    /// Pattern name for a normalized density estimate instead.
    #[arg(long)]
    pattern: Option<String>,
    /// Density normalization: subcritical or critical.
    #[arg(long)]
    scaling: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Ladder sizes, comma separated (e.g. 250,500,1000,2000).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct MuArgs {
    /// Pattern name (e.g. K2, path2, K3, C4, clique4, emptyboundary1).
    #[arg(long)]
    pattern: Option<String>,
    /// Ambient dimension.
    #[arg(long)]
    d: Option<usize>,
    /// Sample count; accepts scientific notation such as 1e6.
    #[arg(long, value_parser = parse_samples)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_samples(word: &str) -> Result<u64, String> {
    let value: f64 = word.parse().map_err(|_| format!("not a number: {word:?}"))?;
    if !value.is_finite() || value < 0.0 || value > u64::MAX as f64 {
        return Err(format!("sample count out of range: {word:?}"));
    }
    Ok(value.round() as u64)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| execute(cli)));
    let code = match outcome {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            eprintln!("internal error: {msg}");
            1
        }
    };
    std::process::exit(code);
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn echo_config(quiet: bool, cfg: &RunConfig) -> CliResult<()> {
    if !quiet {
        eprintln!("{}", cfg.resolved_for_echo()?.echo());
    }
    Ok(())
}

fn merged_config(cli_config: &Option<PathBuf>, flags: RunConfig, threads: Option<usize>) -> CliResult<RunConfig> {
    let base = match cli_config {
        Some(path) => RunConfig::from_json(&read_file(path)?)?,
        None => RunConfig::default(),
    };
    let thread_overlay = RunConfig { threads, ..Default::default() };
    Ok(base.overlaid_with(flags).overlaid_with(thread_overlay))
}

/// The point cloud of one trial substream, as the experiment drivers draw it.
fn trial_cloud(cfg: &RunConfig, trial: u64) -> CliResult<PointCloud> {
    let trial_seed = derive(cfg.seed(), &[STREAM_TRIAL, trial]);
    let domain = cfg.domain()?;
    Ok(match cfg.process()? {
        softplex_core::experiments::Process::Binomial { n } => {
            sample_binomial(&domain, n, trial_seed)
        }
        softplex_core::experiments::Process::Poisson { lambda } => {
            sample_poisson(&domain, lambda, trial_seed)?
        }
    })
}

fn trial_complex(cfg: &RunConfig, trial: u64) -> CliResult<SimplicialComplex> {
    let cloud = trial_cloud(cfg, trial)?;
    let r = cfg.r()?;
    let k_max = cfg.k_max();
    let unthinned = match cfg.model()? {
        Model::Rips => {
            let graph = build_graph(&cloud, r)?;
            build_rips(&graph, k_max)
        }
        Model::Cech => build_cech(&cloud, r, k_max)?,
    };
    let trial_seed = derive(cfg.seed(), &[STREAM_TRIAL, trial]);
    Ok(thin(&unthinned, &cfg.rho()?, trial_seed)?)
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.cmd {
        Cmd::Sample(ref args) => {
            let cfg =
                merged_config(&cli.config, args.common.to_config(args.n, None), cli.threads)?;
            echo_config(cli.quiet, &cfg)?;
            let cloud = trial_cloud(&cfg, args.trial)?;
            emit(&cli.out, &formats::write_cloud(&cloud))
        }
        Cmd::Dump(ref args) => {
            let cfg =
                merged_config(&cli.config, args.common.to_config(args.n, None), cli.threads)?;
            echo_config(cli.quiet, &cfg)?;
            let complex = trial_complex(&cfg, args.trial)?;
            emit(&cli.out, &formats::write_complex(&complex))
        }
        Cmd::Betti(ref args) => {
            let complex = formats::read_complex(&read_file(&args.load)?)?;
            if complex.k_max() == 0 {
                return Err(CliError::Precondition(
                    "complex has k_max 0; no boundary operator to reduce".into(),
                ));
            }
            let up_to = args.up_to.unwrap_or(complex.k_max() - 1);
            let numbers = betti(&complex, up_to)?;
            let words: Vec<String> = numbers.iter().map(|b| b.to_string()).collect();
            emit(&cli.out, &format!("beta = ({})\n", words.join(", ")))
        }
        Cmd::Census(ref args) => {
            let complex = formats::read_complex(&read_file(&args.load)?)?;
            let k_list = args.k.clone().unwrap_or_else(|| vec![1]);
            let m_rule = RunConfig {
                census_m: args.census_m.clone(),
                ..Default::default()
            }
            .census_m()?;
            let report = softplex_core::census::census(&complex, &k_list, m_rule)?;
            let mut text = serde_json::to_string_pretty(&formats::census_json(&report))
                .expect("census serialization");
            text.push('\n');
            emit(&cli.out, &text)
        }
        Cmd::Morse(ref args) => {
            let complex = formats::read_complex(&read_file(&args.load)?)?;
            let cloud = formats::read_cloud(&read_file(&args.cloud)?)?;
            let field = build_gradient_field(&complex, &cloud)?;
            let verified = verify_gradient(&field, &complex);
            let value = serde_json::json!({
                "critical": field.critical_counts(),
                "verified": verified,
            });
            let mut text = serde_json::to_string_pretty(&value).expect("morse serialization");
            text.push('\n');
            emit(&cli.out, &text)
        }
        Cmd::Estimate(ref args) => {
            let mut flags = args.common.to_config(args.n, None);
            flags.statistic = args.statistic.clone();
            flags.pattern = args.pattern.clone();
            flags.scaling = args.scaling.clone();
            let cfg = merged_config(&cli.config, flags, cli.threads)?;
            echo_config(cli.quiet, &cfg)?;
            let trial_config = cfg.trial_config()?;
            let est = if cfg.pattern.is_some() {
                runner::density_parallel(
                    cfg.pattern()?,
                    cfg.scaling()?,
                    &trial_config,
                    cfg.trials(),
                    cfg.threads(),
                )?
            } else {
                runner::estimate_parallel(
                    cfg.statistic()?,
                    &trial_config,
                    cfg.trials(),
                    cfg.threads(),
                )?
            };
            let mut text = serde_json::to_string_pretty(&formats::estimator_json(&est))
                .expect("estimate serialization");
            text.push('\n');
            emit(&cli.out, &text)
        }
        Cmd::Sweep(ref args) => {
            let flags = args.common.to_config(None, args.n.clone());
            let cfg = merged_config(&cli.config, flags, cli.threads)?;
            echo_config(cli.quiet, &cfg)?;
            let regime = cfg.regime()?;
            let n_values = cfg.n_values()?;
            // The template's own radius is recomputed per ladder point; seed
            // it with the first size so validation has a concrete value.
            let mut template_cfg = cfg.clone();
            template_cfg.n = Some(n_values[0] as u64);
            let template = template_cfg.trial_config()?;
            let rows = runner::sweep_parallel(
                &regime,
                &n_values,
                &template,
                cfg.k(),
                cfg.trials(),
                cfg.threads(),
            )?;
            emit(&cli.out, &formats::write_sweep_csv(&rows))
        }
        Cmd::Mu(ref args) => {
            let flags = RunConfig {
                pattern: args.pattern.clone(),
                d: args.d,
                samples: args.samples,
                seed: args.seed,
                ..Default::default()
            };
            let cfg = merged_config(&cli.config, flags, cli.threads)?;
            if !cli.quiet {
                let echo = RunConfig {
                    pattern: Some(cfg.pattern()?.name()),
                    d: Some(cfg.d()),
                    samples: Some(cfg.samples()),
                    seed: Some(cfg.seed()),
                    ..Default::default()
                };
                eprintln!("{}", echo.echo());
            }
            let est = mu_integral(cfg.pattern()?, cfg.d(), cfg.samples(), cfg.seed())?;
            let mut text = serde_json::to_string_pretty(&formats::estimator_json(&est))
                .expect("mu serialization");
            text.push('\n');
            emit(&cli.out, &text)
        }
    }
}
