//! `pfr` — experiment runner and reporting front end.
//!
//! Subcommands: `simulate`, `fit`, `error-curve`, `recovery`, `diagnostics`,
//! `plot`. A JSON config file parameterizes everything; the most common
//! knobs have flag overrides. Exit codes: 0 success, 2 invalid
//! configuration or arguments, 1 runtime error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pfr_core::experiment::{
    fit_with_filter, run_diagnostics, run_error_curve, run_recovery_check, ExperimentConfig,
    MeanErrorTable, NRange, OutputFormat,
};
use pfr_core::filters::FilterSpec;
use pfr_core::plot::{render_svg, PlotSpec};
use pfr_core::simulate::{make_dataset, read_responses_csv, write_responses_csv};
use pfr_core::solver::save_model;
use pfr_core::PfrError;

#[derive(Parser)]
#[command(
    name = "pfr",
    about = "Regularized polynomial functional regression: simulation, fitting, and error studies",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// JSON experiment configuration; defaults reproduce the reference
    /// cosine-process study when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Replace the filter ladder with a single iterated-Tikhonov filter at
    /// this lambda.
    #[arg(long)]
    lambda: Option<f64>,
    /// Iteration count for the --lambda filter (also applied when the
    /// ladder is kept).
    #[arg(long)]
    q: Option<u32>,
    /// Polynomial order of the fitted regression.
    #[arg(long)]
    p: Option<u32>,
    /// Upper end of the sample-size range.
    #[arg(long)]
    n_max: Option<usize>,
    /// Replace the seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config's output.dir).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset and write curves.csv + responses.csv.
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Number of samples (defaults to the top of the config's n_range).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Fit a model from dataset files (or a freshly simulated dataset) and
    /// write it as JSON.
    Fit {
        #[command(flatten)]
        config: ConfigArgs,
        /// Curve-set CSV to fit on (with --responses); omitted = simulate.
        #[arg(long, requires = "responses")]
        curves: Option<PathBuf>,
        /// Responses CSV matching --curves.
        #[arg(long, requires = "curves")]
        responses: Option<PathBuf>,
        /// Number of samples when simulating.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Sweep (seed, N, filter), writing error_curve.csv and the
    /// seed-averaged error_curve_mean.csv (plus an SVG when enabled).
    ErrorCurve {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Coefficient-recovery study against the standard quadratic target.
    Recovery {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Spectrum, capacity quantities, and the resolution limit per seed.
    Diagnostics {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Render an error-curve CSV as an SVG line plot.
    Plot {
        /// Input table (error_curve_mean.csv or compatible).
        #[arg(long)]
        input: PathBuf,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// Plot title.
        #[arg(long)]
        title: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                PfrError::InvalidConfig(_) | PfrError::InvalidArgument(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn load_config(args: &ConfigArgs) -> Result<ExperimentConfig, PfrError> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_json(&fs::read_to_string(path)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(lambda) = args.lambda {
        let q = args.q.unwrap_or(4);
        config.filters = vec![FilterSpec::iterated_tikhonov(lambda, q)];
    } else if let Some(q) = args.q {
        for f in &mut config.filters {
            f.iterations = q;
        }
    }
    if let Some(p) = args.p {
        config.p = p;
    }
    if let Some(n_max) = args.n_max {
        config.n_range = NRange {
            start: config.n_range.start.min(n_max),
            end: n_max,
        };
    }
    if let Some(seed) = args.seed {
        config.seeds = vec![seed];
    }
    if let Some(out) = &args.out {
        config.output.dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn ensure_dir(dir: &Path) -> Result<(), PfrError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), PfrError> {
    match cli.command {
        Command::Simulate { config, n } => {
            let cfg = load_config(&config)?;
            let n = n.unwrap_or(cfg.n_range.end);
            let dataset = make_dataset(
                &cfg.process_spec()?,
                &cfg.truth,
                &cfg.noise,
                n,
                cfg.seeds[0],
            )?;
            ensure_dir(&cfg.output.dir)?;
            let curves_path = cfg.output.dir.join("curves.csv");
            let responses_path = cfg.output.dir.join("responses.csv");
            let mut curves_file = fs::File::create(&curves_path)?;
            pfr_core::funcdata::write_curves_csv(&mut curves_file, &dataset.curves)?;
            let mut responses_file = fs::File::create(&responses_path)?;
            write_responses_csv(&mut responses_file, &dataset)?;
            println!(
                "wrote {} curves to {} and responses to {}",
                n,
                curves_path.display(),
                responses_path.display()
            );
            Ok(())
        }
        Command::Fit {
            config,
            curves,
            responses,
            n,
        } => {
            let cfg = load_config(&config)?;
            let (curve_set, ys) = match (&curves, &responses) {
                (Some(cpath), Some(rpath)) => {
                    let curves = pfr_core::funcdata::read_curves_csv(std::io::BufReader::new(
                        fs::File::open(cpath)?,
                    ))?;
                    let ys = read_responses_csv(std::io::BufReader::new(fs::File::open(rpath)?))?;
                    (curves, ys)
                }
                _ => {
                    let n = n.unwrap_or(cfg.n_range.end);
                    let ds = make_dataset(
                        &cfg.process_spec()?,
                        &cfg.truth,
                        &cfg.noise,
                        n,
                        cfg.seeds[0],
                    )?;
                    (ds.curves, ds.responses)
                }
            };
            if curve_set.len() != ys.len() {
                return Err(PfrError::InvalidArgument(format!(
                    "{} curves but {} responses",
                    curve_set.len(),
                    ys.len()
                )));
            }
            let filter = cfg.filters[0];
            let report = fit_with_filter(&curve_set, &ys, &filter, cfg.p)?;
            ensure_dir(&cfg.output.dir)?;
            let model_path = cfg.output.dir.join("model.json");
            fs::write(&model_path, save_model(&report.model))?;
            println!(
                "fit {} samples with {} (lambda={:e}, q={}), p={}: intercept {:.6}, \
                 system residual {:.3e}; model written to {}",
                curve_set.len(),
                filter.scheme,
                filter.lambda,
                filter.iterations,
                cfg.p,
                report.model.intercept(),
                report.residual_norm,
                model_path.display()
            );
            Ok(())
        }
        Command::ErrorCurve { config } => {
            let cfg = load_config(&config)?;
            let table = run_error_curve(&cfg)?;
            let mean = table.mean_over_seeds();
            ensure_dir(&cfg.output.dir)?;
            let mut written = Vec::new();
            if cfg.output.formats.contains(&OutputFormat::Csv) {
                let rows_path = cfg.output.dir.join("error_curve.csv");
                fs::write(&rows_path, table.to_csv())?;
                let mean_path = cfg.output.dir.join("error_curve_mean.csv");
                fs::write(&mean_path, mean.to_csv())?;
                written.push(rows_path.display().to_string());
                written.push(mean_path.display().to_string());
            }
            if cfg.output.formats.contains(&OutputFormat::Json) {
                let json_path = cfg.output.dir.join("error_curve.json");
                fs::write(&json_path, serde_json::to_vec_pretty(&table).expect("serialize"))?;
                written.push(json_path.display().to_string());
            }
            if cfg.output.formats.contains(&OutputFormat::Svg) {
                let svg_path = cfg.output.dir.join("error_curve.svg");
                let svg = render_svg(&mean, &PlotSpec::default())?;
                fs::write(&svg_path, svg)?;
                written.push(svg_path.display().to_string());
            }
            println!(
                "swept {} rows ({} seeds x {} sample sizes x {} filters); wrote {}",
                table.rows.len(),
                cfg.seeds.len(),
                cfg.n_range.len(),
                cfg.filters.len(),
                written.join(", ")
            );
            Ok(())
        }
        Command::Recovery { config } => {
            let cfg = load_config(&config)?;
            let report = run_recovery_check(&cfg)?;
            ensure_dir(&cfg.output.dir)?;
            let path = cfg.output.dir.join("recovery.json");
            fs::write(&path, serde_json::to_vec_pretty(&report).expect("serialize"))?;
            match report.first_passing_n {
                Some(n) => println!(
                    "recovery passes from N = {n} on (risk ratio p1/p2 = {:.3e}); report at {}",
                    report.linear_excess_risk / report.quadratic_excess_risk.max(f64::MIN_POSITIVE),
                    path.display()
                ),
                None => println!(
                    "recovery tolerances not met anywhere in N = {}..={}; report at {}",
                    cfg.n_range.start,
                    cfg.n_range.end,
                    path.display()
                ),
            }
            Ok(())
        }
        Command::Diagnostics { config } => {
            let cfg = load_config(&config)?;
            let report = run_diagnostics(&cfg)?;
            ensure_dir(&cfg.output.dir)?;
            let path = cfg.output.dir.join("diagnostics.json");
            fs::write(&path, serde_json::to_vec_pretty(&report).expect("serialize"))?;
            for seed_report in &report.reports {
                println!(
                    "seed {}: lambda* = {:.4e} (N lambda* = {:.3}), top eigenvalue {:.4e}",
                    seed_report.seed,
                    seed_report.lambda_star,
                    seed_report.n_lambda_star,
                    seed_report.spectrum.first().copied().unwrap_or(0.0)
                );
            }
            println!("diagnostics written to {}", path.display());
            Ok(())
        }
        Command::Plot { input, out, title } => {
            let table = MeanErrorTable::from_csv(&fs::read_to_string(&input)?)?;
            let mut spec = PlotSpec::default();
            if let Some(t) = title {
                spec.title = t;
            }
            let svg = render_svg(&table, &spec)?;
            fs::write(&out, svg)?;
            println!("plot written to {}", out.display());
            Ok(())
        }
    }
}
