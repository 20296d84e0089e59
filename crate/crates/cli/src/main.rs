use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rgr::bench::{run_benchmark, BenchParams, DegradeParams, Method};
use rgr::io::{self, Report};
use rgr::metrics::default_boundary_tolerance;
use rgr::{boundary_f, iou, ImageSize, RefineConfig, SegMask, SppxParams};
use serde_json::json;

mod config;

use config::{ConfigArgs, ConfigError};

#[derive(Parser, Debug)]
#[command(
    name = "rgr",
    version,
    about = "Confidence-guided region growing refinement of coarse masks"
)]
struct Cli {
    /// Worker threads (default: all cores). Does not affect results.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Refine a confidence map into a binary mask
    Refine(RunArgs),
    /// Superpixel majority-vote baseline
    Baseline {
        #[command(flatten)]
        run: RunArgs,
        /// Superpixel count (default: image area / seed spacing squared)
        #[arg(long)]
        superpixels: Option<usize>,
    },
    /// Score a predicted mask against ground truth
    Eval {
        pred: PathBuf,
        gt: PathBuf,
        /// Boundary matching tolerance in pixels (default: 0.8% of the diagonal)
        #[arg(long)]
        tolerance: Option<f64>,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the synthetic benchmark
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// RGB image (PNG or PPM)
    image: PathBuf,
    /// Confidence map (PFM, or grayscale PNG)
    confidence: PathBuf,
    /// Output mask PNG
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the averaged vote map as PFM
    #[arg(long = "emit-scores")]
    emit_scores: Option<PathBuf>,
    /// Write a JSON report (config, timing, and metrics if --gt is given)
    #[arg(long)]
    report: Option<PathBuf>,
    /// Ground-truth mask for the report metrics
    #[arg(long)]
    gt: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, default_value_t = 50)]
    scenes: usize,
    /// Master seed of scene generation and degradation
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    #[arg(long, default_value_t = 320)]
    width: usize,
    #[arg(long, default_value_t = 240)]
    height: usize,
    #[arg(long, default_value_t = 8.0)]
    blur: f64,
    #[arg(long = "max-shift", default_value_t = 4)]
    max_shift: i32,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    /// Per-scene rows as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Rows, summary and effective config as JSON
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

/// Failure mapped onto the process exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Output(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Output(m) => m,
        }
    }
}

impl From<rgr::Error> for Failure {
    fn from(e: rgr::Error) -> Self {
        use rgr::Error::*;
        let msg = e.to_string();
        match e {
            Read { .. } | Decode { .. } | UnsupportedDepth { .. } => Failure::Input(msg),
            Write { .. } => Failure::Output(msg),
            _ => Failure::Usage(msg),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Read(e) => Failure::Input(format!("cannot read config file: {e}")),
            ConfigError::Invalid(m) => Failure::Usage(m),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cli.threads {
            if n == 0 {
                return Err(Failure::Usage("--threads must be at least 1".into()));
            }
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Failure::Usage(e.to_string()))?
    };
    pool.install(|| match cli.command {
        Command::Refine(args) => cmd_refine(&args, None),
        Command::Baseline { run, superpixels } => cmd_refine(&run, Some(superpixels)),
        Command::Eval {
            pred,
            gt,
            tolerance,
            report,
        } => cmd_eval(&pred, &gt, tolerance, report.as_deref()),
        Command::Bench(args) => cmd_bench(&args),
    })
}

/// Shared by `refine` and `baseline`; `baseline` carries the optional
/// superpixel count override.
fn cmd_refine(args: &RunArgs, baseline: Option<Option<usize>>) -> CliResult<()> {
    let cfg = args.config.resolve()?;
    let img = io::load_image(&args.image)?;
    let loaded = io::load_confidence::<f64>(&args.confidence)?;
    if loaded.clamped > 0 {
        warn!("clamped {} confidence values into [0, 1]", loaded.clamped);
    }
    let m = loaded.map;

    let start = Instant::now();
    let (mask, echo) = match baseline {
        None => {
            let mask = rgr::rgr_refine(&img, &m, &cfg)?;
            (mask, serde_json::to_value(&cfg).expect("config serializes"))
        }
        Some(k) => {
            let mut params = SppxParams::matching(&cfg, m.size());
            if let Some(k) = k {
                if k == 0 {
                    return Err(Failure::Usage("--superpixels must be at least 1".into()));
                }
                params.superpixels = k;
            }
            let mask = rgr::sppx_refine(&img, &m, &params)?;
            let echo = json!({
                "superpixels": params.superpixels,
                "tau0": params.tau0,
                "compactness": params.compactness,
                "connectivity": params.connectivity,
            });
            (mask, echo)
        }
    };
    let timing_ms = start.elapsed().as_secs_f64() * 1e3;
    info!(
        "{} foreground pixels in {timing_ms:.1} ms",
        mask.count_foreground()
    );

    io::save_mask(&mask, &args.output)?;
    if let Some(path) = &args.emit_scores {
        io::save_scores(mask.size(), mask.avg_votes(), path)?;
    }
    if let Some(path) = &args.report {
        let mut report = Report {
            iou: None,
            boundary_precision: None,
            boundary_recall: None,
            boundary_f: None,
            config: echo,
            timing_ms,
        };
        if let Some(gt) = &args.gt {
            let gt = io::load_mask::<f64>(gt)?;
            fill_metrics(&mut report, &mask, &gt, None)?;
        }
        io::save_report(&report, path)?;
    }
    Ok(())
}

fn fill_metrics(
    report: &mut Report,
    pred: &SegMask<f64>,
    gt: &SegMask<f64>,
    tol: Option<f64>,
) -> CliResult<f64> {
    let tol = tol.unwrap_or_else(|| default_boundary_tolerance(gt.size()));
    let b = boundary_f(pred, gt, tol)?;
    report.iou = Some(iou(pred, gt)?);
    report.boundary_precision = Some(b.precision);
    report.boundary_recall = Some(b.recall);
    report.boundary_f = Some(b.f);
    Ok(tol)
}

fn cmd_eval(pred: &Path, gt: &Path, tol: Option<f64>, out: Option<&Path>) -> CliResult<()> {
    let pred = io::load_mask::<f64>(pred)?;
    let gt = io::load_mask::<f64>(gt)?;
    let start = Instant::now();
    let mut report = Report {
        iou: None,
        boundary_precision: None,
        boundary_recall: None,
        boundary_f: None,
        config: serde_json::Value::Null,
        timing_ms: 0.0,
    };
    let tol = fill_metrics(&mut report, &pred, &gt, tol)?;
    report.config = json!({ "boundary_tolerance": tol });
    report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    match out {
        Some(path) => io::save_report(&report, path)?,
        None => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs) -> CliResult<()> {
    let cfg: RefineConfig<f64> = args.config.resolve()?;
    let size = ImageSize::new(args.width, args.height)?;
    let params = BenchParams {
        size,
        degrade: DegradeParams {
            blur_sigma: args.blur,
            max_shift: args.max_shift,
            noise_sigma: args.noise,
        },
        boundary_tol: None,
    };
    let report = run_benchmark::<f64>(args.scenes, &cfg, &params, args.seed)?;
    for m in Method::ALL {
        let s = report.summary_for(m);
        println!(
            "{:<10} iou {:.4}  boundary_f {:.4}  runtime mean {:.1} ms  max {:.1} ms",
            m.name(),
            s.mean_iou,
            s.mean_boundary_f,
            s.mean_runtime_ms,
            s.max_runtime_ms
        );
    }
    if let Some(path) = &args.csv {
        write_text(path, &report.to_csv())?;
    }
    if let Some(path) = &args.report {
        let doc = json!({
            "config": cfg,
            "bench": {
                "scenes": args.scenes,
                "seed": args.seed,
                "width": args.width,
                "height": args.height,
                "blur": args.blur,
                "max_shift": args.max_shift,
                "noise": args.noise,
            },
            "summary": report.summary,
            "rows": report.rows_json(),
        });
        io::save_report(&doc, path)?;
    }
    Ok(())
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| Failure::Output(format!("cannot write {}: {e}", path.display())))
}
