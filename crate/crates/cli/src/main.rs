use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use normlab_cli::suites::MetricConfig;
use normlab_cli::{
    cmd_corpus, cmd_iso, cmd_nd, cmd_norm_eval, cmd_plot, parse_list, parse_pair, positive_grid, CliError, CliResult,
    Format, IsoCheck, IsoOptions, NdMode, Outcome, PlotSource, Suite,
};

#[derive(Parser, Debug)]
#[command(
    name = "normlab",
    version,
    about = "Corner detection and isometry checks on normed planes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a norm at one vector.
    NormEval {
        #[arg(long)]
        spec: PathBuf,
        /// Vector as `a,b`.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
    /// Classify points of a unit sphere as corners or smooth points.
    Nd {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "metric")]
        mode: NdMode,
        /// Points of the metric sample.
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        probes: Option<usize>,
        #[arg(long)]
        eps_grid: Option<String>,
        #[arg(long)]
        delta_grid: Option<String>,
        /// Oracle corner threshold.
        #[arg(long)]
        tol: Option<f64>,
        /// Far-mode triple `x1,x2,y1,y2,z1,z2`.
        #[arg(long, allow_hyphen_values = true)]
        triple: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Check a map between two unit spheres.
    Iso {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, alias = "spec")]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(
            long,
            value_enum,
            value_delimiter = ',',
            default_value = "distortion,antipodes,linear"
        )]
        checks: Vec<IsoCheck>,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 400)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Draw a curve with overlays as SVG.
    Plot {
        #[arg(long, group = "curve_source")]
        spec: Option<PathBuf>,
        /// Sampled or polygonal curve file.
        #[arg(long, group = "curve_source")]
        curve: Option<PathBuf>,
        /// The drop-shaped test curve.
        #[arg(long, group = "curve_source")]
        drop: bool,
        /// `nd_points`, `orth_cone:X,Y`, `zigzag:C1,C2,A1,A2`, `staircase:A1,A2` or `triples`.
        #[arg(long, allow_hyphen_values = true)]
        overlay: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a validation suite over the built-in corpus of norms.
    Corpus {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn metric_config(
    resolution: Option<usize>,
    probes: Option<usize>,
    eps_grid: Option<String>,
    delta_grid: Option<String>,
    tol: Option<f64>,
) -> CliResult<MetricConfig> {
    let mut cfg = MetricConfig::default();
    if let Some(n) = resolution {
        cfg.sample_points = n;
    }
    if let Some(p) = probes {
        cfg.probes = p;
    }
    if let Some(g) = eps_grid {
        cfg.eps_grid = positive_grid(&g)?;
    }
    if let Some(g) = delta_grid {
        cfg.delta_grid = positive_grid(&g)?;
    }
    if let Some(t) = tol {
        cfg.threshold = t;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<(Outcome, Option<PathBuf>)> {
    match cli.command {
        Command::NormEval { spec, vector } => Ok((cmd_norm_eval(&spec, parse_pair(&vector)?)?, None)),
        Command::Nd {
            spec,
            mode,
            resolution,
            probes,
            eps_grid,
            delta_grid,
            tol,
            triple,
            output,
        } => {
            let cfg = metric_config(resolution, probes, eps_grid, delta_grid, tol)?;
            let triple = match triple {
                None => None,
                Some(s) => match parse_list(&s)?[..] {
                    [a, b, c, d, e, f] => Some(([a, b].into(), [c, d].into(), [e, f].into())),
                    _ => return Err(CliError::Input("--triple takes six numbers".into())),
                },
            };
            Ok((cmd_nd(&spec, mode, &cfg, triple, output.format)?, output.out))
        }
        Command::Iso {
            map,
            source,
            target,
            checks,
            tol,
            seed,
            samples,
            output,
        } => Ok((
            cmd_iso(
                &map,
                &source,
                &target,
                &IsoOptions {
                    checks,
                    tol,
                    seed,
                    samples,
                },
                output.format,
            )?,
            output.out,
        )),
        Command::Plot {
            spec,
            curve,
            drop,
            overlay,
            out,
        } => {
            let source = match (spec, curve, drop) {
                (Some(p), _, _) => PlotSource::Spec(p),
                (_, Some(p), _) => PlotSource::Curve(p),
                (_, _, true) => PlotSource::Drop,
                _ => return Err(CliError::Input("plot needs --spec, --curve or --drop".into())),
            };
            Ok((cmd_plot(&source, &overlay)?, out))
        }
        Command::Corpus { suite, seed, output } => Ok((cmd_corpus(suite, seed, output.format)?, output.out)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(outcome, out)| {
        match out {
            Some(path) => std::fs::write(&path, &outcome.body)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
            None => print!("{}", outcome.body),
        }
        Ok(outcome.code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("normlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
