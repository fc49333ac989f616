use calib_cli::config::ConfigError;
use calib_cli::{run_suite, Format, Report, SuiteConfig, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};
use calib_core::calibrations::{make_calibration, CalibrationKind};
use calib_core::cheeger::{bruteforce_cheeger, dirichlet_lambda1, ball_ratio_profile, Convention, ModelSpace, WeightedGraph};
use calib_core::exterior::{comass, ComassOptions};
use calib_core::linalg::{gram_schmidt, substream};
use calib_core::subgeom::cmc::{cmc_profile, cmc_verify};
use calib_core::subgeom::frame_at;
use calib_core::{tolerances, DMatrix};
use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "calib-lab", version, about = "Numerical verification of calibration identities and inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    HalfVolume,
    Unnormalized,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write its report.
    Verify {
        /// Suite name; see `calib-lab verify --help` for the list.
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(calib_cli::SUITES))]
        suite: String,
        /// TOML or JSON configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the suite's sample count.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        /// Output file; defaults to `<suite>-<seed>.<format>`. Use `-` for stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock time in the report (makes it non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Value of a calibration on a frame, or the Omega-angle of an immersion at a point.
    Angle {
        /// Calibration name (volume, kahler, special-lagrangian, quaternionic, cayley, associative, coassociative).
        #[arg(long)]
        calibration: String,
        /// Integer parameters of the calibration, comma separated.
        #[arg(long, value_delimiter = ',')]
        params: Vec<usize>,
        /// Frame vectors separated by `;`, components by `,`. Orthonormalized before evaluation.
        #[arg(long, conflicts_with = "point")]
        frame: Option<String>,
        /// Configuration file supplying the immersion for `--point`.
        #[arg(long, requires = "point")]
        config: Option<PathBuf>,
        /// Parameter point, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
    },
    /// Comass of a calibration by multistart optimization over frames.
    Comass {
        #[arg(long)]
        calibration: String,
        #[arg(long, value_delimiter = ',')]
        params: Vec<usize>,
        #[arg(long, default_value_t = tolerances::COMASS_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cheeger constant of a weighted graph file, or ball profile of hyperbolic space.
    Cheeger {
        /// Graph file with `v volume` and `u v area` lines.
        #[arg(long, conflicts_with = "hyperbolic")]
        graph: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "half-volume")]
        convention: ConventionArg,
        /// Dimension of hyperbolic space for a ball profile.
        #[arg(long)]
        hyperbolic: Option<usize>,
        /// Radii of the ball profile, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2,5,10")]
        radii: Vec<f64>,
    },
    /// Constant mean curvature graphs in hyperbolic space times the line.
    Cmc {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Radii at which to report the height profile, comma separated.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
    },
    /// Concatenate JSON reports into one.
    ReportMerge {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value = "merged")]
        name: String,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure that maps to an exit status.
enum Failure {
    Config(String),
    Checks,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<calib_core::Error> for Failure {
    fn from(e: calib_core::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    }
}

fn write_output(out: &PathBuf, text: &str) -> Result<(), Failure> {
    if out.as_os_str() == "-" {
        stdout(text);
        Ok(())
    } else {
        std::fs::write(out, text).map_err(|e| Failure::Config(format!("cannot write {}: {e}", out.display())))
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn stdout(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print_json(value: &serde_json::Value) {
    stdout(&format!("{}\n", serde_json::to_string_pretty(value).expect("json values serialize")));
}

fn verify(
    suite: String,
    config: Option<PathBuf>,
    seed: Option<u64>,
    samples: Option<usize>,
    format: Format,
    out: Option<PathBuf>,
    timing: bool,
) -> Result<(), Failure> {
    let mut cfg = match &config {
        Some(path) => {
            let cfg = SuiteConfig::load(path)?;
            if cfg.suite != suite {
                return Err(Failure::Config(format!(
                    "config is for suite '{}', not '{suite}'",
                    cfg.suite
                )));
            }
            cfg
        }
        None => SuiteConfig::new(&suite, 0),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if samples.is_some() {
        cfg.samples = samples;
    }
    cfg.validate()?;
    let start = Instant::now();
    let mut report = run_suite(&cfg)?;
    if timing {
        report.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{}-{}.{}", cfg.suite, cfg.seed, format.extension())));
    write_output(&out, &format.render(&report))?;
    let s = &report.summary;
    eprintln!("{}: {} checks, {} passed, {} failed", report.suite, s.total, s.passed, s.failed);
    for r in report.records.iter().filter(|r| !r.pass) {
        eprintln!("  FAIL {} [{}]: residual {:e} > tol {:e}", r.check_id, r.anchor, r.residual, r.tol);
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn parse_frame(text: &str) -> Result<DMatrix<f64>, Failure> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|v| {
            v.split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| Failure::Config(format!("bad frame component '{c}': {e}"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let dim = rows.first().map_or(0, Vec::len);
    if dim == 0 || rows.iter().any(|r| r.len() != dim) {
        return Err(Failure::Config("frame vectors must be nonempty and of equal length".into()));
    }
    Ok(DMatrix::from_fn(dim, rows.len(), |i, j| rows[j][i]))
}

fn angle(
    calibration: String,
    params: Vec<usize>,
    frame: Option<String>,
    config: Option<PathBuf>,
    point: Option<Vec<f64>>,
) -> Result<(), Failure> {
    let cal = make_calibration(CalibrationKind::from_name(&calibration, &params)?)?;
    let value = match (frame, point) {
        (Some(f), _) => {
            let raw = parse_frame(&f)?;
            let q = gram_schmidt(&raw, tolerances::FRAME_RANK)?;
            cal.eval(&q)?
        }
        (None, Some(x)) => {
            let path = config.ok_or_else(|| Failure::Config("--point needs --config with an immersion".into()))?;
            let cfg = SuiteConfig::load(&path)?;
            let spec = cfg.immersion.ok_or_else(|| Failure::Config("config has no immersion".into()))?;
            let imm = spec.build()?;
            frame_at(imm.as_ref(), &x)?.cos_theta(&cal.form)?
        }
        (None, None) => return Err(Failure::Config("give --frame or --point".into())),
    };
    print_json(&json!({ "calibration": cal.name, "value": value }));
    Ok(())
}

fn comass_cmd(calibration: String, params: Vec<usize>, restarts: usize, seed: u64) -> Result<(), Failure> {
    let cal = make_calibration(CalibrationKind::from_name(&calibration, &params)?)?;
    let opts = ComassOptions { restarts, grad_tol: tolerances::COMASS_GRAD, max_iter: tolerances::COMASS_MAX_ITER, seed };
    let r = comass(&cal.form, &opts);
    print_json(&json!({
        "calibration": cal.name,
        "comass": r.value,
        "converged": r.converged,
        "iterations": r.iterations,
        "restarts": r.restarts,
        "model_frame_value": cal.eval(&cal.model_frame)?,
    }));
    Ok(())
}

fn cheeger_cmd(graph: Option<PathBuf>, convention: ConventionArg, hyperbolic: Option<usize>, radii: Vec<f64>) -> Result<(), Failure> {
    if let Some(m) = hyperbolic {
        let p = ball_ratio_profile(ModelSpace::Hyperbolic(m), &vec![0.0; m], &radii)?;
        let rows: Vec<_> = p.samples.iter().map(|s| json!({ "radius": s.radius, "ratio": s.ratio })).collect();
        print_json(&json!({ "space": format!("H^{m}"), "asymptote": p.asymptote, "profile": rows }));
        return Ok(());
    }
    let path = graph.ok_or_else(|| Failure::Config("give --graph or --hyperbolic".into()))?;
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    let g = WeightedGraph::parse(&text)?;
    let conv = match convention {
        ConventionArg::HalfVolume => Convention::HalfVolume,
        ConventionArg::Unnormalized => Convention::Unnormalized,
    };
    let h = bruteforce_cheeger(&g, conv)?;
    let witness = h.witness.vertices().unwrap_or(&[]).to_vec();
    let dirichlet = dirichlet_lambda1(&g, &witness).ok();
    print_json(&json!({
        "vertices": g.len(),
        "cheeger": h.value,
        "witness": witness,
        "lambda1": dirichlet.as_ref().map(|d| d.lambda1),
        "upper_bound": dirichlet.as_ref().map(|d| d.cheeger_upper),
    }));
    Ok(())
}

fn cmc_cmd(m: usize, c: f64, samples: usize, seed: u64, radii: Vec<f64>) -> Result<(), Failure> {
    let mut rng = substream(seed, 0);
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|_| {
            let r: f64 = rng.random_range(0.0..0.85);
            let mut x: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            x.iter_mut().for_each(|v| *v *= r / norm);
            x
        })
        .collect();
    let v = cmc_verify(m, c, &points)?;
    let profile: Vec<_> = radii
        .iter()
        .map(|&r| Ok(json!({ "radius": r, "height": cmc_profile(m, c, r, tolerances::QUADRATURE_ABS)? })))
        .collect::<Result<_, calib_core::Error>>()?;
    print_json(&json!({ "verification": v, "profile": profile }));
    Ok(())
}

fn report_merge(reports: Vec<PathBuf>, name: String, format: Format, out: Option<PathBuf>) -> Result<(), Failure> {
    let loaded: Vec<Report> = reports
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: line {}: {e}", p.display(), e.line())))
        })
        .collect::<Result<_, _>>()?;
    let seed = loaded.first().map_or(0, |r| r.seed);
    let merged = Report::merge(&name, seed, &loaded);
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{name}-{seed}.{}", format.extension())));
    write_output(&out, &format.render(&merged))?;
    if merged.all_pass() {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

/// Caps the worker pool at `CALIB_LAB_THREADS` when set.
fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("CALIB_LAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Failure::Config(format!("CALIB_LAB_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Verify { suite, config, seed, samples, format, out, timing } => {
            verify(suite, config, seed, samples, format_of(format), out, timing)
        }
        Command::Angle { calibration, params, frame, config, point } => angle(calibration, params, frame, config, point),
        Command::Comass { calibration, params, restarts, seed } => comass_cmd(calibration, params, restarts, seed),
        Command::Cheeger { graph, convention, hyperbolic, radii } => cheeger_cmd(graph, convention, hyperbolic, radii),
        Command::Cmc { m, c, samples, seed, radii } => cmc_cmd(m, c, samples, seed, radii),
        Command::ReportMerge { reports, name, format, out } => report_merge(reports, name, format_of(format), out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(()) => EXIT_PASS,
        Err(Failure::Checks) => EXIT_FAIL,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
    };
    ExitCode::from(code as u8)
}
