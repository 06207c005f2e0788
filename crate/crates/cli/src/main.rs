use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};
use supertrace_core::spectral::{DilatonProfile, FitGrid, FREE_GRID};
use supertrace_lab::{emit_report, run_suite, Config, Format, GeometrySpec, LabError, DEFAULT_GRID, DEFAULT_SEED, THREADS_ENV};

const AFTER_HELP: &str = "\
Suites: algebra, contraction, gauss-bonnet, heat-crosscheck, invariance, spectral, all.

The default seed is 0x00D11A70 (13703792). Identical flags and seed give
byte-identical JSON and CSV output; runtimes are only recorded with --timings.

Exit codes: 0 all cases pass, 1 some case fails, 2 usage error, 3 I/O error.

SUPERTRACE_LAB_THREADS caps the number of worker threads.";

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim().replace('_', "");
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed '{s}': {e}"))
}

#[derive(Debug, Parser)]
#[command(name = "supertrace-lab", version, about = "Runs the supertrace verification suites", after_help = AFTER_HELP)]
#[command(group(ArgGroup::new("format").args(["json", "csv", "text"])))]
struct Cli {
    /// Suite to run
    #[arg(long, default_value = "all")]
    suite: String,

    /// Seed for every randomised case (decimal or 0x-prefixed hex)
    #[arg(long, default_value_t = DEFAULT_SEED, value_parser = parse_seed)]
    seed: u64,

    /// Emit JSON
    #[arg(long)]
    json: bool,

    /// Emit CSV
    #[arg(long)]
    csv: bool,

    /// Emit a text table (the default)
    #[arg(long)]
    text: bool,

    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,

    /// Extra Gauss–Bonnet geometry, e.g. sphere:m=4,r=2 or torus:m=2,side=1
    #[arg(long)]
    geometry: Option<String>,

    /// Dilaton profile for the spectral suite, e.g. c1=1,c2=0.3
    #[arg(long)]
    phi: Option<String>,

    /// Interval grid size for the spectral suite
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,

    /// Smallest time of the free-interval fit
    #[arg(long)]
    tmin: Option<f64>,

    /// Largest time of the free-interval fit
    #[arg(long)]
    tmax: Option<f64>,

    /// Number of terms in the free-interval fit
    #[arg(long)]
    terms: Option<usize>,

    /// Multiplies every tolerance
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,

    /// Record per-case runtimes
    #[arg(long)]
    timings: bool,
}

fn configure_threads() -> Result<(), LabError> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| LabError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| LabError::Usage(e.to_string()))
}

fn config(cli: &Cli) -> Result<Config, LabError> {
    let geometry = cli.geometry.as_deref().map(str::parse::<GeometrySpec>).transpose()?;
    let phi = cli.phi.as_deref().map(str::parse::<DilatonProfile>).transpose()?;
    let mut free_grid: FitGrid = FREE_GRID;
    if let Some(t) = cli.tmin {
        free_grid.t_min = t;
    }
    if let Some(t) = cli.tmax {
        free_grid.t_max = t;
    }
    if let Some(k) = cli.terms {
        free_grid.terms = k;
    }
    if !(free_grid.t_min > 0.0 && free_grid.t_max > free_grid.t_min) {
        return Err(LabError::Usage(format!("need 0 < tmin < tmax, got {} and {}", free_grid.t_min, free_grid.t_max)));
    }
    Ok(Config {
        seed: cli.seed,
        geometry,
        phi,
        grid: cli.grid,
        free_grid,
        tolerance_scale: cli.tolerance_scale,
        timings: cli.timings,
    })
}

fn run(cli: Cli) -> Result<bool, LabError> {
    configure_threads()?;
    let cfg = config(&cli)?;
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Text
    };
    let out = run_suite(&cli.suite, &cfg)?;
    emit_report(&out.reports, &out.tables, format, cli.out.as_deref())?;
    Ok(out.reports.iter().all(|r| r.pass))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("supertrace-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
