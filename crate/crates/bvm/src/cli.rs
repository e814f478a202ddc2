//! Command-line interface: one configuration file and one subcommand per run.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bvm_core::process::classify_recurrence;
use bvm_core::spectrum::{
    classify as classify_point, critical_escape_test, eigen_residual, fibered_orbit_general,
    RadiusSource, SetKind, SpectralParams, DEFAULT_BUDGET,
};
use bvm_core::{
    AddingMachine, BigRational, BigUint, Error as CoreError, FgNumeration, PathRanker, PathState,
    VershikSystem,
};
use clap::{Args, Parser, Subcommand};

use crate::config::{self, Arithmetic, ConfigError, RunConfig};
use crate::format::{self, ParseError};
use crate::{parallel, report};

/// Radius for the general l×l orbit when none is configured.
pub const GENERAL_DEFAULT_RADIUS: f64 = 1e6;

#[derive(Debug, Parser)]
#[command(
    name = "bvm",
    version,
    about = "Bratteli-Vershik stochastic adding machines"
)]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the diagram, ordering and schedule.
    Validate,
    /// Print the (F,G) digits of N.
    Encode { n: BigUint },
    /// Print the integer with the given digit string.
    Decode { digits: String },
    /// Print the path of N and of its Vershik successor.
    Successor { n: BigUint },
    /// Print row N of the transition operator.
    Row { n: BigUint },
    /// Write rows 0..size of the transition operator as CSV triplets.
    Operator {
        #[arg(long)]
        size: Option<u64>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run seeded trajectories of the random Vershik map.
    Simulate {
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicas: Option<u64>,
        /// Integer label of the starting state.
        #[arg(long)]
        start: Option<BigUint>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Transience / null / positive recurrence of the chain.
    Classify,
    /// Spectral sets.
    Spectrum {
        #[command(subcommand)]
        command: SpectrumCommand,
    },
    /// Eigen-residual of the digit-product vector over the first K rows.
    Residual {
        #[arg(allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        rows: u64,
        #[command(flatten)]
        numerics: Numerics,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Numerics {
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum SpectrumCommand {
    /// Classify one spectral parameter.
    Probe {
        #[arg(allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        set: Option<String>,
        #[command(flatten)]
        numerics: Numerics,
    },
    /// Render an escape-time raster as PGM (or PPM).
    Render {
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// RE_MIN,RE_MAXxIM_MIN,IM_MAX:WxH
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long)]
        set: Option<String>,
        /// Write a colour PPM instead of a gray PGM.
        #[arg(long)]
        color: bool,
        #[command(flatten)]
        numerics: Numerics,
    },
    /// Iterate the general fibered map on C^l from the diagonal seed of λ.
    Orbit {
        #[arg(allow_hyphen_values = true)]
        lambda: String,
        #[command(flatten)]
        numerics: Numerics,
    },
    /// Escape of the critical orbit started at (1 - p)/p.
    Critical {
        #[command(flatten)]
        numerics: Numerics,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run() -> ExitCode {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut out = Vec::new();
    let status = dispatch(&cli, &mut out);
    let _ = std::io::stdout().write_all(&out);
    match status {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::FAILURE
        }
    }
}

fn load(cli: &Cli) -> CliResult<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| usage("--config PATH is required"))?;
    Ok(config::load(path)?)
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn numeration(cfg: &RunConfig) -> CliResult<FgNumeration> {
    Ok(FgNumeration::new(cfg.diagram())?)
}

fn state_of(sys: &VershikSystem, n: &BigUint) -> PathState {
    match FgNumeration::new(sys.diagram()) {
        Ok(num) => num.state_of(sys, n),
        Err(_) => PathRanker::new(sys).unrank(n),
    }
}

fn set_of(flag: Option<&str>, default: SetKind) -> CliResult<SetKind> {
    match flag {
        None => Ok(default),
        Some(s) => {
            config::parse_set(s).ok_or_else(|| usage(format!("unknown set `{}` (F, E, pt)", s)))
        }
    }
}

/// Spectral parameters from the configuration, with command-line overrides.
pub fn spectral_params(cfg: &RunConfig, numerics: &Numerics) -> CliResult<SpectralParams> {
    let s = &cfg.spectrum;
    let mut params = SpectralParams::from_diagram(cfg.diagram(), cfg.schedule()?.clone())?
        .with_budget(numerics.budget.or(s.budget).unwrap_or(DEFAULT_BUDGET));
    if let Some(r) = numerics.radius.or(s.radius) {
        params = params.with_radius(r)?;
    }
    if let Some(t) = s.dp_threshold {
        params.dp_threshold = t;
    }
    if let Some(w) = s.dp_window {
        params.dp_window = w;
    }
    Ok(params)
}

fn radius_name(src: RadiusSource) -> &'static str {
    match src {
        RadiusSource::Analytic => "analytic",
        RadiusSource::Heuristic => "heuristic",
        RadiusSource::User => "user",
    }
}

fn format_row<P>(
    row: impl IntoIterator<Item = (BigUint, P)>,
    fmt: impl Fn(&P) -> String,
) -> String {
    let entries: Vec<String> = row
        .into_iter()
        .map(|(k, p)| format!("{}: {}", k, fmt(&p)))
        .collect();
    format!("{{{}}}", entries.join(", "))
}

pub fn dispatch(cli: &Cli, out: &mut Vec<u8>) -> CliResult<()> {
    let cfg = load(cli)?;
    let mut text = String::new();
    match &cli.command {
        Command::Validate => text = report::validate(&cfg),
        Command::Encode { n } => {
            let num = numeration(&cfg)?;
            text = format!("{}\n", format::format_digits(num.encode(n).pairs()));
        }
        Command::Decode { digits } => {
            let num = numeration(&cfg)?;
            let pairs = format::parse_digits(digits)?;
            text = format!("{}\n", num.decode_pairs(&pairs)?);
        }
        Command::Successor { n } => {
            let sys = &cfg.system;
            let x = state_of(sys, n);
            let y = sys.successor(&x);
            let _ = writeln!(text, "n = {}", n);
            let _ = writeln!(text, "path = {}", format::format_path(&x.triples()));
            let _ = writeln!(text, "successor = {}", format::format_path(&y.triples()));
            if let Ok(num) = FgNumeration::new(sys.diagram()) {
                let _ = writeln!(
                    text,
                    "digits = {}",
                    format::format_digits(num.path_digits(&x).pairs())
                );
                let _ = writeln!(
                    text,
                    "successor_digits = {}",
                    format::format_digits(num.path_digits(&y).pairs())
                );
            }
        }
        Command::Row { n } => {
            let machine = cfg.machine()?;
            text = match cfg.arithmetic {
                Arithmetic::Rational => {
                    format_row(machine.row::<BigRational>(n), format::format_rational)
                }
                Arithmetic::Float => format_row(machine.row::<f64>(n), |p| format::format_f64(*p)),
            };
            text.push('\n');
        }
        Command::Operator { size, out: path } => {
            let machine = cfg.machine()?;
            let size = size.unwrap_or(cfg.operator_size);
            if size == 0 {
                return Err(usage("--size must be at least 1"));
            }
            let mut csv = Vec::new();
            let res = match cfg.arithmetic {
                Arithmetic::Rational => format::write_triplets(
                    &mut csv,
                    &parallel::operator::<BigRational>(&machine, size),
                    format::format_rational,
                ),
                Arithmetic::Float => format::write_triplets(
                    &mut csv,
                    &parallel::operator::<f64>(&machine, size),
                    |p| format::format_f64(*p),
                ),
            };
            res.map_err(|source| CliError::Io {
                path: "operator".into(),
                source,
            })?;
            emit(path.as_deref(), csv, out)?;
        }
        Command::Simulate {
            steps,
            seed,
            replicas,
            start,
            out: path,
        } => {
            let machine = cfg.machine()?;
            let sim = &cfg.simulate;
            let steps = steps.unwrap_or(sim.steps);
            let seed = seed.unwrap_or(sim.seed);
            let replicas = replicas.unwrap_or(sim.replicas);
            if replicas == 0 {
                return Err(usage("--replicas must be at least 1"));
            }
            let start = start.clone().unwrap_or_else(|| BigUint::from(sim.start));
            let x = machine.state_of(&start);
            let runs = parallel::simulate(&machine, &x, steps, seed, replicas);
            let body = report::simulation(&machine, seed, &start, &runs);
            emit(path.as_deref(), body.into_bytes(), out)?;
        }
        Command::Classify => {
            let machine = cfg.machine()?;
            let c = classify_recurrence(machine.system().diagram(), machine.schedule());
            text = report::classify(&machine, &c);
        }
        Command::Spectrum { command } => text = spectrum(&cfg, command)?,
        Command::Residual {
            lambda,
            rows,
            numerics,
        } => {
            let lambda = format::parse_complex(lambda)?;
            let machine: AddingMachine = cfg.machine()?;
            let params = spectral_params(&cfg, numerics)?;
            let r = eigen_residual(lambda, &machine, &params, *rows)?;
            let _ = writeln!(text, "lambda = {}", format::format_complex(lambda));
            let _ = writeln!(text, "rows = {}", rows);
            let _ = writeln!(text, "residual = {:e}", r);
        }
    }
    out.extend_from_slice(text.as_bytes());
    Ok(())
}

fn emit(path: Option<&Path>, bytes: Vec<u8>, out: &mut Vec<u8>) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, &bytes),
        None => {
            out.extend(bytes);
            Ok(())
        }
    }
}

fn spectrum(cfg: &RunConfig, command: &SpectrumCommand) -> CliResult<String> {
    let mut text = String::new();
    match command {
        SpectrumCommand::Probe {
            lambda,
            set,
            numerics,
        } => {
            let lambda = format::parse_complex(lambda)?;
            let set = set_of(set.as_deref(), cfg.spectrum.set)?;
            let params = spectral_params(cfg, numerics)?;
            let r = classify_point(lambda, &params, set);
            text = report::probe(&r, params.budget, params.radius());
            let _ = writeln!(
                text,
                "radius_source = {}",
                radius_name(params.radius_source())
            );
        }
        SpectrumCommand::Render {
            out,
            grid,
            set,
            color,
            numerics,
        } => {
            let grid = match grid {
                Some(g) => format::parse_grid(g)?,
                None => cfg.spectrum.grid,
            };
            let set = set_of(set.as_deref(), cfg.spectrum.set)?;
            let params = spectral_params(cfg, numerics)?;
            let raster = parallel::render(&grid, &params, set);
            let ppm = *color
                || cfg.spectrum.color
                || out
                    .extension()
                    .is_some_and(|e| e.eq_ignore_ascii_case("ppm"));
            let bytes = if ppm {
                format::encode_ppm(&raster, params.budget)
            } else {
                format::encode_pgm(&raster, params.budget)
            };
            write_file(out, &bytes)?;
            let _ = writeln!(text, "out = {}", out.display());
            let _ = writeln!(text, "set = {}", report::set_name(set));
            let _ = writeln!(text, "size = {}x{}", raster.width, raster.height);
            let _ = writeln!(text, "bounded = {}", raster.bounded_count());
            let _ = writeln!(text, "budget = {}", params.budget);
            let _ = writeln!(text, "radius = {}", params.radius());
            let _ = writeln!(
                text,
                "radius_source = {}",
                radius_name(params.radius_source())
            );
        }
        SpectrumCommand::Orbit { lambda, numerics } => {
            let lambda = format::parse_complex(lambda)?;
            let d = cfg.diagram();
            let schedule = cfg.schedule()?;
            let l = d.vertex_count(1);
            let matrices: Vec<_> = (1..=d.explicit_levels())
                .map(|k| d.incidence(k).clone())
                .collect();
            let seed = bvm_core::spectrum::affine(lambda, schedule.p_f64(1));
            let budget = numerics
                .budget
                .or(cfg.spectrum.budget)
                .unwrap_or(DEFAULT_BUDGET);
            let radius = numerics
                .radius
                .or(cfg.spectrum.radius)
                .unwrap_or(GENERAL_DEFAULT_RADIUS);
            let o = fibered_orbit_general(&vec![seed; l], &matrices, schedule, budget, radius)?;
            let _ = writeln!(text, "lambda = {}", format::format_complex(lambda));
            let _ = writeln!(text, "dimension = {}", l);
            let _ = writeln!(text, "verdict = {}", report::verdict_name(o.verdict));
            let _ = writeln!(
                text,
                "escape_index = {}",
                o.escape_index
                    .map_or_else(|| "none".into(), |i| i.to_string())
            );
            let _ = writeln!(text, "log_growth = {}", o.log_growth);
            let _ = writeln!(text, "budget = {}", budget);
            let _ = writeln!(text, "radius = {}", radius);
        }
        SpectrumCommand::Critical { numerics } => {
            let params = spectral_params(cfg, numerics)?;
            let c = critical_escape_test(&params);
            let _ = writeln!(text, "applicable = {}", c.applicable);
            let _ = writeln!(text, "start = {}", c.start);
            let _ = writeln!(text, "escaped = {}", c.escaped);
            let _ = writeln!(
                text,
                "escape_index = {}",
                c.escape_index
                    .map_or_else(|| "none".into(), |i| i.to_string())
            );
        }
    }
    Ok(text)
}
