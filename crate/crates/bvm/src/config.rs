//! TOML run configuration.
//!
//! ```toml
//! arithmetic = "rational"          # or "float" (default)
//!
//! [diagram]
//! levels = 2                       # or a list of level sizes l(0), l(1), …
//! incidence = [[[2, 1], [3, 1]]]   # one matrix per explicit level; the last repeats
//! ordering = [[[1, 2], [1, 2]]]    # optional, canonical when omitted
//! x0_tail = 1                      # optional tail vertex of the minimal path
//!
//! [schedule]
//! kind = "explicit"                # constant | explicit | geometric | one_minus_geometric
//! values = ["3/10", 0.5, "7/10"]
//! tail = "cycle"                   # repeat_last | cycle | constant (with tail_value)
//!
//! [spectrum]
//! budget = 64
//! set = "E"                        # F | E | pt
//! grid = { re = [-2.0, 2.0], im = [-2.0, 2.0], width = 512, height = 512 }
//!
//! [simulate]
//! steps = 1000
//! seed = 7
//! replicas = 4
//! ```

use std::fmt;
use std::path::Path;

use bvm_core::spectrum::{GridSpec, SetKind};
use bvm_core::{
    AddingMachine, BratteliDiagram, Error as CoreError, IncidenceMatrix, OrderingMatrix,
    ProbSchedule, TailRule, VershikSystem,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    #[default]
    Float,
    Rational,
}

/// One problem with one key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldError {
    pub key: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Syntax(String),
    #[error("{}", join_lines(.0))]
    Fields(Vec<FieldError>),
}

fn join_lines(errs: &[FieldError]) -> String {
    errs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}

impl ConfigError {
    pub fn fields(&self) -> &[FieldError] {
        match self {
            ConfigError::Fields(v) => v,
            _ => &[],
        }
    }
}

/// A number written as an integer, a float, a decimal string or `"num/den"`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    fn rational(&self) -> Option<BigRational> {
        match self {
            Num::Int(i) => Some(BigRational::from_integer(BigInt::from(*i))),
            Num::Float(f) if f.is_finite() => parse_rational(&format!("{}", f)),
            Num::Float(_) => None,
            Num::Text(s) => parse_rational(s),
        }
    }
}

/// Parses `"3/10"`, `"0.3"`, `"-1.25e-3"` or `"7"` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{}{}", int, frac).parse().unwrap_or_default();
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(all);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum LevelsSpec {
    Count(usize),
    Sizes(Vec<usize>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagram {
    levels: LevelsSpec,
    stationary: Option<bool>,
    incidence: Vec<Vec<Vec<u32>>>,
    ordering: Option<Vec<Vec<Vec<u32>>>>,
    x0_tail: Option<u32>,
    probe_depth: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    kind: String,
    p: Option<Num>,
    values: Option<Vec<Num>>,
    tail: Option<String>,
    tail_value: Option<Num>,
    ratio: Option<Num>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    re: [f64; 2],
    im: [f64; 2],
    width: usize,
    height: usize,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpectrum {
    budget: Option<usize>,
    radius: Option<f64>,
    set: Option<String>,
    grid: Option<RawGrid>,
    dp_threshold: Option<f64>,
    dp_window: Option<usize>,
    color: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulate {
    steps: Option<u64>,
    seed: Option<u64>,
    replicas: Option<u64>,
    start: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOperator {
    size: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    arithmetic: Arithmetic,
    diagram: RawDiagram,
    schedule: Option<RawSchedule>,
    #[serde(default)]
    spectrum: RawSpectrum,
    #[serde(default)]
    simulate: RawSimulate,
    #[serde(default)]
    operator: RawOperator,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSettings {
    pub budget: Option<usize>,
    pub radius: Option<f64>,
    pub set: SetKind,
    pub grid: GridSpec,
    pub dp_threshold: Option<f64>,
    pub dp_window: Option<usize>,
    pub color: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulateSettings {
    pub steps: u64,
    pub seed: u64,
    pub replicas: u64,
    pub start: u64,
}

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub arithmetic: Arithmetic,
    pub system: VershikSystem,
    pub schedule: Option<ProbSchedule>,
    pub spectrum: SpectrumSettings,
    pub simulate: SimulateSettings,
    pub operator_size: u64,
}

pub const DEFAULT_GRID_SIDE: usize = 512;

impl RunConfig {
    pub fn diagram(&self) -> &BratteliDiagram {
        self.system.diagram()
    }

    pub fn schedule(&self) -> Result<&ProbSchedule, ConfigError> {
        self.schedule.as_ref().ok_or_else(|| {
            ConfigError::Fields(vec![FieldError {
                key: "schedule".into(),
                message: "section is required for this command".into(),
            }])
        })
    }

    pub fn machine(&self) -> Result<AddingMachine, ConfigError> {
        Ok(AddingMachine::new(
            self.system.clone(),
            self.schedule()?.clone(),
        ))
    }
}

pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let mut errs = Vec::new();
    let system = diagram(&raw.diagram, &mut errs);
    let schedule = raw.schedule.as_ref().and_then(|s| schedule(s, &mut errs));
    let spectrum = spectrum(&raw.spectrum, &mut errs);
    let simulate = SimulateSettings {
        steps: raw.simulate.steps.unwrap_or(1000),
        seed: raw.simulate.seed.unwrap_or(0),
        replicas: raw.simulate.replicas.unwrap_or(1),
        start: raw.simulate.start.unwrap_or(0),
    };
    if simulate.replicas == 0 {
        errs.push(field("simulate.replicas", "must be at least 1"));
    }
    let operator_size = raw.operator.size.unwrap_or(16);
    if operator_size == 0 {
        errs.push(field("operator.size", "must be at least 1"));
    }
    match (system, errs.is_empty()) {
        (Some(system), true) => Ok(RunConfig {
            arithmetic: raw.arithmetic,
            system,
            schedule,
            spectrum,
            simulate,
            operator_size,
        }),
        _ => Err(ConfigError::Fields(errs)),
    }
}

fn field(key: impl Into<String>, message: impl Into<String>) -> FieldError {
    FieldError {
        key: key.into(),
        message: message.into(),
    }
}

fn core_field(err: &CoreError) -> FieldError {
    match err {
        CoreError::InvalidOrdering { level, row, .. } => field(
            format!("diagram.ordering[{}][{}]", level - 1, row - 1),
            err.to_string(),
        ),
        CoreError::ZeroRow(_) | CoreError::ZeroColumn(_) | CoreError::MalformedMatrix(_) => {
            field("diagram.incidence", err.to_string())
        }
        CoreError::DimensionMismatch { level, .. } if *level > 0 => {
            field(format!("diagram.incidence[{}]", level - 1), err.to_string())
        }
        CoreError::DimensionMismatch { .. } => field("diagram.levels", err.to_string()),
        CoreError::AmbiguousMinimalPath(_)
        | CoreError::InvalidTailVertex { .. }
        | CoreError::DegenerateMinimalPath { .. } => field("diagram.x0_tail", err.to_string()),
        _ => field("diagram", err.to_string()),
    }
}

fn diagram(raw: &RawDiagram, errs: &mut Vec<FieldError>) -> Option<VershikSystem> {
    let before = errs.len();
    if raw.incidence.is_empty() {
        errs.push(field(
            "diagram.incidence",
            "at least one matrix is required",
        ));
        return None;
    }
    let mut mats = Vec::new();
    for (k, m) in raw.incidence.iter().enumerate() {
        match IncidenceMatrix::new(m) {
            Ok(m) => mats.push(m),
            Err(e) => errs.push(field(format!("diagram.incidence[{}]", k), e.to_string())),
        }
    }
    let mut ords = Vec::new();
    match &raw.ordering {
        None => ords.resize(raw.incidence.len(), None),
        Some(list) if list.len() != raw.incidence.len() => errs.push(field(
            "diagram.ordering",
            format!(
                "{} ordering matrices for {} incidence matrices",
                list.len(),
                raw.incidence.len()
            ),
        )),
        Some(list) => {
            for (k, q) in list.iter().enumerate() {
                match OrderingMatrix::new(q) {
                    Ok(q) => ords.push(Some(q)),
                    Err(e) => errs.push(field(format!("diagram.ordering[{}]", k), e.to_string())),
                }
            }
        }
    }
    if errs.len() > before {
        return None;
    }
    let stationary = raw.stationary.unwrap_or(mats.len() == 1);
    if stationary && mats.len() != 1 {
        errs.push(field(
            "diagram.stationary",
            "a stationary diagram takes exactly one incidence matrix",
        ));
        return None;
    }
    let built = if stationary {
        let l = match raw.levels {
            LevelsSpec::Count(l) => l,
            LevelsSpec::Sizes(ref s) if s.len() == 2 && s[0] == s[1] => s[0],
            LevelsSpec::Sizes(_) => {
                errs.push(field(
                    "diagram.levels",
                    "a stationary diagram takes a single vertex count",
                ));
                return None;
            }
        };
        let m = mats.pop().expect("one matrix");
        let q = ords.pop().flatten();
        BratteliDiagram::assemble_stationary(l, m, q)
    } else {
        let sizes = match raw.levels {
            LevelsSpec::Sizes(ref s) => s.clone(),
            LevelsSpec::Count(l) => vec![l; mats.len() + 1],
        };
        BratteliDiagram::from_levels(&sizes, mats.into_iter().zip(ords).collect())
    };
    let mut d = match built {
        Ok(d) => d,
        Err(e) => {
            errs.push(core_field(&e));
            return None;
        }
    };
    if let Some(depth) = raw.probe_depth {
        if depth == 0 {
            errs.push(field("diagram.probe_depth", "must be at least 1"));
            return None;
        }
        d = d.with_probe_depth(depth);
    }
    let simple = d.check_simplicity(d.probe_depth());
    if !simple.simple {
        errs.push(field(
            "diagram.incidence",
            format!(
                "diagram is not simple: no positive product starting at level {} within {} levels",
                simple.failing_level.unwrap_or(0),
                d.probe_depth()
            ),
        ));
        return None;
    }
    let sys = match raw.x0_tail {
        Some(v) => VershikSystem::with_tail_vertex(d, v),
        None => VershikSystem::new(d),
    };
    match sys {
        Ok(s) => Some(s),
        Err(e) => {
            errs.push(core_field(&e));
            None
        }
    }
}

fn probability(key: &str, n: &Num, errs: &mut Vec<FieldError>) -> Option<BigRational> {
    match n.rational() {
        None => {
            errs.push(field(key, "not a number"));
            None
        }
        Some(p) if !p.is_positive() || p > BigRational::one() => {
            errs.push(field(
                key,
                format!(
                    "probability {} must lie in (0, 1] (probabilities are nonnull)",
                    p
                ),
            ));
            None
        }
        Some(p) => Some(p),
    }
}

fn required<'a>(key: &str, v: &'a Option<Num>, errs: &mut Vec<FieldError>) -> Option<&'a Num> {
    if v.is_none() {
        errs.push(field(key, "missing"));
    }
    v.as_ref()
}

fn schedule(raw: &RawSchedule, errs: &mut Vec<FieldError>) -> Option<ProbSchedule> {
    let before = errs.len();
    let built = match raw.kind.as_str() {
        "constant" => {
            let p = required("schedule.p", &raw.p, errs)?;
            ProbSchedule::constant(probability("schedule.p", p, errs)?)
        }
        "explicit" => {
            let Some(values) = &raw.values else {
                errs.push(field("schedule.values", "missing"));
                return None;
            };
            if values.is_empty() {
                errs.push(field("schedule.values", "needs at least one value"));
                return None;
            }
            let ps: Vec<Option<BigRational>> = values
                .iter()
                .enumerate()
                .map(|(i, v)| probability(&format!("schedule.values[{}]", i), v, errs))
                .collect();
            let tail = match raw.tail.as_deref().unwrap_or("repeat_last") {
                "repeat_last" => TailRule::RepeatLast,
                "cycle" => TailRule::Cycle,
                "constant" => {
                    let t = required("schedule.tail_value", &raw.tail_value, errs)?;
                    TailRule::Constant(probability("schedule.tail_value", t, errs)?)
                }
                other => {
                    errs.push(field(
                        "schedule.tail",
                        format!(
                            "unknown tail rule `{}` (repeat_last, cycle, constant)",
                            other
                        ),
                    ));
                    return None;
                }
            };
            if errs.len() > before {
                return None;
            }
            ProbSchedule::explicit(ps.into_iter().map(Option::unwrap).collect(), tail)
        }
        "geometric" => {
            let q = required("schedule.ratio", &raw.ratio, errs)?;
            ProbSchedule::geometric(probability("schedule.ratio", q, errs)?)
        }
        "one_minus_geometric" => {
            let q = required("schedule.ratio", &raw.ratio, errs)?;
            let q = probability("schedule.ratio", q, errs)?;
            if q.is_one() {
                errs.push(field("schedule.ratio", "must be below 1"));
                return None;
            }
            ProbSchedule::one_minus_geometric(q)
        }
        other => {
            errs.push(field(
                "schedule.kind",
                format!(
                    "unknown kind `{}` (constant, explicit, geometric, one_minus_geometric)",
                    other
                ),
            ));
            return None;
        }
    };
    match built {
        Ok(s) => Some(s),
        Err(e) => {
            errs.push(field("schedule", e.to_string()));
            None
        }
    }
}

pub fn parse_set(s: &str) -> Option<SetKind> {
    match s {
        "F" | "f" => Some(SetKind::F),
        "E" | "e" => Some(SetKind::E),
        "pt" | "PT" | "Pt" => Some(SetKind::Pt),
        _ => None,
    }
}

fn spectrum(raw: &RawSpectrum, errs: &mut Vec<FieldError>) -> SpectrumSettings {
    let set = match raw.set.as_deref() {
        None => SetKind::E,
        Some(s) => parse_set(s).unwrap_or_else(|| {
            errs.push(field(
                "spectrum.set",
                format!("unknown set `{}` (F, E, pt)", s),
            ));
            SetKind::E
        }),
    };
    let default_grid = GridSpec::new(
        (-2.0, 2.0),
        (-2.0, 2.0),
        DEFAULT_GRID_SIDE,
        DEFAULT_GRID_SIDE,
    )
    .expect("default grid");
    let grid = match &raw.grid {
        None => default_grid,
        Some(g) => GridSpec::new((g.re[0], g.re[1]), (g.im[0], g.im[1]), g.width, g.height)
            .unwrap_or_else(|e| {
                errs.push(field("spectrum.grid", e.to_string()));
                default_grid
            }),
    };
    if let Some(r) = raw.radius {
        if !(r.is_finite() && r > 0.0) {
            errs.push(field("spectrum.radius", "must be positive and finite"));
        }
    }
    if let Some(t) = raw.dp_threshold {
        if !(t.is_finite() && t > 0.0) {
            errs.push(field(
                "spectrum.dp_threshold",
                "must be positive and finite",
            ));
        }
    }
    if raw.dp_window == Some(0) {
        errs.push(field("spectrum.dp_window", "must be at least 1"));
    }
    SpectrumSettings {
        budget: raw.budget,
        radius: raw.radius,
        set,
        grid,
        dp_threshold: raw.dp_threshold,
        dp_window: raw.dp_window,
        color: raw.color.unwrap_or(false),
    }
}
