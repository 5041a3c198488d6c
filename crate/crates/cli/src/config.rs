//! Sectioned `key = value` experiment files.
//!
//! ```text
//! [problem]
//! family = k
//! maps = sin,cos
//! x0 = 3
//! [viscosity]
//! [schedule]
//! [stop]
//! ```
//!
//! All four sections must appear; keys other than `family`, `maps` and
//! `x0` fall back to the reproduction defaults. [`ExperimentConfig`]'s
//! `Display` writes every key, so its output parses back to the same
//! config.

use std::collections::HashMap;
use std::fmt;

use viscofix_core::family::{Extension, KFamily, WFamily};
use viscofix_core::hilbert::{ContractionMap, ConvexSet, Matrix, NonexpansiveMap, Point, StrongPositiveOp};
use viscofix_core::schedule::{LambdaSchedule, ScalarSchedule, ScheduleBundle};
use viscofix_core::solver::{ProblemSpec, SolveOptions, StopRule};

/// Lipschitz constant given to `f = const:c` maps.
pub const CONST_F_ALPHA: f64 = 0.5;

const SECTIONS: [&str; 4] = ["problem", "viscosity", "schedule", "stop"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    W,
    K,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSpec {
    /// `id`, `sin`, `cos`, `atan`.
    Builtin(String),
    /// `proj:lo:hi`, the projection onto `[lo, hi]` in every coordinate.
    Interval(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SetSpec {
    All,
    /// Same bounds in every coordinate.
    Box(f64, f64),
    Ball { center: Vec<f64>, radius: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum FSpec {
    Linear(f64),
    Const(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ASpec {
    ScaledIdentity(f64),
    Diag(Vec<f64>),
}

/// Points the VI residual is maximised over.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleSpec {
    /// `count` evenly spaced scalars in `[lo, hi]`; one-dimensional only.
    Grid { lo: f64, hi: f64, count: usize },
    /// `count` uniform draws from the box `[lo, hi]^d`, seeded by `--seed`.
    Random { lo: f64, hi: f64, count: usize },
}

/// Reference point for the `delta` trace column.
#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// Fixed point of the frozen map (`W_N` or `K` with `N` = number of maps).
    Oracle,
    None,
    Value(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub family: FamilyKind,
    pub maps: Vec<MapSpec>,
    pub weights: Vec<f64>,
    pub extend: Extension,
    pub set: SetSpec,
    pub x0: Vec<f64>,
    pub freeze: Option<usize>,
    pub force: bool,
    pub vi_samples: Option<SampleSpec>,
    pub reference: Reference,
    pub f: FSpec,
    pub gamma: f64,
    pub a: ASpec,
    pub alpha: ScalarSchedule,
    pub beta: ScalarSchedule,
    pub gammaseq: ScalarSchedule,
    pub delta: ScalarSchedule,
    pub d: f64,
    pub eps: f64,
    pub max_iter: usize,
}

/// One problem found while reading a config; `line` is 1-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<ConfigError>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

/// Weights `1/2, 1/3, 1/4, ...` for the first `n` maps.
pub fn default_weights(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1.0 / (i as f64 + 2.0)).collect()
}

impl ExperimentConfig {
    /// The reproduction setup around the given family, maps and start.
    pub fn reproduction(family: FamilyKind, maps: Vec<MapSpec>, x0: Vec<f64>) -> Self {
        let b = ScheduleBundle::reproduction();
        let weights = default_weights(maps.len());
        let d = b.d();
        ExperimentConfig {
            family,
            maps,
            weights,
            extend: Extension::Cycle,
            set: SetSpec::All,
            x0,
            freeze: None,
            force: false,
            vi_samples: None,
            reference: Reference::Oracle,
            f: FSpec::Linear(0.5),
            gamma: 1.0,
            a: ASpec::ScaledIdentity(1.0),
            alpha: b.alpha,
            beta: b.beta,
            gammaseq: b.gamma_seq,
            delta: b.delta,
            d,
            eps: 1e-7,
            max_iter: 100_000,
        }
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }
}

struct Entry {
    value: String,
    line: usize,
}

/// Parses and fully validates a config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let mut errors = Vec::new();
    let mut sections: HashMap<&str, (usize, HashMap<String, Entry>)> = HashMap::new();
    let mut current: Option<&str> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            match SECTIONS.iter().find(|s| **s == name) {
                Some(s) => {
                    if sections.contains_key(s) {
                        errors.push(err(line, format!("duplicate [{s}] section")));
                    } else {
                        sections.insert(s, (line, HashMap::new()));
                    }
                    current = Some(s);
                }
                None => {
                    errors.push(err(line, format!("unknown section [{name}]")));
                    current = None;
                }
            }
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            errors.push(err(line, format!("expected `key = value`, found `{content}`")));
            continue;
        };
        let key = key.trim();
        let Some(sec) = current else {
            errors.push(err(line, format!("`{key}` appears outside a known section")));
            continue;
        };
        if !allowed_keys(sec).contains(&key) {
            errors.push(err(line, format!("unknown key `{key}` in [{sec}]")));
            continue;
        }
        let entries = &mut sections.get_mut(sec).expect("section registered").1;
        if let Some(prev) = entries.get(key) {
            errors.push(err(line, format!("duplicate key `{key}` (first on line {})", prev.line)));
            continue;
        }
        entries.insert(key.to_string(), Entry { value: value.trim().to_string(), line });
    }

    for s in SECTIONS {
        if !sections.contains_key(s) {
            errors.push(ConfigError { line: None, message: format!("missing [{s}] section") });
        }
    }
    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }

    let mut r = Reader { sections: &sections, errors: &mut errors };
    let cfg = read_fields(&mut r);
    if !errors.is_empty() {
        return Err(ConfigErrors(errors));
    }
    let cfg = cfg.expect("no errors implies every field was read");
    let line_of = |sec: &str, key: &str| sections[sec].1.get(key).map(|e| e.line).or(Some(sections[sec].0));
    if let Err(e) = cfg.build() {
        let (sec, key) = e.location;
        return Err(ConfigErrors(vec![ConfigError { line: line_of(sec, key), message: e.message }]));
    }
    Ok(cfg)
}

fn allowed_keys(section: &str) -> &'static [&'static str] {
    match section {
        "problem" => &["family", "maps", "weights", "extend", "set", "x0", "freeze", "force", "vi_samples", "reference"],
        "viscosity" => &["f", "gamma", "A"],
        "schedule" => &["alpha", "beta", "gammaseq", "delta", "d"],
        "stop" => &["eps", "max_iter"],
        _ => &[],
    }
}

fn err(line: usize, message: String) -> ConfigError {
    ConfigError { line: Some(line), message }
}

struct Reader<'a> {
    sections: &'a HashMap<&'a str, (usize, HashMap<String, Entry>)>,
    errors: &'a mut Vec<ConfigError>,
}

impl Reader<'_> {
    /// `Some(Ok)` when present and valid, `Some(Err)` after recording an error.
    fn get<T>(&mut self, sec: &str, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Option<Result<T, ()>> {
        let entry = self.sections[sec].1.get(key)?;
        Some(parse(&entry.value).map_err(|m| {
            self.errors.push(err(entry.line, format!("{key}: {m}")));
        }))
    }

    fn required<T>(&mut self, sec: &str, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Option<T> {
        match self.get(sec, key, parse) {
            Some(v) => v.ok(),
            None => {
                let line = self.sections[sec].0;
                self.errors.push(err(line, format!("[{sec}] is missing required key `{key}`")));
                None
            }
        }
    }

    fn optional<T>(&mut self, sec: &str, key: &str, default: T, parse: impl Fn(&str) -> Result<T, String>) -> Option<T> {
        match self.get(sec, key, parse) {
            Some(v) => v.ok(),
            None => Some(default),
        }
    }
}

fn read_fields(r: &mut Reader<'_>) -> Option<ExperimentConfig> {
    let family = r.required("problem", "family", parse_family);
    let maps = r.required("problem", "maps", parse_maps);
    let x0 = r.required("problem", "x0", parse_list);
    let n_maps = maps.as_ref().map_or(0, Vec::len);
    let template = ExperimentConfig::reproduction(FamilyKind::K, vec![MapSpec::Builtin("id".into()); n_maps], vec![0.0]);

    let weights = r.optional("problem", "weights", template.weights.clone(), parse_list);
    let extend = r.optional("problem", "extend", Extension::Cycle, parse_extend);
    let set = r.optional("problem", "set", SetSpec::All, parse_set);
    let freeze = r.optional("problem", "freeze", None, |v| parse_count(v).map(Some));
    let force = r.optional("problem", "force", false, parse_bool);
    let vi_samples = r.optional("problem", "vi_samples", None, |v| parse_samples(v).map(Some));
    let reference = r.optional("problem", "reference", Reference::Oracle, parse_reference);
    let f = r.optional("viscosity", "f", template.f.clone(), parse_f);
    let gamma = r.optional("viscosity", "gamma", template.gamma, parse_f64);
    let a = r.optional("viscosity", "A", template.a.clone(), parse_a);
    let alpha = r.optional("schedule", "alpha", template.alpha.clone(), parse_schedule);
    let beta = r.optional("schedule", "beta", template.beta.clone(), parse_schedule);
    let gammaseq = r.optional("schedule", "gammaseq", template.gammaseq.clone(), parse_schedule);
    let delta = r.optional("schedule", "delta", template.delta.clone(), parse_schedule);
    let d = r.optional("schedule", "d", template.d, parse_f64);
    let eps = r.optional("stop", "eps", template.eps, parse_f64);
    let max_iter = r.optional("stop", "max_iter", template.max_iter, parse_count);

    Some(ExperimentConfig {
        family: family?,
        maps: maps?,
        weights: weights?,
        extend: extend?,
        set: set?,
        x0: x0?,
        freeze: freeze?,
        force: force?,
        vi_samples: vi_samples?,
        reference: reference?,
        f: f?,
        gamma: gamma?,
        a: a?,
        alpha: alpha?,
        beta: beta?,
        gammaseq: gammaseq?,
        delta: delta?,
        d: d?,
        eps: eps?,
        max_iter: max_iter?,
    })
}

fn parse_f64(v: &str) -> Result<f64, String> {
    match v.trim().parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(x) => Err(format!("{x} is not finite")),
        Err(_) => Err(format!("`{}` is not a number", v.trim())),
    }
}

fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    if v.trim().is_empty() {
        return Err("empty list".into());
    }
    v.split(',').map(parse_f64).collect()
}

fn parse_count(v: &str) -> Result<usize, String> {
    v.trim().parse::<usize>().map_err(|_| format!("`{}` is not a nonnegative integer", v.trim()))
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("expected true or false, found `{other}`")),
    }
}

fn parse_family(v: &str) -> Result<FamilyKind, String> {
    match v.trim() {
        "w" => Ok(FamilyKind::W),
        "k" => Ok(FamilyKind::K),
        other => Err(format!("expected w or k, found `{other}`")),
    }
}

fn parse_extend(v: &str) -> Result<Extension, String> {
    match v.trim() {
        "cycle" => Ok(Extension::Cycle),
        "pad" => Ok(Extension::IdentityPad),
        other => Err(format!("expected cycle or pad, found `{other}`")),
    }
}

pub(crate) fn parse_map(v: &str) -> Result<MapSpec, String> {
    let v = v.trim();
    if let Some(rest) = v.strip_prefix("proj:") {
        let (lo, hi) = rest.split_once(':').ok_or("proj needs `proj:lo:hi`")?;
        let (lo, hi) = (parse_f64(lo)?, parse_f64(hi)?);
        if lo > hi {
            return Err(format!("empty interval [{lo}, {hi}]"));
        }
        return Ok(MapSpec::Interval(lo, hi));
    }
    match NonexpansiveMap::by_name(v) {
        Some(m) => Ok(MapSpec::Builtin(m.label())),
        None => Err(format!("unknown map `{v}` (id, sin, cos, atan, proj:lo:hi)")),
    }
}

fn parse_maps(v: &str) -> Result<Vec<MapSpec>, String> {
    if v.trim().is_empty() {
        return Err("no maps given".into());
    }
    v.split(',').map(parse_map).collect()
}

fn parse_set(v: &str) -> Result<SetSpec, String> {
    let v = v.trim();
    if v == "all" {
        return Ok(SetSpec::All);
    }
    if let Some(rest) = v.strip_prefix("box:") {
        let xs = parse_list(rest)?;
        return match xs[..] {
            [lo, hi] if lo <= hi => Ok(SetSpec::Box(lo, hi)),
            [lo, hi] => Err(format!("empty box [{lo}, {hi}]")),
            _ => Err("box needs `box:lo,hi`".into()),
        };
    }
    if let Some(rest) = v.strip_prefix("ball:") {
        let mut xs = parse_list(rest)?;
        if xs.len() < 2 {
            return Err("ball needs `ball:c1,...,cd,r`".into());
        }
        let radius = xs.pop().expect("len checked");
        if radius < 0.0 {
            return Err(format!("negative radius {radius}"));
        }
        return Ok(SetSpec::Ball { center: xs, radius });
    }
    Err(format!("expected all, box:lo,hi or ball:c1,...,r, found `{v}`"))
}

fn parse_f(v: &str) -> Result<FSpec, String> {
    let v = v.trim();
    if let Some(rest) = v.strip_prefix("linear:") {
        return Ok(FSpec::Linear(parse_f64(rest)?));
    }
    if let Some(rest) = v.strip_prefix("const:") {
        return Ok(FSpec::Const(parse_list(rest)?));
    }
    Err(format!("expected linear:a or const:c, found `{v}`"))
}

fn parse_a(v: &str) -> Result<ASpec, String> {
    let v = v.trim();
    if let Some(rest) = v.strip_prefix("scaled_identity:") {
        return Ok(ASpec::ScaledIdentity(parse_f64(rest)?));
    }
    if let Some(rest) = v.strip_prefix("diag:") {
        return Ok(ASpec::Diag(parse_list(rest)?));
    }
    Err(format!("expected scaled_identity:c or diag:v1,...,vd, found `{v}`"))
}

pub(crate) fn parse_schedule(v: &str) -> Result<ScalarSchedule, String> {
    let v = v.trim();
    if let Some(rest) = v.strip_prefix("const:") {
        return Ok(ScalarSchedule::Constant(parse_f64(rest)?));
    }
    if let Some(rest) = v.strip_prefix("power:") {
        return match parse_list(rest)?[..] {
            [a, p] => Ok(ScalarSchedule::power(a, p)),
            _ => Err("power needs `power:a,p`".into()),
        };
    }
    if let Some(rest) = v.strip_prefix("table:") {
        return Ok(ScalarSchedule::Table(parse_list(rest)?));
    }
    Err(format!("expected const:c, power:a,p or table:v1,..., found `{v}`"))
}

fn parse_samples(v: &str) -> Result<SampleSpec, String> {
    let v = v.trim();
    let (kind, rest) = v.split_once(':').ok_or("expected grid:lo,hi,count or random:lo,hi,count")?;
    let parts: Vec<&str> = rest.split(',').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(format!("{kind} needs `{kind}:lo,hi,count`"));
    };
    let (lo, hi, count) = (parse_f64(lo)?, parse_f64(hi)?, parse_count(count)?);
    if lo > hi || count == 0 {
        return Err("need lo <= hi and count >= 1".into());
    }
    match kind {
        "grid" => Ok(SampleSpec::Grid { lo, hi, count }),
        "random" => Ok(SampleSpec::Random { lo, hi, count }),
        other => Err(format!("unknown sample kind `{other}`")),
    }
}

fn parse_reference(v: &str) -> Result<Reference, String> {
    match v.trim() {
        "oracle" => Ok(Reference::Oracle),
        "none" => Ok(Reference::None),
        other => match other.strip_prefix("value:") {
            Some(rest) => Ok(Reference::Value(parse_list(rest)?)),
            None => Err(format!("expected oracle, none or value:v1,..., found `{other}`")),
        },
    }
}

/// A config turned into solver inputs.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub problem: Problem,
    pub bundle: ScheduleBundle,
    pub stop: StopRule,
    pub opts: SolveOptions,
}

#[derive(Debug, Clone)]
pub enum Problem {
    W(ProblemSpec<WFamily>),
    K(ProblemSpec<KFamily>),
}

/// Failure to assemble solver inputs, tagged with the key to blame.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildError {
    pub location: (&'static str, &'static str),
    pub message: String,
}

fn blame<T, E: fmt::Display>(r: Result<T, E>, sec: &'static str, key: &'static str) -> Result<T, BuildError> {
    r.map_err(|e| BuildError { location: (sec, key), message: format!("{key}: {e}") })
}

impl MapSpec {
    pub fn build(&self) -> Result<NonexpansiveMap, String> {
        match self {
            MapSpec::Builtin(name) => NonexpansiveMap::by_name(name).ok_or_else(|| format!("unknown map `{name}`")),
            MapSpec::Interval(lo, hi) => {
                ConvexSet::interval(*lo, *hi).map(NonexpansiveMap::projection).map_err(|e| e.to_string())
            }
        }
    }
}

impl ExperimentConfig {
    pub fn build_maps(&self) -> Result<Vec<NonexpansiveMap>, BuildError> {
        let maps: Result<Vec<_>, _> = self.maps.iter().map(MapSpec::build).collect();
        let maps = blame(maps, "problem", "maps")?;
        // interval projections are built one-dimensional
        if self.maps.iter().any(|m| matches!(m, MapSpec::Interval(..))) && self.dim() != 1 {
            return Err(BuildError {
                location: ("problem", "maps"),
                message: "maps: proj:lo:hi requires a one-dimensional x0".into(),
            });
        }
        Ok(maps)
    }

    pub fn build_set(&self) -> Result<ConvexSet, BuildError> {
        let d = self.dim();
        let set = match &self.set {
            SetSpec::All => Ok(ConvexSet::whole_space()),
            SetSpec::Box(lo, hi) => Point::new(vec![*lo; d])
                .and_then(|l| Point::new(vec![*hi; d]).and_then(|h| ConvexSet::boxed(l, h))),
            SetSpec::Ball { center, radius } => {
                Point::new(center.clone()).and_then(|c| ConvexSet::ball(c, *radius))
            }
        };
        blame(set, "problem", "set")
    }

    pub fn build_f(&self) -> Result<ContractionMap, BuildError> {
        let f = match &self.f {
            FSpec::Linear(a) => ContractionMap::linear(*a),
            FSpec::Const(c) => Point::new(c.clone()).and_then(|c| ContractionMap::constant(c, CONST_F_ALPHA)),
        };
        blame(f, "viscosity", "f")
    }

    pub fn build_a(&self) -> Result<StrongPositiveOp, BuildError> {
        let d = self.dim();
        let a = match &self.a {
            ASpec::ScaledIdentity(c) => StrongPositiveOp::scaled_identity(d, *c),
            ASpec::Diag(v) if v.len() != d => {
                Err(viscofix_core::Error::DimensionMismatch { expected: d, found: v.len() })
            }
            ASpec::Diag(v) => StrongPositiveOp::new(Matrix::diag(v)),
        };
        blame(a, "viscosity", "A")
    }

    pub fn build_bundle(&self) -> Result<ScheduleBundle, BuildError> {
        let b = ScheduleBundle::new(
            self.alpha.clone(),
            self.beta.clone(),
            self.gammaseq.clone(),
            self.delta.clone(),
            self.d,
        );
        let b = blame(b, "schedule", "d")?;
        Ok(match self.family {
            FamilyKind::K => {
                let l = blame(LambdaSchedule::constant(self.weights.clone()), "problem", "weights")?;
                b.with_lambda(l)
            }
            FamilyKind::W => b,
        })
    }

    /// Assembles everything a run needs, reporting the first problem.
    pub fn build(&self) -> Result<Experiment, BuildError> {
        let maps = self.build_maps()?;
        if self.weights.len() != maps.len() {
            return Err(BuildError {
                location: ("problem", "weights"),
                message: format!("weights: {} weights for {} maps", self.weights.len(), maps.len()),
            });
        }
        let set = self.build_set()?;
        let f = self.build_f()?;
        let a = self.build_a()?;
        let x0 = blame(Point::new(self.x0.clone()), "problem", "x0")?;
        let problem = match self.family {
            FamilyKind::W => {
                let fam = blame(WFamily::new(maps, self.extend, self.weights.clone()), "problem", "weights")?;
                Problem::W(blame(ProblemSpec::new(fam, set, f, self.gamma, a, x0), "viscosity", "gamma")?)
            }
            FamilyKind::K => {
                let fam = blame(KFamily::constant(maps, self.weights.clone()), "problem", "weights")?;
                Problem::K(blame(ProblemSpec::new(fam, set, f, self.gamma, a, x0), "viscosity", "gamma")?)
            }
        };
        let bundle = self.build_bundle()?;
        let stop = blame(StopRule::new(self.eps, self.max_iter), "stop", "eps")?;
        if self.freeze == Some(0) {
            return Err(BuildError { location: ("problem", "freeze"), message: "freeze: index must be at least 1".into() });
        }
        if let (Some(SampleSpec::Grid { .. }), d) = (&self.vi_samples, self.dim()) {
            if d != 1 {
                return Err(BuildError {
                    location: ("problem", "vi_samples"),
                    message: "vi_samples: grid sampling requires a one-dimensional x0".into(),
                });
            }
        }
        if let Reference::Value(v) = &self.reference {
            if v.len() != self.dim() {
                return Err(BuildError {
                    location: ("problem", "reference"),
                    message: format!("reference: {} coordinates for dimension {}", v.len(), self.dim()),
                });
            }
        }
        Ok(Experiment { problem, bundle, stop, opts: SolveOptions { force: self.force, freeze: self.freeze } })
    }
}

struct Joined<'a>(&'a [f64]);

impl fmt::Display for Joined<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::Builtin(name) => f.write_str(name),
            MapSpec::Interval(lo, hi) => write!(f, "proj:{lo}:{hi}"),
        }
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[problem]")?;
        writeln!(f, "family = {}", if self.family == FamilyKind::W { "w" } else { "k" })?;
        let maps: Vec<String> = self.maps.iter().map(|m| m.to_string()).collect();
        writeln!(f, "maps = {}", maps.join(","))?;
        writeln!(f, "weights = {}", Joined(&self.weights))?;
        writeln!(f, "extend = {}", if self.extend == Extension::Cycle { "cycle" } else { "pad" })?;
        match &self.set {
            SetSpec::All => writeln!(f, "set = all")?,
            SetSpec::Box(lo, hi) => writeln!(f, "set = box:{lo},{hi}")?,
            SetSpec::Ball { center, radius } => writeln!(f, "set = ball:{},{radius}", Joined(center))?,
        }
        writeln!(f, "x0 = {}", Joined(&self.x0))?;
        if let Some(m) = self.freeze {
            writeln!(f, "freeze = {m}")?;
        }
        writeln!(f, "force = {}", self.force)?;
        match &self.vi_samples {
            None => {}
            Some(SampleSpec::Grid { lo, hi, count }) => writeln!(f, "vi_samples = grid:{lo},{hi},{count}")?,
            Some(SampleSpec::Random { lo, hi, count }) => writeln!(f, "vi_samples = random:{lo},{hi},{count}")?,
        }
        match &self.reference {
            Reference::Oracle => writeln!(f, "reference = oracle")?,
            Reference::None => writeln!(f, "reference = none")?,
            Reference::Value(v) => writeln!(f, "reference = value:{}", Joined(v))?,
        }
        writeln!(f, "[viscosity]")?;
        match &self.f {
            FSpec::Linear(a) => writeln!(f, "f = linear:{a}")?,
            FSpec::Const(c) => writeln!(f, "f = const:{}", Joined(c))?,
        }
        writeln!(f, "gamma = {}", self.gamma)?;
        match &self.a {
            ASpec::ScaledIdentity(c) => writeln!(f, "A = scaled_identity:{c}")?,
            ASpec::Diag(v) => writeln!(f, "A = diag:{}", Joined(v))?,
        }
        writeln!(f, "[schedule]")?;
        writeln!(f, "alpha = {}", self.alpha)?;
        writeln!(f, "beta = {}", self.beta)?;
        writeln!(f, "gammaseq = {}", self.gammaseq)?;
        writeln!(f, "delta = {}", self.delta)?;
        writeln!(f, "d = {}", self.d)?;
        writeln!(f, "[stop]")?;
        writeln!(f, "eps = {}", self.eps)?;
        writeln!(f, "max_iter = {}", self.max_iter)
    }
}
