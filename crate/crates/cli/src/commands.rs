//! The four subcommands. Each returns the process exit status or a
//! [`CliError`] that knows its own status.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::thread;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use viscofix_core::family::{apply_k_limit, apply_w, KFamily, WFamily};
use viscofix_core::hilbert::{sample_box, NonexpansiveMap, Operator, Point};
use viscofix_core::oracle::{
    bisection_fixed_point, compare_to_table, damped_picard, table_targets, TableComparison, TableMethod, TableTarget,
};
use viscofix_core::schedule::validate_conditions;
use viscofix_core::solver::{
    solve_k, solve_w, vi_residual, SolveResult, StopReason, StopRule, VALIDATION_HORIZON,
};

use crate::config::{
    default_weights, parse_config, parse_map, ConfigErrors, Experiment, ExperimentConfig, FamilyKind, MapSpec,
    Problem, Reference, SampleSpec,
};
use crate::trace_csv::trace_to_string;

pub const EXIT_CONVERGED: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_MAX_ITER: u8 = 2;
pub const EXIT_CONDITIONS: u8 = 3;
pub const EXIT_NO_BRACKET: u8 = 4;

/// Tolerance for `|q - printed x*|` in the tables report.
pub const TABLE_TOL: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config:\n{0}")]
    Config(#[from] ConfigErrors),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Core(#[from] viscofix_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(viscofix_core::Error::ConditionsViolated(_)) => EXIT_CONDITIONS,
            CliError::Core(viscofix_core::Error::NoSignChange { .. }) => EXIT_NO_BRACKET,
            _ => EXIT_ERROR,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn read_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(parse_config(&text)?)
}

fn build(cfg: &ExperimentConfig) -> Result<Experiment, CliError> {
    cfg.build().map_err(|e| CliError::Config(ConfigErrors(vec![crate::config::ConfigError { line: None, message: e.message }])))
}

/// A finished run with the derived quantities reported alongside it.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub result: SolveResult,
    /// Resolved `delta` reference, if any.
    pub reference: Option<Point>,
    pub vi_residual: Option<f64>,
}

impl RunOutput {
    pub fn exit_code(&self) -> u8 {
        match self.result.reason {
            StopReason::StepConverged => EXIT_CONVERGED,
            StopReason::MaxIter => EXIT_MAX_ITER,
        }
    }
}

/// Solves the configured problem. `seed` drives random VI samples only.
pub fn execute(cfg: &ExperimentConfig, seed: u64) -> Result<RunOutput, CliError> {
    let exp = build(cfg)?;
    let result = match &exp.problem {
        Problem::W(spec) => solve_w(spec, &exp.bundle, &exp.stop, &exp.opts)?,
        Problem::K(spec) => solve_k(spec, &exp.bundle, &exp.stop, &exp.opts)?,
    };
    let reference = match &cfg.reference {
        Reference::None => None,
        Reference::Value(v) => Some(Point::new(v.clone())?),
        Reference::Oracle => oracle_point(&exp, cfg),
    };
    let vi = match &cfg.vi_samples {
        None => None,
        Some(s) => {
            let samples = vi_samples(s, cfg.dim(), seed);
            let (f, gamma, a) = match &exp.problem {
                Problem::W(p) => (&p.f, p.gamma, &p.a),
                Problem::K(p) => (&p.f, p.gamma, &p.a),
            };
            Some(vi_residual(&result.q, f, gamma, a, &samples)?)
        }
    };
    Ok(RunOutput { result, reference, vi_residual: vi })
}

pub fn vi_samples(spec: &SampleSpec, dim: usize, seed: u64) -> Vec<Point> {
    match *spec {
        SampleSpec::Grid { lo, hi, count } => (0..count)
            .map(|i| {
                let t = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
                Point::scalar(lo + t * (hi - lo))
            })
            .collect(),
        SampleSpec::Random { lo, hi, count } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (l, h) = (Point::new(vec![lo; dim]).expect("finite"), Point::new(vec![hi; dim]).expect("finite"));
            (0..count).map(|_| sample_box(&mut rng, &l, &h)).collect()
        }
    }
}

/// Fixed point of the frozen map (`W_N`, or `K` with its limit weights):
/// bisection on a symmetric bracket in one dimension, damped Picard
/// otherwise. `None` when neither settles.
fn oracle_point(exp: &Experiment, cfg: &ExperimentConfig) -> Option<Point> {
    let n = cfg.maps.len();
    let frozen: Box<dyn Fn(&Point) -> Point> = match &exp.problem {
        Problem::W(p) => {
            let fam = p.family.clone();
            Box::new(move |x: &Point| apply_w(&fam, n, x).expect("dimension checked"))
        }
        Problem::K(p) => {
            let fam = p.family.clone();
            Box::new(move |x: &Point| apply_k_limit(&fam, x).expect("constant weights declare limits"))
        }
    };
    if cfg.dim() == 1 {
        let r = cfg.x0[0].abs().max(1.0);
        bisection_fixed_point(|x| frozen(&Point::scalar(x)).first(), -r, r, 1e-14).ok().map(Point::scalar)
    } else {
        let stop = StopRule::new(1e-13, 1_000_000).expect("valid stop rule");
        let out = damped_picard(&|x: &Point| frozen(x), &Point::new(cfg.x0.clone()).ok()?, 0.5, &stop).ok()?;
        out.converged.then_some(out.point)
    }
}

/// Header shared by every output file: the resolved config, then run facts.
pub fn output_header(cfg: &ExperimentConfig, seed: u64, out: &RunOutput) -> String {
    let mut h = cfg.to_string();
    h.push_str("--\n");
    let _ = writeln!(h, "seed = {seed}");
    for (k, v) in &out.result.trace.header {
        let _ = writeln!(h, "{k} = {v}");
    }
    match &out.reference {
        Some(p) => {
            let _ = writeln!(h, "delta reference = {:?}", p.coords());
        }
        None => h.push_str("delta reference = none\n"),
    }
    h
}

pub fn render_trace(cfg: &ExperimentConfig, seed: u64, out: &RunOutput) -> String {
    trace_to_string(&output_header(cfg, seed, out), &out.result.trace, out.reference.as_ref())
}

pub fn render_summary(cfg: &ExperimentConfig, seed: u64, out: &RunOutput) -> String {
    let mut s = String::new();
    for line in output_header(cfg, seed, out).lines() {
        let _ = writeln!(s, "# {line}");
    }
    let q: Vec<String> = out.result.q.coords().iter().map(|c| c.to_string()).collect();
    let _ = writeln!(s, "q = {}", q.join(","));
    let _ = writeln!(s, "iterations = {}", out.result.iterations);
    let _ = writeln!(s, "reason = {}", out.result.reason);
    if let Some(v) = out.vi_residual {
        let _ = writeln!(s, "vi_residual = {v}");
    }
    s
}

/// `run`: writes the trace to `trace_path` and the summary to `out` (or
/// `stdout`). Nothing is written unless the config is valid.
pub fn cmd_run(
    config: &Path,
    trace_path: &Path,
    out: Option<&Path>,
    seed: u64,
    stdout: &mut dyn Write,
) -> Result<u8, CliError> {
    let cfg = read_config(config)?;
    let run = execute(&cfg, seed)?;
    fs::write(trace_path, render_trace(&cfg, seed, &run)).map_err(io_err(trace_path))?;
    let summary = render_summary(&cfg, seed, &run);
    match out {
        Some(p) => fs::write(p, summary).map_err(io_err(p))?,
        None => stdout.write_all(summary.as_bytes()).map_err(io_err(Path::new("<stdout>")))?,
    }
    Ok(run.exit_code())
}

/// `validate`: 0 when every condition passes, 3 otherwise.
pub fn cmd_validate(config: &Path, stdout: &mut dyn Write) -> Result<u8, CliError> {
    let cfg = read_config(config)?;
    let bundle = build(&cfg)?.bundle;
    let report = validate_conditions(&bundle, VALIDATION_HORIZON)?;
    write!(stdout, "{report}").map_err(io_err(Path::new("<stdout>")))?;
    Ok(if report.all_pass() { EXIT_CONVERGED } else { EXIT_CONDITIONS })
}

/// Scalar map named on the command line: a builtin (`cos`, `proj:0:1`),
/// `w:maps:weights` for `W_N`, or `k:maps:weights` for `K`.
pub fn parse_oracle_map(spec: &str) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>, CliError> {
    let usage = |m: String| CliError::Usage(format!("map spec `{spec}`: {m}"));
    let family = |rest: &str| -> Result<(Vec<NonexpansiveMap>, Vec<f64>), CliError> {
        let (maps, weights) = rest.rsplit_once(':').ok_or_else(|| usage("expected kind:maps:weights".into()))?;
        let maps = maps
            .split(',')
            .map(|m| parse_map(m).and_then(|m| m.build()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(usage)?;
        let weights = weights
            .split(',')
            .map(|w| w.trim().parse::<f64>().map_err(|_| usage(format!("bad weight `{w}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((maps, weights))
    };
    if let Some(rest) = spec.strip_prefix("w:") {
        let (maps, weights) = family(rest)?;
        let n = maps.len();
        let fam = WFamily::new(maps, viscofix_core::family::Extension::Cycle, weights)?;
        return Ok(Box::new(move |x| apply_w(&fam, n, &Point::scalar(x)).expect("scalar family").first()));
    }
    if let Some(rest) = spec.strip_prefix("k:") {
        let (maps, weights) = family(rest)?;
        let fam = KFamily::constant(maps, weights)?;
        return Ok(Box::new(move |x| apply_k_limit(&fam, &Point::scalar(x)).expect("scalar family").first()));
    }
    let map = parse_map(spec).and_then(|m| m.build()).map_err(usage)?;
    Ok(Box::new(move |x| map.apply(&Point::scalar(x)).first()))
}

/// `oracle`: prints the bisection fixed point to ten decimals.
pub fn cmd_oracle(spec: &str, lo: f64, hi: f64, tol: f64, stdout: &mut dyn Write) -> Result<u8, CliError> {
    let map = parse_oracle_map(spec)?;
    let x = bisection_fixed_point(map, lo, hi, tol)?;
    writeln!(stdout, "{x:.10}").map_err(io_err(Path::new("<stdout>")))?;
    Ok(EXIT_CONVERGED)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    One,
    Two,
    Three,
    All,
}

impl Which {
    fn tables(self) -> &'static [u8] {
        match self {
            Which::One => &[1],
            Which::Two => &[2],
            Which::Three => &[3],
            Which::All => &[1, 2, 3],
        }
    }
}

/// The reproduction config for one printed row.
pub fn table_config(target: &TableTarget) -> ExperimentConfig {
    let maps: Vec<MapSpec> = target.map_labels().into_iter().map(|l| MapSpec::Builtin(l.into())).collect();
    let kind = match target.method {
        TableMethod::W => FamilyKind::W,
        TableMethod::K => FamilyKind::K,
    };
    let mut cfg = ExperimentConfig::reproduction(kind, maps, vec![3.0]);
    cfg.weights = default_weights(cfg.maps.len());
    cfg
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub target: TableTarget,
    pub config: ExperimentConfig,
    pub run: RunOutput,
    pub comparison: TableComparison,
}

impl TableRow {
    pub fn file_name(&self) -> String {
        let m = match self.target.method {
            TableMethod::W => "w",
            TableMethod::K => "k",
        };
        format!("table{}_{m}.csv", self.target.table_id)
    }
}

/// Runs the selected rows, one thread each.
pub fn run_tables(which: Which) -> Result<Vec<TableRow>, CliError> {
    let targets: Vec<TableTarget> =
        table_targets().into_iter().filter(|t| which.tables().contains(&t.table_id)).collect();
    thread::scope(|s| {
        let handles: Vec<_> = targets
            .iter()
            .map(|t| {
                s.spawn(move || -> Result<TableRow, CliError> {
                    let config = table_config(t);
                    let run = execute(&config, 0)?;
                    let comparison = compare_to_table(&run.result, t, TABLE_TOL)?;
                    Ok(TableRow { target: t.clone(), config, run, comparison })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("table worker panicked")).collect()
    })
}

pub fn render_tables(rows: &[TableRow]) -> String {
    let mut s = String::new();
    for row in rows {
        let c = &row.comparison;
        let method = match c.method {
            TableMethod::W => "W",
            TableMethod::K => "K",
        };
        let oracle = match &row.run.reference {
            Some(p) => format!("{:.7}", p.first()),
            None => "n/a".into(),
        };
        let _ = writeln!(s, "table {} {method}:", c.table_id);
        let _ = writeln!(s, "  x*     ours {:.7}  printed {}  oracle {oracle}", c.q, c.x_star);
        let verdict = if c.within_tol { "within" } else { "outside" };
        let _ = writeln!(s, "  |ours - printed| = {:.3e} ({verdict} {TABLE_TOL:e})", c.abs_error);
        let _ = writeln!(
            s,
            "  iterations ours {} ({})  printed {}",
            c.our_iterations, row.run.result.reason, c.printed_iterations
        );
        for im in &c.images {
            let _ = writeln!(
                s,
                "  {:<4} printed {:.10}  at printed x* {:.10}  at ours {:.10}",
                im.label, im.printed, im.at_printed_x, im.at_q
            );
        }
        if let Some(note) = table_note(c) {
            let _ = writeln!(s, "  note: {note}");
        }
    }
    s
}

fn table_note(c: &TableComparison) -> Option<&'static str> {
    match (c.table_id, c.method) {
        (1 | 3, TableMethod::W) => Some(
            "the maps share no fixed point, so the W limit depends on f, A and schedules the printed run does not give; \
             the printed value is not the fixed point of W_N",
        ),
        (2, _) => Some("printed values are stopping-rule snapshots of a slow approach to 0; compared informationally"),
        _ => None,
    }
}

/// `tables`: prints the report; with `out`, also writes it and one trace
/// per row into that directory.
pub fn cmd_tables(which: Which, out: Option<&Path>, stdout: &mut dyn Write) -> Result<u8, CliError> {
    let rows = run_tables(which)?;
    let report = render_tables(&rows);
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for row in &rows {
            let path = dir.join(row.file_name());
            fs::write(&path, render_trace(&row.config, 0, &row.run)).map_err(io_err(&path))?;
        }
        let path = dir.join("report.txt");
        fs::write(&path, &report).map_err(io_err(&path))?;
    }
    stdout.write_all(report.as_bytes()).map_err(io_err(Path::new("<stdout>")))?;
    Ok(EXIT_CONVERGED)
}
