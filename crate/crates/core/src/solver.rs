//! The composite projected viscosity iterations and their baselines.
//!
//! Main scheme, for a W-family (or K-family with `K_n` in place of `W_n`):
//!
//! ```text
//! z_n     = γ_n x_n + (1 - γ_n) W_n x_n
//! y_n     = β_n x_n + (1 - β_n) W_n z_n
//! x_{n+1} = P_C[ α_n γ f(x_n) + δ_n x_n + ((1 - δ_n) I - α_n A) y_n ]
//! ```
//!
//! Iteration `n` (counted from 0) evaluates the mapping with index `n + 1`
//! unless [`SolveOptions::freeze`] pins it.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::family::{apply_k, apply_w, Extension, KFamily, WFamily};
use crate::hilbert::{ContractionMap, ConvexSet, NonexpansiveMap, Operator, Point, StrongPositiveOp};
use crate::schedule::{eval_bundle, validate_conditions, ScalarSchedule, ScheduleBundle};

/// Iterates with a larger norm abort the run.
pub const DIVERGENCE_BOUND: f64 = 1e12;
/// Horizon used when a solver validates its bundle.
pub const VALIDATION_HORIZON: usize = 1000;

/// Stop when `‖x_{n+1} - x_n‖ < eps_step` or after `max_iter` steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule {
    eps_step: f64,
    max_iter: usize,
}

impl StopRule {
    pub fn new(eps_step: f64, max_iter: usize) -> Result<Self> {
        if !(eps_step > 0.0 && eps_step.is_finite()) {
            return Err(Error::InvalidParameter { name: "eps_step", value: eps_step });
        }
        if max_iter == 0 {
            return Err(Error::InvalidParameter { name: "max_iter", value: 0.0 });
        }
        Ok(StopRule { eps_step, max_iter })
    }

    pub fn eps_step(&self) -> f64 {
        self.eps_step
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter
    }
}

impl Default for StopRule {
    fn default() -> Self {
        StopRule { eps_step: 1e-7, max_iter: 100_000 }
    }
}

/// Dimension a family (or single map) is tied to, if any.
pub trait FamilyDim {
    fn required_dim(&self) -> Option<usize>;
    fn describe(&self) -> String;
}

impl FamilyDim for WFamily {
    fn required_dim(&self) -> Option<usize> {
        self.dim()
    }

    fn describe(&self) -> String {
        let ext = match self.extension() {
            Extension::Cycle => "cycle",
            Extension::IdentityPad => "pad",
        };
        format!("W[{}] extend={ext} weights={:?}", labels(self.maps()), self.weights())
    }
}

impl FamilyDim for KFamily {
    fn required_dim(&self) -> Option<usize> {
        self.dim()
    }

    fn describe(&self) -> String {
        format!("K[{}] weights={:?}", labels(self.maps()), self.weights())
    }
}

impl FamilyDim for NonexpansiveMap {
    fn required_dim(&self) -> Option<usize> {
        self.dim()
    }

    fn describe(&self) -> String {
        self.label()
    }
}

fn labels(maps: &[NonexpansiveMap]) -> String {
    maps.iter().map(|m| m.label()).collect::<Vec<_>>().join(",")
}

/// Everything the viscosity iterations need besides the schedules.
#[derive(Debug, Clone)]
pub struct ProblemSpec<F> {
    pub family: F,
    pub set: ConvexSet,
    pub f: ContractionMap,
    pub gamma: f64,
    pub a: StrongPositiveOp,
    pub x0: Point,
    /// `x0` was outside the set and has been replaced by its projection.
    pub x0_projected: bool,
}

impl<F: FamilyDim> ProblemSpec<F> {
    /// Validates dimensions and `0 < gamma < gamma_bar / alpha`; projects
    /// `x0` into the set when needed.
    pub fn new(
        family: F,
        set: ConvexSet,
        f: ContractionMap,
        gamma: f64,
        a: StrongPositiveOp,
        x0: Point,
    ) -> Result<Self> {
        let dim = x0.dim();
        if a.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: a.dim() });
        }
        set.check_dim(&x0)?;
        if let Some(d) = family.required_dim() {
            if d != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: d });
            }
        }
        let bound = a.gamma_bar() / f.alpha();
        if !(gamma > 0.0 && gamma < bound) {
            return Err(Error::Inadmissible { gamma, bound });
        }
        let projected = set.project(&x0);
        let x0_projected = projected != x0;
        Ok(ProblemSpec { family, set, f, gamma, a, x0: projected, x0_projected })
    }

    fn header(&self, method: &str) -> Vec<(String, String)> {
        let mut h = alloc::vec![
            ("method".to_string(), method.to_string()),
            ("family".to_string(), self.family.describe()),
            ("set".to_string(), format!("{:?}", self.set.shape())),
            ("f".to_string(), format!("{} (alpha={})", self.f.label(), self.f.alpha())),
            ("gamma".to_string(), format!("{}", self.gamma)),
            ("A".to_string(), format!("gamma_bar={} norm={}", self.a.gamma_bar(), self.a.op_norm())),
            ("x0".to_string(), format!("{:?}", self.x0.coords())),
        ];
        if self.x0_projected {
            h.push(("warning".to_string(), "x0 projected into the set".to_string()));
        }
        h
    }
}

/// Switches for a solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveOptions {
    /// Run even if the bundle fails validation; recorded in the header.
    pub force: bool,
    /// Evaluate `W_m` / `K_m` with this fixed `m` at every step.
    pub freeze: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    StepConverged,
    MaxIter,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::StepConverged => f.write_str("step-converged"),
            StopReason::MaxIter => f.write_str("max-iter"),
        }
    }
}

/// One iterate with its intermediate stages. Schemes without a `z` stage
/// record `z_n = x_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: usize,
    pub x: Point,
    pub z: Point,
    pub y: Point,
    /// `‖x_{n+1} - x_n‖`; `None` on the final row.
    pub step_norm: Option<f64>,
}

/// Rows `0..=N`; the last row holds the returned iterate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    pub header: Vec<(String, String)>,
    pub rows: Vec<TraceRow>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map(|r| r.x.dim()).unwrap_or(0)
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub q: Point,
    pub iterations: usize,
    pub reason: StopReason,
    pub trace: IterationTrace,
}

struct Stage {
    z: Point,
    y: Point,
    next: Point,
}

fn guard(n: usize, p: &Point) -> Result<()> {
    let norm = p.norm();
    if !p.is_finite() || !(norm <= DIVERGENCE_BOUND) {
        return Err(Error::Diverged { iteration: n, norm });
    }
    Ok(())
}

fn drive<S>(x0: Point, stop: &StopRule, header: Vec<(String, String)>, mut step: S) -> Result<SolveResult>
where
    S: FnMut(usize, &Point) -> Result<Stage>,
{
    let mut rows = Vec::new();
    let mut x = x0;
    let mut reason = StopReason::MaxIter;
    let mut n = 0;
    while n < stop.max_iter {
        let Stage { z, y, next } = step(n, &x)?;
        guard(n + 1, &next)?;
        let s = next.distance(&x);
        rows.push(TraceRow { n, x, z, y, step_norm: Some(s) });
        x = next;
        n += 1;
        if s < stop.eps_step {
            reason = StopReason::StepConverged;
            break;
        }
    }
    let Stage { z, y, .. } = step(n, &x)?;
    rows.push(TraceRow { n, x: x.clone(), z, y, step_norm: None });
    let mut header = header;
    header.push(("stop".into(), format!("eps={} max_iter={}", stop.eps_step, stop.max_iter)));
    Ok(SolveResult { q: x, iterations: n, reason, trace: IterationTrace { header, rows } })
}

fn require_conditions(bundle: &ScheduleBundle, opts: &SolveOptions) -> Result<()> {
    if opts.force {
        return Ok(());
    }
    let report = validate_conditions(bundle, VALIDATION_HORIZON)?;
    if report.all_pass() {
        Ok(())
    } else {
        let mut what: Vec<String> =
            report.failures().iter().map(|e| format!("{} {}", e.condition, e.status)).collect();
        if let Some((seq, n, v)) = report.range_violation {
            what.push(format!("{seq} = {v} at n = {n}"));
        }
        Err(Error::ConditionsViolated(what.join(", ")))
    }
}

fn run_header<F: FamilyDim>(
    spec: &ProblemSpec<F>,
    method: &str,
    bundle: &ScheduleBundle,
    opts: &SolveOptions,
) -> Vec<(String, String)> {
    let mut h = spec.header(method);
    h.push(("schedule".into(), bundle.describe()));
    h.push(("force".into(), format!("{}", opts.force)));
    h.push((
        "index".into(),
        match opts.freeze {
            Some(m) => format!("frozen at {m}"),
            None => "n+1".into(),
        },
    ));
    h
}

/// `α γ f(x) + δ x + ((1 - δ) y - α A y)`, coordinatewise.
fn viscous_three_term(alpha: f64, gamma: f64, fx: &Point, delta: f64, x: &Point, y: &Point, ay: &Point) -> Point {
    let s = alpha * gamma;
    let coords = (0..x.dim())
        .map(|i| s * fx[i] + delta * x[i] + ((1.0 - delta) * y[i] - alpha * ay[i]))
        .collect();
    Point::from_raw(coords)
}

/// `α γ f(x) + (y - α A y)`, coordinatewise.
fn viscous_two_term(alpha: f64, gamma: f64, fx: &Point, y: &Point, ay: &Point) -> Point {
    let s = alpha * gamma;
    Point::from_raw((0..y.dim()).map(|i| s * fx[i] + (y[i] - alpha * ay[i])).collect())
}

fn three_stage<F, M>(
    spec: &ProblemSpec<F>,
    bundle: &ScheduleBundle,
    project: bool,
    n: usize,
    x: &Point,
    mapping: M,
) -> Result<Stage>
where
    M: Fn(&Point) -> Result<Point>,
{
    let v = eval_bundle(bundle, n)?;
    let mx = mapping(x)?;
    let z = Point::lincomb(v.gamma, x, 1.0 - v.gamma, &mx);
    let mz = mapping(&z)?;
    let y = Point::lincomb(v.beta, x, 1.0 - v.beta, &mz);
    let ay = spec.a.apply(&y);
    let raw = viscous_three_term(v.alpha, spec.gamma, &spec.f.apply(x), v.delta, x, &y, &ay);
    let next = if project && raw.is_finite() { spec.set.project(&raw) } else { raw };
    Ok(Stage { z, y, next })
}

/// The main iteration over an infinite family via `W_n`.
pub fn solve_w(
    spec: &ProblemSpec<WFamily>,
    bundle: &ScheduleBundle,
    stop: &StopRule,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    require_conditions(bundle, opts)?;
    let header = run_header(spec, "w", bundle, opts);
    drive(spec.x0.clone(), stop, header, |n, x| {
        let m = opts.freeze.unwrap_or(n + 1);
        three_stage(spec, bundle, true, n, x, |p| apply_w(&spec.family, m, p))
    })
}

/// The same scheme over a finite family via `K_n`; the `z` stage weight
/// `λ_n` is taken from `bundle.gamma_seq`.
pub fn solve_k(
    spec: &ProblemSpec<KFamily>,
    bundle: &ScheduleBundle,
    stop: &StopRule,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    require_conditions(bundle, opts)?;
    let header = run_header(spec, "k", bundle, opts);
    drive(spec.x0.clone(), stop, header, |n, x| {
        let m = opts.freeze.unwrap_or(n + 1);
        three_stage(spec, bundle, true, n, x, |p| apply_k(&spec.family, m, p))
    })
}

/// Two-stage scheme with `K_n`:
/// `y_n = β_n x_n + (1 - β_n) K_n x_n`, `x_{n+1} = P_C(α_n γ f(x_n) + (I - α_n A) y_n)`.
pub fn solve_singthong(
    spec: &ProblemSpec<KFamily>,
    bundle: &ScheduleBundle,
    stop: &StopRule,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    require_conditions(bundle, opts)?;
    let header = run_header(spec, "singthong", bundle, opts);
    drive(spec.x0.clone(), stop, header, |n, x| {
        let m = opts.freeze.unwrap_or(n + 1);
        let v = eval_bundle(bundle, n)?;
        let kx = apply_k(&spec.family, m, x)?;
        let y = Point::lincomb(v.beta, x, 1.0 - v.beta, &kx);
        let ay = spec.a.apply(&y);
        let raw = viscous_two_term(v.alpha, spec.gamma, &spec.f.apply(x), &y, &ay);
        let next = if raw.is_finite() { spec.set.project(&raw) } else { raw };
        Ok(Stage { z: x.clone(), y, next })
    })
}

/// The unprojected three-stage scheme with a single map `T` in place of `W_n`.
pub fn solve_cho_qin(
    spec: &ProblemSpec<NonexpansiveMap>,
    bundle: &ScheduleBundle,
    stop: &StopRule,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    require_conditions(bundle, opts)?;
    let header = run_header(spec, "cho-qin", bundle, opts);
    drive(spec.x0.clone(), stop, header, |n, x| {
        three_stage(spec, bundle, false, n, x, |p| Ok(spec.family.apply(p)))
    })
}

/// Anchored iteration `y_n = β_n x_n + (1 - β_n) T x_n`,
/// `x_{n+1} = α_n u + (1 - α_n) y_n`.
pub fn solve_kim_xu(
    t: &NonexpansiveMap,
    u: &Point,
    alpha: &ScalarSchedule,
    beta: &ScalarSchedule,
    x0: &Point,
    stop: &StopRule,
) -> Result<SolveResult> {
    if u.dim() != x0.dim() {
        return Err(Error::DimensionMismatch { expected: x0.dim(), found: u.dim() });
    }
    let header = alloc::vec![
        ("method".to_string(), "kim-xu".to_string()),
        ("map".to_string(), t.label()),
        ("anchor".to_string(), format!("{:?}", u.coords())),
        ("schedule".to_string(), format!("alpha={alpha} beta={beta}")),
        ("x0".to_string(), format!("{:?}", x0.coords())),
    ];
    drive(x0.clone(), stop, header, |n, x| {
        let a = alpha.eval("alpha", n)?;
        let b = beta.eval("beta", n)?;
        let y = Point::lincomb(b, x, 1.0 - b, &t.apply(x));
        let next = Point::lincomb(a, u, 1.0 - a, &y);
        Ok(Stage { z: x.clone(), y, next })
    })
}

/// `x_t`, the fixed point of `x ↦ tγ f(x) + (I - tA) W x`, by Picard
/// iteration from `x_start`. The map contracts with factor
/// `1 - t(γ̄ - γα)` when `0 < t < min(1, 1/‖A‖)` and `γα < γ̄`.
pub fn viscosity_path(
    w: &impl Operator,
    f: &ContractionMap,
    gamma: f64,
    a: &StrongPositiveOp,
    t: f64,
    x_start: &Point,
    inner_stop: &StopRule,
) -> Result<Point> {
    let t_max = (1.0 / a.op_norm()).min(1.0);
    if !(t > 0.0 && t < t_max) {
        return Err(Error::InvalidParameter { name: "t", value: t });
    }
    let factor = path_contraction_factor(f, gamma, a, t);
    if !(factor < 1.0) {
        return Err(Error::Inadmissible { gamma, bound: a.gamma_bar() / f.alpha() });
    }
    let mut x = x_start.clone();
    let mut last = f64::INFINITY;
    for _ in 0..inner_stop.max_iter() {
        let next = path_map(w, f, gamma, a, t, &x);
        guard(0, &next)?;
        last = next.distance(&x);
        x = next;
        if last < inner_stop.eps_step() {
            return Ok(x);
        }
    }
    Err(Error::NotConverged { iterations: inner_stop.max_iter(), last_step: last })
}

/// Lipschitz bound `1 - t(γ̄ - γα)` of the viscosity-path map.
pub fn path_contraction_factor(f: &ContractionMap, gamma: f64, a: &StrongPositiveOp, t: f64) -> f64 {
    1.0 - t * (a.gamma_bar() - gamma * f.alpha())
}

/// One application of `x ↦ tγ f(x) + (I - tA) W x`.
pub fn path_map(
    w: &impl Operator,
    f: &ContractionMap,
    gamma: f64,
    a: &StrongPositiveOp,
    t: f64,
    x: &Point,
) -> Point {
    let wx = w.apply(x);
    let awx = a.apply(&wx);
    let fx = f.apply(x);
    Point::from_raw((0..x.dim()).map(|i| t * gamma * fx[i] + (wx[i] - t * awx[i])).collect())
}

/// `max_p <γ f(q) - A q, p - q>` over the samples; nonpositive when `q`
/// solves the variational inequality on the sampled set.
pub fn vi_residual(
    q: &Point,
    f: &ContractionMap,
    gamma: f64,
    a: &StrongPositiveOp,
    fixed_point_samples: &[Point],
) -> Result<f64> {
    if fixed_point_samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let fq = f.apply(q);
    let aq = a.apply(q);
    let g = Point::lincomb(gamma, &fq, -1.0, &aq);
    let mut worst = f64::NEG_INFINITY;
    for p in fixed_point_samples {
        worst = worst.max(crate::hilbert::inner(&g, &(p - q))?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::KWeights;
    use alloc::vec;

    fn scalar_spec<F: FamilyDim>(family: F, set: ConvexSet, x0: f64) -> ProblemSpec<F> {
        ProblemSpec::new(
            family,
            set,
            ContractionMap::linear(0.5).unwrap(),
            1.0,
            StrongPositiveOp::identity(1),
            Point::scalar(x0),
        )
        .unwrap()
    }

    #[test]
    fn stop_rule_invariants() {
        assert!(StopRule::new(0.0, 10).is_err());
        assert!(StopRule::new(1e-3, 0).is_err());
        let s = StopRule::default();
        assert_eq!((s.eps_step(), s.max_iter()), (1e-7, 100_000));
    }

    #[test]
    fn admissibility_and_projection_of_x0() {
        let fam = KFamily::constant(vec![NonexpansiveMap::sine()], vec![1.0]).unwrap();
        let err = ProblemSpec::new(
            fam.clone(),
            ConvexSet::whole_space(),
            ContractionMap::linear(0.5).unwrap(),
            2.0,
            StrongPositiveOp::identity(1),
            Point::scalar(3.0),
        );
        assert_eq!(err.unwrap_err(), Error::Inadmissible { gamma: 2.0, bound: 2.0 });
        let spec = scalar_spec(fam, ConvexSet::interval(0.0, 1.0).unwrap(), 3.0);
        assert!(spec.x0_projected);
        assert_eq!(spec.x0, Point::scalar(1.0));
    }

    #[test]
    fn identity_family_goes_to_zero() {
        let fam = WFamily::new(vec![NonexpansiveMap::identity()], Extension::IdentityPad, vec![0.5]).unwrap();
        let spec = scalar_spec(fam, ConvexSet::whole_space(), 3.0);
        let frozen = SolveOptions { force: false, freeze: Some(1) };
        let r = solve_w(&spec, &ScheduleBundle::reproduction(), &StopRule::new(1e-12, 200_000).unwrap(), &frozen).unwrap();
        // Oracle: with W = I the scheme collapses to x_{n+1} = (1 - α_n/2) x_n.
        let mut x = 3.0f64;
        for n in 0..r.iterations {
            x *= 1.0 - 0.5 / (n as f64 + 1.0);
        }
        assert!((r.q.first() - x).abs() < 1e-10);
        assert!(r.q.first().abs() < 1e-2);
    }

    #[test]
    fn trace_rows_are_contiguous_and_steps_recomputable() {
        let fam = KFamily::constant(vec![NonexpansiveMap::sine(), NonexpansiveMap::cosine()], vec![0.5, 1.0 / 3.0]).unwrap();
        let spec = scalar_spec(fam, ConvexSet::whole_space(), 3.0);
        let r = solve_k(&spec, &ScheduleBundle::reproduction(), &StopRule::default(), &SolveOptions::default()).unwrap();
        assert_eq!(r.reason, StopReason::StepConverged);
        assert_eq!(r.trace.len(), r.iterations + 1);
        for (i, w) in r.trace.rows.windows(2).enumerate() {
            assert_eq!(w[0].n, i);
            let s = w[0].step_norm.unwrap();
            assert!((s - w[1].x.distance(&w[0].x)).abs() <= 1e-15);
        }
        let last = r.trace.rows.last().unwrap();
        assert_eq!(last.x, r.q);
        assert!(last.step_norm.is_none());
        assert!(r.trace.rows[r.iterations - 1].step_norm.unwrap() < 1e-7);
    }

    #[test]
    fn invalid_bundle_is_rejected_unless_forced() {
        let fam = KFamily::constant(vec![NonexpansiveMap::sine()], vec![1.0]).unwrap();
        let spec = scalar_spec(fam, ConvexSet::whole_space(), 1.0);
        let mut b = ScheduleBundle::reproduction();
        b.delta = ScalarSchedule::Constant(0.0);
        let stop = StopRule::new(1e-7, 10).unwrap();
        assert!(matches!(solve_k(&spec, &b, &stop, &SolveOptions::default()), Err(Error::ConditionsViolated(_))));
        let r = solve_k(&spec, &b, &stop, &SolveOptions { force: true, freeze: None }).unwrap();
        assert_eq!(r.trace.header_value("force"), Some("true"));
    }

    #[test]
    fn singthong_identity_goes_to_zero() {
        let fam = KFamily::constant(vec![NonexpansiveMap::identity()], vec![1.0]).unwrap();
        let spec = scalar_spec(fam, ConvexSet::whole_space(), 3.0);
        let r = solve_singthong(&spec, &ScheduleBundle::reproduction(), &StopRule::new(1e-12, 200_000).unwrap(), &SolveOptions::default()).unwrap();
        let mut x = 3.0f64;
        for n in 0..r.iterations {
            x = 0.5 / (n as f64 + 1.0) * x + (x - x / (n as f64 + 1.0));
        }
        assert!((r.q.first() - x).abs() < 1e-10);
        assert!(r.q.first().abs() < 1e-2);
    }

    #[test]
    fn kim_xu_examples() {
        let stop = StopRule::default();
        let x0 = Point::scalar(3.0);
        let r = solve_kim_xu(&NonexpansiveMap::identity(), &x0, &ScalarSchedule::power(1.0, 1.0), &ScalarSchedule::Constant(0.1), &x0, &stop).unwrap();
        assert!(r.trace.rows.iter().all(|row| row.x == x0));

        let r = solve_kim_xu(&NonexpansiveMap::cosine(), &Point::scalar(0.0), &ScalarSchedule::power(1.0, 1.0), &ScalarSchedule::Constant(0.1), &x0, &stop).unwrap();
        assert!((r.q.first() - 0.739_085_133_215_160_6).abs() < 1e-3, "{}", r.q.first());

        let r = solve_kim_xu(&NonexpansiveMap::sine(), &Point::scalar(0.5), &ScalarSchedule::power(1.0, 1.0), &ScalarSchedule::Constant(0.1), &x0, &StopRule::new(1e-15, 100_000).unwrap()).unwrap();
        assert!(r.q.first().abs() <= 0.05, "{}", r.q.first());
    }

    #[test]
    fn cho_qin_examples() {
        let stop = StopRule::new(1e-12, 200_000).unwrap();
        let spec = scalar_spec(NonexpansiveMap::identity(), ConvexSet::whole_space(), 3.0);
        let r = solve_cho_qin(&spec, &ScheduleBundle::reproduction(), &stop, &SolveOptions::default()).unwrap();
        assert!(r.q.first().abs() < 1e-2);

        let p = 0.739_085_133_215_160_6;
        let spec = ProblemSpec::new(
            NonexpansiveMap::cosine(),
            ConvexSet::whole_space(),
            ContractionMap::constant(Point::scalar(p), 0.5).unwrap(),
            1.0,
            StrongPositiveOp::identity(1),
            Point::scalar(3.0),
        )
        .unwrap();
        let r = solve_cho_qin(&spec, &ScheduleBundle::reproduction(), &StopRule::default(), &SolveOptions::default()).unwrap();
        assert!((r.q.first() - p).abs() < 1e-3);
    }

    #[test]
    fn cho_qin_divergence_guard() {
        let spec = scalar_spec(NonexpansiveMap::custom("blowup", |x: &Point| x * 10.0), ConvexSet::whole_space(), 3.0);
        let r = solve_cho_qin(&spec, &ScheduleBundle::reproduction(), &StopRule::default(), &SolveOptions::default());
        assert!(matches!(r, Err(Error::Diverged { .. })));
    }

    #[test]
    fn cho_qin_matches_single_map_w_family() {
        // W_n of {T} padded with identity is γ_1 T + (1 - γ_1) I up to rounding in the pads.
        let w = WFamily::new(vec![NonexpansiveMap::cosine()], Extension::IdentityPad, vec![0.5]).unwrap();
        let avg = NonexpansiveMap::average(0.5, NonexpansiveMap::cosine(), NonexpansiveMap::identity()).unwrap();
        let stop = StopRule::new(1e-7, 500).unwrap();
        let b = ScheduleBundle::reproduction();
        let rw = solve_w(&scalar_spec(w, ConvexSet::whole_space(), 3.0), &b, &stop, &SolveOptions { force: false, freeze: Some(1) }).unwrap();
        let rc = solve_cho_qin(&scalar_spec(avg, ConvexSet::whole_space(), 3.0), &b, &stop, &SolveOptions::default()).unwrap();
        assert_eq!(rw.iterations, rc.iterations);
        for (a, c) in rw.trace.rows.iter().zip(&rc.trace.rows) {
            assert!(a.x.distance(&c.x) < 1e-14);
        }
    }

    #[test]
    fn viscosity_path_examples() {
        let stop = StopRule::new(1e-13, 1_000_000).unwrap();
        let id = NonexpansiveMap::identity();
        let a = StrongPositiveOp::identity(1);
        let zero = ContractionMap::constant(Point::scalar(0.0), 0.5).unwrap();
        for t in [0.5, 0.1, 0.01] {
            let x = viscosity_path(&id, &zero, 1.0, &a, t, &Point::scalar(2.0), &stop).unwrap();
            assert!(x.first().abs() < 1e-10);
        }
        let c = ContractionMap::constant(Point::scalar(0.7), 0.5).unwrap();
        let x = viscosity_path(&id, &c, 1.0, &a, 0.3, &Point::scalar(-1.0), &stop).unwrap();
        assert!((x.first() - 0.7).abs() < 1e-11);
    }

    #[test]
    fn viscosity_path_rejects_bad_t() {
        let stop = StopRule::default();
        let a = StrongPositiveOp::scaled_identity(1, 2.0).unwrap();
        let f = ContractionMap::linear(0.5).unwrap();
        let w = NonexpansiveMap::cosine();
        let x = Point::scalar(0.0);
        assert!(viscosity_path(&w, &f, 1.0, &a, 0.5, &x, &stop).is_err());
        assert!(viscosity_path(&w, &f, 1.0, &a, 0.0, &x, &stop).is_err());
        assert!(viscosity_path(&w, &f, 4.0, &a, 0.1, &x, &stop).is_err());
        assert!(viscosity_path(&w, &f, 1.0, &a, 0.4, &x, &stop).is_ok());
    }

    #[test]
    fn vi_residual_examples() {
        let f = ContractionMap::linear(0.5).unwrap();
        let a = StrongPositiveOp::identity(1);
        let q = Point::scalar(1.3);
        assert_eq!(vi_residual(&q, &f, 1.0, &a, &[q.clone()]).unwrap(), 0.0);
        let grid: Vec<Point> = (0..=100).map(|i| Point::scalar(1.0 + i as f64 / 100.0)).collect();
        assert!(vi_residual(&Point::scalar(1.0), &f, 1.0, &a, &grid).unwrap() <= 0.0);
        // at q = 1.5: <-0.75, 1 - 1.5> = 0.375
        let r = vi_residual(&Point::scalar(1.5), &f, 1.0, &a, &grid).unwrap();
        assert!((r - 0.375).abs() < 1e-15);
        assert_eq!(vi_residual(&q, &f, 1.0, &a, &[]), Err(Error::EmptySamples));
    }

    #[test]
    fn k_rule_weights_flow_through_solver() {
        let fam = KFamily::new(
            vec![NonexpansiveMap::sine(), NonexpansiveMap::cosine()],
            KWeights::rule(|n, i| if i == 1 { 0.5 + libm::pow(0.25, n as f64) } else { 1.0 / 3.0 }, Some(vec![0.5, 1.0 / 3.0])),
        )
        .unwrap();
        let spec = scalar_spec(fam, ConvexSet::whole_space(), 3.0);
        let r = solve_k(&spec, &ScheduleBundle::reproduction(), &StopRule::default(), &SolveOptions::default()).unwrap();
        assert!((r.q.first() - 0.714_911_744_068_771).abs() < 1e-3);
    }
}
