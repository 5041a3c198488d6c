//! Parameter sequences and their convergence conditions.
//!
//! The main iteration is driven by four scalar sequences `α_n, β_n, γ_n,
//! δ_n` in `[0, 1]`, K-family weights `λ_{n,i}`, and a constant `d` in
//! `(0, 1)`. [`validate_conditions`] checks them against
//!
//! ```text
//! C1  α_n → 0,  Σ α_n = ∞
//! C2  0 < liminf δ_n <= limsup δ_n < 1
//! C3  Σ |γ_n - γ_{n-1}| < ∞           (and Σ |λ_{n,i} - λ_{n-1,i}| < ∞)
//! C4  Σ |α_n - α_{n-1}| < ∞
//! C5  Σ |β_n - β_{n-1}| < ∞
//! C6  (1 + β_n) γ_n - 2 β_n > d
//! ```
//!
//! Constant and power schedules are decided in closed form. Table-backed
//! schedules can only be inspected over their finite prefix, so they never
//! earn more than `PassNumeric`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::family::KWeights;

/// Margin used for the liminf/limsup surrogate in C2.
pub const C2_MARGIN: f64 = 1e-6;
/// Threshold below which [`check_xu_decay`] calls a sequence decayed.
pub const DECAY_THRESHOLD: f64 = 1e-8;

/// A scalar sequence indexed from `n = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarSchedule {
    Constant(f64),
    /// `a / (n + 1)^p`
    Power { a: f64, p: f64 },
    /// Explicit values; the last entry repeats forever.
    Table(Vec<f64>),
}

impl ScalarSchedule {
    pub fn power(a: f64, p: f64) -> Self {
        ScalarSchedule::Power { a, p }
    }

    /// Raw value, no range check.
    pub fn value(&self, n: usize) -> f64 {
        match self {
            ScalarSchedule::Constant(c) => *c,
            ScalarSchedule::Power { a, p } => a / libm::pow(n as f64 + 1.0, *p),
            ScalarSchedule::Table(t) => t[n.min(t.len().saturating_sub(1))],
        }
    }

    /// Value at `n`, rejected unless it lies in `[0, 1]`.
    pub fn eval(&self, name: &'static str, n: usize) -> Result<f64> {
        let v = self.value(n);
        if (0.0..=1.0).contains(&v) {
            Ok(v)
        } else {
            Err(Error::ScheduleOutOfRange { sequence: name, index: n, value: v })
        }
    }

    /// `Σ_{n=1..=horizon} |s_n - s_{n-1}|`. Closed form for constant and
    /// power schedules (monotone, so the sum telescopes to `|s_0 - s_N|`).
    pub fn variation(&self, horizon: usize) -> f64 {
        match self {
            ScalarSchedule::Constant(_) => 0.0,
            ScalarSchedule::Power { .. } => (self.value(0) - self.value(horizon)).abs(),
            ScalarSchedule::Table(_) => {
                (1..=horizon).map(|n| (self.value(n) - self.value(n - 1)).abs()).sum()
            }
        }
    }

    fn is_table(&self) -> bool {
        matches!(self, ScalarSchedule::Table(_))
    }

    fn table_len(&self) -> usize {
        match self {
            ScalarSchedule::Table(t) => t.len(),
            _ => 0,
        }
    }
}

impl fmt::Display for ScalarSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarSchedule::Constant(c) => write!(f, "const:{c}"),
            ScalarSchedule::Power { a, p } => write!(f, "power:{a},{p}"),
            ScalarSchedule::Table(t) => {
                f.write_str("table:")?;
                for (i, v) in t.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

/// K-family weights carried by a bundle, with the family size.
#[derive(Debug, Clone)]
pub struct LambdaSchedule {
    weights: KWeights,
    count: usize,
}

impl LambdaSchedule {
    pub fn new(weights: KWeights, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::IndexOutOfRange { name: "lambda count", index: 0, min: 1, max: usize::MAX });
        }
        if let Some(l) = weights.limits() {
            if l.len() != count {
                return Err(Error::DimensionMismatch { expected: count, found: l.len() });
            }
        }
        Ok(LambdaSchedule { weights, count })
    }

    pub fn constant(values: Vec<f64>) -> Result<Self> {
        let count = values.len();
        LambdaSchedule::new(KWeights::Constant(values), count)
    }

    pub fn weights(&self) -> &KWeights {
        &self.weights
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

/// The sequences and constant the iteration is run with.
#[derive(Debug, Clone)]
pub struct ScheduleBundle {
    pub alpha: ScalarSchedule,
    pub beta: ScalarSchedule,
    pub gamma_seq: ScalarSchedule,
    pub delta: ScalarSchedule,
    pub lambda: Option<LambdaSchedule>,
    d: f64,
}

impl ScheduleBundle {
    pub fn new(
        alpha: ScalarSchedule,
        beta: ScalarSchedule,
        gamma_seq: ScalarSchedule,
        delta: ScalarSchedule,
        d: f64,
    ) -> Result<Self> {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::InvalidParameter { name: "d", value: d });
        }
        Ok(ScheduleBundle { alpha, beta, gamma_seq, delta, lambda: None, d })
    }

    /// `α_n = 1/(n+1)`, `β_n = 0.1`, `γ_n = 0.5`, `δ_n = 0.5`, `d = 0.3`.
    pub fn reproduction() -> Self {
        ScheduleBundle {
            alpha: ScalarSchedule::power(1.0, 1.0),
            beta: ScalarSchedule::Constant(0.1),
            gamma_seq: ScalarSchedule::Constant(0.5),
            delta: ScalarSchedule::Constant(0.5),
            lambda: None,
            d: 0.3,
        }
    }

    pub fn with_lambda(mut self, lambda: LambdaSchedule) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn describe(&self) -> String {
        format!(
            "alpha={} beta={} gammaseq={} delta={} d={}",
            self.alpha, self.beta, self.gamma_seq, self.delta, self.d
        )
    }
}

/// Values of every sequence at one index.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleValues {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub lambda: Vec<f64>,
}

pub fn eval_bundle(bundle: &ScheduleBundle, n: usize) -> Result<BundleValues> {
    let lambda = match &bundle.lambda {
        None => Vec::new(),
        Some(l) => (1..=l.count)
            .map(|i| {
                let v = l.weights.value(n, i);
                if (0.0..=1.0).contains(&v) {
                    Ok(v)
                } else {
                    Err(Error::ScheduleOutOfRange { sequence: "lambda", index: n, value: v })
                }
            })
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(BundleValues {
        alpha: bundle.alpha.eval("alpha", n)?,
        beta: bundle.beta.eval("beta", n)?,
        gamma: bundle.gamma_seq.eval("gammaseq", n)?,
        delta: bundle.delta.eval("delta", n)?,
        lambda,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Condition {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl Condition {
    pub const ALL: [Condition; 6] =
        [Condition::C1, Condition::C2, Condition::C3, Condition::C4, Condition::C5, Condition::C6];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::C1 => "C1",
            Condition::C2 => "C2",
            Condition::C3 => "C3",
            Condition::C4 => "C4",
            Condition::C5 => "C5",
            Condition::C6 => "C6",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    PassAnalytic,
    PassNumeric,
    /// Violated at the witness index `n`.
    Fail { witness: usize },
    Unknown,
}

impl Status {
    pub fn passed(&self) -> bool {
        matches!(self, Status::PassAnalytic | Status::PassNumeric)
    }

    fn severity(&self) -> u8 {
        match self {
            Status::PassAnalytic => 0,
            Status::PassNumeric => 1,
            Status::Unknown => 2,
            Status::Fail { .. } => 3,
        }
    }

    fn worst(self, other: Status) -> Status {
        if other.severity() > self.severity() {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::PassAnalytic => f.write_str("pass-analytic"),
            Status::PassNumeric => f.write_str("pass-numeric"),
            Status::Fail { witness } => write!(f, "fail(n={witness})"),
            Status::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionEntry {
    pub condition: Condition,
    pub status: Status,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub entries: Vec<ConditionEntry>,
    pub horizon: usize,
    /// First out-of-range emission within the horizon, if any.
    pub range_violation: Option<(&'static str, usize, f64)>,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn status(&self, c: Condition) -> Status {
        self.entries.iter().find(|e| e.condition == c).map(|e| e.status).unwrap_or(Status::Unknown)
    }

    pub fn all_pass(&self) -> bool {
        self.range_violation.is_none() && self.entries.iter().all(|e| e.status.passed())
    }

    pub fn failures(&self) -> Vec<&ConditionEntry> {
        self.entries.iter().filter(|e| !e.status.passed()).collect()
    }
}

impl fmt::Display for ConditionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "horizon = {}", self.horizon)?;
        if let Some((seq, n, v)) = self.range_violation {
            writeln!(f, "range: {seq} emits {v} at n = {n}")?;
        }
        for e in &self.entries {
            writeln!(f, "{}: {} ({})", e.condition, e.status, e.note)?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

const TABLE_CAVEAT: &str = "table prefix only; tail unverifiable";

fn check_c1(alpha: &ScalarSchedule) -> (Status, String) {
    match *alpha {
        ScalarSchedule::Constant(c) if c != 0.0 => {
            (Status::Fail { witness: 0 }, format!("limit is {c}, not 0"))
        }
        ScalarSchedule::Constant(_) => (Status::Fail { witness: 0 }, "sum of alpha_n is 0".into()),
        ScalarSchedule::Power { a, p } => {
            if a == 0.0 {
                (Status::Fail { witness: 0 }, "sum of alpha_n is 0".into())
            } else if p <= 0.0 {
                (Status::Fail { witness: 0 }, format!("limit is not 0 (p = {p})"))
            } else if p <= 1.0 {
                (Status::PassAnalytic, "a/(n+1)^p with 0 < p <= 1 vanishes, sum diverges".into())
            } else {
                (Status::Fail { witness: 0 }, format!("sum converges (p = {p} > 1)"))
            }
        }
        ScalarSchedule::Table(ref t) => {
            let max = t.iter().fold(0.0f64, |m, &v| m.max(v));
            let last = t[t.len() - 1];
            let mass: f64 = t.iter().sum();
            if max > 0.0 && last <= 0.1 * max && mass >= 1.0 {
                (Status::PassNumeric, format!("last/max = {:.3e}, prefix sum = {mass:.3}; {TABLE_CAVEAT}", last / max))
            } else {
                (Status::Fail { witness: t.len() - 1 }, format!("prefix neither decays a decade nor carries unit mass; {TABLE_CAVEAT}"))
            }
        }
    }
}

fn delta_bounds_ok(v: f64) -> bool {
    v > C2_MARGIN && v < 1.0 - C2_MARGIN
}

fn check_c2(delta: &ScalarSchedule) -> (Status, String) {
    match *delta {
        ScalarSchedule::Constant(c) => {
            if delta_bounds_ok(c) {
                (Status::PassAnalytic, format!("constant {c} in (0, 1)"))
            } else {
                (Status::Fail { witness: 0 }, format!("constant {c} not inside (0, 1) by margin"))
            }
        }
        ScalarSchedule::Power { a, p } if p == 0.0 => check_c2(&ScalarSchedule::Constant(a)),
        ScalarSchedule::Power { a, p } => {
            if p < 0.0 {
                return (Status::Fail { witness: 0 }, "grows without bound".into());
            }
            // liminf is 0; witness is the first n with a/(n+1)^p <= margin.
            let mut n = if a <= C2_MARGIN {
                0
            } else {
                let approx = libm::pow(a / C2_MARGIN, 1.0 / p) - 1.0;
                if approx >= usize::MAX as f64 { usize::MAX } else { libm::floor(approx.max(0.0)) as usize }
            };
            while n > 0 && n < usize::MAX && delta.value(n - 1) <= C2_MARGIN {
                n -= 1;
            }
            while n < usize::MAX && delta.value(n) > C2_MARGIN {
                n += 1;
            }
            (Status::Fail { witness: n }, "liminf is 0".into())
        }
        ScalarSchedule::Table(ref t) => {
            let start = (t.len() - 1) / 2;
            match (start..t.len()).find(|&n| !delta_bounds_ok(t[n])) {
                None => (Status::PassNumeric, format!("tail half of table inside (0, 1) by margin; {TABLE_CAVEAT}")),
                Some(n) => (Status::Fail { witness: n }, format!("tail value {} outside (0, 1) by margin", t[n])),
            }
        }
    }
}

fn check_variation(s: &ScalarSchedule) -> (Status, String) {
    match *s {
        ScalarSchedule::Constant(_) => (Status::PassAnalytic, "constant: differences vanish".into()),
        ScalarSchedule::Power { a, p } if p >= 0.0 => {
            (Status::PassAnalytic, format!("monotone, telescopes to {}", (a - s.value(usize::MAX)).abs()))
        }
        ScalarSchedule::Power { .. } => (Status::Fail { witness: 0 }, "unbounded growth".into()),
        ScalarSchedule::Table(_) => (Status::PassNumeric, format!("total variation {:.3e}; {TABLE_CAVEAT}", s.variation(s.table_len()))),
    }
}

fn check_lambda_variation(l: &LambdaSchedule) -> (Status, String) {
    if l.weights.is_constant() {
        (Status::PassAnalytic, "lambda constant in n".into())
    } else {
        (Status::Unknown, "lambda given by an opaque rule".into())
    }
}

fn check_c6(bundle: &ScheduleBundle, horizon: usize) -> (Status, String) {
    let c6 = |n: usize| {
        let b = bundle.beta.value(n);
        (1.0 + b) * bundle.gamma_seq.value(n) - 2.0 * b
    };
    let d = bundle.d;
    if let (ScalarSchedule::Constant(_), ScalarSchedule::Constant(_)) = (&bundle.beta, &bundle.gamma_seq) {
        let v = c6(0);
        return if v > d {
            (Status::PassAnalytic, format!("(1+beta)gamma - 2beta = {v} > d = {d}"))
        } else {
            (Status::Fail { witness: 0 }, format!("(1+beta)gamma - 2beta = {v} <= d = {d}"))
        };
    }
    match (0..=horizon).find(|&n| c6(n) <= d) {
        None => (Status::PassNumeric, format!("holds for n <= {horizon}")),
        Some(n) => (Status::Fail { witness: n }, format!("value {} <= d = {d}", c6(n))),
    }
}

/// Checks a bundle against C1 to C6. `horizon` (at least 100) bounds the
/// numeric checks; closed-form decisions do not depend on it.
pub fn validate_conditions(bundle: &ScheduleBundle, horizon: usize) -> Result<ConditionReport> {
    if horizon < 100 {
        return Err(Error::InvalidParameter { name: "horizon", value: horizon as f64 });
    }
    let mut notes = Vec::new();

    let range_violation = (0..=horizon).find_map(|n| {
        [("alpha", &bundle.alpha), ("beta", &bundle.beta), ("gammaseq", &bundle.gamma_seq), ("delta", &bundle.delta)]
            .into_iter()
            .find_map(|(name, s)| {
                let v = s.value(n);
                (!(0.0..=1.0).contains(&v)).then_some((name, n, v))
            })
    });

    let (c1, n1) = check_c1(&bundle.alpha);
    let (c2, n2) = check_c2(&bundle.delta);
    let (mut c3, mut n3) = check_variation(&bundle.gamma_seq);
    if let Some(l) = &bundle.lambda {
        let (s, note) = check_lambda_variation(l);
        c3 = c3.worst(s);
        n3 = format!("gammaseq: {n3}; {note}");
    }
    let (c4, n4) = check_variation(&bundle.alpha);
    let (c5, n5) = check_variation(&bundle.beta);
    let (c6, n6) = check_c6(bundle, horizon);

    if [&bundle.alpha, &bundle.beta, &bundle.gamma_seq, &bundle.delta].iter().any(|s| s.is_table()) {
        notes.push("table-backed sequences are judged on their finite prefix".into());
    }

    let entries = [(Condition::C1, c1, n1), (Condition::C2, c2, n2), (Condition::C3, c3, n3), (Condition::C4, c4, n4), (Condition::C5, c5, n5), (Condition::C6, c6, n6)]
        .into_iter()
        .map(|(condition, status, note)| ConditionEntry { condition, status, note })
        .collect();

    Ok(ConditionReport { entries, horizon, range_violation, notes })
}

/// Simulation of `a_{n+1} = (1 - γ_n) a_n + δ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct XuDecay {
    /// `a_horizon < DECAY_THRESHOLD`
    pub decaying: bool,
    /// First `n` with `a_n < DECAY_THRESHOLD`.
    pub first_below: Option<usize>,
    pub trace: Vec<f64>,
}

/// Numeric illustration of the decay lemma: simulates the recursion for
/// `horizon` steps from `a0`.
pub fn check_xu_decay(
    gamma_seq: &ScalarSchedule,
    delta_seq: impl Fn(usize) -> f64,
    a0: f64,
    horizon: usize,
) -> Result<XuDecay> {
    if !(a0 >= 0.0 && a0.is_finite()) {
        return Err(Error::InvalidParameter { name: "a0", value: a0 });
    }
    let mut trace = Vec::with_capacity(horizon + 1);
    let mut a = a0;
    trace.push(a);
    for n in 0..horizon {
        let g = gamma_seq.eval("gammaseq", n)?;
        a = (1.0 - g) * a + delta_seq(n);
        trace.push(a);
    }
    let first_below = trace.iter().position(|&v| v < DECAY_THRESHOLD);
    Ok(XuDecay { decaying: a < DECAY_THRESHOLD, first_below, trace })
}
