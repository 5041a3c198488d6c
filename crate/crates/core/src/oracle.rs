//! Independent checks: bracketing bisection and damped Picard fixed-point
//! oracles, the log-scale convergence metrics, and the published table
//! rows the solvers are compared against.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hilbert::{NonexpansiveMap, Operator, Point};
use crate::solver::{IterationTrace, SolveResult, StopRule};

/// Fixed point of a scalar map by bisection on `g(x) = map(x) - x`.
/// Stops once the bracket is narrower than `tol`.
pub fn bisection_fixed_point(map: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", value: tol });
    }
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let g = |x: f64| map(x) - x;
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() || g_lo.is_nan() || g_hi.is_nan() {
        return Err(Error::NoSignChange { lo, hi, g_lo, g_hi });
    }
    while hi - lo > tol {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Ok(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardOutcome {
    pub point: Point,
    pub iterations: usize,
    pub converged: bool,
    pub last_step: f64,
}

/// `x ← (1 - damping) x + damping·map(x)` until the step norm drops below
/// `stop.eps_step()`. On budget exhaustion the last iterate is returned
/// with `converged = false`.
pub fn damped_picard(map: &impl Operator, x0: &Point, damping: f64, stop: &StopRule) -> Result<PicardOutcome> {
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::InvalidParameter { name: "damping", value: damping });
    }
    let mut x = x0.clone();
    let mut last_step = f64::INFINITY;
    for k in 0..stop.max_iter() {
        let next = Point::lincomb(1.0 - damping, &x, damping, &map.apply(&x));
        if !next.is_finite() {
            return Err(Error::Diverged { iteration: k + 1, norm: next.norm() });
        }
        last_step = next.distance(&x);
        x = next;
        if last_step < stop.eps_step() {
            return Ok(PicardOutcome { point: x, iterations: k + 1, converged: true, last_step });
        }
    }
    Ok(PicardOutcome { point: x, iterations: stop.max_iter(), converged: false, last_step })
}

/// `log10 ‖x_{n+1} - x_n‖`; a zero step gives `-inf`.
pub fn metric_r(trace: &IterationTrace, n: usize) -> Result<f64> {
    let max = trace.len().saturating_sub(2);
    if n + 1 >= trace.len() {
        return Err(Error::IndexOutOfRange { name: "n", index: n, min: 0, max });
    }
    Ok(log10_or_sentinel(trace.rows[n + 1].x.distance(&trace.rows[n].x)))
}

/// `log10(‖x_n - x*‖ / ‖x*‖)`; `x_n = x*` gives `-inf`.
pub fn metric_delta(trace: &IterationTrace, n: usize, x_star: &Point) -> Result<f64> {
    let row = trace.rows.get(n).ok_or(Error::IndexOutOfRange {
        name: "n",
        index: n,
        min: 0,
        max: trace.len().saturating_sub(1),
    })?;
    relative_log_error(&row.x, x_star)
}

/// `log10(‖x - x*‖ / ‖x*‖)`.
pub fn relative_log_error(x: &Point, x_star: &Point) -> Result<f64> {
    if x.dim() != x_star.dim() {
        return Err(Error::DimensionMismatch { expected: x_star.dim(), found: x.dim() });
    }
    let scale = x_star.norm();
    if scale == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(log10_or_sentinel(x.distance(x_star) / scale))
}

fn log10_or_sentinel(v: f64) -> f64 {
    if v == 0.0 {
        f64::NEG_INFINITY
    } else {
        libm::log10(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableMethod {
    W,
    K,
}

/// One printed row of the published experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct TableTarget {
    pub table_id: u8,
    pub method: TableMethod,
    pub x_star: f64,
    pub iterations: usize,
    pub map_images: Vec<(&'static str, f64)>,
}

impl TableTarget {
    /// Builtin map labels used in the row, in order.
    pub fn map_labels(&self) -> Vec<&'static str> {
        self.map_images.iter().map(|(l, _)| *l).collect()
    }
}

/// All six published rows, exactly as printed.
pub fn table_targets() -> Vec<TableTarget> {
    use TableMethod::{K, W};
    let row = |table_id, method, x_star, iterations, map_images: &[(&'static str, f64)]| TableTarget {
        table_id,
        method,
        x_star,
        iterations,
        map_images: map_images.to_vec(),
    };
    alloc::vec![
        row(1, W, 0.75290, 25, &[("sin", 0.6837577884), ("cos", 0.7297090424)]),
        row(1, K, 0.71491, 19, &[("sin", 0.6555494556), ("cos", 0.7551522437)]),
        row(2, W, 0.0089628, 44834, &[("sin", 0.0089626800), ("atan", 0.0089625600)]),
        row(2, K, 0.0080118, 40066, &[("sin", 0.0080117142), ("atan", 0.0080116285)]),
        row(3, W, 0.59403, 85, &[("sin", 0.5597051868), ("cos", 0.8286918026), ("atan", 0.5360182305)]),
        row(3, K, 0.67735, 18, &[("sin", 0.6267302508), ("cos", 0.7792362880), ("atan", 0.5953623347)]),
    ]
}

pub fn table_target(table_id: u8, method: TableMethod) -> Option<TableTarget> {
    table_targets().into_iter().find(|t| t.table_id == table_id && t.method == method)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageComparison {
    pub label: String,
    pub printed: f64,
    /// Builtin map evaluated at the printed `x*`.
    pub at_printed_x: f64,
    /// Builtin map evaluated at our limit.
    pub at_q: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableComparison {
    pub table_id: u8,
    pub method: TableMethod,
    pub q: f64,
    pub x_star: f64,
    pub abs_error: f64,
    pub within_tol: bool,
    pub our_iterations: usize,
    pub printed_iterations: usize,
    pub images: Vec<ImageComparison>,
}

/// Compares a 1-D result against a printed row. Iteration counts are
/// reported, never judged.
pub fn compare_to_table(result: &SolveResult, target: &TableTarget, tol: f64) -> Result<TableComparison> {
    if result.q.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: result.q.dim() });
    }
    let q = result.q.first();
    let images = target
        .map_images
        .iter()
        .map(|&(label, printed)| {
            let map = NonexpansiveMap::by_name(label).expect("table rows use builtin labels");
            ImageComparison {
                label: label.into(),
                printed,
                at_printed_x: map.apply_scalar(target.x_star),
                at_q: map.apply_scalar(q),
            }
        })
        .collect();
    let abs_error = (q - target.x_star).abs();
    Ok(TableComparison {
        table_id: target.table_id,
        method: target.method,
        q,
        x_star: target.x_star,
        abs_error,
        within_tol: abs_error <= tol,
        our_iterations: result.iterations,
        printed_iterations: target.iterations,
        images,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{apply_k, KFamily};
    use crate::solver::{StopReason, TraceRow};
    use alloc::vec;

    fn trace_of(xs: &[f64]) -> IterationTrace {
        let rows = xs
            .iter()
            .enumerate()
            .map(|(n, &x)| TraceRow {
                n,
                x: Point::scalar(x),
                z: Point::scalar(x),
                y: Point::scalar(x),
                step_norm: xs.get(n + 1).map(|nx| (nx - x).abs()),
            })
            .collect();
        IterationTrace { header: vec![], rows }
    }

    #[test]
    fn bisection_examples() {
        let c = bisection_fixed_point(libm::cos, 0.0, 1.0, 1e-10).unwrap();
        assert!((c - 0.739_085_133_2).abs() < 1e-10);
        assert_eq!(bisection_fixed_point(|x| x / 2.0, -1.0, 1.0, 1e-12).unwrap(), 0.0);
        let k2 = KFamily::constant(
            vec![NonexpansiveMap::sine(), NonexpansiveMap::cosine()],
            vec![0.5, 1.0 / 3.0],
        )
        .unwrap();
        let x = bisection_fixed_point(|x| apply_k(&k2, 1, &Point::scalar(x)).unwrap().first(), 0.0, 1.0, 1e-8).unwrap();
        assert!((x - 0.71491).abs() < 5e-4);
    }

    #[test]
    fn bisection_reports_missing_sign_change() {
        match bisection_fixed_point(|x| x + 1.0, 0.0, 1.0, 1e-6) {
            Err(Error::NoSignChange { g_lo, g_hi, .. }) => assert_eq!((g_lo, g_hi), (1.0, 1.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn picard_examples() {
        let stop = StopRule::new(1e-12, 10_000).unwrap();
        let x0 = Point::scalar(3.0);
        let out = damped_picard(&NonexpansiveMap::identity(), &x0, 0.5, &stop).unwrap();
        assert_eq!((out.point, out.iterations), (x0.clone(), 1));
        let out = damped_picard(&NonexpansiveMap::cosine(), &x0, 0.5, &stop).unwrap();
        assert!(out.converged);
        assert!((out.point.first() - 0.739_085_133_215_160_6).abs() < 1e-6);
        assert!(damped_picard(&NonexpansiveMap::cosine(), &x0, 0.0, &stop).is_err());
        let short = StopRule::new(1e-12, 2).unwrap();
        assert!(!damped_picard(&NonexpansiveMap::cosine(), &x0, 0.5, &short).unwrap().converged);
    }

    #[test]
    fn metric_r_examples() {
        let t = trace_of(&[1.0, 1.01, 0.01, 0.01]);
        assert!((metric_r(&t, 0).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(metric_r(&t, 1).unwrap(), 0.0);
        assert_eq!(metric_r(&t, 2).unwrap(), f64::NEG_INFINITY);
        assert!(metric_r(&t, 3).is_err());
    }

    #[test]
    fn metric_delta_examples() {
        let t = trace_of(&[1.1, 1.0, 0.75]);
        let one = Point::scalar(1.0);
        assert!((metric_delta(&t, 0, &one).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(metric_delta(&t, 1, &one).unwrap(), f64::NEG_INFINITY);
        let d = metric_delta(&t, 2, &Point::scalar(0.71491)).unwrap();
        assert!((d + 1.309_068_003_706_559).abs() < 1e-12, "{d}");
        assert_eq!(metric_delta(&t, 0, &Point::scalar(0.0)), Err(Error::ZeroReference));
    }

    #[test]
    fn printed_images_match_builtin_maps() {
        for t in table_targets() {
            for &(label, printed) in &t.map_images {
                let v = NonexpansiveMap::by_name(label).unwrap().apply_scalar(t.x_star);
                assert!((v - printed).abs() <= 5e-5, "table {} {label}", t.table_id);
            }
        }
    }

    #[test]
    fn comparison_reports_side_by_side() {
        let target = table_target(1, TableMethod::K).unwrap();
        let result = SolveResult {
            q: Point::scalar(0.7146),
            iterations: 3000,
            reason: StopReason::StepConverged,
            trace: trace_of(&[0.7146]),
        };
        let c = compare_to_table(&result, &target, 1e-3).unwrap();
        assert!(c.within_tol);
        assert_eq!((c.our_iterations, c.printed_iterations), (3000, 19));
        assert_eq!(c.images.len(), 2);
        assert!((c.images[0].at_printed_x - 0.6555494556).abs() < 1e-9);
    }
}
