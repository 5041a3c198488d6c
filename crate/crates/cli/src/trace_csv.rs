//! Trace CSV: `#`-prefixed header lines, then
//! `n,x_1..x_d,z_1..z_d,y_1..y_d,step_norm,r,delta`.
//!
//! Floats use Rust's shortest round-trip formatting; exact convergence in
//! `r` or `delta` is written as `-inf`. Cells that do not apply (the last
//! row's step, `delta` without a reference) are left empty.

use std::io::{self, Write};

use viscofix_core::hilbert::Point;
use viscofix_core::oracle::{metric_delta, metric_r};
use viscofix_core::solver::IterationTrace;

pub fn column_names(dim: usize) -> Vec<String> {
    let mut cols = vec!["n".to_string()];
    for stage in ["x", "z", "y"] {
        cols.extend((1..=dim).map(|i| format!("{stage}_{i}")));
    }
    cols.extend(["step_norm", "r", "delta"].map(String::from));
    cols
}

/// Writes `header` (one `# ` line per input line) and the rows.
/// `reference` feeds the `delta` column; a zero reference leaves it empty.
pub fn write_trace(
    out: &mut impl Write,
    header: &str,
    trace: &IterationTrace,
    reference: Option<&Point>,
) -> io::Result<()> {
    for line in header.lines() {
        writeln!(out, "# {line}")?;
    }
    writeln!(out, "{}", column_names(trace.dim()).join(","))?;
    let reference = reference.filter(|p| p.norm() > 0.0);
    for (i, row) in trace.rows.iter().enumerate() {
        write!(out, "{}", row.n)?;
        for p in [&row.x, &row.z, &row.y] {
            for c in p.coords() {
                write!(out, ",{c}")?;
            }
        }
        match row.step_norm {
            Some(s) => write!(out, ",{s},{}", metric_r(trace, i).unwrap_or(f64::NAN))?,
            None => write!(out, ",,")?,
        }
        match reference.and_then(|p| metric_delta(trace, i, p).ok()) {
            Some(d) => writeln!(out, ",{d}")?,
            None => writeln!(out, ",")?,
        }
    }
    Ok(())
}

pub fn trace_to_string(header: &str, trace: &IterationTrace, reference: Option<&Point>) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, header, trace, reference).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// The data lines only, without `#` comments.
pub fn data_lines(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#')).collect()
}
