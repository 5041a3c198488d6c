use alloc::vec::Vec;

use super::point::Point;
use crate::error::{Error, Result};

/// Relative tolerance for the symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Off-diagonal Frobenius norm (relative to the full norm) at which Jacobi stops.
pub const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::NotSquare { rows: n, cols: row.len() });
            }
            data.extend_from_slice(row);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        Matrix::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        let diag: Vec<f64> = alloc::vec![c; n];
        Matrix::diag(&diag)
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        assert!(n > 0, "empty diagonal");
        let mut data = alloc::vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, x: &Point) -> Point {
        assert_eq!(self.n, x.dim(), "dimension mismatch");
        let out = (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x.coords())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Point::from_raw(out)
    }

    /// Rejects asymmetry beyond `SYMMETRY_TOL` relative to the largest entry.
    pub fn check_symmetric(&self) -> Result<()> {
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if (self.get(i, j) - self.get(j, i)).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// `I - rho·A`
    fn identity_minus(&self, rho: f64) -> Matrix {
        let mut data: Vec<f64> = self.data.iter().map(|v| -rho * v).collect();
        for i in 0..self.n {
            data[i * self.n + i] += 1.0;
        }
        Matrix { n: self.n, data }
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    m.check_symmetric()?;
    let n = m.n;
    let mut a = m.data.clone();
    let frob: f64 = libm::sqrt(a.iter().map(|v| v * v).sum());
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        libm::sqrt(s)
    };

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= JACOBI_TOL * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                // A <- J^T A J on rows/cols p and q
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

/// Smallest eigenvalue of a symmetric matrix; errors unless it is positive.
pub fn strong_positivity_coefficient(m: &Matrix) -> Result<f64> {
    let eig = symmetric_eigenvalues(m)?;
    let min = eig[0];
    if min > 0.0 {
        Ok(min)
    } else {
        Err(Error::NotStronglyPositive { min_eigenvalue: min })
    }
}

/// A self-adjoint operator with `<Ax, x> >= gamma_bar ‖x‖²`, `gamma_bar > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct StrongPositiveOp {
    matrix: Matrix,
    gamma_bar: f64,
    op_norm: f64,
}

impl StrongPositiveOp {
    pub fn new(matrix: Matrix) -> Result<Self> {
        let eig = symmetric_eigenvalues(&matrix)?;
        let gamma_bar = eig[0];
        if gamma_bar <= 0.0 {
            return Err(Error::NotStronglyPositive { min_eigenvalue: gamma_bar });
        }
        let op_norm = eig[eig.len() - 1];
        Ok(StrongPositiveOp { matrix, gamma_bar, op_norm })
    }

    pub fn identity(dim: usize) -> Self {
        StrongPositiveOp::scaled_identity(dim, 1.0).expect("identity is strongly positive")
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::NotStronglyPositive { min_eigenvalue: c });
        }
        Ok(StrongPositiveOp { matrix: Matrix::scaled_identity(dim, c), gamma_bar: c, op_norm: c })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    pub fn op_norm(&self) -> f64 {
        self.op_norm
    }

    pub fn apply(&self, x: &Point) -> Point {
        self.matrix.apply(x)
    }
}

/// Returns `(‖I - rho·A‖, 1 - rho·gamma_bar)` for `0 < rho <= 1/‖A‖`.
pub fn damped_operator_norm_bound(a: &StrongPositiveOp, rho: f64) -> Result<(f64, f64)> {
    if !(rho > 0.0 && rho * a.op_norm <= 1.0 + 1e-12) {
        return Err(Error::InvalidParameter { name: "rho", value: rho });
    }
    // I - rho·A is symmetric, so its largest singular value is its spectral radius.
    let eig = symmetric_eigenvalues(&a.matrix.identity_minus(rho))?;
    let lhs = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((lhs, 1.0 - rho * a.gamma_bar))
}
