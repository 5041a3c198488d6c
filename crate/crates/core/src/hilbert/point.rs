use alloc::vec::Vec;
use core::ops::{Add, Index, Mul, Sub};

use crate::error::{Error, Result};

/// An element of the ambient space ℝ^d.
///
/// Construction through [`Point::new`] rejects empty and non-finite input.
/// Arithmetic through the operator impls panics on mismatched dimensions,
/// the same way slice indexing would.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPoint);
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point(coords))
    }

    /// One-dimensional point. Panics if `x` is not finite.
    pub fn scalar(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite scalar point");
        Point(alloc::vec![x])
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Point(alloc::vec![0.0; dim])
    }

    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    /// First coordinate; the whole value for 1-D points.
    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn distance(&self, other: &Point) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        libm::sqrt(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }

    /// `a·x + b·y`, evaluated coordinatewise as `a*x_i + b*y_i`.
    pub fn lincomb(a: f64, x: &Point, b: f64, y: &Point) -> Point {
        assert_eq!(x.dim(), y.dim(), "dimension mismatch");
        Point(x.0.iter().zip(&y.0).map(|(xi, yi)| a * xi + b * yi).collect())
    }

    pub fn map_coords(&self, f: impl Fn(f64) -> f64) -> Point {
        Point(self.0.iter().map(|&c| f(c)).collect())
    }

    fn check_dims(&self, other: &Point) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() })
        }
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Point {
    type Output = Point;

    fn add(self, rhs: &Point) -> Point {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Point {
    type Output = Point;

    fn sub(self, rhs: &Point) -> Point {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Point {
    type Output = Point;

    fn mul(self, s: f64) -> Point {
        Point(self.0.iter().map(|c| c * s).collect())
    }
}

/// Euclidean inner product `Σ u_i v_i`.
pub fn inner(u: &Point, v: &Point) -> Result<f64> {
    u.check_dims(v)?;
    Ok(dot(u, v))
}

pub(crate) fn dot(u: &Point, v: &Point) -> f64 {
    u.0.iter().zip(&v.0).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn inner_products() {
        assert_eq!(inner(&p(&[1.0, 0.0]), &p(&[0.0, 1.0])).unwrap(), 0.0);
        assert_eq!(inner(&p(&[2.0]), &p(&[3.0])).unwrap(), 6.0);
        assert_eq!(inner(&p(&[1.0, 2.0]), &p(&[3.0, 4.0])).unwrap(), 11.0);
    }

    #[test]
    fn inner_rejects_mismatch() {
        assert_eq!(
            inner(&p(&[1.0]), &p(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        );
    }

    #[test]
    fn construction_invariants() {
        assert_eq!(Point::new(vec![]), Err(Error::EmptyPoint));
        assert_eq!(Point::new(vec![f64::NAN]), Err(Error::NonFinite));
        assert_eq!(Point::new(vec![1.0, f64::INFINITY]), Err(Error::NonFinite));
    }

    #[test]
    fn norms() {
        assert_eq!(p(&[3.0, 4.0]).norm(), 5.0);
        assert_eq!(p(&[1.0, 1.0]).distance(&p(&[4.0, 5.0])), 5.0);
        assert_eq!(Point::lincomb(0.5, &p(&[2.0]), 2.0, &p(&[1.0])), p(&[3.0]));
    }
}
