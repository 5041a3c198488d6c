use alloc::vec::Vec;

use super::point::{dot, Point};
use crate::error::{Error, Result};

/// Shapes of closed convex sets with a closed-form metric projection.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    WholeSpace,
    Box { lo: Point, hi: Point },
    Ball { center: Point, radius: f64 },
    /// `{x : <normal, x> <= offset}`
    HalfSpace { normal: Point, offset: f64 },
}

/// A nonempty closed convex subset of ℝ^d.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSet(Shape);

impl ConvexSet {
    pub fn whole_space() -> Self {
        ConvexSet(Shape::WholeSpace)
    }

    pub fn boxed(lo: Point, hi: Point) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch { expected: lo.dim(), found: hi.dim() });
        }
        if lo.coords().iter().zip(hi.coords()).any(|(l, h)| l > h) {
            return Err(Error::InvalidSet("box needs lo <= hi in every coordinate"));
        }
        Ok(ConvexSet(Shape::Box { lo, hi }))
    }

    /// One-dimensional interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        ConvexSet::boxed(Point::new(alloc::vec![lo])?, Point::new(alloc::vec![hi])?)
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidSet("ball radius must be positive"));
        }
        Ok(ConvexSet(Shape::Ball { center, radius }))
    }

    pub fn halfspace(normal: Point, offset: f64) -> Result<Self> {
        if normal.norm_sq() == 0.0 {
            return Err(Error::InvalidSet("halfspace normal must be nonzero"));
        }
        if !offset.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(ConvexSet(Shape::HalfSpace { normal, offset }))
    }

    pub fn shape(&self) -> &Shape {
        &self.0
    }

    /// Dimension the set is tied to; `None` for the whole space.
    pub fn dim(&self) -> Option<usize> {
        match &self.0 {
            Shape::WholeSpace => None,
            Shape::Box { lo, .. } => Some(lo.dim()),
            Shape::Ball { center, .. } => Some(center.dim()),
            Shape::HalfSpace { normal, .. } => Some(normal.dim()),
        }
    }

    pub fn check_dim(&self, x: &Point) -> Result<()> {
        match self.dim() {
            Some(d) if d != x.dim() => Err(Error::DimensionMismatch { expected: d, found: x.dim() }),
            _ => Ok(()),
        }
    }

    /// Nearest point of the set. Panics on a dimension mismatch; use
    /// [`project`] for a checked call.
    pub fn project(&self, x: &Point) -> Point {
        match &self.0 {
            Shape::WholeSpace => x.clone(),
            Shape::Box { lo, hi } => {
                assert_eq!(lo.dim(), x.dim(), "dimension mismatch");
                let coords: Vec<f64> = x
                    .coords()
                    .iter()
                    .zip(lo.coords().iter().zip(hi.coords()))
                    .map(|(&c, (&l, &h))| c.max(l).min(h))
                    .collect();
                Point::from_raw(coords)
            }
            Shape::Ball { center, radius } => {
                let offset = x - center;
                let dist = offset.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    Point::lincomb(1.0, center, radius / dist, &offset)
                }
            }
            Shape::HalfSpace { normal, offset } => {
                assert_eq!(normal.dim(), x.dim(), "dimension mismatch");
                let excess = dot(normal, x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    Point::lincomb(1.0, x, -excess / normal.norm_sq(), normal)
                }
            }
        }
    }

    /// Distance from `x` to the set.
    pub fn residual(&self, x: &Point) -> f64 {
        x.distance(&self.project(x))
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        self.residual(x) <= tol
    }
}

/// Checked metric projection.
pub fn project(set: &ConvexSet, x: &Point) -> Result<Point> {
    set.check_dim(x)?;
    Ok(set.project(x))
}
