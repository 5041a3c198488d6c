//! W-mappings over infinite families and K-mappings over finite families.
//!
//! For an infinite family `T_1, T_2, ...` with weights `γ_1, γ_2, ...`
//! the W-mapping is built backwards from the identity:
//!
//! ```text
//! U_{n,n+1} = I
//! U_{n,k}   = γ_k T_k U_{n,k+1} + (1 - γ_k) I      k = n, ..., 1
//! W_n       = U_{n,1}
//! ```
//!
//! For a finite family `T_1, ..., T_N` with weights `λ_{n,i}` the K-mapping
//! is built forwards:
//!
//! ```text
//! U_{n,1} = λ_{n,1} T_1 + (1 - λ_{n,1}) I
//! U_{n,i} = λ_{n,i} T_i U_{n,i-1} + (1 - λ_{n,i}) U_{n,i-1}
//! K_n     = U_{n,N}
//! ```

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::hilbert::{NonexpansiveMap, Operator, Point};

/// How an infinite family is generated from a finite list of maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// `T_{i}` = `maps[(i - 1) mod len]`
    Cycle,
    /// `T_i` = identity beyond the list.
    IdentityPad,
}

/// Weight rule `i ↦ γ_i` (1-based).
#[derive(Clone)]
pub enum WeightRule {
    /// Table-backed; indices past the table repeat the last entry.
    Table(Vec<f64>),
    Function(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::Table(v) => f.debug_tuple("Table").field(v).finish(),
            WeightRule::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// An infinite family of nonexpansive maps with weights in `(0, gamma_max]`.
#[derive(Debug, Clone)]
pub struct WFamily {
    maps: Vec<NonexpansiveMap>,
    extension: Extension,
    weights: WeightRule,
    gamma_max: f64,
}

impl WFamily {
    /// Table-backed weights; each must lie in `(0, 1)`.
    pub fn new(maps: Vec<NonexpansiveMap>, extension: Extension, weights: Vec<f64>) -> Result<Self> {
        if maps.is_empty() || weights.is_empty() {
            return Err(Error::IndexOutOfRange { name: "family size", index: 0, min: 1, max: usize::MAX });
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w > 0.0 && w < 1.0) {
                return Err(Error::WeightOutOfRange { n: 0, i: i + 1, value: w });
            }
        }
        let gamma_max = weights.iter().fold(0.0f64, |m, &w| m.max(w));
        Ok(WFamily { maps, extension, weights: WeightRule::Table(weights), gamma_max })
    }

    /// Weights from a rule with a declared supremum `gamma_max < 1`.
    /// Each generated weight is checked against `(0, gamma_max]` on use.
    pub fn with_rule(
        maps: Vec<NonexpansiveMap>,
        extension: Extension,
        rule: impl Fn(usize) -> f64 + Send + Sync + 'static,
        gamma_max: f64,
    ) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::IndexOutOfRange { name: "family size", index: 0, min: 1, max: usize::MAX });
        }
        if !(gamma_max > 0.0 && gamma_max < 1.0) {
            return Err(Error::InvalidParameter { name: "gamma_max", value: gamma_max });
        }
        Ok(WFamily { maps, extension, weights: WeightRule::Function(Arc::new(rule)), gamma_max })
    }

    pub fn maps(&self) -> &[NonexpansiveMap] {
        &self.maps
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn weights(&self) -> &WeightRule {
        &self.weights
    }

    pub fn gamma_max(&self) -> f64 {
        self.gamma_max
    }

    /// `γ_i`, 1-based.
    pub fn weight(&self, i: usize) -> Result<f64> {
        let w = match &self.weights {
            WeightRule::Table(t) => t[(i - 1).min(t.len() - 1)],
            WeightRule::Function(f) => f(i),
        };
        if w > 0.0 && w <= self.gamma_max {
            Ok(w)
        } else {
            Err(Error::WeightOutOfRange { n: 0, i, value: w })
        }
    }

    /// `T_i`, 1-based; `None` stands for an identity pad.
    pub fn map(&self, i: usize) -> Option<&NonexpansiveMap> {
        let len = self.maps.len();
        match self.extension {
            Extension::Cycle => Some(&self.maps[(i - 1) % len]),
            Extension::IdentityPad => self.maps.get(i - 1),
        }
    }

    /// Dimension required by the maps, if any of them is tied to one.
    pub fn dim(&self) -> Option<usize> {
        self.maps.iter().find_map(NonexpansiveMap::dim)
    }
}

fn check_dim(required: Option<usize>, x: &Point) -> Result<()> {
    match required {
        Some(d) if d != x.dim() => Err(Error::DimensionMismatch { expected: d, found: x.dim() }),
        _ => Ok(()),
    }
}

/// `U_{n,k}(x)` by the backward recursion from `U_{n,n+1} = I`.
/// Performs exactly `n - k + 1` map evaluations.
pub fn apply_u(family: &WFamily, n: usize, k: usize, x: &Point) -> Result<Point> {
    if n == 0 {
        return Err(Error::IndexOutOfRange { name: "n", index: n, min: 1, max: usize::MAX });
    }
    if k == 0 || k > n + 1 {
        return Err(Error::IndexOutOfRange { name: "k", index: k, min: 1, max: n + 1 });
    }
    check_dim(family.dim(), x)?;
    let xs = x.coords();
    let mut u = xs.to_vec();
    for j in (k..=n).rev() {
        let g = family.weight(j)?;
        if let Some(t) = family.map(j) {
            if !t.apply_in_place(&mut u) {
                u = t.apply(&Point::from_raw(u)).into_coords();
            }
        }
        for (ui, xi) in u.iter_mut().zip(xs) {
            *ui = g * *ui + (1.0 - g) * xi;
        }
    }
    Ok(Point::from_raw(u))
}

/// `W_n(x) = U_{n,1}(x)`.
pub fn apply_w(family: &WFamily, n: usize, x: &Point) -> Result<Point> {
    apply_u(family, n, 1, x)
}

/// Approximates `W(x) = lim W_n(x)`: returns `W_n(x)` for the first `n`
/// with `‖W_{n+1}(x) - W_n(x)‖ < tol`, together with that `n`.
pub fn apply_w_limit(family: &WFamily, x: &Point, tol: f64, n_max: usize) -> Result<(Point, usize)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", value: tol });
    }
    let mut current = apply_w(family, 1, x)?;
    let mut increment = f64::INFINITY;
    for n in 1..n_max {
        let next = apply_w(family, n + 1, x)?;
        increment = next.distance(&current);
        if increment < tol {
            return Ok((current, n));
        }
        current = next;
    }
    Err(Error::LimitNotReached { best: current, n: n_max, last_increment: increment })
}

/// Weight rule `(n, i) ↦ λ_{n,i}` for a K-family.
#[derive(Clone)]
pub enum KWeights {
    /// `λ_{n,i} = λ_i` for every `n`.
    Constant(Vec<f64>),
    Rule {
        rule: Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>,
        limits: Option<Vec<f64>>,
    },
}

impl fmt::Debug for KWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KWeights::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            KWeights::Rule { limits, .. } => {
                f.debug_struct("Rule").field("limits", limits).finish_non_exhaustive()
            }
        }
    }
}

impl KWeights {
    pub fn rule(
        rule: impl Fn(usize, usize) -> f64 + Send + Sync + 'static,
        limits: Option<Vec<f64>>,
    ) -> Self {
        KWeights::Rule { rule: Arc::new(rule), limits }
    }

    /// `λ_{n,i}`, `i` 1-based. Unchecked.
    pub fn value(&self, n: usize, i: usize) -> f64 {
        match self {
            KWeights::Constant(v) => v[i - 1],
            KWeights::Rule { rule, .. } => rule(n, i),
        }
    }

    pub fn limits(&self) -> Option<&[f64]> {
        match self {
            KWeights::Constant(v) => Some(v),
            KWeights::Rule { limits, .. } => limits.as_deref(),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, KWeights::Constant(_))
    }
}

/// `0 < λ_i < 1` for `i < N`, `0 < λ_N <= 1`.
fn check_k_weight(n: usize, i: usize, count: usize, w: f64) -> Result<f64> {
    let ok = if i < count { w > 0.0 && w < 1.0 } else { w > 0.0 && w <= 1.0 };
    if ok {
        Ok(w)
    } else {
        Err(Error::WeightOutOfRange { n, i, value: w })
    }
}

/// A finite family `T_1, ..., T_N` generating the K-mapping.
#[derive(Debug, Clone)]
pub struct KFamily {
    maps: Vec<NonexpansiveMap>,
    weights: KWeights,
}

impl KFamily {
    pub fn new(maps: Vec<NonexpansiveMap>, weights: KWeights) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::IndexOutOfRange { name: "family size", index: 0, min: 1, max: usize::MAX });
        }
        let n = maps.len();
        let check_row = |row: &[f64]| -> Result<()> {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for (i, &w) in row.iter().enumerate() {
                check_k_weight(0, i + 1, n, w)?;
            }
            Ok(())
        };
        if let Some(limits) = weights.limits() {
            check_row(limits)?;
        }
        Ok(KFamily { maps, weights })
    }

    /// Constant weights `λ_{n,i} = λ_i`.
    pub fn constant(maps: Vec<NonexpansiveMap>, weights: Vec<f64>) -> Result<Self> {
        KFamily::new(maps, KWeights::Constant(weights))
    }

    pub fn maps(&self) -> &[NonexpansiveMap] {
        &self.maps
    }

    pub fn weights(&self) -> &KWeights {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.maps.iter().find_map(NonexpansiveMap::dim)
    }

    /// Checked `λ_{n,i}`.
    pub fn weight(&self, n: usize, i: usize) -> Result<f64> {
        check_k_weight(n, i, self.maps.len(), self.weights.value(n, i))
    }

    /// The row `(λ_{n,1}, ..., λ_{n,N})`.
    pub fn weight_row(&self, n: usize) -> Result<Vec<f64>> {
        (1..=self.maps.len()).map(|i| self.weight(n, i)).collect()
    }
}

fn k_recursion(maps: &[NonexpansiveMap], weights: &[f64], x: &Point) -> Point {
    let mut u = x.clone();
    for (t, &w) in maps.iter().zip(weights) {
        u = Point::lincomb(w, &t.apply(&u), 1.0 - w, &u);
    }
    u
}

/// `K_n(x)` by the forward recursion; exactly `N` map evaluations.
pub fn apply_k(family: &KFamily, n: usize, x: &Point) -> Result<Point> {
    check_dim(family.dim(), x)?;
    let row = family.weight_row(n)?;
    Ok(k_recursion(&family.maps, &row, x))
}

/// `K(x)` with the declared limit weights `λ_i = lim λ_{n,i}`.
pub fn apply_k_limit(family: &KFamily, x: &Point) -> Result<Point> {
    check_dim(family.dim(), x)?;
    let limits = family.weights.limits().ok_or(Error::MissingLimitWeights)?;
    Ok(k_recursion(&family.maps, limits, x))
}

/// `‖x - T(x)‖`.
pub fn fixed_point_residual(map: &impl Operator, x: &Point) -> f64 {
    x.distance(&map.apply(x))
}
