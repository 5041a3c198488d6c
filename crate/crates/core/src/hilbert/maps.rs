use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::point::Point;
use super::set::ConvexSet;
use crate::error::{Error, Result};

/// Anything that maps points to points.
pub trait Operator {
    fn apply(&self, x: &Point) -> Point;
}

impl<F> Operator for F
where
    F: Fn(&Point) -> Point,
{
    fn apply(&self, x: &Point) -> Point {
        self(x)
    }
}

type Rule = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

#[derive(Clone)]
enum Atom {
    Identity,
    Sine,
    Cosine,
    Arctangent,
    Projection(ConvexSet),
    Average { weight: f64, first: Box<NonexpansiveMap>, second: Box<NonexpansiveMap> },
    Custom { label: String, rule: Rule },
}

/// A map with `‖Tx - Ty‖ <= ‖x - y‖`.
///
/// The builtin atoms satisfy the contract by construction. [`custom`]
/// trusts the caller; check it with [`lipschitz_estimate`].
///
/// [`custom`]: NonexpansiveMap::custom
#[derive(Clone)]
pub struct NonexpansiveMap(Atom);

impl NonexpansiveMap {
    pub fn identity() -> Self {
        NonexpansiveMap(Atom::Identity)
    }

    /// Coordinatewise `sin`.
    pub fn sine() -> Self {
        NonexpansiveMap(Atom::Sine)
    }

    /// Coordinatewise `cos`.
    pub fn cosine() -> Self {
        NonexpansiveMap(Atom::Cosine)
    }

    /// Coordinatewise `atan`.
    pub fn arctangent() -> Self {
        NonexpansiveMap(Atom::Arctangent)
    }

    pub fn projection(set: ConvexSet) -> Self {
        NonexpansiveMap(Atom::Projection(set))
    }

    /// `weight·first + (1 - weight)·second`, `weight` in `[0, 1]`.
    pub fn average(weight: f64, first: NonexpansiveMap, second: NonexpansiveMap) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidParameter { name: "average weight", value: weight });
        }
        Ok(NonexpansiveMap(Atom::Average {
            weight,
            first: Box::new(first),
            second: Box::new(second),
        }))
    }

    pub fn custom(
        label: impl Into<String>,
        rule: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Self {
        NonexpansiveMap(Atom::Custom { label: label.into(), rule: Arc::new(rule) })
    }

    /// Builtin atom by short name: `id`, `sin`, `cos`, `atan`.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "id" | "identity" => Some(Self::identity()),
            "sin" => Some(Self::sine()),
            "cos" => Some(Self::cosine()),
            "atan" => Some(Self::arctangent()),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.0, Atom::Identity)
    }

    pub fn label(&self) -> String {
        match &self.0 {
            Atom::Identity => "id".into(),
            Atom::Sine => "sin".into(),
            Atom::Cosine => "cos".into(),
            Atom::Arctangent => "atan".into(),
            Atom::Projection(set) => format!("proj{:?}", set.shape()),
            Atom::Average { weight, first, second } => {
                format!("avg({weight};{},{})", first.label(), second.label())
            }
            Atom::Custom { label, .. } => label.clone(),
        }
    }

    /// Dimension the map is tied to, if any.
    pub fn dim(&self) -> Option<usize> {
        match &self.0 {
            Atom::Projection(set) => set.dim(),
            Atom::Average { first, second, .. } => first.dim().or(second.dim()),
            _ => None,
        }
    }

    pub fn apply_scalar(&self, x: f64) -> f64 {
        self.apply(&Point::scalar(x)).first()
    }

    /// Overwrites `coords` with the image when the atom acts coordinatewise.
    /// Returns false (leaving `coords` untouched) otherwise.
    pub(crate) fn apply_in_place(&self, coords: &mut [f64]) -> bool {
        let g: fn(f64) -> f64 = match &self.0 {
            Atom::Identity => return true,
            Atom::Sine => libm::sin,
            Atom::Cosine => libm::cos,
            Atom::Arctangent => libm::atan,
            _ => return false,
        };
        for c in coords.iter_mut() {
            *c = g(*c);
        }
        true
    }
}

impl Operator for NonexpansiveMap {
    fn apply(&self, x: &Point) -> Point {
        match &self.0 {
            Atom::Identity => x.clone(),
            Atom::Sine => x.map_coords(libm::sin),
            Atom::Cosine => x.map_coords(libm::cos),
            Atom::Arctangent => x.map_coords(libm::atan),
            Atom::Projection(set) => set.project(x),
            Atom::Average { weight, first, second } => {
                Point::lincomb(*weight, &first.apply(x), 1.0 - weight, &second.apply(x))
            }
            Atom::Custom { rule, .. } => rule(x),
        }
    }
}

impl fmt::Debug for NonexpansiveMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NonexpansiveMap({})", self.label())
    }
}

/// A map with `‖f(x) - f(y)‖ <= alpha ‖x - y‖`, `alpha` in `(0, 1)`.
#[derive(Clone)]
pub struct ContractionMap {
    label: String,
    alpha: f64,
    rule: Rule,
}

impl ContractionMap {
    /// `f(x) = a·x` with contraction constant `|a|`.
    pub fn linear(a: f64) -> Result<Self> {
        let alpha = a.abs();
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter { name: "contraction constant", value: a });
        }
        Ok(ContractionMap { label: format!("linear:{a}"), alpha, rule: Arc::new(move |x| x * a) })
    }

    /// `f(x) = c`. Any `alpha` in `(0, 1)` is a valid constant for it.
    pub fn constant(c: Point, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let label = format!("const:{:?}", c.coords());
        Ok(ContractionMap { label, alpha, rule: Arc::new(move |_| c.clone()) })
    }

    pub fn custom(
        label: impl Into<String>,
        alpha: f64,
        rule: impl Fn(&Point) -> Point + Send + Sync + 'static,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(ContractionMap { label: label.into(), alpha, rule: Arc::new(rule) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "contraction constant", value: alpha })
    }
}

impl Operator for ContractionMap {
    fn apply(&self, x: &Point) -> Point {
        (self.rule)(x)
    }
}

impl fmt::Debug for ContractionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ContractionMap({}, alpha = {})", self.label, self.alpha)
    }
}

/// Largest observed ratio `‖T(x) - T(y)‖ / ‖x - y‖` over `trials` seeded
/// pairs drawn uniformly from the box `[lo, hi]`. Coincident pairs are
/// skipped.
pub fn lipschitz_estimate(
    map: &impl Operator,
    lo: &Point,
    hi: &Point,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", value: 0.0 });
    }
    if lo.dim() != hi.dim() {
        return Err(Error::DimensionMismatch { expected: lo.dim(), found: hi.dim() });
    }
    if lo.coords().iter().zip(hi.coords()).any(|(l, h)| l > h) {
        return Err(Error::InvalidSet("sample box needs lo <= hi"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..trials {
        let x = sample_box(&mut rng, lo, hi);
        let y = sample_box(&mut rng, lo, hi);
        let d = x.distance(&y);
        if d == 0.0 {
            continue;
        }
        best = best.max(map.apply(&x).distance(&map.apply(&y)) / d);
    }
    Ok(best)
}

/// Uniform sample from the box `[lo, hi]`.
pub fn sample_box<R: Rng>(rng: &mut R, lo: &Point, hi: &Point) -> Point {
    let coords = lo
        .coords()
        .iter()
        .zip(hi.coords())
        .map(|(&l, &h)| if l < h { rng.gen_range(l..h) } else { l })
        .collect();
    Point::from_raw(coords)
}
