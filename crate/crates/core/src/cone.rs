//! Minkowski cones over metric spaces.
//!
//! Over `(X, d)` the cone has points `(s, x)` with `s >= 0` (all `s = 0`
//! points are the apex) and `ℓ((s,x), (t,y)) = √(s² + t² - 2st cosh d(x,y))`
//! whenever the radicand is non-negative and `s <= t`.

use crate::error::{domain, Result};
use crate::minkowski::minkowski_inner;
use crate::space::{Event, GeodesicSpace, LorentzianSpace, Relation, RelationKind};

/// A distance oracle.
pub trait MetricSpace: Sync {
    type Point: Clone + Send + Sync;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;
}

/// A metric given by a closure.
pub struct FnMetric<P, F> {
    f: F,
    _marker: std::marker::PhantomData<fn(&P)>,
}

impl<P, F> FnMetric<P, F>
where
    F: Fn(&P, &P) -> f64 + Sync,
{
    pub fn new(f: F) -> Self {
        FnMetric {
            f,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<P, F> MetricSpace for FnMetric<P, F>
where
    P: Clone + Send + Sync,
    F: Fn(&P, &P) -> f64 + Sync,
{
    type Point = P;

    fn distance(&self, a: &P, b: &P) -> f64 {
        (self.f)(a, b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConePoint<P> {
    pub s: f64,
    pub x: P,
}

impl<P> ConePoint<P> {
    pub fn new(s: f64, x: P) -> Self {
        ConePoint { s, x }
    }

    pub fn is_apex(&self) -> bool {
        self.s == 0.0
    }
}

fn radicand<M: MetricSpace>(m: &M, a: &ConePoint<M::Point>, b: &ConePoint<M::Point>) -> Result<f64> {
    if !(a.s >= 0.0) || !(b.s >= 0.0) {
        return Err(domain("cone radii must be non-negative"));
    }
    if a.s == 0.0 || b.s == 0.0 {
        return Ok((a.s - b.s) * (a.s - b.s));
    }
    let d = m.distance(&a.x, &b.x);
    Ok(a.s * a.s + b.s * b.s - 2.0 * a.s * b.s * d.cosh())
}

/// `ℓ_C(a, b)`.
pub fn cone_time_sep<M: MetricSpace>(m: &M, a: &ConePoint<M::Point>, b: &ConePoint<M::Point>) -> Result<f64> {
    let q = radicand(m, a, b)?;
    Ok(if q >= 0.0 && a.s <= b.s { q.sqrt() } else { 0.0 })
}

/// Causal iff the radicand is non-negative and `s <= t`; chronological iff
/// additionally `ℓ_C > 0`.
pub fn cone_relation<M: MetricSpace>(m: &M, a: &ConePoint<M::Point>, b: &ConePoint<M::Point>) -> Result<Relation> {
    let q = radicand(m, a, b)?;
    if q < 0.0 {
        return Ok(Relation::UNRELATED);
    }
    let kind = if q > 0.0 {
        RelationKind::Chronological
    } else {
        RelationKind::Causal
    };
    Ok(Relation::new(kind, a.s <= b.s))
}

/// The cone over `M` as a Lorentzian space. Negative radii are treated as
/// unrelated to everything.
pub struct ConeSpace<M> {
    pub base: M,
}

impl<M: MetricSpace> LorentzianSpace for ConeSpace<M> {
    type Point = ConePoint<M::Point>;

    fn relation(&self, a: &Self::Point, b: &Self::Point) -> Relation {
        cone_relation(&self.base, a, b).unwrap_or(Relation::UNRELATED)
    }

    fn time_separation(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        cone_time_sep(&self.base, a, b).unwrap_or(0.0)
    }
}

/// Unit future timelike vectors of `R^{1,n}` with the angle metric
/// `d(v, w) = arcosh⟨v, w⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatDirections {
    n: usize,
}

pub fn flat_direction_space(n: usize) -> Result<FlatDirections> {
    if n == 0 {
        return Err(domain("direction space needs n >= 1"));
    }
    Ok(FlatDirections { n })
}

impl FlatDirections {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Validates a unit future timelike vector (tolerance 1e-10 on the norm).
    pub fn direction(&self, v: Vec<f64>) -> Result<Vec<f64>> {
        if v.len() != self.n + 1 {
            return Err(crate::error::Error::DimensionMismatch {
                expected: self.n + 1,
                got: v.len(),
            });
        }
        let q = minkowski_inner(&v, &v);
        if !(v[0] > 0.0) || !((q - 1.0).abs() <= 1e-10 * v[0] * v[0]) {
            return Err(domain("direction must be a unit future timelike vector"));
        }
        Ok(v)
    }

    /// The direction of a future timelike vector.
    pub fn normalize(&self, v: &[f64]) -> Result<Vec<f64>> {
        let q = minkowski_inner(v, v);
        if !(q > 0.0) || v[0] <= 0.0 {
            return Err(domain("direction must be future timelike"));
        }
        self.direction(v.iter().map(|c| c / q.sqrt()).collect())
    }
}

impl MetricSpace for FlatDirections {
    type Point = Vec<f64>;

    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        minkowski_inner(a, b).max(1.0).acosh()
    }
}

/// `max |ℓ(x, y) - ℓ_C(f(x), f(y))|` over the pairs, where
/// `f(x) = (ℓ(p, x), direction of the geodesic from p to x)` and the cone
/// distance between directions is the tangent angle at `p`.
pub fn cone_isometry_residual<S: GeodesicSpace>(space: &S, p: &Event, pairs: &[(Event, Event)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, y) in pairs {
        for e in [x, y] {
            if !space.chronological(p, e) {
                return Err(domain("cone map needs points in I⁺(p)"));
            }
        }
        let s = space.time_separation(p, x);
        let t = space.time_separation(p, y);
        let angle = space.angle_at(p, x, y)?;
        let m = FnMetric::new(move |_: &(), _: &()| angle);
        let lc = cone_time_sep(&m, &ConePoint::new(s, ()), &ConePoint::new(t, ()))?
            .max(cone_time_sep(&m, &ConePoint::new(t, ()), &ConePoint::new(s, ()))?);
        let l = space.time_separation(x, y).max(space.time_separation(y, x));
        worst = worst.max((l - lc).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::MinkowskiSpace;
    use crate::model::ModelSpace;

    fn line() -> FnMetric<f64, impl Fn(&f64, &f64) -> f64 + Sync> {
        FnMetric::new(|a: &f64, b: &f64| (a - b).abs())
    }

    #[test]
    fn cone_examples() {
        let m = line();
        assert_eq!(cone_time_sep(&m, &ConePoint::new(1.0, 0.0), &ConePoint::new(3.0, 0.0)).unwrap(), 2.0);
        let l = cone_time_sep(&m, &ConePoint::new(1.0, 0.0), &ConePoint::new(2.0, 0.5)).unwrap();
        assert!((l - (5.0 - 4.0 * 0.5f64.cosh()).sqrt()).abs() < 1e-15);
        assert!((l - 0.699_640_006_842_431_2).abs() < 1e-12);
        assert_eq!(cone_time_sep(&m, &ConePoint::new(0.0, 9.0), &ConePoint::new(2.5, -4.0)).unwrap(), 2.5);
        assert_eq!(cone_time_sep(&m, &ConePoint::new(2.0, 0.0), &ConePoint::new(1.0, 0.0)).unwrap(), 0.0);
        assert!(cone_time_sep(&m, &ConePoint::new(-1.0, 0.0), &ConePoint::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn cone_relations() {
        let m = line();
        let r = cone_relation(&m, &ConePoint::new(1.0, 0.0), &ConePoint::new(2.0, 0.5)).unwrap();
        assert!(r.is_chronological_forward());
        let r = cone_relation(&m, &ConePoint::new(2.0, 0.5), &ConePoint::new(1.0, 0.0)).unwrap();
        assert_eq!(r.kind, RelationKind::Chronological);
        assert!(!r.forward);
        let r = cone_relation(&m, &ConePoint::new(1.0, 0.0), &ConePoint::new(1.1, 3.0)).unwrap();
        assert_eq!(r, Relation::UNRELATED);
        // null: s² + t² = 2st cosh d
        let d = (1.25f64).acosh();
        let r = cone_relation(&m, &ConePoint::new(1.0, 0.0), &ConePoint::new(2.0, d)).unwrap();
        assert!(r.kind != RelationKind::Unrelated);
    }

    #[test]
    fn direction_metric() {
        let dirs = flat_direction_space(1).unwrap();
        let v = dirs.direction(vec![1.0, 0.0]).unwrap();
        let w = dirs.direction(vec![1f64.cosh(), 1f64.sinh()]).unwrap();
        assert_eq!(dirs.distance(&v, &v), 0.0);
        assert!((dirs.distance(&v, &w) - 1.0).abs() < 1e-12);
        assert!(dirs.direction(vec![2.0, 0.0]).is_err());
        assert!(dirs.direction(vec![-1.0, 0.0]).is_err());
        assert!(flat_direction_space(0).is_err());
    }

    #[test]
    fn flat_residual_examples() {
        let m = MinkowskiSpace::new(1).unwrap();
        let p = m.origin();
        let x = Event::minkowski(vec![0.2f64.cosh(), 0.2f64.sinh()]);
        let y = Event::minkowski(vec![2.0 * 0.7f64.cosh(), 2.0 * 0.7f64.sinh()]);
        assert!(cone_isometry_residual(&m, &p, &[(x.clone(), y)]).unwrap() <= 1e-12);
        let z = Event::minkowski(vec![3.0 * 0.2f64.cosh(), 3.0 * 0.2f64.sinh()]);
        assert!(cone_isometry_residual(&m, &p, &[(x.clone(), z)]).unwrap() <= 1e-15);
        assert!(cone_isometry_residual(&m, &p, &[(x, Event::minkowski(vec![-1.0, 0.0]))]).is_err());
    }

    #[test]
    fn de_sitter_is_not_a_cone() {
        let s = ModelSpace::new(-1.0).unwrap();
        let p = s.base_point();
        let x = crate::model::from_polar(&s, &p, crate::model::PolarPoint::new(1.0, 0.2)).unwrap();
        let y = crate::model::from_polar(&s, &p, crate::model::PolarPoint::new(2.0, 0.7)).unwrap();
        assert!(cone_isometry_residual(&s, &p, &[(x, y)]).unwrap() > 1e-3);
    }
}
