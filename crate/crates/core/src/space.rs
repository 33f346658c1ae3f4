//! Space abstraction shared by every backend.
//!
//! A backend exposes a causal relation and a time separation. Unrelated pairs
//! report a separation of zero; relatedness itself is carried by [`Relation`].
//! The Ptolemy slack arithmetic lives here because every backend (flat,
//! curved, discrete, inverted) funnels its quadruples through it.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Coordinate chart an [`Event`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// Inertial coordinates `(t, x1, .., xn)` of flat space.
    Minkowski,
    /// Ambient coordinates of a quadric model embedded in a 3-dimensional
    /// flat space of signature (+,-,-) or (+,+,-).
    Quadric,
}

/// A point of a continuous backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub chart: Chart,
    pub coords: Vec<f64>,
}

impl Event {
    pub fn minkowski(coords: impl Into<Vec<f64>>) -> Self {
        Event {
            chart: Chart::Minkowski,
            coords: coords.into(),
        }
    }

    pub fn quadric(coords: impl Into<Vec<f64>>) -> Self {
        Event {
            chart: Chart::Quadric,
            coords: coords.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn time(&self) -> f64 {
        self.coords[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Unrelated,
    Causal,
    Chronological,
}

/// Causal relation between an ordered pair `(x, y)`.
///
/// `forward` is true when `y` lies in the causal future of `x`. Chronological
/// pairs are also causal; `kind` records the strongest relation that holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub forward: bool,
}

impl Relation {
    pub const UNRELATED: Relation = Relation {
        kind: RelationKind::Unrelated,
        forward: false,
    };

    pub fn new(kind: RelationKind, forward: bool) -> Self {
        if kind == RelationKind::Unrelated {
            Self::UNRELATED
        } else {
            Relation { kind, forward }
        }
    }

    /// `x <= y`.
    pub fn is_causal_forward(self) -> bool {
        self.forward && self.kind != RelationKind::Unrelated
    }

    /// `x << y`.
    pub fn is_chronological_forward(self) -> bool {
        self.forward && self.kind == RelationKind::Chronological
    }

    /// The relation seen from the other end of the pair.
    pub fn reversed(self) -> Self {
        match self.kind {
            RelationKind::Unrelated => self,
            _ => Relation {
                kind: self.kind,
                forward: !self.forward,
            },
        }
    }
}

/// A Lorentzian pre-length space: a causal relation plus a time separation.
pub trait LorentzianSpace: Sync {
    type Point: Clone + Send + Sync;

    fn relation(&self, x: &Self::Point, y: &Self::Point) -> Relation;

    /// `ℓ(x, y)`; zero unless `x <= y`.
    fn time_separation(&self, x: &Self::Point, y: &Self::Point) -> f64;

    fn causal_le(&self, x: &Self::Point, y: &Self::Point) -> bool {
        self.relation(x, y).is_causal_forward()
    }

    fn chronological(&self, x: &Self::Point, y: &Self::Point) -> bool {
        self.relation(x, y).is_chronological_forward()
    }

    /// The six ordered separations of `q[0] <= q[1] <= q[2] <= q[3]`.
    fn separations(&self, q: &[Self::Point; 4]) -> Separations6 {
        Separations6 {
            l12: self.time_separation(&q[0], &q[1]),
            l13: self.time_separation(&q[0], &q[2]),
            l14: self.time_separation(&q[0], &q[3]),
            l23: self.time_separation(&q[1], &q[2]),
            l24: self.time_separation(&q[1], &q[3]),
            l34: self.time_separation(&q[2], &q[3]),
        }
    }
}

/// A smooth backend with exponential and logarithm maps on tangent vectors
/// expressed in the ambient (chart) coordinates.
pub trait GeodesicSpace: LorentzianSpace<Point = Event> {
    /// Metric of the tangent space at `p`.
    fn inner(&self, p: &Event, u: &[f64], v: &[f64]) -> f64;

    fn exp(&self, p: &Event, v: &[f64]) -> Result<Event>;

    /// Initial velocity of the geodesic from `p` reaching `q` at parameter 1.
    /// Defined for causally related pairs (either time direction).
    fn log(&self, p: &Event, q: &Event) -> Result<Vec<f64>>;

    /// Orthonormal pair `(e_t, e_x)` at `p`: a future unit timelike vector and
    /// a unit spacelike vector orthogonal to it.
    fn timelike_frame(&self, p: &Event) -> (Vec<f64>, Vec<f64>);

    /// The point a fraction `s` of the way along the geodesic from `x` to `y`.
    fn geodesic_point(&self, x: &Event, y: &Event, s: f64) -> Result<Event> {
        let v = self.log(x, y)?;
        let scaled: Vec<f64> = v.iter().map(|c| c * s).collect();
        self.exp(x, &scaled)
    }

    /// Hyperbolic angle at `p` between the geodesics towards `x` and `y`, both
    /// future (or both past) timelike from `p`.
    fn angle_at(&self, p: &Event, x: &Event, y: &Event) -> Result<f64> {
        let u = self.log(p, x)?;
        let w = self.log(p, y)?;
        tangent_angle(|a, b| self.inner(p, a, b), &u, &w)
    }

    /// Tangent vector at `p` from coordinates in [`timelike_frame`](Self::timelike_frame).
    fn frame_vector(&self, p: &Event, t: f64, x: f64) -> Vec<f64> {
        let (et, ex) = self.timelike_frame(p);
        et.iter().zip(&ex).map(|(a, b)| t * a + x * b).collect()
    }
}

/// Hyperbolic angle between two timelike vectors pointing into the same time
/// cone, given the bilinear form.
pub(crate) fn tangent_angle(
    inner: impl Fn(&[f64], &[f64]) -> f64,
    u: &[f64],
    w: &[f64],
) -> Result<f64> {
    let uu = inner(u, u);
    let ww = inner(w, w);
    if !(uu > 0.0 && ww > 0.0) {
        return Err(domain("hyperbolic angle needs two timelike legs"));
    }
    let uw = inner(u, w);
    if uw <= 0.0 {
        return Err(domain("angle legs point into opposite time cones"));
    }
    let c = uw / (uu.sqrt() * ww.sqrt());
    Ok(c.max(1.0).acosh())
}

/// The six ordered time separations of a causal quadruple `x <= y <= z <= w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Separations6 {
    pub l12: f64,
    pub l13: f64,
    pub l14: f64,
    pub l23: f64,
    pub l24: f64,
    pub l34: f64,
}

impl Separations6 {
    /// Order: `(l12, l13, l14, l23, l24, l34)`.
    pub fn new(l12: f64, l13: f64, l14: f64, l23: f64, l24: f64, l34: f64) -> Self {
        Separations6 {
            l12,
            l13,
            l14,
            l23,
            l24,
            l34,
        }
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5])
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.l12, self.l13, self.l14, self.l23, self.l24, self.l34]
    }

    pub fn validate(&self) -> Result<()> {
        for v in self.to_array() {
            if !v.is_finite() {
                return Err(domain("separations must be finite"));
            }
            if v < 0.0 {
                return Err(domain("separations must be non-negative"));
            }
        }
        Ok(())
    }

    /// `l13*l24 - (l12*l34 + l14*l23)` without validation.
    #[inline]
    pub fn slack(&self) -> f64 {
        self.l13 * self.l24 - (self.l12 * self.l34 + self.l14 * self.l23)
    }

    /// Product of the diagonals, the natural scale of the slack.
    #[inline]
    pub fn scale(&self) -> f64 {
        self.l13 * self.l24
    }

    /// Uniform rescaling by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self::from_array(self.to_array().map(|v| v * lambda))
    }
}

/// Ptolemy slack `ℓ(x,z)ℓ(y,w) - ℓ(x,y)ℓ(z,w) - ℓ(x,w)ℓ(y,z)`.
pub fn ptolemy_slack(s: &Separations6) -> Result<f64> {
    s.validate()?;
    Ok(s.slack())
}

/// Robust slack with margin `delta`:
/// `(l13+δ)(l24+δ) - [(l12-δ)⁺(l34-δ)⁺ + (l14-δ)(l23-δ)]`.
///
/// A negative value survives perturbation of every separation by less than
/// `delta`. With `delta = 0` this is bit-identical to [`ptolemy_slack`].
pub fn ptolemy_slack_margin(s: &Separations6, delta: f64) -> Result<f64> {
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(domain("margin delta must be finite and non-negative"));
    }
    s.validate()?;
    Ok(slack_margin_unchecked(s, delta))
}

#[inline]
pub(crate) fn slack_margin_unchecked(s: &Separations6, delta: f64) -> f64 {
    let pos = |a: f64| if a > 0.0 { a } else { 0.0 };
    (s.l13 + delta) * (s.l24 + delta)
        - (pos(s.l12 - delta) * pos(s.l34 - delta) + (s.l14 - delta) * (s.l23 - delta))
}

/// Absolute tolerance on the slack: `1e-9 + 1e-9 * l13*l24`.
pub const SLACK_ABS_TOL: f64 = 1e-9;
pub const SLACK_REL_TOL: f64 = 1e-9;

#[inline]
pub fn slack_tolerance(s: &Separations6) -> f64 {
    SLACK_ABS_TOL + SLACK_REL_TOL * s.scale()
}

/// True when the slack is below the tolerance band around zero.
#[inline]
pub fn is_violation(slack: f64, s: &Separations6) -> bool {
    slack < -slack_tolerance(s)
}

/// Outcome of evaluating the Ptolemy inequality on one quadruple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtolemyVerdict<P = Event> {
    pub separations: Separations6,
    pub slack: f64,
    pub delta: f64,
    pub robust_slack: f64,
    pub witness: Option<[P; 4]>,
}

impl<P> PtolemyVerdict<P> {
    pub fn evaluate(separations: Separations6, delta: f64, witness: Option<[P; 4]>) -> Result<Self> {
        let slack = ptolemy_slack(&separations)?;
        let robust_slack = ptolemy_slack_margin(&separations, delta)?;
        Ok(PtolemyVerdict {
            separations,
            slack,
            delta,
            robust_slack,
            witness,
        })
    }

    pub fn is_violation(&self) -> bool {
        is_violation(self.slack, &self.separations)
    }
}

/// Evaluate a quadruple of points of `space`.
pub fn ptolemy_verdict<S: LorentzianSpace>(
    space: &S,
    quadruple: &[S::Point; 4],
    delta: f64,
) -> Result<PtolemyVerdict<S::Point>> {
    check_causal_chain(space, quadruple)?;
    PtolemyVerdict::evaluate(space.separations(quadruple), delta, Some(quadruple.clone()))
}

/// `ℓ(x,z) - ℓ(x,y) - ℓ(y,z)` for `x <= y <= z`.
pub fn reverse_triangle_deficit<S: LorentzianSpace>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    z: &S::Point,
) -> Result<f64> {
    if !space.causal_le(x, y) || !space.causal_le(y, z) {
        return Err(Error::Order("reverse triangle needs x <= y <= z".into()));
    }
    Ok(space.time_separation(x, z) - space.time_separation(x, y) - space.time_separation(y, z))
}

/// Errors unless the points form a causal chain.
pub fn check_causal_chain<S: LorentzianSpace>(space: &S, pts: &[S::Point]) -> Result<()> {
    for (i, w) in pts.windows(2).enumerate() {
        if !space.causal_le(&w[0], &w[1]) {
            return Err(Error::Order(format!(
                "point {} is not in the causal future of point {}",
                i + 1,
                i
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn aligned_points_give_zero_slack() {
        let s = Separations6::new(1.0, 2.0, 3.0, 1.0, 2.0, 1.0);
        assert_eq!(ptolemy_slack(&s).unwrap(), 0.0);
    }

    #[test]
    fn off_line_quadruple_slack() {
        // (0,0),(1,0),(2,0.5),(3,0.5) in the Minkowski plane
        let s = Separations6::new(
            1.0,
            3.75f64.sqrt(),
            8.75f64.sqrt(),
            0.75f64.sqrt(),
            3.75f64.sqrt(),
            1.0,
        );
        assert!((ptolemy_slack(&s).unwrap() - 0.188_262_308_510_101).abs() < 1e-12);
    }

    #[test]
    fn hyperbola_separations_give_zero_slack() {
        let l = |i: f64, j: f64| 2.0 * ((j - i) / 2.0).sinh();
        let s = Separations6::new(l(0., 1.), l(0., 2.), l(0., 3.), l(1., 2.), l(1., 3.), l(2., 3.));
        assert!(ptolemy_slack(&s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn slack_rejects_bad_input() {
        let mut s = Separations6::new(1.0, 2.0, 3.0, 1.0, 2.0, 1.0);
        s.l23 = f64::NAN;
        assert!(matches!(ptolemy_slack(&s), Err(Error::Domain(_))));
        s.l23 = f64::INFINITY;
        assert!(ptolemy_slack(&s).is_err());
        s.l23 = -1.0;
        assert!(ptolemy_slack(&s).is_err());
    }

    #[test]
    fn margin_arithmetic() {
        let s = Separations6::new(1.0, 2.0, 3.0, 1.0, 2.0, 1.0);
        let m = ptolemy_slack_margin(&s, 0.1).unwrap();
        assert!((m - 0.99).abs() < 1e-12);
        assert!(ptolemy_slack_margin(&s, -0.1).is_err());
    }

    #[test]
    fn margin_clamps_positive_part() {
        let s = Separations6::new(0.05, 2.0, 3.0, 1.0, 2.0, 1.0);
        let delta = 0.1;
        let m = ptolemy_slack_margin(&s, delta).unwrap();
        let expected = 2.1 * 2.1 - (0.0 + 2.9 * 0.9);
        assert!((m - expected).abs() < 1e-12);
    }

    #[test]
    fn relation_reversal() {
        let r = Relation::new(RelationKind::Chronological, true);
        assert!(r.is_chronological_forward());
        assert!(!r.reversed().is_causal_forward());
        assert_eq!(Relation::UNRELATED.reversed(), Relation::UNRELATED);
        assert_eq!(Relation::new(RelationKind::Unrelated, true), Relation::UNRELATED);
    }

    fn seps() -> impl Strategy<Value = Separations6> {
        prop::array::uniform6(0.0f64..10.0).prop_map(Separations6::from_array)
    }

    proptest! {
        #[test]
        fn zero_margin_is_bitwise_slack(s in seps()) {
            let a = ptolemy_slack(&s).unwrap();
            let b = ptolemy_slack_margin(&s, 0.0).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }

        #[test]
        fn slack_scales_quadratically(s in seps(), lambda in 0.01f64..100.0) {
            let a = ptolemy_slack(&s).unwrap();
            let b = ptolemy_slack(&s.scaled(lambda)).unwrap();
            let scale = s.scale() + s.l12 * s.l34 + s.l14 * s.l23;
            prop_assert!((b - lambda * lambda * a).abs() <= 1e-12 * lambda * lambda * scale.max(1e-300));
        }

        #[test]
        fn vanishing_outer_side_reduces_to_product_bound(
            s in seps(),
            which in 0usize..2,
        ) {
            let mut s = s;
            if which == 0 { s.l12 = 0.0 } else { s.l34 = 0.0 }
            let slack = ptolemy_slack(&s).unwrap();
            prop_assert_eq!(slack, s.l13 * s.l24 - s.l14 * s.l23);
            if s.l14 * s.l23 <= s.l13 * s.l24 {
                prop_assert!(slack >= 0.0);
            }
        }
    }
}
