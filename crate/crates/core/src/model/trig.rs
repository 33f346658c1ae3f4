use serde::{Deserialize, Serialize};

use super::{ModelSpace, Representation};
use crate::error::{domain, Error, Result};
use crate::space::{Event, GeodesicSpace, LorentzianSpace};

/// Where the angle of a law of cosines sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexPosition {
    /// Both legs leave the vertex towards the future.
    PastVertex,
    /// One leg arrives, the other leaves; the angle is measured between the
    /// continuation of the incoming leg and the outgoing leg.
    MiddleVertex,
}

/// Side separations of a timelike triangle `p << x << y`:
/// `a = ℓ(p,x)`, `b = ℓ(x,y)`, `c = ℓ(p,y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelTriangle {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ModelTriangle {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        ModelTriangle { a, b, c }
    }

    /// Non-negative finite sides with `c >= a + b` (relative slack 1e-12).
    pub fn validate(&self) -> Result<()> {
        for s in [self.a, self.b, self.c] {
            if !s.is_finite() || s < 0.0 {
                return Err(domain("triangle sides must be finite and non-negative"));
            }
        }
        if self.c < self.a + self.b - 1e-12 * self.c {
            return Err(Error::NotRealizable(format!(
                "reverse triangle inequality fails: {} < {} + {}",
                self.c, self.a, self.b
            )));
        }
        Ok(())
    }
}

/// Two future legs of lengths `a` and `b` from a common vertex enclosing the
/// hyperbolic angle `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hinge {
    pub a: f64,
    pub b: f64,
    pub omega: f64,
}

impl Hinge {
    pub fn new(a: f64, b: f64, omega: f64) -> Self {
        Hinge { a, b, omega }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizedHinge {
    pub p: Event,
    pub x: Event,
    pub y: Event,
    /// Separation between the endpoints in whichever order they are related,
    /// zero when they are not.
    pub opposite: f64,
}

fn check_leg(space: &ModelSpace, s: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain("legs must be positive and finite"));
    }
    if s >= space.d_k() {
        return Err(domain("leg reaches the maximal comparison separation"));
    }
    Ok(())
}

/// Opposite side `c` of a triangle with legs `a`, `b` and angle `omega`.
///
/// Past vertex, with `κ = √|K|`:
/// * `K < 0`: `cosh κc = cosh κa cosh κb - sinh κa sinh κb cosh ω`
/// * `K = 0`: `c² = a² + b² - 2ab cosh ω`
/// * `K > 0`: `cos κc = cos κa cos κb + sin κa sin κb cosh ω`
///
/// The middle vertex flips the sign of the angle term. Errors with
/// [`Error::NotTimelike`] when the endpoints are not timelike related.
pub fn law_of_cosines(a: f64, b: f64, omega: f64, position: VertexPosition, k: f64) -> Result<f64> {
    let space = ModelSpace::new(k)?;
    check_leg(&space, a)?;
    check_leg(&space, b)?;
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(domain("angle must be finite and non-negative"));
    }
    let sign = match position {
        VertexPosition::PastVertex => -1.0,
        VertexPosition::MiddleVertex => 1.0,
    };
    let ch = omega.cosh();
    match space.representation() {
        Representation::FlatPlane => {
            let c2 = a * a + b * b + sign * 2.0 * a * b * ch;
            if c2 < 0.0 {
                return Err(Error::NotTimelike);
            }
            Ok(c2.sqrt())
        }
        Representation::DeSitterQuadric => {
            let kappa = (-k).sqrt();
            let (ka, kb) = (kappa * a, kappa * b);
            let arg = ka.cosh() * kb.cosh() + sign * ka.sinh() * kb.sinh() * ch;
            if arg < 1.0 {
                return Err(Error::NotTimelike);
            }
            Ok(arg.acosh() / kappa)
        }
        Representation::AntiDeSitterWedge => {
            let kappa = k.sqrt();
            let (ka, kb) = (kappa * a, kappa * b);
            let arg = ka.cos() * kb.cos() - sign * ka.sin() * kb.sin() * ch;
            if arg > 1.0 {
                return Err(Error::NotTimelike);
            }
            if arg < -1.0 {
                return Err(Error::NotRealizable("opposite side exceeds D_K".into()));
            }
            Ok(arg.acos() / kappa)
        }
    }
}

/// `cosh` of the angle at `p` in a triangle with sides `(a, b, c)`.
fn vertex_angle_cosh(space: &ModelSpace, t: &ModelTriangle) -> f64 {
    let (a, b, c) = (t.a, t.b, t.c);
    match space.representation() {
        Representation::FlatPlane => (a * a + c * c - b * b) / (2.0 * a * c),
        Representation::DeSitterQuadric => {
            let kappa = (-space.k()).sqrt();
            let (ka, kb, kc) = (kappa * a, kappa * b, kappa * c);
            (ka.cosh() * kc.cosh() - kb.cosh()) / (ka.sinh() * kc.sinh())
        }
        Representation::AntiDeSitterWedge => {
            let kappa = space.k().sqrt();
            let (ka, kb, kc) = (kappa * a, kappa * b, kappa * c);
            (kb.cos() - ka.cos() * kc.cos()) / (ka.sin() * kc.sin())
        }
    }
}

fn scaled(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|c| c * s).collect()
}

/// The vertex the realised figures start from: the base point, moved down
/// the base geodesic by `shift` in anti-de Sitter to keep figures in the wedge.
fn anchor(space: &ModelSpace, shift: f64) -> Result<Event> {
    let o = space.base_point();
    if space.representation() != Representation::AntiDeSitterWedge || shift == 0.0 {
        return Ok(o);
    }
    let (et, _) = space.timelike_frame(&o);
    space.exp(&o, &scaled(&et, -shift))
}

/// Comparison triangle `(p̄, x̄, ȳ)` in `L²(K)`.
///
/// `p̄` and `ȳ` lie on the base geodesic and `x̄` on the side of increasing
/// spatial coordinate. In the flat plane `p̄ = (0, 0)`, `ȳ = (c, 0)` and
/// `x̄ = (t, u)` with `t = (c² + a² - b²)/(2c)`, `u = √(t² - a²)`; anti-de
/// Sitter triangles are centred on the base point.
pub fn realize_triangle(t: &ModelTriangle, space: &ModelSpace) -> Result<[Event; 3]> {
    t.validate()?;
    if t.c >= space.d_k() {
        return Err(Error::NotRealizable("longest side reaches D_K".into()));
    }
    if space.representation() == Representation::FlatPlane {
        let p = Event::minkowski(vec![0.0, 0.0]);
        let y = Event::minkowski(vec![t.c, 0.0]);
        if t.c == 0.0 {
            return Ok([p.clone(), p, y]);
        }
        let tt = (t.c * t.c + t.a * t.a - t.b * t.b) / (2.0 * t.c);
        let u = (tt * tt - t.a * t.a).max(0.0).sqrt();
        return Ok([p, Event::minkowski(vec![tt, u]), y]);
    }
    let p = anchor(space, 0.5 * t.c)?;
    let (et, ex) = space.timelike_frame(&p);
    let y = space.exp(&p, &scaled(&et, t.c))?;
    if t.a == 0.0 {
        return Ok([p.clone(), p, y]);
    }
    if t.b == 0.0 {
        return Ok([p, y.clone(), y]);
    }
    let omega = vertex_angle_cosh(space, t).max(1.0).acosh();
    let dir: Vec<f64> = et
        .iter()
        .zip(&ex)
        .map(|(e0, e1)| t.a * (omega.cosh() * e0 + omega.sinh() * e1))
        .collect();
    let x = space.exp(&p, &dir)?;
    Ok([p, x, y])
}

/// The point on the side `[from, to]` at separation `distance` from `from`.
pub fn comparison_point<S: GeodesicSpace>(space: &S, from: &Event, to: &Event, distance: f64) -> Result<Event> {
    let total = space.time_separation(from, to);
    if !(distance >= 0.0) || distance > total * (1.0 + 1e-12) {
        return Err(domain("distance must lie between 0 and the side length"));
    }
    if distance == 0.0 {
        return Ok(from.clone());
    }
    space.geodesic_point(from, to, (distance / total).min(1.0))
}

/// Realises a hinge with legs symmetric about the base geodesic.
pub fn realize_hinge(h: &Hinge, space: &ModelSpace) -> Result<RealizedHinge> {
    check_leg(space, h.a)?;
    check_leg(space, h.b)?;
    if !(h.omega >= 0.0) || !h.omega.is_finite() {
        return Err(domain("angle must be finite and non-negative"));
    }
    let p = anchor(space, 0.5 * h.a.max(h.b))?;
    let half = 0.5 * h.omega;
    let x = space.exp(&p, &space.frame_vector(&p, h.a * half.cosh(), -h.a * half.sinh()))?;
    let y = space.exp(&p, &space.frame_vector(&p, h.b * half.cosh(), h.b * half.sinh()))?;
    let opposite = space.time_separation(&x, &y).max(space.time_separation(&y, &x));
    Ok(RealizedHinge { p, x, y, opposite })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::hyperbolic_angle;

    const HINGE: (f64, f64, f64) = (0.5, 2.0, 0.5);

    #[test]
    fn flat_middle_vertex_recovers_triangle() {
        let omega = hyperbolic_angle(
            &Event::minkowski(vec![1.0, 0.0]),
            &Event::minkowski(vec![2.0, 0.0]),
            &Event::minkowski(vec![3.0, 1.0]),
        )
        .unwrap();
        assert!((omega - (2.0 / 3f64.sqrt()).acosh()).abs() < 1e-14);
        let c = law_of_cosines(1.0, 3f64.sqrt(), omega, VertexPosition::MiddleVertex, 0.0).unwrap();
        assert!((c - 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn past_vertex_values() {
        let (a, b, w) = HINGE;
        let flat = law_of_cosines(a, b, w, VertexPosition::PastVertex, 0.0).unwrap();
        assert!((flat - (4.25 - 2.0 * 0.5f64.cosh()).sqrt()).abs() < 1e-15);
        assert!((flat - 1.412_355_503_967_481_6).abs() < 1e-12);
        let ds = law_of_cosines(a, b, w, VertexPosition::PastVertex, -1.0).unwrap();
        let arg = 0.5f64.cosh() * 2f64.cosh() - 0.5f64.sinh() * 2f64.sinh() * 0.5f64.cosh();
        assert!((ds - arg.acosh()).abs() < 1e-15);
        assert!((ds - 1.378_905_736_715_869).abs() < 1e-12);
        let ads = law_of_cosines(a, b, w, VertexPosition::PastVertex, 1.0).unwrap();
        assert!((ads - 1.444_082_991_253_230_7).abs() < 1e-12);
        assert!(ds < flat && flat < ads);
    }

    #[test]
    fn curvature_scaling() {
        // L²(K) with |K| = 4 is L²(±1) shrunk by 1/2
        for k in [-1.0, 1.0] {
            let c1 = law_of_cosines(0.4, 1.0, 0.3, VertexPosition::PastVertex, k).unwrap();
            let c4 = law_of_cosines(0.2, 0.5, 0.3, VertexPosition::PastVertex, 4.0 * k).unwrap();
            assert!((c1 - 2.0 * c4).abs() < 1e-13);
        }
    }

    #[test]
    fn invalid_domains() {
        assert!(matches!(
            law_of_cosines(1.0, 1.0, 2.0, VertexPosition::PastVertex, 0.0),
            Err(Error::NotTimelike)
        ));
        assert!(matches!(
            law_of_cosines(1.0, 1.0, 2.0, VertexPosition::PastVertex, -1.0),
            Err(Error::NotTimelike)
        ));
        assert!(law_of_cosines(0.0, 1.0, 0.1, VertexPosition::PastVertex, 0.0).is_err());
        assert!(law_of_cosines(1.0, 4.0, 0.1, VertexPosition::PastVertex, 1.0).is_err());
        assert!(law_of_cosines(1.0, 1.0, -0.1, VertexPosition::MiddleVertex, 0.0).is_err());
    }

    #[test]
    fn flat_triangle_examples() {
        let flat = ModelSpace::new(0.0).unwrap();
        let [_, x, _] = realize_triangle(&ModelTriangle::new(1.0, 1.0, 3.0), &flat).unwrap();
        assert!((x.coords[0] - 1.5).abs() < 1e-15);
        assert!((x.coords[1] - 1.25f64.sqrt()).abs() < 1e-15);

        let [_, x, _] = realize_triangle(&ModelTriangle::new(1.0, 1.0, 2.0), &flat).unwrap();
        assert_eq!(x.coords, vec![1.0, 0.0]);

        let t = ModelTriangle::new(1.0, 3f64.sqrt(), 8f64.sqrt());
        let [p, x, y] = realize_triangle(&t, &flat).unwrap();
        assert!((x.coords[0] - 1.060_660_171_779_821).abs() < 1e-12);
        assert!((x.coords[1] - 0.353_553_390_593_273_8).abs() < 1e-12);
        assert!((flat.time_separation(&x, &y) - 3f64.sqrt()).abs() < 1e-12);
        assert!((flat.time_separation(&p, &y) - 8f64.sqrt()).abs() < 1e-15);

        assert!(matches!(
            realize_triangle(&ModelTriangle::new(1.0, 1.0, 1.5), &flat),
            Err(Error::NotRealizable(_))
        ));
    }

    #[test]
    fn curved_triangles_reproduce_sides() {
        for k in [-1.0, 1.0, -0.3, 2.0] {
            let s = ModelSpace::new(k).unwrap();
            let tri = ModelTriangle::new(0.3, 0.5, 1.0);
            let [p, x, y] = realize_triangle(&tri, &s).unwrap();
            for e in [&p, &x, &y] {
                s.check(e).unwrap();
            }
            assert!((s.time_separation(&p, &x) - tri.a).abs() < 1e-12 * tri.c);
            assert!((s.time_separation(&x, &y) - tri.b).abs() < 1e-12 * tri.c);
            assert!((s.time_separation(&p, &y) - tri.c).abs() < 1e-12 * tri.c);
        }
    }

    #[test]
    fn comparison_point_examples() {
        let flat = ModelSpace::new(0.0).unwrap();
        let o = Event::minkowski(vec![0.0, 0.0]);
        let e = Event::minkowski(vec![2.0, 0.0]);
        assert_eq!(comparison_point(&flat, &o, &e, 0.0).unwrap(), o);
        assert_eq!(comparison_point(&flat, &o, &e, 1.0).unwrap().coords, vec![1.0, 0.0]);
        let f = Event::minkowski(vec![2.0, 1.0]);
        let m = comparison_point(&flat, &o, &f, 3f64.sqrt() / 2.0).unwrap();
        assert!((m.coords[0] - 1.0).abs() < 1e-15 && (m.coords[1] - 0.5).abs() < 1e-15);
        assert!(comparison_point(&flat, &o, &e, 2.5).is_err());
        assert!(comparison_point(&flat, &o, &e, -0.1).is_err());
    }

    #[test]
    fn hinge_realisation_matches_law_of_cosines() {
        let (a, b, w) = HINGE;
        for k in [-1.0, 0.0, 1.0] {
            let s = ModelSpace::new(k).unwrap();
            let h = realize_hinge(&Hinge::new(a, b, w), &s).unwrap();
            let c = law_of_cosines(a, b, w, VertexPosition::PastVertex, k).unwrap();
            assert!((h.opposite - c).abs() < 1e-12, "K = {k}");
            assert!((s.angle_at(&h.p, &h.x, &h.y).unwrap() - w).abs() < 1e-10);
        }
    }

    #[test]
    fn degenerate_hinge_is_radial() {
        for k in [-1.0, 0.0, 1.0] {
            let s = ModelSpace::new(k).unwrap();
            let h = realize_hinge(&Hinge::new(0.4, 1.1, 0.0), &s).unwrap();
            assert!((h.opposite - 0.7).abs() < 1e-12);
        }
    }
}
