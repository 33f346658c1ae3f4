//! Two-dimensional Lorentzian model spaces of constant curvature `K`.
//!
//! Sign convention: `K < 0` is de Sitter, `K > 0` anti-de Sitter. With
//! `R = 1/√|K|` the curved models are quadrics in a 3-dimensional flat space:
//!
//! * de Sitter: `η(x, x) = -R²` with `η = diag(+1, -1, -1)`;
//! * anti-de Sitter: `B(x, x) = R²` with `B = diag(+1, +1, -1)`, restricted to
//!   the convex wedge `|τ| + |ρ| < π/2` of the global chart, which is the
//!   diamond between the points at parameter `∓D_K/2` along the base geodesic.
//!
//! `K = 0` is the Minkowski plane in inertial coordinates. Tangent vectors are
//! ambient vectors orthogonal to the base point; the ambient form restricted to
//! the tangent plane has signature (+, -) in both curved cases.

mod polar;
mod trig;

pub use polar::{
    f_model, from_polar, polar_geodesic_oracle, pullback_norms, radial_map_phi,
    radial_pullback_holds, to_polar, PolarPoint,
};
pub use trig::{
    comparison_point, law_of_cosines, realize_hinge, realize_triangle, Hinge, ModelTriangle,
    RealizedHinge, VertexPosition,
};

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::minkowski::{self, minkowski_inner};
use crate::sampling::DiamondSampler;
use crate::space::{Chart, Event, GeodesicSpace, LorentzianSpace, Relation, RelationKind};

/// Relative tolerance of the quadric constraint.
pub const QUADRIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    FlatPlane,
    DeSitterQuadric,
    AntiDeSitterWedge,
}

/// `L²(K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpace {
    k: f64,
    radius: f64,
    rep: Representation,
}

#[inline]
fn sinhc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 + z * z / 6.0 * (1.0 + z * z / 20.0)
    } else {
        z.sinh() / z
    }
}

#[inline]
fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0 * (1.0 - z * z / 20.0)
    } else {
        z.sin() / z
    }
}

impl ModelSpace {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(domain("curvature must be finite"));
        }
        let (radius, rep) = if k == 0.0 {
            (f64::INFINITY, Representation::FlatPlane)
        } else if k < 0.0 {
            (1.0 / (-k).sqrt(), Representation::DeSitterQuadric)
        } else {
            (1.0 / k.sqrt(), Representation::AntiDeSitterWedge)
        };
        Ok(ModelSpace { k, radius, rep })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `R = 1/√|K|`, infinite for the flat plane.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `π/√K` for `K > 0`, infinite otherwise.
    pub fn d_k(&self) -> f64 {
        match self.rep {
            Representation::AntiDeSitterWedge => PI * self.radius,
            _ => f64::INFINITY,
        }
    }

    pub fn representation(&self) -> Representation {
        self.rep
    }

    pub fn chart(&self) -> Chart {
        match self.rep {
            Representation::FlatPlane => Chart::Minkowski,
            _ => Chart::Quadric,
        }
    }

    /// Number of coordinates of an event.
    pub fn coord_dim(&self) -> usize {
        match self.rep {
            Representation::FlatPlane => 2,
            _ => 3,
        }
    }

    /// Ambient bilinear form (also the metric on every tangent plane).
    #[inline]
    pub fn form(&self, u: &[f64], v: &[f64]) -> f64 {
        match self.rep {
            Representation::FlatPlane => minkowski_inner(u, v),
            Representation::DeSitterQuadric => u[0] * v[0] - u[1] * v[1] - u[2] * v[2],
            Representation::AntiDeSitterWedge => u[0] * v[0] + u[1] * v[1] - u[2] * v[2],
        }
    }

    /// The point every construction is anchored at.
    pub fn base_point(&self) -> Event {
        let r = self.radius;
        match self.rep {
            Representation::FlatPlane => Event::minkowski(vec![0.0, 0.0]),
            Representation::DeSitterQuadric => Event::quadric(vec![0.0, r, 0.0]),
            Representation::AntiDeSitterWedge => Event::quadric(vec![r, 0.0, 0.0]),
        }
    }

    /// Validates chart, dimension, the quadric constraint and wedge membership.
    pub fn check(&self, e: &Event) -> Result<()> {
        if e.chart != self.chart() {
            return Err(Error::ChartMismatch(format!(
                "model space with K = {} expects {:?} events",
                self.k,
                self.chart()
            )));
        }
        if e.dim() != self.coord_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.coord_dim(),
                got: e.dim(),
            });
        }
        if e.coords.iter().any(|c| !c.is_finite()) {
            return Err(domain("coordinates must be finite"));
        }
        let residual = self.quadric_residual(e);
        if residual > QUADRIC_TOL {
            return Err(Error::OffQuadric(residual));
        }
        if !self.in_wedge(e) {
            return Err(Error::OutsideWedge);
        }
        Ok(())
    }

    pub fn event(&self, coords: impl Into<Vec<f64>>) -> Result<Event> {
        let e = Event {
            chart: self.chart(),
            coords: coords.into(),
        };
        self.check(&e)?;
        Ok(e)
    }

    /// `|⟨x,x⟩ - ⟨o,o⟩| / R²`, normalised by the coordinate size so that points
    /// far out on the quadric are not penalised for rounding.
    pub fn quadric_residual(&self, e: &Event) -> f64 {
        let r2 = self.radius * self.radius;
        let c = &e.coords;
        match self.rep {
            Representation::FlatPlane => 0.0,
            Representation::DeSitterQuadric => {
                let size = c.iter().map(|v| v * v).sum::<f64>().max(r2);
                (self.form(c, c) + r2).abs() / size
            }
            Representation::AntiDeSitterWedge => {
                let size = c.iter().map(|v| v * v).sum::<f64>().max(r2);
                (self.form(c, c) - r2).abs() / size
            }
        }
    }

    /// Always true except for anti-de Sitter events outside `|τ| + |ρ| < π/2`.
    pub fn in_wedge(&self, e: &Event) -> bool {
        match self.rep {
            Representation::AntiDeSitterWedge => {
                let (tau, rho) = self.conformal(e);
                e.coords[0] > 0.0 && tau.abs() + rho.abs() < FRAC_PI_2
            }
            _ => true,
        }
    }

    /// Conformally flat chart `(T, X)` in which the metric is a positive
    /// multiple of `dT² - dX²`: inertial coordinates, `(atan(x0/R), atan2(x2, x1))`
    /// on de Sitter and `(atan2(x1, x0), atan(x2/R))` on anti-de Sitter.
    pub fn conformal(&self, e: &Event) -> (f64, f64) {
        let c = &e.coords;
        let r = self.radius;
        match self.rep {
            Representation::FlatPlane => (c[0], c[1]),
            Representation::DeSitterQuadric => ((c[0] / r).atan(), c[2].atan2(c[1])),
            Representation::AntiDeSitterWedge => (c[1].atan2(c[0]), (c[2] / r).atan()),
        }
    }

    pub fn from_conformal(&self, t: f64, x: f64) -> Event {
        let r = self.radius;
        match self.rep {
            Representation::FlatPlane => Event::minkowski(vec![t, x]),
            Representation::DeSitterQuadric => {
                Event::quadric(vec![r * t.tan(), r * x.cos() / t.cos(), r * x.sin() / t.cos()])
            }
            Representation::AntiDeSitterWedge => {
                Event::quadric(vec![r * t.cos() / x.cos(), r * t.sin() / x.cos(), r * x.tan()])
            }
        }
    }

    /// Tangential projection of `q` at `p` (the direction of the geodesic from `p`).
    fn projection(&self, p: &[f64], q: &[f64]) -> Vec<f64> {
        let r2 = self.radius * self.radius;
        match self.rep {
            Representation::FlatPlane => minkowski::difference(q, p),
            Representation::DeSitterQuadric => {
                let s = self.form(p, q) / r2;
                q.iter().zip(p).map(|(a, b)| a + s * b).collect()
            }
            Representation::AntiDeSitterWedge => {
                let s = self.form(p, q) / r2;
                q.iter().zip(p).map(|(a, b)| a - s * b).collect()
            }
        }
    }

    /// Sign of the time component of a tangent vector at `p`.
    fn is_future(&self, p: &[f64], v: &[f64]) -> bool {
        match self.rep {
            Representation::AntiDeSitterWedge => {
                let field = [-p[1], p[0], 0.0];
                self.form(v, &field) > 0.0
            }
            _ => v[0] > 0.0,
        }
    }

    fn relation_raw(&self, p: &[f64], q: &[f64]) -> Relation {
        let d: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
        if d.iter().all(|&c| c == 0.0) {
            return Relation::new(RelationKind::Causal, true);
        }
        let n = self.form(&d, &d);
        if n < 0.0 {
            return Relation::UNRELATED;
        }
        let proj = self.projection(p, q);
        let forward = self.is_future(p, &proj);
        let backward = self.is_future(p, &proj.iter().map(|c| -c).collect::<Vec<_>>());
        if !forward && !backward {
            return Relation::UNRELATED;
        }
        let kind = if n > 0.0 {
            RelationKind::Chronological
        } else {
            RelationKind::Causal
        };
        Relation::new(kind, forward)
    }

    /// Separation of related points from the chord `√⟨q-p, q-p⟩`, ignoring order.
    fn chord_separation(&self, p: &[f64], q: &[f64]) -> f64 {
        let d: Vec<f64> = q.iter().zip(p).map(|(a, b)| a - b).collect();
        let n = self.form(&d, &d);
        if !(n > 0.0) {
            return 0.0;
        }
        let r = self.radius;
        match self.rep {
            Representation::FlatPlane => n.sqrt(),
            Representation::DeSitterQuadric => 2.0 * r * (n.sqrt() / (2.0 * r)).asinh(),
            Representation::AntiDeSitterWedge => 2.0 * r * (n.sqrt() / (2.0 * r)).min(1.0).asin(),
        }
    }

    fn check_tangent(&self, p: &Event, v: &[f64]) -> Result<()> {
        if v.len() != self.coord_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.coord_dim(),
                got: v.len(),
            });
        }
        if self.rep != Representation::FlatPlane {
            let scale = self.radius * v.iter().map(|c| c * c).sum::<f64>().sqrt();
            let p_size = p.coords.iter().map(|c| c * c).sum::<f64>().sqrt() / self.radius;
            if self.form(&p.coords, v).abs() > 1e-9 * scale * p_size.max(1.0) {
                return Err(domain("vector is not tangent to the quadric"));
            }
        }
        Ok(())
    }
}

/// Checked `ℓ_K(p, q)`.
pub fn ell_k(space: &ModelSpace, p: &Event, q: &Event) -> Result<f64> {
    space.check(p)?;
    space.check(q)?;
    Ok(space.time_separation(p, q))
}

/// Checked causal relation of `(p, q)`.
pub fn relation_k(space: &ModelSpace, p: &Event, q: &Event) -> Result<Relation> {
    space.check(p)?;
    space.check(q)?;
    Ok(space.relation(p, q))
}

impl LorentzianSpace for ModelSpace {
    type Point = Event;

    fn relation(&self, x: &Event, y: &Event) -> Relation {
        self.relation_raw(&x.coords, &y.coords)
    }

    fn time_separation(&self, x: &Event, y: &Event) -> f64 {
        if self.relation_raw(&x.coords, &y.coords).is_causal_forward() {
            self.chord_separation(&x.coords, &y.coords)
        } else {
            0.0
        }
    }
}

impl GeodesicSpace for ModelSpace {
    fn inner(&self, _p: &Event, u: &[f64], v: &[f64]) -> f64 {
        self.form(u, v)
    }

    /// Errors for anti-de Sitter when the endpoint leaves the wedge or a
    /// timelike vector reaches `D_K`.
    fn exp(&self, p: &Event, v: &[f64]) -> Result<Event> {
        self.check_tangent(p, v)?;
        let r = self.radius;
        let n = self.form(v, v);
        let c = &p.coords;
        let coords: Vec<f64> = match self.rep {
            Representation::FlatPlane => c.iter().zip(v).map(|(a, b)| a + b).collect(),
            Representation::DeSitterQuadric => {
                let z = n.abs().sqrt() / r;
                let (a, b) = if n >= 0.0 {
                    (z.cosh(), sinhc(z))
                } else {
                    (z.cos(), sinc(z))
                };
                c.iter().zip(v).map(|(x, y)| a * x + b * y).collect()
            }
            Representation::AntiDeSitterWedge => {
                let z = n.abs().sqrt() / r;
                if n > 0.0 && z >= PI {
                    return Err(Error::OutsideWedge);
                }
                let (a, b) = if n >= 0.0 { (z.cos(), sinc(z)) } else { (z.cosh(), sinhc(z)) };
                c.iter().zip(v).map(|(x, y)| a * x + b * y).collect()
            }
        };
        let e = Event {
            chart: self.chart(),
            coords,
        };
        if !self.in_wedge(&e) {
            return Err(Error::OutsideWedge);
        }
        Ok(e)
    }

    /// Defined for causally related pairs in either order, and for spacelike
    /// pairs joined by a geodesic.
    fn log(&self, p: &Event, q: &Event) -> Result<Vec<f64>> {
        if p.dim() != self.coord_dim() || q.dim() != self.coord_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.coord_dim(),
                got: if p.dim() != self.coord_dim() { p.dim() } else { q.dim() },
            });
        }
        let proj = self.projection(&p.coords, &q.coords);
        let r = self.radius;
        let r2 = r * r;
        match self.rep {
            Representation::FlatPlane => Ok(proj),
            Representation::DeSitterQuadric => {
                let d: Vec<f64> = minkowski::difference(&q.coords, &p.coords);
                let n = self.form(&d, &d);
                let factor = if n >= 0.0 {
                    let z = 2.0 * (n.sqrt() / (2.0 * r)).asinh();
                    1.0 / sinhc(z)
                } else {
                    let c = -self.form(&p.coords, &q.coords) / r2;
                    if c <= -1.0 {
                        return Err(domain("no geodesic joins the two events"));
                    }
                    let z = 2.0 * ((-n).sqrt() / (2.0 * r)).min(1.0).asin();
                    1.0 / sinc(z)
                };
                Ok(proj.iter().map(|c| c * factor).collect())
            }
            Representation::AntiDeSitterWedge => {
                let d: Vec<f64> = minkowski::difference(&q.coords, &p.coords);
                let n = self.form(&d, &d);
                let factor = if n >= 0.0 {
                    let s = n.sqrt() / (2.0 * r);
                    if s >= 1.0 {
                        return Err(Error::OutsideWedge);
                    }
                    1.0 / sinc(2.0 * s.asin())
                } else {
                    let z = 2.0 * ((-n).sqrt() / (2.0 * r)).asinh();
                    1.0 / sinhc(z)
                };
                Ok(proj.iter().map(|c| c * factor).collect())
            }
        }
    }

    fn timelike_frame(&self, p: &Event) -> (Vec<f64>, Vec<f64>) {
        let c = &p.coords;
        let r = self.radius;
        match self.rep {
            Representation::FlatPlane => (vec![1.0, 0.0], vec![0.0, 1.0]),
            Representation::DeSitterQuadric => {
                let rho = c[1].hypot(c[2]);
                let et = vec![rho * rho, c[0] * c[1], c[0] * c[2]]
                    .into_iter()
                    .map(|v| v / (rho * r))
                    .collect();
                let ex = vec![0.0, -c[2] / rho, c[1] / rho];
                (et, ex)
            }
            Representation::AntiDeSitterWedge => {
                let sigma = c[0].hypot(c[1]);
                let norm = (r * r + c[2] * c[2]).sqrt();
                let et = vec![-c[1] / norm, c[0] / norm, 0.0];
                let ex = vec![c[0] * c[2], c[1] * c[2], sigma * sigma]
                    .into_iter()
                    .map(|v| v / (sigma * r))
                    .collect();
                (et, ex)
            }
        }
    }
}

impl DiamondSampler for ModelSpace {
    /// Uniform in the null coordinates `T ± X` of the conformal chart. This is
    /// the volume measure only for the flat plane.
    fn sample_in_diamond<R: Rng + ?Sized>(&self, a: &Event, b: &Event, rng: &mut R) -> Result<Event> {
        if !self.chronological(a, b) {
            return Err(Error::Sampling("diamond has empty interior".into()));
        }
        let (ta, xa) = self.conformal(a);
        let (tb, mut xb) = self.conformal(b);
        if self.rep == Representation::DeSitterQuadric {
            let mut dx = xb - xa;
            dx -= (2.0 * PI) * (dx / (2.0 * PI)).round();
            xb = xa + dx;
        }
        let (ua, va) = (ta + xa, ta - xa);
        let (ub, vb) = (tb + xb, tb - xb);
        let u = ua + (ub - ua) * rng.random::<f64>();
        let v = va + (vb - va) * rng.random::<f64>();
        Ok(self.from_conformal(0.5 * (u + v), 0.5 * (u - v)))
    }
}
