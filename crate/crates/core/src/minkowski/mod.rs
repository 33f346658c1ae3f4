//! Flat Minkowski space `R^{1,n}` with signature (+, -, .., -).
//!
//! Time orientation is the sign of the 0-th coordinate difference. The time
//! separation between related points is the hyperbolic norm of their
//! difference; the straight segment realises the supremum over causal curves.

mod equality;
mod hyperbola;

pub use equality::{classify_equality_case, EqualityCase, EQUALITY_REL_TOL};
pub use hyperbola::{hyperbola_points, HyperbolaSpec};

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::sampling::DiamondSampler;
use crate::space::{
    tangent_angle, Chart, Event, GeodesicSpace, LorentzianSpace, Relation, RelationKind,
};

/// `⟨u, v⟩ = u0 v0 - Σ ui vi`.
#[inline]
pub fn minkowski_inner(u: &[f64], v: &[f64]) -> f64 {
    let mut s = u[0] * v[0];
    for i in 1..u.len() {
        s -= u[i] * v[i];
    }
    s
}

/// `√⟨v, v⟩` for future-directed causal `v`, zero otherwise.
#[inline]
pub fn hyperbolic_norm(v: &[f64]) -> f64 {
    let q = minkowski_inner(v, v);
    if v[0] >= 0.0 && q >= 0.0 {
        q.sqrt()
    } else {
        0.0
    }
}

#[inline]
fn relation_of_difference(x: &[f64], y: &[f64]) -> Relation {
    let d0 = y[0] - x[0];
    let mut q = d0 * d0;
    let mut zero = d0 == 0.0;
    for i in 1..x.len() {
        let d = y[i] - x[i];
        q -= d * d;
        zero &= d == 0.0;
    }
    if zero {
        return Relation::new(RelationKind::Causal, true);
    }
    if q < 0.0 || d0 == 0.0 {
        return Relation::UNRELATED;
    }
    let kind = if q > 0.0 {
        RelationKind::Chronological
    } else {
        RelationKind::Causal
    };
    Relation::new(kind, d0 > 0.0)
}

#[inline]
fn separation_of_difference(x: &[f64], y: &[f64]) -> f64 {
    let d0 = y[0] - x[0];
    if d0 < 0.0 {
        return 0.0;
    }
    let mut q = d0 * d0;
    for i in 1..x.len() {
        let d = y[i] - x[i];
        q -= d * d;
    }
    if q > 0.0 {
        q.sqrt()
    } else {
        0.0
    }
}

/// `R^{1,n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinkowskiSpace {
    n: usize,
}

impl MinkowskiSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("Minkowski space needs at least one spatial dimension"));
        }
        Ok(MinkowskiSpace { n })
    }

    /// Number of spatial dimensions.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn origin(&self) -> Event {
        Event::minkowski(vec![0.0; self.dim()])
    }

    pub fn event(&self, coords: impl Into<Vec<f64>>) -> Result<Event> {
        let e = Event::minkowski(coords);
        self.check(&e)?;
        Ok(e)
    }

    pub fn check(&self, e: &Event) -> Result<()> {
        if e.chart != Chart::Minkowski {
            return Err(Error::ChartMismatch("expected a Minkowski event".into()));
        }
        if e.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: e.dim(),
            });
        }
        if e.coords.iter().any(|c| !c.is_finite()) {
            return Err(domain("coordinates must be finite"));
        }
        Ok(())
    }
}

/// Checked `ℓ(x, y)`.
pub fn time_separation(x: &Event, y: &Event) -> Result<f64> {
    check_pair(x, y)?;
    Ok(separation_of_difference(&x.coords, &y.coords))
}

/// Checked causal relation of `(x, y)`.
pub fn relation(x: &Event, y: &Event) -> Result<Relation> {
    check_pair(x, y)?;
    Ok(relation_of_difference(&x.coords, &y.coords))
}

fn check_pair(x: &Event, y: &Event) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    if x.dim() < 2 {
        return Err(domain("Minkowski events need at least two coordinates"));
    }
    if x.chart != y.chart {
        return Err(Error::ChartMismatch("events live in different charts".into()));
    }
    Ok(())
}

/// Hyperbolic angle at `x` between `y` and `z`:
/// `arcosh(⟨y-x, z-x⟩ / (‖y-x‖ ‖z-x‖))`.
///
/// Both legs must be timelike and point into the same time cone.
pub fn hyperbolic_angle(x: &Event, y: &Event, z: &Event) -> Result<f64> {
    check_pair(x, y)?;
    check_pair(x, z)?;
    let u = difference(&y.coords, &x.coords);
    let w = difference(&z.coords, &x.coords);
    tangent_angle(minkowski_inner, &u, &w)
}

pub(crate) fn difference(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

/// Squared volume of the simplex spanned by a causal quadruple, from its six
/// squared separations `(d12, d13, d14, d23, d24, d34)` via the bordered
/// Cayley–Menger determinant.
///
/// Returns `det / 288`. For causal quadruples the spanned affine space has
/// signature (+,-,-) (or is degenerate), which makes the determinant
/// non-negative; zero means the points lie in a timelike 2-plane.
pub fn cayley_menger_volume2(d2: [f64; 6]) -> f64 {
    let [d12, d13, d14, d23, d24, d34] = d2;
    let m = [
        [0.0, 1.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, d12, d13, d14],
        [1.0, d12, 0.0, d23, d24],
        [1.0, d13, d23, 0.0, d34],
        [1.0, d14, d24, d34, 0.0],
    ];
    determinant(m) / 288.0
}

fn determinant<const N: usize>(mut m: [[f64; N]; N]) -> f64 {
    let mut det = 1.0;
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..N {
            let f = m[row][col] / m[col][col];
            for k in col..N {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

/// Pure boost taking the rest frame vector `e0` to the unit future timelike
/// vector `u`. Returned row-major.
pub fn boost_from_rest(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let gamma = u[0];
    let mut m = vec![vec![0.0; d]; d];
    m[0][0] = gamma;
    for i in 1..d {
        m[0][i] = u[i];
        m[i][0] = u[i];
        for j in 1..d {
            m[i][j] = if i == j { 1.0 } else { 0.0 } + u[i] * u[j] / (1.0 + gamma);
        }
    }
    m
}

pub(crate) fn apply(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

impl LorentzianSpace for MinkowskiSpace {
    type Point = Event;

    #[inline]
    fn relation(&self, x: &Event, y: &Event) -> Relation {
        relation_of_difference(&x.coords, &y.coords)
    }

    #[inline]
    fn time_separation(&self, x: &Event, y: &Event) -> f64 {
        separation_of_difference(&x.coords, &y.coords)
    }
}

impl GeodesicSpace for MinkowskiSpace {
    fn inner(&self, _p: &Event, u: &[f64], v: &[f64]) -> f64 {
        minkowski_inner(u, v)
    }

    fn exp(&self, p: &Event, v: &[f64]) -> Result<Event> {
        if v.len() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                got: v.len(),
            });
        }
        Ok(Event::minkowski(
            p.coords.iter().zip(v).map(|(a, b)| a + b).collect::<Vec<_>>(),
        ))
    }

    fn log(&self, p: &Event, q: &Event) -> Result<Vec<f64>> {
        check_pair(p, q)?;
        Ok(difference(&q.coords, &p.coords))
    }

    fn timelike_frame(&self, _p: &Event) -> (Vec<f64>, Vec<f64>) {
        let mut et = vec![0.0; self.dim()];
        let mut ex = vec![0.0; self.dim()];
        et[0] = 1.0;
        ex[1] = 1.0;
        (et, ex)
    }

    fn geodesic_point(&self, x: &Event, y: &Event, s: f64) -> Result<Event> {
        check_pair(x, y)?;
        Ok(Event::minkowski(
            x.coords
                .iter()
                .zip(&y.coords)
                .map(|(a, b)| a + s * (b - a))
                .collect::<Vec<_>>(),
        ))
    }
}

/// Rejection budget per diamond sample.
const MAX_REJECTIONS: usize = 100_000;

impl DiamondSampler for MinkowskiSpace {
    /// Uniform (volume measure) sample in `I(a, b)`.
    ///
    /// Samples the rest-frame diamond of height `ℓ(a, b)` from the coordinate
    /// box of its corners, then boosts it onto the axis `b - a`.
    fn sample_in_diamond<R: Rng + ?Sized>(&self, a: &Event, b: &Event, rng: &mut R) -> Result<Event> {
        let height = self.time_separation(a, b);
        if !(height > 0.0) {
            return Err(Error::Sampling("diamond has empty interior".into()));
        }
        let axis: Vec<f64> = difference(&b.coords, &a.coords)
            .into_iter()
            .map(|c| c / height)
            .collect();
        let half = 0.5 * height;
        let mut local = vec![0.0; self.dim()];
        for _ in 0..MAX_REJECTIONS {
            let t = rng.random::<f64>() * height;
            let mut r2 = 0.0;
            for c in local.iter_mut().skip(1) {
                *c = (rng.random::<f64>() * 2.0 - 1.0) * half;
                r2 += *c * *c;
            }
            let reach = t.min(height - t);
            if r2 < reach * reach {
                local[0] = t;
                let boost = boost_from_rest(&axis);
                let moved = apply(&boost, &local);
                return Ok(Event::minkowski(
                    a.coords.iter().zip(&moved).map(|(p, d)| p + d).collect::<Vec<_>>(),
                ));
            }
        }
        Err(Error::Sampling("rejection budget exhausted".into()))
    }
}
