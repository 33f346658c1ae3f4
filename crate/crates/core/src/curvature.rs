//! Curvature diagnostics: the sectional estimator from the second-order
//! expansion of the time separation, triangle and hinge comparison against
//! model spaces, and the four-point condition.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::{realize_hinge, realize_triangle, Hinge, ModelSpace, ModelTriangle};
use crate::space::{Event, GeodesicSpace, LorentzianSpace, Separations6};

/// Log-spaced `(s, t)` grid with a fixed ratio `t/s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionalGrid {
    /// Largest `t`.
    pub max_param: f64,
    pub points: usize,
    /// Decades spanned below `max_param`.
    pub decades: f64,
    pub ratio: f64,
}

impl Default for SectionalGrid {
    fn default() -> Self {
        SectionalGrid {
            max_param: 0.1,
            points: 16,
            decades: 1.0,
            ratio: 2.0,
        }
    }
}

impl SectionalGrid {
    pub fn with_max(max_param: f64) -> Self {
        SectionalGrid {
            max_param,
            ..Self::default()
        }
    }

    /// The `(s, t)` pairs, largest first.
    pub fn pairs(&self) -> Result<Vec<(f64, f64)>> {
        if self.points < 2 || !(self.max_param > 0.0) || !(self.ratio > 1.0) || !(self.decades > 0.0) {
            return Err(domain("degenerate estimator grid"));
        }
        let n = self.points - 1;
        Ok((0..self.points)
            .map(|i| {
                let t = self.max_param * 10f64.powf(-self.decades * i as f64 / n as f64);
                (t / self.ratio, t)
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionalEstimate {
    /// Fitted `g(R(v,w)v, w)` in the normalisation `ℓ² - ‖tv - sw‖² ≈ -c s²t²/6`.
    pub c_hat: f64,
    /// `g(v,v) g(w,w) - g(v,w)²`; negative for a timelike plane.
    pub denom: f64,
    /// Sectional curvature estimate.
    pub k_hat: f64,
    /// RMS residual of the one-parameter fit.
    pub residual: f64,
}

/// Fits `ℓ(exp_p(tv), exp_p(sw))² - ‖tv - sw‖² = β s²t²` by least squares.
///
/// On the model spaces the exact expansion is `β = -K denom / 3 + O(t²)`, so
/// `K_hat = -3β / denom`. The reported `c_hat = -6β` is twice `K denom`.
pub fn estimate_sectional<S: GeodesicSpace>(
    space: &S,
    p: &Event,
    v: &[f64],
    w: &[f64],
    grid: &SectionalGrid,
) -> Result<SectionalEstimate> {
    let g = |a: &[f64], b: &[f64]| space.inner(p, a, b);
    if !(g(v, v) > 0.0 && g(w, w) > 0.0 && g(v, w) > 0.0) {
        return Err(domain("v and w must be future timelike"));
    }
    let denom = g(v, v) * g(w, w) - g(v, w) * g(v, w);
    if !(denom < 0.0) {
        return Err(domain("v and w must span a timelike plane"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (s, t) in grid.pairs()? {
        let tv: Vec<f64> = v.iter().map(|c| c * t).collect();
        let sw: Vec<f64> = w.iter().map(|c| c * s).collect();
        let a = space.exp(p, &tv)?;
        let b = space.exp(p, &sw)?;
        let chord: Vec<f64> = tv.iter().zip(&sw).map(|(x, y)| x - y).collect();
        let l = space.time_separation(&b, &a).max(space.time_separation(&a, &b));
        if !(l > 0.0) {
            return Err(domain("grid points are not timelike related; need v - w future timelike"));
        }
        xs.push(s * s * t * t);
        ys.push(l * l - g(&chord, &chord));
    }
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let beta = sxy / sxx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - beta * x).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    Ok(SectionalEstimate {
        c_hat: -6.0 * beta,
        denom,
        k_hat: -3.0 * beta / denom,
        residual,
    })
}

fn check_triangle<S: LorentzianSpace<Point = Event>>(space: &S, tri: &[Event; 3]) -> Result<ModelTriangle> {
    if !space.chronological(&tri[0], &tri[1]) || !space.chronological(&tri[1], &tri[2]) {
        return Err(Error::Order("triangle needs p << x << y".into()));
    }
    Ok(ModelTriangle::new(
        space.time_separation(&tri[0], &tri[1]),
        space.time_separation(&tri[1], &tri[2]),
        space.time_separation(&tri[0], &tri[2]),
    ))
}

/// `ℓ(u, w) - ℓ(ū, w̄)` for every ordered pair of sampled points lying on two
/// different sides, with comparison points matched by arc fraction in the
/// realised `L²(K)` triangle. Each side carries `per_side + 1` points.
pub fn triangle_comparison_margins<S: GeodesicSpace>(
    space: &S,
    tri: &[Event; 3],
    k: f64,
    per_side: usize,
) -> Result<Vec<f64>> {
    if per_side == 0 {
        return Err(domain("need at least one subdivision per side"));
    }
    let sides = check_triangle(space, tri)?;
    let model = ModelSpace::new(k)?;
    let bar = realize_triangle(&sides, &model)?;
    let pairs = [(0, 1), (1, 2), (0, 2)];
    let mut pts: Vec<Vec<(Event, Event)>> = Vec::new();
    for &(i, j) in &pairs {
        let mut side = Vec::with_capacity(per_side + 1);
        for n in 0..=per_side {
            let f = n as f64 / per_side as f64;
            side.push((
                space.geodesic_point(&tri[i], &tri[j], f)?,
                model.geodesic_point(&bar[i], &bar[j], f)?,
            ));
        }
        pts.push(side);
    }
    let mut margins = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            for (u, ub) in &pts[a] {
                for (w, wb) in &pts[b] {
                    margins.push(space.time_separation(u, w) - model.time_separation(ub, wb));
                }
            }
        }
    }
    Ok(margins)
}

/// Minimum of [`triangle_comparison_margins`]; non-negative values certify
/// the sampled instance of timelike curvature bounded above by `K`.
pub fn triangle_comparison_min_margin<S: GeodesicSpace>(
    space: &S,
    tri: &[Event; 3],
    k: f64,
    per_side: usize,
) -> Result<f64> {
    Ok(triangle_comparison_margins(space, tri, k, per_side)?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// Largest deviation from the flat comparison triangle.
pub fn flatness_check<S: GeodesicSpace>(space: &S, tri: &[Event; 3], per_side: usize) -> Result<f64> {
    Ok(triangle_comparison_margins(space, tri, 0.0, per_side)?
        .into_iter()
        .fold(0.0, |m, v| m.max(v.abs())))
}

/// `ℓ(x, y)` in `space` minus the same quantity for the hinge in `L²(K_ref)`.
pub fn hinge_comparison_check(space: &ModelSpace, hinge: &Hinge, k_ref: f64) -> Result<f64> {
    let here = realize_hinge(hinge, space)?;
    let there = realize_hinge(hinge, &ModelSpace::new(k_ref)?)?;
    if !(here.opposite > 0.0) || !(there.opposite > 0.0) {
        return Err(Error::NotTimelike);
    }
    Ok(here.opposite - there.opposite)
}

/// Margins of the flat four-point test. `same_side_margin` is absent when
/// `ℓ(x2, x3) = 0`, since that construction glues along `[x2, x3]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourPointVerdict {
    /// `ℓ(x2, x3) - ℓ(x̂2, x̂3)` with the triangles over `[x1, x4]` on opposite sides.
    pub opposite_side_margin: f64,
    /// `ℓ(x̂1, x̂4) - ℓ(x1, x4)` with the triangles over `[x2, x3]` on the same side.
    pub same_side_margin: Option<f64>,
}

/// Tolerance of [`FourPointVerdict::passes`].
pub const FOUR_POINT_TOL: f64 = 1e-9;

impl FourPointVerdict {
    pub fn passes(&self) -> bool {
        let tol = FOUR_POINT_TOL;
        self.opposite_side_margin >= -tol && self.same_side_margin.is_none_or(|m| m >= -tol)
    }
}

fn flat_sep(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dt = b.0 - a.0;
    let q = dt * dt - (b.1 - a.1).powi(2);
    if dt >= 0.0 && q > 0.0 {
        q.sqrt()
    } else {
        0.0
    }
}

/// Apex `(t, u)` with `u >= 0` of the flat triangle over `(0,0)-(c,0)` with
/// `ℓ(0, apex) = a` and `ℓ(apex, (c,0)) = b`.
fn apex(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    if c < a + b - 1e-12 * c {
        return Err(Error::NotRealizable("sub-triangle violates the reverse triangle inequality".into()));
    }
    let t = (c * c + a * a - b * b) / (2.0 * c);
    Ok((t, (t * t - a * a).max(0.0).sqrt()))
}

/// The four-point test against `L²(0)` from the six separations of
/// `x1 << x2, x3 << x4`.
pub fn four_point_check(s: &Separations6) -> Result<FourPointVerdict> {
    s.validate()?;
    if !(s.l14 > 0.0) {
        return Err(Error::NotRealizable("need x1 << x4".into()));
    }
    let (t2, u2) = apex(s.l12, s.l24, s.l14)?;
    let (t3, u3) = apex(s.l13, s.l34, s.l14)?;
    let opposite = s.l23 - flat_sep((t2, u2), (t3, -u3)).max(flat_sep((t3, -u3), (t2, u2)));

    let same = if s.l23 > 0.0 {
        let d = s.l23;
        if s.l13 < s.l12 + d - 1e-12 * s.l13 || s.l24 < d + s.l34 - 1e-12 * s.l24 {
            return Err(Error::NotRealizable("sub-triangle violates the reverse triangle inequality".into()));
        }
        let alpha = (s.l13 * s.l13 - s.l12 * s.l12 - d * d) / (2.0 * d);
        let beta = (alpha * alpha - s.l12 * s.l12).max(0.0).sqrt();
        let gamma = (s.l24 * s.l24 - d * d - s.l34 * s.l34) / (2.0 * d);
        let delta = (gamma * gamma - s.l34 * s.l34).max(0.0).sqrt();
        Some(flat_sep((-alpha, beta), (d + gamma, delta)) - s.l14)
    } else {
        None
    };
    Ok(FourPointVerdict {
        opposite_side_margin: opposite,
        same_side_margin: same,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::MinkowskiSpace;
    use crate::model::{from_polar, PolarPoint};

    fn ev(c: &[f64]) -> Event {
        Event::minkowski(c.to_vec())
    }

    fn estimate(k: f64, max: f64) -> SectionalEstimate {
        let s = ModelSpace::new(k).unwrap();
        let p = s.base_point();
        let v = s.frame_vector(&p, 1.0, 0.1);
        let w = s.frame_vector(&p, 0.8, 0.5);
        estimate_sectional(&s, &p, &v, &w, &SectionalGrid::with_max(max)).unwrap()
    }

    #[test]
    fn estimator_recovers_curvature() {
        assert!(estimate(0.0, 0.1).k_hat.abs() < 1e-6);
        assert!((estimate(-1.0, 0.1).k_hat + 1.0).abs() < 0.05);
        assert!((estimate(1.0, 0.1).k_hat - 1.0).abs() < 0.05);
        let e = estimate(-1.0, 0.1);
        assert!(e.denom < 0.0);
        assert!((e.c_hat - 2.0 * e.k_hat * e.denom).abs() < 1e-12);
    }

    #[test]
    fn estimator_error_shrinks_with_grid() {
        for k in [-1.0, 1.0, -2.5] {
            let e1 = (estimate(k, 0.2).k_hat - k).abs();
            let e2 = (estimate(k, 0.1).k_hat - k).abs();
            assert!(e2 <= 2.0 * e1);
            assert!(e2 < e1);
        }
    }

    #[test]
    fn estimator_flat_minkowski_higher_dim() {
        let m = MinkowskiSpace::new(3).unwrap();
        let est = estimate_sectional(
            &m,
            &m.origin(),
            &[1.0, 0.1, 0.2, 0.0],
            &[0.9, -0.3, 0.1, 0.2],
            &SectionalGrid::default(),
        )
        .unwrap();
        assert!(est.k_hat.abs() < 1e-6);
    }

    #[test]
    fn estimator_rejects_bad_input() {
        let m = MinkowskiSpace::new(1).unwrap();
        let g = SectionalGrid::default();
        assert!(estimate_sectional(&m, &m.origin(), &[1.0, 0.0], &[2.0, 0.0], &g).is_err());
        assert!(estimate_sectional(&m, &m.origin(), &[1.0, 0.0], &[0.0, 1.0], &g).is_err());
        let bad = SectionalGrid { points: 1, ..g };
        assert!(estimate_sectional(&m, &m.origin(), &[1.0, 0.0], &[1.0, 0.5], &bad).is_err());
    }

    fn model_triangle(k: f64) -> [Event; 3] {
        let s = ModelSpace::new(k).unwrap();
        let o = s.base_point();
        let (et, _) = s.timelike_frame(&o);
        let p = s.exp(&o, &et.iter().map(|c| -0.6 * c).collect::<Vec<_>>()).unwrap();
        let x = from_polar(&s, &p, PolarPoint::new(0.6, 0.5)).unwrap();
        let y = from_polar(&s, &p, PolarPoint::new(1.4, 0.1)).unwrap();
        [p, x, y]
    }

    #[test]
    fn triangle_comparison_signs() {
        let m = MinkowskiSpace::new(1).unwrap();
        let flat = [ev(&[0.0, 0.0]), ev(&[1.0, 0.4]), ev(&[2.5, -0.2])];
        assert!(triangle_comparison_min_margin(&m, &flat, 0.0, 8).unwrap().abs() < 1e-10);
        assert!(flatness_check(&m, &flat, 8).unwrap() < 1e-10);

        let ds = ModelSpace::new(-1.0).unwrap();
        let tri = model_triangle(-1.0);
        let margins = triangle_comparison_margins(&ds, &tri, 0.0, 8).unwrap();
        assert!(margins.iter().all(|&m| m >= -1e-12));
        assert!(margins.iter().any(|&m| m > 1e-4));
        assert!(flatness_check(&ds, &tri, 8).unwrap() > 1e-4);

        let ads = ModelSpace::new(1.0).unwrap();
        let tri = model_triangle(1.0);
        assert!(triangle_comparison_min_margin(&ads, &tri, 0.0, 8).unwrap() < 0.0);

        // self comparison of curved triangles
        assert!(triangle_comparison_min_margin(&ads, &tri, 1.0, 8).unwrap().abs() < 1e-10);
    }

    #[test]
    fn degenerate_triangle_is_flat() {
        let m = MinkowskiSpace::new(1).unwrap();
        let tri = [ev(&[0.0, 0.0]), ev(&[1.0, 0.0]), ev(&[3.0, 0.0])];
        assert!(flatness_check(&m, &tri, 6).unwrap() < 1e-12);
        let bad = [ev(&[0.0, 0.0]), ev(&[3.0, 0.0]), ev(&[1.0, 0.0])];
        assert!(flatness_check(&m, &bad, 6).is_err());
    }

    #[test]
    fn hinge_margins() {
        let h = Hinge::new(0.5, 2.0, 0.5);
        let ds = ModelSpace::new(-1.0).unwrap();
        let m = hinge_comparison_check(&ds, &h, 0.0).unwrap();
        assert!((m - (1.378_905_736_715_869 - 1.412_355_503_967_481_6)).abs() < 1e-12);
        let ads = ModelSpace::new(1.0).unwrap();
        let m = hinge_comparison_check(&ads, &h, 0.0).unwrap();
        assert!((m - (1.444_082_991_253_230_7 - 1.412_355_503_967_481_6)).abs() < 1e-12);
        let flat = ModelSpace::new(0.0).unwrap();
        assert!(hinge_comparison_check(&flat, &Hinge::new(0.5, 2.0, 0.0), 1.0).unwrap().abs() < 1e-12);
    }

    fn seps(m: &MinkowskiSpace, q: &[Event; 4]) -> Separations6 {
        m.separations(q)
    }

    #[test]
    fn flat_four_point_examples() {
        let m = MinkowskiSpace::new(1).unwrap();
        let q = [ev(&[0.0, 0.0]), ev(&[1.0, 0.5]), ev(&[3.0, -0.5]), ev(&[4.0, 0.0])];
        let s = seps(&m, &q);
        assert!((s.l23 - 3f64.sqrt()).abs() < 1e-15);
        let v = four_point_check(&s).unwrap();
        assert!(v.opposite_side_margin.abs() < 1e-9);

        let q = [ev(&[0.0, 0.0]), ev(&[1.0, 0.3]), ev(&[2.5, 0.6]), ev(&[4.0, 0.2])];
        let v = four_point_check(&seps(&m, &q)).unwrap();
        assert!(v.same_side_margin.unwrap().abs() < 1e-9);
        assert!(v.passes());
    }

    #[test]
    fn four_point_rejects_unrealizable() {
        let bad = Separations6::new(1.0, 1.0, 1.5, 1.0, 1.0, 1.0);
        assert!(four_point_check(&bad).is_err());
    }
}
