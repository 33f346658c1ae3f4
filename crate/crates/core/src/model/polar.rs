//! Geodesic polar coordinates `(r, θ)` about a point, in which the model
//! metric reads `g_K = dr² - f(r, K)² dθ²`, and an integrator for its
//! timelike geodesics that is independent of the quadric closed forms.

use serde::{Deserialize, Serialize};

use super::ModelSpace;
use crate::error::{domain, Error, Result};
use crate::space::{Event, GeodesicSpace, LorentzianSpace};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

impl PolarPoint {
    pub fn new(r: f64, theta: f64) -> Self {
        PolarPoint { r, theta }
    }
}

#[inline]
fn f_unchecked(r: f64, k: f64) -> f64 {
    if k < 0.0 {
        let s = (-k).sqrt();
        (s * r).sinh() / s
    } else if k > 0.0 {
        let s = k.sqrt();
        (s * r).sin() / s
    } else {
        r
    }
}

fn d_k(k: f64) -> f64 {
    if k > 0.0 {
        std::f64::consts::PI / k.sqrt()
    } else {
        f64::INFINITY
    }
}

/// Warping function of the polar metric: `sinh(√-K r)/√-K`, `r`, or
/// `sin(√K r)/√K` according to the sign of `K`. Strictly decreasing in `K`.
pub fn f_model(r: f64, k: f64) -> Result<f64> {
    if !k.is_finite() {
        return Err(domain("curvature must be finite"));
    }
    if !(r > 0.0) || r >= d_k(k) {
        return Err(domain("radius must lie in (0, D_K)"));
    }
    Ok(f_unchecked(r, k))
}

/// Polar coordinates of `q ∈ I⁺(p)` with respect to the frame at `p`.
pub fn to_polar(space: &ModelSpace, p: &Event, q: &Event) -> Result<PolarPoint> {
    if !space.chronological(p, q) {
        return Err(Error::NotTimelike);
    }
    let v = space.log(p, q)?;
    let (et, ex) = space.timelike_frame(p);
    let t = space.form(&v, &et);
    let x = -space.form(&v, &ex);
    Ok(PolarPoint {
        r: space.time_separation(p, q),
        theta: (x / t).atanh(),
    })
}

pub fn from_polar(space: &ModelSpace, p: &Event, pt: PolarPoint) -> Result<Event> {
    if !(pt.r >= 0.0) || !pt.theta.is_finite() {
        return Err(domain("polar radius must be non-negative"));
    }
    let v = space.frame_vector(p, pt.r * pt.theta.cosh(), pt.r * pt.theta.sinh());
    space.exp(p, &v)
}

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let (k, err) = gk15(f, a, b);
    if err <= tol || (b - a).abs() <= 1e-15 * a.abs().max(b.abs()) {
        return Ok(k);
    }
    if depth == 0 {
        return Err(Error::Oracle("quadrature did not converge".into()));
    }
    let m = 0.5 * (a + b);
    Ok(adaptive(f, a, m, 0.5 * tol, depth - 1)? + adaptive(f, m, b, 0.5 * tol, depth - 1)?)
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    let (rough, _) = gk15(&f, a, b);
    let tol = 1e-14 * rough.abs().max(1e-300);
    adaptive(&f, a, b, tol, 40)
}

/// Separation between two events of `L²(K)` given in polar coordinates about
/// a common vertex, by shooting on the conserved momentum `L = f² θ'` of the
/// timelike geodesic joining them.
///
/// Along such a geodesic `r` is monotone, `dθ/dr = L / (f √(f² + L²))` and
/// `dτ/dr = f / √(f² + L²)`. The endpoints are taken in time order, so the
/// result is symmetric in its arguments. Errors with [`Error::NotTimelike`]
/// when the points are not timelike related and [`Error::Oracle`] when the
/// solve fails.
pub fn polar_geodesic_oracle(k: f64, a: PolarPoint, b: PolarPoint) -> Result<f64> {
    let dk = d_k(k);
    for pt in [a, b] {
        if !(pt.r > 0.0) || pt.r >= dk || !pt.theta.is_finite() {
            return Err(domain("polar radius must lie in (0, D_K)"));
        }
    }
    let (lo, hi) = if a.r <= b.r { (a, b) } else { (b, a) };
    let target = hi.theta - lo.theta;
    if lo.r == hi.r {
        return if target == 0.0 { Ok(0.0) } else { Err(Error::NotTimelike) };
    }
    let f = |r: f64| f_unchecked(r, k);
    let null_limit = integrate(|r| 1.0 / f(r), lo.r, hi.r)?;
    if target.abs() >= null_limit {
        return Err(Error::NotTimelike);
    }
    let sweep = |l: f64| integrate(|r| l / (f(r) * (f(r) * f(r) + l * l).sqrt()), lo.r, hi.r);

    // bisection on ψ with L = s tan ψ, then Newton steps on L
    let s = f(hi.r);
    let (mut a_psi, mut b_psi) = (-std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
    for _ in 0..200 {
        let mid = 0.5 * (a_psi + b_psi);
        if mid == a_psi || mid == b_psi {
            break;
        }
        if sweep(s * mid.tan())? < target {
            a_psi = mid;
        } else {
            b_psi = mid;
        }
    }
    let mut l = s * (0.5 * (a_psi + b_psi)).tan();
    for _ in 0..3 {
        let resid = sweep(l)? - target;
        let slope = integrate(|r| f(r) / (f(r) * f(r) + l * l).powf(1.5), lo.r, hi.r)?;
        if !(slope > 0.0) {
            break;
        }
        let step = resid / slope;
        if !step.is_finite() {
            break;
        }
        l -= step;
    }
    let check = sweep(l)? - target;
    if !(check.abs() <= 1e-10 * (1.0 + target.abs())) {
        return Err(Error::Oracle(format!("shooting residual {check:e}")));
    }
    integrate(|r| f(r) / (f(r) * f(r) + l * l).sqrt(), lo.r, hi.r)
}

/// The radial comparison map `L²(K) → L²(K′)`: the identity in polar
/// coordinates. Errors unless `0 <= r < min(D_K, D_K′)`.
pub fn radial_map_phi(pt: PolarPoint, k: f64, k_prime: f64) -> Result<PolarPoint> {
    if !(pt.r >= 0.0) || pt.r >= d_k(k).min(d_k(k_prime)) {
        return Err(domain("radius outside the common polar chart"));
    }
    Ok(pt)
}

/// `(g_K(v, v), g_K′(dφ v, dφ v))` for `v = (v_r, v_θ)` at radius `r`.
pub fn pullback_norms(r: f64, v: (f64, f64), k: f64, k_prime: f64) -> Result<(f64, f64)> {
    radial_map_phi(PolarPoint::new(r, 0.0), k, k_prime)?;
    let fk = f_model(r, k)?;
    let fk2 = f_model(r, k_prime)?;
    Ok((v.0 * v.0 - fk * fk * v.1 * v.1, v.0 * v.0 - fk2 * fk2 * v.1 * v.1))
}

/// For `K < K′`: `g_K(v, v) <= g_K′(dφ v, dφ v)`, with equality iff `v_θ = 0`.
///
/// This is the orientation under which `φ` maps timelike curves to timelike
/// curves that are at least as long, so that separations grow with `K`.
pub fn radial_pullback_holds(r: f64, v: (f64, f64), k: f64, k_prime: f64) -> Result<bool> {
    if !(k < k_prime) {
        return Err(domain("expects K < K′"));
    }
    let (g, g2) = pullback_norms(r, v, k, k_prime)?;
    Ok(g <= g2 + 1e-15 * g.abs().max(g2.abs()))
}
