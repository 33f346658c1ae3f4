//! Classification of the equality configurations of the Ptolemy inequality
//! in flat space: coincident points, null-aligned triples, timelike lines and
//! (translated, possibly degenerate) rectangular hyperbolas in a timelike
//! 2-plane.

use serde::{Deserialize, Serialize};

use super::{cayley_menger_volume2, difference, minkowski_inner, MinkowskiSpace};
use crate::error::{Error, Result};
use crate::space::{check_causal_chain, Chart, Event, LorentzianSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualityCase {
    Coincident,
    NullAligned,
    TimelikeLine,
    RectangularHyperbola,
    Generic,
}

/// Relative tolerance of the coplanarity and hyperbola-fit stages.
pub const EQUALITY_REL_TOL: f64 = 1e-7;
const NULL_TOL: f64 = 1e-10;
const LINE_TOL: f64 = 1e-9;

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Classify a causal quadruple `x <= y <= z <= w` of `R^{1,n}`.
pub fn classify_equality_case(q: &[Event; 4]) -> Result<EqualityCase> {
    let dim = q[0].dim();
    for e in q {
        if e.chart != Chart::Minkowski {
            return Err(Error::ChartMismatch("classifier needs Minkowski events".into()));
        }
        if e.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: e.dim(),
            });
        }
    }
    let space = MinkowskiSpace::new(dim.saturating_sub(1))?;
    check_causal_chain(&space, q)?;

    let size = (0..4)
        .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
        .map(|(i, j)| euclid(&difference(&q[j].coords, &q[i].coords)))
        .fold(0.0, f64::max);
    if size == 0.0 {
        return Ok(EqualityCase::Coincident);
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if euclid(&difference(&q[j].coords, &q[i].coords)) <= 1e-12 * size {
                return Ok(EqualityCase::Coincident);
            }
        }
    }

    for start in 0..2 {
        let d1 = difference(&q[start + 1].coords, &q[start].coords);
        let d2 = difference(&q[start + 2].coords, &q[start + 1].coords);
        if is_null(&d1) && is_null(&d2) && parallel(&d1, &d2) {
            return Ok(EqualityCase::NullAligned);
        }
    }

    let axis = difference(&q[3].coords, &q[0].coords);
    let legs: Vec<Vec<f64>> = (1..4).map(|i| difference(&q[i].coords, &q[0].coords)).collect();
    let axis_len2: f64 = axis.iter().map(|c| c * c).sum();
    let off_line = legs
        .iter()
        .map(|d| {
            let s = d.iter().zip(&axis).map(|(a, b)| a * b).sum::<f64>() / axis_len2;
            euclid(&d.iter().zip(&axis).map(|(a, b)| a - s * b).collect::<Vec<_>>())
        })
        .fold(0.0, f64::max);
    if off_line <= LINE_TOL * size && minkowski_inner(&axis, &axis) > 0.0 {
        return Ok(EqualityCase::TimelikeLine);
    }

    let seps = space.separations(q);
    let scale = seps.scale();
    let tol = EQUALITY_REL_TOL * scale;
    if !(seps.slack().abs() <= tol) {
        return Ok(EqualityCase::Generic);
    }

    let sq = |i: usize, j: usize| {
        let d = difference(&q[j].coords, &q[i].coords);
        minkowski_inner(&d, &d)
    };
    let vol2 = cayley_menger_volume2([sq(0, 1), sq(0, 2), sq(0, 3), sq(1, 2), sq(1, 3), sq(2, 3)]);
    if vol2.abs() > EQUALITY_REL_TOL * scale.powi(3) {
        return Ok(EqualityCase::Generic);
    }

    match plane_coordinates(&axis, &legs, size) {
        Some(pts) if fits_rectangular_hyperbola(&pts, scale) => Ok(EqualityCase::RectangularHyperbola),
        _ => Ok(EqualityCase::Generic),
    }
}

fn is_null(d: &[f64]) -> bool {
    let e2: f64 = d.iter().map(|c| c * c).sum();
    minkowski_inner(d, d).abs() <= NULL_TOL * e2 && d[0] > 0.0
}

fn parallel(a: &[f64], b: &[f64]) -> bool {
    let scale = euclid(a) * euclid(b);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if (a[i] * b[j] - a[j] * b[i]).abs() > NULL_TOL * scale {
                return false;
            }
        }
    }
    true
}

/// In-plane `(t, x)` coordinates of the origin and the three legs, with the
/// plane spanned by the timelike `axis` and the most spacelike leg residual.
/// `None` when the legs leave the plane.
fn plane_coordinates(axis: &[f64], legs: &[Vec<f64>], size: f64) -> Option<Vec<(f64, f64)>> {
    let a2 = minkowski_inner(axis, axis);
    if !(a2 > 0.0) {
        return None;
    }
    let et: Vec<f64> = axis.iter().map(|c| c / a2.sqrt()).collect();
    let residual = |d: &[f64]| -> Vec<f64> {
        let s = minkowski_inner(d, &et);
        d.iter().zip(&et).map(|(a, b)| a - s * b).collect()
    };
    let best = legs
        .iter()
        .map(|d| residual(d))
        .max_by(|u, v| (-minkowski_inner(u, u)).total_cmp(&(-minkowski_inner(v, v))))?;
    let b2 = -minkowski_inner(&best, &best);
    if !(b2 > 0.0) {
        return None;
    }
    let ex: Vec<f64> = best.iter().map(|c| c / b2.sqrt()).collect();
    let mut pts = vec![(0.0, 0.0)];
    for d in legs {
        let t = minkowski_inner(d, &et);
        let x = -minkowski_inner(d, &ex);
        let off: Vec<f64> = d
            .iter()
            .zip(et.iter().zip(&ex))
            .map(|(c, (a, b))| c - t * a - x * b)
            .collect();
        if euclid(&off) > EQUALITY_REL_TOL * size {
            return None;
        }
        pts.push((t, x));
    }
    Some(pts)
}

/// Least-squares fit of `(t-ct)² - (x-cx)² = -a` through four plane points.
/// Accepts when the residual is within tolerance and `a` is not negative
/// beyond tolerance (`a ≈ 0` is the degenerate light-cone member).
fn fits_rectangular_hyperbola(pts: &[(f64, f64)], scale: f64) -> bool {
    let n = pts.len() as f64;
    let (mt, mx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), (t, x)| (a + t / n, b + x / n));
    let l = pts
        .iter()
        .map(|(t, x)| ((t - mt).powi(2) + (x - mx).powi(2)).sqrt())
        .fold(0.0, f64::max);
    if l == 0.0 {
        return false;
    }
    // unknowns: ct, cx, m with  -2 ct t + 2 cx x + m = x² - t²  (normalised coords)
    let rows: Vec<([f64; 3], f64)> = pts
        .iter()
        .map(|(t, x)| {
            let (t, x) = ((t - mt) / l, (x - mx) / l);
            ([-2.0 * t, 2.0 * x, 1.0], x * x - t * t)
        })
        .collect();
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (r, b) in &rows {
        for i in 0..3 {
            atb[i] += r[i] * b;
            for j in 0..3 {
                ata[i][j] += r[i] * r[j];
            }
        }
    }
    let Some(sol) = solve3(ata, atb) else {
        return false;
    };
    let residual = rows
        .iter()
        .map(|(r, b)| (r[0] * sol[0] + r[1] * sol[1] + r[2] * sol[2] - b).abs())
        .fold(0.0, f64::max);
    let a = sol[2] - sol[0] * sol[0] + sol[1] * sol[1];
    let tol = EQUALITY_REL_TOL * scale / (l * l);
    residual <= tol && a >= -tol
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let p = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[p][col].abs() < 1e-14 {
            return None;
        }
        m.swap(p, col);
        b.swap(p, col);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for k in col..3 {
                m[r][k] -= f * m[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| m[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / m[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{hyperbola_points, HyperbolaSpec};

    fn ev(c: &[f64]) -> Event {
        Event::minkowski(c.to_vec())
    }

    fn quad(p: Vec<Event>) -> [Event; 4] {
        p.try_into().unwrap()
    }

    #[test]
    fn timelike_line() {
        let q = quad(vec![ev(&[0., 0.]), ev(&[1., 0.]), ev(&[2., 0.]), ev(&[3., 0.])]);
        assert_eq!(classify_equality_case(&q).unwrap(), EqualityCase::TimelikeLine);
    }

    #[test]
    fn hyperbola_quadruple() {
        let h = HyperbolaSpec::standard(1.0, ev(&[0.0, 0.0]));
        let q = quad(hyperbola_points(&h, &[0.0, 1.0, 2.0, 3.0]).unwrap());
        assert_eq!(classify_equality_case(&q).unwrap(), EqualityCase::RectangularHyperbola);
    }

    #[test]
    fn translated_hyperbola_in_higher_dimension() {
        let mut h = HyperbolaSpec::standard(2.5, ev(&[0.3, -1.0, 2.0, 0.5]));
        h.basis = [vec![1.5, 0.3, 0.2, 0.1], vec![0.1, 0.2, 1.0, -0.4]];
        let q = quad(hyperbola_points(&h, &[-0.7, -0.1, 0.4, 1.3]).unwrap());
        assert_eq!(classify_equality_case(&q).unwrap(), EqualityCase::RectangularHyperbola);
    }

    #[test]
    fn generic_quadruple() {
        let q = quad(vec![ev(&[0., 0.]), ev(&[1., 0.]), ev(&[2., 0.5]), ev(&[3., 0.5])]);
        assert_eq!(classify_equality_case(&q).unwrap(), EqualityCase::Generic);
    }

    #[test]
    fn coincident_and_null_cases() {
        let q = quad(vec![ev(&[0., 0.]), ev(&[0., 0.]), ev(&[2., 0.5]), ev(&[3., 0.5])]);
        assert_eq!(classify_equality_case(&q).unwrap(), EqualityCase::Coincident);
        let q = quad(vec![ev(&[0., 0.]), ev(&[1., 1.]), ev(&[2., 2.]), ev(&[4., 2.5])]);
        assert_eq!(classify_equality_case(&q).unwrap(), EqualityCase::NullAligned);
        let q = quad(vec![ev(&[0., 0.]), ev(&[1., 0.3]), ev(&[2., 1.3]), ev(&[3., 2.3])]);
        assert_eq!(classify_equality_case(&q).unwrap(), EqualityCase::NullAligned);
    }

    #[test]
    fn non_coplanar_is_generic_even_if_slack_small() {
        let q = quad(vec![ev(&[0., 0., 0.]), ev(&[1., 0., 0.]), ev(&[2., 0.5, 0.]), ev(&[3., 0.5, 0.5])]);
        assert_eq!(classify_equality_case(&q).unwrap(), EqualityCase::Generic);
    }

    #[test]
    fn rejects_non_causal_input() {
        let q = quad(vec![ev(&[0., 0.]), ev(&[0., 1.]), ev(&[2., 0.]), ev(&[3., 0.])]);
        assert!(matches!(classify_equality_case(&q), Err(Error::Order(_))));
    }
}
