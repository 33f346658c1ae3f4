use super::minkowski_inner;
use crate::error::{domain, Error, Result};
use crate::space::{Chart, Event};

/// A timelike rectangular hyperbola `t² - x² = -a` drawn in a timelike
/// 2-plane of `R^{1,n}` and translated to `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolaSpec {
    pub a: f64,
    pub center: Event,
    /// `+1` or `-1`; flips the spatial term.
    pub branch: i8,
    /// Future timelike and spacelike vectors spanning the plane.
    pub basis: [Vec<f64>; 2],
}

impl HyperbolaSpec {
    /// Hyperbola in the `(t, x1)` plane.
    pub fn standard(a: f64, center: Event) -> Self {
        let d = center.dim();
        let mut et = vec![0.0; d];
        let mut ex = vec![0.0; d];
        et[0] = 1.0;
        ex[1] = 1.0;
        HyperbolaSpec {
            a,
            center,
            branch: 1,
            basis: [et, ex],
        }
    }

    /// Orthonormalised `(e_t, e_x)` of the plane.
    pub fn orthonormal_basis(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let [u, v] = &self.basis;
        let d = self.center.dim();
        if u.len() != d || v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: if u.len() != d { u.len() } else { v.len() },
            });
        }
        let uu = minkowski_inner(u, u);
        if !(uu > 0.0) || u[0] <= 0.0 {
            return Err(domain("first basis vector must be future timelike"));
        }
        let et: Vec<f64> = u.iter().map(|c| c / uu.sqrt()).collect();
        let proj = minkowski_inner(v, &et);
        let w: Vec<f64> = v.iter().zip(&et).map(|(a, b)| a - proj * b).collect();
        let ww = minkowski_inner(&w, &w);
        let size: f64 = v.iter().map(|c| c * c).sum::<f64>();
        if !(ww < -1e-24 * size.max(1e-300)) {
            return Err(domain("basis does not span a timelike 2-plane"));
        }
        let ex: Vec<f64> = w.iter().map(|c| c / (-ww).sqrt()).collect();
        Ok((et, ex))
    }
}

/// Points `center + √a sinh(u) e_t + branch √a cosh(u) e_x` for each parameter.
///
/// Consecutive points with `u1 < u2` are chronologically related with
/// `ℓ = 2√a sinh((u2 - u1)/2)`.
pub fn hyperbola_points(h: &HyperbolaSpec, params: &[f64]) -> Result<Vec<Event>> {
    if !(h.a > 0.0) || !h.a.is_finite() {
        return Err(domain("hyperbola scale must be positive"));
    }
    if h.center.chart != Chart::Minkowski {
        return Err(Error::ChartMismatch("hyperbola center must be a Minkowski event".into()));
    }
    if h.branch != 1 && h.branch != -1 {
        return Err(domain("branch must be +1 or -1"));
    }
    let (et, ex) = h.orthonormal_basis()?;
    let root = h.a.sqrt();
    let sign = h.branch as f64;
    Ok(params
        .iter()
        .map(|&u| {
            let (s, c) = (root * u.sinh(), sign * root * u.cosh());
            Event::minkowski(
                h.center
                    .coords
                    .iter()
                    .zip(et.iter().zip(&ex))
                    .map(|(o, (t, x))| o + s * t + c * x)
                    .collect::<Vec<_>>(),
            )
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::MinkowskiSpace;
    use crate::space::{ptolemy_slack, LorentzianSpace};

    #[test]
    fn unit_branch_at_zero() {
        let h = HyperbolaSpec::standard(1.0, Event::minkowski(vec![0.0, 0.0]));
        let p = hyperbola_points(&h, &[0.0]).unwrap();
        assert_eq!(p[0].coords, vec![0.0, 1.0]);
    }

    #[test]
    fn separation_along_branch() {
        let m = MinkowskiSpace::new(1).unwrap();
        let h = HyperbolaSpec::standard(1.0, Event::minkowski(vec![0.0, 0.0]));
        let p = hyperbola_points(&h, &[0.0, 2.0]).unwrap();
        let l = m.time_separation(&p[0], &p[1]);
        assert!((l - 2.0 * 1f64.sinh()).abs() < 1e-12);
        assert!((l - 2.350_402_387_287_603).abs() < 1e-12);
    }

    #[test]
    fn four_branch_points_are_ptolemy_equal() {
        let m = MinkowskiSpace::new(1).unwrap();
        let h = HyperbolaSpec::standard(1.0, Event::minkowski(vec![0.0, 0.0]));
        let p = hyperbola_points(&h, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let q = [p[0].clone(), p[1].clone(), p[2].clone(), p[3].clone()];
        assert!(ptolemy_slack(&m.separations(&q)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_specs() {
        let c = Event::minkowski(vec![0.0, 0.0]);
        assert!(hyperbola_points(&HyperbolaSpec::standard(0.0, c.clone()), &[0.0]).is_err());
        assert!(hyperbola_points(&HyperbolaSpec::standard(-1.0, c.clone()), &[0.0]).is_err());
        let mut h = HyperbolaSpec::standard(1.0, c);
        h.basis = [vec![1.0, 0.0], vec![1.0, 0.0]];
        assert!(hyperbola_points(&h, &[0.0]).is_err());
        h.basis = [vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(hyperbola_points(&h, &[0.0]).is_err());
    }
}
