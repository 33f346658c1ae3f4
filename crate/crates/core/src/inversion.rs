//! Hyperbolic inversion and the inversion time separation.
//!
//! `H_{x,r}` moves a point `p ∈ I⁺(x)` along the geodesic from `x` to the
//! point `q` with `ℓ(x,p) ℓ(x,q) = r²`. The inverted space over `I⁺(p)` has the
//! reversed causal order and separation `i_p(x,y) = ℓ(y,x) / (ℓ(p,x) ℓ(p,y))`;
//! its reverse triangle inequality is the Ptolemy inequality of the base.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sampling::{substream_rng, DiamondSampler};
use crate::space::{Event, GeodesicSpace, LorentzianSpace, Relation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionSpec {
    pub center: Event,
    pub radius: f64,
}

impl InversionSpec {
    pub fn new(center: Event, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(domain("inversion radius must be positive"));
        }
        Ok(InversionSpec { center, radius })
    }
}

/// `H_{x,r}(p)`. In flat space `x + (r² / ‖p-x‖²)(p - x)`.
pub fn invert_point<S: GeodesicSpace>(space: &S, spec: &InversionSpec, p: &Event) -> Result<Event> {
    if !(spec.radius > 0.0) {
        return Err(domain("inversion radius must be positive"));
    }
    if !space.chronological(&spec.center, p) {
        return Err(domain("inverted point must lie in the timelike future of the center"));
    }
    let l = space.time_separation(&spec.center, p);
    let v = space.log(&spec.center, p)?;
    let s = spec.radius * spec.radius / (l * l);
    space.exp(&spec.center, &v.iter().map(|c| c * s).collect::<Vec<_>>())
}

/// `i_p(x, y) = ℓ(y, x) / (ℓ(p, x) ℓ(p, y))`; zero unless `y <= x`.
pub fn inversion_time_sep<S: LorentzianSpace>(space: &S, p: &S::Point, x: &S::Point, y: &S::Point) -> Result<f64> {
    let lx = space.time_separation(p, x);
    let ly = space.time_separation(p, y);
    if !(space.chronological(p, x) && lx > 0.0) || !(space.chronological(p, y) && ly > 0.0) {
        return Err(domain("inversion time separation needs both points in I⁺(p)"));
    }
    Ok(space.time_separation(y, x) / (lx * ly))
}

/// `(I⁺(p), i_p)` with the reversed causal order.
#[derive(Debug, Clone)]
pub struct InvertedSpace<'a, S: LorentzianSpace> {
    base: &'a S,
    p: S::Point,
}

pub fn inverted_space<S: LorentzianSpace>(base: &S, p: S::Point) -> InvertedSpace<'_, S> {
    InvertedSpace { base, p }
}

impl<'a, S: LorentzianSpace> InvertedSpace<'a, S> {
    pub fn base(&self) -> &S {
        self.base
    }

    pub fn base_point(&self) -> &S::Point {
        &self.p
    }

    /// Membership in `I⁺(p)`.
    pub fn contains(&self, x: &S::Point) -> bool {
        self.base.chronological(&self.p, x)
    }
}

impl<'a, S: LorentzianSpace> LorentzianSpace for InvertedSpace<'a, S> {
    type Point = S::Point;

    fn relation(&self, x: &S::Point, y: &S::Point) -> Relation {
        self.base.relation(x, y).reversed()
    }

    /// Zero outside `I⁺(p)`.
    fn time_separation(&self, x: &S::Point, y: &S::Point) -> f64 {
        inversion_time_sep(self.base, &self.p, x, y).unwrap_or(0.0)
    }
}

/// Violation counts for the two set identities of the inversion with
/// `r = ℓ(x, z)`: `H(I(x,z)) ⊆ I⁺(z)` and `H(I⁺(z)) ⊆ I(x,z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetIdentityReport {
    pub forward_samples: usize,
    pub forward_violations: usize,
    pub backward_samples: usize,
    pub backward_violations: usize,
}

impl SetIdentityReport {
    pub fn violations(&self) -> usize {
        self.forward_violations + self.backward_violations
    }
}

/// How far beyond `z` (as a multiple of `ℓ(x, z)` along the geodesic from `x`)
/// the sampled part of `I⁺(z)` reaches.
pub const SET_IDENTITY_REACH: f64 = 4.0;

/// Samples `p ∈ I(x, z)` and `q ∈ I(z, b) ⊆ I⁺(z)`, with `b` on the extension
/// of the geodesic from `x` through `z` at parameter [`SET_IDENTITY_REACH`], and
/// counts images that land outside the expected set.
pub fn set_identity_check<S>(space: &S, x: &Event, z: &Event, samples: usize, seed: u64) -> Result<SetIdentityReport>
where
    S: GeodesicSpace + DiamondSampler,
{
    if !space.chronological(x, z) {
        return Err(Error::Sampling("I(x, z) is empty".into()));
    }
    let spec = InversionSpec::new(x.clone(), space.time_separation(x, z))?;
    let mut rng = substream_rng(seed, 0);
    let mut forward_violations = 0;
    for _ in 0..samples {
        let p = space.sample_in_diamond(x, z, &mut rng)?;
        let ok = invert_point(space, &spec, &p).is_ok_and(|h| space.chronological(z, &h));
        forward_violations += usize::from(!ok);
    }
    let far = space.geodesic_point(x, z, SET_IDENTITY_REACH)?;
    let mut rng = substream_rng(seed, 1);
    let mut backward_violations = 0;
    for _ in 0..samples {
        let q = space.sample_in_diamond(z, &far, &mut rng)?;
        let ok = invert_point(space, &spec, &q)
            .is_ok_and(|h| space.chronological(x, &h) && space.chronological(&h, z));
        backward_violations += usize::from(!ok);
    }
    Ok(SetIdentityReport {
        forward_samples: samples,
        forward_violations,
        backward_samples: samples,
        backward_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::MinkowskiSpace;
    use crate::space::reverse_triangle_deficit;

    fn ev(c: &[f64]) -> Event {
        Event::minkowski(c.to_vec())
    }

    #[test]
    fn flat_examples() {
        let m = MinkowskiSpace::new(1).unwrap();
        let spec = InversionSpec::new(ev(&[0.0, 0.0]), 1.0).unwrap();
        assert_eq!(invert_point(&m, &spec, &ev(&[2.0, 0.0])).unwrap().coords, vec![0.5, 0.0]);
        let h = invert_point(&m, &spec, &ev(&[0.8, 0.1])).unwrap();
        assert!((h.coords[0] - 0.8 / 0.63).abs() < 1e-15);
        assert!((h.coords[1] - 0.1 / 0.63).abs() < 1e-15);
        assert!((h.coords[0] - 1.269_841).abs() < 1e-6 && (h.coords[1] - 0.158_730).abs() < 1e-6);
        assert!(m.chronological(&ev(&[1.0, 0.0]), &h));
        let z = ev(&[1.0, 0.0]);
        assert_eq!(invert_point(&m, &spec, &z).unwrap(), z);
        assert!(invert_point(&m, &spec, &ev(&[0.5, 1.0])).is_err());
        assert!(InversionSpec::new(ev(&[0.0, 0.0]), 0.0).is_err());
    }

    #[test]
    fn time_separation_examples() {
        let m = MinkowskiSpace::new(1).unwrap();
        let p = ev(&[0.0, 0.0]);
        let x = ev(&[1.0, 0.0]);
        let y = ev(&[3.0, 0.0]);
        assert_eq!(inversion_time_sep(&m, &p, &x, &x).unwrap(), 0.0);
        assert!((inversion_time_sep(&m, &p, &y, &x).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(inversion_time_sep(&m, &p, &x, &y).unwrap(), 0.0);
        let spec = InversionSpec::new(p.clone(), 1.0).unwrap();
        let hx = invert_point(&m, &spec, &x).unwrap();
        let hy = invert_point(&m, &spec, &y).unwrap();
        assert!((m.time_separation(&hy, &hx) - 2.0 / 3.0).abs() < 1e-15);
        assert!(inversion_time_sep(&m, &p, &ev(&[-1.0, 0.0]), &x).is_err());
    }

    #[test]
    fn inverted_space_reverses_order() {
        let m = MinkowskiSpace::new(1).unwrap();
        let inv = inverted_space(&m, ev(&[0.0, 0.0]));
        let x = ev(&[1.0, 0.0]);
        let y = ev(&[3.0, 0.5]);
        assert!(inv.causal_le(&y, &x) && !inv.causal_le(&x, &y));
        assert!(inv.contains(&x) && !inv.contains(&ev(&[1.0, 2.0])));
        // collinear through p
        let d = reverse_triangle_deficit(&inv, &ev(&[3.0, 0.0]), &ev(&[2.0, 0.0]), &ev(&[1.0, 0.0])).unwrap();
        assert!(d.abs() < 1e-15);
    }

    #[test]
    fn flat_set_identities() {
        let m = MinkowskiSpace::new(2).unwrap();
        let r = set_identity_check(&m, &m.origin(), &ev(&[1.0, 0.2, -0.1]), 2000, 9).unwrap();
        assert_eq!(r.violations(), 0);
        assert!(set_identity_check(&m, &m.origin(), &ev(&[1.0, 2.0, 0.0]), 10, 9).is_err());
    }
}
