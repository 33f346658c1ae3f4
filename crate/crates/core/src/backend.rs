//! Runtime selection of a continuous backend from a descriptor such as
//! `minkowski:3` or `model:-1`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::minkowski::MinkowskiSpace;
use crate::model::ModelSpace;
use crate::sampling::{DiamondSampler, Diamond};
use crate::space::{Chart, Event, GeodesicSpace, LorentzianSpace, Relation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceSpec {
    /// `R^{1,n}`.
    Minkowski(usize),
    /// `L²(K)`.
    Model(f64),
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("unknown space '{s}', expected minkowski:N or model:K"));
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "minkowski" => Ok(SpaceSpec::Minkowski(arg.trim().parse().map_err(|_| bad())?)),
            "model" => {
                let k: f64 = arg.trim().parse().map_err(|_| bad())?;
                if !k.is_finite() {
                    return Err(bad());
                }
                Ok(SpaceSpec::Model(k))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Minkowski(n) => write!(f, "minkowski:{n}"),
            SpaceSpec::Model(k) => write!(f, "model:{k}"),
        }
    }
}

/// A flat or model backend chosen at runtime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    Minkowski(MinkowskiSpace),
    Model(ModelSpace),
}

impl Backend {
    pub fn new(spec: SpaceSpec) -> Result<Self> {
        Ok(match spec {
            SpaceSpec::Minkowski(n) => Backend::Minkowski(MinkowskiSpace::new(n)?),
            SpaceSpec::Model(k) => Backend::Model(ModelSpace::new(k)?),
        })
    }

    pub fn spec(&self) -> SpaceSpec {
        match self {
            Backend::Minkowski(m) => SpaceSpec::Minkowski(m.n()),
            Backend::Model(m) => SpaceSpec::Model(m.k()),
        }
    }

    /// The origin of flat space or the base point of a model.
    pub fn origin(&self) -> Event {
        match self {
            Backend::Minkowski(m) => m.origin(),
            Backend::Model(m) => m.base_point(),
        }
    }

    pub fn chart(&self) -> Chart {
        match self {
            Backend::Minkowski(_) => Chart::Minkowski,
            Backend::Model(m) => m.chart(),
        }
    }

    /// Validates raw coordinates in the backend chart.
    pub fn event(&self, coords: Vec<f64>) -> Result<Event> {
        match self {
            Backend::Minkowski(m) => m.event(coords),
            Backend::Model(m) => m.event(coords),
        }
    }

    /// The diamond `I(exp_o(-s/2 e_t), exp_o(s/2 e_t))` of height `s` around
    /// the origin.
    pub fn centered_region(&self, scale: f64) -> Result<Diamond> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Input("region scale must be positive".into()));
        }
        let o = self.origin();
        let (et, _) = self.timelike_frame(&o);
        let step = |c: f64| et.iter().map(|v| v * c).collect::<Vec<_>>();
        let d = Diamond::new(self.exp(&o, &step(-0.5 * scale))?, self.exp(&o, &step(0.5 * scale))?);
        d.check(self)?;
        Ok(d)
    }

    /// A diamond from corner coordinates: inertial coordinates for flat
    /// space, conformal chart coordinates `(T, X)` for the models.
    pub fn region_from_corners(&self, past: &[f64], future: &[f64]) -> Result<Diamond> {
        let d = match self {
            Backend::Minkowski(m) => Diamond::new(m.event(past.to_vec())?, m.event(future.to_vec())?),
            Backend::Model(m) => {
                if past.len() != 2 || future.len() != 2 {
                    return Err(Error::Input("model corners are conformal (T, X) pairs".into()));
                }
                Diamond::new(m.from_conformal(past[0], past[1]), m.from_conformal(future[0], future[1]))
            }
        };
        d.check(self)?;
        Ok(d)
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.spec().fmt(f)
    }
}

impl LorentzianSpace for Backend {
    type Point = Event;

    fn relation(&self, x: &Event, y: &Event) -> Relation {
        match self {
            Backend::Minkowski(m) => m.relation(x, y),
            Backend::Model(m) => m.relation(x, y),
        }
    }

    fn time_separation(&self, x: &Event, y: &Event) -> f64 {
        match self {
            Backend::Minkowski(m) => m.time_separation(x, y),
            Backend::Model(m) => m.time_separation(x, y),
        }
    }
}

impl GeodesicSpace for Backend {
    fn inner(&self, p: &Event, u: &[f64], v: &[f64]) -> f64 {
        match self {
            Backend::Minkowski(m) => m.inner(p, u, v),
            Backend::Model(m) => m.inner(p, u, v),
        }
    }

    fn exp(&self, p: &Event, v: &[f64]) -> Result<Event> {
        match self {
            Backend::Minkowski(m) => m.exp(p, v),
            Backend::Model(m) => m.exp(p, v),
        }
    }

    fn log(&self, p: &Event, q: &Event) -> Result<Vec<f64>> {
        match self {
            Backend::Minkowski(m) => m.log(p, q),
            Backend::Model(m) => m.log(p, q),
        }
    }

    fn timelike_frame(&self, p: &Event) -> (Vec<f64>, Vec<f64>) {
        match self {
            Backend::Minkowski(m) => m.timelike_frame(p),
            Backend::Model(m) => m.timelike_frame(p),
        }
    }

    fn geodesic_point(&self, x: &Event, y: &Event, s: f64) -> Result<Event> {
        match self {
            Backend::Minkowski(m) => m.geodesic_point(x, y, s),
            Backend::Model(m) => m.geodesic_point(x, y, s),
        }
    }
}

impl DiamondSampler for Backend {
    fn sample_in_diamond<R: Rng + ?Sized>(&self, a: &Event, b: &Event, rng: &mut R) -> Result<Event> {
        match self {
            Backend::Minkowski(m) => m.sample_in_diamond(a, b, rng),
            Backend::Model(m) => m.sample_in_diamond(a, b, rng),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_round_trip() {
        for s in ["minkowski:1", "minkowski:3", "model:-1", "model:0", "model:2.5"] {
            assert_eq!(s.parse::<SpaceSpec>().unwrap().to_string(), s);
        }
        for s in ["minkowski", "model:x", "euclid:2", "model:inf"] {
            assert!(s.parse::<SpaceSpec>().is_err());
        }
        assert!(Backend::new(SpaceSpec::Minkowski(0)).is_err());
    }

    #[test]
    fn centered_regions_have_the_requested_height() {
        for spec in ["minkowski:1", "minkowski:3", "model:-1", "model:0", "model:1"] {
            let b = Backend::new(spec.parse().unwrap()).unwrap();
            let d = b.centered_region(0.2).unwrap();
            assert!((b.time_separation(&d.past, &d.future) - 0.2).abs() < 1e-12, "{spec}");
        }
    }

    #[test]
    fn corner_regions() {
        let b = Backend::new(SpaceSpec::Minkowski(1)).unwrap();
        assert!(b.region_from_corners(&[0.0, 0.0], &[2.0, 0.0]).is_ok());
        assert!(b.region_from_corners(&[0.0, 0.0], &[0.0, 0.0]).is_err());
        let m = Backend::new(SpaceSpec::Model(1.0)).unwrap();
        let d = m.region_from_corners(&[-0.2, 0.0], &[0.2, 0.0]).unwrap();
        assert!(m.chronological(&d.past, &d.future));
    }
}
