//! Four points on a translated timelike hyperbola, cut out by two timelike
//! lines through the tangent-space origin, pushed into a backend by the
//! exponential map. In flat space they satisfy the Ptolemy equality; positive
//! curvature makes the slack negative.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sampling::substream_rng;
use crate::space::{check_causal_chain, Event, GeodesicSpace, PtolemyVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessConfig {
    /// `a` in `(x - c_x)² - t² = a`.
    pub a: f64,
    /// Spatial offset of the hyperbola center, negative.
    pub center_x: f64,
    /// Lines `x = k t`, `|k| < 1`.
    pub slopes: [f64; 2],
    /// Scale applied to the tangent vectors before the exponential map.
    pub scale: f64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        Self::reference()
    }
}

impl WitnessConfig {
    /// `a = 1`, `c_x = -2`, slopes `0` and `0.5`, unit scale.
    pub fn reference() -> Self {
        WitnessConfig {
            a: 1.0,
            center_x: -2.0,
            slopes: [0.0, 0.5],
            scale: 1.0,
        }
    }

    pub fn scaled(self, scale: f64) -> Self {
        WitnessConfig { scale, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(domain("hyperbola parameter a must be positive"));
        }
        if !(self.center_x < 0.0 && self.center_x.is_finite()) {
            return Err(domain("hyperbola center offset must be negative"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(domain("scale must be positive"));
        }
        for k in self.slopes {
            if !(k.abs() < 1.0) {
                return Err(domain("line slopes must satisfy |k| < 1"));
            }
        }
        if self.slopes[0] == self.slopes[1] {
            return Err(domain("the two lines must differ"));
        }
        Ok(())
    }

    /// The two intersections of `x = k t` with the branch `x > c_x`.
    fn line_hits(&self, k: f64) -> Result<[(f64, f64); 2]> {
        let c = self.center_x;
        let qa = k * k - 1.0;
        let qb = -2.0 * k * c;
        let qc = c * c - self.a;
        let disc = qb * qb - 4.0 * qa * qc;
        if !(disc > 0.0) {
            return Err(Error::NotRealizable(format!("line x = {k} t misses the hyperbola")));
        }
        let r = disc.sqrt();
        let mut out = [(0.0, 0.0); 2];
        for (o, t) in out.iter_mut().zip([(-qb - r) / (2.0 * qa), (-qb + r) / (2.0 * qa)]) {
            if !(k * t - c > 0.0) {
                return Err(Error::NotRealizable(format!("line x = {k} t meets the other branch")));
            }
            *o = (t, k * t);
        }
        Ok(out)
    }

    /// Unscaled tangent points `(t, x)`, ordered by `t`.
    pub fn tangent_points(&self) -> Result<[(f64, f64); 4]> {
        self.validate()?;
        let [p, q] = self.line_hits(self.slopes[0])?;
        let [r, s] = self.line_hits(self.slopes[1])?;
        let mut v = [p, q, r, s];
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(v)
    }

    /// Largest hyperbolic norm of the scaled tangent vectors.
    pub fn max_norm(&self) -> Result<f64> {
        Ok(self
            .tangent_points()?
            .iter()
            .map(|(t, x)| self.scale * (t * t - x * x).max(0.0).sqrt())
            .fold(0.0, f64::max))
    }

    /// Errors unless the scaled vectors stay below `D_K / 2`.
    pub fn check_for_curvature(&self, k: f64) -> Result<()> {
        if k > 0.0 && self.max_norm()? >= std::f64::consts::PI / (2.0 * k.sqrt()) {
            return Err(Error::OutsideWedge);
        }
        Ok(())
    }
}

/// Maps the configuration through `exp_p` in the orthonormal frame at `p`
/// and evaluates the quadruple.
pub fn witness_positive_curvature<S: GeodesicSpace>(
    space: &S,
    p: &Event,
    cfg: &WitnessConfig,
    delta: f64,
) -> Result<PtolemyVerdict> {
    let tangent = cfg.tangent_points()?;
    let mut pts = Vec::with_capacity(4);
    for (t, x) in tangent {
        let v = space.frame_vector(p, cfg.scale * t, cfg.scale * x);
        pts.push(space.exp(p, &v)?);
    }
    let q: [Event; 4] = pts.try_into().expect("four points");
    check_causal_chain(space, &q)?;
    PtolemyVerdict::evaluate(space.separations(&q), delta, Some(q))
}

/// `count` seeded valid configurations with `max_norm <= 1`.
pub fn seeded_family(seed: u64, count: usize) -> Vec<WitnessConfig> {
    let mut rng = substream_rng(seed, 0);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = rng.random_range(0.3..2.0);
        let root = f64::sqrt(a);
        let cfg = WitnessConfig {
            a,
            center_x: -rng.random_range(root * 1.05..root + 2.0),
            slopes: [rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)],
            scale: 1.0,
        };
        if (cfg.slopes[0] - cfg.slopes[1]).abs() < 0.1 {
            continue;
        }
        let Ok(norm) = cfg.max_norm() else { continue };
        out.push(cfg.scaled(rng.random_range(0.2..1.0) / norm));
    }
    out
}
