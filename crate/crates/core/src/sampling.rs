//! Seeded sampling of diamonds and causal quadruples.
//!
//! Parallel consumers split work into fixed-size chunks and draw each chunk
//! from its own substream, so results do not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Event, LorentzianSpace};

/// Backends that can draw points from the open diamond `I(a, b)`.
pub trait DiamondSampler {
    fn sample_in_diamond<R: Rng + ?Sized>(&self, a: &Event, b: &Event, rng: &mut R) -> Result<Event>;
}

/// The causal diamond `I(past, future)` used as a sampling region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diamond {
    pub past: Event,
    pub future: Event,
}

impl Diamond {
    pub fn new(past: Event, future: Event) -> Self {
        Diamond { past, future }
    }

    /// Errors unless `past << future` in `space`.
    pub fn check<S: LorentzianSpace<Point = Event>>(&self, space: &S) -> Result<()> {
        if space.chronological(&self.past, &self.future) {
            Ok(())
        } else {
            Err(Error::Sampling("diamond has empty interior".into()))
        }
    }
}

/// Attempts per quadruple before giving up.
pub const QUADRUPLE_BUDGET: usize = 1_000;

/// A causal quadruple `x <= y << z <= w` inside `I(a, b)`.
///
/// Draws `x` from `I(a, b)`, `w` from `I(x, b)`, `y` from `I(x, w)` and `z`
/// from `I(y, w)`, resampling when rounding breaks the order.
pub fn sample_quadruple<S, R>(space: &S, a: &Event, b: &Event, rng: &mut R) -> Result<[Event; 4]>
where
    S: LorentzianSpace<Point = Event> + DiamondSampler,
    R: Rng + ?Sized,
{
    if !space.chronological(a, b) {
        return Err(Error::Sampling("diamond has empty interior".into()));
    }
    for _ in 0..QUADRUPLE_BUDGET {
        let Ok(x) = space.sample_in_diamond(a, b, rng) else { continue };
        let Ok(w) = space.sample_in_diamond(&x, b, rng) else { continue };
        let Ok(y) = space.sample_in_diamond(&x, &w, rng) else { continue };
        let Ok(z) = space.sample_in_diamond(&y, &w, rng) else { continue };
        if space.causal_le(&x, &y) && space.chronological(&y, &z) && space.causal_le(&z, &w) {
            return Ok([x, y, z, w]);
        }
    }
    Err(Error::Sampling("quadruple rejection budget exhausted".into()))
}

/// The splitmix64 finaliser.
#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of substream `stream` under `master`: `splitmix64(master ^ splitmix64(stream))`.
#[inline]
pub fn substream_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream))
}

pub fn substream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(master, stream))
}
