//! Point-set files.
//!
//! Flat: `{"chart": "minkowski", "n": 1, "points": [[t, x], ..]}`.
//! Models: `{"chart": "model", "K": -1, "points": [[x0, x1, x2], ..]}`, with
//! `[t, x]` rows when `K = 0`.

use serde::{Deserialize, Serialize};

use crate::backend::{Backend, SpaceSpec};
use crate::error::{Error, Result};
use crate::space::Event;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetJson {
    pub chart: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    pub points: Vec<Vec<f64>>,
}

impl PointSetJson {
    pub fn new(backend: &Backend, points: &[Event]) -> Self {
        let (chart, n, k) = match backend.spec() {
            SpaceSpec::Minkowski(n) => ("minkowski", Some(n), None),
            SpaceSpec::Model(k) => ("model", None, Some(k)),
        };
        PointSetJson {
            chart: chart.into(),
            n,
            k,
            points: points.iter().map(|e| e.coords.clone()).collect(),
        }
    }

    /// The backend and validated events.
    pub fn into_events(self) -> Result<(Backend, Vec<Event>)> {
        let spec = match self.chart.as_str() {
            "minkowski" => {
                let n = match (self.n, self.points.first()) {
                    (Some(n), _) => n,
                    (None, Some(p)) if !p.is_empty() => p.len() - 1,
                    _ => return Err(Error::Input("cannot infer the dimension of an empty point set".into())),
                };
                SpaceSpec::Minkowski(n)
            }
            "model" => SpaceSpec::Model(self.k.ok_or_else(|| Error::Input("model point sets need K".into()))?),
            other => return Err(Error::Input(format!("unknown chart '{other}'"))),
        };
        let backend = Backend::new(spec)?;
        let events = self.points.into_iter().map(|p| backend.event(p)).collect::<Result<Vec<_>>>()?;
        Ok((backend, events))
    }
}

/// Parses a point-set file.
pub fn parse_point_set(text: &str) -> Result<(Backend, Vec<Event>)> {
    let j: PointSetJson = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
    j.into_events()
}
