//! Lorentzian Ptolemy inequality, hyperbolic inversion and timelike
//! curvature comparison on exactly computable spaces.
//!
//! Backends: flat Minkowski space [`minkowski::MinkowskiSpace`], the
//! two-dimensional constant-curvature models [`model::ModelSpace`], Minkowski
//! cones over metric spaces ([`cone`]) and finite causal sets ([`causet`]).
//! Every backend implements [`LorentzianSpace`] and feeds its quadruples
//! through the slack arithmetic in [`space`].

pub mod backend;
pub mod causet;
pub mod cone;
pub mod curvature;
pub mod error;
pub mod inversion;
pub mod io;
pub mod minkowski;
pub mod model;
pub mod report;
pub mod sampling;
pub mod scan;
pub mod space;
pub mod witness;

pub use error::{Error, Result};
pub use space::{
    ptolemy_slack, ptolemy_slack_margin, ptolemy_verdict, reverse_triangle_deficit, Chart, Event,
    GeodesicSpace, LorentzianSpace, PtolemyVerdict, Relation, RelationKind, Separations6,
};
