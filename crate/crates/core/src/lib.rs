//! Computational laboratory for two-dimensional normed spaces: norms and their
//! unit spheres, natural parameterizations of convex curves, Birkhoff
//! orthogonality, metric detection of non-differentiable points and a harness
//! for checking candidate isometries between spheres.

pub mod birkhoff;
pub mod corpus;
pub mod curve;
pub mod diff;
pub mod error;
pub mod isometry;
pub mod norm;
pub mod numeric;
pub mod param;
pub mod plot;
pub mod vec2;

pub use curve::{ConvexCurve, Extreme, Extremes};
pub use error::{Error, Result};
pub use norm::{Exponent, Norm, NormSpec};
pub use param::{NaturalParam, Side};
pub use vec2::{Mat2, Vec2};
