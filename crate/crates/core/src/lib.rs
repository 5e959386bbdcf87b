//! Sub-Riemannian geometry of hypersurfaces in the Heisenberg group `H^n`.

pub mod error;
pub mod geodesic;
pub mod group;
pub mod curvature;
pub mod linalg;
pub mod poly;
pub mod ruling;
pub mod sampling;
pub mod scalar;
pub mod surface;
pub mod verify;

pub use error::{Error, Result};
pub use group::{BlockRotation, Dimension};
pub use scalar::{Real, Scalar};
pub use surface::{BoxDomain, Surface, SurfaceKind, SurfacePointData};

pub type Point = group::Point<f64>;
pub type HVec = group::HVec<f64>;
pub type Poly = poly::Poly<f64>;
pub type Jet2 = poly::Jet2<f64>;
pub type ExactPoint = group::Point<num_rational::Rational64>;
pub type ExactPoly = poly::Poly<num_rational::Rational64>;
