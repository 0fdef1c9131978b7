//! Effective shear and extensional moduli of a periodic elastic composite
//! with densely packed rigid inclusions.
//!
//! The crate solves the Lamé cell problem on a translated period cell with
//! bilinear finite elements, evaluates the closed-form thin-gap leading terms
//! for 2-convex (elliptic) and m-convex inclusions, and carries the auxiliary
//! gap fields whose algebraic cancellations explain why the remainder of the
//! asymptotic expansion stays bounded.
//!
//! The analytic layers ([`specfun`], [`geometry`], [`auxfield`],
//! [`asymptotics`]) are generic over the scalar type through [`Real`]; the
//! finite element solver ([`fem`]) and the report layer work in `f64`.

pub mod asymptotics;
pub mod auxfield;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod real;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};
pub use real::Real;

pub type LameParams64 = geometry::LameParams<f64>;
pub type LameParams32 = geometry::LameParams<f32>;
pub type InclusionShape64 = geometry::InclusionShape<f64>;
pub type InclusionShape32 = geometry::InclusionShape<f32>;
pub type CellSpec64 = geometry::CellSpec<f64>;
pub type CellSpec32 = geometry::CellSpec<f32>;
pub type GapProfile64 = geometry::GapProfile<f64>;
pub type GapProfile32 = geometry::GapProfile<f32>;
pub type AuxEval64 = auxfield::AuxEval<f64>;
pub type AuxEval32 = auxfield::AuxEval<f32>;
pub type LeadingTerm64 = asymptotics::LeadingTerm<f64>;
pub type LeadingTerm32 = asymptotics::LeadingTerm<f32>;
pub type EllipticParam64 = specfun::EllipticParam<f64>;
