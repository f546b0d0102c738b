//! Numerical toolkit for the Ricci-flat Kähler (Stenzel) structure on the
//! cotangent bundle of the n-sphere, modeled as the affine quadric
//! `sum z_i^2 = 1` in `C^{n+1}`, together with:
//!
//! - the Kähler potential profile solving `d/dtau (du/dtau)^n = c n sinh^{n-1}(tau)`,
//! - evaluators for the 1-form, Kähler form, metric and holomorphic volume form,
//! - moment maps of the `SO(n+1)` subgroup actions and their level-set checks,
//! - the torus- and rotation-invariant special Lagrangian families, traced as
//!   implicit curves in profile coordinates and verified pointwise,
//! - the singular quadric cone (`sum z_i^2 = 0`) limits and quantitative
//!   asymptotics.
//!
//! All core types are generic over the floating-point scalar through
//! [`scalar::Real`]; `f64` aliases are exported at the crate root. Every
//! value is immutable after construction and all evaluators are pure, so
//! everything here is safe to share across threads.

pub mod scalar;

pub mod quadrature;

pub mod exterior;

pub mod quadric;

pub mod potential;

pub mod forms;

pub mod oracle;

pub mod moment;

pub mod sampling;

pub mod continuation;

pub mod families;

pub mod conifold;

pub mod verify;

pub use scalar::Real;

/// Errors surfaced by constructors and evaluators.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("constraint violated: {what} (residual {residual:.3e}, tolerance {tol:.3e})")]
    Constraint { what: &'static str, residual: f64, tol: f64 },
    #[error("domain error: {what} = {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("branch error: {what} at z0 = {re}{im:+}i")]
    Branch { what: &'static str, re: f64, im: f64 },
    #[error("no solution found for the requested constants")]
    NoSolution,
    #[error("out of traced range: {0}")]
    OutOfRange(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// `f64` specializations of the core types.
pub type ComplexVector64 = quadric::ComplexVector<f64>;
pub type QuadricPoint64 = quadric::QuadricPoint<f64>;
pub type TangentVector64 = quadric::TangentVector<f64>;
pub type CotangentPoint64 = quadric::CotangentPoint<f64>;
pub type LieAlgebraElement64 = quadric::LieAlgebraElement<f64>;
pub type OrthogonalMatrix64 = quadric::OrthogonalMatrix<f64>;
pub type GroupPreset64 = quadric::GroupPreset<f64>;
pub type Profile64 = potential::Profile<f64>;
pub type LeafSpec64 = families::LeafSpec<f64>;
pub type ConePoint64 = conifold::ConePoint<f64>;
