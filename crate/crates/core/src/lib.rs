//! Quaternionic and twistor projective geometry with discrete integrable nets.
//!
//! The crate models the twistor fibration CP³ → HP¹ = S⁴, the Plücker quadric
//! Q⁴ of lines in CP³ (two-spheres and points of S⁴), cross-ratio systems in
//! CP¹, HP¹ and on conics of Q⁴, conjugate/conic/circular net propagation,
//! principal contact element nets and the Lie-quadric reduction to S³.

use std::sync::atomic::{AtomicU64, Ordering};

pub mod contact;
pub mod lie;
pub mod linalg;
pub mod nets;
pub mod proj4;
pub mod quat;
pub mod twistor;
pub mod xratio;

pub use num_complex::Complex64 as C64;

/// Errors raised by geometric constructions.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("zero vector")]
    ZeroVector,
    #[error("quaternion is not a unit imaginary")]
    NotImaginaryUnit,
    #[error("bivector is not decomposable")]
    NotDecomposable,
    #[error("degenerate-span")]
    DegenerateSpan,
    #[error("line-in-plane")]
    LineInPlane,
    #[error("non-point-intersection")]
    NonPointIntersection,
    #[error("coincident points")]
    CoincidentPoints,
    #[error("degenerate lambda")]
    DegenerateLambda,
    #[error("generators-not-skew")]
    GeneratorsNotSkew,
    #[error("degenerate-normalization")]
    DegenerateNormalization,
    #[error("input not on conic")]
    NotOnConic,
    #[error("planes-near-parallel")]
    PlanesNearParallel,
    #[error("index {0:?} outside the net domain")]
    OutOfDomain(Vec<usize>),
    #[error("missing vertex {0:?}")]
    MissingVertex(Vec<usize>),
    #[error("point not on sphere")]
    NotOnSphere,
    #[error("fiber-in-plane")]
    FiberInPlane,
    #[error("value outside the subquadric")]
    OutsideSubquadric,
    #[error("line is j-real (a point, not a sphere)")]
    NotASphere,
    #[error("degenerate hermitian form")]
    DegenerateForm,
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

static DEFAULT_TOL_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695); // 1e-9

/// Global default tolerance used when an operation takes no explicit one.
pub fn default_tol() -> f64 {
    f64::from_bits(DEFAULT_TOL_BITS.load(Ordering::Relaxed))
}

pub fn set_default_tol(tol: f64) {
    DEFAULT_TOL_BITS.store(tol.to_bits(), Ordering::Relaxed);
}
