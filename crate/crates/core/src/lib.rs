//! Numerical toolkit for Orlicz phi-mixed volumes of convex bodies,
//! Orlicz affine and geominimal surface areas by constrained shape
//! optimization, and machine verification of the related inequalities.

pub mod bodies;
pub mod error;
pub mod functionals;
pub mod geom;
pub mod grid;
pub mod harness;
pub mod mixed;
pub mod orlicz;

pub use bodies::{BodyClass, ConvexBody, SLTransform, StarBody, SurfaceAreaMeasure};
pub use error::{Error, Result};
pub use functionals::{
    CertifiedSide, Direction, FunctionalResult, LpWhich, OptimizerOpts, OptimizerTrace, Witness,
};
pub use grid::{sphere_measure, unit_ball_volume, SphereGrid};
pub use harness::{run_suite, CaseResult, CaseStatus, SuiteReport, SUITE_NAMES};
pub use orlicz::{Class, Classification, OrliczFunction, PhiSpec};
