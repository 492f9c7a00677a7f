//! Jacobi-operator spectra, Morse index counts and density ratios for minimal
//! cones over links in S^(n−1), transplanted into the Riemannian Schwarzschild
//! manifold with its horizon as free boundary.

// `!(x > 0.0)` is how input checks reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod geometry;
pub mod index;
pub mod link;
pub mod quadrature;
pub mod radial;
pub mod tridiag;

pub use density::{density_report, DensityReport, RigidityClass, WillmoreFlag};
pub use error::{Error, Result};
pub use geometry::{ArealProfile, SchwarzschildSpace};
pub use index::{index_report, DivergenceVerdict, IndexReport, SeparatedTestFunction};
pub use link::{JacobiSpectrum, Level, LinkKind, MinimalLink};
pub use radial::{
    count_negative, make_mode_problem, steklov_shot, steklov_value, InnerBc, SteklovShot, ModeProblem, ModeSpectrumResult,
    OuterBc, OuterCondition, RadialGrid, SteklovOutcome, WeightKind,
};
