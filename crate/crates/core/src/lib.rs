//! Exact polyhedral convex analysis.
//!
//! Everything is computed over the rationals: linear programs return
//! checkable certificates, polyhedra are H-representations projected with
//! Fourier–Motzkin elimination, and each calculus rule (normal cones,
//! subdifferentials, coderivatives, conjugates, Fenchel duality) is exposed as
//! a check that compares two independently computed sides exactly.

pub mod arith;
pub mod cones;
pub mod duality;
pub mod error;
pub mod functions;
pub mod gen;
pub mod linalg;
pub mod lp;
pub mod polyhedron;
pub mod projection;
pub mod separation;
pub mod setvalued;
pub mod suite;

pub use arith::{ExtendedRational, Rational};
pub use error::{Error, Result};
pub use linalg::{QMatrix, QVector};
pub use polyhedron::{HPolyhedron, RelativeInteriorReport, Support};
