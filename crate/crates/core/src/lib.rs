//! Dimension-level toolkit for reduced HOMFLY-PT homology: graded
//! polynomials, long exact sequence solving, spectral sequence collapse
//! checks and the Kinoshita-Terasaka / Conway replay.

pub mod error;
pub mod graded_poly;
pub mod homology_db;
pub mod les;
pub mod pipeline;
pub mod ss;

pub use error::{Error, Result};
pub use graded_poly::{BracketAtom, FamilyPoincare, Poincare, ShiftDegree, SignedPoly, TriDegree};
