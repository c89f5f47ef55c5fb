//! Triply graded Poincare polynomials and N-parametric bracket families.

mod degree;
mod family;
pub mod grammar;
mod poly;

pub use degree::{ShiftDegree, TriDegree};
pub use family::{quantum_exponents, BracketAtom, FamilyPoincare};
pub use poly::{Poincare, SignedPoly};
