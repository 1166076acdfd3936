//! Ordered Enriques diagrams of clusters of infinitely near points.
//!
//! The crate models ordered Enriques diagrams and their proximity matrices,
//! enumerates all diagrams with a given number of vertices, and decides
//! Eff-containment, primality and (where the known criteria apply)
//! specialization by exact integer computation.

pub mod analysis;
pub mod diagram;
pub mod enumerate;
pub mod matrix;
pub mod poset;
pub mod render;

pub use diagram::{
    validate, DiagramError, OrderedDiagram, RawDiagram, ValidationError, VertexClass, Violation,
};
pub use enumerate::{
    enumerate_ordered, enumerate_unordered, oracle_enumerate, BudgetExceeded, EnumerationBudget,
};
pub use matrix::{IntMatrix, MatrixError, PairInvariants, ProximityMatrix};
