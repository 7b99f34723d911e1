//! Symbolic engine for the generators-and-relations category built over a
//! finite presentation: free words and formal sums, elementary equivalences
//! with checkable proof traces, normal forms, and exact integer-matrix models.

pub mod cli;
pub mod model;
pub mod normalform;
pub mod presentation;
pub mod rewrite;
pub mod sample;
pub mod terms;
