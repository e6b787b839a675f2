//! Defeasible logic: theories, a conclusion engine, the simplifying
//! transformations and tools for checking them.

pub mod analysis;
pub mod cli;
pub mod engine;
pub mod ground;
pub mod parser;
pub mod theory;
pub mod transform;
