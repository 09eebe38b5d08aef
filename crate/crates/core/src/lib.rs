//! Parsing, evaluation, transformation, comparison and satisfiability
//! checking for modal, graded modal, relation-algebra and guarded
//! first-order formulas over finite relational structures.

pub mod check;
pub mod cli;
pub mod decision;
pub mod equivalence;
pub mod error;
pub mod generate;
pub mod semantics;
pub mod structures;
pub mod syntax;
pub mod transforms;

pub use error::{Error, Result, SyntaxError};
