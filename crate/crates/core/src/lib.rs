//! Guarded order-sorted intensional logic: vocabularies with subtyping,
//! typed formulas with implicit guards, grounding of concept quantifiers,
//! and finite-structure semantics.

pub mod cli;
pub mod elaboration;
pub mod grounding;
pub mod semantics;
pub mod span;
pub mod syntax;
pub mod typing;
pub mod vocabulary;
