//! Finite algebras, tolerances, and the question of when a tolerance `Θ` can
//! be written as `R ∘ R⁻` for a reflexive compatible relation `R`.
//!
//! * [`relcore`]: bit-matrix binary relations.
//! * [`algebra`]: operation tables, compatibility, closures, expansions.
//! * [`decide`]: representability searches and enumerations.
//! * [`relterms`]: `{∘, ∩}` relation terms, their graphs, and evaluation.
//! * [`corpus`]: the named example algebras.

pub mod algebra;
pub mod corpus;
pub mod decide;
pub mod relcore;
pub mod relterms;

pub use algebra::{Algebra, AlgebraError, ClosureMode, OperationTable, RelationClass};
pub use corpus::{CorpusEntry, CorpusError, CorpusName};
pub use decide::{
    Budget, DecideError, Enumeration, PermutabilityReport, RepWitness, WeakRepWitness,
};
pub use relcore::{BinRel, Elem, RelError, Shape};
pub use relterms::{RelTerm, TermError, TermGraph};
