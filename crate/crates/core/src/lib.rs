//! Keyword-language bridge for linear temporal logic.
//!
//! * [`ltl`]: formula syntax trees, normal forms, infix text, random formulas
//! * [`itl`]: the keyword language, its serializer and parser
//! * [`automata`]: tableau translation to Büchi automata and emptiness checking
//! * [`verify`]: satisfiability, non-triviality, equivalence, candidate verdicts
//! * [`repair`]: minimal-edit repair of failing candidates
//! * [`policy`]: verification rewards, a grammar policy and group-relative training
//! * [`pipeline`]: datasets, corpus generation, filtering, explanation, evaluation
//!
//! See the guide under `book/` for a narrative tour.

pub mod automata;
pub mod itl;
pub mod ltl;
pub mod pipeline;
pub mod policy;
pub mod repair;
pub mod verify;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
mod book_introduction {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/ltl.md")]
mod book_ltl {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/itl.md")]
mod book_itl {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/automata.md")]
mod book_automata {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/verification.md")]
mod book_verification {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/repair.md")]
mod book_repair {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/training.md")]
mod book_training {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/pipeline.md")]
mod book_pipeline {}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
