//! Exact-arithmetic workbench for finite population axiology.
//!
//! The crate models lives, individuals, outcomes and lotteries with exact
//! rational probabilities, represents personal and impersonal betterness as
//! partial preorders, and checks dominance and Pareto-style principles against
//! those orders. Every checker returns a [`Certificate`] whose witness can be
//! replayed independently.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, reporting and
//! the command-line front end live in the companion `opaque` crate.

#![no_std]

extern crate alloc;

pub mod axioms;
pub mod certificate;
pub mod constraints;
pub mod constructions;
pub mod explorer;
pub mod model;
pub mod order;
pub mod rational;
pub mod reduction;

pub use certificate::{Certificate, CertVerdict, DominanceGrade, Principle, Witness};
pub use model::{
    Distribution, Gamble, Individual, IndividualId, Life, LifeId, Lottery, ModelError, Outcome,
    Permutation, PersonalLottery, State, Subpopulation, Universe,
};
pub use order::{CompletionOptions, OrderError, PartialPreorder, RawPreorder, Verdict};
pub use rational::Rational;
