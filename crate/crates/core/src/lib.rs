//! Refinement and conformance checking for interface automata.

pub mod automaton;
pub mod cli;
pub mod error;
pub mod format;
pub mod game;
pub mod lattice;
pub mod oracle;
pub mod relations;
pub mod semantics;
pub mod transform;
pub mod verdict;

pub use automaton::{validate, InterfaceAutomaton, Label, LabelId, LabelKind, Path, RawAutomaton, StateId};
pub use error::{Error, Result};
pub use verdict::{Relation, Status, Verdict, Witness, WitnessKind};
