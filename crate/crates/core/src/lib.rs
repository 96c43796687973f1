//! Regular and parallel runtime monitors.
//!
//! Monitors are terms over a finite alphabet built from verdicts, action
//! prefixes, choice, recursion and the conjunctive (`&`) and disjunctive
//! (`|`) parallel operators. The crate executes them on finite traces,
//! compiles them to alternating, nondeterministic and deterministic finite
//! automata, converts those back into regular and deterministic monitors,
//! synthesizes monitors from recHML formulas, and builds the `L_A`/`L_U`
//! succinctness-gap families.

pub mod automata;
pub mod corpus;
mod error;
pub mod gapbench;
pub mod logic;
pub mod semantics;
pub mod terms;
pub mod transform;

pub use error::{Error, Result};
pub use terms::{Action, Alphabet, Monitor, Verdict};
