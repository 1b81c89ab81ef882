//! Co-transcriptional splicing as a formal string operation.
//!
//! The library models intron excision during transcription as *logarithmic
//! hairpin deletion*: a context pair brackets a region that folds into a
//! stem-loop and is removed, with the stem required to support the loop under
//! a logarithmic length bound. On top of the calculus sit:
//!
//! - circular templates with rho-independent termination ([`hairpin::circular_terminating_delete`]),
//! - a compiler from NFAs to circular templates whose terminating deletion
//!   set equals the automaton's language ([`compiler`]),
//! - a bounded-equality verifier with replayable traces ([`verifier`]),
//! - restricted automata (SSB/RB/DB), desk-scale exact minimization, and the
//!   biclique-cover reduction machinery ([`bounded`]).
//!
//! See the guide in `book/` for worked examples; its code blocks run as
//! doctests of this crate.

pub mod automata;
pub mod bounded;
pub mod compiler;
pub mod hairpin;
pub mod verifier;
pub mod words;

pub use automata::Nfa;
pub use hairpin::{DeletionParams, HairpinOccurrence};
pub use words::{Alphabet, CircularWord, Involution, Word};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/words.md")]
    mod words {}
    #[doc = include_str!("../../../book/src/hairpin-deletion.md")]
    mod hairpin_deletion {}
    #[doc = include_str!("../../../book/src/circular-templates.md")]
    mod circular_templates {}
    #[doc = include_str!("../../../book/src/compiling-automata.md")]
    mod compiling_automata {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/bounded-automata.md")]
    mod bounded_automata {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
