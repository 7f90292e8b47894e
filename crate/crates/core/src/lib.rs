//! Automatic structures from finite automata: ambiguity-based gadgets,
//! first-order evaluation over automatic presentations, and the isomorphism
//! procedures for equivalence structures, bounded-height trees and linear orders.

pub mod compose;
pub mod conv;
pub mod equiv;
pub mod error;
pub mod fo;
pub mod io;
pub mod limits;
pub mod linorder;
pub mod nfa;
pub mod poly;
pub mod symbol;
pub mod trees;
pub mod verdict;

pub use conv::{AlphabetOrder, ConvWord, OrderKind};
pub use error::{Error, Result};
pub use nfa::{ExtendedCount, Nfa, RunAutomaton, Transition};
pub use poly::Polynomial;
pub use symbol::Symbol;
pub use verdict::{Certificate, IsoVerdict};
