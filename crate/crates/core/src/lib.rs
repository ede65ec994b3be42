//! Exact-arithmetic toolkit for invariant measures of bi-permutative
//! cellular automata.
//!
//! Everything is built on finite words and exact rational cylinder
//! probabilities. Logarithms only appear when block entropies are turned
//! into floating point numbers at the very end.
//!
//! The crate is organised bottom-up:
//!
//! * [`rules`]: alphabets, radius-1 local rules, permutativity, column coding.
//! * [`groups`]: finite groups as Cayley tables, subgroups, cosets, quotients.
//! * [`measures`]: shift-invariant measures as memoized cylinder oracles.
//! * [`conditionals`]: conditional distributions at index zero and the
//!   uniformity / coset / tail checks built on them.
//! * [`lifted`]: the automaton lifted to nonempty subsets and its
//!   size-preserving words.
//! * [`synthesis`]: building measures from set-valued measures.
//! * [`rlp`]: the times-p-times-q circle system and its reciprocity counts.

pub mod conditionals;
mod error;
pub mod groups;
pub mod lifted;
pub mod measures;
mod par;
pub mod rational;
pub mod rlp;
pub mod rules;
pub mod synthesis;

pub use error::{Error, Result};
pub use rational::Q;
pub use rules::{Alphabet, LocalRule, Symbol, Word};
