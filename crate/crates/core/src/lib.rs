//! Bisimulation equivalence of first-order grammars, explored with bounded
//! computation.
//!
//! Terms are regular term graphs, hash-consed in a [`terms::TermStore`]. A
//! [`grammar::Grammar`] induces a labelled transition system on them
//! ([`lts`]); [`equiv::EqOracle`] computes eq-levels below a cutoff;
//! [`plays`] builds optimal plays and their balanced modifications; and
//! [`bases`] covers `(n,s,g)`-sequences and candidate bases at toy scale.
//!
//! Examples, one per capability (`cargo run --release --example NAME`):
//!
//! - `fig1_terms`: sizes, substitution and the iterated substitution
//! - `grammar_constants`: sink words and derived constants of a grammar
//! - `stair_paths`: sink segments, stairs and simple-stair decompositions
//! - `eq_levels`: parallel eq-levels of sampled pairs
//! - `optimal_play`: a play in which the level drops by one per round
//! - `balanced_battery`: balancing and bound checks over bundled grammars
//! - `stair_sequences`: crucial segments as `(n,s,g)`-sequences, reduced
//! - `candidate_bases`: full bases against the threshold search
//!
//! The `fogbisim` binary wraps the same functions; see [`cli`].

pub mod bases;
pub mod cli;
pub mod equiv;
pub mod grammar;
pub mod lts;
pub mod plays;
pub mod sample;
pub mod terms;
