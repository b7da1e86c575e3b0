//! Exact solvers for zero-sum search-and-rescue games.
//!
//! A Hider places `k` targets among a set of locations and a Searcher
//! inspects the locations one at a time. Each inspection of location `i`
//! lets the search continue with probability `p_i`; otherwise the search
//! ends and the rescue fails. The Searcher maximizes the probability of
//! recovering every target, the Hider minimizes it.
//!
//! The crate provides:
//!
//! * [`game`] — instances, pure/mixed strategies and exact payoff
//!   evaluation for the game on an unstructured location set;
//! * [`indexable`] — reward set-function families, recovery of the index
//!   vector `z` that factors their marginal ratios, and the closed-form
//!   optimal strategies built from it;
//! * [`best_response`] — optimal pure responses to a known hider
//!   distribution (index rule plus a brute-force cross-check);
//! * [`tree`] — the single-target game on rooted trees under expanding
//!   search: recursive solution, strategy sampling and enumeration;
//! * [`oracle`] — an independent brute-force verifier that builds the full
//!   payoff matrix and solves it with an exact rational simplex;
//! * [`files`] / [`cli`] — the JSON instance format and the command-line
//!   front end.
//!
//! All probabilities, payoffs and values are arbitrary-precision
//! rationals; no operation rounds.

pub mod best_response;
pub mod caps;
pub mod cli;
pub mod files;
pub mod game;
pub mod indexable;
pub mod oracle;
pub mod rational;
mod sampling;
pub mod tree;

pub use caps::Caps;
pub use game::{HiderMix, HiderSet, Instance, SearchOrder, SearcherMix};
pub use indexable::{GameSolution, SetFunctionGame, SetFunctionSpec, ZIndex};
pub use oracle::{MatrixGame, OracleSolution, VerifyReport};
pub use rational::{parse_rational, rat, Rational};
pub use tree::{ExpandingSearch, RootedTree, Subsearch, TreeSolution};
