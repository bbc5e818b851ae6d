//! Balanced-play game engine.
//!
//! The crate is `no_std` (it only needs `alloc`) and contains everything that is
//! pure computation: the desk-scale game suite, heuristic evaluators, Unbounded
//! Minimax search with completion and its Minibal decision rules, a UCT baseline,
//! the exhaustive negamax oracle and the tournament metrics. Clocks, files and
//! network live in the `balance-arena` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod agent;
pub mod eval;
pub mod game;
pub mod mcts;
pub mod metrics;
pub mod oracle;
pub mod search;

pub use agent::{Agent, AgentError, AgentKind, AgentMove, AgentSpec, SearchSummary};
pub use eval::{EvalProfile, Evaluation};
pub use game::{ActionId, Game, GameError, GameState, Player, Rules, ScoreKind};
pub use search::{
    search, Budget, Clock, NoClock, NodeEntry, SearchConfig, SearchError, SearchResult, TranspositionTable, Variant,
};
