//! Unbounded Minimax with completion and the Minibal balanced-play variants.
//!
//! Each iteration descends from the root along the variant's preferred
//! unresolved actions until it reaches a state that has not been expanded yet,
//! evaluates all successors of that state, and backs values and resolution up
//! the descent path. The loop stops when the budget is spent or the root is
//! resolved. The table survives between calls so an agent keeps its tree
//! across the moves of a match.

pub mod rules;
mod table;

use alloc::vec::Vec;

use crate::eval::{combined_eval, EvalProfile};
use crate::game::{ActionId, Game, GameError, GameState, Player, Rules};

pub use rules::{ChildLabel, Phase, Role};
pub use table::{Edge, NodeEntry, TranspositionTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Variant {
    Minimax,
    MinibalN,
    MinibalP,
    MinibalPSolvedWin,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Minimax, Variant::MinibalN, Variant::MinibalP, Variant::MinibalPSolvedWin];

    pub fn label(self) -> &'static str {
        match self {
            Variant::Minimax => "minimax",
            Variant::MinibalN => "minibal_n",
            Variant::MinibalP => "minibal_p",
            Variant::MinibalPSolvedWin => "minibal_p_solved_win",
        }
    }
}

/// How long a search may run.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Budget {
    /// Number of descents (or MCTS iterations).
    Iterations(u64),
    /// Wall-clock seconds per move, measured with the caller's [`Clock`].
    Seconds(f64),
}

impl Budget {
    pub fn is_zero(&self) -> bool {
        match *self {
            Budget::Iterations(n) => n == 0,
            Budget::Seconds(s) => !(s > 0.0),
        }
    }

    /// Whether another iteration may start.
    pub fn allows(&self, done: u64, elapsed: f64) -> bool {
        match *self {
            Budget::Iterations(n) => done < n,
            Budget::Seconds(s) => elapsed < s,
        }
    }
}

/// Monotonic time source in seconds. Supplied by the caller since the core
/// crate has no access to a system clock.
pub trait Clock {
    fn now(&self) -> f64;
}

/// A clock that never advances, for iteration budgets.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now(&self) -> f64 {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub variant: Variant,
    /// Proof-depth bound of the solved-win rule.
    pub depth_bound: Option<u16>,
    pub budget: Budget,
    pub evaluator: EvalProfile,
    pub seed: u64,
    /// Keep the table between calls (tree reuse within a match).
    pub reuse_table: bool,
}

impl SearchConfig {
    pub fn new(variant: Variant, budget: Budget, evaluator: EvalProfile) -> SearchConfig {
        SearchConfig { variant, depth_bound: None, budget, evaluator, seed: 0, reuse_table: true }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.depth_bound.is_some() && self.variant != Variant::MinibalPSolvedWin {
            return Err(SearchError::InvalidConfig("depth bound requires the solved-win variant"));
        }
        if !(0.0..=1.0).contains(&self.evaluator.quality) {
            return Err(SearchError::InvalidConfig("evaluator quality must lie in [0, 1]"));
        }
        if self.budget.is_zero() {
            return Err(SearchError::ZeroBudget);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub chosen: ActionId,
    pub root_entry: NodeEntry,
    pub iterations: u64,
    pub elapsed: f64,
    pub resolved_early: bool,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("root state has no legal actions")]
    NoLegalActions,
    #[error("state {0:#018x} is already expanded")]
    DuplicateExpansion(u64),
    #[error("search budget is zero")]
    ZeroBudget,
    #[error("invalid search configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("table belongs to {table:?} but {to_move:?} is to move")]
    PerspectiveMismatch { table: Player, to_move: Player },
    #[error(transparent)]
    Game(#[from] GameError),
}

/// One completed descent, for the optional search trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEvent {
    pub iteration: u64,
    pub path: Vec<ActionId>,
    pub expanded_key: u64,
    pub root_v: f64,
    pub root_c: i8,
    pub root_r: bool,
}

pub fn search(
    game: &Game,
    root: &GameState,
    config: &SearchConfig,
    table: &mut TranspositionTable,
    clock: &dyn Clock,
) -> Result<SearchResult, SearchError> {
    search_traced(game, root, config, table, clock, &mut |_| {})
}

/// [`search`] reporting every descent to `trace`.
pub fn search_traced(
    game: &Game,
    root: &GameState,
    config: &SearchConfig,
    table: &mut TranspositionTable,
    clock: &dyn Clock,
    trace: &mut dyn FnMut(&TraceEvent),
) -> Result<SearchResult, SearchError> {
    if game.is_terminal(root) {
        return Err(SearchError::NoLegalActions);
    }
    config.validate()?;
    if root.to_move != table.root_player {
        return Err(SearchError::PerspectiveMismatch { table: table.root_player, to_move: root.to_move });
    }
    if !config.reuse_table {
        table.clear();
    }
    let start = clock.now();
    let root_key = game.state_key(root);
    table.root_key = Some(root_key);

    let mut searcher = Searcher { game, config, table };
    if !searcher.table.get(root_key).is_some_and(|e| e.expanded) {
        searcher.expand_leaf(root, root_key)?;
    }

    let mut iterations = 0u64;
    let mut path = Vec::new();
    let mut actions = Vec::new();
    while !searcher.root_resolved(root_key) && config.budget.allows(iterations, clock.now() - start) {
        path.clear();
        actions.clear();
        let expanded_key = searcher.descend(root, root_key, &mut path, &mut actions)?;
        for &key in path.iter().rev() {
            searcher.backup(key);
        }
        iterations += 1;
        let root_entry = &searcher.table.get(root_key).expect("root entry");
        trace(&TraceEvent {
            iteration: iterations,
            path: actions.clone(),
            expanded_key,
            root_v: root_entry.v,
            root_c: root_entry.c,
            root_r: root_entry.r,
        });
    }

    let elapsed = clock.now() - start;
    let root_entry = searcher.table.get(root_key).expect("root entry").clone();
    let labels = searcher.table.child_labels(root_key);
    let role = searcher.role(root_entry.to_move);
    let best = rules::select_in_phase(&labels, config.variant, role, config.depth_bound, Phase::FinalMove)
        .ok_or(SearchError::NoLegalActions)?;
    Ok(SearchResult {
        chosen: labels[best].action,
        resolved_early: root_entry.r && config.budget.allows(iterations, elapsed),
        root_entry,
        iterations,
        elapsed,
    })
}

struct Searcher<'a> {
    game: &'a Game,
    config: &'a SearchConfig,
    table: &'a mut TranspositionTable,
}

impl Searcher<'_> {
    fn role(&self, to_move: Player) -> Role {
        if to_move == self.table.root_player {
            Role::Balanced
        } else {
            Role::Opponent
        }
    }

    fn root_resolved(&self, root_key: u64) -> bool {
        self.table.get(root_key).is_some_and(|e| e.r)
    }

    /// Walks down expanded states, counting selections, and expands the first
    /// unexpanded one. Returns the key of the expanded state.
    fn descend(
        &mut self,
        root: &GameState,
        root_key: u64,
        path: &mut Vec<u64>,
        actions: &mut Vec<ActionId>,
    ) -> Result<u64, SearchError> {
        let mut state = *root;
        let mut key = root_key;
        loop {
            let entry = self.table.get(key).expect("descent reached a state with no entry");
            if !entry.expanded {
                self.expand_leaf(&state, key)?;
                return Ok(key);
            }
            let role = self.role(entry.to_move);
            let labels = self.table.child_labels(key);
            let Some(pick) =
                rules::select_in_phase(&labels, self.config.variant, role, self.config.depth_bound, Phase::Descent)
            else {
                // reached through a transposition whose children were resolved
                // via another parent; the backup below refreshes its label
                path.push(key);
                return Ok(key);
            };
            let entry = self.table.get_mut(key).expect("entry");
            entry.edges[pick].n += 1;
            let edge = entry.edges[pick].clone();
            path.push(key);
            actions.push(edge.action);
            state = self.game.apply(&state, edge.action)?;
            key = edge.child;
        }
    }

    /// Evaluates every successor of `state` that has no entry yet, links them
    /// and labels `state` from them.
    fn expand_leaf(&mut self, state: &GameState, key: u64) -> Result<(), SearchError> {
        if self.table.get(key).is_some_and(|e| e.expanded) {
            return Err(SearchError::DuplicateExpansion(key));
        }
        if self.game.is_terminal(state) {
            let leaf = self.leaf_entry(state);
            self.table.insert(key, leaf);
            return Ok(());
        }
        let mut edges = Vec::new();
        for action in self.game.legal_actions(state) {
            let child = self.game.apply(state, action)?;
            let child_key = self.game.state_key(&child);
            if !self.table.contains(child_key) {
                let leaf = self.leaf_entry(&child);
                self.table.insert(child_key, leaf);
            }
            edges.push(Edge { action, child: child_key, n: 0 });
        }
        let mut entry = NodeEntry::leaf(0.0, 0, false, state.to_move);
        entry.edges = edges;
        entry.expanded = true;
        self.table.insert(key, entry);
        self.backup(key);
        Ok(())
    }

    fn leaf_entry(&self, state: &GameState) -> NodeEntry {
        let root_player = self.table.root_player;
        let v = combined_eval(&self.config.evaluator, self.game, state, root_player).value;
        match self.game.binary_outcome(state, root_player) {
            Ok(b) => NodeEntry::leaf(v, b, true, state.to_move),
            Err(_) => NodeEntry::leaf(v, 0, false, state.to_move),
        }
    }

    /// Recomputes `(v, c, r, rd)` of an expanded node from its children.
    fn backup(&mut self, key: u64) {
        let labels = self.table.child_labels(key);
        let entry = self.table.get(key).expect("entry");
        let role = self.role(entry.to_move);
        let (variant, bound) = (self.config.variant, self.config.depth_bound);
        let (v, c) = rules::backup_entry(&labels, variant, role, bound);
        let resolution = rules::backup_resolution(&labels, variant, role, bound);
        let entry = self.table.get_mut(key).expect("entry");
        entry.v = v;
        entry.c = c;
        entry.r = resolution.is_some();
        entry.rd = resolution.unwrap_or(0);
    }
}
