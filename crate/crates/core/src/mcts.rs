//! Plain UCT Monte-Carlo Tree Search with uniform random playouts and no
//! evaluation function.

use alloc::vec::Vec;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::game::{ActionId, Game, GameError, GameState, Rules};
use crate::search::{Budget, Clock};

/// `sqrt(2)`.
pub const DEFAULT_EXPLORATION: f64 = core::f64::consts::SQRT_2;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MctsError {
    #[error("root state has no legal actions")]
    NoLegalActions,
    #[error("search budget is zero")]
    ZeroBudget,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// A tree node. `total_reward` is from the point of view of the player who
/// moved into this node, so a parent maximizes its children's mean reward.
#[derive(Clone, Debug)]
pub struct MctsNode {
    pub state: GameState,
    pub action: Option<ActionId>,
    pub visits: u32,
    pub total_reward: f64,
    pub children: Vec<usize>,
    pub untried: Vec<ActionId>,
}

impl MctsNode {
    fn new(game: &Game, state: GameState, action: Option<ActionId>) -> MctsNode {
        let mut untried = game.legal_actions(&state);
        // expansion pops from the back, so reverse to expand in canonical order
        untried.reverse();
        MctsNode { state, action, visits: 0, total_reward: 0.0, children: Vec::new(), untried }
    }

    pub fn mean(&self) -> f64 {
        if self.visits == 0 {
            0.0
        } else {
            self.total_reward / f64::from(self.visits)
        }
    }
}

/// Child of `parent` maximizing `mean + c·sqrt(ln N / n)`; ties go to the
/// earlier child.
pub fn uct_select(nodes: &[MctsNode], parent: usize, exploration: f64) -> usize {
    let log_n = libm::log(f64::from(nodes[parent].visits.max(1)));
    let score = |i: usize| {
        let child = &nodes[i];
        child.mean() + exploration * libm::sqrt(log_n / f64::from(child.visits.max(1)))
    };
    let mut best = nodes[parent].children[0];
    let mut best_score = score(best);
    for &i in &nodes[parent].children[1..] {
        let s = score(i);
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

#[derive(Clone, Debug)]
pub struct MctsResult {
    pub chosen: ActionId,
    pub iterations: u64,
    pub root_visits: u32,
}

pub fn mcts_search(
    game: &Game,
    root: &GameState,
    budget: Budget,
    exploration: f64,
    seed: u64,
    clock: &dyn Clock,
) -> Result<MctsResult, MctsError> {
    if game.is_terminal(root) {
        return Err(MctsError::NoLegalActions);
    }
    if budget.is_zero() {
        return Err(MctsError::ZeroBudget);
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut nodes = alloc::vec![MctsNode::new(game, *root, None)];
    let start = clock.now();
    let mut iterations = 0u64;
    let mut path = Vec::new();

    while budget.allows(iterations, clock.now() - start) {
        path.clear();
        path.push(0);
        let mut current = 0;
        // selection
        while nodes[current].untried.is_empty() && !nodes[current].children.is_empty() {
            current = uct_select(&nodes, current, exploration);
            path.push(current);
        }
        // expansion
        if let Some(action) = nodes[current].untried.pop() {
            let state = game.apply(&nodes[current].state, action)?;
            let child = nodes.len();
            nodes.push(MctsNode::new(game, state, Some(action)));
            nodes[current].children.push(child);
            current = child;
            path.push(child);
        }
        // simulation, scored for the player who moved into `current`
        let leaf = &nodes[current];
        let mover = leaf.state.to_move.opponent();
        let reward = f64::from(game.binary_outcome(&playout(game, leaf.state, &mut rng)?, mover)?);
        // backpropagation, flipping sign at every ply
        let mut r = reward;
        for &i in path.iter().rev() {
            nodes[i].visits += 1;
            nodes[i].total_reward += r;
            r = -r;
        }
        iterations += 1;
        debug_assert!(visits_consistent(&nodes));
    }

    let root_node = &nodes[0];
    let mut best: Option<&MctsNode> = None;
    for &i in &root_node.children {
        let child = &nodes[i];
        if best.map_or(true, |b| child.visits > b.visits) {
            best = Some(child);
        }
    }
    // children were expanded in canonical order, so the first maximum wins ties;
    // an unexpanded root (zero iterations) falls back to the first legal action
    let chosen = match best {
        Some(node) => node.action.expect("child has an action"),
        None => game.legal_actions(root)[0],
    };
    Ok(MctsResult { chosen, iterations, root_visits: root_node.visits })
}

fn playout(game: &Game, mut state: GameState, rng: &mut Xoshiro256PlusPlus) -> Result<GameState, GameError> {
    loop {
        let actions = game.legal_actions(&state);
        if actions.is_empty() {
            return Ok(state);
        }
        let pick = (rng.next_u64() % actions.len() as u64) as usize;
        state = game.apply(&state, actions[pick])?;
    }
}

fn visits_consistent(nodes: &[MctsNode]) -> bool {
    nodes.iter().all(|node| {
        let below: u32 = node.children.iter().map(|&c| nodes[c].visits).sum();
        node.visits >= below && node.total_reward.abs() <= f64::from(node.visits)
    })
}
