//! Exhaustive negamax solver for small games, used to check search results.

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::game::{ActionId, Game, GameError, GameState, Player, Rules};

/// Memoized game-theoretic values, from the side to move, keyed by state key.
pub struct Oracle<'g> {
    game: &'g Game,
    memo: HashMap<u64, i8>,
}

impl<'g> Oracle<'g> {
    pub fn new(game: &'g Game) -> Oracle<'g> {
        Oracle { game, memo: HashMap::new() }
    }

    /// Value of `state` for the player to move: +1 win, 0 draw, −1 loss.
    pub fn value(&mut self, state: &GameState) -> Result<i8, GameError> {
        if self.game.is_terminal(state) {
            return self.game.binary_outcome(state, state.to_move);
        }
        let key = self.game.state_key(state);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let mut best = -1;
        for action in self.game.legal_actions(state) {
            let child = self.game.apply(state, action)?;
            let v = self.child_value(state, &child)?;
            if v > best {
                best = v;
                if best == 1 {
                    break;
                }
            }
        }
        self.memo.insert(key, best);
        Ok(best)
    }

    /// Value of `state` for `perspective`.
    pub fn value_for(&mut self, state: &GameState, perspective: Player) -> Result<i8, GameError> {
        let v = self.value(state)?;
        Ok(if state.to_move == perspective { v } else { -v })
    }

    /// Actions that keep the game-theoretic value for the player to move.
    pub fn optimal_actions(&mut self, state: &GameState) -> Result<Vec<ActionId>, GameError> {
        let target = self.value(state)?;
        let mut out = Vec::new();
        for action in self.game.legal_actions(state) {
            let child = self.game.apply(state, action)?;
            if self.child_value(state, &child)? == target {
                out.push(action);
            }
        }
        Ok(out)
    }

    /// Number of memoized non-terminal states.
    pub fn solved_states(&self) -> usize {
        self.memo.len()
    }

    // Othello passes keep the mover, so the sign flip depends on who moves next.
    fn child_value(&mut self, parent: &GameState, child: &GameState) -> Result<i8, GameError> {
        self.value_for(child, parent.to_move)
    }
}
