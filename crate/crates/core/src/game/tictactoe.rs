use alloc::string::String;
use alloc::vec::Vec;

use super::{format_cell, parse_cell, ActionId, GameError, GameState, Player, Rules, ScoreKind, Winner, Zobrist};

/// The eight winning lines of the 3×3 board.
pub const LINES: [[usize; 3]; 8] = [
    [0, 1, 2],
    [3, 4, 5],
    [6, 7, 8],
    [0, 3, 6],
    [1, 4, 7],
    [2, 5, 8],
    [0, 4, 8],
    [2, 4, 6],
];

#[derive(Clone, Debug)]
pub struct TicTacToe {
    zobrist: Zobrist,
}

impl TicTacToe {
    pub fn new() -> TicTacToe {
        TicTacToe { zobrist: Zobrist::new(9) }
    }
}

impl Default for TicTacToe {
    fn default() -> Self {
        Self::new()
    }
}

impl Rules for TicTacToe {
    fn name(&self) -> &str {
        "tictactoe"
    }
    fn width(&self) -> usize {
        3
    }
    fn height(&self) -> usize {
        3
    }
    fn max_plies(&self) -> u16 {
        9
    }
    fn score_kind(&self) -> ScoreKind {
        ScoreKind::BinaryWithDepthHeuristic
    }
    fn initial_state(&self) -> GameState {
        GameState::empty()
    }

    fn legal_actions(&self, state: &GameState) -> Vec<ActionId> {
        if self.winner(state).is_some() {
            return Vec::new();
        }
        (0..9u16).filter(|&c| state.cells[c as usize] == 0).map(ActionId).collect()
    }

    fn apply(&self, state: &GameState, action: ActionId) -> Result<GameState, GameError> {
        let cell = action.0 as usize;
        if cell >= 9 || state.cells[cell] != 0 || self.winner(state).is_some() {
            return Err(GameError::IllegalAction(action));
        }
        let mut next = *state;
        next.cells[cell] = state.to_move.stone();
        next.to_move = state.to_move.opponent();
        next.move_count += 1;
        Ok(next)
    }

    fn winner(&self, state: &GameState) -> Option<Winner> {
        for line in LINES {
            let s = state.cells[line[0]];
            if s != 0 && s == state.cells[line[1]] && s == state.cells[line[2]] {
                let p = if s == 1 { Player::First } else { Player::Second };
                return Some(Winner::Player(p));
            }
        }
        if state.move_count >= self.max_plies() || state.cells[..9].iter().all(|&c| c != 0) {
            return Some(Winner::Draw);
        }
        None
    }

    fn zobrist(&self) -> &Zobrist {
        &self.zobrist
    }

    fn parse_action(&self, text: &str) -> Result<ActionId, GameError> {
        parse_cell(text.trim(), 3, 3)
            .map(|c| ActionId(c as u16))
            .ok_or_else(|| GameError::BadActionNotation(String::from(text)))
    }

    fn format_action(&self, action: ActionId) -> String {
        format_cell(action.0 as usize, 3)
    }
}
