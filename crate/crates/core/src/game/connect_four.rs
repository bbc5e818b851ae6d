use alloc::string::String;
use alloc::vec::Vec;

use super::{ActionId, GameError, GameState, Player, Rules, ScoreKind, Winner, Zobrist};

/// Connect-Four on a configurable `width × height` grid; four in a row wins.
///
/// Row 0 is the top of the board. Actions are column indices.
#[derive(Clone, Debug)]
pub struct ConnectFour {
    width: usize,
    height: usize,
    windows: Vec<[usize; 4]>,
    zobrist: Zobrist,
}

impl ConnectFour {
    pub fn new(width: usize, height: usize) -> ConnectFour {
        assert!(width * height <= super::MAX_CELLS, "board too large");
        let mut windows = Vec::new();
        let at = |r: usize, c: usize| r * width + c;
        for r in 0..height {
            for c in 0..width {
                if c + 3 < width {
                    windows.push([at(r, c), at(r, c + 1), at(r, c + 2), at(r, c + 3)]);
                }
                if r + 3 < height {
                    windows.push([at(r, c), at(r + 1, c), at(r + 2, c), at(r + 3, c)]);
                }
                if r + 3 < height && c + 3 < width {
                    windows.push([at(r, c), at(r + 1, c + 1), at(r + 2, c + 2), at(r + 3, c + 3)]);
                }
                if r + 3 < height && c >= 3 {
                    windows.push([at(r, c), at(r + 1, c - 1), at(r + 2, c - 2), at(r + 3, c - 3)]);
                }
            }
        }
        ConnectFour { width, height, windows, zobrist: Zobrist::new(width * height) }
    }

    /// Every four-cell line of the board.
    pub fn windows(&self) -> &[[usize; 4]] {
        &self.windows
    }

    /// Cell a stone dropped in `column` would land on.
    pub fn landing_cell(&self, state: &GameState, column: usize) -> Option<usize> {
        (0..self.height).rev().map(|r| r * self.width + column).find(|&cell| state.cells[cell] == 0)
    }
}

impl Rules for ConnectFour {
    fn name(&self) -> &str {
        "connect4"
    }
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn max_plies(&self) -> u16 {
        (self.width * self.height) as u16
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
        // top row empty means the column has room
        (0..self.width).filter(|&c| state.cells[c] == 0).map(|c| ActionId(c as u16)).collect()
    }

    fn apply(&self, state: &GameState, action: ActionId) -> Result<GameState, GameError> {
        let column = action.0 as usize;
        if column >= self.width || self.winner(state).is_some() {
            return Err(GameError::IllegalAction(action));
        }
        let cell = self.landing_cell(state, column).ok_or(GameError::IllegalAction(action))?;
        let mut next = *state;
        next.cells[cell] = state.to_move.stone();
        next.to_move = state.to_move.opponent();
        next.move_count += 1;
        Ok(next)
    }

    fn winner(&self, state: &GameState) -> Option<Winner> {
        for w in &self.windows {
            let s = state.cells[w[0]];
            if s != 0 && w[1..].iter().all(|&c| state.cells[c] == s) {
                let p = if s == 1 { Player::First } else { Player::Second };
                return Some(Winner::Player(p));
            }
        }
        let full = state.cells[..self.width].iter().all(|&c| c != 0);
        if full || state.move_count >= self.max_plies().min(super::PLY_CAP) {
            return Some(Winner::Draw);
        }
        None
    }

    fn zobrist(&self) -> &Zobrist {
        &self.zobrist
    }

    /// `c1` … `cW`: 1-based column of the drop.
    fn parse_action(&self, text: &str) -> Result<ActionId, GameError> {
        let bad = || GameError::BadActionNotation(String::from(text));
        let digits = text.trim().strip_prefix(['c', 'C']).ok_or_else(bad)?;
        let column: usize = digits.parse().map_err(|_| bad())?;
        if column == 0 || column > self.width {
            return Err(bad());
        }
        Ok(ActionId(column as u16 - 1))
    }

    fn format_action(&self, action: ActionId) -> String {
        alloc::format!("c{}", action.0 + 1)
    }
}
