use alloc::string::String;
use alloc::vec::Vec;

use super::{format_cell, parse_cell, ActionId, GameError, GameState, Player, Rules, ScoreKind, Winner, Zobrist};

const DIRECTIONS: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

/// Othello on an `n × n` board. X (first player) is black.
///
/// A side without a placement passes when the opponent still has one; the game
/// ends when neither side can place. Terminal states are scored by disc margin.
#[derive(Clone, Debug)]
pub struct Othello {
    size: usize,
    zobrist: Zobrist,
}

impl Othello {
    pub fn new(size: usize) -> Othello {
        assert!(size % 2 == 0 && (4..=8).contains(&size), "unsupported board size");
        Othello { size, zobrist: Zobrist::new(size * size) }
    }

    /// Cells flipped by `player` placing on `cell`, in ray order.
    pub fn flips(&self, state: &GameState, cell: usize, player: Player) -> Vec<usize> {
        let mut flipped = Vec::new();
        if state.cells[cell] != 0 {
            return flipped;
        }
        let own = player.stone();
        let opp = player.opponent().stone();
        let n = self.size as isize;
        let (row, col) = ((cell / self.size) as isize, (cell % self.size) as isize);
        for (dr, dc) in DIRECTIONS {
            let (mut r, mut c) = (row + dr, col + dc);
            let start = flipped.len();
            while r >= 0 && r < n && c >= 0 && c < n && state.cells[(r * n + c) as usize] == opp {
                flipped.push((r * n + c) as usize);
                r += dr;
                c += dc;
            }
            let bracketed = r >= 0 && r < n && c >= 0 && c < n && state.cells[(r * n + c) as usize] == own;
            if !bracketed {
                flipped.truncate(start);
            }
        }
        flipped
    }

    /// Cells where `player` may place, row-major.
    pub fn placements(&self, state: &GameState, player: Player) -> Vec<usize> {
        (0..self.size * self.size)
            .filter(|&cell| state.cells[cell] == 0 && !self.flips(state, cell, player).is_empty())
            .collect()
    }

    fn has_placement(&self, state: &GameState, player: Player) -> bool {
        (0..self.size * self.size).any(|cell| state.cells[cell] == 0 && !self.flips(state, cell, player).is_empty())
    }
}

impl Rules for Othello {
    fn name(&self) -> &str {
        "othello6"
    }
    fn width(&self) -> usize {
        self.size
    }
    fn height(&self) -> usize {
        self.size
    }
    /// Every placement fills a cell and passes cannot repeat back to back.
    fn max_plies(&self) -> u16 {
        (2 * (self.size * self.size - 4)).min(super::PLY_CAP as usize) as u16
    }
    fn score_kind(&self) -> ScoreKind {
        ScoreKind::MarginNormalized
    }

    fn initial_state(&self) -> GameState {
        let mut s = GameState::empty();
        let h = self.size / 2;
        let at = |r: usize, c: usize| r * self.size + c;
        s.cells[at(h - 1, h - 1)] = Player::Second.stone();
        s.cells[at(h, h)] = Player::Second.stone();
        s.cells[at(h - 1, h)] = Player::First.stone();
        s.cells[at(h, h - 1)] = Player::First.stone();
        s
    }

    fn legal_actions(&self, state: &GameState) -> Vec<ActionId> {
        if state.move_count >= self.max_plies() {
            return Vec::new();
        }
        let own = self.placements(state, state.to_move);
        if !own.is_empty() {
            return own.into_iter().map(|c| ActionId(c as u16)).collect();
        }
        if self.has_placement(state, state.to_move.opponent()) {
            return alloc::vec![ActionId::PASS];
        }
        Vec::new()
    }

    fn apply(&self, state: &GameState, action: ActionId) -> Result<GameState, GameError> {
        if !self.legal_actions(state).contains(&action) {
            return Err(GameError::IllegalAction(action));
        }
        let mut next = *state;
        if action != ActionId::PASS {
            let cell = action.0 as usize;
            let stone = state.to_move.stone();
            for flipped in self.flips(state, cell, state.to_move) {
                next.cells[flipped] = stone;
            }
            next.cells[cell] = stone;
        }
        next.to_move = state.to_move.opponent();
        next.move_count += 1;
        Ok(next)
    }

    fn winner(&self, state: &GameState) -> Option<Winner> {
        let over = state.move_count >= self.max_plies()
            || (!self.has_placement(state, state.to_move) && !self.has_placement(state, state.to_move.opponent()));
        if !over {
            return None;
        }
        let (x, o) = (state.count(Player::First), state.count(Player::Second));
        Some(match x.cmp(&o) {
            core::cmp::Ordering::Greater => Winner::Player(Player::First),
            core::cmp::Ordering::Less => Winner::Player(Player::Second),
            core::cmp::Ordering::Equal => Winner::Draw,
        })
    }

    fn zobrist(&self) -> &Zobrist {
        &self.zobrist
    }

    /// `b3`-style placement or `pass`.
    fn parse_action(&self, text: &str) -> Result<ActionId, GameError> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("pass") {
            return Ok(ActionId::PASS);
        }
        parse_cell(text, self.size, self.size)
            .map(|c| ActionId(c as u16))
            .ok_or_else(|| GameError::BadActionNotation(String::from(text)))
    }

    fn format_action(&self, action: ActionId) -> String {
        if action == ActionId::PASS {
            String::from("pass")
        } else {
            format_cell(action.0 as usize, self.size)
        }
    }
}
