//! Game abstraction and the desk-scale game suite.
//!
//! Every game in the suite is played on a grid of at most [`MAX_CELLS`] cells
//! holding stones of the two players, so a single [`GameState`] layout serves
//! all of them. Rules are supplied by the [`Rules`] implementations and the
//! [`Game`] enum dispatches over them at runtime.

mod connect_four;
mod othello;
mod tictactoe;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

pub use connect_four::ConnectFour;
pub use othello::Othello;
pub use tictactoe::{TicTacToe, LINES as TICTACTOE_LINES};

/// Largest board supported by [`GameState`].
pub const MAX_CELLS: usize = 64;

/// Engine-level safety cap on the length of any game; hitting it is a draw.
pub const PLY_CAP: u16 = 400;

/// Seed of the Zobrist code tables. Fixed so table keys are stable across runs.
pub const ZOBRIST_SEED: u64 = 0x5EED_BA1A_4CED_0001;

/// Multiplier of the depth heuristic: a win at ply `t` scores `1 - λ·t/max_plies`.
pub const DEPTH_LAMBDA: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Player {
    First,
    Second,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::First => Player::Second,
            Player::Second => Player::First,
        }
    }

    /// Stone value stored in [`GameState::cells`].
    pub fn stone(self) -> u8 {
        match self {
            Player::First => 1,
            Player::Second => 2,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Player::First => 'X',
            Player::Second => 'O',
        }
    }

    pub fn from_symbol(c: char) -> Option<Player> {
        match c {
            'X' | 'x' => Some(Player::First),
            'O' | 'o' => Some(Player::Second),
            _ => None,
        }
    }
}

/// Compact action descriptor: a cell index for placement games, a column for
/// Connect-Four, or [`ActionId::PASS`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ActionId(pub u16);

impl ActionId {
    pub const PASS: ActionId = ActionId(u16::MAX);
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameState {
    /// Row-major cells, 0 = empty, otherwise [`Player::stone`].
    pub cells: [u8; MAX_CELLS],
    pub to_move: Player,
    /// Plies played so far, passes included.
    pub move_count: u16,
}

impl GameState {
    pub fn empty() -> GameState {
        GameState { cells: [0; MAX_CELLS], to_move: Player::First, move_count: 0 }
    }

    pub fn stone_at(&self, cell: usize) -> Option<Player> {
        match self.cells[cell] {
            1 => Some(Player::First),
            2 => Some(Player::Second),
            _ => None,
        }
    }

    pub fn count(&self, player: Player) -> usize {
        let stone = player.stone();
        self.cells.iter().filter(|&&c| c == stone).count()
    }
}

impl fmt::Debug for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stones: String = self.cells.iter().map(|&c| cell_char(c)).collect();
        f.debug_struct("GameState")
            .field("cells", &stones.trim_end_matches('.'))
            .field("to_move", &self.to_move)
            .field("move_count", &self.move_count)
            .finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ScoreKind {
    /// `b · (1 − λ · move_count / max_plies)`: faster wins are worth more.
    BinaryWithDepthHeuristic,
    /// Disc margin over the number of cells.
    MarginNormalized,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("illegal action {0:?}")]
    IllegalAction(ActionId),
    #[error("state is not terminal")]
    NotTerminal,
    #[error("state is terminal")]
    TerminalState,
    #[error("unknown game `{0}`")]
    UnknownGame(String),
    #[error("cannot parse action `{0}`")]
    BadActionNotation(String),
    #[error("cannot parse board: {0}")]
    BadBoardNotation(String),
}

/// Who won a finished game.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    Player(Player),
    Draw,
}

/// A pluggable rule set.
///
/// Implementors provide the board geometry, move generation and win detection;
/// outcome scoring, hashing and notation have shared default implementations.
pub trait Rules {
    fn name(&self) -> &str;
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn max_plies(&self) -> u16;
    fn score_kind(&self) -> ScoreKind;
    fn initial_state(&self) -> GameState;

    /// Legal actions in canonical order; empty iff the state is terminal.
    fn legal_actions(&self, state: &GameState) -> Vec<ActionId>;

    fn apply(&self, state: &GameState, action: ActionId) -> Result<GameState, GameError>;

    /// `Some` once the game is over (including the ply cap, which is a draw).
    fn winner(&self, state: &GameState) -> Option<Winner>;

    fn zobrist(&self) -> &Zobrist;

    fn parse_action(&self, text: &str) -> Result<ActionId, GameError>;

    fn format_action(&self, action: ActionId) -> String;

    fn cells(&self) -> usize {
        self.width() * self.height()
    }

    fn is_terminal(&self, state: &GameState) -> bool {
        self.winner(state).is_some()
    }

    /// +1 / 0 / −1 for a win / draw / loss of `perspective`.
    fn binary_outcome(&self, state: &GameState, perspective: Player) -> Result<i8, GameError> {
        match self.winner(state) {
            None => Err(GameError::NotTerminal),
            Some(Winner::Draw) => Ok(0),
            Some(Winner::Player(p)) if p == perspective => Ok(1),
            Some(Winner::Player(_)) => Ok(-1),
        }
    }

    /// Normalized terminal evaluation in `[-1, 1]`, sign-consistent with
    /// [`Rules::binary_outcome`].
    fn terminal_score(&self, state: &GameState, perspective: Player) -> Result<f64, GameError> {
        let b = self.binary_outcome(state, perspective)?;
        if b == 0 {
            return Ok(0.0);
        }
        let score = match self.score_kind() {
            ScoreKind::BinaryWithDepthHeuristic => {
                let depth = f64::from(state.move_count) / f64::from(self.max_plies());
                f64::from(b) * (1.0 - DEPTH_LAMBDA * depth.min(1.0))
            }
            ScoreKind::MarginNormalized => {
                let own = state.count(perspective) as f64;
                let opp = state.count(perspective.opponent()) as f64;
                let margin = (own - opp) / self.cells() as f64;
                // keep the sign of the binary outcome even for degenerate margins
                if margin * f64::from(b) > 0.0 {
                    margin
                } else {
                    f64::from(b) / self.cells() as f64
                }
            }
        };
        Ok(score)
    }

    fn state_key(&self, state: &GameState) -> u64 {
        self.zobrist().key(state, self.cells())
    }

    /// Plain-text board: rows top to bottom joined by `/`, then the side to move,
    /// e.g. `X.O/.X./..O O`.
    fn format_state(&self, state: &GameState) -> String {
        let mut out = String::with_capacity(self.cells() + self.height() + 2);
        for row in 0..self.height() {
            if row > 0 {
                out.push('/');
            }
            for col in 0..self.width() {
                out.push(cell_char(state.cells[row * self.width() + col]));
            }
        }
        out.push(' ');
        out.push(state.to_move.symbol());
        out
    }

    /// Inverse of [`Rules::format_state`]. The ply counter is rebuilt from the
    /// stones on the board (passes cannot be recovered from a position).
    fn parse_state(&self, text: &str) -> Result<GameState, GameError> {
        let bad = |msg: &str| GameError::BadBoardNotation(String::from(msg));
        let mut parts = text.split_whitespace();
        let board = parts.next().ok_or_else(|| bad("empty input"))?;
        let side = parts.next().ok_or_else(|| bad("missing side to move"))?;
        if parts.next().is_some() {
            return Err(bad("trailing input"));
        }
        let mut side_chars = side.chars();
        let to_move = match (side_chars.next().and_then(Player::from_symbol), side_chars.next()) {
            (Some(p), None) => p,
            _ => return Err(bad("side to move must be X or O")),
        };
        let rows: Vec<&str> = board.split('/').collect();
        if rows.len() != self.height() {
            return Err(bad("wrong number of rows"));
        }
        let mut state = GameState::empty();
        for (r, row) in rows.iter().enumerate() {
            if row.chars().count() != self.width() {
                return Err(bad("wrong row length"));
            }
            for (c, ch) in row.chars().enumerate() {
                state.cells[r * self.width() + c] = match ch {
                    '.' => 0,
                    other => Player::from_symbol(other).ok_or_else(|| bad("unknown cell character"))?.stone(),
                };
            }
        }
        state.to_move = to_move;
        let initial = self.initial_state().cells.iter().filter(|&&c| c != 0).count();
        let stones = state.cells.iter().filter(|&&c| c != 0).count();
        state.move_count = stones.saturating_sub(initial) as u16;
        Ok(state)
    }
}

pub(crate) fn cell_char(stone: u8) -> char {
    match stone {
        1 => 'X',
        2 => 'O',
        _ => '.',
    }
}

/// Zobrist codes for one board size: one per (cell, stone) and one for the
/// second player being to move.
#[derive(Clone, Debug)]
pub struct Zobrist {
    stones: Vec<[u64; 2]>,
    second_to_move: u64,
}

impl Zobrist {
    pub fn new(cells: usize) -> Zobrist {
        let mut rng = SplitMix64::seed_from_u64(ZOBRIST_SEED);
        let stones = (0..cells).map(|_| [rng.next_u64(), rng.next_u64()]).collect();
        Zobrist { stones, second_to_move: rng.next_u64() }
    }

    pub fn key(&self, state: &GameState, cells: usize) -> u64 {
        let mut key = match state.to_move {
            Player::First => 0,
            Player::Second => self.second_to_move,
        };
        for (cell, codes) in state.cells[..cells].iter().zip(&self.stones) {
            match cell {
                1 => key ^= codes[0],
                2 => key ^= codes[1],
                _ => {}
            }
        }
        key
    }
}

/// Runtime-selected game of the suite.
#[derive(Clone, Debug)]
pub enum Game {
    TicTacToe(TicTacToe),
    ConnectFour(ConnectFour),
    Othello(Othello),
}

impl Game {
    /// Identifiers accepted by [`Game::from_name`].
    pub const NAMES: [&'static str; 4] = ["tictactoe", "connect4", "connect4-5x4", "othello6"];

    /// Looks a game up by identifier. Connect-Four also accepts `connect4-WxH`.
    pub fn from_name(name: &str) -> Result<Game, GameError> {
        let unknown = || GameError::UnknownGame(String::from(name));
        match name {
            "tictactoe" => Ok(Game::TicTacToe(TicTacToe::new())),
            "connect4" => Ok(Game::ConnectFour(ConnectFour::new(7, 6))),
            "othello6" => Ok(Game::Othello(Othello::new(6))),
            _ => {
                let dims = name.strip_prefix("connect4-").ok_or_else(unknown)?;
                let (w, h) = dims.split_once('x').ok_or_else(unknown)?;
                let w: usize = w.parse().map_err(|_| unknown())?;
                let h: usize = h.parse().map_err(|_| unknown())?;
                if !(4..=9).contains(&w) || !(4..=9).contains(&h) || w * h > MAX_CELLS {
                    return Err(unknown());
                }
                Ok(Game::ConnectFour(ConnectFour::new(w, h)))
            }
        }
    }

    fn rules(&self) -> &dyn Rules {
        match self {
            Game::TicTacToe(g) => g,
            Game::ConnectFour(g) => g,
            Game::Othello(g) => g,
        }
    }
}

impl Rules for Game {
    fn name(&self) -> &str {
        self.rules().name()
    }
    fn width(&self) -> usize {
        self.rules().width()
    }
    fn height(&self) -> usize {
        self.rules().height()
    }
    fn max_plies(&self) -> u16 {
        self.rules().max_plies()
    }
    fn score_kind(&self) -> ScoreKind {
        self.rules().score_kind()
    }
    fn initial_state(&self) -> GameState {
        self.rules().initial_state()
    }
    fn legal_actions(&self, state: &GameState) -> Vec<ActionId> {
        self.rules().legal_actions(state)
    }
    fn apply(&self, state: &GameState, action: ActionId) -> Result<GameState, GameError> {
        self.rules().apply(state, action)
    }
    fn winner(&self, state: &GameState) -> Option<Winner> {
        self.rules().winner(state)
    }
    fn zobrist(&self) -> &Zobrist {
        self.rules().zobrist()
    }
    fn parse_action(&self, text: &str) -> Result<ActionId, GameError> {
        self.rules().parse_action(text)
    }
    fn format_action(&self, action: ActionId) -> String {
        self.rules().format_action(action)
    }
}

/// `a1`-style cell notation: column letter, then 1-based row from the top.
pub(crate) fn format_cell(cell: usize, width: usize) -> String {
    let mut s = String::new();
    s.push((b'a' + (cell % width) as u8) as char);
    s.push_str(&alloc::format!("{}", cell / width + 1));
    s
}

pub(crate) fn parse_cell(text: &str, width: usize, height: usize) -> Option<usize> {
    let mut chars = text.chars();
    let col = chars.next()?.to_ascii_lowercase();
    if !col.is_ascii_lowercase() {
        return None;
    }
    let col = (col as u8 - b'a') as usize;
    let row: usize = chars.as_str().parse().ok()?;
    (col < width && (1..=height).contains(&row)).then(|| (row - 1) * width + col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn player_flip_round_trips() {
        assert_eq!(Player::First.opponent(), Player::Second);
        assert_eq!(Player::Second.opponent().opponent(), Player::Second);
    }

    #[test]
    fn game_lookup() {
        assert!(matches!(Game::from_name("connect4-5x4"), Ok(Game::ConnectFour(_))));
        assert_eq!(Game::from_name("connect4-5x4").unwrap().cells(), 20);
        assert!(matches!(Game::from_name("chess"), Err(GameError::UnknownGame(_))));
        assert!(Game::from_name("connect4-20x20").is_err());
        for name in Game::NAMES {
            assert!(Game::from_name(name).is_ok(), "{name}");
        }
    }

    #[test]
    fn cell_notation() {
        assert_eq!(format_cell(0, 3), "a1");
        assert_eq!(format_cell(5, 3), "c2");
        assert_eq!(parse_cell("c2", 3, 3), Some(5));
        assert_eq!(parse_cell("d1", 3, 3), None);
        assert_eq!(parse_cell("a4", 3, 3), None);
    }

    #[test]
    fn state_text_round_trip() {
        for name in Game::NAMES {
            let game = Game::from_name(name).unwrap();
            let mut state = game.initial_state();
            for _ in 0..3 {
                let a = game.legal_actions(&state)[0];
                state = game.apply(&state, a).unwrap();
            }
            let text = game.format_state(&state);
            let back = game.parse_state(&text).unwrap();
            assert_eq!(back, state, "{name}: {text}");
        }
    }

    #[test]
    fn bad_board_text_is_rejected() {
        let game = Game::from_name("tictactoe").unwrap();
        assert!(game.parse_state("...").is_err());
        assert!(game.parse_state(".../.../... Z").is_err());
        assert!(game.parse_state("..../.../... X").is_err());
        assert!(game.parse_state(".../.Q./... X").is_err());
    }
}
