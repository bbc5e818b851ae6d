//! Heuristic state evaluators with a strength knob.
//!
//! The base heuristic of each game is blended with deterministic noise keyed by
//! the state: `value = (1 − ε)·heuristic + ε·η(state, seed)`. `ε = 0` is the
//! full-strength heuristic, `ε = 1` is pure noise.

use alloc::string::String;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::game::{TICTACTOE_LINES, Game, GameError, GameState, Player, Rules};

/// A value in `[-1, 1]` from the point of view of `perspective`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub perspective: Player,
}

impl Evaluation {
    pub fn new(value: f64, perspective: Player) -> Evaluation {
        Evaluation { value, perspective }
    }

    /// The same evaluation seen from `perspective`.
    pub fn from_view(self, perspective: Player) -> f64 {
        if perspective == self.perspective {
            self.value
        } else {
            -self.value
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalProfile {
    pub game: String,
    /// Noise level ε in `[0, 1]`.
    pub quality: f64,
    pub seed: u64,
    pub id: String,
}

impl EvalProfile {
    pub fn new(game: &str, quality: f64, seed: u64) -> EvalProfile {
        EvalProfile {
            game: String::from(game),
            quality,
            seed,
            id: alloc::format!("{game}-e{quality:.2}-s{seed}"),
        }
    }

    /// The deterministic base heuristic.
    pub fn exact(game: &str) -> EvalProfile {
        EvalProfile::new(game, 0.0, 0)
    }
}

/// `x / (1 + |x|)`.
pub fn squash(x: f64) -> f64 {
    x / (1.0 + x.abs())
}

/// One SplitMix64 output for the state `key ^ seed`.
pub fn mix(key: u64, seed: u64) -> u64 {
    SplitMix64::seed_from_u64(key ^ seed).next_u64()
}

/// Deterministic pseudo-random value in `[-1, 1]` keyed by `(key, seed)`.
pub fn noise(key: u64, seed: u64) -> f64 {
    let bits = mix(key, seed) >> 11;
    let unit = bits as f64 / (1u64 << 53) as f64;
    2.0 * unit - 1.0
}

pub fn base_heuristic(game: &Game, state: &GameState, perspective: Player) -> Result<Evaluation, GameError> {
    if game.is_terminal(state) {
        return Err(GameError::TerminalState);
    }
    let value = match game {
        Game::TicTacToe(_) => tictactoe_heuristic(state, perspective),
        Game::ConnectFour(g) => connect_four_heuristic(g.windows(), state, perspective),
        Game::Othello(g) => {
            let own = state.count(perspective) as f64;
            let opp = state.count(perspective.opponent()) as f64;
            let discs = (own - opp) / (own + opp);
            let mob_own = g.placements(state, perspective).len() as f64;
            let mob_opp = g.placements(state, perspective.opponent()).len() as f64;
            let mobility = if mob_own + mob_opp > 0.0 { (mob_own - mob_opp) / (mob_own + mob_opp) } else { 0.0 };
            0.6 * discs + 0.4 * mobility
        }
    };
    Ok(Evaluation::new(value, perspective))
}

/// Lines still open for `perspective` minus lines still open for the
/// opponent, over the eight lines of the board.
fn tictactoe_heuristic(state: &GameState, perspective: Player) -> f64 {
    let open_for = |p: Player| {
        let blocker = p.opponent().stone();
        TICTACTOE_LINES.iter().filter(|line| line.iter().all(|&c| state.cells[c] != blocker)).count() as i32
    };
    f64::from(open_for(perspective) - open_for(perspective.opponent())) / 8.0
}

/// Weight of an unblocked four-cell window holding k of the player's stones.
const WINDOW_WEIGHTS: [f64; 5] = [0.0, 0.0, 1.0, 4.0, 0.0];
const WINDOW_SCALE: f64 = 8.0;

fn connect_four_heuristic(windows: &[[usize; 4]], state: &GameState, perspective: Player) -> f64 {
    let own = perspective.stone();
    let opp = perspective.opponent().stone();
    let mut sum = 0.0;
    for w in windows {
        let (mut mine, mut theirs) = (0, 0);
        for &c in w {
            if state.cells[c] == own {
                mine += 1;
            } else if state.cells[c] == opp {
                theirs += 1;
            }
        }
        if theirs == 0 {
            sum += WINDOW_WEIGHTS[mine];
        } else if mine == 0 {
            sum -= WINDOW_WEIGHTS[theirs];
        }
    }
    squash(sum / WINDOW_SCALE)
}

pub fn degraded_eval(
    profile: &EvalProfile,
    game: &Game,
    state: &GameState,
    perspective: Player,
) -> Result<Evaluation, GameError> {
    let base = base_heuristic(game, state, perspective)?;
    let eps = profile.quality;
    if eps == 0.0 {
        return Ok(base);
    }
    // noise is drawn for the first player and mirrored, which keeps the
    // evaluation antisymmetric
    let eta = Evaluation::new(noise(game.state_key(state), profile.seed), Player::First).from_view(perspective);
    let value = ((1.0 - eps) * base.value + eps * eta).clamp(-1.0, 1.0);
    Ok(Evaluation::new(value, perspective))
}

/// Terminal score on finished states, the degraded heuristic otherwise.
pub fn combined_eval(profile: &EvalProfile, game: &Game, state: &GameState, perspective: Player) -> Evaluation {
    match game.terminal_score(state, perspective) {
        Ok(score) => Evaluation::new(score, perspective),
        Err(_) => degraded_eval(profile, game, state, perspective).expect("non-terminal state"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ActionId;
    use std::vec::Vec;

    fn random_states(game: &Game, count: usize, seed: u64) -> Vec<GameState> {
        let mut rng = SplitMix64::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut s = game.initial_state();
            loop {
                let actions = game.legal_actions(&s);
                if actions.is_empty() {
                    break;
                }
                out.push(s);
                let a = actions[(rng.next_u64() % actions.len() as u64) as usize];
                s = game.apply(&s, a).unwrap();
            }
        }
        out.truncate(count);
        out
    }

    #[test]
    fn empty_tictactoe_is_even() {
        let g = Game::from_name("tictactoe").unwrap();
        let e = base_heuristic(&g, &g.initial_state(), Player::First).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn tictactoe_center_counts_open_lines() {
        let g = Game::from_name("tictactoe").unwrap();
        let s = g.apply(&g.initial_state(), ActionId(4)).unwrap();
        // X blocks the four lines through the center for O: 8 open for X, 4 for O
        let expected = (8.0 - 4.0) / 8.0;
        assert_eq!(base_heuristic(&g, &s, Player::First).unwrap().value, expected);
        assert_eq!(base_heuristic(&g, &s, Player::Second).unwrap().value, -expected);
    }

    #[test]
    fn terminal_state_is_rejected() {
        let g = Game::from_name("tictactoe").unwrap();
        let s = g.parse_state("XXX/OO./... O").unwrap();
        assert_eq!(base_heuristic(&g, &s, Player::First), Err(GameError::TerminalState));
        let p = EvalProfile::exact("tictactoe");
        assert_eq!(degraded_eval(&p, &g, &s, Player::First), Err(GameError::TerminalState));
    }

    #[test]
    fn evaluators_are_antisymmetric_and_bounded() {
        for name in ["tictactoe", "connect4", "othello6"] {
            let g = Game::from_name(name).unwrap();
            let noisy = EvalProfile::new(name, 0.7, 99);
            for s in random_states(&g, 3_000, 7) {
                for profile in [EvalProfile::exact(name), noisy.clone()] {
                    let a = degraded_eval(&profile, &g, &s, Player::First).unwrap().value;
                    let b = degraded_eval(&profile, &g, &s, Player::Second).unwrap().value;
                    assert_eq!(a, -b, "{name}");
                    assert!((-1.0..=1.0).contains(&a), "{name}: {a}");
                }
            }
        }
    }

    #[test]
    fn zero_noise_is_the_base_heuristic() {
        for name in ["tictactoe", "connect4", "othello6"] {
            let g = Game::from_name(name).unwrap();
            let profile = EvalProfile::new(name, 0.0, 12345);
            for s in random_states(&g, 1_000, 3) {
                let base = base_heuristic(&g, &s, Player::First).unwrap();
                assert_eq!(degraded_eval(&profile, &g, &s, Player::First).unwrap(), base);
            }
        }
    }

    #[test]
    fn pure_noise_is_keyed_and_centered() {
        let g = Game::from_name("connect4").unwrap();
        let profile = EvalProfile::new("connect4", 1.0, 42);
        let states = random_states(&g, 10_000, 11);
        let mut sum = 0.0;
        for s in &states {
            let v = degraded_eval(&profile, &g, s, Player::First).unwrap().value;
            assert_eq!(v, degraded_eval(&profile, &g, s, Player::First).unwrap().value);
            sum += v;
        }
        let mean = sum / states.len() as f64;
        assert!(mean.abs() <= 0.05, "mean {mean}");
    }

    #[test]
    fn combined_eval_switches_on_terminal() {
        let g = Game::from_name("tictactoe").unwrap();
        let p = EvalProfile::exact("tictactoe");
        let win = g.parse_state("XXX/OO./... O").unwrap();
        let v = combined_eval(&p, &g, &win, Player::First).value;
        assert_eq!(v, g.terminal_score(&win, Player::First).unwrap());
        let draw = g.parse_state("XOX/XOO/OXX O").unwrap();
        assert_eq!(combined_eval(&p, &g, &draw, Player::Second).value, 0.0);
        let open = g.initial_state();
        assert_eq!(combined_eval(&p, &g, &open, Player::First).value, 0.0);
    }

    #[test]
    fn squash_is_odd_and_bounded() {
        for x in [-1e9, -3.0, -0.5, 0.0, 0.25, 7.0, 1e12] {
            assert_eq!(squash(-x), -squash(x));
            assert!(squash(x).abs() < 1.0);
        }
    }
}
