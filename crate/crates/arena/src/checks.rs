//! Brute-force checks against the negamax oracle, shared by `arena oracle`
//! and the acceptance suite.

use std::collections::HashMap;

use balance_core::eval::{mix, EvalProfile};
use balance_core::oracle::Oracle;
use balance_core::search::{search, SearchConfig, TranspositionTable};
use balance_core::{AgentSpec, Budget, Game, GameState, NoClock, Player, Rules, Variant};

use crate::runner::{play_match, Side};

/// Resolved table entries compared with the oracle, for one variant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Soundness {
    pub variant: Variant,
    pub searches: usize,
    pub resolved: usize,
    pub violations: usize,
    /// First mismatch: board, search `c`, oracle value (root perspective).
    pub example: Option<(String, i8, i8)>,
}

/// A position `plies` random moves from the start, or earlier if the game ends.
pub fn random_opening(game: &Game, plies: usize, seed: u64) -> GameState {
    let mut state = game.initial_state();
    for i in 0..plies {
        let actions = game.legal_actions(&state);
        if actions.is_empty() {
            break;
        }
        let pick = (mix(seed, i as u64) % actions.len() as u64) as usize;
        let next = game.apply(&state, actions[pick]).expect("legal action");
        if game.is_terminal(&next) {
            break;
        }
        state = next;
    }
    state
}

/// Runs `searches` searches of `variant` from random openings and checks
/// every resolved entry's `c` against the oracle.
pub fn oracle_soundness(
    game: &Game,
    oracle: &mut Oracle<'_>,
    variant: Variant,
    searches: usize,
    iterations: u64,
    seed: u64,
) -> Soundness {
    let mut report = Soundness { variant, searches, resolved: 0, violations: 0, example: None };
    for i in 0..searches {
        let s = mix(seed, i as u64);
        let root = random_opening(game, i % 6, s);
        let quality = [0.0, 0.3, 0.8][i % 3];
        let mut config = SearchConfig::new(variant, Budget::Iterations(iterations), EvalProfile::new(game.name(), quality, s));
        if variant == Variant::MinibalPSolvedWin && i % 2 == 1 {
            config.depth_bound = Some(3);
        }
        let mut table = TranspositionTable::new(root.to_move);
        search(game, &root, &config, &mut table, &NoClock).expect("search from a non-terminal opening");
        for (state, c) in resolved_entries(game, &table, root) {
            report.resolved += 1;
            let truth = oracle.value_for(&state, table.root_player).expect("oracle");
            if truth != c {
                report.violations += 1;
                report.example.get_or_insert((game.format_state(&state), c, truth));
            }
        }
    }
    report
}

/// `(state, c)` of every resolved entry reachable from `root`.
fn resolved_entries(game: &Game, table: &TranspositionTable, root: GameState) -> Vec<(GameState, i8)> {
    let mut seen: HashMap<u64, GameState> = HashMap::new();
    let mut stack = vec![root];
    while let Some(state) = stack.pop() {
        let key = game.state_key(&state);
        if seen.insert(key, state).is_some() {
            continue;
        }
        if let Some(entry) = table.get(key) {
            for edge in &entry.edges {
                stack.push(game.apply(&state, edge.action).expect("table edges are legal"));
            }
        }
    }
    seen.into_iter()
        .filter_map(|(key, state)| table.get(key).filter(|e| e.r).map(|e| (state, e.c)))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Convergence {
    pub root_c: i8,
    pub root_r: bool,
    pub oracle_value: i8,
    pub games: usize,
    pub wins: usize,
    pub draws: usize,
    pub losses: usize,
}

/// Unlimited-budget Minimax on `game` from the start, then `games` matches
/// against a seeded random mover, alternating seats.
pub fn minimax_convergence(game: &Game, games: usize, seed: u64) -> Convergence {
    let root = game.initial_state();
    let evaluator = EvalProfile::exact(game.name());
    let config = SearchConfig::new(Variant::Minimax, Budget::Iterations(u64::MAX), evaluator.clone());
    let mut table = TranspositionTable::new(Player::First);
    let res = search(game, &root, &config, &mut table, &NoClock).expect("search");
    let oracle_value = Oracle::new(game).value(&root).expect("oracle");

    let mut out = Convergence {
        root_c: res.root_entry.c,
        root_r: res.root_entry.r,
        oracle_value,
        games,
        wins: 0,
        draws: 0,
        losses: 0,
    };
    let agent = AgentSpec::ubfm("minimax", Variant::Minimax, evaluator, Budget::Iterations(u64::MAX));
    for i in 0..games {
        let random = AgentSpec::random("random", mix(seed, i as u64));
        let first = if i % 2 == 0 { Side::A } else { Side::B };
        let record = play_match(game, &agent, &random, first, mix(seed, !(i as u64))).expect("match");
        match record.b {
            1 => out.wins += 1,
            0 => out.draws += 1,
            _ => out.losses += 1,
        }
    }
    out
}
