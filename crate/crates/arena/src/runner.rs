//! Playing matches and tournaments.

use std::sync::Mutex;
use std::time::Instant;

use balance_core::eval::{mix, EvalProfile};
use balance_core::game::PLY_CAP;
use balance_core::search::TraceEvent;
use balance_core::{Agent, AgentError, AgentKind, AgentSpec, Budget, Clock, Game, Player, Rules, Variant};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::TournamentConfig;
use crate::ArenaError;

/// Wall clock for time budgets.
pub struct StdClock(Instant);

impl StdClock {
    pub fn new() -> StdClock {
        StdClock(Instant::now())
    }
}

impl Default for StdClock {
    fn default() -> StdClock {
        StdClock::new()
    }
}

impl Clock for StdClock {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchSeeds {
    pub match_seed: u64,
    pub agent_a: u64,
    pub agent_b: u64,
}

/// One finished (or failed) match, scored for agent A.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    /// Position of the match in the tournament's job order.
    pub index: u64,
    pub game: String,
    /// Search variant of agent A, when it is a UBFM agent.
    pub variant: Option<Variant>,
    /// Budget of agent A.
    pub budget: Budget,
    pub agent_a: String,
    pub agent_b: String,
    pub first_mover: Side,
    pub moves: Vec<String>,
    pub terminal_state: String,
    pub b: i8,
    pub score: f64,
    pub plies: u32,
    pub seeds: MatchSeeds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum MatchError {
    #[error("agents must have distinct ids, both are {0}")]
    SameAgent(String),
    #[error("agent {agent} failed at move {move_index}: {source}")]
    AgentFailure { agent: String, move_index: u32, source: AgentError },
}

/// Plays `a` against `b` from the initial state. Each agent's RNG seed is
/// derived from its spec seed and `seed`.
pub fn play_match(game: &Game, a: &AgentSpec, b: &AgentSpec, first: Side, seed: u64) -> Result<MatchRecord, MatchError> {
    play_match_traced(game, a, b, first, seed, &mut |_, _| {})
}

/// [`play_match`] reporting every search descent with the id of the agent.
pub fn play_match_traced(
    game: &Game,
    a: &AgentSpec,
    b: &AgentSpec,
    first: Side,
    seed: u64,
    trace: &mut dyn FnMut(&str, &TraceEvent),
) -> Result<MatchRecord, MatchError> {
    if a.id == b.id {
        return Err(MatchError::SameAgent(a.id.clone()));
    }
    let seeds = MatchSeeds { match_seed: seed, agent_a: mix(a.seed, mix(seed, 1)), agent_b: mix(b.seed, mix(seed, 2)) };
    let (seat_a, seat_b) = match first {
        Side::A => (Player::First, Player::Second),
        Side::B => (Player::Second, Player::First),
    };
    let build = |spec: &AgentSpec, seat, agent_seed| {
        let spec = AgentSpec { seed: agent_seed, ..spec.clone() };
        Agent::new(spec.clone(), game.clone(), seat)
            .map_err(|source| MatchError::AgentFailure { agent: spec.id.clone(), move_index: 0, source })
    };
    let mut agent_a = build(a, seat_a, seeds.agent_a)?;
    let mut agent_b = build(b, seat_b, seeds.agent_b)?;

    let clock = StdClock::new();
    let mut state = game.initial_state();
    let mut moves = Vec::new();
    let mut plies = 0u32;
    while !game.is_terminal(&state) && plies < u32::from(PLY_CAP) {
        let agent = if state.to_move == seat_a { &mut agent_a } else { &mut agent_b };
        let id = agent.spec().id.clone();
        let fail = |source| MatchError::AgentFailure { agent: id.clone(), move_index: plies + 1, source };
        let chosen = agent.choose_traced(&state, &clock, &mut |e| trace(&id, e)).map_err(fail)?;
        state = game.apply(&state, chosen.action).map_err(|e| fail(e.into()))?;
        moves.push(game.format_action(chosen.action));
        plies += 1;
    }
    // a game stopped by the engine cap is a draw
    let (b_val, score) = if game.is_terminal(&state) {
        let to_err = |e: balance_core::GameError| MatchError::AgentFailure {
            agent: a.id.clone(),
            move_index: plies,
            source: e.into(),
        };
        (game.binary_outcome(&state, seat_a).map_err(to_err)?, game.terminal_score(&state, seat_a).map_err(to_err)?)
    } else {
        (0, 0.0)
    };
    Ok(MatchRecord {
        index: 0,
        game: game.name().to_string(),
        variant: a.kind.variant(),
        budget: a.budget,
        agent_a: a.id.clone(),
        agent_b: b.id.clone(),
        first_mover: first,
        moves,
        terminal_state: game.format_state(&state),
        b: b_val,
        score,
        plies,
        seeds,
        error: None,
    })
}

/// One scheduled match of a tournament.
#[derive(Clone, Debug)]
pub struct Job {
    pub index: u64,
    pub game: String,
    pub agent_a: AgentSpec,
    pub agent_b: AgentSpec,
    pub first: Side,
    pub seed: u64,
}

/// Every match of `config`, in deterministic order: game, variant, budget,
/// strong profile, weak profile, seat.
pub fn schedule(config: &TournamentConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for (gi, game) in config.games.iter().enumerate() {
        let strong = config.pool_for(&config.strong_pool, game);
        let weak = config.pool_for(&config.weak_pool, game);
        for (vi, &variant) in config.variants.iter().enumerate() {
            for (bi, &budget) in config.budgets.iter().enumerate() {
                for (si, s) in strong.iter().enumerate() {
                    for (wi, w) in weak.iter().enumerate() {
                        for (seat_i, &a_first) in config.seat_order().iter().enumerate() {
                            let seed = [gi, vi, bi, si, wi, seat_i]
                                .iter()
                                .fold(config.master_seed, |h, &i| mix(h, i as u64));
                            jobs.push(Job {
                                index: jobs.len() as u64,
                                game: game.clone(),
                                agent_a: evaluated_agent(config, variant, budget, s),
                                agent_b: opponent_agent(config, w),
                                first: if a_first { Side::A } else { Side::B },
                                seed,
                            });
                        }
                    }
                }
            }
        }
    }
    jobs
}

fn evaluated_agent(config: &TournamentConfig, variant: Variant, budget: Budget, profile: &EvalProfile) -> AgentSpec {
    let mut spec = AgentSpec::ubfm(&format!("{}-{}", variant.label(), profile.id), variant, profile.clone(), budget);
    if variant == Variant::MinibalPSolvedWin {
        spec.depth_bound_d = config.depth_bound_d;
    }
    spec.reuse_table = config.reuse_table;
    spec
}

fn opponent_agent(config: &TournamentConfig, profile: &EvalProfile) -> AgentSpec {
    let o = &config.opponent;
    let id = format!("opp-{}-{}", o.kind.label(), profile.id);
    let mut spec = match o.kind {
        AgentKind::Mcts => AgentSpec::mcts(&id, o.budget, profile.seed),
        AgentKind::Random => AgentSpec::random(&id, profile.seed),
        _ => AgentSpec::ubfm(&id, Variant::Minimax, profile.clone(), o.budget),
    };
    spec.exploration_c = if o.kind == AgentKind::Mcts { o.exploration_c } else { None };
    spec.reuse_table = config.reuse_table;
    spec
}

pub fn run_job(job: &Job) -> MatchRecord {
    let game = Game::from_name(&job.game).expect("validated game");
    match play_match(&game, &job.agent_a, &job.agent_b, job.first, job.seed) {
        Ok(mut r) => {
            r.index = job.index;
            r
        }
        Err(e) => MatchRecord {
            index: job.index,
            game: job.game.clone(),
            variant: job.agent_a.kind.variant(),
            budget: job.agent_a.budget,
            agent_a: job.agent_a.id.clone(),
            agent_b: job.agent_b.id.clone(),
            first_mover: job.first,
            moves: Vec::new(),
            terminal_state: String::new(),
            b: 0,
            score: 0.0,
            plies: 0,
            seeds: MatchSeeds { match_seed: job.seed, agent_a: 0, agent_b: 0 },
            error: Some(e.to_string()),
        },
    }
}

/// Runs every scheduled match on `config.workers` threads. `on_record` sees
/// records in completion order; the returned records are in job order.
pub fn run_tournament(
    config: &TournamentConfig,
    on_record: &(dyn Fn(&MatchRecord) + Sync),
) -> Result<Vec<MatchRecord>, ArenaError> {
    config.validate()?;
    let jobs = schedule(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| ArenaError::Config(e.to_string()))?;
    let done = Mutex::new(());
    let records = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let r = run_job(job);
                let _guard = done.lock().unwrap_or_else(|p| p.into_inner());
                on_record(&r);
                r
            })
            .collect()
    });
    Ok(records)
}

/// Replays `record.moves` and checks the stored terminal state and outcome.
pub fn replay(record: &MatchRecord) -> Result<bool, ArenaError> {
    let game = Game::from_name(&record.game).map_err(|e| ArenaError::Config(e.to_string()))?;
    let mut state = game.initial_state();
    for m in &record.moves {
        let action = game.parse_action(m).map_err(|e| ArenaError::Config(e.to_string()))?;
        state = game.apply(&state, action).map_err(|e| ArenaError::Config(e.to_string()))?;
    }
    let seat_a = match record.first_mover {
        Side::A => Player::First,
        Side::B => Player::Second,
    };
    let outcome_ok = !game.is_terminal(&state)
        || (game.binary_outcome(&state, seat_a).ok() == Some(record.b)
            && game.terminal_score(&state, seat_a).ok() == Some(record.score));
    Ok(game.format_state(&state) == record.terminal_state && outcome_ok)
}

/// One search descent as a trace line:
/// `iter, path, expanded_key, root_v, root_c, root_r`.
pub fn trace_line(game: &Game, e: &TraceEvent) -> String {
    let path: Vec<String> = e.path.iter().map(|&a| game.format_action(a)).collect();
    format!(
        "{}, {}, {:#018x}, {:.6}, {}, {}",
        e.iteration,
        if path.is_empty() { "-".to_string() } else { path.join(" ") },
        e.expanded_key,
        e.root_v,
        e.root_c,
        e.root_r
    )
}
