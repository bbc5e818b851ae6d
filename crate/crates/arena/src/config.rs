//! Tournament configuration file.

use std::path::{Path, PathBuf};

use balance_core::eval::EvalProfile;
use balance_core::{AgentKind, Budget, Game, Variant};
use serde::{Deserialize, Serialize};

use crate::ArenaError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Seats {
    /// Every pairing is played once with each agent moving first.
    Both,
    /// The evaluated agent always moves first.
    First,
    Second,
}

/// The side the evaluated agents play against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpponentSpec {
    /// `ubfm-minimax` (one agent per weak profile) or `mcts` (one agent per
    /// weak profile seed, evaluator unused).
    pub kind: AgentKind,
    pub budget: Budget,
    #[serde(default)]
    pub exploration_c: Option<f64>,
}

impl Default for OpponentSpec {
    fn default() -> OpponentSpec {
        OpponentSpec { kind: AgentKind::UbfmMinimax, budget: Budget::Iterations(200), exploration_c: None }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn default_seats() -> Seats {
    Seats::Both
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TournamentConfig {
    pub games: Vec<String>,
    /// Evaluators of the agents under test. A profile applies to the games
    /// whose name equals its `game` field, or to every game when that is `*`.
    pub strong_pool: Vec<EvalProfile>,
    pub weak_pool: Vec<EvalProfile>,
    pub variants: Vec<Variant>,
    /// Budget sweep of the evaluated agents.
    pub budgets: Vec<Budget>,
    #[serde(default = "default_seats")]
    pub seats: Seats,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub opponent: OpponentSpec,
    /// Depth bound of the solved-win variant.
    #[serde(default)]
    pub depth_bound_d: Option<u16>,
    #[serde(default = "default_true")]
    pub reuse_table: bool,
}

impl TournamentConfig {
    pub fn load(path: &Path) -> Result<TournamentConfig, ArenaError> {
        let text = std::fs::read_to_string(path).map_err(|e| ArenaError::io(path, e))?;
        let config: TournamentConfig =
            serde_json::from_str(&text).map_err(|e| ArenaError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ArenaError> {
        let bad = |m: String| Err(ArenaError::Config(m));
        if self.games.is_empty() || self.variants.is_empty() || self.budgets.is_empty() {
            return bad("games, variants and budgets must be non-empty".into());
        }
        for g in &self.games {
            Game::from_name(g).map_err(|e| ArenaError::Config(e.to_string()))?;
            if self.pool_for(&self.strong_pool, g).is_empty() || self.pool_for(&self.weak_pool, g).is_empty() {
                return bad(format!("no strong or weak profile applies to {g}"));
            }
        }
        if self.budgets.iter().any(Budget::is_zero) || self.opponent.budget.is_zero() {
            return bad("budgets must be positive".into());
        }
        if !matches!(self.opponent.kind, AgentKind::UbfmMinimax | AgentKind::Mcts | AgentKind::Random) {
            return bad("opponent kind must be ubfm-minimax, mcts or random".into());
        }
        if self.workers == 0 {
            return bad("workers must be positive".into());
        }
        Ok(())
    }

    /// Profiles of `pool` applicable to `game`, with the game filled in.
    pub fn pool_for(&self, pool: &[EvalProfile], game: &str) -> Vec<EvalProfile> {
        pool.iter()
            .filter(|p| p.game == game || p.game == "*")
            .map(|p| EvalProfile { game: game.to_string(), ..p.clone() })
            .collect()
    }

    /// The seat assignments of every pairing: `true` when the evaluated agent
    /// moves first.
    pub fn seat_order(&self) -> &'static [bool] {
        match self.seats {
            Seats::Both => &[true, false],
            Seats::First => &[true],
            Seats::Second => &[false],
        }
    }
}

/// Pools of `qualities × seeds` profiles valid for every game.
pub fn pool(qualities: &[f64], seeds: &[u64]) -> Vec<EvalProfile> {
    let mut out = Vec::new();
    for &q in qualities {
        for &s in seeds {
            let mut p = EvalProfile::new("*", q, s);
            p.id = format!("e{q:.2}-s{s}");
            out.push(p);
        }
    }
    out
}
