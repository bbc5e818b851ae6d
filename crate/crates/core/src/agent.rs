//! Match agents: the four UBFM variants, the UCT baseline and a uniform random
//! mover, behind one interface that keeps per-match state (search table, RNG).

use alloc::string::String;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

use crate::eval::EvalProfile;
use crate::game::{ActionId, Game, GameError, GameState, Player, Rules};
use crate::mcts::{mcts_search, MctsError, DEFAULT_EXPLORATION};
use crate::search::{search_traced, SearchConfig, SearchError, TraceEvent, TranspositionTable, Variant};

pub use crate::search::{Budget, Clock, NoClock};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum AgentKind {
    UbfmMinimax,
    UbfmMinibalN,
    UbfmMinibalP,
    UbfmMinibalPSolvedWin,
    Mcts,
    Random,
}

impl AgentKind {
    pub const ALL: [AgentKind; 6] = [
        AgentKind::UbfmMinimax,
        AgentKind::UbfmMinibalN,
        AgentKind::UbfmMinibalP,
        AgentKind::UbfmMinibalPSolvedWin,
        AgentKind::Mcts,
        AgentKind::Random,
    ];

    pub fn variant(self) -> Option<Variant> {
        match self {
            AgentKind::UbfmMinimax => Some(Variant::Minimax),
            AgentKind::UbfmMinibalN => Some(Variant::MinibalN),
            AgentKind::UbfmMinibalP => Some(Variant::MinibalP),
            AgentKind::UbfmMinibalPSolvedWin => Some(Variant::MinibalPSolvedWin),
            AgentKind::Mcts | AgentKind::Random => None,
        }
    }

    pub fn from_variant(variant: Variant) -> AgentKind {
        match variant {
            Variant::Minimax => AgentKind::UbfmMinimax,
            Variant::MinibalN => AgentKind::UbfmMinibalN,
            Variant::MinibalP => AgentKind::UbfmMinibalP,
            Variant::MinibalPSolvedWin => AgentKind::UbfmMinibalPSolvedWin,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AgentKind::UbfmMinimax => "ubfm-minimax",
            AgentKind::UbfmMinibalN => "ubfm-minibal-n",
            AgentKind::UbfmMinibalP => "ubfm-minibal-p",
            AgentKind::UbfmMinibalPSolvedWin => "ubfm-minibal-p-solved-win",
            AgentKind::Mcts => "mcts",
            AgentKind::Random => "random",
        }
    }
}

#[cfg(feature = "serde")]
fn default_reuse() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AgentSpec {
    pub id: String,
    pub kind: AgentKind,
    #[cfg_attr(feature = "serde", serde(default))]
    pub evaluator: Option<EvalProfile>,
    pub budget: Budget,
    #[cfg_attr(feature = "serde", serde(default))]
    pub seed: u64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub depth_bound_d: Option<u16>,
    /// UCT constant; `sqrt(2)` when absent.
    #[cfg_attr(feature = "serde", serde(default))]
    pub exploration_c: Option<f64>,
    #[cfg_attr(feature = "serde", serde(default = "default_reuse"))]
    pub reuse_table: bool,
}

impl AgentSpec {
    pub fn ubfm(id: &str, variant: Variant, evaluator: EvalProfile, budget: Budget) -> AgentSpec {
        AgentSpec {
            id: String::from(id),
            kind: AgentKind::from_variant(variant),
            evaluator: Some(evaluator),
            budget,
            seed: 0,
            depth_bound_d: None,
            exploration_c: None,
            reuse_table: true,
        }
    }

    pub fn mcts(id: &str, budget: Budget, seed: u64) -> AgentSpec {
        AgentSpec {
            id: String::from(id),
            kind: AgentKind::Mcts,
            evaluator: None,
            budget,
            seed,
            depth_bound_d: None,
            exploration_c: None,
            reuse_table: true,
        }
    }

    pub fn random(id: &str, seed: u64) -> AgentSpec {
        AgentSpec { kind: AgentKind::Random, budget: Budget::Iterations(1), ..AgentSpec::mcts(id, Budget::Iterations(1), seed) }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        let ubfm = self.kind.variant().is_some();
        if ubfm && self.evaluator.is_none() {
            return Err(AgentError::InvalidSpec("search agents need an evaluator"));
        }
        if !ubfm && self.evaluator.is_some() {
            return Err(AgentError::InvalidSpec("only search agents take an evaluator"));
        }
        if self.depth_bound_d.is_some() && self.kind != AgentKind::UbfmMinibalPSolvedWin {
            return Err(AgentError::InvalidSpec("depth bound requires the solved-win kind"));
        }
        if self.exploration_c.is_some_and(|c| !(c >= 0.0)) {
            return Err(AgentError::InvalidSpec("exploration constant must be non-negative"));
        }
        if let Some(e) = &self.evaluator {
            if !(0.0..=1.0).contains(&e.quality) {
                return Err(AgentError::InvalidSpec("evaluator quality must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    fn search_config(&self) -> Option<SearchConfig> {
        let variant = self.kind.variant()?;
        let mut config = SearchConfig::new(variant, self.budget, self.evaluator.clone()?);
        config.depth_bound = self.depth_bound_d;
        config.seed = self.seed;
        config.reuse_table = self.reuse_table;
        Some(config)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum AgentError {
    #[error("invalid agent: {0}")]
    InvalidSpec(&'static str),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Mcts(#[from] MctsError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// What the agent reports about one decision.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SearchSummary {
    /// Root labels of a UBFM search, from the agent's seat.
    pub root_v: Option<f64>,
    pub root_c: Option<i8>,
    pub root_r: Option<bool>,
    pub iterations: u64,
    pub elapsed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentMove {
    pub action: ActionId,
    pub summary: SearchSummary,
}

/// A spec bound to a game and seat for one match.
pub struct Agent {
    spec: AgentSpec,
    game: Game,
    seat: Player,
    config: Option<SearchConfig>,
    table: TranspositionTable,
    rng: Xoshiro256PlusPlus,
    decisions: u64,
}

impl Agent {
    pub fn new(spec: AgentSpec, game: Game, seat: Player) -> Result<Agent, AgentError> {
        spec.validate()?;
        let config = spec.search_config();
        Ok(Agent {
            rng: Xoshiro256PlusPlus::seed_from_u64(spec.seed),
            spec,
            game,
            seat,
            config,
            table: TranspositionTable::new(seat),
            decisions: 0,
        })
    }

    pub fn spec(&self) -> &AgentSpec {
        &self.spec
    }

    pub fn seat(&self) -> Player {
        self.seat
    }

    pub fn table(&self) -> &TranspositionTable {
        &self.table
    }

    pub fn choose(&mut self, state: &GameState, clock: &dyn Clock) -> Result<AgentMove, AgentError> {
        self.choose_traced(state, clock, &mut |_| {})
    }

    /// Picks a move in `state`, which must have the agent's seat to move.
    pub fn choose_traced(
        &mut self,
        state: &GameState,
        clock: &dyn Clock,
        trace: &mut dyn FnMut(&TraceEvent),
    ) -> Result<AgentMove, AgentError> {
        if state.to_move != self.seat {
            return Err(SearchError::PerspectiveMismatch { table: self.seat, to_move: state.to_move }.into());
        }
        self.decisions += 1;
        let chosen = match self.spec.kind {
            AgentKind::Mcts => {
                let c = self.spec.exploration_c.unwrap_or(DEFAULT_EXPLORATION);
                let seed = SplitMix64::seed_from_u64(self.spec.seed ^ self.decisions).next_u64();
                let res = mcts_search(&self.game, state, self.spec.budget, c, seed, clock)?;
                AgentMove {
                    action: res.chosen,
                    summary: SearchSummary { root_v: None, root_c: None, root_r: None, iterations: res.iterations, elapsed: 0.0 },
                }
            }
            AgentKind::Random => {
                let actions = self.game.legal_actions(state);
                if actions.is_empty() {
                    return Err(GameError::TerminalState.into());
                }
                let pick = (self.rng.next_u64() % actions.len() as u64) as usize;
                AgentMove {
                    action: actions[pick],
                    summary: SearchSummary { root_v: None, root_c: None, root_r: None, iterations: 0, elapsed: 0.0 },
                }
            }
            _ => {
                let config = self.config.as_ref().expect("search agents carry a config");
                let res = search_traced(&self.game, state, config, &mut self.table, clock, trace)?;
                AgentMove {
                    action: res.chosen,
                    summary: SearchSummary {
                        root_v: Some(res.root_entry.v),
                        root_c: Some(res.root_entry.c),
                        root_r: Some(res.root_entry.r),
                        iterations: res.iterations,
                        elapsed: res.elapsed,
                    },
                }
            }
        };
        Ok(chosen)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluator_presence_is_checked() {
        let mut spec = AgentSpec::ubfm("a", Variant::MinibalP, EvalProfile::exact("tictactoe"), Budget::Iterations(10));
        assert_eq!(spec.validate(), Ok(()));
        spec.evaluator = None;
        assert!(spec.validate().is_err());
        let mut m = AgentSpec::mcts("m", Budget::Iterations(10), 1);
        assert_eq!(m.validate(), Ok(()));
        m.evaluator = Some(EvalProfile::exact("tictactoe"));
        assert!(m.validate().is_err());
    }

    #[test]
    fn agent_refuses_the_other_seat() {
        let g = Game::from_name("tictactoe").unwrap();
        let spec = AgentSpec::random("r", 3);
        let mut a = Agent::new(spec, g.clone(), Player::Second).unwrap();
        assert!(a.choose(&g.initial_state(), &NoClock).is_err());
    }

    #[test]
    fn ubfm_agent_reports_root_labels() {
        let g = Game::from_name("tictactoe").unwrap();
        let spec = AgentSpec::ubfm("a", Variant::Minimax, EvalProfile::exact("tictactoe"), Budget::Iterations(50));
        let mut a = Agent::new(spec, g.clone(), Player::First).unwrap();
        let mv = a.choose(&g.initial_state(), &NoClock).unwrap();
        assert_eq!(mv.summary.iterations, 50);
        assert!(mv.summary.root_v.is_some());
        assert!(a.table().len() > 9);
    }
}
