//! HTTP play service: human-vs-agent sessions kept in memory.
//!
//! Each session sits behind its own async mutex. Mutating requests take it
//! with `try_lock`, so a request arriving while the agent is still thinking
//! is turned away with `WrongTurn` instead of being queued.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use balance_core::eval::{mix, EvalProfile};
use balance_core::{Agent, AgentKind, AgentSpec, Budget, Game, GameState, Player, Rules, SearchSummary};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

use crate::runner::StdClock;
use crate::ArenaError;

pub const MAX_SECONDS: f64 = 2.0;
pub const MAX_ITERATIONS: u64 = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    HumanToMove,
    AgentToMove,
    Finished,
}

/// Outcome of a finished session for the human seat.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub b: i8,
    pub score: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorCode {
    UnknownGame,
    InvalidAgentSpec,
    IllegalMove,
    WrongTurn,
    UnknownSession,
    BadRequest,
    AgentFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legal_actions: Option<Vec<String>>,
}

impl ApiError {
    fn new(code: ErrorCode, message: impl Into<String>) -> ApiError {
        ApiError { code, message: message.into(), legal_actions: None }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.code {
            ErrorCode::UnknownSession => StatusCode::NOT_FOUND,
            ErrorCode::WrongTurn => StatusCode::CONFLICT,
            ErrorCode::IllegalMove => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::UnknownGame | ErrorCode::InvalidAgentSpec | ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::AgentFailure => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(self)).into_response()
    }
}

/// The agent part of a session request. `id` and the evaluator are optional:
/// search agents without an evaluator get the game's exact heuristic.
#[derive(Clone, Debug, Deserialize)]
pub struct AgentRequest {
    #[serde(default)]
    pub id: Option<String>,
    pub kind: AgentKind,
    #[serde(default)]
    pub evaluator: Option<EvalProfile>,
    pub budget: Budget,
    #[serde(default)]
    pub depth_bound_d: Option<u16>,
    #[serde(default)]
    pub exploration_c: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct CreateSession {
    pub game: String,
    pub agent: AgentRequest,
    pub human_seat: Player,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Deserialize)]
pub struct MoveRequest {
    pub action: String,
}

/// What clients see of a session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub rules: String,
    /// Board in plain-text notation, rows top to bottom.
    pub state: String,
    pub width: usize,
    pub height: usize,
    pub to_move: Player,
    pub agent: AgentSpec,
    pub human_seat: Player,
    pub history: Vec<String>,
    pub status: Status,
    pub result: Option<Outcome>,
    /// Moves the human may submit now; empty unless it is the human's turn.
    pub legal_actions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentMoveView {
    pub action: String,
    pub session: SessionView,
    pub summary: SearchSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameInfo {
    pub name: String,
    pub width: usize,
    pub height: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub games: Vec<GameInfo>,
    pub agent_kinds: Vec<AgentKind>,
    pub max_seconds: f64,
    pub max_iterations: u64,
}

struct Session {
    id: String,
    game: Game,
    state: GameState,
    agent: Agent,
    human_seat: Player,
    history: Vec<String>,
}

impl Session {
    fn status(&self) -> Status {
        if self.game.is_terminal(&self.state) {
            Status::Finished
        } else if self.state.to_move == self.human_seat {
            Status::HumanToMove
        } else {
            Status::AgentToMove
        }
    }

    fn view(&self) -> SessionView {
        let status = self.status();
        let result = (status == Status::Finished).then(|| Outcome {
            b: self.game.binary_outcome(&self.state, self.human_seat).expect("finished"),
            score: self.game.terminal_score(&self.state, self.human_seat).expect("finished"),
        });
        let legal_actions = if status == Status::HumanToMove { self.legal_actions() } else { Vec::new() };
        SessionView {
            id: self.id.clone(),
            rules: self.game.name().to_string(),
            state: self.game.format_state(&self.state),
            width: self.game.width(),
            height: self.game.height(),
            to_move: self.state.to_move,
            agent: self.agent.spec().clone(),
            human_seat: self.human_seat,
            history: self.history.clone(),
            status,
            result,
            legal_actions,
        }
    }

    fn legal_actions(&self) -> Vec<String> {
        self.game.legal_actions(&self.state).into_iter().map(|a| self.game.format_action(a)).collect()
    }

    fn play(&mut self, action: balance_core::ActionId) {
        self.state = self.game.apply(&self.state, action).expect("action checked legal");
        self.history.push(self.game.format_action(action));
        debug_assert!(self.replays(), "history no longer reproduces the state");
    }

    fn replays(&self) -> bool {
        let mut s = self.game.initial_state();
        for m in &self.history {
            match self.game.parse_action(m).and_then(|a| self.game.apply(&s, a)) {
                Ok(next) => s = next,
                Err(_) => return false,
            }
        }
        s == self.state
    }
}

type Shared = Arc<Mutex<Session>>;

/// The in-memory session store behind the router.
#[derive(Clone, Default)]
pub struct AppState {
    sessions: Arc<RwLock<HashMap<String, Shared>>>,
}

impl AppState {
    pub fn new() -> AppState {
        AppState::default()
    }

    fn find(&self, id: &str) -> Result<Shared, ApiError> {
        let sessions = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        sessions
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(ErrorCode::UnknownSession, format!("no session `{id}`")))
    }

    /// Views of every session not currently busy with a search.
    pub fn snapshot(&self) -> Vec<SessionView> {
        let sessions = self.sessions.read().unwrap_or_else(|p| p.into_inner());
        let mut views: Vec<SessionView> = sessions.values().filter_map(|s| s.try_lock().ok().map(|s| s.view())).collect();
        views.sort_by(|a, b| a.id.cmp(&b.id));
        views
    }

    pub fn write_snapshot(&self, path: &Path) -> Result<(), ArenaError> {
        let text = serde_json::to_string_pretty(&self.snapshot()).expect("views serialize");
        std::fs::write(path, text + "\n").map_err(|e| ArenaError::io(path, e))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/games", get(list_games))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/move", post(human_move))
        .route("/sessions/{id}/agent-move", post(agent_move))
        .with_state(state)
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &str) -> Result<T, ApiError> {
    serde_json::from_str(body).map_err(|e| ApiError::new(ErrorCode::BadRequest, e.to_string()))
}

fn busy() -> ApiError {
    ApiError::new(ErrorCode::WrongTurn, "the session is busy with another request")
}

async fn list_games() -> Json<Catalog> {
    let games = Game::NAMES
        .iter()
        .map(|n| {
            let g = Game::from_name(n).expect("listed games exist");
            GameInfo { name: n.to_string(), width: g.width(), height: g.height() }
        })
        .collect();
    Json(Catalog {
        games,
        agent_kinds: AgentKind::ALL.to_vec(),
        max_seconds: MAX_SECONDS,
        max_iterations: MAX_ITERATIONS,
    })
}

/// Builds the session agent, applying defaults and the server-side caps.
pub fn agent_spec(game: &Game, request: AgentRequest, seed: u64) -> Result<AgentSpec, ApiError> {
    let invalid = |m: &str| ApiError::new(ErrorCode::InvalidAgentSpec, m);
    match request.budget {
        Budget::Iterations(n) if n > MAX_ITERATIONS => return Err(invalid("iteration budget above the server cap")),
        Budget::Seconds(s) if s > MAX_SECONDS => return Err(invalid("time budget above the server cap")),
        _ => {}
    }
    let evaluator = match (request.kind.variant(), request.evaluator) {
        (Some(_), None) => Some(EvalProfile::exact(game.name())),
        (_, Some(e)) => Some(EvalProfile { game: game.name().to_string(), ..e }),
        (None, None) => None,
    };
    let spec = AgentSpec {
        id: request.id.unwrap_or_else(|| request.kind.label().to_string()),
        kind: request.kind,
        evaluator,
        budget: request.budget,
        seed,
        depth_bound_d: request.depth_bound_d,
        exploration_c: request.exploration_c,
        reuse_table: true,
    };
    spec.validate().map_err(|e| ApiError::new(ErrorCode::InvalidAgentSpec, e.to_string()))?;
    Ok(spec)
}

async fn create_session(State(app): State<AppState>, body: String) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let req: CreateSession = parse_body(&body)?;
    let game = Game::from_name(&req.game).map_err(|e| ApiError::new(ErrorCode::UnknownGame, e.to_string()))?;
    let spec = agent_spec(&game, req.agent, mix(req.seed, 0xA6E7))?;
    let agent = Agent::new(spec, game.clone(), req.human_seat.opponent())
        .map_err(|e| ApiError::new(ErrorCode::InvalidAgentSpec, e.to_string()))?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = Session {
        id: id.clone(),
        state: game.initial_state(),
        game,
        agent,
        human_seat: req.human_seat,
        history: Vec::new(),
    };
    let view = session.view();
    app.sessions.write().unwrap_or_else(|p| p.into_inner()).insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_session(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<SessionView>, ApiError> {
    let session = app.find(&id)?;
    let view = session.lock().await.view();
    Ok(Json(view))
}

async fn human_move(
    State(app): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: String,
) -> Result<Json<SessionView>, ApiError> {
    let session = app.find(&id)?;
    let req: MoveRequest = parse_body(&body)?;
    let mut s = session.try_lock().map_err(|_| busy())?;
    match s.status() {
        Status::HumanToMove => {}
        Status::AgentToMove => return Err(ApiError::new(ErrorCode::WrongTurn, "the agent is to move")),
        Status::Finished => return Err(ApiError::new(ErrorCode::WrongTurn, "the game is over")),
    }
    let legal = s.game.legal_actions(&s.state);
    let action = s.game.parse_action(&req.action).ok().filter(|a| legal.contains(a)).ok_or_else(|| ApiError {
        code: ErrorCode::IllegalMove,
        message: format!("`{}` is not legal here", req.action),
        legal_actions: Some(s.legal_actions()),
    })?;
    s.play(action);
    Ok(Json(s.view()))
}

async fn agent_move(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<AgentMoveView>, ApiError> {
    let session = app.find(&id)?;
    let mut s = session.try_lock_owned().map_err(|_| busy())?;
    if s.status() != Status::AgentToMove {
        return Err(ApiError::new(ErrorCode::WrongTurn, "the agent is not to move"));
    }
    // the lock travels with the search so the session stays busy meanwhile
    tokio::task::spawn_blocking(move || {
        let state = s.state;
        let chosen = s.agent.choose(&state, &StdClock::new()).map_err(|e| ApiError::new(ErrorCode::AgentFailure, e.to_string()))?;
        s.play(chosen.action);
        Ok(Json(AgentMoveView { action: s.game.format_action(chosen.action), session: s.view(), summary: chosen.summary }))
    })
    .await
    .expect("search task panicked")
}

/// Serves `router` on `addr` until Ctrl-C, then writes the snapshot if asked.
pub async fn serve(addr: &str, snapshot: Option<PathBuf>) -> Result<(), ArenaError> {
    let app = AppState::new();
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| ArenaError::io(Path::new(addr), e))?;
    eprintln!("listening on {}", listener.local_addr().map_err(|e| ArenaError::io(Path::new(addr), e))?);
    axum::serve(listener, router(app.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ArenaError::io(Path::new(addr), e))?;
    if let Some(path) = snapshot {
        app.write_snapshot(&path)?;
    }
    Ok(())
}
