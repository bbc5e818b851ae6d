use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use balance_arena::checks::{minimax_convergence, oracle_soundness};
use balance_arena::report::{emit_report, read_records};
use balance_arena::runner::trace_line;
use balance_arena::{run_to_dir, ArenaError, StdClock, TournamentConfig};
use balance_core::eval::EvalProfile;
use balance_core::oracle::Oracle;
use balance_core::{Agent, AgentKind, AgentSpec, Budget, Game, Player, Rules, Variant};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "arena", about = "Balanced-play tournaments, oracle checks and play")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a tournament config and write records and reports to its output_dir.
    Run {
        config: PathBuf,
        /// Suppress the per-match progress lines.
        #[arg(long)]
        quiet: bool,
    },
    /// Rebuild summary and curves from a records file.
    Report {
        records: PathBuf,
        /// Output directory; defaults to the records file's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force checks of every search variant against the exact game value.
    Oracle {
        game: String,
        #[arg(long, default_value_t = 100)]
        searches: usize,
        #[arg(long, default_value_t = 300)]
        iterations: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Play against an agent in the terminal.
    Play {
        #[arg(long, default_value = "tictactoe")]
        game: String,
        #[arg(long, value_enum, default_value_t = Kind::MinibalP)]
        agent: Kind,
        /// Iterations per agent move.
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        /// Evaluator noise level of search agents.
        #[arg(long, default_value_t = 0.0)]
        quality: f64,
        #[arg(long, value_enum, default_value_t = Seat::First)]
        seat: Seat,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print every search descent to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Serve the HTTP play API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Write all sessions to this JSON file on shutdown.
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Minimax,
    MinibalN,
    MinibalP,
    SolvedWin,
    Mcts,
    Random,
}

impl Kind {
    fn agent_kind(self) -> AgentKind {
        match self {
            Kind::Minimax => AgentKind::UbfmMinimax,
            Kind::MinibalN => AgentKind::UbfmMinibalN,
            Kind::MinibalP => AgentKind::UbfmMinibalP,
            Kind::SolvedWin => AgentKind::UbfmMinibalPSolvedWin,
            Kind::Mcts => AgentKind::Mcts,
            Kind::Random => AgentKind::Random,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Seat {
    First,
    Second,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run { config, quiet } => {
            let config = TournamentConfig::load(&config)?;
            let report = run_to_dir(&config, &|r| {
                if !quiet {
                    let outcome = r.error.as_deref().map_or_else(|| format!("b={:+} score={:.3}", r.b, r.score), |e| e.to_string());
                    eprintln!("#{:<5} {} {} vs {}: {outcome}", r.index, r.game, r.agent_a, r.agent_b);
                }
            })?;
            print_rows(&report);
            println!("{} records ({} failed) in {}", report.records, report.failed, config.output_dir.display());
        }
        Command::Report { records, out } => {
            let dir = out.unwrap_or_else(|| records.parent().map(PathBuf::from).unwrap_or_default());
            let recs = read_records(&records)?;
            if recs.is_empty() {
                return Err(ArenaError::NoRecords.into());
            }
            let (report, files) = emit_report(&recs, &dir)?;
            print_rows(&report);
            println!("wrote {} and {}", files.summary.display(), files.curves.display());
        }
        Command::Oracle { game, searches, iterations, seed } => {
            let g = Game::from_name(&game)?;
            let mut oracle = Oracle::new(&g);
            let value = oracle.value(&g.initial_state())?;
            println!("{game}: game value {value:+} for the first player");
            for variant in Variant::ALL {
                let s = oracle_soundness(&g, &mut oracle, variant, searches, iterations, seed);
                println!(
                    "{:<22} searches {:>4}  resolved entries {:>7}  violations {:>6}",
                    variant.label(),
                    s.searches,
                    s.resolved,
                    s.violations
                );
                if let Some((board, c, truth)) = s.example {
                    println!("    e.g. {board}: search c = {c:+}, exact {truth:+}");
                }
            }
            if game == "tictactoe" {
                let c = minimax_convergence(&g, 1000, seed);
                println!(
                    "unlimited minimax: root c = {:+} resolved = {}; vs random {} W / {} D / {} L",
                    c.root_c, c.root_r, c.wins, c.draws, c.losses
                );
            }
        }
        Command::Play { game, agent, budget, quality, seat, seed, trace } => {
            play(&game, agent, budget, quality, seat, seed, trace)?;
        }
        Command::Serve { addr, snapshot } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(balance_arena::service::serve(&addr, snapshot))?;
        }
    }
    Ok(())
}

fn print_rows(report: &balance_arena::report::Report) {
    println!("{:<22} {:>8} {:<12} {:>5} {:>8} {:>7} {:>8}", "variant", "budget", "game", "n", "gain", "cr95", "score");
    for r in &report.rows {
        println!(
            "{:<22} {:>8} {:<12} {:>5} {:>8.2} {:>7.2} {:>8.3}",
            r.variant, r.budget, r.game, r.n, r.gain, r.cr95_gain, r.score
        );
    }
}

fn play(game: &str, kind: Kind, budget: u64, quality: f64, seat: Seat, seed: u64, trace: bool) -> Result<(), Box<dyn std::error::Error>> {
    let g = Game::from_name(game)?;
    let kind = kind.agent_kind();
    let budget = Budget::Iterations(budget);
    let spec = match kind.variant() {
        Some(v) => AgentSpec { seed, ..AgentSpec::ubfm("agent", v, EvalProfile::new(game, quality, seed), budget) },
        None if kind == AgentKind::Mcts => AgentSpec::mcts("agent", budget, seed),
        None => AgentSpec::random("agent", seed),
    };
    let human = match seat {
        Seat::First => Player::First,
        Seat::Second => Player::Second,
    };
    let mut agent = Agent::new(spec, g.clone(), human.opponent())?;
    let mut state = g.initial_state();
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    while !g.is_terminal(&state) {
        println!("\n{}", board(&g, &state));
        if state.to_move == human {
            let legal: Vec<String> = g.legal_actions(&state).into_iter().map(|a| g.format_action(a)).collect();
            print!("your move ({}): ", legal.join(" "));
            io::stdout().flush()?;
            let Some(line) = lines.next() else { return Ok(()) };
            let line = line?;
            match g.parse_action(line.trim()).and_then(|a| g.apply(&state, a)) {
                Ok(next) => state = next,
                Err(e) => println!("{e}"),
            }
        } else {
            let mut log = |e: &balance_core::search::TraceEvent| {
                if trace {
                    eprintln!("{}", trace_line(&g, e));
                }
            };
            let m = agent.choose_traced(&state, &StdClock::new(), &mut log)?;
            let s = &m.summary;
            match (s.root_v, s.root_c, s.root_r) {
                (Some(v), Some(c), Some(r)) => println!(
                    "agent plays {} (v {v:+.3}, c {c:+}, resolved {r}, {} iterations)",
                    g.format_action(m.action),
                    s.iterations
                ),
                _ => println!("agent plays {}", g.format_action(m.action)),
            }
            state = g.apply(&state, m.action)?;
        }
    }
    println!("\n{}", board(&g, &state));
    let b = g.binary_outcome(&state, human)?;
    let score = g.terminal_score(&state, human)?;
    let word = match b {
        1 => "you win",
        0 => "draw",
        _ => "you lose",
    };
    println!("{word} (b = {b:+}, score = {score:+.3})");
    Ok(())
}

/// The board with the column and row labels of the move notation.
fn board(g: &Game, state: &balance_core::GameState) -> String {
    let text = g.format_state(state);
    let (rows, side) = text.split_once(' ').expect("side to move");
    let mut out = String::new();
    for (i, row) in rows.split('/').enumerate() {
        let cells: Vec<String> = row.chars().map(|c| format!("{c:<2}")).collect();
        out.push_str(&format!("{:>2} {}\n", i + 1, cells.concat()));
    }
    let columns: Vec<String> = match g {
        Game::ConnectFour(_) => (1..=g.width()).map(|c| format!("{c:<2}")).collect(),
        _ => (0..g.width()).map(|c| format!("{:<2}", (b'a' + c as u8) as char)).collect(),
    };
    out.push_str(&format!("   {}\n{side} to move", columns.concat()));
    out
}
