//! End-to-end acceptance run: every headline property of the engine and the
//! tournament harness, one PASS/FAIL line each.
//!
//! Seeds, pools and budgets are fixed below and were chosen before looking at
//! any outcome. Criteria listed in `KNOWN_FAILURES` are measured and reported
//! like the others; the binary exits non-zero if any other criterion fails or
//! if a listed one starts passing, so the list cannot go stale silently.

use std::path::Path;
use std::time::{Duration, Instant};

use balance_arena::checks::{minimax_convergence, oracle_soundness};
use balance_arena::config::{pool, OpponentSpec, Seats};
use balance_arena::report::{emit_report, Report, SummaryRow, ALL_GAMES};
use balance_arena::{run_to_dir, TournamentConfig};
use balance_core::oracle::Oracle;
use balance_core::{AgentKind, Budget, Game, Variant};

/// Criteria that do not hold for this implementation; see the README.
const KNOWN_FAILURES: &[u32] = &[1, 4, 7];

const GAMES: [&str; 2] = ["connect4", "othello6"];
const OPPONENT_ITERATIONS: u64 = 200;
const MCTS_ITERATIONS: u64 = 50;
const SWEEP: [u64; 4] = [50, 200, 1000, 5000];

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn row<'r>(report: &'r Report, variant: Variant, budget: u64, game: &str) -> &'r SummaryRow {
    report
        .rows
        .iter()
        .find(|r| r.variant == variant.label() && r.budget == budget.to_string() && r.game == game)
        .unwrap_or_else(|| panic!("no row for {} {budget} {game}", variant.label()))
}

fn base_config(dir: &Path) -> TournamentConfig {
    TournamentConfig {
        games: GAMES.iter().map(|g| g.to_string()).collect(),
        strong_pool: pool(&[0.0, 0.1, 0.2, 0.3], &[1, 2]),
        weak_pool: pool(&[0.6, 0.7, 0.8, 0.9], &[1, 2]),
        variants: Variant::ALL.to_vec(),
        budgets: vec![Budget::Iterations(OPPONENT_ITERATIONS)],
        seats: Seats::Both,
        master_seed: 1,
        workers: workers(),
        output_dir: dir.to_path_buf(),
        opponent: OpponentSpec { kind: AgentKind::UbfmMinimax, budget: Budget::Iterations(OPPONENT_ITERATIONS), exploration_c: None },
        depth_bound_d: None,
        reuse_table: true,
    }
}

fn run(config: &TournamentConfig) -> Report {
    let report = run_to_dir(config, &|_| {}).expect("tournament");
    assert_eq!(report.failed, 0, "failed matches in {}", config.output_dir.display());
    report
}

fn soundness() -> (bool, String) {
    let mut detail = Vec::new();
    let mut total = 0;
    let mut searches = 0;
    for name in ["tictactoe", "connect4-5x4"] {
        let g = Game::from_name(name).unwrap();
        let mut oracle = Oracle::new(&g);
        for variant in Variant::ALL {
            let s = oracle_soundness(&g, &mut oracle, variant, 100, 300, 17);
            searches += s.searches;
            total += s.violations;
            detail.push(format!("{name}/{}={}/{}", variant.label(), s.violations, s.resolved));
        }
    }
    (total == 0, format!("{searches} searches, violations/resolved: {}", detail.join(" ")))
}

fn convergence() -> (bool, String) {
    let g = Game::from_name("tictactoe").unwrap();
    let c = minimax_convergence(&g, 1000, 23);
    let pass = c.root_r && c.root_c == 0 && c.oracle_value == 0 && c.losses == 0;
    (pass, format!("root c={} r={} oracle={}; vs random W/D/L {}/{}/{}", c.root_c, c.root_r, c.oracle_value, c.wins, c.draws, c.losses))
}

fn strength_premise(dir: &Path) -> (bool, String, Report) {
    let mut c = base_config(dir);
    c.strong_pool = pool(&[0.0], &[0]);
    c.weak_pool = pool(&[0.8], &(1..=100).collect::<Vec<_>>());
    c.variants = vec![Variant::Minimax];
    let report = run(&c);
    let mut pass = true;
    let mut detail = Vec::new();
    for g in GAMES {
        let r = row(&report, Variant::Minimax, OPPONENT_ITERATIONS, g);
        pass &= r.n >= 200 && r.gain >= 40.0;
        detail.push(format!("{g} gain {:.1}±{:.1} (n={})", r.gain, r.cr95_gain, r.n));
    }
    (pass, detail.join(", "), report)
}

fn mcts_config(dir: &Path, variants: Vec<Variant>, budgets: &[u64], games: &[&str]) -> TournamentConfig {
    let mut c = base_config(dir);
    c.games = games.iter().map(|g| g.to_string()).collect();
    // exact evaluator; the MCTS seed comes from the opponent profile
    c.strong_pool = pool(&[0.0], &[0]);
    c.weak_pool = pool(&[0.0], &(1..=50).collect::<Vec<_>>());
    c.variants = variants;
    c.budgets = budgets.iter().map(|&b| Budget::Iterations(b)).collect();
    c.opponent = OpponentSpec { kind: AgentKind::Mcts, budget: Budget::Iterations(MCTS_ITERATIONS), exploration_c: None };
    c
}

fn identities(reports: &[&Report]) -> (bool, String) {
    let mut rows = 0;
    let mut bad = 0;
    for r in reports.iter().flat_map(|r| &r.rows) {
        rows += 1;
        let ok = (r.gain - (r.win - r.loss)).abs() <= 1e-9 && (r.win + r.draw + r.loss - 100.0).abs() <= 1e-9;
        bad += usize::from(!ok);
    }
    (bad == 0, format!("{rows} summary rows, {bad} violations"))
}

fn byte_identical(dirs: &[&Path]) -> (bool, String) {
    let files = ["records.ndjson", "summary.csv", "curves.json", "report.json"];
    let mut checked = 0;
    for dir in dirs {
        let records = balance_arena::report::read_records(&dir.join("records.ndjson")).unwrap();
        let again = tempfile::tempdir().unwrap();
        emit_report(&records, again.path()).unwrap();
        for f in files {
            if std::fs::read(dir.join(f)).unwrap() != std::fs::read(again.path().join(f)).unwrap() {
                return (false, format!("{} differs after a rerun", dir.join(f).display()));
            }
            checked += 1;
        }
    }
    (true, format!("{checked} report files reproduced byte for byte"))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() {
    let root = tempfile::tempdir().unwrap();
    let dir = |name: &str| root.path().join(name);
    let mut outcomes = Vec::new();
    let mut push = |id, name, pass: bool, detail: String, elapsed: Duration, limit: Option<u64>| {
        let in_time = limit.map_or(true, |s| elapsed <= Duration::from_secs(s));
        let detail = if in_time { detail } else { format!("{detail}; over the {}s limit", limit.unwrap()) };
        let o = Outcome { id, name, pass: pass && in_time, detail, elapsed };
        println!("{} criterion {} ({}): {} [{:.0}s]", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name, o.detail, o.elapsed.as_secs_f64());
        outcomes.push(o);
    };

    let ((pass, detail), t) = timed(soundness);
    push(1, "oracle soundness", pass, detail, t, Some(300));

    let ((pass, detail), t) = timed(convergence);
    push(2, "solved-game convergence", pass, detail, t, Some(120));

    let ((pass, detail, premise), t) = timed(|| strength_premise(&dir("premise")));
    push(3, "strength premise", pass, detail, t, Some(900));

    let (balance, t) = timed(|| run(&base_config(&dir("balance"))));
    let b = OPPONENT_ITERATIONS;
    let mut ordered = true;
    let mut detail = Vec::new();
    for g in GAMES {
        let (mm, n, p) = (row(&balance, Variant::Minimax, b, g), row(&balance, Variant::MinibalN, b, g), row(&balance, Variant::MinibalP, b, g));
        ordered &= p.gain.abs() < mm.gain && n.gain < p.gain;
        detail.push(format!("{g} minimax {:.1} minibal_n {:.1} minibal_p {:.1}", mm.gain, n.gain, p.gain));
    }
    let all_p = row(&balance, Variant::MinibalP, b, ALL_GAMES);
    detail.push(format!("all-games |minibal_p| {:.1} (bound 20)", all_p.gain.abs()));
    push(4, "balance ordering", ordered && all_p.gain.abs() <= 20.0, detail.join("; "), t, Some(2700));

    let all_mm = row(&balance, Variant::Minimax, b, ALL_GAMES);
    push(
        5,
        "score ordering",
        all_p.score.abs() < all_mm.score,
        format!("all-games score minibal_p {:.3} vs minimax {:.3}", all_p.score, all_mm.score),
        Duration::ZERO,
        None,
    );

    let all_sw = row(&balance, Variant::MinibalPSolvedWin, b, ALL_GAMES);
    push(
        6,
        "solved-win adjustment",
        all_sw.gain > all_p.gain,
        format!("all-games gain solved-win {:.1} vs minibal_p {:.1}", all_sw.gain, all_p.gain),
        Duration::ZERO,
        None,
    );

    let (weak, t) = timed(|| run(&mcts_config(&dir("mcts"), vec![Variant::Minimax, Variant::MinibalP], &[OPPONENT_ITERATIONS], &GAMES)));
    let mut pass = true;
    let mut detail = Vec::new();
    for g in GAMES {
        let (mm, p) = (row(&weak, Variant::Minimax, b, g), row(&weak, Variant::MinibalP, b, g));
        pass &= mm.gain >= 80.0 && p.gain < mm.gain;
        detail.push(format!("{g} minimax {:.1} minibal_p {:.1} (n={})", mm.gain, p.gain, mm.n));
    }
    push(7, "very-weak opponent", pass, format!("vs mcts@{MCTS_ITERATIONS}: {}", detail.join(", ")), t, Some(900));

    let (sweep, t) = timed(|| run(&mcts_config(&dir("sweep"), vec![Variant::MinibalP], &SWEEP, &["connect4"])));
    let points: Vec<&SummaryRow> = SWEEP.iter().map(|&s| row(&sweep, Variant::MinibalP, s, "connect4")).collect();
    let mut pass = true;
    for w in points.windows(2) {
        let drop = w[0].gain - w[1].gain;
        // radius of the difference of two independent estimates
        let radius = (w[0].cr95_gain.powi(2) + w[1].cr95_gain.powi(2)).sqrt();
        pass &= drop <= radius;
    }
    let curve: Vec<String> = points.iter().map(|r| format!("{}:{:.0}±{:.0}", r.budget, r.gain, r.cr95_gain)).collect();
    push(8, "budget-sweep onset", pass, format!("connect4 minibal_p vs mcts@{MCTS_ITERATIONS}: {}", curve.join(" ")), t, None);

    let (ids, t) = timed(|| identities(&[&premise, &balance, &weak, &sweep]));
    let (bytes, t2) = timed(|| byte_identical(&[&dir("premise"), &dir("balance"), &dir("mcts"), &dir("sweep")]));
    push(9, "metric identities", ids.0 && bytes.0, format!("{}; {}", ids.1, bytes.1), t + t2, None);

    let unexpected: Vec<String> = outcomes
        .iter()
        .filter(|o| o.pass == KNOWN_FAILURES.contains(&o.id))
        .map(|o| format!("criterion {} {}", o.id, if o.pass { "passes but is listed as failing" } else { "fails" }))
        .collect();
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria pass; known failures {KNOWN_FAILURES:?}", outcomes.len());
    if !unexpected.is_empty() {
        println!("unexpected: {}", unexpected.join("; "));
        std::process::exit(1);
    }
}
