use std::collections::HashMap;

use balance_core::eval::EvalProfile;
use balance_core::oracle::Oracle;
use balance_core::search::rules::{
    apply_solved_win_rule, best_action_minibal_n, best_action_minibal_p, best_action_minimax, opponent_best_action,
    ChildLabel,
};
use balance_core::search::{search, search_traced, SearchConfig, TranspositionTable};
use balance_core::{ActionId, Budget, Clock, Game, GameState, NoClock, Player, Rules, Variant};
use proptest::prelude::*;

fn label(a: u16, c: i8, v: f64, r: bool, rd: u16, n: u32) -> ChildLabel {
    ChildLabel { action: ActionId(a), v, c, r, rd, n }
}

fn open(a: u16, v: f64, n: u32) -> ChildLabel {
    label(a, 0, v, false, 0, n)
}

/// Every ordering of `items` (Heap's algorithm).
fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    fn go<T: Clone>(k: usize, a: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            go(k - 1, a, out);
            let j = if k % 2 == 0 { i } else { 0 };
            a.swap(j, k - 1);
        }
    }
    let mut out = Vec::new();
    go(items.len(), &mut items.to_vec(), &mut out);
    out
}

type Rule = fn(&[ChildLabel]) -> usize;

fn assert_choice_in_every_order(rule: Rule, children: &[ChildLabel], expected: u16) {
    for p in permutations(children) {
        assert_eq!(p[rule(&p)].action, ActionId(expected), "{p:?}");
    }
}

#[test]
fn rule_tables_hold_in_every_order() {
    let (a, b, d) = (0, 1, 3);
    let minimax: Rule = best_action_minimax;
    assert_choice_in_every_order(minimax, &[open(a, 0.9, 0), label(b, 1, 0.1, true, 1, 0)], b);
    assert_choice_in_every_order(minimax, &[open(a, 0.3, 0), open(b, 0.8, 0)], b);
    assert_choice_in_every_order(minimax, &[open(a, 0.5, 3), open(b, 0.5, 1)], b);

    let opp: Rule = opponent_best_action;
    assert_choice_in_every_order(opp, &[label(a, -1, -0.2, true, 1, 0), open(b, -0.9, 0)], a);
    assert_choice_in_every_order(opp, &[open(a, 0.4, 0), open(b, -0.1, 0)], b);
    assert_choice_in_every_order(opp, &[open(a, 0.0, 2), open(b, 0.0, 0)], b);

    let near: Rule = best_action_minibal_n;
    assert_choice_in_every_order(near, &[open(a, 0.5, 0), open(b, -0.2, 0), open(d, 0.1, 0)], d);
    assert_choice_in_every_order(near, &[label(a, 1, 1.0, true, 1, 0), open(b, 0.6, 0)], b);
    assert_choice_in_every_order(near, &[open(a, 0.0, 1), open(b, 0.0, 0)], b);

    let plus: Rule = best_action_minibal_p;
    assert_choice_in_every_order(plus, &[open(a, 0.5, 0), open(b, -0.2, 0), open(d, 0.1, 0)], d);
    assert_choice_in_every_order(plus, &[open(a, -0.1, 0), open(b, -0.6, 0)], a);
    assert_choice_in_every_order(plus, &[label(a, 1, 0.7, true, 1, 0), open(b, 0.05, 0)], b);

    for p in permutations(&[label(a, 1, 0.7, true, 2, 0), open(b, 0.05, 0)]) {
        assert_eq!(apply_solved_win_rule(&p, None).map(|i| p[i].action), Some(ActionId(a)));
        assert_eq!(apply_solved_win_rule(&p, Some(1)), None);
        assert_eq!(p[best_action_minibal_p(&p)].action, ActionId(b));
    }
    assert_eq!(apply_solved_win_rule(&[open(a, 0.2, 0), label(b, 0, 0.0, true, 1, 0)], None), None);
}

fn child() -> impl Strategy<Value = ChildLabel> {
    (-1i8..=1, -8i32..=8, any::<bool>(), 0u16..4, 0u32..3).prop_map(|(c, v, r, rd, n)| {
        // decisive completion values only occur on resolved entries
        let r = r || c != 0;
        ChildLabel { action: ActionId(0), v: f64::from(v) / 8.0, c, r, rd, n }
    })
}

fn children() -> impl Strategy<Value = Vec<ChildLabel>> {
    prop::collection::vec(child(), 1..8).prop_map(|mut v| {
        for (i, ch) in v.iter_mut().enumerate() {
            ch.action = ActionId(i as u16);
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    /// Reordering children can only change the pick among children that tie
    /// on the rule's whole key, selection count included.
    #[test]
    fn selection_is_order_independent_up_to_ties((kids, shuffled) in children().prop_flat_map(|k| (Just(k.clone()), Just(k).prop_shuffle()))) {
        let mm = |ch: &ChildLabel| (ch.c, ch.v.to_bits(), ch.n);
        prop_assert_eq!(mm(&kids[best_action_minimax(&kids)]), mm(&shuffled[best_action_minimax(&shuffled)]));
        prop_assert_eq!(mm(&kids[opponent_best_action(&kids)]), mm(&shuffled[opponent_best_action(&shuffled)]));
        let near = |ch: &ChildLabel| (ch.c.abs(), ch.v.abs().to_bits(), ch.n);
        prop_assert_eq!(near(&kids[best_action_minibal_n(&kids)]), near(&shuffled[best_action_minibal_n(&shuffled)]));
        let plus = |ch: &ChildLabel| (ch.effective().to_bits(), ch.n);
        prop_assert_eq!(plus(&kids[best_action_minibal_p(&kids)]), plus(&shuffled[best_action_minibal_p(&shuffled)]));
        let win = |ch: &ChildLabel| (ch.r, ch.c, ch.rd);
        let pick = |k: &[ChildLabel]| apply_solved_win_rule(k, Some(2)).map(|i| win(&k[i]));
        prop_assert_eq!(pick(&kids), pick(&shuffled));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn minibal_p_keeps_a_positive_outcome_when_one_exists(kids in children()) {
        let chosen = kids[best_action_minibal_p(&kids)].effective();
        let positives: Vec<f64> = kids.iter().map(ChildLabel::effective).filter(|&e| e > 0.0).collect();
        if positives.is_empty() {
            prop_assert!(kids.iter().all(|ch| ch.effective() <= chosen));
        } else {
            prop_assert!(chosen > 0.0);
            prop_assert!(positives.iter().all(|&e| e >= chosen));
        }
    }
}

fn opening(game: &Game, moves: &[prop::sample::Index]) -> GameState {
    let mut s = game.initial_state();
    for m in moves {
        let actions = game.legal_actions(&s);
        let next = game.apply(&s, actions[m.index(actions.len())]).unwrap();
        if game.is_terminal(&next) {
            break;
        }
        s = next;
    }
    s
}

fn variant() -> impl Strategy<Value = Variant> {
    prop::sample::select(Variant::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Each descent bumps one count per interior node it passes, the root
    /// counts sum to the iterations, and an iteration budget is spent exactly
    /// unless the root resolves first.
    #[test]
    fn descent_counts_match_the_trace(
        name in prop::sample::select(vec!["tictactoe", "connect4-5x4", "othello6"]),
        v in variant(),
        moves in prop::collection::vec(any::<prop::sample::Index>(), 0..6),
        budget in 1u64..400,
        quality in prop::sample::select(vec![0.0, 0.5]),
    ) {
        let g = Game::from_name(name).unwrap();
        let root = opening(&g, &moves);
        let config = SearchConfig::new(v, Budget::Iterations(budget), EvalProfile::new(name, quality, 3));
        let mut table = TranspositionTable::new(root.to_move);
        let mut paths = Vec::new();
        let res = search_traced(&g, &root, &config, &mut table, &NoClock, &mut |e| paths.push(e.path.clone())).unwrap();

        prop_assert_eq!(paths.len() as u64, res.iterations);
        prop_assert!(res.iterations == budget || res.resolved_early);
        prop_assert_eq!(res.root_entry.selections(), res.iterations);

        let mut counts: HashMap<(u64, ActionId), u32> = HashMap::new();
        for path in &paths {
            let mut s = root;
            for &a in path {
                *counts.entry((g.state_key(&s), a)).or_default() += 1;
                s = g.apply(&s, a).unwrap();
            }
        }
        for (&key, entry) in table.iter() {
            for edge in &entry.edges {
                prop_assert_eq!(edge.n, counts.get(&(key, edge.action)).copied().unwrap_or(0));
            }
        }
    }

    /// Minimax resolution agrees with the exhaustive game value.
    #[test]
    fn minimax_resolutions_are_exact(
        name in prop::sample::select(vec!["tictactoe", "connect4-5x4"]),
        moves in prop::collection::vec(any::<prop::sample::Index>(), 0..6),
        budget in 1u64..600,
        quality in prop::sample::select(vec![0.0, 0.3, 0.9]),
    ) {
        let g = Game::from_name(name).unwrap();
        let root = opening(&g, &moves);
        let config = SearchConfig::new(Variant::Minimax, Budget::Iterations(budget), EvalProfile::new(name, quality, 9));
        let mut table = TranspositionTable::new(root.to_move);
        search(&g, &root, &config, &mut table, &NoClock).unwrap();
        let mut oracle = Oracle::new(&g);
        for (s, c) in resolved(&g, &table, root) {
            prop_assert_eq!(c, oracle.value_for(&s, root.to_move).unwrap(), "{}", g.format_state(&s));
        }
    }
}

/// `(state, c)` of every resolved entry reachable from `root`.
fn resolved(g: &Game, table: &TranspositionTable, root: GameState) -> Vec<(GameState, i8)> {
    let mut seen = HashMap::new();
    let mut stack = vec![root];
    while let Some(s) = stack.pop() {
        let key = g.state_key(&s);
        if seen.insert(key, s).is_some() {
            continue;
        }
        if let Some(e) = table.get(key) {
            stack.extend(e.edges.iter().map(|edge| g.apply(&s, edge.action).unwrap()));
        }
    }
    seen.into_iter().filter_map(|(k, s)| table.get(k).filter(|e| e.r).map(|e| (s, e.c))).collect()
}

#[test]
fn reused_table_stays_sound_over_a_whole_game() {
    // the agent keeps its table while a scripted opponent plays the first
    // legal move; every resolved label must still match the oracle
    for name in ["tictactoe", "connect4-5x4"] {
        let g = Game::from_name(name).unwrap();
        let mut oracle = Oracle::new(&g);
        for seat in [Player::First, Player::Second] {
            let config = SearchConfig::new(Variant::Minimax, Budget::Iterations(150), EvalProfile::new(name, 0.4, 5));
            let mut table = TranspositionTable::new(seat);
            let mut s = g.initial_state();
            while !g.is_terminal(&s) {
                if s.to_move == seat {
                    let res = search(&g, &s, &config, &mut table, &NoClock).unwrap();
                    assert_eq!(table.root_player, seat);
                    for (state, c) in resolved(&g, &table, s) {
                        assert_eq!(c, oracle.value_for(&state, seat).unwrap(), "{name}: {}", g.format_state(&state));
                    }
                    s = g.apply(&s, res.chosen).unwrap();
                } else {
                    s = g.apply(&s, g.legal_actions(&s)[0]).unwrap();
                }
            }
        }
    }
}

#[test]
fn reused_and_fresh_tables_agree_on_solved_positions() {
    let g = Game::from_name("tictactoe").unwrap();
    let config = SearchConfig::new(Variant::Minimax, Budget::Iterations(u64::MAX), EvalProfile::exact("tictactoe"));
    let mut reused = TranspositionTable::new(Player::First);
    let mut s = g.initial_state();
    while !g.is_terminal(&s) {
        if s.to_move == Player::First {
            let a = search(&g, &s, &config, &mut reused, &NoClock).unwrap();
            let b = search(&g, &s, &config, &mut TranspositionTable::new(Player::First), &NoClock).unwrap();
            assert_eq!((a.root_entry.c, a.root_entry.r), (b.root_entry.c, b.root_entry.r));
            s = g.apply(&s, a.chosen).unwrap();
        } else {
            let actions = g.legal_actions(&s);
            s = g.apply(&s, actions[actions.len() / 2]).unwrap();
        }
    }
}

struct Wall(std::time::Instant);

impl Clock for Wall {
    fn now(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

#[test]
fn time_budget_stops_after_the_deadline() {
    let g = Game::from_name("othello6").unwrap();
    let config = SearchConfig::new(Variant::MinibalP, Budget::Seconds(0.05), EvalProfile::exact("othello6"));
    let mut table = TranspositionTable::new(Player::First);
    let clock = Wall(std::time::Instant::now());
    let res = search(&g, &g.initial_state(), &config, &mut table, &clock).unwrap();
    assert!(res.elapsed >= 0.05, "{}", res.elapsed);
    // one descent on this board takes well under a millisecond
    assert!(res.elapsed < 0.05 + 0.02, "{}", res.elapsed);
    assert!(res.iterations > 0);
}
