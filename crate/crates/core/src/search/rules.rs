//! Decision and resolution rules of the search variants.
//!
//! Every rule works on the labels of a node's children, listed in canonical
//! action order, with values from the root player's perspective. Ties left
//! after a rule's own key are broken by the least-selected child, then by
//! canonical order.

use core::cmp::Ordering;

use crate::game::ActionId;

use super::Variant;

/// Labels of one child as seen from its parent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChildLabel {
    pub action: ActionId,
    pub v: f64,
    pub c: i8,
    pub r: bool,
    pub rd: u16,
    pub n: u32,
}

impl ChildLabel {
    pub fn open(action: ActionId, v: f64, n: u32) -> ChildLabel {
        ChildLabel { action, v, c: 0, r: false, rd: 0, n }
    }

    pub fn resolved(action: ActionId, v: f64, c: i8, rd: u16) -> ChildLabel {
        ChildLabel { action, v, c, r: true, rd, n: 0 }
    }

    /// Value compared by Minibal+: the completion value of a decisive resolved
    /// child, the heuristic value otherwise.
    pub fn effective(&self) -> f64 {
        if self.r && self.c != 0 {
            f64::from(self.c)
        } else {
            self.v
        }
    }
}

/// Who acts at a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// The root player: maximizer under Minimax, balanced player under Minibal.
    Balanced,
    Opponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    /// Inside a descent: only unresolved children are candidates.
    Descent,
    /// Backups and the move actually played: every child is a candidate.
    FinalMove,
}

/// Index of the preferred child; `prefer(a, b) == Greater` means `a` beats `b`.
fn argbest(children: &[ChildLabel], prefer: impl Fn(&ChildLabel, &ChildLabel) -> Ordering) -> usize {
    assert!(!children.is_empty(), "selection over no children");
    let mut best = 0;
    for (i, child) in children.iter().enumerate().skip(1) {
        let current = &children[best];
        let order = prefer(child, current).then_with(|| current.n.cmp(&child.n));
        if order == Ordering::Greater {
            best = i;
        }
    }
    best
}

/// Lexicographic maximum of `(c, v)`.
pub fn best_action_minimax(children: &[ChildLabel]) -> usize {
    argbest(children, |a, b| a.c.cmp(&b.c).then(a.v.total_cmp(&b.v)))
}

/// Lexicographic minimum of `(c, v)`: the opponent maximizes its own outcome.
pub fn opponent_best_action(children: &[ChildLabel]) -> usize {
    argbest(children, |a, b| b.c.cmp(&a.c).then(b.v.total_cmp(&a.v)))
}

/// Lexicographic minimum of `(|c|, |v|)`.
pub fn best_action_minibal_n(children: &[ChildLabel]) -> usize {
    argbest(children, |a, b| b.c.abs().cmp(&a.c.abs()).then(b.v.abs().total_cmp(&a.v.abs())))
}

/// Smallest positive effective value if there is one, largest otherwise.
pub fn best_action_minibal_p(children: &[ChildLabel]) -> usize {
    let any_positive = children.iter().any(|ch| ch.effective() > 0.0);
    if any_positive {
        argbest(children, |a, b| {
            let (ea, eb) = (a.effective(), b.effective());
            match (ea > 0.0, eb > 0.0) {
                (true, false) => Ordering::Greater,
                (false, true) => Ordering::Less,
                (true, true) => eb.total_cmp(&ea),
                (false, false) => Ordering::Equal,
            }
        })
    } else {
        argbest(children, |a, b| a.effective().total_cmp(&b.effective()))
    }
}

/// A resolved winning child (with proof depth at most `depth_bound` when
/// given), shortest proof first.
pub fn apply_solved_win_rule(children: &[ChildLabel], depth_bound: Option<u16>) -> Option<usize> {
    children
        .iter()
        .enumerate()
        .filter(|(_, ch)| ch.r && ch.c == 1 && depth_bound.map_or(true, |d| ch.rd <= d))
        .min_by_key(|(i, ch)| (ch.rd, *i))
        .map(|(i, _)| i)
}

/// The variant's choice among `children`.
pub fn select_action(children: &[ChildLabel], variant: Variant, role: Role, depth_bound: Option<u16>) -> usize {
    match (variant, role) {
        (_, Role::Opponent) => opponent_best_action(children),
        (Variant::Minimax, Role::Balanced) => best_action_minimax(children),
        (Variant::MinibalN, Role::Balanced) => best_action_minibal_n(children),
        (Variant::MinibalP, Role::Balanced) => best_action_minibal_p(children),
        (Variant::MinibalPSolvedWin, Role::Balanced) => {
            apply_solved_win_rule(children, depth_bound).unwrap_or_else(|| best_action_minibal_p(children))
        }
    }
}

/// Selection restricted to the candidates of `phase`. Returns an index into
/// `children`, or `None` when a descent has no unresolved child left.
pub fn select_in_phase(
    children: &[ChildLabel],
    variant: Variant,
    role: Role,
    depth_bound: Option<u16>,
    phase: Phase,
) -> Option<usize> {
    match phase {
        Phase::FinalMove => (!children.is_empty()).then(|| select_action(children, variant, role, depth_bound)),
        Phase::Descent => {
            let open: alloc::vec::Vec<usize> = (0..children.len()).filter(|&i| !children[i].r).collect();
            if open.is_empty() {
                return None;
            }
            let labels: alloc::vec::Vec<ChildLabel> = open.iter().map(|&i| children[i]).collect();
            Some(open[select_action(&labels, variant, role, depth_bound)])
        }
    }
}

/// `(v, c)` of a node: copied from the child its mover would select.
pub fn backup_entry(children: &[ChildLabel], variant: Variant, role: Role, depth_bound: Option<u16>) -> (f64, i8) {
    let best = &children[select_action(children, variant, role, depth_bound)];
    (best.v, best.c)
}

/// Resolution depth of a node if it is resolved.
///
/// A node is resolved when one of its resolved children settles the mover's
/// decision (a win for the Minimax player, a loss of the root player for the
/// opponent, a draw for the balanced player) or when all of its children are
/// resolved. The depth is one more than that of the settling child, or one
/// more than the deepest child in the all-resolved case.
pub fn backup_resolution(children: &[ChildLabel], variant: Variant, role: Role, depth_bound: Option<u16>) -> Option<u16> {
    let settle = |wanted: i8| children.iter().filter(|ch| ch.r && ch.c == wanted).map(|ch| ch.rd).min();
    let trigger = match (variant, role) {
        (_, Role::Opponent) => settle(-1),
        (Variant::Minimax, Role::Balanced) => settle(1),
        (Variant::MinibalN | Variant::MinibalP, Role::Balanced) => settle(0),
        (Variant::MinibalPSolvedWin, Role::Balanced) => {
            let win = apply_solved_win_rule(children, depth_bound).map(|i| children[i].rd);
            match (settle(0), win) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            }
        }
    };
    if let Some(rd) = trigger {
        return Some(rd.saturating_add(1));
    }
    if children.iter().all(|ch| ch.r) {
        return children.iter().map(|ch| ch.rd).max().map(|rd| rd.saturating_add(1));
    }
    None
}
