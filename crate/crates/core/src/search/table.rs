use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::game::{ActionId, Player};

use super::rules::ChildLabel;

/// One outgoing action of an expanded node.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub action: ActionId,
    /// Key of the successor state.
    pub child: u64,
    /// Times the action was taken by a descent.
    pub n: u32,
}

/// Search label of one state. Values are from the table's root player.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeEntry {
    /// Heuristic value.
    pub v: f64,
    /// Completion value: the decisive endgame outcome when known, 0 otherwise.
    pub c: i8,
    /// Resolved: `(v, c)` are final for this state.
    pub r: bool,
    /// Resolution depth; only meaningful when `r`.
    pub rd: u16,
    pub to_move: Player,
    /// Outgoing actions in canonical order, empty until expanded.
    pub edges: Vec<Edge>,
    pub expanded: bool,
}

impl NodeEntry {
    pub(crate) fn leaf(v: f64, c: i8, terminal: bool, to_move: Player) -> NodeEntry {
        NodeEntry { v, c, r: terminal, rd: 0, to_move, edges: Vec::new(), expanded: terminal }
    }

    /// Sum of the selection counts of all outgoing actions.
    pub fn selections(&self) -> u64 {
        self.edges.iter().map(|e| u64::from(e.n)).sum()
    }
}

/// State labels of one agent for one match, keyed by state key.
#[derive(Clone, Debug)]
pub struct TranspositionTable {
    entries: HashMap<u64, NodeEntry>,
    pub root_key: Option<u64>,
    pub root_player: Player,
}

impl TranspositionTable {
    pub fn new(root_player: Player) -> TranspositionTable {
        TranspositionTable { entries: HashMap::new(), root_key: None, root_player }
    }

    pub fn get(&self, key: u64) -> Option<&NodeEntry> {
        self.entries.get(&key)
    }

    pub(crate) fn get_mut(&mut self, key: u64) -> Option<&mut NodeEntry> {
        self.entries.get_mut(&key)
    }

    pub(crate) fn insert(&mut self, key: u64, entry: NodeEntry) {
        self.entries.insert(key, entry);
    }

    pub fn contains(&self, key: u64) -> bool {
        self.entries.contains_key(&key)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.root_key = None;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &NodeEntry)> {
        self.entries.iter()
    }

    /// Labels of the children of an expanded node, in canonical order.
    pub fn child_labels(&self, key: u64) -> Vec<ChildLabel> {
        let Some(entry) = self.entries.get(&key) else {
            return Vec::new();
        };
        entry
            .edges
            .iter()
            .map(|edge| {
                let child = &self.entries[&edge.child];
                ChildLabel { action: edge.action, v: child.v, c: child.c, r: child.r, rd: child.rd, n: edge.n }
            })
            .collect()
    }
}
