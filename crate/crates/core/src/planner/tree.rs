//! Search tree stored as flat per-node arrays.

use rand::Rng;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex};

const NO_CHILD: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeId(pub u32);

/// Statistics of one history node.
#[derive(Clone, Copy, Debug)]
pub struct SearchNode<'a, F> {
    /// `N(h)`
    pub visits: u32,
    /// `N(h, a)` per action.
    pub action_visits: &'a [u32],
    /// `Q(h, a)` per action.
    pub values: &'a [F],
}

/// Tree keyed by action-observation histories. Children of a node are
/// indexed by `(a, z)`.
#[derive(Clone, Debug)]
pub struct SearchTree<F> {
    actions: usize,
    observations: usize,
    visits: Vec<u32>,
    action_visits: Vec<u32>,
    values: Vec<F>,
    children: Vec<u32>,
}

impl<F: Scalar> SearchTree<F> {
    pub fn new(actions: usize, observations: usize) -> Self {
        Self {
            actions,
            observations,
            visits: Vec::new(),
            action_visits: Vec::new(),
            values: Vec::new(),
            children: Vec::new(),
        }
    }

    /// Drops every node but keeps allocations.
    pub fn clear(&mut self) {
        self.visits.clear();
        self.action_visits.clear();
        self.values.clear();
        self.children.clear();
    }

    pub fn num_nodes(&self) -> usize {
        self.visits.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions
    }

    /// Adds a node with `N = 0`, `Q = 0` everywhere.
    pub fn add_node(&mut self) -> NodeId {
        let id = self.visits.len();
        self.visits.push(0);
        self.action_visits.extend(std::iter::repeat_n(0, self.actions));
        self.values.extend(std::iter::repeat_n(F::zero(), self.actions));
        self.children
            .extend(std::iter::repeat_n(NO_CHILD, self.actions * self.observations));
        NodeId(id as u32)
    }

    #[inline]
    fn child_slot(&self, node: NodeId, a: ActionIndex, z: ObservationIndex) -> usize {
        node.0 as usize * self.actions * self.observations + a.0 * self.observations + z.0
    }

    #[inline]
    pub fn child(&self, node: NodeId, a: ActionIndex, z: ObservationIndex) -> Option<NodeId> {
        match self.children[self.child_slot(node, a, z)] {
            NO_CHILD => None,
            c => Some(NodeId(c)),
        }
    }

    pub fn add_child(&mut self, node: NodeId, a: ActionIndex, z: ObservationIndex) -> NodeId {
        let slot = self.child_slot(node, a, z);
        debug_assert_eq!(self.children[slot], NO_CHILD);
        let child = self.add_node();
        self.children[slot] = child.0;
        child
    }

    pub fn node(&self, node: NodeId) -> SearchNode<'_, F> {
        let i = node.0 as usize;
        let span = i * self.actions..(i + 1) * self.actions;
        SearchNode {
            visits: self.visits[i],
            action_visits: &self.action_visits[span.clone()],
            values: &self.values[span],
        }
    }

    /// Credits `ret` to `(h, a)`: `N(h)` and `N(h, a)` grow by one and
    /// `Q(h, a)` moves to the running mean.
    #[inline]
    pub fn update(&mut self, node: NodeId, a: ActionIndex, ret: F) {
        let i = node.0 as usize;
        let k = i * self.actions + a.0;
        self.visits[i] += 1;
        self.action_visits[k] += 1;
        let n = F::lit(self.action_visits[k] as f64);
        let q = &mut self.values[k];
        *q = (n - F::one()) / n * *q + ret / n;
    }

    /// `argmax_a Q(h,a) + c·sqrt(ln(N(h)+1) / N(h,a))`; unvisited actions
    /// score `+∞`. Ties are broken uniformly at random.
    pub fn ucb_select<R: Rng + ?Sized>(&self, node: NodeId, c: F, rng: &mut R) -> ActionIndex {
        let stats = self.node(node);
        let log_n = (F::lit(stats.visits as f64) + F::one()).ln();
        argmax_random(
            (0..self.actions).map(|a| {
                let n = stats.action_visits[a];
                if n == 0 {
                    F::infinity()
                } else {
                    stats.values[a] + c * (log_n / F::lit(n as f64)).sqrt()
                }
            }),
            rng,
        )
        .map(ActionIndex)
        .expect("node has at least one action")
    }

    /// `argmax_a Q(h, a)` over visited actions; ties uniformly at random.
    pub fn greedy_action<R: Rng + ?Sized>(&self, node: NodeId, rng: &mut R) -> Result<ActionIndex> {
        let stats = self.node(node);
        argmax_random(
            (0..self.actions).map(|a| {
                if stats.action_visits[a] == 0 {
                    F::neg_infinity()
                } else {
                    stats.values[a]
                }
            }),
            rng,
        )
        .filter(|&a| stats.action_visits[a] > 0)
        .map(ActionIndex)
        .ok_or(Error::NoVisitedActions)
    }
}

/// Index of a maximal element, chosen uniformly among exact ties.
pub(crate) fn argmax_random<F: Scalar, R: Rng + ?Sized>(
    values: impl Iterator<Item = F>,
    rng: &mut R,
) -> Option<usize> {
    let mut best: Option<(usize, F)> = None;
    let mut ties = 0u32;
    for (i, v) in values.enumerate() {
        match best {
            None => {
                best = Some((i, v));
                ties = 1;
            }
            Some((_, b)) if v > b => {
                best = Some((i, v));
                ties = 1;
            }
            Some((_, b)) if v == b => {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    best = Some((i, v));
                }
            }
            _ => {}
        }
    }
    best.map(|(i, _)| i)
}
