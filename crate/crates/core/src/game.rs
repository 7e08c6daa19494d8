//! Search over the quotient with well-quasi-order pruning, labelling and
//! controller extraction.
//!
//! Nodes are expanded depth-first. A node is pruned when a strict ancestor
//! is `≤_d` it; it is then labelled good and points back at that ancestor.
//! Labels under the default rule:
//!
//! * bad if the node is bad or some environment child is bad;
//! * otherwise good if the node is final, or has environment children (all
//!   good), or has a good controller child;
//! * otherwise bad.

use std::collections::{BTreeMap, VecDeque};
use std::time::{Duration, Instant};

use crate::dsl::Owner;
use crate::error::{Error, Result};
use crate::ground::ActionId;
use crate::problem::Problem;
use crate::quotient::{node_leq, QNode, Quotient, SetOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelRule {
    /// Environment children must all be good; a non-final node without them
    /// needs one good controller child.
    #[default]
    Existential,
    /// Every child must be good.
    Universal,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub order: SetOrder,
    pub rule: LabelRule,
    pub max_nodes: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { order: SetOrder::Smyth, rule: LabelRule::Existential, max_nodes: 200_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Controllable,
    Uncontrollable,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Controllable => "CONTROLLABLE",
            Verdict::Uncontrollable => "UNCONTROLLABLE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Label {
    Pending,
    Good,
    Bad,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub state: QNode,
    pub parent: Option<usize>,
    /// Action, owner and resets of the edge from the parent.
    pub via: Option<(ActionId, Owner, Vec<usize>)>,
    pub depth: usize,
    pub label: Label,
    pub bad: bool,
    pub pruned_by: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Stats {
    pub nodes_created: usize,
    pub nodes_expanded: usize,
    pub nodes_pruned: usize,
    pub max_depth: usize,
    pub wall_time: Duration,
}

impl Stats {
    pub fn to_kv(&self) -> String {
        format!(
            "nodes_expanded={}\nnodes_pruned={}\nnodes_created={}\nmax_depth={}\nwall_time_ms={:.3}\n",
            self.nodes_expanded,
            self.nodes_pruned,
            self.nodes_created,
            self.max_depth,
            self.wall_time.as_secs_f64() * 1000.0
        )
    }
}

/// Selected edge of an extracted controller: tree nodes, pruned targets
/// redirected to the dominating ancestor.
#[derive(Debug, Clone)]
pub struct Edge {
    pub action: ActionId,
    pub owner: Owner,
    pub resets: Vec<usize>,
    pub target: usize,
}

#[derive(Debug, Clone)]
pub struct Strategy {
    /// Tree node ids in controller order; the first is the root.
    pub nodes: Vec<usize>,
    pub edges: BTreeMap<usize, Vec<Edge>>,
}

#[derive(Debug, Clone)]
pub struct WitnessStep {
    pub action: ActionId,
    pub owner: Owner,
    pub resets: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub steps: Vec<WitnessStep>,
    /// `true` if the path ends in a node that is final and bad, `false` if
    /// it ends in a non-final node with no way to continue.
    pub violation: bool,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub verdict: Verdict,
    pub stats: Stats,
    pub tree: Vec<TreeNode>,
    pub strategy: Option<Strategy>,
    pub witness: Option<Witness>,
}

struct Frame {
    id: usize,
    env: Vec<usize>,
    ctrl: Vec<usize>,
    next: usize,
    is_final: bool,
}

struct Search<'a> {
    q: Quotient<'a>,
    opts: SolveOptions,
    tree: Vec<TreeNode>,
    stats: Stats,
}

impl Search<'_> {
    fn add(
        &mut self,
        state: QNode,
        parent: Option<usize>,
        via: Option<(ActionId, Owner, Vec<usize>)>,
    ) -> Result<usize> {
        if self.tree.len() >= self.opts.max_nodes {
            return Err(Error::Resource(format!("search exceeded {} nodes", self.opts.max_nodes)));
        }
        let depth = parent.map_or(0, |p| self.tree[p].depth + 1);
        self.stats.max_depth = self.stats.max_depth.max(depth);
        self.tree.push(TreeNode {
            state,
            parent,
            via,
            depth,
            label: Label::Pending,
            bad: false,
            pruned_by: None,
            children: Vec::new(),
        });
        self.stats.nodes_created += 1;
        Ok(self.tree.len() - 1)
    }

    /// Labels leaves immediately; returns a frame for nodes to expand.
    fn enter(&mut self, id: usize) -> Result<Option<Frame>> {
        if self.q.is_bad(&self.tree[id].state) {
            self.tree[id].bad = true;
            self.tree[id].label = Label::Bad;
            return Ok(None);
        }
        let mut anc = self.tree[id].parent;
        while let Some(a) = anc {
            if node_leq(self.opts.order, &self.tree[a].state, &self.tree[id].state) {
                self.tree[id].pruned_by = Some(a);
                self.tree[id].label = Label::Good;
                self.stats.nodes_pruned += 1;
                return Ok(None);
            }
            anc = self.tree[a].parent;
        }
        self.stats.nodes_expanded += 1;
        let succ = self.q.successors(&self.tree[id].state)?;
        let (mut env, mut ctrl) = (Vec::new(), Vec::new());
        for s in succ {
            let child = self.add(s.node, Some(id), Some((s.action, s.owner, s.resets)))?;
            self.tree[id].children.push(child);
            match s.owner {
                Owner::Environment => env.push(child),
                Owner::Controller => ctrl.push(child),
            }
        }
        let is_final = self.q.is_final(&self.tree[id].state);
        Ok(Some(Frame { id, env, ctrl, next: 0, is_final }))
    }

    fn decide(&self, f: &Frame) -> Option<Label> {
        let label = |c: &usize| self.tree[*c].label;
        let order: Vec<usize> = f.env.iter().chain(&f.ctrl).copied().collect();
        let done = &order[..f.next];
        match self.opts.rule {
            LabelRule::Universal => {
                if done.iter().any(|c| label(c) == Label::Bad) {
                    Some(Label::Bad)
                } else if f.next == order.len() {
                    Some(Label::Good)
                } else {
                    None
                }
            }
            LabelRule::Existential => {
                if done.iter().take(f.env.len()).any(|c| label(c) == Label::Bad) {
                    return Some(Label::Bad);
                }
                if f.next < f.env.len() {
                    return None;
                }
                if f.is_final || !f.env.is_empty() {
                    return Some(Label::Good);
                }
                if done.iter().any(|c| label(c) == Label::Good) {
                    Some(Label::Good)
                } else if f.next == order.len() {
                    Some(Label::Bad)
                } else {
                    None
                }
            }
        }
    }

    fn run(&mut self, root: usize) -> Result<()> {
        let mut stack = Vec::new();
        if let Some(f) = self.enter(root)? {
            stack.push(f);
        }
        while let Some(frame) = stack.last_mut() {
            let f: &Frame = frame;
            if let Some(l) = self.decide(f) {
                let id = f.id;
                self.tree[id].label = l;
                stack.pop();
                continue;
            }
            let child = f.env.iter().chain(&f.ctrl).nth(f.next).copied().expect("undecided frame has children");
            stack.last_mut().unwrap().next += 1;
            if let Some(f) = self.enter(child)? {
                stack.push(f);
            }
        }
        Ok(())
    }

    fn selected(&self, id: usize) -> Vec<usize> {
        let n = &self.tree[id];
        let owner = |c: &usize| self.tree[*c].via.as_ref().map(|v| v.1);
        let env: Vec<usize> = n.children.iter().filter(|c| owner(c) == Some(Owner::Environment)).copied().collect();
        let mut out = env.clone();
        if !self.q.is_final(&n.state) && env.is_empty() {
            if let Some(c) =
                n.children.iter().find(|c| owner(c) == Some(Owner::Controller) && self.tree[**c].label == Label::Good)
            {
                out.push(*c);
            }
        }
        out
    }

    fn extract(&self) -> Strategy {
        let mut nodes = vec![0];
        let mut edges = BTreeMap::new();
        let mut queue = VecDeque::from([0usize]);
        let mut seen = std::collections::BTreeSet::from([0usize]);
        while let Some(id) = queue.pop_front() {
            let mut out = Vec::new();
            for c in self.selected(id) {
                let (action, owner, resets) = self.tree[c].via.clone().expect("child has an edge");
                let target = self.tree[c].pruned_by.unwrap_or(c);
                if seen.insert(target) {
                    nodes.push(target);
                    queue.push_back(target);
                }
                out.push(Edge { action, owner, resets, target });
            }
            edges.insert(id, out);
        }
        Strategy { nodes, edges }
    }

    fn witness(&self) -> Witness {
        let mut steps = Vec::new();
        let mut id = 0;
        loop {
            let n = &self.tree[id];
            if n.bad {
                return Witness { steps, violation: true };
            }
            let bad_child = |owner| {
                n.children.iter().copied().find(|c| {
                    self.tree[*c].label == Label::Bad && self.tree[*c].via.as_ref().map(|v| v.1) == Some(owner)
                })
            };
            let Some(next) = bad_child(Owner::Environment).or_else(|| bad_child(Owner::Controller)) else {
                return Witness { steps, violation: false };
            };
            let (action, owner, resets) = self.tree[next].via.clone().unwrap();
            steps.push(WitnessStep { action, owner, resets });
            id = next;
        }
    }
}

pub fn solve(problem: &Problem, opts: SolveOptions) -> Result<Solution> {
    let start = Instant::now();
    let q = Quotient::new(&problem.theory, &problem.ata);
    let root_state = q.initial(&problem.program);
    let mut s = Search { q, opts, tree: Vec::new(), stats: Stats::default() };
    let root = s.add(root_state, None, None)?;
    s.run(root)?;
    let verdict = if s.tree[root].label == Label::Good { Verdict::Controllable } else { Verdict::Uncontrollable };
    let (strategy, witness) = match verdict {
        Verdict::Controllable => (Some(s.extract()), None),
        Verdict::Uncontrollable => (None, Some(s.witness())),
    };
    s.stats.wall_time = start.elapsed();
    Ok(Solution { verdict, stats: s.stats, tree: s.tree, strategy, witness })
}
