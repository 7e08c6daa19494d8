//! Extracted controllers: in-memory graph, JSON file format, DOT export and
//! structural checks.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::dsl::Owner;
use crate::error::{invalid, Result};
use crate::game::{Solution, Verdict};
use crate::ground::{ActionId, Guard};
use crate::problem::Problem;
use crate::program::ProgramExpr;
use crate::world::FluentState;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CEdge {
    pub action: ActionId,
    pub owner: Owner,
    pub resets: Vec<usize>,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CNode {
    pub fluents: FluentState,
    pub program: ProgramExpr,
    pub is_final: bool,
    pub selected: Vec<CEdge>,
}

/// Strategy graph; node 0 is initial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Controller {
    pub nodes: Vec<CNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub action: String,
    pub owner: Owner,
    pub guard: String,
    pub resets: Vec<String>,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: usize,
    pub fluents: Vec<String>,
    pub program: String,
    #[serde(rename = "final")]
    pub is_final: bool,
    pub selected: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControllerFile {
    pub verdict: String,
    pub initial: usize,
    pub nodes: Vec<NodeRecord>,
}

/// Guard in source units, e.g. `c_cam = 1 & d < 1/2`; `true` if empty.
pub fn guard_text(problem: &Problem, guard: &Guard) -> String {
    if guard.is_empty() {
        return "true".into();
    }
    let t = &problem.theory;
    guard
        .iter()
        .map(|c| {
            let v = Rational64::new(i64::from(c.value), t.scale);
            format!("{} {} {v}", t.clocks[c.clock], c.cmp.symbol())
        })
        .collect::<Vec<_>>()
        .join(" & ")
}

impl Controller {
    /// Folds the selected part of a solved search tree into a graph.
    pub fn from_solution(sol: &Solution) -> Option<Controller> {
        let strat = sol.strategy.as_ref()?;
        let index = |tree_id: usize| strat.nodes.iter().position(|&n| n == tree_id).expect("target is a strategy node");
        let nodes = strat
            .nodes
            .iter()
            .map(|&id| {
                let t = &sol.tree[id];
                let selected = strat.edges[&id]
                    .iter()
                    .map(|e| CEdge {
                        action: e.action,
                        owner: e.owner,
                        resets: e.resets.clone(),
                        target: index(e.target),
                    })
                    .collect();
                CNode {
                    fluents: t.state.fluents.clone(),
                    program: t.state.program.clone(),
                    is_final: t.state.program.is_final(&t.state.fluents),
                    selected,
                }
            })
            .collect();
        Some(Controller { nodes })
    }

    pub fn to_file(&self, problem: &Problem, verdict: Verdict) -> Result<ControllerFile> {
        let t = &problem.theory;
        let mut nodes = Vec::new();
        for (id, n) in self.nodes.iter().enumerate() {
            let mut selected = Vec::new();
            for e in &n.selected {
                let a = t.action(e.action)?;
                selected.push(EdgeRecord {
                    action: a.name.clone(),
                    owner: e.owner,
                    guard: guard_text(problem, &a.guard),
                    resets: e.resets.iter().map(|&c| t.clocks[c].clone()).collect(),
                    target: e.target,
                });
            }
            nodes.push(NodeRecord {
                id,
                fluents: t.fluent_names(&n.fluents),
                program: n.program.display(t).to_string(),
                is_final: n.is_final,
                selected,
            });
        }
        Ok(ControllerFile { verdict: verdict.as_str().into(), initial: 0, nodes })
    }

    /// Reads a controller file against `problem`, renumbering so the
    /// initial node comes first.
    pub fn from_file(problem: &Problem, file: &ControllerFile) -> Result<Controller> {
        let mut theory = problem.theory.clone();
        let pos = |id: usize| -> Result<usize> {
            let i =
                file.nodes.iter().position(|n| n.id == id).ok_or_else(|| invalid(format!("unknown node id {id}")))?;
            let init = file.nodes.iter().position(|n| n.id == file.initial).unwrap_or(0);
            Ok(if i == init {
                0
            } else if i < init {
                i + 1
            } else {
                i
            })
        };
        let ids: BTreeSet<usize> = file.nodes.iter().map(|n| n.id).collect();
        if ids.len() != file.nodes.len() {
            return Err(invalid("duplicate node ids"));
        }
        pos(file.initial)?;
        let mut nodes: Vec<Option<CNode>> = vec![None; file.nodes.len()];
        for rec in &file.nodes {
            let fluents = theory.state_from_names(&rec.fluents)?;
            let program = theory.parse_program(&rec.program)?.canonicalize();
            let mut selected = Vec::new();
            for e in &rec.selected {
                let action =
                    theory.action_id(&e.action).ok_or_else(|| invalid(format!("unknown action `{}`", e.action)))?;
                let mut resets = Vec::new();
                for c in &e.resets {
                    resets.push(
                        theory
                            .clocks
                            .iter()
                            .position(|x| x == c)
                            .ok_or_else(|| invalid(format!("unknown clock `{c}`")))?,
                    );
                }
                selected.push(CEdge { action, owner: e.owner, resets, target: pos(e.target)? });
            }
            nodes[pos(rec.id)?] = Some(CNode { fluents, program, is_final: rec.is_final, selected });
        }
        Ok(Controller { nodes: nodes.into_iter().map(|n| n.expect("every slot filled")).collect() })
    }

    /// Checks that every selected edge is a program transition of its node
    /// with matching target, owner and resets (C1), that the selection is
    /// empty only at final nodes (C3), and that stated finality is right.
    /// Environment completeness (C2) depends on clock values and is checked
    /// during simulation and by [`check_selection`].
    pub fn validate(&self, problem: &Problem) -> Result<()> {
        let t = &problem.theory;
        if self.nodes.is_empty() {
            return Err(invalid("controller has no nodes"));
        }
        for (id, n) in self.nodes.iter().enumerate() {
            if n.is_final != n.program.is_final(&n.fluents) {
                return Err(invalid(format!("node {id}: wrong finality flag")));
            }
            if n.selected.is_empty() && !n.is_final {
                return Err(invalid(format!("node {id}: empty selection at a non-final node (C3)")));
            }
            let steps = n.program.steps(&n.fluents, t);
            for e in &n.selected {
                let a = t.action(e.action)?;
                let name = &a.name;
                let target = self
                    .nodes
                    .get(e.target)
                    .ok_or_else(|| invalid(format!("node {id}: edge `{name}` to missing node {}", e.target)))?;
                if !steps.contains(&(e.action, target.program.clone())) {
                    return Err(invalid(format!(
                        "node {id}: `{name}` is not a program transition to node {} (C1)",
                        e.target
                    )));
                }
                let post = t.progress(&n.fluents, e.action);
                if post != target.fluents {
                    return Err(invalid(format!("node {id}: `{name}` leads to a different fluent state (C1)")));
                }
                if e.owner != a.owner {
                    return Err(invalid(format!("node {id}: `{name}` has the wrong owner")));
                }
                if e.resets != t.resets(&post, e.action) {
                    return Err(invalid(format!("node {id}: `{name}` has the wrong resets")));
                }
            }
        }
        Ok(())
    }

    pub fn to_dot(&self, problem: &Problem) -> String {
        let t = &problem.theory;
        let esc = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
        let mut out =
            String::from("digraph controller {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n");
        for (id, n) in self.nodes.iter().enumerate() {
            let label = format!("{id}\\n{{{}}}\\n{}", t.fluent_names(&n.fluents).join(", "), n.program.display(t));
            let shape = if n.is_final { ", peripheries=2" } else { "" };
            let _ = writeln!(out, "  n{id} [label=\"{}\"{shape}];", esc(&label).replace("\\\\n", "\\n"));
        }
        for (id, n) in self.nodes.iter().enumerate() {
            for e in &n.selected {
                let a = &t.actions[e.action.index()];
                let mut label = format!("{}\\n{}", a.name, guard_text(problem, &a.guard));
                if !e.resets.is_empty() {
                    let rs: Vec<&str> = e.resets.iter().map(|&c| t.clocks[c].as_str()).collect();
                    let _ = write!(label, "\\nreset {}", rs.join(", "));
                }
                let style = if e.owner == Owner::Environment { ", style=dashed" } else { "" };
                let _ = writeln!(
                    out,
                    "  n{id} -> n{} [label=\"{}\"{style}];",
                    e.target,
                    esc(&label).replace("\\\\n", "\\n")
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Compares each strategy node's environment selection with the quotient
/// successors of the underlying search node (C2) and confirms that the
/// selection is a subset of those successors (C1).
pub fn check_selection(problem: &Problem, sol: &Solution) -> Result<()> {
    let Some(strat) = &sol.strategy else { return Ok(()) };
    let q = crate::quotient::Quotient::new(&problem.theory, &problem.ata);
    for &id in &strat.nodes {
        let succ = q.successors(&sol.tree[id].state)?;
        let edges = &strat.edges[&id];
        let key = |a: ActionId, target: &ProgramExpr| (a, target.clone());
        let chosen: BTreeSet<_> = edges.iter().map(|e| key(e.action, &sol.tree[e.target].state.program)).collect();
        let all: BTreeSet<_> = succ.iter().map(|s| key(s.action, &s.node.program)).collect();
        if !chosen.is_subset(&all) {
            return Err(invalid(format!("tree node {id}: selection outside the quotient (C1)")));
        }
        for s in succ.iter().filter(|s| s.owner == Owner::Environment) {
            if !chosen.contains(&key(s.action, &s.node.program)) {
                return Err(invalid(format!("tree node {id}: environment action not selected (C2)")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{solve, SolveOptions};

    fn fixture(name: &str) -> Problem {
        let path = format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
        Problem::from_source(&std::fs::read_to_string(path).unwrap()).unwrap()
    }

    #[test]
    fn camera_controller_file_round_trips() {
        let p = fixture("camera_persistent.tgs");
        let sol = solve(&p, SolveOptions::default()).unwrap();
        let c = Controller::from_solution(&sol).unwrap();
        c.validate(&p).unwrap();
        check_selection(&p, &sol).unwrap();
        let file = c.to_file(&p, sol.verdict).unwrap();
        assert_eq!(file.verdict, "CONTROLLABLE");
        let first = &file.nodes[0].selected;
        assert_eq!(first.len(), 1);
        assert_eq!(first[0].action, "start_cam");
        assert_eq!(first[0].resets, ["c_cam"]);
        let json = serde_json::to_string_pretty(&file).unwrap();
        assert!(json.contains("\"final\""));
        let back: ControllerFile = serde_json::from_str(&json).unwrap();
        assert_eq!(Controller::from_file(&p, &back).unwrap(), c);
    }

    #[test]
    fn guard_text_is_unscaled() {
        let p = fixture("camera_persistent.tgs");
        let a = p.theory.action_id("end_cam").unwrap();
        assert_eq!(guard_text(&p, &p.theory.actions[a.index()].guard), "c_cam = 1");
        let b = p.theory.action_id("start_cam").unwrap();
        assert_eq!(guard_text(&p, &p.theory.actions[b.index()].guard), "true");
    }

    #[test]
    fn loop_controller_has_back_edge() {
        let p = fixture("camera_loop.tgs");
        let sol = solve(&p, SolveOptions::default()).unwrap();
        let c = Controller::from_solution(&sol).unwrap();
        c.validate(&p).unwrap();
        let back = c.nodes.iter().enumerate().any(|(i, n)| n.selected.iter().any(|e| e.target <= i));
        assert!(back);
    }

    #[test]
    fn validation_rejects_bad_edges() {
        let p = fixture("camera_persistent.tgs");
        let sol = solve(&p, SolveOptions::default()).unwrap();
        let mut c = Controller::from_solution(&sol).unwrap();
        c.nodes[0].selected[0].resets.clear();
        assert!(c.validate(&p).is_err());
        let mut c = Controller::from_solution(&sol).unwrap();
        c.nodes[0].selected.clear();
        assert!(c.validate(&p).unwrap_err().to_string().contains("C3"));
    }

    #[test]
    fn dot_mentions_every_edge() {
        let p = fixture("camera_persistent.tgs");
        let c = Controller::from_solution(&solve(&p, SolveOptions::default()).unwrap()).unwrap();
        let dot = c.to_dot(&p);
        let edges = c.nodes.iter().map(|n| n.selected.len()).sum::<usize>();
        assert_eq!(dot.matches(" -> ").count(), edges);
        assert!(dot.contains("reset c_cam"));
    }
}
