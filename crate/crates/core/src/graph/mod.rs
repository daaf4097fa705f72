//! Dependency graphs, their path property and reachability.

mod baseline;

use std::collections::{BTreeSet, VecDeque};
use std::fmt::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::log::TaskId;
use crate::matrix::SquareMatrix;

pub use baseline::baseline_threshold_miner;

/// A directed graph over named tasks with an initial and a final task.
///
/// No arc enters the initial task and no arc leaves the final task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    tasks: Vec<String>,
    arcs: BTreeSet<(TaskId, TaskId)>,
    start: TaskId,
    end: TaskId,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    tasks: Vec<String>,
    arcs: Vec<[usize; 2]>,
    start: usize,
    end: usize,
}

impl DependencyGraph {
    pub fn new(
        tasks: Vec<String>,
        arcs: impl IntoIterator<Item = (TaskId, TaskId)>,
        start: TaskId,
        end: TaskId,
    ) -> Result<Self> {
        let n = tasks.len();
        if start.0 >= n || end.0 >= n {
            return Err(Error::Graph(format!("endpoint out of range for {n} tasks")));
        }
        if start == end {
            return Err(Error::Graph("initial and final task coincide".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in arcs {
            if a.0 >= n || b.0 >= n {
                return Err(Error::Graph(format!("arc {a}->{b} references an unknown task")));
            }
            if b == start {
                return Err(Error::Graph(format!(
                    "arc {} -> {} enters the initial task",
                    tasks[a.0], tasks[b.0]
                )));
            }
            if a == end {
                return Err(Error::Graph(format!(
                    "arc {} -> {} leaves the final task",
                    tasks[a.0], tasks[b.0]
                )));
            }
            set.insert((a, b));
        }
        let mut seen = BTreeSet::new();
        if let Some(dup) = tasks.iter().find(|t| !seen.insert(t.as_str())) {
            return Err(Error::Graph(format!("duplicate task name {dup:?}")));
        }
        Ok(Self {
            tasks,
            arcs: set,
            start,
            end,
        })
    }

    /// Builds a graph from task names; arcs are given by name too.
    pub fn from_names<S: AsRef<str>>(tasks: &[S], arcs: &[(S, S)], start: &str, end: &str) -> Result<Self> {
        let names: Vec<String> = tasks.iter().map(|s| s.as_ref().to_owned()).collect();
        let id = |name: &str| {
            names
                .iter()
                .position(|t| t == name)
                .map(TaskId)
                .ok_or_else(|| Error::Graph(format!("unknown task {name:?}")))
        };
        let arcs = arcs
            .iter()
            .map(|(a, b)| Ok((id(a.as_ref())?, id(b.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        let (s, e) = (id(start)?, id(end)?);
        Self::new(names, arcs, s, e)
    }

    pub fn tasks(&self) -> &[String] {
        &self.tasks
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn task_id(&self, name: &str) -> Option<TaskId> {
        self.tasks.iter().position(|t| t == name).map(TaskId)
    }

    pub fn name(&self, t: TaskId) -> &str {
        &self.tasks[t.0]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (TaskId, TaskId)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn has_arc(&self, a: TaskId, b: TaskId) -> bool {
        self.arcs.contains(&(a, b))
    }

    /// Number of arcs, self-loops included.
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn start(&self) -> TaskId {
        self.start
    }

    pub fn end(&self) -> TaskId {
        self.end
    }

    /// Tasks with an arc into `t`.
    pub fn inputs(&self, t: TaskId) -> Vec<TaskId> {
        self.arcs.iter().filter(|(_, b)| *b == t).map(|(a, _)| *a).collect()
    }

    /// Tasks with an arc from `t`.
    pub fn outputs(&self, t: TaskId) -> Vec<TaskId> {
        self.arcs
            .range((t, TaskId(0))..=(t, TaskId(usize::MAX)))
            .map(|(_, b)| *b)
            .collect()
    }

    /// Arcs as name pairs, in index order.
    pub fn named_arcs(&self) -> Vec<(String, String)> {
        self.arcs
            .iter()
            .map(|&(a, b)| (self.tasks[a.0].clone(), self.tasks[b.0].clone()))
            .collect()
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.tasks.len()];
        for &(a, b) in &self.arcs {
            succ[a.0].push(b.0);
        }
        succ
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphJson {
            tasks: self.tasks.clone(),
            arcs: self.arcs.iter().map(|(a, b)| [a.0, b.0]).collect(),
            start: self.start.0,
            end: self.end.0,
        })
        .expect("graph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text)?;
        Self::new(
            raw.tasks,
            raw.arcs.into_iter().map(|[a, b]| (TaskId(a), TaskId(b))),
            TaskId(raw.start),
            TaskId(raw.end),
        )
    }

    /// Graphviz rendering; the initial and final tasks are drawn distinctly.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dependency_graph {\n  rankdir=LR;\n");
        for (k, name) in self.tasks.iter().enumerate() {
            let style = if TaskId(k) == self.start {
                ", shape=circle, style=filled, fillcolor=palegreen"
            } else if TaskId(k) == self.end {
                ", shape=doublecircle, style=filled, fillcolor=lightcoral"
            } else {
                ", shape=box"
            };
            let _ = writeln!(out, "  n{k} [label={}{style}];", dot_quote(name));
        }
        for &(a, b) in &self.arcs {
            let _ = writeln!(out, "  n{} -> n{};", a.0, b.0);
        }
        out.push_str("}\n");
        out
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Tasks that are not on any path from the initial to the final task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathViolation {
    /// Tasks not reachable from the initial task.
    pub unreachable_from_start: Vec<String>,
    /// Tasks from which the final task cannot be reached.
    pub cannot_reach_end: Vec<String>,
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.unreachable_from_start.is_empty() {
            parts.push(format!(
                "unreachable from start: {}",
                self.unreachable_from_start.join(", ")
            ));
        }
        if !self.cannot_reach_end.is_empty() {
            parts.push(format!("cannot reach end: {}", self.cannot_reach_end.join(", ")));
        }
        f.write_str(&parts.join("; "))
    }
}

fn sweep(adj: &[Vec<usize>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Checks that every task lies on a path from the initial to the final task.
pub fn validate_paths(g: &DependencyGraph) -> std::result::Result<(), PathViolation> {
    let succ = g.successors();
    let mut pred = vec![Vec::new(); g.num_tasks()];
    for (a, targets) in succ.iter().enumerate() {
        for &b in targets {
            pred[b].push(a);
        }
    }
    let forward = sweep(&succ, g.start.0);
    let backward = sweep(&pred, g.end.0);
    let names = |ok: &[bool]| -> Vec<String> {
        ok.iter()
            .enumerate()
            .filter(|(_, &v)| !v)
            .map(|(k, _)| g.tasks[k].clone())
            .collect()
    };
    let violation = PathViolation {
        unreachable_from_start: names(&forward),
        cannot_reach_end: names(&backward),
    };
    if violation.unreachable_from_start.is_empty() && violation.cannot_reach_end.is_empty() {
        Ok(())
    } else {
        Err(violation)
    }
}

/// Transitive closure of the arc relation: `reach[(x, y)]` holds iff a path
/// of length at least one leads from `x` to `y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reachability {
    pub reach: SquareMatrix<bool>,
}

impl Reachability {
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.reach[(x, y)]
    }

    pub fn count(&self) -> usize {
        self.reach.iter().filter(|(_, &v)| v).count()
    }
}

/// Warshall's algorithm.
pub fn reachability(g: &DependencyGraph) -> Reachability {
    let n = g.num_tasks();
    let mut reach = SquareMatrix::new(n);
    for &(a, b) in &g.arcs {
        reach[(a.0, b.0)] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if !reach[(i, k)] {
                continue;
            }
            for j in 0..n {
                if reach[(k, j)] {
                    reach[(i, j)] = true;
                }
            }
        }
    }
    Reachability { reach }
}
