use super::IlpModel;
use crate::error::{Error, Result};
use crate::graph::DependencyGraph;
use crate::log::TaskId;
use crate::solver::{Solution, SolveStatus};

/// The graph whose arcs are the `E` variables set to one in an optimal solution.
pub fn extract_graph(model: &IlpModel, sol: &Solution, start: TaskId, end: TaskId) -> Result<DependencyGraph> {
    if sol.status != SolveStatus::Optimal {
        return Err(Error::Extraction(format!("solution status is {}", sol.status)));
    }
    let values = sol
        .assignment
        .as_deref()
        .ok_or_else(|| Error::Extraction("optimal solution without an assignment".into()))?;
    if values.len() != model.num_vars() {
        return Err(Error::Extraction("assignment does not match the model".into()));
    }
    let n = model.n;
    let arcs = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| values[model.e(i, j).0] > 0.5)
        .map(|(i, j)| (TaskId(i), TaskId(j)));
    DependencyGraph::new(model.task_names.clone(), arcs, start, end).map_err(|e| Error::Extraction(e.to_string()))
}
