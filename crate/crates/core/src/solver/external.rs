use std::collections::HashMap;
use std::process::Command;
use std::time::Instant;

use super::{Solution, SolveStats, SolveStatus, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::model::{export_lp, IlpModel, VarId};

/// Environment variable holding the external solver command.
pub const EXTERNAL_SOLVER_ENV: &str = "OPTDG_EXTERNAL_SOLVER";

/// Parses `name value` lines. Lines starting with `#` are comments, except
/// `# status <word>`, which reports the solver's verdict. Variables that are
/// not listed are zero.
pub fn parse_solution_file(model: &IlpModel, text: &str) -> Result<(Option<String>, Vec<f64>)> {
    let names: HashMap<String, usize> = (0..model.num_vars()).map(|k| (model.var_name(VarId(k)), k)).collect();
    let mut values = vec![0.0; model.num_vars()];
    let mut status = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(word) = rest.trim().strip_prefix("status") {
                status = Some(word.trim().to_lowercase());
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(value)) = (parts.next(), parts.next()) else {
            continue;
        };
        let Some(&k) = names.get(name) else {
            continue;
        };
        values[k] = value
            .parse()
            .map_err(|_| Error::Solver(format!("solution line {}: bad value {value:?}", lineno + 1)))?;
    }
    Ok((status, values))
}

/// Runs an external LP-format solver and verifies its answer against the
/// model. `command` is run by `sh -c` after substituting `{lp}` and `{sol}`.
pub fn solve_external(model: &IlpModel, command: &str) -> Result<Solution> {
    let started = Instant::now();
    let dir = tempfile::tempdir()?;
    let lp_path = dir.path().join("model.lp");
    let sol_path = dir.path().join("model.sol");
    std::fs::write(&lp_path, export_lp(model))?;
    let cmd = command
        .replace("{lp}", &lp_path.to_string_lossy())
        .replace("{sol}", &sol_path.to_string_lossy());
    let output = Command::new("sh").arg("-c").arg(&cmd).output()?;
    if !output.status.success() {
        return Err(Error::Solver(format!(
            "external solver exited with {}: {}",
            output.status,
            String::from_utf8_lossy(&output.stderr).trim()
        )));
    }
    let text = std::fs::read_to_string(&sol_path)
        .map_err(|e| Error::Solver(format!("external solver wrote no solution file: {e}")))?;
    let (status, values) = parse_solution_file(model, &text)?;
    let stats = SolveStats {
        nodes: 0,
        wall_time: started.elapsed().as_secs_f64(),
        lp_iterations: 0,
        best_bound: None,
    };
    if status.as_deref() == Some("infeasible") {
        return Ok(Solution::infeasible(stats));
    }
    if let Err(v) = model.check_feasible(&values, FEASIBILITY_TOL) {
        return Err(Error::Solver(format!("external solution rejected: {v}")));
    }
    let objective = model.evaluate_objective(&values);
    let status = match status.as_deref() {
        None | Some("optimal") => SolveStatus::Optimal,
        Some(_) => SolveStatus::LimitReached,
    };
    Ok(Solution {
        status,
        assignment: Some(values),
        objective_value: Some(objective),
        stats: SolveStats {
            best_bound: (status == SolveStatus::Optimal).then_some(objective),
            ..stats
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::TaskId;
    use crate::matrix::SquareMatrix;
    use crate::measures::DependencyMeasures;
    use crate::model::{build_model, DiscoveryConfig};

    fn model() -> IlpModel {
        let meas = DependencyMeasures::from_parts(SquareMatrix::new(2), vec![0.0; 2], SquareMatrix::new(2));
        build_model(&meas, TaskId(0), TaskId(1), &DiscoveryConfig::default()).unwrap()
    }

    #[test]
    fn parses_name_value_lines() {
        let m = model();
        let (status, x) = parse_solution_file(
            &m,
            "# status optimal\nE_0_1 1\nx_0_1 1.0\nbogus 3\n\ny_0_1 1\nq_1 1\nu_1 1\n",
        )
        .unwrap();
        assert_eq!(status.as_deref(), Some("optimal"));
        assert_eq!(x[m.e(0, 1).0], 1.0);
        assert_eq!(x[m.u(0).0], 0.0);
        m.check_feasible(&x, FEASIBILITY_TOL).unwrap();
        assert!(parse_solution_file(&m, "E_0_1 one").is_err());
    }

    #[test]
    fn scripted_solver_is_verified() {
        let m = model();
        let good = "printf 'E_0_1 1\\nx_0_1 1\\ny_0_1 1\\nq_1 1\\nu_1 1\\n' > {sol}";
        let sol = solve_external(&m, good).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let bad = "printf 'E_1_0 1\\n' > {sol}";
        assert!(matches!(solve_external(&m, bad), Err(Error::Solver(_))));
        let infeasible = "echo '# status infeasible' > {sol}";
        assert_eq!(solve_external(&m, infeasible).unwrap().status, SolveStatus::Infeasible);
        assert!(solve_external(&m, "exit 3").is_err());
    }
}
