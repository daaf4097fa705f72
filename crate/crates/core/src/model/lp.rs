use std::fmt::Write;

use super::{IlpModel, VarId};

const MAX_LINE: usize = 240;

fn push_terms(out: &mut String, line: &mut String, terms: impl Iterator<Item = (String, f64)>) {
    let mut first = true;
    for (name, c) in terms {
        let sign = if c < 0.0 {
            "-"
        } else if first {
            ""
        } else {
            "+"
        };
        let piece = if sign.is_empty() {
            format!(" {} {name}", c.abs())
        } else {
            format!(" {sign} {} {name}", c.abs())
        };
        if line.len() + piece.len() > MAX_LINE {
            out.push_str(line);
            out.push('\n');
            line.clear();
        }
        line.push_str(&piece);
        first = false;
    }
}

/// Renders the model in the CPLEX LP text format.
///
/// Variables are named after their family and indices (`E_2_5`, `u_3`, ...).
/// The output depends only on the model, so repeated exports are identical.
pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ dependency graph discovery over {} tasks", model.n);
    let _ = writeln!(out, "\\ start {} end {}", model.start, model.end);
    out.push_str("Maximize\n");
    let mut line = String::from(" obj:");
    let terms: Vec<(String, f64)> = model
        .objective
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0.0)
        .map(|(k, &c)| (model.var_name(VarId(k)), c))
        .collect();
    if terms.is_empty() {
        push_terms(&mut out, &mut line, std::iter::once((model.var_name(VarId(0)), 0.0)));
    } else {
        push_terms(&mut out, &mut line, terms.into_iter());
    }
    out.push_str(&line);
    out.push('\n');

    out.push_str("Subject To\n");
    for (k, row) in model.rows.iter().enumerate() {
        let mut line = format!(" {:?}_{k}:", row.family);
        let terms = row.terms.iter().map(|&(v, c)| (model.var_name(v), c));
        if row.terms.is_empty() {
            push_terms(&mut out, &mut line, std::iter::once((model.var_name(VarId(0)), 0.0)));
        } else {
            push_terms(&mut out, &mut line, terms);
        }
        let _ = write!(line, " {} {}", row.relation.symbol(), row.rhs);
        out.push_str(&line);
        out.push('\n');
    }

    out.push_str("Bounds\n");
    let mut binaries = Vec::new();
    let mut generals = Vec::new();
    for (k, var) in model.variables.iter().enumerate() {
        let name = model.var_name(VarId(k));
        if var.integer && var.lower == 0.0 && var.upper == 1.0 {
            binaries.push(name);
            continue;
        }
        if var.lower == var.upper {
            let _ = writeln!(out, " {name} = {}", var.lower);
        } else {
            let _ = writeln!(out, " {} <= {name} <= {}", var.lower, var.upper);
        }
        if var.integer {
            generals.push(name);
        }
    }
    for (title, names) in [("Binaries", binaries), ("Generals", generals)] {
        if names.is_empty() {
            continue;
        }
        out.push_str(title);
        out.push('\n');
        for chunk in names.chunks(12) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log::TaskId;
    use crate::matrix::SquareMatrix;
    use crate::measures::DependencyMeasures;
    use crate::model::{build_model, DiscoveryConfig};

    fn model(n: usize) -> IlpModel {
        let mut d = SquareMatrix::new(n);
        d[(0, 1)] = 0.5;
        d[(1, 0)] = -0.5;
        let meas = DependencyMeasures::from_parts(d, vec![0.0; n], SquareMatrix::new(n));
        build_model(&meas, TaskId(0), TaskId(n - 1), &DiscoveryConfig::default()).unwrap()
    }

    #[test]
    fn sections_in_order() {
        let text = export_lp(&model(2));
        let positions: Vec<usize> = ["Maximize", "Subject To", "Bounds", "Binaries", "Generals", "End"]
            .iter()
            .map(|s| text.find(&format!("\n{s}\n")).unwrap_or_else(|| panic!("missing {s}")))
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        let obj = text.lines().find(|l| l.starts_with(" obj:")).unwrap();
        let tokens: Vec<&str> = obj.split_whitespace().collect();
        let at = tokens.iter().position(|&t| t == "E_0_1").unwrap();
        let c: f64 = tokens[at - 1].parse().unwrap();
        assert!((c - 0.5).abs() < 1e-3 && c < 0.5 && tokens[at - 2] == "+");
        assert!(text.contains(" R_0_0 = 0\n"));
        assert!(export_lp(&model(5)).contains(" 0 <= u_1 <= 4\n"));
    }

    #[test]
    fn one_line_per_row_and_deterministic() {
        let m = model(5);
        let a = export_lp(&m);
        assert_eq!(a, export_lp(&m.clone()));
        let rows = a.lines().filter(|l| l.contains(':') && !l.starts_with(" obj")).count();
        assert!(rows >= m.num_rows());
    }
}
