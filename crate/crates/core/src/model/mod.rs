//! The integer linear program selecting the arcs of a dependency graph.
//!
//! Variables, for tasks `i, j` over an alphabet of size `n`:
//!
//! | family        | meaning                                               |
//! |---------------|-------------------------------------------------------|
//! | `E(i,j)`      | arc `i -> j` (self-loop when `i = j`)                 |
//! | `x(i,j)`      | arc of a spanning tree hanging from the initial task  |
//! | `y(i,j)`      | arc of a spanning tree leading into the final task    |
//! | `R(i,j)`      | `i` and `j` form a two-cycle                          |
//! | `forced(i,j)` | arc kept despite a dependency measure below threshold |
//! | `forcel(i,j)` | two-cycle kept below the loop threshold (`i < j`)     |
//! | `u(i)`,`q(i)` | orderings that forbid cycles in the `x` and `y` trees |
//! | `forcesl(i)`  | self-loop kept below the self-loop threshold          |
//!
//! `R`, `forced` and `forcel` are declared for every ordered pair so the
//! variable count is `6n² + 3n`; entries that carry no meaning (diagonals and
//! `forcel(i,j)` with `i > j`) are fixed to zero by their bounds.

mod extract;
mod lp;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::log::TaskId;
use crate::measures::DependencyMeasures;

pub use extract::extract_graph;
pub use lp::export_lp;

/// Tuning of the discovery model. Field names follow the usual heuristic
/// mining parameter names when read from a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscoveryConfig {
    #[serde(rename = "DepThresh")]
    pub dep_thresh: f64,
    #[serde(rename = "SLoopThresh")]
    pub sloop_thresh: f64,
    #[serde(rename = "LoopThresh")]
    pub loop_thresh: f64,
    #[serde(rename = "MaxArcsRatio")]
    pub max_arcs_ratio: f64,
    #[serde(rename = "MaxOutputs")]
    pub max_outputs: u32,
    #[serde(rename = "MaxInputs")]
    pub max_inputs: u32,
    pub alpha: f64,
    pub beta: f64,
    /// Punishment weight; `None` selects [`DiscoveryConfig::default_big_m`].
    pub big_m: Option<f64>,
    /// Per-arc cost preferring sparser graphs among equally scored ones.
    pub sparsity_epsilon: f64,
    /// Additional linear rows over named model variables.
    #[serde(rename = "constraint")]
    pub extra_rows: Vec<ExtraRow>,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self {
            dep_thresh: 0.0,
            sloop_thresh: 0.0,
            loop_thresh: 0.0,
            max_arcs_ratio: 2.0,
            max_outputs: 1000,
            max_inputs: 1000,
            alpha: 1.0,
            beta: 1.0,
            big_m: None,
            sparsity_epsilon: 1e-7,
            extra_rows: Vec::new(),
        }
    }
}

impl DiscoveryConfig {
    /// `10 (n² + n)` scaled by the largest loop weight: above the largest
    /// objective any arc set can reach without punishment.
    pub fn default_big_m(&self, n: usize) -> f64 {
        let n = n as f64;
        10.0 * (n * n + n) * self.alpha.max(self.beta).max(1.0)
    }

    pub fn effective_big_m(&self, n: usize) -> f64 {
        self.big_m.unwrap_or_else(|| self.default_big_m(n))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (name, v) in [
            ("DepThresh", self.dep_thresh),
            ("SLoopThresh", self.sloop_thresh),
            ("LoopThresh", self.loop_thresh),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        if !(self.max_arcs_ratio.is_finite() && self.max_arcs_ratio > 0.0) {
            return Err(Error::Config(format!(
                "MaxArcsRatio must be positive, got {}",
                self.max_arcs_ratio
            )));
        }
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        if let Some(m) = self.big_m {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::Config(format!("big_m must be positive, got {m}")));
            }
        }
        let eps = self.sparsity_epsilon;
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::Config(format!(
                "sparsity_epsilon must be non-negative, got {eps}"
            )));
        }
        let max_arcs = ((n * n) as f64).min(n as f64 * self.max_arcs_ratio);
        if eps * max_arcs >= 1e-3 {
            return Err(Error::Config(format!(
                "sparsity_epsilon {eps} is too large for {n} tasks (total arc cost must stay below 1e-3)"
            )));
        }
        Ok(())
    }
}

/// A user-supplied row such as `E_1_2 + E_2_1 <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraRow {
    /// Coefficients keyed by variable name (`E_i_j`, `u_i`, ...).
    pub terms: BTreeMap<String, f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    E(usize, usize),
    X(usize, usize),
    Y(usize, usize),
    R(usize, usize),
    Forced(usize, usize),
    ForceL(usize, usize),
    U(usize),
    Q(usize),
    ForceSl(usize),
}

impl VarKind {
    pub fn name(&self) -> String {
        match *self {
            VarKind::E(i, j) => format!("E_{i}_{j}"),
            VarKind::X(i, j) => format!("x_{i}_{j}"),
            VarKind::Y(i, j) => format!("y_{i}_{j}"),
            VarKind::R(i, j) => format!("R_{i}_{j}"),
            VarKind::Forced(i, j) => format!("forced_{i}_{j}"),
            VarKind::ForceL(i, j) => format!("forcel_{i}_{j}"),
            VarKind::U(i) => format!("u_{i}"),
            VarKind::Q(i) => format!("q_{i}"),
            VarKind::ForceSl(i) => format!("forcesl_{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub integer: bool,
}

impl Variable {
    pub fn is_binary(&self) -> bool {
        self.integer && self.lower >= 0.0 && self.upper <= 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    /// Whether `lhs rel rhs` holds up to `tol`.
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tol,
            Relation::Eq => (lhs - rhs).abs() <= tol,
            Relation::Ge => lhs >= rhs - tol,
        }
    }
}

/// The constraint family a row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RowFamily {
    /// No arc enters the initial task.
    NoArcIntoStart,
    /// No arc leaves the final task.
    NoArcOutOfEnd,
    XWithinE,
    XOrdering,
    XOneIncoming,
    YWithinE,
    YOrdering,
    YOneOutgoing,
    TwoCycleLower,
    TwoCycleUpper,
    TwoCycleNoSelfLoops,
    ArcBudget,
    MaxOutputs,
    MaxInputs,
    DepThreshold,
    SelfLoopThreshold,
    LoopThreshold,
    Extra,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub family: RowFamily,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Row {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, c)| c * values[v.0]).sum()
    }
}

/// A maximization problem over bounded integer and binary variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlpModel {
    pub n: usize,
    pub start: TaskId,
    pub end: TaskId,
    pub task_names: Vec<String>,
    pub variables: Vec<Variable>,
    /// Objective coefficient per variable.
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    pub big_m: f64,
}

/// Violation found by [`IlpModel::check_feasible`].
#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    Length {
        expected: usize,
        found: usize,
    },
    Bound {
        var: String,
        value: f64,
    },
    Fractional {
        var: String,
        value: f64,
    },
    Row {
        index: usize,
        family: RowFamily,
        lhs: f64,
        rhs: f64,
    },
}

impl std::fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Infeasibility::Length { expected, found } => {
                write!(f, "assignment has {found} values, model has {expected} variables")
            }
            Infeasibility::Bound { var, value } => write!(f, "{var} = {value} is out of bounds"),
            Infeasibility::Fractional { var, value } => write!(f, "{var} = {value} is not integral"),
            Infeasibility::Row {
                index,
                family,
                lhs,
                rhs,
            } => {
                write!(f, "row {index} ({family:?}) violated: lhs {lhs}, rhs {rhs}")
            }
        }
    }
}

impl IlpModel {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn block(&self, b: usize, i: usize, j: usize) -> VarId {
        VarId(b * self.n * self.n + i * self.n + j)
    }

    fn vector(&self, b: usize, i: usize) -> VarId {
        VarId(6 * self.n * self.n + b * self.n + i)
    }

    pub fn e(&self, i: usize, j: usize) -> VarId {
        self.block(0, i, j)
    }
    pub fn x(&self, i: usize, j: usize) -> VarId {
        self.block(1, i, j)
    }
    pub fn y(&self, i: usize, j: usize) -> VarId {
        self.block(2, i, j)
    }
    pub fn r(&self, i: usize, j: usize) -> VarId {
        self.block(3, i, j)
    }
    pub fn forced(&self, i: usize, j: usize) -> VarId {
        self.block(4, i, j)
    }
    pub fn forcel(&self, i: usize, j: usize) -> VarId {
        self.block(5, i, j)
    }
    pub fn u(&self, i: usize) -> VarId {
        self.vector(0, i)
    }
    pub fn q(&self, i: usize) -> VarId {
        self.vector(1, i)
    }
    pub fn forcesl(&self, i: usize) -> VarId {
        self.vector(2, i)
    }

    pub fn var_name(&self, v: VarId) -> String {
        self.variables[v.0].kind.name()
    }

    pub fn find_var(&self, name: &str) -> Option<VarId> {
        let (family, rest) = name.split_once('_')?;
        let idx: Vec<usize> = rest.split('_').map(|s| s.parse().ok()).collect::<Option<_>>()?;
        let n = self.n;
        let pair = |f: fn(&Self, usize, usize) -> VarId| match idx[..] {
            [i, j] if i < n && j < n => Some(f(self, i, j)),
            _ => None,
        };
        let single = |f: fn(&Self, usize) -> VarId| match idx[..] {
            [i] if i < n => Some(f(self, i)),
            _ => None,
        };
        match family {
            "E" => pair(Self::e),
            "x" => pair(Self::x),
            "y" => pair(Self::y),
            "R" => pair(Self::r),
            "forced" => pair(Self::forced),
            "forcel" => pair(Self::forcel),
            "u" => single(Self::u),
            "q" => single(Self::q),
            "forcesl" => single(Self::forcesl),
            _ => None,
        }
    }

    pub fn evaluate_objective(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// Checks bounds, integrality and every row within `tol`.
    pub fn check_feasible(&self, values: &[f64], tol: f64) -> std::result::Result<(), Infeasibility> {
        if values.len() != self.num_vars() {
            return Err(Infeasibility::Length {
                expected: self.num_vars(),
                found: values.len(),
            });
        }
        for (var, &value) in self.variables.iter().zip(values) {
            if !(value >= var.lower - tol && value <= var.upper + tol) {
                return Err(Infeasibility::Bound {
                    var: var.kind.name(),
                    value,
                });
            }
            if var.integer && (value - value.round()).abs() > tol {
                return Err(Infeasibility::Fractional {
                    var: var.kind.name(),
                    value,
                });
            }
        }
        for (index, row) in self.rows.iter().enumerate() {
            let lhs = row.activity(values);
            if !row.relation.holds(lhs, row.rhs, tol) {
                return Err(Infeasibility::Row {
                    index,
                    family: row.family,
                    lhs,
                    rhs: row.rhs,
                });
            }
        }
        Ok(())
    }

    pub fn family_counts(&self) -> BTreeMap<RowFamily, usize> {
        let mut counts = BTreeMap::new();
        for row in &self.rows {
            *counts.entry(row.family).or_insert(0) += 1;
        }
        counts
    }

    /// Replaces the placeholder task names used in reports and extracted graphs.
    pub fn with_task_names<S: AsRef<str>>(mut self, names: &[S]) -> Result<Self> {
        if names.len() != self.n {
            return Err(Error::Model(format!(
                "{} task names given for a model over {} tasks",
                names.len(),
                self.n
            )));
        }
        self.task_names = names.iter().map(|s| s.as_ref().to_owned()).collect();
        Ok(self)
    }

    fn push(&mut self, family: RowFamily, terms: Vec<(VarId, f64)>, relation: Relation, rhs: f64) {
        self.rows.push(Row {
            family,
            terms,
            relation,
            rhs,
        });
    }
}

/// Number of rows [`build_model`] emits for `n` tasks without extra rows.
pub fn expected_row_count(n: usize) -> usize {
    // 8.5 n² + 0.5 n + 1, kept integral.
    (17 * n * n + n) / 2 + 1
}

/// Builds the discovery model for the given measures and endpoints.
pub fn build_model(meas: &DependencyMeasures, start: TaskId, end: TaskId, cfg: &DiscoveryConfig) -> Result<IlpModel> {
    let n = meas.n;
    if n < 2 {
        return Err(Error::Model(format!("at least 2 tasks are required, got {n}")));
    }
    let (s, e) = (start.index(), end.index());
    if s >= n || e >= n {
        return Err(Error::Model(format!("endpoint out of range for {n} tasks")));
    }
    if s == e {
        return Err(Error::Model("initial and final task coincide".into()));
    }
    if !meas.is_finite() {
        return Err(Error::Internal("dependency measures contain non-finite values".into()));
    }
    cfg.validate(n)?;
    let big_m = cfg.effective_big_m(n);

    let binary = |kind, upper: f64| Variable {
        kind,
        lower: 0.0,
        upper,
        integer: true,
    };
    let mut variables = Vec::with_capacity(6 * n * n + 3 * n);
    let pairs = || (0..n).flat_map(move |i| (0..n).map(move |j| (i, j)));
    variables.extend(pairs().map(|(i, j)| binary(VarKind::E(i, j), 1.0)));
    variables.extend(pairs().map(|(i, j)| binary(VarKind::X(i, j), 1.0)));
    variables.extend(pairs().map(|(i, j)| binary(VarKind::Y(i, j), 1.0)));
    let off_diagonal = |i: usize, j: usize| if i == j { 0.0 } else { 1.0 };
    variables.extend(pairs().map(|(i, j)| binary(VarKind::R(i, j), off_diagonal(i, j))));
    variables.extend(pairs().map(|(i, j)| binary(VarKind::Forced(i, j), off_diagonal(i, j))));
    variables.extend(pairs().map(|(i, j)| binary(VarKind::ForceL(i, j), if i < j { 1.0 } else { 0.0 })));
    let order = |kind| Variable {
        kind,
        lower: 0.0,
        upper: (n - 1) as f64,
        integer: true,
    };
    variables.extend((0..n).map(|i| order(VarKind::U(i))));
    variables.extend((0..n).map(|i| order(VarKind::Q(i))));
    variables.extend((0..n).map(|i| binary(VarKind::ForceSl(i), 1.0)));

    let mut model = IlpModel {
        n,
        start,
        end,
        task_names: (0..n).map(|i| format!("t{i}")).collect(),
        objective: vec![0.0; variables.len()],
        variables,
        rows: Vec::new(),
        big_m,
    };

    for (i, j) in pairs() {
        let c = if i == j { cfg.alpha * meas.s[i] } else { meas.d[(i, j)] };
        let k = model.e(i, j).0;
        model.objective[k] = c - cfg.sparsity_epsilon;
        if i != j {
            let k = model.r(i, j).0;
            model.objective[k] = cfg.beta / 2.0 * meas.l[(i, j)];
            let k = model.forced(i, j).0;
            model.objective[k] = -big_m * (1.0 - meas.d[(i, j)]);
        }
        if i < j {
            let k = model.forcel(i, j).0;
            model.objective[k] = -big_m * (1.0 - meas.l[(i, j)]);
        }
    }
    for i in 0..n {
        let k = model.forcesl(i).0;
        model.objective[k] = -big_m * (1.0 - meas.s[i]);
    }

    use Relation::*;
    use RowFamily::*;
    let nf = n as f64;

    let terms = (0..n).map(|i| (model.e(i, s), 1.0)).collect();
    model.push(NoArcIntoStart, terms, Eq, 0.0);
    let terms = (0..n).map(|j| (model.e(e, j), 1.0)).collect();
    model.push(NoArcOutOfEnd, terms, Eq, 0.0);

    for (i, j) in pairs() {
        let t = vec![(model.x(i, j), 1.0), (model.e(i, j), -1.0)];
        model.push(XWithinE, t, Le, 0.0);
    }
    for (i, j) in pairs() {
        let t = ordering_terms(model.u(i), model.u(j), model.x(i, j), nf);
        model.push(XOrdering, t, Le, nf - 1.0);
    }
    for j in (0..n).filter(|&j| j != s) {
        let t = (0..n).map(|i| (model.x(i, j), 1.0)).collect();
        model.push(XOneIncoming, t, Eq, 1.0);
    }
    for (i, j) in pairs() {
        let t = vec![(model.y(i, j), 1.0), (model.e(i, j), -1.0)];
        model.push(YWithinE, t, Le, 0.0);
    }
    for (i, j) in pairs() {
        let t = ordering_terms(model.q(i), model.q(j), model.y(i, j), nf);
        model.push(YOrdering, t, Le, nf - 1.0);
    }
    for i in (0..n).filter(|&i| i != e) {
        let t = (0..n).map(|j| (model.y(i, j), 1.0)).collect();
        model.push(YOneOutgoing, t, Eq, 1.0);
    }

    let distinct = || pairs().filter(|(i, j)| i != j);
    for (i, j) in distinct() {
        let t = vec![(model.r(i, j), 1.0), (model.e(i, j), -1.0), (model.e(j, i), -1.0)];
        model.push(TwoCycleLower, t, Ge, -1.0);
    }
    for (i, j) in distinct() {
        let t = vec![(model.r(i, j), 2.0), (model.e(i, j), -1.0), (model.e(j, i), -1.0)];
        model.push(TwoCycleUpper, t, Le, 0.0);
    }
    for (i, j) in distinct() {
        let t = vec![(model.r(i, j), 1.0), (model.e(i, i), 1.0), (model.e(j, j), 1.0)];
        model.push(TwoCycleNoSelfLoops, t, Le, 2.0);
    }

    let t = pairs().map(|(i, j)| (model.e(i, j), 1.0)).collect();
    model.push(ArcBudget, t, Le, nf * cfg.max_arcs_ratio);
    for i in 0..n {
        let t = (0..n).map(|j| (model.e(i, j), 1.0)).collect();
        model.push(MaxOutputs, t, Le, cfg.max_outputs as f64);
    }
    for j in 0..n {
        let t = (0..n).map(|i| (model.e(i, j), 1.0)).collect();
        model.push(MaxInputs, t, Le, cfg.max_inputs as f64);
    }

    for (i, j) in distinct() {
        let t = vec![
            (model.e(i, j), cfg.dep_thresh),
            (model.r(i, j), -1.0),
            (model.forced(i, j), -1.0),
        ];
        model.push(DepThreshold, t, Le, meas.d[(i, j)].max(0.0));
    }
    for i in 0..n {
        let t = vec![(model.e(i, i), cfg.sloop_thresh), (model.forcesl(i), -1.0)];
        model.push(SelfLoopThreshold, t, Le, meas.s[i]);
    }
    for (i, j) in distinct().filter(|(i, j)| i < j) {
        let t = vec![(model.r(i, j), cfg.loop_thresh), (model.forcel(i, j), -1.0)];
        model.push(LoopThreshold, t, Le, meas.l[(i, j)]);
    }

    for (k, extra) in cfg.extra_rows.iter().enumerate() {
        let mut t = Vec::with_capacity(extra.terms.len());
        for (name, &c) in &extra.terms {
            let v = model
                .find_var(name)
                .ok_or_else(|| Error::Model(format!("extra row {k} references unknown variable {name:?}")))?;
            if !c.is_finite() {
                return Err(Error::Model(format!("extra row {k} has a non-finite coefficient")));
            }
            t.push((v, c));
        }
        if !extra.rhs.is_finite() {
            return Err(Error::Model(format!("extra row {k} has a non-finite right-hand side")));
        }
        model.push(Extra, t, extra.relation, extra.rhs);
    }

    Ok(model)
}

/// `a_i - a_j + n·z_ij`, merged into one coefficient when `i = j`.
fn ordering_terms(ai: VarId, aj: VarId, z: VarId, n: f64) -> Vec<(VarId, f64)> {
    if ai == aj {
        vec![(z, n)]
    } else {
        vec![(ai, 1.0), (aj, -1.0), (z, n)]
    }
}
