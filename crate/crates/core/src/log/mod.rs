//! Event logs as multisets of task sequences.
//!
//! Only the task name and the ordering of events are retained from the
//! input formats. Distinct traces are stored once together with their
//! multiplicity, so every statistic is computed in time proportional to the
//! number of distinct traces.

mod csv;
mod synth;
mod xes;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use self::csv::{parse_csv, write_csv, CsvMapping};
pub use self::synth::{generate_synthetic_log, Block, GeneratorSpec, RandomSpecParams};
pub use self::xes::{parse_xes, write_xes};

/// Name given to an artificial initial task.
pub const ARTIFICIAL_START: &str = "__start__";
/// Name given to an artificial final task.
pub const ARTIFICIAL_END: &str = "__end__";

/// Dense handle of a task within an [`Alphabet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaskId(pub usize);

impl TaskId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bijection between task names and the indices `0..len`.
#[derive(Debug, Clone, Default)]
pub struct Alphabet {
    names: Vec<String>,
    lookup: HashMap<String, TaskId>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `name`, adding it if it is not yet known.
    pub fn intern(&mut self, name: &str) -> TaskId {
        if let Some(&id) = self.lookup.get(name) {
            return id;
        }
        let id = TaskId(self.names.len());
        self.names.push(name.to_owned());
        self.lookup.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<TaskId> {
        self.lookup.get(name).copied()
    }

    pub fn name(&self, id: TaskId) -> &str {
        &self.names[id.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.lookup.contains_key(name)
    }

    /// First name of the form `base`, `base1`, `base2`, ... not yet in use.
    fn fresh_name(&self, base: &str) -> String {
        if !self.contains(base) {
            return base.to_owned();
        }
        (1..)
            .map(|k| format!("{base}{k}"))
            .find(|candidate| !self.contains(candidate))
            .expect("unbounded counter")
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Alphabet {}

/// An ordered sequence of task occurrences.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace(Vec<TaskId>);

impl Trace {
    pub fn new(events: Vec<TaskId>) -> Self {
        Self(events)
    }

    pub fn events(&self) -> &[TaskId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The designated initial and final tasks of a normalized log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endpoints {
    pub start: TaskId,
    pub end: TaskId,
    pub artificial_start: bool,
    pub artificial_end: bool,
}

/// A multiset of traces over a task alphabet.
///
/// Parsers produce logs without endpoints; [`EventLog::ensure_unique_endpoints`]
/// designates (or adds) the unique initial and final tasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventLog {
    alphabet: Alphabet,
    traces: IndexMap<Trace, u64>,
    endpoints: Option<Endpoints>,
}

impl EventLog {
    /// Builds a log from named traces with multiplicities.
    ///
    /// Empty traces and zero multiplicities are rejected.
    pub fn from_traces<I, T, S>(traces: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, u64)>,
        T: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut builder = LogBuilder::new();
        for (k, (trace, count)) in traces.into_iter().enumerate() {
            let names: Vec<S> = trace.into_iter().collect();
            builder.push_trace(&format!("#{k}"), names.iter().map(|s| s.as_ref()), count)?;
        }
        Ok(builder.finish())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn task_names(&self) -> &[String] {
        self.alphabet.names()
    }

    pub fn num_tasks(&self) -> usize {
        self.alphabet.len()
    }

    /// Distinct traces with their multiplicities, in first-seen order.
    pub fn traces(&self) -> impl Iterator<Item = (&Trace, u64)> + '_ {
        self.traces.iter().map(|(t, &c)| (t, c))
    }

    pub fn distinct_traces(&self) -> usize {
        self.traces.len()
    }

    /// Number of traces, counting multiplicity.
    pub fn total_traces(&self) -> u64 {
        self.traces.values().sum()
    }

    /// Number of events, counting multiplicity.
    pub fn total_events(&self) -> u64 {
        self.traces.iter().map(|(t, &c)| t.len() as u64 * c).sum()
    }

    pub fn endpoints(&self) -> Option<Endpoints> {
        self.endpoints
    }

    pub fn start(&self) -> Option<TaskId> {
        self.endpoints.map(|e| e.start)
    }

    pub fn end(&self) -> Option<TaskId> {
        self.endpoints.map(|e| e.end)
    }

    /// Multiplicity of the trace given by task names (0 if absent).
    pub fn count_of<S: AsRef<str>>(&self, names: &[S]) -> u64 {
        let ids: Option<Vec<TaskId>> = names.iter().map(|n| self.alphabet.get(n.as_ref())).collect();
        ids.and_then(|ids| self.traces.get(&Trace(ids)).copied()).unwrap_or(0)
    }

    /// The trace multiset keyed by task names, independent of index order.
    pub fn named_multiset(&self) -> BTreeMap<Vec<String>, u64> {
        let mut out = BTreeMap::new();
        for (trace, count) in self.traces() {
            let names = trace
                .events()
                .iter()
                .map(|&id| self.alphabet.name(id).to_owned())
                .collect();
            *out.entry(names).or_insert(0) += count;
        }
        out
    }

    /// Names of the events of `trace`.
    pub fn trace_names<'a>(&'a self, trace: &'a Trace) -> impl Iterator<Item = &'a str> + 'a {
        trace.events().iter().map(move |&id| self.alphabet.name(id))
    }

    pub fn ensure_unique_endpoints(self) -> Self {
        ensure_unique_endpoints(self)
    }

    /// Serializes to the canonical JSON log format.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&CanonicalLog::from(self))?)
    }

    pub fn write_json<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer(writer, &CanonicalLog::from(self))?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: CanonicalLog = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let raw: CanonicalLog = serde_json::from_reader(reader)?;
        raw.try_into()
    }
}

/// Incremental construction of an [`EventLog`] from named events.
#[derive(Debug, Default)]
pub struct LogBuilder {
    alphabet: Alphabet,
    traces: IndexMap<Trace, u64>,
}

impl LogBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pre-registers task names so that their indices follow the given order.
    pub fn with_alphabet<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Self {
        let mut builder = Self::new();
        for name in names {
            builder.alphabet.intern(name.as_ref());
        }
        builder
    }

    /// Adds `count` copies of a trace. `label` names the trace in errors.
    pub fn push_trace<'a>(&mut self, label: &str, names: impl IntoIterator<Item = &'a str>, count: u64) -> Result<()> {
        let events: Vec<TaskId> = names.into_iter().map(|n| self.alphabet.intern(n)).collect();
        if events.is_empty() {
            return Err(Error::EmptyTrace(label.to_owned()));
        }
        if count > 0 {
            *self.traces.entry(Trace(events)).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn finish(self) -> EventLog {
        EventLog {
            alphabet: self.alphabet,
            traces: self.traces,
            endpoints: None,
        }
    }
}

/// Designates unique initial and final tasks, adding artificial ones when
/// the log has none.
///
/// A task qualifies as the initial task if it is the first event of every
/// trace and occurs nowhere else; symmetrically for the final task. When no
/// task qualifies, `__start__` (resp. `__end__`, suffixed with a counter if
/// the name is taken) is prepended (appended) to every trace. Logs that
/// already carry endpoints are returned unchanged.
pub fn ensure_unique_endpoints(log: EventLog) -> EventLog {
    if log.endpoints.is_some() {
        return log;
    }
    let EventLog {
        mut alphabet, traces, ..
    } = log;

    let (start, artificial_start, traces) = match unique_boundary_task(&traces, true, None) {
        Some(start) => (start, false, traces),
        None => {
            let start = alphabet.intern(&alphabet.fresh_name(ARTIFICIAL_START));
            let traces = traces
                .into_iter()
                .map(|(t, c)| {
                    let mut events = Vec::with_capacity(t.len() + 1);
                    events.push(start);
                    events.extend_from_slice(t.events());
                    (Trace(events), c)
                })
                .collect();
            (start, true, traces)
        }
    };

    let (end, artificial_end, traces) = match unique_boundary_task(&traces, false, Some(start)) {
        Some(end) => (end, false, traces),
        None => {
            let end = alphabet.intern(&alphabet.fresh_name(ARTIFICIAL_END));
            let traces = traces
                .into_iter()
                .map(|(t, c)| {
                    let mut events = t.0;
                    events.push(end);
                    (Trace(events), c)
                })
                .collect();
            (end, true, traces)
        }
    };

    EventLog {
        alphabet,
        traces,
        endpoints: Some(Endpoints {
            start,
            end,
            artificial_start,
            artificial_end,
        }),
    }
}

/// The task found at the first (or last) position of every trace and at no
/// other position, if there is one and it differs from `exclude`.
fn unique_boundary_task(traces: &IndexMap<Trace, u64>, first: bool, exclude: Option<TaskId>) -> Option<TaskId> {
    let mut candidate: Option<TaskId> = None;
    for trace in traces.keys() {
        let events = trace.events();
        let boundary = if first { events.first() } else { events.last() }?;
        match candidate {
            None => candidate = Some(*boundary),
            Some(c) if c != *boundary => return None,
            _ => {}
        }
    }
    let candidate = candidate?;
    if Some(candidate) == exclude {
        return None;
    }
    for trace in traces.keys() {
        let events = trace.events();
        let interior = if first {
            &events[1..]
        } else {
            &events[..events.len() - 1]
        };
        if interior.contains(&candidate) {
            return None;
        }
    }
    Some(candidate)
}

#[derive(Serialize, Deserialize)]
struct CanonicalTrace {
    events: Vec<usize>,
    count: u64,
}

#[derive(Serialize, Deserialize)]
struct CanonicalLog {
    alphabet: Vec<String>,
    traces: Vec<CanonicalTrace>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end: Option<usize>,
}

impl From<&EventLog> for CanonicalLog {
    fn from(log: &EventLog) -> Self {
        CanonicalLog {
            alphabet: log.alphabet.names().to_vec(),
            traces: log
                .traces()
                .map(|(t, count)| CanonicalTrace {
                    events: t.events().iter().map(|id| id.0).collect(),
                    count,
                })
                .collect(),
            start: log.start().map(|s| s.0),
            end: log.end().map(|e| e.0),
        }
    }
}

impl TryFrom<CanonicalLog> for EventLog {
    type Error = Error;

    fn try_from(raw: CanonicalLog) -> Result<Self> {
        let mut alphabet = Alphabet::new();
        for name in &raw.alphabet {
            if alphabet.contains(name) {
                return Err(Error::Schema(format!("duplicate task name {name:?} in alphabet")));
            }
            alphabet.intern(name);
        }
        let n = alphabet.len();
        let mut traces: IndexMap<Trace, u64> = IndexMap::new();
        for (k, t) in raw.traces.into_iter().enumerate() {
            if t.events.is_empty() {
                return Err(Error::EmptyTrace(format!("#{k}")));
            }
            if let Some(bad) = t.events.iter().find(|&&e| e >= n) {
                return Err(Error::Schema(format!("trace #{k} references unknown task index {bad}")));
            }
            if t.count > 0 {
                *traces
                    .entry(Trace(t.events.into_iter().map(TaskId).collect()))
                    .or_insert(0) += t.count;
            }
        }
        let endpoints = match (raw.start, raw.end) {
            (None, None) => None,
            (Some(s), Some(e)) => {
                if s >= n || e >= n || s == e {
                    return Err(Error::Schema(format!("invalid endpoints start={s} end={e}")));
                }
                let (start, end) = (TaskId(s), TaskId(e));
                for (k, t) in traces.keys().enumerate() {
                    let ev = t.events();
                    let ok = ev.len() >= 2
                        && ev[0] == start
                        && ev[ev.len() - 1] == end
                        && !ev[1..].contains(&start)
                        && !ev[..ev.len() - 1].contains(&end);
                    if !ok {
                        return Err(Error::Schema(format!(
                            "trace #{k} does not begin with the start task and end with the end task exactly once"
                        )));
                    }
                }
                Some(Endpoints {
                    start,
                    end,
                    artificial_start: raw.alphabet[s].starts_with(ARTIFICIAL_START),
                    artificial_end: raw.alphabet[e].starts_with(ARTIFICIAL_END),
                })
            }
            _ => return Err(Error::Schema("start and end must be given together".into())),
        };
        Ok(EventLog {
            alphabet,
            traces,
            endpoints,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn log(traces: &[(&[&str], u64)]) -> EventLog {
        EventLog::from_traces(traces.iter().map(|(t, c)| (t.iter().copied(), *c))).unwrap()
    }

    #[test]
    fn existing_endpoints_are_kept() {
        let l = log(&[(&["s", "a", "e"], 1), (&["s", "b", "e"], 1)]).ensure_unique_endpoints();
        let ep = l.endpoints().unwrap();
        assert_eq!(l.alphabet().name(ep.start), "s");
        assert_eq!(l.alphabet().name(ep.end), "e");
        assert!(!ep.artificial_start && !ep.artificial_end);
        assert_eq!(l.num_tasks(), 4);
    }

    #[test]
    fn artificial_endpoints_are_added() {
        let l = log(&[(&["a", "b"], 1), (&["b", "a"], 1)]).ensure_unique_endpoints();
        assert_eq!(l.num_tasks(), 4);
        let ep = l.endpoints().unwrap();
        assert!(ep.artificial_start && ep.artificial_end);
        assert_eq!(l.count_of(&["__start__", "a", "b", "__end__"]), 1);
        assert_eq!(l.count_of(&["__start__", "b", "a", "__end__"]), 1);
    }

    #[test]
    fn start_recurring_mid_trace_is_not_unique() {
        let l = log(&[(&["s", "a", "s", "e"], 1)]).ensure_unique_endpoints();
        let ep = l.endpoints().unwrap();
        assert!(ep.artificial_start);
        assert!(!ep.artificial_end);
        assert_eq!(l.alphabet().name(ep.end), "e");
        assert_eq!(l.count_of(&["__start__", "s", "a", "s", "e"]), 1);
    }

    #[test]
    fn single_event_traces_get_distinct_endpoints() {
        let l = log(&[(&["a"], 3)]).ensure_unique_endpoints();
        let ep = l.endpoints().unwrap();
        assert_ne!(ep.start, ep.end);
        assert_eq!(l.alphabet().name(ep.start), "a");
        assert!(ep.artificial_end);
        assert_eq!(l.count_of(&["a", "__end__"]), 3);
    }

    #[test]
    fn artificial_name_collision_gets_suffix() {
        let l = log(&[(&["__start__", "x"], 1), (&["x", "__start__"], 1)]).ensure_unique_endpoints();
        let ep = l.endpoints().unwrap();
        assert_eq!(l.alphabet().name(ep.start), "__start__1");
    }

    #[test]
    fn ensure_is_idempotent() {
        let once = log(&[(&["a", "b"], 1), (&["b", "a"], 2)]).ensure_unique_endpoints();
        let twice = once.clone().ensure_unique_endpoints();
        assert_eq!(once, twice);
    }

    #[test]
    fn multiplicity_is_recorded() {
        let l = log(&[(&["s", "a", "e"], 1), (&["s", "a", "e"], 1)]);
        assert_eq!(l.distinct_traces(), 1);
        assert_eq!(l.total_traces(), 2);
        assert_eq!(l.total_events(), 6);
    }

    #[test]
    fn empty_trace_is_rejected() {
        let err = EventLog::from_traces([(Vec::<&str>::new(), 1)]).unwrap_err();
        assert!(matches!(err, Error::EmptyTrace(_)));
    }

    #[test]
    fn canonical_json_layout() {
        let l = log(&[(&["s", "a", "e"], 2)]).ensure_unique_endpoints();
        let text = l.to_json().unwrap();
        assert_eq!(
            text,
            r#"{"alphabet":["s","a","e"],"traces":[{"events":[0,1,2],"count":2}],"start":0,"end":2}"#
        );
        assert_eq!(EventLog::from_json(&text).unwrap(), l);
    }

    #[test]
    fn canonical_json_rejects_bad_indices() {
        let text = r#"{"alphabet":["a"],"traces":[{"events":[0,3],"count":1}]}"#;
        assert!(matches!(EventLog::from_json(text), Err(Error::Schema(_))));
        let text = r#"{"alphabet":["s","e"],"traces":[{"events":[1,0],"count":1}],"start":0,"end":1}"#;
        assert!(matches!(EventLog::from_json(text), Err(Error::Schema(_))));
    }

    fn arb_log() -> impl Strategy<Value = EventLog> {
        let trace = prop::collection::vec(0usize..5, 1..8);
        prop::collection::vec((trace, 1u64..4), 1..6).prop_map(|traces| {
            let names = ["a", "b", "c", "d", "e"];
            EventLog::from_traces(
                traces
                    .into_iter()
                    .map(|(t, c)| (t.into_iter().map(|k| names[k]).collect::<Vec<_>>(), c)),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn endpoints_invariants_hold(l in arb_log()) {
            let before = l.num_tasks();
            let l = l.ensure_unique_endpoints();
            let ep = l.endpoints().unwrap();
            prop_assert_ne!(ep.start, ep.end);
            for (t, _) in l.traces() {
                let ev = t.events();
                prop_assert_eq!(ev[0], ep.start);
                prop_assert_eq!(*ev.last().unwrap(), ep.end);
                prop_assert!(!ev[1..].contains(&ep.start));
                prop_assert!(!ev[..ev.len() - 1].contains(&ep.end));
            }
            let added = ep.artificial_start as usize + ep.artificial_end as usize;
            prop_assert_eq!(l.num_tasks(), before + added);
        }

        #[test]
        fn json_round_trip(l in arb_log()) {
            let l = l.ensure_unique_endpoints();
            let back = EventLog::from_json(&l.to_json().unwrap()).unwrap();
            prop_assert_eq!(back, l);
        }
    }
}
