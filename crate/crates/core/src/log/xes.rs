//! Reading and writing the XES subset needed for discovery.
//!
//! Each `<trace>` becomes one trace and each `<event>` one occurrence of the
//! task named by its `concept:name` attribute. Events whose
//! `lifecycle:transition` is present and not `complete` are dropped.

use std::io::{Read, Write};

use chrono::DateTime;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{EventLog, LogBuilder};
use crate::error::{Error, Result};

const NAME_KEY: &str = "concept:name";
const LIFECYCLE_KEY: &str = "lifecycle:transition";
const TIMESTAMP_KEY: &str = "time:timestamp";

#[derive(Default)]
struct EventAttrs {
    name: Option<String>,
    lifecycle: Option<String>,
    #[allow(dead_code)]
    timestamp: Option<DateTime<chrono::FixedOffset>>,
}

struct TraceState {
    label: Option<String>,
    index: usize,
    events: Vec<String>,
}

impl TraceState {
    fn display_name(&self) -> String {
        match &self.label {
            Some(l) => format!("{l:?}"),
            None => format!("#{}", self.index),
        }
    }
}

/// Parses an XES document into an event log without endpoints.
pub fn parse_xes<R: Read>(mut input: R) -> Result<EventLog> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    parse_xes_bytes(&bytes)
}

fn parse_xes_bytes(bytes: &[u8]) -> Result<EventLog> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().check_end_names = true;

    let mut builder = LogBuilder::new();
    let mut stack: Vec<String> = Vec::new();
    let mut saw_log = false;
    let mut trace_count = 0usize;
    let mut trace: Option<TraceState> = None;
    let mut event: Option<EventAttrs> = None;
    let mut buf = Vec::new();

    loop {
        let ev = reader
            .read_event_into(&mut buf)
            .map_err(|e| xml_error(bytes, reader.error_position() as usize, &e.to_string()))?;
        match ev {
            Event::Start(ref start) | Event::Empty(ref start) => {
                let is_empty = matches!(ev, Event::Empty(_));
                let tag = local_name(start);
                let parent = stack.last().map(String::as_str);
                match tag.as_str() {
                    "log" => saw_log = true,
                    "trace" if parent == Some("log") => {
                        trace = Some(TraceState {
                            label: None,
                            index: trace_count,
                            events: Vec::new(),
                        });
                        trace_count += 1;
                    }
                    "event" if parent == Some("trace") => event = Some(EventAttrs::default()),
                    _ => {
                        if let Some((key, value)) = attribute_pair(start, bytes, &reader)? {
                            match parent {
                                Some("event") => {
                                    if let Some(attrs) = event.as_mut() {
                                        match key.as_str() {
                                            NAME_KEY => attrs.name = Some(value),
                                            LIFECYCLE_KEY => attrs.lifecycle = Some(value),
                                            TIMESTAMP_KEY if tag == "date" => {
                                                attrs.timestamp = DateTime::parse_from_rfc3339(&value).ok()
                                            }
                                            _ => {}
                                        }
                                    }
                                }
                                Some("trace") if key == NAME_KEY && event.is_none() => {
                                    if let Some(t) = trace.as_mut() {
                                        t.label = Some(value);
                                    }
                                }
                                _ => {}
                            }
                        }
                    }
                }
                if is_empty {
                    close_element(&tag, &mut builder, &mut trace, &mut event)?;
                } else {
                    stack.push(tag);
                }
            }
            Event::End(_) => {
                let tag = stack.pop().unwrap_or_default();
                close_element(&tag, &mut builder, &mut trace, &mut event)?;
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if !stack.is_empty() {
        return Err(xml_error(
            bytes,
            bytes.len(),
            &format!("unclosed element <{}>", stack.last().unwrap()),
        ));
    }
    if !saw_log {
        return Err(Error::Schema("document has no <log> element".into()));
    }
    Ok(builder.finish())
}

fn close_element(
    tag: &str,
    builder: &mut LogBuilder,
    trace: &mut Option<TraceState>,
    event: &mut Option<EventAttrs>,
) -> Result<()> {
    match tag {
        "event" => {
            if let (Some(attrs), Some(t)) = (event.take(), trace.as_mut()) {
                let Some(name) = attrs.name else {
                    return Err(Error::Schema(format!(
                        "event without {NAME_KEY} in trace {}",
                        t.display_name()
                    )));
                };
                let keep = attrs
                    .lifecycle
                    .as_deref()
                    .is_none_or(|l| l.eq_ignore_ascii_case("complete"));
                if keep {
                    t.events.push(name);
                }
            }
        }
        "trace" => {
            if let Some(t) = trace.take() {
                builder.push_trace(&t.display_name(), t.events.iter().map(String::as_str), 1)?;
            }
        }
        _ => {}
    }
    Ok(())
}

fn local_name(start: &BytesStart<'_>) -> String {
    start.local_name().as_ref().to_owned()
}

/// The `key`/`value` pair of an XES attribute element, if both are present.
fn attribute_pair(start: &BytesStart<'_>, bytes: &[u8], reader: &Reader<&[u8]>) -> Result<Option<(String, String)>> {
    let mut key = None;
    let mut value = None;
    for attr in start.attributes() {
        let attr = attr.map_err(|e| xml_error(bytes, reader.buffer_position() as usize, &e.to_string()))?;
        let text = attr
            .normalized_value(quick_xml::XmlVersion::Implicit1_0)
            .map_err(|e| xml_error(bytes, reader.buffer_position() as usize, &e.to_string()))?
            .into_owned();
        match attr.key.as_ref() {
            "key" => key = Some(text),
            "value" => value = Some(text),
            _ => {}
        }
    }
    Ok(key.zip(value))
}

fn xml_error(bytes: &[u8], offset: usize, message: &str) -> Error {
    let offset = offset.min(bytes.len());
    let before = &bytes[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let column = match before.iter().rposition(|&b| b == b'\n') {
        Some(nl) => offset - nl,
        None => offset + 1,
    };
    Error::Xml {
        line,
        column,
        message: message.to_owned(),
    }
}

/// Writes the log as XES, one `<trace>` per trace occurrence.
pub fn write_xes<W: Write>(log: &EventLog, mut out: W) -> Result<()> {
    use quick_xml::escape::escape;

    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(out, r#"<log xes.version="1.0" xmlns="http://www.xes-standard.org/">"#)?;
    let mut case = 0usize;
    for (trace, count) in log.traces() {
        for _ in 0..count {
            writeln!(out, "  <trace>")?;
            writeln!(out, r#"    <string key="concept:name" value="case_{case}"/>"#)?;
            for name in log.trace_names(trace) {
                writeln!(out, "    <event>")?;
                writeln!(out, r#"      <string key="concept:name" value="{}"/>"#, escape(name))?;
                writeln!(out, r#"      <string key="lifecycle:transition" value="complete"/>"#)?;
                writeln!(out, "    </event>")?;
            }
            writeln!(out, "  </trace>")?;
            case += 1;
        }
    }
    writeln!(out, "</log>")?;
    Ok(())
}
