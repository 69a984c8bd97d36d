//! Line-oriented file formats: input sequences, witnesses and traces.
//!
//! Sequence files start with a header line and then hold one event per line:
//!
//! ```text
//! orientation c=2
//! 0 1
//! 1 2
//! ```
//!
//! ```text
//! bmatching K=1 C=2
//! 0 5 7
//! 1 5
//! ```
//!
//! Traces are JSON lines tagged by a `record` field: one header, one line per
//! step, one summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::oracle::Witness;
use crate::step::StepRecord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceFile {
    Orientation {
        constraint: u32,
        edges: Vec<(NodeId, NodeId)>,
    },
    BMatching {
        promised: u32,
        factor: u32,
        arrivals: Vec<Vec<NodeId>>,
    },
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::RejectedInput(format!("line {}: {msg}", line + 1))
}

fn parse_id(tok: &str, line: usize) -> Result<NodeId> {
    tok.parse::<u32>()
        .map(NodeId)
        .map_err(|_| bad(line, format!("`{tok}` is not a node id")))
}

fn parse_param(tok: Option<&str>, key: &str, line: usize) -> Result<u32> {
    let tok = tok.ok_or_else(|| bad(line, format!("missing {key}=")))?;
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| bad(line, format!("expected {key}=<integer>, found `{tok}`")))
}

impl SequenceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::RejectedInput("empty sequence file".into()))?;
        let mut head = header.split_whitespace();
        match head.next() {
            Some("orientation") => {
                let constraint = parse_param(head.next(), "c", 0)?;
                if head.next().is_some() {
                    return Err(bad(0, "trailing header fields"));
                }
                let mut edges = Vec::new();
                for (i, line) in lines {
                    let toks: Vec<&str> = line.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(bad(i, "expected two node ids"));
                    }
                    edges.push((parse_id(toks[0], i)?, parse_id(toks[1], i)?));
                }
                Ok(SequenceFile::Orientation { constraint, edges })
            }
            Some("bmatching") => {
                let promised = parse_param(head.next(), "K", 0)?;
                let factor = parse_param(head.next(), "C", 0)?;
                if head.next().is_some() {
                    return Err(bad(0, "trailing header fields"));
                }
                let mut arrivals = Vec::new();
                for (i, line) in lines {
                    let mut toks = line.split_whitespace();
                    let index: usize = toks
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| bad(i, "missing arrival index"))?;
                    if index != arrivals.len() {
                        return Err(bad(
                            i,
                            format!("arrival index {index}, expected {}", arrivals.len()),
                        ));
                    }
                    let ids = toks.map(|t| parse_id(t, i)).collect::<Result<Vec<_>>>()?;
                    if ids.is_empty() {
                        return Err(bad(i, "arrival without neighbors"));
                    }
                    arrivals.push(ids);
                }
                Ok(SequenceFile::BMatching {
                    promised,
                    factor,
                    arrivals,
                })
            }
            _ => Err(bad(
                0,
                "header must start with `orientation` or `bmatching`",
            )),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self {
            SequenceFile::Orientation { constraint, edges } => {
                writeln!(out, "orientation c={constraint}").unwrap();
                for (u, v) in edges {
                    writeln!(out, "{u} {v}").unwrap();
                }
            }
            SequenceFile::BMatching {
                promised,
                factor,
                arrivals,
            } => {
                writeln!(out, "bmatching K={promised} C={factor}").unwrap();
                for (i, a) in arrivals.iter().enumerate() {
                    write!(out, "{i}").unwrap();
                    for y in a {
                        write!(out, " {y}").unwrap();
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

pub fn witness_to_text(w: &Witness) -> String {
    let (kind, nodes) = match w {
        Witness::Orientation(h) => ("orientation", h),
        Witness::Assignment(a) => ("bmatching", a),
    };
    let mut out = format!("witness {kind}\n");
    for (i, x) in nodes.iter().enumerate() {
        writeln!(out, "{i} {x}").unwrap();
    }
    out
}

pub fn parse_witness(text: &str) -> Result<Witness> {
    let mut lines = text.lines().enumerate();
    let kind = match lines.next().map(|(_, l)| l.trim()) {
        Some("witness orientation") => "orientation",
        Some("witness bmatching") => "bmatching",
        _ => {
            return Err(bad(
                0,
                "expected `witness orientation` or `witness bmatching`",
            ))
        }
    };
    let mut nodes = Vec::new();
    for (i, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 || toks[0].parse::<usize>().ok() != Some(nodes.len()) {
            return Err(bad(i, "expected `<index> <node>`"));
        }
        nodes.push(parse_id(toks[1], i)?);
    }
    Ok(if kind == "orientation" {
        Witness::Orientation(nodes)
    } else {
        Witness::Assignment(nodes)
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub algorithm: String,
    pub params: BTreeMap<String, u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub limit: u64,
    pub observed: u64,
    pub holds: bool,
}

impl Verdict {
    /// `observed ≤ limit`.
    pub fn at_most(name: &str, observed: u64, limit: u64) -> Self {
        Verdict {
            name: name.to_string(),
            limit,
            observed,
            holds: observed <= limit,
        }
    }

    /// `observed ≥ limit`.
    pub fn at_least(name: &str, observed: u64, limit: u64) -> Self {
        Verdict {
            name: name.to_string(),
            limit,
            observed,
            holds: observed >= limit,
        }
    }

    pub fn exactly(name: &str, observed: u64, limit: u64) -> Self {
        Verdict {
            name: name.to_string(),
            limit,
            observed,
            holds: observed == limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub steps: u64,
    pub total: u64,
    pub max_step: u64,
    pub final_max: u64,
    pub verdicts: Vec<Verdict>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum TraceLine {
    Header(TraceHeader),
    Step(StepRecord),
    Summary(TraceSummary),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceFile {
    pub header: TraceHeader,
    pub steps: Vec<StepRecord>,
    pub summary: TraceSummary,
}

impl TraceFile {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut push = |line: TraceLine| {
            out.push_str(&serde_json::to_string(&line).expect("trace lines serialize"));
            out.push('\n');
        };
        push(TraceLine::Header(self.header.clone()));
        for s in &self.steps {
            push(TraceLine::Step(*s));
        }
        push(TraceLine::Summary(self.summary.clone()));
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut header = None;
        let mut steps = Vec::new();
        let mut summary = None;
        for (i, line) in text.lines().enumerate() {
            if summary.is_some() {
                return Err(bad(i, "content after the summary record"));
            }
            let rec: TraceLine =
                serde_json::from_str(line).map_err(|e| bad(i, format!("malformed record: {e}")))?;
            match (rec, header.is_some()) {
                (TraceLine::Header(h), false) => header = Some(h),
                (TraceLine::Header(_), true) => return Err(bad(i, "second header record")),
                (_, false) => return Err(bad(i, "trace must start with a header record")),
                (TraceLine::Step(s), true) => steps.push(s),
                (TraceLine::Summary(s), true) => summary = Some(s),
            }
        }
        Ok(TraceFile {
            header: header.ok_or_else(|| Error::RejectedInput("empty trace".into()))?,
            steps,
            summary: summary.ok_or_else(|| Error::RejectedInput("trace has no summary".into()))?,
        })
    }
}
