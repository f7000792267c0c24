//! Instance files, result files and digests.
//!
//! Instance format (node ids are 1-based):
//!
//! ```text
//! c comment
//! p fot <nodes> <arcs> <theta>
//! n <id> s
//! n <id> t
//! a <tail> <head> <capacity> <cost> <transit>
//! ```

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::construction::{Phase, SolveOutcome};
use crate::error::FlowError;
use crate::expand::{FlowOverTime, TimeExpandedNetwork};
use crate::graph::{normalize_transit_times, ArcSpec, NetworkSpec, NormalizedNetwork};
use crate::oracle::VerificationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("invalid instance: {0}")]
    Network(#[from] FlowError),
    #[error("invalid result file: {0}")]
    Result(String),
}

/// A network with a time horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub network: NetworkSpec,
    pub theta: usize,
}

impl Instance {
    pub fn normalized(&self) -> NormalizedNetwork {
        normalize_transit_times(&self.network).expect("instance networks have non-negative transit times")
    }

    /// SHA-256 of the canonical text form.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(emit_instance(self).as_bytes()))
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn field<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| syntax(line, format!("bad {what} '{tok}'")))
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut source = None;
    let mut sink = None;
    let mut arcs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut toks = raw.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        match tag {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate problem line"));
                }
                if toks.next() != Some("fot") {
                    return Err(syntax(line, "problem type must be 'fot'"));
                }
                let n = field(line, toks.next(), "node count")?;
                let m = field(line, toks.next(), "arc count")?;
                let theta = field(line, toks.next(), "horizon")?;
                header = Some((n, m, theta));
            }
            "n" => {
                let (n, _, _) = header.ok_or_else(|| syntax(line, "node line before problem line"))?;
                let id: usize = field(line, toks.next(), "node id")?;
                if id < 1 || id > n {
                    return Err(syntax(line, format!("node id {id} out of range")));
                }
                let slot = match toks.next() {
                    Some("s") => &mut source,
                    Some("t") => &mut sink,
                    other => return Err(syntax(line, format!("node role must be s or t, got {other:?}"))),
                };
                if slot.replace(id - 1).is_some() {
                    return Err(syntax(line, "terminal declared twice"));
                }
            }
            "a" => {
                let (n, _, _) = header.ok_or_else(|| syntax(line, "arc line before problem line"))?;
                let tail: usize = field(line, toks.next(), "tail")?;
                let head: usize = field(line, toks.next(), "head")?;
                let capacity: i64 = field(line, toks.next(), "capacity")?;
                let cost: i64 = field(line, toks.next(), "cost")?;
                let transit: i64 = field(line, toks.next(), "transit time")?;
                if tail < 1 || tail > n || head < 1 || head > n {
                    return Err(syntax(line, "arc endpoint out of range"));
                }
                if capacity < 0 {
                    return Err(syntax(line, "negative capacity"));
                }
                if transit < 0 {
                    return Err(syntax(line, "negative transit time"));
                }
                arcs.push(ArcSpec::new(tail - 1, head - 1, capacity, cost, transit));
            }
            other => return Err(syntax(line, format!("unknown line type '{other}'"))),
        }
        if toks.next().is_some() {
            return Err(syntax(line, "trailing tokens"));
        }
    }
    let (n, m, theta) = header.ok_or(ParseError::Missing("problem line"))?;
    if arcs.len() != m {
        return Err(ParseError::Syntax {
            line: 0,
            message: format!("header announces {m} arcs, found {}", arcs.len()),
        });
    }
    let source = source.ok_or(ParseError::Missing("source node"))?;
    let sink = sink.ok_or(ParseError::Missing("sink node"))?;
    let network = NetworkSpec::new(n, source, sink, arcs)?;
    Ok(Instance { network, theta })
}

/// Canonical text form; parsing it yields the same instance.
pub fn emit_instance(inst: &Instance) -> String {
    let net = &inst.network;
    let mut out = String::new();
    writeln!(out, "p fot {} {} {}", net.node_count(), net.arc_count(), inst.theta).unwrap();
    writeln!(out, "n {} s", net.source() + 1).unwrap();
    writeln!(out, "n {} t", net.sink() + 1).unwrap();
    for a in net.arcs() {
        writeln!(out, "a {} {} {} {} {}", a.tail + 1, a.head + 1, a.capacity, a.cost, a.transit).unwrap();
    }
    out
}

/// Nonzero flow entering an original arc in a given layer (ids 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowEntry {
    pub arc: usize,
    pub layer: usize,
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub start: usize,
    pub end: usize,
    /// Pattern on the normalized arcs.
    pub pattern: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificates {
    pub feasible: bool,
    pub value_matches_oracle: Option<bool>,
    pub cost_matches_oracle: Option<bool>,
    pub no_negative_cycle: bool,
    pub above_threshold: bool,
    pub interval_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationSummary {
    pub seed_cost: i128,
    pub step_1_1: usize,
    pub step_1_2: usize,
    pub step_2: usize,
    pub sweep: usize,
    pub step_1_1_status: String,
    pub step_1_2_status: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultFile {
    pub instance_digest: String,
    pub theta: usize,
    pub value: i64,
    pub cost: i128,
    pub interval: Option<IntervalRecord>,
    pub flows: Vec<FlowEntry>,
    pub certificates: Certificates,
    pub iterations: IterationSummary,
}

impl ResultFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result files serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError::Result(e.to_string()))
    }

    pub fn from_solution(inst: &Instance, out: &SolveOutcome, report: &VerificationReport) -> Self {
        let count = |phase| out.log.phase_records(phase).count();
        ResultFile {
            instance_digest: inst.digest(),
            theta: inst.theta,
            value: out.value,
            cost: out.cost,
            interval: out.interval.as_ref().map(|iv| IntervalRecord {
                start: iv.start,
                end: iv.end,
                pattern: iv.pattern.clone(),
            }),
            flows: original_arc_flows(&out.ten, &out.flow),
            certificates: Certificates::from_report(report),
            iterations: IterationSummary {
                seed_cost: out.log.seed_cost,
                step_1_1: count(Phase::Step11),
                step_1_2: count(Phase::Step12),
                step_2: count(Phase::Step2),
                sweep: count(Phase::Sweep),
                step_1_1_status: out.log.step_1_1.to_string(),
                step_1_2_status: out.log.step_1_2.to_string(),
            },
        }
    }
}

impl Certificates {
    pub fn from_report(report: &VerificationReport) -> Self {
        Certificates {
            feasible: report.feasible,
            value_matches_oracle: report.value_matches.as_option(),
            cost_matches_oracle: report.cost_matches.as_option(),
            no_negative_cycle: report.no_negative_cycle,
            above_threshold: report.above_threshold,
            interval_bound: report.interval_bound.as_option(),
        }
    }
}

/// Flow entering each original arc per departure layer, read off the first arc of its chain.
pub fn original_arc_flows(ten: &TimeExpandedNetwork, f: &FlowOverTime) -> Vec<FlowEntry> {
    let base = ten.base();
    let mut out = Vec::new();
    for orig in 0..base.original_arc_count {
        let first = base.chain(orig)[0];
        for layer in 1..=ten.horizon() {
            if let Some(v) = f.on_copy(ten, first, layer) {
                if v != 0 {
                    out.push(FlowEntry {
                        arc: orig + 1,
                        layer,
                        value: v,
                    });
                }
            }
        }
    }
    out
}

/// Rebuilds the TEN flow from per-original-arc entries.
///
/// Chains of subdivided arcs carry the entering flow unchanged, and the super-source and
/// super-sink arcs are recovered from conservation at the terminal copies.
pub fn flow_from_entries(ten: &TimeExpandedNetwork, entries: &[FlowEntry]) -> Result<FlowOverTime, ParseError> {
    let base = ten.base();
    let mut f = FlowOverTime::zero(ten);
    for e in entries {
        if e.arc < 1 || e.arc > base.original_arc_count {
            return Err(ParseError::Result(format!("unknown arc {}", e.arc)));
        }
        for (step, &unit) in base.chain(e.arc - 1).iter().enumerate() {
            let copy = ten
                .copy_arc(unit, e.layer + step)
                .ok_or_else(|| ParseError::Result(format!("arc {} has no copy in layer {}", e.arc, e.layer)))?;
            f.values[copy] += e.value;
        }
    }
    let net = ten.network();
    let b = ten.base_network();
    for layer in 1..=ten.horizon() {
        let s = ten.node(b.source(), layer);
        let t = ten.node(b.sink(), layer);
        let s_link = ten.source_link(layer);
        let t_link = ten.sink_link(layer);
        let s_out = crate::graph::net_outflow(net, &f.values, s) + f.values[s_link];
        f.values[s_link] = s_out;
        let t_in = -(crate::graph::net_outflow(net, &f.values, t) - f.values[t_link]);
        f.values[t_link] = t_in;
    }
    Ok(f)
}
