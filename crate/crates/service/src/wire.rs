//! JSON shapes shared by the HTTP API and the REPL's machine output.

use drs_core::belief::{Entry, Origin};
use drs_core::controller::{EventReport, Outcome, PendingChoice, Step};
use drs_core::graph::{Link, LinkGraph, Node};
use serde::Serialize;
use serde_json::{json, Value};

use crate::session::SessionError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OriginWire {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub premises: Option<Vec<u32>>,
}

impl From<&Origin> for OriginWire {
    fn from(o: &Origin) -> Self {
        match o {
            Origin::External { source } => {
                OriginWire { kind: "external", source: Some(source.clone()), rule: None, premises: None }
            }
            Origin::Derived { rule, premises } => {
                OriginWire { kind: "derived", source: None, rule: Some(rule.name()), premises: Some(premises.clone()) }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeliefWire {
    pub index: u32,
    pub formula: String,
    pub status: String,
    pub from: OriginWire,
    pub to: Vec<u32>,
    pub entrenchment: f64,
    pub category: &'static str,
}

impl From<&Entry> for BeliefWire {
    fn from(e: &Entry) -> Self {
        let l = e.label();
        BeliefWire {
            index: e.index(),
            formula: e.formula().to_string(),
            status: l.status.to_string(),
            from: (&l.from).into(),
            to: l.to.clone(),
            entrenchment: l.entrenchment,
            category: l.category.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeWire {
    pub id: String,
    pub kind: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkWire {
    pub kind: &'static str,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphWire {
    pub nodes: Vec<NodeWire>,
    pub links: Vec<LinkWire>,
}

fn node_kind(n: &Node) -> &'static str {
    match n {
        Node::Individual(_) => "individual",
        Node::Class(_) => "class",
        Node::Property(_) => "property",
    }
}

fn link_wire(l: &Link) -> LinkWire {
    LinkWire { kind: l.kind.name(), from: l.from.to_string(), to: l.to.to_string() }
}

impl From<&LinkGraph> for GraphWire {
    fn from(g: &LinkGraph) -> Self {
        GraphWire {
            nodes: g.nodes().map(|n| NodeWire { id: n.to_string(), kind: node_kind(n) }).collect(),
            links: g.links().map(link_wire).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CulpritWire {
    pub index: u32,
    pub formula: String,
    pub entrenchment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PendingWire {
    pub contradiction: u32,
    pub culprits: Vec<CulpritWire>,
}

impl From<&PendingChoice> for PendingWire {
    fn from(p: &PendingChoice) -> Self {
        PendingWire {
            contradiction: p.contradiction,
            culprits: p
                .culprits
                .iter()
                .map(|c| CulpritWire { index: c.index, formula: c.formula.to_string(), entrenchment: c.entrenchment })
                .collect(),
        }
    }
}

pub fn step_json(s: &Step) -> Value {
    match s {
        Step::SymbolsAdded(syms) => {
            json!({"type": "symbols-added", "symbols": syms.iter().map(ToString::to_string).collect::<Vec<_>>()})
        }
        Step::Entered { index, formula, origin } => {
            json!({"type": "entered", "index": index, "formula": formula.to_string(), "from": OriginWire::from(origin)})
        }
        Step::DuplicateIgnored { formula, existing } => {
            json!({"type": "duplicate-ignored", "formula": formula.to_string(), "existing": existing})
        }
        Step::Blocked { at, formula, by } => json!({
            "type": "blocked", "at": at, "formula": formula.to_string(),
            "by": Node::Property(by.clone()).to_string(),
        }),
        Step::LinkAdded(l) => json!({"type": "link-added", "link": link_wire(l)}),
        Step::LinkSkipped(l) => json!({"type": "link-skipped", "link": link_wire(l)}),
        Step::LinkRemoved(l) => json!({"type": "link-removed", "link": link_wire(l)}),
        Step::NodeAdded(n) => json!({"type": "node-added", "node": n.to_string(), "kind": node_kind(n)}),
        Step::NodeRemoved(n) => json!({"type": "node-removed", "node": n.to_string(), "kind": node_kind(n)}),
        Step::ChoiceRequested { contradiction, culprits } => {
            json!({"type": "choice-requested", "contradiction": contradiction, "culprits": culprits})
        }
        Step::Revised { at, contradiction, chosen, retracted } => json!({
            "type": "revised", "at": at, "contradiction": contradiction,
            "chosen": chosen, "retracted": retracted,
        }),
        Step::Retracted { at, axiom, retracted } => {
            json!({"type": "retracted", "at": at, "axiom": axiom, "retracted": retracted})
        }
    }
}

pub fn report_json(r: &EventReport) -> Value {
    let (outcome, pending) = match &r.outcome {
        Outcome::Completed => ("completed", Value::Null),
        Outcome::AwaitingChoice(p) => ("awaiting-choice", json!(PendingWire::from(p))),
    };
    json!({
        "steps": r.steps.iter().map(step_json).collect::<Vec<_>>(),
        "entered": r.entered(),
        "outcome": outcome,
        "pending": pending,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpanWire {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorWire {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<SpanWire>,
}

impl ErrorWire {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        ErrorWire { code: code.into(), message: message.into(), span: None }
    }
}

impl From<&SessionError> for ErrorWire {
    fn from(e: &SessionError) -> Self {
        ErrorWire {
            code: e.code().to_string(),
            message: e.to_string(),
            span: e.span().map(|s| SpanWire { start: s.start, end: s.end }),
        }
    }
}
