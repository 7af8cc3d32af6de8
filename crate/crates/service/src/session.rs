//! One reasoning session: an engine, its mode, and the log of successful
//! operations from which it can be rebuilt.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use drs_core::belief::BeliefSet;
use drs_core::controller::{Connective, ControllerError, EventReport, PendingChoice};
use drs_core::dma::DmaSession;
use drs_core::graph::LinkGraph;
use drs_core::logic::{Const, Predicate, PredicateKind, Symbol, TimeStamp};
use drs_core::mis::MisSession;
use drs_core::text::{self, ParseError, SourceSpan};
use serde::{Deserialize, Serialize};

use crate::file::{FileStep, SessionFile, FILE_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Document taxonomy.
    Dma,
    /// Multiple inheritance with exceptions.
    Mis,
}

impl Mode {
    fn syntax(self) -> text::Mode {
        match self {
            Mode::Dma => text::Mode::Plain,
            Mode::Mis => text::Mode::Mis,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Dma => "dma",
            Mode::Mis => "mis",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dma" => Ok(Mode::Dma),
            "mis" => Ok(Mode::Mis),
            other => Err(format!("unknown mode {other:?} (expected dma or mis)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error("unknown category {0}")]
    UnknownCategory(String),
    #[error("session file version {found} is not supported (expected {FILE_VERSION})")]
    VersionMismatch { found: u64 },
    #[error("replay diverged at step {step}: {message}")]
    ReplayDivergence { step: usize, message: String },
    #[error("malformed document: {0}")]
    Malformed(String),
}

impl SessionError {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Parse(e) => e.code(),
            SessionError::Controller(e) => e.code(),
            SessionError::UnknownCategory(_) => "UnknownCategory",
            SessionError::VersionMismatch { .. } => "VersionMismatch",
            SessionError::ReplayDivergence { .. } => "ReplayDivergence",
            SessionError::Malformed(_) => "SyntaxError",
        }
    }

    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            SessionError::Parse(e) => Some(e.span()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
enum Engine {
    Dma(DmaSession),
    Mis(MisSession),
}

macro_rules! dispatch {
    ($engine:expr, $s:ident => $body:expr) => {
        match $engine {
            Engine::Dma($s) => $body,
            Engine::Mis($s) => $body,
        }
    };
}

#[derive(Debug, Clone)]
pub struct Session {
    mode: Mode,
    engine: Engine,
    initial_auto: bool,
    steps: Vec<FileStep>,
    events: Vec<EventReport>,
}

impl Session {
    pub fn new(mode: Mode, auto_choose: bool) -> Self {
        let engine = match mode {
            Mode::Dma => Engine::Dma(DmaSession::new(auto_choose)),
            Mode::Mis => Engine::Mis(MisSession::new(auto_choose)),
        };
        Session { mode, engine, initial_auto: auto_choose, steps: Vec::new(), events: Vec::new() }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn beliefs(&self) -> &BeliefSet {
        dispatch!(&self.engine, s => s.beliefs())
    }

    pub fn graph(&self) -> &LinkGraph {
        dispatch!(&self.engine, s => s.graph())
    }

    pub fn pending(&self) -> Option<PendingChoice> {
        dispatch!(&self.engine, s => s.pending())
    }

    pub fn auto_choose(&self) -> bool {
        dispatch!(&self.engine, s => s.auto_choose())
    }

    /// Reports of every successful operation, oldest first.
    pub fn events(&self) -> &[EventReport] {
        &self.events
    }

    /// Parses `text` and hands it to the controller.
    pub fn submit(&mut self, text: &str) -> Result<EventReport, SessionError> {
        if self.pending().is_some() {
            return Err(ControllerError::ChoicePending.into());
        }
        let formula = text::parse(text, self.mode.syntax())?;
        let report = dispatch!(&mut self.engine, s => s.input(&formula))?;
        Ok(self.record(FileStep::Input(text.to_string()), report))
    }

    /// Resolves the pending revision by retracting `chosen`.
    pub fn choose(&mut self, chosen: &BTreeSet<TimeStamp>) -> Result<EventReport, SessionError> {
        let report = dispatch!(&mut self.engine, s => s.resolve_choice(chosen))?;
        Ok(self.record(FileStep::Choose(chosen.iter().copied().collect()), report))
    }

    /// Retracts one axiom on the user's request.
    pub fn retract(&mut self, index: TimeStamp) -> Result<EventReport, SessionError> {
        let report = dispatch!(&mut self.engine, s => s.remove_link(index))?;
        Ok(self.record(FileStep::Retract(index), report))
    }

    pub fn set_auto(&mut self, on: bool) {
        dispatch!(&mut self.engine, s => s.set_auto_choose(on));
        self.steps.push(FileStep::Auto(on));
    }

    fn record(&mut self, step: FileStep, report: EventReport) -> EventReport {
        self.steps.push(step);
        self.events.push(report.clone());
        report
    }

    /// Constants belonging to all (`And`) or any (`Or`) of the named
    /// categories, sorted by name.
    pub fn query(&self, categories: &[String], connective: Connective) -> Result<Vec<Const>, SessionError> {
        let preds = categories.iter().map(|c| self.category(c)).collect::<Result<Vec<_>, _>>()?;
        Ok(dispatch!(&self.engine, s => s.members(&preds, connective)).into_iter().collect())
    }

    /// A unary predicate of the session's language by name. In MIS mode the
    /// `^k`/`^p` suffix may be omitted when the name is unambiguous.
    fn category(&self, name: &str) -> Result<Predicate, SessionError> {
        let unknown = || SessionError::UnknownCategory(name.to_string());
        let (bare, kind) = match name.rsplit_once('^') {
            Some((b, "k")) => (b, Some(PredicateKind::Kind)),
            Some((b, "p")) => (b, Some(PredicateKind::Property)),
            Some(_) => return Err(unknown()),
            None => (name, None),
        };
        let mut found = self.beliefs().symbols().symbols().iter().filter_map(|s| match s {
            Symbol::Predicate(p)
                if p.name() == bare && p.arity() == 1 && kind.is_none_or(|k| p.predicate_kind() == k) =>
            {
                Some(p.clone())
            }
            _ => None,
        });
        match (found.next(), found.next()) {
            (Some(p), None) => Ok(p),
            _ => Err(unknown()),
        }
    }

    pub fn to_file(&self) -> SessionFile {
        SessionFile {
            version: FILE_VERSION,
            mode: self.mode,
            auto_choose: self.initial_auto,
            steps: self.steps.clone(),
        }
    }

    /// Rebuilds a session by replaying every recorded step.
    pub fn from_file(file: &SessionFile) -> Result<Session, SessionError> {
        if file.version != FILE_VERSION {
            return Err(SessionError::VersionMismatch { found: file.version });
        }
        let mut s = Session::new(file.mode, file.auto_choose);
        for (i, step) in file.steps.iter().enumerate() {
            let result = match step {
                FileStep::Input(text) => s.submit(text).map(drop),
                FileStep::Choose(chosen) => s.choose(&chosen.iter().copied().collect()).map(drop),
                FileStep::Retract(index) => s.retract(*index).map(drop),
                FileStep::Auto(on) => {
                    s.set_auto(*on);
                    Ok(())
                }
            };
            result.map_err(|e| SessionError::ReplayDivergence { step: i + 1, message: e.to_string() })?;
        }
        Ok(s)
    }
}
