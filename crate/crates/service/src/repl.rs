//! Line-oriented REPL. Anything that is not a command is taken as a formula.

use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};

use drs_core::controller::{Connective, EventReport, Outcome, PendingChoice, Step};
use drs_core::graph::Node;

use crate::file::SessionFile;
use crate::session::{Session, SessionError};

const HELP: &str = "\
commands:
  <formula>              enter a formula (same as `input <formula>`)
  choices                show the pending revision choice
  choose i,j,...         retract the chosen culprits
  beliefs [--all]        list active beliefs (or every entry)
  graph [--dot]          show the link graph
  query c1,c2 [and|or]   members of the given categories
  retract i              retract axiom i and what rests on it
  auto on|off            toggle automatic culprit choice
  save FILE | load FILE  write or replay a session file
  help | quit";

pub fn run(session: &mut Session, input: impl BufRead, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{} session; `help` lists commands", session.mode())?;
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        if matches!(line, "quit" | "exit") {
            break;
        }
        if let Err(e) = command(session, line, &mut out)? {
            writeln!(out, "error {}: {e}", e.code())?;
        }
    }
    Ok(())
}

/// Runs one line. The outer result is I/O; the inner one is the session's answer.
pub fn command(session: &mut Session, line: &str, out: &mut impl Write) -> io::Result<Result<(), SessionError>> {
    let (head, rest) = line.split_once(char::is_whitespace).map_or((line, ""), |(h, r)| (h, r.trim()));
    match head {
        "help" => writeln!(out, "{HELP}")?,
        "input" => return report(session.submit(rest), out),
        "choices" => match session.pending() {
            Some(p) => write_pending(&p, out)?,
            None => writeln!(out, "no choice pending")?,
        },
        "choose" => {
            let chosen: Result<BTreeSet<u32>, _> =
                rest.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse).collect();
            match chosen {
                Ok(c) => return report(session.choose(&c), out),
                Err(_) => writeln!(out, "usage: choose i,j,...")?,
            }
        }
        "retract" => match rest.parse() {
            Ok(i) => return report(session.retract(i), out),
            Err(_) => writeln!(out, "usage: retract i")?,
        },
        "beliefs" => {
            let all = rest == "--all";
            for e in session.beliefs().entries().iter().filter(|e| all || e.is_active()) {
                let l = e.label();
                let from = match l.from.premises() {
                    [] => "input".to_string(),
                    p => format!("{}, {:?}", rule_name(&l.from), p),
                };
                writeln!(out, "{:>4}  {}  {{{from}}} {}", e.index(), e.formula(), l.status)?;
            }
        }
        "graph" => {
            if rest == "--dot" {
                write!(out, "{}", session.graph().to_dot())?;
            } else {
                for l in session.graph().links() {
                    writeln!(out, "{l}")?;
                }
            }
        }
        "query" => {
            let mut words = rest.split_whitespace();
            let cats: Vec<String> =
                words.next().unwrap_or("").split(',').filter(|c| !c.is_empty()).map(String::from).collect();
            let op = match words.next() {
                None | Some("and") => Connective::And,
                Some("or") => Connective::Or,
                Some(_) => {
                    writeln!(out, "usage: query c1,c2 [and|or]")?;
                    return Ok(Ok(()));
                }
            };
            match session.query(&cats, op) {
                Ok(m) => writeln!(out, "{{{}}}", m.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))?,
                Err(e) => return Ok(Err(e)),
            }
        }
        "auto" => match rest {
            "on" => session.set_auto(true),
            "off" => session.set_auto(false),
            _ => writeln!(out, "usage: auto on|off")?,
        },
        "save" => {
            std::fs::write(rest, session.to_file().to_json())?;
            writeln!(out, "saved {rest}")?;
        }
        "load" => {
            let loaded = std::fs::read_to_string(rest)
                .map_err(|e| SessionError::Malformed(e.to_string()))
                .and_then(|t| SessionFile::from_json(&t))
                .and_then(|f| Session::from_file(&f));
            match loaded {
                Ok(s) => {
                    *session = s;
                    writeln!(out, "loaded {rest}: {} entries", session.beliefs().len())?;
                }
                Err(e) => return Ok(Err(e)),
            }
        }
        _ => return report(session.submit(line), out),
    }
    Ok(Ok(()))
}

fn rule_name(o: &drs_core::belief::Origin) -> &'static str {
    match o {
        drs_core::belief::Origin::Derived { rule, .. } => rule.name(),
        drs_core::belief::Origin::External { .. } => "input",
    }
}

fn report(r: Result<EventReport, SessionError>, out: &mut impl Write) -> io::Result<Result<(), SessionError>> {
    let r = match r {
        Ok(r) => r,
        Err(e) => return Ok(Err(e)),
    };
    write_report(&r, out)?;
    Ok(Ok(()))
}

pub fn write_report(r: &EventReport, out: &mut impl Write) -> io::Result<()> {
    for s in &r.steps {
        match s {
            Step::Entered { index, formula, origin } => {
                let from = match origin.premises() {
                    [] => String::new(),
                    p => format!("  {{{}, {:?}}}", rule_name(origin), p),
                };
                writeln!(out, "{index:>4}  {formula}{from}")?;
            }
            Step::DuplicateIgnored { formula, existing } => writeln!(out, "      {formula} already at {existing}")?,
            Step::Blocked { at, formula, by } => {
                writeln!(out, "{at:>4}  blocked {formula} by {}", Node::Property(by.clone()))?
            }
            Step::Revised { at, chosen, retracted, .. } => {
                writeln!(out, "{at:>4}  revised: chose {chosen:?}, retracted {retracted:?}")?
            }
            Step::Retracted { at, axiom, retracted } => writeln!(out, "{at:>4}  retracted {axiom}: {retracted:?}")?,
            Step::LinkAdded(l) => writeln!(out, "      + {l}")?,
            Step::LinkRemoved(l) => writeln!(out, "      - {l}")?,
            Step::LinkSkipped(l) => writeln!(out, "      (redundant {l})")?,
            Step::SymbolsAdded(_) | Step::NodeAdded(_) | Step::NodeRemoved(_) | Step::ChoiceRequested { .. } => {}
        }
    }
    if let Outcome::AwaitingChoice(p) = &r.outcome {
        write_pending(p, out)?;
    }
    Ok(())
}

fn write_pending(p: &PendingChoice, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "contradiction at {}; choose culprits to retract:", p.contradiction)?;
    for c in &p.culprits {
        writeln!(out, "  {:>4}  {}  ({})", c.index, c.formula, c.entrenchment)?;
    }
    Ok(())
}
