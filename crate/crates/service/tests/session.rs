use std::collections::BTreeSet;
use std::io::Cursor;
use std::process::Command;

use drs_core::controller::Connective;
use drs_service::{repl, FileStep, Mode, Session, SessionError, SessionFile};

fn run_script(s: &mut Session, script: &str) -> String {
    let mut out = Vec::new();
    repl::run(s, Cursor::new(script), &mut out).unwrap();
    String::from_utf8(out).unwrap()
}

#[test]
fn only_successful_operations_are_logged() {
    let mut s = Session::new(Mode::Dma, false);
    s.submit("forall x. (A(x) -> B(x))").unwrap();
    assert!(s.submit("A(").is_err());
    assert!(s.submit("forall x. (A(x) -> B(x))").is_err());
    s.set_auto(true);
    s.submit("A(a)").unwrap();
    let file = s.to_file();
    assert_eq!(
        file.steps,
        [FileStep::Input("forall x. (A(x) -> B(x))".into()), FileStep::Auto(true), FileStep::Input("A(a)".into()),]
    );
    assert!(!file.auto_choose, "the file keeps the initial setting");
    let json: serde_json::Value = serde_json::from_str(&file.to_json()).unwrap();
    assert_eq!(json["steps"][1], serde_json::json!({"auto": true}));
    assert_eq!(json["mode"], "dma");
}

#[test]
fn file_errors() {
    assert!(matches!(SessionFile::from_json("{"), Err(SessionError::Malformed(_))));
    assert_eq!(SessionFile::from_json("{").unwrap_err().code(), "SyntaxError");
    assert!(matches!(
        SessionFile::from_json(r#"{"version": 7, "mode": "whatever"}"#),
        Err(SessionError::VersionMismatch { found: 7 })
    ));
    assert!(matches!(SessionFile::from_json(r#"{"mode": "dma"}"#), Err(SessionError::Malformed(_))));
    let f = SessionFile::from_json(
        r#"{"version": 1, "mode": "mis", "steps": [{"input": "Bird^k(Tweety)"}, {"retract": 5}]}"#,
    )
    .unwrap();
    match Session::from_file(&f) {
        Err(SessionError::ReplayDivergence { step, message }) => {
            assert_eq!(step, 2);
            assert!(message.contains('5'), "{message}");
        }
        other => panic!("expected a divergence, got {other:?}"),
    }
}

#[test]
fn queries_resolve_names() {
    let mut s = Session::new(Mode::Mis, false);
    for t in ["forall x. (Bird^k(x) -> Fly^p(x))", "Bird^k(Tweety)", "Fly^k(Pilot)"] {
        s.submit(t).unwrap();
    }
    let names = |v: Vec<drs_core::logic::Const>| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    assert_eq!(names(s.query(&["Bird".into()], Connective::And).unwrap()), ["Tweety"]);
    assert_eq!(names(s.query(&["Fly^p".into()], Connective::And).unwrap()), ["Tweety"]);
    assert_eq!(names(s.query(&["Fly^k".into()], Connective::And).unwrap()), ["Pilot"]);
    assert_eq!(names(s.query(&["Fly^p".into(), "Fly^k".into()], Connective::Or).unwrap()), ["Pilot", "Tweety"]);
    assert!(matches!(s.query(&["Fly".into()], Connective::And), Err(SessionError::UnknownCategory(_))), "ambiguous");
    assert!(matches!(s.query(&["Fish".into()], Connective::And), Err(SessionError::UnknownCategory(_))));
    assert!(matches!(s.query(&["Bird^q".into()], Connective::And), Err(SessionError::UnknownCategory(_))));
}

#[test]
fn busy_sessions_refuse_everything_but_a_choice() {
    let mut s = drs_verify::load("nixon");
    assert_eq!(s.submit("Quaker^k(Dick)").unwrap_err().code(), "SessionBusy");
    assert_eq!(s.retract(1).unwrap_err().code(), "SessionBusy");
    assert!(s.submit("Quaker(").unwrap_err().code() == "SessionBusy", "busy is reported before parsing");
    s.choose(&BTreeSet::from([1])).unwrap();
    assert!(s.pending().is_none());
    s.submit("Quaker^k(Dick)").unwrap();
}

#[test]
fn repl_script() {
    let dir = std::env::temp_dir().join(format!("drs-repl-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("nixon.json");
    let mut s = Session::new(Mode::Mis, false);
    let script = format!(
        "help\n\
         forall x. (Quaker^k(x) -> Pacifist^p(x))\n\
         input forall x. (Republican^k(x) -> ~Pacifist^p(x))\n\
         Quaker^k(Nixon)\n\
         Republican^k(Nixon)\n\
         choices\n\
         Quaker^k(Dick)\n\
         choose 2\n\
         query Quaker,Republican and\n\
         graph\n\
         beliefs --all\n\
         save {p}\n\
         load {p}\n\
         query Pacifist\n\
         quit\n\
         beliefs\n",
        p = path.display()
    );
    let out = run_script(&mut s, &script);
    assert!(out.starts_with("mis session"));
    assert!(out.contains("   7  false  {ContradictionDetection, [6, 4]}"), "{out}");
    assert!(out.contains("contradiction at 7; choose culprits to retract:"));
    assert!(out.contains("error SessionBusy"));
    assert!(out.contains("revised: chose [2], retracted [2, 6, 7]"));
    assert!(out.contains("{Nixon}"));
    assert!(out.contains("object-kind (Nixon, Republican^k)"));
    assert!(out.contains("   6  ~Pacifist^p#2(Nixon)  {AristotelianSyllogism, [5, 2]} disbel"));
    assert!(out.contains("loaded"));
    assert_eq!(out.matches("beliefs [--all]").count(), 1, "help printed once");
    let reloaded =
        Session::from_file(&SessionFile::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap()).unwrap();
    assert_eq!(reloaded.to_file(), s.to_file());
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn replay_command() {
    let fixture = drs_verify::fixture_path("taxonomy");
    let out = Command::new(env!("CARGO_BIN_EXE_drs")).arg("replay").arg(&fixture).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 19);
    assert!(text.contains("  10  TL(Doc1)  {AristotelianSyllogism, [9, 1]} bel"));
    let dot = Command::new(env!("CARGO_BIN_EXE_drs")).args(["replay", "--dot"]).arg(&fixture).output().unwrap();
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("digraph"));
    let missing = Command::new(env!("CARGO_BIN_EXE_drs")).args(["replay", "/nonexistent.json"]).output().unwrap();
    assert!(!missing.status.success());
}
