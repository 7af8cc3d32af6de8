use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use drs_service::http::router;

const TAXONOMY: [&str; 12] = [
    "forall x. (S(x) -> TL(x))",
    "forall x. (E(x) -> TL(x))",
    "forall x. (H(x) -> TL(x))",
    "forall x. (CS(x) -> S(x))",
    "forall x. (CS(x) -> E(x))",
    "forall x. (P(x) -> H(x))",
    "forall x. (AI(x) -> CS(x))",
    "forall x. ~(E(x) & H(x))",
    "S(Doc1)",
    "E(Doc1)",
    "AI(Doc2)",
    "P(Doc3)",
];

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, text) = call_raw(app, method, uri, body.map(|b| b.to_string())).await;
    (status, serde_json::from_str(&text).unwrap_or(Value::String(text)))
}

async fn call_raw(app: &Router, method: Method, uri: &str, body: Option<String>) -> (StatusCode, String) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn session(app: &Router, mode: &str) -> String {
    let (status, body) = call(app, Method::POST, "/sessions", Some(json!({"mode": mode}))).await;
    assert_eq!(status, StatusCode::CREATED);
    body["id"].as_str().unwrap().to_string()
}

async fn input(app: &Router, id: &str, text: &str) -> (StatusCode, Value) {
    call(app, Method::POST, &format!("/sessions/{id}/inputs"), Some(json!({"text": text}))).await
}

async fn taxonomy(app: &Router) -> String {
    let id = session(app, "dma").await;
    for t in TAXONOMY {
        assert_eq!(input(app, &id, t).await.0, StatusCode::OK, "{t}");
    }
    id
}

#[tokio::test]
async fn inputs_report_their_steps() {
    let app = router();
    let id = session(&app, "dma").await;
    input(&app, &id, "forall x. (S(x) -> TL(x))").await;
    let (status, r) = input(&app, &id, "S(Doc1)").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(r["entered"], json!([2, 3]));
    assert_eq!(r["outcome"], "completed");
    assert_eq!(r["pending"], Value::Null);
    let derived = r["steps"].as_array().unwrap().iter().find(|s| s["type"] == "entered" && s["index"] == 3).unwrap();
    assert_eq!(derived["formula"], "TL(Doc1)");
    assert_eq!(derived["from"], json!({"kind": "derived", "rule": "AristotelianSyllogism", "premises": [2, 1]}));
    assert!(r["steps"]
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s["type"] == "link-added" && s["link"] == json!({"kind": "element", "from": "Doc1", "to": "S"})));
}

#[tokio::test]
async fn beliefs_carry_full_labels() {
    let app = router();
    let id = taxonomy(&app).await;
    let (status, b) = call(&app, Method::GET, &format!("/sessions/{id}/beliefs"), None).await;
    assert_eq!(status, StatusCode::OK);
    let b = b.as_array().unwrap();
    assert_eq!(b.len(), 19);
    assert_eq!(
        b[0],
        json!({
            "index": 1, "formula": "forall x. (S(x) -> TL(x))", "status": "bel",
            "from": {"kind": "external", "source": "hu"}, "to": [10, 15],
            "entrenchment": 0.5, "category": "aPosteriori",
        })
    );
    assert_eq!(b[9]["from"]["premises"], json!([9, 1]));
    assert_eq!(b[9]["category"], "synthetic");
}

#[tokio::test]
async fn conflict_waits_for_a_choice() {
    let app = router();
    let id = taxonomy(&app).await;
    let (status, r) = input(&app, &id, "CS(Doc3)").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(r["outcome"], "awaiting-choice");
    assert_eq!(r["pending"]["contradiction"], 23);
    let (_, p) = call(&app, Method::GET, &format!("/sessions/{id}/pending"), None).await;
    let culprits: Vec<u64> = p["culprits"].as_array().unwrap().iter().map(|c| c["index"].as_u64().unwrap()).collect();
    assert_eq!(culprits, [5, 6, 8, 17, 20]);
    assert_eq!(p["culprits"][4]["formula"], "CS(Doc3)");

    let (status, e) = input(&app, &id, "H(Doc1)").await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::CONFLICT, Some("SessionBusy")));
    let (status, e) = call(&app, Method::POST, &format!("/sessions/{id}/choice"), Some(json!({"indexes": [9]}))).await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("InvalidChoice")));

    let (status, r) = call(&app, Method::POST, &format!("/sessions/{id}/choice"), Some(json!({"indexes": [5]}))).await;
    assert_eq!(status, StatusCode::OK);
    let revised = r["steps"].as_array().unwrap().iter().find(|s| s["type"] == "revised").unwrap();
    assert_eq!(revised["retracted"], json!([5, 16, 22, 23]));
    assert!(r["steps"]
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s["type"] == "link-removed" && s["link"] == json!({"kind": "subclass", "from": "CS", "to": "E"})));
    let (_, p) = call(&app, Method::GET, &format!("/sessions/{id}/pending"), None).await;
    assert_eq!(p, Value::Null);
    let (status, e) = call(&app, Method::POST, &format!("/sessions/{id}/choice"), Some(json!({"indexes": [5]}))).await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::CONFLICT, Some("NotPending")));

    let (_, active) = call(&app, Method::GET, &format!("/sessions/{id}/beliefs?active=true"), None).await;
    let active: Vec<u64> = active.as_array().unwrap().iter().map(|b| b["index"].as_u64().unwrap()).collect();
    assert!(!active.contains(&5) && !active.contains(&23) && active.contains(&20));
}

#[tokio::test]
async fn automatic_sessions_never_wait() {
    let app = router();
    let (_, s) = call(&app, Method::POST, "/sessions", Some(json!({"mode": "mis", "auto": true}))).await;
    let id = s["id"].as_str().unwrap();
    assert_eq!(s["auto"], true);
    for t in
        ["forall x. (Quaker^k(x) -> Pacifist^p(x))", "forall x. (Republican^k(x) -> ~Pacifist^p(x))", "Quaker^k(Nixon)"]
    {
        input(&app, id, t).await;
    }
    let (_, r) = input(&app, id, "Republican^k(Nixon)").await;
    assert_eq!(r["outcome"], "completed");
    assert!(r["steps"].as_array().unwrap().iter().any(|s| s["type"] == "revised"));
    let (_, off) = call(&app, Method::PUT, &format!("/sessions/{id}/auto"), Some(json!({"auto": false}))).await;
    assert_eq!(off["auto"], false);
}

#[tokio::test]
async fn errors_are_uniform() {
    let app = router();
    let id = session(&app, "mis").await;
    let (status, e) = input(&app, &id, "Bird(Tweety)").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(e["code"], "TypeSuffixRequired");
    assert_eq!(e["span"], json!({"start": 0, "end": 4}));
    let (status, e) = input(&app, &id, "Bird^k(Tweety").await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::BAD_REQUEST, Some("SyntaxError")));
    let (status, e) = input(&app, &id, "CanFly^p(Tweety)").await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("MalformedInput")));
    input(&app, &id, "forall x. (Penguin^k(x) -> Bird^k(x))").await;
    let (status, e) = input(&app, &id, "forall x. (Bird^k(x) -> Penguin^k(x))").await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("WouldCreateLoop")));
    let (status, e) = input(&app, &id, "forall x. (Penguin^k(x) -> Bird^k(x))").await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("DuplicateActive")));

    let (status, e) = call_raw(&app, Method::POST, &format!("/sessions/{id}/inputs"), Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(e.contains("\"code\":\"SyntaxError\""));
    let (status, e) = call(&app, Method::POST, "/sessions", Some(json!({"mode": "fuzzy"}))).await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::BAD_REQUEST, Some("SyntaxError")));
    let (status, e) = call(&app, Method::GET, "/sessions/999/beliefs", None).await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::NOT_FOUND, Some("UnknownSession")));
    let (status, e) = call(&app, Method::GET, &format!("/sessions/{id}/graph?format=svg"), None).await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::BAD_REQUEST, Some("SyntaxError")));
}

#[tokio::test]
async fn graph_in_both_formats() {
    let app = router();
    let id = taxonomy(&app).await;
    let (status, g) = call(&app, Method::GET, &format!("/sessions/{id}/graph"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(g["nodes"].as_array().unwrap().len(), 10);
    assert_eq!(g["links"].as_array().unwrap().len(), 12);
    assert!(g["links"].as_array().unwrap().contains(&json!({"kind": "disjoint", "from": "E", "to": "H"})));
    assert!(g["nodes"].as_array().unwrap().contains(&json!({"id": "Doc2", "kind": "individual"})));
    let (status, dot) = call_raw(&app, Method::GET, &format!("/sessions/{id}/graph?format=dot"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("\"c:CS\" -> \"c:S\""));
}

#[tokio::test]
async fn category_queries() {
    let app = router();
    let id = taxonomy(&app).await;
    let q = |cats: &str, op: &str| format!("/sessions/{id}/query?cats={cats}&op={op}");
    let (_, r) = call(&app, Method::GET, &q("TL", "and"), None).await;
    assert_eq!(r["members"], json!(["Doc1", "Doc2", "Doc3"]));
    let (_, r) = call(&app, Method::GET, &q("S,E", "and"), None).await;
    assert_eq!(r["members"], json!(["Doc1", "Doc2"]));
    let (_, r) = call(&app, Method::GET, &q("AI,H", "or"), None).await;
    assert_eq!(r["members"], json!(["Doc2", "Doc3"]));
    let (status, e) = call(&app, Method::GET, &q("Nope", "and"), None).await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("UnknownCategory")));
    let (status, _) = call(&app, Method::GET, &q("TL", "xor"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let mis = session(&app, "mis").await;
    for t in ["forall x. (Bird^k(x) -> CanFly^p(x))", "Bird^k(Tweety)"] {
        input(&app, &mis, t).await;
    }
    let (_, r) = call(&app, Method::GET, &format!("/sessions/{mis}/query?cats=CanFly^p"), None).await;
    assert_eq!(r["members"], json!(["Tweety"]));
    let (_, r) = call(&app, Method::GET, &format!("/sessions/{mis}/query?cats=Bird"), None).await;
    assert_eq!(r["members"], json!(["Tweety"]));
}

#[tokio::test]
async fn retraction_endpoint() {
    let app = router();
    let id = taxonomy(&app).await;
    let (status, r) = call(&app, Method::POST, &format!("/sessions/{id}/retractions"), Some(json!({"index": 7}))).await;
    assert_eq!(status, StatusCode::OK);
    let done = r["steps"].as_array().unwrap().iter().find(|s| s["type"] == "retracted").unwrap();
    assert_eq!(done["retracted"], json!([7, 13, 14, 15, 16]));
    let (status, e) =
        call(&app, Method::POST, &format!("/sessions/{id}/retractions"), Some(json!({"index": 10}))).await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("NotAnAxiom")));
}

#[tokio::test]
async fn files_round_trip_through_the_api() {
    let app = router();
    let id = taxonomy(&app).await;
    input(&app, &id, "CS(Doc3)").await;
    call(&app, Method::POST, &format!("/sessions/{id}/choice"), Some(json!({"indexes": [20]}))).await;
    let (status, file) = call(&app, Method::GET, &format!("/sessions/{id}/file"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(file["version"], 1);
    assert_eq!(file["steps"].as_array().unwrap().last().unwrap(), &json!({"choose": [20]}));

    let other = session(&app, "dma").await;
    let (status, s) = call(&app, Method::PUT, &format!("/sessions/{other}/file"), Some(file.clone())).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s["beliefs"], 23);
    let (_, a) = call(&app, Method::GET, &format!("/sessions/{id}/beliefs"), None).await;
    let (_, b) = call(&app, Method::GET, &format!("/sessions/{other}/beliefs"), None).await;
    assert_eq!(a, b);

    let mut future = file.clone();
    future["version"] = json!(2);
    let (status, e) = call(&app, Method::PUT, &format!("/sessions/{other}/file"), Some(future)).await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::BAD_REQUEST, Some("VersionMismatch")));
    let mut broken = file;
    broken["steps"].as_array_mut().unwrap().insert(0, json!({"choose": [1]}));
    let (status, e) = call(&app, Method::PUT, &format!("/sessions/{other}/file"), Some(broken)).await;
    assert_eq!((status, e["code"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("ReplayDivergence")));
    let (_, still) = call(&app, Method::GET, &format!("/sessions/{other}/beliefs"), None).await;
    assert_eq!(still, a, "a failed import leaves the session alone");
}

#[tokio::test]
async fn sessions_can_be_inspected_and_deleted() {
    let app = router();
    let id = session(&app, "dma").await;
    let (status, s) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(s, json!({"id": id, "mode": "dma", "auto": false, "beliefs": 0, "pending": false}));
    let (status, _) = call_raw(&app, Method::DELETE, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NO_CONTENT);
    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
