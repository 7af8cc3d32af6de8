//! HTTP API. Every error body is an [`ErrorWire`].

use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use drs_core::controller::Connective;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::file::SessionFile;
use crate::session::{Mode, Session, SessionError};
use crate::wire::{report_json, BeliefWire, ErrorWire, GraphWire, PendingWire};

#[derive(Default)]
pub struct AppState {
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

type Shared = Arc<AppState>;

pub struct ApiError {
    status: StatusCode,
    body: ErrorWire,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, body: ErrorWire::new("SyntaxError", message) }
    }

    fn unknown_session(id: &str) -> Self {
        ApiError { status: StatusCode::NOT_FOUND, body: ErrorWire::new("UnknownSession", format!("no session {id:?}")) }
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let status = match e.code() {
            "SyntaxError" | "TypeSuffixRequired" | "ArityMismatch" | "VersionMismatch" => StatusCode::BAD_REQUEST,
            "SessionBusy" | "NotPending" => StatusCode::CONFLICT,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError { status, body: (&e).into() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router() -> Router {
    router_with(Arc::default())
}

pub fn router_with(state: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(summary).delete(remove))
        .route("/sessions/{id}/inputs", post(input))
        .route("/sessions/{id}/beliefs", get(beliefs))
        .route("/sessions/{id}/graph", get(graph))
        .route("/sessions/{id}/pending", get(pending))
        .route("/sessions/{id}/choice", post(choice))
        .route("/sessions/{id}/retractions", post(retract))
        .route("/sessions/{id}/auto", put(auto))
        .route("/sessions/{id}/query", get(query))
        .route("/sessions/{id}/file", get(export).put(import))
        .with_state(state)
}

/// Parses a JSON body ourselves so malformed requests get the usual error shape.
fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))
}

fn session(state: &AppState, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
    lock(&state.sessions).get(id).cloned().ok_or_else(|| ApiError::unknown_session(id))
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn summary_json(id: &str, s: &Session) -> Value {
    json!({
        "id": id,
        "mode": s.mode(),
        "auto": s.auto_choose(),
        "beliefs": s.beliefs().len(),
        "pending": s.pending().is_some(),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateBody {
    mode: Mode,
    #[serde(default)]
    auto: bool,
}

async fn create(State(state): State<Shared>, bytes: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: CreateBody = body(&bytes)?;
    let id = (state.next_id.fetch_add(1, Ordering::Relaxed) + 1).to_string();
    let s = Session::new(req.mode, req.auto);
    let out = summary_json(&id, &s);
    lock(&state.sessions).insert(id, Arc::new(Mutex::new(s)));
    Ok((StatusCode::CREATED, Json(out)))
}

async fn summary(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let s = session(&state, &id)?;
    let s = lock(&s);
    Ok(Json(summary_json(&id, &s)))
}

async fn remove(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    lock(&state.sessions).remove(&id).map(|_| StatusCode::NO_CONTENT).ok_or_else(|| ApiError::unknown_session(&id))
}

#[derive(Deserialize)]
struct InputBody {
    text: String,
}

async fn input(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Json<Value>> {
    let s = session(&state, &id)?;
    let req: InputBody = body(&bytes)?;
    let report = lock(&s).submit(&req.text)?;
    Ok(Json(report_json(&report)))
}

fn flag(params: &HashMap<String, String>, name: &str) -> ApiResult<bool> {
    match params.get(name).map(String::as_str) {
        None | Some("false") | Some("0") => Ok(false),
        Some("true") | Some("1") | Some("") => Ok(true),
        Some(other) => Err(ApiError::bad_request(format!("{name} must be true or false, not {other:?}"))),
    }
}

fn params(q: Result<Query<HashMap<String, String>>, QueryRejection>) -> ApiResult<HashMap<String, String>> {
    q.map(|Query(p)| p).map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn beliefs(
    State(state): State<Shared>,
    Path(id): Path<String>,
    q: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> ApiResult<Json<Vec<BeliefWire>>> {
    let s = session(&state, &id)?;
    let active_only = flag(&params(q)?, "active")?;
    let s = lock(&s);
    let out = s.beliefs().entries().iter().filter(|e| !active_only || e.is_active()).map(BeliefWire::from).collect();
    Ok(Json(out))
}

async fn graph(
    State(state): State<Shared>,
    Path(id): Path<String>,
    q: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> ApiResult<Response> {
    let s = session(&state, &id)?;
    let p = params(q)?;
    let s = lock(&s);
    match p.get("format").map(String::as_str) {
        None | Some("json") => Ok(Json(GraphWire::from(s.graph())).into_response()),
        Some("dot") => Ok(([(header::CONTENT_TYPE, "text/vnd.graphviz")], s.graph().to_dot()).into_response()),
        Some(other) => Err(ApiError::bad_request(format!("unknown graph format {other:?}"))),
    }
}

async fn pending(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<Option<PendingWire>>> {
    let s = session(&state, &id)?;
    let p = lock(&s).pending();
    Ok(Json(p.as_ref().map(PendingWire::from)))
}

#[derive(Deserialize)]
struct ChoiceBody {
    indexes: BTreeSet<u32>,
}

async fn choice(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Json<Value>> {
    let s = session(&state, &id)?;
    let req: ChoiceBody = body(&bytes)?;
    let report = lock(&s).choose(&req.indexes)?;
    Ok(Json(report_json(&report)))
}

#[derive(Deserialize)]
struct RetractBody {
    index: u32,
}

async fn retract(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Json<Value>> {
    let s = session(&state, &id)?;
    let req: RetractBody = body(&bytes)?;
    let report = lock(&s).retract(req.index)?;
    Ok(Json(report_json(&report)))
}

#[derive(Deserialize)]
struct AutoBody {
    auto: bool,
}

async fn auto(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Json<Value>> {
    let s = session(&state, &id)?;
    let req: AutoBody = body(&bytes)?;
    let mut s = lock(&s);
    s.set_auto(req.auto);
    Ok(Json(summary_json(&id, &s)))
}

async fn query(
    State(state): State<Shared>,
    Path(id): Path<String>,
    q: Result<Query<HashMap<String, String>>, QueryRejection>,
) -> ApiResult<Json<Value>> {
    let s = session(&state, &id)?;
    let p = params(q)?;
    let cats: Vec<String> = p
        .get("cats")
        .map(|c| c.split(',').map(str::trim).filter(|c| !c.is_empty()).map(String::from).collect())
        .unwrap_or_default();
    if cats.is_empty() {
        return Err(ApiError::bad_request("cats must name at least one category"));
    }
    let op = match p.get("op").map(|o| o.to_ascii_lowercase()) {
        None => Connective::And,
        Some(o) if o == "and" => Connective::And,
        Some(o) if o == "or" => Connective::Or,
        Some(o) => return Err(ApiError::bad_request(format!("op must be and or or, not {o:?}"))),
    };
    let members = lock(&s).query(&cats, op)?;
    Ok(Json(json!({ "members": members.iter().map(ToString::to_string).collect::<Vec<_>>() })))
}

async fn export(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<SessionFile>> {
    let s = session(&state, &id)?;
    let file = lock(&s).to_file();
    Ok(Json(file))
}

/// Replaces the session's state with the replay of the uploaded file.
async fn import(State(state): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<Json<Value>> {
    let s = session(&state, &id)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;
    let rebuilt = Session::from_file(&SessionFile::from_json(text)?)?;
    let mut s = lock(&s);
    *s = rebuilt;
    Ok(Json(summary_json(&id, &s)))
}

pub async fn serve(addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}
