//! HTTP front end for exploration sessions.
//!
//! | method | path | body | reply |
//! |---|---|---|---|
//! | POST | `/sessions` | `{domain, mode, hidden_base?, a_max?, max_rows?}` | `{id}` |
//! | GET | `/sessions/{id}/next` | | `{query, stats, oracle_answer?}` or `{exhausted: true, stats}` |
//! | POST | `/sessions/{id}/answer` | `{premise, item, accept}` | `{stats}` |
//! | GET | `/sessions/{id}/state` | | full snapshot |
//! | POST | `/sessions/{id}/whatif` | `{premise, item}` | `{states_if_accept}` |
//! | DELETE | `/sessions/{id}` | | `{finished: true, stats}` |
//!
//! Counts travel as decimal strings. Errors reply `{error}` with 404 for an
//! unknown session, 409 for a stale query or finished session and 422 for a
//! malformed body.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use learnspace::base::BaseFamily;
use learnspace::explore::{ExplorationSession, Query, SessionMode, SessionStats, SessionStatus};
use learnspace::{Dimplication, Domain, Error, ItemSet};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

type Shared = Arc<Mutex<ExplorationSession>>;

/// Registry of live sessions, optionally mirrored to snapshot files.
#[derive(Default)]
pub struct AppState {
    sessions: Mutex<HashMap<String, Shared>>,
    state_dir: Option<PathBuf>,
}

impl AppState {
    /// Loads every `<id>.session` snapshot in `state_dir`.
    pub fn load(state_dir: Option<PathBuf>) -> io::Result<Self> {
        let mut sessions = HashMap::new();
        if let Some(dir) = &state_dir {
            fs::create_dir_all(dir)?;
            for entry in fs::read_dir(dir)? {
                let path = entry?.path();
                if path.extension().and_then(|e| e.to_str()) != Some("session") {
                    continue;
                }
                let id = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or_default()
                    .to_string();
                let s = ExplorationSession::from_snapshot(&fs::read_to_string(&path)?)
                    .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
                sessions.insert(id, Arc::new(Mutex::new(s)));
            }
        }
        Ok(AppState {
            sessions: Mutex::new(sessions),
            state_dir,
        })
    }

    fn get(&self, id: &str) -> Result<Shared, ApiError> {
        self.sessions
            .lock()
            .expect("registry lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown session `{id}`")))
    }

    fn persist(&self, id: &str, s: &ExplorationSession) -> Result<(), ApiError> {
        if let Some(dir) = &self.state_dir {
            fs::write(dir.join(format!("{id}.session")), s.to_snapshot())
                .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn unprocessable(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::StaleQuery(_) | Error::SessionFinished => StatusCode::CONFLICT,
            Error::Resource(_) => StatusCode::SERVICE_UNAVAILABLE,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

/// Any JSON problem, syntax or shape, is a 422.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::unprocessable(format!("malformed body: {e}")))
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum WireMode {
    Oracle,
    Human,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    domain: Vec<String>,
    mode: WireMode,
    #[serde(default)]
    hidden_base: Option<Vec<Vec<String>>>,
    #[serde(default)]
    a_max: Option<usize>,
    #[serde(default)]
    max_rows: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryBody {
    premise: Vec<String>,
    item: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerBody {
    premise: Vec<String>,
    item: String,
    accept: bool,
}

#[derive(Serialize)]
struct WireStats {
    states: String,
    rows: usize,
    base: usize,
    accepted: usize,
    rejected: usize,
}

impl From<SessionStats> for WireStats {
    fn from(s: SessionStats) -> Self {
        WireStats {
            states: s.states.to_string(),
            rows: s.rows,
            base: s.base,
            accepted: s.accepted,
            rejected: s.rejected,
        }
    }
}

fn labels(dom: &Domain, set: &ItemSet) -> Vec<String> {
    dom.set_labels(set).into_iter().map(String::from).collect()
}

fn wire_query(dom: &Domain, q: &Query) -> Value {
    json!({
        "premise": labels(dom, &q.premise),
        "item": dom.label(q.item),
        "text": crate::cli::phrase(dom, q),
    })
}

fn wire_dimp(dom: &Domain, d: &Dimplication) -> Value {
    json!({ "premise": labels(dom, d.premise()), "conclusion": labels(dom, d.conclusion()) })
}

fn parse_query(dom: &Domain, premise: &[String], item: &str) -> Result<Query, ApiError> {
    Ok(Query::new(dom.set(premise)?, dom.index_of(item)?)?)
}

/// Runs `f` on the session off the async executor; one writer at a time.
async fn with_session<T, F>(state: &Arc<AppState>, id: &str, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&mut ExplorationSession) -> Result<T, ApiError> + Send + 'static,
{
    let shared = state.get(id)?;
    tokio::task::spawn_blocking(move || {
        let mut s = shared.lock().expect("session lock");
        f(&mut s)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

async fn create(State(state): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: CreateRequest = parse_body(&body)?;
    let dom = Domain::new(&req.domain)?;
    let mode = match (req.mode, req.hidden_base) {
        (WireMode::Oracle, Some(sets)) => {
            let sets = sets.iter().map(|s| dom.set(s)).collect::<Result<Vec<_>, _>>()?;
            SessionMode::Oracle(BaseFamily::new(dom.clone(), sets)?)
        }
        (WireMode::Oracle, None) => return Err(ApiError::unprocessable("oracle mode needs `hidden_base`")),
        (WireMode::Human, None) => SessionMode::Human,
        (WireMode::Human, Some(_)) => return Err(ApiError::unprocessable("human mode takes no `hidden_base`")),
    };
    let a_max = req.a_max;
    let max_rows = req.max_rows;
    let session = tokio::task::spawn_blocking(move || {
        ExplorationSession::new(dom, mode, a_max).map(|s| s.with_max_rows(max_rows))
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    let id = uuid::Uuid::new_v4().simple().to_string();
    state.persist(&id, &session)?;
    state
        .sessions
        .lock()
        .expect("registry lock")
        .insert(id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))).into_response())
}

async fn next(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let st = state.clone();
    let sid = id.clone();
    let reply = with_session(&state, &id, move |s| {
        let query = match s.next_query() {
            Ok(q) => q,
            Err(Error::SessionFinished) => None,
            Err(e) => return Err(e.into()),
        };
        let stats = WireStats::from(s.stats());
        st.persist(&sid, s)?;
        Ok(match query {
            Some(q) => {
                let mut v = json!({ "query": wire_query(s.domain(), &q), "stats": stats });
                if let Some(answer) = s.oracle_answer(&q) {
                    v["oracle_answer"] = json!(answer);
                }
                v
            }
            None => json!({ "exhausted": true, "stats": stats }),
        })
    })
    .await?;
    Ok(Json(reply).into_response())
}

async fn answer(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let req: AnswerBody = parse_body(&body)?;
    let st = state.clone();
    let sid = id.clone();
    let stats = with_session(&state, &id, move |s| {
        let q = parse_query(s.domain(), &req.premise, &req.item)?;
        let stats = s.apply_answer(&q, req.accept)?;
        st.persist(&sid, s)?;
        Ok(WireStats::from(stats))
    })
    .await?;
    Ok(Json(json!({ "stats": stats })).into_response())
}

async fn what_if(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let req: QueryBody = parse_body(&body)?;
    let count = with_session(&state, &id, move |s| {
        let q = parse_query(s.domain(), &req.premise, &req.item)?;
        Ok(s.what_if(&q)?)
    })
    .await?;
    Ok(Json(json!({ "states_if_accept": count.to_string() })).into_response())
}

fn snapshot_json(id: &str, s: &ExplorationSession) -> Value {
    let dom = s.domain();
    let mode = match s.mode() {
        SessionMode::Oracle(_) => "oracle",
        SessionMode::Human => "human",
    };
    let status = match s.status() {
        SessionStatus::Running => "running",
        SessionStatus::Finished => "finished",
    };
    let rows: Vec<String> = s.rows().rows().iter().map(|r| r.to_tokens()).collect();
    let base: Vec<Vec<String>> = s.base().sets().iter().map(|p| labels(dom, p)).collect();
    let accepted: Vec<Value> = s.accepted().iter().map(|d| wire_dimp(dom, d)).collect();
    let rejected: Vec<Value> = s
        .rejected()
        .iter()
        .map(|q| json!({ "premise": labels(dom, &q.premise), "item": dom.label(q.item) }))
        .collect();
    json!({
        "id": id,
        "domain": dom.labels(),
        "mode": mode,
        "status": status,
        "a_max": s.a_max(),
        "rows": { "mode": s.rows().mode().token().to_string(), "rows": rows },
        "base": base,
        "accepted": accepted,
        "rejected": rejected,
        "pending": s.pending().map(|q| wire_query(dom, q)),
        "stats": WireStats::from(s.stats()),
        "snapshot": s.to_snapshot(),
    })
}

async fn snapshot(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let sid = id.clone();
    let v = with_session(&state, &id, move |s| Ok(snapshot_json(&sid, s))).await?;
    Ok(Json(v).into_response())
}

async fn finish(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let st = state.clone();
    let sid = id.clone();
    let stats = with_session(&state, &id, move |s| {
        s.finish();
        st.persist(&sid, s)?;
        Ok(WireStats::from(s.stats()))
    })
    .await?;
    state.sessions.lock().expect("registry lock").remove(&id);
    Ok(Json(json!({ "finished": true, "stats": stats })).into_response())
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", delete(finish))
        .route("/sessions/{id}/next", get(next))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/state", get(snapshot))
        .route("/sessions/{id}/whatif", post(what_if))
        .with_state(state)
}

/// Serves until interrupted.
pub async fn serve(addr: &str, state_dir: Option<PathBuf>) -> io::Result<()> {
    let state = Arc::new(AppState::load(state_dir)?);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
