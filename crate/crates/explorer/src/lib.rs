//! JSON-over-HTTP service for steering a misère Sprouts search by hand.
//!
//! A session holds a focus stack of nodes from the root, a solver whose memo
//! collects every resolved node, and at most one background search.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::JoinHandle;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;

use sprouts_core::position::start_position;
use sprouts_core::solver::{Expander, Node, Solver, Stats, Status};
use sprouts_core::store::BasisDb;
use sprouts_core::{parse, Budget};

#[derive(Clone)]
pub struct AppState {
    basis: Arc<BasisDb>,
    sessions: Arc<Mutex<HashMap<String, Arc<Mutex<Session>>>>>,
    next_id: Arc<AtomicU64>,
}

impl AppState {
    pub fn new(basis: Arc<BasisDb>) -> AppState {
        AppState { basis, sessions: Arc::default(), next_id: Arc::new(AtomicU64::new(1)) }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        lock(&self.sessions).get(id).cloned().ok_or_else(|| ApiError::not_found("unknown_session", format!("no session {id}")))
    }
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

struct Run {
    target: String,
    cancel: Arc<AtomicBool>,
    stats: Arc<Stats>,
    handle: JoinHandle<(Solver, Status)>,
}

struct Session {
    root: Node,
    stack: Vec<Node>,
    expander: Expander,
    solver: Option<Solver>,
    run: Option<Run>,
    last: Option<(String, Status)>,
    stats: Arc<Stats>,
}

impl Session {
    /// Takes back the solver if the background search has finished.
    fn reap(&mut self) {
        if self.run.as_ref().is_some_and(|r| r.handle.is_finished()) {
            let run = self.run.take().expect("checked above");
            let (solver, status) = run.handle.join().expect("search thread panicked");
            self.stats = solver.stats();
            self.solver = Some(solver);
            self.last = Some((run.target, status));
        }
    }

    fn status(&self, key: &str) -> &'static str {
        if let Some(run) = &self.run {
            if run.target == key {
                return "Running";
            }
        }
        match self.solver.as_ref().map(|s| s.status(key)) {
            Some(Status::Win) => "W",
            Some(Status::Loss) => "L",
            _ => "Unknown",
        }
    }

    fn focus(&self) -> &Node {
        self.stack.last().expect("stack holds the root")
    }

    fn summary(&self, node: &Node) -> NodeSummary {
        let key = node.key();
        NodeSummary {
            status: self.status(&key),
            lands: node.lands().to_vec(),
            parity: node.parity(),
            rcts: node.rcts().iter().map(|t| t.to_string()).collect(),
            lives: node.lives(),
            land_count: node.lands().len(),
            key,
        }
    }

    fn view(&mut self, node: &Node) -> NodeView {
        let children = self.expander.children(node);
        NodeView { node: self.summary(node), children: children.iter().map(|c| self.summary(c)).collect() }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NodeSummary {
    pub key: String,
    pub lands: Vec<String>,
    pub parity: u8,
    pub rcts: Vec<String>,
    pub status: &'static str,
    pub lives: u32,
    pub land_count: usize,
}

#[derive(Serialize)]
pub struct NodeView {
    #[serde(flatten)]
    pub node: NodeSummary,
    pub children: Vec<NodeSummary>,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> ApiError {
        ApiError { status, kind, message: message.into() }
    }

    fn not_found(kind: &'static str, message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, kind, message)
    }

    fn bad_request(kind: &'static str, message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, kind, message)
    }

    fn conflict(kind: &'static str, message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::CONFLICT, kind, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.kind, "message": self.message }))).into_response()
    }
}

#[derive(Deserialize)]
struct CreateRequest {
    spots: Option<usize>,
    position: Option<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct DescendRequest {
    child_key: String,
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "camelCase")]
struct AutoRequest {
    node_key: Option<String>,
    budget_nodes: Option<u64>,
    budget_secs: Option<f64>,
}

#[derive(Deserialize)]
struct KeyQuery {
    key: Option<String>,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/:id/node", get(node))
        .route("/sessions/:id/descend", post(descend))
        .route("/sessions/:id/back", post(back))
        .route("/sessions/:id/auto", post(auto))
        .route("/sessions/:id/progress", get(progress))
        .route("/sessions/:id/cancel", post(cancel))
        .route("/sessions/:id/proof", get(proof))
        .with_state(state)
}

/// Serves until the process ends.
pub fn serve(port: u16, basis: Arc<BasisDb>) -> std::io::Result<()> {
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async move {
        let addr = SocketAddr::from(([127, 0, 0, 1], port));
        let listener = tokio::net::TcpListener::bind(addr).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(AppState::new(basis))).await
    })
}

async fn create(State(state): State<AppState>, Json(req): Json<CreateRequest>) -> Result<impl IntoResponse, ApiError> {
    let pos = match (req.spots, req.position) {
        (Some(p), None) => start_position(p).map_err(|e| ApiError::bad_request("bad_spots", e.to_string()))?,
        (None, Some(s)) => parse(&s).map_err(|e| ApiError::bad_request("bad_position", e.to_string()))?,
        _ => return Err(ApiError::bad_request("bad_request", "give exactly one of spots, position")),
    };
    let root = Node::from_position(&pos, &state.basis);
    let solver = Solver::new(state.basis.clone());
    let mut session = Session {
        stack: vec![root.clone()],
        root,
        expander: Expander::new(state.basis.clone()),
        stats: solver.stats(),
        solver: Some(solver),
        run: None,
        last: None,
    };
    let id = state.next_id.fetch_add(1, Ordering::Relaxed).to_string();
    let root = session.root.clone();
    let view = session.view(&root);
    lock(&state.sessions).insert(id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "node": view }))))
}

/// A node key from a client: well formed and already simplified.
fn node_from_key(key: &str, basis: &BasisDb) -> Result<Node, ApiError> {
    let bad = || ApiError::bad_request("bad_key", format!("malformed node key {key}"));
    let node = Node::from_key(key).map_err(|_| bad())?;
    if node.rcts().iter().any(|&t| !basis.store().contains(t)) {
        return Err(ApiError::not_found("unknown_key", format!("tree ids of {key} are not in the basis")));
    }
    let again = Node::simplify(node.lands().to_vec(), node.parity(), node.rcts().to_vec(), basis);
    if again.key() != key {
        return Err(bad());
    }
    Ok(node)
}

async fn node(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<KeyQuery>,
) -> Result<Json<NodeView>, ApiError> {
    let session = state.session(&id)?;
    let mut s = lock(&session);
    s.reap();
    let node = match q.key {
        Some(k) => node_from_key(&k, &state.basis)?,
        None => s.focus().clone(),
    };
    Ok(Json(s.view(&node)))
}

async fn descend(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<DescendRequest>,
) -> Result<Json<NodeView>, ApiError> {
    let session = state.session(&id)?;
    let mut s = lock(&session);
    s.reap();
    let focus = s.focus().clone();
    let child = s
        .expander
        .children(&focus)
        .into_iter()
        .find(|c| c.key() == req.child_key)
        .ok_or_else(|| ApiError::bad_request("not_a_child", format!("{} is not a child of {}", req.child_key, focus.key())))?;
    s.stack.push(child.clone());
    Ok(Json(s.view(&child)))
}

async fn back(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<NodeView>, ApiError> {
    let session = state.session(&id)?;
    let mut s = lock(&session);
    s.reap();
    if s.stack.len() == 1 {
        return Err(ApiError::conflict("at_root", "the focus is already the root"));
    }
    s.stack.pop();
    let focus = s.focus().clone();
    Ok(Json(s.view(&focus)))
}

async fn auto(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Option<Json<AutoRequest>>,
) -> Result<impl IntoResponse, ApiError> {
    let req = body.map(|Json(b)| b).unwrap_or_default();
    let session = state.session(&id)?;
    let mut s = lock(&session);
    s.reap();
    if s.run.is_some() {
        return Err(ApiError::conflict("already_running", "a search is already running in this session"));
    }
    let target = match req.node_key {
        Some(k) => node_from_key(&k, &state.basis)?,
        None => s.focus().clone(),
    };
    let cancel = Arc::new(AtomicBool::new(false));
    let mut budget = Budget::unlimited().with_cancel(cancel.clone());
    budget.max_nodes = req.budget_nodes;
    if let Some(secs) = req.budget_secs {
        budget = budget.with_secs(secs);
    }
    let mut solver = s.solver.take().expect("no search running");
    let stats = solver.stats();
    let key = target.key();
    let handle = std::thread::spawn(move || {
        let status = solver.solve(&target, &budget);
        (solver, status)
    });
    s.stats = stats.clone();
    s.run = Some(Run { target: key.clone(), cancel, stats, handle });
    Ok((StatusCode::ACCEPTED, Json(json!({ "key": key, "status": "Running" }))))
}

async fn progress(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<serde_json::Value>, ApiError> {
    let session = state.session(&id)?;
    let mut s = lock(&session);
    s.reap();
    let (running, key, status) = match (&s.run, &s.last) {
        (Some(r), _) => (true, Some(r.target.clone()), "Running"),
        (None, Some((k, st))) => (false, Some(k.clone()), status_name(*st)),
        (None, None) => (false, None, "Unknown"),
    };
    let stats = s.run.as_ref().map(|r| r.stats.clone()).unwrap_or_else(|| s.stats.clone());
    Ok(Json(json!({
        "running": running,
        "key": key,
        "status": status,
        "nodesExplored": stats.explored(),
        "memoSize": stats.memo_size(),
    })))
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Win => "W",
        Status::Loss => "L",
        Status::Unknown => "Unknown",
    }
}

async fn cancel(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<serde_json::Value>, ApiError> {
    let session = state.session(&id)?;
    let run = {
        let mut s = lock(&session);
        s.reap();
        s.run.take()
    };
    let Some(run) = run else {
        return Ok(Json(json!({ "cancelled": false })));
    };
    run.cancel.store(true, Ordering::Relaxed);
    let (solver, status) = tokio::task::spawn_blocking(move || run.handle.join().expect("search thread panicked"))
        .await
        .expect("join task");
    let mut s = lock(&session);
    s.stats = solver.stats();
    s.solver = Some(solver);
    s.last = Some((run.target, status));
    Ok(Json(json!({ "cancelled": true, "status": status_name(status) })))
}

async fn proof(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<KeyQuery>,
) -> Result<Response, ApiError> {
    let session = state.session(&id)?;
    let mut guard = lock(&session);
    guard.reap();
    let s = &mut *guard;
    let node = match q.key {
        Some(k) => node_from_key(&k, &state.basis)?,
        None => s.root.clone(),
    };
    let Some(solver) = s.solver.as_ref() else {
        return Err(ApiError::conflict("running", "wait for the running search to finish"));
    };
    if solver.status(&node.key()) == Status::Unknown {
        return Err(ApiError::conflict("unresolved", format!("{} is not resolved", node.key())));
    }
    let full = solver.proof(&node);
    let pruned = full
        .prune(&mut s.expander)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "proof", e.to_string()))?;
    Ok(([(header::CONTENT_TYPE, "text/plain; charset=utf-8")], pruned.to_text()).into_response())
}
