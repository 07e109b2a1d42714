use std::sync::{Arc, OnceLock};
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use sprouts_core::solver::{Expander, Node};
use sprouts_core::store::{build_basis, BasisDb};
use sprouts_core::{parse, Budget};
use sprouts_explorer::{router, AppState};

fn basis() -> Arc<BasisDb> {
    static BASIS: OnceLock<Arc<BasisDb>> = OnceLock::new();
    BASIS.get_or_init(|| Arc::new(build_basis(5, Budget::unlimited()).unwrap())).clone()
}

fn app() -> Router {
    router(AppState::new(basis()))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = match body {
        Some(b) => req.body(Body::from(b.to_string())).unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn json_call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (s, b) = call(app, method, uri, body).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

fn encode(key: &str) -> String {
    key.bytes()
        .map(|b| if b.is_ascii_alphanumeric() || b == b'-' || b == b'.' { (b as char).to_string() } else { format!("%{b:02X}") })
        .collect()
}

async fn wait_done(app: &Router, id: &str) -> Value {
    for _ in 0..600 {
        let (_, p) = json_call(app, "GET", &format!("/sessions/{id}/progress"), None).await;
        if p["running"] == false {
            return p;
        }
        tokio::time::sleep(Duration::from_millis(50)).await;
    }
    panic!("search did not finish");
}

#[tokio::test]
async fn auto_solve_two_spots() {
    let app = app();
    let (s, created) = json_call(&app, "POST", "/sessions", Some(json!({ "spots": 2 }))).await;
    assert_eq!(s, StatusCode::CREATED);
    let id = created["id"].as_str().unwrap().to_string();
    let root = &created["node"];
    for field in ["key", "lands", "parity", "rcts", "status", "children", "lives", "landCount"] {
        assert!(root.get(field).is_some(), "{field}");
    }
    let (s, _) = json_call(&app, "POST", &format!("/sessions/{id}/auto"), Some(json!({ "budgetNodes": 10000 }))).await;
    assert_eq!(s, StatusCode::ACCEPTED);
    let p = wait_done(&app, &id).await;
    assert_eq!(p["status"], "L");
    assert!(p["nodesExplored"].as_u64().unwrap() >= 1);
    assert!(p["memoSize"].as_u64().unwrap() >= 1);
    let (_, view) = json_call(&app, "GET", &format!("/sessions/{id}/node"), None).await;
    assert_eq!(view["status"], "L");
}

#[tokio::test]
async fn proof_download_verifies() {
    let app = app();
    let (_, created) = json_call(&app, "POST", "/sessions", Some(json!({ "spots": 4 }))).await;
    let id = created["id"].as_str().unwrap().to_string();
    json_call(&app, "POST", &format!("/sessions/{id}/auto"), None).await;
    wait_done(&app, &id).await;
    let (s, text) = call(&app, "GET", &format!("/sessions/{id}/proof"), None).await;
    assert_eq!(s, StatusCode::OK);
    let db = sprouts_core::solver::ProofDb::from_text(std::str::from_utf8(&text).unwrap()).unwrap();
    db.verify(&mut Expander::new(basis())).unwrap();
}

#[tokio::test]
async fn descend_the_twelve_spot_line() {
    let app = app();
    let (_, created) = json_call(&app, "POST", "/sessions", Some(json!({ "spots": 12 }))).await;
    let id = created["id"].as_str().unwrap().to_string();
    let first = Node::from_position(&parse("0.0.0.0.0.0.0.0.AB.}0.0.0.AB.}]!").unwrap(), &basis()).key();
    let (s, view) = json_call(&app, "POST", &format!("/sessions/{id}/descend"), Some(json!({ "childKey": first }))).await;
    assert_eq!(s, StatusCode::OK, "{view}");
    let second = "0.0.0.0.0.0.0.0.}]|1|3-1-L";
    assert!(view["children"].as_array().unwrap().iter().any(|c| c["key"] == second));
    let (s, view) = json_call(&app, "POST", &format!("/sessions/{id}/descend"), Some(json!({ "childKey": second }))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(view["key"], second);
    assert_eq!(view["parity"], 1);
    assert_eq!(view["landCount"], 1);
    let (_, back) = json_call(&app, "POST", &format!("/sessions/{id}/back"), None).await;
    assert_eq!(back["key"], first);
}

#[tokio::test]
async fn errors_leave_state_unchanged() {
    let app = app();
    let (_, created) = json_call(&app, "POST", "/sessions", Some(json!({ "spots": 3 }))).await;
    let id = created["id"].as_str().unwrap().to_string();
    let root = created["node"]["key"].clone();
    let (s, e) = json_call(&app, "POST", &format!("/sessions/{id}/descend"), Some(json!({ "childKey": "|1|" }))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(e["error"], "not_a_child");
    let (_, view) = json_call(&app, "GET", &format!("/sessions/{id}/node"), None).await;
    assert_eq!(view["key"], root);
    let (s, _) = json_call(&app, "POST", &format!("/sessions/{id}/back"), None).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, e) = json_call(&app, "GET", "/sessions/999/node", None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(e["error"], "unknown_session");
    let (s, _) = json_call(&app, "GET", &format!("/sessions/{id}/node?key={}", encode("nonsense")), None).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = json_call(&app, "POST", "/sessions", Some(json!({ "position": "0.0.}}!" }))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let (s, _) = json_call(&app, "GET", &format!("/sessions/{id}/proof"), None).await;
    assert_eq!(s, StatusCode::CONFLICT);
}

#[tokio::test]
async fn one_search_at_a_time_and_cancel() {
    let app = app();
    let (_, created) = json_call(&app, "POST", "/sessions", Some(json!({ "spots": 9 }))).await;
    let id = created["id"].as_str().unwrap().to_string();
    let (s, _) = json_call(&app, "POST", &format!("/sessions/{id}/auto"), Some(json!({ "budgetSecs": 60.0 }))).await;
    assert_eq!(s, StatusCode::ACCEPTED);
    let (s, e) = json_call(&app, "POST", &format!("/sessions/{id}/auto"), None).await;
    if s == StatusCode::CONFLICT {
        assert_eq!(e["error"], "already_running");
    }
    let (s, c) = json_call(&app, "POST", &format!("/sessions/{id}/cancel"), None).await;
    assert_eq!(s, StatusCode::OK);
    if c["cancelled"] == true {
        assert_eq!(c["status"], "Unknown");
    }
    let p = wait_done(&app, &id).await;
    assert_eq!(p["running"], false);
    let (_, view) = json_call(&app, "GET", &format!("/sessions/{id}/node?key={}", encode(created["node"]["key"].as_str().unwrap())), None).await;
    assert_ne!(view["status"], "Running");
}
