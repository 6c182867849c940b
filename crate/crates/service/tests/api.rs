use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use evc_core::Coord;
use evc_service::store::replay;
use evc_service::{router, CreateSession, SessionView, Store};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or(Body::empty(), |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn create(app: &Router, kind: &str, h: usize, w: usize, topology: &str, strategy: &str) -> (StatusCode, Value) {
    call(app, "POST", "/sessions", Some(json!({"kind": kind, "h": h, "w": w, "topology": topology, "strategy": strategy}))).await
}

fn app() -> Router {
    router(Arc::new(Store::ephemeral()))
}

#[tokio::test]
async fn create_examples() {
    let app = app();
    let (status, v) = create(&app, "oct8", 3, 4, "finite-rect", "oct-shift").await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["guards"], 10);
    assert_eq!(v["history"], json!([]));
    assert_eq!(v["version"], 0);

    let (_, v) = create(&app, "hex3", 4, 4, "finite-rect", "hex-case").await;
    assert_eq!(2 * v["guards"].as_u64().unwrap(), v["graph"]["vertices"].as_array().unwrap().len() as u64);

    let (_, v) = create(&app, "square4", 2, 2, "finite-rect", "ham-cycle").await;
    assert_eq!(v["config"], json!([[0, 0], [1, 1]]));
    assert_eq!(v["graph"]["topology"], "finite-rect");
}

#[tokio::test]
async fn create_rejects_bad_parameters() {
    let app = app();
    let (status, v) = create(&app, "square4", 3, 3, "finite-rect", "ham-cycle").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "NotApplicable");
    let (status, v) = create(&app, "square4", 1, 1, "finite-rect", "ham-cycle").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "DegenerateParameters");
}

#[tokio::test]
async fn ids_are_url_safe_128_bit() {
    let app = app();
    let (_, a) = create(&app, "oct8", 2, 2, "finite-rect", "oct-shift").await;
    let (_, b) = create(&app, "oct8", 2, 2, "finite-rect", "oct-shift").await;
    let id = a["id"].as_str().unwrap();
    assert_eq!(id.len(), 22);
    assert!(id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_'));
    assert_ne!(a["id"], b["id"]);
}

#[tokio::test]
async fn play_a_round() {
    let app = app();
    let (_, v) = create(&app, "oct8", 3, 4, "finite-rect", "oct-shift").await;
    let id = v["id"].as_str().unwrap();
    let (status, list) = call(&app, "GET", &format!("/sessions/{id}/attacks"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(list["version"], 0);
    let first = list["attacks"][0].clone();

    let (status, ev) = call(&app, "POST", &format!("/sessions/{id}/attack"), Some(json!({"edge": first, "version": 0}))).await;
    assert_eq!(status, StatusCode::OK, "{ev}");
    assert_eq!(ev["version"], 1);
    assert_eq!(ev["record"]["attack"], first);

    let (_, view) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    let view: SessionView = serde_json::from_value(view).unwrap();
    assert_eq!(view.history.len(), 1);
    assert_eq!(view.config, view.history[0].config_after);
    assert_eq!(view.guards, 10);
}

#[tokio::test]
async fn attack_orientation_does_not_matter() {
    let app = app();
    let (_, v) = create(&app, "square4", 2, 2, "finite-rect", "ham-cycle").await;
    let id = v["id"].as_str().unwrap();
    let (status, ev) = call(&app, "POST", &format!("/sessions/{id}/attack"), Some(json!({"edge": [[1, 0], [0, 0]]}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ev["record"]["attack"], json!([[0, 0], [1, 0]]));
}

#[tokio::test]
async fn fully_guarded_edge_swaps() {
    let app = app();
    let (_, v) = create(&app, "oct8", 3, 4, "finite-rect", "oct-shift").await;
    let id = v["id"].as_str().unwrap();
    let before = v["config"].clone();
    let (status, ev) = call(&app, "POST", &format!("/sessions/{id}/attack"), Some(json!({"edge": [[1, 0], [1, 1]]}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(ev["record"]["config_after"], before);
    let moves = ev["record"]["move"].as_array().unwrap();
    assert!(moves.contains(&json!([[1, 0], [1, 1]])));
    assert!(moves.contains(&json!([[1, 1], [1, 0]])));
}

#[tokio::test]
async fn illegal_attacks_are_rejected() {
    let app = app();
    let (_, v) = create(&app, "oct8", 3, 4, "finite-rect", "oct-shift").await;
    let id = v["id"].as_str().unwrap();
    for edge in [json!([[0, 0], [2, 2]]), json!([[0, 0], [9, 9]])] {
        let (status, e) = call(&app, "POST", &format!("/sessions/{id}/attack"), Some(json!({ "edge": edge }))).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
        assert_eq!(e["error"], "IllegalAttack");
    }
    let (_, view) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(view["version"], 0);
}

#[tokio::test]
async fn unknown_session() {
    let app = app();
    for (method, uri) in [("GET", "/sessions/nope"), ("GET", "/sessions/nope/attacks"), ("GET", "/sessions/nope/events")] {
        let (status, e) = call(&app, method, uri, None).await;
        assert_eq!(status, StatusCode::NOT_FOUND);
        assert_eq!(e["error"], "UnknownSession");
    }
}

#[tokio::test]
async fn stale_version_conflicts() {
    let app = app();
    let (_, v) = create(&app, "hex3", 4, 4, "finite-rect", "hex-case").await;
    let id = v["id"].as_str().unwrap().to_owned();
    let (_, list) = call(&app, "GET", &format!("/sessions/{id}/attacks"), None).await;
    let edge = list["attacks"][0].clone();
    let uri = format!("/sessions/{id}/attack");
    let body = json!({"edge": edge, "version": 0});
    let (a, b) = tokio::join!(call(&app, "POST", &uri, Some(body.clone())), call(&app, "POST", &uri, Some(body.clone())));
    let mut statuses = [a.0, b.0];
    statuses.sort();
    assert_eq!(statuses, [StatusCode::OK, StatusCode::CONFLICT]);
    let (_, view) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(view["version"], 1);
}

#[tokio::test]
async fn events_stream_round_records() {
    let app = app();
    let (_, v) = create(&app, "tri6", 3, 3, "finite-rect", "tri-tile").await;
    let id = v["id"].as_str().unwrap().to_owned();
    let req = Request::builder().uri(format!("/sessions/{id}/events")).body(Body::empty()).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.headers()["content-type"], "text/event-stream");
    let mut body = resp.into_body();

    let (_, list) = call(&app, "GET", &format!("/sessions/{id}/attacks"), None).await;
    let (_, ev) = call(&app, "POST", &format!("/sessions/{id}/attack"), Some(json!({"edge": list["attacks"][0]}))).await;

    let mut text = String::new();
    while !text.contains("\n\n") {
        let frame = body.frame().await.unwrap().unwrap();
        if let Ok(data) = frame.into_data() {
            text.push_str(std::str::from_utf8(&data).unwrap());
        }
    }
    assert!(text.contains("event: round"), "{text}");
    let data = text.lines().find_map(|l| l.strip_prefix("data: ")).unwrap();
    let pushed: Value = serde_json::from_str(data).unwrap();
    assert_eq!(pushed, ev);
}

#[tokio::test]
async fn sessions_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(Store::open(dir.path()).unwrap());
    let app = router(store.clone());
    let (_, v) = create(&app, "oct8", 4, 5, "finite-rect", "oct-shift").await;
    let id = v["id"].as_str().unwrap().to_owned();
    for _ in 0..25 {
        let (_, list) = call(&app, "GET", &format!("/sessions/{id}/attacks"), None).await;
        let n = list["attacks"].as_array().unwrap().len();
        let pick = list["attacks"][n / 2].clone();
        let (status, _) = call(&app, "POST", &format!("/sessions/{id}/attack"), Some(json!({ "edge": pick }))).await;
        assert_eq!(status, StatusCode::OK);
    }
    let before = store.get(&id).unwrap().view.clone();
    drop(app);
    drop(store);

    let reopened = Store::open(dir.path()).unwrap();
    assert_eq!(reopened.len(), 1);
    let after = reopened.get(&id).unwrap().view.clone();
    assert_eq!(after, before);

    let log = dir.path().join(format!("{id}.jsonl"));
    let lines = std::fs::read_to_string(&log).unwrap();
    assert_eq!(lines.lines().count(), 26);
    assert!(lines.lines().next().unwrap().contains(r#""type":"created""#));
    assert_eq!(replay(&log).unwrap().config.coords(&replay(&log).unwrap().graph), before.config);
}

#[tokio::test]
async fn tampered_log_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let view = store
        .create(CreateSession {
            kind: evc_core::GridKind::Square4,
            h: 2,
            w: 2,
            topology: evc_core::Topology::FiniteRect,
            strategy: evc_core::strategies::StrategyKind::HamCycle,
        })
        .unwrap();
    store.attack(&view.id, (Coord::new(0, 0), Coord::new(1, 0)), None).await.ok().unwrap();
    let log = dir.path().join(format!("{}.jsonl", view.id));
    let text = std::fs::read_to_string(&log).unwrap().replace("\"config_after\":[[0,1],[1,0]]", "\"config_after\":[[0,0],[1,1]]");
    std::fs::write(&log, text).unwrap();
    assert!(Store::open(dir.path()).is_err());
}

#[tokio::test]
async fn malformed_bodies_get_json_errors() {
    let app = app();
    let (status, v) = call(&app, "POST", "/sessions", Some(json!({"kind": "oct8", "h": 3}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "BadRequest");

    let (status, v) = call(&app, "POST", "/sessions", Some(json!({"kind": "oct8", "h": 3, "w": 4, "strategy": "oct-shift"}))).await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(v["graph"]["topology"], "finite-rect");
    let id = v["id"].as_str().unwrap();
    let (status, v) = call(&app, "POST", &format!("/sessions/{id}/attack"), Some(json!({"edge": [0, 0]}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "BadRequest");
}
