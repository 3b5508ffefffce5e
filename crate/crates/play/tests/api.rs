use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use lowrand::{Rational, Scalar};
use lowrand_play::{router, Store};

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

fn app() -> Router {
    router(Arc::new(Store::new()))
}

async fn create(app: &Router, body: Value) -> String {
    let (status, v) = call(app, "POST", "/api/session", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

fn q(v: &Value) -> Rational {
    Rational::parse_scalar(v.as_str().unwrap()).unwrap()
}

#[tokio::test]
async fn fresh_session_is_empty() {
    let app = app();
    let cfg = json!({"game": "matching-pennies", "n": 100, "engine": {"kind": "predictor", "context_length": 2, "threshold": 0.75}});
    let (status, v) = call(&app, "POST", "/api/session", Some(cfg)).await;
    assert_eq!(status, StatusCode::CREATED);
    let id = v["id"].as_str().unwrap();
    assert_eq!(id.len(), 32);
    assert!(id.chars().all(|c| c.is_ascii_hexdigit()));
    assert_eq!(v["transcript"], json!([]));
    assert_eq!(v["remaining"], 100);
    let (status, state) = call(&app, "GET", &format!("/api/session/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(state["transcript"], json!([]));
    assert_eq!(state["scores"], json!(["0", "0"]));
}

#[tokio::test]
async fn alternating_human_loses_to_predictor() {
    let app = app();
    let id = create(&app, json!({"game": "matching-pennies", "n": 50, "seed": 11, "engine": {"kind": "predictor", "context_length": 1, "threshold": 0.75}})).await;
    let mut last = Value::Null;
    for t in 0..50 {
        let action = if t % 2 == 0 { "H" } else { "T" };
        let (status, v) = call(&app, "POST", &format!("/api/session/{id}/move"), Some(json!({"action": action}))).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        assert_eq!(v["stage"], t);
        let p = &v["payoffs"];
        assert!(p == &json!(["1", "-1"]) || p == &json!(["-1", "1"]));
        last = v;
    }
    assert!(q(&last["scores"][1]) > Rational::from_ratio(0, 1), "engine score {}", last["scores"][1]);
    assert_eq!(last["complete"], true);
    let (status, v) = call(&app, "POST", &format!("/api/session/{id}/move"), Some(json!({"action": "H"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"], "session complete");
    let (_, state) = call(&app, "GET", &format!("/api/session/{id}"), None).await;
    assert_eq!(state["report"]["human_entropy"], 1.0);
    assert_eq!(state["transcript"].as_array().unwrap().len(), 50);
}

#[tokio::test]
async fn engine_moves_ignore_the_current_human_move() {
    let moves_a = ["H", "H", "T", "H", "T", "T", "H", "T", "H", "H", "T", "T"];
    let mut engine_runs = Vec::new();
    for flip_from in [4usize, 8, 12] {
        let app = app();
        let id = create(&app, json!({"game": "matching-pennies", "n": 12, "seed": 5})).await;
        let mut engine = Vec::new();
        for (t, m) in moves_a.iter().enumerate() {
            let m = if t >= flip_from { if *m == "H" { "T" } else { "H" } } else { m };
            let (_, v) = call(&app, "POST", &format!("/api/session/{id}/move"), Some(json!({"action": m}))).await;
            engine.push(v["engine"].as_str().unwrap().to_string());
        }
        engine_runs.push((flip_from, engine));
    }
    // the engine's action at stage t depends only on the first t human moves
    for (flip, run) in &engine_runs {
        for (other_flip, other) in &engine_runs {
            let common = (*flip).min(*other_flip);
            assert_eq!(run[..=common.min(11)], other[..=common.min(11)]);
        }
    }
}

#[tokio::test]
async fn scores_sum_to_zero_in_zero_sum_play() {
    let app = app();
    let id = create(&app, json!({"game": "matching-pennies", "n": 30, "human_player": 1})).await;
    for t in 0..30 {
        let action = if (t * 7) % 3 == 0 { 0 } else { 1 };
        let (_, v) = call(&app, "POST", &format!("/api/session/{id}/move"), Some(json!({"action": action}))).await;
        assert_eq!(q(&v["scores"][0]) + q(&v["scores"][1]), Rational::from_ratio(0, 1));
    }
}

#[tokio::test]
async fn errors_are_reported() {
    let app = app();
    let (status, v) = call(&app, "POST", "/api/session", Some(json!({"game": "go", "n": 10}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("unknown game"));
    let (status, v) = call(&app, "POST", "/api/session", Some(json!({"game": "matching-pennies", "n": 10, "engine": {"kind": "seed-learner"}}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("predictor"));
    let (status, _) = call(&app, "POST", "/api/session", Some(json!({"game": "matching-pennies", "n": 501}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "GET", "/api/session/0123", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let id = create(&app, json!({"game": "matching-pennies", "n": 2})).await;
    let (status, v) = call(&app, "POST", &format!("/api/session/{id}/move"), Some(json!({"action": "X"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().starts_with("invalid action"));
    let (_, state) = call(&app, "GET", &format!("/api/session/{id}"), None).await;
    assert_eq!(state["transcript"], json!([]));
}

#[tokio::test]
async fn games_and_myopic_engine() {
    let app = app();
    let (status, v) = call(&app, "GET", "/api/games", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v.as_array().unwrap().len(), 3);
    let belief = json!({"owner": 0, "kind": "schedule", "stages": [["3/4", "1/4"]]});
    let id = create(&app, json!({"game": "matching-pennies", "n": 3, "engine": {"kind": "myopic", "belief": belief}})).await;
    let (_, v) = call(&app, "POST", &format!("/api/session/{id}/move"), Some(json!({"action": "H"}))).await;
    assert_eq!(v["engine"], "T");
}

#[test]
fn journal_restores_sessions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("journal.jsonl");
    let store = Store::with_journal(&path).unwrap();
    let req = serde_json::from_value(json!({"game": "matching-pennies", "n": 5})).unwrap();
    let id = store.create(req).unwrap().id;
    for a in [0usize, 1, 1] {
        store.submit(&id, &lowrand_play::HumanAction::Index(a)).unwrap();
    }
    let before = serde_json::to_value(store.state(&id).unwrap()).unwrap();
    drop(store);
    // a torn final line is ignored
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("{\"event\":\"mo");
    std::fs::write(&path, text).unwrap();
    let restored = Store::with_journal(&path).unwrap();
    assert_eq!(serde_json::to_value(restored.state(&id).unwrap()).unwrap(), before);
    restored.submit(&id, &lowrand_play::HumanAction::Index(0)).unwrap();
    drop(restored);
    let again = Store::with_journal(&path).unwrap();
    assert_eq!(again.state(&id).unwrap().transcript.len(), 4);
}
