use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use polygame_cli::api::router;
use polygame_cli::session::Store;
use polygame_core::game::GameRecord;
use polygame_core::GameState;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use tower::ServiceExt;

async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let req = req.body(body.map_or_else(Body::empty, |b| Body::from(b.to_string()))).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let v = serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()));
    (status, v)
}

fn app() -> axum::Router {
    router(Arc::new(Store::new()))
}

fn z16() -> Value {
    json!({"arena": {"kind": "cyclic", "modulus": 16}, "degree": 3, "engine_role": "wanda", "first": "wanda"})
}

#[tokio::test]
async fn healthz() {
    let (s, v) = call(&app(), "GET", "/healthz", None).await;
    assert_eq!((s, v), (StatusCode::OK, json!("ok")));
}

#[tokio::test]
async fn sixteen_cubic_demo() {
    let app = app();
    let (s, v) = call(&app, "POST", "/sessions", Some(z16())).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["game"]["log"][0], json!({"player": "wanda", "index": 0, "value": "12"}));
    assert_eq!(v["strategy"], json!("wanda_fourth_power"));
    let id = v["id"].as_str().unwrap().to_string();
    assert_eq!(id.len(), 32);

    let (s, v) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({"index": 1, "value": "4"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["game"]["log"][2], json!({"player": "wanda", "index": 2, "value": "15"}));

    let (s, v) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({"index": 3, "value": "6"}))).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], json!("finished"));
    assert_eq!(v["result"]["winner"], json!("wanda"));
    assert_eq!(v["result"]["certificate"]["kind"], json!("roots"));
    assert!(!v["result"]["certificate"]["witnesses"].as_array().unwrap().is_empty());

    let (s, v) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({"index": 3, "value": "1"}))).await;
    assert_eq!((s, &v["error"]), (StatusCode::CONFLICT, &json!("finished")));
}

#[tokio::test]
async fn openings_and_errors() {
    let app = app();
    let req = json!({"arena": {"kind": "cyclic", "modulus": 9}, "degree": 2, "engine_role": "nora", "first": "nora"});
    let (_, v) = call(&app, "POST", "/sessions", Some(req)).await;
    assert_eq!(v["game"]["log"][0], json!({"player": "nora", "index": 0, "value": "1"}));
    let id = v["id"].as_str().unwrap().to_string();

    let (s, v) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({"index": 2, "value": "0"}))).await;
    assert_eq!((s, &v["error"]), (StatusCode::UNPROCESSABLE_ENTITY, &json!("illegal_move")));

    let req = json!({"arena": {"kind": "valued", "prime": 5}, "degree": 2, "engine_role": "nora", "first": "nora"});
    let (s, v) = call(&app, "POST", "/sessions", Some(req)).await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(v["game"]["log"][0], json!({"player": "nora", "index": 1, "value": "0"}));

    let (s, v) = call(&app, "GET", "/sessions/nope", None).await;
    assert_eq!((s, &v["error"]), (StatusCode::NOT_FOUND, &json!("unknown_session")));

    let bad = json!({"arena": {"kind": "cyclic", "modulus": 7}, "degree": 2, "engine_role": "nora", "first": "nora"});
    let (s, v) = call(&app, "POST", "/sessions", Some(bad)).await;
    assert_eq!((s, &v["error"]), (StatusCode::BAD_REQUEST, &json!("out_of_scope")));

    let (s, _) = call(&app, "POST", "/sessions", Some(json!({"degree": 2}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn fresh_and_valued_snapshots() {
    let app = app();
    let req = json!({"arena": {"kind": "cyclic", "modulus": 12}, "degree": 3, "engine_role": "nora", "first": "nora"});
    let (_, v) = call(&app, "POST", "/sessions", Some(req)).await;
    // Wanda wins this one; the engine plays the solver move
    assert_eq!(v["strategy"], Value::Null);
    assert_eq!(v["engine_moves"][0]["source"], json!("solver"));

    let req = json!({"arena": {"kind": "valued", "prime": 5}, "degree": 3, "engine_role": "nora", "first": "wanda"});
    let (_, v) = call(&app, "POST", "/sessions", Some(req)).await;
    assert_eq!(v["game"]["slots"], json!(["unset", "unset", "unset", "unset"]));
    assert_eq!(v["legal_moves"].as_array().unwrap().len(), 4);
    let id = v["id"].as_str().unwrap().to_string();
    let (_, v) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({"index": 3, "value": "1"}))).await;
    assert_eq!(v["engine_moves"][0]["branch"], json!("cubic.a2zero"));
    assert_eq!(v["polygon"]["vertices"], json!([[3, "0"]]));
    let (_, v) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({"index": 0, "value": "125"}))).await;
    assert_eq!(v["game"]["slots"], json!(["125", "25", "0", "1"]));
    assert_eq!(v["result"]["winner"], json!("nora"));
    assert_eq!(v["result"]["certificate"]["kind"], json!("padic"));
}

/// Random human moves: the engine never errs and GET equals a local replay.
#[tokio::test]
async fn fuzzed_sessions_replay_exactly() {
    let app = app();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let arenas = [
        json!({"kind": "cyclic", "modulus": 16}),
        json!({"kind": "cyclic", "modulus": 12}),
        json!({"kind": "valued", "prime": 3}),
    ];
    for round in 0..30 {
        let arena = arenas[round % 3].clone();
        let valued = arena["kind"] == "valued";
        let d = if valued { 2 + round % 4 } else { 2 + round % 2 };
        let engine = if round % 2 == 0 { "nora" } else { "wanda" };
        let first = if (round / 2) % 2 == 0 { "nora" } else { "wanda" };
        let req = json!({"arena": arena, "degree": d, "engine_role": engine, "first": first});
        let (s, mut v) = call(&app, "POST", "/sessions", Some(req)).await;
        if s != StatusCode::CREATED {
            // no valued construction for this role and turn order
            assert!(valued, "{v}");
            continue;
        }
        let id = v["id"].as_str().unwrap().to_string();
        while v["status"] == "open" {
            assert!(v["result"].is_null());
            let slots = v["legal_moves"].as_array().unwrap();
            let slot = &slots[rng.gen_range(0..slots.len())];
            let value = if valued {
                format!("{}/{}", rng.gen_range(1..50), 3u64.pow(rng.gen_range(0..3)))
            } else {
                rng.gen_range(1..16).to_string()
            };
            let mv = json!({"index": slot["index"], "value": value});
            let (s, next) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(mv)).await;
            assert_eq!(s, StatusCode::OK, "{next}");
            v = next;
        }
        assert!(v["result"]["resigned"].is_null(), "{v}");
        let (_, got) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
        let record: GameRecord = serde_json::from_value(got["game"].clone()).unwrap();
        let replayed = GameState::from_record(&record).unwrap().to_record();
        assert_eq!(serde_json::to_string(&replayed).unwrap(), serde_json::to_string(&record).unwrap());
        assert_eq!(got, v);
    }
}

#[tokio::test]
async fn persisted_sessions_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(Arc::new(Store::persistent(dir.path()).unwrap()));
    let (_, v) = call(&app, "POST", "/sessions", Some(z16())).await;
    let id = v["id"].as_str().unwrap().to_string();
    let (_, before) = call(&app, "POST", &format!("/sessions/{id}/moves"), Some(json!({"index": 1, "value": "4"}))).await;
    drop(app);

    let app = router(Arc::new(Store::persistent(dir.path()).unwrap()));
    let (s, after) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(after, before);
}
