use std::path::PathBuf;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use qbench_service::api::router;
use qbench_service::store::Store;
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(p).unwrap()
}

async fn call(app: &Router, method: Method, uri: &str, body: impl Into<String>) -> (StatusCode, String) {
    let req = Request::builder().method(method).uri(uri).header("content-type", "application/json").body(Body::from(body.into())).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn json_of(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

/// Store with the fixture model and the reference records loaded.
async fn seeded() -> (tempfile::TempDir, Store, Router) {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let app = router(store.clone());
    assert_eq!(call(&app, Method::PUT, "/models/qscore", fixture("qscore_model.json")).await.0, StatusCode::OK);
    let (s, body) = call(&app, Method::POST, "/records", fixture("reference_results.json")).await;
    assert_eq!(s, StatusCode::OK, "{body}");
    (dir, store, app)
}

#[tokio::test]
async fn health_and_model_crud() {
    let (_d, _s, app) = seeded().await;
    let (s, body) = call(&app, Method::GET, "/health", "").await;
    assert_eq!((s, json_of(&body)["status"].clone()), (StatusCode::OK, json!("ok")));
    assert_eq!(json_of(&call(&app, Method::GET, "/models", "").await.1), json!(["qscore"]));
    let (s, body) = call(&app, Method::GET, "/models/qscore", "").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(body, fixture("qscore_model.json"));
    assert_eq!(call(&app, Method::DELETE, "/models/qscore", "").await.0, StatusCode::NO_CONTENT);
    assert_eq!(call(&app, Method::GET, "/models/qscore", "").await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, Method::PUT, "/models/bad", "{\"schema_version\": 1}").await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn ingest_reports_duplicates_and_schema_errors() {
    let (_d, _s, app) = seeded().await;
    let (s, body) = call(&app, Method::POST, "/records", fixture("reference_results.json")).await;
    assert_eq!(s, StatusCode::OK);
    let v = json_of(&body);
    assert_eq!(v["accepted"].as_array().unwrap().len(), 0);
    assert_eq!(v["duplicates"].as_array().unwrap().len(), 4);
    let bad = r#"{"schema_version": 1, "records": [{"alternative_id": "x", "family": "maxcut", "instance": "i",
        "metrics": {"wall_clock_seconds": -1.0}, "timestamp": "2024-01-01T00:00:00Z", "provenance": {"kind": "local"}}]}"#;
    let (s, body) = call(&app, Method::POST, "/records", bad).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(body.contains("records[0]") && body.contains("negative"), "{body}");
    let (s, body) = call(&app, Method::POST, "/records", r#"{"schema_version": 1, "records": [{"family": 3}]}"#).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(body.contains("records[0]"), "{body}");
    assert_eq!(json_of(&call(&app, Method::GET, "/records", "").await.1)["records"].as_array().unwrap().len(), 4);
}

#[tokio::test]
async fn evaluate_explain_and_whatif() {
    let (_d, store, app) = seeded().await;
    let (s, body) = call(&app, Method::POST, "/evaluate", r#"{"model": "qscore"}"#).await;
    assert_eq!(s, StatusCode::OK);
    let report = json_of(&body);
    assert_eq!(report["rows"][0]["alternative_id"], "D-Wave Advantage");
    assert_eq!(report["rows"][0]["profile"]["maxcut.qscore"], 140.0);
    assert_eq!(report["rows"][1]["profile"]["maxclique.qscore"], 70.0);

    let (s, md) = call(&app, Method::POST, "/evaluate?format=md", r#"{"model": "qscore"}"#).await;
    assert_eq!(s, StatusCode::OK);
    assert!(md.contains("| 1 | D-Wave Advantage |"));

    let (s, body) = call(&app, Method::POST, "/explain", r#"{"model": "qscore", "alternative": "D-Wave 2000Q", "reference": "worst"}"#).await;
    assert_eq!(s, StatusCode::OK);
    let e = json_of(&body);
    let c = &e["contributions"];
    let sum = c["maxcut"].as_f64().unwrap() + c["maxclique"].as_f64().unwrap();
    assert!((sum - c["qscore"].as_f64().unwrap()).abs() < 1e-12);
    let (s, _) = call(&app, Method::POST, "/explain", r#"{"model": "qscore", "alternative": "nobody", "reference": "worst"}"#).await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let before = store.state_hash().unwrap();
    let stored_params = json_of(&fixture("qscore_model.json"))["nodes"][0]["kind"]["params"].clone();
    let same = json!({"model": "qscore", "overrides": [{"node": "qscore", "params": stored_params}]});
    let (s, body) = call(&app, Method::POST, "/whatif", same.to_string()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(json_of(&body)["rows"], report["rows"]);
    let (_, empty) = call(&app, Method::POST, "/whatif", r#"{"model": "qscore"}"#).await;
    assert_eq!(empty, body);
    let clique_only = json!({"model": "qscore", "overrides": [{"node": "qscore", "params": {"singleton_weights": {"maxcut": 0.0, "maxclique": 1.0}}}]});
    let (s, body) = call(&app, Method::POST, "/whatif", clique_only.to_string()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(json_of(&body)["rows"][1]["root_score"], 0.4);
    assert_eq!(store.state_hash().unwrap(), before);
}

#[tokio::test]
async fn session_lifecycle_reproduces_utility() {
    let (_d, store, app) = seeded().await;
    let wrong = json!({
        "model": "qscore", "node": "maxcut",
        "session": {"kind": "utility", "metric_id": "maxcut.qscore", "elements": [0.0, 17.0, 70.0, 140.0, 1000.0],
                    "gaps": ["Weak", "Strong", "Tie", "VeryStrong"], "bad": 0.0, "good": 1000.0}
    });
    let (s, body) = call(&app, Method::POST, "/sessions", wrong.to_string()).await;
    assert_eq!(s, StatusCode::CREATED, "{body}");
    let rec = json_of(&body);
    let id = rec["id"].as_str().unwrap().to_string();
    assert_eq!(rec["version"], 1);

    let (_, body) = call(&app, Method::GET, &format!("/sessions/{id}/consistency"), "").await;
    let c = json_of(&body);
    assert_eq!(c["consistent"], false);
    assert_eq!(c["violations"][0]["kind"], "tie");

    let (s, body) = call(&app, Method::POST, &format!("/sessions/{id}/finalize"), r#"{"version": 1}"#).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(json_of(&body)["violations"].is_array());

    let fixed = json!({"version": 1, "session": json_of(&fixture("sessions/maxcut_utility.json"))});
    let (s, body) = call(&app, Method::PUT, &format!("/sessions/{id}"), fixed.to_string()).await;
    assert_eq!(s, StatusCode::OK, "{body}");
    assert_eq!(json_of(&body)["version"], 2);
    let (s, _) = call(&app, Method::PUT, &format!("/sessions/{id}"), fixed.to_string()).await;
    assert_eq!(s, StatusCode::CONFLICT);

    let (s, _) = call(&app, Method::POST, &format!("/sessions/{id}/finalize"), r#"{"version": 2}"#).await;
    assert_eq!(s, StatusCode::OK);
    let utility = &json_of(&call(&app, Method::GET, "/models/qscore", "").await.1)["nodes"][1]["kind"]["utility"];
    let u: Vec<f64> = utility["breakpoints"].as_array().unwrap().iter().map(|b| b["utility"].as_f64().unwrap()).collect();
    for (a, b) in u.iter().zip([0.0, 0.133, 0.4, 0.667, 1.0]) {
        assert!((a - b).abs() < 1e-3);
    }
    assert_eq!(store.load_model("qscore").unwrap(), qbench_service::store::parse_model(&fixture("qscore_model.json")).unwrap());
}

#[tokio::test]
async fn session_target_mismatch_and_unknown() {
    let (_d, _s, app) = seeded().await;
    let req = json!({"model": "qscore", "node": "qscore", "session": json_of(&fixture("sessions/maxcut_utility.json"))});
    assert_eq!(call(&app, Method::POST, "/sessions", req.to_string()).await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(call(&app, Method::GET, "/sessions/s99", "").await.0, StatusCode::NOT_FOUND);
    assert_eq!(call(&app, Method::POST, "/evaluate", "{").await.0, StatusCode::BAD_REQUEST);
}
