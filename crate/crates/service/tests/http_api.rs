use std::f64::consts::PI;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use drawjectory_core::{CubicSpline1D, FlightPath, TrackedPoint};
use drawjectory_service::{router, Action, Session, SessionStore};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn csv(points: &[(f64, f64, f64, f64)]) -> String {
    let mut out = String::from("t,x,y,z\n");
    for (t, x, y, z) in points {
        out.push_str(&format!("{t},{x},{y},{z}\n"));
    }
    out
}

/// 450 points around a circle of radius 1 centered at (3, 2), 1 m up.
fn circle() -> Vec<(f64, f64, f64, f64)> {
    (0..450)
        .map(|i| {
            let t = i as f64 * 0.02;
            let a = t * 2.0 * PI / 9.0;
            (t, 3.0 + a.cos(), 2.0 + a.sin(), 1.0)
        })
        .collect()
}

fn app() -> (Router, Arc<SessionStore>) {
    let store = Arc::new(SessionStore::new());
    (router(store.clone(), None), store)
}

async fn send(app: &Router, method: &str, uri: &str, body: String) -> (StatusCode, Value) {
    let request = Request::builder().method(method).uri(uri).body(Body::from(body)).unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

async fn upload(app: &Router, body: String) -> String {
    let (status, v) = send(app, "POST", "/sessions", body).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    v["id"].as_str().unwrap().to_string()
}

async fn act(app: &Router, id: &str, action: Value) -> (StatusCode, Value) {
    send(app, "POST", &format!("/sessions/{id}/actions"), action.to_string()).await
}

async fn state(app: &Router, id: &str, query: &str) -> (StatusCode, Value) {
    send(app, "GET", &format!("/sessions/{id}/state?{query}"), String::new()).await
}

#[tokio::test]
async fn path_view_returns_upload() {
    let (app, _) = app();
    let points = circle();
    let id = upload(&app, csv(&points)).await;
    let (status, v) = state(&app, &id, "view=path").await;
    assert_eq!(status, StatusCode::OK);
    let got = v["points"].as_array().unwrap();
    assert_eq!(got.len(), points.len());
    assert_eq!(got[7]["x"].as_f64().unwrap(), points[7].1);
    assert_eq!(v["trim"], json!([0, 449]));
}

#[tokio::test]
async fn uploads_get_distinct_ids() {
    let (app, store) = app();
    let a = upload(&app, csv(&circle())).await;
    let b = upload(&app, csv(&circle())).await;
    assert_ne!(a, b);
    assert_eq!(store.len(), 2);
}

#[tokio::test]
async fn jsonl_upload() {
    let (app, _) = app();
    let body = "{\"t\":0,\"x\":1,\"y\":1,\"z\":1}\n{\"t\":1,\"x\":2,\"y\":1,\"z\":1}\n".to_string();
    let (status, v) = send(&app, "POST", "/sessions?format=jsonl", body).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
}

#[tokio::test]
async fn malformed_csv_names_line() {
    let (app, store) = app();
    let (status, v) = send(&app, "POST", "/sessions", "t,x,y,z\n0,1,1,1\n1,oops,1,1\n".into()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "malformed_record");
    assert!(v["message"].as_str().unwrap().contains("line 3"), "{v}");
    assert!(store.is_empty());
}

#[tokio::test]
async fn trim_then_plan_counts_waypoints() {
    let (app, _) = app();
    let id = upload(&app, csv(&circle())).await;
    let (status, _) = act(&app, &id, json!({"action": "trim", "start": 2, "end": 400})).await;
    assert_eq!(status, StatusCode::OK);
    let (status, v) = act(&app, &id, json!({"action": "plan", "strategy": "equidistant", "n": 15})).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    // 399 points, d = round(384 / 14) = 27: indices 0, 28, ..., 392 and 398.
    assert_eq!(v["waypoint_count"], 16);
    assert_eq!(v["feasible"], true);
    let (_, w) = state(&app, &id, "view=waypoints").await;
    let waypoints = w["waypoints"].as_array().unwrap();
    assert_eq!(waypoints.len(), 16);
    assert_eq!(waypoints[0]["index"], 0);
    assert_eq!(waypoints[15]["index"], 398);
    assert_eq!(waypoints[0]["t"].as_f64().unwrap(), circle()[2].0);
}

#[tokio::test]
async fn rotating_twice_by_pi_restores_waypoints() {
    let (app, _) = app();
    let id = upload(&app, csv(&circle())).await;
    act(&app, &id, json!({"action": "plan", "strategy": "equidistant", "n": 10})).await;
    let (_, before) = state(&app, &id, "view=waypoints").await;
    for _ in 0..2 {
        let (status, v) = act(&app, &id, json!({"action": "edit", "ops": [{"kind": "rotate", "angle": PI}]})).await;
        assert_eq!(status, StatusCode::OK, "{v}");
    }
    let (_, after) = state(&app, &id, "view=waypoints").await;
    let (b, a) = (before["waypoints"].as_array().unwrap(), after["waypoints"].as_array().unwrap());
    assert_eq!(a.len(), b.len());
    for (p, q) in b.iter().zip(a) {
        for key in ["x", "y", "z"] {
            assert!((p[key].as_f64().unwrap() - q[key].as_f64().unwrap()).abs() <= 1e-9);
        }
    }
}

#[tokio::test]
async fn edit_before_plan_is_invalid_state() {
    let (app, _) = app();
    let id = upload(&app, csv(&circle())).await;
    let (status, v) = act(&app, &id, json!({"action": "edit", "ops": [{"kind": "scale", "factor": 1.1}]})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"], "invalid_state");
    let (status, v) = state(&app, &id, "view=trajectory").await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(v["error"], "view_unavailable");
}

#[tokio::test]
async fn unknown_session_is_404() {
    let (app, _) = app();
    let (status, v) = state(&app, "nope", "view=path").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(v["error"], "unknown_session");
    let (status, _) = act(&app, "nope", json!({"action": "trim", "start": 0, "end": 1})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn infeasible_edit_is_not_committed() {
    let (app, _) = app();
    let id = upload(&app, csv(&circle())).await;
    act(&app, &id, json!({"action": "plan", "strategy": "equidistant", "n": 15})).await;
    let (_, before) = state(&app, &id, "view=bundle").await;
    let (status, v) = act(&app, &id, json!({"action": "edit", "ops": [{"kind": "scale", "factor": 10.0}]})).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["error"], "infeasible");
    assert!(!v["feasibility"]["violations"].as_array().unwrap().is_empty());
    let (_, after) = state(&app, &id, "view=bundle").await;
    assert_eq!(before, after);
}

#[tokio::test]
async fn move_waypoint_passes_through_new_position() {
    let (app, _) = app();
    let id = upload(&app, csv(&circle())).await;
    act(&app, &id, json!({"action": "plan", "strategy": "equidistant", "n": 15})).await;
    let (_, w) = state(&app, &id, "view=waypoints").await;
    let p = &w["waypoints"][4];
    let target = [p["x"].as_f64().unwrap() + 0.2, p["y"].as_f64().unwrap(), p["z"].as_f64().unwrap()];
    let edit = json!({"action": "edit", "ops": [{"kind": "move_waypoint", "index": 4, "position": target}]});
    let (status, v) = act(&app, &id, edit).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    let (_, traj) = state(&app, &id, "view=trajectory").await;
    let t = p["t"].as_f64().unwrap();
    let knots: Vec<f64> = serde_json::from_value(traj["trajectory"]["knots"].clone()).unwrap();
    let k = knots.iter().position(|&x| x == t).unwrap();
    for (axis, want) in ["x", "y", "z"].iter().zip(target) {
        let got = traj["trajectory"][axis]["values"][k].as_f64().unwrap();
        assert!((got - want).abs() <= 1e-6);
    }
}

#[tokio::test]
async fn errors_view_is_normalized() {
    let (app, _) = app();
    let id = upload(&app, csv(&circle())).await;
    act(&app, &id, json!({"action": "plan", "strategy": "random", "n": 12, "seed": 3})).await;
    let (status, v) = state(&app, &id, "view=errors").await;
    assert_eq!(status, StatusCode::OK);
    let normalized = v["normalized"].as_array().unwrap();
    assert_eq!(normalized.len(), 450);
    assert!(normalized.iter().all(|x| (0.0..=1.0).contains(&x.as_f64().unwrap())));
    assert!(v["mae"].as_f64().unwrap() <= v["rsme"].as_f64().unwrap());
    assert_eq!(v["gradient"].as_array().unwrap().len(), 450);
}

#[tokio::test]
async fn trajectory_view_has_samples_and_gradient() {
    let (app, _) = app();
    let id = upload(&app, csv(&circle())).await;
    act(&app, &id, json!({"action": "plan", "strategy": "equidistant", "n": 15})).await;
    let (status, v) = state(&app, &id, "view=trajectory").await;
    assert_eq!(status, StatusCode::OK);
    assert!(v["trajectory"]["samples"].as_array().unwrap().len() > 800);
    assert!(v["gradient"][0]["rgb"].is_array());
    assert_eq!(v["feasibility"]["feasible"], true);
}

/// Recording sampled from a natural spline whose knots sit exactly where
/// equidistant sampling with n = 5 picks them (indices 0, 25, 50, 75, 100).
fn spline_recording() -> Vec<(f64, f64, f64, f64)> {
    let knot_t: Vec<f64> = [0, 25, 50, 75, 100].iter().map(|&i| i as f64 * 0.05).collect();
    let xs = CubicSpline1D::natural(knot_t.clone(), vec![1.0, 2.0, 2.5, 2.0, 1.5]).unwrap();
    let ys = CubicSpline1D::natural(knot_t.clone(), vec![1.0, 1.5, 2.5, 3.0, 2.0]).unwrap();
    let zs = CubicSpline1D::natural(knot_t, vec![0.5, 1.0, 1.2, 1.0, 0.8]).unwrap();
    (0..=100)
        .map(|i| {
            let t = i as f64 * 0.05;
            let v = |s: &CubicSpline1D| s.eval(t, drawjectory_core::spline::Order::Value).unwrap();
            (t, v(&xs), v(&ys), v(&zs))
        })
        .collect()
}

#[tokio::test]
async fn similarity_with_spline_generated_reference_is_zero() {
    let (app, _) = app();
    let id = upload(&app, csv(&spline_recording())).await;
    act(&app, &id, json!({"action": "plan", "strategy": "equidistant", "n": 5})).await;
    let (status, v) = state(&app, &id, "view=similarity&reference=self&at=reference").await;
    assert_eq!(status, StatusCode::OK, "{v}");
    for key in ["hausdorff", "frechet", "dtw", "dtw_normalized"] {
        assert!(v[key].as_f64().unwrap() <= 1e-12, "{key}: {v}");
    }
    let (status, _) = state(&app, &id, "view=similarity").await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn similarity_against_another_session() {
    let (app, _) = app();
    let a = upload(&app, csv(&circle())).await;
    let b = upload(&app, csv(&spline_recording())).await;
    act(&app, &a, json!({"action": "plan", "strategy": "equidistant", "n": 15})).await;
    let (status, v) = state(&app, &a, &format!("view=similarity&reference={b}")).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert!(v["frechet"].as_f64().unwrap() >= v["hausdorff"].as_f64().unwrap());
    let (status, _) = state(&app, &a, "view=similarity&reference=missing").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn sessions_are_isolated() {
    let (app, _) = app();
    let a = upload(&app, csv(&circle())).await;
    let b = upload(&app, csv(&circle())).await;
    act(&app, &a, json!({"action": "plan", "strategy": "equidistant", "n": 15})).await;
    let (_, b_before) = state(&app, &b, "view=path").await;
    act(&app, &a, json!({"action": "trim", "start": 10, "end": 300})).await;
    let (_, b_after) = state(&app, &b, "view=path").await;
    assert_eq!(b_before, b_after);
    let (status, _) = state(&app, &b, "view=bundle").await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn stopwatch_reports_elapsed() {
    let (app, _) = app();
    let id = upload(&app, csv(&circle())).await;
    let (status, v) = act(&app, &id, json!({"action": "stopwatch", "event": "stop"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "stop_without_start");
    act(&app, &id, json!({"action": "stopwatch", "event": "start"})).await;
    let (status, v) = act(&app, &id, json!({"action": "stopwatch", "event": "stop"})).await;
    assert_eq!(status, StatusCode::OK);
    assert!(v["elapsed"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["timings"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn bad_action_body_is_rejected() {
    let (app, _) = app();
    let id = upload(&app, csv(&circle())).await;
    let (status, v) = act(&app, &id, json!({"action": "fly"})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "bad_request");
    let (status, v) = act(&app, &id, json!({"action": "plan", "strategy": "equidistant", "n": 1})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["error"], "too_few_waypoints");
}

#[tokio::test]
async fn replaying_history_reproduces_bundle() {
    let (app, store) = app();
    let id = upload(&app, csv(&circle())).await;
    let actions = [
        json!({"action": "trim", "start": 5, "end": 420}),
        json!({"action": "stopwatch", "event": "start"}),
        json!({"action": "plan", "strategy": "random", "n": 14, "seed": 99}),
        json!({"action": "edit", "ops": [{"kind": "shift", "offset": [0.1, -0.2, 0.05]}]}),
        json!({"action": "edit", "ops": [{"kind": "rotate", "angle": 0.3}, {"kind": "scale", "factor": 0.9}]}),
        json!({"action": "stopwatch", "event": "stop"}),
    ];
    for a in actions {
        let (status, v) = act(&app, &id, a).await;
        assert_eq!(status, StatusCode::OK, "{v}");
    }
    let (history, live) =
        store.with_session(&id, |s| (s.history().to_vec(), s.bundle().unwrap().to_json().unwrap())).unwrap();
    assert_eq!(history.len(), 6);
    let points = circle().into_iter().map(|(t, x, y, z)| TrackedPoint::new(t, x, y, z)).collect();
    let replayed = Session::replay("r".into(), FlightPath::new(points).unwrap(), &history).unwrap();
    assert_eq!(replayed.bundle().unwrap().to_json().unwrap(), live);
}

#[test]
fn snapshots_round_trip_through_disk() {
    let store = SessionStore::new();
    let id = store.create(csv(&circle()).as_bytes(), drawjectory_core::recording::Format::Csv).unwrap();
    store
        .apply_action(&id, serde_json::from_value::<Action>(json!({"action": "trim", "start": 3, "end": 300})).unwrap())
        .unwrap();
    store
        .apply_action(
            &id,
            serde_json::from_value(json!({"action": "plan", "strategy": "equidistant", "n": 8})).unwrap(),
        )
        .unwrap();
    let dir = std::env::temp_dir().join(format!("drawjectory-snap-{}", std::process::id()));
    assert_eq!(store.save_snapshots(&dir).unwrap(), 1);
    let restored = SessionStore::load_snapshots(&dir).unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    let bundle = |s: &SessionStore| s.with_session(&id, |s| s.bundle().unwrap().to_json().unwrap()).unwrap();
    assert_eq!(bundle(&restored), bundle(&store));
}
