mod common;

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::http::{HeaderMap, StatusCode};
use axum::routing::post;
use axum::{Json, Router};
use common::*;
use ginaz::error::TranslateError;
use ginaz::translate::{translate, ExternalConfig, MtBackend};
use ginaz_service::server::ServerOptions;
use serde_json::{json, Value};

type Seen = Arc<Mutex<Vec<(Option<String>, Value)>>>;

/// Mock translation endpoint on its own runtime thread. Returns the address
/// and a log of (authorization header, request body) pairs.
fn spawn_mock() -> (SocketAddr, Seen) {
    let seen: Seen = Arc::default();
    let log = seen.clone();
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let runtime = tokio::runtime::Runtime::new().unwrap();
        runtime.block_on(async move {
            let app = Router::new()
                .route(
                    "/translate",
                    post(move |headers: HeaderMap, Json(body): Json<Value>| {
                        let log = log.clone();
                        async move {
                            let auth = headers.get("authorization").map(|v| v.to_str().unwrap().to_string());
                            log.lock().unwrap().push((auth, body.clone()));
                            match body["q"].as_str() {
                                Some("I am a doctor.") => (StatusCode::OK, Json(json!({"translatedText": "أنا طبيب."}))),
                                _ => (StatusCode::INTERNAL_SERVER_ERROR, Json(json!({"error": "boom"}))),
                            }
                        }
                    }),
                );
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, app).await.unwrap();
        });
    });
    (rx.recv().unwrap(), seen)
}

fn backend(addr: SocketAddr, key: Option<&str>) -> MtBackend {
    MtBackend::External(ExternalConfig { url: format!("http://{addr}/translate"), key: key.map(str::to_string), timeout_ms: 5000 })
}

#[test]
fn external_backend_posts_json_and_reads_translation() {
    let (addr, seen) = spawn_mock();
    let out = translate("I am a doctor.", &backend(addr, Some("secret"))).unwrap();
    assert_eq!(out, "أنا طبيب.");
    let seen = seen.lock().unwrap();
    assert_eq!(seen.len(), 1);
    assert_eq!(seen[0].0.as_deref(), Some("Bearer secret"));
    assert_eq!(seen[0].1, json!({"q": "I am a doctor.", "source": "en", "target": "ar"}));
}

#[test]
fn external_backend_error_status_is_transport_failure() {
    let (addr, _) = spawn_mock();
    let err = translate("Something else.", &backend(addr, None)).unwrap_err();
    assert!(matches!(err, TranslateError::Transport(_)), "{err:?}");
}

#[tokio::test]
async fn api_uses_the_external_backend() {
    let (addr, seen) = spawn_mock();
    let app = app_with(backend(addr, None), ServerOptions::default());
    let (status, body) = rewrite(&app, json!({"text": "I am a doctor.", "speaker": ["f"]})).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["sentences"][0]["translatedFrom"], "I am a doctor.");
    assert_eq!(body["sentences"][0]["variants"][0]["text"], "أنا طبيبة.");
    assert_eq!(seen.lock().unwrap()[0].0, None);

    let (status, body) = rewrite(&app, json!({"text": "Something else.", "speaker": ["f"]})).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(body["error"], "mt_unavailable");
}
