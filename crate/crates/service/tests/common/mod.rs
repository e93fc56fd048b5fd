#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use ginaz::corpus::{parse_corpus, CorpusTuple};
use ginaz::generate::RuleTable;
use ginaz::translate::MtBackend;
use ginaz::{Engine, ModelBundle};
use ginaz_service::server::{router, AppState, ServerOptions};
use serde_json::Value;
use tower::ServiceExt;

pub const DOCTOR_NURSE: &str = "أنا طبيب وأنت ممرضة";

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn schema_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema")
}

pub fn corpus() -> &'static [CorpusTuple] {
    static CORPUS: OnceLock<Vec<CorpusTuple>> = OnceLock::new();
    CORPUS.get_or_init(|| parse_corpus(&data_dir().join("corpus.tsv")).expect("bundled corpus parses"))
}

pub fn rules() -> RuleTable {
    RuleTable::parse(&std::fs::read_to_string(data_dir().join("rules.tsv")).unwrap()).unwrap()
}

pub fn train(tuples: &[CorpusTuple]) -> Engine {
    Engine::new(ModelBundle::train(tuples, rules()).unwrap())
}

/// Engine trained on the whole bundled corpus, shared across tests.
pub fn engine() -> &'static Engine {
    static ENGINE: OnceLock<Engine> = OnceLock::new();
    ENGINE.get_or_init(|| train(corpus()))
}

pub fn app_with(backend: MtBackend, options: ServerOptions) -> Router {
    router(AppState::new(engine().clone(), backend), &options).unwrap()
}

pub fn app() -> Router {
    app_with(MtBackend::default(), ServerOptions::default())
}

pub async fn send(app: &Router, request: Request<Body>) -> (StatusCode, Vec<u8>) {
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    (status, to_bytes(response.into_body(), usize::MAX).await.unwrap().to_vec())
}

pub fn post_json(body: impl Into<Body>) -> Request<Body> {
    Request::post("/api/rewrite").header("content-type", "application/json").body(body.into()).unwrap()
}

pub async fn rewrite(app: &Router, request: Value) -> (StatusCode, Value) {
    let (status, bytes) = send(app, post_json(request.to_string())).await;
    (status, serde_json::from_slice(&bytes).expect("response is JSON"))
}

pub fn validator(name: &str) -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_dir().join(name)).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

pub fn assert_valid(validator: &jsonschema::Validator, instance: &Value) {
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?} in {instance}");
}

/// Gender code subsets in a fixed order: {}, {m}, {f}, {m,f}.
pub fn subsets() -> [Vec<&'static str>; 4] {
    [vec![], vec!["m"], vec!["f"], vec!["m", "f"]]
}
