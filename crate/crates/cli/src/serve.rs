//! Human-trials HTTP service.
//!
//! Sessions draw puzzles from one split of a dataset in an order seeded per
//! session. Every session start and every answer is appended to a JSON-lines
//! log; `replay_log` recomputes each session's accuracy from it.
//!
//! Log lines:
//!
//! ```text
//! {"event":"session","session":"…","seed":N,"order":[record indices…]}
//! {"event":"answer","session":"…","puzzle_id":K,"record":I,"choice":C,"answer":A,"correct":B,"latency_ms":T}
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use anyhow::{Context, Result};
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use pgm_core::dataset::manifest::{load_manifest, read_split};
use pgm_core::record::PuzzleRecord;
use pgm_core::regimes::{RegimeId, Split};
use pgm_core::render::{render_panel, GrayImage};

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub dataset: PathBuf,
    pub split: Split,
    pub puzzles_per_session: usize,
    pub seed: u64,
    pub log_path: PathBuf,
    pub static_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEvent {
    Session { session: String, seed: u64, order: Vec<usize> },
    Answer {
        session: String,
        puzzle_id: usize,
        record: usize,
        choice: usize,
        answer: usize,
        correct: bool,
        latency_ms: u64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrialResponse {
    pub puzzle_id: usize,
    pub record: usize,
    pub choice: usize,
    pub correct: bool,
    pub latency_ms: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct SessionSummary {
    pub session: String,
    pub total: usize,
    pub answered: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub responses: Vec<TrialResponse>,
}

struct Session {
    order: Vec<usize>,
    /// Index into `order` of the next puzzle to serve.
    next: usize,
    responses: Vec<TrialResponse>,
}

impl Session {
    fn summary(&self, id: &str) -> SessionSummary {
        let correct = self.responses.iter().filter(|r| r.correct).count();
        let answered = self.responses.len();
        SessionSummary {
            session: id.to_string(),
            total: self.order.len(),
            answered,
            correct,
            accuracy: if answered == 0 { 0.0 } else { correct as f64 / answered as f64 },
            responses: self.responses.clone(),
        }
    }
}

struct Inner {
    rng: ChaCha8Rng,
    sessions: HashMap<String, Session>,
    log: File,
}

#[derive(Clone)]
pub struct AppState {
    records: Arc<Vec<PuzzleRecord>>,
    regime: RegimeId,
    split: Split,
    per_session: usize,
    inner: Arc<Mutex<Inner>>,
}

impl AppState {
    pub fn new(records: Vec<PuzzleRecord>, regime: RegimeId, config: &ServeConfig) -> Result<Self> {
        anyhow::ensure!(!records.is_empty(), "no puzzles in the {} split", config.split);
        let log = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&config.log_path)
            .with_context(|| format!("opening log {}", config.log_path.display()))?;
        Ok(AppState {
            per_session: config.puzzles_per_session.clamp(1, records.len()),
            records: Arc::new(records),
            regime,
            split: config.split,
            inner: Arc::new(Mutex::new(Inner { rng: ChaCha8Rng::seed_from_u64(config.seed), sessions: HashMap::new(), log })),
        })
    }

    /// Load the configured split, dropping pixels: panels are re-rendered
    /// per request.
    pub fn load(config: &ServeConfig) -> Result<Self> {
        let manifest = load_manifest(&config.dataset)?;
        let mut records = read_split(&config.dataset, &manifest, config.split)?;
        for r in &mut records {
            r.images = Vec::new();
        }
        Self::new(records, manifest.regime, config)
    }
}

fn append(log: &mut File, event: &LogEvent) -> std::io::Result<()> {
    let mut line = serde_json::to_vec(event).expect("log events serialise");
    line.push(b'\n');
    log.write_all(&line)?;
    log.flush()
}

/// Recompute every session's summary from a log.
pub fn replay_log(path: &Path) -> Result<BTreeMap<String, SessionSummary>> {
    let mut sessions: BTreeMap<String, Session> = BTreeMap::new();
    for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event: LogEvent = serde_json::from_str(&line).with_context(|| format!("log line {}", n + 1))?;
        match event {
            LogEvent::Session { session, order, .. } => {
                sessions.insert(session, Session { order, next: 0, responses: Vec::new() });
            }
            LogEvent::Answer { session, puzzle_id, record, choice, correct, latency_ms, .. } => {
                let s = sessions
                    .get_mut(&session)
                    .with_context(|| format!("log line {}: answer for unknown session {session}", n + 1))?;
                s.responses.push(TrialResponse { puzzle_id, record, choice, correct, latency_ms });
            }
        }
    }
    Ok(sessions.iter().map(|(id, s)| (id.clone(), s.summary(id))).collect())
}

pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn bad_request(msg: impl Into<String>) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, msg.into())
}

fn not_found(session: &str) -> ApiError {
    ApiError(StatusCode::NOT_FOUND, format!("unknown session {session}"))
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
}

#[derive(Deserialize)]
pub struct SessionQuery {
    session: String,
}

#[derive(Deserialize)]
pub struct AnswerBody {
    session: String,
    puzzle_id: usize,
    choice: usize,
    latency_ms: u64,
}

async fn new_session(State(st): State<AppState>) -> Result<Json<serde_json::Value>, ApiError> {
    let mut inner = st.inner.lock().map_err(internal)?;
    let id = format!("{:016x}", inner.rng.random::<u64>());
    let seed: u64 = inner.rng.random();
    let mut order: Vec<usize> = (0..st.records.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order.truncate(st.per_session);
    append(&mut inner.log, &LogEvent::Session { session: id.clone(), seed, order: order.clone() }).map_err(internal)?;
    inner.sessions.insert(id.clone(), Session { order, next: 0, responses: Vec::new() });
    Ok(Json(json!({
        "session": id,
        "seed": seed,
        "puzzles": st.per_session,
        "candidates": 8,
        "regime": st.regime,
        "split": st.split,
        "feedback": "immediate",
    })))
}

fn png_base64(p: &pgm_core::panel::PanelSpec) -> Result<String, ApiError> {
    let png = GrayImage::from_panel(&render_panel(p)).encode_png().map_err(internal)?;
    Ok(BASE64.encode(png))
}

async fn next_puzzle(
    State(st): State<AppState>,
    q: Result<Query<SessionQuery>, QueryRejection>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let Query(q) = q.map_err(|e| bad_request(e.body_text()))?;
    let (puzzle_id, record) = {
        let mut inner = st.inner.lock().map_err(internal)?;
        let s = inner.sessions.get_mut(&q.session).ok_or_else(|| not_found(&q.session))?;
        // The current puzzle is re-served until it is answered.
        if s.next >= s.order.len() {
            return Ok(Json(json!({ "done": true, "total": s.order.len() })));
        }
        (s.next, s.order[s.next])
    };
    let rec = &st.records[record];
    let context = rec.context.iter().map(png_base64).collect::<Result<Vec<_>, _>>()?;
    let candidates = rec.candidates.iter().map(png_base64).collect::<Result<Vec<_>, _>>()?;
    Ok(Json(json!({
        "done": false,
        "puzzle_id": puzzle_id,
        "total": st.per_session,
        "candidate_count": candidates.len(),
        "context": context,
        "candidates": candidates,
    })))
}

async fn answer(
    State(st): State<AppState>,
    body: Result<Json<AnswerBody>, JsonRejection>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let Json(b) = body.map_err(|e| bad_request(e.body_text()))?;
    if b.choice >= 8 {
        return Err(bad_request(format!("choice {} out of range 0-7", b.choice)));
    }
    let mut inner = st.inner.lock().map_err(internal)?;
    let inner = &mut *inner;
    let s = inner.sessions.get_mut(&b.session).ok_or_else(|| not_found(&b.session))?;
    if b.puzzle_id >= s.order.len() {
        return Err(bad_request(format!("puzzle {} not in session", b.puzzle_id)));
    }
    if s.responses.iter().any(|r| r.puzzle_id == b.puzzle_id) {
        return Err(ApiError(StatusCode::CONFLICT, format!("puzzle {} already answered", b.puzzle_id)));
    }
    if b.puzzle_id != s.next {
        return Err(bad_request(format!("puzzle {} has not been served", b.puzzle_id)));
    }
    let record = s.order[b.puzzle_id];
    let answer = st.records[record].answer_index as usize;
    let correct = b.choice == answer;
    append(
        &mut inner.log,
        &LogEvent::Answer {
            session: b.session.clone(),
            puzzle_id: b.puzzle_id,
            record,
            choice: b.choice,
            answer,
            correct,
            latency_ms: b.latency_ms,
        },
    )
    .map_err(internal)?;
    s.responses.push(TrialResponse { puzzle_id: b.puzzle_id, record, choice: b.choice, correct, latency_ms: b.latency_ms });
    s.next += 1;
    let summary = s.summary(&b.session);
    Ok(Json(json!({
        "correct": correct,
        "answer": answer,
        "answered": summary.answered,
        "correct_count": summary.correct,
        "accuracy": summary.accuracy,
        "done": s.next >= s.order.len(),
    })))
}

async fn results(
    State(st): State<AppState>,
    q: Result<Query<SessionQuery>, QueryRejection>,
) -> Result<Json<SessionSummary>, ApiError> {
    let Query(q) = q.map_err(|e| bad_request(e.body_text()))?;
    let inner = st.inner.lock().map_err(internal)?;
    let s = inner.sessions.get(&q.session).ok_or_else(|| not_found(&q.session))?;
    Ok(Json(s.summary(&q.session)))
}

pub fn router(state: AppState, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/session", get(new_session))
        .route("/api/puzzle", get(next_puzzle))
        .route("/api/answer", post(answer))
        .route("/api/results", get(results))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub async fn serve(config: ServeConfig, addr: std::net::SocketAddr) -> Result<()> {
    let state = AppState::load(&config)?;
    let app = router(state, config.static_dir.as_deref());
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("serving {} on http://{}", config.dataset.display(), listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
