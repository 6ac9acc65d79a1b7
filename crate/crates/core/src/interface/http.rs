use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::{Arc, PoisonError, RwLock, RwLockReadGuard, RwLockWriteGuard};

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::aesthetics::{assess_detailed, HeuristicModel};
use crate::error::Error;
use crate::optimize::{probe_sequence, OptimizationReport, Optimizer, SearchSpace, ShootingParameters, Stages};
use crate::postproc::{deflicker, write_output, DeflickerConfig};
use crate::render::{render_frame, render_sequence, ExposureMode, RenderSettings};
use crate::robotplan::{compile_plan, serialize_plan, DEFAULT_WAYPOINTS};
use crate::scene::{serialize_scene, GeoReference, SceneDescription};
use crate::time::parse_timestamp;

use super::{parse_params, SCENE_FILE};

pub const MAX_PREVIEW: (u32, u32) = (320, 180);
const MIN_PREVIEW: u32 = 16;
const REVISION_HEADER: &str = "x-revision";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Optimize,
    Timelapse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub id: u64,
    pub kind: JobKind,
    pub state: JobState,
    pub progress: f64,
    /// Where the result can be fetched: an API path or an output directory.
    pub result: Option<String>,
    pub error: Option<String>,
}

/// The single editing session behind the HTTP service.
#[derive(Debug)]
pub struct Session {
    pub scene: Arc<SceneDescription>,
    pub params: ShootingParameters,
    /// Incremented on every committed parameter change.
    pub revision: u64,
    pub report: Option<OptimizationReport>,
    pub jobs: BTreeMap<u64, Job>,
    pub space: Arc<SearchSpace>,
    pub out_dir: PathBuf,
    optimizing: bool,
    next_job: u64,
}

pub type SharedSession = Arc<RwLock<Session>>;

impl Session {
    pub fn new(scene: SceneDescription, params: ShootingParameters, space: SearchSpace, out_dir: PathBuf) -> Self {
        Session {
            scene: Arc::new(scene),
            params,
            revision: 0,
            report: None,
            jobs: BTreeMap::new(),
            space: Arc::new(space),
            out_dir,
            optimizing: false,
            next_job: 1,
        }
    }

    pub fn shared(self) -> SharedSession {
        Arc::new(RwLock::new(self))
    }

    fn add_job(&mut self, kind: JobKind) -> u64 {
        let id = self.next_job;
        self.next_job += 1;
        self.jobs.insert(
            id,
            Job {
                id,
                kind,
                state: JobState::Queued,
                progress: 0.0,
                result: None,
                error: None,
            },
        );
        id
    }

    fn job_mut(&mut self, id: u64) -> &mut Job {
        self.jobs.get_mut(&id).expect("jobs are never removed")
    }
}

fn read(s: &SharedSession) -> RwLockReadGuard<'_, Session> {
    s.read().unwrap_or_else(PoisonError::into_inner)
}

fn write(s: &SharedSession) -> RwLockWriteGuard<'_, Session> {
    s.write().unwrap_or_else(PoisonError::into_inner)
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    message: String,
    field: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
            field: None,
        }
    }

    fn bad(field: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
            field: Some(field.to_string()),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Validation { .. } | Error::Parse(_) | Error::TooFewFrames { .. } => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError {
            status,
            field: e.field().map(str::to_string),
            message: e.to_string(),
        }
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = match &self.field {
            Some(f) => json!({ "error": self.message, "field": f }),
            None => json!({ "error": self.message }),
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<T, ApiError>;

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> crate::Result<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
        .map_err(ApiError::from)
}

/// All API routes, plus the static directory (if any) as the fallback.
pub fn router(session: SharedSession, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/scene", get(get_scene))
        .route("/api/params", get(get_params).put(put_params))
        .route("/api/preview", get(get_preview))
        .route("/api/optimize", post(post_optimize))
        .route("/api/jobs/{id}", get(get_job))
        .route("/api/report", get(get_report))
        .route("/api/timelapse", post(post_timelapse))
        .route("/api/score", get(get_score))
        .route("/api/export/robotplan", get(get_robotplan))
        .with_state(session);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Binds `addr` and serves until Ctrl-C.
pub async fn serve(session: Session, addr: SocketAddr, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let app = router(session.shared(), static_dir);
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn get_scene(State(s): State<SharedSession>) -> Json<serde_json::Value> {
    let scene = read(&s).scene.clone();
    let b = scene.bounds();
    let landmarks: Vec<_> = scene
        .landmarks()
        .map(|l| json!({ "center": l.center, "weight": l.weight }))
        .collect();
    let solids: Vec<_> = scene
        .solids
        .iter()
        .map(|s| json!({ "center": s.center, "size": s.size, "landmark": s.landmark.is_some() }))
        .collect();
    Json(json!({
        "name": scene.name,
        "georef": scene.georef,
        "bounds": { "x_min": b.x_min, "x_max": b.x_max, "y_min": b.y_min, "y_max": b.y_max },
        "reachable": scene.reachable,
        "landmarks": landmarks,
        "solids": solids,
    }))
}

fn params_response(params: &ShootingParameters, revision: u64) -> Response {
    let mut resp = Json(params).into_response();
    resp.headers_mut()
        .insert(REVISION_HEADER, HeaderValue::from(revision));
    resp
}

async fn get_params(State(s): State<SharedSession>) -> Response {
    let session = read(&s);
    params_response(&session.params, session.revision)
}

async fn put_params(State(s): State<SharedSession>, headers: HeaderMap, body: Bytes) -> ApiResult<Response> {
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "body is not UTF-8"))?;
    let params = parse_params(text)?;
    let expected = match headers.get(REVISION_HEADER) {
        Some(v) => Some(
            v.to_str()
                .ok()
                .and_then(|v| v.parse::<u64>().ok())
                .ok_or_else(|| ApiError::bad(REVISION_HEADER, "must be an integer"))?,
        ),
        None => None,
    };
    let scene = read(&s).scene.clone();
    params.validate(&scene)?;
    let mut session = write(&s);
    if session.optimizing {
        return Err(ApiError::new(StatusCode::CONFLICT, "an optimization job is running"));
    }
    if let Some(rev) = expected.filter(|r| *r != session.revision) {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("revision {rev} is stale; current is {}", session.revision),
        ));
    }
    session.params = params;
    session.revision += 1;
    Ok(params_response(&session.params, session.revision))
}

#[derive(Debug, Deserialize)]
struct PreviewQuery {
    time: Option<String>,
    w: Option<u32>,
    h: Option<u32>,
}

async fn get_preview(
    State(s): State<SharedSession>,
    query: std::result::Result<Query<PreviewQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(q) = query?;
    let (scene, params) = {
        let session = read(&s);
        (session.scene.clone(), session.params)
    };
    let t = match &q.time {
        Some(text) => parse_timestamp(text).ok_or_else(|| ApiError::bad("time", "not an ISO-8601 timestamp"))?,
        None => params.timewarp.start,
    };
    let w = q.w.unwrap_or(MAX_PREVIEW.0);
    let h = q.h.unwrap_or(MAX_PREVIEW.1);
    if !(MIN_PREVIEW..=MAX_PREVIEW.0).contains(&w) {
        return Err(ApiError::bad("w", format!("must lie in [{MIN_PREVIEW}, {}]", MAX_PREVIEW.0)));
    }
    if !(MIN_PREVIEW..=MAX_PREVIEW.1).contains(&h) {
        return Err(ApiError::bad("h", format!("must lie in [{MIN_PREVIEW}, {}]", MAX_PREVIEW.1)));
    }
    let settings = RenderSettings {
        exposure_mode: ExposureMode::Auto { jitter_sigma: 0.0 },
        ..RenderSettings::probe().with_size(w, h)
    };
    let (png, mean) = blocking(move || {
        let pose = params.pose_at_time(&scene, &t)?;
        let frame = render_frame(&scene, &pose, &t, &settings)?;
        Ok((crate::postproc::encode_png(&frame)?, frame.mean_luminance()))
    })
    .await?;
    let mut resp = ([(header::CONTENT_TYPE, "image/png")], png).into_response();
    resp.headers_mut().insert(
        "x-mean-luminance",
        HeaderValue::from_str(&format!("{mean:.6}")).expect("ascii"),
    );
    Ok(resp)
}

#[derive(Debug, Deserialize)]
struct OptimizeQuery {
    stages: Option<String>,
    seed: Option<u64>,
}

fn accepted(id: u64) -> Response {
    (
        StatusCode::ACCEPTED,
        [(header::LOCATION, format!("/api/jobs/{id}"))],
        Json(json!({ "id": id, "state": JobState::Queued })),
    )
        .into_response()
}

async fn post_optimize(
    State(s): State<SharedSession>,
    query: std::result::Result<Query<OptimizeQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(q) = query?;
    let stages = Stages::parse(q.stages.as_deref().unwrap_or("ivt"))?;
    let seed = q.seed.unwrap_or(0);
    let (id, scene, space) = {
        let mut session = write(&s);
        if session.optimizing {
            return Err(ApiError::new(StatusCode::CONFLICT, "an optimization job is already running"));
        }
        session.optimizing = true;
        let id = session.add_job(JobKind::Optimize);
        (id, session.scene.clone(), session.space.clone())
    };
    tracing::info!(job = id, %stages, seed, "optimize job queued");
    let shared = s.clone();
    tokio::task::spawn_blocking(move || {
        write(&shared).job_mut(id).state = JobState::Running;
        let outcome = catch_unwind(AssertUnwindSafe(|| {
            let optimizer = Optimizer::new(&scene, &space, &HeuristicModel)?;
            optimizer.run(stages, seed, &mut |p| write(&shared).job_mut(id).progress = p)
        }));
        let mut session = write(&shared);
        session.optimizing = false;
        match outcome {
            Ok(Ok((params, report))) => {
                session.params = params;
                session.report = Some(report);
                session.revision += 1;
                let job = session.job_mut(id);
                job.state = JobState::Done;
                job.progress = 1.0;
                job.result = Some("/api/params".into());
                tracing::info!(job = id, "optimize job done");
            }
            Ok(Err(e)) => fail(session.job_mut(id), e.to_string()),
            Err(_) => fail(session.job_mut(id), "optimizer panicked".into()),
        }
    });
    Ok(accepted(id))
}

fn fail(job: &mut Job, message: String) {
    tracing::warn!(job = job.id, "job failed: {message}");
    job.state = JobState::Failed;
    job.error = Some(message);
}

async fn get_job(State(s): State<SharedSession>, Path(id): Path<u64>) -> ApiResult<Json<Job>> {
    read(&s)
        .jobs
        .get(&id)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no job {id}")))
}

async fn get_report(State(s): State<SharedSession>) -> ApiResult<Json<OptimizationReport>> {
    read(&s)
        .report
        .clone()
        .map(Json)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "no optimization has run"))
}

/// Body of `POST /api/timelapse`; every field is optional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimelapseRequest {
    pub width: u32,
    pub height: u32,
    pub jitter_sigma: f64,
    pub seed: u64,
    pub deflicker: DeflickerConfig,
}

impl Default for TimelapseRequest {
    fn default() -> Self {
        TimelapseRequest {
            width: MAX_PREVIEW.0,
            height: MAX_PREVIEW.1,
            jitter_sigma: 0.1,
            seed: 0,
            deflicker: DeflickerConfig::default(),
        }
    }
}

async fn post_timelapse(State(s): State<SharedSession>, body: Bytes) -> ApiResult<Response> {
    let req: TimelapseRequest = if body.iter().all(u8::is_ascii_whitespace) {
        TimelapseRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?
    };
    let settings = RenderSettings::final_output(req.jitter_sigma, req.seed).with_size(req.width, req.height);
    settings.validate()?;
    req.deflicker.validate()?;
    let (id, scene, params, dir) = {
        let mut session = write(&s);
        let id = session.add_job(JobKind::Timelapse);
        let dir = session.out_dir.join(format!("timelapse_{id:04}"));
        (id, session.scene.clone(), session.params, dir)
    };
    tracing::info!(job = id, dir = %dir.display(), "timelapse job queued");
    let shared = s.clone();
    tokio::task::spawn_blocking(move || {
        write(&shared).job_mut(id).state = JobState::Running;
        let outcome = catch_unwind(AssertUnwindSafe(|| -> crate::Result<()> {
            let raw = render_sequence(&scene, &params, &settings)?;
            write(&shared).job_mut(id).progress = 0.7;
            let mut seq = deflicker(&raw, &req.deflicker)?;
            seq.score = Some(assess_detailed(&HeuristicModel, &seq, &scene)?.quality);
            write(&shared).job_mut(id).progress = 0.9;
            write_output(&seq, &dir)?;
            let scene_path = dir.join(SCENE_FILE);
            std::fs::write(&scene_path, serialize_scene(&scene) + "\n").map_err(|e| Error::io(&scene_path, e))
        }));
        let mut session = write(&shared);
        let job = session.job_mut(id);
        match outcome {
            Ok(Ok(())) => {
                job.state = JobState::Done;
                job.progress = 1.0;
                job.result = Some(dir.display().to_string());
                tracing::info!(job = id, "timelapse job done");
            }
            Ok(Err(e)) => fail(job, e.to_string()),
            Err(_) => fail(job, "renderer panicked".into()),
        }
    });
    Ok(accepted(id))
}

async fn get_score(State(s): State<SharedSession>) -> ApiResult<Response> {
    let (scene, params, space) = {
        let session = read(&s);
        (session.scene.clone(), session.params, session.space.clone())
    };
    let report = blocking(move || {
        let seq = probe_sequence(&scene, &params, &space.probe.render_settings(), space.probe.sequence_frames)?;
        assess_detailed(&HeuristicModel, &seq, &scene)
    })
    .await?;
    Ok(Json(report).into_response())
}

#[derive(Debug, Deserialize)]
struct ExportQuery {
    lat0: Option<f64>,
    lon0: Option<f64>,
    alt0: Option<f64>,
    heading: Option<f64>,
    waypoints: Option<usize>,
}

async fn get_robotplan(
    State(s): State<SharedSession>,
    query: std::result::Result<Query<ExportQuery>, QueryRejection>,
) -> ApiResult<Response> {
    let Query(q) = query?;
    let (scene, params) = {
        let session = read(&s);
        (session.scene.clone(), session.params)
    };
    let g = scene.georef;
    let georef = GeoReference {
        lat0: q.lat0.unwrap_or(g.lat0),
        lon0: q.lon0.unwrap_or(g.lon0),
        alt0: q.alt0.unwrap_or(g.alt0),
        heading_deg: q.heading.unwrap_or(g.heading_deg),
    };
    let plan = compile_plan(&scene, &params, &georef, q.waypoints.unwrap_or(DEFAULT_WAYPOINTS))?;
    Ok((
        [
            (header::CONTENT_TYPE, "application/json"),
            (header::CONTENT_DISPOSITION, "attachment; filename=\"robot_plan.json\""),
        ],
        serialize_plan(&plan),
    )
        .into_response())
}
