use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use etr_core::agreement::{AnnotationRecord, Level, Questionnaire};
use serde::{Deserialize, Serialize};
use tracing::{info, warn};

use crate::campaign::{constant_time_eq, CampaignSpec};
use crate::error::ServiceError;
use crate::store::{AnnotatorProgress, CampaignHandle, Store, Submission};

pub const ADMIN_TOKEN_ENV: &str = "ETR_ADMIN_TOKEN";

#[derive(Clone)]
pub struct AppState {
    store: Arc<Store>,
    admin_token: Option<Arc<str>>,
}

impl AppState {
    /// Without an admin token, requests that carry no annotator token are
    /// treated as admin requests.
    pub fn new(store: Arc<Store>, admin_token: Option<String>) -> Self {
        AppState {
            store,
            admin_token: admin_token.filter(|t| !t.is_empty()).map(Arc::from),
        }
    }

    pub fn store(&self) -> &Arc<Store> {
        &self.store
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/campaigns", post(create_campaign))
        .route("/campaigns/{id}", get(get_campaign))
        .route("/campaigns/{id}/assignments/{annotator}", get(get_assignment))
        .route("/campaigns/{id}/responses", post(submit_response))
        .route("/campaigns/{id}/progress", get(get_progress))
        .route("/campaigns/{id}/export", get(export))
        .route("/campaigns/{id}/agreement", get(agreement))
        .with_state(state)
}

pub async fn serve(state: AppState, addr: SocketAddr) -> std::io::Result<()> {
    if state.admin_token.is_none() {
        warn!("{ADMIN_TOKEN_ENV} is not set; admin routes are open to any caller without an annotator token");
    }
    let listener = tokio::net::TcpListener::bind(addr).await?;
    info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

pub struct ApiError(ServiceError);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError(e)
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    reasons: Vec<String>,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        use etr_core::Error as Core;
        let status = match &self.0 {
            ServiceError::UnknownCampaign(_) => StatusCode::NOT_FOUND,
            ServiceError::CampaignExists(_) | ServiceError::Conflict { .. } => StatusCode::CONFLICT,
            ServiceError::Unauthorized => StatusCode::UNAUTHORIZED,
            ServiceError::Forbidden => StatusCode::FORBIDDEN,
            ServiceError::Io { .. } | ServiceError::CorruptLog { .. } | ServiceError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
            ServiceError::Core(Core::Io { .. }) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        if status.is_server_error() {
            warn!("{}", self.0);
        }
        let reasons = match &self.0 {
            ServiceError::Rejected(r) => r.clone(),
            _ => Vec::new(),
        };
        let body = ErrorBody {
            error: self.0.to_string(),
            reasons,
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> Result<T, ServiceError> + Send + 'static,
    T: Send + 'static,
{
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError),
        Err(e) => Err(ApiError(ServiceError::Internal(format!("worker failed: {e}")))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Access {
    Admin,
    Annotator(String),
}

fn bearer(headers: &HeaderMap) -> Option<&str> {
    let value = headers.get(header::AUTHORIZATION)?.to_str().ok()?;
    let token = value.strip_prefix("Bearer ").or_else(|| value.strip_prefix("bearer "))?;
    Some(token.trim()).filter(|t| !t.is_empty())
}

impl AppState {
    fn is_admin(&self, token: Option<&str>) -> bool {
        match (&self.admin_token, token) {
            (Some(admin), Some(t)) => constant_time_eq(admin.as_bytes(), t.as_bytes()),
            (Some(_), None) => false,
            (None, _) => true,
        }
    }

    fn access(&self, headers: &HeaderMap, handle: &CampaignHandle) -> ApiResult<Access> {
        let token = bearer(headers);
        if let Some(id) = token.and_then(|t| handle.campaign().annotator_for_token(t)) {
            return Ok(Access::Annotator(id.to_string()));
        }
        if self.is_admin(token) {
            return Ok(Access::Admin);
        }
        Err(ApiError(ServiceError::Unauthorized))
    }

    fn require_admin(&self, headers: &HeaderMap, handle: &CampaignHandle) -> ApiResult<()> {
        match self.access(headers, handle)? {
            Access::Admin => Ok(()),
            Access::Annotator(_) => Err(ApiError(ServiceError::Forbidden)),
        }
    }

    async fn handle(&self, id: String) -> ApiResult<Arc<CampaignHandle>> {
        let store = self.store.clone();
        blocking(move || store.campaign(&id)).await
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct IssuedToken {
    pub annotator_id: String,
    pub token: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreatedCampaign {
    pub campaign_id: String,
    pub items_per_annotator: usize,
    pub annotators: Vec<IssuedToken>,
}

async fn create_campaign(
    State(state): State<AppState>,
    headers: HeaderMap,
    Json(spec): Json<CampaignSpec>,
) -> ApiResult<(StatusCode, Json<CreatedCampaign>)> {
    if !state.is_admin(bearer(&headers)) {
        return Err(ApiError(if bearer(&headers).is_some() {
            ServiceError::Forbidden
        } else {
            ServiceError::Unauthorized
        }));
    }
    let store = state.store.clone();
    let handle = blocking(move || store.create(spec)).await?;
    let c = handle.campaign();
    let body = CreatedCampaign {
        campaign_id: c.campaign_id.clone(),
        items_per_annotator: c.assignment.len(),
        annotators: c
            .roster
            .iter()
            .map(|a| IssuedToken {
                annotator_id: a.id.clone(),
                token: a.token.clone(),
            })
            .collect(),
    };
    Ok((StatusCode::CREATED, Json(body)))
}

/// Campaign summary; carries no tokens and no model labels.
#[derive(Debug, Serialize, Deserialize)]
pub struct CampaignView {
    pub campaign_id: String,
    pub questionnaire: Questionnaire,
    pub roster: Vec<String>,
    pub items_per_annotator: usize,
}

async fn get_campaign(State(state): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult<Json<CampaignView>> {
    let handle = state.handle(id).await?;
    state.access(&headers, &handle)?;
    let c = handle.campaign();
    Ok(Json(CampaignView {
        campaign_id: c.campaign_id.clone(),
        questionnaire: c.questionnaire.clone(),
        roster: c.roster.iter().map(|a| a.id.clone()).collect(),
        items_per_annotator: c.assignment.len(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemStatus {
    Pending,
    Done,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AssignedItem {
    pub item_id: String,
    pub source: String,
    pub candidate: String,
    pub status: ItemStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answers: Option<BTreeMap<String, Option<i64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Assignment {
    pub campaign_id: String,
    pub annotator_id: String,
    pub questionnaire: Questionnaire,
    pub items: Vec<AssignedItem>,
}

async fn get_assignment(
    State(state): State<AppState>,
    Path((id, annotator)): Path<(String, String)>,
    headers: HeaderMap,
) -> ApiResult<Json<Assignment>> {
    let handle = state.handle(id).await?;
    match state.access(&headers, &handle)? {
        Access::Annotator(who) if who != annotator => return Err(ApiError(ServiceError::Forbidden)),
        _ => {}
    }
    let c = handle.campaign();
    if c.annotator(&annotator).is_none() {
        return Err(ApiError(ServiceError::UnknownAnnotator(annotator)));
    }
    let snapshot = handle.state();
    let items = c
        .blind_items()
        .into_iter()
        .map(|b| {
            let done = snapshot.get(&annotator, &b.item_id);
            AssignedItem {
                status: if done.is_some() { ItemStatus::Done } else { ItemStatus::Pending },
                answers: done.map(|r| r.answers.clone()),
                item_id: b.item_id,
                source: b.source,
                candidate: b.candidate,
            }
        })
        .collect();
    Ok(Json(Assignment {
        campaign_id: c.campaign_id.clone(),
        annotator_id: annotator,
        questionnaire: c.questionnaire.clone(),
        items,
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SubmissionResult {
    pub status: Submission,
}

async fn submit_response(
    State(state): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
    Json(record): Json<AnnotationRecord>,
) -> ApiResult<(StatusCode, Json<SubmissionResult>)> {
    let handle = state.handle(id).await?;
    if let Access::Annotator(who) = state.access(&headers, &handle)? {
        if who != record.annotator_id {
            return Err(ApiError(ServiceError::Forbidden));
        }
    }
    let status = blocking(move || handle.submit(record)).await?;
    let code = match status {
        Submission::Accepted => StatusCode::CREATED,
        Submission::Duplicate => StatusCode::OK,
    };
    Ok((code, Json(SubmissionResult { status })))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Progress {
    pub campaign_id: String,
    pub items_per_annotator: usize,
    pub annotators: Vec<AnnotatorProgress>,
    pub complete: bool,
}

async fn get_progress(State(state): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult<Json<Progress>> {
    let handle = state.handle(id).await?;
    state.access(&headers, &handle)?;
    let annotators = handle.progress();
    Ok(Json(Progress {
        campaign_id: handle.campaign().campaign_id.clone(),
        items_per_annotator: handle.campaign().assignment.len(),
        complete: annotators.iter().all(|a| a.pending == 0),
        annotators,
    }))
}

async fn export(State(state): State<AppState>, Path(id): Path<String>, headers: HeaderMap) -> ApiResult<Response> {
    let handle = state.handle(id).await?;
    state.require_admin(&headers, &handle)?;
    let body = handle.export();
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
}

#[derive(Debug, Default, Deserialize)]
pub struct AgreementQuery {
    pub level: Option<String>,
    pub threshold: Option<i64>,
}

async fn agreement(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<AgreementQuery>,
    headers: HeaderMap,
) -> ApiResult<Response> {
    let handle = state.handle(id).await?;
    state.require_admin(&headers, &handle)?;
    let level = match q.level.as_deref().filter(|l| !l.is_empty()) {
        None => None,
        Some(l) => Some(l.parse::<Level>().map_err(|e| ApiError(e.into()))?),
    };
    let report = blocking(move || handle.agreement(level, q.threshold)).await?;
    Ok(Json(report).into_response())
}
