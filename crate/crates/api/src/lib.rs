//! HTTP interface to a [`Workbench`].
//!
//! Every error body is an [`ApiError`] with a stable `code`. Handlers hold
//! no state of their own; all of it lives in the project files.

mod error;
mod views;

use std::future::Future;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::net::TcpListener;

use pedforge_core::store::FORMAT;
use pedforge_core::translation::DEFAULT_CANDIDATE_COUNT;
use pedforge_core::{
    parse_sentence, ExpansionLevel, Phase, Register, RequirementField, SlotKind, TranslationCandidate, Workbench,
    WorkbenchError,
};

pub use error::{status_for, ApiError, ApiJson};
pub use views::{mapping_rows, ArtifactView, CandidateView, MappingRow, PedagogyView, ProjectView, SentenceView};

type AppState = Arc<Workbench>;
type ApiResult = Result<Response, ApiError>;

/// Runs blocking workbench calls off the async executor.
async fn blocking<T, F>(wb: &AppState, f: F) -> Result<T, ApiError>
where
    F: FnOnce(&Workbench) -> Result<T, WorkbenchError> + Send + 'static,
    T: Send + 'static,
{
    let wb = wb.clone();
    tokio::task::spawn_blocking(move || f(&wb))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
        .map_err(ApiError::from)
}

fn ok(value: impl serde::Serialize) -> ApiResult {
    Ok(Json(value).into_response())
}

fn created(value: impl serde::Serialize) -> ApiResult {
    Ok((StatusCode::CREATED, Json(value)).into_response())
}

fn slot_kind(name: &str) -> Result<SlotKind, ApiError> {
    SlotKind::from_name(name).ok_or_else(|| ApiError::validation(format!("unknown slot kind `{name}`")))
}

fn field(name: &str) -> Result<RequirementField, ApiError> {
    RequirementField::from_name(name).ok_or_else(|| ApiError::validation(format!("unknown requirement field `{name}`")))
}

fn project_view(wb: &Workbench, id: &str) -> Result<ProjectView, WorkbenchError> {
    let p = wb.project(id)?;
    let next = wb.catalog().next_question(&p.state.document);
    Ok(ProjectView::new(&p, next, wb.load_warnings(id)?))
}

pub fn app(workbench: Arc<Workbench>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/mapping-table", get(mapping_table))
        .route("/sentences/parse", post(parse))
        .route("/projects", post(create_project).get(list_projects))
        .route("/projects/{id}", get(get_project))
        .route("/projects/{id}/question", get(question))
        .route("/projects/{id}/answers", post(answer))
        .route("/projects/{id}/options/{field}", get(options))
        .route("/projects/{id}/pedagogy-sentence", post(compose).get(get_pedagogy))
        .route("/projects/{id}/pedagogy-sentence/slots/{kind}", patch(edit_pedagogy))
        .route("/projects/{id}/candidates", post(candidates).get(list_candidates))
        .route(
            "/projects/{id}/candidates/{cid}/slots/{kind}/regenerate",
            post(regenerate),
        )
        .route("/projects/{id}/candidates/{cid}/slots/{kind}", patch(edit_slot))
        .route("/projects/{id}/candidates/{cid}/alignment", get(alignment))
        .route("/projects/{id}/candidates/{cid}/accept", post(accept))
        .route("/projects/{id}/refine", post(refine))
        .route("/projects/{id}/artifacts/{aid}", get(artifact))
        .route("/projects/{id}/artifacts/{aid}/zoom", post(zoom))
        .route("/projects/{id}/artifacts/{aid}/export", get(export))
        .route("/projects/{id}/phase", post(phase))
        .route("/projects/{id}/trace/{reference}", get(trace))
        .route("/projects/{id}/events", get(events))
        .fallback(|| async { ApiError::not_found("no such route") })
        .with_state(workbench)
}

/// Serves `router` until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    router: Router,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!(%addr, "listening");
    }
    axum::serve(listener, router).with_graceful_shutdown(shutdown).await
}

async fn health(State(wb): State<AppState>) -> ApiResult {
    ok(json!({ "status": "ok", "format": FORMAT, "provider": wb.gateway().provider_name() }))
}

async fn mapping_table() -> ApiResult {
    ok(mapping_rows())
}

#[derive(Deserialize)]
struct ParseBody {
    text: String,
    register: Register,
}

async fn parse(ApiJson(body): ApiJson<ParseBody>) -> ApiResult {
    match parse_sentence(&body.text, body.register) {
        Ok(s) => ok(SentenceView::new(&s)),
        Err(e) => Err(ApiError {
            detail: Some(serde_json::to_value(&e).unwrap_or(Value::Null)),
            ..ApiError::validation(e.to_string())
        }),
    }
}

async fn create_project(State(wb): State<AppState>) -> ApiResult {
    let view = blocking(&wb, |wb| {
        let p = wb.create_project()?;
        project_view(wb, &p.id)
    })
    .await?;
    created(view)
}

async fn list_projects(State(wb): State<AppState>) -> ApiResult {
    let ids = blocking(&wb, |wb| Ok(wb.store().list()?)).await?;
    ok(json!({ "projects": ids }))
}

async fn get_project(State(wb): State<AppState>, Path(id): Path<String>) -> ApiResult {
    ok(blocking(&wb, move |wb| project_view(wb, &id)).await?)
}

async fn question(State(wb): State<AppState>, Path(id): Path<String>) -> ApiResult {
    ok(blocking(&wb, move |wb| wb.next_question(&id)).await?)
}

#[derive(Deserialize)]
struct AnswerBody {
    field: String,
    text: String,
}

async fn answer(State(wb): State<AppState>, Path(id): Path<String>, ApiJson(body): ApiJson<AnswerBody>) -> ApiResult {
    let f = field(&body.field)?;
    let (answer, next) = blocking(&wb, move |wb| wb.submit_answer(&id, f, &body.text)).await?;
    ok(json!({ "field": f, "answer": answer, "next_question": next }))
}

async fn options(State(wb): State<AppState>, Path((id, name)): Path<(String, String)>) -> ApiResult {
    let f = field(&name)?;
    ok(blocking(&wb, move |wb| wb.propose_options(&id, f)).await?)
}

async fn compose(State(wb): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let v = blocking(&wb, move |wb| wb.compose_pedagogy(&id)).await?;
    created(PedagogyView::new(&v))
}

async fn get_pedagogy(State(wb): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let p = blocking(&wb, move |wb| wb.project(&id)).await?;
    match p.state.current_pedagogy() {
        Some(v) => ok(PedagogyView::new(v)),
        None => Err(WorkbenchError::NoPedagogySentence.into()),
    }
}

#[derive(Deserialize)]
struct SlotTextBody {
    text: String,
    #[serde(default)]
    rationale: Option<String>,
}

async fn edit_pedagogy(
    State(wb): State<AppState>,
    Path((id, kind)): Path<(String, String)>,
    ApiJson(body): ApiJson<SlotTextBody>,
) -> ApiResult {
    let kind = slot_kind(&kind)?;
    let v = blocking(&wb, move |wb| wb.edit_pedagogy_slot(&id, kind, &body.text)).await?;
    ok(PedagogyView::new(&v))
}

#[derive(Deserialize, Default)]
struct CandidatesBody {
    #[serde(default)]
    n: Option<usize>,
    /// Instructor-written candidate instead of generation.
    #[serde(default)]
    sentence: Option<String>,
    #[serde(default)]
    rationales: Option<std::collections::BTreeMap<String, String>>,
}

async fn candidates(State(wb): State<AppState>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let body: CandidatesBody = if body.iter().all(u8::is_ascii_whitespace) {
        CandidatesBody::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::validation(format!("invalid request body: {e}")))?
    };
    let views = match body.sentence {
        Some(sentence) => {
            let mut rationales = Vec::new();
            for (k, text) in body.rationales.unwrap_or_default() {
                rationales.push((slot_kind(&k)?, text));
            }
            blocking(&wb, move |wb| {
                let c = wb.author_candidate(&id, &sentence, &rationales)?;
                candidate_views(wb, &id, &[c])
            })
            .await?
        }
        None => {
            let n = body.n.unwrap_or(DEFAULT_CANDIDATE_COUNT);
            blocking(&wb, move |wb| {
                let made = wb.generate_candidates(&id, n)?;
                candidate_views(wb, &id, &made)
            })
            .await?
        }
    };
    created(json!({ "candidates": views }))
}

/// Views of `made` aligned against the project's current pedagogy sentence.
fn candidate_views(
    wb: &Workbench,
    id: &str,
    made: &[TranslationCandidate],
) -> Result<Vec<CandidateView>, WorkbenchError> {
    let p = wb.project(id)?;
    let pedagogy = p.state.current_pedagogy().map(|v| &v.sentence);
    let accepted = p.state.candidates.accepted.as_deref();
    Ok(made
        .iter()
        .map(|c| CandidateView::new(c, pedagogy, accepted == Some(c.id.as_str())))
        .collect())
}

fn one_view(wb: &Workbench, id: &str, c: TranslationCandidate) -> Result<CandidateView, WorkbenchError> {
    Ok(candidate_views(wb, id, &[c])?.remove(0))
}

async fn list_candidates(State(wb): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let view = blocking(&wb, move |wb| project_view(wb, &id)).await?;
    ok(json!({ "candidates": view.candidates, "accepted": view.accepted }))
}

async fn regenerate(State(wb): State<AppState>, Path((id, cid, kind)): Path<(String, String, String)>) -> ApiResult {
    let kind = slot_kind(&kind)?;
    ok(blocking(&wb, move |wb| {
        let c = wb.regenerate_slot(&id, &cid, kind)?;
        one_view(wb, &id, c)
    })
    .await?)
}

async fn edit_slot(
    State(wb): State<AppState>,
    Path((id, cid, kind)): Path<(String, String, String)>,
    ApiJson(body): ApiJson<SlotTextBody>,
) -> ApiResult {
    let kind = slot_kind(&kind)?;
    ok(blocking(&wb, move |wb| {
        let c = wb.edit_candidate_slot(&id, &cid, kind, &body.text, body.rationale.as_deref())?;
        one_view(wb, &id, c)
    })
    .await?)
}

async fn alignment(State(wb): State<AppState>, Path((id, cid)): Path<(String, String)>) -> ApiResult {
    ok(blocking(&wb, move |wb| wb.alignment(&id, &cid)).await?)
}

async fn accept(State(wb): State<AppState>, Path((id, cid)): Path<(String, String)>) -> ApiResult {
    let artifact = blocking(&wb, move |wb| wb.accept_candidate(&id, &cid)).await?;
    ok(json!({ "accepted": artifact.source_candidate, "sentence_artifact": ArtifactView::new(&artifact) }))
}

#[derive(Deserialize)]
struct RefineBody {
    instruction: String,
}

async fn refine(State(wb): State<AppState>, Path(id): Path<String>, ApiJson(body): ApiJson<RefineBody>) -> ApiResult {
    let a = blocking(&wb, move |wb| wb.refine(&id, &body.instruction)).await?;
    created(ArtifactView::new(&a))
}

async fn artifact(State(wb): State<AppState>, Path((id, aid)): Path<(String, String)>) -> ApiResult {
    let a = blocking(&wb, move |wb| wb.artifact(&id, &aid)).await?;
    ok(ArtifactView::new(&a))
}

async fn zoom(State(wb): State<AppState>, Path((id, aid)): Path<(String, String)>) -> ApiResult {
    let a = blocking(&wb, move |wb| wb.zoom(&id, &aid)).await?;
    created(ArtifactView::new(&a))
}

async fn export(State(wb): State<AppState>, Path((id, aid)): Path<(String, String)>) -> ApiResult {
    let a = blocking(&wb, move |wb| wb.artifact(&id, &aid)).await?;
    let extension = match a.level {
        ExpansionLevel::Pseudocode => "pseudo.txt",
        _ => "txt",
    };
    let disposition = format!(
        "attachment; filename=\"{}-{}.{extension}\"",
        a.id,
        a.level.to_string().to_lowercase()
    );
    Ok((
        [
            (header::CONTENT_TYPE, "text/plain; charset=utf-8".to_string()),
            (header::CONTENT_DISPOSITION, disposition),
        ],
        a.content,
    )
        .into_response())
}

#[derive(Deserialize)]
struct PhaseBody {
    phase: String,
}

async fn phase(State(wb): State<AppState>, Path(id): Path<String>, ApiJson(body): ApiJson<PhaseBody>) -> ApiResult {
    let target =
        Phase::from_name(&body.phase).ok_or_else(|| ApiError::validation(format!("unknown phase `{}`", body.phase)))?;
    let phase = blocking(&wb, move |wb| wb.advance_phase(&id, target)).await?;
    ok(json!({ "phase": phase }))
}

async fn trace(State(wb): State<AppState>, Path((id, reference)): Path<(String, String)>) -> ApiResult {
    ok(blocking(&wb, move |wb| wb.trace(&id, &reference)).await?)
}

async fn events(State(wb): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let events = blocking(&wb, move |wb| wb.events(&id)).await?;
    ok(json!({ "events": events }))
}
