//! Project-level operations over the store and the gateway.
//!
//! Each mutation holds the project's writer lock, computes its events against
//! the current state (calling the provider if needed), applies them to a copy,
//! persists the copy and only then publishes it. Readers never wait on a
//! provider call.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnl::{ControlledSentence, SlotKind};
use crate::development::{self, DevelopmentError, ExpansionArtifact, ExpansionLevel, RefineContext};
use crate::extraction::{self, Answer, ElicitationCatalog, ExtractionError, NextQuestion, OptionSet, RequirementField};
use crate::gateway::{Gateway, GatewayError};
use crate::mapping::AlignmentReport;
use crate::store::{
    trace, Actor, Change, PedagogyOrigin, PedagogyVersion, Phase, Project, ProjectEvent, ProjectStore, StoreError,
    TraceChain,
};
use crate::translation::{self, TranslationCandidate, TranslationError};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum WorkbenchError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("{0}")]
    Validation(String),
    #[error("phase gate not satisfied: {0}")]
    GateNotSatisfied(String),
    #[error("candidate is not aligned (stale: {stale:?}, missing: {missing:?})")]
    NotAligned {
        stale: Vec<SlotKind>,
        missing: Vec<SlotKind>,
    },
    #[error("{0} is the top of the zoom ladder")]
    MaxDepth(ExpansionLevel),
    #[error("artifact {0} is outdated")]
    OutdatedArtifact(String),
    #[error("requirement document is incomplete: {0:?}")]
    IncompleteDocument(Vec<RequirementField>),
    #[error("no candidate has been accepted")]
    NoAcceptedCandidate,
    #[error("no pedagogy sentence has been composed")]
    NoPedagogySentence,
    #[error("provider failed after {attempts} attempts: {last_violation}")]
    ProviderFailure { attempts: u32, last_violation: String },
    #[error("storage failure: {0}")]
    StorageFailure(String),
    #[error("corrupt project file: {0}")]
    CorruptFile(String),
}

impl WorkbenchError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            WorkbenchError::NotFound(_) => "NOT_FOUND",
            WorkbenchError::Validation(_) => "VALIDATION",
            WorkbenchError::GateNotSatisfied(_) => "GATE_NOT_SATISFIED",
            WorkbenchError::NotAligned { .. } => "NOT_ALIGNED",
            WorkbenchError::MaxDepth(_) => "MAX_DEPTH",
            WorkbenchError::OutdatedArtifact(_) => "OUTDATED_ARTIFACT",
            WorkbenchError::IncompleteDocument(_) => "INCOMPLETE_DOCUMENT",
            WorkbenchError::NoAcceptedCandidate => "NO_ACCEPTED_CANDIDATE",
            WorkbenchError::NoPedagogySentence => "NO_PEDAGOGY_SENTENCE",
            WorkbenchError::ProviderFailure { .. } => "PROVIDER_FAILURE",
            WorkbenchError::StorageFailure(_) => "STORAGE_FAILURE",
            WorkbenchError::CorruptFile(_) => "CORRUPT_FILE",
        }
    }
}

impl From<GatewayError> for WorkbenchError {
    fn from(e: GatewayError) -> Self {
        match e {
            GatewayError::ProviderFailure {
                attempts,
                last_violation,
            } => WorkbenchError::ProviderFailure {
                attempts,
                last_violation,
            },
            GatewayError::InvalidSpec(m) => WorkbenchError::Validation(m),
        }
    }
}

impl From<StoreError> for WorkbenchError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(m) => WorkbenchError::NotFound(m),
            StoreError::Rejected(m) => WorkbenchError::Validation(m),
            StoreError::StorageFailure(m) => WorkbenchError::StorageFailure(m),
            StoreError::CorruptFile(m) => WorkbenchError::CorruptFile(m),
        }
    }
}

impl From<ExtractionError> for WorkbenchError {
    fn from(e: ExtractionError) -> Self {
        match e {
            ExtractionError::IncompleteDocument(open) => WorkbenchError::IncompleteDocument(open),
            ExtractionError::Gateway(g) => g.into(),
            ExtractionError::Catalog(m) => WorkbenchError::Validation(m),
        }
    }
}

impl From<TranslationError> for WorkbenchError {
    fn from(e: TranslationError) -> Self {
        match e {
            TranslationError::NotFound(id) => WorkbenchError::NotFound(format!("candidate {id}")),
            TranslationError::NotAligned { stale, missing } => WorkbenchError::NotAligned { stale, missing },
            TranslationError::NoPedagogySentence => WorkbenchError::NoPedagogySentence,
            TranslationError::Gateway(g) => g.into(),
            other => WorkbenchError::Validation(other.to_string()),
        }
    }
}

impl From<DevelopmentError> for WorkbenchError {
    fn from(e: DevelopmentError) -> Self {
        match e {
            DevelopmentError::NoAcceptedCandidate => WorkbenchError::NoAcceptedCandidate,
            DevelopmentError::MaxDepth(level) => WorkbenchError::MaxDepth(level),
            DevelopmentError::OutdatedArtifact(id) => WorkbenchError::OutdatedArtifact(id),
            DevelopmentError::EmptyInstruction => WorkbenchError::Validation("instruction is empty".into()),
            DevelopmentError::Gateway(g) => g.into(),
        }
    }
}

pub type WorkbenchResult<T> = Result<T, WorkbenchError>;

struct Handle {
    writer: Mutex<()>,
    current: RwLock<Arc<Project>>,
    warnings: Vec<String>,
}

type Planned<T> = (Vec<(Actor, Change)>, T);

pub struct Workbench {
    store: ProjectStore,
    gateway: Gateway,
    catalog: ElicitationCatalog,
    projects: Mutex<HashMap<String, Arc<Handle>>>,
}

fn lock_poisoned() -> WorkbenchError {
    WorkbenchError::StorageFailure("project lock poisoned".into())
}

impl Workbench {
    pub fn new(store: ProjectStore, gateway: Gateway) -> Self {
        Self::with_catalog(store, gateway, ElicitationCatalog::default())
    }

    pub fn with_catalog(store: ProjectStore, gateway: Gateway, catalog: ElicitationCatalog) -> Self {
        Workbench {
            store,
            gateway,
            catalog,
            projects: Mutex::new(HashMap::new()),
        }
    }

    pub fn gateway(&self) -> &Gateway {
        &self.gateway
    }

    pub fn catalog(&self) -> &ElicitationCatalog {
        &self.catalog
    }

    pub fn store(&self) -> &ProjectStore {
        &self.store
    }

    fn handle(&self, id: &str) -> WorkbenchResult<Arc<Handle>> {
        let mut projects = self.projects.lock().map_err(|_| lock_poisoned())?;
        if let Some(h) = projects.get(id) {
            return Ok(h.clone());
        }
        let (project, warnings) = self.store.load(id)?;
        let handle = Arc::new(Handle {
            writer: Mutex::new(()),
            current: RwLock::new(Arc::new(project)),
            warnings,
        });
        projects.insert(id.to_string(), handle.clone());
        Ok(handle)
    }

    pub fn create_project(&self) -> WorkbenchResult<Arc<Project>> {
        let project = Arc::new(self.store.create()?);
        let handle = Arc::new(Handle {
            writer: Mutex::new(()),
            current: RwLock::new(project.clone()),
            warnings: Vec::new(),
        });
        self.projects
            .lock()
            .map_err(|_| lock_poisoned())?
            .insert(project.id.clone(), handle);
        Ok(project)
    }

    pub fn project(&self, id: &str) -> WorkbenchResult<Arc<Project>> {
        let h = self.handle(id)?;
        let current = h.current.read().map_err(|_| lock_poisoned())?.clone();
        Ok(current)
    }

    /// Warnings raised when the project file was loaded.
    pub fn load_warnings(&self, id: &str) -> WorkbenchResult<Vec<String>> {
        Ok(self.handle(id)?.warnings.clone())
    }

    fn mutate<T>(&self, id: &str, plan: impl FnOnce(&Project) -> WorkbenchResult<Planned<T>>) -> WorkbenchResult<T> {
        let h = self.handle(id)?;
        let _writer = h.writer.lock().map_err(|_| lock_poisoned())?;
        let base = h.current.read().map_err(|_| lock_poisoned())?.clone();
        let (changes, out) = plan(&base)?;
        if changes.is_empty() {
            return Ok(out);
        }
        let mut next = (*base).clone();
        for (actor, change) in changes {
            next.append(actor, change)?;
        }
        self.store.save(&next)?;
        *h.current.write().map_err(|_| lock_poisoned())? = Arc::new(next);
        Ok(out)
    }

    pub fn next_question(&self, id: &str) -> WorkbenchResult<NextQuestion> {
        Ok(self.catalog.next_question(&self.project(id)?.state.document))
    }

    pub fn submit_answer(
        &self,
        id: &str,
        field: RequirementField,
        text: &str,
    ) -> WorkbenchResult<(Answer, NextQuestion)> {
        self.mutate(id, |p| {
            let answer = self.catalog.evaluate(field, text);
            let mut doc = p.state.document.clone();
            doc.set_answer(field, answer.clone());
            let next = self.catalog.next_question(&doc);
            Ok((
                vec![(
                    Actor::Instructor,
                    Change::AnswerIngested {
                        field,
                        answer: answer.clone(),
                    },
                )],
                (answer, next),
            ))
        })
    }

    pub fn propose_options(&self, id: &str, field: RequirementField) -> WorkbenchResult<OptionSet> {
        self.mutate(id, |p| {
            let set = extraction::propose_options(&self.gateway, &self.catalog, field, &p.state.document)?;
            Ok((
                vec![(
                    Actor::Assistant,
                    Change::OptionsProposed {
                        field,
                        options: set.options.clone(),
                    },
                )],
                set,
            ))
        })
    }

    pub fn compose_pedagogy(&self, id: &str) -> WorkbenchResult<PedagogyVersion> {
        self.mutate(id, |p| {
            let sentence = extraction::compose_pedagogy_sentence(&self.gateway, &p.state.document)?;
            let version = p.state.next_pedagogy_version();
            let mut changes = vec![(
                Actor::Assistant,
                Change::PedagogySentenceComposed {
                    version: version.clone(),
                    sentence: sentence.clone(),
                    origin: PedagogyOrigin::Composed,
                },
            )];
            changes.extend(demotions(p, &sentence, "pedagogy sentence recomposed"));
            Ok((changes, planned_version(p, version, sentence, PedagogyOrigin::Composed)))
        })
    }

    /// Instructor edit of one pedagogy slot. A standing acceptance is cleared
    /// and a project in Development moves back to Translation.
    pub fn edit_pedagogy_slot(&self, id: &str, kind: SlotKind, text: &str) -> WorkbenchResult<PedagogyVersion> {
        self.mutate(id, |p| {
            let current = p.state.current_pedagogy().ok_or(WorkbenchError::NoPedagogySentence)?;
            let sentence = current
                .sentence
                .with_slot(kind, text)
                .map_err(|e| WorkbenchError::Validation(format!("invalid {kind} text: {e}")))?;
            let version = p.state.next_pedagogy_version();
            let mut changes = vec![(
                Actor::Instructor,
                Change::PedagogySentenceComposed {
                    version: version.clone(),
                    sentence: sentence.clone(),
                    origin: PedagogyOrigin::Edited,
                },
            )];
            changes.extend(demotions(p, &sentence, &format!("pedagogy {kind} slot edited")));
            Ok((changes, planned_version(p, version, sentence, PedagogyOrigin::Edited)))
        })
    }

    fn current_pedagogy(p: &Project) -> WorkbenchResult<(ControlledSentence, String)> {
        let v = p.state.current_pedagogy().ok_or(WorkbenchError::NoPedagogySentence)?;
        Ok((v.sentence.clone(), v.version.clone()))
    }

    fn candidate(p: &Project, cid: &str) -> WorkbenchResult<TranslationCandidate> {
        p.state
            .candidates
            .get(cid)
            .cloned()
            .ok_or_else(|| WorkbenchError::NotFound(format!("candidate {cid}")))
    }

    pub fn generate_candidates(&self, id: &str, n: usize) -> WorkbenchResult<Vec<TranslationCandidate>> {
        self.mutate(id, |p| {
            let (pedagogy, version) = Self::current_pedagogy(p)?;
            let candidates = translation::generate_candidates(
                &self.gateway,
                &pedagogy,
                &version,
                n,
                p.state.next_candidate_number(),
            )?;
            let changes = candidates
                .iter()
                .map(|c| (Actor::Assistant, Change::CandidateGenerated { candidate: c.clone() }))
                .collect();
            Ok((changes, candidates))
        })
    }

    pub fn author_candidate(
        &self,
        id: &str,
        sentence: &str,
        rationales: &[(SlotKind, String)],
    ) -> WorkbenchResult<TranslationCandidate> {
        self.mutate(id, |p| {
            let (pedagogy, version) = Self::current_pedagogy(p)?;
            let c = translation::author_candidate(
                translation::candidate_id(p.state.next_candidate_number()),
                &pedagogy,
                &version,
                sentence,
                rationales,
            )?;
            Ok((
                vec![(Actor::Instructor, Change::CandidateGenerated { candidate: c.clone() })],
                c,
            ))
        })
    }

    pub fn regenerate_slot(&self, id: &str, cid: &str, kind: SlotKind) -> WorkbenchResult<TranslationCandidate> {
        self.mutate(id, |p| {
            let (pedagogy, version) = Self::current_pedagogy(p)?;
            let old = Self::candidate(p, cid)?;
            let c = translation::regenerate_slot(&self.gateway, &pedagogy, &version, &old, kind)?;
            let mut changes = vec![(
                Actor::Assistant,
                Change::SlotRegenerated {
                    kind,
                    candidate: c.clone(),
                },
            )];
            changes.extend(clear_if_accepted(
                p,
                cid,
                &format!("accepted candidate {kind} slot regenerated"),
            ));
            Ok((changes, c))
        })
    }

    pub fn edit_candidate_slot(
        &self,
        id: &str,
        cid: &str,
        kind: SlotKind,
        text: &str,
        rationale: Option<&str>,
    ) -> WorkbenchResult<TranslationCandidate> {
        self.mutate(id, |p| {
            let (pedagogy, version) = Self::current_pedagogy(p)?;
            let old = Self::candidate(p, cid)?;
            let c = translation::edit_slot(&pedagogy, &version, &old, kind, text, rationale)?;
            let mut changes = vec![(
                Actor::Instructor,
                Change::SlotEdited {
                    kind,
                    candidate: c.clone(),
                },
            )];
            changes.extend(clear_if_accepted(
                p,
                cid,
                &format!("accepted candidate {kind} slot edited"),
            ));
            Ok((changes, c))
        })
    }

    pub fn alignment(&self, id: &str, cid: &str) -> WorkbenchResult<AlignmentReport> {
        let p = self.project(id)?;
        let (pedagogy, _) = Self::current_pedagogy(&p)?;
        let c = Self::candidate(&p, cid)?;
        c.alignment(&pedagogy)
            .map_err(|e| WorkbenchError::Validation(e.to_string()))
    }

    /// Accepts a fully aligned candidate and opens the zoom ladder with its
    /// sentence. Accepting the already accepted revision changes nothing.
    pub fn accept_candidate(&self, id: &str, cid: &str) -> WorkbenchResult<ExpansionArtifact> {
        self.mutate(id, |p| {
            let (pedagogy, _) = Self::current_pedagogy(p)?;
            let c = Self::candidate(p, cid)?;
            translation::check_acceptance(&c, &pedagogy)?;
            let state = &p.state;
            if state.candidates.accepted.as_deref() == Some(cid) && state.accepted_revision == Some(c.revision) {
                if let Some(current) = state.current_sentence_artifact() {
                    return Ok((Vec::new(), current.clone()));
                }
            }
            let artifact = ExpansionArtifact {
                id: state.next_artifact_id(),
                level: ExpansionLevel::Sentence,
                content: c.game_sentence.canonical(),
                parent: None,
                source_candidate: c.id.clone(),
                source_revision: c.revision,
                previous: None,
                version: 1,
                outdated: false,
            };
            Ok((
                vec![(
                    Actor::Instructor,
                    Change::CandidateAccepted {
                        candidate_id: c.id.clone(),
                        revision: c.revision,
                        artifact: artifact.clone(),
                    },
                )],
                artifact,
            ))
        })
    }

    pub fn refine(&self, id: &str, instruction: &str) -> WorkbenchResult<ExpansionArtifact> {
        self.mutate(id, |p| {
            let state = &p.state;
            let accepted = state.accepted().ok_or(WorkbenchError::NoAcceptedCandidate)?;
            let (pedagogy, _) = Self::current_pedagogy(p)?;
            let current = state
                .current_sentence_artifact()
                .ok_or(WorkbenchError::NoAcceptedCandidate)?;
            let current_sentence = current
                .sentence()
                .ok_or_else(|| WorkbenchError::CorruptFile(format!("artifact {} holds no sentence", current.id)))?;
            let requirements = state.document.summary();
            let context = RefineContext {
                requirements: &requirements,
                pedagogy: &pedagogy,
                accepted: &accepted.game_sentence,
                current: &current_sentence,
                chat: &state.chat,
            };
            let sentence = development::refine_sentence(&self.gateway, context, instruction)?;
            let artifact = ExpansionArtifact {
                id: state.next_artifact_id(),
                level: ExpansionLevel::Sentence,
                content: sentence.canonical(),
                parent: None,
                source_candidate: current.source_candidate.clone(),
                source_revision: current.source_revision,
                previous: Some(current.id.clone()),
                version: current.version + 1,
                outdated: false,
            };
            Ok((
                vec![(
                    Actor::Assistant,
                    Change::SentenceRefined {
                        instruction: instruction.trim().to_string(),
                        artifact: artifact.clone(),
                    },
                )],
                artifact,
            ))
        })
    }

    pub fn zoom(&self, id: &str, aid: &str) -> WorkbenchResult<ExpansionArtifact> {
        self.mutate(id, |p| {
            let state = &p.state;
            let parent = state
                .artifact(aid)
                .ok_or_else(|| WorkbenchError::NotFound(format!("artifact {aid}")))?;
            let source = state
                .ladder_root(aid)
                .and_then(ExpansionArtifact::sentence)
                .ok_or_else(|| WorkbenchError::CorruptFile(format!("artifact {aid} has no sentence root")))?;
            let (level, content) = development::expand(&self.gateway, parent, &source)?;
            let artifact = ExpansionArtifact {
                id: state.next_artifact_id(),
                level,
                content,
                parent: Some(parent.id.clone()),
                source_candidate: parent.source_candidate.clone(),
                source_revision: parent.source_revision,
                previous: None,
                version: parent.version,
                outdated: false,
            };
            Ok((
                vec![(
                    Actor::Assistant,
                    Change::ArtifactZoomed {
                        artifact: artifact.clone(),
                    },
                )],
                artifact,
            ))
        })
    }

    pub fn advance_phase(&self, id: &str, target: Phase) -> WorkbenchResult<Phase> {
        self.mutate(id, |p| {
            let from = p.state.phase;
            if from == target {
                return Ok((Vec::new(), target));
            }
            p.state.phase_gate(target).map_err(WorkbenchError::GateNotSatisfied)?;
            Ok((
                vec![(Actor::Instructor, Change::PhaseAdvanced { from, to: target })],
                target,
            ))
        })
    }

    pub fn artifact(&self, id: &str, aid: &str) -> WorkbenchResult<ExpansionArtifact> {
        self.project(id)?
            .state
            .artifact(aid)
            .cloned()
            .ok_or_else(|| WorkbenchError::NotFound(format!("artifact {aid}")))
    }

    pub fn trace(&self, id: &str, reference: &str) -> WorkbenchResult<TraceChain> {
        let p = self.project(id)?;
        Ok(trace(&p, reference)?)
    }

    pub fn events(&self, id: &str) -> WorkbenchResult<Vec<ProjectEvent>> {
        Ok(self.project(id)?.events.clone())
    }
}

fn planned_version(
    p: &Project,
    version: String,
    sentence: ControlledSentence,
    origin: PedagogyOrigin,
) -> PedagogyVersion {
    let state = &p.state;
    let (grounding, previous) = match origin {
        PedagogyOrigin::Composed => (
            RequirementField::ALL
                .iter()
                .filter_map(|f| state.answer_sequences.get(f).copied())
                .collect(),
            None,
        ),
        PedagogyOrigin::Edited => (Vec::new(), state.current_pedagogy().map(|v| v.version.clone())),
    };
    PedagogyVersion {
        version,
        sentence,
        origin,
        sequence: state.last_sequence + 1,
        grounding,
        previous,
    }
}

/// Clears an acceptance the new pedagogy sentence no longer supports and
/// steps back out of Development.
fn demotions(p: &Project, pedagogy: &ControlledSentence, reason: &str) -> Vec<(Actor, Change)> {
    let state = &p.state;
    let mut out = Vec::new();
    if let Some(accepted) = state.accepted() {
        if translation::check_acceptance(accepted, pedagogy).is_err() {
            out.push((
                Actor::Instructor,
                Change::AcceptanceCleared {
                    candidate_id: accepted.id.clone(),
                    reason: reason.to_string(),
                },
            ));
            if state.phase == Phase::Development {
                out.push((
                    Actor::Instructor,
                    Change::PhaseAdvanced {
                        from: Phase::Development,
                        to: Phase::Translation,
                    },
                ));
            }
        }
    }
    out
}

fn clear_if_accepted(p: &Project, cid: &str, reason: &str) -> Vec<(Actor, Change)> {
    let state = &p.state;
    if state.candidates.accepted.as_deref() != Some(cid) {
        return Vec::new();
    }
    let mut out = vec![(
        Actor::Instructor,
        Change::AcceptanceCleared {
            candidate_id: cid.to_string(),
            reason: reason.to_string(),
        },
    )];
    if state.phase == Phase::Development {
        out.push((
            Actor::Instructor,
            Change::PhaseAdvanced {
                from: Phase::Development,
                to: Phase::Translation,
            },
        ));
    }
    out
}
