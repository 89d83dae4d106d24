//! Response bodies assembled from project state.

use std::collections::BTreeMap;

use serde::Serialize;

use pedforge_core::store::{PedagogyVersion, FORMAT};
use pedforge_core::{
    AlignmentReport, ChatTurn, ControlledSentence, DisplaySentence, ExpansionArtifact, NextQuestion, Phase, Project,
    RequirementDocument, RequirementField, SlotColor, SlotKind, TranslationCandidate, MAPPING_TABLE,
};

#[derive(Debug, Serialize)]
pub struct SentenceView {
    pub sentence: ControlledSentence,
    pub canonical: String,
    pub display: DisplaySentence,
}

impl SentenceView {
    pub fn new(sentence: &ControlledSentence) -> Self {
        SentenceView {
            sentence: sentence.clone(),
            canonical: sentence.canonical(),
            display: sentence.display(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PedagogyView {
    pub version: String,
    pub origin: pedforge_core::store::PedagogyOrigin,
    #[serde(flatten)]
    pub sentence: SentenceView,
}

impl PedagogyView {
    pub fn new(v: &PedagogyVersion) -> Self {
        PedagogyView {
            version: v.version.clone(),
            origin: v.origin,
            sentence: SentenceView::new(&v.sentence),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CandidateView {
    #[serde(flatten)]
    pub candidate: TranslationCandidate,
    pub display: DisplaySentence,
    pub canonical: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alignment: Option<AlignmentReport>,
    pub fully_aligned: bool,
    pub accepted: bool,
}

impl CandidateView {
    pub fn new(c: &TranslationCandidate, pedagogy: Option<&ControlledSentence>, accepted: bool) -> Self {
        let alignment = pedagogy.and_then(|p| c.alignment(p).ok());
        CandidateView {
            display: c.game_sentence.display(),
            canonical: c.game_sentence.canonical(),
            fully_aligned: alignment.as_ref().is_some_and(pedforge_core::is_fully_aligned),
            alignment,
            accepted,
            candidate: c.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ArtifactView {
    #[serde(flatten)]
    pub artifact: ExpansionArtifact,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub display: Option<DisplaySentence>,
    pub can_zoom: bool,
}

impl ArtifactView {
    pub fn new(a: &ExpansionArtifact) -> Self {
        ArtifactView {
            display: a.sentence().map(|s| s.display()),
            can_zoom: !a.outdated && a.level.next().is_some(),
            artifact: a.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct GateView {
    pub open: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct ProjectView {
    pub id: String,
    pub format: &'static str,
    pub phase: Phase,
    pub gates: BTreeMap<Phase, GateView>,
    pub document: RequirementDocument,
    pub next_question: NextQuestion,
    pub options: BTreeMap<RequirementField, Vec<String>>,
    pub pedagogy: Option<PedagogyView>,
    pub pedagogy_versions: usize,
    pub candidates: Vec<CandidateView>,
    pub accepted: Option<String>,
    pub current_sentence: Option<String>,
    pub artifacts: Vec<ArtifactView>,
    pub chat: Vec<ChatTurn>,
    pub last_sequence: u64,
    pub warnings: Vec<String>,
}

impl ProjectView {
    pub fn new(p: &Project, next_question: NextQuestion, warnings: Vec<String>) -> Self {
        let s = &p.state;
        let pedagogy = s.current_pedagogy();
        let gates = [Phase::Extraction, Phase::Translation, Phase::Development]
            .into_iter()
            .map(|target| {
                let gate = s.phase_gate(target);
                (
                    target,
                    GateView {
                        open: gate.is_ok(),
                        reason: gate.err(),
                    },
                )
            })
            .collect();
        ProjectView {
            id: p.id.clone(),
            format: FORMAT,
            phase: s.phase,
            gates,
            document: s.document.clone(),
            next_question,
            options: s.options.clone(),
            pedagogy: pedagogy.map(PedagogyView::new),
            pedagogy_versions: s.pedagogy.len(),
            candidates: s
                .candidates
                .candidates
                .iter()
                .map(|c| {
                    CandidateView::new(
                        c,
                        pedagogy.map(|v| &v.sentence),
                        s.candidates.accepted.as_deref() == Some(c.id.as_str()),
                    )
                })
                .collect(),
            accepted: s.candidates.accepted.clone(),
            current_sentence: s.current_sentence_artifact().map(|a| a.id.clone()),
            artifacts: s.artifacts.iter().map(ArtifactView::new).collect(),
            chat: s.chat.clone(),
            last_sequence: s.last_sequence,
            warnings,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MappingRow {
    pub kind: SlotKind,
    pub color: SlotColor,
    pub teaching_meaning: &'static str,
    pub game_meaning: &'static str,
}

pub fn mapping_rows() -> Vec<MappingRow> {
    MAPPING_TABLE
        .iter()
        .map(|r| MappingRow {
            kind: r.kind,
            color: r.kind.color(),
            teaching_meaning: r.teaching_meaning,
            game_meaning: r.game_meaning,
        })
        .collect()
}
