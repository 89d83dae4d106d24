use serde::{Deserialize, Serialize};

use crate::cnl::{ControlledSentence, SlotKind};
use crate::development::ExpansionArtifact;
use crate::extraction::{Answer, RequirementField};
use crate::translation::TranslationCandidate;

use super::Phase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Actor {
    Instructor,
    Assistant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PedagogyOrigin {
    /// Composed by the assistant from the requirement document.
    Composed,
    /// A slot edited by the instructor.
    Edited,
}

/// What happened. Serialized as `"action"` plus `"payload"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", content = "payload")]
pub enum Change {
    AnswerIngested {
        field: RequirementField,
        answer: Answer,
    },
    OptionsProposed {
        field: RequirementField,
        options: Vec<String>,
    },
    PedagogySentenceComposed {
        version: String,
        sentence: ControlledSentence,
        origin: PedagogyOrigin,
    },
    CandidateGenerated {
        candidate: TranslationCandidate,
    },
    SlotEdited {
        kind: SlotKind,
        candidate: TranslationCandidate,
    },
    SlotRegenerated {
        kind: SlotKind,
        candidate: TranslationCandidate,
    },
    CandidateAccepted {
        candidate_id: String,
        revision: u32,
        artifact: ExpansionArtifact,
    },
    AcceptanceCleared {
        candidate_id: String,
        reason: String,
    },
    SentenceRefined {
        instruction: String,
        artifact: ExpansionArtifact,
    },
    ArtifactZoomed {
        artifact: ExpansionArtifact,
    },
    PhaseAdvanced {
        from: Phase,
        to: Phase,
    },
}

impl Change {
    pub fn action(&self) -> &'static str {
        match self {
            Change::AnswerIngested { .. } => "AnswerIngested",
            Change::OptionsProposed { .. } => "OptionsProposed",
            Change::PedagogySentenceComposed { .. } => "PedagogySentenceComposed",
            Change::CandidateGenerated { .. } => "CandidateGenerated",
            Change::SlotEdited { .. } => "SlotEdited",
            Change::SlotRegenerated { .. } => "SlotRegenerated",
            Change::CandidateAccepted { .. } => "CandidateAccepted",
            Change::AcceptanceCleared { .. } => "AcceptanceCleared",
            Change::SentenceRefined { .. } => "SentenceRefined",
            Change::ArtifactZoomed { .. } => "ArtifactZoomed",
            Change::PhaseAdvanced { .. } => "PhaseAdvanced",
        }
    }

    /// Reference of the record the change touches.
    pub fn subject(&self) -> String {
        match self {
            Change::AnswerIngested { field, .. } => format!("answer:{field}"),
            Change::OptionsProposed { field, .. } => format!("options:{field}"),
            Change::PedagogySentenceComposed { version, .. } => format!("pedagogy:{version}"),
            Change::CandidateGenerated { candidate }
            | Change::SlotEdited { candidate, .. }
            | Change::SlotRegenerated { candidate, .. } => format!("candidate:{}", candidate.id),
            Change::AcceptanceCleared { candidate_id, .. } => format!("candidate:{candidate_id}"),
            Change::CandidateAccepted { artifact, .. }
            | Change::SentenceRefined { artifact, .. }
            | Change::ArtifactZoomed { artifact } => format!("artifact:{}", artifact.id),
            Change::PhaseAdvanced { .. } => "phase".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectEvent {
    pub sequence: u64,
    /// RFC 3339, UTC.
    pub timestamp: String,
    pub actor: Actor,
    pub subject: String,
    #[serde(flatten)]
    pub change: Change,
}
