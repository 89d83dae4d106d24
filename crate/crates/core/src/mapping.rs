//! Row-wise correspondence between the teaching and game registers, and the
//! alignment check that ties each game slot back to its pedagogy slot.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnl::{ControlledSentence, Register, SlotKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MappingDirection {
    TeachingToGame,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MappingRule {
    pub kind: SlotKind,
    pub teaching_meaning: &'static str,
    pub game_meaning: &'static str,
    pub direction: MappingDirection,
}

pub const MAPPING_TABLE: [MappingRule; 4] = [
    MappingRule {
        kind: SlotKind::Adverb,
        teaching_meaning: "Specifies performance requirements for the targeted ability.",
        game_meaning: "Rules and parameters that configure difficulty and success conditions.",
        direction: MappingDirection::TeachingToGame,
    },
    MappingRule {
        kind: SlotKind::Verb,
        teaching_meaning: "Expresses the targeted teaching ability as an observable action.",
        game_meaning: "Game mechanics that define the primary player action and interaction pattern.",
        direction: MappingDirection::TeachingToGame,
    },
    MappingRule {
        kind: SlotKind::Noun,
        teaching_meaning: "Denotes the focal teaching concept or content domain.",
        game_meaning: "Content models and in-game artifacts that instantiate the concept.",
        direction: MappingDirection::TeachingToGame,
    },
    MappingRule {
        kind: SlotKind::Adjective,
        teaching_meaning: "Characterizes the learning context, realism level, and instructional tone.",
        game_meaning: "Aesthetic and contextual profiles that define the game world and framing.",
        direction: MappingDirection::TeachingToGame,
    },
];

pub fn mapping_row(kind: SlotKind) -> MappingRule {
    MAPPING_TABLE[kind.index()]
}

/// Explanation linking one game slot to the same-kind pedagogy slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRationale {
    pub kind: SlotKind,
    pub explanation: String,
    /// The pedagogy slot text this rationale was written against.
    pub pedagogy_slot_text: String,
    /// Set when the game slot was edited without a fresh rationale.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub needs_review: bool,
}

impl SlotRationale {
    pub fn new(kind: SlotKind, explanation: impl Into<String>, pedagogy_slot_text: impl Into<String>) -> Self {
        SlotRationale {
            kind,
            explanation: explanation.into(),
            pedagogy_slot_text: pedagogy_slot_text.into(),
            needs_review: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SlotAlignment {
    Aligned {
        rationale: SlotRationale,
    },
    MissingRationale,
    StaleReference {
        cited: String,
        current: String,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        game_side_edited: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentReport {
    pub adverb: SlotAlignment,
    pub verb: SlotAlignment,
    pub noun: SlotAlignment,
    pub adjective: SlotAlignment,
}

impl AlignmentReport {
    pub fn get(&self, kind: SlotKind) -> &SlotAlignment {
        match kind {
            SlotKind::Adverb => &self.adverb,
            SlotKind::Verb => &self.verb,
            SlotKind::Noun => &self.noun,
            SlotKind::Adjective => &self.adjective,
        }
    }

    pub fn stale_kinds(&self) -> Vec<SlotKind> {
        SlotKind::ALL
            .into_iter()
            .filter(|k| matches!(self.get(*k), SlotAlignment::StaleReference { .. }))
            .collect()
    }

    pub fn missing_kinds(&self) -> Vec<SlotKind> {
        SlotKind::ALL
            .into_iter()
            .filter(|k| matches!(self.get(*k), SlotAlignment::MissingRationale))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("more than one rationale for the {0} slot")]
    DuplicateRationale(SlotKind),
    #[error("expected a {expected} sentence, got {actual}")]
    WrongRegister { expected: Register, actual: Register },
}

pub fn align_candidate(
    pedagogy: &ControlledSentence,
    candidate: &ControlledSentence,
    rationales: &[SlotRationale],
) -> Result<AlignmentReport, MappingError> {
    for (sentence, expected) in [(pedagogy, Register::Teaching), (candidate, Register::Game)] {
        if sentence.register() != expected {
            return Err(MappingError::WrongRegister {
                expected,
                actual: sentence.register(),
            });
        }
    }
    let mut by_kind: [Option<&SlotRationale>; 4] = [None; 4];
    for r in rationales {
        let slot = &mut by_kind[r.kind.index()];
        if slot.is_some() {
            return Err(MappingError::DuplicateRationale(r.kind));
        }
        *slot = Some(r);
    }
    let status = |kind: SlotKind| match by_kind[kind.index()] {
        None => SlotAlignment::MissingRationale,
        Some(r) => {
            let current = pedagogy.slot(kind);
            if r.needs_review || r.pedagogy_slot_text != current {
                SlotAlignment::StaleReference {
                    cited: r.pedagogy_slot_text.clone(),
                    current: current.to_string(),
                    game_side_edited: r.needs_review,
                }
            } else {
                SlotAlignment::Aligned { rationale: r.clone() }
            }
        }
    };
    Ok(AlignmentReport {
        adverb: status(SlotKind::Adverb),
        verb: status(SlotKind::Verb),
        noun: status(SlotKind::Noun),
        adjective: status(SlotKind::Adjective),
    })
}

pub fn is_fully_aligned(report: &AlignmentReport) -> bool {
    SlotKind::ALL
        .into_iter()
        .all(|k| matches!(report.get(k), SlotAlignment::Aligned { .. }))
}
