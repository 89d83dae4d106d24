//! Game-register candidates for the pedagogy sentence, each carrying one
//! rationale per slot.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnl::{parse_sentence, validate_slot_text, ControlledSentence, Register, SlotKind, SlotTextError};
use crate::gateway::{parse_candidate_output, CandidateOutput, Gateway, GatewayError, OutputContract, PromptSpec};
use crate::mapping::{align_candidate, is_fully_aligned, AlignmentReport, MappingError, SlotRationale};
use crate::store::Phase;

pub const DEFAULT_CANDIDATE_COUNT: usize = 3;
pub const MAX_CANDIDATE_COUNT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CandidateOrigin {
    AiGenerated,
    UserAuthored,
    UserEdited,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationCandidate {
    pub id: String,
    /// Starts at 1; each edit or regeneration stores the next revision.
    pub revision: u32,
    pub game_sentence: ControlledSentence,
    pub rationales: Vec<SlotRationale>,
    pub source_pedagogy_version: String,
    pub origin: CandidateOrigin,
}

impl TranslationCandidate {
    pub fn rationale(&self, kind: SlotKind) -> Option<&SlotRationale> {
        self.rationales.iter().find(|r| r.kind == kind)
    }

    pub fn alignment(&self, pedagogy: &ControlledSentence) -> Result<AlignmentReport, MappingError> {
        align_candidate(pedagogy, &self.game_sentence, &self.rationales)
    }

    /// The five-line reply format the gateway uses for candidates.
    pub fn to_reply_text(&self) -> String {
        let mut out = format!("SENTENCE: {}", self.game_sentence.canonical());
        for kind in SlotKind::ALL {
            let text = self.rationale(kind).map(|r| r.explanation.as_str()).unwrap_or("(none)");
            out.push_str(&format!("\n{}: {}", kind.as_str().to_uppercase(), text));
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pedagogy_version: Option<String>,
    pub candidates: Vec<TranslationCandidate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted: Option<String>,
}

impl CandidateSet {
    pub fn get(&self, id: &str) -> Option<&TranslationCandidate> {
        self.candidates.iter().find(|c| c.id == id)
    }

    pub fn accepted_candidate(&self) -> Option<&TranslationCandidate> {
        self.accepted.as_deref().and_then(|id| self.get(id))
    }

    /// Inserts a new candidate or replaces an existing one with the same id,
    /// keeping its position.
    pub fn upsert(&mut self, candidate: TranslationCandidate) {
        match self.candidates.iter_mut().find(|c| c.id == candidate.id) {
            Some(slot) => *slot = candidate,
            None => self.candidates.push(candidate),
        }
    }
}

pub fn candidate_id(number: usize) -> String {
    format!("c{number}")
}

#[derive(Debug, Error)]
pub enum TranslationError {
    #[error("candidate count must be between 1 and {MAX_CANDIDATE_COUNT}, got {0}")]
    InvalidCount(usize),
    #[error("unknown candidate {0}")]
    NotFound(String),
    #[error("invalid {kind} text: {reason}")]
    InvalidSlotText { kind: SlotKind, reason: SlotTextError },
    #[error("candidate is not aligned with the current pedagogy sentence (stale: {stale:?}, missing: {missing:?})")]
    NotAligned {
        stale: Vec<SlotKind>,
        missing: Vec<SlotKind>,
    },
    #[error("no pedagogy sentence has been composed")]
    NoPedagogySentence,
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error("invalid candidate: {0}")]
    InvalidCandidate(String),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

fn rationales_for(output: &CandidateOutput, pedagogy: &ControlledSentence) -> Vec<SlotRationale> {
    SlotKind::ALL
        .into_iter()
        .map(|k| SlotRationale::new(k, output.explanations[k.index()].clone(), pedagogy.slot(k)))
        .collect()
}

fn check_pedagogy(pedagogy: &ControlledSentence) -> Result<(), TranslationError> {
    if pedagogy.register() != Register::Teaching {
        return Err(MappingError::WrongRegister {
            expected: Register::Teaching,
            actual: pedagogy.register(),
        }
        .into());
    }
    Ok(())
}

/// Requests `n` candidates, one gateway call each. A member that repeats an
/// earlier member's sentence is rejected and retried.
pub fn generate_candidates(
    gateway: &Gateway,
    pedagogy: &ControlledSentence,
    pedagogy_version: &str,
    n: usize,
    first_number: usize,
) -> Result<Vec<TranslationCandidate>, TranslationError> {
    if !(1..=MAX_CANDIDATE_COUNT).contains(&n) {
        return Err(TranslationError::InvalidCount(n));
    }
    check_pedagogy(pedagogy)?;
    let mut out: Vec<TranslationCandidate> = Vec::with_capacity(n);
    for k in 1..=n {
        let spec = PromptSpec::new(
            Phase::Translation,
            "Translate the pedagogy sentence into a game-language sentence. Explain each slot against the \
             same-kind pedagogy slot.",
            OutputContract::Candidate,
        )?
        .with_block("Pedagogy sentence", pedagogy.canonical())?
        .with_block("Candidate", format!("{k} of {n}"))?;
        let seen: Vec<String> = out.iter().map(|c| c.game_sentence.canonical()).collect();
        let result = gateway.complete_with(&spec, |text| {
            let parsed = parse_candidate_output(text)?;
            if seen.contains(&parsed.sentence.canonical()) {
                return Err("repeats an earlier candidate; propose a different design".into());
            }
            Ok(())
        })?;
        let parsed = parse_candidate_output(&result.raw_text).map_err(TranslationError::InvalidCandidate)?;
        out.push(TranslationCandidate {
            id: candidate_id(first_number + k - 1),
            revision: 1,
            rationales: rationales_for(&parsed, pedagogy),
            game_sentence: parsed.sentence,
            source_pedagogy_version: pedagogy_version.to_string(),
            origin: CandidateOrigin::AiGenerated,
        });
    }
    Ok(out)
}

/// Asks for a new text and rationale for one slot; the other three slots are
/// required to come back byte-identical.
pub fn regenerate_slot(
    gateway: &Gateway,
    pedagogy: &ControlledSentence,
    pedagogy_version: &str,
    candidate: &TranslationCandidate,
    kind: SlotKind,
) -> Result<TranslationCandidate, TranslationError> {
    check_pedagogy(pedagogy)?;
    let spec = PromptSpec::new(
        Phase::Translation,
        format!(
            "Propose a different {} for this game sentence and explain it. Keep every other slot and rationale \
             exactly as it is.",
            kind.as_str().to_lowercase()
        ),
        OutputContract::Candidate,
    )?
    .with_block("Pedagogy sentence", pedagogy.canonical())?
    .with_block("Current candidate", candidate.to_reply_text())?
    .with_block("Regenerate slot", kind.as_str())?;
    let current = &candidate.game_sentence;
    let result = gateway.complete_with(&spec, |text| {
        let parsed = parse_candidate_output(text)?;
        for other in SlotKind::ALL.into_iter().filter(|k| *k != kind) {
            if parsed.sentence.slot(other) != current.slot(other) {
                return Err(format!("the {other} slot changed; only the {kind} slot may change"));
            }
        }
        Ok(())
    })?;
    let parsed = parse_candidate_output(&result.raw_text).map_err(TranslationError::InvalidCandidate)?;
    let mut rationales = candidate.rationales.clone();
    rationales.retain(|r| r.kind != kind);
    rationales.push(SlotRationale::new(
        kind,
        parsed.explanations[kind.index()].clone(),
        pedagogy.slot(kind),
    ));
    rationales.sort_by_key(|r| r.kind.index());
    Ok(TranslationCandidate {
        id: candidate.id.clone(),
        revision: candidate.revision + 1,
        game_sentence: parsed.sentence,
        rationales,
        source_pedagogy_version: pedagogy_version.to_string(),
        origin: CandidateOrigin::AiGenerated,
    })
}

/// Replaces one game slot. Without a rationale the old one is kept but
/// flagged for review, so the candidate stops being aligned.
pub fn edit_slot(
    pedagogy: &ControlledSentence,
    pedagogy_version: &str,
    candidate: &TranslationCandidate,
    kind: SlotKind,
    new_text: &str,
    new_rationale: Option<&str>,
) -> Result<TranslationCandidate, TranslationError> {
    check_pedagogy(pedagogy)?;
    let sentence = candidate
        .game_sentence
        .with_slot(kind, new_text)
        .map_err(|reason| TranslationError::InvalidSlotText { kind, reason })?;
    let mut rationales = candidate.rationales.clone();
    let fresh = match new_rationale.map(str::trim).filter(|r| !r.is_empty()) {
        Some(text) => SlotRationale::new(kind, text, pedagogy.slot(kind)),
        None => {
            let mut old = candidate
                .rationale(kind)
                .cloned()
                .unwrap_or_else(|| SlotRationale::new(kind, "", pedagogy.slot(kind)));
            old.needs_review = true;
            old
        }
    };
    rationales.retain(|r| r.kind != kind);
    rationales.push(fresh);
    rationales.sort_by_key(|r| r.kind.index());
    Ok(TranslationCandidate {
        id: candidate.id.clone(),
        revision: candidate.revision + 1,
        game_sentence: sentence,
        rationales,
        source_pedagogy_version: pedagogy_version.to_string(),
        origin: CandidateOrigin::UserEdited,
    })
}

/// A candidate written by the instructor.
pub fn author_candidate(
    id: String,
    pedagogy: &ControlledSentence,
    pedagogy_version: &str,
    sentence: &str,
    rationales: &[(SlotKind, String)],
) -> Result<TranslationCandidate, TranslationError> {
    check_pedagogy(pedagogy)?;
    let game_sentence =
        parse_sentence(sentence, Register::Game).map_err(|e| TranslationError::InvalidCandidate(e.to_string()))?;
    let mut out: Vec<SlotRationale> = Vec::new();
    for (kind, text) in rationales {
        if out.iter().any(|r| r.kind == *kind) {
            return Err(MappingError::DuplicateRationale(*kind).into());
        }
        let text = validate_slot_text(text)
            .map(|_| text.trim().to_string())
            .or_else(|e| match e {
                SlotTextError::Empty => Err(TranslationError::InvalidCandidate(format!("empty {kind} rationale"))),
                _ => Ok(text.trim().to_string()),
            })?;
        out.push(SlotRationale::new(*kind, text, pedagogy.slot(*kind)));
    }
    out.sort_by_key(|r| r.kind.index());
    Ok(TranslationCandidate {
        id,
        revision: 1,
        game_sentence,
        rationales: out,
        source_pedagogy_version: pedagogy_version.to_string(),
        origin: CandidateOrigin::UserAuthored,
    })
}

/// Acceptance gate: the candidate must be fully aligned with `pedagogy`.
pub fn check_acceptance(
    candidate: &TranslationCandidate,
    pedagogy: &ControlledSentence,
) -> Result<(), TranslationError> {
    let report = candidate.alignment(pedagogy)?;
    if is_fully_aligned(&report) {
        Ok(())
    } else {
        Err(TranslationError::NotAligned {
            stale: report.stale_kinds(),
            missing: report.missing_kinds(),
        })
    }
}
