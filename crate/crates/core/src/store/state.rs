use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cnl::{ControlledSentence, Register, SlotKind};
use crate::development::{ChatTurn, ExpansionArtifact, ExpansionLevel};
use crate::extraction::{RequirementDocument, RequirementField};
use crate::translation::{candidate_id, CandidateOrigin, CandidateSet, TranslationCandidate};

use super::event::{Change, PedagogyOrigin};
use super::Phase;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PedagogyVersion {
    pub version: String,
    pub sentence: ControlledSentence,
    pub origin: PedagogyOrigin,
    pub sequence: u64,
    /// Answer events the composition read, in field order. Empty for edits.
    pub grounding: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub previous: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRevision {
    pub revision: u32,
    pub sequence: u64,
    pub source_pedagogy_version: String,
}

/// Everything derivable from the event log.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProjectState {
    pub last_sequence: u64,
    pub phase: Phase,
    pub document: RequirementDocument,
    pub answer_sequences: BTreeMap<RequirementField, u64>,
    pub options: BTreeMap<RequirementField, Vec<String>>,
    pub pedagogy: Vec<PedagogyVersion>,
    pub candidates: CandidateSet,
    pub candidate_history: BTreeMap<String, Vec<CandidateRevision>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted_revision: Option<u32>,
    pub artifacts: Vec<ExpansionArtifact>,
    pub artifact_sequences: BTreeMap<String, u64>,
    pub chat: Vec<ChatTurn>,
}

/// A change that cannot apply to the current state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayError(pub String);

impl std::fmt::Display for ReplayError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn fail<T>(message: impl Into<String>) -> Result<T, ReplayError> {
    Err(ReplayError(message.into()))
}

impl ProjectState {
    pub fn current_pedagogy(&self) -> Option<&PedagogyVersion> {
        self.pedagogy.last()
    }

    pub fn pedagogy_version(&self, version: &str) -> Option<&PedagogyVersion> {
        self.pedagogy.iter().find(|p| p.version == version)
    }

    pub fn accepted(&self) -> Option<&TranslationCandidate> {
        self.candidates.accepted_candidate()
    }

    pub fn artifact(&self, id: &str) -> Option<&ExpansionArtifact> {
        self.artifacts.iter().find(|a| a.id == id)
    }

    /// The newest sentence artifact that is not outdated.
    pub fn current_sentence_artifact(&self) -> Option<&ExpansionArtifact> {
        self.artifacts
            .iter()
            .rev()
            .find(|a| a.level == ExpansionLevel::Sentence && !a.outdated)
    }

    pub fn current_game_sentence(&self) -> Option<ControlledSentence> {
        self.current_sentence_artifact().and_then(ExpansionArtifact::sentence)
    }

    /// The game sentence a ladder artifact expands.
    pub fn ladder_root(&self, id: &str) -> Option<&ExpansionArtifact> {
        let mut node = self.artifact(id)?;
        while let Some(parent) = node.parent.as_deref() {
            node = self.artifact(parent)?;
        }
        Some(node)
    }

    pub fn next_candidate_number(&self) -> usize {
        self.candidates.candidates.len() + 1
    }

    pub fn next_artifact_id(&self) -> String {
        format!("a{}", self.artifacts.len() + 1)
    }

    pub fn next_pedagogy_version(&self) -> String {
        format!("p{}", self.pedagogy.len() + 1)
    }

    /// Whether the workflow may move to `target`.
    pub fn phase_gate(&self, target: Phase) -> Result<(), String> {
        match (self.phase, target) {
            (from, to) if to <= from => Ok(()),
            (Phase::Extraction, Phase::Translation) => {
                if self.document.complete() {
                    Ok(())
                } else {
                    Err(format!(
                        "requirement document is incomplete; open fields: {}",
                        self.document
                            .open_fields()
                            .iter()
                            .map(|f| f.as_str())
                            .collect::<Vec<_>>()
                            .join(", ")
                    ))
                }
            }
            (Phase::Translation, Phase::Development) => {
                if self.candidates.accepted.is_some() {
                    Ok(())
                } else {
                    Err("no candidate has been accepted".into())
                }
            }
            (from, to) => Err(format!("cannot skip from {from} to {to}")),
        }
    }

    fn outdate_subtree(&mut self, root: &str) {
        let mut doomed: BTreeSet<String> = BTreeSet::from([root.to_string()]);
        for a in &mut self.artifacts {
            let hit = doomed.contains(&a.id) || a.parent.as_ref().is_some_and(|p| doomed.contains(p));
            if hit {
                a.outdated = true;
                doomed.insert(a.id.clone());
            }
        }
    }

    fn outdate_all(&mut self) {
        for a in &mut self.artifacts {
            a.outdated = true;
        }
    }

    fn push_artifact(&mut self, sequence: u64, artifact: &ExpansionArtifact) -> Result<(), ReplayError> {
        if artifact.id != self.next_artifact_id() {
            return fail(format!(
                "expected artifact id {}, got {}",
                self.next_artifact_id(),
                artifact.id
            ));
        }
        if artifact.outdated {
            return fail("new artifact is already outdated");
        }
        self.artifact_sequences.insert(artifact.id.clone(), sequence);
        self.artifacts.push(artifact.clone());
        Ok(())
    }

    fn check_sentence_artifact(&self, artifact: &ExpansionArtifact) -> Result<(), ReplayError> {
        if artifact.level != ExpansionLevel::Sentence || artifact.parent.is_some() {
            return fail("sentence artifact must be level Sentence without a parent");
        }
        if artifact.sentence().is_none() {
            return fail("sentence artifact does not hold a game sentence");
        }
        Ok(())
    }

    fn record_revision(&mut self, sequence: u64, candidate: &TranslationCandidate) {
        self.candidate_history
            .entry(candidate.id.clone())
            .or_default()
            .push(CandidateRevision {
                revision: candidate.revision,
                sequence,
                source_pedagogy_version: candidate.source_pedagogy_version.clone(),
            });
    }

    fn check_candidate(&self, candidate: &TranslationCandidate) -> Result<(), ReplayError> {
        if candidate.game_sentence.register() != Register::Game {
            return fail("candidate sentence must be in the game register");
        }
        if self.pedagogy_version(&candidate.source_pedagogy_version).is_none() {
            return fail(format!(
                "unknown pedagogy version {}",
                candidate.source_pedagogy_version
            ));
        }
        Ok(())
    }

    fn revise(
        &mut self,
        sequence: u64,
        kind: SlotKind,
        candidate: &TranslationCandidate,
        regenerated: bool,
    ) -> Result<(), ReplayError> {
        self.check_candidate(candidate)?;
        let Some(old) = self.candidates.get(&candidate.id) else {
            return fail(format!("unknown candidate {}", candidate.id));
        };
        if candidate.revision != old.revision + 1 {
            return fail(format!(
                "candidate {} revision {} does not follow {}",
                candidate.id, candidate.revision, old.revision
            ));
        }
        for other in SlotKind::ALL.into_iter().filter(|k| *k != kind) {
            if candidate.game_sentence.slot(other) != old.game_sentence.slot(other) {
                return fail(format!("{other} slot changed during a {kind} revision"));
            }
        }
        let expected_origin = if regenerated {
            CandidateOrigin::AiGenerated
        } else {
            CandidateOrigin::UserEdited
        };
        if candidate.origin != expected_origin {
            return fail("revision origin does not match the action");
        }
        self.record_revision(sequence, candidate);
        self.candidates.upsert(candidate.clone());
        Ok(())
    }

    /// Folds one change into the state. This is the only mutation path.
    pub fn apply(&mut self, sequence: u64, change: &Change) -> Result<(), ReplayError> {
        if sequence != self.last_sequence + 1 {
            return fail(format!("expected sequence {}, got {sequence}", self.last_sequence + 1));
        }
        match change {
            Change::AnswerIngested { field, answer } => {
                self.document.set_answer(*field, answer.clone());
                self.answer_sequences.insert(*field, sequence);
            }
            Change::OptionsProposed { field, options } => {
                self.options.insert(*field, options.clone());
            }
            Change::PedagogySentenceComposed {
                version,
                sentence,
                origin,
            } => {
                if *version != self.next_pedagogy_version() {
                    return fail(format!(
                        "expected pedagogy version {}, got {version}",
                        self.next_pedagogy_version()
                    ));
                }
                if sentence.register() != Register::Teaching {
                    return fail("pedagogy sentence must be in the teaching register");
                }
                let (grounding, previous) = match origin {
                    PedagogyOrigin::Composed => {
                        if !self.document.complete() {
                            return fail("pedagogy sentence composed from an incomplete document");
                        }
                        (
                            RequirementField::ALL
                                .iter()
                                .filter_map(|f| self.answer_sequences.get(f).copied())
                                .collect(),
                            None,
                        )
                    }
                    PedagogyOrigin::Edited => match self.current_pedagogy() {
                        Some(p) => (Vec::new(), Some(p.version.clone())),
                        None => return fail("edit without a pedagogy sentence"),
                    },
                };
                self.pedagogy.push(PedagogyVersion {
                    version: version.clone(),
                    sentence: sentence.clone(),
                    origin: *origin,
                    sequence,
                    grounding,
                    previous,
                });
            }
            Change::CandidateGenerated { candidate } => {
                self.check_candidate(candidate)?;
                let expected = candidate_id(self.next_candidate_number());
                if candidate.id != expected || candidate.revision != 1 {
                    return fail(format!("expected new candidate {expected} at revision 1"));
                }
                if candidate.origin == CandidateOrigin::UserEdited {
                    return fail("a new candidate cannot be a user edit");
                }
                self.record_revision(sequence, candidate);
                self.candidates.pedagogy_version = Some(candidate.source_pedagogy_version.clone());
                self.candidates.upsert(candidate.clone());
            }
            Change::SlotEdited { kind, candidate } => self.revise(sequence, *kind, candidate, false)?,
            Change::SlotRegenerated { kind, candidate } => self.revise(sequence, *kind, candidate, true)?,
            Change::CandidateAccepted {
                candidate_id,
                revision,
                artifact,
            } => {
                let Some(candidate) = self.candidates.get(candidate_id) else {
                    return fail(format!("unknown candidate {candidate_id}"));
                };
                if candidate.revision != *revision {
                    return fail(format!("candidate {candidate_id} is not at revision {revision}"));
                }
                self.check_sentence_artifact(artifact)?;
                if artifact.source_candidate != *candidate_id || artifact.source_revision != *revision {
                    return fail("sentence artifact does not name the accepted candidate");
                }
                if artifact.content != candidate.game_sentence.canonical() {
                    return fail("sentence artifact does not hold the accepted sentence");
                }
                self.outdate_all();
                self.push_artifact(sequence, artifact)?;
                self.candidates.accepted = Some(candidate_id.clone());
                self.accepted_revision = Some(*revision);
            }
            Change::AcceptanceCleared { candidate_id, .. } => {
                if self.candidates.accepted.as_deref() != Some(candidate_id.as_str()) {
                    return fail(format!("candidate {candidate_id} is not accepted"));
                }
                self.candidates.accepted = None;
                self.accepted_revision = None;
                self.outdate_all();
            }
            Change::SentenceRefined { instruction, artifact } => {
                let Some(accepted) = self.candidates.accepted.clone() else {
                    return fail("refinement without an accepted candidate");
                };
                self.check_sentence_artifact(artifact)?;
                let Some(current) = self.current_sentence_artifact().cloned() else {
                    return fail("refinement without a current sentence");
                };
                if artifact.previous.as_deref() != Some(current.id.as_str()) || artifact.source_candidate != accepted {
                    return fail("refined sentence does not follow the current sentence");
                }
                self.outdate_subtree(&current.id);
                self.push_artifact(sequence, artifact)?;
                self.chat.push(ChatTurn {
                    instruction: instruction.clone(),
                    artifact: artifact.id.clone(),
                });
            }
            Change::ArtifactZoomed { artifact } => {
                let Some(parent_id) = artifact.parent.clone() else {
                    return fail("zoomed artifact has no parent");
                };
                let Some(parent) = self.artifact(&parent_id) else {
                    return fail(format!("unknown parent artifact {parent_id}"));
                };
                if parent.outdated {
                    return fail(format!("parent artifact {parent_id} is outdated"));
                }
                if parent.level.next() != Some(artifact.level) {
                    return fail("zoomed artifact must be exactly one level above its parent");
                }
                let siblings: Vec<String> = self
                    .artifacts
                    .iter()
                    .filter(|a| a.parent.as_deref() == Some(parent_id.as_str()) && !a.outdated)
                    .map(|a| a.id.clone())
                    .collect();
                for s in siblings {
                    self.outdate_subtree(&s);
                }
                self.push_artifact(sequence, artifact)?;
            }
            Change::PhaseAdvanced { from, to } => {
                if *from != self.phase {
                    return fail(format!("phase is {}, not {from}", self.phase));
                }
                self.phase_gate(*to).map_err(ReplayError)?;
                self.phase = *to;
            }
        }
        self.last_sequence = sequence;
        Ok(())
    }
}
