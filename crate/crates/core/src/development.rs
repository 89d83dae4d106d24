//! Refinement of the accepted game sentence and the zoom ladder
//! (sentence, paragraph, pseudocode).

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnl::{parse_sentence, ControlledSentence, Register, SlotKind};
use crate::gateway::{Gateway, GatewayError, OutputContract, PromptSpec};
use crate::store::Phase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ExpansionLevel {
    Sentence,
    Paragraph,
    Pseudocode,
}

impl ExpansionLevel {
    pub fn rank(self) -> u8 {
        match self {
            ExpansionLevel::Sentence => 0,
            ExpansionLevel::Paragraph => 1,
            ExpansionLevel::Pseudocode => 2,
        }
    }

    pub fn next(self) -> Option<Self> {
        match self {
            ExpansionLevel::Sentence => Some(ExpansionLevel::Paragraph),
            ExpansionLevel::Paragraph => Some(ExpansionLevel::Pseudocode),
            ExpansionLevel::Pseudocode => None,
        }
    }
}

impl fmt::Display for ExpansionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExpansionLevel::Sentence => "Sentence",
            ExpansionLevel::Paragraph => "Paragraph",
            ExpansionLevel::Pseudocode => "Pseudocode",
        })
    }
}

/// One node of the zoom ladder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionArtifact {
    pub id: String,
    pub level: ExpansionLevel,
    pub content: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    pub source_candidate: String,
    /// Candidate revision the ladder was accepted from.
    pub source_revision: u32,
    /// For a refined sentence, the sentence artifact it replaced.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub previous: Option<String>,
    /// Sentence-level artifacts count up per refinement; deeper levels
    /// inherit the version of the sentence they expand.
    pub version: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub outdated: bool,
}

impl ExpansionArtifact {
    /// The game sentence held by a sentence-level artifact.
    pub fn sentence(&self) -> Option<ControlledSentence> {
        match self.level {
            ExpansionLevel::Sentence => parse_sentence(&self.content, Register::Game).ok(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatTurn {
    pub instruction: String,
    /// The sentence artifact the refinement produced.
    pub artifact: String,
}

#[derive(Debug, Error)]
pub enum DevelopmentError {
    #[error("no candidate has been accepted")]
    NoAcceptedCandidate,
    #[error("{0} is the top of the zoom ladder")]
    MaxDepth(ExpansionLevel),
    #[error("artifact {0} is outdated; zoom from the current version")]
    OutdatedArtifact(String),
    #[error("instruction is empty")]
    EmptyInstruction,
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reasons", rename_all = "snake_case")]
pub enum PseudocodeCheck {
    Pass,
    Fail(Vec<String>),
}

impl PseudocodeCheck {
    pub fn passed(&self) -> bool {
        matches!(self, PseudocodeCheck::Pass)
    }
}

pub const PSEUDOCODE_SECTIONS: [&str; 5] = ["GAME", "SETUP", "LOOP", "WIN_CONDITION", "LOSE_OR_RETRY"];

fn is_keyword(word: &str) -> bool {
    let word = word.strip_suffix(':').unwrap_or(word);
    let mut chars = word.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase()) && chars.all(|c| c.is_ascii_uppercase() || c == '_')
}

/// Checks the pseudocode format and that every slot text of `source`
/// appears verbatim.
pub fn validate_pseudocode(content: &str, source: &ControlledSentence) -> PseudocodeCheck {
    let mut reasons = Vec::new();
    let mut seen: Vec<&str> = Vec::new();
    let mut prev_depth: Option<usize> = None;
    let mut open_block: Option<(usize, usize)> = None;

    for (index, line) in content.lines().enumerate() {
        let number = index + 1;
        if line.trim().is_empty() {
            continue;
        }
        let body = line.trim_start_matches(' ');
        let indent = line.len() - body.len();
        if body.starts_with('\t') {
            reasons.push(format!("line {number}: tab indentation"));
            continue;
        }
        if indent % 2 != 0 {
            reasons.push(format!("line {number}: indentation is not a multiple of two spaces"));
            continue;
        }
        let depth = indent / 2;
        if let Some((open_number, open_depth)) = open_block.take() {
            if depth <= open_depth {
                reasons.push(format!("line {open_number}: block has no body"));
            }
        }
        let limit = prev_depth.map_or(0, |d| d + 1);
        if depth > limit {
            reasons.push(format!("line {number}: nested more than one level deeper"));
        }
        let first = body.split_whitespace().next().unwrap_or("");
        if !is_keyword(first) {
            reasons.push(format!("line {number}: does not start with an uppercase keyword"));
        }
        if depth == 0 {
            match body.trim_end().strip_suffix(':') {
                Some(name) if PSEUDOCODE_SECTIONS.contains(&name) => {
                    if seen.contains(&name) {
                        reasons.push(format!("duplicate section {name}"));
                    } else {
                        let rank = PSEUDOCODE_SECTIONS.iter().position(|s| *s == name);
                        let last = seen
                            .last()
                            .and_then(|s| PSEUDOCODE_SECTIONS.iter().position(|x| x == s));
                        if matches!((rank, last), (Some(r), Some(l)) if r < l) {
                            reasons.push(format!("section {name} out of order"));
                        }
                        seen.push(name);
                    }
                }
                _ => reasons.push(format!("line {number}: unexpected top-level line")),
            }
        }
        if body.trim_end().ends_with(':') {
            open_block = Some((number, depth));
        }
        prev_depth = Some(depth);
    }
    if let Some((open_number, _)) = open_block {
        reasons.push(format!("line {open_number}: block has no body"));
    }
    for section in PSEUDOCODE_SECTIONS {
        if !seen.contains(&section) {
            reasons.push(format!("missing section {section}"));
        }
    }
    for kind in SlotKind::ALL {
        let text = source.slot(kind);
        if !content.contains(text) {
            reasons.push(format!("slot text not traced: {text}"));
        }
    }
    if reasons.is_empty() {
        PseudocodeCheck::Pass
    } else {
        PseudocodeCheck::Fail(reasons)
    }
}

/// Everything the assistant sees when refining.
#[derive(Debug, Clone, Copy)]
pub struct RefineContext<'a> {
    pub requirements: &'a str,
    pub pedagogy: &'a ControlledSentence,
    pub accepted: &'a ControlledSentence,
    pub current: &'a ControlledSentence,
    pub chat: &'a [ChatTurn],
}

pub fn refine_sentence(
    gateway: &Gateway,
    context: RefineContext<'_>,
    instruction: &str,
) -> Result<ControlledSentence, DevelopmentError> {
    let instruction = instruction.trim();
    if instruction.is_empty() {
        return Err(DevelopmentError::EmptyInstruction);
    }
    let chat = if context.chat.is_empty() {
        "(none)".to_string()
    } else {
        context
            .chat
            .iter()
            .map(|t| format!("- {}", t.instruction))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let spec = PromptSpec::new(
        Phase::Development,
        "Revise the current game sentence as the instructor asks. Change only what the instruction names.",
        OutputContract::ControlledSentence(Register::Game),
    )?
    .with_block("Requirement document", context.requirements)?
    .with_block("Pedagogy sentence", context.pedagogy.canonical())?
    .with_block("Accepted candidate", context.accepted.canonical())?
    .with_block("Earlier instructions", chat)?
    .with_block("Current game sentence", context.current.canonical())?
    .with_block("Instruction", instruction)?;
    let result = gateway.complete(&spec)?;
    parse_sentence(&result.raw_text, Register::Game).map_err(|e| {
        DevelopmentError::Gateway(GatewayError::ProviderFailure {
            attempts: result.attempts,
            last_violation: e.to_string(),
        })
    })
}

/// Produces the content one level above `artifact`.
///
/// `source` is the sentence the ladder expands; pseudocode must trace it.
pub fn expand(
    gateway: &Gateway,
    artifact: &ExpansionArtifact,
    source: &ControlledSentence,
) -> Result<(ExpansionLevel, String), DevelopmentError> {
    if artifact.outdated {
        return Err(DevelopmentError::OutdatedArtifact(artifact.id.clone()));
    }
    let level = artifact
        .level
        .next()
        .ok_or(DevelopmentError::MaxDepth(artifact.level))?;
    let spec = match level {
        ExpansionLevel::Paragraph => PromptSpec::new(
            Phase::Development,
            "Describe how the game plays in one paragraph, then walk through concrete play examples.",
            OutputContract::Paragraph,
        )?
        .with_block("Game sentence", source.canonical())?,
        ExpansionLevel::Pseudocode => PromptSpec::new(
            Phase::Development,
            "Write pseudocode for the game described below.",
            OutputContract::Pseudocode(source.clone()),
        )?
        .with_block("Game sentence", source.canonical())?
        .with_block("Paragraph", artifact.content.as_str())?,
        ExpansionLevel::Sentence => unreachable!("next level is never Sentence"),
    };
    let result = gateway.complete(&spec)?;
    Ok((level, result.raw_text))
}
