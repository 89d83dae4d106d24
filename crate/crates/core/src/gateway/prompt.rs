use serde::{Deserialize, Serialize};

use super::{GatewayError, OutputContract};
use crate::store::Phase;

/// Prefix of every context block heading.
pub const BLOCK_HEADER: &str = "### ";
/// Prefix of the output-contract section.
pub const CONTRACT_HEADER: &str = "OUTPUT CONTRACT";
/// Prefix of the corrective suffix added on retries.
pub const CORRECTION_HEADER: &str = "CORRECTION";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextBlock {
    pub label: String,
    pub text: String,
}

/// A phase-specific request: objective, labelled context, and the contract
/// the reply must satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptSpec {
    phase: Phase,
    objective: String,
    context_blocks: Vec<ContextBlock>,
    output_contract: OutputContract,
}

impl PromptSpec {
    pub fn new(
        phase: Phase,
        objective: impl Into<String>,
        output_contract: OutputContract,
    ) -> Result<Self, GatewayError> {
        let objective = objective.into();
        if objective.trim().is_empty() {
            return Err(GatewayError::InvalidSpec("objective is empty".into()));
        }
        Ok(PromptSpec {
            phase,
            objective,
            context_blocks: Vec::new(),
            output_contract,
        })
    }

    pub fn with_block(mut self, label: impl Into<String>, text: impl Into<String>) -> Result<Self, GatewayError> {
        let label = label.into();
        if label.trim().is_empty() || label.contains('\n') {
            return Err(GatewayError::InvalidSpec(
                "block label must be a nonempty single line".into(),
            ));
        }
        if self.context_blocks.iter().any(|b| b.label == label) {
            return Err(GatewayError::InvalidSpec(format!("duplicate block label `{label}`")));
        }
        self.context_blocks.push(ContextBlock {
            label,
            text: text.into(),
        });
        Ok(self)
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn objective(&self) -> &str {
        &self.objective
    }

    pub fn context_blocks(&self) -> &[ContextBlock] {
        &self.context_blocks
    }

    pub fn output_contract(&self) -> &OutputContract {
        &self.output_contract
    }
}

/// Renders a spec to prompt text:
///
/// ```text
/// PHASE: <phase>
/// OBJECTIVE: <objective>
///
/// ### <label>
/// <text>
///
/// OUTPUT CONTRACT (<tag>):
/// <statement>
/// ```
pub fn build_prompt(spec: &PromptSpec) -> String {
    let mut out = format!("PHASE: {}\nOBJECTIVE: {}\n", spec.phase, spec.objective.trim_end());
    for block in &spec.context_blocks {
        out.push('\n');
        out.push_str(BLOCK_HEADER);
        out.push_str(&block.label);
        out.push('\n');
        out.push_str(block.text.trim_end());
        out.push('\n');
    }
    out.push('\n');
    out.push_str(&format!(
        "{CONTRACT_HEADER} ({}):\n{}\n",
        spec.output_contract.tag(),
        spec.output_contract.statement()
    ));
    out
}

pub(super) fn with_correction(base: &str, attempt: u32, max: u32, violation: &str) -> String {
    format!(
        "{base}\n{CORRECTION_HEADER} (attempt {attempt} of {max}): the previous reply was rejected: {violation}\nReply again and follow the {CONTRACT_HEADER} exactly.\n"
    )
}

/// Splits a prompt built by [`build_prompt`] back into its labelled blocks.
/// Returns `(contract tag, blocks)`.
pub(super) fn dissect(prompt: &str) -> (Option<String>, Vec<(String, String)>) {
    let mut tag = None;
    let mut blocks: Vec<(String, String)> = Vec::new();
    let mut current: Option<(String, Vec<&str>)> = None;
    let flush = |current: &mut Option<(String, Vec<&str>)>, blocks: &mut Vec<(String, String)>| {
        if let Some((label, lines)) = current.take() {
            blocks.push((label, lines.join("\n").trim().to_string()));
        }
    };
    for line in prompt.lines() {
        if let Some(label) = line.strip_prefix(BLOCK_HEADER) {
            flush(&mut current, &mut blocks);
            current = Some((label.to_string(), Vec::new()));
        } else if let Some(rest) = line.strip_prefix(CONTRACT_HEADER) {
            flush(&mut current, &mut blocks);
            if tag.is_none() {
                tag = rest
                    .trim()
                    .strip_prefix('(')
                    .and_then(|r| r.split_once(')'))
                    .map(|(t, _)| t.to_string());
            }
        } else if let Some((_, lines)) = current.as_mut() {
            lines.push(line);
        }
    }
    flush(&mut current, &mut blocks);
    (tag, blocks)
}
