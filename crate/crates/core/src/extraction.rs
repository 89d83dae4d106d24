//! Requirement elicitation.
//!
//! The dialogue asks five questions in a fixed order, gates each answer
//! with a deterministic specificity rule set, and, once every answer passes,
//! composes the teaching-register sentence from the answers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnl::{parse_sentence, ControlledSentence, Register, SlotKind};
use crate::gateway::{parse_option_list, Gateway, GatewayError, OutputContract, PromptSpec};
use crate::store::Phase;

/// The five requirement items, in questioning order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RequirementField {
    ConceptScope,
    Materials,
    ObservableAction,
    PerformanceTarget,
    Context,
}

impl RequirementField {
    pub const ALL: [RequirementField; 5] = [
        RequirementField::ConceptScope,
        RequirementField::Materials,
        RequirementField::ObservableAction,
        RequirementField::PerformanceTarget,
        RequirementField::Context,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RequirementField::ConceptScope => "ConceptScope",
            RequirementField::Materials => "Materials",
            RequirementField::ObservableAction => "ObservableAction",
            RequirementField::PerformanceTarget => "PerformanceTarget",
            RequirementField::Context => "Context",
        }
    }

    /// Accepts `ConceptScope`, `concept_scope`, `concept-scope`, any case.
    pub fn from_name(name: &str) -> Option<Self> {
        let squashed: String = name
            .trim()
            .chars()
            .filter(|c| *c != '_' && *c != '-' && !c.is_whitespace())
            .collect();
        RequirementField::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(&squashed))
    }
}

impl fmt::Display for RequirementField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const TIME_UNITS: [&str; 8] = [
    "minute", "minutes", "hour", "hours", "session", "sessions", "week", "weeks",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeUnit {
    Minutes,
    Hours,
    Sessions,
    Weeks,
}

impl TimeUnit {
    fn from_token(token: &str) -> Option<Self> {
        match token {
            "minute" | "minutes" => Some(TimeUnit::Minutes),
            "hour" | "hours" => Some(TimeUnit::Hours),
            "session" | "sessions" => Some(TimeUnit::Sessions),
            "week" | "weeks" => Some(TimeUnit::Weeks),
            _ => None,
        }
    }

    fn label(self, value: u32) -> &'static str {
        match (self, value == 1) {
            (TimeUnit::Minutes, true) => "minute",
            (TimeUnit::Minutes, false) => "minutes",
            (TimeUnit::Hours, true) => "hour",
            (TimeUnit::Hours, false) => "hours",
            (TimeUnit::Sessions, true) => "session",
            (TimeUnit::Sessions, false) => "sessions",
            (TimeUnit::Weeks, true) => "week",
            (TimeUnit::Weeks, false) => "weeks",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantityUnit {
    Count,
    Percentage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: QuantityUnit,
    /// Denominator for "8 of 10" style counts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_of: Option<u32>,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.unit, self.out_of) {
            (QuantityUnit::Percentage, _) => write!(f, "{}%", self.value),
            (QuantityUnit::Count, Some(total)) => write!(f, "{} of {}", self.value, total),
            (QuantityUnit::Count, None) => write!(f, "{}", self.value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub value: u32,
    pub unit: TimeUnit,
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.value, self.unit.label(self.value))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceTargetValue {
    pub description: String,
    pub quantity: Quantity,
    pub time_window: TimeWindow,
    /// A quality adverb the instructor used, such as "accurately".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quality: Option<String>,
}

impl PerformanceTargetValue {
    /// `[<quality>, ]<quantity> within <time window>`
    pub fn summary(&self) -> String {
        let core = format!("{} within {}", self.quantity, self.time_window);
        match &self.quality {
            Some(q) => format!("{q}, {core}"),
            None => core,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RealismLevel {
    Abstract,
    Stylized,
    Realistic,
}

impl RealismLevel {
    fn parse(text: &str) -> Option<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "abstract" => Some(RealismLevel::Abstract),
            "stylized" | "stylised" => Some(RealismLevel::Stylized),
            "realistic" => Some(RealismLevel::Realistic),
            _ => None,
        }
    }

    pub fn as_lower(self) -> &'static str {
        match self {
            RealismLevel::Abstract => "abstract",
            RealismLevel::Stylized => "stylized",
            RealismLevel::Realistic => "realistic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextValue {
    pub environment_type: String,
    pub realism_level: RealismLevel,
    pub tone: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConceptValue {
    /// The focal concept phrase.
    pub concept: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ParsedValue {
    Concept(ConceptValue),
    PerformanceTarget(PerformanceTargetValue),
    Context(ContextValue),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Specificity {
    Pass,
    Fail { reasons: Vec<String> },
}

impl Specificity {
    pub fn passed(&self) -> bool {
        matches!(self, Specificity::Pass)
    }

    fn from_reasons(reasons: Vec<String>) -> Self {
        if reasons.is_empty() {
            Specificity::Pass
        } else {
            Specificity::Fail { reasons }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub raw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parsed: Option<ParsedValue>,
    pub specificity: Specificity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FieldEntry {
    Unanswered,
    Answered(Answer),
}

impl FieldEntry {
    pub fn answer(&self) -> Option<&Answer> {
        match self {
            FieldEntry::Answered(a) => Some(a),
            FieldEntry::Unanswered => None,
        }
    }

    fn passed(&self) -> bool {
        self.answer().is_some_and(|a| a.specificity.passed())
    }
}

/// The co-authored record of the five requirement answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequirementDocument {
    entries: BTreeMap<RequirementField, FieldEntry>,
}

impl Default for RequirementDocument {
    fn default() -> Self {
        RequirementDocument {
            entries: RequirementField::ALL
                .into_iter()
                .map(|f| (f, FieldEntry::Unanswered))
                .collect(),
        }
    }
}

impl RequirementDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entry(&self, field: RequirementField) -> &FieldEntry {
        self.entries.get(&field).unwrap_or(&FieldEntry::Unanswered)
    }

    pub fn answer(&self, field: RequirementField) -> Option<&Answer> {
        self.entry(field).answer()
    }

    pub fn complete(&self) -> bool {
        RequirementField::ALL.into_iter().all(|f| self.entry(f).passed())
    }

    /// Fields not yet answered with a passing answer, in order.
    pub fn open_fields(&self) -> Vec<RequirementField> {
        RequirementField::ALL
            .into_iter()
            .filter(|f| !self.entry(*f).passed())
            .collect()
    }

    pub fn set_answer(&mut self, field: RequirementField, answer: Answer) {
        self.entries.insert(field, FieldEntry::Answered(answer));
    }

    /// Plain-text summary used as prompt context.
    pub fn summary(&self) -> String {
        RequirementField::ALL
            .into_iter()
            .map(|f| match self.answer(f) {
                Some(a) => format!("{f}: {}", a.raw),
                None => format!("{f}: (unanswered)"),
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NextQuestion {
    Question { field: RequirementField, prompt: String },
    Complete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptionSet {
    pub field: RequirementField,
    pub options: Vec<String>,
}

#[derive(Debug, Error)]
pub enum ExtractionError {
    #[error("requirement document is incomplete; open fields: {0:?}")]
    IncompleteDocument(Vec<RequirementField>),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("invalid elicitation catalog: {0}")]
    Catalog(String),
}

/// Question wording and the non-observable verb deny list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElicitationCatalog {
    pub non_observable_verbs: Vec<String>,
    pub questions: BTreeMap<RequirementField, String>,
    #[serde(default)]
    pub context_parts: BTreeMap<String, String>,
}

const DEFAULT_CATALOG: &str = include_str!("../data/elicitation.toml");

impl Default for ElicitationCatalog {
    fn default() -> Self {
        ElicitationCatalog::from_toml_str(DEFAULT_CATALOG).expect("bundled catalog is valid")
    }
}

impl ElicitationCatalog {
    pub fn from_toml_str(text: &str) -> Result<Self, ExtractionError> {
        let catalog: ElicitationCatalog = toml::from_str(text).map_err(|e| ExtractionError::Catalog(e.to_string()))?;
        if let Some(missing) = RequirementField::ALL
            .into_iter()
            .find(|f| !catalog.questions.contains_key(f))
        {
            return Err(ExtractionError::Catalog(format!("no question for {missing}")));
        }
        Ok(catalog)
    }

    pub fn load(path: &Path) -> Result<Self, ExtractionError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExtractionError::Catalog(e.to_string()))?;
        Self::from_toml_str(&text)
    }

    pub fn question(&self, field: RequirementField) -> &str {
        self.questions.get(&field).map(String::as_str).unwrap_or("")
    }

    pub fn next_question(&self, doc: &RequirementDocument) -> NextQuestion {
        match doc.open_fields().first() {
            Some(&field) => NextQuestion::Question {
                field,
                prompt: self.question(field).to_string(),
            },
            None => NextQuestion::Complete,
        }
    }

    pub fn specificity_check(&self, field: RequirementField, answer: &str) -> Specificity {
        let text = answer.trim();
        if text.is_empty() {
            return Specificity::Fail {
                reasons: vec!["empty".into()],
            };
        }
        let mut reasons = Vec::new();
        match field {
            RequirementField::ConceptScope | RequirementField::Materials => {
                if text.split_whitespace().count() < 3 {
                    reasons.push("too vague: use at least 3 words".into());
                }
            }
            RequirementField::ObservableAction => {
                if self.starts_with_denied_verb(text) {
                    reasons.push("non-observable verb".into());
                }
            }
            RequirementField::PerformanceTarget => {
                let tokens = tokens(text);
                if !tokens.iter().any(|t| t.chars().any(|c| c.is_ascii_digit())) {
                    reasons.push("no number".into());
                }
                if !tokens.iter().any(|t| TIME_UNITS.contains(&t.as_str())) {
                    reasons.push("no time unit (minutes, hours, sessions, or weeks)".into());
                }
            }
            RequirementField::Context => {
                reasons.extend(context_problems(text));
            }
        }
        Specificity::from_reasons(reasons)
    }

    fn starts_with_denied_verb(&self, text: &str) -> bool {
        let words: Vec<String> = text
            .split_whitespace()
            .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()).to_ascii_lowercase())
            .collect();
        let words = match words.first().map(String::as_str) {
            Some("to") => &words[1..],
            _ => &words[..],
        };
        self.non_observable_verbs.iter().any(|entry| {
            let parts: Vec<&str> = entry.split_whitespace().collect();
            if parts.is_empty() || words.len() < parts.len() {
                return false;
            }
            let (head, rest) = parts.split_first().expect("nonempty");
            let inflected = ["", "s", "es", "ing", "ed"]
                .iter()
                .any(|suffix| words[0] == format!("{head}{suffix}"));
            inflected && rest.iter().zip(&words[1..]).all(|(p, w)| p == w)
        })
    }

    /// Records an answer, overwriting any earlier one for the same field.
    pub fn ingest_answer(
        &self,
        doc: &RequirementDocument,
        field: RequirementField,
        answer: &str,
    ) -> RequirementDocument {
        let mut next = doc.clone();
        next.set_answer(field, self.evaluate(field, answer));
        next
    }

    /// Checks and parses one answer.
    pub fn evaluate(&self, field: RequirementField, answer: &str) -> Answer {
        Answer {
            raw: answer.trim().to_string(),
            parsed: parse_value(field, answer),
            specificity: self.specificity_check(field, answer),
        }
    }
}

/// Rule-based check with the bundled catalog.
pub fn specificity_check(field: RequirementField, answer: &str) -> Specificity {
    ElicitationCatalog::default().specificity_check(field, answer)
}

pub fn next_question(doc: &RequirementDocument) -> NextQuestion {
    ElicitationCatalog::default().next_question(doc)
}

fn tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric() && c != '%' && c != '/')
                .to_ascii_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

fn parse_value(field: RequirementField, answer: &str) -> Option<ParsedValue> {
    let text = answer.trim();
    if text.is_empty() {
        return None;
    }
    match field {
        RequirementField::ConceptScope => Some(ParsedValue::Concept(parse_concept(text))),
        RequirementField::PerformanceTarget => parse_performance_target(text).map(ParsedValue::PerformanceTarget),
        RequirementField::Context => parse_context(text).ok().map(ParsedValue::Context),
        RequirementField::Materials | RequirementField::ObservableAction => None,
    }
}

const SCOPE_MARKERS: [&str; 6] = [" for ", " at ", " in ", " within ", " with ", " to "];

pub fn parse_concept(text: &str) -> ConceptValue {
    let text = text.trim().trim_end_matches('.');
    let lower = text.to_ascii_lowercase();
    let cut = SCOPE_MARKERS
        .iter()
        .filter_map(|m| lower.find(m))
        .chain([',', ';'].iter().filter_map(|c| lower.find(*c)))
        .min();
    match cut {
        Some(at) if at > 0 => {
            let scope = text[at..].trim_start_matches([',', ';']).trim();
            ConceptValue {
                concept: text[..at].trim().to_string(),
                scope: (!scope.is_empty()).then(|| scope.to_string()),
            }
        }
        _ => ConceptValue {
            concept: text.to_string(),
            scope: None,
        },
    }
}

const NOT_QUALITY: [&str; 10] = [
    "only", "early", "daily", "weekly", "family", "apply", "supply", "reply", "nearly", "rally",
];

pub fn parse_performance_target(text: &str) -> Option<PerformanceTargetValue> {
    let toks = tokens(text);
    let number = |t: &str| -> Option<f64> {
        let t = t.trim_end_matches('%');
        t.parse::<f64>().ok().filter(|v| v.is_finite())
    };

    let time_at = toks
        .iter()
        .enumerate()
        .skip(1)
        .find(|(i, t)| TimeUnit::from_token(t).is_some() && number(&toks[i - 1]).is_some())
        .map(|(i, _)| i)?;
    let time_value = number(&toks[time_at - 1])?;
    if time_value <= 0.0 || time_value.fract() != 0.0 {
        return None;
    }
    let time_window = TimeWindow {
        value: time_value as u32,
        unit: TimeUnit::from_token(&toks[time_at])?,
    };

    let mut quantity = None;
    for (i, t) in toks.iter().enumerate() {
        if i == time_at - 1 {
            continue;
        }
        if let Some((a, b)) = t.split_once('/') {
            if let (Some(a), Ok(b)) = (number(a), b.parse::<u32>()) {
                quantity = Some(Quantity {
                    value: a,
                    unit: QuantityUnit::Count,
                    out_of: Some(b),
                });
                break;
            }
        }
        let Some(value) = number(t) else { continue };
        let next = toks.get(i + 1).map(String::as_str);
        let percent = t.ends_with('%') || matches!(next, Some("percent") | Some("%"));
        let out_of = match (next, toks.get(i + 2).map(String::as_str), toks.get(i + 3)) {
            (Some("of"), Some(n), _) => n.parse::<u32>().ok(),
            (Some("out"), Some("of"), Some(n)) => n.parse::<u32>().ok(),
            _ => None,
        };
        quantity = Some(Quantity {
            value,
            unit: if percent {
                QuantityUnit::Percentage
            } else {
                QuantityUnit::Count
            },
            out_of: if percent { None } else { out_of },
        });
        break;
    }
    let quantity = quantity.filter(|q| q.value > 0.0)?;
    let quality = toks
        .iter()
        .find(|t| {
            t.len() > 3
                && t.ends_with("ly")
                && !NOT_QUALITY.contains(&t.as_str())
                && t.chars().all(|c| c.is_alphabetic())
        })
        .cloned();
    Some(PerformanceTargetValue {
        description: text.trim().to_string(),
        quantity,
        time_window,
        quality,
    })
}

/// Parses `environment: ...; realism: ...; tone: ...` (semicolons or line breaks).
pub fn parse_context(text: &str) -> Result<ContextValue, Vec<String>> {
    let mut environment = None;
    let mut realism_raw = None;
    let mut tone = None;
    for part in text.split([';', '\n']) {
        let Some((key, value)) = part.split_once(':') else {
            continue;
        };
        let value = value.trim().trim_end_matches('.').trim();
        if value.is_empty() {
            continue;
        }
        match key.trim().to_ascii_lowercase().as_str() {
            "environment" | "environment type" | "setting" => environment = Some(value.to_string()),
            "realism" | "realism level" => realism_raw = Some(value.to_string()),
            "tone" | "instructional tone" => tone = Some(value.to_string()),
            _ => {}
        }
    }
    let mut problems = Vec::new();
    if environment.is_none() {
        problems.push("missing environment type".to_string());
    }
    let realism = match realism_raw.as_deref() {
        None => {
            problems.push("missing realism level".to_string());
            None
        }
        Some(raw) => {
            let level = RealismLevel::parse(raw);
            if level.is_none() {
                problems.push("realism level must be abstract, stylized, or realistic".to_string());
            }
            level
        }
    };
    if tone.is_none() {
        problems.push("missing instructional tone".to_string());
    }
    match (environment, realism, tone) {
        (Some(environment_type), Some(realism_level), Some(tone)) if problems.is_empty() => Ok(ContextValue {
            environment_type,
            realism_level,
            tone,
        }),
        _ => Err(problems),
    }
}

fn context_problems(text: &str) -> Vec<String> {
    parse_context(text).err().unwrap_or_default()
}

fn sanitize_slot(text: &str) -> String {
    text.replace('[', "(")
        .replace(']', ")")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

fn leading_verb_phrase(text: &str) -> String {
    let text = text.trim();
    let lower = text.to_ascii_lowercase();
    let cut = [",", ";", ".", " within ", " in under "]
        .iter()
        .filter_map(|m| lower.find(m))
        .filter(|at| *at > 0)
        .min()
        .unwrap_or(text.len());
    text[..cut].trim().to_string()
}

/// Rule-based slot fills for the teaching sentence, in template order.
///
/// * Adverb: performance-target summary, led by any quality adverb.
/// * Verb: the observable action's leading verb phrase.
/// * Noun: the concept phrase.
/// * Adjective: `<realism> <environment>`.
pub fn draft_pedagogy_slots(doc: &RequirementDocument) -> Result<[String; 4], ExtractionError> {
    if !doc.complete() {
        return Err(ExtractionError::IncompleteDocument(doc.open_fields()));
    }
    let raw = |f: RequirementField| doc.answer(f).map(|a| a.raw.clone()).unwrap_or_default();
    let parsed = |f: RequirementField| doc.answer(f).and_then(|a| a.parsed.clone());

    let adverb = match parsed(RequirementField::PerformanceTarget) {
        Some(ParsedValue::PerformanceTarget(t)) => t.summary(),
        _ => raw(RequirementField::PerformanceTarget),
    };
    let verb = leading_verb_phrase(&raw(RequirementField::ObservableAction));
    let noun = match parsed(RequirementField::ConceptScope) {
        Some(ParsedValue::Concept(c)) => c.concept,
        _ => raw(RequirementField::ConceptScope),
    };
    let adjective = match parsed(RequirementField::Context) {
        Some(ParsedValue::Context(c)) => format!("{} {}", c.realism_level.as_lower(), c.environment_type),
        _ => raw(RequirementField::Context),
    };
    Ok([adverb, verb, noun, adjective].map(|s| sanitize_slot(&s)))
}

pub fn propose_options(
    gateway: &Gateway,
    catalog: &ElicitationCatalog,
    field: RequirementField,
    doc: &RequirementDocument,
) -> Result<OptionSet, ExtractionError> {
    let spec = PromptSpec::new(
        Phase::Extraction,
        "Propose a small set of concrete candidate answers the instructor can pick from or revise.",
        OutputContract::OptionList,
    )?
    .with_block("Field", field.as_str())?
    .with_block("Question", catalog.question(field))?
    .with_block("Requirement document", doc.summary())?;
    let result = gateway.complete(&spec)?;
    let options = parse_option_list(&result.raw_text).map_err(|v| GatewayError::ProviderFailure {
        attempts: result.attempts,
        last_violation: v,
    })?;
    Ok(OptionSet { field, options })
}

pub fn compose_pedagogy_sentence(
    gateway: &Gateway,
    doc: &RequirementDocument,
) -> Result<ControlledSentence, ExtractionError> {
    let draft = draft_pedagogy_slots(doc)?;
    let draft_text = SlotKind::ALL
        .into_iter()
        .zip(&draft)
        .map(|(k, t)| format!("{k}: {t}"))
        .collect::<Vec<_>>()
        .join("\n");
    let spec = PromptSpec::new(
        Phase::Translation,
        "Compose a single pedagogy sentence that fills the four slots from the instructor's answers.",
        OutputContract::ControlledSentence(Register::Teaching),
    )?
    .with_block("Requirement document", doc.summary())?
    .with_block("Draft slots", draft_text)?;
    let result = gateway.complete(&spec)?;
    let sentence = parse_sentence(&result.raw_text, Register::Teaching).map_err(|e| GatewayError::ProviderFailure {
        attempts: result.attempts,
        last_violation: e.to_string(),
    })?;
    Ok(sentence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn catalog() -> ElicitationCatalog {
        ElicitationCatalog::default()
    }

    pub(crate) fn fraction_doc() -> RequirementDocument {
        let c = catalog();
        let mut doc = RequirementDocument::new();
        for (field, text) in [
            (
                RequirementField::ConceptScope,
                "fraction equivalence for fourth graders",
            ),
            (RequirementField::Materials, "fraction strips and worksheets"),
            (RequirementField::ObservableAction, "solve matching problems"),
            (
                RequirementField::PerformanceTarget,
                "accurately solve 8 of 10 problems within 15 minutes",
            ),
            (
                RequirementField::Context,
                "environment: kitchen; realism: stylized; tone: playful",
            ),
        ] {
            doc = c.ingest_answer(&doc, field, text);
        }
        doc
    }

    #[test]
    fn empty_document_asks_concept_first() {
        match next_question(&RequirementDocument::new()) {
            NextQuestion::Question { field, prompt } => {
                assert_eq!(field, RequirementField::ConceptScope);
                assert!(!prompt.is_empty());
            }
            NextQuestion::Complete => panic!("empty doc is not complete"),
        }
    }

    #[test]
    fn third_question_after_two_passes() {
        let c = catalog();
        let doc = c.ingest_answer(
            &RequirementDocument::new(),
            RequirementField::ConceptScope,
            "rock types for geology 101",
        );
        let doc = c.ingest_answer(&doc, RequirementField::Materials, "a set of rock specimens");
        assert!(matches!(
            c.next_question(&doc),
            NextQuestion::Question {
                field: RequirementField::ObservableAction,
                ..
            }
        ));
    }

    #[test]
    fn full_document_is_complete() {
        let doc = fraction_doc();
        assert!(doc.complete());
        assert_eq!(next_question(&doc), NextQuestion::Complete);
    }

    #[test]
    fn specificity_examples() {
        assert_eq!(
            specificity_check(RequirementField::ObservableAction, "understand fractions"),
            Specificity::Fail {
                reasons: vec!["non-observable verb".into()]
            }
        );
        assert_eq!(
            specificity_check(
                RequirementField::PerformanceTarget,
                "solve 8 of 10 equations within 15 minutes"
            ),
            Specificity::Pass
        );
        assert_eq!(
            specificity_check(RequirementField::ConceptScope, ""),
            Specificity::Fail {
                reasons: vec!["empty".into()]
            }
        );
    }

    #[test]
    fn deny_list_by_hand() {
        // Each deny-list entry, plus inflected and `to`-prefixed forms, fails;
        // observable verbs pass.
        let denied = [
            "understand fractions",
            "know the planets",
            "appreciate poetry",
            "learn the water cycle",
            "be aware of safety rules",
            "grasp recursion",
            "to understand ratios",
            "Understands the map",
            "learning verbs",
        ];
        for answer in denied {
            assert!(
                !specificity_check(RequirementField::ObservableAction, answer).passed(),
                "{answer}"
            );
        }
        for answer in [
            "classify rocks",
            "be able to sort cards",
            "label a diagram",
            "knit a scarf",
        ] {
            assert!(
                specificity_check(RequirementField::ObservableAction, answer).passed(),
                "{answer}"
            );
        }
    }

    #[test]
    fn performance_target_rules() {
        let fail = specificity_check(RequirementField::PerformanceTarget, "do well quickly");
        assert_eq!(
            fail,
            Specificity::Fail {
                reasons: vec![
                    "no number".into(),
                    "no time unit (minutes, hours, sessions, or weeks)".into()
                ]
            }
        );
        assert!(specificity_check(RequirementField::PerformanceTarget, "90% within 2 sessions").passed());
    }

    #[test]
    fn context_needs_all_three_parts() {
        let r = specificity_check(RequirementField::Context, "environment: kitchen; tone: playful");
        assert_eq!(
            r,
            Specificity::Fail {
                reasons: vec!["missing realism level".into()]
            }
        );
        let r = specificity_check(
            RequirementField::Context,
            "environment: kitchen\nrealism: cartoon\ntone: playful",
        );
        assert!(!r.passed());
        assert!(specificity_check(
            RequirementField::Context,
            "Environment type: field station\nRealism level: Realistic\nInstructional tone: calm"
        )
        .passed());
    }

    #[test]
    fn short_scope_fails() {
        assert!(!specificity_check(RequirementField::ConceptScope, "fractions").passed());
        assert!(!specificity_check(RequirementField::Materials, "worksheets").passed());
    }

    #[test]
    fn target_parsing() {
        let t = parse_performance_target("accurately solve 8 of 10 problems within 15 minutes").unwrap();
        assert_eq!(t.summary(), "accurately, 8 of 10 within 15 minutes");
        let t = parse_performance_target("correctly classify 90% of samples within 2 sessions").unwrap();
        assert_eq!(t.summary(), "correctly, 90% within 2 sessions");
        let t = parse_performance_target("8/10 in 1 session").unwrap();
        assert_eq!(t.summary(), "8 of 10 within 1 session");
        assert!(parse_performance_target("finish within 15 minutes").is_none());
        assert!(parse_performance_target("solve 3 problems within 0 minutes").is_none());
    }

    #[test]
    fn concept_phrase() {
        assert_eq!(
            parse_concept("fraction equivalence for fourth graders").concept,
            "fraction equivalence"
        );
        assert_eq!(parse_concept("the water cycle").concept, "the water cycle");
    }

    #[test]
    fn draft_matches_the_reference_slots() {
        let slots = draft_pedagogy_slots(&fraction_doc()).unwrap();
        assert_eq!(
            slots,
            [
                "accurately, 8 of 10 within 15 minutes",
                "solve matching problems",
                "fraction equivalence",
                "stylized kitchen"
            ]
        );
    }

    #[test]
    fn incomplete_document_cannot_compose() {
        let err = compose_pedagogy_sentence(&Gateway::mock(0), &RequirementDocument::new()).unwrap_err();
        assert!(matches!(err, ExtractionError::IncompleteDocument(ref open) if open.len() == 5));
    }

    #[test]
    fn failing_answer_keeps_the_question() {
        let c = catalog();
        let doc = c.ingest_answer(&RequirementDocument::new(), RequirementField::ConceptScope, "math");
        assert!(matches!(
            c.next_question(&doc),
            NextQuestion::Question {
                field: RequirementField::ConceptScope,
                ..
            }
        ));
        let again = c.ingest_answer(&doc, RequirementField::ConceptScope, "math");
        assert_eq!(c.next_question(&again), c.next_question(&doc));
    }

    #[test]
    fn reanswer_overwrites() {
        let c = catalog();
        let doc = c.ingest_answer(
            &RequirementDocument::new(),
            RequirementField::Materials,
            "first set of slides",
        );
        let doc = c.ingest_answer(&doc, RequirementField::Materials, "second set of slides");
        assert_eq!(
            doc.answer(RequirementField::Materials).unwrap().raw,
            "second set of slides"
        );
    }

    #[test]
    fn catalog_requires_every_question() {
        let err = ElicitationCatalog::from_toml_str("non_observable_verbs = []\n[questions]\nContext = \"x\"\n");
        assert!(err.is_err());
    }

    #[test]
    fn field_names() {
        assert_eq!(
            RequirementField::from_name("concept_scope"),
            Some(RequirementField::ConceptScope)
        );
        assert_eq!(
            RequirementField::from_name("performance-target"),
            Some(RequirementField::PerformanceTarget)
        );
        assert_eq!(RequirementField::from_name("nope"), None);
    }

    fn any_field() -> impl Strategy<Value = RequirementField> {
        (0usize..5).prop_map(|i| RequirementField::ALL[i])
    }

    proptest! {
        #[test]
        fn check_is_pure(field in any_field(), answer in ".{0,40}") {
            prop_assert_eq!(specificity_check(field, &answer), specificity_check(field, &answer));
        }

        #[test]
        fn ingest_leaves_other_fields_alone(
            steps in proptest::collection::vec((any_field(), "[a-z0-9 :;%]{0,30}"), 1..20)
        ) {
            let c = catalog();
            let mut doc = RequirementDocument::new();
            for (field, text) in steps {
                let next = c.ingest_answer(&doc, field, &text);
                for other in RequirementField::ALL.into_iter().filter(|f| *f != field) {
                    prop_assert_eq!(next.entry(other), doc.entry(other));
                }
                prop_assert_eq!(&next.answer(field).unwrap().raw, text.trim());
                doc = next;
            }
        }

        #[test]
        fn question_advances_only_on_pass(field in any_field(), text in "[a-z ]{0,20}") {
            let c = catalog();
            let doc = c.ingest_answer(&RequirementDocument::new(), field, &text);
            let passed = doc.answer(field).unwrap().specificity.passed();
            match c.next_question(&doc) {
                NextQuestion::Question { field: asked, .. } => {
                    if field == RequirementField::ConceptScope && !passed {
                        prop_assert_eq!(asked, RequirementField::ConceptScope);
                    }
                    if field == RequirementField::ConceptScope && passed {
                        prop_assert_eq!(asked, RequirementField::Materials);
                    }
                }
                NextQuestion::Complete => prop_assert!(false),
            }
        }
    }
}
