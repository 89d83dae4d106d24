use crate::cnl::{parse_sentence, ControlledSentence, Register, SlotKind};
use crate::development::{validate_pseudocode, PseudocodeCheck};

/// The shape a reply must have before it may leave the gateway.
#[derive(Debug, Clone, PartialEq)]
pub enum OutputContract {
    FreeText,
    /// Prose followed by at least one `Play example` line.
    Paragraph,
    ControlledSentence(Register),
    /// A game sentence plus one rationale line per slot.
    Candidate,
    /// Pseudocode that must trace the slot texts of this sentence.
    Pseudocode(ControlledSentence),
    OptionList,
}

const SENTENCE_FRAME: &str = "Players (Students) [<adverb>] [<verb>] [<noun>] in a [<adjective>] environment.";

impl OutputContract {
    pub fn tag(&self) -> &'static str {
        match self {
            OutputContract::FreeText => "free-text",
            OutputContract::Paragraph => "paragraph",
            OutputContract::ControlledSentence(Register::Teaching) => "controlled-sentence/teaching",
            OutputContract::ControlledSentence(Register::Game) => "controlled-sentence/game",
            OutputContract::Candidate => "candidate",
            OutputContract::Pseudocode(_) => "pseudocode",
            OutputContract::OptionList => "option-list",
        }
    }

    /// Verbatim contract text placed at the end of every prompt.
    pub fn statement(&self) -> String {
        match self {
            OutputContract::FreeText => "Reply in plain text.".to_string(),
            OutputContract::Paragraph => "Reply with one descriptive paragraph explaining how the game plays, \
                 then at least one line that starts with `Play example` and walks through a concrete turn."
                .to_string(),
            OutputContract::ControlledSentence(register) => format!(
                "Reply with exactly one {} sentence on a single line, in this frame:\n{SENTENCE_FRAME}\n\
                 Fill every bracket with nonempty text, keep the brackets, never put a bracket inside a slot, \
                 and write nothing else.",
                match register {
                    Register::Teaching => "teaching-language",
                    Register::Game => "game-language",
                }
            ),
            OutputContract::Candidate => format!(
                "Reply with exactly five lines:\nSENTENCE: {SENTENCE_FRAME}\n\
                 ADVERB: <how the game rules realize the pedagogy adverb>\n\
                 VERB: <how the mechanic realizes the pedagogy verb>\n\
                 NOUN: <how the game content realizes the pedagogy noun>\n\
                 ADJECTIVE: <how the setting realizes the pedagogy adjective>"
            ),
            OutputContract::Pseudocode(source) => format!(
                "Reply with pseudocode only. Use exactly these top-level sections, in order, each on its own line \
                 ending with a colon: GAME, SETUP, LOOP, WIN_CONDITION, LOSE_OR_RETRY. Every line starts with an \
                 UPPERCASE keyword. Nest with two spaces per level. Quote each of these slot texts verbatim at \
                 least once: \"{}\", \"{}\", \"{}\", \"{}\".",
                source.slot(SlotKind::Adverb),
                source.slot(SlotKind::Verb),
                source.slot(SlotKind::Noun),
                source.slot(SlotKind::Adjective),
            ),
            OutputContract::OptionList => {
                "Reply with 2 to 5 distinct options, one per line, each line starting with `- `.".to_string()
            }
        }
    }

    pub fn validate(&self, text: &str) -> Result<(), String> {
        match self {
            OutputContract::FreeText => {
                if text.trim().is_empty() {
                    Err("empty reply".into())
                } else {
                    Ok(())
                }
            }
            OutputContract::Paragraph => {
                if text.trim().is_empty() {
                    return Err("empty reply".into());
                }
                if !text
                    .lines()
                    .any(|l| l.trim_start().to_ascii_lowercase().starts_with("play example"))
                {
                    return Err("no `Play example` line".into());
                }
                Ok(())
            }
            OutputContract::ControlledSentence(register) => {
                parse_sentence(text, *register).map(|_| ()).map_err(|e| e.to_string())
            }
            OutputContract::Candidate => parse_candidate_output(text).map(|_| ()),
            OutputContract::Pseudocode(source) => match validate_pseudocode(text, source) {
                PseudocodeCheck::Pass => Ok(()),
                PseudocodeCheck::Fail(reasons) => Err(reasons.join("; ")),
            },
            OutputContract::OptionList => parse_option_list(text).map(|_| ()),
        }
    }
}

/// A parsed candidate reply.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateOutput {
    pub sentence: ControlledSentence,
    /// Rationale text per slot, in template order.
    pub explanations: [String; 4],
}

/// Parses the five-line candidate format. Blank lines are ignored.
pub fn parse_candidate_output(text: &str) -> Result<CandidateOutput, String> {
    let mut sentence = None;
    let mut explanations: [Option<String>; 4] = Default::default();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (label, rest) = line
            .split_once(':')
            .ok_or_else(|| format!("unexpected line `{line}`"))?;
        let rest = rest.trim();
        if label.trim().eq_ignore_ascii_case("sentence") {
            if sentence.is_some() {
                return Err("more than one SENTENCE line".into());
            }
            sentence = Some(parse_sentence(rest, Register::Game).map_err(|e| e.to_string())?);
            continue;
        }
        let kind = SlotKind::from_name(label).ok_or_else(|| format!("unexpected line `{line}`"))?;
        let slot = &mut explanations[kind.index()];
        if slot.is_some() {
            return Err(format!("more than one {} rationale", kind.as_str().to_uppercase()));
        }
        if rest.is_empty() {
            return Err(format!("empty {} rationale", kind.as_str().to_uppercase()));
        }
        *slot = Some(rest.to_string());
    }
    let sentence = sentence.ok_or("missing SENTENCE line")?;
    let mut out: Vec<String> = Vec::with_capacity(4);
    for kind in SlotKind::ALL {
        match explanations[kind.index()].take() {
            Some(e) => out.push(e),
            None => return Err(format!("missing {} rationale", kind.as_str().to_uppercase())),
        }
    }
    Ok(CandidateOutput {
        sentence,
        explanations: out.try_into().expect("four explanations"),
    })
}

/// Parses a bulleted option list, dropping duplicates (case-insensitive) and
/// requiring 2 to 5 distinct entries to remain.
pub fn parse_option_list(text: &str) -> Result<Vec<String>, String> {
    let mut options: Vec<String> = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let item = line
            .strip_prefix("- ")
            .or_else(|| line.strip_prefix("* "))
            .unwrap_or(line)
            .trim();
        if item.is_empty() || item == "-" {
            continue;
        }
        if !options.iter().any(|o| o.eq_ignore_ascii_case(item)) {
            options.push(item.to_string());
        }
    }
    match options.len() {
        0 | 1 => Err(format!("expected at least 2 distinct options, got {}", options.len())),
        2..=5 => Ok(options),
        n => Err(format!("expected at most 5 options, got {n}")),
    }
}
