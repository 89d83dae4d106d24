//! Deterministic offline provider.
//!
//! In template mode every reply is a pure function of `(seed, prompt)`: the
//! mock reads the labelled blocks out of the prompt, picks words from fixed
//! lists using a SHA-256 of the prompt offset by the seed, and fills the
//! reply template for the requested contract. Scripted mode replays a fixed
//! sequence of good and bad replies before falling back to templates.

use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::Duration;

use sha2::{Digest, Sha256};

use super::contract::parse_candidate_output;
use super::prompt::dissect;
use super::{Provider, ProviderError};
use crate::cnl::{parse_sentence, ControlledSentence, Register, SlotKind};
use crate::extraction::RequirementField;
use crate::mapping::mapping_row;

/// Reply used for [`ScriptStep::Malformed`]. It satisfies no structured contract.
pub const MALFORMED_OUTPUT: &str = "~~ malformed reply: no frame, no brackets ~~";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptStep {
    /// Reply with the template output.
    Valid,
    Malformed,
    Empty,
    Timeout,
    Text(String),
}

pub struct MockProvider {
    seed: u64,
    script: Mutex<VecDeque<ScriptStep>>,
    prompts: Mutex<Vec<String>>,
}

impl MockProvider {
    pub fn new(seed: u64) -> Self {
        MockProvider::scripted(seed, Vec::new())
    }

    pub fn scripted(seed: u64, script: Vec<ScriptStep>) -> Self {
        MockProvider {
            seed,
            script: Mutex::new(script.into()),
            prompts: Mutex::new(Vec::new()),
        }
    }

    /// Queues more scripted steps behind any remaining ones.
    pub fn push_script(&self, steps: impl IntoIterator<Item = ScriptStep>) {
        self.script.lock().expect("script lock").extend(steps);
    }

    /// Every prompt received so far, in order.
    pub fn prompts(&self) -> Vec<String> {
        self.prompts.lock().expect("prompt log lock").clone()
    }

    /// The template reply for a prompt.
    pub fn template_reply(&self, prompt: &str) -> String {
        let (tag, blocks) = dissect(prompt);
        let block = |label: &str| {
            blocks
                .iter()
                .find(|(l, _)| l == label)
                .map(|(_, t)| t.as_str())
                .unwrap_or("")
        };
        let pick = Picker::new(self.seed, prompt);
        match tag.as_deref().unwrap_or("free-text") {
            "option-list" => options_reply(&pick, block("Field")),
            "controlled-sentence/teaching" => teaching_reply(block("Draft slots")),
            "controlled-sentence/game" => refine_reply(block("Current game sentence"), block("Instruction")),
            "candidate" => {
                let pedagogy = parse_sentence(block("Pedagogy sentence"), Register::Teaching).ok();
                match (pedagogy, SlotKind::from_name(block("Regenerate slot"))) {
                    (Some(p), Some(kind)) => regenerate_reply(&pick, &p, block("Current candidate"), kind),
                    (Some(p), None) => candidate_reply(&pick, &p, candidate_index(block("Candidate"))),
                    (None, _) => MALFORMED_OUTPUT.to_string(),
                }
            }
            "paragraph" => paragraph_reply(block("Game sentence")),
            "pseudocode" => pseudocode_reply(block("Game sentence")),
            _ => "Noted.".to_string(),
        }
    }
}

impl Provider for MockProvider {
    fn name(&self) -> &str {
        "mock"
    }

    fn complete(&self, prompt: &str, _timeout: Duration) -> Result<String, ProviderError> {
        self.prompts.lock().expect("prompt log lock").push(prompt.to_string());
        let step = self
            .script
            .lock()
            .expect("script lock")
            .pop_front()
            .unwrap_or(ScriptStep::Valid);
        match step {
            ScriptStep::Valid => Ok(self.template_reply(prompt)),
            ScriptStep::Malformed => Ok(MALFORMED_OUTPUT.to_string()),
            ScriptStep::Empty => Ok(String::new()),
            ScriptStep::Timeout => Err(ProviderError::Timeout),
            ScriptStep::Text(t) => Ok(t),
        }
    }
}

/// Seeded index source. Offsets are `hash(prompt) + seed`, so distinct seeds
/// below the list-product size never collide for the same prompt.
struct Picker {
    base: u64,
}

impl Picker {
    fn new(seed: u64, prompt: &str) -> Self {
        let digest = Sha256::digest(prompt.as_bytes());
        let mut first = [0u8; 8];
        first.copy_from_slice(&digest[..8]);
        // Keep the hash small enough that adding any u32-sized seed cannot wrap.
        let hash = u64::from_le_bytes(first) >> 16;
        Picker {
            base: hash.wrapping_add(seed),
        }
    }

    /// Mixed-radix digits of the offset, one per radix.
    fn digits<const N: usize>(&self, radices: [usize; N]) -> [usize; N] {
        let mut rest = self.base;
        radices.map(|r| {
            let d = (rest % r as u64) as usize;
            rest /= r as u64;
            d
        })
    }
}

const OPTION_COUNT: usize = 3;

fn field_options(field: RequirementField) -> [&'static str; 6] {
    match field {
        RequirementField::ConceptScope => [
            "fraction equivalence for fourth graders",
            "plate tectonics at an introductory level",
            "photosynthesis inputs and outputs for middle school",
            "rock classification for an introductory geology lab",
            "supply and demand for first-year economics",
            "food chains for third graders",
        ],
        RequirementField::Materials => [
            "printed worksheets with worked examples",
            "a set of labelled rock specimens",
            "short video clips from the textbook",
            "fraction strips and number lines",
            "the assigned reading for this unit",
            "photographs of field sites with captions",
        ],
        RequirementField::ObservableAction => [
            "classify examples into correct categories",
            "solve matching problems",
            "label the parts of a diagram",
            "sort cards into ordered sequences",
            "select evidence that supports a claim",
            "identify errors in worked solutions",
        ],
        RequirementField::PerformanceTarget => [
            "accurately solve 8 of 10 problems within 15 minutes",
            "correctly classify 90% of samples within 2 sessions",
            "complete 5 tasks without hints within 20 minutes",
            "give 4 correct answers in a row within 10 minutes",
            "independently finish 3 scenarios within 1 session",
            "score 70% or higher within 30 minutes",
        ],
        RequirementField::Context => [
            "environment: kitchen; realism: stylized; tone: playful",
            "environment: field station; realism: realistic; tone: serious",
            "environment: space station; realism: abstract; tone: adventurous",
            "environment: classroom lab; realism: realistic; tone: encouraging",
            "environment: fantasy forest; realism: stylized; tone: whimsical",
            "environment: city market; realism: stylized; tone: friendly",
        ],
    }
}

fn options_reply(pick: &Picker, field: &str) -> String {
    let Some(field) = RequirementField::from_name(field) else {
        return MALFORMED_OUTPUT.to_string();
    };
    let list = field_options(field);
    let [start] = pick.digits([list.len()]);
    (0..OPTION_COUNT)
        .map(|i| format!("- {}", list[(start + i) % list.len()]))
        .collect::<Vec<_>>()
        .join("\n")
}

fn labelled_slots(text: &str) -> [Option<String>; 4] {
    let mut out: [Option<String>; 4] = Default::default();
    for line in text.lines() {
        if let Some((label, value)) = line.split_once(':') {
            if let Some(kind) = SlotKind::from_name(label) {
                out[kind.index()] = Some(value.trim().to_string());
            }
        }
    }
    out
}

fn teaching_reply(draft: &str) -> String {
    let slots = labelled_slots(draft);
    let texts = [0, 1, 2, 3].map(|i| slots[i].as_deref().unwrap_or(""));
    match ControlledSentence::from_texts(Register::Teaching, texts) {
        Ok(s) => s.canonical(),
        Err(_) => MALFORMED_OUTPUT.to_string(),
    }
}

/// Applies instructions of the form
/// `<change|set|make|replace|use> [the] <slot> [slot] <to|into|with|as> <text>`.
/// Anything else leaves the sentence unchanged.
pub(crate) fn apply_instruction(current: &ControlledSentence, instruction: &str) -> ControlledSentence {
    const VERBS: [&str; 5] = ["change", "set", "make", "replace", "use"];
    const LINKS: [&str; 4] = ["to", "into", "with", "as"];
    let words: Vec<(usize, &str)> = instruction
        .split_whitespace()
        .map(|w| (w.as_ptr() as usize - instruction.as_ptr() as usize, w))
        .collect();
    let mut i = 0;
    let lower = |k: usize| words.get(k).map(|(_, w)| w.to_ascii_lowercase()).unwrap_or_default();
    if !VERBS.contains(&lower(i).as_str()) {
        return current.clone();
    }
    i += 1;
    if lower(i) == "the" {
        i += 1;
    }
    let Some(kind) = SlotKind::from_name(&lower(i)) else {
        return current.clone();
    };
    i += 1;
    if lower(i) == "slot" {
        i += 1;
    }
    if !LINKS.contains(&lower(i).as_str()) {
        return current.clone();
    }
    i += 1;
    let Some(&(offset, _)) = words.get(i) else {
        return current.clone();
    };
    let text = instruction[offset..]
        .trim()
        .trim_end_matches('.')
        .trim_matches(|c| c == '"' || c == '\'');
    current.with_slot(kind, text).unwrap_or_else(|_| current.clone())
}

fn refine_reply(current: &str, instruction: &str) -> String {
    match parse_sentence(current, Register::Game) {
        Ok(s) => apply_instruction(&s, instruction).canonical(),
        Err(_) => MALFORMED_OUTPUT.to_string(),
    }
}

const RULES: [&str; 5] = [
    "with a visible countdown",
    "with escalating rounds",
    "with three lives",
    "with streak bonuses",
    "with limited hints",
];
const VENUES: [&str; 5] = ["workshop", "outpost", "studio", "market", "lab"];

struct Archetype {
    verbs: [&'static str; 5],
    props: [&'static str; 5],
}

const ARCHETYPES: [Archetype; 3] = [
    // sorting task
    Archetype {
        verbs: [
            "sort and match",
            "drag and group",
            "bin and label",
            "pair and stack",
            "rank and order",
        ],
        props: ["cards", "tiles", "tokens", "crates", "badges"],
    },
    // timed quiz-quest
    Archetype {
        verbs: [
            "race through quiz gates on",
            "answer timed riddles about",
            "unlock quest doors with",
            "duel quiz guardians using",
            "collect answer keys for",
        ],
        props: [
            "quest cards",
            "riddle scrolls",
            "gate puzzles",
            "guardian questions",
            "key challenges",
        ],
    },
    // simulation-inspection
    Archetype {
        verbs: [
            "inspect and diagnose",
            "probe and test",
            "examine and report on",
            "measure and compare",
            "investigate and flag",
        ],
        props: [
            "simulated specimens",
            "virtual samples",
            "case files",
            "sensor readings",
            "lab scenarios",
        ],
    },
];

fn candidate_index(text: &str) -> usize {
    text.split_whitespace()
        .next()
        .and_then(|n| n.parse::<usize>().ok())
        .unwrap_or(1)
        .max(1)
}

fn rationale_line(kind: SlotKind, game: &str, pedagogy: &str) -> String {
    let meaning = mapping_row(kind).game_meaning.trim_end_matches('.');
    format!(
        "{}: {meaning}: \"{game}\" carries the pedagogy {} \"{pedagogy}\" into play.",
        kind.as_str().to_uppercase(),
        kind.as_str().to_lowercase(),
    )
}

fn candidate_text(sentence: &ControlledSentence, pedagogy: &ControlledSentence) -> String {
    let mut out = format!("SENTENCE: {}", sentence.canonical());
    for kind in SlotKind::ALL {
        out.push('\n');
        out.push_str(&rationale_line(kind, sentence.slot(kind), pedagogy.slot(kind)));
    }
    out
}

fn candidate_reply(pick: &Picker, pedagogy: &ControlledSentence, index: usize) -> String {
    let archetype = &ARCHETYPES[(index - 1) % ARCHETYPES.len()];
    let [rule, verb, prop, venue] = pick.digits([RULES.len(), 5, 5, VENUES.len()]);
    let texts = [
        format!("{}, {}", pedagogy.slot(SlotKind::Adverb), RULES[rule]),
        archetype.verbs[verb].to_string(),
        format!("{} {}", pedagogy.slot(SlotKind::Noun), archetype.props[prop]),
        format!("{} {}", pedagogy.slot(SlotKind::Adjective), VENUES[venue]),
    ];
    match ControlledSentence::from_texts(Register::Game, texts.each_ref().map(String::as_str)) {
        Ok(game) => candidate_text(&game, pedagogy),
        Err(_) => MALFORMED_OUTPUT.to_string(),
    }
}

fn slot_alternatives(kind: SlotKind, pedagogy: &ControlledSentence) -> Vec<String> {
    let base = pedagogy.slot(kind);
    match kind {
        SlotKind::Adverb => RULES.iter().map(|r| format!("{base}, {r}")).collect(),
        SlotKind::Verb => ARCHETYPES.iter().flat_map(|a| a.verbs).map(str::to_string).collect(),
        SlotKind::Noun => ARCHETYPES
            .iter()
            .flat_map(|a| a.props)
            .map(|p| format!("{base} {p}"))
            .collect(),
        SlotKind::Adjective => VENUES.iter().map(|v| format!("{base} {v}")).collect(),
    }
}

fn regenerate_reply(pick: &Picker, pedagogy: &ControlledSentence, current: &str, kind: SlotKind) -> String {
    let Ok(current) = parse_candidate_output(current) else {
        return MALFORMED_OUTPUT.to_string();
    };
    let options = slot_alternatives(kind, pedagogy);
    let [start] = pick.digits([options.len()]);
    let replacement = (0..options.len())
        .map(|i| &options[(start + i) % options.len()])
        .find(|o| o.as_str() != current.sentence.slot(kind))
        .cloned()
        .unwrap_or_else(|| options[start].clone());
    let Ok(next) = current.sentence.with_slot(kind, &replacement) else {
        return MALFORMED_OUTPUT.to_string();
    };
    let mut out = format!("SENTENCE: {}", next.canonical());
    for k in SlotKind::ALL {
        out.push('\n');
        if k == kind {
            out.push_str(&rationale_line(k, next.slot(k), pedagogy.slot(k)));
        } else {
            out.push_str(&format!(
                "{}: {}",
                k.as_str().to_uppercase(),
                current.explanations[k.index()]
            ));
        }
    }
    out
}

fn paragraph_reply(sentence: &str) -> String {
    let Ok(s) = parse_sentence(sentence, Register::Game) else {
        return MALFORMED_OUTPUT.to_string();
    };
    let (adv, verb, noun, adj) = (
        s.slot(SlotKind::Adverb),
        s.slot(SlotKind::Verb),
        s.slot(SlotKind::Noun),
        s.slot(SlotKind::Adjective),
    );
    format!(
        "In this game, players {verb} {noun} in a {adj} environment. The rules frame success as \
         \"{adv}\", so every round tells the player how close they are to the target. New {noun} \
         arrive each round and feedback follows every action.\n\
         Play example 1: A player starts a round, draws the first of the {noun}, and chooses to \
         {verb} it; the game checks the move against \"{adv}\" and updates the progress bar.\n\
         Play example 2: After a wrong move the player gets a short hint tied to the {adj} setting \
         and tries again before the round ends."
    )
}

fn pseudocode_reply(sentence: &str) -> String {
    let Ok(s) = parse_sentence(sentence, Register::Game) else {
        return MALFORMED_OUTPUT.to_string();
    };
    let (adv, verb, noun, adj) = (
        s.slot(SlotKind::Adverb),
        s.slot(SlotKind::Verb),
        s.slot(SlotKind::Noun),
        s.slot(SlotKind::Adjective),
    );
    format!(
        "GAME:\n\
         \x20 TITLE \"{noun}\"\n\
         \x20 SETTING \"{adj}\"\n\
         SETUP:\n\
         \x20 LOAD content \"{noun}\"\n\
         \x20 SET rules \"{adv}\"\n\
         \x20 SET score TO 0\n\
         LOOP:\n\
         \x20 WHILE round is active:\n\
         \x20   PRESENT next item from content\n\
         \x20   AWAIT player action \"{verb}\"\n\
         \x20   CHECK action against rules\n\
         \x20   UPDATE score and show feedback\n\
         WIN_CONDITION:\n\
         \x20 IF score meets rules:\n\
         \x20   SHOW success screen\n\
         LOSE_OR_RETRY:\n\
         \x20 IF round ends before target:\n\
         \x20   OFFER retry with hint\n"
    )
}
