//! The controlled four-slot sentence.
//!
//! Every sentence, in either register, has the same fixed surface frame:
//!
//! ```text
//! Players (Students) [<adverb>] [<verb>] [<noun>] in a [<adjective>] environment.
//! ```
//!
//! The canonical form keeps the brackets so that parsing is lossless. The
//! display form drops them and reports where each slot landed so a client
//! can color it.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fixed words that open every sentence.
pub const FRAME_SUBJECT: [&str; 2] = ["Players", "(Students)"];
/// Fixed words between the noun and adjective slots.
pub const FRAME_LINK: [&str; 2] = ["in", "a"];
/// Fixed closing word.
pub const FRAME_CLOSE: &str = "environment";

/// One of the four grammatical positions of the template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SlotKind {
    Adverb,
    Verb,
    Noun,
    Adjective,
}

/// Display color bound to a slot kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotColor {
    Red,
    Yellow,
    Green,
    Blue,
}

impl SlotKind {
    /// All kinds in template order.
    pub const ALL: [SlotKind; 4] = [SlotKind::Adverb, SlotKind::Verb, SlotKind::Noun, SlotKind::Adjective];

    pub fn index(self) -> usize {
        match self {
            SlotKind::Adverb => 0,
            SlotKind::Verb => 1,
            SlotKind::Noun => 2,
            SlotKind::Adjective => 3,
        }
    }

    pub fn color(self) -> SlotColor {
        match self {
            SlotKind::Adverb => SlotColor::Red,
            SlotKind::Verb => SlotColor::Yellow,
            SlotKind::Noun => SlotColor::Green,
            SlotKind::Adjective => SlotColor::Blue,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SlotKind::Adverb => "Adverb",
            SlotKind::Verb => "Verb",
            SlotKind::Noun => "Noun",
            SlotKind::Adjective => "Adjective",
        }
    }

    /// Lenient name lookup used for URL segments and labelled text
    /// (`verb`, `Verb`, `VERB`, `verbs`).
    pub fn from_name(name: &str) -> Option<SlotKind> {
        let lower = name.trim().to_ascii_lowercase();
        let stem = lower.strip_suffix('s').unwrap_or(&lower);
        SlotKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(stem))
    }
}

impl fmt::Display for SlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which side of the teaching/game mapping a sentence speaks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Register {
    Teaching,
    Game,
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Register::Teaching => f.write_str("Teaching"),
            Register::Game => f.write_str("Game"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum SlotTextError {
    #[error("slot text is empty")]
    Empty,
    #[error("slot text contains a bracket character")]
    Bracket,
    #[error("slot text contains a line break")]
    LineBreak,
}

/// Text for one slot. Trimmed, nonempty, single-line, bracket-free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SlotFill {
    kind: SlotKind,
    text: String,
}

/// Checks and trims candidate slot text.
pub fn validate_slot_text(text: &str) -> Result<String, SlotTextError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(SlotTextError::Empty);
    }
    if trimmed.contains(['[', ']']) {
        return Err(SlotTextError::Bracket);
    }
    if trimmed.contains(['\n', '\r']) {
        return Err(SlotTextError::LineBreak);
    }
    Ok(trimmed.to_string())
}

impl SlotFill {
    pub fn new(kind: SlotKind, text: &str) -> Result<Self, SlotTextError> {
        Ok(SlotFill {
            kind,
            text: validate_slot_text(text)?,
        })
    }

    pub fn kind(&self) -> SlotKind {
        self.kind
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

/// A complete four-slot sentence in one register.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ControlledSentence {
    register: Register,
    slots: [SlotFill; 4],
}

impl ControlledSentence {
    /// Builds a sentence from the four slot texts in template order.
    pub fn new(register: Register, adverb: &str, verb: &str, noun: &str, adjective: &str) -> Result<Self, CnlError> {
        Self::from_texts(register, [adverb, verb, noun, adjective])
    }

    pub fn from_texts(register: Register, texts: [&str; 4]) -> Result<Self, CnlError> {
        let mut fills = Vec::with_capacity(4);
        for (kind, text) in SlotKind::ALL.into_iter().zip(texts) {
            let fill = SlotFill::new(kind, text).map_err(|e| match e {
                SlotTextError::Empty => CnlError::MissingSlot(kind),
                other => CnlError::InvalidSlotText { kind, reason: other },
            })?;
            fills.push(fill);
        }
        let slots: [SlotFill; 4] = fills.try_into().expect("four fills");
        Ok(ControlledSentence { register, slots })
    }

    pub fn register(&self) -> Register {
        self.register
    }

    pub fn slot(&self, kind: SlotKind) -> &str {
        &self.slots[kind.index()].text
    }

    pub fn fill(&self, kind: SlotKind) -> &SlotFill {
        &self.slots[kind.index()]
    }

    pub fn texts(&self) -> [&str; 4] {
        SlotKind::ALL.map(|k| self.slot(k))
    }

    /// Returns a copy with one slot replaced.
    pub fn with_slot(&self, kind: SlotKind, text: &str) -> Result<Self, SlotTextError> {
        let mut next = self.clone();
        next.slots[kind.index()] = SlotFill::new(kind, text)?;
        Ok(next)
    }

    /// Returns a copy relabelled into another register.
    pub fn in_register(&self, register: Register) -> Self {
        ControlledSentence {
            register,
            slots: self.slots.clone(),
        }
    }

    pub fn canonical(&self) -> String {
        format!(
            "{} {} [{}] [{}] [{}] {} {} [{}] {}.",
            FRAME_SUBJECT[0],
            FRAME_SUBJECT[1],
            self.slot(SlotKind::Adverb),
            self.slot(SlotKind::Verb),
            self.slot(SlotKind::Noun),
            FRAME_LINK[0],
            FRAME_LINK[1],
            self.slot(SlotKind::Adjective),
            FRAME_CLOSE,
        )
    }

    pub fn display(&self) -> DisplaySentence {
        let mut text = String::new();
        let mut ranges = Vec::with_capacity(4);
        let mut push_slot = |text: &mut String, kind: SlotKind| {
            let start = text.len();
            text.push_str(self.slot(kind));
            ranges.push(ColorRange {
                start,
                len: self.slot(kind).len(),
                kind,
                color: kind.color(),
            });
        };
        text.push_str(FRAME_SUBJECT[0]);
        text.push(' ');
        text.push_str(FRAME_SUBJECT[1]);
        text.push(' ');
        push_slot(&mut text, SlotKind::Adverb);
        text.push(' ');
        push_slot(&mut text, SlotKind::Verb);
        text.push(' ');
        push_slot(&mut text, SlotKind::Noun);
        text.push(' ');
        text.push_str(FRAME_LINK[0]);
        text.push(' ');
        text.push_str(FRAME_LINK[1]);
        text.push(' ');
        push_slot(&mut text, SlotKind::Adjective);
        text.push(' ');
        text.push_str(FRAME_CLOSE);
        text.push('.');
        DisplaySentence { text, ranges }
    }
}

impl fmt::Display for ControlledSentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

/// Wire shape: `{register, adverb, verb, noun, adjective}`.
#[derive(Serialize, Deserialize)]
struct SentenceWire {
    register: Register,
    adverb: String,
    verb: String,
    noun: String,
    adjective: String,
}

impl Serialize for ControlledSentence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SentenceWire {
            register: self.register,
            adverb: self.slot(SlotKind::Adverb).to_string(),
            verb: self.slot(SlotKind::Verb).to_string(),
            noun: self.slot(SlotKind::Noun).to_string(),
            adjective: self.slot(SlotKind::Adjective).to_string(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ControlledSentence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = SentenceWire::deserialize(deserializer)?;
        ControlledSentence::new(wire.register, &wire.adverb, &wire.verb, &wire.noun, &wire.adjective)
            .map_err(serde::de::Error::custom)
    }
}

impl<'de> Deserialize<'de> for SlotFill {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            kind: SlotKind,
            text: String,
        }
        let wire = Wire::deserialize(deserializer)?;
        SlotFill::new(wire.kind, &wire.text).map_err(serde::de::Error::custom)
    }
}

/// A colored span in display text. Offsets are UTF-8 byte offsets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorRange {
    pub start: usize,
    pub len: usize,
    pub kind: SlotKind,
    pub color: SlotColor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplaySentence {
    pub text: String,
    pub ranges: Vec<ColorRange>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RenderMode {
    Canonical,
    Display,
}

/// Output of [`render_sentence`]. `ranges` is empty in canonical mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rendered {
    pub text: String,
    pub ranges: Vec<ColorRange>,
}

pub fn render_sentence(sentence: &ControlledSentence, mode: RenderMode) -> Rendered {
    match mode {
        RenderMode::Canonical => Rendered {
            text: sentence.canonical(),
            ranges: Vec::new(),
        },
        RenderMode::Display => {
            let d = sentence.display();
            Rendered {
                text: d.text,
                ranges: d.ranges,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum CnlError {
    #[error("sentence does not follow the frame: {0}")]
    MalformedFrame(String),
    #[error("missing or empty {0} slot")]
    MissingSlot(SlotKind),
    #[error("text outside the sentence frame: {0}")]
    ExtraMaterial(String),
    #[error("bracket opened inside a slot")]
    NestedBracket,
    #[error("invalid {kind} text: {reason}")]
    InvalidSlotText { kind: SlotKind, reason: SlotTextError },
    #[error("sentences are in different registers ({0} vs {1})")]
    RegisterMismatch(Register, Register),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token<'a> {
    Word(&'a str),
    Group(&'a str),
    Period,
}

fn tokenize(surface: &str) -> Result<Vec<Token<'_>>, CnlError> {
    let mut tokens = Vec::new();
    let mut iter = surface.char_indices().peekable();
    while let Some(&(start, ch)) = iter.peek() {
        if ch.is_whitespace() {
            iter.next();
            continue;
        }
        match ch {
            '[' => {
                iter.next();
                let body_start = start + 1;
                let mut end = None;
                for (i, c) in iter.by_ref() {
                    match c {
                        '[' => return Err(CnlError::NestedBracket),
                        ']' => {
                            end = Some(i);
                            break;
                        }
                        _ => {}
                    }
                }
                let end = end.ok_or_else(|| CnlError::MalformedFrame("unclosed bracket".into()))?;
                tokens.push(Token::Group(&surface[body_start..end]));
            }
            ']' => return Err(CnlError::MalformedFrame("unbalanced closing bracket".into())),
            _ => {
                let mut end = surface.len();
                while let Some(&(i, c)) = iter.peek() {
                    if c.is_whitespace() || c == '[' || c == ']' {
                        end = i;
                        break;
                    }
                    iter.next();
                }
                // A period glued to a word ("environment.") becomes its own token.
                let word = &surface[start..end];
                match word.strip_suffix('.') {
                    Some("") => tokens.push(Token::Period),
                    Some(stripped) => {
                        tokens.push(Token::Word(stripped));
                        tokens.push(Token::Period);
                    }
                    None => tokens.push(Token::Word(word)),
                }
            }
        }
    }
    Ok(tokens)
}

fn describe(tokens: &[Token<'_>]) -> String {
    tokens
        .iter()
        .map(|t| match t {
            Token::Word(w) => (*w).to_string(),
            Token::Group(g) => format!("[{g}]"),
            Token::Period => ".".to_string(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses canonical surface text into a sentence.
///
/// Frame words are matched case-sensitively; any amount of whitespace may
/// separate tokens and the final period is optional. When fewer than three
/// bracket groups precede `in a`, the missing slots are counted from the
/// front, so the reported kind is the Adverb.
pub fn parse_sentence(surface: &str, register: Register) -> Result<ControlledSentence, CnlError> {
    let surface = surface.trim();
    if surface.contains(['\n', '\r']) {
        return Err(CnlError::MalformedFrame("sentence spans several lines".into()));
    }
    let tokens = tokenize(surface)?;

    let subject_at = tokens
        .windows(2)
        .position(|w| w == [Token::Word(FRAME_SUBJECT[0]), Token::Word(FRAME_SUBJECT[1])])
        .ok_or_else(|| CnlError::MalformedFrame("expected `Players (Students)`".into()))?;
    if subject_at > 0 {
        return Err(CnlError::ExtraMaterial(describe(&tokens[..subject_at])));
    }
    let rest = &tokens[2..];

    let link_at = rest
        .windows(2)
        .position(|w| w == [Token::Word(FRAME_LINK[0]), Token::Word(FRAME_LINK[1])])
        .ok_or_else(|| CnlError::MalformedFrame("expected `in a` after the noun slot".into()))?;
    let head = &rest[..link_at];
    let tail = &rest[link_at + 2..];

    let head_groups: Vec<&str> = head
        .iter()
        .filter_map(|t| match t {
            Token::Group(g) => Some(*g),
            _ => None,
        })
        .collect();
    if head_groups.len() < 3 {
        return Err(CnlError::MissingSlot(SlotKind::Adverb));
    }
    if head_groups.len() > 3 || head.len() != 3 {
        return Err(CnlError::ExtraMaterial(describe(head)));
    }

    let close_at = tail
        .iter()
        .position(|t| *t == Token::Word(FRAME_CLOSE))
        .ok_or_else(|| CnlError::MalformedFrame("expected closing `environment`".into()))?;
    let middle = &tail[..close_at];
    let after = &tail[close_at + 1..];
    let adjective = match middle {
        [Token::Group(g)] => *g,
        _ if !middle.iter().any(|t| matches!(t, Token::Group(_))) => {
            return Err(CnlError::MissingSlot(SlotKind::Adjective))
        }
        _ => return Err(CnlError::ExtraMaterial(describe(middle))),
    };
    match after {
        [] | [Token::Period] => {}
        [Token::Period, extra @ ..] | extra => {
            return Err(CnlError::ExtraMaterial(describe(extra)));
        }
    }

    let texts = [head_groups[0], head_groups[1], head_groups[2], adjective];
    ControlledSentence::from_texts(register, texts)
}

/// Per-slot change between two versions of a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SlotChange {
    Unchanged,
    Changed { old: String, new: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotDiff {
    pub adverb: SlotChange,
    pub verb: SlotChange,
    pub noun: SlotChange,
    pub adjective: SlotChange,
}

impl SlotDiff {
    pub fn get(&self, kind: SlotKind) -> &SlotChange {
        match kind {
            SlotKind::Adverb => &self.adverb,
            SlotKind::Verb => &self.verb,
            SlotKind::Noun => &self.noun,
            SlotKind::Adjective => &self.adjective,
        }
    }

    pub fn changed_kinds(&self) -> Vec<SlotKind> {
        SlotKind::ALL
            .into_iter()
            .filter(|k| matches!(self.get(*k), SlotChange::Changed { .. }))
            .collect()
    }

    pub fn is_identical(&self) -> bool {
        self.changed_kinds().is_empty()
    }
}

pub fn diff_sentences(a: &ControlledSentence, b: &ControlledSentence) -> Result<SlotDiff, CnlError> {
    if a.register != b.register {
        return Err(CnlError::RegisterMismatch(a.register, b.register));
    }
    let change = |kind: SlotKind| {
        let (old, new) = (a.slot(kind).trim(), b.slot(kind).trim());
        if old == new {
            SlotChange::Unchanged
        } else {
            SlotChange::Changed {
                old: old.to_string(),
                new: new.to_string(),
            }
        }
    };
    Ok(SlotDiff {
        adverb: change(SlotKind::Adverb),
        verb: change(SlotKind::Verb),
        noun: change(SlotKind::Noun),
        adjective: change(SlotKind::Adjective),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ROCKS: &str =
        "Players (Students) [accurately] [classify] [rock samples] in a [realistic fieldwork] environment.";

    fn rocks() -> ControlledSentence {
        ControlledSentence::new(
            Register::Teaching,
            "accurately",
            "classify",
            "rock samples",
            "realistic fieldwork",
        )
        .unwrap()
    }

    #[test]
    fn parses_the_reference_sentence() {
        let s = parse_sentence(ROCKS, Register::Teaching).unwrap();
        assert_eq!(s, rocks());
        assert_eq!(s.slot(SlotKind::Noun), "rock samples");
    }

    #[test]
    fn renders_the_reference_sentence() {
        assert_eq!(rocks().canonical(), ROCKS);
        assert_eq!(render_sentence(&rocks(), RenderMode::Canonical).text, ROCKS);
    }

    #[test]
    fn three_groups_report_missing_adverb() {
        let err = parse_sentence(
            "Players (Students) [classify] [rock samples] in a [realistic] environment.",
            Register::Teaching,
        )
        .unwrap_err();
        assert_eq!(err, CnlError::MissingSlot(SlotKind::Adverb));
    }

    #[test]
    fn flexible_whitespace_and_optional_period() {
        let s = parse_sentence(
            "  Players   (Students)[ accurately ][classify]  [rock samples] in  a [realistic fieldwork] environment ",
            Register::Game,
        )
        .unwrap();
        assert_eq!(s.slot(SlotKind::Adverb), "accurately");
        assert_eq!(s.register(), Register::Game);
    }

    #[test]
    fn commas_allowed_inside_slots() {
        let s = parse_sentence(
            "Players (Students) [accurately, within 15 minutes] [classify] [rocks] in a [calm] environment.",
            Register::Teaching,
        )
        .unwrap();
        assert_eq!(s.slot(SlotKind::Adverb), "accurately, within 15 minutes");
    }

    #[test]
    fn frame_words_are_case_sensitive() {
        let err = parse_sentence(
            "players (students) [a] [b] [c] in a [d] environment.",
            Register::Teaching,
        )
        .unwrap_err();
        assert!(matches!(err, CnlError::MalformedFrame(_)));
    }

    #[test]
    fn sentence_after_the_frame_is_extra_material() {
        let err = parse_sentence(&format!("{ROCKS} Then repeat."), Register::Teaching).unwrap_err();
        assert_eq!(err, CnlError::ExtraMaterial("Then repeat .".into()));
    }

    #[test]
    fn display_mode_strips_brackets() {
        let d = rocks().display();
        assert_eq!(
            d.text,
            "Players (Students) accurately classify rock samples in a realistic fieldwork environment."
        );
        assert_eq!(d.ranges.len(), 4);
        let colors: Vec<_> = d.ranges.iter().map(|r| r.color).collect();
        assert_eq!(
            colors,
            [SlotColor::Red, SlotColor::Yellow, SlotColor::Green, SlotColor::Blue]
        );
    }

    #[test]
    fn diff_identity_and_single_change() {
        let a = rocks();
        assert!(diff_sentences(&a, &a).unwrap().is_identical());
        let b = a.with_slot(SlotKind::Verb, "sort").unwrap();
        let d = diff_sentences(&a, &b).unwrap();
        assert_eq!(d.changed_kinds(), vec![SlotKind::Verb]);
        assert_eq!(
            d.verb,
            SlotChange::Changed {
                old: "classify".into(),
                new: "sort".into()
            }
        );
    }

    #[test]
    fn diff_across_registers_is_an_error() {
        let a = rocks();
        let b = a.in_register(Register::Game);
        assert_eq!(
            diff_sentences(&a, &b).unwrap_err(),
            CnlError::RegisterMismatch(Register::Teaching, Register::Game)
        );
    }

    #[test]
    fn slot_fill_rejects_brackets_and_newlines() {
        assert_eq!(SlotFill::new(SlotKind::Noun, "a [b]"), Err(SlotTextError::Bracket));
        assert_eq!(SlotFill::new(SlotKind::Noun, "a\nb"), Err(SlotTextError::LineBreak));
        assert_eq!(SlotFill::new(SlotKind::Noun, "   "), Err(SlotTextError::Empty));
        assert_eq!(SlotFill::new(SlotKind::Noun, " rocks ").unwrap().text(), "rocks");
    }

    #[test]
    fn serde_shape() {
        let json = serde_json::to_value(rocks()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "register": "Teaching",
                "adverb": "accurately",
                "verb": "classify",
                "noun": "rock samples",
                "adjective": "realistic fieldwork"
            })
        );
        let bad = serde_json::json!({
            "register": "Game", "adverb": "", "verb": "v", "noun": "n", "adjective": "a"
        });
        assert!(serde_json::from_value::<ControlledSentence>(bad).is_err());
    }

    #[test]
    fn slot_kind_names() {
        assert_eq!(SlotKind::from_name("verbs"), Some(SlotKind::Verb));
        assert_eq!(SlotKind::from_name("ADJECTIVE"), Some(SlotKind::Adjective));
        assert_eq!(SlotKind::from_name("pronoun"), None);
    }

    fn slot_text() -> impl Strategy<Value = String> {
        // Words may carry commas, parentheses and periods; never brackets.
        proptest::collection::vec("[a-zA-Z0-9,.()'-]{1,8}", 1..4).prop_map(|w| w.join(" "))
    }

    fn sentence() -> impl Strategy<Value = ControlledSentence> {
        (
            prop_oneof![Just(Register::Teaching), Just(Register::Game)],
            slot_text(),
            slot_text(),
            slot_text(),
            slot_text(),
        )
            .prop_map(|(r, a, v, n, j)| ControlledSentence::new(r, &a, &v, &n, &j).unwrap())
    }

    proptest! {
        #[test]
        fn canonical_round_trip(s in sentence()) {
            let back = parse_sentence(&s.canonical(), s.register()).unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn display_ranges_are_ordered_and_exact(s in sentence()) {
            let d = s.display();
            let mut prev_end = 0;
            for (range, kind) in d.ranges.iter().zip(SlotKind::ALL) {
                prop_assert_eq!(range.kind, kind);
                prop_assert!(range.start >= prev_end);
                prop_assert_eq!(&d.text[range.start..range.start + range.len], s.slot(kind));
                prev_end = range.start + range.len;
            }
        }

        #[test]
        fn diff_is_symmetric(a in sentence(), b in sentence()) {
            let b = b.in_register(a.register());
            let ab = diff_sentences(&a, &b).unwrap();
            let ba = diff_sentences(&b, &a).unwrap();
            for kind in SlotKind::ALL {
                match (ab.get(kind), ba.get(kind)) {
                    (SlotChange::Unchanged, SlotChange::Unchanged) => {}
                    (SlotChange::Changed { old: o1, new: n1 }, SlotChange::Changed { old: o2, new: n2 }) => {
                        prop_assert_eq!(o1, n2);
                        prop_assert_eq!(n1, o2);
                    }
                    _ => prop_assert!(false, "asymmetric diff at {}", kind),
                }
            }
            prop_assert_eq!(ab.is_identical(), a == b);
        }

        #[test]
        fn emptied_group_is_rejected(s in sentence(), k in 0usize..4) {
            let kind = SlotKind::ALL[k];
            let surface = s.canonical().replacen(&format!("[{}]", s.slot(kind)), "[ ]", 1);
            // Replacing the first occurrence may hit an earlier slot with identical text.
            prop_assert!(parse_sentence(&surface, s.register()).is_err());
        }
    }
}
