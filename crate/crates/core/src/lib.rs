//! Controlled four-slot sentences shared between teaching and game design,
//! with requirement elicitation, candidate translation, the zoom ladder and
//! an event-sourced project store.
//!
//! ```
//! use pedforge_core::{parse_sentence, Register, SlotKind};
//!
//! let s = parse_sentence(
//!     "Players (Students) [within 15 minutes] [sort] [rock samples] in a [field camp] environment.",
//!     Register::Game,
//! )
//! .unwrap();
//! assert_eq!(s.slot(SlotKind::Noun), "rock samples");
//! ```

pub mod cnl;
pub mod development;
pub mod extraction;
pub mod gateway;
pub mod mapping;
pub mod store;
pub mod translation;
pub mod workbench;

pub use cnl::{
    diff_sentences, parse_sentence, render_sentence, CnlError, ColorRange, ControlledSentence, DisplaySentence,
    Register, RenderMode, Rendered, SlotChange, SlotColor, SlotDiff, SlotFill, SlotKind, SlotTextError,
};
pub use development::{
    validate_pseudocode, ChatTurn, ExpansionArtifact, ExpansionLevel, PseudocodeCheck, PSEUDOCODE_SECTIONS,
};
pub use extraction::{
    specificity_check, Answer, ElicitationCatalog, NextQuestion, OptionSet, RequirementDocument, RequirementField,
    Specificity,
};
pub use gateway::{
    Gateway, GatewayError, MockProvider, Provider, ProviderError, ProviderResult, RetryPolicy, ScriptStep,
};
pub use mapping::{
    align_candidate, is_fully_aligned, mapping_row, AlignmentReport, MappingRule, SlotAlignment, SlotRationale,
    MAPPING_TABLE,
};
pub use store::{Actor, Change, Phase, Project, ProjectEvent, ProjectState, ProjectStore, TraceChain};
pub use translation::{CandidateOrigin, CandidateSet, TranslationCandidate};
pub use workbench::{Workbench, WorkbenchError};
