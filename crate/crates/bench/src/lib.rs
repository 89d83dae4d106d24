//! Fixtures shared by the benchmarks.

use pedforge_core::{ControlledSentence, Register, RequirementField, SlotKind, Workbench};

const ADVERBS: [&str; 4] = [
    "accurately",
    "within 15 minutes",
    "before the timer ends",
    "with at most two hints",
];
const VERBS: [&str; 4] = [
    "classify",
    "drag and sort",
    "solve matching problems",
    "slice and serve",
];
const NOUNS: [&str; 4] = [
    "rock samples",
    "fraction strips",
    "equivalent fraction cards",
    "mineral specimens",
];
const ADJECTIVES: [&str; 4] = [
    "realistic fieldwork",
    "stylized kitchen",
    "cartoon bakery",
    "abstract puzzle",
];

pub const ANSWERS: [(RequirementField, &str); 5] = [
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
];

/// `n` distinct-enough sentences cycling through fixed word lists.
pub fn sentences(n: usize) -> Vec<ControlledSentence> {
    (0..n)
        .map(|i| {
            let register = if i % 2 == 0 { Register::Teaching } else { Register::Game };
            ControlledSentence::new(
                register,
                &format!("{} {i}", ADVERBS[i % 4]),
                VERBS[(i / 4) % 4],
                NOUNS[(i / 16) % 4],
                ADJECTIVES[(i / 64) % 4],
            )
            .expect("fixture slots are valid")
        })
        .collect()
}

/// Runs answers, composition, three candidates, one slot edit, acceptance,
/// one refinement and two zooms. Returns the project id and the pseudocode
/// artifact id.
pub fn run_session(wb: &Workbench) -> (String, String) {
    let id = wb.create_project().expect("create").id.clone();
    for (field, text) in ANSWERS {
        wb.submit_answer(&id, field, text).expect("answer");
    }
    wb.compose_pedagogy(&id).expect("compose");
    wb.generate_candidates(&id, 3).expect("candidates");
    wb.edit_candidate_slot(
        &id,
        "c2",
        SlotKind::Noun,
        "fraction pizzas",
        Some("slices are fractions"),
    )
    .expect("edit");
    wb.accept_candidate(&id, "c2").expect("accept");
    let refined = wb.refine(&id, "change the verb to slice and serve").expect("refine");
    let para = wb.zoom(&id, &refined.id).expect("zoom");
    let code = wb.zoom(&id, &para.id).expect("zoom");
    (id, code.id)
}
