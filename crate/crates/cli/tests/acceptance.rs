//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! nonzero if any criterion fails. Every criterion runs against the
//! deterministic mock provider; none touches the network beyond loopback.

mod support;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use serde_json::{json, Value};

use pedforge_core::gateway::{OutputContract, PromptSpec, MALFORMED_OUTPUT};
use pedforge_core::store::{decode, encode};
use pedforge_core::{
    parse_sentence, validate_pseudocode, CnlError, ControlledSentence, Gateway, GatewayError, MockProvider,
    NextQuestion, Phase, Project, ProjectStore, PseudocodeCheck, Register, RequirementField, RetryPolicy, ScriptStep,
    SlotKind, Workbench, WorkbenchError,
};
use support::{Server, ANSWERS};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("grammar round-trip", grammar_round_trip),
        ("rejection suite", rejection_suite),
        ("mapping table fidelity", mapping_table_fidelity),
        ("elicitation determinism", elicitation_determinism),
        ("end-to-end mock session", end_to_end_session),
        ("gateway retry contract", gateway_retry_contract),
        ("event-sourcing soundness", event_sourcing_soundness),
        ("alignment gating", alignment_gating),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let outcome = match panic::catch_unwind(AssertUnwindSafe(run)) {
            Ok(outcome) => outcome,
            Err(payload) => Err(payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".to_string())),
        };
        match outcome {
            Ok(detail) => println!("PASS  {}. {name}: {detail}", n + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {}. {name}: {}", n + 1, reason.replace('\n', " "));
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn slot_text() -> impl Strategy<Value = String> {
    "[^\\[\\]\\r\\n]{1,24}".prop_filter("blank", |s| !s.trim().is_empty())
}

fn sentence() -> impl Strategy<Value = ControlledSentence> {
    (proptest::bool::ANY, slot_text(), slot_text(), slot_text(), slot_text()).prop_map(|(teaching, a, v, n, j)| {
        let register = if teaching { Register::Teaching } else { Register::Game };
        ControlledSentence::new(register, &a, &v, &n, &j).expect("strategy yields valid slots")
    })
}

fn grammar_round_trip() -> Outcome {
    const N: usize = 10_000;
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let strategy = sentence();
    let generating = Instant::now();
    let mut sentences = Vec::with_capacity(N);
    for _ in 0..N {
        sentences.push(strategy.new_tree(&mut runner).map_err(|e| e.to_string())?.current());
    }
    let generated = generating.elapsed();
    let started = Instant::now();
    let mut failures = Vec::new();
    for s in &sentences {
        match parse_sentence(&s.canonical(), s.register()) {
            Ok(back) if back == *s => {}
            other => failures.push(format!("{:?} -> {other:?}", s.canonical())),
        }
    }
    let elapsed = started.elapsed();
    ensure(failures.is_empty(), || {
        format!("{} failures, first {}", failures.len(), failures[0])
    })?;
    ensure(elapsed.as_secs_f64() < 5.0, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{N} sentences, 0 failures, round trip {:.2} s (generation {:.2} s)",
        elapsed.as_secs_f64(),
        generated.as_secs_f64()
    ))
}

fn label(e: &CnlError) -> String {
    match e {
        CnlError::MalformedFrame(_) => "MalformedFrame".into(),
        CnlError::MissingSlot(kind) => format!("MissingSlot({kind})"),
        CnlError::ExtraMaterial(_) => "ExtraMaterial".into(),
        CnlError::NestedBracket => "NestedBracket".into(),
        other => format!("{other:?}"),
    }
}

const REJECTIONS: [(&str, &str); 25] = [
    ("", "MalformedFrame"),
    ("Players (Students) [classify] [rock samples] in a [realistic] environment.", "MissingSlot(Adverb)"),
    ("Players (Students) [] [sort] [rock samples] in a [calm] environment.", "MissingSlot(Adverb)"),
    ("Players (Students) [quickly] [  ] [rock samples] in a [calm] environment.", "MissingSlot(Verb)"),
    ("Players (Students) [quickly] [sort] [] in a [calm] environment.", "MissingSlot(Noun)"),
    ("Players (Students) [quickly] [sort] [rock samples] in a [] environment.", "MissingSlot(Adjective)"),
    ("Players (Students) [quickly] [sort] [rock samples] in a environment.", "MissingSlot(Adjective)"),
    ("Players (Students) in a [calm] environment.", "MissingSlot(Adverb)"),
    ("Players (Students) [quickly [very]] [sort] [rocks] in a [calm] environment.", "NestedBracket"),
    ("Players (Students) [quickly] [sort [rocks]] [rocks] in a [calm] environment.", "NestedBracket"),
    ("Players (Students) [quickly] [sort] [rocks] in a [calm [warm]] environment.", "NestedBracket"),
    ("Players (Students) [quickly] [sort] [rocks] in a [calm environment.", "MalformedFrame"),
    ("Players (Students) [quickly] [sort] rocks] in a [calm] environment.", "MalformedFrame"),
    ("Students [quickly] [sort] [rocks] in a [calm] environment.", "MalformedFrame"),
    ("Players [quickly] [sort] [rocks] in a [calm] environment.", "MalformedFrame"),
    ("players (students) [quickly] [sort] [rocks] in a [calm] environment.", "MalformedFrame"),
    ("Players (Students) [quickly] [sort] [rocks] at a [calm] environment.", "MalformedFrame"),
    ("Players (Students) [quickly] [sort] [rocks] in the [calm] environment.", "MalformedFrame"),
    ("Players (Students) [quickly] [sort] [rocks] in a [calm] world.", "MalformedFrame"),
    (
        "Players (Students) [quickly] [sort] [rocks] in a [calm] environment.\nPlayers (Students) [a] [b] [c] in a [d] environment.",
        "MalformedFrame",
    ),
    ("Today Players (Students) [quickly] [sort] [rocks] in a [calm] environment.", "ExtraMaterial"),
    ("Players (Students) [quickly] [sort] [rocks] [gems] in a [calm] environment.", "ExtraMaterial"),
    ("Players (Students) [quickly] really [sort] [rocks] in a [calm] environment.", "ExtraMaterial"),
    ("Players (Students) [quickly] [sort] [rocks] in a [calm] [dark] environment.", "ExtraMaterial"),
    ("Players (Students) [quickly] [sort] [rocks] in a [calm] environment. Then repeat.", "ExtraMaterial"),
];

fn rejection_suite() -> Outcome {
    let mut wrong = Vec::new();
    for (text, expected) in REJECTIONS {
        for register in [Register::Teaching, Register::Game] {
            match parse_sentence(text, register) {
                Ok(_) => wrong.push(format!("{text:?} accepted")),
                Err(e) if label(&e) != expected => wrong.push(format!("{text:?}: {} not {expected}", label(&e))),
                Err(_) => {}
            }
        }
    }
    ensure(wrong.is_empty(), || wrong.join("; "))?;
    Ok(format!(
        "{} strings, 0 false accepts, all errors as documented",
        REJECTIONS.len()
    ))
}

const TABLE: [(&str, &str, &str); 4] = [
    (
        "Adverb",
        "Specifies performance requirements for the targeted ability.",
        "Rules and parameters that configure difficulty and success conditions.",
    ),
    (
        "Verb",
        "Expresses the targeted teaching ability as an observable action.",
        "Game mechanics that define the primary player action and interaction pattern.",
    ),
    (
        "Noun",
        "Denotes the focal teaching concept or content domain.",
        "Content models and in-game artifacts that instantiate the concept.",
    ),
    (
        "Adjective",
        "Characterizes the learning context, realism level, and instructional tone.",
        "Aesthetic and contextual profiles that define the game world and framing.",
    ),
];

fn mapping_table_fidelity() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let server = Server::start(dir.path(), 7);
    let (status, body) = server.get("/mapping-table");
    ensure(status == 200, || format!("status {status}"))?;
    let rows = body.as_array().ok_or("body is not an array")?;
    ensure(rows.len() == 4, || format!("{} rows", rows.len()))?;
    for (row, (kind, teaching, game)) in rows.iter().zip(TABLE) {
        ensure(row["kind"] == kind, || format!("row kind {} not {kind}", row["kind"]))?;
        ensure(row["teaching_meaning"].as_str() == Some(teaching), || {
            format!("{kind} teaching meaning differs: {}", row["teaching_meaning"])
        })?;
        ensure(row["game_meaning"].as_str() == Some(game), || {
            format!("{kind} game meaning differs: {}", row["game_meaning"])
        })?;
    }
    Ok("4 rows byte-identical".into())
}

/// Submits `script` and records the question asked before each answer.
fn run_script(script: &[(RequirementField, &str)]) -> Result<(Vec<(RequirementField, String)>, bool), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let wb = Workbench::new(
        ProjectStore::open(dir.path()).map_err(|e| e.to_string())?,
        Gateway::mock(7),
    );
    let id = wb.create_project().map_err(|e| e.to_string())?.id.clone();
    let mut asked = Vec::new();
    for (field, text) in script {
        match wb.next_question(&id).map_err(|e| e.to_string())? {
            NextQuestion::Question { field, prompt } => asked.push((field, prompt)),
            NextQuestion::Complete => return Err("document complete before the script ended".into()),
        }
        wb.submit_answer(&id, *field, text).map_err(|e| e.to_string())?;
    }
    let complete = wb.project(&id).map_err(|e| e.to_string())?.state.document.complete();
    Ok((asked, complete))
}

fn elicitation_determinism() -> Outcome {
    use RequirementField::*;
    let script: Vec<(RequirementField, &str)> = ANSWERS
        .iter()
        .map(|(f, t)| (RequirementField::from_name(f).expect("field"), *t))
        .collect();
    let (asked, complete) = run_script(&script)?;
    let order: Vec<_> = asked.iter().map(|(f, _)| *f).collect();
    let expected = [ConceptScope, Materials, ObservableAction, PerformanceTarget, Context];
    ensure(order == expected, || format!("asked {order:?}"))?;
    ensure(complete, || "document incomplete after five answers".into())?;
    let (again, _) = run_script(&script)?;
    ensure(again == asked, || "second replay asked different questions".into())?;

    let failing = [
        (ConceptScope, "fractions"),
        (ConceptScope, "fraction equivalence for fourth graders"),
        (Materials, "fraction strips and worksheets"),
        (ObservableAction, "understand fractions"),
        (ObservableAction, "know equivalent fractions"),
        (ObservableAction, "solve matching problems"),
        (PerformanceTarget, "accurately solve most problems quickly"),
        (PerformanceTarget, "accurately solve 8 of 10 problems within 15 minutes"),
        (Context, "a kitchen"),
        (Context, "environment: kitchen; realism: stylized; tone: playful"),
    ];
    let (asked, complete) = run_script(&failing)?;
    let order: Vec<_> = asked.iter().map(|(f, _)| *f).collect();
    let expected_loop: Vec<_> = failing.iter().map(|(f, _)| *f).collect();
    ensure(order == expected_loop, || format!("failing script asked {order:?}"))?;
    ensure(complete, || "document incomplete after corrections".into())?;
    Ok("questions (1) to (5) in order, each failing answer re-asked its field".into())
}

fn end_to_end_session() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let server = Server::start(dir.path(), 7);
    let started = Instant::now();
    let (id, code, sentence) = session(&server, 0)?;
    let elapsed = started.elapsed();
    ensure(elapsed.as_secs_f64() < 2.0, || format!("session took {elapsed:?}"))?;

    let source = parse_sentence(&sentence, Register::Game).map_err(|e| e.to_string())?;
    let content = code["content"].as_str().ok_or("no pseudocode content")?;
    let check = validate_pseudocode(content, &source);
    ensure(check == PseudocodeCheck::Pass, || {
        format!("pseudocode rejected: {check:?}")
    })?;

    let aid = code["id"].as_str().ok_or("no artifact id")?;
    let (status, chain) = server.get(&format!("/projects/{id}/trace/artifact:{aid}"));
    ensure(status == 200, || format!("trace status {status}: {chain}"))?;
    let actions: Vec<&str> = chain["links"]
        .as_array()
        .ok_or("trace has no links")?
        .iter()
        .map(|l| l["event"]["action"].as_str().unwrap_or(""))
        .collect();
    let answers = actions.iter().filter(|a| **a == "AnswerIngested").count();
    let tail_ok = actions.len() >= 5 && actions[actions.len() - 5..].iter().all(|a| *a == "AnswerIngested");
    ensure(answers == 5 && tail_ok, || format!("trace actions {actions:?}"))?;
    Ok(format!(
        "{:.0} ms, pseudocode valid, trace of {} links ends in 5 AnswerIngested",
        elapsed.as_secs_f64() * 1000.0,
        actions.len()
    ))
}

/// Drives a full session from step `from` onward and returns the project id,
/// the pseudocode artifact and the refined sentence. Steps before `from` are
/// expected to be committed already.
fn session(server: &Server, from: usize) -> Result<(String, Value, String), String> {
    let id = match server.get("/projects").1["projects"]
        .as_array()
        .and_then(|p| p.first().cloned())
    {
        Some(Value::String(id)) if from > 0 => id,
        _ => server.create_project(),
    };
    let p = |path: &str| format!("/projects/{id}{path}");
    if from <= 1 {
        for (field, text) in ANSWERS {
            let body = server.answer(&id, field, text);
            ensure(body["answer"]["specificity"]["status"] == "pass", || {
                format!("{field}: {body}")
            })?;
        }
        server.expect_post(&p("/pedagogy-sentence"), None, 201);
        let made = server.expect_post(&p("/candidates"), Some(json!({"n": 3})), 201);
        ensure(made["candidates"].as_array().map(Vec::len) == Some(3), || {
            format!("{made}")
        })?;
    }
    if from <= 2 {
        let (status, edited) = server.patch(
            &p("/candidates/c2/slots/Noun"),
            json!({"text": "fraction pizzas", "rationale": "pizza slices stand for equivalent fractions"}),
        );
        ensure(status == 200 && edited["fully_aligned"] == true, || {
            format!("edit {status}: {edited}")
        })?;
        server.expect_post(&p("/candidates/c2/accept"), None, 200);
    }
    let refined = server.expect_post(
        &p("/refine"),
        Some(json!({"instruction": "change the verb to slice and serve"})),
        201,
    );
    let sentence = refined["content"]
        .as_str()
        .ok_or("refined artifact has no content")?
        .to_string();
    let rid = refined["id"].as_str().ok_or("no id")?;
    let para = server.expect_post(&p(&format!("/artifacts/{rid}/zoom")), None, 201);
    let pid = para["id"].as_str().ok_or("no id")?;
    let code = server.expect_post(&p(&format!("/artifacts/{pid}/zoom")), None, 201);
    ensure(code["level"] == "Pseudocode", || {
        format!("second zoom gave {}", code["level"])
    })?;
    Ok((id, code, sentence))
}

fn gateway_retry_contract() -> Outcome {
    let current =
        "Players (Students) [before the timer ends] [sort] [fraction cards] in a [cartoon kitchen] environment.";
    let spec = PromptSpec::new(
        Phase::Development,
        "Revise the game sentence.",
        OutputContract::ControlledSentence(Register::Game),
    )
    .and_then(|s| s.with_block("Current game sentence", current))
    .and_then(|s| s.with_block("Instruction", "change the verb to slice"))
    .map_err(|e| e.to_string())?;

    let mock = Arc::new(MockProvider::scripted(
        3,
        vec![
            ScriptStep::Malformed,
            ScriptStep::Text("Players (Students) [x] [y] in a [z] environment.".into()),
        ],
    ));
    let gateway = Gateway::new(mock.clone(), RetryPolicy::default());
    let result = gateway.complete(&spec).map_err(|e| e.to_string())?;
    ensure(result.attempts == 3 && result.validated, || format!("{result:?}"))?;
    let good = parse_sentence(&result.raw_text, Register::Game).map_err(|e| e.to_string())?;
    ensure(good.slot(SlotKind::Verb) == "slice", || {
        format!("unexpected reply {}", result.raw_text)
    })?;

    mock.push_script(vec![ScriptStep::Malformed; 4]);
    match gateway.complete(&spec) {
        Err(GatewayError::ProviderFailure { attempts: 4, .. }) => {}
        other => return Err(format!("four bad replies gave {other:?}")),
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let wb = Workbench::new(
        ProjectStore::open(dir.path()).map_err(|e| e.to_string())?,
        Gateway::new(mock.clone(), RetryPolicy::default()),
    );
    let id = wb.create_project().map_err(|e| e.to_string())?.id.clone();
    for (f, t) in ANSWERS {
        wb.submit_answer(&id, RequirementField::from_name(f).expect("field"), t)
            .map_err(|e| e.to_string())?;
    }
    mock.push_script(vec![ScriptStep::Malformed, ScriptStep::Empty]);
    wb.compose_pedagogy(&id).map_err(|e| e.to_string())?;
    mock.push_script(vec![ScriptStep::Malformed; 4]);
    let before = wb.events(&id).map_err(|e| e.to_string())?.len();
    match wb.generate_candidates(&id, 3) {
        Err(WorkbenchError::ProviderFailure { attempts: 4, .. }) => {}
        other => return Err(format!("generation after four bad replies gave {other:?}")),
    }
    let events = wb.events(&id).map_err(|e| e.to_string())?;
    ensure(events.len() == before, || "failed generation appended events".into())?;
    let file = std::fs::read_to_string(wb.store().path(&id)).map_err(|e| e.to_string())?;
    ensure(!file.contains(MALFORMED_OUTPUT) && !file.contains("[x] [y]"), || {
        "unvalidated reply text reached the project file".into()
    })?;
    Ok("[bad, bad, good] took 3 attempts; [bad x4] gave ProviderFailure; no bad text in the log".into())
}

fn event_sourcing_soundness() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = Server::start(dir.path(), 7);
    let id = first.create_project();
    for (field, text) in ANSWERS {
        first.answer(&id, field, text);
    }
    first.expect_post(&format!("/projects/{id}/pedagogy-sentence"), None, 201);
    first.expect_post(&format!("/projects/{id}/candidates"), Some(json!({"n": 3})), 201);
    let (_, before) = first.get(&format!("/projects/{id}"));
    let (_, events_before) = first.get(&format!("/projects/{id}/events"));
    first.kill();

    let second = Server::start(dir.path(), 7);
    let (status, after) = second.get(&format!("/projects/{id}"));
    ensure(status == 200, || format!("reload status {status}"))?;
    ensure(after == before, || {
        "project view changed across kill and restart".into()
    })?;
    let (_, events_after) = second.get(&format!("/projects/{id}/events"));
    ensure(events_after == events_before, || {
        "event log changed across kill and restart".into()
    })?;
    session(&second, 2)?;
    let (_, live) = second.get(&format!("/projects/{id}"));
    drop(second);

    let store = ProjectStore::open(dir.path()).map_err(|e| e.to_string())?;
    let bytes = std::fs::read_to_string(store.path(&id)).map_err(|e| e.to_string())?;
    let file: Value = serde_json::from_str(&bytes).map_err(|e| e.to_string())?;
    let events = serde_json::from_value(file["events"].clone()).map_err(|e| e.to_string())?;
    let replayed = Project::replay(id.clone(), events).map_err(|e| e.to_string())?;
    let replayed_state = serde_json::to_value(&replayed.state).map_err(|e| e.to_string())?;
    ensure(replayed_state == file["snapshot"], || {
        "replayed state differs from the live snapshot".into()
    })?;
    ensure(live["last_sequence"] == json!(replayed.state.last_sequence), || {
        "live sequence differs from the log".into()
    })?;

    let (loaded, warnings) = decode(&bytes).map_err(|e| e.to_string())?;
    ensure(warnings.is_empty(), || format!("warnings {warnings:?}"))?;
    let copy_dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let copy = ProjectStore::open(copy_dir.path()).map_err(|e| e.to_string())?;
    copy.save(&loaded).map_err(|e| e.to_string())?;
    let resaved = std::fs::read_to_string(copy.path(&id)).map_err(|e| e.to_string())?;
    ensure(resaved == bytes, || "save after load is not byte-identical".into())?;
    let (again, _) = copy.load(&id).map_err(|e| e.to_string())?;
    ensure(encode(&again) == bytes, || {
        "second round trip is not byte-identical".into()
    })?;
    Ok(format!(
        "{} events replay to the live state, save-load-save identical, nothing lost after SIGKILL",
        replayed.events.len()
    ))
}

fn alignment_gating() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let server = Server::start(dir.path(), 11);
    let id = server.create_project();
    let p = |path: &str| format!("/projects/{id}{path}");
    for (field, text) in ANSWERS {
        server.answer(&id, field, text);
    }
    server.expect_post(&p("/pedagogy-sentence"), None, 201);
    server.expect_post(&p("/candidates"), Some(json!({"n": 3})), 201);
    server.expect_post(&p("/candidates/c1/accept"), None, 200);

    for (kind, text) in [
        ("Verb", "match equivalent fractions"),
        ("Adjective", "realistic bakery"),
    ] {
        let (status, body) = server.patch(&p(&format!("/pedagogy-sentence/slots/{kind}")), json!({"text": text}));
        ensure(status == 200, || format!("pedagogy edit {status}: {body}"))?;
    }
    let (_, project) = server.get(&p(""));
    ensure(project["accepted"].is_null(), || {
        "acceptance survived the pedagogy edit".into()
    })?;
    let (_, log) = server.get(&p("/events"));
    let cleared: Vec<&Value> = log["events"]
        .as_array()
        .ok_or("no events")?
        .iter()
        .filter(|e| e["action"] == "AcceptanceCleared")
        .collect();
    ensure(
        cleared.len() == 1 && cleared[0]["payload"]["candidate_id"] == "c1",
        || format!("AcceptanceCleared events {cleared:?}"),
    )?;

    let (status, err) = server.post(&p("/candidates/c1/accept"), None);
    ensure(status == 409 && err["code"] == "NOT_ALIGNED", || {
        format!("accept gave {status}: {err}")
    })?;
    ensure(err["detail"]["stale"] == json!(["Verb", "Adjective"]), || {
        format!("stale kinds {}", err["detail"]["stale"])
    })?;
    ensure(err["detail"]["missing"] == json!([]), || {
        format!("missing kinds {}", err["detail"]["missing"])
    })?;
    Ok("NOT_ALIGNED names exactly [Verb, Adjective]; one AcceptanceCleared recorded".into())
}
