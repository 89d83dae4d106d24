//! Project file format `pedforge/1`.
//!
//! ```json
//! {
//!   "format": "pedforge/1",
//!   "project_id": "<id>",
//!   "events": [ { "sequence": 1, "timestamp": "...", "actor": "Instructor",
//!                 "subject": "answer:ConceptScope",
//!                 "action": "AnswerIngested", "payload": { ... } } ],
//!   "snapshot": { ...state derived from the events... }
//! }
//! ```
//!
//! The events are the source of truth; the snapshot is a cache.

use serde::{Deserialize, Serialize};

use super::event::ProjectEvent;
use super::state::ProjectState;
use super::{Project, StoreError};

pub const FORMAT: &str = "pedforge/1";

#[derive(Serialize)]
struct FileOut<'a> {
    format: &'a str,
    project_id: &'a str,
    events: &'a [ProjectEvent],
    snapshot: &'a ProjectState,
}

#[derive(Deserialize)]
struct FileIn {
    format: String,
    project_id: String,
    events: Vec<ProjectEvent>,
    snapshot: serde_json::Value,
}

pub fn encode(project: &Project) -> String {
    let out = FileOut {
        format: FORMAT,
        project_id: &project.id,
        events: &project.events,
        snapshot: &project.state,
    };
    let mut text = serde_json::to_string_pretty(&out).expect("project serializes");
    text.push('\n');
    text
}

/// Parses a project file and rebuilds state from the log. A snapshot that
/// disagrees with the log is reported as a warning and ignored.
pub fn decode(text: &str) -> Result<(Project, Vec<String>), StoreError> {
    let corrupt = |m: String| StoreError::CorruptFile(m);
    let file: FileIn = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    if file.format != FORMAT {
        return Err(corrupt(format!("unsupported format `{}`", file.format)));
    }
    let project = Project::replay(file.project_id, file.events).map_err(|e| corrupt(e.to_string()))?;
    let mut warnings = Vec::new();
    let last = project.state.last_sequence;
    let snapshot_last = file.snapshot.get("last_sequence").and_then(serde_json::Value::as_u64);
    if let Some(s) = snapshot_last {
        if s > last {
            return Err(corrupt(format!(
                "log is truncated: snapshot covers sequence {s} but the log ends at {last}"
            )));
        }
    }
    match serde_json::from_value::<ProjectState>(file.snapshot) {
        Ok(snapshot) if snapshot == project.state => {}
        Ok(_) => warnings.push("snapshot differs from the event log; state rebuilt from the log".to_string()),
        Err(e) => warnings.push(format!("snapshot unreadable ({e}); state rebuilt from the log")),
    }
    Ok((project, warnings))
}
