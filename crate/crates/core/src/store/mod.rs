//! Event-sourced project persistence.
//!
//! A project is its append-only event log. [`ProjectState`] is the fold of
//! that log and every write goes through [`Project::append`], which applies
//! the change before the event is kept. One JSON file per project holds the
//! log plus a snapshot of the folded state.

mod event;
mod file;
mod state;
mod trace;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use event::{Actor, Change, PedagogyOrigin, ProjectEvent};
pub use file::{decode, encode, FORMAT};
pub use state::{CandidateRevision, PedagogyVersion, ProjectState, ReplayError};
pub use trace::{trace, TraceChain, TraceLink};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Phase {
    #[default]
    Extraction,
    Translation,
    Development,
}

impl Phase {
    pub fn from_name(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "extraction" => Some(Phase::Extraction),
            "translation" => Some(Phase::Translation),
            "development" => Some(Phase::Development),
            _ => None,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Extraction => "Extraction",
            Phase::Translation => "Translation",
            Phase::Development => "Development",
        })
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("change rejected: {0}")]
    Rejected(String),
    #[error("storage failure: {0}")]
    StorageFailure(String),
    #[error("corrupt project file: {0}")]
    CorruptFile(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Project {
    pub id: String,
    pub events: Vec<ProjectEvent>,
    pub state: ProjectState,
}

impl Project {
    pub fn new(id: impl Into<String>) -> Self {
        Project {
            id: id.into(),
            events: Vec::new(),
            state: ProjectState::default(),
        }
    }

    /// Folds `events` from an empty state.
    pub fn replay(id: impl Into<String>, events: Vec<ProjectEvent>) -> Result<Self, ReplayError> {
        let mut state = ProjectState::default();
        for e in &events {
            state.apply(e.sequence, &e.change)?;
        }
        Ok(Project {
            id: id.into(),
            events,
            state,
        })
    }

    pub fn event(&self, sequence: u64) -> Option<&ProjectEvent> {
        let index = usize::try_from(sequence).ok()?.checked_sub(1)?;
        self.events.get(index).filter(|e| e.sequence == sequence)
    }

    /// Applies `change` and records it with the next sequence number.
    pub fn append(&mut self, actor: Actor, change: Change) -> Result<&ProjectEvent, StoreError> {
        let sequence = self.state.last_sequence + 1;
        let mut next = self.state.clone();
        next.apply(sequence, &change)
            .map_err(|e| StoreError::Rejected(e.to_string()))?;
        self.state = next;
        self.events.push(ProjectEvent {
            sequence,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            actor,
            subject: change.subject(),
            change,
        });
        Ok(self.events.last().expect("just pushed"))
    }
}

pub const FILE_SUFFIX: &str = ".pedforge.json";

/// Directory of project files.
#[derive(Debug, Clone)]
pub struct ProjectStore {
    data_dir: PathBuf,
}

fn storage(e: impl fmt::Display) -> StoreError {
    StoreError::StorageFailure(e.to_string())
}

impl ProjectStore {
    pub fn open(data_dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let data_dir = data_dir.into();
        fs::create_dir_all(&data_dir).map_err(storage)?;
        Ok(ProjectStore { data_dir })
    }

    pub fn data_dir(&self) -> &Path {
        &self.data_dir
    }

    fn valid_id(id: &str) -> bool {
        !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    }

    pub fn path(&self, id: &str) -> PathBuf {
        self.data_dir.join(format!("{id}{FILE_SUFFIX}"))
    }

    pub fn exists(&self, id: &str) -> bool {
        Self::valid_id(id) && self.path(id).is_file()
    }

    /// A new empty project, saved immediately.
    pub fn create(&self) -> Result<Project, StoreError> {
        let project = Project::new(uuid::Uuid::new_v4().to_string());
        self.save(&project)?;
        Ok(project)
    }

    /// Writes the project file atomically: temp file, fsync, rename.
    pub fn save(&self, project: &Project) -> Result<(), StoreError> {
        if !Self::valid_id(&project.id) {
            return Err(StoreError::StorageFailure(format!(
                "invalid project id `{}`",
                project.id
            )));
        }
        let target = self.path(&project.id);
        let temp = self.data_dir.join(format!(".{}{FILE_SUFFIX}.tmp", project.id));
        let mut f = fs::File::create(&temp).map_err(storage)?;
        f.write_all(encode(project).as_bytes()).map_err(storage)?;
        f.sync_all().map_err(storage)?;
        drop(f);
        fs::rename(&temp, &target).map_err(storage)?;
        if let Ok(dir) = fs::File::open(&self.data_dir) {
            let _ = dir.sync_all();
        }
        Ok(())
    }

    /// Loads a project and any snapshot warnings.
    pub fn load(&self, id: &str) -> Result<(Project, Vec<String>), StoreError> {
        if !Self::valid_id(id) {
            return Err(StoreError::NotFound(id.to_string()));
        }
        let text = match fs::read_to_string(self.path(id)) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(StoreError::NotFound(id.to_string())),
            Err(e) => return Err(storage(e)),
        };
        let (project, warnings) = decode(&text)?;
        if project.id != id {
            return Err(StoreError::CorruptFile(format!(
                "file for {id} holds project {}",
                project.id
            )));
        }
        Ok((project, warnings))
    }

    pub fn list(&self) -> Result<Vec<String>, StoreError> {
        let mut ids: Vec<String> = fs::read_dir(&self.data_dir)
            .map_err(storage)?
            .filter_map(|e| e.ok())
            .filter_map(|e| {
                e.file_name()
                    .to_str()
                    .and_then(|n| n.strip_suffix(FILE_SUFFIX))
                    .map(str::to_string)
            })
            .filter(|id| Self::valid_id(id))
            .collect();
        ids.sort();
        Ok(ids)
    }
}
