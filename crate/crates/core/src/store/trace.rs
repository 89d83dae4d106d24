use serde::{Deserialize, Serialize};

use crate::development::ExpansionLevel;
use crate::extraction::RequirementField;

use super::event::ProjectEvent;
use super::{Project, StoreError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLink {
    pub reference: String,
    pub event: ProjectEvent,
}

/// From the queried record back to the answers that ground it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceChain {
    pub links: Vec<TraceLink>,
}

impl TraceChain {
    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn actions(&self) -> Vec<&'static str> {
        self.links.iter().map(|l| l.event.change.action()).collect()
    }
}

struct Walker<'a> {
    project: &'a Project,
    links: Vec<TraceLink>,
}

impl Walker<'_> {
    fn push(&mut self, reference: String, sequence: u64) -> Result<(), StoreError> {
        let event = self
            .project
            .event(sequence)
            .ok_or_else(|| StoreError::NotFound(format!("event {sequence}")))?;
        self.links.push(TraceLink {
            reference,
            event: event.clone(),
        });
        Ok(())
    }

    fn answer(&mut self, field: RequirementField) -> Result<(), StoreError> {
        let seq = *self
            .project
            .state
            .answer_sequences
            .get(&field)
            .ok_or_else(|| StoreError::NotFound(format!("answer:{field}")))?;
        self.push(format!("answer:{field}"), seq)
    }

    fn pedagogy(&mut self, version: &str) -> Result<(), StoreError> {
        let state = &self.project.state;
        let p = state
            .pedagogy_version(version)
            .ok_or_else(|| StoreError::NotFound(format!("pedagogy:{version}")))?
            .clone();
        self.push(format!("pedagogy:{version}"), p.sequence)?;
        if let Some(previous) = &p.previous {
            return self.pedagogy(previous);
        }
        for seq in &p.grounding {
            let event = self
                .project
                .event(*seq)
                .ok_or_else(|| StoreError::NotFound(format!("event {seq}")))?;
            let reference = event.subject.clone();
            self.push(reference, *seq)?;
        }
        Ok(())
    }

    fn candidate(&mut self, id: &str, revision: u32) -> Result<(), StoreError> {
        let history = self
            .project
            .state
            .candidate_history
            .get(id)
            .ok_or_else(|| StoreError::NotFound(format!("candidate:{id}")))?
            .clone();
        let upto: Vec<_> = history.iter().filter(|r| r.revision <= revision).rev().collect();
        let Some(first) = upto.last() else {
            return Err(StoreError::NotFound(format!("candidate:{id}@{revision}")));
        };
        for r in &upto {
            self.push(format!("candidate:{id}@{}", r.revision), r.sequence)?;
        }
        self.pedagogy(&first.source_pedagogy_version.clone())
    }

    fn artifact(&mut self, id: &str) -> Result<(), StoreError> {
        let state = &self.project.state;
        let a = state
            .artifact(id)
            .ok_or_else(|| StoreError::NotFound(format!("artifact:{id}")))?
            .clone();
        let seq = *state
            .artifact_sequences
            .get(id)
            .ok_or_else(|| StoreError::NotFound(format!("artifact:{id}")))?;
        self.push(format!("artifact:{id}"), seq)?;
        match (a.level, &a.parent, &a.previous) {
            (ExpansionLevel::Sentence, _, Some(previous)) => self.artifact(previous),
            (ExpansionLevel::Sentence, _, None) => self.candidate(&a.source_candidate, a.source_revision),
            (_, Some(parent), _) => self.artifact(parent),
            (_, None, _) => Err(StoreError::NotFound(format!("parent of artifact:{id}"))),
        }
    }
}

/// Resolves `answer:<Field>`, `pedagogy:<version>`, `candidate:<id>` or
/// `artifact:<id>` into its provenance chain.
pub fn trace(project: &Project, reference: &str) -> Result<TraceChain, StoreError> {
    let not_found = || StoreError::NotFound(reference.to_string());
    let (kind, id) = reference.split_once(':').ok_or_else(not_found)?;
    let mut w = Walker {
        project,
        links: Vec::new(),
    };
    match kind {
        "answer" => w.answer(RequirementField::from_name(id).ok_or_else(not_found)?)?,
        "pedagogy" => w.pedagogy(id)?,
        "candidate" => {
            let c = project.state.candidates.get(id).ok_or_else(not_found)?;
            w.candidate(id, c.revision)?
        }
        "artifact" => w.artifact(id)?,
        _ => return Err(not_found()),
    }
    Ok(TraceChain { links: w.links })
}
