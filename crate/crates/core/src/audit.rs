use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditKind {
    /// Terms removed by a truncation or a neglect step.
    Dropped,
    /// An assumption rule rewrote terms.
    Assumed,
    /// Part of an exact result not captured by a named structure.
    Residual,
    /// A convention was fixed or a sign was derived.
    Resolution,
    /// An internal consistency check that passed.
    Check,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub stage: String,
    pub kind: AuditKind,
    pub detail: String,
    pub count: usize,
}

/// Ordered, machine-readable record of every approximation and assumption.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Audit(pub Vec<AuditEntry>);

impl Audit {
    pub fn new() -> Audit {
        Audit::default()
    }

    pub fn push(&mut self, stage: &str, kind: AuditKind, detail: impl Into<String>, count: usize) {
        self.0.push(AuditEntry { stage: stage.to_string(), kind, detail: detail.into(), count });
    }

    pub fn extend(&mut self, other: Audit) {
        self.0.extend(other.0);
    }

    pub fn entries(&self) -> &[AuditEntry] {
        &self.0
    }

    pub fn of_kind(&self, kind: AuditKind) -> impl Iterator<Item = &AuditEntry> {
        self.0.iter().filter(move |e| e.kind == kind)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}
