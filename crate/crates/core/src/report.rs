//! Structured verdicts for the conjecture and identity checkers.

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Consistent,
    Inconclusive,
    Counterexample,
}

impl Status {
    /// Process exit code: 0 consistent, 1 counterexample, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Consistent => 0,
            Status::Counterexample => 1,
            Status::Inconclusive => 2,
        }
    }

    /// Counterexample dominates inconclusive, which dominates consistent.
    pub fn combine(self, other: Status) -> Status {
        self.max(other)
    }
}

/// Outcome of one checker run.
///
/// `status` is derived from the payload: any entry in `counterexamples`
/// makes it [`Status::Counterexample`], otherwise any entry in
/// `inconclusive` makes it [`Status::Inconclusive`]. Sub-reports contribute
/// their own status. `notes` never affect the status.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub name: String,
    pub status: Status,
    pub params: Map<String, Value>,
    pub checked: u64,
    pub counterexamples: Vec<Value>,
    pub inconclusive: Vec<Value>,
    pub notes: Vec<String>,
    pub data: Map<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub subreports: Vec<ConjectureReport>,
}

impl ConjectureReport {
    pub fn new(name: impl Into<String>) -> Self {
        ConjectureReport {
            name: name.into(),
            status: Status::Consistent,
            params: Map::new(),
            checked: 0,
            counterexamples: Vec::new(),
            inconclusive: Vec::new(),
            notes: Vec::new(),
            data: Map::new(),
            subreports: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_owned(), value.into());
        self
    }

    pub fn counterexample(&mut self, payload: Value) {
        self.counterexamples.push(payload);
        self.refresh();
    }

    pub fn inconclusive(&mut self, payload: Value) {
        self.inconclusive.push(payload);
        self.refresh();
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.data.insert(key.to_owned(), value.into());
    }

    /// Record one equality check; mismatches become counterexamples.
    pub fn check(&mut self, ok: bool, payload: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.counterexample(payload());
        }
    }

    pub fn push_sub(&mut self, sub: ConjectureReport) {
        self.checked += sub.checked;
        self.subreports.push(sub);
        self.refresh();
    }

    pub fn is_consistent(&self) -> bool {
        self.status == Status::Consistent
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn find(&self, name: &str) -> Option<&ConjectureReport> {
        if self.name == name {
            return Some(self);
        }
        self.subreports.iter().find_map(|s| s.find(name))
    }

    fn refresh(&mut self) {
        let own = if !self.counterexamples.is_empty() {
            Status::Counterexample
        } else if !self.inconclusive.is_empty() {
            Status::Inconclusive
        } else {
            Status::Consistent
        };
        self.status = self.subreports.iter().fold(own, |acc, s| acc.combine(s.status));
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn status_aggregation() {
        let mut r = ConjectureReport::new("top");
        assert_eq!(r.exit_code(), 0);
        let mut sub = ConjectureReport::new("sub");
        sub.inconclusive(json!({"n": 3}));
        r.push_sub(sub);
        assert_eq!(r.status, Status::Inconclusive);
        r.check(false, || json!({"n": 4}));
        assert_eq!(r.status, Status::Counterexample);
        assert_eq!(r.exit_code(), 1);
        assert_eq!(r.checked, 1);
        assert!(r.find("sub").is_some());
    }

    #[test]
    fn stable_field_names() {
        let v = serde_json::to_value(ConjectureReport::new("x")).unwrap();
        for key in ["name", "status", "params", "checked", "counterexamples", "inconclusive", "notes", "data"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["status"], "consistent");
    }
}
