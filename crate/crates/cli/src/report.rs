//! Run reports: the common output of every subcommand.

use serde::Serialize;
use serde_json::Value;

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub description: String,
    pub expected: String,
    pub got: String,
    pub matched: bool,
}

#[derive(Serialize, Clone, Debug, Default, PartialEq)]
pub struct Section {
    pub name: String,
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section { name: name.into(), ..Section::default() }
    }

    pub fn check(&mut self, description: impl Into<String>, expected: impl ToString, got: impl ToString) -> bool {
        let (expected, got) = (expected.to_string(), got.to_string());
        let matched = expected == got;
        self.checks.push(CheckLine { description: description.into(), expected, got, matched });
        matched
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.matched)
    }
}

#[derive(Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Mismatch,
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub sections: Vec<Section>,
    pub timing_ms: u64,
    pub status: Status,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport { command: command.into(), inputs: Vec::new(), sections: Vec::new(), timing_ms: 0, status: Status::Ok }
    }

    pub fn finish(&mut self, started: std::time::Instant) {
        self.timing_ms = started.elapsed().as_millis() as u64;
        if self.sections.iter().any(|s| !s.passed()) {
            self.status = Status::Mismatch;
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::Mismatch => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.command);
        for i in &self.inputs {
            s.push_str(&format!("input {} sha256 {}\n", i.path, i.sha256));
        }
        for sec in &self.sections {
            let mark = if sec.passed() { "ok" } else { "MISMATCH" };
            s.push_str(&format!("\n== {} ({mark})\n", sec.name));
            for c in &sec.checks {
                let tick = if c.matched { "ok  " } else { "FAIL" };
                if c.matched {
                    s.push_str(&format!("  {tick} {}: {}\n", c.description, c.got));
                } else {
                    s.push_str(&format!("  {tick} {}: expected {}, got {}\n", c.description, c.expected, c.got));
                }
            }
            for n in &sec.notes {
                for line in n.lines() {
                    if line.is_empty() {
                        s.push('\n');
                    } else {
                        s.push_str(&format!("  {line}\n"));
                    }
                }
            }
        }
        let status = match self.status {
            Status::Ok => "ok",
            Status::Mismatch => "mismatch",
        };
        s.push_str(&format!("\nstatus: {status} ({} ms)\n", self.timing_ms));
        s
    }
}
