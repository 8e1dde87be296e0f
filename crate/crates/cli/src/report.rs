//! Machine-readable reports. Field names are frozen in
//! `schema/report.schema.json`; the human-readable text is a view and is
//! never parsed back.

use std::time::Instant;

use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

/// A command report: verdicts and certificates plus timing.
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub verdicts: Value,
    pub certificates: Value,
    pub text: String,
    started: Instant,
}

impl Report {
    pub fn new(command: &str, inputs: Value) -> Self {
        Report {
            command: command.to_string(),
            inputs,
            verdicts: Value::Null,
            certificates: Value::Null,
            text: String::new(),
            started: Instant::now(),
        }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "verdicts": self.verdicts,
            "certificates": self.certificates,
            "timings": {
                "elapsed_ms": self.started.elapsed().as_millis() as u64,
            },
        })
    }
}
