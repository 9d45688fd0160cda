use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};

/// What one invocation found. Printed as plain lines or as JSON.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub verdict: String,
    pub exit_code: u8,
    pub info: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<Stats>,
    pub time_ms: u128,
    /// Lines in the syntax of the input file.
    pub witness: Option<Vec<String>>,
}

#[derive(Debug, Serialize)]
pub struct Stats {
    pub m: usize,
    pub n: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budgets: Option<String>,
}

impl RunReport {
    pub fn new(command: String, verdict: impl Into<String>, exit_code: u8) -> Self {
        RunReport {
            command,
            verdict: verdict.into(),
            exit_code,
            info: Map::new(),
            stats: None,
            time_ms: 0,
            witness: None,
        }
    }

    pub fn info(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.info.insert(key.to_string(), value.into());
        self
    }

    pub fn stats(&mut self, m: usize, n: u64, budgets: Option<String>) -> &mut Self {
        self.stats = Some(Stats { m, n, budgets });
        self
    }

    pub fn witness(&mut self, lines: Vec<String>) -> &mut Self {
        self.witness = Some(lines);
        self
    }

    pub fn elapsed(&mut self, d: Duration) {
        self.time_ms = d.as_millis();
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// Verdict first, then `key: value` lines, then the witness after a
    /// `# witness` comment so it can be pasted into an input file.
    pub fn to_text(&self) -> String {
        let mut out = vec![self.verdict.clone(), format!("command: {}", self.command)];
        for (k, v) in &self.info {
            out.push(format!("{k}: {}", plain(v)));
        }
        if let Some(s) = &self.stats {
            out.push(format!("m: {}", s.m));
            out.push(format!("n: {}", s.n));
            if let Some(b) = &s.budgets {
                out.push(format!("budgets: {b}"));
            }
        }
        out.push(format!("time_ms: {}", self.time_ms));
        match &self.witness {
            Some(w) if w.is_empty() => out.push("# witness: no changes".to_string()),
            Some(w) => {
                out.push("# witness".to_string());
                out.extend(w.iter().cloned());
            }
            None => {}
        }
        out.join("\n")
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(plain).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}
