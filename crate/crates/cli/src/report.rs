use std::fmt::Write as _;

use sha2::{Digest, Sha256};

/// What a command prints: named inputs with digests, result fields and an
/// optional multi-line witness.
#[derive(Debug, Default)]
pub struct Report {
    command: String,
    inputs: Vec<(String, String)>,
    fields: Vec<(String, String)>,
    witness: Option<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            ..Report::default()
        }
    }

    pub fn input(&mut self, name: &str, contents: &str) {
        let digest = Sha256::digest(contents.as_bytes());
        self.inputs.push((name.to_string(), format!("{digest:x}")));
    }

    pub fn field(&mut self, key: &str, value: impl ToString) {
        self.fields.push((key.to_string(), value.to_string()));
    }

    pub fn witness(&mut self, text: impl ToString) {
        self.witness = Some(text.to_string());
    }

    /// Plain text, or one `key=value` per line in record mode.
    pub fn render(&self, record: bool) -> String {
        let mut out = String::new();
        if record {
            let _ = writeln!(out, "command={}", self.command);
            for (name, digest) in &self.inputs {
                let _ = writeln!(out, "input={name}");
                let _ = writeln!(out, "input.sha256={digest}");
            }
            for (k, v) in &self.fields {
                let _ = writeln!(out, "{k}={}", v.replace('\n', " | "));
            }
            if let Some(w) = &self.witness {
                let lines: Vec<&str> = w.lines().map(str::trim).collect();
                let _ = writeln!(out, "witness={}", lines.join(" | "));
            }
            return out;
        }
        let _ = writeln!(out, "command: {}", self.command);
        for (name, digest) in &self.inputs {
            let _ = writeln!(out, "input: {name} (sha256 {})", &digest[..16]);
        }
        for (k, v) in &self.fields {
            let _ = writeln!(out, "{k}: {v}");
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(out, "witness:");
            for line in w.lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
        out
    }
}
