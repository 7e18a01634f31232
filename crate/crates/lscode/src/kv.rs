//! Line-oriented `key = value` text shared by configs, manifests, waveform
//! sidecars and metrics reports.
//!
//! `#` starts a comment, blank lines are ignored, keys are unique and
//! whitespace around keys and values is trimmed.

use std::collections::HashSet;
use std::fmt::Display;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits text into entries. The error carries a 1-based line number.
pub fn parse(text: &str) -> Result<Vec<Entry>, (usize, String)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err((line, format!("expected `key = value`, found `{content}`")));
        };
        let key = key.trim();
        if key.is_empty() {
            return Err((line, "missing key before `=`".into()));
        }
        if !seen.insert(key.to_string()) {
            return Err((line, format!("duplicate key `{key}`")));
        }
        out.push(Entry {
            line,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

/// Accumulates `key = value` lines in insertion order.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Writer {
    text: String,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn comment(&mut self, text: &str) -> &mut Self {
        self.text.push_str("# ");
        self.text.push_str(text);
        self.text.push('\n');
        self
    }

    pub fn entry(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.text.push_str(&format!("{key} = {value}\n"));
        self
    }

    pub fn finish(self) -> String {
        self.text
    }
}
