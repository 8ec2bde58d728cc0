//! Report records and their two renderings.

use crate::command::{num, verdict_json, Outcome, Validated};
use crate::scenario::Scenario;
use agcal_core::index_core::{GridConfig, Mode};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    JsonLines,
    Table,
}

impl Format {
    pub fn from_name(s: &str) -> Option<Format> {
        match s {
            "json-lines" => Some(Format::JsonLines),
            "table" => Some(Format::Table),
            _ => None,
        }
    }
}

/// One executed command.
#[derive(Clone, Debug)]
pub struct CommandResult {
    pub index: usize,
    pub id: String,
    pub command: String,
    pub expected: String,
    pub observed: String,
    pub matched: bool,
    pub grid: GridConfig,
    pub outcome: Outcome,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub scenario: String,
    pub echo: String,
    pub engine_version: String,
    pub config_hash: String,
    pub grid_override: Option<GridConfig>,
    pub results: Vec<CommandResult>,
}

fn grid_json(g: &GridConfig) -> Value {
    json!({"eps0": num(g.eps0), "ratio": num(g.ratio), "count": g.count})
}

fn grid_text(g: &GridConfig) -> String {
    format!("grid eps0 = {}, r = {}, count = {}", g.eps0, g.ratio, g.count)
}

/// SHA-256 over everything that determines the output.
pub fn config_hash(echo: &str, grid: Option<&GridConfig>, version: &str) -> String {
    let mut h = Sha256::new();
    h.update(version.as_bytes());
    h.update([0]);
    h.update(echo.as_bytes());
    h.update([0]);
    if let Some(g) = grid {
        h.update(grid_text(g).as_bytes());
    }
    h.finalize().iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

impl CommandResult {
    pub fn new(index: usize, id: &str, v: &Validated, grid: GridConfig, outcome: Outcome) -> CommandResult {
        CommandResult {
            index,
            id: id.to_string(),
            command: v.kind.name().to_string(),
            expected: v.expect.label().to_string(),
            observed: outcome.observed(&v.expect).to_string(),
            matched: outcome.matches(&v.expect),
            grid,
            outcome,
        }
    }

    /// Truncation statement. Numeric verdicts without one fall back to the grid.
    pub fn truncation(&self) -> Option<String> {
        match (&self.outcome.truncation, &self.outcome.verdict) {
            (Some(t), _) if !t.is_empty() => Some(t.clone()),
            (_, Some(v)) if v.mode == Mode::Numeric => Some(grid_text(&self.grid)),
            _ => None,
        }
    }

    pub fn record(&self) -> Value {
        let mut r = Map::new();
        r.insert("record".into(), json!("result"));
        r.insert("index".into(), json!(self.index));
        r.insert("id".into(), json!(self.id));
        r.insert("command".into(), json!(self.command));
        r.insert("expected".into(), json!(self.expected));
        r.insert("observed".into(), json!(self.observed));
        r.insert("matched".into(), json!(self.matched));
        r.insert("truncation".into(), self.truncation().map_or(Value::Null, Value::String));
        r.insert("grid".into(), grid_json(&self.outcome.grid.unwrap_or(self.grid)));
        match &self.outcome.verdict {
            Some(v) => {
                if let Value::Object(m) = verdict_json(v) {
                    r.extend(m);
                }
            }
            None => {
                r.insert("status".into(), json!("error"));
            }
        }
        r.insert("error".into(), self.outcome.error.as_ref().map_or(Value::Null, |e| json!(e)));
        let checks: Map<String, Value> =
            self.outcome.checks.iter().map(|(k, ok)| (k.clone(), json!(ok))).collect();
        r.insert("checks".into(), Value::Object(checks));
        let data: Map<String, Value> = self
            .outcome
            .data
            .iter()
            .map(|(k, v)| ((*k).to_string(), v.clone()))
            .collect();
        r.insert("data".into(), Value::Object(data));
        Value::Object(r)
    }
}

impl Report {
    pub fn new(s: &Scenario, grid_override: Option<GridConfig>, results: Vec<CommandResult>) -> Report {
        let echo = s.echo();
        let version = agcal_core::ENGINE_VERSION.to_string();
        Report {
            scenario: s.name.clone(),
            config_hash: config_hash(&echo, grid_override.as_ref(), &version),
            echo,
            engine_version: version,
            grid_override,
            results,
        }
    }

    pub fn all_matched(&self) -> bool {
        self.results.iter().all(|r| r.matched)
    }

    pub fn header(&self) -> Value {
        json!({
            "record": "header",
            "scenario": self.scenario,
            "engine_version": self.engine_version,
            "config_hash": self.config_hash,
            "grid_override": self.grid_override.as_ref().map_or(Value::Null, grid_json),
            "commands": self.results.len(),
            "echo": self.echo,
        })
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::JsonLines => self.json_lines(),
            Format::Table => self.table(),
        }
    }

    fn json_lines(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header().to_string());
        out.push('\n');
        for r in &self.results {
            out.push_str(&r.record().to_string());
            out.push('\n');
        }
        out
    }

    fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario  {}", self.scenario);
        let _ = writeln!(out, "engine    {}", self.engine_version);
        let _ = writeln!(out, "config    {}", self.config_hash);
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<4} {:<28} {:<19} {:<13} {:<13} {:<8} {:<5}",
            "#", "id", "command", "expected", "observed", "mode", "ok"
        );
        let _ = writeln!(out, "{}", "-".repeat(95));
        for r in &self.results {
            let mode = r.outcome.verdict.as_ref().map_or("-", |v| v.mode.name());
            let _ = writeln!(
                out,
                "{:<4} {:<28} {:<19} {:<13} {:<13} {:<8} {:<5}",
                r.index,
                clip(&r.id, 28),
                r.command,
                r.expected,
                r.observed,
                mode,
                if r.matched { "yes" } else { "NO" }
            );
            if let Some(e) = &r.outcome.error {
                let _ = writeln!(out, "     error: {e}");
            }
            if let Some(t) = r.truncation() {
                let _ = writeln!(out, "     truncation: {t}");
            }
        }
        let matched = self.results.iter().filter(|r| r.matched).count();
        let _ = writeln!(out);
        let _ = writeln!(out, "{matched}/{} commands matched", self.results.len());
        out
    }
}

fn clip(s: &str, w: usize) -> String {
    if s.chars().count() <= w {
        s.to_string()
    } else {
        let mut t: String = s.chars().take(w - 1).collect();
        t.push('~');
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_depends_on_every_input() {
        let g = GridConfig::default();
        let base = config_hash("scenario: a\n", None, "1");
        assert_eq!(base, config_hash("scenario: a\n", None, "1"));
        assert_ne!(base, config_hash("scenario: b\n", None, "1"));
        assert_ne!(base, config_hash("scenario: a\n", None, "2"));
        assert_ne!(base, config_hash("scenario: a\n", Some(&g), "1"));
    }

    #[test]
    fn clipping_keeps_width() {
        assert_eq!(clip("short", 8), "short");
        assert_eq!(clip("much-too-long", 8).chars().count(), 8);
    }
}
