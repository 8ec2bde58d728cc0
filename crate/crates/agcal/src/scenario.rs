//! Scenario files: a plain indented key-value format.
//!
//! ```text
//! scenario: demo
//! grid: 0.1, 0.7, 40
//!
//! command: compare
//!   x: eps^-2
//!   y: eps^-3
//!   expect: XbigOofY
//! ```
//!
//! Top-level keys start in column 1. A `command:` line opens a block and
//! the indented lines below it are that command's parameters. `#` starts a
//! comment when it begins a line or follows whitespace.

use crate::command::{Command, Kind, Validated};
use agcal_core::index_core::GridConfig;
use std::collections::BTreeSet;
use std::fmt;

/// A schema or literal error, located by 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ScenarioError {}

/// One `key: value` line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    pub key_col: usize,
    pub value_col: usize,
}

impl Entry {
    /// An error pointing `offset` bytes into the value.
    pub fn error_at(&self, offset: usize, message: impl Into<String>) -> ScenarioError {
        ScenarioError {
            line: self.line,
            column: self.value_col + self.value[..offset.min(self.value.len())].chars().count(),
            message: format!("{}: {}", self.key, message.into()),
        }
    }

    pub fn error(&self, message: impl Into<String>) -> ScenarioError {
        self.error_at(0, message)
    }
}

/// A command block before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawCommand {
    pub head: Entry,
    pub params: Vec<Entry>,
}

impl RawCommand {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.params.iter().find(|e| e.key == key)
    }
}

/// A validated command together with its source block.
#[derive(Clone, Debug)]
pub struct CommandSpec {
    pub id: String,
    pub raw: RawCommand,
    pub command: Validated,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub grid: Option<GridConfig>,
    pub commands: Vec<CommandSpec>,
}

impl Scenario {
    /// Normalized text of the scenario: one canonical line per entry.
    pub fn echo(&self) -> String {
        let mut out = format!("scenario: {}\n", self.name);
        if let Some(g) = &self.grid {
            out.push_str(&format!("grid: {}, {}, {}\n", g.eps0, g.ratio, g.count));
        }
        for c in &self.commands {
            out.push_str(&format!("command: {}\n", c.raw.head.value));
            out.push_str(&format!("  id: {}\n", c.id));
            for p in c.raw.params.iter().filter(|p| p.key != "id") {
                out.push_str(&format!("  {}: {}\n", p.key, p.value));
            }
        }
        out
    }
}

fn strip_comment(line: &str) -> &str {
    let mut prev_ws = true;
    for (i, c) in line.char_indices() {
        if c == '#' && prev_ws {
            return &line[..i];
        }
        prev_ws = c.is_whitespace();
    }
    line
}

fn entry(line_no: usize, text: &str, indent: usize) -> Result<Entry, ScenarioError> {
    let body = &text[indent..];
    let colon = body.find(':').ok_or(ScenarioError {
        line: line_no,
        column: indent + 1,
        message: "expected 'key: value'".into(),
    })?;
    let key = body[..colon].trim_end();
    if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-') {
        return Err(ScenarioError {
            line: line_no,
            column: indent + 1,
            message: format!("invalid key '{key}'"),
        });
    }
    let rest = &body[colon + 1..];
    let lead = rest.len() - rest.trim_start().len();
    let value = rest.trim().to_string();
    Ok(Entry {
        key: key.to_string(),
        value,
        line: line_no,
        key_col: indent + 1,
        value_col: text[..indent + colon + 1 + lead].chars().count() + 1,
    })
}

/// Splits the text into top-level entries and command blocks.
pub fn parse_raw(text: &str) -> Result<(Vec<Entry>, Vec<RawCommand>), ScenarioError> {
    let mut top = Vec::new();
    let mut commands: Vec<RawCommand> = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw_line).trim_end();
        if line.trim().is_empty() {
            continue;
        }
        if let Some(pos) = line.find('\t') {
            if line[..pos].trim().is_empty() {
                return Err(ScenarioError {
                    line: line_no,
                    column: pos + 1,
                    message: "indent with spaces, not tabs".into(),
                });
            }
        }
        let indent = line.len() - line.trim_start().len();
        let e = entry(line_no, line, indent)?;
        if indent == 0 {
            if e.key == "command" {
                commands.push(RawCommand {
                    head: e,
                    params: Vec::new(),
                });
            } else {
                if top.iter().any(|t: &Entry| t.key == e.key) {
                    return Err(ScenarioError {
                        line: line_no,
                        column: 1,
                        message: format!("duplicate key '{}'", e.key),
                    });
                }
                top.push(e);
            }
        } else {
            let Some(cur) = commands.last_mut() else {
                return Err(ScenarioError {
                    line: line_no,
                    column: indent + 1,
                    message: "indented parameter outside a command block".into(),
                });
            };
            if cur.params.iter().any(|p| p.key == e.key) {
                return Err(ScenarioError {
                    line: line_no,
                    column: indent + 1,
                    message: format!("duplicate parameter '{}'", e.key),
                });
            }
            cur.params.push(e);
        }
    }
    Ok((top, commands))
}

/// Parses `eps0, r, n`.
pub fn parse_grid(text: &str) -> Result<GridConfig, (usize, String)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err((0, "grid must be 'eps0, r, n'".into()));
    }
    let mut off = 0;
    let mut vals = [0.0f64; 2];
    for (k, p) in parts.iter().take(2).enumerate() {
        vals[k] = p
            .trim()
            .parse::<f64>()
            .map_err(|_| (off, format!("'{}' is not a number", p.trim())))?;
        off += p.len() + 1;
    }
    let n = parts[2]
        .trim()
        .parse::<usize>()
        .map_err(|_| (off, format!("'{}' is not a count", parts[2].trim())))?;
    GridConfig::new(vals[0], vals[1], n).map_err(|e| (0, e.to_string()))
}

/// Parses and validates a scenario. Every expression, gauge, profile and
/// distribution literal is checked here, before anything runs.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let (top, raws) = parse_raw(text)?;
    let mut name = None;
    let mut grid = None;
    for e in &top {
        match e.key.as_str() {
            "scenario" => {
                if e.value.is_empty() {
                    return Err(e.error("scenario name is empty"));
                }
                name = Some(e.value.clone());
            }
            "grid" => grid = Some(parse_grid(&e.value).map_err(|(o, m)| e.error_at(o, m))?),
            "description" => {}
            other => {
                return Err(ScenarioError {
                    line: e.line,
                    column: e.key_col,
                    message: format!("unknown top-level key '{other}'"),
                })
            }
        }
    }
    let name = name.ok_or(ScenarioError {
        line: 1,
        column: 1,
        message: "missing 'scenario: <name>'".into(),
    })?;
    let mut ids = BTreeSet::new();
    let mut commands = Vec::new();
    for (i, raw) in raws.into_iter().enumerate() {
        let kind = Kind::from_name(&raw.head.value).ok_or_else(|| {
            raw.head.error(format!(
                "unknown command '{}', expected one of {}",
                raw.head.value,
                Kind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
            ))
        })?;
        let id = match raw.get("id") {
            Some(e) if e.value.is_empty() => return Err(e.error("id is empty")),
            Some(e) => e.value.clone(),
            None => format!("{}-{}", kind.name(), i + 1),
        };
        if !ids.insert(id.clone()) {
            let at = raw.get("id").unwrap_or(&raw.head);
            return Err(at.error(format!("duplicate command id '{id}'")));
        }
        let command = Command::validate(kind, &raw)?;
        commands.push(CommandSpec { id, raw, command });
    }
    Ok(Scenario { name, grid, commands })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_structure_and_positions() {
        let text = "scenario: demo # trailing\n\ncommand: compare\n  x: eps^-2\n  y:   eps^-3\n";
        let (top, cmds) = parse_raw(text).unwrap();
        assert_eq!(top[0].value, "demo");
        assert_eq!(cmds.len(), 1);
        let y = cmds[0].get("y").unwrap();
        assert_eq!((y.line, y.value_col), (5, 8));
    }

    #[test]
    fn schema_errors_carry_line_and_column() {
        let e = parse_raw("scenario: a\n  x: 1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_raw("scenario: a\ncommand: compare\n\tx: 1\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_raw("scenario a\n").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse_scenario("command: compare\n  x: 1\n  y: 1\n").unwrap_err();
        assert!(e.message.contains("missing"));
        let e = parse_scenario("scenario: a\ncommand: frobnicate\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 10));
    }

    #[test]
    fn grid_literal() {
        let g = parse_grid("0.1, 0.7, 40").unwrap();
        assert_eq!((g.eps0, g.ratio, g.count), (0.1, 0.7, 40));
        assert!(parse_grid("0.1, x, 40").unwrap_err().0 > 0);
        assert!(parse_grid("0.1, 0.7").is_err());
    }

    #[test]
    fn comments_need_leading_whitespace() {
        assert_eq!(strip_comment("a: b # c"), "a: b ");
        assert_eq!(strip_comment("# all"), "");
        assert_eq!(strip_comment("a: b#c"), "a: b#c");
    }
}
