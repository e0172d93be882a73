use serde::Serialize;
use serde_json::{json, Value};

use super::config::OutputFormat;
use crate::error::{input, Result};
use crate::qseries::CheckStatus;

pub const SCHEMA: &str = "eulercx/1";

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), status: if ok { CheckStatus::Pass } else { CheckStatus::Fail }, detail: detail.into() }
    }

    pub fn with_status(name: impl Into<String>, status: CheckStatus, detail: impl Into<String>) -> Check {
        Check { name: name.into(), status, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// What a subcommand hands back before it is wrapped in the envelope.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub table: Option<Table>,
    pub result: Value,
    /// Emitted under `--experimental`; never part of the status.
    pub experimental: Option<Value>,
}

impl Outcome {
    pub fn status(&self) -> CheckStatus {
        overall(self.checks.iter().map(|c| &c.status))
    }
}

pub fn overall<'a>(it: impl Iterator<Item = &'a CheckStatus>) -> CheckStatus {
    let mut out = CheckStatus::Pass;
    for s in it {
        match s {
            CheckStatus::Fail => return CheckStatus::Fail,
            CheckStatus::Inconclusive => out = CheckStatus::Inconclusive,
            CheckStatus::Pass => {}
        }
    }
    out
}

pub fn envelope(command: &str, params: &Value, config: &Value, o: &Outcome) -> Value {
    let mut warnings = o.warnings.clone();
    for c in &o.checks {
        if c.status == CheckStatus::Inconclusive {
            warnings.push(format!("{}: inconclusive", c.name));
        }
    }
    let mut v = json!({
        "schema": SCHEMA,
        "command": command,
        "params": params,
        "config": config,
        "status": o.status(),
        "checks": o.checks,
        "warnings": warnings,
        "result": o.result,
    });
    if let Some(t) = &o.table {
        v["table"] = json!(t);
    }
    if let Some(x) = &o.experimental {
        v["experimental"] = x.clone();
    }
    v
}

/// Pretty JSON with a trailing newline; key order is sorted, so output is stable.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn status_of(v: &Value) -> CheckStatus {
    match v.get("status").and_then(Value::as_str) {
        Some("pass") => CheckStatus::Pass,
        Some("inconclusive") => CheckStatus::Inconclusive,
        _ => CheckStatus::Fail,
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render(v: &Value, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => Ok(json_text(v)),
        OutputFormat::Csv => {
            let Some(t) = v.get("table") else {
                return input("csv output is only available for dimension tables (cyclo --report dims, bianchi --verify dims)");
            };
            let mut out = String::new();
            let cols: Vec<String> = t["columns"].as_array().into_iter().flatten().map(cell).collect();
            out.push_str(&cols.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
            for row in t["rows"].as_array().into_iter().flatten() {
                let cells: Vec<String> = row.as_array().into_iter().flatten().map(|c| csv_field(&cell(c))).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            Ok(out)
        }
        OutputFormat::Text => Ok(text(v)),
    }
}

fn text(v: &Value) -> String {
    let mut out = format!("eulercx {}: {}\n", cell(&v["command"]), cell(&v["status"]));
    for c in v["checks"].as_array().into_iter().flatten() {
        out.push_str(&format!("  {:<13} {}  {}\n", cell(&c["status"]).to_uppercase(), cell(&c["name"]), cell(&c["detail"])));
    }
    if let Some(t) = v.get("table") {
        let cols: Vec<String> = t["columns"].as_array().into_iter().flatten().map(cell).collect();
        let rows: Vec<Vec<String>> = t["rows"].as_array().into_iter().flatten().map(|r| r.as_array().into_iter().flatten().map(cell).collect()).collect();
        let w: Vec<usize> = (0..cols.len()).map(|i| rows.iter().map(|r| r.get(i).map_or(0, |s| s.chars().count())).max().unwrap_or(0).max(cols[i].chars().count())).collect();
        let line = |cells: &[String]| -> String {
            let parts: Vec<String> = cells.iter().enumerate().map(|(i, s)| format!("{:<width$}", s, width = w[i])).collect();
            format!("  {}\n", parts.join("  ").trim_end())
        };
        out.push_str(&line(&cols));
        for r in &rows {
            out.push_str(&line(r));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_needs_a_table() {
        let mut o = Outcome { checks: vec![Check::new("a", true, "")], ..Default::default() };
        let v = envelope("x", &json!({}), &json!({}), &o);
        assert!(render(&v, OutputFormat::Csv).is_err());
        o.table = Some(Table { columns: vec!["n".into(), "label".into()], rows: vec![vec![json!(5), json!("a,b")]] });
        let v = envelope("x", &json!({}), &json!({}), &o);
        assert_eq!(render(&v, OutputFormat::Csv).unwrap(), "n,label\n5,\"a,b\"\n");
        assert!(render(&v, OutputFormat::Text).unwrap().starts_with("eulercx x: pass"));
    }

    #[test]
    fn inconclusive_is_warned_and_not_failing() {
        let o = Outcome { checks: vec![Check::new("a", true, ""), Check::with_status("b", CheckStatus::Inconclusive, "")], ..Default::default() };
        let v = envelope("x", &json!({}), &json!({}), &o);
        assert_eq!(status_of(&v), CheckStatus::Inconclusive);
        assert_eq!(v["warnings"][0], "b: inconclusive");
    }
}
