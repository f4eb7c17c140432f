use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{parse_err, Result};
use crate::partnering::StrategyKind;

pub const RECORD_HEADER: &str = "instance,strategy,seed,feasible,value,generations,status";

/// Outcome of one seeded run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub strategy: StrategyKind,
    /// Base seed from the experiment's seed list.
    pub seed: u64,
    /// Best feasible raw value; `None` when no feasible solution was found.
    pub value: Option<f64>,
    pub generations: usize,
    /// The run panicked or returned an error.
    pub failed: bool,
    /// Wall-clock milliseconds. Not persisted, so record files stay
    /// reproducible.
    pub wall_ms: u128,
}

impl RunRecord {
    pub fn feasible(&self) -> bool {
        self.value.is_some()
    }

    pub fn to_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.instance,
            self.strategy,
            self.seed,
            self.feasible(),
            self.value.map(|v| v.to_string()).unwrap_or_default(),
            self.generations,
            if self.failed { "failed" } else { "ok" }
        )
    }
}

/// Header, optional `#` comment lines, then one line per record.
pub fn render_records(records: &[RunRecord], comments: &str) -> String {
    let mut out = String::new();
    for line in comments.lines() {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str(RECORD_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_line());
        out.push('\n');
    }
    out
}

pub fn parse_records(text: &str) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if line != RECORD_HEADER {
                return Err(parse_err(line_no, format!("expected header `{RECORD_HEADER}`")));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(parse_err(line_no, format!("expected 7 fields, found {}", fields.len())));
        }
        let field = |idx: usize, name: &str| -> Result<String> {
            if fields[idx].is_empty() && name != "value" {
                Err(parse_err(line_no, format!("empty {name}")))
            } else {
                Ok(fields[idx].to_string())
            }
        };
        fn parsed<T: FromStr>(s: &str, line: usize, name: &str) -> Result<T> {
            s.parse().map_err(|_| parse_err(line, format!("invalid {name} `{s}`")))
        }
        let instance = field(0, "instance")?;
        let strategy = StrategyKind::from_str(&field(1, "strategy")?).map_err(|e| parse_err(line_no, e.to_string()))?;
        let seed = parsed(&field(2, "seed")?, line_no, "seed")?;
        let feasible: bool = parsed(&field(3, "feasible")?, line_no, "feasible flag")?;
        let value = match (feasible, fields[4]) {
            (true, v) if !v.is_empty() => Some(parsed(v, line_no, "value")?),
            (false, "") => None,
            _ => return Err(parse_err(line_no, "value must be present exactly when feasible")),
        };
        let generations = parsed(&field(5, "generations")?, line_no, "generations")?;
        let failed = match fields[6] {
            "ok" => false,
            "failed" => true,
            other => return Err(parse_err(line_no, format!("invalid status `{other}`"))),
        };
        records.push(RunRecord {
            instance,
            strategy,
            seed,
            value,
            generations,
            failed,
            wall_ms: 0,
        });
    }
    if !seen_header {
        return Err(parse_err(1, format!("missing header `{RECORD_HEADER}`")));
    }
    Ok(records)
}
