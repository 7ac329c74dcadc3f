//! Solution-file parsing for the external bridge.
//!
//! Three dialects are understood:
//!
//! * `generic-csv` — `name,value` per line, optional `name,value` header.
//! * `gurobi-sol` — `name value` per line, `#` comment lines skipped.
//! * `cbc` — an optional status header such as
//!   `Optimal - objective value 7.0`, then `index name value [reduced]`
//!   rows (the leading index may be absent).

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionDialect {
    GenericCsv,
    GurobiSol,
    Cbc,
}

impl SolutionDialect {
    pub fn parse_name(name: &str) -> Option<Self> {
        match name {
            "generic-csv" => Some(Self::GenericCsv),
            "gurobi-sol" | "gurobi-sol-style" => Some(Self::GurobiSol),
            "cbc" | "cbc-style" => Some(Self::Cbc),
            _ => None,
        }
    }
}

/// Parsed name/value pairs plus non-fatal oddities encountered on the way.
#[derive(Debug, Clone, Default)]
pub struct ParsedSolution {
    pub values: HashMap<String, f64>,
    pub warnings: Vec<String>,
    /// Status word from a recognized header line, if any.
    pub declared_status: Option<String>,
}

#[derive(Debug, Error)]
pub enum SolFileError {
    #[error("cannot read solution file `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed solution line `{content}`")]
    Malformed {
        path: String,
        line: usize,
        content: String,
    },
}

/// Parses a solution file in the given dialect.
pub fn parse_solution_file(
    path: impl AsRef<Path>,
    dialect: SolutionDialect,
) -> Result<ParsedSolution, SolFileError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let raw = fs::read_to_string(path).map_err(|source| SolFileError::Io {
        path: display.clone(),
        source,
    })?;
    parse_solution_str(&raw, dialect, &display)
}

pub fn parse_solution_str(
    raw: &str,
    dialect: SolutionDialect,
    path: &str,
) -> Result<ParsedSolution, SolFileError> {
    let mut out = ParsedSolution::default();
    if raw.trim().is_empty() {
        out.warnings.push("solution file is empty".into());
        return Ok(out);
    }

    for (lineno, line) in raw.lines().enumerate() {
        let line_number = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        match dialect {
            SolutionDialect::GenericCsv => {
                let mut parts = trimmed.splitn(2, ',');
                let name = parts.next().unwrap_or("").trim();
                let value = parts.next().map(str::trim);
                match value.map(str::parse::<f64>) {
                    Some(Ok(v)) if !name.is_empty() => {
                        out.values.insert(name.to_string(), v);
                    }
                    _ if line_number == 1 => {
                        // Tolerate a header row.
                        out.warnings
                            .push(format!("skipped header-like line 1 `{trimmed}`"));
                    }
                    _ => {
                        return Err(SolFileError::Malformed {
                            path: path.to_string(),
                            line: line_number,
                            content: trimmed.to_string(),
                        });
                    }
                }
            }
            SolutionDialect::GurobiSol => {
                if trimmed.starts_with('#') {
                    if let Some(rest) = trimmed.trim_start_matches('#').trim().strip_prefix("Objective value =") {
                        out.warnings
                            .push(format!("objective comment: {}", rest.trim()));
                    }
                    continue;
                }
                let mut parts = trimmed.split_whitespace();
                let (name, value) = (parts.next(), parts.next());
                match (name, value.map(str::parse::<f64>)) {
                    (Some(name), Some(Ok(v))) => {
                        out.values.insert(name.to_string(), v);
                    }
                    _ => {
                        return Err(SolFileError::Malformed {
                            path: path.to_string(),
                            line: line_number,
                            content: trimmed.to_string(),
                        });
                    }
                }
            }
            SolutionDialect::Cbc => {
                // Status header, e.g. `Optimal - objective value 7.0` or
                // `Infeasible - objective value 0`.
                if line_number == 1 && trimmed.contains("objective value") {
                    out.declared_status = trimmed
                        .split_whitespace()
                        .next()
                        .map(|s| s.to_ascii_lowercase());
                    continue;
                }
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                let parsed = match fields.as_slice() {
                    [idx, name, value, ..] if idx.parse::<i64>().is_ok() => {
                        value.parse::<f64>().ok().map(|v| (*name, v))
                    }
                    [name, value, ..] => value.parse::<f64>().ok().map(|v| (*name, v)),
                    _ => None,
                };
                match parsed {
                    Some((name, v)) => {
                        out.values.insert(name.to_string(), v);
                    }
                    None => {
                        return Err(SolFileError::Malformed {
                            path: path.to_string(),
                            line: line_number,
                            content: trimmed.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gurobi_style_two_lines() {
        let parsed =
            parse_solution_str("x 1\ny 0.5\n", SolutionDialect::GurobiSol, "mem").unwrap();
        assert_eq!(parsed.values["x"], 1.0);
        assert_eq!(parsed.values["y"], 0.5);
    }

    #[test]
    fn gurobi_style_skips_comments() {
        let parsed = parse_solution_str(
            "# Objective value = 7.5\nx 1\n",
            SolutionDialect::GurobiSol,
            "mem",
        )
        .unwrap();
        assert_eq!(parsed.values.len(), 1);
        assert!(!parsed.warnings.is_empty());
    }

    #[test]
    fn empty_file_warns() {
        let parsed = parse_solution_str("", SolutionDialect::GurobiSol, "mem").unwrap();
        assert!(parsed.values.is_empty());
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn cbc_header_and_rows() {
        let raw = "Optimal - objective value 7.0\n  0 x 1 0\n  1 y 1 0\n";
        let parsed = parse_solution_str(raw, SolutionDialect::Cbc, "mem").unwrap();
        assert_eq!(parsed.declared_status.as_deref(), Some("optimal"));
        assert_eq!(parsed.values["x"], 1.0);
        assert_eq!(parsed.values["y"], 1.0);
    }

    #[test]
    fn cbc_rows_without_index() {
        let raw = "x 1.5\ny 0\n";
        let parsed = parse_solution_str(raw, SolutionDialect::Cbc, "mem").unwrap();
        assert_eq!(parsed.values["x"], 1.5);
    }

    #[test]
    fn csv_with_header() {
        let raw = "name,value\nx,2.25\n";
        let parsed = parse_solution_str(raw, SolutionDialect::GenericCsv, "mem").unwrap();
        assert_eq!(parsed.values["x"], 2.25);
        assert_eq!(parsed.warnings.len(), 1);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let raw = "x 1\nbroken-line\n";
        let err = parse_solution_str(raw, SolutionDialect::GurobiSol, "mem").unwrap_err();
        match err {
            SolFileError::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
