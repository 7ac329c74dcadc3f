//! Free-format MPS export and import.
//!
//! The writer emits NAME/ROWS/COLUMNS/RHS/BOUNDS/ENDATA with rows and
//! columns in declaration order, integer variables wrapped in
//! INTORG/INTEND markers and binaries emitted as `BV` bounds. Classic MPS
//! has no objective-sense record, so a maximized objective is negated and
//! the flip documented in a leading comment; the parsed model is then an
//! equivalent minimization. Numbers use Rust's shortest round-trip
//! formatting, so re-parsing reproduces every coefficient exactly.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    ConstraintSense, LinearConstraint, ModelIR, Objective, ObjectiveSense, VariableDef, VarKind,
};

/// Row name reserved for the objective.
const OBJ_ROW: &str = "OBJ";
const BOUND_SET: &str = "BND";
const RHS_SET: &str = "RHS";

#[derive(Debug, Error)]
pub enum MpsError {
    #[error("objective index {0} does not exist")]
    BadObjectiveIndex(usize),
    #[error("name collision after sanitization: `{0}`")]
    NameCollision(String),
    #[error("{line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported MPS section `{0}`")]
    UnsupportedSection(String),
}

fn sanitize(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect();
    if out.is_empty() {
        out.push('_');
    }
    out.truncate(255);
    out
}

fn number(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e15 || v.abs() < 1e-4) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Serializes one objective of the model as free-format MPS text.
pub fn export_mps(model: &ModelIR, objective_index: usize) -> Result<String, MpsError> {
    let objective = model
        .objectives
        .get(objective_index)
        .ok_or(MpsError::BadObjectiveIndex(objective_index))?;
    let maximize = objective.sense == ObjectiveSense::Max;
    let obj_sign = if maximize { -1.0 } else { 1.0 };

    // Sanitized, collision-checked names.
    let mut seen: HashMap<String, ()> = HashMap::new();
    seen.insert(OBJ_ROW.to_string(), ());
    let mut row_names = Vec::with_capacity(model.constraints.len());
    for c in &model.constraints {
        let name = sanitize(&c.name);
        if seen.insert(name.clone(), ()).is_some() {
            return Err(MpsError::NameCollision(name));
        }
        row_names.push(name);
    }
    let mut col_names = Vec::with_capacity(model.variables.len());
    for v in &model.variables {
        let name = sanitize(&v.name);
        if seen.insert(name.clone(), ()).is_some() {
            return Err(MpsError::NameCollision(name));
        }
        col_names.push(name);
    }

    // Column-major view: objective entry first, then rows in declaration
    // order.
    let n = model.variables.len();
    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(j, c) in &objective.terms {
        columns[j].push((usize::MAX, obj_sign * c));
    }
    for (r, row) in model.constraints.iter().enumerate() {
        for &(j, a) in &row.terms {
            columns[j].push((r, a));
        }
    }

    let mut out = String::new();
    writeln!(out, "* exported by binloc").unwrap();
    if maximize {
        writeln!(
            out,
            "* objective `{}` is maximized; coefficients below are negated so",
            objective.name
        )
        .unwrap();
        writeln!(out, "* the file minimizes; negate the optimum to recover it").unwrap();
    }
    writeln!(out, "NAME {}", sanitize(&model.name)).unwrap();
    writeln!(out, "ROWS").unwrap();
    writeln!(out, " N {OBJ_ROW}").unwrap();
    for (r, row) in model.constraints.iter().enumerate() {
        let tag = match row.sense {
            ConstraintSense::Le => 'L',
            ConstraintSense::Ge => 'G',
            ConstraintSense::Eq => 'E',
        };
        writeln!(out, " {tag} {}", row_names[r]).unwrap();
    }

    writeln!(out, "COLUMNS").unwrap();
    let mut in_integer_block = false;
    let mut marker_counter = 0usize;
    for (j, var) in model.variables.iter().enumerate() {
        let integral = var.is_integral();
        if integral != in_integer_block {
            let tag = if integral { "INTORG" } else { "INTEND" };
            writeln!(out, " MARKER{marker_counter} 'MARKER' '{tag}'").unwrap();
            marker_counter += 1;
            in_integer_block = integral;
        }
        if columns[j].is_empty() {
            // Columns must appear in COLUMNS to exist for most readers.
            writeln!(out, " {} {OBJ_ROW} 0", col_names[j]).unwrap();
            continue;
        }
        for &(r, value) in &columns[j] {
            let row_name = if r == usize::MAX {
                OBJ_ROW
            } else {
                row_names[r].as_str()
            };
            writeln!(out, " {} {} {}", col_names[j], row_name, number(value)).unwrap();
        }
    }
    if in_integer_block {
        writeln!(out, " MARKER{marker_counter} 'MARKER' 'INTEND'").unwrap();
    }

    writeln!(out, "RHS").unwrap();
    for (r, row) in model.constraints.iter().enumerate() {
        if row.rhs != 0.0 {
            writeln!(out, " {RHS_SET} {} {}", row_names[r], number(row.rhs)).unwrap();
        }
    }

    writeln!(out, "BOUNDS").unwrap();
    for (j, var) in model.variables.iter().enumerate() {
        let name = &col_names[j];
        match var.kind {
            VarKind::Binary => {
                writeln!(out, " BV {BOUND_SET} {name}").unwrap();
            }
            VarKind::Integer => {
                writeln!(out, " LI {BOUND_SET} {name} {}", number(var.lower)).unwrap();
                if var.upper.is_finite() {
                    writeln!(out, " UI {BOUND_SET} {name} {}", number(var.upper)).unwrap();
                }
            }
            VarKind::Continuous => {
                if var.lower == var.upper {
                    writeln!(out, " FX {BOUND_SET} {name} {}", number(var.lower)).unwrap();
                } else if var.lower == f64::NEG_INFINITY && var.upper == f64::INFINITY {
                    writeln!(out, " FR {BOUND_SET} {name}").unwrap();
                } else {
                    if var.lower == f64::NEG_INFINITY {
                        writeln!(out, " MI {BOUND_SET} {name}").unwrap();
                    } else if var.lower != 0.0 {
                        writeln!(out, " LO {BOUND_SET} {name} {}", number(var.lower)).unwrap();
                    }
                    if var.upper.is_finite() {
                        writeln!(out, " UP {BOUND_SET} {name} {}", number(var.upper)).unwrap();
                    }
                }
            }
        }
    }
    writeln!(out, "ENDATA").unwrap();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Bounds,
    Done,
}

/// Parses free-format MPS text into a single-objective model.
///
/// Supported: N/L/G/E rows, INTORG/INTEND markers, RHS, the bound tags
/// BV/LI/UI/UP/LO/FX/FR/MI/PL, plus the modern OBJSENSE extension. RANGES
/// is rejected.
pub fn parse_mps(text: &str) -> Result<ModelIR, MpsError> {
    let mut model = ModelIR::new("parsed");
    let mut section = Section::None;
    let mut objective_row: Option<String> = None;
    let mut objective_sense = ObjectiveSense::Min;
    let mut row_sense: HashMap<String, ConstraintSense> = HashMap::new();
    let mut row_order: Vec<String> = Vec::new();
    let mut row_terms: HashMap<String, Vec<(usize, f64)>> = HashMap::new();
    let mut row_rhs: HashMap<String, f64> = HashMap::new();
    let mut obj_terms: Vec<(usize, f64)> = Vec::new();
    let mut var_index: HashMap<String, usize> = HashMap::new();
    let mut integer_block = false;

    let err = |line: usize, message: String| MpsError::Parse { line, message };

    for (lineno, raw) in text.lines().enumerate() {
        let line_number = lineno + 1;
        let line = raw.trim_end();
        if line.trim_start().starts_with('*') || line.trim().is_empty() {
            continue;
        }
        let indented = line.starts_with(' ') || line.starts_with('\t');
        let fields: Vec<&str> = line.split_whitespace().collect();

        if !indented {
            section = match fields[0].to_ascii_uppercase().as_str() {
                "NAME" => {
                    if let Some(name) = fields.get(1) {
                        model.name = (*name).to_string();
                    }
                    Section::Name
                }
                "OBJSENSE" => {
                    if let Some(word) = fields.get(1) {
                        if word.eq_ignore_ascii_case("MAX")
                            || word.eq_ignore_ascii_case("MAXIMIZE")
                        {
                            objective_sense = ObjectiveSense::Max;
                        }
                    }
                    Section::ObjSense
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::Done,
                "RANGES" => {
                    return Err(MpsError::UnsupportedSection("RANGES".into()));
                }
                other => {
                    return Err(MpsError::UnsupportedSection(other.to_string()));
                }
            };
            continue;
        }

        match section {
            Section::ObjSense => {
                // Some writers put MIN/MAX on its own indented line.
                if let Some(word) = fields.first() {
                    if word.eq_ignore_ascii_case("MAX") || word.eq_ignore_ascii_case("MAXIMIZE")
                    {
                        objective_sense = ObjectiveSense::Max;
                    }
                }
            }
            Section::Rows => {
                let [tag, name] = fields.as_slice() else {
                    return Err(err(line_number, format!("bad ROWS line `{line}`")));
                };
                match tag.to_ascii_uppercase().as_str() {
                    "N" => {
                        if objective_row.is_none() {
                            objective_row = Some(name.to_string());
                        } else {
                            log::warn!("ignoring extra free row `{name}`");
                        }
                    }
                    "L" | "G" | "E" => {
                        let sense = match tag.to_ascii_uppercase().as_str() {
                            "L" => ConstraintSense::Le,
                            "G" => ConstraintSense::Ge,
                            _ => ConstraintSense::Eq,
                        };
                        row_sense.insert(name.to_string(), sense);
                        row_order.push(name.to_string());
                        row_terms.insert(name.to_string(), Vec::new());
                    }
                    other => {
                        return Err(err(line_number, format!("unknown row tag `{other}`")));
                    }
                }
            }
            Section::Columns => {
                if fields.len() >= 3 && fields[1].eq_ignore_ascii_case("'MARKER'") {
                    let tag = fields[2].trim_matches('\'').to_ascii_uppercase();
                    match tag.as_str() {
                        "INTORG" => integer_block = true,
                        "INTEND" => integer_block = false,
                        other => {
                            return Err(err(line_number, format!("unknown marker `{other}`")));
                        }
                    }
                    continue;
                }
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(err(line_number, format!("bad COLUMNS line `{line}`")));
                }
                let col = fields[0];
                let idx = *var_index.entry(col.to_string()).or_insert_with(|| {
                    model.add_variable(if integer_block {
                        VariableDef::integer(col, 0.0, f64::INFINITY)
                    } else {
                        VariableDef::continuous(col, 0.0, f64::INFINITY)
                    })
                });
                for pair in fields[1..].chunks(2) {
                    let row = pair[0];
                    let value: f64 = pair[1].parse().map_err(|_| {
                        err(line_number, format!("bad number `{}`", pair[1]))
                    })?;
                    if Some(row) == objective_row.as_deref() {
                        obj_terms.push((idx, value));
                    } else if let Some(terms) = row_terms.get_mut(row) {
                        terms.push((idx, value));
                    } else {
                        return Err(err(line_number, format!("unknown row `{row}`")));
                    }
                }
            }
            Section::Rhs => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(err(line_number, format!("bad RHS line `{line}`")));
                }
                for pair in fields[1..].chunks(2) {
                    let row = pair[0];
                    let value: f64 = pair[1].parse().map_err(|_| {
                        err(line_number, format!("bad number `{}`", pair[1]))
                    })?;
                    if Some(row) == objective_row.as_deref() {
                        log::warn!("objective RHS entry ignored");
                    } else if row_sense.contains_key(row) {
                        row_rhs.insert(row.to_string(), value);
                    } else {
                        return Err(err(line_number, format!("unknown row `{row}`")));
                    }
                }
            }
            Section::Bounds => {
                if fields.len() < 3 {
                    return Err(err(line_number, format!("bad BOUNDS line `{line}`")));
                }
                let tag = fields[0].to_ascii_uppercase();
                let name = fields[2];
                let Some(&idx) = var_index.get(name) else {
                    return Err(err(line_number, format!("unknown column `{name}`")));
                };
                let value = || -> Result<f64, MpsError> {
                    fields
                        .get(3)
                        .ok_or_else(|| err(line_number, "missing bound value".into()))?
                        .parse()
                        .map_err(|_| err(line_number, format!("bad number `{}`", fields[3])))
                };
                let var = &mut model.variables[idx];
                match tag.as_str() {
                    "BV" => {
                        var.kind = VarKind::Binary;
                        var.lower = 0.0;
                        var.upper = 1.0;
                    }
                    "LI" => {
                        var.kind = VarKind::Integer;
                        var.lower = value()?;
                    }
                    "UI" => {
                        var.kind = VarKind::Integer;
                        var.upper = value()?;
                    }
                    "LO" => var.lower = value()?,
                    "UP" => var.upper = value()?,
                    "FX" => {
                        let v = value()?;
                        var.lower = v;
                        var.upper = v;
                    }
                    "FR" => {
                        var.lower = f64::NEG_INFINITY;
                        var.upper = f64::INFINITY;
                    }
                    "MI" => var.lower = f64::NEG_INFINITY,
                    "PL" => var.upper = f64::INFINITY,
                    other => {
                        return Err(err(line_number, format!("unknown bound tag `{other}`")));
                    }
                }
            }
            Section::None | Section::Name | Section::Done => {
                return Err(err(line_number, format!("unexpected data line `{line}`")));
            }
        }
    }

    for name in row_order {
        let terms = row_terms.remove(&name).unwrap_or_default();
        model.add_constraint(LinearConstraint {
            sense: row_sense[&name],
            rhs: row_rhs.get(&name).copied().unwrap_or(0.0),
            terms,
            name,
        });
    }
    model.add_objective(Objective {
        name: objective_row.unwrap_or_else(|| OBJ_ROW.to_string()),
        sense: objective_sense,
        terms: obj_terms,
    });
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VariableDef;

    fn sample_model() -> ModelIR {
        // min x + y s.t. x + 2y >= 3, x binary, y >= 0.
        let mut m = ModelIR::new("sample");
        let x = m.add_variable(VariableDef::binary("x"));
        let y = m.add_variable(VariableDef::continuous("y", 0.0, f64::INFINITY));
        m.add_constraint(LinearConstraint {
            name: "c1".into(),
            terms: vec![(x, 1.0), (y, 2.0)],
            sense: ConstraintSense::Ge,
            rhs: 3.0,
        });
        m.add_objective(Objective {
            name: "cost".into(),
            sense: ObjectiveSense::Min,
            terms: vec![(x, 1.0), (y, 1.0)],
        });
        m
    }

    #[test]
    fn writes_ge_row_without_ranges() {
        let text = export_mps(&sample_model(), 0).unwrap();
        assert!(text.contains(" G c1"));
        assert!(!text.contains("RANGES"));
        assert!(text.contains(" BV BND x"));
        assert!(text.ends_with("ENDATA\n"));
    }

    #[test]
    fn maximize_negates_with_comment() {
        let mut m = sample_model();
        m.objectives[0].sense = ObjectiveSense::Max;
        let text = export_mps(&m, 0).unwrap();
        assert!(text.contains("* objective `cost` is maximized"));
        assert!(text.contains(" x OBJ -1"));
    }

    #[test]
    fn round_trip_preserves_structure() {
        let text = export_mps(&sample_model(), 0).unwrap();
        let parsed = parse_mps(&text).unwrap();
        assert_eq!(parsed.variables.len(), 2);
        assert_eq!(parsed.constraints.len(), 1);
        assert_eq!(parsed.constraints[0].sense, ConstraintSense::Ge);
        assert_eq!(parsed.constraints[0].rhs, 3.0);
        assert_eq!(parsed.variables[0].kind, VarKind::Binary);
        parsed.validate().unwrap();
    }

    #[test]
    fn round_trip_is_coefficient_exact() {
        let mut m = sample_model();
        m.constraints[0].terms[1].1 = 0.1 + 0.2; // deliberately awkward float
        m.constraints[0].rhs = 1.0e-7;
        let text = export_mps(&m, 0).unwrap();
        let parsed = parse_mps(&text).unwrap();
        assert_eq!(parsed.constraints[0].terms[1].1, 0.1 + 0.2);
        assert_eq!(parsed.constraints[0].rhs, 1.0e-7);
    }

    #[test]
    fn name_collision_detected() {
        let mut m = sample_model();
        m.variables[1].name = "x!".into(); // sanitizes to x_ ... still unique
        m.variables[0].name = "x_".into();
        let err = export_mps(&m, 0).unwrap_err();
        assert!(matches!(err, MpsError::NameCollision(_)));
    }

    #[test]
    fn integer_markers_round_trip() {
        let mut m = ModelIR::new("ints");
        let a = m.add_variable(VariableDef::integer("a", 0.0, 7.0));
        let b = m.add_variable(VariableDef::continuous("b", 0.0, f64::INFINITY));
        m.add_constraint(LinearConstraint {
            name: "r".into(),
            terms: vec![(a, 1.0), (b, 1.0)],
            sense: ConstraintSense::Le,
            rhs: 9.0,
        });
        m.add_objective(Objective {
            name: "obj".into(),
            sense: ObjectiveSense::Min,
            terms: vec![(a, -1.0), (b, 1.0)],
        });
        let text = export_mps(&m, 0).unwrap();
        assert!(text.contains("'INTORG'"));
        assert!(text.contains("'INTEND'"));
        let parsed = parse_mps(&text).unwrap();
        assert_eq!(parsed.variables[0].kind, VarKind::Integer);
        assert_eq!(parsed.variables[0].upper, 7.0);
        assert_eq!(parsed.variables[1].kind, VarKind::Continuous);
    }

    #[test]
    fn ranges_section_rejected() {
        let text = "NAME t\nROWS\n N OBJ\n L c\nCOLUMNS\n x c 1\nRANGES\n R c 1\nENDATA\n";
        assert!(matches!(
            parse_mps(text),
            Err(MpsError::UnsupportedSection(_))
        ));
    }
}
