//! Neutral mixed-integer linear program representation.
//!
//! Builders emit a [`ModelIR`]; every backend consumes one. Constraint and
//! objective terms reference variables by index into [`ModelIR::variables`],
//! which keeps large models compact while variable names stay available for
//! file export and solution maps.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Variable domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

/// A decision variable with bounds. Binary variables must carry bounds
/// within [0, 1]; integer variables must have integral finite bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableDef {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

impl VariableDef {
    pub fn binary(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn integer(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Integer,
            lower,
            upper,
        }
    }

    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            kind: VarKind::Continuous,
            lower,
            upper,
        }
    }

    pub fn is_integral(&self) -> bool {
        matches!(self.kind, VarKind::Binary | VarKind::Integer)
    }
}

/// Constraint row sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintSense {
    Le,
    Eq,
    Ge,
}

/// A linear row: `sum(coef * var) sense rhs`. Terms reference variable
/// indices of the owning model; duplicates within one row are not allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: ConstraintSense,
    pub rhs: f64,
}

/// Optimization direction of an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveSense {
    Min,
    Max,
}

/// A linear objective over the model's variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub name: String,
    pub sense: ObjectiveSense,
    pub terms: Vec<(usize, f64)>,
}

/// Model statistics: declared variables, constraint rows, constraint
/// non-zeros. Objective rows are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelStats {
    pub n_variables: usize,
    pub n_constraints: usize,
    pub n_nonzeros: usize,
}

/// The neutral MILP. Immutable after building; transformations return copies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelIR {
    pub name: String,
    pub variables: Vec<VariableDef>,
    pub constraints: Vec<LinearConstraint>,
    pub objectives: Vec<Objective>,
    /// Builder provenance and transformation notes.
    pub annotations: BTreeMap<String, String>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model `{model}` has no objective with index {index}")]
    BadObjectiveIndex { model: String, index: usize },
    #[error("term references variable index {index} but model has {n_vars} variables")]
    BadVariableIndex { index: usize, n_vars: usize },
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("duplicate constraint name `{0}`")]
    DuplicateConstraint(String),
    #[error("constraint `{name}` repeats variable `{var}` in its terms")]
    DuplicateTerm { name: String, var: String },
    #[error("constraint `{0}` has no terms")]
    EmptyConstraint(String),
    #[error("variable `{name}` has inconsistent bounds [{lower}, {upper}]")]
    BadBounds { name: String, lower: f64, upper: f64 },
    #[error("relax_fraction {0} outside [0, 1)")]
    BadRelaxFraction(f64),
    #[error("warm start names unknown variable `{0}`")]
    UnknownWarmStartVariable(String),
    #[error("warm start assigns non-integral value {value} to integral variable `{name}`")]
    FractionalWarmStart { name: String, value: f64 },
}

impl ModelIR {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            variables: Vec::new(),
            constraints: Vec::new(),
            objectives: Vec::new(),
            annotations: BTreeMap::new(),
        }
    }

    /// Appends a variable, returning its index.
    pub fn add_variable(&mut self, var: VariableDef) -> usize {
        self.variables.push(var);
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, c: LinearConstraint) {
        self.constraints.push(c);
    }

    pub fn add_objective(&mut self, o: Objective) {
        self.objectives.push(o);
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Exact counts of declared variables, constraint rows and constraint
    /// non-zeros. Invariant under constraint reordering.
    pub fn stats(&self) -> ModelStats {
        ModelStats {
            n_variables: self.variables.len(),
            n_constraints: self.constraints.len(),
            n_nonzeros: self.constraints.iter().map(|c| c.terms.len()).sum(),
        }
    }

    /// Structural well-formedness check: unique names, valid term indices,
    /// no duplicate terms, non-empty rows, consistent bounds.
    pub fn validate(&self) -> Result<(), ModelError> {
        let n = self.variables.len();
        let mut names = HashSet::with_capacity(n);
        for v in &self.variables {
            if !names.insert(v.name.as_str()) {
                return Err(ModelError::DuplicateVariable(v.name.clone()));
            }
            if v.lower > v.upper {
                return Err(ModelError::BadBounds {
                    name: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(ModelError::BadBounds {
                    name: v.name.clone(),
                    lower: v.lower,
                    upper: v.upper,
                });
            }
        }
        let mut row_names = HashSet::with_capacity(self.constraints.len());
        for c in &self.constraints {
            if !row_names.insert(c.name.as_str()) {
                return Err(ModelError::DuplicateConstraint(c.name.clone()));
            }
            if c.terms.is_empty() {
                return Err(ModelError::EmptyConstraint(c.name.clone()));
            }
            let mut seen = HashSet::with_capacity(c.terms.len());
            for &(idx, _) in &c.terms {
                if idx >= n {
                    return Err(ModelError::BadVariableIndex { index: idx, n_vars: n });
                }
                if !seen.insert(idx) {
                    return Err(ModelError::DuplicateTerm {
                        name: c.name.clone(),
                        var: self.variables[idx].name.clone(),
                    });
                }
            }
        }
        for o in &self.objectives {
            for &(idx, _) in &o.terms {
                if idx >= n {
                    return Err(ModelError::BadVariableIndex { index: idx, n_vars: n });
                }
            }
        }
        Ok(())
    }

    /// Evaluates an objective at a point given as a name → value map.
    /// Unnamed variables count as zero.
    pub fn eval_objective(&self, index: usize, values: &HashMap<String, f64>) -> Result<f64, ModelError> {
        let obj = self
            .objectives
            .get(index)
            .ok_or_else(|| ModelError::BadObjectiveIndex {
                model: self.name.clone(),
                index,
            })?;
        Ok(obj
            .terms
            .iter()
            .map(|&(i, c)| c * values.get(&self.variables[i].name).copied().unwrap_or(0.0))
            .sum())
    }

    /// Returns a copy with one extra row that prevents the selected
    /// objective from deteriorating past `bound`, optionally relaxed.
    ///
    /// For a minimized objective the row is `terms <= bound * (1 + relax)`;
    /// for a maximized one, `terms >= bound * (1 - relax)`.
    pub fn fix_objective_bound(
        &self,
        objective_index: usize,
        bound: f64,
        relax_fraction: f64,
    ) -> Result<ModelIR, ModelError> {
        if !(0.0..1.0).contains(&relax_fraction) {
            return Err(ModelError::BadRelaxFraction(relax_fraction));
        }
        let obj = self
            .objectives
            .get(objective_index)
            .ok_or_else(|| ModelError::BadObjectiveIndex {
                model: self.name.clone(),
                index: objective_index,
            })?;
        let (sense, rhs) = match obj.sense {
            ObjectiveSense::Min => (ConstraintSense::Le, bound * (1.0 + relax_fraction)),
            ObjectiveSense::Max => (ConstraintSense::Ge, bound * (1.0 - relax_fraction)),
        };
        let mut out = self.clone();
        let row_name = format!("bound_{}", obj.name);
        out.constraints.push(LinearConstraint {
            name: row_name.clone(),
            terms: obj.terms.clone(),
            sense,
            rhs,
        });
        out.annotations.insert(
            format!("objective_bound.{}", obj.name),
            format!("row={row_name} bound={bound} relax={relax_fraction}"),
        );
        Ok(out)
    }
}

/// Starting values handed to a backend as an initial incumbent.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WarmStart {
    pub values: BTreeMap<String, f64>,
}

impl WarmStart {
    pub fn from_values(values: impl IntoIterator<Item = (String, f64)>) -> Self {
        Self {
            values: values.into_iter().collect(),
        }
    }

    /// Every named variable must exist in the model and integral variables
    /// must carry integral values.
    pub fn validate(&self, model: &ModelIR) -> Result<(), ModelError> {
        let by_name: HashMap<&str, &VariableDef> =
            model.variables.iter().map(|v| (v.name.as_str(), v)).collect();
        for (name, &value) in &self.values {
            let var = by_name
                .get(name.as_str())
                .ok_or_else(|| ModelError::UnknownWarmStartVariable(name.clone()))?;
            if var.is_integral() && (value - value.round()).abs() > 1e-9 {
                return Err(ModelError::FractionalWarmStart {
                    name: name.clone(),
                    value,
                });
            }
        }
        Ok(())
    }
}
