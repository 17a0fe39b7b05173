//! Boolean logic lowered to linear 0-1 constraints.
//!
//! Gates follow the standard encodings: for `z = x AND y` the constraints
//! are `z >= x + y - 1`, `z <= x`, `z <= y`; OR mirrors them; NOT is
//! `z + x = 1`; XOR needs the four-inequality block. AND/OR generalize to
//! n inputs with the aggregated forms. All encodings are equalities in the
//! sense that any feasible completion pins the output to the boolean value
//! of the inputs.
//!
//! On top of the gates sit the two layout operators: `same` (two selection
//! vectors pick the same candidate) and `enum_expr` (number of distinct
//! candidates picked across a set of vectors). Both are evaluated only on
//! the candidate indices that survive support pruning; everything else
//! folds away at encode time.

use crate::attrspace::AttrKind;
use crate::bip::BipModel;
use crate::error::{Error, Result};

/// Handle to one binary variable of a [`BipModel`].
///
/// Whether the variable is free or fixed to a constant lives in the model's
/// variable table; fixed variables are excluded from the solver's free set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Comparison relation of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl std::fmt::Display for Relation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Relation::Le => write!(f, "<="),
            Relation::Ge => write!(f, ">="),
            Relation::Eq => write!(f, "="),
        }
    }
}

/// An integral linear constraint over binary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<(i64, Var)>,
    pub relation: Relation,
    pub rhs: i64,
}

impl LinearConstraint {
    pub fn new(terms: Vec<(i64, Var)>, relation: Relation, rhs: i64) -> Self {
        LinearConstraint { terms, relation, rhs }
    }

    /// Evaluates the constraint under a total assignment.
    pub fn holds(&self, assignment: &[bool]) -> bool {
        let lhs: i64 = self
            .terms
            .iter()
            .map(|(c, v)| if assignment[v.index()] { *c } else { 0 })
            .sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

/// A linear expression with real coefficients, used for objective pieces.
#[derive(Debug, Clone, Default)]
pub struct LinearExpression {
    pub terms: Vec<(f64, Var)>,
}

impl LinearExpression {
    pub fn value(&self, assignment: &[bool]) -> f64 {
        self.terms
            .iter()
            .map(|(c, v)| if assignment[v.index()] { *c } else { 0.0 })
            .sum()
    }
}

/// Binary selection vector of one component over one attribute space.
#[derive(Debug, Clone)]
pub struct SelectionVector {
    pub attribute: AttrKind,
    /// Component index within the layout.
    pub component: usize,
    /// One variable per candidate; variables outside `support` are fixed 0.
    pub vars: Vec<Var>,
    /// Sorted candidate indices whose variable is not fixed to zero.
    pub support: Vec<usize>,
}

/// Supported logic gates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    And,
    Or,
    Not,
    Xor,
}

impl Gate {
    fn name(self) -> &'static str {
        match self {
            Gate::And => "and",
            Gate::Or => "or",
            Gate::Not => "not",
            Gate::Xor => "xor",
        }
    }
}

/// Encodes `gate` over `inputs`, returning the output variable.
///
/// Fixed inputs fold at encode time: an AND with a fixed-0 input returns a
/// fixed-0 variable without emitting constraints, `And(x, fixed-1)` returns
/// `x` itself, and so on. Only genuinely undetermined gates emit their
/// constraint block.
pub fn encode_gate(gate: Gate, inputs: &[Var], model: &mut BipModel) -> Result<Var> {
    match gate {
        Gate::Not => {
            if inputs.len() != 1 {
                return Err(Error::Arity { gate: gate.name(), expected: "1", got: inputs.len() });
            }
            let x = inputs[0];
            if let Some(v) = model.fixed_value(x) {
                return Ok(model.constant(!v));
            }
            let z = model.fresh_var();
            model.add_constraint(LinearConstraint::new(
                vec![(1, z), (1, x)],
                Relation::Eq,
                1,
            ));
            Ok(z)
        }
        Gate::Xor => {
            if inputs.len() != 2 {
                return Err(Error::Arity { gate: gate.name(), expected: "2", got: inputs.len() });
            }
            let (x, y) = (inputs[0], inputs[1]);
            match (model.fixed_value(x), model.fixed_value(y)) {
                (Some(a), Some(b)) => Ok(model.constant(a != b)),
                (Some(false), None) => Ok(y),
                (None, Some(false)) => Ok(x),
                (Some(true), None) => encode_gate(Gate::Not, &[y], model),
                (None, Some(true)) => encode_gate(Gate::Not, &[x], model),
                (None, None) => {
                    let z = model.fresh_var();
                    model.add_constraint(LinearConstraint::new(
                        vec![(1, z), (-1, x), (-1, y)],
                        Relation::Le,
                        0,
                    ));
                    model.add_constraint(LinearConstraint::new(
                        vec![(1, z), (-1, x), (1, y)],
                        Relation::Ge,
                        0,
                    ));
                    model.add_constraint(LinearConstraint::new(
                        vec![(1, z), (1, x), (-1, y)],
                        Relation::Ge,
                        0,
                    ));
                    model.add_constraint(LinearConstraint::new(
                        vec![(1, z), (1, x), (1, y)],
                        Relation::Le,
                        2,
                    ));
                    Ok(z)
                }
            }
        }
        Gate::And | Gate::Or => {
            if inputs.len() < 2 {
                return Err(Error::Arity { gate: gate.name(), expected: ">= 2", got: inputs.len() });
            }
            // `absorbing` short-circuits the gate; `neutral` inputs drop out.
            let absorbing = gate == Gate::Or;
            let mut live = Vec::with_capacity(inputs.len());
            for &x in inputs {
                match model.fixed_value(x) {
                    Some(v) if v == absorbing => return Ok(model.constant(absorbing)),
                    Some(_) => {}
                    None => live.push(x),
                }
            }
            match live.len() {
                0 => Ok(model.constant(!absorbing)),
                1 => Ok(live[0]),
                n => {
                    let z = model.fresh_var();
                    let n = n as i64;
                    if gate == Gate::And {
                        // z >= sum(x) - (n - 1); z <= x_i
                        let mut terms = vec![(-1, z)];
                        terms.extend(live.iter().map(|&x| (1, x)));
                        model.add_constraint(LinearConstraint::new(terms, Relation::Le, n - 1));
                        for &x in &live {
                            model.add_constraint(LinearConstraint::new(
                                vec![(1, z), (-1, x)],
                                Relation::Le,
                                0,
                            ));
                        }
                    } else {
                        // z <= sum(x); z >= x_i
                        let mut terms = vec![(1, z)];
                        terms.extend(live.iter().map(|&x| (-1, x)));
                        model.add_constraint(LinearConstraint::new(terms, Relation::Le, 0));
                        for &x in &live {
                            model.add_constraint(LinearConstraint::new(
                                vec![(-1, z), (1, x)],
                                Relation::Le,
                                0,
                            ));
                        }
                    }
                    Ok(z)
                }
            }
        }
    }
}

/// OR over one or more inputs; a single input is returned as-is.
///
/// Internal helper for the operators below, which legitimately reach arity
/// one after pruning.
pub(crate) fn or_any(inputs: &[Var], model: &mut BipModel) -> Result<Var> {
    match inputs.len() {
        0 => Err(Error::EmptyArgument),
        1 => Ok(match model.fixed_value(inputs[0]) {
            Some(v) => model.constant(v),
            None => inputs[0],
        }),
        _ => encode_gate(Gate::Or, inputs, model),
    }
}

/// Indicator that two selection vectors choose the same candidate:
/// `NOT(OR_j(x_aj XOR x_bj))`.
///
/// XOR terms are generated only for indices in the union of the two
/// supports; an index present on one side only folds to that side's
/// variable, and disjoint supports fold the whole operator to fixed 0.
pub fn same(a: &SelectionVector, b: &SelectionVector, model: &mut BipModel) -> Result<Var> {
    if a.attribute != b.attribute {
        return Err(Error::AttributeMismatch { left: a.attribute.name(), right: b.attribute.name() });
    }
    if a.vars.len() != b.vars.len() {
        return Err(Error::AttributeMismatch { left: a.attribute.name(), right: b.attribute.name() });
    }
    if a.support.iter().all(|j| !b.support.contains(j)) {
        return Ok(model.constant(false));
    }
    let mut union: Vec<usize> = a.support.iter().chain(b.support.iter()).copied().collect();
    union.sort_unstable();
    union.dedup();
    let mut diffs = Vec::with_capacity(union.len());
    for j in union {
        let d = encode_gate(Gate::Xor, &[a.vars[j], b.vars[j]], model)?;
        diffs.push(d);
    }
    let any_diff = or_any(&diffs, model)?;
    encode_gate(Gate::Not, &[any_diff], model)
}

/// Number of distinct candidates selected across `vectors`, as a linear
/// expression `sum_j y_j` with `y_j = OR_i x_ij`.
///
/// Candidates outside every support contribute nothing.
pub fn enum_expr(vectors: &[&SelectionVector], model: &mut BipModel) -> Result<LinearExpression> {
    let first = vectors.first().ok_or(Error::EmptyArgument)?;
    let attribute = first.attribute;
    let width = first.vars.len();
    for v in vectors {
        if v.attribute != attribute || v.vars.len() != width {
            return Err(Error::AttributeMismatch { left: attribute.name(), right: v.attribute.name() });
        }
    }
    let mut expr = LinearExpression::default();
    for j in 0..width {
        let participants: Vec<Var> = vectors
            .iter()
            .filter(|v| v.support.contains(&j))
            .map(|v| v.vars[j])
            .collect();
        if participants.is_empty() {
            continue;
        }
        let y = or_any(&participants, model)?;
        expr.terms.push((1.0, y));
    }
    Ok(expr)
}

/// Candidate indices whose residual is within `factor * delta`; falls back
/// to the nearest candidate so every component keeps at least one.
pub fn prune_support(residuals: &[f64], delta: f64, factor: f64) -> Vec<usize> {
    let radius = factor * delta;
    let within: Vec<usize> = residuals
        .iter()
        .enumerate()
        .filter(|(_, r)| r.abs() <= radius)
        .map(|(j, _)| j)
        .collect();
    if !within.is_empty() {
        return within;
    }
    let nearest = residuals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .map(|(j, _)| j);
    nearest.into_iter().collect()
}
