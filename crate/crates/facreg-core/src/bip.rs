//! Exact 0-1 linear programming.
//!
//! Three entry points: [`solve_exhaustive`] enumerates every assignment of
//! a small model and is the oracle everything else is checked against;
//! [`solve_bb`] is the production branch-and-bound search; [`export_lp`]
//! writes the model in CPLEX LP text format for external cross-checks.
//!
//! The branch-and-bound search is best-first. Its lower bound combines the
//! objective contribution of variables fixed by branching, the minimum
//! remaining coefficient of every exactly-one group (detected from `= 1`
//! constraints over disjoint positive-unit terms), and the negative
//! coefficients of unconstrained free variables. Bound-consistency
//! propagation runs on every branch; ties between equal-value optima are
//! broken toward the lexicographically smallest assignment so results
//! match the oracle bit for bit.

use std::collections::VecDeque;
use std::time::Instant;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::logic::{LinearConstraint, Relation, Var};

/// Hard cap on free variables for exhaustive enumeration.
pub const EXHAUSTIVE_CAP: usize = 25;

/// A binary integer program: variables, integral linear constraints and a
/// real linear objective to minimize.
#[derive(Debug, Clone, Default)]
pub struct BipModel {
    vars: Vec<Option<bool>>,
    constraints: Vec<LinearConstraint>,
    objective: Vec<(f64, Var)>,
}

impl BipModel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocates a new free variable.
    pub fn fresh_var(&mut self) -> Var {
        let v = Var(self.vars.len() as u32);
        self.vars.push(None);
        v
    }

    /// Allocates a variable fixed to `value`.
    pub fn constant(&mut self, value: bool) -> Var {
        let v = Var(self.vars.len() as u32);
        self.vars.push(Some(value));
        v
    }

    /// Fixes an existing variable. Re-fixing to a conflicting value is a
    /// programming error.
    pub fn fix_var(&mut self, var: Var, value: bool) {
        let slot = &mut self.vars[var.index()];
        assert!(
            slot.is_none() || *slot == Some(value),
            "variable {var:?} already fixed to the opposite value"
        );
        *slot = Some(value);
    }

    pub fn fixed_value(&self, var: Var) -> Option<bool> {
        self.vars[var.index()]
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_free(&self) -> usize {
        self.vars.iter().filter(|v| v.is_none()).count()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &[(f64, Var)] {
        &self.objective
    }

    pub fn add_constraint(&mut self, c: LinearConstraint) {
        self.constraints.push(c);
    }

    pub fn add_objective_term(&mut self, coeff: f64, var: Var) {
        self.objective.push((coeff, var));
    }

    pub fn set_objective(&mut self, terms: Vec<(f64, Var)>) {
        self.objective = terms;
    }

    /// Objective value of a total assignment, summed in term order so that
    /// both solvers produce bit-identical results.
    pub fn eval_objective(&self, assignment: &[bool]) -> f64 {
        self.objective
            .iter()
            .map(|(c, v)| if assignment[v.index()] { *c } else { 0.0 })
            .sum()
    }

    fn free_indices(&self) -> Vec<usize> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_none())
            .map(|(i, _)| i)
            .collect()
    }

    /// Total assignment with free variables at `false` and fixed variables
    /// at their pinned values.
    fn base_assignment(&self) -> Vec<bool> {
        self.vars.iter().map(|v| v.unwrap_or(false)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    TimedOut,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveStatus::Optimal => write!(f, "optimal"),
            SolveStatus::Infeasible => write!(f, "infeasible"),
            SolveStatus::TimedOut => write!(f, "timed_out"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    /// Branch-and-bound nodes expanded (0 for trivially solved models).
    pub nodes: u64,
    pub wall_ms: f64,
    pub free_vars: usize,
}

/// Outcome of a solve.
#[derive(Debug, Clone)]
pub struct Solution {
    /// Total assignment; `None` when infeasible or timed out without an
    /// incumbent.
    pub assignment: Option<Vec<bool>>,
    pub objective_value: f64,
    pub status: SolveStatus,
    pub stats: SolveStats,
}

impl Solution {
    fn infeasible(free_vars: usize, start: Instant) -> Self {
        Solution {
            assignment: None,
            objective_value: f64::INFINITY,
            status: SolveStatus::Infeasible,
            stats: SolveStats { nodes: 0, wall_ms: ms_since(start), free_vars },
        }
    }
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn feasible(model: &BipModel, assignment: &[bool]) -> bool {
    model.constraints.iter().all(|c| c.holds(assignment))
}

/// Enumerates all assignments of the free variables and returns the
/// feasible one minimizing the objective; ties go to the lexicographically
/// smallest assignment in variable index order.
pub fn solve_exhaustive(model: &BipModel) -> Result<Solution> {
    let start = Instant::now();
    let free = model.free_indices();
    if free.len() > EXHAUSTIVE_CAP {
        return Err(Error::TooLarge { free: free.len(), cap: EXHAUSTIVE_CAP });
    }
    let mut assignment = model.base_assignment();
    let mut best: Option<(f64, Vec<bool>)> = None;
    let k = free.len();
    for code in 0u64..(1u64 << k) {
        // free[0] is the most significant bit, so ascending codes enumerate
        // assignments in lexicographic order and the first strict optimum
        // wins ties.
        for (t, &v) in free.iter().enumerate() {
            assignment[v] = (code >> (k - 1 - t)) & 1 == 1;
        }
        if !feasible(model, &assignment) {
            continue;
        }
        let value = model.eval_objective(&assignment);
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, assignment.clone()));
        }
    }
    Ok(match best {
        Some((value, assignment)) => Solution {
            assignment: Some(assignment),
            objective_value: value,
            status: SolveStatus::Optimal,
            stats: SolveStats { nodes: 1 << k, wall_ms: ms_since(start), free_vars: k },
        },
        None => Solution::infeasible(k, start),
    })
}

/// Checks a total assignment against every constraint.
#[derive(Debug, Clone, Default)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// Indices of violated constraints.
    pub violated: Vec<usize>,
    /// Variables whose assigned value contradicts their fixed value.
    pub fixed_mismatches: Vec<Var>,
}

pub fn check_feasible(model: &BipModel, assignment: &[bool]) -> Result<FeasibilityReport> {
    if assignment.len() != model.num_vars() {
        return Err(Error::PartialAssignment { expected: model.num_vars(), got: assignment.len() });
    }
    let mut report = FeasibilityReport { feasible: true, ..Default::default() };
    for (i, v) in model.vars.iter().enumerate() {
        if let Some(fixed) = v {
            if assignment[i] != *fixed {
                report.fixed_mismatches.push(Var(i as u32));
            }
        }
    }
    for (i, c) in model.constraints.iter().enumerate() {
        if !c.holds(assignment) {
            report.violated.push(i);
        }
    }
    report.feasible = report.violated.is_empty() && report.fixed_mismatches.is_empty();
    Ok(report)
}

// ---------------------------------------------------------------------------
// Branch and bound
// ---------------------------------------------------------------------------

/// One normalized constraint: `sum coeff * x <= rhs` over free variables,
/// with fixed-variable contributions folded into the right-hand side.
struct NormCon {
    terms: Vec<(u32, i64)>,
    rhs: i64,
    /// Activity bounds with every free variable at its cheapest/dearest value.
    base_lo: i64,
    base_hi: i64,
}

struct Prep {
    cons: Vec<NormCon>,
    var_cons: Vec<Vec<u32>>,
    /// Exactly-one groups over disjoint free variables.
    groups: Vec<Vec<u32>>,
    var_group: Vec<i32>,
    obj: Vec<f64>,
    /// Objective constant from model-fixed variables.
    base_const: f64,
    /// Free variables ordered by branching priority (largest |coeff| first).
    branch_order: Vec<u32>,
    free_count: usize,
}

enum PrepOutcome {
    Ready(Prep),
    Infeasible,
}

fn prepare(model: &BipModel) -> PrepOutcome {
    let n = model.num_vars();
    let mut obj = vec![0.0f64; n];
    let mut base_const = 0.0;
    for (c, v) in &model.objective {
        match model.fixed_value(*v) {
            Some(true) => base_const += c,
            Some(false) => {}
            None => obj[v.index()] += c,
        }
    }

    // Exactly-one groups come from the original equality constraints.
    let mut var_group = vec![-1i32; n];
    let mut groups: Vec<Vec<u32>> = Vec::new();
    for c in &model.constraints {
        if c.relation != Relation::Eq {
            continue;
        }
        if !c.terms.iter().all(|(k, _)| *k == 1) {
            continue;
        }
        let mut rhs = c.rhs;
        let mut members = Vec::with_capacity(c.terms.len());
        let mut ok = true;
        for (_, v) in &c.terms {
            match model.fixed_value(*v) {
                Some(true) => rhs -= 1,
                Some(false) => {}
                None => members.push(v.0),
            }
        }
        members.sort_unstable();
        members.dedup();
        if members.len() != c.terms.iter().filter(|(_, v)| model.fixed_value(*v).is_none()).count() {
            ok = false; // duplicated variable in one constraint
        }
        if ok && rhs == 1 && members.len() >= 2 && members.iter().all(|&v| var_group[v as usize] < 0)
        {
            let id = groups.len() as i32;
            for &v in &members {
                var_group[v as usize] = id;
            }
            groups.push(members);
        }
    }

    // Normalize every constraint to <= over free variables.
    let mut cons: Vec<NormCon> = Vec::new();
    let mut push = |terms: Vec<(u32, i64)>, rhs: i64| -> bool {
        if terms.is_empty() {
            return rhs >= 0; // constant constraint: feasible iff 0 <= rhs
        }
        let base_lo = terms.iter().map(|(_, k)| k.min(&0)).sum();
        let base_hi = terms.iter().map(|(_, k)| k.max(&0)).sum();
        cons.push(NormCon { terms, rhs, base_lo, base_hi });
        true
    };
    for c in &model.constraints {
        let mut fixed_sum = 0i64;
        let mut terms: Vec<(u32, i64)> = Vec::with_capacity(c.terms.len());
        for (k, v) in &c.terms {
            match model.fixed_value(*v) {
                Some(true) => fixed_sum += k,
                Some(false) => {}
                None => terms.push((v.0, *k)),
            }
        }
        let le = |t: &Vec<(u32, i64)>| t.clone();
        let ge = |t: &Vec<(u32, i64)>| t.iter().map(|(v, k)| (*v, -k)).collect::<Vec<_>>();
        let ok = match c.relation {
            Relation::Le => push(le(&terms), c.rhs - fixed_sum),
            Relation::Ge => push(ge(&terms), fixed_sum - c.rhs),
            Relation::Eq => {
                push(le(&terms), c.rhs - fixed_sum) && push(ge(&terms), fixed_sum - c.rhs)
            }
        };
        if !ok {
            return PrepOutcome::Infeasible;
        }
    }

    let mut var_cons = vec![Vec::new(); n];
    for (i, c) in cons.iter().enumerate() {
        for (v, _) in &c.terms {
            var_cons[*v as usize].push(i as u32);
        }
    }

    let free: Vec<u32> = (0..n as u32).filter(|v| model.fixed_value(Var(*v)).is_none()).collect();
    let mut branch_order = free.clone();
    branch_order.sort_by(|a, b| {
        obj[b.index_usize()]
            .abs()
            .total_cmp(&obj[a.index_usize()].abs())
            .then(a.cmp(b))
    });

    PrepOutcome::Ready(Prep {
        cons,
        var_cons,
        groups,
        var_group,
        obj,
        base_const,
        branch_order,
        free_count: free.len(),
    })
}

trait IndexUsize {
    fn index_usize(&self) -> usize;
}
impl IndexUsize for u32 {
    fn index_usize(&self) -> usize {
        *self as usize
    }
}

/// Mutable search state, rebuilt per expanded node via epoch stamps.
struct SearchState {
    epoch: u64,
    val: Vec<bool>,
    stamp: Vec<u64>,
    act_lo: Vec<i64>,
    act_hi: Vec<i64>,
    con_stamp: Vec<u64>,
    trail: Vec<u32>,
    assigned_count: usize,
    queue: VecDeque<u32>,
    in_queue: Vec<bool>,
}

impl SearchState {
    fn new(n_vars: usize, n_cons: usize) -> Self {
        SearchState {
            epoch: 0,
            val: vec![false; n_vars],
            stamp: vec![0; n_vars],
            act_lo: vec![0; n_cons],
            act_hi: vec![0; n_cons],
            con_stamp: vec![0; n_cons],
            trail: Vec::new(),
            assigned_count: 0,
            queue: VecDeque::new(),
            in_queue: vec![false; n_cons],
        }
    }

    fn begin_epoch(&mut self) {
        self.epoch += 1;
        self.trail.clear();
        self.assigned_count = 0;
        self.queue.clear();
        self.in_queue.iter_mut().for_each(|b| *b = false);
    }

    fn assigned(&self, v: u32) -> bool {
        self.stamp[v as usize] == self.epoch
    }

    fn touch_con(&mut self, prep: &Prep, c: u32) {
        let ci = c as usize;
        if self.con_stamp[ci] != self.epoch {
            self.con_stamp[ci] = self.epoch;
            self.act_lo[ci] = prep.cons[ci].base_lo;
            self.act_hi[ci] = prep.cons[ci].base_hi;
        }
    }

    fn lo(&mut self, prep: &Prep, c: u32) -> i64 {
        self.touch_con(prep, c);
        self.act_lo[c as usize]
    }

    /// Assigns `v = b`, updating constraint activities. When `enqueue` is
    /// set, affected constraints are queued for propagation.
    fn apply(&mut self, prep: &Prep, v: u32, b: bool, enqueue: bool) {
        debug_assert!(!self.assigned(v));
        self.stamp[v as usize] = self.epoch;
        self.val[v as usize] = b;
        self.trail.push(v);
        self.assigned_count += 1;
        for &c in &prep.var_cons[v as usize] {
            self.touch_con(prep, c);
            let k = coeff_of(&prep.cons[c as usize], v);
            let contrib = if b { k } else { 0 };
            self.act_lo[c as usize] += contrib - k.min(0);
            self.act_hi[c as usize] += contrib - k.max(0);
            if enqueue && !self.in_queue[c as usize] {
                self.in_queue[c as usize] = true;
                self.queue.push_back(c);
            }
        }
    }

    fn undo_to(&mut self, prep: &Prep, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            let b = self.val[v as usize];
            for &c in &prep.var_cons[v as usize] {
                let k = coeff_of(&prep.cons[c as usize], v);
                let contrib = if b { k } else { 0 };
                self.act_lo[c as usize] -= contrib - k.min(0);
                self.act_hi[c as usize] -= contrib - k.max(0);
            }
            self.stamp[v as usize] = 0;
            self.assigned_count -= 1;
        }
    }

    /// Bound-consistency propagation to fixpoint. Returns false on conflict.
    fn propagate(&mut self, prep: &Prep) -> bool {
        while let Some(c) = self.queue.pop_front() {
            self.in_queue[c as usize] = false;
            let rhs = prep.cons[c as usize].rhs;
            let mut lo = self.lo(prep, c);
            if lo > rhs {
                self.queue.clear();
                self.in_queue.iter_mut().for_each(|b| *b = false);
                return false;
            }
            if self.act_hi[c as usize] <= rhs {
                continue; // entailed regardless of the remaining variables
            }
            let nterms = prep.cons[c as usize].terms.len();
            for t in 0..nterms {
                let (v, k) = prep.cons[c as usize].terms[t];
                if self.assigned(v) {
                    continue;
                }
                if k > 0 && lo + k > rhs {
                    self.apply(prep, v, false, true);
                    lo = self.lo(prep, c);
                } else if k < 0 && lo - k > rhs {
                    self.apply(prep, v, true, true);
                    lo = self.lo(prep, c);
                }
                if lo > rhs {
                    self.queue.clear();
                    self.in_queue.iter_mut().for_each(|b| *b = false);
                    return false;
                }
            }
        }
        true
    }

    /// Lower bound on any completion of the current partial assignment.
    fn lower_bound(&self, prep: &Prep) -> f64 {
        let mut lb = prep.base_const;
        for &v in &prep.branch_order {
            let vi = v as usize;
            let c = prep.obj[vi];
            if c == 0.0 {
                continue;
            }
            if self.assigned(v) {
                if self.val[vi] {
                    lb += c;
                }
            } else if prep.var_group[vi] < 0 && c < 0.0 {
                lb += c;
            }
        }
        for group in &prep.groups {
            let mut satisfied = false;
            let mut min_coeff = f64::INFINITY;
            for &v in group {
                if self.assigned(v) {
                    if self.val[v as usize] {
                        satisfied = true;
                        break;
                    }
                } else {
                    min_coeff = min_coeff.min(prep.obj[v as usize]);
                }
            }
            if !satisfied && min_coeff.is_finite() {
                lb += min_coeff;
            }
        }
        lb
    }
}

fn coeff_of(con: &NormCon, v: u32) -> i64 {
    con.terms
        .iter()
        .find(|(tv, _)| *tv == v)
        .map(|(_, k)| *k)
        .expect("variable listed in var_cons appears in constraint")
}

struct NodeRec {
    parent: u32,
    decisions: Vec<(u32, bool)>,
}

#[derive(PartialEq)]
struct HeapKey {
    lb: f64,
    depth: u32,
    seq: u64,
    node: u32,
}

impl Eq for HeapKey {}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap pops the maximum, so "greater" must mean "expand next":
        // smaller bound, then deeper, then earlier creation.
        other
            .lb
            .total_cmp(&self.lb)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Best-first branch-and-bound. Returns the exact optimum, matching
/// [`solve_exhaustive`] in both objective value and tie-broken assignment;
/// on time-limit expiry the best incumbent is returned as `TimedOut`.
pub fn solve_bb(model: &BipModel, config: &SolverConfig) -> Solution {
    let start = Instant::now();
    let free_count = model.num_free();
    if config.workers > 1 {
        // The search contract is worker-count independent; a single
        // deterministic worker satisfies it.
        log::debug!("workers = {} requested; running single-threaded search", config.workers);
    }

    let prep = match prepare(model) {
        PrepOutcome::Ready(p) => p,
        PrepOutcome::Infeasible => return Solution::infeasible(free_count, start),
    };

    if free_count == 0 {
        let assignment = model.base_assignment();
        if feasible(model, &assignment) {
            let value = model.eval_objective(&assignment);
            return Solution {
                assignment: Some(assignment),
                objective_value: value,
                status: SolveStatus::Optimal,
                stats: SolveStats { nodes: 0, wall_ms: ms_since(start), free_vars: 0 },
            };
        }
        return Solution::infeasible(0, start);
    }

    let mut state = SearchState::new(model.num_vars(), prep.cons.len());
    let mut nodes: Vec<NodeRec> = vec![NodeRec { parent: u32::MAX, decisions: Vec::new() }];
    let mut heap = std::collections::BinaryHeap::new();
    let mut best: Option<(f64, Vec<bool>)> = None;
    let mut expanded: u64 = 0;
    let mut seq: u64 = 0;
    let mut timed_out = false;

    let margin = |best: &Option<(f64, Vec<bool>)>| -> f64 {
        best.as_ref().map_or(f64::INFINITY, |(v, _)| v + 1e-9 * v.abs().max(1.0))
    };

    let total_assignment = |state: &SearchState, model: &BipModel| -> Vec<bool> {
        (0..model.num_vars())
            .map(|i| model.fixed_value(Var(i as u32)).unwrap_or(state.val[i]))
            .collect()
    };

    // Lexicographic comparison over free variables in index order.
    let lex_less = |a: &[bool], b: &[bool]| -> bool {
        for i in 0..a.len() {
            if a[i] != b[i] {
                return !a[i];
            }
        }
        false
    };

    let offer_incumbent = |state: &SearchState, best: &mut Option<(f64, Vec<bool>)>| {
        let assignment = total_assignment(state, model);
        debug_assert!(feasible(model, &assignment));
        let value = model.eval_objective(&assignment);
        match best {
            None => *best = Some((value, assignment)),
            Some((bv, ba)) => {
                if value < *bv || (value == *bv && lex_less(&assignment, ba)) {
                    *best = Some((value, assignment));
                }
            }
        }
    };

    // Root: propagate every constraint once.
    state.begin_epoch();
    for c in 0..prep.cons.len() as u32 {
        state.in_queue[c as usize] = true;
        state.queue.push_back(c);
    }
    if !state.propagate(&prep) {
        return Solution::infeasible(free_count, start);
    }
    let root_decisions: Vec<(u32, bool)> =
        state.trail.iter().map(|&v| (v, state.val[v as usize])).collect();
    if state.assigned_count == prep.free_count {
        offer_incumbent(&state, &mut best);
        let (value, assignment) = best.unwrap();
        return Solution {
            assignment: Some(assignment),
            objective_value: value,
            status: SolveStatus::Optimal,
            stats: SolveStats { nodes: 0, wall_ms: ms_since(start), free_vars: free_count },
        };
    }
    let root_lb = state.lower_bound(&prep);
    nodes[0].decisions = root_decisions;
    heap.push(HeapKey { lb: root_lb, depth: 0, seq, node: 0 });

    while let Some(entry) = heap.pop() {
        if entry.lb > margin(&best) {
            continue;
        }
        expanded += 1;
        if expanded % 256 == 0 && start.elapsed().as_secs_f64() > config.time_limit_s {
            timed_out = true;
            break;
        }

        // Rebuild the node's assignment from its ancestor chain.
        state.begin_epoch();
        let mut chain = Vec::new();
        let mut cursor = entry.node;
        while cursor != u32::MAX {
            chain.push(cursor);
            cursor = nodes[cursor as usize].parent;
        }
        for &nid in chain.iter().rev() {
            for &(v, b) in &nodes[nid as usize].decisions {
                state.apply(&prep, v, b, false);
            }
        }

        let branch_var = prep
            .branch_order
            .iter()
            .copied()
            .find(|&v| !state.assigned(v));
        let Some(branch_var) = branch_var else {
            offer_incumbent(&state, &mut best);
            continue;
        };
        let prefer = prep.obj[branch_var as usize] < 0.0;

        for value in [prefer, !prefer] {
            let mark = state.trail.len();
            state.apply(&prep, branch_var, value, true);
            if state.propagate(&prep) {
                if state.assigned_count == prep.free_count {
                    offer_incumbent(&state, &mut best);
                } else {
                    let lb = state.lower_bound(&prep);
                    if lb <= margin(&best) {
                        let decisions =
                            state.trail[mark..].iter().map(|&v| (v, state.val[v as usize])).collect();
                        nodes.push(NodeRec { parent: entry.node, decisions });
                        seq += 1;
                        heap.push(HeapKey {
                            lb,
                            depth: entry.depth + 1,
                            seq,
                            node: (nodes.len() - 1) as u32,
                        });
                    }
                }
            }
            state.undo_to(&prep, mark);
        }
    }

    let wall_ms = ms_since(start);
    match (best, timed_out) {
        (Some((value, assignment)), false) => Solution {
            assignment: Some(assignment),
            objective_value: value,
            status: SolveStatus::Optimal,
            stats: SolveStats { nodes: expanded, wall_ms, free_vars: free_count },
        },
        (Some((value, assignment)), true) => Solution {
            assignment: Some(assignment),
            objective_value: value,
            status: SolveStatus::TimedOut,
            stats: SolveStats { nodes: expanded, wall_ms, free_vars: free_count },
        },
        (None, true) => Solution {
            assignment: None,
            objective_value: f64::INFINITY,
            status: SolveStatus::TimedOut,
            stats: SolveStats { nodes: expanded, wall_ms, free_vars: free_count },
        },
        (None, false) => Solution {
            assignment: None,
            objective_value: f64::INFINITY,
            status: SolveStatus::Infeasible,
            stats: SolveStats { nodes: expanded, wall_ms, free_vars: free_count },
        },
    }
}

// ---------------------------------------------------------------------------
// LP export
// ---------------------------------------------------------------------------

fn push_term_f64(out: &mut String, first: bool, coeff: f64, var: Var) {
    let mag = coeff.abs();
    let sign = coeff < 0.0;
    if first {
        if sign {
            out.push_str("- ");
        }
    } else if sign {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    if mag != 1.0 {
        out.push_str(&format!("{mag} "));
    }
    out.push_str(&format!("x{}", var.0));
}

/// Writes the model in CPLEX LP text format. Fixed variables are pinned in
/// the `Bounds` section; all variables are declared `Binary`.
pub fn export_lp(model: &BipModel) -> String {
    let mut out = String::new();
    out.push_str("\\ binary integer program\n");
    out.push_str("Minimize\n obj:");
    let mut first = true;
    for (c, v) in &model.objective {
        if *c == 0.0 {
            continue;
        }
        out.push(' ');
        let mut term = String::new();
        push_term_f64(&mut term, first, *c, *v);
        out.push_str(term.trim_start());
        first = false;
    }
    out.push('\n');

    out.push_str("Subject To\n");
    for (i, con) in model.constraints.iter().enumerate() {
        out.push_str(&format!(" c{i}:"));
        let mut first = true;
        for (k, v) in &con.terms {
            if *k == 0 {
                continue;
            }
            out.push(' ');
            let mut term = String::new();
            push_term_f64(&mut term, first, *k as f64, *v);
            out.push_str(term.trim_start());
            first = false;
        }
        if first {
            out.push_str(" 0 x0"); // degenerate constant constraint
        }
        out.push_str(&format!(" {} {}\n", con.relation, con.rhs));
    }

    out.push_str("Bounds\n");
    for i in 0..model.num_vars() {
        if let Some(v) = model.fixed_value(Var(i as u32)) {
            out.push_str(&format!(" x{} = {}\n", i, if v { 1 } else { 0 }));
        }
    }

    out.push_str("Binary\n");
    let names: Vec<String> = (0..model.num_vars()).map(|i| format!("x{i}")).collect();
    for chunk in names.chunks(10) {
        out.push(' ');
        out.push_str(&chunk.join(" "));
        out.push('\n');
    }
    out.push_str("End\n");
    out
}
